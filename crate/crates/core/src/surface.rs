//! Immersed surfaces in E^4 as jet evaluators.
//!
//! A meridian surface is `X(u, v) = f(u) r(v) + g(u) e4` with `r` on the unit
//! sphere of `span{e1, e2, e3}`. Its jets follow from the chain rule through
//! the spherical Frenet equations, so no differentiation error enters them.

use std::fmt;
use std::sync::Arc;

use crate::curves::{
    make_profile, make_spherical_curve, CurveSpec, Profile, ProfileSample, ProfileSpec,
    SphericalCurve, SphericalCurveSample,
};
use crate::error::{GeomError, Result};
use crate::numkit::{
    lift, orthonormalize_frame, richardson_partials, AdaptedFrame, Jet2, TolerancePolicy, Vec4,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetKind {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone)]
pub struct MeridianSpec {
    pub curve: CurveSpec,
    pub profile: ProfileSpec,
}

/// Evaluated spherical curve and profile of a meridian surface.
#[derive(Debug, Clone)]
pub struct Meridian {
    pub curve: SphericalCurve,
    pub profile: Profile,
}

/// Everything the meridian formulas need at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct MeridianPoint {
    pub curve: SphericalCurveSample,
    pub profile: ProfileSample,
}

impl Meridian {
    pub fn point(&self, u: f64, v: f64) -> Result<MeridianPoint> {
        Ok(MeridianPoint {
            profile: self.profile.sample(u)?,
            curve: self.curve.sample(v)?,
        })
    }

    pub fn position(&self, u: f64, v: f64) -> Result<Vec4> {
        let p = self.point(u, v)?;
        Ok(lift(&p.curve.r) * p.profile.f + e4() * p.profile.g)
    }

    pub fn jet(&self, u: f64, v: f64) -> Result<Jet2> {
        let MeridianPoint {
            curve: c,
            profile: p,
        } = self.point(u, v)?;
        let (r, t, n) = (lift(&c.r), lift(&c.t), lift(&c.n));
        Ok(Jet2 {
            x: r * p.f + e4() * p.g,
            xu: r * p.df + e4() * p.dg,
            xv: t * p.f,
            xuu: r * p.d2f + e4() * p.d2g,
            xuv: t * p.df,
            xvv: (n * c.kappa - r) * p.f,
        })
    }

    /// `X1 = X_u`, `X2 = X_v / f`, `N1 = n(v)`, `N2 = -g' r + f' e4`.
    pub fn frame(&self, u: f64, v: f64) -> Result<AdaptedFrame> {
        let MeridianPoint {
            curve: c,
            profile: p,
        } = self.point(u, v)?;
        let r = lift(&c.r);
        Ok(AdaptedFrame {
            x1: r * p.df + e4() * p.dg,
            x2: lift(&c.t),
            n1: lift(&c.n),
            n2: -r * p.dg + e4() * p.df,
        })
    }
}

fn e4() -> Vec4 {
    Vec4::w()
}

type Immersion = dyn Fn(f64, f64) -> Option<Vec4> + Send + Sync;

/// Immutable, cheaply clonable surface.
#[derive(Clone)]
pub struct SurfaceHandle {
    immersion: Arc<Immersion>,
    meridian: Option<Arc<Meridian>>,
    jet_kind: JetKind,
}

impl fmt::Debug for SurfaceHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceHandle")
            .field("jet_kind", &self.jet_kind)
            .field("meridian", &self.meridian)
            .finish()
    }
}

pub fn make_meridian_surface(
    spec: MeridianSpec,
    policy: &TolerancePolicy,
) -> Result<SurfaceHandle> {
    let meridian = Arc::new(Meridian {
        curve: make_spherical_curve(spec.curve)?,
        profile: make_profile(spec.profile, policy.f_min)?,
    });
    let m = Arc::clone(&meridian);
    Ok(SurfaceHandle {
        immersion: Arc::new(move |u, v| m.position(u, v).ok()),
        meridian: Some(meridian),
        jet_kind: JetKind::Analytic,
    })
}

impl SurfaceHandle {
    /// Generic surface from its immersion; jets come from stencils.
    pub fn from_immersion<F>(immersion: F) -> Self
    where
        F: Fn(f64, f64) -> Option<Vec4> + Send + Sync + 'static,
    {
        Self {
            immersion: Arc::new(immersion),
            meridian: None,
            jet_kind: JetKind::Numeric,
        }
    }

    /// Same surface, but jets and frames are taken numerically from the
    /// immersion. The meridian payload stays available to the classifier.
    pub fn with_numeric_jets(&self) -> Self {
        Self {
            jet_kind: JetKind::Numeric,
            ..self.clone()
        }
    }

    pub fn jet_kind(&self) -> JetKind {
        self.jet_kind
    }

    pub fn meridian(&self) -> Option<&Meridian> {
        self.meridian.as_deref()
    }

    pub fn position(&self, u: f64, v: f64) -> Option<Vec4> {
        (self.immersion)(u, v)
    }

    fn analytic_meridian(&self) -> Option<&Meridian> {
        match self.jet_kind {
            JetKind::Analytic => self.meridian.as_deref(),
            JetKind::Numeric => None,
        }
    }

    pub fn eval_jet(&self, u: f64, v: f64, policy: &TolerancePolicy) -> Result<Jet2> {
        match self.analytic_meridian() {
            Some(m) => m.jet(u, v),
            None => {
                // surface the real reason when the centre itself is off-domain
                if let Some(m) = self.meridian.as_deref() {
                    m.point(u, v)?;
                }
                richardson_partials(|a, b| self.position(a, b), u, v, policy)
            }
        }
    }

    /// The meridian frame for analytic meridian handles, otherwise
    /// [`orthonormalize_frame`] of `(X_u, X_v)`.
    pub fn adapted_frame(&self, u: f64, v: f64, policy: &TolerancePolicy) -> Result<AdaptedFrame> {
        let jet = self.eval_jet(u, v, policy)?;
        self.frame_for_jet(&jet, u, v, policy)
    }

    /// Frame at a point whose jet is already known.
    pub fn frame_for_jet(
        &self,
        jet: &Jet2,
        u: f64,
        v: f64,
        policy: &TolerancePolicy,
    ) -> Result<AdaptedFrame> {
        match self.analytic_meridian() {
            Some(m) => {
                // keep the regularity contract of the generic route
                orthonormalize_frame(&jet.xu, &jet.xv, policy)?;
                m.frame(u, v)
            }
            None => orthonormalize_frame(&jet.xu, &jet.xv, policy),
        }
    }

    /// Jet and adapted frame together.
    pub fn point(&self, u: f64, v: f64, policy: &TolerancePolicy) -> Result<(Jet2, AdaptedFrame)> {
        let jet = self.eval_jet(u, v, policy)?;
        let frame = self.frame_for_jet(&jet, u, v, policy)?;
        Ok((jet, frame))
    }
}

/// Uniform parameter grid, `count` points per axis with both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub u: (f64, f64, usize),
    pub v: (f64, f64, usize),
}

impl Grid {
    pub fn new(u: (f64, f64, usize), v: (f64, f64, usize)) -> Result<Self> {
        for (name, (lo, hi, n)) in [("u", u), ("v", v)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
                return Err(GeomError::InvalidSpec(format!(
                    "grid.{name} needs min < max and count >= 2, got [{lo}, {hi}, {n}]"
                )));
            }
        }
        Ok(Self { u, v })
    }

    /// Single point, for pointwise evaluations through grid-based APIs.
    pub fn point(u: f64, v: f64) -> Self {
        Self {
            u: (u, u, 1),
            v: (v, v, 1),
        }
    }

    pub fn len(&self) -> usize {
        self.u.2 * self.v.2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis((lo, hi, n): (f64, f64, usize)) -> impl Iterator<Item = f64> + Clone {
        (0..n).map(move |i| {
            if n == 1 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
    }

    pub fn u_values(&self) -> impl Iterator<Item = f64> + Clone {
        Self::axis(self.u)
    }

    pub fn v_values(&self) -> impl Iterator<Item = f64> + Clone {
        Self::axis(self.v)
    }

    /// Points in row-major order: `u` outer, `v` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let vs: Vec<f64> = self.v_values().collect();
        self.u_values()
            .flat_map(|u| vs.iter().map(move |&v| (u, v)))
            .collect()
    }
}

/// Closed-form test immersions used by the CLI and the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinImmersion {
    /// `(u, v, 0, 0)`
    Plane,
    /// `(2u, v, 0, 0)`
    ScaledPlane,
    /// `(u, v, uv, 0)`
    Bilinear,
    /// `(u, v, u^2, v^2)`
    Paraboloid,
    /// `(u, v, uv, (u^2 - v^2)/2)`, non-flat normal bundle at the origin
    TwistedGraph,
    /// `(cos u, sin u, cos v, sin v) / sqrt(2)`
    CliffordTorus,
}

impl BuiltinImmersion {
    pub const ALL: [BuiltinImmersion; 6] = [
        BuiltinImmersion::Plane,
        BuiltinImmersion::ScaledPlane,
        BuiltinImmersion::Bilinear,
        BuiltinImmersion::Paraboloid,
        BuiltinImmersion::TwistedGraph,
        BuiltinImmersion::CliffordTorus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinImmersion::Plane => "plane",
            BuiltinImmersion::ScaledPlane => "scaled_plane",
            BuiltinImmersion::Bilinear => "bilinear",
            BuiltinImmersion::Paraboloid => "paraboloid",
            BuiltinImmersion::TwistedGraph => "twisted_graph",
            BuiltinImmersion::CliffordTorus => "clifford_torus",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| GeomError::InvalidSpec(format!("unknown immersion {name:?}")))
    }

    pub fn eval(&self, u: f64, v: f64) -> Vec4 {
        match self {
            BuiltinImmersion::Plane => Vec4::new(u, v, 0.0, 0.0),
            BuiltinImmersion::ScaledPlane => Vec4::new(2.0 * u, v, 0.0, 0.0),
            BuiltinImmersion::Bilinear => Vec4::new(u, v, u * v, 0.0),
            BuiltinImmersion::Paraboloid => Vec4::new(u, v, u * u, v * v),
            BuiltinImmersion::TwistedGraph => Vec4::new(u, v, u * v, 0.5 * (u * u - v * v)),
            BuiltinImmersion::CliffordTorus => {
                Vec4::new(u.cos(), u.sin(), v.cos(), v.sin()) * std::f64::consts::FRAC_1_SQRT_2
            }
        }
    }

    pub fn handle(self) -> SurfaceHandle {
        SurfaceHandle::from_immersion(move |u, v| Some(self.eval(u, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::FrenetFrame;
    use crate::curves::KappaFn;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn policy() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn sphere() -> SurfaceHandle {
        make_meridian_surface(
            MeridianSpec {
                curve: CurveSpec::GreatCircle,
                profile: ProfileSpec::SphereArc { k: 1.0, u0: 0.0 },
            },
            &policy(),
        )
        .unwrap()
    }

    fn specs() -> Vec<MeridianSpec> {
        vec![
            MeridianSpec {
                curve: CurveSpec::GreatCircle,
                profile: ProfileSpec::SphereArc { k: 1.0, u0: 0.0 },
            },
            MeridianSpec {
                curve: CurveSpec::Circle { kappa: 2.0 },
                profile: ProfileSpec::Line {
                    theta: 0.5,
                    f0: 1.0,
                    g0: 0.0,
                },
            },
            MeridianSpec {
                curve: CurveSpec::Circle { kappa: 0.5 },
                profile: ProfileSpec::PrintedSqrt { a: 0.0, b: 1.0 },
            },
            MeridianSpec {
                curve: CurveSpec::Custom {
                    kappa: KappaFn::Sinusoid {
                        offset: 0.2,
                        amplitude: 0.1,
                        frequency: 1.0,
                        phase: 0.0,
                    },
                    initial: FrenetFrame::default(),
                },
                profile: ProfileSpec::SphereArc { k: 1.0, u0: 0.0 },
            },
        ]
    }

    #[test]
    fn sphere_point_by_substitution() {
        let jet = sphere().eval_jet(FRAC_PI_2, 0.0, &policy()).unwrap();
        assert!((jet.x - Vec4::new(1.0, 0.0, 0.0, 0.0)).amax() < 1e-15);
        assert!((jet.xv - Vec4::new(0.0, 1.0, 0.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn analytic_jets_match_stencils() {
        for spec in specs() {
            let analytic = make_meridian_surface(spec, &policy()).unwrap();
            let numeric = analytic.with_numeric_jets();
            for &(u, v) in &[(0.7, 0.3), (1.2, 2.0), (1.5, -1.0)] {
                let a = analytic.eval_jet(u, v, &policy()).unwrap();
                let n = numeric.eval_jet(u, v, &policy()).unwrap();
                assert!(
                    a.max_abs_diff(&n) < 1e-8,
                    "({u},{v}): {:e}",
                    a.max_abs_diff(&n)
                );
                assert!((a.xuv - n.xuv).amax() < 1e-7);
            }
        }
    }

    #[test]
    fn line_on_great_circle_is_flat() {
        let h = make_meridian_surface(
            MeridianSpec {
                curve: CurveSpec::GreatCircle,
                profile: ProfileSpec::Line {
                    theta: 0.3,
                    f0: 1.0,
                    g0: 0.0,
                },
            },
            &policy(),
        )
        .unwrap();
        let jet = h.eval_jet(0.4, 1.0, &policy()).unwrap();
        assert_eq!(jet.xuu, Vec4::zeros());
        // every point has zero third coordinate: a sector of a cone in span{e1,e2,e4}
        assert_eq!(jet.x[2], 0.0);
    }

    #[test]
    fn polynomial_immersions() {
        let j = SurfaceHandle::from_immersion(|u, v| Some(Vec4::new(u, v, u * v, 0.0)))
            .eval_jet(1.0, 1.0, &policy())
            .unwrap();
        assert!((j.xuv - Vec4::new(0.0, 0.0, 1.0, 0.0)).amax() < 1e-10);
        let j = BuiltinImmersion::Paraboloid
            .handle()
            .eval_jet(0.0, 0.0, &policy())
            .unwrap();
        assert!((j.xuu - Vec4::new(0.0, 0.0, 2.0, 0.0)).amax() < 1e-10);
    }

    #[test]
    fn meridian_frame_at_sphere_point() {
        let f = sphere().adapted_frame(FRAC_PI_2, 0.0, &policy()).unwrap();
        assert!((f.x1 - Vec4::new(0.0, 0.0, 0.0, 1.0)).amax() < 1e-15);
        assert!((f.x2 - Vec4::new(0.0, 1.0, 0.0, 0.0)).amax() < 1e-15);
        assert!((f.n1 - Vec4::new(0.0, 0.0, 1.0, 0.0)).amax() < 1e-15);
        assert!((f.n2 + Vec4::new(1.0, 0.0, 0.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn meridian_frames_are_orthonormal_and_metric_is_diagonal() {
        for spec in specs() {
            let h = make_meridian_surface(spec, &policy()).unwrap();
            for i in 0..10 {
                let (u, v) = (0.3 + 0.1 * i as f64, -PI + 0.6 * i as f64);
                let (jet, frame) = h.point(u, v, &policy()).unwrap();
                assert!(frame.orthonormality_residual() < 1e-12);
                let f = h.meridian().unwrap().profile.sample(u).unwrap().f;
                assert!((jet.xu.dot(&jet.xu) - 1.0).abs() < 1e-10);
                assert!(jet.xu.dot(&jet.xv).abs() < 1e-10);
                assert!((jet.xv.dot(&jet.xv) - f * f).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn generic_frame_on_paraboloid() {
        let f = BuiltinImmersion::Paraboloid
            .handle()
            .adapted_frame(0.0, 0.0, &policy())
            .unwrap();
        assert!((f.x1 - Vec4::new(1.0, 0.0, 0.0, 0.0)).amax() < 1e-10);
        assert!((f.x2 - Vec4::new(0.0, 1.0, 0.0, 0.0)).amax() < 1e-10);
    }

    #[test]
    fn pole_guard_propagates() {
        let h = sphere();
        assert!(matches!(
            h.eval_jet(0.0, 0.0, &policy()),
            Err(GeomError::ProfileDomain { .. })
        ));
        assert!(matches!(
            h.with_numeric_jets().eval_jet(0.0, 0.0, &policy()),
            Err(GeomError::ProfileDomain { .. })
        ));
    }
}
