//! Curves on the unit 2-sphere with their spherical Frenet frames, and
//! arc-length profile curves `u -> (f(u), g(u))` of the meridian.
//!
//! The spherical frame `{t, n, r}` obeys
//!
//! ```text
//! r' = t,   t' = kappa n - r,   n' = -kappa t
//! ```
//!
//! with `n = r x t`. Great circles and small circles use closed forms;
//! arbitrary `kappa(v)` is integrated with classical RK4 at a fixed step.

use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{GeomError, Result};
use crate::numkit::Vec3;

/// Largest Frenet integration step.
pub const FRENET_STEP: f64 = 1e-3;
/// Per-step frame drift (before re-orthonormalisation) that aborts integration.
pub const FRENET_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCurveSample {
    pub r: Vec3,
    pub t: Vec3,
    pub n: Vec3,
    pub kappa: f64,
}

impl SphericalCurveSample {
    pub fn orthonormality_residual(&self) -> f64 {
        let v = [self.r, self.t, self.n];
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in i..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v[i].dot(&v[j]) - target).abs());
            }
        }
        worst
    }
}

/// Spherical curvature as a function of arc length.
#[derive(Clone)]
pub enum KappaFn {
    Constant(f64),
    /// `offset + amplitude * sin(frequency * v + phase)`
    Sinusoid {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl KappaFn {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            KappaFn::Constant(k) => *k,
            KappaFn::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (frequency * v + phase).sin(),
            KappaFn::Closure(f) => f(v),
        }
    }
}

impl fmt::Debug for KappaFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaFn::Constant(k) => write!(f, "Constant({k})"),
            KappaFn::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => write!(
                f,
                "Sinusoid({offset} + {amplitude} sin({frequency} v + {phase}))"
            ),
            KappaFn::Closure(_) => write!(f, "Closure"),
        }
    }
}

/// Initial frame `(r, t, n)` at `v = 0` for integrated curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub r: Vec3,
    pub t: Vec3,
    pub n: Vec3,
}

impl Default for FrenetFrame {
    fn default() -> Self {
        Self {
            r: Vec3::x(),
            t: Vec3::y(),
            n: Vec3::z(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum CurveSpec {
    GreatCircle,
    Circle {
        kappa: f64,
    },
    Custom {
        kappa: KappaFn,
        initial: FrenetFrame,
    },
}

impl CurveSpec {
    /// Frame of the closed-form small circle at `v = 0`, for seeding an
    /// integrated curve that should reproduce it.
    pub fn circle_initial_frame(kappa: f64) -> FrenetFrame {
        let c = 1.0 / (1.0 + kappa * kappa).sqrt();
        FrenetFrame {
            r: Vec3::new(c, 0.0, kappa * c),
            t: Vec3::new(0.0, 1.0, 0.0),
            n: Vec3::new(-kappa * c, 0.0, c),
        }
    }
}

/// Immutable evaluator `v -> SphericalCurveSample`.
#[derive(Debug, Clone)]
pub struct SphericalCurve {
    kind: CurveKind,
}

#[derive(Debug, Clone)]
enum CurveKind {
    GreatCircle,
    Circle { kappa: f64, radius: f64 },
    Integrated(Arc<FrenetIntegrator>),
}

pub fn make_spherical_curve(spec: CurveSpec) -> Result<SphericalCurve> {
    let kind = match spec {
        CurveSpec::GreatCircle => CurveKind::GreatCircle,
        CurveSpec::Circle { kappa } => {
            if !kappa.is_finite() || kappa == 0.0 {
                return Err(GeomError::InvalidSpec(format!(
                    "circle curvature must be finite and non-zero, got {kappa} (use great_circle for 0)"
                )));
            }
            CurveKind::Circle {
                kappa,
                radius: 1.0 / (1.0 + kappa * kappa).sqrt(),
            }
        }
        CurveSpec::Custom { kappa, initial } => {
            let probe = SphericalCurveSample {
                r: initial.r,
                t: initial.t,
                n: initial.n,
                kappa: 0.0,
            };
            if probe.orthonormality_residual() > 1e-12 {
                return Err(GeomError::InvalidSpec(
                    "custom curve initial frame is not orthonormal".into(),
                ));
            }
            CurveKind::Integrated(Arc::new(FrenetIntegrator::new(kappa, initial)))
        }
    };
    Ok(SphericalCurve { kind })
}

impl SphericalCurve {
    pub fn sample(&self, v: f64) -> Result<SphericalCurveSample> {
        match &self.kind {
            CurveKind::GreatCircle => {
                let (s, c) = v.sin_cos();
                Ok(SphericalCurveSample {
                    r: Vec3::new(c, s, 0.0),
                    t: Vec3::new(-s, c, 0.0),
                    n: Vec3::z(),
                    kappa: 0.0,
                })
            }
            CurveKind::Circle { kappa, radius } => {
                let c = *radius;
                let (s, co) = (v / c).sin_cos();
                Ok(SphericalCurveSample {
                    r: Vec3::new(c * co, c * s, kappa * c),
                    t: Vec3::new(-s, co, 0.0),
                    n: Vec3::new(-kappa * c * co, -kappa * c * s, c),
                    kappa: *kappa,
                })
            }
            CurveKind::Integrated(integrator) => integrator.sample(v),
        }
    }

    pub fn is_integrated(&self) -> bool {
        matches!(self.kind, CurveKind::Integrated(_))
    }
}

type State = [Vec3; 3];

/// RK4 integrator over the fixed node grid `k * FRENET_STEP`. Nodes are
/// memoised; a sample between nodes takes one partial step from the node
/// below it, so results do not depend on call order.
struct FrenetIntegrator {
    kappa: KappaFn,
    forward: RwLock<Vec<State>>,
    backward: RwLock<Vec<State>>,
}

impl fmt::Debug for FrenetIntegrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrenetIntegrator")
            .field("kappa", &self.kappa)
            .finish()
    }
}

impl FrenetIntegrator {
    fn new(kappa: KappaFn, initial: FrenetFrame) -> Self {
        let start = [initial.r, initial.t, initial.n];
        Self {
            kappa,
            forward: RwLock::new(vec![start]),
            backward: RwLock::new(vec![start]),
        }
    }

    fn rhs(&self, v: f64, s: &State) -> State {
        let k = self.kappa.eval(v);
        [s[1], s[2] * k - s[0], -s[1] * k]
    }

    fn rk4(&self, v: f64, s: &State, h: f64) -> Result<State> {
        let add =
            |a: &State, b: &State, w: f64| [a[0] + b[0] * w, a[1] + b[1] * w, a[2] + b[2] * w];
        let k1 = self.rhs(v, s);
        let k2 = self.rhs(v + h / 2.0, &add(s, &k1, h / 2.0));
        let k3 = self.rhs(v + h / 2.0, &add(s, &k2, h / 2.0));
        let k4 = self.rhs(v + h, &add(s, &k3, h));
        let mut next = *s;
        for i in 0..3 {
            next[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        let drift = SphericalCurveSample {
            r: next[0],
            t: next[1],
            n: next[2],
            kappa: 0.0,
        }
        .orthonormality_residual();
        if !(drift <= FRENET_DRIFT_LIMIT) {
            return Err(GeomError::IntegrationStepRejected { v: v + h, drift });
        }
        Ok(reorthonormalize(next))
    }

    fn node(&self, k: usize, backward: bool) -> Result<State> {
        let cache = if backward {
            &self.backward
        } else {
            &self.forward
        };
        if let Some(s) = cache.read().expect("frenet cache poisoned").get(k) {
            return Ok(*s);
        }
        let mut nodes = cache.write().expect("frenet cache poisoned");
        let sign = if backward { -1.0 } else { 1.0 };
        while nodes.len() <= k {
            let j = nodes.len() - 1;
            let v = sign * j as f64 * FRENET_STEP;
            let next = self.rk4(v, &nodes[j], sign * FRENET_STEP)?;
            nodes.push(next);
        }
        Ok(nodes[k])
    }

    fn sample(&self, v: f64) -> Result<SphericalCurveSample> {
        if !v.is_finite() {
            return Err(GeomError::InvalidSpec(format!(
                "curve parameter {v} is not finite"
            )));
        }
        let backward = v < 0.0;
        let sign = if backward { -1.0 } else { 1.0 };
        let steps = v.abs() / FRENET_STEP;
        let k = steps.floor() as usize;
        let base = self.node(k, backward)?;
        let rest = v - sign * k as f64 * FRENET_STEP;
        let s = if rest == 0.0 {
            base
        } else {
            self.rk4(sign * k as f64 * FRENET_STEP, &base, rest)?
        };
        Ok(SphericalCurveSample {
            r: s[0],
            t: s[1],
            n: s[2],
            kappa: self.kappa.eval(v),
        })
    }
}

fn reorthonormalize(s: State) -> State {
    let r = s[0].normalize();
    let t = (s[1] - r * r.dot(&s[1])).normalize();
    let n = (s[2] - r * r.dot(&s[2]) - t * t.dot(&s[2])).normalize();
    [r, t, n]
}

/// Arc-length profile sample with its signed curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub f: f64,
    pub g: f64,
    pub df: f64,
    pub dg: f64,
    pub d2f: f64,
    pub d2g: f64,
    pub kappa_alpha: f64,
}

/// User-supplied profile: returns `[f, g, f', g', f'', g'']`, or `None`
/// outside its domain.
#[derive(Clone)]
pub struct CustomProfile(pub Arc<dyn Fn(f64) -> Option<[f64; 6]> + Send + Sync>);

impl CustomProfile {
    /// Polynomial profile from ascending coefficients of `f` and `g`.
    pub fn polynomial(f: Vec<f64>, g: Vec<f64>) -> Self {
        fn eval(c: &[f64], x: f64) -> [f64; 3] {
            let (mut p, mut dp, mut d2p) = (0.0, 0.0, 0.0);
            for &a in c.iter().rev() {
                d2p = d2p * x + 2.0 * dp;
                dp = dp * x + p;
                p = p * x + a;
            }
            [p, dp, d2p]
        }
        CustomProfile(Arc::new(move |u| {
            let [f0, f1, f2] = eval(&f, u);
            let [g0, g1, g2] = eval(&g, u);
            Some([f0, g0, f1, g1, f2, g2])
        }))
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomProfile")
    }
}

#[derive(Debug, Clone)]
pub enum ProfileSpec {
    /// Straight meridian `f = u sin(theta) + f0`, `g = u cos(theta) + g0`.
    Line {
        theta: f64,
        f0: f64,
        g0: f64,
    },
    /// Circular meridian of curvature `k`: `f = sin(k(u-u0))/k`, `g = -cos(k(u-u0))/k`.
    SphereArc {
        k: f64,
        u0: f64,
    },
    /// `f = sqrt(u^2 - 2au + 2b)`, `g = -sqrt(2b - a^2) ln|u - a - f|`.
    PrintedSqrt {
        a: f64,
        b: f64,
    },
    Custom(CustomProfile),
}

#[derive(Debug, Clone)]
pub struct Profile {
    spec: ProfileSpec,
    f_min: f64,
}

pub fn make_profile(spec: ProfileSpec, f_min: f64) -> Result<Profile> {
    let bad = |msg: String| Err(GeomError::InvalidSpec(msg));
    match &spec {
        ProfileSpec::Line { theta, f0, g0 } => {
            if !(theta.is_finite() && f0.is_finite() && g0.is_finite()) {
                return bad("line profile parameters must be finite".into());
            }
        }
        ProfileSpec::SphereArc { k, u0 } => {
            if !(k.is_finite() && *k > 0.0 && u0.is_finite()) {
                return bad(format!("sphere_arc needs finite k > 0, got k={k}"));
            }
        }
        ProfileSpec::PrintedSqrt { a, b } => {
            if !(a.is_finite() && b.is_finite() && 2.0 * b > a * a) {
                return bad(format!("printed_sqrt needs 2b > a^2, got a={a}, b={b}"));
            }
        }
        ProfileSpec::Custom(_) => {}
    }
    if !(f_min.is_finite() && f_min > 0.0) {
        return bad(format!("f_min must be > 0, got {f_min}"));
    }
    Ok(Profile { spec, f_min })
}

impl Profile {
    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    /// Samples the profile, enforcing the pole guard and `(f')^2 <= 1`.
    pub fn sample(&self, u: f64) -> Result<ProfileSample> {
        let s = self.sample_unguarded(u)?;
        if !(s.f > self.f_min) {
            return Err(GeomError::ProfileDomain {
                u,
                reason: format!("f = {} is at or below the pole guard {}", s.f, self.f_min),
            });
        }
        // a few ulps of slack so that f' = sin(pi/2) style values pass
        if s.df * s.df > 1.0 + 4.0 * f64::EPSILON {
            return Err(GeomError::ProfileDomain {
                u,
                reason: format!("(f')^2 = {} exceeds 1", s.df * s.df),
            });
        }
        Ok(s)
    }

    /// Samples without the pole guard or the `(f')^2 <= 1` check; still fails
    /// where the formulas themselves are undefined.
    pub fn sample_unguarded(&self, u: f64) -> Result<ProfileSample> {
        let [f, g, df, dg, d2f, d2g] = match &self.spec {
            ProfileSpec::Line { theta, f0, g0 } => {
                let (s, c) = theta.sin_cos();
                [u * s + f0, u * c + g0, s, c, 0.0, 0.0]
            }
            ProfileSpec::SphereArc { k, u0 } => {
                let (s, c) = (k * (u - u0)).sin_cos();
                [s / k, -c / k, c, s, -k * s, k * c]
            }
            ProfileSpec::PrintedSqrt { a, b } => {
                let radicand = u * u - 2.0 * a * u + 2.0 * b;
                if !(radicand > 0.0) {
                    return Err(GeomError::ProfileDomain {
                        u,
                        reason: format!("u^2 - 2au + 2b = {radicand} is not positive"),
                    });
                }
                let s = radicand.sqrt();
                let q = 2.0 * b - a * a;
                let m = q.sqrt();
                let w = u - a;
                // u - a - s < 0 always; the logarithm is taken of its magnitude
                let g = -m * (w - s).abs().ln();
                [s, g, w / s, m / s, q / (s * s * s), -m * w / (s * s * s)]
            }
            ProfileSpec::Custom(CustomProfile(func)) => {
                func(u).ok_or_else(|| GeomError::ProfileDomain {
                    u,
                    reason: "outside the custom profile domain".into(),
                })?
            }
        };
        let mut sample = ProfileSample {
            f,
            g,
            df,
            dg,
            d2f,
            d2g,
            kappa_alpha: 0.0,
        };
        sample.kappa_alpha = profile_kappa_alpha(&sample);
        Ok(sample)
    }
}

/// Signed curvature of the profile, `f' g'' - f'' g'`.
pub fn profile_kappa_alpha(s: &ProfileSample) -> f64 {
    s.df * s.d2g - s.d2f * s.dg
}

/// The same curvature through `-f'' / sqrt(1 - f'^2)`; only meaningful on the
/// `g' > 0` branch.
pub fn profile_kappa_alpha_from_f(s: &ProfileSample) -> f64 {
    -s.d2f / (1.0 - s.df * s.df).sqrt()
}

/// `count` uniformly spaced points of `[lo, hi]`, endpoints included.
pub fn uniform_samples(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let n = count.max(2);
    (0..n).map(move |i| {
        if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

/// `max |f'^2 + g'^2 - 1|` over `samples` uniform points of `interval`.
pub fn validate_arclength(profile: &Profile, interval: (f64, f64), samples: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for u in uniform_samples(interval.0, interval.1, samples) {
        let s = profile.sample_unguarded(u)?;
        if !(s.f > profile.f_min) {
            return Err(GeomError::ProfileDomain {
                u,
                reason: format!("f = {} below pole guard", s.f),
            });
        }
        worst = worst.max((s.df * s.df + s.dg * s.dg - 1.0).abs());
    }
    Ok(worst)
}
