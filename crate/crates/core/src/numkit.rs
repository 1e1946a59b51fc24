//! Fixed-size linear algebra and stencil differentiation.
//!
//! Vectors and 2x2 matrices are plain `nalgebra` statics. The pieces that are
//! specific to this crate are the Richardson-extrapolated partials of a map
//! `R^2 -> E^4` and the deterministic adapted-frame construction.

use nalgebra::{Matrix2, SVector, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

pub type Vec4 = Vector4<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat2 = Matrix2<f64>;

/// `AB - BA`.
pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a * b - b * a
}

/// Lift a vector of `span{e1,e2,e3}` into E^4.
pub fn lift(v: &Vec3) -> Vec4 {
    Vec4::new(v[0], v[1], v[2], 0.0)
}

/// Numerical knobs shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolerancePolicy {
    /// Base finite-difference step, scaled by `max(1, |x|)` per axis.
    pub fd_step: f64,
    /// Number of step sizes in the Richardson tableau (1 = plain central differences).
    pub richardson_levels: usize,
    pub residual_tol_numeric: f64,
    pub residual_tol_analytic: f64,
    /// Relative Gram-determinant floor for tangent planes, and rejection-norm
    /// floor for normal seeds.
    pub frame_parallel_threshold: f64,
    /// Pole guard for meridian profiles: `f` must stay above this.
    pub f_min: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            fd_step: 1e-5,
            richardson_levels: 3,
            residual_tol_numeric: 1e-6,
            residual_tol_analytic: 1e-9,
            frame_parallel_threshold: 1e-6,
            f_min: 1e-6,
        }
    }
}

/// Environment variable that overrides [`TolerancePolicy::fd_step`].
pub const FD_STEP_ENV: &str = "MERIDIAN_FD_STEP";

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fd_step", self.fd_step),
            ("residual_tol_numeric", self.residual_tol_numeric),
            ("residual_tol_analytic", self.residual_tol_analytic),
            ("frame_parallel_threshold", self.frame_parallel_threshold),
            ("f_min", self.f_min),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(GeomError::InvalidSpec(format!(
                    "policy.{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if self.richardson_levels == 0 {
            return Err(GeomError::InvalidSpec(
                "policy.richardson_levels must be >= 1".into(),
            ));
        }
        if self.residual_tol_analytic > self.residual_tol_numeric {
            return Err(GeomError::InvalidSpec(
                "policy.residual_tol_analytic must not exceed residual_tol_numeric".into(),
            ));
        }
        Ok(())
    }

    /// Applies the `MERIDIAN_FD_STEP` override when it is set and parses.
    pub fn with_env_overrides(mut self) -> Result<Self> {
        if let Ok(raw) = std::env::var(FD_STEP_ENV) {
            let step: f64 = raw.trim().parse().map_err(|_| {
                GeomError::InvalidSpec(format!("{FD_STEP_ENV}={raw:?} is not a number"))
            })?;
            self.fd_step = step;
        }
        self.validate()?;
        Ok(self)
    }

    /// Step for first-order stencils at coordinate `x`.
    pub fn first_step(&self, x: f64) -> f64 {
        self.fd_step * x.abs().max(1.0)
    }

    /// Step for second-order stencils, and for differentiating derived
    /// fields (frames, form coefficients) that already carry stencil noise.
    /// The square root keeps the `1/h^2` roundoff amplification near 1e-10.
    pub fn second_step(&self, x: f64) -> f64 {
        self.fd_step.sqrt() * x.abs().max(1.0)
    }
}

/// Position and first/second partials of an immersion at `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub x: Vec4,
    pub xu: Vec4,
    pub xv: Vec4,
    pub xuu: Vec4,
    pub xuv: Vec4,
    pub xvv: Vec4,
}

impl Jet2 {
    /// Largest componentwise difference over all six vectors.
    pub fn max_abs_diff(&self, other: &Jet2) -> f64 {
        [
            self.x - other.x,
            self.xu - other.xu,
            self.xv - other.xv,
            self.xuu - other.xuu,
            self.xuv - other.xuv,
            self.xvv - other.xvv,
        ]
        .iter()
        .map(|d| d.amax())
        .fold(0.0, f64::max)
    }
}

/// Orthonormal tangent pair and orthonormal normal pair at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptedFrame {
    pub x1: Vec4,
    pub x2: Vec4,
    pub n1: Vec4,
    pub n2: Vec4,
}

impl AdaptedFrame {
    pub fn vectors(&self) -> [Vec4; 4] {
        [self.x1, self.x2, self.n1, self.n2]
    }

    /// `max |<e_i, e_j> - delta_ij|` over the four frame vectors.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = self.vectors();
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in i..4 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v[i].dot(&v[j]) - target).abs());
            }
        }
        worst
    }

    /// Rotates the normal pair by `phi` in the plane it spans.
    pub fn rotate_normals(&self, phi: f64) -> AdaptedFrame {
        let (s, c) = phi.sin_cos();
        AdaptedFrame {
            n1: self.n1 * c + self.n2 * s,
            n2: -self.n1 * s + self.n2 * c,
            ..*self
        }
    }
}

/// Richardson tableau over central differences taken at steps `h * 2^j`.
/// The smallest step is the base step; coarser steps only feed the
/// extrapolation, so extra levels never shrink the step below `h`.
fn richardson<const N: usize, F>(levels: usize, mut estimate: F) -> Result<SVector<f64, N>>
where
    F: FnMut(f64) -> Result<SVector<f64, N>>,
{
    let mut prev: Vec<SVector<f64, N>> = Vec::with_capacity(levels);
    for j in 0..levels {
        let mut row = Vec::with_capacity(j + 1);
        row.push(estimate(f64::powi(2.0, j as i32))?);
        for k in 1..=j {
            let factor = f64::powi(4.0, k as i32) - 1.0;
            let finer = prev[k - 1];
            let coarser = row[k - 1];
            row.push(finer + (finer - coarser) / factor);
        }
        prev = row;
    }
    Ok(prev[levels - 1])
}

/// Value, first and second partials of `func` at `(u, v)` from central
/// differences with Richardson extrapolation.
///
/// `func` returns `None` for points outside its domain; that surfaces as
/// [`GeomError::StencilOutOfDomain`] naming the offending point.
pub fn richardson_partials<F>(func: F, u: f64, v: f64, policy: &TolerancePolicy) -> Result<Jet2>
where
    F: Fn(f64, f64) -> Option<Vec4>,
{
    let eval = |a: f64, b: f64| func(a, b).ok_or(GeomError::StencilOutOfDomain { u: a, v: b });
    let levels = policy.richardson_levels.max(1);
    let x = eval(u, v)?;

    let hu = policy.first_step(u);
    let hv = policy.first_step(v);
    let xu = richardson(levels, |m| {
        let h = hu * m;
        Ok((eval(u + h, v)? - eval(u - h, v)?) / (2.0 * h))
    })?;
    let xv = richardson(levels, |m| {
        let h = hv * m;
        Ok((eval(u, v + h)? - eval(u, v - h)?) / (2.0 * h))
    })?;

    let ku = policy.second_step(u);
    let kv = policy.second_step(v);
    let xuu = richardson(levels, |m| {
        let h = ku * m;
        Ok((eval(u + h, v)? - x * 2.0 + eval(u - h, v)?) / (h * h))
    })?;
    let xvv = richardson(levels, |m| {
        let h = kv * m;
        Ok((eval(u, v + h)? - x * 2.0 + eval(u, v - h)?) / (h * h))
    })?;
    let xuv = richardson(levels, |m| {
        let (a, b) = (ku * m, kv * m);
        let pp = eval(u + a, v + b)?;
        let pm = eval(u + a, v - b)?;
        let mp = eval(u - a, v + b)?;
        let mm = eval(u - a, v - b)?;
        Ok(((pp - pm) - (mp - mm)) / (4.0 * a * b))
    })?;

    Ok(Jet2 {
        x,
        xu,
        xv,
        xuu,
        xuv,
        xvv,
    })
}

/// Richardson-extrapolated first derivative of a vector field of one
/// variable, with base step `h`.
pub fn richardson_derivative<const N: usize, F>(
    field: F,
    at: f64,
    h: f64,
    levels: usize,
) -> Result<SVector<f64, N>>
where
    F: Fn(f64) -> Result<SVector<f64, N>>,
{
    richardson(levels.max(1), |m| {
        let step = h * m;
        Ok((field(at + step)? - field(at - step)?) / (2.0 * step))
    })
}

/// Orthonormal adapted frame from two tangent vectors.
///
/// `X1` is `t1` normalised and `X2` the Gram-Schmidt rejection of `t2`. The
/// normals come from Gram-Schmidt over `e1..e4` in index order, skipping
/// seeds whose rejection norm is below `frame_parallel_threshold`. Each
/// rejection is done twice so the result stays orthonormal to machine
/// precision even for nearly parallel seeds.
pub fn orthonormalize_frame(
    t1: &Vec4,
    t2: &Vec4,
    policy: &TolerancePolicy,
) -> Result<AdaptedFrame> {
    let e = t1.dot(t1);
    let f = t1.dot(t2);
    let g = t2.dot(t2);
    let w2 = e * g - f * f;
    let scale = e * g;
    if !(scale > 0.0) || !(w2 > policy.frame_parallel_threshold * scale) {
        let rel = if scale > 0.0 { w2 / scale } else { 0.0 };
        return Err(GeomError::DegenerateTangentPlane { w2: rel });
    }

    let mut basis: Vec<Vec4> = Vec::with_capacity(4);
    basis.push(t1 / e.sqrt());
    let x2 = reject(t2, &basis).normalize();
    basis.push(x2);

    for i in 0..4 {
        if basis.len() == 4 {
            break;
        }
        let seed = Vec4::ith(i, 1.0);
        let r = reject(&seed, &basis);
        let norm = r.norm();
        if norm < policy.frame_parallel_threshold {
            continue;
        }
        basis.push(r / norm);
    }
    if basis.len() < 4 {
        // Unreachable for a rank-2 tangent plane in E^4 with a sane threshold.
        return Err(GeomError::DegenerateTangentPlane { w2: w2 / scale });
    }
    Ok(AdaptedFrame {
        x1: basis[0],
        x2: basis[1],
        n1: basis[2],
        n2: basis[3],
    })
}

fn reject(v: &Vec4, basis: &[Vec4]) -> Vec4 {
    let mut r = *v;
    for _pass in 0..2 {
        for b in basis {
            r -= b * b.dot(&r);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn policy() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn close(a: &Vec4, b: &Vec4, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn linear_map_partials() {
        let jet = richardson_partials(|u, v| Some(Vec4::new(u, v, 0.0, 0.0)), 0.3, 0.7, &policy())
            .unwrap();
        assert!(close(&jet.xu, &Vec4::new(1.0, 0.0, 0.0, 0.0), 1e-10));
        assert!(close(&jet.xv, &Vec4::new(0.0, 1.0, 0.0, 0.0), 1e-10));
        assert!(jet.xuu.amax() < 1e-10);
        assert!(jet.xuv.amax() < 1e-10);
    }

    #[test]
    fn sine_partials_at_origin() {
        let jet = richardson_partials(
            |u, _| Some(Vec4::new(u.sin(), 0.0, 0.0, 0.0)),
            0.0,
            0.0,
            &policy(),
        )
        .unwrap();
        assert!((jet.xu[0] - 1.0).abs() < 1e-10);
        assert!(jet.xuu.amax() < 1e-8);
    }

    #[test]
    fn cubic_polynomials_are_exact() {
        let p = |u: f64, v: f64| {
            Some(Vec4::new(
                u * u * u - 2.0 * u * v + 0.5,
                v * v * v + u * u * v,
                3.0 * u * v * v - v,
                u * u + v * v,
            ))
        };
        let (u, v) = (0.4, -1.3);
        let jet = richardson_partials(p, u, v, &policy()).unwrap();
        let xu = Vec4::new(3.0 * u * u - 2.0 * v, 2.0 * u * v, 3.0 * v * v, 2.0 * u);
        let xv = Vec4::new(-2.0 * u, 3.0 * v * v + u * u, 6.0 * u * v - 1.0, 2.0 * v);
        let xuu = Vec4::new(6.0 * u, 2.0 * v, 0.0, 2.0);
        let xuv = Vec4::new(-2.0, 2.0 * u, 6.0 * v, 0.0);
        let xvv = Vec4::new(0.0, 6.0 * v, 6.0 * u, 2.0);
        assert!(close(&jet.xu, &xu, 1e-10));
        assert!(close(&jet.xv, &xv, 1e-10));
        assert!(close(&jet.xuu, &xuu, 1e-10));
        assert!(close(&jet.xuv, &xuv, 1e-10));
        assert!(close(&jet.xvv, &xvv, 1e-10));
    }

    #[test]
    fn stencil_rejection_is_reported() {
        let err = richardson_partials(
            |u, _| (u < 1.0).then(|| Vec4::zeros()),
            1.0 - 1e-6,
            0.0,
            &policy(),
        )
        .unwrap_err();
        assert!(matches!(err, GeomError::StencilOutOfDomain { .. }));
    }

    #[test]
    fn extra_levels_do_not_blow_up_on_sine() {
        for &u in &[0.0, 0.5, 1.0] {
            let mut prev: Option<(f64, f64)> = None;
            for levels in 1..=4 {
                let p = TolerancePolicy {
                    richardson_levels: levels,
                    ..policy()
                };
                let jet =
                    richardson_partials(|a, _| Some(Vec4::new(a.sin(), 0.0, 0.0, 0.0)), u, 0.0, &p)
                        .unwrap();
                let e1 = (jet.xu[0] - u.cos()).abs();
                let e2 = (jet.xuu[0] + u.sin()).abs();
                if let Some((p1, p2)) = prev {
                    assert!(
                        e1 <= 10.0 * p1.max(f64::EPSILON),
                        "u={u} levels={levels}: {e1:e} vs {p1:e}"
                    );
                    assert!(
                        e2 <= 10.0 * p2.max(f64::EPSILON),
                        "u={u} levels={levels}: {e2:e} vs {p2:e}"
                    );
                }
                prev = Some((e1, e2));
            }
        }
    }

    #[test]
    fn derivative_of_packed_field() {
        let d = richardson_derivative(
            |x| {
                Ok(SVector::<f64, 5>::from([
                    x.sin(),
                    x * x,
                    x.exp(),
                    1.0,
                    x.cos(),
                ]))
            },
            0.3,
            1e-3,
            2,
        )
        .unwrap();
        let want = [0.3f64.cos(), 0.6, 0.3f64.exp(), 0.0, -0.3f64.sin()];
        for (a, b) in d.iter().zip(want) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn axis_aligned_frame() {
        let f = orthonormalize_frame(
            &Vec4::new(2.0, 0.0, 0.0, 0.0),
            &Vec4::new(0.0, 3.0, 0.0, 0.0),
            &policy(),
        )
        .unwrap();
        assert_eq!(f.x1, Vec4::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(f.x2, Vec4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(f.n1, Vec4::new(0.0, 0.0, 1.0, 0.0));
        assert_eq!(f.n2, Vec4::new(0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn skewed_frame_by_hand() {
        let f = orthonormalize_frame(
            &Vec4::new(1.0, 1.0, 0.0, 0.0),
            &Vec4::new(0.0, 1.0, 0.0, 0.0),
            &policy(),
        )
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&f.x1, &Vec4::new(s, s, 0.0, 0.0), 1e-15));
        assert!(close(&f.x2, &Vec4::new(-s, s, 0.0, 0.0), 1e-15));
        assert!(f.orthonormality_residual() < 1e-15);
    }

    #[test]
    fn parallel_tangents_are_rejected() {
        let t = Vec4::new(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            orthonormalize_frame(&t, &t, &policy()),
            Err(GeomError::DegenerateTangentPlane { .. })
        ));
        assert!(orthonormalize_frame(&Vec4::zeros(), &t, &policy()).is_err());
    }

    #[test]
    fn policy_validation() {
        assert!(policy().validate().is_ok());
        assert!(TolerancePolicy {
            fd_step: 0.0,
            ..policy()
        }
        .validate()
        .is_err());
        assert!(TolerancePolicy {
            richardson_levels: 0,
            ..policy()
        }
        .validate()
        .is_err());
        assert!(TolerancePolicy {
            residual_tol_analytic: 1.0,
            ..policy()
        }
        .validate()
        .is_err());
    }

    fn vec4() -> impl Strategy<Value = Vec4> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(Vec4::from)
    }

    fn mat2() -> impl Strategy<Value = Mat2> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(|a| Mat2::new(a[0], a[1], a[2], a[3]))
    }

    proptest! {
        #[test]
        fn cauchy_schwarz(a in vec4(), b in vec4()) {
            prop_assert!(a.dot(&b).abs() <= a.norm() * b.norm() * (1.0 + 1e-14) + 1e-300);
        }

        #[test]
        fn commutator_is_bilinear(a in mat2(), b in mat2(), c in mat2(), s in -3.0f64..3.0) {
            let lhs = commutator(&(a + c * s), &b);
            let rhs = commutator(&a, &b) + commutator(&c, &b) * s;
            prop_assert!((lhs - rhs).amax() < 1e-9);
            // det is bilinear in columns
            let mut m = a;
            m.set_column(0, &(a.column(0) + c.column(0) * s));
            let mut ac = a;
            ac.set_column(0, &c.column(0));
            prop_assert!((m.determinant() - a.determinant() - s * ac.determinant()).abs() < 1e-9);
        }

        #[test]
        fn frames_are_orthonormal(a in vec4(), b in vec4()) {
            if let Ok(f) = orthonormalize_frame(&a, &b, &TolerancePolicy::default()) {
                prop_assert!(f.orthonormality_residual() < 1e-12);
                prop_assert!(f.x2.dot(&b) > 0.0);
                prop_assert!(f.x1.dot(&a) > 0.0);
            }
        }
    }
}
