//! Fundamental forms, shape operators, curvatures and the structural
//! residuals of the Gauss, Ricci and Codazzi equations.
//!
//! Everything downstream of [`second_form`] works in the orthonormal adapted
//! frame, where the metric is the identity and `A_alpha = [h^alpha_ij]`.
//! Normal vectors are carried as coordinates on `(N1, N2)`.

use nalgebra::{Complex, Matrix4, SVector, Vector2};

use crate::error::{GeomError, Result};
use crate::numkit::{
    commutator, richardson_derivative, AdaptedFrame, Jet2, Mat2, TolerancePolicy, Vec4,
};
use crate::surface::SurfaceHandle;

/// Normal vector in `(N1, N2)` coordinates.
pub type NormalVec = Vector2<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstFundamentalForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub w2: f64,
}

impl FirstFundamentalForm {
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.e, self.f, self.f, self.g)
    }
}

pub fn first_form(jet: &Jet2, policy: &TolerancePolicy) -> Result<FirstFundamentalForm> {
    let e = jet.xu.dot(&jet.xu);
    let f = jet.xu.dot(&jet.xv);
    let g = jet.xv.dot(&jet.xv);
    let w2 = e * g - f * f;
    let scale = e * g;
    if !(scale > 0.0) || !(w2 > policy.frame_parallel_threshold * scale) {
        return Err(GeomError::DegenerateTangentPlane {
            w2: if scale > 0.0 { w2 / scale } else { 0.0 },
        });
    }
    Ok(FirstFundamentalForm { e, f, g, w2 })
}

/// Second fundamental form in an orthonormal adapted frame.
///
/// `h[alpha]` holds `[h11, h12, h22]` for normal `N_(alpha+1)`; symmetry is
/// structural since `h21` is never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFundamentalForm {
    pub h: [[f64; 3]; 2],
}

impl SecondFundamentalForm {
    pub fn new(h1: [f64; 3], h2: [f64; 3]) -> Self {
        Self { h: [h1, h2] }
    }

    pub fn zero() -> Self {
        Self { h: [[0.0; 3]; 2] }
    }

    /// `h^alpha_ij` with 1-based `alpha`, `i`, `j`.
    pub fn get(&self, alpha: usize, i: usize, j: usize) -> f64 {
        let slot = match (i.min(j), i.max(j)) {
            (1, 1) => 0,
            (1, 2) => 1,
            (2, 2) => 2,
            _ => panic!("tangent index out of range: ({i}, {j})"),
        };
        self.h[alpha - 1][slot]
    }

    /// `h(X_i, X_j)` as a normal vector.
    pub fn value(&self, i: usize, j: usize) -> NormalVec {
        NormalVec::new(self.get(1, i, j), self.get(2, i, j))
    }

    pub fn h11(&self) -> NormalVec {
        self.value(1, 1)
    }

    pub fn h12(&self) -> NormalVec {
        self.value(1, 2)
    }

    pub fn h22(&self) -> NormalVec {
        self.value(2, 2)
    }

    /// `h(a, b)` for tangent vectors given in `(X1, X2)` coordinates.
    pub fn apply(&self, a: &Vector2<f64>, b: &Vector2<f64>) -> NormalVec {
        self.h11() * (a[0] * b[0])
            + self.h12() * (a[0] * b[1] + a[1] * b[0])
            + self.h22() * (a[1] * b[1])
    }

    /// Coefficients after rotating the normal frame by `phi`
    /// (`N1' = cos N1 + sin N2`, `N2' = -sin N1 + cos N2`).
    pub fn rotate_normals(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let mut out = Self::zero();
        for k in 0..3 {
            out.h[0][k] = c * self.h[0][k] + s * self.h[1][k];
            out.h[1][k] = -s * self.h[0][k] + c * self.h[1][k];
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.h.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Rows are `X1`, `X2` in the coordinate basis `(X_u, X_v)`.
pub fn tangent_coefficients(jet: &Jet2, frame: &AdaptedFrame) -> Mat2 {
    let metric = Mat2::new(
        jet.xu.dot(&jet.xu),
        jet.xu.dot(&jet.xv),
        jet.xu.dot(&jet.xv),
        jet.xv.dot(&jet.xv),
    );
    let inv = metric.try_inverse().unwrap_or_else(Mat2::zeros);
    let row = |x: &Vec4| inv * Vector2::new(x.dot(&jet.xu), x.dot(&jet.xv));
    let c1 = row(&frame.x1);
    let c2 = row(&frame.x2);
    Mat2::new(c1[0], c1[1], c2[0], c2[1])
}

/// Projects the coordinate second derivatives on the normals and changes
/// basis to the orthonormal tangent frame.
pub fn second_form(jet: &Jet2, frame: &AdaptedFrame) -> SecondFundamentalForm {
    let c = tangent_coefficients(jet, frame);
    let mut out = SecondFundamentalForm::zero();
    for (alpha, normal) in [frame.n1, frame.n2].iter().enumerate() {
        let b = Mat2::new(
            jet.xuu.dot(normal),
            jet.xuv.dot(normal),
            jet.xuv.dot(normal),
            jet.xvv.dot(normal),
        );
        let h = c * b * c.transpose();
        out.h[alpha] = [h[(0, 0)], 0.5 * (h[(0, 1)] + h[(1, 0)]), h[(1, 1)]];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeOperatorPair {
    pub a1: Mat2,
    pub a2: Mat2,
}

impl ShapeOperatorPair {
    pub fn get(&self, alpha: usize) -> &Mat2 {
        match alpha {
            1 => &self.a1,
            2 => &self.a2,
            _ => panic!("normal index out of range: {alpha}"),
        }
    }
}

pub fn shape_operators(sff: &SecondFundamentalForm) -> ShapeOperatorPair {
    let m = |h: &[f64; 3]| Mat2::new(h[0], h[1], h[1], h[2]);
    ShapeOperatorPair {
        a1: m(&sff.h[0]),
        a2: m(&sff.h[1]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    /// Gaussian curvature `<h11, h22> - |h12|^2`.
    pub k: f64,
    /// Normal curvature `|<R^perp(X1,X2) N1, N2>|`.
    pub k_n: f64,
    /// Mean curvature vector on `(N1, N2)`.
    pub mean_curvature: NormalVec,
    pub h_norm: f64,
    /// Largest operator norm of the traceless part of `A_nu` over unit normals `nu`.
    pub umbilicity_deviation: f64,
    /// `max - min` of `|h(X, X)|` over unit tangent `X`.
    pub isotropy_deviation: f64,
    pub h_h2_minus_3k: f64,
}

/// Gaussian curvature through the inner products of `h` values.
pub fn gaussian_curvature(sff: &SecondFundamentalForm) -> f64 {
    sff.h11().dot(&sff.h22()) - sff.h12().norm_squared()
}

/// Gaussian curvature through the wedge form `R(X1,X2)X2 = sum A X1 ^ A X2 (X2)`
/// contracted with `X1`.
pub fn gaussian_curvature_from_shape_operators(ops: &ShapeOperatorPair) -> f64 {
    let x1 = Vector2::new(1.0, 0.0);
    let x2 = Vector2::new(0.0, 1.0);
    let mut r_x2 = Vector2::zeros();
    for alpha in 1..=2 {
        let a = ops.get(alpha);
        let (ax1, ax2) = (a * x1, a * x2);
        // (p ^ q) z = <q, z> p - <p, z> q
        r_x2 += ax1 * ax2.dot(&x2) - ax2 * ax1.dot(&x2);
    }
    r_x2.dot(&x1)
}

/// `<[A_alpha, A_beta] X1, X2>` for every `(alpha, beta)`; entry `(beta, alpha)`.
pub fn ricci_commutators(ops: &ShapeOperatorPair) -> Mat2 {
    let mut out = Mat2::zeros();
    for alpha in 1..=2 {
        for beta in 1..=2 {
            let c = commutator(ops.get(alpha), ops.get(beta));
            out[(beta - 1, alpha - 1)] = c[(1, 0)];
        }
    }
    out
}

pub fn curvature_report(sff: &SecondFundamentalForm) -> CurvatureReport {
    let ops = shape_operators(sff);
    let k = gaussian_curvature(sff);
    let k_n = ricci_commutators(&ops)[(1, 0)].abs();
    let mean = (sff.h11() + sff.h22()) * 0.5;
    let h_norm = mean.norm();
    CurvatureReport {
        k,
        k_n,
        mean_curvature: mean,
        h_norm,
        umbilicity_deviation: umbilicity_deviation(sff),
        isotropy_deviation: isotropy_deviation(sff),
        h_h2_minus_3k: h_norm * h_norm - 3.0 * k,
    }
}

fn umbilicity_deviation(sff: &SecondFundamentalForm) -> f64 {
    // traceless part of A_alpha is [[p, q], [q, -p]], operator norm sqrt(p^2 + q^2);
    // for A_nu = cos A_1 + sin A_2 the squared norm is a quadratic form in (cos, sin)
    let part = |h: &[f64; 3]| Vector2::new(0.5 * (h[0] - h[2]), h[1]);
    let (t1, t2) = (part(&sff.h[0]), part(&sff.h[1]));
    let (g11, g22, g12) = (t1.norm_squared(), t2.norm_squared(), t1.dot(&t2));
    let mid = 0.5 * (g11 + g22);
    let rad = (0.25 * (g11 - g22) * (g11 - g22) + g12 * g12).sqrt();
    (mid + rad).max(0.0).sqrt()
}

/// `|h(X_theta, X_theta)|^2 = p(2 theta)` with
/// `p(phi) = a0 + a1 cos phi + b1 sin phi + a2 cos 2phi + b2 sin 2phi`.
/// Critical points of `p` are the unit-circle roots of a quartic in
/// `z = e^{i phi}`; the extremes are read off at those roots.
fn isotropy_deviation(sff: &SecondFundamentalForm) -> f64 {
    let mean = (sff.h11() + sff.h22()) * 0.5;
    let p = (sff.h11() - sff.h22()) * 0.5;
    let q = sff.h12();
    let a0 = mean.norm_squared() + 0.5 * (p.norm_squared() + q.norm_squared());
    let a1 = 2.0 * mean.dot(&p);
    let b1 = 2.0 * mean.dot(&q);
    let a2 = 0.5 * (p.norm_squared() - q.norm_squared());
    let b2 = p.dot(&q);
    let eval = |phi: f64| {
        let value =
            a0 + a1 * phi.cos() + b1 * phi.sin() + a2 * (2.0 * phi).cos() + b2 * (2.0 * phi).sin();
        value.max(0.0)
    };

    // z^2 p'(phi) = c4 z^4 + c3 z^3 + c1 z + c0
    let coeffs = [
        Complex::new(b2, -a2),
        Complex::new(0.5 * b1, -0.5 * a1),
        Complex::new(0.0, 0.0),
        Complex::new(0.5 * b1, 0.5 * a1),
        Complex::new(b2, a2),
    ];
    let mut candidates = vec![
        0.0,
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::PI,
        -std::f64::consts::FRAC_PI_2,
    ];
    candidates.extend(unit_circle_root_args(&coeffs));

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for phi in candidates {
        let v = eval(phi);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (hi.sqrt() - lo.sqrt()).max(0.0)
}

/// Arguments of all roots of the polynomial `sum coeffs[k] z^k` (degree <= 4).
fn unit_circle_root_args(coeffs: &[Complex<f64>; 5]) -> Vec<f64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let significant = |c: &Complex<f64>| c.norm() > 1e-14 * scale;
    let top = (0..5).rev().find(|&k| significant(&coeffs[k])).unwrap_or(0);
    let bottom = (0..5).find(|&k| significant(&coeffs[k])).unwrap_or(0);
    let degree = top - bottom;
    if degree == 0 {
        return Vec::new();
    }
    // companion matrix of the monic polynomial after dividing out z^bottom
    let lead = coeffs[top];
    let mut companion = Matrix4::<Complex<f64>>::zeros();
    for i in 1..degree {
        companion[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[bottom + i] / lead;
    }
    let block = companion.view((0, 0), (degree, degree)).clone_owned();
    match block.eigenvalues() {
        Some(roots) => roots.iter().map(|z| z.im.atan2(z.re)).collect(),
        None => Vec::new(),
    }
}

/// Coefficients of `R^perp(X1, X2) N_alpha` on `(N1, N2)`, column `alpha`,
/// from `h^alpha_12 (h11 - h22) + (h^alpha_22 - h^alpha_11) h12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalCurvatureOperator {
    pub matrix: Mat2,
    /// Largest mismatch with `<[A_alpha, A_beta] X1, X2>`.
    pub ricci_mismatch: f64,
}

impl NormalCurvatureOperator {
    pub fn apply(&self, xi: &NormalVec) -> NormalVec {
        self.matrix * xi
    }

    /// `<R^perp(X1, X2) N1, N2>`
    pub fn coefficient_12(&self) -> f64 {
        self.matrix[(1, 0)]
    }
}

pub fn normal_curvature_operator(sff: &SecondFundamentalForm) -> NormalCurvatureOperator {
    let diff = sff.h11() - sff.h22();
    let h12 = sff.h12();
    let mut matrix = Mat2::zeros();
    for alpha in 1..=2 {
        let col = diff * sff.get(alpha, 1, 2) + h12 * (sff.get(alpha, 2, 2) - sff.get(alpha, 1, 1));
        matrix.set_column(alpha - 1, &col);
    }
    let ricci = ricci_commutators(&shape_operators(sff));
    let ricci_mismatch = (matrix - ricci).amax();
    NormalCurvatureOperator {
        matrix,
        ricci_mismatch,
    }
}

/// `|<R(X1,X2)X2, X1>|_(shape operators) - K_(inner products)|`; the two
/// arguments are normally the same form, but are separate so a perturbed
/// form can be checked against the jet-derived shape operators.
pub fn gauss_residual(sff: &SecondFundamentalForm, reference: &ShapeOperatorPair) -> f64 {
    (gaussian_curvature_from_shape_operators(reference) - gaussian_curvature(sff)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralResiduals {
    pub gauss: f64,
    pub ricci: f64,
    pub codazzi: f64,
}

pub fn structural_residuals(
    handle: &SurfaceHandle,
    u: f64,
    v: f64,
    policy: &TolerancePolicy,
) -> Result<StructuralResiduals> {
    structural_residuals_in_gauge(handle, u, v, policy, |_, _| 0.0)
}

/// Like [`structural_residuals`], but every stencil frame has its normals
/// replaced by the projection of the centre normals onto its normal plane,
/// which is smooth whatever seeds the generic frame picked.
pub fn structural_residuals_aligned(
    handle: &SurfaceHandle,
    u: f64,
    v: f64,
    policy: &TolerancePolicy,
) -> Result<StructuralResiduals> {
    structural_core(handle, u, v, policy, &|_, _| 0.0, true)
}

/// [`structural_residuals`], falling back to [`structural_residuals_aligned`]
/// when the generic frame changes seed inside the stencil.
pub fn structural_residuals_with_retry(
    handle: &SurfaceHandle,
    u: f64,
    v: f64,
    policy: &TolerancePolicy,
) -> Result<StructuralResiduals> {
    match structural_residuals(handle, u, v, policy) {
        Err(GeomError::GaugeDiscontinuity { .. }) => {
            structural_residuals_aligned(handle, u, v, policy)
        }
        other => other,
    }
}

/// Frame quantities at one stencil point.
struct FieldSample {
    jet: Jet2,
    frame: AdaptedFrame,
    sff: SecondFundamentalForm,
    coeffs: Mat2,
}

fn field_sample<G>(
    handle: &SurfaceHandle,
    u: f64,
    v: f64,
    policy: &TolerancePolicy,
    gauge: &G,
    align_to: Option<&AdaptedFrame>,
) -> Result<FieldSample>
where
    G: Fn(f64, f64) -> f64 + ?Sized,
{
    let (jet, frame) = handle.point(u, v, policy)?;
    let frame = match align_to {
        Some(target) => align_normals(&frame, target),
        None => frame,
    };
    let frame = frame.rotate_normals(gauge(u, v));
    let sff = second_form(&jet, &frame);
    let coeffs = tangent_coefficients(&jet, &frame);
    Ok(FieldSample {
        jet,
        frame,
        sff,
        coeffs,
    })
}

/// Cosine below which two stencil normals count as belonging to different gauges.
const GAUGE_JUMP_COS: f64 = 0.5;

fn align_normals(frame: &AdaptedFrame, target: &AdaptedFrame) -> AdaptedFrame {
    let project = |x: &Vec4| frame.n1 * frame.n1.dot(x) + frame.n2 * frame.n2.dot(x);
    let n1 = project(&target.n1).normalize();
    let p2 = project(&target.n2);
    let n2 = (p2 - n1 * n1.dot(&p2)).normalize();
    AdaptedFrame { n1, n2, ..*frame }
}

/// Christoffel symbols `gamma[r][p][q]` of the induced metric, from first-form
/// partials via the Koszul formula.
fn christoffel(jet: &Jet2) -> [[[f64; 2]; 2]; 2] {
    let xs = [jet.xu, jet.xv];
    let xss = [[jet.xuu, jet.xuv], [jet.xuv, jet.xvv]];
    let metric = Mat2::new(
        xs[0].dot(&xs[0]),
        xs[0].dot(&xs[1]),
        xs[1].dot(&xs[0]),
        xs[1].dot(&xs[1]),
    );
    let inv = metric.try_inverse().unwrap_or_else(Mat2::zeros);
    // dg[k][i][j] = d_k <X_i, X_j>
    let mut dg = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                dg[k][i][j] = xss[k][i].dot(&xs[j]) + xs[i].dot(&xss[k][j]);
            }
        }
    }
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for r in 0..2 {
        for p in 0..2 {
            for q in 0..2 {
                let mut acc = 0.0;
                for s in 0..2 {
                    let first_kind = 0.5 * (dg[p][q][s] + dg[q][p][s] - dg[s][p][q]);
                    acc += inv[(r, s)] * first_kind;
                }
                gamma[r][p][q] = acc;
            }
        }
    }
    gamma
}

/// Structural residuals with the normal frame rotated by `gauge(u, v)` at
/// every point of the stencil. Scalars must not depend on the gauge.
pub fn structural_residuals_in_gauge<G>(
    handle: &SurfaceHandle,
    u: f64,
    v: f64,
    policy: &TolerancePolicy,
    gauge: G,
) -> Result<StructuralResiduals>
where
    G: Fn(f64, f64) -> f64,
{
    structural_core(handle, u, v, policy, &gauge, false)
}

fn structural_core(
    handle: &SurfaceHandle,
    u: f64,
    v: f64,
    policy: &TolerancePolicy,
    gauge: &dyn Fn(f64, f64) -> f64,
    aligned: bool,
) -> Result<StructuralResiduals> {
    let centre = field_sample(handle, u, v, policy, gauge, None)?;
    let base = if aligned {
        Some(handle.point(u, v, policy)?.1)
    } else {
        None
    };
    let ops = shape_operators(&centre.sff);
    let gauss = gauss_residual(&centre.sff, &ops);
    let ricci = normal_curvature_operator(&centre.sff).ricci_mismatch;

    // packed field: h (6), N1 (4), tangent coefficients (4)
    let pack = |s: &FieldSample| -> SVector<f64, 14> {
        let mut out = SVector::<f64, 14>::zeros();
        for (i, x) in s.sff.h.iter().flatten().enumerate() {
            out[i] = *x;
        }
        for i in 0..4 {
            out[6 + i] = s.frame.n1[i];
        }
        out[10] = s.coeffs[(0, 0)];
        out[11] = s.coeffs[(0, 1)];
        out[12] = s.coeffs[(1, 0)];
        out[13] = s.coeffs[(1, 1)];
        out
    };
    // neighbouring frames of a smooth gauge are nearly equal; a seed switch
    // shows up as a sign flip or as a jump of tens of degrees
    let check_gauge = |s: &FieldSample, at_u: f64, at_v: f64| -> Result<()> {
        if s.frame.n1.dot(&centre.frame.n1) < GAUGE_JUMP_COS
            || s.frame.n2.dot(&centre.frame.n2) < GAUGE_JUMP_COS
        {
            return Err(GeomError::GaugeDiscontinuity { u: at_u, v: at_v });
        }
        Ok(())
    };
    let sample_at = |a: f64, b: f64| -> Result<SVector<f64, 14>> {
        let s = field_sample(handle, a, b, policy, gauge, base.as_ref()).map_err(|e| match e {
            GeomError::ProfileDomain { .. } | GeomError::DegenerateTangentPlane { .. } => {
                GeomError::StencilOutOfDomain { u: a, v: b }
            }
            other => other,
        })?;
        check_gauge(&s, a, b)?;
        Ok(pack(&s))
    };
    let levels = policy.richardson_levels;
    let d_u = richardson_derivative(|a| sample_at(a, v), u, policy.second_step(u), levels)?;
    let d_v = richardson_derivative(|b| sample_at(u, b), v, policy.second_step(v), levels)?;

    let c = centre.coeffs;
    // directional derivative along X_i of packed component `k`
    let along = |i: usize, k: usize| c[(i, 0)] * d_u[k] + c[(i, 1)] * d_v[k];
    let dn1 = |i: usize| Vec4::new(along(i, 6), along(i, 7), along(i, 8), along(i, 9));
    // omega(X_i) = <D_{X_i} N1, N2>
    let omega = [dn1(0).dot(&centre.frame.n2), dn1(1).dot(&centre.frame.n2)];

    // connection coefficients conn[i][j][m] = <nabla_{X_i} X_j, X_m>
    let gamma = christoffel(&centre.jet);
    let metric = Mat2::new(
        centre.jet.xu.dot(&centre.jet.xu),
        centre.jet.xu.dot(&centre.jet.xv),
        centre.jet.xv.dot(&centre.jet.xu),
        centre.jet.xv.dot(&centre.jet.xv),
    );
    let mut conn = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            // coordinate components of nabla_{X_i} X_j
            let mut w = Vector2::zeros();
            for p in 0..2 {
                w[p] += along(i, 10 + 2 * j + p);
                for q in 0..2 {
                    for r in 0..2 {
                        w[r] += c[(j, p)] * c[(i, q)] * gamma[r][q][p];
                    }
                }
            }
            for m in 0..2 {
                let xm = Vector2::new(c[(m, 0)], c[(m, 1)]);
                conn[i][j][m] = w.dot(&(metric * xm));
            }
        }
    }

    let h_index = |j: usize, k: usize| match (j.min(k), j.max(k)) {
        (0, 0) => 0,
        (0, 1) => 1,
        _ => 2,
    };
    // (nabla-bar_{X_i} h)(X_j, X_k) on (N1, N2)
    let nabla_h = |i: usize, j: usize, k: usize| -> NormalVec {
        let slot = h_index(j, k);
        let h1 = centre.sff.h[0][slot];
        let h2 = centre.sff.h[1][slot];
        let mut out = NormalVec::new(
            along(i, slot) - h2 * omega[i],
            along(i, 3 + slot) + h1 * omega[i],
        );
        for m in 0..2 {
            let hm_k = centre.sff.value(m + 1, k + 1);
            let hj_m = centre.sff.value(j + 1, m + 1);
            out -= hm_k * conn[i][j][m] + hj_m * conn[i][k][m];
        }
        out
    };
    let codazzi =
        (nabla_h(0, 1, 1) - nabla_h(1, 0, 1)).norm() + (nabla_h(0, 1, 0) - nabla_h(1, 0, 0)).norm();

    Ok(StructuralResiduals {
        gauss,
        ricci,
        codazzi,
    })
}
