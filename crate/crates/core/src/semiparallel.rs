//! The tensor `(R-bar(X1, X2) . h)(X_k, X_l)`, evaluated two ways:
//! from the expanded component formulas, and directly from
//! `R^perp h(X_k, X_l) - h(R X_k, X_l) - h(X_k, R X_l)` with
//! `R(X1, X2) = K (X1 ^ X2)`. A surface is semi-parallel where it vanishes.

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::invariants::{
    gaussian_curvature, normal_curvature_operator, second_form, NormalVec, SecondFundamentalForm,
};
use crate::numkit::{Mat2, TolerancePolicy};
use crate::surface::{Grid, JetKind, SurfaceHandle};

/// Agreement between the two routes below which no disagreement is raised,
/// before scaling by the cube of the largest `|h|` (the tensor is cubic in `h`).
pub const ROUTE_TOL: f64 = 1e-8;

/// Index pairs `(1,1)`, `(1,2)`, `(2,2)` in storage order.
pub const PAIRS: [(usize, usize); 3] = [(1, 1), (1, 2), (2, 2)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiParallelTensor {
    /// `s[pair][alpha]`: component of `(R-bar . h)(X_k, X_l)` on `N_(alpha+1)`.
    pub s: [[f64; 2]; 3],
    /// Largest normal-vector length over the three pairs.
    pub residual_norm: f64,
}

impl SemiParallelTensor {
    fn from_components(parts: [NormalVec; 3]) -> Self {
        let s = parts.map(|p| [p[0], p[1]]);
        let residual_norm = parts.iter().map(|p| p.norm()).fold(0.0, f64::max);
        Self { s, residual_norm }
    }

    pub fn component(&self, pair: usize) -> NormalVec {
        NormalVec::new(self.s[pair][0], self.s[pair][1])
    }

    /// Largest componentwise difference from another tensor.
    pub fn max_gap(&self, other: &Self) -> f64 {
        self.s
            .iter()
            .flatten()
            .zip(other.s.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Component formulas, with sums over both normals.
pub fn rbar_h_formula(sff: &SecondFundamentalForm, k: f64) -> SemiParallelTensor {
    let sum = |f: &dyn Fn(&[f64; 3]) -> f64| sff.h.iter().map(f).sum::<f64>();
    let h12 = sff.h12();
    let diff = sff.h11() - sff.h22();

    let s11 = h12 * (sum(&|h| h[0] * (h[2] - h[0])) + 2.0 * k) + diff * sum(&|h| h[0] * h[1]);
    let s12 = h12 * sum(&|h| h[1] * (h[2] - h[0])) + diff * (sum(&|h| h[1] * h[1]) - k);
    let s22 = h12 * (sum(&|h| h[2] * (h[2] - h[0])) - 2.0 * k) + diff * sum(&|h| h[2] * h[1]);
    SemiParallelTensor::from_components([s11, s12, s22])
}

/// Direct evaluation: the normal curvature operator acting on `h(X_k, X_l)`
/// minus `h` applied to the tangent curvature endomorphism.
pub fn rbar_h_direct(sff: &SecondFundamentalForm, k: f64) -> SemiParallelTensor {
    let r_perp = normal_curvature_operator(sff);
    // R(X1,X2) X1 = -K X2, R(X1,X2) X2 = K X1, as a matrix acting on columns
    let r_tan = Mat2::new(0.0, k, -k, 0.0);
    let basis = [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)];
    let parts = PAIRS.map(|(a, b)| {
        let (xk, xl) = (basis[a - 1], basis[b - 1]);
        r_perp.apply(&sff.apply(&xk, &xl))
            - sff.apply(&(r_tan * xk), &xl)
            - sff.apply(&xk, &(r_tan * xl))
    });
    SemiParallelTensor::from_components(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub semi_parallel: bool,
    pub residual_norm: f64,
    pub tol_used: f64,
}

impl Verdict {
    pub fn new(residual_norm: f64, tol: f64) -> Self {
        Self {
            semi_parallel: residual_norm < tol,
            residual_norm,
            tol_used: tol,
        }
    }
}

pub fn residual_tol(kind: JetKind, policy: &TolerancePolicy) -> f64 {
    match kind {
        JetKind::Analytic => policy.residual_tol_analytic,
        JetKind::Numeric => policy.residual_tol_numeric,
    }
}

/// Both routes at one form; errors if they disagree beyond [`ROUTE_TOL`].
pub fn checked_tensor(sff: &SecondFundamentalForm) -> Result<SemiParallelTensor> {
    let k = gaussian_curvature(sff);
    let formula = rbar_h_formula(sff, k);
    let direct = rbar_h_direct(sff, k);
    let gap = formula.max_gap(&direct);
    let scale = sff.max_abs().max(1.0).powi(3);
    if !(gap <= ROUTE_TOL * scale) {
        return Err(GeomError::RouteDisagreement { gap });
    }
    Ok(formula)
}

pub fn semiparallel_verdict(
    handle: &SurfaceHandle,
    u: f64,
    v: f64,
    policy: &TolerancePolicy,
) -> Result<Verdict> {
    let (jet, frame) = handle.point(u, v, policy)?;
    let tensor = checked_tensor(&second_form(&jet, &frame))?;
    Ok(Verdict::new(
        tensor.residual_norm,
        residual_tol(handle.jet_kind(), policy),
    ))
}

/// Conjunction of pointwise verdicts over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceVerdict {
    pub semi_parallel: bool,
    pub max_residual: f64,
    pub tol_used: f64,
    pub points: usize,
}

pub fn surface_verdict(
    handle: &SurfaceHandle,
    grid: &Grid,
    policy: &TolerancePolicy,
) -> Result<SurfaceVerdict> {
    let tol = residual_tol(handle.jet_kind(), policy);
    let mut max_residual = 0.0_f64;
    let points = grid.points();
    for &(u, v) in &points {
        max_residual = max_residual.max(semiparallel_verdict(handle, u, v, policy)?.residual_norm);
    }
    Ok(SurfaceVerdict {
        semi_parallel: max_residual < tol,
        max_residual,
        tol_used: tol,
        points: points.len(),
    })
}
