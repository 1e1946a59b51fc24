//! Case detection for meridian surfaces and the profile ODE that decides
//! semi-parallelity when the spherical curve is a great circle.

use nalgebra::{Matrix4, SMatrix};
use serde::Serialize;

use crate::curves::{uniform_samples, Profile, ProfileSample};
use crate::error::{GeomError, Result};
use crate::invariants::{gaussian_curvature, second_form};
use crate::numkit::{TolerancePolicy, Vec4};
use crate::semiparallel::{residual_tol, semiparallel_verdict};
use crate::surface::{Grid, SurfaceHandle};

/// Flags `kappa == 0`, `kappa_alpha == 0` and `kappa_alpha == g'/f` use this.
pub const ZERO_TOL: f64 = 1e-9;
/// `max - min` of sampled `kappa` below this counts as constant.
pub const CONSTANT_TOL: f64 = 1e-8;
/// Relative singular value below which a direction counts as absent.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeridianCase {
    I,
    II,
    III,
    #[serde(rename = "degenerate")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiParallelBranch {
    /// Straight profile.
    #[serde(rename = "case_i")]
    CaseI,
    /// Great circle with `kappa_alpha = g'/f`.
    #[serde(rename = "case_ii")]
    CaseII,
    NotSemiParallel,
    /// The branch predicted from the curvatures contradicts the measured tensor.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub case: MeridianCase,
    pub kappa_is_zero: bool,
    pub kappa_alpha_is_zero: bool,
    pub kappa_constant: bool,
    pub theorem2_branch: SemiParallelBranch,
    /// `max |f f'' - f'^2 + 1|` over the grid's u samples.
    pub ode_residual_max: f64,
    /// `max |f f'' + f'^2 - 1|`, the equation the closed-form sqrt profile satisfies.
    pub ode_residual_alt_max: f64,
    pub semiparallel_residual_max: f64,
    pub semi_parallel: bool,
    pub tol_used: f64,
    pub kappa_range: (f64, f64),
    pub kappa_alpha_max_abs: f64,
    /// `max |kappa_alpha - g'/f|`.
    pub kappa_alpha_minus_g_over_f_max: f64,
    pub gaussian_curvature_max_abs: f64,
    /// Largest pointwise rank of `span{h11, h12, h22}` in the normal plane.
    pub normal_rank_max: usize,
    /// `sqrt(lambda_min / lambda_max)` of the centred point cloud's scatter matrix.
    pub hyperplane_ratio: f64,
    pub hyperplanar: bool,
    pub points_evaluated: usize,
    pub points_skipped: usize,
}

/// `max |f f'' - f'^2 + 1|` over `samples` uniform points of `interval`.
pub fn ode_residual(profile: &Profile, interval: (f64, f64), samples: usize) -> Result<f64> {
    ode_residual_with(profile, interval, samples, |s| {
        s.f * s.d2f - s.df * s.df + 1.0
    })
}

/// `max |f f'' + f'^2 - 1|`.
pub fn ode_residual_alt(profile: &Profile, interval: (f64, f64), samples: usize) -> Result<f64> {
    ode_residual_with(profile, interval, samples, |s| {
        s.f * s.d2f + s.df * s.df - 1.0
    })
}

fn ode_residual_with(
    profile: &Profile,
    interval: (f64, f64),
    samples: usize,
    r: impl Fn(&ProfileSample) -> f64,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for u in uniform_samples(interval.0, interval.1, samples) {
        worst = worst.max(r(&profile.sample(u)?).abs());
    }
    Ok(worst)
}

fn range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

pub fn classify_meridian(
    handle: &SurfaceHandle,
    grid: &Grid,
    policy: &TolerancePolicy,
) -> Result<ClassificationResult> {
    let meridian = handle.meridian().ok_or(GeomError::NotAMeridian)?;

    let mut degenerate = false;
    let mut profile_samples = Vec::new();
    for u in grid.u_values() {
        match meridian.profile.sample(u) {
            Ok(s) => profile_samples.push(s),
            Err(e) if e.is_domain_error() => degenerate = true,
            Err(e) => return Err(e),
        }
    }
    if profile_samples.is_empty() {
        return Err(GeomError::ProfileDomain {
            u: grid.u.0,
            reason: "no grid point is above the pole guard".into(),
        });
    }
    let kappas = grid
        .v_values()
        .map(|v| meridian.curve.sample(v).map(|c| c.kappa))
        .collect::<Result<Vec<_>>>()?;

    let kappa_range = range(kappas.iter().copied());
    let kappa_max_abs = kappa_range.0.abs().max(kappa_range.1.abs());
    let kappa_alpha_max_abs = profile_samples
        .iter()
        .map(|s| s.kappa_alpha.abs())
        .fold(0.0, f64::max);
    let kappa_alpha_minus_g_over_f_max = profile_samples
        .iter()
        .map(|s| (s.kappa_alpha - s.dg / s.f).abs())
        .fold(0.0, f64::max);
    let ode = |s: &ProfileSample| (s.f * s.d2f - s.df * s.df + 1.0).abs();
    let ode_alt = |s: &ProfileSample| (s.f * s.d2f + s.df * s.df - 1.0).abs();
    let ode_residual_max = profile_samples.iter().map(ode).fold(0.0, f64::max);
    let ode_residual_alt_max = profile_samples.iter().map(ode_alt).fold(0.0, f64::max);

    let kappa_is_zero = kappa_max_abs < ZERO_TOL;
    let kappa_alpha_is_zero = kappa_alpha_max_abs < ZERO_TOL;
    let kappa_constant = kappa_range.1 - kappa_range.0 < CONSTANT_TOL;

    // a straight profile takes precedence when both curvatures vanish
    let case = if degenerate {
        MeridianCase::Degenerate
    } else if kappa_alpha_is_zero {
        MeridianCase::II
    } else if kappa_is_zero {
        MeridianCase::I
    } else {
        MeridianCase::III
    };

    let predicted = if kappa_alpha_is_zero {
        SemiParallelBranch::CaseI
    } else if kappa_is_zero && kappa_alpha_minus_g_over_f_max < ZERO_TOL {
        SemiParallelBranch::CaseII
    } else {
        SemiParallelBranch::NotSemiParallel
    };

    let tol = residual_tol(handle.jet_kind(), policy);
    let mut sp_max = 0.0_f64;
    let mut k_max = 0.0_f64;
    let mut normal_rank_max = 0;
    let mut points = Vec::new();
    let mut skipped = 0;
    for (u, v) in grid.points() {
        match handle.point(u, v, policy) {
            Ok((jet, frame)) => {
                let sff = second_form(&jet, &frame);
                k_max = k_max.max(gaussian_curvature(&sff).abs());
                normal_rank_max =
                    normal_rank_max.max(rank(&SMatrix::<f64, 2, 3>::from_row_slice(&[
                        sff.h[0][0],
                        sff.h[0][1],
                        sff.h[0][2],
                        sff.h[1][0],
                        sff.h[1][1],
                        sff.h[1][2],
                    ])));
                sp_max = sp_max.max(semiparallel_verdict(handle, u, v, policy)?.residual_norm);
                points.push(jet.x);
            }
            Err(e) if e.is_domain_error() => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let semi_parallel = !points.is_empty() && sp_max < tol;
    let predicted_sp = matches!(
        predicted,
        SemiParallelBranch::CaseI | SemiParallelBranch::CaseII
    );
    let theorem2_branch = if predicted_sp == semi_parallel {
        predicted
    } else {
        SemiParallelBranch::Inconsistent
    };

    let hyperplane_ratio = hyperplane_ratio(&points);
    Ok(ClassificationResult {
        case,
        kappa_is_zero,
        kappa_alpha_is_zero,
        kappa_constant,
        theorem2_branch,
        ode_residual_max,
        ode_residual_alt_max,
        semiparallel_residual_max: sp_max,
        semi_parallel,
        tol_used: tol,
        kappa_range,
        kappa_alpha_max_abs,
        kappa_alpha_minus_g_over_f_max,
        gaussian_curvature_max_abs: k_max,
        normal_rank_max,
        hyperplane_ratio,
        hyperplanar: hyperplane_ratio < RANK_TOL,
        points_evaluated: points.len(),
        points_skipped: skipped,
    })
}

fn rank(m: &SMatrix<f64, 2, 3>) -> usize {
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

fn hyperplane_ratio(points: &[Vec4]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mean = points.iter().sum::<Vec4>() / points.len() as f64;
    let scatter: Matrix4<f64> = points
        .iter()
        .map(|p| (p - mean) * (p - mean).transpose())
        .sum();
    let ev = scatter.symmetric_eigenvalues();
    let top = ev.max();
    if top <= 0.0 {
        return 0.0;
    }
    (ev.min().max(0.0) / top).sqrt()
}
