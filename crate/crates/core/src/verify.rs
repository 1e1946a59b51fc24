//! The built-in verification suite behind `meridian verify`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::{classify_meridian, ode_residual, ode_residual_alt, SemiParallelBranch};
use crate::curves::{uniform_samples, ProfileSpec};
use crate::error::Result;
use crate::families::{builtin_families, Family};
use crate::invariants::{
    curvature_report, gaussian_curvature, second_form, structural_residuals_with_retry,
    SecondFundamentalForm,
};
use crate::numkit::{AdaptedFrame, TolerancePolicy};
use crate::semiparallel::{checked_tensor, rbar_h_direct, rbar_h_formula};
use crate::surface::{BuiltinImmersion, Grid, SurfaceHandle};

const GRID: usize = 6;
const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone)]
pub struct GroupResult {
    pub name: &'static str,
    pub tags: &'static [&'static str],
    pub passed: bool,
    pub detail: String,
    pub info: Vec<String>,
}

struct Group {
    name: &'static str,
    tags: &'static [&'static str],
    run: fn(&TolerancePolicy, &mut Vec<String>) -> Result<(bool, String)>,
}

const GROUPS: &[Group] = &[
    Group {
        name: "structural",
        tags: &["meridian", "analytic"],
        run: structural_analytic,
    },
    Group {
        name: "structural-numeric",
        tags: &["meridian", "numeric"],
        run: structural_numeric,
    },
    Group {
        name: "immersions",
        tags: &["immersion", "numeric"],
        run: immersions,
    },
    Group {
        name: "closed-form",
        tags: &["meridian", "numeric"],
        run: closed_form,
    },
    Group {
        name: "routes",
        tags: &["meridian", "immersion", "analytic"],
        run: routes,
    },
    Group {
        name: "gauge",
        tags: &["meridian", "immersion", "analytic"],
        run: gauge,
    },
    Group {
        name: "branches",
        tags: &["meridian", "analytic"],
        run: branches,
    },
    Group {
        name: "branches-numeric",
        tags: &["meridian", "numeric"],
        run: branches_numeric,
    },
    Group {
        name: "ode",
        tags: &["meridian", "analytic"],
        run: ode,
    },
];

pub fn group_names() -> Vec<&'static str> {
    GROUPS.iter().map(|g| g.name).collect()
}

/// Runs every group whose name or one of whose tags equals `filter`.
/// Returns `None` when the filter selects nothing.
pub fn run_verify(filter: Option<&str>, policy: &TolerancePolicy) -> Option<Vec<GroupResult>> {
    let selected: Vec<&Group> = GROUPS
        .iter()
        .filter(|g| filter.is_none_or(|f| g.name == f || g.tags.contains(&f)))
        .collect();
    if selected.is_empty() {
        return None;
    }
    Some(
        selected
            .into_iter()
            .map(|g| {
                let mut info = Vec::new();
                let (passed, detail) = match (g.run)(policy, &mut info) {
                    Ok(r) => r,
                    Err(e) => (false, format!("error: {e}")),
                };
                GroupResult {
                    name: g.name,
                    tags: g.tags,
                    passed,
                    detail,
                    info,
                }
            })
            .collect(),
    )
}

/// Tracks the worst value of a quantity against its bound.
struct Worst {
    label: &'static str,
    bound: f64,
    value: f64,
    at: String,
}

impl Worst {
    fn new(label: &'static str, bound: f64) -> Self {
        Self {
            label,
            bound,
            value: 0.0,
            at: String::new(),
        }
    }

    fn see(&mut self, value: f64, at: impl FnOnce() -> String) {
        // NaN must register as a failure
        if !(value <= self.value) {
            self.value = value;
            self.at = at();
        }
    }

    fn ok(&self) -> bool {
        self.value < self.bound
    }
}

fn summarise(worst: &[Worst]) -> (bool, String) {
    let mut out = String::new();
    for w in worst {
        let _ = write!(out, "{} max {:.3e} (< {:.0e})", w.label, w.value, w.bound);
        if !w.ok() {
            let _ = write!(out, " at {}", w.at);
        }
        out.push_str("; ");
    }
    (
        worst.iter().all(Worst::ok),
        out.trim_end_matches("; ").to_string(),
    )
}

fn immersion_grid() -> Grid {
    Grid::new((-0.9, 0.9, 5), (-0.9, 0.9, 5)).expect("static grid")
}

fn structural_over(
    handles: impl IntoIterator<Item = (String, SurfaceHandle, Grid)>,
    policy: &TolerancePolicy,
    bound: f64,
) -> Result<(bool, String)> {
    let mut w = [
        Worst::new("gauss", bound),
        Worst::new("ricci", bound),
        Worst::new("codazzi", 1e-4),
    ];
    for (name, h, grid) in handles {
        for (u, v) in grid.points() {
            let s = structural_residuals_with_retry(&h, u, v, policy)?;
            let at = || format!("{name} ({u:.4}, {v:.4})");
            w[0].see(s.gauss, at);
            w[1].see(s.ricci, at);
            w[2].see(s.codazzi, at);
        }
    }
    Ok(summarise(&w))
}

fn family_handles(
    policy: &TolerancePolicy,
    numeric: bool,
) -> Result<Vec<(String, SurfaceHandle, Grid)>> {
    builtin_families()
        .into_iter()
        .map(|f| {
            let h = f.handle(policy)?;
            let h = if numeric { h.with_numeric_jets() } else { h };
            Ok((f.name.to_string(), h, f.grid(GRID)))
        })
        .collect()
}

fn immersion_handles() -> Vec<(String, SurfaceHandle, Grid)> {
    BuiltinImmersion::ALL
        .iter()
        .map(|b| (b.name().to_string(), b.handle(), immersion_grid()))
        .collect()
}

fn structural_analytic(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    structural_over(family_handles(policy, false)?, policy, 1e-8)
}

fn structural_numeric(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    structural_over(family_handles(policy, true)?, policy, 1e-6)
}

fn immersions(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    structural_over(immersion_handles(), policy, 1e-6)
}

/// Re-expresses `sff`, given in `from`, in the normal frame of `to`; both
/// frames must share their tangent vectors.
pub fn project_normals(
    sff: &SecondFundamentalForm,
    from: &AdaptedFrame,
    to: &AdaptedFrame,
) -> SecondFundamentalForm {
    let mut out = SecondFundamentalForm::zero();
    for k in 0..3 {
        let vec = from.n1 * sff.h[0][k] + from.n2 * sff.h[1][k];
        out.h[0][k] = vec.dot(&to.n1);
        out.h[1][k] = vec.dot(&to.n2);
    }
    out
}

fn closed_form(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    let mut w = [
        Worst::new("h relative", 1e-6),
        Worst::new("K - k_a g'/f", 1e-8),
        Worst::new("K_N", 1e-8),
    ];
    for fam in builtin_families() {
        let analytic = fam.handle(policy)?;
        let numeric = analytic.with_numeric_jets();
        let m = analytic.meridian().expect("families are meridians");
        for (u, v) in fam.grid(GRID).points() {
            let (jet, frame) = numeric.point(u, v, policy)?;
            let closed = m.frame(u, v)?;
            let h = project_normals(&second_form(&jet, &frame), &frame, &closed);
            let p = m.profile.sample(u)?;
            let kappa = m.curve.sample(v)?.kappa;
            let exact = SecondFundamentalForm::new(
                [0.0, 0.0, kappa / p.f],
                [p.kappa_alpha, 0.0, p.dg / p.f],
            );
            let scale = exact.max_abs().max(1.0);
            let gap = exact
                .h
                .iter()
                .flatten()
                .zip(h.h.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let at = || format!("{} ({u:.4}, {v:.4})", fam.name);
            w[0].see(gap / scale, at);
            let c = curvature_report(&h);
            w[1].see((c.k - p.kappa_alpha * p.dg / p.f).abs(), at);
            w[2].see(c.k_n, at);
        }
    }
    Ok(summarise(&w))
}

fn random_form(rng: &mut ChaCha8Rng) -> SecondFundamentalForm {
    let mut x = || rng.random_range(-2.0..2.0);
    SecondFundamentalForm::new([x(), x(), x()], [x(), x(), x()])
}

fn routes(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    let mut w = Worst::new("formula vs direct", 1e-10);
    let mut check = |sff: &SecondFundamentalForm, at: &dyn Fn() -> String| {
        let k = gaussian_curvature(sff);
        w.see(rbar_h_formula(sff, k).max_gap(&rbar_h_direct(sff, k)), at);
    };
    for (name, h, grid) in family_handles(policy, false)?
        .into_iter()
        .chain(immersion_handles())
    {
        for (u, v) in grid.points() {
            let (jet, frame) = h.point(u, v, policy)?;
            check(&second_form(&jet, &frame), &|| {
                format!("{name} ({u:.4}, {v:.4})")
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..100 {
        check(&random_form(&mut rng), &|| format!("random form #{i}"));
    }
    Ok(summarise(&[w]))
}

fn gauge(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    let mut w = Worst::new("K, K_N, |H|, sp_residual spread", 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for (name, h, grid) in family_handles(policy, false)?
        .into_iter()
        .chain(immersion_handles())
    {
        for (u, v) in grid.points() {
            let (jet, frame) = h.point(u, v, policy)?;
            let scalars = |f: &AdaptedFrame| -> Result<[f64; 4]> {
                let sff = second_form(&jet, f);
                let c = curvature_report(&sff);
                Ok([c.k, c.k_n, c.h_norm, checked_tensor(&sff)?.residual_norm])
            };
            let base = scalars(&frame)?;
            for _ in 0..16 {
                let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                let rotated = scalars(&frame.rotate_normals(phi))?;
                let spread = base
                    .iter()
                    .zip(&rotated)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                w.see(spread, || format!("{name} ({u:.4}, {v:.4}) phi={phi:.4}"));
            }
        }
    }
    Ok(summarise(&[w]))
}

fn branch_check(policy: &TolerancePolicy, numeric: bool) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut count = 0;
    for fam in builtin_families() {
        let h = fam.handle(policy)?;
        let h = if numeric { h.with_numeric_jets() } else { h };
        let r = classify_meridian(&h, &fam.grid(GRID), policy)?;
        count += 1;
        if r.theorem2_branch == SemiParallelBranch::Inconsistent
            || r.theorem2_branch != fam.branch
            || r.case != fam.case
        {
            failures.push(format!(
                "{}: case {:?} branch {:?} (expected {:?} {:?}), residual {:.3e}",
                fam.name,
                r.case,
                r.theorem2_branch,
                fam.case,
                fam.branch,
                r.semiparallel_residual_max
            ));
        }
    }
    if failures.is_empty() {
        Ok((true, format!("{count} families consistent")))
    } else {
        Ok((false, failures.join("; ")))
    }
}

fn branches(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    branch_check(policy, false)
}

fn branches_numeric(policy: &TolerancePolicy, _: &mut Vec<String>) -> Result<(bool, String)> {
    branch_check(policy, true)
}

/// `2 (2b - a^2) / f^2`, the residual of the sqrt profile in the ODE.
pub fn printed_sqrt_ode_oracle(a: f64, b: f64, u: f64) -> f64 {
    2.0 * (2.0 * b - a * a) / (u * u - 2.0 * a * u + 2.0 * b)
}

fn ode(policy: &TolerancePolicy, info: &mut Vec<String>) -> Result<(bool, String)> {
    let mut sphere = Worst::new("sphere_arc residual", 1e-10);
    let mut printed = Worst::new("sqrt profile vs 2(2b-a^2)/f^2", 1e-8);
    let sphere_fam: Vec<Family> = builtin_families()
        .into_iter()
        .filter(|f| matches!(f.profile, ProfileSpec::SphereArc { .. }))
        .collect();
    for fam in &sphere_fam {
        let h = fam.handle(policy)?;
        let profile = &h.meridian().expect("meridian").profile;
        sphere.see(ode_residual(profile, fam.u, 50)?, || fam.name.to_string());
    }
    for fam in builtin_families() {
        let ProfileSpec::PrintedSqrt { a, b } = fam.profile else {
            continue;
        };
        let h = fam.handle(policy)?;
        let profile = &h.meridian().expect("meridian").profile;
        for u in uniform_samples(fam.u.0, fam.u.1, 50) {
            let got = ode_residual(profile, (u, u), 2)?;
            printed.see((got - printed_sqrt_ode_oracle(a, b, u)).abs(), || {
                format!("{} u={u:.4}", fam.name)
            });
        }
        info.push(format!(
            "sqrt profile a={a}, b={b} on [{}, {}]: max |f f'' - f'^2 + 1| = {:.6e} (expected 2(2b-a^2)/f^2, \
             nonzero), max |f f'' + f'^2 - 1| = {:.3e}; it solves f f'' + f'^2 - 1 = 0, not the \
             semi-parallel ODE f f'' - f'^2 + 1 = 0, which the sphere_arc profile does solve",
            fam.u.0,
            fam.u.1,
            ode_residual(profile, fam.u, 50)?,
            ode_residual_alt(profile, fam.u, 50)?,
        ));
    }
    Ok(summarise(&[sphere, printed]))
}

/// `PASS`/`FAIL` per group, then `INFO` lines.
pub fn render(results: &[GroupResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(
            out,
            "{} {} [{}]: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.tags.join(","),
            r.detail
        );
    }
    for r in results {
        for line in &r.info {
            let _ = writeln!(out, "INFO {}: {line}", r.name);
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(out, "{} groups, {} failed", results.len(), failed);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_policy_passes_everything() {
        let results = run_verify(None, &TolerancePolicy::default()).unwrap();
        let text = render(&results);
        assert!(results.iter().all(|r| r.passed), "{text}");
        assert!(text.contains("INFO ode: sqrt profile a=0, b=1"));
    }

    #[test]
    fn coarse_steps_fail_numeric_groups() {
        let policy = TolerancePolicy {
            fd_step: 0.1,
            ..TolerancePolicy::default()
        };
        let results = run_verify(Some("numeric"), &policy).unwrap();
        assert!(results.iter().any(|r| !r.passed), "{}", render(&results));
    }

    #[test]
    fn filtering() {
        let policy = TolerancePolicy::default();
        let names: Vec<_> = run_verify(Some("meridian"), &policy)
            .unwrap()
            .iter()
            .map(|r| r.name)
            .collect();
        assert!(!names.contains(&"immersions") && names.contains(&"structural"));
        assert_eq!(run_verify(Some("routes"), &policy).unwrap().len(), 1);
        assert!(run_verify(Some("nothing"), &policy).is_none());
    }
}
