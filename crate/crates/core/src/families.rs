//! Named meridian configurations shared by `verify` and the test suites.

use std::f64::consts::FRAC_PI_2;

use crate::classifier::{MeridianCase, SemiParallelBranch};
use crate::curves::{CurveSpec, KappaFn, ProfileSpec};
use crate::error::Result;
use crate::numkit::TolerancePolicy;
use crate::surface::{make_meridian_surface, Grid, MeridianSpec, SurfaceHandle};

#[derive(Debug, Clone)]
pub struct Family {
    pub name: &'static str,
    pub curve: CurveSpec,
    pub profile: ProfileSpec,
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub case: MeridianCase,
    pub branch: SemiParallelBranch,
}

impl Family {
    pub fn spec(&self) -> MeridianSpec {
        MeridianSpec {
            curve: self.curve.clone(),
            profile: self.profile.clone(),
        }
    }

    pub fn handle(&self, policy: &TolerancePolicy) -> Result<SurfaceHandle> {
        make_meridian_surface(self.spec(), policy)
    }

    pub fn grid(&self, count: usize) -> Grid {
        Grid::new((self.u.0, self.u.1, count), (self.v.0, self.v.1, count))
            .expect("family ranges are valid")
    }

    pub fn is_semi_parallel(&self) -> bool {
        matches!(
            self.branch,
            SemiParallelBranch::CaseI | SemiParallelBranch::CaseII
        )
    }
}

const V_RANGE: (f64, f64) = (-1.0, 2.5);

fn line(name: &'static str, curve: CurveSpec) -> Family {
    Family {
        name,
        curve,
        profile: ProfileSpec::Line {
            theta: 0.8,
            f0: 1.0,
            g0: 0.2,
        },
        u: (0.0, 2.0),
        v: V_RANGE,
        case: MeridianCase::II,
        branch: SemiParallelBranch::CaseI,
    }
}

fn printed(name: &'static str, a: f64, b: f64) -> Family {
    Family {
        name,
        curve: CurveSpec::GreatCircle,
        profile: ProfileSpec::PrintedSqrt { a, b },
        u: (1.0, 2.0),
        v: V_RANGE,
        case: MeridianCase::I,
        branch: SemiParallelBranch::NotSemiParallel,
    }
}

pub fn builtin_families() -> Vec<Family> {
    vec![
        Family {
            name: "sphere",
            curve: CurveSpec::GreatCircle,
            profile: ProfileSpec::SphereArc { k: 1.0, u0: 0.0 },
            u: (0.3, 2.8),
            v: V_RANGE,
            case: MeridianCase::I,
            branch: SemiParallelBranch::CaseII,
        },
        line("line_great_circle", CurveSpec::GreatCircle),
        line("line_circle_0.5", CurveSpec::Circle { kappa: 0.5 }),
        line("line_circle_1", CurveSpec::Circle { kappa: 1.0 }),
        line("line_circle_2", CurveSpec::Circle { kappa: 2.0 }),
        line(
            "line_varying_kappa",
            CurveSpec::Custom {
                kappa: KappaFn::Sinusoid {
                    offset: 0.2,
                    amplitude: 0.1,
                    frequency: 1.0,
                    phase: 0.0,
                },
                initial: Default::default(),
            },
        ),
        Family {
            name: "sphere_arc_circle_1",
            curve: CurveSpec::Circle { kappa: 1.0 },
            profile: ProfileSpec::SphereArc { k: 1.0, u0: 0.0 },
            u: (std::f64::consts::FRAC_PI_4, FRAC_PI_2),
            v: V_RANGE,
            case: MeridianCase::III,
            branch: SemiParallelBranch::NotSemiParallel,
        },
        Family {
            name: "sphere_arc_circle_2",
            curve: CurveSpec::Circle { kappa: 2.0 },
            profile: ProfileSpec::SphereArc { k: 0.5, u0: 0.0 },
            u: (0.5, 5.0),
            v: V_RANGE,
            case: MeridianCase::III,
            branch: SemiParallelBranch::NotSemiParallel,
        },
        printed("printed_sqrt_0_1", 0.0, 1.0),
        printed("printed_sqrt_1_1", 1.0, 1.0),
        printed("printed_sqrt_0_2", 0.0, 2.0),
    ]
}

pub fn family(name: &str) -> Option<Family> {
    builtin_families().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::classify_meridian;

    #[test]
    fn labels_match_the_classifier() {
        let policy = TolerancePolicy::default();
        for fam in builtin_families() {
            let h = fam.handle(&policy).unwrap();
            let r = classify_meridian(&h, &fam.grid(5), &policy).unwrap();
            assert_eq!(r.case, fam.case, "{}", fam.name);
            assert_eq!(r.theorem2_branch, fam.branch, "{}", fam.name);
            assert_eq!(r.points_skipped, 0, "{}", fam.name);
        }
    }
}
