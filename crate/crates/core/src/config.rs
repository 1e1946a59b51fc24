//! JSON analysis configs.
//!
//! ```json
//! {
//!   "surface": {
//!     "family": "meridian",
//!     "curve": { "kind": "circle", "kappa": 1.0 },
//!     "profile": { "kind": "sphere_arc", "k": 1.0, "u0": 0.0 },
//!     "jets": "analytic"
//!   },
//!   "grid": { "u": [0.3, 2.8, 10], "v": [0.0, 6.0, 10] },
//!   "policy": { "fd_step": 1e-5 },
//!   "outputs": ["u", "v", "K", "sp_residual"]
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{CurveSpec, CustomProfile, KappaFn, ProfileSpec};
use crate::error::GeomError;
use crate::numkit::TolerancePolicy;
use crate::surface::{make_meridian_surface, BuiltinImmersion, Grid, MeridianSpec, SurfaceHandle};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<GeomError> for ConfigError {
    fn from(e: GeomError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub surface: SurfaceConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub policy: TolerancePolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Meridian {
        curve: CurveConfig,
        profile: ProfileConfig,
        #[serde(default)]
        jets: JetsConfig,
    },
    Immersion {
        immersion: String,
    },
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum JetsConfig {
    #[default]
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    GreatCircle,
    Circle { kappa: f64 },
    Custom { kappa: KappaConfig },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum KappaConfig {
    Constant(f64),
    Sinusoid {
        offset: f64,
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Line {
        theta: f64,
        #[serde(default)]
        f0: f64,
        #[serde(default)]
        g0: f64,
    },
    SphereArc {
        #[serde(default = "one")]
        k: f64,
        #[serde(default)]
        u0: f64,
    },
    PrintedSqrt {
        a: f64,
        b: f64,
    },
    /// Polynomial `f` and `g`, coefficients in ascending order.
    Custom {
        f: Vec<f64>,
        g: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub u: (f64, f64, usize),
    pub v: (f64, f64, usize),
}

impl CurveConfig {
    pub fn to_spec(&self) -> CurveSpec {
        match self {
            CurveConfig::GreatCircle => CurveSpec::GreatCircle,
            CurveConfig::Circle { kappa } => CurveSpec::Circle { kappa: *kappa },
            CurveConfig::Custom { kappa } => CurveSpec::Custom {
                kappa: match *kappa {
                    KappaConfig::Constant(c) => KappaFn::Constant(c),
                    KappaConfig::Sinusoid {
                        offset,
                        amplitude,
                        frequency,
                        phase,
                    } => KappaFn::Sinusoid {
                        offset,
                        amplitude,
                        frequency,
                        phase,
                    },
                },
                initial: Default::default(),
            },
        }
    }
}

impl ProfileConfig {
    pub fn to_spec(&self) -> ProfileSpec {
        match self {
            ProfileConfig::Line { theta, f0, g0 } => ProfileSpec::Line {
                theta: *theta,
                f0: *f0,
                g0: *g0,
            },
            ProfileConfig::SphereArc { k, u0 } => ProfileSpec::SphereArc { k: *k, u0: *u0 },
            ProfileConfig::PrintedSqrt { a, b } => ProfileSpec::PrintedSqrt { a: *a, b: *b },
            ProfileConfig::Custom { f, g } => {
                ProfileSpec::Custom(CustomProfile::polynomial(f.clone(), g.clone()))
            }
        }
    }
}

/// Column names in default order.
pub const COLUMNS: [&str; 15] = [
    "u",
    "v",
    "E",
    "F",
    "G",
    "K",
    "K_N",
    "H_norm",
    "umb_dev",
    "iso_dev",
    "hH2_minus_3K",
    "sp_residual",
    "gauss_res",
    "ricci_res",
    "codazzi_res",
];

/// A parsed config with everything built and validated.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub config: AnalysisConfig,
    pub handle: SurfaceHandle,
    pub grid: Grid,
    /// Effective policy, after the environment override.
    pub policy: TolerancePolicy,
    /// Indices into [`COLUMNS`].
    pub columns: Vec<usize>,
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn build(self) -> Result<Analysis, ConfigError> {
        let policy = self.policy.with_env_overrides()?;
        let grid = Grid::new(self.grid.u, self.grid.v)?;
        let handle = match &self.surface {
            SurfaceConfig::Meridian {
                curve,
                profile,
                jets,
            } => {
                let h = make_meridian_surface(
                    MeridianSpec {
                        curve: curve.to_spec(),
                        profile: profile.to_spec(),
                    },
                    &policy,
                )?;
                match jets {
                    JetsConfig::Analytic => h,
                    JetsConfig::Numeric => h.with_numeric_jets(),
                }
            }
            SurfaceConfig::Immersion { immersion } => {
                BuiltinImmersion::from_name(immersion)?.handle()
            }
        };
        let columns = match &self.outputs {
            None => (0..COLUMNS.len()).collect(),
            Some(names) => {
                if names.is_empty() {
                    return Err(ConfigError::Invalid(
                        "outputs must name at least one column".into(),
                    ));
                }
                names
                    .iter()
                    .map(|n| {
                        COLUMNS.iter().position(|c| c == n).ok_or_else(|| {
                            ConfigError::Invalid(format!("unknown output column {n:?}"))
                        })
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(Analysis {
            config: self,
            handle,
            grid,
            policy,
            columns,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::JetKind;

    const SPHERE: &str = r#"{
        "surface": {"family": "meridian", "curve": {"kind": "great_circle"},
                    "profile": {"kind": "sphere_arc", "k": 1.0, "u0": 0.0}},
        "grid": {"u": [0.3, 2.8, 10], "v": [0.0, 6.0, 10]}
    }"#;

    #[test]
    fn sphere_config_builds() {
        let a = AnalysisConfig::from_json(SPHERE).unwrap().build().unwrap();
        assert_eq!(a.grid.len(), 100);
        assert_eq!(a.columns.len(), COLUMNS.len());
        assert_eq!(a.handle.jet_kind(), JetKind::Analytic);
    }

    #[test]
    fn every_kind_parses() {
        let text = r#"{
            "surface": {"family": "meridian",
                        "curve": {"kind": "custom", "kappa": {"offset": 0.2, "amplitude": 0.1}},
                        "profile": {"kind": "custom", "f": [1.0, 0.6], "g": [0.0, 0.8]},
                        "jets": "numeric"},
            "grid": {"u": [0.0, 1.0, 2], "v": [0.0, 1.0, 2]},
            "policy": {"fd_step": 1e-6},
            "outputs": ["u", "v", "K"]
        }"#;
        let a = AnalysisConfig::from_json(text).unwrap().build().unwrap();
        assert_eq!(a.handle.jet_kind(), JetKind::Numeric);
        assert_eq!(a.columns, vec![0, 1, 5]);
        assert_eq!(a.config.policy.fd_step, 1e-6);

        for curve in [
            r#"{"kind": "circle", "kappa": 2}"#,
            r#"{"kind": "custom", "kappa": 0.3}"#,
        ] {
            let text = format!(
                r#"{{"surface": {{"family": "meridian", "curve": {curve},
                   "profile": {{"kind": "printed_sqrt", "a": 0, "b": 1}}}},
                   "grid": {{"u": [1, 2, 3], "v": [0, 1, 3]}}}}"#
            );
            AnalysisConfig::from_json(&text).unwrap().build().unwrap();
        }
        let imm = r#"{"surface": {"family": "immersion", "immersion": "paraboloid"},
                      "grid": {"u": [0, 1, 3], "v": [0, 1, 3]}}"#;
        assert!(AnalysisConfig::from_json(imm)
            .unwrap()
            .build()
            .unwrap()
            .handle
            .meridian()
            .is_none());
    }

    #[test]
    fn malformed_configs_are_rejected() {
        let missing_profile = r#"{"surface": {"family": "meridian", "curve": {"kind": "great_circle"}},
                                  "grid": {"u": [0, 1, 3], "v": [0, 1, 3]}}"#;
        assert!(matches!(
            AnalysisConfig::from_json(missing_profile),
            Err(ConfigError::Parse(_))
        ));

        let typo = SPHERE.replace("\"k\"", "\"kk\"");
        assert!(AnalysisConfig::from_json(&typo).is_err());

        let bad_grid = SPHERE.replace("[0.3, 2.8, 10]", "[2.8, 0.3, 10]");
        assert!(matches!(
            AnalysisConfig::from_json(&bad_grid).unwrap().build(),
            Err(ConfigError::Invalid(_))
        ));

        let one_point = SPHERE.replace("[0.3, 2.8, 10]", "[0.3, 2.8, 1]");
        assert!(AnalysisConfig::from_json(&one_point)
            .unwrap()
            .build()
            .is_err());

        let bad_profile = SPHERE.replace("\"k\": 1.0", "\"k\": -1.0");
        assert!(AnalysisConfig::from_json(&bad_profile)
            .unwrap()
            .build()
            .is_err());

        let bad_column = SPHERE.replace("\"grid\"", "\"outputs\": [\"Q\"], \"grid\"");
        assert!(AnalysisConfig::from_json(&bad_column)
            .unwrap()
            .build()
            .is_err());

        let unknown_immersion = r#"{"surface": {"family": "immersion", "immersion": "klein"},
                                    "grid": {"u": [0, 1, 3], "v": [0, 1, 3]}}"#;
        assert!(AnalysisConfig::from_json(unknown_immersion)
            .unwrap()
            .build()
            .is_err());
    }
}
