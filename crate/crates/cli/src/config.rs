//! Run configuration, read from TOML.
//!
//! Only the `[run]` table is required; every other table falls back to the
//! acceptance settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MckeanSinger,
    Mehler,
    Rescale,
    JloLimit,
    KPairing,
    Charclass,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::MckeanSinger,
        Suite::Mehler,
        Suite::Rescale,
        Suite::JloLimit,
        Suite::KPairing,
        Suite::Charclass,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MckeanSinger => "mckean-singer",
            Suite::Mehler => "mehler",
            Suite::Rescale => "rescale",
            Suite::JloLimit => "jlo-limit",
            Suite::KPairing => "k-pairing",
            Suite::Charclass => "charclass",
            Suite::All => "all",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::MckeanSinger => {
                "integrality and t-independence of Str e^{-tD^2} on Landau and monopole models"
            }
            Suite::Mehler => "Mehler kernel against the Crank-Nicolson oracle",
            Suite::Rescale => "Getzler-rescaled flat torus kernel and its convergence rate",
            Suite::JloLimit => {
                "simplex coefficients, conjugation expansion and the small-t JLO limit"
            }
            Suite::KPairing => {
                "spectral index, de Rham index and JLO pairing of the Bott projection"
            }
            Suite::Charclass => "A-hat series, Chern characters and integrality of de Rham indices",
            Suite::All => "every suite above",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    #[serde(default)]
    pub models: ModelSection,
    #[serde(default)]
    pub sweeps: SweepSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub suite: Suite,
    /// Output directory, relative to the working directory.
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("heatindex-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub fluxes: Vec<i64>,
    pub landau_levels: usize,
    pub charges: Vec<i64>,
    pub monopole_cutoff: usize,
    /// Mode cutoff of the flat torus for the JLO limit and the expansion check.
    pub jlo_cutoff: usize,
    pub conjugation_cutoff: usize,
    /// Cutoffs at which the spectral index is compared.
    pub pairing_cutoffs: Vec<usize>,
    /// Grid for sampling the Bott projection; must exceed four times the largest cutoff.
    pub bott_grid: usize,
    pub sphere_grid: [usize; 2],
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            fluxes: vec![1, 2, 3],
            landau_levels: 80,
            charges: vec![-2, -1, 1, 2],
            monopole_cutoff: 60,
            jlo_cutoff: 8,
            conjugation_cutoff: 6,
            pairing_cutoffs: vec![8, 12, 16],
            bott_grid: 128,
            sphere_grid: [48, 32],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub heat_times: Vec<f64>,
    pub mehler_curvatures: Vec<f64>,
    pub mehler_times: Vec<f64>,
    pub fd_points: usize,
    pub rescale_u: Vec<f64>,
    pub rescale_twists: Vec<f64>,
    /// Geometric, decreasing.
    pub jlo_times: Vec<f64>,
    pub richardson_order: usize,
    /// Exponent `e` of the `(2πi)^{-e}` prefactor on the de Rham side.
    pub prefactor_exponent: u32,
    pub pairing_time: f64,
    pub degree_cap: usize,
    pub conjugation_times: Vec<f64>,
    pub conjugation_orders: Vec<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            heat_times: vec![0.05, 0.2, 1.0],
            mehler_curvatures: vec![0.5, 1.0, 2.0],
            mehler_times: vec![0.25, 0.5],
            fd_points: 512,
            rescale_u: heatindex_core::heat::geometric_sequence(1e-1, 1e-3, 9),
            rescale_twists: vec![0.0, 1.0],
            jlo_times: vec![0.02, 0.01, 0.005],
            richardson_order: 2,
            prefactor_exponent: 1,
            pairing_time: 0.001,
            degree_cap: 2,
            conjugation_times: heatindex_core::heat::geometric_sequence(1e-4, 1e-5, 6),
            conjugation_orders: vec![1, 2, 3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSection {
    pub supertrace: f64,
    pub mehler: f64,
    pub fd_order_min: f64,
    pub rescale_limit: f64,
    pub rescale_exponent_min: f64,
    pub jlo_relative: f64,
    pub de_rham_integer: f64,
    /// Integrality on the sphere, limited by finite differences in the polar angle.
    pub sphere_integer: f64,
    pub pairing_relative: f64,
    pub slope: f64,
    pub window: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection {
            supertrace: 1e-8,
            mehler: 1e-4,
            fd_order_min: 1.8,
            rescale_limit: 1e-6,
            rescale_exponent_min: 0.5,
            jlo_relative: 0.01,
            de_rham_integer: 1e-6,
            sphere_integer: 1e-3,
            pairing_relative: 0.05,
            slope: 0.3,
            window: heatindex_core::jlo::WINDOW_BOUND,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Default settings for a suite, as the acceptance criteria use them.
    pub fn for_suite(suite: Suite) -> Self {
        RunConfig {
            run: RunSection {
                suite,
                out: default_out(),
            },
            models: ModelSection::default(),
            sweeps: SweepSection::default(),
            tolerances: ToleranceSection::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.sweeps;
        let increasing = [
            ("heat_times", &s.heat_times),
            ("mehler_curvatures", &s.mehler_curvatures),
            ("mehler_times", &s.mehler_times),
            ("rescale_twists", &s.rescale_twists),
        ];
        for (name, seq) in increasing {
            strictly_monotone(name, seq, true)?;
        }
        let decreasing = [
            ("rescale_u", &s.rescale_u),
            ("jlo_times", &s.jlo_times),
            ("conjugation_times", &s.conjugation_times),
        ];
        for (name, seq) in decreasing {
            strictly_monotone(name, seq, false)?;
        }
        let positive = [
            ("heat_times", s.heat_times.iter().all(|&t| t > 0.0)),
            ("mehler_times", s.mehler_times.iter().all(|&t| t > 0.0)),
            (
                "rescale_u",
                s.rescale_u.iter().all(|&u| u > 0.0 && u <= 1.0),
            ),
            ("jlo_times", s.jlo_times.iter().all(|&t| t > 0.0)),
            ("pairing_time", s.pairing_time > 0.0),
            (
                "conjugation_times",
                s.conjugation_times.iter().all(|&t| t > 0.0),
            ),
        ];
        for (name, ok) in positive {
            if !ok {
                return Err(CliError::Config(format!("sweeps.{name} must be positive")));
            }
        }
        if !s.degree_cap.is_multiple_of(2) {
            return Err(CliError::Config("sweeps.degree_cap must be even".into()));
        }
        let t = &self.tolerances;
        let tolerances = [
            ("supertrace", t.supertrace),
            ("mehler", t.mehler),
            ("fd_order_min", t.fd_order_min),
            ("rescale_limit", t.rescale_limit),
            ("rescale_exponent_min", t.rescale_exponent_min),
            ("jlo_relative", t.jlo_relative),
            ("de_rham_integer", t.de_rham_integer),
            ("sphere_integer", t.sphere_integer),
            ("pairing_relative", t.pairing_relative),
            ("slope", t.slope),
            ("window", t.window),
        ];
        for (name, value) in tolerances {
            if value.is_nan() || value <= 0.0 {
                return Err(CliError::Config(format!(
                    "tolerances.{name} = {value} must be positive"
                )));
            }
        }
        let m = &self.models;
        if let Some(&largest) = m.pairing_cutoffs.iter().max() {
            if m.bott_grid <= 4 * largest {
                return Err(CliError::Config(format!(
                    "models.bott_grid = {} must exceed four times the largest pairing cutoff {largest}",
                    m.bott_grid
                )));
            }
        }
        Ok(())
    }
}

fn strictly_monotone(name: &str, seq: &[f64], increasing: bool) -> Result<(), CliError> {
    let ok = seq
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
    if ok {
        Ok(())
    } else {
        let dir = if increasing {
            "increasing"
        } else {
            "decreasing"
        };
        Err(CliError::Config(format!(
            "sweeps.{name} must be strictly {dir}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::from_toml("[run]\nsuite = \"mehler\"\n").unwrap();
        assert_eq!(c.run.suite, Suite::Mehler);
        assert_eq!(c.sweeps, SweepSection::default());
    }

    #[test]
    fn empty_config_is_rejected() {
        assert!(matches!(RunConfig::from_toml(""), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_and_suites_are_rejected() {
        assert!(RunConfig::from_toml("[run]\nsuite = \"nope\"\n").is_err());
        assert!(
            RunConfig::from_toml("[run]\nsuite = \"all\"\n[sweeps]\nheat_time = [1.0]\n").is_err()
        );
    }

    #[test]
    fn sweeps_must_be_monotone() {
        let text = "[run]\nsuite = \"all\"\n[sweeps]\nheat_times = [0.2, 0.1]\n";
        assert!(
            matches!(RunConfig::from_toml(text), Err(CliError::Config(m)) if m.contains("heat_times"))
        );
        let text = "[run]\nsuite = \"all\"\n[sweeps]\njlo_times = [0.01, 0.02]\n";
        assert!(RunConfig::from_toml(text).is_err());
    }

    #[test]
    fn tolerances_must_be_positive() {
        let text = "[run]\nsuite = \"all\"\n[tolerances]\nmehler = 0.0\n";
        assert!(
            matches!(RunConfig::from_toml(text), Err(CliError::Config(m)) if m.contains("mehler"))
        );
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
    }
}
