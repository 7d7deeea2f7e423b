//! JSON run configuration and command-line overrides.

use std::path::PathBuf;

use blochldp::lindblad::{Generator, GeneratorSpec};
use blochldp::mat2::{pauli_compose, BlochState, ComplexMat2};
use blochldp::semigroup::{geometric_grid, linear_grid};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Linear,
    Geometric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub kind: Option<GridKind>,
    /// First positive time of a geometric grid.
    pub first: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedState {
    MaximallyMixed,
    E1Pure,
    E2Pure,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(NamedState),
    Bloch { bloch: [f64; 3] },
    Matrix(ComplexMat2),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named(NamedState::MaximallyMixed)
    }
}

impl InitialState {
    pub fn resolve(&self, g: &Generator) -> Result<ComplexMat2, CliError> {
        let rho = match self {
            InitialState::Named(NamedState::MaximallyMixed) => ComplexMat2::diag(0.5, 0.5),
            InitialState::Named(NamedState::E2Pure) => g.e2_projector(),
            InitialState::Named(NamedState::E1Pure) => {
                ComplexMat2::identity() - g.e2_projector()
            }
            InitialState::Bloch { bloch } => pauli_compose(&BlochState::state(*bloch)),
            InitialState::Matrix(m) => *m,
        };
        rho.check_density().map_err(CliError::config)?;
        Ok(rho)
    }
}

/// Parameter axes of a sweep; every combination is one grid point.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    #[serde(default = "zero_axis")]
    pub nu: Vec<f64>,
    #[serde(default = "zero_zeta_axis")]
    pub zeta: Vec<[f64; 2]>,
}

fn zero_axis() -> Vec<f64> {
    vec![0.0]
}

fn zero_zeta_axis() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0]]
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub generator: Option<GeneratorSpec>,
    /// Extra generators checked by `verify`.
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    pub sweep: Option<SweepAxes>,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub grid: GridConfig,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

/// Flags that win over values from the configuration file.
#[derive(Clone, Debug, Default, PartialEq, clap::Args)]
pub struct Overrides {
    /// Largest time of the grid.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid spacing.
    #[arg(long, value_enum)]
    pub grid: Option<GridKind>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Grid defaults of one subcommand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridDefaults {
    pub t_max: f64,
    pub points: usize,
    pub kind: GridKind,
    pub first: f64,
}

pub const EVOLVE_GRID: GridDefaults = GridDefaults {
    t_max: 10.0,
    points: 101,
    kind: GridKind::Linear,
    first: 0.1,
};

pub const RATE_GRID: GridDefaults = GridDefaults {
    t_max: 50.0,
    points: 200,
    kind: GridKind::Geometric,
    first: 0.1,
};

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.t_max.is_some() {
            self.grid.t_max = o.t_max;
        }
        if o.points.is_some() {
            self.grid.points = o.points;
        }
        if o.grid.is_some() {
            self.grid.kind = o.grid;
        }
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        if o.format.is_some() {
            self.format = o.format;
        }
    }

    pub fn generator_spec(&self) -> Result<&GeneratorSpec, CliError> {
        self.generator
            .as_ref()
            .ok_or_else(|| CliError::config("config has no \"generator\""))
    }

    pub fn build_generator(&self) -> Result<Generator, CliError> {
        self.generator_spec()?.build().map_err(CliError::config)
    }

    /// The time grid: linear grids start at 0, geometric grids at `first`,
    /// and both end exactly at `t_max`.
    pub fn time_grid(&self, d: GridDefaults) -> Result<Vec<f64>, CliError> {
        let t_max = self.grid.t_max.unwrap_or(d.t_max);
        let points = self.grid.points.unwrap_or(d.points);
        let first = self.grid.first.unwrap_or(d.first);
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(CliError::config(format!("t_max must be positive, got {t_max}")));
        }
        if points < 2 {
            return Err(CliError::config(format!("need at least 2 grid points, got {points}")));
        }
        Ok(match self.grid.kind.unwrap_or(d.kind) {
            GridKind::Linear => linear_grid(t_max, points),
            GridKind::Geometric => {
                if !(first > 0.0 && first < t_max) {
                    return Err(CliError::config(format!(
                        "geometric grid needs 0 < first < t_max, got first = {first}"
                    )));
                }
                geometric_grid(first, t_max, points)
            }
        })
    }
}
