//! JSON configuration for networks and sweeps.
//!
//! A config names the network either by an explicit gain matrix or by
//! geometry plus a path loss law — never both:
//!
//! ```json
//! {
//!   "T": 3,
//!   "powers": [1.0, 1.0],
//!   "noises": [1.0, 1.0],
//!   "geometry": [0.0, 0.5, 1.0],
//!   "path_loss": { "model": "mpl", "kappa": 1.0, "eta": 2.0 },
//!   "sweep": {
//!     "variable": "p2",
//!     "grid": { "start": 1.0, "stop": 20.0, "points": 20 },
//!     "strategies": ["cs", "cf", "mh"],
//!     "mode": "forall"
//!   }
//! }
//! ```
//!
//! `T` is optional (inferred from `powers`), the `sweep` block is optional,
//! and unknown keys are rejected so typos surface as errors instead of
//! silently changing meaning. All quantities are linear units; dB conversion
//! is a CLI boundary concern.

use serde::{Deserialize, Serialize};

use crate::cf::ConstraintMode;
use crate::experiment::{SweepSpec, SweepVariable};
use crate::rates::StrategyKind;
use crate::{Error, PathLossModel, Positions, RelayNetwork, Result};

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

/// Top-level config file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Node count; redundant with `powers` but checked when present.
    #[serde(rename = "T", skip_serializing_if = "Option::is_none", default)]
    pub t: Option<usize>,
    /// Transmit powers of nodes `1..=T-1`, linear.
    pub powers: Vec<f64>,
    /// Noise variances at nodes `2..=T`, linear.
    pub noises: Vec<f64>,
    /// Explicit `T x T` row-major gain matrix (alternative to geometry).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gains: Option<Vec<Vec<f64>>>,
    /// Node coordinates (alternative to `gains`; requires `path_loss`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub geometry: Option<Positions>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path_loss: Option<PathLossModel>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepConfig>,
}

/// The `sweep` block: what to vary and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub grid: GridConfig,
    /// Strategy tags (`cs`, `df`, `cf`, `cf_t2`, `mh`, `cinf`),
    /// case-insensitive; all strategies when absent.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strategies: Option<Vec<String>>,
    /// Routing quantifier for the general compress-and-forward optimizer;
    /// `forall` when absent.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<ConstraintMode>,
}

/// Sweep grid: either explicit values or a generated range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridConfig {
    Values {
        values: Vec<f64>,
    },
    Range {
        start: f64,
        stop: f64,
        points: usize,
        #[serde(default)]
        scale: GridScale,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    #[default]
    Linear,
    Log,
}

impl GridConfig {
    /// Materializes the grid; range endpoints are hit exactly.
    pub fn expand(&self) -> Result<Vec<f64>> {
        match self {
            GridConfig::Values { values } => Ok(values.clone()),
            GridConfig::Range {
                start,
                stop,
                points,
                scale,
            } => {
                if *points == 0 {
                    return Err(Error::Config("grid needs at least one point".into()));
                }
                if !(start.is_finite() && stop.is_finite() && start < stop) {
                    return Err(Error::Config(format!(
                        "grid range needs finite start < stop, got [{start}, {stop}]"
                    )));
                }
                if *points == 1 {
                    return Ok(vec![*start]);
                }
                let n = *points as f64 - 1.0;
                let grid = match scale {
                    GridScale::Linear => (0..*points)
                        .map(|k| start + (stop - start) * k as f64 / n)
                        .collect(),
                    GridScale::Log => {
                        if *start <= 0.0 {
                            return Err(Error::Config(
                                "log-scale grids need a positive start".into(),
                            ));
                        }
                        let (log_start, log_stop) = (start.ln(), stop.ln());
                        let mut grid: Vec<f64> = (0..*points)
                            .map(|k| (log_start + (log_stop - log_start) * k as f64 / n).exp())
                            .collect();
                        // pin the endpoints against rounding
                        grid[0] = *start;
                        *grid.last_mut().unwrap() = *stop;
                        grid
                    }
                };
                Ok(grid)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Loading and building
// ---------------------------------------------------------------------------

impl NetworkConfig {
    /// Parses a JSON document; syntax errors keep serde's line/column info.
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads and parses a config file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Serializes a network back into config form, preferring the geometry
    /// representation when the network has one.
    pub fn from_network(net: &RelayNetwork) -> Self {
        let (geometry, path_loss, gains) = match net.geometry() {
            Some((positions, model)) => (Some(positions.clone()), Some(model), None),
            None => (None, None, Some(net.gain_rows())),
        };
        NetworkConfig {
            t: Some(net.node_count()),
            powers: net.powers().to_vec(),
            noises: net.noises().to_vec(),
            gains,
            geometry,
            path_loss,
            sweep: None,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Builds the validated network this config describes.
    pub fn build_network(&self) -> Result<RelayNetwork> {
        if let Some(t) = self.t {
            if t != self.powers.len() + 1 {
                return Err(Error::Config(format!(
                    "T = {t} inconsistent with {} powers (expected T - 1)",
                    self.powers.len()
                )));
            }
        }
        match (&self.gains, &self.geometry, &self.path_loss) {
            (Some(_), Some(_), _) => Err(Error::Config(
                "give either `gains` or `geometry`, not both".into(),
            )),
            (Some(gains), None, path_loss) => {
                if path_loss.is_some() {
                    return Err(Error::Config(
                        "`path_loss` is meaningless with explicit `gains`".into(),
                    ));
                }
                RelayNetwork::new(self.powers.clone(), self.noises.clone(), gains.clone())
            }
            (None, Some(geometry), Some(model)) => RelayNetwork::from_geometry(
                self.powers.clone(),
                self.noises.clone(),
                geometry.clone(),
                *model,
            ),
            (None, Some(_), None) => Err(Error::Config(
                "`geometry` needs a `path_loss` model".into(),
            )),
            (None, None, _) => Err(Error::Config(
                "missing gain source: give `gains` or `geometry` + `path_loss`".into(),
            )),
        }
    }

    /// Builds the runnable sweep, when the config has a `sweep` block.
    pub fn build_sweep(&self) -> Result<Option<SweepSpec>> {
        let Some(sweep) = &self.sweep else {
            return Ok(None);
        };
        let base = self.build_network()?;
        let strategies = match &sweep.strategies {
            None => StrategyKind::all().to_vec(),
            Some(tags) => tags
                .iter()
                .map(|tag| StrategyKind::parse(tag))
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(Some(SweepSpec {
            base,
            variable: sweep.variable,
            grid: sweep.grid.expand()?,
            strategies,
            mode: sweep.mode.unwrap_or(ConstraintMode::ForAll),
        }))
    }
}

// ---------------------------------------------------------------------------
