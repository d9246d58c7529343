//! Solver and output settings shared by the command-line front end.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{default_directions, Direction, RegionOptions, DEFAULT_LATTICE_DIRECTIONS};
use crate::resolvability::WynerOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Either a lattice size (added to the coordinate axes) or a JSON file
/// holding a list of weight vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionSource {
    Count(usize),
    File(PathBuf),
}

impl Default for DirectionSource {
    fn default() -> Self {
        DirectionSource::Count(DEFAULT_LATTICE_DIRECTIONS)
    }
}

impl FromStr for DirectionSource {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(n) => DirectionSource::Count(n),
            Err(_) => DirectionSource::File(PathBuf::from(s)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `None` lets each solver pick its default alphabet.
    pub q_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub directions: DirectionSource,
    pub tolerance: f64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q_size: None,
            restarts: 4,
            seed: 0,
            directions: DirectionSource::default(),
            tolerance: 1e-3,
            output_format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_size == Some(0) {
            return Err(Error::InvalidOperation("q_size must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidOperation("restarts must be positive".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 0.1) {
            return Err(Error::InvalidOperation(format!(
                "tolerance {} outside (0, 0.1]",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn region_options(&self) -> RegionOptions {
        RegionOptions {
            q_size: self.q_size,
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        }
    }

    pub fn wyner_options(&self) -> WynerOptions {
        WynerOptions {
            q_size: self.q_size,
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        }
    }

    /// Directions for a region of dimension `dim`.
    pub fn directions(&self, dim: usize) -> Result<Vec<Direction>> {
        match &self.directions {
            DirectionSource::Count(n) => Ok(default_directions(dim, *n)),
            DirectionSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidDirection(format!("{}: {e}", path.display())))?;
                let dirs: Vec<Direction> = serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidDirection(format!("{}: {e}", path.display())))?;
                if dirs.is_empty() {
                    return Err(Error::InvalidDirection("direction file is empty".into()));
                }
                if let Some(d) = dirs.iter().find(|d| d.dim() != dim) {
                    return Err(Error::Dimension(format!(
                        "direction with {} weights for a region of dimension {dim}",
                        d.dim()
                    )));
                }
                Ok(dirs)
            }
        }
    }
}
