//! Simulation configuration: documented JSON schema with validation.

use crate::grid::Grid;
use conslaw_core::eval::FunctionModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Periodic,
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FaceAverage {
    /// Evaluate the coefficient at the arithmetic mean of the two cells.
    #[default]
    ArithmeticU,
    /// Harmonic mean of the two coefficient values.
    HarmonicF,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// amplitude·Π cos(freq_a·π·x_a) + base (zero-flux compatible for
    /// integer frequencies).
    ProductCosine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "zero")]
        base: f64,
        freq: Vec<u32>,
    },
    /// amplitude·Π sin(2·freq_a·π·x_a) + base (periodic compatible).
    ProductSine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "zero")]
        base: f64,
        freq: Vec<u32>,
    },
    /// A smooth compact bump: base + height·cos²(π·r/2r₀) inside radius r₀.
    Bump {
        center: Vec<f64>,
        radius: f64,
        height: f64,
        #[serde(default = "zero")]
        base: f64,
    },
    Constant {
        value: f64,
    },
    /// Expression in t, x, y, z and declared parameters.
    Expr {
        text: String,
    },
    /// Raw cell samples in row-major order.
    Samples {
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}
fn zero() -> f64 {
    0.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Models {
    pub f: FunctionModel,
    #[serde(default)]
    pub g: Option<FunctionModel>,
    #[serde(default)]
    pub h: Option<FunctionModel>,
    #[serde(default)]
    pub q: Option<FunctionModel>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub dims: usize,
    pub n: Vec<usize>,
    pub extents: Vec<(f64, f64)>,
    pub t_end: f64,
    /// Requested time step; the stability clamp may lower it.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Stability safety factor in (0, 1].
    #[serde(default = "default_safety")]
    pub safety: f64,
    pub boundary: BoundaryKind,
    #[serde(default)]
    pub face_average: FaceAverage,
    pub models: Models,
    pub initial: InitialCondition,
    /// Free parameter values for expressions (initial conditions, balance
    /// components).
    #[serde(default)]
    pub params: std::collections::BTreeMap<String, f64>,
    /// Keep every k-th state in the trajectory (0 keeps only first/last).
    #[serde(default)]
    pub store_every: usize,
}

fn default_safety() -> f64 {
    0.8
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("dims must be 1..=3, got {0}")]
    Dims(usize),
    #[error("per-axis grid sizes must match dims and be >= 4")]
    GridSizes,
    #[error("3-dimensional runs are capped at 64 cells per axis")]
    TooLarge3d,
    #[error("t_end must be positive")]
    Horizon,
    #[error("safety factor must lie in (0, 1]")]
    Safety,
    #[error("sample count {got} does not match the grid ({want})")]
    Samples { got: usize, want: usize },
    #[error("initial-condition frequency list must match dims")]
    Frequencies,
    #[error("bad config json: {0}")]
    Json(String),
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<SimulationConfig, ConfigError> {
        let cfg: SimulationConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dims == 0 || self.dims > 3 {
            return Err(ConfigError::Dims(self.dims));
        }
        if self.n.len() != self.dims
            || self.extents.len() != self.dims
            || self.n.iter().any(|&n| n < 4)
        {
            return Err(ConfigError::GridSizes);
        }
        if self.dims == 3 && self.n.iter().any(|&n| n > 64) {
            return Err(ConfigError::TooLarge3d);
        }
        if !(self.t_end > 0.0) {
            return Err(ConfigError::Horizon);
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(ConfigError::Safety);
        }
        match &self.initial {
            InitialCondition::Samples { values } => {
                let want: usize = self.n.iter().product();
                if values.len() != want {
                    return Err(ConfigError::Samples {
                        got: values.len(),
                        want,
                    });
                }
            }
            InitialCondition::ProductCosine { freq, .. }
            | InitialCondition::ProductSine { freq, .. } => {
                if freq.len() != self.dims {
                    return Err(ConfigError::Frequencies);
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(&self.n, &self.extents)
    }

    /// Halve the grid spacing (double every axis), for refinement studies.
    pub fn refined(&self) -> SimulationConfig {
        let mut out = self.clone();
        out.n = self.n.iter().map(|&n| n * 2).collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimulationConfig {
        SimulationConfig {
            dims: 2,
            n: vec![16, 16],
            extents: vec![(0.0, 1.0), (0.0, 1.0)],
            t_end: 0.01,
            dt: None,
            safety: 0.8,
            boundary: BoundaryKind::ZeroFlux,
            face_average: FaceAverage::ArithmeticU,
            models: Models {
                f: FunctionModel::Constant { value: 1.0 },
                g: Some(FunctionModel::Constant { value: 1.0 }),
                h: None,
                q: None,
            },
            initial: InitialCondition::Constant { value: 1.0 },
            params: Default::default(),
            store_every: 0,
        }
    }

    #[test]
    fn three_dimensional_runs_are_capped() {
        let mut cfg = base();
        cfg.dims = 3;
        cfg.n = vec![80, 16, 16];
        cfg.extents = vec![(0.0, 1.0); 3];
        assert!(matches!(cfg.validate(), Err(ConfigError::TooLarge3d)));
        cfg.n = vec![32, 32, 32];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn sample_counts_must_match() {
        let mut cfg = base();
        cfg.initial = InitialCondition::Samples {
            values: vec![1.0; 10],
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::Samples { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let cfg = base();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = SimulationConfig::from_json(&text).unwrap();
        assert_eq!(back.n, cfg.n);
    }
}
