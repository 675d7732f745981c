//! Explicit conservative time stepping in flux form.

use crate::config::{BoundaryKind, FaceAverage, InitialCondition, SimulationConfig};
use crate::grid::Grid;
use conslaw_core::eval::FunctionModel;
use conslaw_core::{parse_with, ParseContext, Var};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("stability clamp drove the time step below 1e-12 (max coefficient {max_coeff:.3e})")]
    StepCollapse { max_coeff: f64 },
    #[error("solution produced a non-finite value at step {step}")]
    NonFinite { step: usize },
    #[error("initial-condition expression: {0}")]
    InitialExpr(String),
}

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub time: f64,
    pub field: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub states: Vec<SimulationState>,
    pub steps: usize,
    /// Largest per-step total-mass drift |Σ Δu·ΔV| observed on source-free
    /// runs (exact-telescoping witness); zero when a source is present.
    pub max_mass_drift: f64,
    /// True when every step was stored (store_every = 1).
    pub full: bool,
}

impl Trajectory {
    pub fn initial(&self) -> &SimulationState {
        self.states.first().expect("trajectory stores endpoints")
    }

    pub fn last(&self) -> &SimulationState {
        self.states.last().expect("trajectory stores endpoints")
    }
}

/// Per-step hook for streaming consumers (balance checks avoid storing full
/// trajectories this way).
pub trait StepObserver {
    fn observe(&mut self, grid: &Grid, prev: &[f64], next: &[f64], t: f64, dt: f64);
}

struct NoObserver;

impl StepObserver for NoObserver {
    fn observe(&mut self, _: &Grid, _: &[f64], _: &[f64], _: f64, _: f64) {}
}

pub fn solve(config: &SimulationConfig) -> Result<Trajectory, SolverError> {
    solve_observed(config, &mut NoObserver)
}

pub fn solve_observed(
    config: &SimulationConfig,
    observer: &mut dyn StepObserver,
) -> Result<Trajectory, SolverError> {
    config.validate()?;
    let grid = config.grid();
    let mut field = initial_field(config, &grid)?;
    let dv = grid.cell_volume();

    let coeffs: Vec<Option<&FunctionModel>> = vec![
        Some(&config.models.f),
        config.models.g.as_ref(),
        config.models.h.as_ref(),
    ];

    let mut states = vec![SimulationState {
        time: 0.0,
        field: field.clone(),
    }];
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut max_mass_drift: f64 = 0.0;
    let mut next = vec![0.0; field.len()];

    while t < config.t_end - 1e-15 {
        let max_coeff = max_diffusivity(&field, &coeffs[..grid.dims]);
        let min_dx = grid.min_dx();
        let clamp = config.safety * min_dx * min_dx
            / (2.0 * grid.dims as f64 * max_coeff.max(f64::MIN_POSITIVE));
        if clamp < 1e-12 {
            return Err(SolverError::StepCollapse { max_coeff });
        }
        let mut dt = config.dt.map_or(clamp, |req| req.min(clamp));
        if t + dt > config.t_end {
            dt = config.t_end - t;
        }

        step(config, &grid, &coeffs[..grid.dims], &field, &mut next, dt);

        if next.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite { step: steps });
        }
        if config.models.q.is_none() {
            let drift: f64 = next.iter().zip(&field).map(|(a, b)| (a - b) * dv).sum();
            max_mass_drift = max_mass_drift.max(drift.abs());
        }
        observer.observe(&grid, &field, &next, t, dt);

        std::mem::swap(&mut field, &mut next);
        t += dt;
        steps += 1;
        let keep = config.store_every > 0 && steps % config.store_every == 0;
        if keep && t < config.t_end - 1e-15 {
            states.push(SimulationState {
                time: t,
                field: field.clone(),
            });
        }
    }

    states.push(SimulationState {
        time: t,
        field: field.clone(),
    });
    Ok(Trajectory {
        grid,
        states,
        steps,
        max_mass_drift,
        full: config.store_every == 1,
    })
}

fn max_diffusivity(field: &[f64], coeffs: &[Option<&FunctionModel>]) -> f64 {
    let mut max = 0.0f64;
    for &u in field {
        for model in coeffs.iter().flatten() {
            max = max.max(model.eval(0, u).abs());
        }
    }
    max
}

fn step(
    config: &SimulationConfig,
    grid: &Grid,
    coeffs: &[Option<&FunctionModel>],
    field: &[f64],
    next: &mut [f64],
    dt: f64,
) {
    let face_value = |model: &FunctionModel, ua: f64, ub: f64| -> f64 {
        match config.face_average {
            FaceAverage::ArithmeticU => model.eval(0, 0.5 * (ua + ub)),
            FaceAverage::HarmonicF => {
                let fa = model.eval(0, ua);
                let fb = model.eval(0, ub);
                if fa + fb == 0.0 {
                    0.0
                } else {
                    2.0 * fa * fb / (fa + fb)
                }
            }
        }
    };

    for linear in 0..field.len() {
        let idx = grid.unindex(linear);
        let u = field[linear];
        let mut du = 0.0;
        for axis in 0..grid.dims {
            let Some(model) = coeffs[axis] else { continue };
            let dx = grid.dx(axis);
            let face_flux = |offset: isize| -> f64 {
                let neighbor = match config.boundary {
                    BoundaryKind::Periodic => Some(grid.neighbor_periodic(&idx, axis, offset)),
                    BoundaryKind::ZeroFlux => grid.neighbor(&idx, axis, offset),
                };
                match neighbor {
                    None => 0.0,
                    Some(nb) => {
                        let un = field[grid.index(&nb[..grid.dims])];
                        let sign = offset.signum() as f64;
                        face_value(model, u, un) * sign * (un - u) / dx
                    }
                }
            };
            du += (face_flux(1) - face_flux(-1)) / dx;
        }
        if let Some(q) = &config.models.q {
            du += q.eval(0, u);
        }
        next[linear] = u + dt * du;
    }
}

fn initial_field(config: &SimulationConfig, grid: &Grid) -> Result<Vec<f64>, SolverError> {
    let cells = grid.cells();
    let mut field = vec![0.0; cells];
    match &config.initial {
        InitialCondition::Constant { value } => field.fill(*value),
        InitialCondition::Samples { values } => field.copy_from_slice(values),
        InitialCondition::ProductCosine {
            amplitude,
            base,
            freq,
        } => {
            for (linear, slot) in field.iter_mut().enumerate() {
                let idx = grid.unindex(linear);
                let mut v = *amplitude;
                for axis in 0..grid.dims {
                    let x = grid.center(axis, idx[axis]);
                    v *= (freq[axis] as f64 * std::f64::consts::PI * x).cos();
                }
                *slot = v + base;
            }
        }
        InitialCondition::ProductSine {
            amplitude,
            base,
            freq,
        } => {
            for (linear, slot) in field.iter_mut().enumerate() {
                let idx = grid.unindex(linear);
                let mut v = *amplitude;
                for axis in 0..grid.dims {
                    let x = grid.center(axis, idx[axis]);
                    v *= (2.0 * freq[axis] as f64 * std::f64::consts::PI * x).sin();
                }
                *slot = v + base;
            }
        }
        InitialCondition::Bump {
            center,
            radius,
            height,
            base,
        } => {
            for (linear, slot) in field.iter_mut().enumerate() {
                let idx = grid.unindex(linear);
                let mut r2 = 0.0;
                for axis in 0..grid.dims {
                    let d = grid.center(axis, idx[axis]) - center.get(axis).copied().unwrap_or(0.5);
                    r2 += d * d;
                }
                let r = r2.sqrt();
                *slot = base
                    + if r < *radius {
                        let c = (std::f64::consts::FRAC_PI_2 * r / radius).cos();
                        height * c * c
                    } else {
                        0.0
                    };
            }
        }
        InitialCondition::Expr { text } => {
            let mut ctx = ParseContext::default();
            for name in config.params.keys() {
                ctx.add_param(name);
            }
            let expr =
                parse_with(text, &ctx).map_err(|e| SolverError::InitialExpr(e.to_string()))?;
            let mut point = conslaw_core::eval::JetPoint::new();
            for (name, value) in &config.params {
                point.set_param(name, *value);
            }
            point.set_var(Var::T, 0.0);
            for (linear, slot) in field.iter_mut().enumerate() {
                let idx = grid.unindex(linear);
                for (axis, var) in [Var::X, Var::Y, Var::Z].iter().enumerate().take(grid.dims) {
                    point.set_var(*var, grid.center(axis, idx[axis]));
                }
                *slot = conslaw_core::eval::evaluate(&expr, &point)
                    .map_err(|e| SolverError::InitialExpr(e.to_string()))?;
            }
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Models;

    fn linear_cfg(n: usize) -> SimulationConfig {
        SimulationConfig {
            dims: 2,
            n: vec![n, n],
            extents: vec![(0.0, 1.0), (0.0, 1.0)],
            t_end: 0.02,
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
            initial: InitialCondition::ProductCosine {
                amplitude: 1.0,
                base: 0.0,
                freq: vec![1, 1],
            },
            params: Default::default(),
            store_every: 0,
        }
    }

    #[test]
    fn linear_decay_matches_the_separable_solution() {
        let cfg = linear_cfg(64);
        let traj = solve(&cfg).unwrap();
        let grid = &traj.grid;
        let last = traj.last();
        let decay = (-2.0 * std::f64::consts::PI.powi(2) * last.time).exp();
        let mut max_err = 0.0f64;
        for linear in 0..grid.cells() {
            let idx = grid.unindex(linear);
            let exact = (std::f64::consts::PI * grid.center(0, idx[0])).cos()
                * (std::f64::consts::PI * grid.center(1, idx[1])).cos()
                * decay;
            max_err = max_err.max((last.field[linear] - exact).abs());
        }
        assert!(max_err < 0.01 * decay, "max error {max_err}");
    }

    #[test]
    fn source_free_flux_form_telescopes_to_machine_precision() {
        let mut cfg = linear_cfg(32);
        cfg.models.f = FunctionModel::Power { n: 1.0, scale: 1.0 };
        cfg.models.g = Some(FunctionModel::Power { n: 2.0, scale: 1.0 });
        cfg.initial = InitialCondition::ProductCosine {
            amplitude: 0.5,
            base: 1.0,
            freq: vec![1, 1],
        };
        for boundary in [BoundaryKind::ZeroFlux, BoundaryKind::Periodic] {
            cfg.boundary = boundary;
            let traj = solve(&cfg).unwrap();
            assert!(
                traj.max_mass_drift < 1e-12,
                "telescoping drift {}",
                traj.max_mass_drift
            );
        }
    }

    #[test]
    fn maximum_principle_holds_without_source() {
        let mut cfg = linear_cfg(24);
        cfg.models.f = FunctionModel::Power { n: 1.0, scale: 1.0 };
        cfg.models.g = Some(FunctionModel::Exponential { scale: 0.3 });
        cfg.initial = InitialCondition::Bump {
            center: vec![0.5, 0.5],
            radius: 0.3,
            height: 1.0,
            base: 0.5,
        };
        let traj = solve(&cfg).unwrap();
        for state in &traj.states {
            for &v in &state.field {
                assert!(v >= 0.5 - 1e-10 && v <= 1.5 + 1e-10, "value {v} escapes");
            }
        }
    }

    #[test]
    fn porous_spreading_keeps_finite_support_and_matches_snapshot() {
        let cfg = SimulationConfig {
            dims: 1,
            n: vec![128],
            extents: vec![(0.0, 1.0)],
            t_end: 0.01,
            dt: None,
            safety: 0.8,
            boundary: BoundaryKind::ZeroFlux,
            face_average: FaceAverage::ArithmeticU,
            models: Models {
                f: FunctionModel::Power { n: 1.0, scale: 1.0 },
                g: None,
                h: None,
                q: None,
            },
            initial: InitialCondition::Bump {
                center: vec![0.5],
                radius: 0.15,
                height: 1.0,
                base: 0.0,
            },
            params: Default::default(),
            store_every: 0,
        };
        let traj = solve(&cfg).unwrap();
        let last = traj.last();
        // the degenerate edge keeps the far field untouched
        assert_eq!(last.field[0], 0.0);
        assert_eq!(last.field[127], 0.0);
        // support has grown but stays compact
        let support: usize = last.field.iter().filter(|&&v| v > 1e-12).count();
        let initial_support: usize = traj.initial().field.iter().filter(|&&v| v > 1e-12).count();
        assert!(support > initial_support);
        assert!(support < 100);
        // self-convergence against a refined run, coarsened cell-pairwise
        let fine = solve(&SimulationConfig {
            n: vec![256],
            ..cfg.clone()
        })
        .unwrap();
        let mut err = 0.0f64;
        for i in 0..128 {
            let coarse_of_fine = 0.5 * (fine.last().field[2 * i] + fine.last().field[2 * i + 1]);
            err = err.max((last.field[i] - coarse_of_fine).abs());
        }
        assert!(err < 5e-3, "self-convergence gap {err}");
        // regression lock on a few interior cells
        let frozen = [
            (60usize, 0.5407514697870505),
            (64usize, 0.5504453561649802),
            (70usize, 0.5165251048873639),
        ];
        for (i, want) in frozen {
            assert!(
                (last.field[i] - want).abs() < 1e-9,
                "cell {i}: {} vs {want}",
                last.field[i]
            );
        }
    }

    #[test]
    fn nan_inputs_abort_with_diagnostic() {
        let mut cfg = linear_cfg(16);
        cfg.initial = InitialCondition::Samples {
            values: {
                let mut v = vec![1.0; 256];
                v[7] = f64::NAN;
                v
            },
        };
        assert!(matches!(solve(&cfg), Err(SolverError::NonFinite { .. })));
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let mut cfg = linear_cfg(16);
        cfg.initial = InitialCondition::Constant { value: 0.0 };
        let traj = solve(&cfg).unwrap();
        assert!(traj.last().field.iter().all(|&v| v == 0.0));
    }
}
