//! Refinement studies: observed orders for solution error and balance
//! residual rates across nested grids (factor 2), with levels running in
//! parallel under the thread cap.

use crate::balance::{run_balance_with_trajectory, BalanceError, BalanceReport, BalanceVector};
use crate::config::{InitialCondition, SimulationConfig};
use crate::solver::SolverError;
use crate::thread_cap;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub grid_sizes: Vec<Vec<usize>>,
    /// Max-norm solution error per level (vs. the exact profile when one is
    /// known, else vs. the coarsened finest level).
    pub solution_errors: Vec<f64>,
    /// log2(e_l / e_{l+1}) between consecutive levels.
    pub solution_orders: Vec<f64>,
    /// Per balance vector: max rate per level and observed orders.
    pub balance_rates: Vec<(String, Vec<f64>, Vec<f64>)>,
}

/// Exact reference solutions for error measurement.
pub enum Reference {
    /// Product-cosine decay of the constant-coefficient equation:
    /// amplitude·Π cos(freq_a π x_a)·exp(−k·Σ(freq_a π)²·t) + base.
    LinearDecay { k: f64 },
    /// Compare against the finest level, coarsened by cell averaging.
    SelfConvergence,
}

#[derive(Debug, thiserror::Error)]
pub enum StudyError {
    #[error("a convergence study needs at least 3 levels")]
    TooFewLevels,
    #[error("the linear-decay reference needs a product_cosine initial condition")]
    BadReference,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
}

pub fn convergence_study(
    config: &SimulationConfig,
    levels: usize,
    reference: Reference,
    vectors: &[BalanceVector],
) -> Result<ConvergenceReport, StudyError> {
    if levels < 3 {
        return Err(StudyError::TooFewLevels);
    }

    let mut configs = Vec::with_capacity(levels);
    let mut cfg = config.clone();
    for _ in 0..levels {
        configs.push(cfg.clone());
        cfg = cfg.refined();
    }

    // run the levels in parallel, capped
    let cap = thread_cap().max(1);
    let mut results: Vec<Option<Result<LevelResult, StudyError>>> =
        (0..levels).map(|_| None).collect();
    let mut next = 0usize;
    while next < levels {
        let batch = (next..levels.min(next + cap)).collect::<Vec<_>>();
        let outputs = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|&l| {
                    let cfg = &configs[l];
                    scope.spawn(move || run_level(cfg, vectors))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("level thread"))
                .collect::<Vec<_>>()
        });
        for (&l, out) in batch.iter().zip(outputs) {
            results[l] = Some(out);
        }
        next += cap;
    }
    let levels_out: Vec<LevelResult> = results
        .into_iter()
        .map(|r| r.expect("scheduled"))
        .collect::<Result<_, _>>()?;

    // solution errors
    let mut solution_errors = Vec::with_capacity(levels);
    match reference {
        Reference::LinearDecay { k } => {
            let (amplitude, base, freq) = match &config.initial {
                InitialCondition::ProductCosine {
                    amplitude,
                    base,
                    freq,
                } => (*amplitude, *base, freq.clone()),
                _ => return Err(StudyError::BadReference),
            };
            for (lvl, out) in levels_out.iter().enumerate() {
                let cfg = &configs[lvl];
                let grid = cfg.grid();
                let t = out.final_time;
                let rate: f64 = freq
                    .iter()
                    .map(|&f| (f as f64 * std::f64::consts::PI).powi(2))
                    .sum::<f64>()
                    * k;
                let decay = (-rate * t).exp();
                let mut err = 0.0f64;
                for linear in 0..grid.cells() {
                    let idx = grid.unindex(linear);
                    let mut exact = amplitude * decay;
                    for axis in 0..grid.dims {
                        exact *= (freq[axis] as f64
                            * std::f64::consts::PI
                            * grid.center(axis, idx[axis]))
                        .cos();
                    }
                    err = err.max((out.final_field[linear] - (exact + base)).abs());
                }
                solution_errors.push(err);
            }
        }
        Reference::SelfConvergence => {
            let finest = &levels_out[levels - 1];
            let finest_grid = configs[levels - 1].grid();
            for (lvl, out) in levels_out.iter().enumerate().take(levels - 1) {
                let grid = configs[lvl].grid();
                let ratio = 1usize << (levels - 1 - lvl);
                let mut err = 0.0f64;
                for linear in 0..grid.cells() {
                    let idx = grid.unindex(linear);
                    // average the fine cells covering this coarse cell
                    let mut sum = 0.0;
                    let mut count = 0usize;
                    let mut offsets = vec![0usize; grid.dims];
                    loop {
                        let mut fine_idx = [0usize; 3];
                        for a in 0..grid.dims {
                            fine_idx[a] = idx[a] * ratio + offsets[a];
                        }
                        sum += finest.final_field[finest_grid.index(&fine_idx[..grid.dims])];
                        count += 1;
                        // odometer
                        let mut a = 0;
                        loop {
                            if a == grid.dims {
                                break;
                            }
                            offsets[a] += 1;
                            if offsets[a] < ratio {
                                break;
                            }
                            offsets[a] = 0;
                            a += 1;
                        }
                        if a == grid.dims {
                            break;
                        }
                    }
                    err = err.max((out.final_field[linear] - sum / count as f64).abs());
                }
                solution_errors.push(err);
            }
            solution_errors.push(0.0);
        }
    }

    let orders = |errs: &[f64]| -> Vec<f64> {
        errs.windows(2)
            .map(|w| {
                if w[1] > 0.0 && w[0] > 0.0 {
                    (w[0] / w[1]).log2()
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    };
    let solution_orders = orders(
        &solution_errors[..if matches!(reference, Reference::SelfConvergence) {
            levels - 1
        } else {
            levels
        }],
    );

    let mut balance_rates = Vec::new();
    for (vi, cv) in vectors.iter().enumerate() {
        let rates: Vec<f64> = levels_out
            .iter()
            .map(|l| l.balance[vi].max_local_rate)
            .collect();
        let rate_orders = orders(&rates);
        balance_rates.push((cv.name.clone(), rates, rate_orders));
    }

    Ok(ConvergenceReport {
        grid_sizes: configs.iter().map(|c| c.n.clone()).collect(),
        solution_errors,
        solution_orders,
        balance_rates,
    })
}

struct LevelResult {
    final_field: Vec<f64>,
    final_time: f64,
    balance: Vec<BalanceReport>,
}

fn run_level(cfg: &SimulationConfig, vectors: &[BalanceVector]) -> Result<LevelResult, StudyError> {
    let (balance, traj) = run_balance_with_trajectory(cfg, vectors)?;
    Ok(LevelResult {
        final_field: traj.last().field.clone(),
        final_time: traj.last().time,
        balance,
    })
}
