//! `verify <equation-file> <vectors-file>` — check candidate conserved
//! vectors symbolically (multiplier extraction), by the seed-fixed
//! random-jet oracle, or by a numeric balance run.

use crate::args::{Args, Format};
use crate::manifest::RunManifest;
use crate::reports::{VerifyOutcome, VerifyReport};
use crate::CliError;
use conslaw_core::conslaw::{divergence_residual, oracle_residual, ConservedVector};
use conslaw_core::selfadjoint::plain_substitution;
use conslaw_core::Expr;

pub fn run(args: &Args) -> Result<(), CliError> {
    let [eq_path, vectors_path] = &args.positionals[..] else {
        return Err(CliError::Input(
            "usage: verify <equation-file> <vectors-file> --mode symbolic|oracle|numeric".into(),
        ));
    };
    let mode = args.option("mode").unwrap_or("symbolic").to_string();
    let (eq, eq_text) = super::load_equation(eq_path)?;
    let vectors = super::load_vectors(vectors_path, &eq)?;
    let vectors_text = crate::read_file(vectors_path)?;
    let manifest = RunManifest::new("verify", &[eq_text, vectors_text], &args.manifest_options());

    let results = match mode.as_str() {
        "symbolic" => symbolic(&eq, &vectors)?,
        "oracle" => {
            let seed = args.u64_option("seed", 1).map_err(CliError::Input)?;
            let samples = args.u64_option("samples", 1000).map_err(CliError::Input)? as usize;
            oracle(&eq, &vectors, seed, samples)?
        }
        "numeric" => {
            let config_path = args.option("config").ok_or_else(|| {
                CliError::Input("numeric mode needs --config <simulation.json>".into())
            })?;
            numeric(&vectors, config_path)?
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown mode `{other}` (symbolic, oracle, numeric)"
            )))
        }
    };

    let all_passed = results.iter().all(|r| r.pass);
    let report = VerifyReport {
        manifest,
        mode,
        results,
        all_passed,
    };
    match args.format().map_err(CliError::Input)? {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        _ => {
            for r in &report.results {
                let status = if r.pass { "ok" } else { "FAIL" };
                println!("{status:4} {}: {}", r.vector, r.detail);
            }
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} vectors failed",
            report.results.iter().filter(|r| !r.pass).count(),
            report.results.len()
        )))
    }
}

fn as_vector(eq: &conslaw_core::DifferentialEquation, comps: &[Expr]) -> ConservedVector {
    ConservedVector {
        axes: eq.axes(),
        comps: comps.to_vec(),
        generator: "file".into(),
        parameter: None,
        trail: Vec::new(),
    }
}

fn symbolic(
    eq: &conslaw_core::DifferentialEquation,
    vectors: &[(String, Vec<Expr>)],
) -> Result<Vec<VerifyOutcome>, CliError> {
    let s = plain_substitution(Expr::one(), &[]);
    Ok(vectors
        .iter()
        .map(|(name, comps)| {
            let cv = as_vector(eq, comps);
            if cv.comps.len() != cv.axes.len() {
                return VerifyOutcome {
                    vector: name.clone(),
                    pass: false,
                    mu: None,
                    max_residual: None,
                    detail: format!(
                        "component count {} does not match the equation's {} axes",
                        cv.comps.len(),
                        cv.axes.len()
                    ),
                };
            }
            match divergence_residual(&cv, eq, &s) {
                Ok(m) if m.is_pure() => VerifyOutcome {
                    vector: name.clone(),
                    pass: true,
                    mu: Some(conslaw_core::format::plain(&m.mu)),
                    max_residual: None,
                    detail: format!("Div C = ({}) * F", conslaw_core::format::plain(&m.mu)),
                },
                Ok(_) => VerifyOutcome {
                    vector: name.clone(),
                    pass: false,
                    mu: None,
                    max_residual: None,
                    detail:
                        "divergence needs total-derivative multiples of F (not a reduced vector)"
                            .into(),
                },
                Err(e) => VerifyOutcome {
                    vector: name.clone(),
                    pass: false,
                    mu: None,
                    max_residual: None,
                    detail: e.to_string(),
                },
            }
        })
        .collect())
}

fn oracle(
    eq: &conslaw_core::DifferentialEquation,
    vectors: &[(String, Vec<Expr>)],
    seed: u64,
    samples: usize,
) -> Result<Vec<VerifyOutcome>, CliError> {
    let s = plain_substitution(Expr::one(), &[]);
    vectors
        .iter()
        .map(|(name, comps)| {
            let cv = as_vector(eq, comps);
            let max = oracle_residual(&cv, eq, &s, seed, samples).map_err(CliError::input)?;
            let pass = max < 1e-10;
            Ok(VerifyOutcome {
                vector: name.clone(),
                pass,
                mu: None,
                max_residual: Some(max),
                detail: format!("max |Div C| over {samples} random jet samples: {max:.3e}"),
            })
        })
        .collect()
}

fn numeric(
    vectors: &[(String, Vec<Expr>)],
    config_path: &str,
) -> Result<Vec<VerifyOutcome>, CliError> {
    let config_text = crate::read_file(config_path)?;
    let config =
        conslaw_numlab::SimulationConfig::from_json(&config_text).map_err(CliError::input)?;
    let balance_vectors: Vec<conslaw_numlab::BalanceVector> = vectors
        .iter()
        .map(|(name, comps)| conslaw_numlab::BalanceVector {
            name: name.clone(),
            components: comps.clone(),
        })
        .collect();

    // refinement pair: the law must tighten by at least 3.5x per refinement
    let coarse = conslaw_numlab::run_balance(&config, &balance_vectors).map_err(CliError::input)?;
    let fine = conslaw_numlab::run_balance(&config.refined(), &balance_vectors)
        .map_err(CliError::input)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            let ratio = if f.max_local_rate > 0.0 {
                c.max_local_rate / f.max_local_rate
            } else {
                f64::INFINITY
            };
            let pass = ratio >= 3.5 || c.max_local_rate < 1e-12;
            VerifyOutcome {
                vector: c.vector.clone(),
                pass,
                mu: None,
                max_residual: Some(c.max_abs_residual),
                detail: format!(
                    "local imbalance rate {:.3e} -> {:.3e} under refinement (x{ratio:.2})",
                    c.max_local_rate, f.max_local_rate
                ),
            }
        })
        .collect())
}
