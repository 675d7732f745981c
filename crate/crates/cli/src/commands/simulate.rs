//! `simulate <config-file>` — run the solver, score balance vectors, write
//! artifacts (CSV residual series, JSON report, binary snapshots).

use crate::args::{Args, Format};
use crate::manifest::RunManifest;
use crate::reports::SimulateReport;
use crate::CliError;
use conslaw_numlab::convergence::Reference;
use conslaw_numlab::output;
use std::path::PathBuf;

pub fn run(args: &Args) -> Result<(), CliError> {
    let [config_path] = &args.positionals[..] else {
        return Err(CliError::Input("usage: simulate <config-file>".into()));
    };
    let config_text = crate::read_file(config_path)?;
    let config =
        conslaw_numlab::SimulationConfig::from_json(&config_text).map_err(CliError::input)?;

    let mut inputs = vec![config_text];
    let balance_vectors = match args.option("balance") {
        None => Vec::new(),
        Some(path) => {
            // balance components may reference the towers and coordinates;
            // parse them against the config parameters
            let text = crate::read_file(path)?;
            inputs.push(text.clone());
            let file: super::VectorsFile =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            let mut ctx = conslaw_core::ParseContext::default();
            for p in file.params.iter().chain(config.params.keys()) {
                ctx.add_param(p);
            }
            file.vectors
                .iter()
                .map(|entry| {
                    let comps = entry
                        .components
                        .iter()
                        .map(|c| conslaw_core::parse_with(c, &ctx))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(CliError::input)?;
                    Ok(conslaw_numlab::BalanceVector {
                        name: entry.name.clone(),
                        components: comps,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?
        }
    };

    let manifest = RunManifest::new("simulate", &inputs, &args.manifest_options());
    let levels = args.u64_option("levels", 1).map_err(CliError::Input)? as usize;
    let out_dir = args.option("out").map(PathBuf::from);
    if let Some(dir) = &out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    }

    let convergence = if levels >= 3 {
        Some(
            conslaw_numlab::convergence_study(
                &config,
                levels,
                Reference::SelfConvergence,
                &balance_vectors,
            )
            .map_err(CliError::input)?,
        )
    } else {
        None
    };

    let (balance, trajectory) =
        conslaw_numlab::run_balance_with_trajectory(&config, &balance_vectors)
            .map_err(CliError::input)?;

    let mut artifacts = Vec::new();
    if let Some(dir) = &out_dir {
        for report in &balance {
            let path = dir.join(format!("residuals_{}.csv", report.vector));
            output::write_residual_csv(&path, report, None)
                .map_err(|e| CliError::Input(e.to_string()))?;
            artifacts.push(path.display().to_string());
        }
        let snap = dir.join("final.bin");
        output::write_snapshot(&snap, &trajectory.grid, &trajectory.last().field)
            .map_err(|e| CliError::Input(e.to_string()))?;
        artifacts.push(snap.display().to_string());
    }

    let report = SimulateReport {
        manifest,
        steps: trajectory.steps,
        final_time: trajectory.last().time,
        max_mass_drift: trajectory.max_mass_drift,
        balance,
        convergence,
        artifacts: artifacts.clone(),
    };

    if let Some(dir) = &out_dir {
        let path = dir.join("report.json");
        output::write_report_json(&path, &report).map_err(|e| CliError::Input(e.to_string()))?;
    }

    match args.format().map_err(CliError::Input)? {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        _ => {
            println!(
                "steps: {}   final time: {:.6}   max mass drift: {:.3e}",
                report.steps, report.final_time, report.max_mass_drift
            );
            for b in &report.balance {
                println!(
                    "balance {}: max |r| = {:.3e}, local rate = {:.3e}",
                    b.vector, b.max_abs_residual, b.max_local_rate
                );
            }
            if let Some(c) = &report.convergence {
                println!("refinement grids: {:?}", c.grid_sizes);
                println!("solution orders: {:?}", c.solution_orders);
                for (name, rates, orders) in &c.balance_rates {
                    println!("balance {name}: rates {rates:?} orders {orders:?}");
                }
            }
            for a in &artifacts {
                println!("wrote {a}");
            }
        }
    }
    Ok(())
}
