//! `adjoint <equation-file>` — print the adjoint expression.

use crate::args::{Args, Format};
use crate::manifest::RunManifest;
use crate::reports::{AdjointReport, ExprOut};
use crate::CliError;
use conslaw_core::euler::adjoint_equation;

pub fn run(args: &Args) -> Result<(), CliError> {
    let [path] = &args.positionals[..] else {
        return Err(CliError::Input("usage: adjoint <equation-file>".into()));
    };
    let (eq, text) = super::load_equation(path)?;
    let adjoint = adjoint_equation(&eq).map_err(CliError::input)?;

    let report = AdjointReport {
        manifest: RunManifest::new("adjoint", &[text], &args.manifest_options()),
        equation: ExprOut::new(&eq.lhs),
        adjoint: ExprOut::new(&adjoint.lhs),
    };
    match args.format().map_err(CliError::Input)? {
        Format::Plain => {
            println!("equation: {} = 0", report.equation.plain);
            println!("adjoint:  {} = 0", report.adjoint.plain);
        }
        Format::Latex => {
            println!("{} = 0", report.adjoint.latex);
        }
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
    }
    Ok(())
}
