//! `selfadjoint <equation-file>` — determining system, substitution family,
//! multiplier, and verification residual.

use crate::args::{Args, Format};
use crate::manifest::RunManifest;
use crate::reports::{ExprOut, SelfAdjointReport, SubstitutionOut};
use crate::CliError;
use conslaw_core::selfadjoint::{
    determining_system, solve_substitution, verify_substitution, Family,
};
use conslaw_core::SelfAdjointError;

pub(crate) fn substitution_out(s: &conslaw_core::selfadjoint::Substitution) -> SubstitutionOut {
    SubstitutionOut {
        phi: ExprOut::new(&s.phi),
        parameters: s.params.clone(),
        function_symbols: s
            .cfuncs
            .iter()
            .map(|c| {
                format!(
                    "{}({})",
                    c.name,
                    c.args
                        .vars()
                        .iter()
                        .map(|v| v.name())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect(),
        constraints: s
            .constraints
            .iter()
            .map(|c| format!("{} = 0", conslaw_core::format::plain(c)))
            .collect(),
        family: format!("{:?}", s.family),
    }
}

fn family_matches(requested: &str, family: &Family) -> bool {
    match requested {
        "auto" => true,
        "poly" => matches!(family, Family::Polynomial),
        "trig" => matches!(family, Family::Trig { .. } | Family::ConstrainedTrig { .. }),
        "exp" => matches!(family, Family::Exp { .. } | Family::ConstrainedExp { .. }),
        "constrained" => matches!(
            family,
            Family::Constrained | Family::ConstrainedTrig { .. } | Family::ConstrainedExp { .. }
        ),
        _ => false,
    }
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let [path] = &args.positionals[..] else {
        return Err(CliError::Input("usage: selfadjoint <equation-file>".into()));
    };
    let ansatz = args.option("ansatz").unwrap_or("auto");
    if !["auto", "poly", "trig", "exp", "constrained"].contains(&ansatz) {
        return Err(CliError::Input(format!(
            "unknown ansatz `{ansatz}` (poly, trig, exp, constrained, auto)"
        )));
    }
    let (eq, text) = super::load_equation(path)?;
    let sys = determining_system(&eq).map_err(CliError::input)?;
    let manifest = RunManifest::new("selfadjoint", &[text], &args.manifest_options());

    let mut report = SelfAdjointReport {
        manifest,
        equation: ExprOut::new(&eq.lhs),
        determining_system: sys
            .constraints
            .iter()
            .map(|c| format!("{} = 0", conslaw_core::format::plain(c)))
            .collect(),
        tag: sys.tag,
        substitution: None,
        lambda: None,
        residual: String::new(),
        diagnostic: None,
    };

    match solve_substitution(&sys) {
        Ok(s) => {
            if !family_matches(ansatz, &s.family) {
                report.diagnostic = Some(format!(
                    "requested ansatz `{ansatz}` but the determining system implies {:?}",
                    s.family
                ));
            }
            let lambda = verify_substitution(&eq, &s).map_err(|e| match e {
                SelfAdjointError::VerificationFailed { residual } => {
                    CliError::Verification(format!(
                        "nonzero residual: {}",
                        conslaw_core::format::plain(&residual)
                    ))
                }
                other => CliError::input(other),
            })?;
            report.substitution = Some(substitution_out(&s));
            report.lambda = Some(conslaw_core::format::plain(&lambda));
            report.residual = "0".into();
        }
        Err(SelfAdjointError::Inconsistent) => {
            report.diagnostic = Some(
                "not nonlinearly self-adjoint with a substitution of this form (it is forced to vanish)"
                    .into(),
            );
        }
        Err(SelfAdjointError::OutsideAnsatz(msg)) => {
            report.diagnostic = Some(format!("outside the ansatz library: {msg}"));
        }
        Err(other) => return Err(CliError::input(other)),
    }

    match args.format().map_err(CliError::Input)? {
        Format::Plain => {
            println!("equation: {} = 0", report.equation.plain);
            println!("determining system ({:?}):", report.tag);
            for c in &report.determining_system {
                println!("  {c}");
            }
            if let Some(s) = &report.substitution {
                println!("substitution: v = {}", s.phi.plain);
                if !s.constraints.is_empty() {
                    println!("with:");
                    for c in &s.constraints {
                        println!("  {c}");
                    }
                }
                println!("lambda = {}", report.lambda.as_deref().unwrap_or("-"));
                println!("residual = {}", report.residual);
            }
            if let Some(d) = &report.diagnostic {
                println!("note: {d}");
            }
        }
        Format::Latex => {
            if let Some(s) = &report.substitution {
                println!("v = {}", s.phi.latex);
            } else {
                println!("% no admissible substitution");
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
    }
    Ok(())
}
