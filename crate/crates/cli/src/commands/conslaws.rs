//! `conslaws <equation-file>` — full pipeline: raw vectors, reductions,
//! nontrivial bases with multipliers, and the independence rank of the
//! union.

use crate::args::{Args, Format};
use crate::manifest::RunManifest;
use crate::reports::{
    BasisVectorOut, ConsLawsReport, ExprOut, ProvenanceOut, SymmetryOut, VectorOut,
};
use crate::CliError;
use conslaw_core::conslaw::{
    conserved_vector, divergence_residual, is_trivial, nontrivial_basis, reduce_vector,
    same_vector, ConservedVector, SymmetryGenerator,
};
use conslaw_core::selfadjoint::{determining_system, solve_substitution, Substitution};
use conslaw_core::{format::latex, format::plain, DifferentialEquation, Var};

fn vector_out(
    cv: &ConservedVector,
    eq: &DifferentialEquation,
    s: &Substitution,
) -> Result<VectorOut, CliError> {
    let mu = divergence_residual(cv, eq, s).ok().map(|m| {
        if m.is_pure() {
            plain(&m.mu)
        } else {
            let parts: Vec<String> = m
                .derivative_parts
                .iter()
                .filter(|(_, e)| !e.is_zero())
                .map(|(v, e)| format!("D{}[{}]", v.name(), plain(e)))
                .collect();
            format!("{} (+ {})", plain(&m.mu), parts.join(" + "))
        }
    });
    Ok(VectorOut {
        components: cv.comps.iter().map(plain).collect(),
        latex: cv.comps.iter().map(latex).collect(),
        mu,
        trivial: is_trivial(cv, s),
    })
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let [path] = &args.positionals[..] else {
        return Err(CliError::Input("usage: conslaws <equation-file>".into()));
    };
    let (eq, text) = super::load_equation(path)?;
    let sys = determining_system(&eq).map_err(CliError::input)?;
    let s = solve_substitution(&sys).map_err(CliError::input)?;

    let symmetry_spec = args.option("symmetries").unwrap_or("all");
    let axes: Vec<Var> = if symmetry_spec == "all" {
        eq.axes()
    } else {
        symmetry_spec
            .split(',')
            .map(|name| {
                Var::from_name(name.trim())
                    .ok_or_else(|| CliError::Input(format!("unknown symmetry axis `{name}`")))
            })
            .collect::<Result<_, _>>()?
    };

    let mut symmetries = Vec::new();
    let mut union: Vec<(ConservedVector, conslaw_core::conslaw::Multiplier)> = Vec::new();
    for axis in axes {
        let gen = SymmetryGenerator::translation(axis);
        let raw = conserved_vector(&eq, &gen, &s).map_err(CliError::input)?;
        let reduced = reduce_vector(&raw, &eq, &s).map_err(CliError::input)?;
        let basis = nontrivial_basis(&reduced, &eq, &s).map_err(CliError::input)?;
        let all_trivial = basis.is_empty();
        let basis_out = basis
            .iter()
            .map(|(v, m)| BasisVectorOut {
                parameter: v.parameter.clone().unwrap_or_default(),
                components: v.comps.iter().map(plain).collect(),
                latex: v.comps.iter().map(latex).collect(),
                mu: plain(&m.mu),
                provenance: ProvenanceOut {
                    generator: v.generator.clone(),
                    substitution_family: format!("{:?}", s.family),
                    parameter: v.parameter.clone().unwrap_or_default(),
                    reduction_trail: v.trail.clone(),
                    derived: s.family.has_closure()
                        && matches!(
                            s.family,
                            conslaw_core::selfadjoint::Family::Exp { .. }
                                | conslaw_core::selfadjoint::Family::ConstrainedExp { .. }
                        ),
                },
            })
            .collect();
        for (v, m) in basis {
            if !union.iter().any(|(u, _)| same_vector(u, &v)) {
                union.push((v, m));
            }
        }
        symmetries.push(SymmetryOut {
            generator: gen.name.clone(),
            raw: vector_out(&raw, &eq, &s)?,
            reduced: vector_out(&reduced, &eq, &s)?,
            basis: basis_out,
            all_trivial,
        });
    }

    let union_vectors: Vec<ConservedVector> = union.iter().map(|(v, _)| v.clone()).collect();
    let rank = conslaw_core::conslaw::independence_rank(&union_vectors);

    let report = ConsLawsReport {
        manifest: RunManifest::new("conslaws", &[text], &args.manifest_options()),
        equation: ExprOut::new(&eq.lhs),
        substitution: super::selfadjoint::substitution_out(&s),
        symmetries,
        independent_count: union.len(),
        rank,
    };

    match args.format().map_err(CliError::Input)? {
        Format::Plain => {
            println!("equation: {} = 0", report.equation.plain);
            println!("substitution: v = {}", report.substitution.phi.plain);
            for sym in &report.symmetries {
                println!("== {}", sym.generator);
                if sym.all_trivial {
                    println!("  all conserved vectors trivial");
                    continue;
                }
                println!(
                    "  reduced (Div C = {} * F):",
                    sym.reduced.mu.as_deref().unwrap_or("?")
                );
                for (axis, c) in ["t", "x", "y", "z"].iter().zip(&sym.reduced.components) {
                    println!("    C^{axis} = {c}");
                }
                for b in &sym.basis {
                    println!("  [{}] mu = {}", b.parameter, b.mu);
                    for (axis, c) in ["t", "x", "y", "z"].iter().zip(&b.components) {
                        println!("    C^{axis} = {c}");
                    }
                }
            }
            println!(
                "independent nontrivial vectors: {} (rank {})",
                report.independent_count, report.rank
            );
        }
        Format::Latex => {
            for sym in &report.symmetries {
                println!("% {}", sym.generator);
                for b in &sym.basis {
                    println!("\\begin{{align}}");
                    let names = ["C^1", "C^2", "C^3", "C^4"];
                    for (i, c) in b.latex.iter().enumerate() {
                        let sep = if i + 1 == b.latex.len() { "" } else { ",\\\\" };
                        println!("  {} &= {}{}", names[i], c, sep);
                    }
                    println!("\\end{{align}}");
                }
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
    }
    Ok(())
}
