pub mod adjoint;
pub mod conslaws;
pub mod selfadjoint;
pub mod simulate;
pub mod verify;

use crate::CliError;
use conslaw_core::{parse_equation_file, DifferentialEquation};

pub(crate) fn load_equation(path: &str) -> Result<(DifferentialEquation, String), CliError> {
    let text = crate::read_file(path)?;
    let eq = parse_equation_file(&text).map_err(CliError::input)?;
    Ok((eq, text))
}

/// A vectors file: named conserved-vector candidates with components in the
/// expression grammar, density first.
#[derive(Debug, serde::Deserialize)]
pub(crate) struct VectorsFile {
    #[serde(default)]
    pub params: Vec<String>,
    pub vectors: Vec<VectorEntry>,
}

#[derive(Debug, serde::Deserialize)]
pub(crate) struct VectorEntry {
    pub name: String,
    pub components: Vec<String>,
}

pub(crate) fn load_vectors(
    path: &str,
    eq: &DifferentialEquation,
) -> Result<Vec<(String, Vec<conslaw_core::Expr>)>, CliError> {
    let text = crate::read_file(path)?;
    let file: VectorsFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let mut ctx = eq.context();
    for p in &file.params {
        ctx.add_param(p);
    }
    let mut out = Vec::new();
    for entry in file.vectors {
        let comps = entry
            .components
            .iter()
            .map(|c| conslaw_core::parse_with(c, &ctx))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Input(format!("{path}: vector `{}`: {e}", entry.name)))?;
        out.push((entry.name, comps));
    }
    Ok(out)
}
