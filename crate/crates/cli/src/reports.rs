//! Serializable report bodies. Field order is struct order, collections are
//! sorted, so serialization is deterministic.

use crate::manifest::RunManifest;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ExprOut {
    pub plain: String,
    pub latex: String,
}

impl ExprOut {
    pub fn new(e: &conslaw_core::Expr) -> ExprOut {
        ExprOut {
            plain: conslaw_core::format::plain(e),
            latex: conslaw_core::format::latex(e),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AdjointReport {
    pub manifest: RunManifest,
    pub equation: ExprOut,
    pub adjoint: ExprOut,
}

#[derive(Debug, Serialize)]
pub struct SubstitutionOut {
    pub phi: ExprOut,
    pub parameters: Vec<String>,
    pub function_symbols: Vec<String>,
    pub constraints: Vec<String>,
    pub family: String,
}

#[derive(Debug, Serialize)]
pub struct SelfAdjointReport {
    pub manifest: RunManifest,
    pub equation: ExprOut,
    pub determining_system: Vec<String>,
    pub tag: conslaw_core::selfadjoint::SystemTag,
    pub substitution: Option<SubstitutionOut>,
    pub lambda: Option<String>,
    pub residual: String,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VectorOut {
    pub components: Vec<String>,
    pub latex: Vec<String>,
    pub mu: Option<String>,
    pub trivial: bool,
}

#[derive(Debug, Serialize)]
pub struct BasisVectorOut {
    pub parameter: String,
    pub components: Vec<String>,
    pub latex: Vec<String>,
    pub mu: String,
    pub provenance: ProvenanceOut,
}

#[derive(Debug, Serialize)]
pub struct ProvenanceOut {
    pub generator: String,
    pub substitution_family: String,
    pub parameter: String,
    pub reduction_trail: Vec<String>,
    /// True for vectors derived by the general pipeline without a published
    /// counterpart to compare against (verified by oracle only).
    pub derived: bool,
}

#[derive(Debug, Serialize)]
pub struct SymmetryOut {
    pub generator: String,
    pub raw: VectorOut,
    pub reduced: VectorOut,
    pub basis: Vec<BasisVectorOut>,
    pub all_trivial: bool,
}

#[derive(Debug, Serialize)]
pub struct ConsLawsReport {
    pub manifest: RunManifest,
    pub equation: ExprOut,
    pub substitution: SubstitutionOut,
    pub symmetries: Vec<SymmetryOut>,
    pub independent_count: usize,
    pub rank: usize,
}

#[derive(Debug, Serialize)]
pub struct VerifyOutcome {
    pub vector: String,
    pub pass: bool,
    pub mu: Option<String>,
    pub max_residual: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub manifest: RunManifest,
    pub mode: String,
    pub results: Vec<VerifyOutcome>,
    pub all_passed: bool,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub manifest: RunManifest,
    pub steps: usize,
    pub final_time: f64,
    pub max_mass_drift: f64,
    pub balance: Vec<conslaw_numlab::BalanceReport>,
    pub convergence: Option<conslaw_numlab::ConvergenceReport>,
    pub artifacts: Vec<String>,
}
