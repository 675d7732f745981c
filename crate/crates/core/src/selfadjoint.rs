//! Nonlinear self-adjointness: determining systems for the substitution
//! v = φ, their solution over the supported ansatz families, and verification
//! of a substitution with its multiplier.
//!
//! The determining system is produced by substituting v = φ(t, x…, u) into
//! the adjoint expression with chain-ruled jets, reading the multiplier off
//! the u_t coefficient, and matching coefficients of the remaining jet
//! monomials with the coefficient towers treated as independent symbols
//! (their linear independence is a standing assumption of the model class).
//!
//! The ansatz library is explicit and closed: multilinear polynomials in the
//! spatial variables, the two-dimensional solution spaces of w'' ± p²w = 0
//! (trig/exp closures), and coefficient functions constrained to solve the
//! adjoint of a linear heat equation. Anything else is reported as a
//! diagnostic, never guessed.

use crate::atom::{Atom, CIndex, ClosureKind, Dep, FuncSym, JetIndex, Var};
use crate::equation::DifferentialEquation;
use crate::error::SelfAdjointError;
use crate::euler::adjoint_equation;
use crate::expr::{equivalent, int, Expr, Monomial};
use num_traits::Signed;
use serde::Serialize;
use std::collections::BTreeMap;

/// Classification of a determining system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemTag {
    SolvablePolynomial,
    OdeBranch,
    ConstrainedSymbol,
    Inconsistent,
}

/// The linear constraints on φ produced by coefficient matching.
#[derive(Debug, Clone)]
pub struct DeterminingSystem {
    pub constraints: Vec<Expr>,
    pub tag: SystemTag,
    /// Whether the matching forced φ_u = 0 (φ independent of u).
    pub u_collapsed: bool,
    pub spatial: Vec<Var>,
    pub params: Vec<String>,
}

/// Rewrite rule for a constrained coefficient function: the t-derivative of
/// `name` rewrites to −k times its second `svar`-derivative.
#[derive(Debug, Clone)]
pub struct CFuncRule {
    pub name: String,
    pub svar: Var,
    pub k: Expr,
}

/// Rewrite rules on jets of v implied by the determining system, used when
/// reducing conserved vectors with v kept symbolic.
#[derive(Debug, Clone)]
pub enum VJetRule {
    /// v_J → 0 whenever the jet index contains J.
    Zero(JetIndex),
    /// v_{ss} → coeff · v.
    Second { var: Var, coeff: Expr },
    /// v_t → −k · v_{ss}.
    Time { svar: Var, k: Expr },
}

/// Which ansatz family a substitution came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Polynomial,
    Trig { freq: String },
    Exp { freq: String },
    Constrained,
    ConstrainedTrig { freq: String },
    ConstrainedExp { freq: String },
}

impl Family {
    pub fn has_closure(&self) -> bool {
        !matches!(self, Family::Polynomial | Family::Constrained)
    }

    pub fn freq(&self) -> Option<&str> {
        match self {
            Family::Trig { freq }
            | Family::Exp { freq }
            | Family::ConstrainedTrig { freq }
            | Family::ConstrainedExp { freq } => Some(freq),
            _ => None,
        }
    }
}

/// A candidate substitution v = φ with its free parameters, constrained
/// coefficient functions, and the rewrite rules those constraints induce.
#[derive(Debug, Clone)]
pub struct Substitution {
    pub phi: Expr,
    pub params: Vec<String>,
    pub cfuncs: Vec<FuncSym>,
    pub constraints: Vec<Expr>,
    pub cfunc_rules: Vec<CFuncRule>,
    pub vjet_rules: Vec<VJetRule>,
    pub family: Family,
}

impl Substitution {
    /// Apply the constrained-function rewrites (highest t-derivative to
    /// spatial form) until a fixed point.
    pub fn apply_cfunc_rules(&self, e: &Expr) -> Expr {
        let mut out = e.clone();
        loop {
            let mut map: BTreeMap<Atom, Expr> = BTreeMap::new();
            for atom in out.atoms() {
                if let Atom::CFunc { sym, idx } = atom {
                    for rule in &self.cfunc_rules {
                        if sym.name == rule.name && idx.count_var(Var::T) > 0 {
                            let mut new_idx = *idx;
                            new_idx.0[Var::T.index()] -= 1;
                            new_idx.0[rule.svar.index()] += 2;
                            let image = Expr::atom(Atom::cfunc(sym, new_idx)) * rule.k.clone();
                            map.insert(atom.clone(), image.scaled_int(-1));
                            break;
                        }
                    }
                }
            }
            if map.is_empty() {
                return out;
            }
            out = out.substitute(&map);
        }
    }

    /// Apply the v-jet rules until a fixed point.
    pub fn apply_vjet_rules(&self, e: &Expr) -> Expr {
        let mut out = e.clone();
        loop {
            let mut map: BTreeMap<Atom, Expr> = BTreeMap::new();
            for atom in out.atoms() {
                if let Atom::Jet { dep: Dep::V, idx } = atom {
                    if let Some(image) = self.rewrite_v_jet(*idx) {
                        map.insert(atom.clone(), image);
                    }
                }
            }
            if map.is_empty() {
                return out;
            }
            out = out.substitute(&map);
        }
    }

    fn rewrite_v_jet(&self, idx: JetIndex) -> Option<Expr> {
        for rule in &self.vjet_rules {
            match rule {
                VJetRule::Zero(pattern) => {
                    if (0..4).all(|i| idx.0[i] >= pattern.0[i]) {
                        return Some(Expr::zero());
                    }
                }
                VJetRule::Second { var, coeff } => {
                    if idx.count(*var) >= 2 {
                        let mut new_idx = idx;
                        new_idx.0[var.index()] -= 2;
                        return Some(Expr::jet(Dep::V, new_idx) * coeff.clone());
                    }
                }
                VJetRule::Time { svar, k } => {
                    if idx.count(Var::T) >= 1 {
                        let mut new_idx = idx;
                        new_idx.0[Var::T.index()] -= 1;
                        new_idx.0[svar.index()] += 2;
                        return Some((Expr::jet(Dep::V, new_idx) * k.clone()).scaled_int(-1));
                    }
                }
            }
        }
        None
    }
}

fn phi_sym(eq: &DifferentialEquation) -> FuncSym {
    let mut vars = vec![Var::T];
    vars.extend(eq.spatial.iter().copied());
    FuncSym::new("phi", &vars, true)
}

/// Derive the determining system for the substitution v = φ(t, x…, u).
pub fn determining_system(
    eq: &DifferentialEquation,
) -> Result<DeterminingSystem, SelfAdjointError> {
    let fstar = adjoint_equation(eq)?.lhs;
    let phi = Expr::atom(Atom::cfunc(&phi_sym(eq), CIndex::empty()));
    let bound = eq.apply_relations(&fstar.bind_dependent(Dep::V, &phi));
    let f_eq = eq.apply_relations(&eq.lhs);

    let lambda = multiplier_from_ut(&bound, &f_eq)?;
    let residual = &bound - &(lambda * f_eq);

    // Treating the towers and the u-jet monomials as independent markers,
    // every coefficient must vanish.
    let groups = residual.collect_by(|a| a.is_u_jet() || matches!(a, Atom::Func { .. }));
    let mut raw: Vec<Expr> = Vec::new();
    for (_, coeff) in groups {
        let c = normalize_constraint(&coeff);
        if !c.is_zero() && !raw.iter().any(|e| equivalent(e, &c)) {
            raw.push(c);
        }
    }

    // φ_u = 0 collapse: if forced, kill every u-derivative of φ.
    let u_collapsed = raw.iter().any(is_phi_u_constraint);
    let mut constraints: Vec<Expr> = Vec::new();
    for c in &raw {
        let reduced = if u_collapsed {
            kill_u_jets(c)
        } else {
            c.clone()
        };
        if reduced.is_zero() {
            continue;
        }
        if u_collapsed && only_u_jets(&reduced) {
            continue;
        }
        if !constraints.iter().any(|e| equivalent(e, &reduced)) {
            constraints.push(reduced);
        }
    }
    constraints.sort_by_key(constraint_sort_key);

    let tag = classify(&constraints);
    Ok(DeterminingSystem {
        constraints: constraints
            .iter()
            .map(|c| strip_phi_u_arg(c, u_collapsed))
            .collect(),
        tag,
        u_collapsed,
        spatial: eq.spatial.clone(),
        params: eq.params.clone(),
    })
}

/// Read λ off the u_t coefficients of F*|φ and F; both sides are linear in
/// u_t and F's coefficient is a nonzero constant for every equation in scope.
fn multiplier_from_ut(bound: &Expr, f_eq: &Expr) -> Result<Expr, SelfAdjointError> {
    let ut = Atom::jet(Dep::U, JetIndex::of(Var::T));
    let c = f_eq
        .jet_partial(&ut)
        .as_constant()
        .filter(|c| !num_traits::Zero::is_zero(c))
        .ok_or_else(|| {
            SelfAdjointError::OutsideAnsatz("u_t coefficient must be a nonzero constant".into())
        })?;
    Ok(bound.jet_partial(&ut).scaled(&c.recip()))
}

fn phi_jet_index(atom: &Atom) -> Option<CIndex> {
    match atom {
        Atom::CFunc { sym, idx } if sym.name == "phi" => Some(*idx),
        _ => None,
    }
}

fn is_phi_u_constraint(c: &Expr) -> bool {
    c.as_single_term()
        .and_then(|(m, _)| {
            if m.degree() != 1 {
                return None;
            }
            phi_jet_index(m.atoms().next()?)
        })
        .map(|idx| idx.count_u() == 1 && idx.order() == 1)
        .unwrap_or(false)
}

fn kill_u_jets(e: &Expr) -> Expr {
    let mut map: BTreeMap<Atom, Expr> = BTreeMap::new();
    for atom in e.atoms() {
        if let Some(idx) = phi_jet_index(atom) {
            if idx.count_u() > 0 {
                map.insert(atom.clone(), Expr::zero());
            }
        }
    }
    if map.is_empty() {
        e.clone()
    } else {
        e.substitute(&map)
    }
}

fn only_u_jets(e: &Expr) -> bool {
    e.terms().all(|(m, _)| {
        m.atoms()
            .any(|a| phi_jet_index(a).map(|i| i.count_u() > 0).unwrap_or(false))
    })
}

/// Display cleanup: once φ is known to be u-independent, drop u from its
/// printed argument signature.
fn strip_phi_u_arg(e: &Expr, collapsed: bool) -> Expr {
    if !collapsed {
        return e.clone();
    }
    e.map_atoms(|a| match a {
        Atom::CFunc { sym, idx } if sym.name == "phi" => {
            let vars = sym.args.vars();
            Atom::cfunc(&FuncSym::new("phi", &vars, false), *idx)
        }
        other => other.clone(),
    })
}

/// Divide a constraint by its positive rational content and any common
/// parameter powers (parameters are nonzero by assumption); normalize the
/// leading sign.
fn normalize_constraint(e: &Expr) -> Expr {
    if e.is_zero() {
        return Expr::zero();
    }
    let (c, m) = e.content();
    let param_part = Monomial::from_pairs(
        m.0.iter()
            .filter(|(a, _)| matches!(a, Atom::Param(_)))
            .cloned()
            .collect(),
    );
    let mut out = e.exact_div(&c, &param_part).unwrap_or_else(|| e.clone());
    if out
        .leading_coeff()
        .map(Signed::is_negative)
        .unwrap_or(false)
    {
        out = out.scaled_int(-1);
    }
    out
}

fn constraint_sort_key(e: &Expr) -> (usize, u32, usize) {
    match shape_of(e) {
        Shape::ZeroJet(idx) => {
            let slot = (0..5).find(|i| idx.0[*i] > 0).unwrap_or(4);
            (0, slot as u32, 0)
        }
        Shape::HeatPde { .. } => (1, 0, 0),
        Shape::Ode { var, .. } => (1, var.index() as u32 + 1, 0),
        Shape::Bare => (3, 0, 0),
        Shape::Other => (2, 0, e.num_terms()),
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Bare,
    ZeroJet(CIndex),
    Ode { var: Var, coeff: Expr },
    HeatPde { svar: Var, k: Expr },
    Other,
}

/// Recognize the φ-linear structure of a constraint.
fn shape_of(e: &Expr) -> Shape {
    let mut parts: Vec<(CIndex, Expr)> = Vec::new();
    for (m, c) in e.terms() {
        let mut idx: Option<CIndex> = None;
        let mut rest: Vec<(Atom, u32)> = Vec::new();
        for (a, p) in &m.0 {
            match phi_jet_index(a) {
                Some(i) if *p == 1 && idx.is_none() => idx = Some(i),
                Some(_) => return Shape::Other,
                None => rest.push((a.clone(), *p)),
            }
        }
        let Some(idx) = idx else { return Shape::Other };
        let coeff = Expr::monomial(Monomial::from_pairs(rest), c.clone());
        match parts.iter_mut().find(|(i, _)| *i == idx) {
            Some((_, acc)) => *acc = &*acc + &coeff,
            None => parts.push((idx, coeff)),
        }
    }
    match parts.len() {
        1 => {
            let (idx, _) = &parts[0];
            if idx.is_empty() {
                Shape::Bare
            } else {
                Shape::ZeroJet(*idx)
            }
        }
        2 => {
            parts.sort_by_key(|(i, _)| i.order());
            let (i0, c0) = &parts[0];
            let (i1, c1) = &parts[1];
            if i0.is_empty() && i1.order() == 2 {
                if let Some(var) = pure_second(i1) {
                    if let Some(k1) = c1.as_constant() {
                        return Shape::Ode {
                            var,
                            coeff: c0.scaled(&k1.recip()),
                        };
                    }
                }
            }
            if i0.count_var(Var::T) == 1 && i0.order() == 1 && i1.order() == 2 {
                if let (Some(var), Some(a)) = (pure_second(i1), c0.as_constant()) {
                    return Shape::HeatPde {
                        svar: var,
                        k: c1.scaled(&a.recip()),
                    };
                }
            }
            Shape::Other
        }
        _ => Shape::Other,
    }
}

fn pure_second(idx: &CIndex) -> Option<Var> {
    if idx.count_u() > 0 {
        return None;
    }
    Var::SPATIAL
        .into_iter()
        .find(|&var| idx.count_var(var) == 2 && idx.order() == 2)
}

fn classify(constraints: &[Expr]) -> SystemTag {
    let shapes: Vec<Shape> = constraints.iter().map(shape_of).collect();
    if shapes.iter().any(|s| matches!(s, Shape::Bare)) {
        return SystemTag::Inconsistent;
    }
    if shapes.iter().any(|s| matches!(s, Shape::HeatPde { .. })) {
        return SystemTag::ConstrainedSymbol;
    }
    if shapes.iter().any(|s| matches!(s, Shape::Ode { .. })) {
        return SystemTag::OdeBranch;
    }
    SystemTag::SolvablePolynomial
}

/// Solve the determining system over the ansatz library and return the full
/// parameter family.
pub fn solve_substitution(sys: &DeterminingSystem) -> Result<Substitution, SelfAdjointError> {
    if sys.tag == SystemTag::Inconsistent {
        return Err(SelfAdjointError::Inconsistent);
    }

    let mut multilinear: Vec<Var> = Vec::new();
    let mut t_free = false;
    let mut ode: Option<(Var, Expr)> = None;
    let mut pde: Option<(Var, Expr)> = None;

    for c in &sys.constraints {
        match shape_of(c) {
            Shape::ZeroJet(idx) => {
                if idx.count_var(Var::T) == 1 && idx.order() == 1 {
                    t_free = true;
                } else if let Some(var) = pure_second(&idx) {
                    multilinear.push(var);
                } else if idx.count_u() > 0 {
                    // u-dependence already collapsed
                } else {
                    return Err(SelfAdjointError::OutsideAnsatz(format!(
                        "unsupported single-jet constraint `{c} = 0`"
                    )));
                }
            }
            Shape::Ode { var, coeff } => {
                if ode.replace((var, coeff)).is_some() {
                    return Err(SelfAdjointError::OutsideAnsatz(
                        "more than one oscillator constraint".into(),
                    ));
                }
            }
            Shape::HeatPde { svar, k } => {
                if pde.replace((svar, k)).is_some() {
                    return Err(SelfAdjointError::OutsideAnsatz(
                        "more than one heat-type coupling".into(),
                    ));
                }
            }
            Shape::Bare => return Err(SelfAdjointError::Inconsistent),
            Shape::Other => {
                return Err(SelfAdjointError::OutsideAnsatz(format!(
                    "constraint `{c} = 0` is outside the ansatz library"
                )))
            }
        }
    }

    if !sys.u_collapsed {
        return Err(SelfAdjointError::OutsideAnsatz(
            "substitutions depending on u are unsupported".into(),
        ));
    }
    if !t_free && pde.is_none() {
        return Err(SelfAdjointError::OutsideAnsatz(
            "time dependence of the substitution is unconstrained".into(),
        ));
    }

    for var in &sys.spatial {
        let governed = multilinear.contains(var)
            || ode.as_ref().map(|(v, _)| v == var).unwrap_or(false)
            || pde.as_ref().map(|(v, _)| v == var).unwrap_or(false);
        if !governed {
            return Err(SelfAdjointError::OutsideAnsatz(format!(
                "no constraint governs the {var}-dependence"
            )));
        }
    }

    let closure = match &ode {
        None => None,
        Some((var, coeff)) => Some(recognize_oscillator(*var, coeff)?),
    };

    build_family(&multilinear, closure, pde, sys)
}

struct ClosureBasis {
    var: Var,
    freq: String,
    kinds: [ClosureKind; 2],
    trig: bool,
}

fn recognize_oscillator(var: Var, coeff: &Expr) -> Result<ClosureBasis, SelfAdjointError> {
    let outside = || {
        SelfAdjointError::OutsideAnsatz(format!(
            "oscillator coefficient `{coeff}` must be ±(parameter)²"
        ))
    };
    let (m, c) = coeff.as_single_term().ok_or_else(outside)?;
    let param = match &m.0[..] {
        [(Atom::Param(p), 2)] => p.clone(),
        _ => return Err(outside()),
    };
    if *c == int(1) {
        Ok(ClosureBasis {
            var,
            freq: param,
            kinds: [ClosureKind::Cos, ClosureKind::Sin],
            trig: true,
        })
    } else if *c == int(-1) {
        Ok(ClosureBasis {
            var,
            freq: param,
            kinds: [ClosureKind::ExpPos, ClosureKind::ExpNeg],
            trig: false,
        })
    } else {
        Err(outside())
    }
}

fn subsets_by_degree(vars: &[Var]) -> Vec<Vec<Var>> {
    let mut subsets: Vec<Vec<Var>> = (0u32..(1 << vars.len()))
        .map(|mask| {
            vars.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| *v)
                .collect()
        })
        .collect();
    subsets.sort_by(|a: &Vec<Var>, b: &Vec<Var>| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    subsets
}

fn build_family(
    multilinear: &[Var],
    closure: Option<ClosureBasis>,
    pde: Option<(Var, Expr)>,
    sys: &DeterminingSystem,
) -> Result<Substitution, SelfAdjointError> {
    let mut vars: Vec<Var> = multilinear.to_vec();
    vars.sort();
    let subsets = subsets_by_degree(&vars);

    let basis: Vec<Option<ClosureKind>> = match &closure {
        Some(cb) => cb.kinds.iter().copied().map(Some).collect(),
        None => vec![None],
    };

    let mut phi = Expr::zero();
    let mut params: Vec<String> = Vec::new();
    let mut cfuncs: Vec<FuncSym> = Vec::new();
    let mut constraints: Vec<Expr> = Vec::new();
    let mut cfunc_rules: Vec<CFuncRule> = Vec::new();

    const CFUNC_NAMES: [&str; 6] = ["alpha", "beta", "gamma", "sigma", "rho", "kappa"];
    let mut next_cfunc = 0usize;

    for (si, subset) in subsets.iter().enumerate() {
        for (bi, kind) in basis.iter().enumerate() {
            let coeff: Expr = match &pde {
                None => {
                    let name = if closure.is_some() {
                        format!("{}{}", (b'A' + si as u8) as char, bi + 1)
                    } else {
                        format!("a{}", si + 1)
                    };
                    params.push(name.clone());
                    Expr::param(&name)
                }
                Some((svar, k)) => {
                    let name = CFUNC_NAMES.get(next_cfunc).ok_or_else(|| {
                        SelfAdjointError::OutsideAnsatz(
                            "constrained family larger than the symbol pool".into(),
                        )
                    })?;
                    next_cfunc += 1;
                    let sym = FuncSym::new(name, &[Var::T, *svar], false);
                    cfuncs.push(sym.clone());
                    cfunc_rules.push(CFuncRule {
                        name: name.to_string(),
                        svar: *svar,
                        k: k.clone(),
                    });
                    let dt = Atom::cfunc(&sym, CIndex::empty().raised_var(Var::T));
                    let mut ss = CIndex::empty();
                    ss.0[svar.index()] = 2;
                    constraints
                        .push(Expr::atom(dt) + Expr::atom(Atom::cfunc(&sym, ss)) * k.clone());
                    Expr::atom(Atom::cfunc(&sym, CIndex::empty()))
                }
            };
            let mut term = coeff;
            for v in subset {
                term = term * Expr::var(*v);
            }
            if let (Some(kind), Some(cb)) = (kind, &closure) {
                term = term
                    * Expr::atom(Atom::Closure {
                        kind: *kind,
                        freq: cb.freq.clone(),
                        var: cb.var,
                    });
            }
            phi = phi + term;
        }
    }

    let mut vjet_rules: Vec<VJetRule> = Vec::new();
    for c in &sys.constraints {
        match shape_of(c) {
            Shape::ZeroJet(idx) if idx.count_u() == 0 => {
                let mut j = JetIndex::empty();
                for var in Var::ALL {
                    j.0[var.index()] = idx.count_var(var);
                }
                vjet_rules.push(VJetRule::Zero(j));
            }
            Shape::Ode { var, coeff } => vjet_rules.push(VJetRule::Second {
                var,
                coeff: coeff.scaled_int(-1),
            }),
            Shape::HeatPde { svar, k } => vjet_rules.push(VJetRule::Time { svar, k }),
            _ => {}
        }
    }

    let family = match (&closure, &pde) {
        (None, None) => Family::Polynomial,
        (Some(cb), None) if cb.trig => Family::Trig {
            freq: cb.freq.clone(),
        },
        (Some(cb), None) => Family::Exp {
            freq: cb.freq.clone(),
        },
        (None, Some(_)) => Family::Constrained,
        (Some(cb), Some(_)) if cb.trig => Family::ConstrainedTrig {
            freq: cb.freq.clone(),
        },
        (Some(cb), Some(_)) => Family::ConstrainedExp {
            freq: cb.freq.clone(),
        },
    };

    Ok(Substitution {
        phi,
        params,
        cfuncs,
        constraints,
        cfunc_rules,
        vjet_rules,
        family,
    })
}

/// Verify a substitution: compute F*|_{v=φ} − λF with λ read off the u_t
/// coefficient and check that the residual vanishes after the constraint
/// rewrites. Returns λ.
pub fn verify_substitution(
    eq: &DifferentialEquation,
    s: &Substitution,
) -> Result<Expr, SelfAdjointError> {
    if s.phi.is_zero() {
        return Err(SelfAdjointError::ZeroSubstitution);
    }
    let fstar = adjoint_equation(eq)?.lhs;
    let bound = eq.apply_relations(&fstar.bind_dependent(Dep::V, &s.phi));
    let f_eq = eq.apply_relations(&eq.lhs);

    let lambda = multiplier_from_ut(&bound, &f_eq)?;
    let residual = s.apply_cfunc_rules(&(&bound - &(lambda.clone() * f_eq)));
    if residual.is_zero() {
        Ok(lambda)
    } else {
        Err(SelfAdjointError::VerificationFailed { residual })
    }
}

/// A hand-built substitution without side constraints, for checking
/// candidates that did not come from the solver.
pub fn plain_substitution(phi: Expr, params: &[&str]) -> Substitution {
    Substitution {
        phi,
        params: params.iter().map(|s| s.to_string()).collect(),
        cfuncs: Vec::new(),
        constraints: Vec::new(),
        cfunc_rules: Vec::new(),
        vjet_rules: Vec::new(),
        family: Family::Polynomial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::parse_equation_file;
    use crate::parse::{parse_with, ParseContext};

    fn eq3d() -> DifferentialEquation {
        parse_equation_file("equation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u)) + Dz(h(u)*Dz(u))")
            .unwrap()
    }

    fn constraint_strings(sys: &DeterminingSystem) -> Vec<String> {
        sys.constraints.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn anisotropic_system_collapses_to_four_flat_constraints() {
        let sys = determining_system(&eq3d()).unwrap();
        assert!(sys.u_collapsed);
        assert_eq!(sys.tag, SystemTag::SolvablePolynomial);
        assert_eq!(
            constraint_strings(&sys),
            vec![
                "phi_t(t,x,y,z)",
                "phi_xx(t,x,y,z)",
                "phi_yy(t,x,y,z)",
                "phi_zz(t,x,y,z)"
            ]
        );
    }

    #[test]
    fn arbitrary_source_forces_the_substitution_to_vanish() {
        let eq = parse_equation_file("equation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u)) + q(u)")
            .unwrap();
        let sys = determining_system(&eq).unwrap();
        assert_eq!(sys.tag, SystemTag::Inconsistent);
        assert_eq!(
            constraint_strings(&sys),
            vec![
                "phi_t(t,x,y)",
                "phi_xx(t,x,y)",
                "phi_yy(t,x,y)",
                "phi(t,x,y)"
            ]
        );
        assert!(matches!(
            solve_substitution(&sys),
            Err(SelfAdjointError::Inconsistent)
        ));
    }

    #[test]
    fn proportional_source_derivative_gives_oscillator_branch() {
        let eq = parse_equation_file(
            "params: r\nrelation: q1 = r*f\nequation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u)) + q(u)",
        )
        .unwrap();
        let sys = determining_system(&eq).unwrap();
        assert_eq!(sys.tag, SystemTag::OdeBranch);
        assert_eq!(
            constraint_strings(&sys),
            vec![
                "phi_t(t,x,y)",
                "phi_yy(t,x,y)",
                "phi_xx(t,x,y) + r*phi(t,x,y)"
            ]
        );
    }

    #[test]
    fn constant_coefficient_gives_heat_coupled_system() {
        let eq = parse_equation_file(
            "params: k\nequation: -Dt(u) + Dx(f(u)*Dx(u)) + k*Dy(Dy(u)) + Dz(h(u)*Dz(u))",
        )
        .unwrap();
        let sys = determining_system(&eq).unwrap();
        assert_eq!(sys.tag, SystemTag::ConstrainedSymbol);
        assert_eq!(
            constraint_strings(&sys),
            vec![
                "phi_xx(t,x,y,z)",
                "phi_zz(t,x,y,z)",
                "phi_t(t,x,y,z) + k*phi_yy(t,x,y,z)"
            ]
        );
    }

    #[test]
    fn polynomial_family_has_eight_parameters() {
        let sys = determining_system(&eq3d()).unwrap();
        let s = solve_substitution(&sys).unwrap();
        assert_eq!(
            s.params,
            vec!["a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"]
        );
        let ctx = ParseContext::with_params(&["a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"]);
        let expected = parse_with(
            "a1*x*y*z + a2*x*y + a3*x*z + a4*y*z + a5*x + a6*y + a7*z + a8",
            &ctx,
        )
        .unwrap();
        assert!(equivalent(&s.phi, &expected));
        let lambda = verify_substitution(&eq3d(), &s).unwrap();
        assert!(lambda.is_zero());
    }

    #[test]
    fn trig_family_matches_oscillator_solution() {
        let eq = parse_equation_file(
            "params: omega\nequation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u)) + omega^2*F(u)",
        )
        .unwrap();
        let sys = determining_system(&eq).unwrap();
        assert_eq!(sys.tag, SystemTag::OdeBranch);
        let s = solve_substitution(&sys).unwrap();
        assert_eq!(s.params, vec!["A1", "A2", "B1", "B2"]);
        let ctx = ParseContext::with_params(&["A1", "A2", "B1", "B2", "omega"]);
        let expected =
            parse_with("(A1*y + B1)*cos(omega*x) + (A2*y + B2)*sin(omega*x)", &ctx).unwrap();
        assert!(equivalent(&s.phi, &expected));
        assert!(verify_substitution(&eq, &s).unwrap().is_zero());
    }

    #[test]
    fn exp_family_matches_damped_oscillator_solution() {
        let eq = parse_equation_file(
            "params: delta\nequation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u)) - delta^2*F(u)",
        )
        .unwrap();
        let s = solve_substitution(&determining_system(&eq).unwrap()).unwrap();
        let ctx = ParseContext::with_params(&["A1", "A2", "B1", "B2", "delta"]);
        let expected =
            parse_with("(A1*y + B1)*exp(delta*x) + (A2*y + B2)*exp(-delta*x)", &ctx).unwrap();
        assert!(equivalent(&s.phi, &expected));
        assert!(verify_substitution(&eq, &s).unwrap().is_zero());
    }

    #[test]
    fn constrained_family_carries_heat_constraints() {
        let eq = parse_equation_file(
            "params: k\nequation: -Dt(u) + Dx(f(u)*Dx(u)) + k*Dy(Dy(u)) + Dz(h(u)*Dz(u))",
        )
        .unwrap();
        let s = solve_substitution(&determining_system(&eq).unwrap()).unwrap();
        let names: Vec<&str> = s.cfuncs.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["alpha", "beta", "gamma", "sigma"]);
        let text = s.phi.to_string();
        assert!(text.contains("alpha(t,y)") && text.contains("x*z"));
        assert!(verify_substitution(&eq, &s).unwrap().is_zero());
    }

    #[test]
    fn mixed_constant_coefficient_and_source_promotes_coefficients() {
        let eq = parse_equation_file(
            "params: k, omega\nequation: -Dt(u) + Dx(f(u)*Dx(u)) + k*Dy(Dy(u)) + omega^2*F(u)",
        )
        .unwrap();
        let sys = determining_system(&eq).unwrap();
        assert_eq!(sys.tag, SystemTag::ConstrainedSymbol);
        let s = solve_substitution(&sys).unwrap();
        assert_eq!(s.cfuncs.len(), 2);
        assert!(matches!(s.family, Family::ConstrainedTrig { .. }));
        assert!(verify_substitution(&eq, &s).unwrap().is_zero());
    }

    #[test]
    fn identity_substitution_fails_with_clashing_residual() {
        let s = plain_substitution(Expr::atom(Atom::u()), &[]);
        match verify_substitution(&eq3d(), &s) {
            Err(SelfAdjointError::VerificationFailed { residual }) => {
                let text = residual.to_string();
                assert!(text.contains("u_xx"));
            }
            other => panic!("expected verification failure, got {other:?}"),
        }
    }

    #[test]
    fn zero_substitution_is_rejected() {
        let s = plain_substitution(Expr::zero(), &[]);
        assert!(matches!(
            verify_substitution(&eq3d(), &s),
            Err(SelfAdjointError::ZeroSubstitution)
        ));
    }
}
