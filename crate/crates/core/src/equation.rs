//! Differential equations as first-class values, plus the plain-text
//! equation-file format used by the command line.
//!
//! An equation is stored exactly as written, as an expression F with the
//! convention F = 0. The solved form u_t = RHS is derived on demand from the
//! u_t coefficient. Declared tower relations (e.g. `q1 = r*f`, meaning the
//! first derivative of the source equals r times the diffusivity) are carried
//! with the equation and applied during coefficient matching.

use crate::atom::{Atom, Dep, FuncName, Var};
use crate::error::EquationError;
use crate::expr::{equivalent, Expr, Monomial};
use crate::parse::{parse_with, ParseContext};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A declared relation linking one tower member to a multiple of another:
/// `from`-th derivative of a function equals `factor` times another tower
/// atom. Higher derivatives inherit the relation by differentiation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Relation {
    pub from: (FuncName, i32),
    pub factor_param: Option<String>,
    pub to: (FuncName, i32),
}

impl Relation {
    /// Rewrite every tower atom implied by the relation.
    fn apply(&self, e: &Expr) -> Expr {
        let mut map: BTreeMap<Atom, Expr> = BTreeMap::new();
        for atom in e.atoms() {
            if let Atom::Func { name, order } = atom {
                if *name == self.from.0 && *order >= self.from.1 {
                    let shift = order - self.from.1;
                    let mut image = Expr::func(self.to.0, self.to.1 + shift);
                    if let Some(p) = &self.factor_param {
                        image = image * Expr::param(p);
                    }
                    map.insert(atom.clone(), image);
                }
            }
        }
        if map.is_empty() {
            e.clone()
        } else {
            e.substitute(&map)
        }
    }
}

/// A second-order evolution equation F = 0 for u(t, x…).
#[derive(Debug, Clone)]
pub struct DifferentialEquation {
    pub lhs: Expr,
    pub dep: Dep,
    pub spatial: Vec<Var>,
    pub relations: Vec<Relation>,
    pub params: Vec<String>,
}

impl DifferentialEquation {
    pub fn new(
        lhs: Expr,
        relations: Vec<Relation>,
        params: Vec<String>,
    ) -> Result<Self, EquationError> {
        if lhs.contains_atom_where(|a| a.is_v_jet()) {
            return Err(EquationError::ContainsAdjointVariable);
        }
        let mut spatial = Vec::new();
        for var in Var::SPATIAL {
            let used = lhs.atoms().any(|a| match a {
                Atom::Jet { dep: Dep::U, idx } => idx.count(var) > 0,
                Atom::Indep(v) => *v == var,
                Atom::Closure { var: cv, .. } => *cv == var,
                _ => false,
            });
            if used {
                spatial.push(var);
            }
        }
        Ok(DifferentialEquation {
            lhs,
            dep: Dep::U,
            spatial,
            relations,
            params,
        })
    }

    /// Axes of the conserved-vector components: time first, then the spatial
    /// variables in use.
    pub fn axes(&self) -> Vec<Var> {
        let mut axes = vec![Var::T];
        axes.extend(self.spatial.iter().copied());
        axes
    }

    pub fn dims(&self) -> usize {
        self.spatial.len()
    }

    /// Apply all declared tower relations.
    pub fn apply_relations(&self, e: &Expr) -> Expr {
        let mut out = e.clone();
        for r in &self.relations {
            out = r.apply(&out);
        }
        out
    }

    /// The right-hand side of the solved form u_t = RHS.
    pub fn solved_rhs(&self) -> Result<Expr, EquationError> {
        let ut = Atom::jet(Dep::U, crate::atom::JetIndex::of(Var::T));
        let coeff = self.lhs.jet_partial(&ut);
        if coeff.is_zero() {
            return Err(EquationError::NoTimeDerivative);
        }
        let c = coeff
            .as_constant()
            .ok_or(EquationError::NonConstantTimeCoefficient)?;
        // F = c u_t + R  =>  u_t = -R / c
        let rest = &self.lhs - &Expr::monomial(Monomial::atom(ut), c.clone());
        Ok(rest.scaled(&(-c.recip())))
    }

    /// Replace every jet of u carrying a time derivative by the corresponding
    /// total derivative of the solved form, repeating until none remain.
    pub fn eliminate_time_jets(&self, e: &Expr) -> Result<Expr, EquationError> {
        let rhs = self.solved_rhs()?;
        let mut out = e.clone();
        loop {
            let mut map: BTreeMap<Atom, Expr> = BTreeMap::new();
            for atom in out.atoms() {
                if let Atom::Jet { dep: Dep::U, idx } = atom {
                    if idx.count(Var::T) > 0 {
                        let spatial_part = idx.lowered(Var::T).unwrap();
                        map.insert(atom.clone(), rhs.total_derivative_multi(spatial_part));
                    }
                }
            }
            if map.is_empty() {
                return Ok(out);
            }
            out = out.substitute(&map);
        }
    }

    /// Check that a candidate right-hand side matches the stored form up to
    /// the overall sign convention.
    pub fn solved_form_consistent(&self) -> bool {
        match self.solved_rhs() {
            Ok(rhs) => {
                let ut = Expr::jet(Dep::U, crate::atom::JetIndex::of(Var::T));
                let reconstructed = rhs - ut;
                equivalent(&self.lhs, &reconstructed)
                    || equivalent(&self.lhs, &reconstructed.scaled_int(-1))
            }
            Err(_) => false,
        }
    }

    /// Parser context with this equation's parameters declared.
    pub fn context(&self) -> ParseContext {
        let mut ctx = ParseContext::default();
        for p in &self.params {
            ctx.add_param(p);
        }
        ctx
    }
}

/// Parse the plain-text equation-file format:
///
/// ```text
/// # comment
/// params: omega, k
/// relation: q1 = r*f
/// equation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u))
/// ```
pub fn parse_equation_file(text: &str) -> Result<DifferentialEquation, EquationError> {
    let mut ctx = ParseContext::default();
    let mut params: Vec<String> = Vec::new();
    let mut relations: Vec<Relation> = Vec::new();
    let mut equation: Option<Expr> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| {
            EquationError::File(format!("line {}: expected `key: value`", lineno + 1))
        })?;
        match key.trim() {
            "params" => {
                for p in value.split(',') {
                    let p = p.trim();
                    if !p.is_empty() {
                        ctx.add_param(p);
                        params.push(p.to_string());
                    }
                }
            }
            "relation" => {
                relations.push(parse_relation(value, lineno + 1, &params)?);
            }
            "equation" => {
                let e = parse_with(value.trim(), &ctx)?;
                equation = Some(e);
            }
            other => {
                return Err(EquationError::File(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }

    let lhs = equation.ok_or_else(|| EquationError::File("missing `equation:` line".into()))?;
    DifferentialEquation::new(lhs, relations, params)
}

fn tower_of(name: &str) -> Option<(FuncName, i32)> {
    let mut chars = name.chars();
    let head = chars.next()?;
    let func = match head {
        'f' => FuncName::F,
        'g' => FuncName::G,
        'h' => FuncName::H,
        'q' => FuncName::Q,
        'F' => return chars.next().is_none().then_some((FuncName::F, -1)),
        'G' => return chars.next().is_none().then_some((FuncName::G, -1)),
        'H' => return chars.next().is_none().then_some((FuncName::H, -1)),
        _ => return None,
    };
    let rest: String = chars.collect();
    if rest.is_empty() {
        Some((func, 0))
    } else {
        rest.parse::<i32>().ok().map(|k| (func, k))
    }
}

fn parse_relation(text: &str, lineno: usize, params: &[String]) -> Result<Relation, EquationError> {
    let bad = |msg: &str| EquationError::File(format!("line {lineno}: {msg}"));
    let (lhs, rhs) = text
        .split_once('=')
        .ok_or_else(|| bad("relation needs the form `q1 = r*f`"))?;
    let from = tower_of(lhs.trim()).ok_or_else(|| bad("left side must be a tower symbol"))?;
    let rhs = rhs.trim();
    let (factor, target) = match rhs.split_once('*') {
        Some((p, t)) => (Some(p.trim().to_string()), t.trim()),
        None => (None, rhs),
    };
    if let Some(p) = &factor {
        if !params.iter().any(|q| q == p) {
            return Err(bad(&format!(
                "relation factor `{p}` must be a declared parameter"
            )));
        }
    }
    let to = tower_of(target).ok_or_else(|| bad("right side must be (param*)tower"))?;
    Ok(Relation {
        from,
        factor_param: factor,
        to,
    })
}
