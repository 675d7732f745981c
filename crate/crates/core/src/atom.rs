//! Atomic symbols of the jet-space polynomial algebra.
//!
//! Expressions are polynomials over a fixed universe of atoms: independent
//! variables, free parameters, derivative towers of the diffusivity/source
//! functions, trig/exp closure symbols, named function symbols with their own
//! jet indices, and jet coordinates of the dependent variables. The global
//! atom order (independent variable < parameter < function tower < closure <
//! function symbol < jet coordinate) fixes the canonical form of every
//! monomial.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Independent variables, time first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    T,
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::T, Var::X, Var::Y, Var::Z];
    pub const SPATIAL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Var::T => 0,
            Var::X => 1,
            Var::Y => 2,
            Var::Z => 3,
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "t" => Some(Var::T),
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "z" => Some(Var::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dependent variables: the solution `u` and the adjoint variable `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dep {
    U,
    V,
}

impl Dep {
    pub fn name(self) -> &'static str {
        match self {
            Dep::U => "u",
            Dep::V => "v",
        }
    }
}

/// A derivative multi-index over the independent variables. Multi-indices are
/// unordered (mixed partials commute), so only the count per variable is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct JetIndex(pub [u8; 4]);

impl JetIndex {
    pub fn empty() -> Self {
        JetIndex([0; 4])
    }

    pub fn of(var: Var) -> Self {
        let mut idx = JetIndex::empty();
        idx.0[var.index()] = 1;
        idx
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }

    pub fn raised(&self, var: Var) -> Self {
        let mut idx = *self;
        idx.0[var.index()] += 1;
        idx
    }

    pub fn count(&self, var: Var) -> u8 {
        self.0[var.index()]
    }

    pub fn lowered(&self, var: Var) -> Option<Self> {
        if self.count(var) == 0 {
            return None;
        }
        let mut idx = *self;
        idx.0[var.index()] -= 1;
        Some(idx)
    }

    pub fn is_empty(&self) -> bool {
        self.order() == 0
    }

    /// Variables listed with multiplicity, e.g. `xxy` for u_xxy.
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        for var in Var::ALL {
            for _ in 0..self.count(var) {
                s.push_str(var.name());
            }
        }
        s
    }

    pub fn from_suffix(s: &str) -> Option<Self> {
        let mut idx = JetIndex::empty();
        for ch in s.chars() {
            let var = Var::from_name(&ch.to_string())?;
            idx = idx.raised(var);
        }
        Some(idx)
    }

    /// Swap the counts of two variables (axis relabeling).
    pub fn swapped(&self, a: Var, b: Var) -> Self {
        let mut idx = *self;
        idx.0.swap(a.index(), b.index());
        idx
    }
}

impl PartialOrd for JetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for JetIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // graded, then lexicographic: u < u_t < u_x < ... < u_tt < u_tx ...
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Derivative towers of the equation coefficients and the source.
/// `order` counts derivatives with respect to `u`; order −1 is the
/// antiderivative symbol (the integral of the order-0 function).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FuncName {
    F,
    G,
    H,
    Q,
}

impl FuncName {
    pub const ALL: [FuncName; 4] = [FuncName::F, FuncName::G, FuncName::H, FuncName::Q];

    pub fn lower(self) -> &'static str {
        match self {
            FuncName::F => "f",
            FuncName::G => "g",
            FuncName::H => "h",
            FuncName::Q => "q",
        }
    }

    /// Display name of the antiderivative symbol.
    pub fn upper(self) -> &'static str {
        match self {
            FuncName::F => "F",
            FuncName::G => "G",
            FuncName::H => "H",
            FuncName::Q => "Q",
        }
    }
}

/// Closure symbols with closed-form derivative rules, covering the
/// two-dimensional solution spaces of w'' ± p²w = 0:
/// sin(p·s), cos(p·s), exp(p·s), exp(−p·s) for a parameter p and variable s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClosureKind {
    Cos,
    Sin,
    ExpPos,
    ExpNeg,
}

impl ClosureKind {
    pub fn name(self) -> &'static str {
        match self {
            ClosureKind::Cos => "cos",
            ClosureKind::Sin => "sin",
            ClosureKind::ExpPos => "exp",
            ClosureKind::ExpNeg => "exp-",
        }
    }
}

/// Argument signature of a named function symbol: which independent variables
/// (and possibly `u`) it depends on. Stored as a bitmask over (t,x,y,z,u).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArgSet(pub u8);

impl ArgSet {
    pub const U_BIT: u8 = 1 << 4;

    pub fn new(vars: &[Var], with_u: bool) -> Self {
        let mut mask = 0u8;
        for v in vars {
            mask |= 1 << v.index();
        }
        if with_u {
            mask |= Self::U_BIT;
        }
        ArgSet(mask)
    }

    pub fn has_var(&self, var: Var) -> bool {
        self.0 & (1 << var.index()) != 0
    }

    pub fn has_u(&self) -> bool {
        self.0 & Self::U_BIT != 0
    }

    pub fn vars(&self) -> Vec<Var> {
        Var::ALL
            .iter()
            .copied()
            .filter(|v| self.has_var(*v))
            .collect()
    }
}

/// Jet index of a named function symbol: derivative counts over (t,x,y,z,u).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CIndex(pub [u8; 5]);

impl PartialOrd for CIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl CIndex {
    pub const U_SLOT: usize = 4;

    pub fn empty() -> Self {
        CIndex([0; 5])
    }

    pub fn raised_var(&self, var: Var) -> Self {
        let mut idx = *self;
        idx.0[var.index()] += 1;
        idx
    }

    pub fn raised_u(&self) -> Self {
        let mut idx = *self;
        idx.0[Self::U_SLOT] += 1;
        idx
    }

    pub fn count_var(&self, var: Var) -> u8 {
        self.0[var.index()]
    }

    pub fn count_u(&self) -> u8 {
        self.0[Self::U_SLOT]
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.order() == 0
    }

    pub fn suffix(&self) -> String {
        let mut s = String::new();
        for var in Var::ALL {
            for _ in 0..self.count_var(var) {
                s.push_str(var.name());
            }
        }
        for _ in 0..self.count_u() {
            s.push('u');
        }
        s
    }
}

/// A named function symbol (substitution candidate φ, or the constrained
/// coefficient functions that must solve a side equation) together with its
/// argument signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FuncSym {
    pub name: String,
    pub args: ArgSet,
}

impl FuncSym {
    pub fn new(name: &str, vars: &[Var], with_u: bool) -> Self {
        FuncSym {
            name: name.to_string(),
            args: ArgSet::new(vars, with_u),
        }
    }
}

/// An atomic symbol. The variant order fixes the canonical monomial order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    /// An independent variable appearing polynomially (x in a₂·x·y).
    Indep(Var),
    /// A free parameter (a₁…a₈, A₁, B₂, ω, δ, r, k, …).
    Param(String),
    /// One member of a coefficient derivative tower: f, f', f'', or the
    /// antiderivative (order −1). The argument is always `u`.
    Func { name: FuncName, order: i32 },
    /// Trig/exp closure, e.g. sin(ω·x).
    Closure {
        kind: ClosureKind,
        freq: String,
        var: Var,
    },
    /// Jet of a named function symbol, e.g. α_ty(t,y) or φ_u(t,x,y,z,u).
    CFunc { sym: FuncSym, idx: CIndex },
    /// Jet coordinate of a dependent variable, e.g. u_xx or v_t.
    Jet { dep: Dep, idx: JetIndex },
}

impl Atom {
    pub fn indep(var: Var) -> Atom {
        Atom::Indep(var)
    }

    pub fn param(name: &str) -> Atom {
        Atom::Param(name.to_string())
    }

    pub fn func(name: FuncName, order: i32) -> Atom {
        debug_assert!(order >= -1);
        Atom::Func { name, order }
    }

    pub fn jet(dep: Dep, idx: JetIndex) -> Atom {
        Atom::Jet { dep, idx }
    }

    pub fn u() -> Atom {
        Atom::jet(Dep::U, JetIndex::empty())
    }

    pub fn v() -> Atom {
        Atom::jet(Dep::V, JetIndex::empty())
    }

    pub fn u_d(var: Var) -> Atom {
        Atom::jet(Dep::U, JetIndex::of(var))
    }

    pub fn v_d(var: Var) -> Atom {
        Atom::jet(Dep::V, JetIndex::of(var))
    }

    pub fn cfunc(sym: &FuncSym, idx: CIndex) -> Atom {
        Atom::CFunc {
            sym: sym.clone(),
            idx,
        }
    }

    pub fn is_u_jet(&self) -> bool {
        matches!(self, Atom::Jet { dep: Dep::U, .. })
    }

    pub fn is_v_jet(&self) -> bool {
        matches!(self, Atom::Jet { dep: Dep::V, .. })
    }

    /// Plain-text display name, parseable by the expression grammar.
    pub fn display_name(&self) -> String {
        match self {
            Atom::Indep(v) => v.name().to_string(),
            Atom::Param(p) => p.clone(),
            Atom::Func { name, order } => match *order {
                -1 => format!("{}(u)", name.upper()),
                0 => format!("{}(u)", name.lower()),
                k => format!("{}{}(u)", name.lower(), k),
            },
            Atom::Closure { kind, freq, var } => match kind {
                ClosureKind::Cos => format!("cos({freq}*{var})"),
                ClosureKind::Sin => format!("sin({freq}*{var})"),
                ClosureKind::ExpPos => format!("exp({freq}*{var})"),
                ClosureKind::ExpNeg => format!("exp(-{freq}*{var})"),
            },
            Atom::CFunc { sym, idx } => {
                let args = sym
                    .args
                    .vars()
                    .iter()
                    .map(|v| v.name())
                    .chain(sym.args.has_u().then_some("u"))
                    .collect::<Vec<_>>()
                    .join(",");
                if idx.is_empty() {
                    format!("{}({})", sym.name, args)
                } else {
                    format!("{}_{}({})", sym.name, idx.suffix(), args)
                }
            }
            Atom::Jet { dep, idx } => {
                if idx.is_empty() {
                    dep.name().to_string()
                } else {
                    format!("{}_{}", dep.name(), idx.suffix())
                }
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_index_is_order_independent() {
        let xy = JetIndex::of(Var::X).raised(Var::Y);
        let yx = JetIndex::of(Var::Y).raised(Var::X);
        assert_eq!(xy, yx);
        assert_eq!(xy.suffix(), "xy");
    }

    #[test]
    fn atom_order_groups_variants() {
        let x = Atom::indep(Var::X);
        let p = Atom::param("a1");
        let f = Atom::func(FuncName::F, 0);
        let c = Atom::Closure {
            kind: ClosureKind::Sin,
            freq: "omega".into(),
            var: Var::X,
        };
        let a = Atom::cfunc(
            &FuncSym::new("alpha", &[Var::T, Var::Y], false),
            CIndex::empty(),
        );
        let j = Atom::u_d(Var::X);
        assert!(x < p && p < f && f < c && c < a && a < j);
    }

    #[test]
    fn jet_display_and_suffix_roundtrip() {
        let idx = JetIndex::from_suffix("xxy").unwrap();
        assert_eq!(idx.count(Var::X), 2);
        assert_eq!(idx.count(Var::Y), 1);
        assert_eq!(Atom::jet(Dep::U, idx).display_name(), "u_xxy");
    }
}
