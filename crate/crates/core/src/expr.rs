//! Canonical multivariate polynomials over jet-space atoms.
//!
//! An [`Expr`] is a fully expanded sum of monomials with exact rational
//! coefficients. The map is keyed by [`Monomial`] in the global atom order,
//! so two expressions are equal as values exactly when they are equal as
//! mathematical objects — `equivalent(a, b)` is just `a - b == 0`.
//!
//! Total differentiation chain-rules through every atom kind: jets raise
//! their multi-index, coefficient towers produce the next tower member times
//! u_i, closure symbols rotate within their two-dimensional solution space,
//! and named function symbols pick up both their explicit derivative and the
//! u-chain term when they depend on u.

use crate::atom::{Atom, ClosureKind, Dep, FuncName, JetIndex, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Coeff = BigRational;

pub fn rat(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Coeff {
    BigRational::from(BigInt::from(n))
}

/// A power product of atoms, sorted by the global atom order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Atom, u32)>) -> Self {
        pairs.retain(|(_, p)| *p > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Atom, u32)> = Vec::with_capacity(pairs.len());
        for (a, p) in pairs {
            match merged.last_mut() {
                Some((last, lp)) if *last == a => *lp += p,
                _ => merged.push((a, p)),
            }
        }
        Monomial(merged)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend(other.0.iter().cloned());
        Monomial::from_pairs(pairs)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, p)| p).sum()
    }

    pub fn power_of(&self, atom: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(a, _)| a == atom)
            .map(|(_, p)| *p)
            .unwrap_or(0)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.power_of(atom) > 0
    }

    /// Remove one power of `atom`; `None` if absent.
    pub fn divided_by(&self, atom: &Atom) -> Option<Monomial> {
        let pos = self.0.iter().position(|(a, _)| a == atom)?;
        let mut pairs = self.0.clone();
        if pairs[pos].1 == 1 {
            pairs.remove(pos);
        } else {
            pairs[pos].1 -= 1;
        }
        Some(Monomial(pairs))
    }

    /// Exact monomial quotient self / other, if other divides self.
    pub fn quotient(&self, other: &Monomial) -> Option<Monomial> {
        let mut pairs: Vec<(Atom, u32)> = Vec::new();
        let mut it = self.0.iter().cloned().collect::<BTreeMap<_, _>>();
        for (a, p) in &other.0 {
            match it.get_mut(a) {
                Some(q) if *q >= *p => {
                    *q -= *p;
                }
                _ => return None,
            }
        }
        for (a, p) in it {
            if p > 0 {
                pairs.push((a, p));
            }
        }
        Some(Monomial::from_pairs(pairs))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter().map(|(a, _)| a)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }
}

/// A normalized polynomial over jet-space atoms with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::from_coeff(int(1))
    }

    pub fn from_coeff(c: Coeff) -> Expr {
        let mut e = Expr::zero();
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn from_int(n: i64) -> Expr {
        Expr::from_coeff(int(n))
    }

    pub fn atom(a: Atom) -> Expr {
        let mut e = Expr::zero();
        e.add_term(Monomial::atom(a), int(1));
        e
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Expr {
        let mut e = Expr::zero();
        e.add_term(m, c);
        e
    }

    pub fn var(v: Var) -> Expr {
        Expr::atom(Atom::indep(v))
    }

    pub fn param(name: &str) -> Expr {
        Expr::atom(Atom::param(name))
    }

    pub fn func(name: FuncName, order: i32) -> Expr {
        Expr::atom(Atom::func(name, order))
    }

    pub fn jet(dep: Dep, idx: JetIndex) -> Expr {
        Expr::atom(Atom::jet(dep, idx))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scaled(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        let mut out = Expr::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.clone() * c.clone());
        }
        out
    }

    pub fn scaled_int(&self, n: i64) -> Expr {
        self.scaled(&int(n))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Expr {
        let mut out = Expr::zero();
        for (mm, k) in &self.terms {
            out.add_term(mm.mul(m), k.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Expr {
        let mut out = Expr::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// The single (monomial, coeff) pair if this expression is one term.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        if self.is_zero() {
            return Some(int(0));
        }
        let (m, c) = self.as_single_term()?;
        m.is_one().then(|| c.clone())
    }

    /// All distinct atoms occurring in the expression.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.terms.keys().flat_map(|m| m.atoms())
    }

    pub fn contains_atom_where(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        self.atoms().any(|a| pred(a))
    }

    /// Maximum total jet order of the given dependent variable.
    pub fn max_jet_order(&self, dep: Dep) -> u32 {
        self.atoms()
            .filter_map(|a| match a {
                Atom::Jet { dep: d, idx } if *d == dep => Some(idx.order()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Formal partial derivative with all atoms treated as independent
    /// coordinates.
    pub fn jet_partial(&self, atom: &Atom) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let p = m.power_of(atom);
            if p > 0 {
                let reduced = m.divided_by(atom).unwrap();
                out.add_term(reduced, c.clone() * int(p as i64));
            }
        }
        out
    }

    /// Partial derivative with respect to a dependent variable itself. For u
    /// this chain-rules through the coefficient towers (∂f(u)/∂u = f'(u)) and
    /// through named function symbols that take u as an argument; jets of the
    /// dependent variable other than the zeroth are separate coordinates and
    /// contribute nothing.
    pub fn dependent_partial(&self, dep: Dep) -> Expr {
        let base = Atom::jet(dep, JetIndex::empty());
        let mut out = self.jet_partial(&base);
        if dep != Dep::U {
            return out;
        }
        for (m, c) in &self.terms {
            for (i, (atom, pow)) in m.0.iter().enumerate() {
                let image = match atom {
                    Atom::Func { name, order } => Atom::func(*name, order + 1),
                    Atom::CFunc { sym, idx } if sym.args.has_u() => {
                        Atom::cfunc(sym, idx.raised_u())
                    }
                    _ => continue,
                };
                let mut pairs: Vec<(Atom, u32)> = Vec::with_capacity(m.0.len() + 1);
                for (j, (a, p)) in m.0.iter().enumerate() {
                    let p = if i == j { *p - 1 } else { *p };
                    if p > 0 {
                        pairs.push((a.clone(), p));
                    }
                }
                pairs.push((image, 1));
                out.add_term(Monomial::from_pairs(pairs), c.clone() * int(*pow as i64));
            }
        }
        out
    }

    /// Total derivative along an independent variable, chaining through every
    /// atom kind.
    pub fn total_derivative(&self, var: Var) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (i, (atom, pow)) in m.0.iter().enumerate() {
                let datom = atom_total_derivative(atom, var);
                if datom.is_zero() {
                    continue;
                }
                // c * pow * atom^(pow-1) * d(atom) * rest
                let mut rest_pairs: Vec<(Atom, u32)> = Vec::with_capacity(m.0.len());
                for (j, (a, p)) in m.0.iter().enumerate() {
                    let p = if i == j { *p - 1 } else { *p };
                    if p > 0 {
                        rest_pairs.push((a.clone(), p));
                    }
                }
                let rest = Monomial::from_pairs(rest_pairs);
                let factor = c.clone() * int(*pow as i64);
                out = out + datom.mul_monomial(&rest, &factor);
            }
        }
        out
    }

    pub fn total_derivative_multi(&self, idx: JetIndex) -> Expr {
        let mut e = self.clone();
        for var in Var::ALL {
            for _ in 0..idx.count(var) {
                e = e.total_derivative(var);
            }
        }
        e
    }

    /// Simultaneous substitution of atoms by expressions. Atoms not in the
    /// map are kept.
    pub fn substitute(&self, map: &BTreeMap<Atom, Expr>) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut acc = Expr::from_coeff(c.clone());
            for (atom, pow) in &m.0 {
                match map.get(atom) {
                    Some(image) => acc = &acc * &image.pow(*pow),
                    None => acc = acc.mul_monomial(&Monomial(vec![(atom.clone(), *pow)]), &int(1)),
                }
            }
            out = out + acc;
        }
        out
    }

    pub fn substitute_atom(&self, atom: &Atom, image: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(atom.clone(), image.clone());
        self.substitute(&map)
    }

    /// Replace a dependent variable by an expression, deriving every jet of
    /// it by total differentiation of the image: binding v = φ sends v_J to
    /// D_J(φ).
    pub fn bind_dependent(&self, dep: Dep, image: &Expr) -> Expr {
        let mut map: BTreeMap<Atom, Expr> = BTreeMap::new();
        for atom in self.atoms() {
            if let Atom::Jet { dep: d, idx } = atom {
                if *d == dep && !map.contains_key(atom) {
                    map.insert(atom.clone(), image.total_derivative_multi(*idx));
                }
            }
        }
        self.substitute(&map)
    }

    /// Simultaneous substitution with a consistency check: if the map binds
    /// both a dependent variable and one of its jets explicitly, the jet
    /// binding must agree with the derivative of the base binding.
    pub fn substitute_checked(
        &self,
        map: &BTreeMap<Atom, Expr>,
    ) -> Result<Expr, crate::error::ExprError> {
        for dep in [Dep::U, Dep::V] {
            let base = map.get(&Atom::jet(dep, JetIndex::empty()));
            if let Some(base) = base {
                for (atom, image) in map {
                    if let Atom::Jet { dep: d, idx } = atom {
                        if *d == dep && !idx.is_empty() {
                            let derived = base.total_derivative_multi(*idx);
                            if !equivalent(&derived, image) {
                                return Err(crate::error::ExprError::InconsistentBinding {
                                    dep: dep.name().to_string(),
                                    atom: atom.clone(),
                                });
                            }
                        }
                    }
                }
                // bind unlisted jets of the same dependent variable too
                let mut full = map.clone();
                for atom in self.atoms() {
                    if let Atom::Jet { dep: d, idx } = atom {
                        if *d == dep && !full.contains_key(atom) {
                            full.insert(atom.clone(), base.total_derivative_multi(*idx));
                        }
                    }
                }
                return Ok(self.substitute(&full));
            }
        }
        Ok(self.substitute(map))
    }

    /// Rename atoms through an arbitrary atom map (used for axis permutation).
    pub fn map_atoms(&self, f: impl Fn(&Atom) -> Atom) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let pairs = m.0.iter().map(|(a, p)| (f(a), *p)).collect();
            out.add_term(Monomial::from_pairs(pairs), c.clone());
        }
        out
    }

    /// Collect the expression as a polynomial in the atoms selected by
    /// `marker`: returns marker-monomial → coefficient expression over the
    /// remaining atoms.
    pub fn collect_by(&self, marker: impl Fn(&Atom) -> bool) -> BTreeMap<Monomial, Expr> {
        let mut groups: BTreeMap<Monomial, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut key_pairs = Vec::new();
            let mut rest_pairs = Vec::new();
            for (a, p) in &m.0 {
                if marker(a) {
                    key_pairs.push((a.clone(), *p));
                } else {
                    rest_pairs.push((a.clone(), *p));
                }
            }
            groups
                .entry(Monomial::from_pairs(key_pairs))
                .or_default()
                .add_term(Monomial::from_pairs(rest_pairs), c.clone());
        }
        groups
    }

    /// Greatest common monomial-with-positive-rational factor of all terms.
    /// Returns (coefficient, monomial); for the zero expression returns
    /// (1, 1).
    pub fn content(&self) -> (Coeff, Monomial) {
        if self.is_zero() {
            return (int(1), Monomial::one());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_bigint_gcd(&num_gcd, &c.numer().abs());
            den_lcm = num_bigint_lcm(&den_lcm, c.denom());
        }
        let coeff = BigRational::new(num_gcd, den_lcm);
        let mut common: Option<BTreeMap<Atom, u32>> = None;
        for m in self.terms.keys() {
            let this: BTreeMap<Atom, u32> = m.0.iter().cloned().collect();
            common = Some(match common {
                None => this,
                Some(prev) => prev
                    .into_iter()
                    .filter_map(|(a, p)| this.get(&a).map(|q| (a, p.min(*q))))
                    .collect(),
            });
        }
        let pairs = common
            .unwrap_or_default()
            .into_iter()
            .filter(|(_, p)| *p > 0)
            .collect();
        (coeff, Monomial::from_pairs(pairs))
    }

    /// Divide every term by a monomial factor known to divide all of them.
    pub fn exact_div(&self, c: &Coeff, m: &Monomial) -> Option<Expr> {
        let mut out = Expr::zero();
        for (mm, k) in &self.terms {
            let q = mm.quotient(m)?;
            out.add_term(q, k.clone() / c.clone());
        }
        Some(out)
    }

    /// Leading coefficient in the canonical monomial order.
    pub fn leading_coeff(&self) -> Option<&Coeff> {
        self.terms.values().next()
    }

    pub fn coeff_of_monomial(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(|| int(0))
    }
}

fn num_bigint_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    use num_traits::Zero as _;
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn num_bigint_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a * b).abs() / num_bigint_gcd(a, b)
}

/// Total derivative of a single atom.
fn atom_total_derivative(atom: &Atom, var: Var) -> Expr {
    match atom {
        Atom::Indep(v) => {
            if *v == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Param(_) => Expr::zero(),
        Atom::Jet { dep, idx } => Expr::jet(*dep, idx.raised(var)),
        Atom::Func { name, order } => {
            // d/dx_i f^(k)(u) = f^(k+1)(u) * u_i
            Expr::monomial(
                Monomial::from_pairs(vec![(Atom::func(*name, order + 1), 1), (Atom::u_d(var), 1)]),
                int(1),
            )
        }
        Atom::Closure {
            kind,
            freq,
            var: cv,
        } => {
            if *cv != var {
                return Expr::zero();
            }
            let p = Atom::param(freq);
            let (next, sign) = match kind {
                ClosureKind::Sin => (ClosureKind::Cos, 1),
                ClosureKind::Cos => (ClosureKind::Sin, -1),
                ClosureKind::ExpPos => (ClosureKind::ExpPos, 1),
                ClosureKind::ExpNeg => (ClosureKind::ExpNeg, -1),
            };
            Expr::monomial(
                Monomial::from_pairs(vec![
                    (p, 1),
                    (
                        Atom::Closure {
                            kind: next,
                            freq: freq.clone(),
                            var: *cv,
                        },
                        1,
                    ),
                ]),
                int(sign),
            )
        }
        Atom::CFunc { sym, idx } => {
            let mut out = Expr::zero();
            if sym.args.has_var(var) {
                out.add_term(
                    Monomial::atom(Atom::cfunc(sym, idx.raised_var(var))),
                    int(1),
                );
            }
            if sym.args.has_u() {
                out.add_term(
                    Monomial::from_pairs(vec![
                        (Atom::cfunc(sym, idx.raised_u()), 1),
                        (Atom::u_d(var), 1),
                    ]),
                    int(1),
                );
            }
            out
        }
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        &self + &rhs
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scaled(&int(-1))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::plain(self))
    }
}

/// Equality as mathematical objects; on normalized representations this is
/// structural equality.
pub fn equivalent(a: &Expr, b: &Expr) -> bool {
    (a - b).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Expr {
        Expr::atom(Atom::u())
    }

    #[test]
    fn zero_coefficients_never_stored() {
        let e = &u() - &u();
        assert!(e.is_zero());
        assert_eq!(e.num_terms(), 0);
    }

    #[test]
    fn total_derivative_chains_through_towers() {
        // D_x f(u) = f'(u) u_x
        let e = Expr::func(FuncName::F, 0).total_derivative(Var::X);
        let expected = Expr::func(FuncName::F, 1) * Expr::atom(Atom::u_d(Var::X));
        assert!(equivalent(&e, &expected));
    }

    #[test]
    fn total_derivative_of_antiderivative() {
        // D_x F(u) = f(u) u_x
        let e = Expr::func(FuncName::F, -1).total_derivative(Var::X);
        let expected = Expr::func(FuncName::F, 0) * Expr::atom(Atom::u_d(Var::X));
        assert!(equivalent(&e, &expected));
    }

    #[test]
    fn closure_rotation() {
        // D_x sin(w x) = w cos(w x); D_x^2 sin = -w^2 sin
        let sin = Expr::atom(Atom::Closure {
            kind: ClosureKind::Sin,
            freq: "omega".into(),
            var: Var::X,
        });
        let d2 = sin.total_derivative(Var::X).total_derivative(Var::X);
        let expected = sin.scaled(&int(-1)) * Expr::param("omega").pow(2);
        assert!(equivalent(&d2, &expected));
    }

    #[test]
    fn product_rule_on_monomial_powers() {
        // D_x (u_x^2) = 2 u_x u_xx
        let ux = Expr::atom(Atom::u_d(Var::X));
        let e = ux.pow(2).total_derivative(Var::X);
        let uxx = Expr::jet(Dep::U, JetIndex::of(Var::X).raised(Var::X));
        let expected = (Expr::atom(Atom::u_d(Var::X)) * uxx).scaled_int(2);
        assert!(equivalent(&e, &expected));
    }

    #[test]
    fn jet_partials_treat_coordinates_independently() {
        // ∂(f'(u) u_x²)/∂u_x = 2 f'(u) u_x
        let e = Expr::func(FuncName::F, 1) * Expr::atom(Atom::u_d(Var::X)).pow(2);
        let d = e.jet_partial(&Atom::u_d(Var::X));
        let expected = (Expr::func(FuncName::F, 1) * Expr::atom(Atom::u_d(Var::X))).scaled_int(2);
        assert!(equivalent(&d, &expected));

        // ∂(v f(u) u_xx)/∂u_xx = v f(u)
        let uxx = Atom::jet(Dep::U, JetIndex::of(Var::X).raised(Var::X));
        let e = Expr::atom(Atom::v()) * Expr::func(FuncName::F, 0) * Expr::atom(uxx.clone());
        let d = e.jet_partial(&uxx);
        assert!(equivalent(
            &d,
            &(Expr::atom(Atom::v()) * Expr::func(FuncName::F, 0))
        ));

        // ∂u_t/∂u_y = 0
        let ut = Expr::jet(Dep::U, JetIndex::of(Var::T));
        assert!(ut.jet_partial(&Atom::u_d(Var::Y)).is_zero());
    }

    #[test]
    fn binding_the_adjoint_variable_derives_its_jets() {
        // v_t with v = y vanishes
        let vt = Expr::jet(Dep::V, JetIndex::of(Var::T));
        assert!(vt.bind_dependent(Dep::V, &Expr::var(Var::Y)).is_zero());

        // v_xx with a multilinear image vanishes
        let vxx = Expr::jet(Dep::V, JetIndex::of(Var::X).raised(Var::X));
        let poly = Expr::param("a1") * Expr::var(Var::X) * Expr::var(Var::Y) * Expr::var(Var::Z)
            + Expr::param("a8");
        assert!(vxx.bind_dependent(Dep::V, &poly).is_zero());
    }

    #[test]
    fn inconsistent_manual_jet_bindings_are_rejected() {
        let mut map = BTreeMap::new();
        map.insert(Atom::v(), Expr::var(Var::Y));
        map.insert(Atom::v_d(Var::X), Expr::one());
        let e = Expr::atom(Atom::v_d(Var::X));
        assert!(e.substitute_checked(&map).is_err());

        let mut ok = BTreeMap::new();
        ok.insert(Atom::v(), Expr::var(Var::X));
        ok.insert(Atom::v_d(Var::X), Expr::one());
        assert!(e.substitute_checked(&ok).is_ok());
    }

    #[test]
    fn content_extracts_common_factor() {
        // 2 w x + 4 w y -> content (2, w)
        let w = Atom::param("w");
        let e = Expr::monomial(
            Monomial::from_pairs(vec![(w.clone(), 1), (Atom::indep(Var::X), 1)]),
            int(2),
        ) + Expr::monomial(
            Monomial::from_pairs(vec![(w.clone(), 1), (Atom::indep(Var::Y), 1)]),
            int(4),
        );
        let (c, m) = e.content();
        assert_eq!(c, int(2));
        assert_eq!(m, Monomial::atom(w));
    }
}
