//! Plain-text and LaTeX emission.
//!
//! The plain form is parseable by the expression grammar, so
//! `parse(plain(e)) == e` holds on normal forms.

use crate::atom::{Atom, ClosureKind};
use crate::expr::{Coeff, Expr, Monomial};
use num_traits::{One, Signed};

/// Terms ordered for reading: derivatives in t, x, y, z sort first in that
/// variable order, derivative-free terms last, ties by the canonical
/// monomial order. This reproduces the usual typesetting
/// (−u_t + f·u_xx + … or φ_xx + r·φ).
fn display_terms(e: &Expr) -> Vec<(&Monomial, &Coeff)> {
    let mut terms: Vec<(&Monomial, &Coeff)> = e.terms().collect();
    let leading_slot = |m: &Monomial| -> u32 {
        m.0.iter()
            .filter_map(|(a, _)| match a {
                Atom::Jet { idx, .. } => (0..4).find(|i| idx.0[*i] > 0).map(|i| i as u32),
                Atom::CFunc { idx, .. } => (0..5).find(|i| idx.0[*i] > 0).map(|i| i as u32),
                _ => None,
            })
            .min()
            .unwrap_or(9)
    };
    let jet_weight = |m: &Monomial| -> u32 {
        m.0.iter()
            .map(|(a, p)| match a {
                Atom::Jet { idx, .. } => idx.order() * p,
                Atom::CFunc { idx, .. } => idx.order() * p,
                _ => 0,
            })
            .sum()
    };
    terms.sort_by(|(ma, _), (mb, _)| {
        leading_slot(ma)
            .cmp(&leading_slot(mb))
            .then_with(|| jet_weight(ma).cmp(&jet_weight(mb)))
            .then_with(|| ma.cmp(mb))
    });
    terms
}

/// Canonical plain-text form.
pub fn plain(e: &Expr) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in display_terms(e).into_iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term_plain(m, &abs));
    }
    out
}

/// Display order within a term: parameters first, then variables, then
/// functional atoms — the way the originals are typeset (a₁·x·f(u)·u_x).
fn display_pairs(m: &Monomial) -> Vec<(&Atom, u32)> {
    let mut pairs: Vec<(&Atom, u32)> = m.0.iter().map(|(a, p)| (a, *p)).collect();
    let class = |a: &Atom| match a {
        Atom::Param(_) => 0,
        Atom::Indep(_) => 1,
        _ => 2,
    };
    pairs.sort_by(|(a, _), (b, _)| class(a).cmp(&class(b)).then_with(|| a.cmp(b)));
    pairs
}

fn term_plain(m: &Monomial, abs: &Coeff) -> String {
    let mut factors: Vec<String> = Vec::new();
    if !abs.is_one() || m.is_one() {
        factors.push(coeff_plain(abs));
    }
    for (atom, pow) in display_pairs(m) {
        let base = atom.display_name();
        if pow == 1 {
            factors.push(base);
        } else {
            factors.push(format!("{base}^{pow}"));
        }
    }
    factors.join("*")
}

fn coeff_plain(c: &Coeff) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// LaTeX form, one expression per call.
pub fn latex(e: &Expr) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in display_terms(e).into_iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || m.is_one() {
            factors.push(coeff_latex(&abs));
        }
        for (atom, pow) in display_pairs(m) {
            let base = atom_latex(atom);
            if pow == 1 {
                factors.push(base);
            } else {
                factors.push(format!("{base}^{{{pow}}}"));
            }
        }
        out.push_str(&factors.join("\\,"));
    }
    out
}

fn coeff_latex(c: &Coeff) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn param_latex(name: &str) -> String {
    const GREEK: [&str; 10] = [
        "alpha", "beta", "gamma", "sigma", "omega", "delta", "lambda", "mu", "xi", "eta",
    ];
    if GREEK.contains(&name) {
        return format!("\\{name}");
    }
    // split trailing digits into a subscript: a1 -> a_1, A2 -> A_2
    let digits = name
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .count();
    if digits > 0 && digits < name.len() {
        let (stem, sub) = name.split_at(name.len() - digits);
        return format!("{stem}_{{{sub}}}");
    }
    name.to_string()
}

fn atom_latex(atom: &Atom) -> String {
    match atom {
        Atom::Indep(v) => v.name().to_string(),
        Atom::Param(p) => param_latex(p),
        Atom::Func { name, order } => match *order {
            -1 => format!("{{\\cal {}}}(u)", name.upper()),
            0 => format!("{}(u)", name.lower()),
            1 => format!("{}'(u)", name.lower()),
            2 => format!("{}''(u)", name.lower()),
            k => format!("{}^{{({k})}}(u)", name.lower()),
        },
        Atom::Closure { kind, freq, var } => {
            let p = param_latex(freq);
            match kind {
                ClosureKind::Sin => format!("\\sin({p} {var})"),
                ClosureKind::Cos => format!("\\cos({p} {var})"),
                ClosureKind::ExpPos => format!("{{\\rm e}}^{{{p} {var}}}"),
                ClosureKind::ExpNeg => format!("{{\\rm e}}^{{-{p} {var}}}"),
            }
        }
        Atom::CFunc { sym, idx } => {
            let name = param_latex(&sym.name);
            if idx.is_empty() {
                name
            } else {
                format!("{}_{{{}}}", name, idx.suffix())
            }
        }
        Atom::Jet { dep, idx } => {
            if idx.is_empty() {
                dep.name().to_string()
            } else {
                format!("{}_{{{}}}", dep.name(), idx.suffix())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{Dep, FuncName, JetIndex, Var};
    use crate::expr::int;

    #[test]
    fn plain_form_of_two_monomials() {
        let e = Expr::param("a1") * Expr::var(Var::X) * Expr::var(Var::Y) * Expr::var(Var::Z)
            + Expr::param("a8");
        assert_eq!(plain(&e), "a1*x*y*z + a8");
    }

    #[test]
    fn negative_leading_coefficient() {
        let e = Expr::atom(Atom::u()).scaled(&int(-1));
        assert_eq!(plain(&e), "-u");
    }

    #[test]
    fn latex_of_adjoint_like_expression() {
        let e = Expr::func(FuncName::F, 0) * Expr::jet(Dep::V, JetIndex::of(Var::X).raised(Var::X))
            + Expr::jet(Dep::V, JetIndex::of(Var::T));
        let s = latex(&e);
        assert!(s.contains("f(u)"));
        assert!(s.contains("v_{xx}"));
        assert!(s.contains("v_{t}"));
    }
}
