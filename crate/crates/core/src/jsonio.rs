//! JSON tree serialization of expressions.
//!
//! Schema: `{"terms": [{"coeff": "num" | "num/den", "atoms": [{"atom": {...}, "pow": n}]}]}`.
//! Atom payloads are the serde encodings of [`crate::atom::Atom`]. Term and
//! atom order is canonical, so serialization is deterministic.

use crate::atom::Atom;
use crate::error::ExprError;
use crate::expr::{Coeff, Expr, Monomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Serialize, Deserialize)]
pub struct ExprJson {
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub atoms: Vec<AtomPow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtomPow {
    pub atom: Atom,
    pub pow: u32,
}

pub fn to_json(e: &Expr) -> ExprJson {
    ExprJson {
        terms: e
            .terms()
            .map(|(m, c)| TermJson {
                coeff: coeff_string(c),
                atoms: m
                    .0
                    .iter()
                    .map(|(a, p)| AtomPow {
                        atom: a.clone(),
                        pow: *p,
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn from_json(j: &ExprJson) -> Result<Expr, ExprError> {
    let mut e = Expr::zero();
    for term in &j.terms {
        let coeff = parse_coeff(&term.coeff)?;
        let pairs = term
            .atoms
            .iter()
            .map(|ap| (ap.atom.clone(), ap.pow))
            .collect();
        e.add_term(Monomial::from_pairs(pairs), coeff);
    }
    Ok(e)
}

fn coeff_string(c: &Coeff) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn parse_coeff(s: &str) -> Result<Coeff, ExprError> {
    let bad = |_| ExprError::Json(format!("bad coefficient `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => Ok(BigRational::new(
            BigInt::from_str(n.trim()).map_err(bad)?,
            BigInt::from_str(d.trim()).map_err(bad)?,
        )),
        None => Ok(BigRational::from(BigInt::from_str(s.trim()).map_err(bad)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::equivalent;
    use crate::parse::parse;

    #[test]
    fn json_roundtrip() {
        let e = parse("u_t - f(u)*u_xx + 3/2*x*v_xy").unwrap();
        let j = to_json(&e);
        let text = serde_json::to_string(&j).unwrap();
        let back: ExprJson = serde_json::from_str(&text).unwrap();
        assert!(equivalent(&from_json(&back).unwrap(), &e));
    }
}
