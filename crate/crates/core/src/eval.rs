//! Numeric evaluation of expressions at jet points.
//!
//! A [`JetPoint`] assigns floating-point values to every atom of an
//! expression: independent variables, parameters, jet coordinates (which are
//! independent coordinates — no consistency between u and u_x is implied),
//! named function-symbol jets, and models for the coefficient towers f, g,
//! h, q. Closure atoms evaluate from the parameter and variable values.
//!
//! Rational coefficients stay exact until the final float multiply.

use crate::atom::{Atom, ClosureKind, FuncName, Var};
use crate::error::ExprError;
use crate::expr::Expr;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

/// Order-aware numeric model for one coefficient tower. `eval(k, u)` is the
/// k-th derivative at u; k = −1 is the antiderivative fixed by value 0 at 0
/// (power law) or the natural one (exponential).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionModel {
    /// scale * u^n (real exponent).
    Power {
        n: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// scale * e^u.
    Exponential {
        #[serde(default = "one")]
        scale: f64,
    },
    /// Constant value; antiderivative is value * u.
    Constant { value: f64 },
    /// Piecewise-linear table over sorted sample points (order 0 and 1 only;
    /// order −1 integrates the interpolant from the first sample).
    Table { us: Vec<f64>, values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl FunctionModel {
    pub fn eval(&self, order: i32, u: f64) -> f64 {
        match self {
            FunctionModel::Power { n, scale } => {
                if order == -1 {
                    scale * fast_pow(u, n + 1.0) / (n + 1.0)
                } else {
                    let mut factor = 1.0;
                    for i in 0..order {
                        factor *= n - i as f64;
                    }
                    scale * factor * fast_pow(u, n - order as f64)
                }
            }
            FunctionModel::Exponential { scale } => scale * u.exp(),
            FunctionModel::Constant { value } => match order {
                -1 => value * u,
                0 => *value,
                _ => 0.0,
            },
            FunctionModel::Table { us, values } => table_eval(us, values, order, u),
        }
    }
}

/// Integer exponents take the cheap path; grid kernels hit this hard.
fn fast_pow(u: f64, n: f64) -> f64 {
    let rounded = n as i32;
    if rounded as f64 == n && (-4..=4).contains(&rounded) {
        u.powi(rounded)
    } else {
        u.powf(n)
    }
}

fn table_eval(us: &[f64], values: &[f64], order: i32, u: f64) -> f64 {
    assert!(
        us.len() >= 2 && us.len() == values.len(),
        "table needs >= 2 samples"
    );
    let seg = match us.iter().position(|&x| x > u) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => us.len() - 2,
    };
    let (x0, x1) = (us[seg], us[seg + 1]);
    let (y0, y1) = (values[seg], values[seg + 1]);
    let slope = (y1 - y0) / (x1 - x0);
    match order {
        0 => y0 + slope * (u - x0),
        1 => slope,
        -1 => {
            // integral of the interpolant from us[0] to u
            let mut acc = 0.0;
            for i in 0..seg {
                acc += 0.5 * (values[i] + values[i + 1]) * (us[i + 1] - us[i]);
            }
            let yu = y0 + slope * (u - x0);
            acc + 0.5 * (y0 + yu) * (u - x0)
        }
        _ => 0.0,
    }
}

/// Numeric assignment for every atom of an expression.
#[derive(Debug, Clone, Default)]
pub struct JetPoint {
    pub values: BTreeMap<Atom, f64>,
    pub models: BTreeMap<FuncName, FunctionModel>,
}

impl JetPoint {
    pub fn new() -> Self {
        JetPoint::default()
    }

    pub fn set(&mut self, atom: Atom, value: f64) -> &mut Self {
        self.values.insert(atom, value);
        self
    }

    pub fn set_var(&mut self, var: Var, value: f64) -> &mut Self {
        self.set(Atom::indep(var), value)
    }

    pub fn set_param(&mut self, name: &str, value: f64) -> &mut Self {
        self.set(Atom::param(name), value)
    }

    pub fn model(&mut self, name: FuncName, model: FunctionModel) -> &mut Self {
        self.models.insert(name, model);
        self
    }

    fn atom_value(&self, atom: &Atom) -> Result<f64, ExprError> {
        if let Some(v) = self.values.get(atom) {
            return Ok(*v);
        }
        match atom {
            Atom::Func { name, order } => {
                let model = self
                    .models
                    .get(name)
                    .ok_or_else(|| ExprError::MissingModel {
                        name: name.lower().to_string(),
                    })?;
                let u = self
                    .values
                    .get(&Atom::u())
                    .copied()
                    .ok_or(ExprError::MissingAssignment { atom: Atom::u() })?;
                Ok(model.eval(*order, u))
            }
            Atom::Closure { kind, freq, var } => {
                let p = self
                    .values
                    .get(&Atom::param(freq))
                    .copied()
                    .ok_or_else(|| ExprError::MissingAssignment {
                        atom: Atom::param(freq),
                    })?;
                let x = self.values.get(&Atom::indep(*var)).copied().ok_or(
                    ExprError::MissingAssignment {
                        atom: Atom::indep(*var),
                    },
                )?;
                Ok(match kind {
                    ClosureKind::Sin => (p * x).sin(),
                    ClosureKind::Cos => (p * x).cos(),
                    ClosureKind::ExpPos => (p * x).exp(),
                    ClosureKind::ExpNeg => (-p * x).exp(),
                })
            }
            _ => Err(ExprError::MissingAssignment { atom: atom.clone() }),
        }
    }
}

/// Exact-to-float conversion of a rational coefficient.
pub fn coeff_to_f64(c: &crate::expr::Coeff) -> f64 {
    c.to_f64().expect("rational fits f64")
}

/// Evaluate an expression at a jet point.
pub fn evaluate(e: &Expr, p: &JetPoint) -> Result<f64, ExprError> {
    let mut total = 0.0;
    for (m, c) in e.terms() {
        let mut prod = c.to_f64().expect("rational fits f64");
        for (atom, pow) in &m.0 {
            let v = p.atom_value(atom)?;
            prod *= v.powi(*pow as i32);
        }
        total += prod;
    }
    Ok(total)
}

/// SplitMix64: tiny deterministic generator for seed-stable oracles.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0,1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
