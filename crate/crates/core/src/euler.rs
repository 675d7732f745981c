//! Formal Lagrangian, variational (Euler) derivative, and adjoint equations.
//!
//! The Euler operator is truncated at second-order jets — every equation in
//! scope is second order, and the truncation keeps the operator total:
//!
//! ```text
//! δL/δu = ∂L/∂u − Σᵢ Dᵢ(∂L/∂uᵢ) + Σ_{i≤k} DᵢD_k(∂L/∂u_{ik})
//! ```
//!
//! with the sum over unordered multi-indices (mixed partials stored once).
//! Total derivatives chain through the adjoint variable v as well, so the
//! adjoint equation of F is exactly δ(vF)/δu with v treated as a new
//! dependent variable.

use crate::atom::{Atom, Dep, JetIndex, Var};
use crate::equation::DifferentialEquation;
use crate::error::ExprError;
use crate::expr::Expr;

pub const MAX_JET_ORDER: u32 = 2;

/// The formal Lagrangian v·F.
pub fn formal_lagrangian(eq: &DifferentialEquation) -> Expr {
    Expr::atom(Atom::v()) * eq.lhs.clone()
}

/// Variational derivative δe/δu, truncated at second order.
pub fn variational_derivative(e: &Expr, dep: Dep) -> Result<Expr, ExprError> {
    let found = e.max_jet_order(dep);
    if found > MAX_JET_ORDER {
        return Err(ExprError::JetOrderTooHigh {
            dep: dep.name().to_string(),
            found,
            max: MAX_JET_ORDER,
        });
    }
    let mut out = e.dependent_partial(dep);
    for (a, i) in Var::ALL.iter().enumerate() {
        let first = e.jet_partial(&Atom::jet(dep, JetIndex::of(*i)));
        if !first.is_zero() {
            out = out - first.total_derivative(*i);
        }
        for k in Var::ALL.iter().skip(a) {
            let idx = JetIndex::of(*i).raised(*k);
            let second = e.jet_partial(&Atom::jet(dep, idx));
            if !second.is_zero() {
                out = out + second.total_derivative(*i).total_derivative(*k);
            }
        }
    }
    Ok(out)
}

/// The adjoint equation F* = δ(vF)/δu = 0, an equation for v.
pub fn adjoint_equation(eq: &DifferentialEquation) -> Result<DifferentialEquation, ExprError> {
    let fstar = variational_derivative(&formal_lagrangian(eq), Dep::U)?;
    Ok(DifferentialEquation {
        lhs: fstar,
        dep: Dep::V,
        spatial: eq.spatial.clone(),
        relations: eq.relations.clone(),
        params: eq.params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::parse_equation_file;
    use crate::expr::equivalent;
    use crate::parse::{parse, parse_with, ParseContext};

    fn anisotropic3d() -> DifferentialEquation {
        parse_equation_file("equation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u)) + Dz(h(u)*Dz(u))")
            .unwrap()
    }

    #[test]
    fn formal_lagrangian_of_anisotropic_equation() {
        let eq = anisotropic3d();
        let lag = formal_lagrangian(&eq);
        let expected = parse(
            "v*(f(u)*u_xx + g(u)*u_yy + h(u)*u_zz + f1(u)*u_x^2 + g1(u)*u_y^2 + h1(u)*u_z^2 - u_t)",
        )
        .unwrap();
        assert!(equivalent(&lag, &expected));
    }

    #[test]
    fn formal_lagrangian_of_pure_evolution_term() {
        let eq = DifferentialEquation::new(parse("-Dt(u)").unwrap(), vec![], vec![]).unwrap();
        let lag = formal_lagrangian(&eq);
        assert!(equivalent(&lag, &parse("-v*u_t").unwrap()));
    }

    #[test]
    fn adjoint_of_anisotropic_equation_is_linear() {
        let eq = anisotropic3d();
        let adj = adjoint_equation(&eq).unwrap();
        let expected = parse("v_t + f(u)*v_xx + g(u)*v_yy + h(u)*v_zz").unwrap();
        assert!(equivalent(&adj.lhs, &expected));
    }

    #[test]
    fn adjoint_of_source_equation_keeps_source_derivative() {
        let eq = parse_equation_file("equation: -Dt(u) + Dx(f(u)*Dx(u)) + Dy(g(u)*Dy(u)) + q(u)")
            .unwrap();
        let adj = adjoint_equation(&eq).unwrap();
        let expected = parse("v_t + f(u)*v_xx + g(u)*v_yy + q1(u)*v").unwrap();
        assert!(equivalent(&adj.lhs, &expected));
    }

    #[test]
    fn adjoint_of_linear_heat() {
        let eq = parse_equation_file("params: k\nequation: -Dt(u) + k*Dy(Dy(u))").unwrap();
        let adj = adjoint_equation(&eq).unwrap();
        let ctx = ParseContext::with_params(&["k"]);
        let expected = parse_with("v_t + k*v_yy", &ctx).unwrap();
        assert!(equivalent(&adj.lhs, &expected));
    }

    #[test]
    fn adjoint_of_bare_time_derivative_flips_sign() {
        let eq = DifferentialEquation::new(parse("Dt(u)").unwrap(), vec![], vec![]).unwrap();
        let adj = adjoint_equation(&eq).unwrap();
        assert!(equivalent(&adj.lhs, &parse("-v_t").unwrap()));
    }

    #[test]
    fn euler_operator_is_exact_on_self_adjoint_pairing() {
        // δ(v u_xx)/δu = v_xx
        let e = parse("v*u_xx").unwrap();
        let d = variational_derivative(&e, Dep::U).unwrap();
        assert!(equivalent(&d, &parse("v_xx").unwrap()));
    }

    #[test]
    fn euler_operator_handles_mixed_jets_once() {
        // δ(v u_xy)/δu = v_xy
        let e = parse("v*u_xy").unwrap();
        let d = variational_derivative(&e, Dep::U).unwrap();
        assert!(equivalent(&d, &parse("v_xy").unwrap()));
    }

    #[test]
    fn delta_of_v_times_u_is_v() {
        let e = parse("v*u").unwrap();
        let d = variational_derivative(&e, Dep::U).unwrap();
        assert!(equivalent(&d, &parse("v").unwrap()));
    }

    #[test]
    fn rejects_third_order_jets() {
        let e = parse("v*u_xxx").unwrap();
        assert!(matches!(
            variational_derivative(&e, Dep::U),
            Err(ExprError::JetOrderTooHigh { found: 3, .. })
        ));
    }
}
