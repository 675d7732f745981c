//! Property suites for the symbolic layer: commuting total derivatives, the
//! Leibniz rule, normalization idempotence, the equivalence relation, the
//! null-Lagrangian property of the Euler operator, and the finite-difference
//! oracle for total derivatives on smooth profiles.

use conslaw_core::atom::{Atom, ClosureKind, Dep, FuncName, JetIndex, Var};
use conslaw_core::euler::variational_derivative;
use conslaw_core::eval::{evaluate, FunctionModel, JetPoint};
use conslaw_core::expr::{equivalent, int, rat, Expr, Monomial};
use proptest::prelude::*;

fn arb_var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::T), Just(Var::X), Just(Var::Y), Just(Var::Z),]
}

/// Atoms up to second-order jets, the full pool.
fn arb_atom() -> BoxedStrategy<Atom> {
    prop_oneof![
        arb_var().prop_map(Atom::indep),
        prop_oneof![Just("a"), Just("b"), Just("omega")].prop_map(Atom::param),
        (prop_oneof![Just(FuncName::F), Just(FuncName::G)], -1..=2i32)
            .prop_map(|(n, k)| Atom::func(n, k)),
        prop_oneof![Just(ClosureKind::Sin), Just(ClosureKind::Cos)].prop_map(|kind| {
            Atom::Closure {
                kind,
                freq: "omega".into(),
                var: Var::X,
            }
        }),
        (prop_oneof![Just(Dep::U), Just(Dep::V)], arb_jet_index(2))
            .prop_map(|(dep, idx)| Atom::jet(dep, idx)),
    ]
    .boxed()
}

fn arb_jet_index(max_order: u32) -> impl Strategy<Value = JetIndex> {
    proptest::collection::vec(arb_var(), 0..=max_order as usize).prop_map(|vars| {
        let mut idx = JetIndex::empty();
        for v in vars {
            idx = idx.raised(v);
        }
        idx
    })
}

/// Atoms whose jets stay at order ≤ 1 (for the null-Lagrangian property).
fn arb_first_order_atom() -> BoxedStrategy<Atom> {
    prop_oneof![
        arb_var().prop_map(Atom::indep),
        prop_oneof![Just("a"), Just("b")].prop_map(Atom::param),
        (prop_oneof![Just(FuncName::F), Just(FuncName::G)], 0..=1i32)
            .prop_map(|(n, k)| Atom::func(n, k)),
        (prop_oneof![Just(Dep::U), Just(Dep::V)], arb_jet_index(1))
            .prop_map(|(dep, idx)| Atom::jet(dep, idx)),
    ]
    .boxed()
}

fn expr_from(parts: Vec<(Vec<(Atom, u32)>, i64)>) -> Expr {
    let mut e = Expr::zero();
    for (pairs, c) in parts {
        e.add_term(Monomial::from_pairs(pairs), int(c));
    }
    e
}

fn arb_expr_with(atoms: BoxedStrategy<Atom>) -> impl Strategy<Value = Expr> {
    proptest::collection::vec(
        (
            proptest::collection::vec((atoms, 1..=2u32), 0..=3),
            -3i64..=3,
        ),
        1..=4,
    )
    .prop_map(expr_from)
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    arb_expr_with(arb_atom())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn total_derivatives_commute(e in arb_expr()) {
        let xy = e.total_derivative(Var::X).total_derivative(Var::Y);
        let yx = e.total_derivative(Var::Y).total_derivative(Var::X);
        prop_assert!(equivalent(&xy, &yx));
    }

    #[test]
    fn leibniz_rule(e1 in arb_expr(), e2 in arb_expr()) {
        let lhs = (&e1 * &e2).total_derivative(Var::X);
        let rhs = &(&e1.total_derivative(Var::X) * &e2) + &(&e1 * &e2.total_derivative(Var::X));
        prop_assert!(equivalent(&lhs, &rhs));
    }

    #[test]
    fn normalization_is_idempotent(e in arb_expr()) {
        // rebuild the expression from its own terms: the normal form is a
        // fixed point
        let rebuilt = {
            let mut acc = Expr::zero();
            for (m, c) in e.terms() {
                acc.add_term(m.clone(), c.clone());
            }
            acc
        };
        prop_assert_eq!(rebuilt, e);
    }

    #[test]
    fn plain_text_roundtrip(e in arb_expr()) {
        let text = conslaw_core::format::plain(&e);
        let ctx = conslaw_core::ParseContext::with_params(&["a", "b", "omega"]);
        let back = conslaw_core::parse_with(&text, &ctx).unwrap();
        prop_assert!(equivalent(&back, &e));
    }

    #[test]
    fn json_roundtrip(e in arb_expr()) {
        let json = conslaw_core::jsonio::to_json(&e);
        let back = conslaw_core::jsonio::from_json(&json).unwrap();
        prop_assert!(equivalent(&back, &e));
    }

    #[test]
    fn equivalence_is_an_equivalence_relation(e1 in arb_expr(), e2 in arb_expr(), e3 in arb_expr()) {
        prop_assert!(equivalent(&e1, &e1));
        if equivalent(&e1, &e2) {
            prop_assert!(equivalent(&e2, &e1));
        }
        // transitivity through engineered equalities
        let a = &e1 + &e2;
        let b = &e2 + &e1;
        let c = &(&e1 + &e2) + &(&e3 - &e3);
        prop_assert!(equivalent(&a, &b));
        prop_assert!(equivalent(&b, &c));
        prop_assert!(equivalent(&a, &c));
    }

    #[test]
    fn euler_operator_annihilates_total_derivatives(
        e in arb_expr_with(arb_first_order_atom()),
        var in arb_var(),
    ) {
        let de = e.total_derivative(var);
        let result = variational_derivative(&de, Dep::U).unwrap();
        prop_assert!(result.is_zero(), "Euler operator left {result}");
    }

    #[test]
    fn euler_operator_is_linear(
        e1 in arb_expr_with(arb_first_order_atom()),
        e2 in arb_expr_with(arb_first_order_atom()),
        p in -3i64..=3,
        q in 1i64..=4,
    ) {
        let c = rat(p, q);
        let combo = &e1.scaled(&c) + &e2;
        let lhs = variational_derivative(&combo, Dep::U).unwrap();
        let rhs = &variational_derivative(&e1, Dep::U).unwrap().scaled(&c)
            + &variational_derivative(&e2, Dep::U).unwrap();
        prop_assert!(equivalent(&lhs, &rhs));
    }
}

/// Jet assignment realized from the profile u(x) = sin(w·x) at a point, so
/// total derivatives can be cross-checked with finite differences.
fn profile_point(x: f64, w: f64) -> JetPoint {
    let mut p = JetPoint::new();
    p.set_var(Var::X, x);
    p.set_var(Var::Y, 0.4);
    p.set_var(Var::Z, 0.8);
    p.set_var(Var::T, 0.3);
    p.set_param("omega", w);
    p.set_param("a", 0.7);
    p.set_param("b", -0.3);
    // u-jets along x from the profile; other directions flat
    for order in 0..4u8 {
        let value = match order % 4 {
            0 => (w * x).sin(),
            1 => w * (w * x).cos(),
            2 => -w * w * (w * x).sin(),
            _ => -w * w * w * (w * x).cos(),
        };
        let mut idx = JetIndex::empty();
        idx.0[Var::X.index()] = order;
        p.set(Atom::jet(Dep::U, idx), value);
    }
    p.model(FuncName::F, FunctionModel::Exponential { scale: 1.0 });
    p.model(FuncName::G, FunctionModel::Power { n: 2.0, scale: 1.0 });
    p
}

#[test]
fn total_derivative_matches_finite_differences_on_smooth_profiles() {
    // expressions in x, u(x)-jets, closures and towers only
    let ctx = conslaw_core::ParseContext::with_params(&["omega", "a", "b"]);
    let cases = [
        "x^2*u_x + f(u)",
        "sin(omega*x)*u + cos(omega*x)*x",
        "g(u)*u_x^2 + a*x^3",
        "F(u)*u_xx + exp(omega*x)",
    ];
    let h = 1e-4;
    let w = 1.3;
    for text in cases {
        let e = conslaw_core::parse_with(text, &ctx).unwrap();
        let de = e.total_derivative(Var::X);
        for x0 in [0.3, 0.7, 1.1] {
            let exact = evaluate(&de, &profile_point(x0, w)).unwrap();
            let plus = evaluate(&e, &profile_point(x0 + h, w)).unwrap();
            let minus = evaluate(&e, &profile_point(x0 - h, w)).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            assert!(
                (exact - fd).abs() < 1e-5,
                "{text} at x={x0}: exact {exact} vs fd {fd}"
            );
        }
    }
}

#[test]
fn closure_derivative_of_the_oscillator_family_is_frozen() {
    // d/dx[(A1 y + B1) cos(wx) + (A2 y + B2) sin(wx)]
    //   = -w (A1 y + B1) sin(wx) + w (A2 y + B2) cos(wx)
    let ctx = conslaw_core::ParseContext::with_params(&["A1", "A2", "B1", "B2", "omega"]);
    let phi = conslaw_core::parse_with("(A1*y + B1)*cos(omega*x) + (A2*y + B2)*sin(omega*x)", &ctx)
        .unwrap();
    let d = phi.total_derivative(Var::X);
    let frozen = conslaw_core::parse_with(
        "-omega*(A1*y + B1)*sin(omega*x) + omega*(A2*y + B2)*cos(omega*x)",
        &ctx,
    )
    .unwrap();
    assert!(equivalent(&d, &frozen));

    // finite-difference oracle on the closed form
    let h = 1e-4;
    for x0 in [0.2, 0.9] {
        let at = |x: f64| {
            let mut p = JetPoint::new();
            p.set_var(Var::X, x);
            p.set_var(Var::Y, 0.6);
            p.set_param("omega", 1.7);
            p.set_param("A1", 0.3);
            p.set_param("A2", -0.8);
            p.set_param("B1", 1.1);
            p.set_param("B2", 0.5);
            p
        };
        let exact = evaluate(&d, &at(x0)).unwrap();
        let fd = (evaluate(&phi, &at(x0 + h)).unwrap() - evaluate(&phi, &at(x0 - h)).unwrap())
            / (2.0 * h);
        assert!((exact - fd).abs() < 1e-5);
    }
}
