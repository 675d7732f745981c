//! Discrete balance oracles: refinement convergence for true conservation
//! laws, stalling for corrupted ones, machine-zero residual for curl-type
//! (identically divergence-free) vectors.

use conslaw_core::{parse_with, ParseContext};
use conslaw_numlab::convergence::Reference;
use conslaw_numlab::{convergence_study, run_balance, BalanceVector, SimulationConfig};

fn nonlinear2d(n: usize) -> SimulationConfig {
    serde_json::from_value(serde_json::json!({
        "dims": 2,
        "n": [n, n],
        "extents": [[0.0, 1.0], [0.0, 1.0]],
        "t_end": 0.01,
        "boundary": "zero_flux",
        "models": {
            "f": {"kind": "power", "n": 1.0},
            "g": {"kind": "power", "n": 2.0}
        },
        "initial": {"kind": "product_cosine", "amplitude": 0.4, "base": 1.0, "freq": [1, 1]}
    }))
    .unwrap()
}

fn mass_vector() -> BalanceVector {
    let ctx = ParseContext::default();
    BalanceVector {
        name: "mass".into(),
        components: vec![
            parse_with("-u", &ctx).unwrap(),
            parse_with("f(u)*u_x", &ctx).unwrap(),
            parse_with("g(u)*u_y", &ctx).unwrap(),
        ],
    }
}

fn moment_vector() -> BalanceVector {
    let ctx = ParseContext::default();
    BalanceVector {
        name: "y-moment".into(),
        components: vec![
            parse_with("-y*u", &ctx).unwrap(),
            parse_with("y*f(u)*u_x - x*g(u)*u_y", &ctx).unwrap(),
            parse_with("g(u)*(x*u_x + y*u_y)", &ctx).unwrap(),
        ],
    }
}

fn corrupted_mass_vector() -> BalanceVector {
    let ctx = ParseContext::default();
    BalanceVector {
        name: "mass-corrupted".into(),
        components: vec![
            parse_with("-u", &ctx).unwrap(),
            parse_with("f(u)*u_x", &ctx).unwrap(),
            parse_with("-g(u)*u_y", &ctx).unwrap(),
        ],
    }
}

#[test]
fn true_laws_converge_and_corrupted_ones_stall() {
    let report = convergence_study(
        &nonlinear2d(16),
        3,
        Reference::SelfConvergence,
        &[mass_vector(), moment_vector(), corrupted_mass_vector()],
    )
    .unwrap();

    let find = |name: &str| {
        report
            .balance_rates
            .iter()
            .find(|(n, _, _)| n == name)
            .unwrap()
            .clone()
    };

    let (_, mass_rates, _) = find("mass");
    for pair in mass_rates.windows(2) {
        assert!(
            pair[0] / pair[1] >= 3.5,
            "mass rate refinement ratio {} too small ({:?})",
            pair[0] / pair[1],
            mass_rates
        );
    }
    let (_, moment_rates, _) = find("y-moment");
    for pair in moment_rates.windows(2) {
        assert!(pair[0] / pair[1] >= 3.5, "moment rates {moment_rates:?}");
    }
    let (_, bad_rates, _) = find("mass-corrupted");
    for pair in bad_rates.windows(2) {
        assert!(
            pair[0] / pair[1] < 2.0,
            "corrupted vector must not converge: {bad_rates:?}"
        );
    }
}

#[test]
fn divergence_free_vector_scores_machine_zero_on_periodic_runs() {
    let mut cfg = nonlinear2d(24);
    cfg.boundary = conslaw_numlab::BoundaryKind::Periodic;
    cfg.initial = serde_json::from_value(serde_json::json!(
        {"kind": "product_sine", "amplitude": 0.25, "base": 1.0, "freq": [1, 1]}
    ))
    .unwrap();
    let ctx = ParseContext::default();
    let curl = BalanceVector {
        name: "curl".into(),
        components: vec![
            parse_with("0", &ctx).unwrap(),
            parse_with("-g(u)*u_y", &ctx).unwrap(),
            parse_with("g(u)*u_x", &ctx).unwrap(),
        ],
    };
    let reports = run_balance(&cfg, &[curl]).unwrap();
    assert!(
        reports[0].max_abs_residual < 1e-13,
        "curl-type global residual {}",
        reports[0].max_abs_residual
    );
}

#[test]
fn linear_case_has_second_order_spatial_accuracy() {
    let cfg: SimulationConfig = serde_json::from_value(serde_json::json!({
        "dims": 2,
        "n": [16, 16],
        "extents": [[0.0, 1.0], [0.0, 1.0]],
        "t_end": 0.02,
        "boundary": "zero_flux",
        "models": {
            "f": {"kind": "constant", "value": 1.0},
            "g": {"kind": "constant", "value": 1.0}
        },
        "initial": {"kind": "product_cosine", "amplitude": 1.0, "freq": [1, 1]}
    }))
    .unwrap();
    let report = convergence_study(&cfg, 3, Reference::LinearDecay { k: 1.0 }, &[]).unwrap();
    for order in &report.solution_orders {
        assert!(
            (order - 2.0).abs() <= 0.2,
            "spatial order {order} out of range ({:?})",
            report.solution_orders
        );
    }
    // with Δt tied to Δx² by the stability clamp, first order in time is the
    // same statement at half the rate
    for order in &report.solution_orders {
        let time_order = order / 2.0;
        assert!((time_order - 1.0).abs() <= 0.2);
    }
}

#[test]
fn stored_trajectory_balance_matches_the_streaming_run() {
    let mut cfg = nonlinear2d(12);
    cfg.store_every = 1;
    let vector = mass_vector();
    let streamed = run_balance(&cfg, &[vector.clone()]).unwrap();
    let trajectory = conslaw_numlab::solve(&cfg).unwrap();
    let stored = conslaw_numlab::discrete_balance(&trajectory, &vector, &cfg).unwrap();
    assert_eq!(stored.steps, streamed[0].steps);
    assert!((stored.max_abs_residual - streamed[0].max_abs_residual).abs() < 1e-15);
    assert!((stored.max_local_rate - streamed[0].max_local_rate).abs() < 1e-12);
}

#[test]
fn zero_initial_data_has_zero_error_at_every_level() {
    let mut cfg = nonlinear2d(8);
    cfg.initial =
        serde_json::from_value(serde_json::json!({"kind": "constant", "value": 0.0})).unwrap();
    cfg.models.f = conslaw_core::eval::FunctionModel::Constant { value: 1.0 };
    cfg.models.g = Some(conslaw_core::eval::FunctionModel::Constant { value: 1.0 });
    let report = convergence_study(&cfg, 3, Reference::SelfConvergence, &[]).unwrap();
    for err in &report.solution_errors {
        assert_eq!(*err, 0.0);
    }
}
