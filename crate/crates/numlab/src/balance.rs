//! Discrete conservation-balance verification.
//!
//! A conserved vector's components are compiled to a fast per-cell evaluator
//! over the slots (coordinates, u, first-order gradients, coefficient
//! towers, closures); parameters fold into the coefficients at compile time.
//! Gradients use central differences inside and one-sided second-order
//! stencils at the walls; fluxes are linearly extrapolated from the two
//! outermost cell layers to the wall faces.

use crate::config::{BoundaryKind, SimulationConfig};
use crate::grid::Grid;
use crate::solver::{solve_observed, SolverError, StepObserver, Trajectory};
use conslaw_core::atom::{Atom, ClosureKind, Dep, FuncName, Var};
use conslaw_core::eval::FunctionModel;
use conslaw_core::expr::Expr;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BalanceError {
    #[error("component references `{atom}`, which is not available on a {dims}-dimensional grid")]
    UnavailableAtom { atom: String, dims: usize },
    #[error("component count {got} does not match grid dimensionality + 1 = {want}")]
    ComponentCount { got: usize, want: usize },
    #[error("missing model for coefficient `{0}`")]
    MissingModel(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A conserved vector prepared for grid evaluation: density first, then one
/// flux per spatial axis.
#[derive(Debug, Clone)]
pub struct BalanceVector {
    pub name: String,
    pub components: Vec<Expr>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BalanceReport {
    pub vector: String,
    pub steps: usize,
    /// Per-step global residuals r(t) = Δ(Σ C¹ΔV) + Δt·(boundary outflow).
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    /// max |r| / Δt of the global residual.
    pub max_rate: f64,
    /// max over cells and steps of the pointwise conservation residual
    /// |ΔC¹/Δt + div_h(C²,C³,C⁴)|. Domains without boundary outflow hide
    /// flux corruptions from the global balance (their divergence integrates
    /// to zero), so convergence verdicts and negative controls key on this
    /// rate.
    pub max_local_rate: f64,
}

enum Slot {
    Coord(usize),
    Time,
    U,
    Grad(usize),
    Tower(FuncName, i32),
    Closure(ClosureKind, f64, usize),
}

struct CompiledTerm {
    coeff: f64,
    factors: Vec<(usize, i32)>,
}

/// One compiled component: slot table plus expanded terms.
pub struct CompiledComponent {
    slots: Vec<Slot>,
    terms: Vec<CompiledTerm>,
}

impl CompiledComponent {
    fn compile(
        e: &Expr,
        dims: usize,
        params: &BTreeMap<String, f64>,
    ) -> Result<CompiledComponent, BalanceError> {
        let axis_of = |v: Var| -> Option<usize> {
            match v {
                Var::X => (dims >= 1).then_some(0),
                Var::Y => (dims >= 2).then_some(1),
                Var::Z => (dims >= 3).then_some(2),
                Var::T => None,
            }
        };
        let mut slots: Vec<Slot> = Vec::new();
        let mut keys: Vec<Atom> = Vec::new();
        let mut terms: Vec<CompiledTerm> = Vec::new();
        let unavailable = |atom: &Atom| BalanceError::UnavailableAtom {
            atom: atom.display_name(),
            dims,
        };

        for (m, c) in e.terms() {
            let mut coeff = conslaw_core::eval::coeff_to_f64(c);
            let mut factors: Vec<(usize, i32)> = Vec::new();
            for (atom, pow) in &m.0 {
                // parameters fold into the coefficient
                if let Atom::Param(p) = atom {
                    let v = params
                        .get(p)
                        .copied()
                        .ok_or_else(|| BalanceError::MissingModel(p.clone()))?;
                    coeff *= v.powi(*pow as i32);
                    continue;
                }
                let slot_idx = match keys.iter().position(|k| k == atom) {
                    Some(i) => i,
                    None => {
                        let slot = match atom {
                            Atom::Indep(Var::T) => Slot::Time,
                            Atom::Indep(v) => {
                                Slot::Coord(axis_of(*v).ok_or_else(|| unavailable(atom))?)
                            }
                            Atom::Jet { dep: Dep::U, idx } if idx.is_empty() => Slot::U,
                            Atom::Jet { dep: Dep::U, idx } if idx.order() == 1 => {
                                let var = Var::SPATIAL
                                    .into_iter()
                                    .find(|v| idx.count(*v) == 1)
                                    .ok_or_else(|| unavailable(atom))?;
                                Slot::Grad(axis_of(var).ok_or_else(|| unavailable(atom))?)
                            }
                            Atom::Func { name, order } => Slot::Tower(*name, *order),
                            Atom::Closure { kind, freq, var } => {
                                let fv = params
                                    .get(freq)
                                    .copied()
                                    .ok_or_else(|| BalanceError::MissingModel(freq.clone()))?;
                                Slot::Closure(
                                    *kind,
                                    fv,
                                    axis_of(*var).ok_or_else(|| unavailable(atom))?,
                                )
                            }
                            other => return Err(unavailable(other)),
                        };
                        slots.push(slot);
                        keys.push(atom.clone());
                        slots.len() - 1
                    }
                };
                factors.push((slot_idx, *pow as i32));
            }
            terms.push(CompiledTerm { coeff, factors });
        }
        Ok(CompiledComponent { slots, terms })
    }

    fn eval(
        &self,
        coords: &[f64; 3],
        time: f64,
        u: f64,
        grad: &[f64; 3],
        models: &dyn Fn(FuncName, i32, f64) -> f64,
    ) -> f64 {
        let mut total = 0.0;
        for term in &self.terms {
            let mut prod = term.coeff;
            for &(slot, pow) in &term.factors {
                let v = match &self.slots[slot] {
                    Slot::Coord(a) => coords[*a],
                    Slot::Time => time,
                    Slot::U => u,
                    Slot::Grad(a) => grad[*a],
                    Slot::Tower(name, order) => models(*name, *order, u),
                    Slot::Closure(kind, freq, a) => {
                        let arg = freq * coords[*a];
                        match kind {
                            ClosureKind::Sin => arg.sin(),
                            ClosureKind::Cos => arg.cos(),
                            ClosureKind::ExpPos => arg.exp(),
                            ClosureKind::ExpNeg => (-arg).exp(),
                        }
                    }
                };
                prod *= v.powi(pow);
            }
            total += prod;
        }
        total
    }
}

/// Evaluate a compiled component over the whole grid, returning per-cell
/// values. Gradients: central inside, one-sided second-order at walls (or
/// periodic wrap).
fn eval_field(
    comp: &CompiledComponent,
    grid: &Grid,
    field: &[f64],
    time: f64,
    boundary: BoundaryKind,
    models: &dyn Fn(FuncName, i32, f64) -> f64,
) -> Vec<f64> {
    let mut out = vec![0.0; field.len()];
    for linear in 0..field.len() {
        let idx = grid.unindex(linear);
        let mut coords = [0.0; 3];
        let mut grad = [0.0; 3];
        for axis in 0..grid.dims {
            coords[axis] = grid.center(axis, idx[axis]);
            grad[axis] = gradient(grid, field, &idx, axis, boundary);
        }
        out[linear] = comp.eval(&coords, time, field[linear], &grad, models);
    }
    out
}

fn gradient(
    grid: &Grid,
    field: &[f64],
    idx: &[usize; 3],
    axis: usize,
    boundary: BoundaryKind,
) -> f64 {
    gradient_impl(
        grid,
        |i: &[usize; 3]| field[grid.index(&i[..grid.dims])],
        idx,
        axis,
        boundary,
    )
}

fn gradient_impl(
    grid: &Grid,
    at: impl Fn(&[usize; 3]) -> f64,
    idx: &[usize; 3],
    axis: usize,
    boundary: BoundaryKind,
) -> f64 {
    let dx = grid.dx(axis);
    match boundary {
        BoundaryKind::Periodic => {
            let plus = grid.neighbor_periodic(idx, axis, 1);
            let minus = grid.neighbor_periodic(idx, axis, -1);
            (at(&plus) - at(&minus)) / (2.0 * dx)
        }
        BoundaryKind::ZeroFlux => {
            match (grid.neighbor(idx, axis, -1), grid.neighbor(idx, axis, 1)) {
                (Some(m), Some(p)) => (at(&p) - at(&m)) / (2.0 * dx),
                (None, Some(_)) => {
                    let p1 = grid.neighbor(idx, axis, 1).unwrap();
                    let p2 = grid.neighbor(idx, axis, 2).unwrap();
                    (-3.0 * at(idx) + 4.0 * at(&p1) - at(&p2)) / (2.0 * dx)
                }
                (Some(_), None) => {
                    let m1 = grid.neighbor(idx, axis, -1).unwrap();
                    let m2 = grid.neighbor(idx, axis, -2).unwrap();
                    (3.0 * at(idx) - 4.0 * at(&m1) + at(&m2)) / (2.0 * dx)
                }
                (None, None) => 0.0,
            }
        }
    }
}

/// Net outflow through the domain boundary from already-evaluated flux
/// fields (identically zero for periodic wrap).
fn boundary_outflow(flux_values: &[Vec<f64>], grid: &Grid, boundary: BoundaryKind) -> f64 {
    if boundary == BoundaryKind::Periodic {
        return 0.0;
    }
    let mut total = 0.0;
    for (axis, values) in flux_values.iter().enumerate() {
        let area: f64 = (0..grid.dims)
            .filter(|a| *a != axis)
            .map(|a| grid.dx(a))
            .product();
        for linear in 0..values.len() {
            let idx = grid.unindex(linear);
            if idx[axis] == grid.n[axis] - 1 {
                // extrapolate the flux from the two outermost layers to the
                // high wall face
                let inner = grid.neighbor(&idx, axis, -1).unwrap();
                let face = 1.5 * values[linear] - 0.5 * values[grid.index(&inner[..grid.dims])];
                total += face * area;
            }
            if idx[axis] == 0 {
                let inner = grid.neighbor(&idx, axis, 1).unwrap();
                let face = 1.5 * values[linear] - 0.5 * values[grid.index(&inner[..grid.dims])];
                total -= face * area;
            }
        }
    }
    total
}

struct BalanceObserver<'a> {
    comps: Vec<CompiledComponent>,
    config: &'a SimulationConfig,
    residuals: Vec<f64>,
    rates: Vec<f64>,
    local_rates: Vec<f64>,
}

impl BalanceObserver<'_> {
    fn models(&self) -> impl Fn(FuncName, i32, f64) -> f64 + '_ {
        let m = &self.config.models;
        move |name, order, u| {
            let model: Option<&FunctionModel> = match name {
                FuncName::F => Some(&m.f),
                FuncName::G => m.g.as_ref(),
                FuncName::H => m.h.as_ref(),
                FuncName::Q => m.q.as_ref(),
            };
            model.map(|mm| mm.eval(order, u)).unwrap_or(0.0)
        }
    }
}

impl StepObserver for BalanceObserver<'_> {
    fn observe(&mut self, grid: &Grid, prev: &[f64], next: &[f64], t: f64, dt: f64) {
        let (r, local) = {
            let dv = grid.cell_volume();
            let models = self.models();
            let boundary = self.config.boundary;
            let density_prev = eval_field(&self.comps[0], grid, prev, t, boundary, &models);
            let density_next = eval_field(&self.comps[0], grid, next, t + dt, boundary, &models);
            let sum_prev: f64 = density_prev.iter().sum::<f64>() * dv;
            let sum_next: f64 = density_next.iter().sum::<f64>() * dv;

            // flux fields evaluated once, shared by the boundary sum and the
            // pointwise divergence
            let fluxes: Vec<Vec<f64>> = (0..grid.dims)
                .map(|axis| eval_field(&self.comps[axis + 1], grid, prev, t, boundary, &models))
                .collect();
            let outflow = boundary_outflow(&fluxes, grid, boundary);
            let r = sum_next - sum_prev + dt * outflow;

            // pointwise conservation residual ΔC¹/Δt + div_h(fluxes)
            let mut local = 0.0f64;
            for linear in 0..prev.len() {
                let idx = grid.unindex(linear);
                let mut div = (density_next[linear] - density_prev[linear]) / dt;
                for (axis, flux) in fluxes.iter().enumerate() {
                    div += field_gradient(grid, flux, &idx, axis, boundary);
                }
                local = local.max(div.abs());
            }
            (r, local)
        };
        self.residuals.push(r);
        self.rates.push(r.abs() / dt);
        self.local_rates.push(local);
    }
}

/// Central/one-sided derivative of an already-evaluated cell field.
fn field_gradient(
    grid: &Grid,
    values: &[f64],
    idx: &[usize; 3],
    axis: usize,
    boundary: BoundaryKind,
) -> f64 {
    gradient_impl(
        grid,
        |i: &[usize; 3]| values[grid.index(&i[..grid.dims])],
        idx,
        axis,
        boundary,
    )
}

fn compile_vector(
    cv: &BalanceVector,
    config: &SimulationConfig,
) -> Result<Vec<CompiledComponent>, BalanceError> {
    let want = config.dims + 1;
    if cv.components.len() != want {
        return Err(BalanceError::ComponentCount {
            got: cv.components.len(),
            want,
        });
    }
    cv.components
        .iter()
        .map(|c| CompiledComponent::compile(c, config.dims, &config.params))
        .collect()
}

/// Run a fresh simulation, scoring the balance of each vector every step.
pub fn run_balance(
    config: &SimulationConfig,
    vectors: &[BalanceVector],
) -> Result<Vec<BalanceReport>, BalanceError> {
    run_balance_with_trajectory(config, vectors).map(|(reports, _)| reports)
}

/// Like [`run_balance`] but also returns the trajectory of the run.
pub fn run_balance_with_trajectory(
    config: &SimulationConfig,
    vectors: &[BalanceVector],
) -> Result<(Vec<BalanceReport>, Trajectory), BalanceError> {
    struct Multi<'a> {
        observers: Vec<BalanceObserver<'a>>,
    }
    impl StepObserver for Multi<'_> {
        fn observe(&mut self, grid: &Grid, prev: &[f64], next: &[f64], t: f64, dt: f64) {
            for o in &mut self.observers {
                o.observe(grid, prev, next, t, dt);
            }
        }
    }
    let mut multi = Multi {
        observers: vectors
            .iter()
            .map(|cv| {
                Ok(BalanceObserver {
                    comps: compile_vector(cv, config)?,
                    config,
                    residuals: Vec::new(),
                    rates: Vec::new(),
                    local_rates: Vec::new(),
                })
            })
            .collect::<Result<_, BalanceError>>()?,
    };
    let trajectory = solve_observed(config, &mut multi)?;
    let reports = multi
        .observers
        .into_iter()
        .zip(vectors)
        .map(|(o, cv)| finish_report(cv, o.residuals, o.rates, o.local_rates))
        .collect();
    Ok((reports, trajectory))
}

/// Score a stored trajectory (requires every step stored).
pub fn discrete_balance(
    trajectory: &Trajectory,
    cv: &BalanceVector,
    config: &SimulationConfig,
) -> Result<BalanceReport, BalanceError> {
    assert!(
        trajectory.full,
        "discrete_balance needs a fully stored trajectory (store_every = 1)"
    );
    let mut observer = BalanceObserver {
        comps: compile_vector(cv, config)?,
        config,
        residuals: Vec::new(),
        rates: Vec::new(),
        local_rates: Vec::new(),
    };
    for pair in trajectory.states.windows(2) {
        let dt = pair[1].time - pair[0].time;
        observer.observe(
            &trajectory.grid,
            &pair[0].field,
            &pair[1].field,
            pair[0].time,
            dt,
        );
    }
    Ok(finish_report(
        cv,
        observer.residuals,
        observer.rates,
        observer.local_rates,
    ))
}

fn finish_report(
    cv: &BalanceVector,
    residuals: Vec<f64>,
    rates: Vec<f64>,
    local_rates: Vec<f64>,
) -> BalanceReport {
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let max_rate = rates.iter().fold(0.0f64, |m, r| m.max(*r));
    let max_local_rate = local_rates.iter().fold(0.0f64, |m, r| m.max(*r));
    BalanceReport {
        vector: cv.name.clone(),
        steps: residuals.len(),
        residuals,
        max_abs_residual,
        max_rate,
        max_local_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use conslaw_core::{parse_with, ParseContext};

    #[test]
    fn rejects_components_with_unavailable_jets() {
        let ctx = ParseContext::default();
        let cv = BalanceVector {
            name: "needs-z".into(),
            components: vec![
                parse_with("-u", &ctx).unwrap(),
                parse_with("f(u)*u_x", &ctx).unwrap(),
                parse_with("h(u)*u_z", &ctx).unwrap(),
            ],
        };
        let cfg: SimulationConfig = serde_json::from_value(serde_json::json!({
            "dims": 2,
            "n": [8, 8],
            "extents": [[0.0, 1.0], [0.0, 1.0]],
            "t_end": 0.001,
            "boundary": "zero_flux",
            "models": {"f": {"kind": "constant", "value": 1.0},
                        "g": {"kind": "constant", "value": 1.0}},
            "initial": {"kind": "constant", "value": 1.0}
        }))
        .unwrap();
        match run_balance(&cfg, &[cv]) {
            Err(BalanceError::UnavailableAtom { atom, .. }) => assert_eq!(atom, "u_z"),
            other => panic!("expected unavailable-atom error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_second_order_components() {
        let ctx = ParseContext::default();
        let cv = BalanceVector {
            name: "second-order".into(),
            components: vec![
                parse_with("u", &ctx).unwrap(),
                parse_with("u_xx", &ctx).unwrap(),
            ],
        };
        let cfg: SimulationConfig = serde_json::from_value(serde_json::json!({
            "dims": 1,
            "n": [8],
            "extents": [[0.0, 1.0]],
            "t_end": 0.001,
            "boundary": "zero_flux",
            "models": {"f": {"kind": "constant", "value": 1.0}},
            "initial": {"kind": "constant", "value": 1.0}
        }))
        .unwrap();
        assert!(matches!(
            run_balance(&cfg, &[cv]),
            Err(BalanceError::UnavailableAtom { .. })
        ));
    }
}
