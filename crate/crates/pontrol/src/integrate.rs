//! Fixed-step classical Runge-Kutta integration: state systems forward
//! in time, adjoint systems backward from their terminal data, both on a
//! shared uniform grid. Controls (and, on the backward pass, states) are
//! linearly interpolated at the half-step stage points.

use crate::error::{Error, Result};
use crate::grid::{ControlTrajectory, StateTrajectory, TimeGrid};
use crate::model::{rhs_controlled, EpidemicParams, ModelKind, NormalizedState, ObjectiveWeights};
use crate::ocp::{AdjointState, AdjointTrajectory};

/// Tolerated positivity slack: analytic solutions stay positive, round-off
/// may dip this far below zero before the run is declared broken.
pub const POSITIVITY_TOL: f64 = -1e-9;

/// Forward RK4 solution of the controlled system on the control's grid.
pub fn integrate_forward(
    kind: ModelKind,
    params: &EpidemicParams,
    ic: &NormalizedState,
    u: &ControlTrajectory,
) -> Result<StateTrajectory> {
    let grid = *u.grid();
    let h = grid.step();
    let mut states = Vec::with_capacity(grid.n_nodes());
    states.push(*ic);
    let mut x = ic.to_array();
    for k in 0..grid.n_steps() {
        let u0 = u.value(k);
        let um = u.midpoint(k);
        let u1 = u.value(k + 1);
        let k1 = rhs_at(kind, &x, u0, params, grid.node(k))?;
        let k2 = rhs_at(kind, &step(&x, &k1, 0.5 * h), um, params, grid.node(k))?;
        let k3 = rhs_at(kind, &step(&x, &k2, 0.5 * h), um, params, grid.node(k))?;
        let k4 = rhs_at(kind, &step(&x, &k3, h), u1, params, grid.node(k))?;
        for c in 0..6 {
            x[c] += (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        let node = NormalizedState::from_array(x);
        check_admissible(&node, grid.node(k + 1))?;
        states.push(node);
    }
    StateTrajectory::new(grid, states)
}

/// Forward solution without quarantine.
pub fn integrate_uncontrolled(
    kind: ModelKind,
    params: &EpidemicParams,
    ic: &NormalizedState,
    grid: TimeGrid,
) -> Result<StateTrajectory> {
    integrate_forward(kind, params, ic, &ControlTrajectory::zero(grid))
}

fn rhs_at(
    kind: ModelKind,
    x: &[f64; 6],
    u: f64,
    params: &EpidemicParams,
    t: f64,
) -> Result<[f64; 6]> {
    rhs_controlled(kind, &NormalizedState::from_array(*x), u, params).map_err(|e| match e {
        Error::SingularPopulation { n, .. } => Error::SingularPopulation { t, n },
        other => other,
    })
}

fn step(x: &[f64; 6], d: &[f64; 6], h: f64) -> [f64; 6] {
    let mut out = *x;
    for c in 0..6 {
        out[c] += h * d[c];
    }
    out
}

fn check_admissible(state: &NormalizedState, t: f64) -> Result<()> {
    let a = state.to_array();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationFailure(format!(
            "non-finite state at t = {t}"
        )));
    }
    if let Some(v) = a.iter().find(|v| **v < POSITIVITY_TOL) {
        return Err(Error::IntegrationFailure(format!(
            "compartment dropped to {v:e} at t = {t}"
        )));
    }
    Ok(())
}

/// Costate derivative of either adjoint system at a given state/control
/// point. Slot 4 is unused for the four-costate system.
fn adjoint_rhs(
    kind: ModelKind,
    p: &[f64; 5],
    x: &NormalizedState,
    u: f64,
    params: &EpidemicParams,
    weights: &ObjectiveWeights,
) -> [f64; 5] {
    let w = 1.0 - u;
    let d = p[0] - p[1];
    let a2 = weights.alpha2;
    let coupling_e = params.gamma * (p[1] - params.sigma1 * p[2] - params.sigma2 * p[3]) + a2;
    match kind {
        ModelKind::Model1 => [
            (params.beta1 * w * w * x.i + params.beta2 * w * x.j) * d,
            coupling_e,
            params.beta1 * w * w * x.s * d + params.rho1 * p[2] + a2,
            params.beta2 * w * x.s * d + params.rho2 * p[3] + a2,
            0.0,
        ],
        ModelKind::Model2 => {
            let force = params.beta1 * w * x.i + params.beta2 * x.j;
            [
                force * d / x.n,
                coupling_e,
                params.beta1 * w * x.s * d / x.n + params.rho1 * p[2] + a2,
                params.beta2 * x.s * d / x.n + params.rho2 * (p[3] + params.q * p[4]) + a2,
                -x.s * force * d / (x.n * x.n),
            ]
        }
    }
}

/// Backward RK4 solution of the adjoint system from `t = T` down to 0,
/// along a stored state trajectory and control.
pub fn integrate_adjoint_backward(
    kind: ModelKind,
    params: &EpidemicParams,
    weights: &ObjectiveWeights,
    states: &StateTrajectory,
    u: &ControlTrajectory,
    terminal: &AdjointState,
) -> Result<AdjointTrajectory> {
    if states.grid() != u.grid() {
        return Err(Error::InvalidInput(
            "state and control trajectories must share the grid".into(),
        ));
    }
    if terminal.kind() != kind {
        return Err(Error::InvalidInput(
            "terminal costate does not match the model kind".into(),
        ));
    }
    let grid = *states.grid();
    let h = grid.step();
    let mut values = vec![*terminal; grid.n_nodes()];
    let mut p = pad(terminal);
    for k in (1..=grid.n_steps()).rev() {
        let x1 = *states.at(k);
        let x0 = *states.at(k - 1);
        let xm = states.midpoint(k - 1);
        let u1 = u.value(k);
        let u0 = u.value(k - 1);
        let um = u.midpoint(k - 1);
        let k1 = adjoint_rhs(kind, &p, &x1, u1, params, weights);
        let k2 = adjoint_rhs(kind, &back(&p, &k1, 0.5 * h), &xm, um, params, weights);
        let k3 = adjoint_rhs(kind, &back(&p, &k2, 0.5 * h), &xm, um, params, weights);
        let k4 = adjoint_rhs(kind, &back(&p, &k3, h), &x0, u0, params, weights);
        for c in 0..5 {
            p[c] -= (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationFailure(format!(
                "non-finite costate at t = {}",
                grid.node(k - 1)
            )));
        }
        values[k - 1] = unpad(kind, &p);
    }
    AdjointTrajectory::new(grid, values)
}

fn pad(adjoint: &AdjointState) -> [f64; 5] {
    let mut p = [0.0; 5];
    p[..adjoint.as_slice().len()].copy_from_slice(adjoint.as_slice());
    p
}

fn unpad(kind: ModelKind, p: &[f64; 5]) -> AdjointState {
    match kind {
        ModelKind::Model1 => AdjointState::Model1([p[0], p[1], p[2], p[3]]),
        ModelKind::Model2 => AdjointState::Model2(*p),
    }
}

fn back(p: &[f64; 5], d: &[f64; 5], h: f64) -> [f64; 5] {
    let mut out = *p;
    for c in 0..5 {
        out[c] -= h * d[c];
    }
    out
}

/// Richardson refinement probe: terminal-state differences at step
/// counts `n`, `2n`, `4n` give the observed convergence order.
#[derive(Debug, Clone, Copy)]
pub struct RefinementReport {
    /// `‖x_n(T) - x_2n(T)‖∞` over the six components.
    pub coarse_error: f64,
    /// `‖x_2n(T) - x_4n(T)‖∞`.
    pub fine_error: f64,
    /// `log2(coarse/fine)`; infinite when both runs already agree.
    pub observed_order: f64,
}

/// Estimate the integrator's convergence order on one problem by
/// comparing terminal states across three grid refinements.
pub fn step_refinement_check(
    kind: ModelKind,
    params: &EpidemicParams,
    ic: &NormalizedState,
    u: &ControlTrajectory,
) -> Result<RefinementReport> {
    let run = |ctrl: &ControlTrajectory| -> Result<[f64; 6]> {
        Ok(integrate_forward(kind, params, ic, ctrl)?.terminal().to_array())
    };
    let x1 = run(u)?;
    let u2 = u.refine(2)?;
    let x2 = run(&u2)?;
    let u4 = u.refine(4)?;
    let x4 = run(&u4)?;
    let coarse_error = max_abs_diff(&x1, &x2);
    let fine_error = max_abs_diff(&x2, &x4);
    let observed_order = if fine_error == 0.0 {
        f64::INFINITY
    } else {
        (coarse_error / fine_error).log2()
    };
    Ok(RefinementReport {
        coarse_error,
        fine_error,
        observed_order,
    })
}

fn max_abs_diff(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
