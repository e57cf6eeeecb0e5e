//! Optimal control problem layer: cost functional, adjoint (costate)
//! values, the quadratic structure of the Hamiltonian in the control,
//! indicator functions, and pointwise control synthesis.
//!
//! The Hamiltonian of the bilinear-incidence problem is quadratic in `u`,
//! `H(u) = -A u² + B u - C`. For `A > 0` the maximizer is the indicator
//! `λ = B / (2A)` clamped to the admissible interval; for `A ≤ 0` the
//! maximizer reduces to `u = 0`. The standard-incidence problem is linear
//! in `u` apart from the quadratic cost, so its indicator clamps directly.

use crate::error::{Error, Result};
use crate::grid::{ControlTrajectory, StateTrajectory, TimeGrid};
use crate::model::{
    ControlBounds, EpidemicParams, ModelKind, NormalizedState, ObjectiveWeights, INDICATOR_A_EPS,
    N_FLOOR,
};

/// Costate values of one system at one time.
///
/// The bilinear problem carries four costates (for `s`, `e`, `i`, `j`);
/// the standard-incidence problem carries a fifth one for `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdjointState {
    Model1([f64; 4]),
    Model2([f64; 5]),
}

impl AdjointState {
    /// Transversality data at `t = T`: the costate of `s` (and of `n`)
    /// vanishes, the costates of `e`, `i`, `j` equal `-alpha1`.
    pub fn terminal(kind: ModelKind, weights: &ObjectiveWeights) -> Self {
        let a = weights.alpha1;
        match kind {
            ModelKind::Model1 => AdjointState::Model1([0.0, -a, -a, -a]),
            ModelKind::Model2 => AdjointState::Model2([0.0, -a, -a, -a, 0.0]),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            AdjointState::Model1(_) => ModelKind::Model1,
            AdjointState::Model2(_) => ModelKind::Model2,
        }
    }

    /// Costate attached to the susceptible equation.
    pub fn costate_s(&self) -> f64 {
        self.as_slice()[0]
    }

    /// Costate attached to the exposed equation.
    pub fn costate_e(&self) -> f64 {
        self.as_slice()[1]
    }

    pub fn costate_i(&self) -> f64 {
        self.as_slice()[2]
    }

    pub fn costate_j(&self) -> f64 {
        self.as_slice()[3]
    }

    /// Costate attached to the population equation (standard incidence
    /// only).
    pub fn costate_n(&self) -> Option<f64> {
        match self {
            AdjointState::Model1(_) => None,
            AdjointState::Model2(v) => Some(v[4]),
        }
    }

    /// The difference driving every incidence coupling term.
    pub fn diff_se(&self) -> f64 {
        self.costate_s() - self.costate_e()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        match self {
            AdjointState::Model1(v) => v,
            AdjointState::Model2(v) => v,
        }
    }
}

/// Costate values on every node of a grid.
#[derive(Debug, Clone)]
pub struct AdjointTrajectory {
    grid: TimeGrid,
    values: Vec<AdjointState>,
}

impl AdjointTrajectory {
    pub fn new(grid: TimeGrid, values: Vec<AdjointState>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::InvalidInput(format!(
                "adjoint length {} does not match grid with {} nodes",
                values.len(),
                grid.n_nodes()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[AdjointState] {
        &self.values
    }

    pub fn at(&self, k: usize) -> &AdjointState {
        &self.values[k]
    }

    pub fn terminal(&self) -> &AdjointState {
        self.values.last().expect("non-empty by construction")
    }
}

/// Coefficients of the Hamiltonian `H(u) = -A u² + B u - C` of the
/// bilinear-incidence problem. `C` never affects the maximizer and is
/// kept for diagnostics only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Quadrature rule for the running-cost integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    #[default]
    Trapezoid,
    /// Composite Simpson; requires an even step count.
    Simpson,
}

/// A complete problem statement: which system, its parameters, the cost
/// weights, the control bounds, the initial state, and the grid.
#[derive(Debug, Clone)]
pub struct OcpProblem {
    pub kind: ModelKind,
    pub params: EpidemicParams,
    pub weights: ObjectiveWeights,
    pub bounds: ControlBounds,
    pub ic: NormalizedState,
    pub grid: TimeGrid,
    pub quadrature: Quadrature,
}

impl OcpProblem {
    pub fn new(
        kind: ModelKind,
        params: EpidemicParams,
        weights: ObjectiveWeights,
        bounds: ControlBounds,
        ic: NormalizedState,
        grid: TimeGrid,
    ) -> Result<Self> {
        params.validate()?;
        ic.validate_initial()?;
        Ok(Self {
            kind,
            params,
            weights,
            bounds,
            ic,
            grid,
            quadrature: Quadrature::Trapezoid,
        })
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Result<Self> {
        if quadrature == Quadrature::Simpson && !self.grid.n_steps().is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "Simpson quadrature needs an even step count".into(),
            ));
        }
        self.quadrature = quadrature;
        Ok(self)
    }

    /// Cost of a trajectory/control pair under this problem's weights
    /// and quadrature rule.
    pub fn objective(&self, traj: &StateTrajectory, u: &ControlTrajectory) -> f64 {
        objective_quad(traj, u, &self.weights, self.quadrature)
            .expect("quadrature validated at construction")
    }
}

fn integral(values: impl Iterator<Item = f64>, h: f64, quad: Quadrature) -> Result<f64> {
    let v: Vec<f64> = values.collect();
    match quad {
        Quadrature::Trapezoid => {
            let sum: f64 = v.iter().sum();
            Ok(h * (sum - 0.5 * v[0] - 0.5 * v[v.len() - 1]))
        }
        Quadrature::Simpson => {
            if !(v.len() - 1).is_multiple_of(2) {
                return Err(Error::InvalidInput(
                    "Simpson quadrature needs an even step count".into(),
                ));
            }
            let mut sum = v[0] + v[v.len() - 1];
            for (k, x) in v.iter().enumerate().skip(1).take(v.len() - 2) {
                sum += if k % 2 == 1 { 4.0 * x } else { 2.0 * x };
            }
            Ok(h * sum / 3.0)
        }
    }
}

/// Cost functional: terminal carrier level plus the cumulative carrier
/// level and the quadratic quarantine cost, integrated by the composite
/// trapezoid rule on the node grid.
pub fn objective(traj: &StateTrajectory, u: &ControlTrajectory, weights: &ObjectiveWeights) -> f64 {
    objective_quad(traj, u, weights, Quadrature::Trapezoid).expect("trapezoid never fails")
}

/// Cost functional under an explicit quadrature rule.
pub fn objective_quad(
    traj: &StateTrajectory,
    u: &ControlTrajectory,
    weights: &ObjectiveWeights,
    quad: Quadrature,
) -> Result<f64> {
    debug_assert_eq!(traj.grid(), u.grid());
    let h = traj.grid().step();
    let carriers = integral(traj.states().iter().map(|s| s.carriers()), h, quad)?;
    let cost = integral(u.values().iter().map(|v| v * v), h, quad)?;
    Ok(weights.alpha1 * traj.terminal().carriers()
        + weights.alpha2 * carriers
        + 0.5 * weights.alpha3 * cost)
}

/// Quadratic Hamiltonian coefficients of the bilinear-incidence problem
/// at one node.
pub fn hamiltonian_coeffs_m1(
    state: &NormalizedState,
    adjoint: &AdjointState,
    params: &EpidemicParams,
    weights: &ObjectiveWeights,
) -> HamiltonianCoeffs {
    let NormalizedState { s, e, i, j, .. } = *state;
    let d = adjoint.diff_se();
    let a = params.beta1 * s * i * d + 0.5 * weights.alpha3;
    let b = s * (2.0 * params.beta1 * i + params.beta2 * j) * d;
    let c = s * (params.beta1 * i + params.beta2 * j) * d
        + params.gamma
            * e
            * (adjoint.costate_e()
                - params.sigma1 * adjoint.costate_i()
                - params.sigma2 * adjoint.costate_j())
        + params.rho1 * i * adjoint.costate_i()
        + params.rho2 * j * adjoint.costate_j()
        + weights.alpha2 * (e + i + j);
    HamiltonianCoeffs { a, b, c }
}

/// Indicator of the bilinear-incidence problem, `λ = B / (2A)`.
/// `None` when the quadratic coefficient vanishes.
pub fn indicator_m1(coeffs: &HamiltonianCoeffs) -> Option<f64> {
    if coeffs.a.abs() < INDICATOR_A_EPS {
        None
    } else {
        Some(coeffs.b / (2.0 * coeffs.a))
    }
}

/// Pointwise maximizer of the bilinear-incidence Hamiltonian: the
/// clamped indicator for `A > 0`, zero otherwise.
pub fn synthesize_u_m1(coeffs: &HamiltonianCoeffs, bounds: &ControlBounds) -> f64 {
    if coeffs.a.abs() < INDICATOR_A_EPS || coeffs.a < 0.0 {
        return 0.0;
    }
    bounds.clamp(coeffs.b / (2.0 * coeffs.a))
}

/// Indicator of the standard-incidence problem,
/// `λ = β₁ s i (φ₁ - φ₂) / (α₃ n)`.
pub fn indicator_m2(
    state: &NormalizedState,
    adjoint: &AdjointState,
    params: &EpidemicParams,
    weights: &ObjectiveWeights,
) -> Result<f64> {
    if state.n < N_FLOOR {
        return Err(Error::SingularPopulation {
            t: f64::NAN,
            n: state.n,
        });
    }
    Ok(params.beta1 * state.s * state.i * adjoint.diff_se() / (weights.alpha3 * state.n))
}

/// Pointwise maximizer of the standard-incidence Hamiltonian.
pub fn synthesize_u_m2(lambda: f64, bounds: &ControlBounds) -> f64 {
    bounds.clamp(lambda)
}

/// Pointwise maximizer for either problem.
pub fn synthesize(
    kind: ModelKind,
    state: &NormalizedState,
    adjoint: &AdjointState,
    params: &EpidemicParams,
    weights: &ObjectiveWeights,
    bounds: &ControlBounds,
) -> Result<f64> {
    Ok(match kind {
        ModelKind::Model1 => {
            let coeffs = hamiltonian_coeffs_m1(state, adjoint, params, weights);
            synthesize_u_m1(&coeffs, bounds)
        }
        ModelKind::Model2 => {
            let lambda = indicator_m2(state, adjoint, params, weights)?;
            synthesize_u_m2(lambda, bounds)
        }
    })
}

/// Nodewise cost gradient with respect to the control, `-∂H/∂u`. The
/// trajectories must correspond to the given control.
pub fn objective_gradient(
    problem: &OcpProblem,
    u: &ControlTrajectory,
    states: &StateTrajectory,
    adjoints: &AdjointTrajectory,
) -> Vec<f64> {
    let p = &problem.params;
    let a3 = problem.weights.alpha3;
    (0..u.grid().n_nodes())
        .map(|k| {
            let x = states.at(k);
            let d = adjoints.at(k).diff_se();
            let uk = u.value(k);
            match problem.kind {
                ModelKind::Model1 => {
                    a3 * uk - x.s * (2.0 * p.beta1 * (1.0 - uk) * x.i + p.beta2 * x.j) * d
                }
                ModelKind::Model2 => a3 * uk - p.beta1 * x.s * x.i * d / x.n,
            }
        })
        .collect()
}
