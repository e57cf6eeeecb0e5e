//! Uniform time grid and the trajectory containers shared by the
//! forward and backward integrators.

use crate::error::{Error, Result};
use crate::model::{ControlBounds, NormalizedState};

/// Uniform grid `t_0 = 0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "horizon must be positive and finite, got {t_end}"
            )));
        }
        if n_steps < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 steps, got {n_steps}"
            )));
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    /// Node spacing `h = T / n_steps`.
    pub fn step(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// Node time; the last node lands on `t_end` exactly.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n_steps);
        self.t_end * (k as f64 / self.n_steps as f64)
    }

    /// Same horizon with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidInput("refinement factor must be positive".into()));
        }
        Self::new(self.t_end, self.n_steps * factor)
    }
}

/// State values on every node of a grid.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    grid: TimeGrid,
    states: Vec<NormalizedState>,
}

impl StateTrajectory {
    pub fn new(grid: TimeGrid, states: Vec<NormalizedState>) -> Result<Self> {
        if states.len() != grid.n_nodes() {
            return Err(Error::InvalidInput(format!(
                "trajectory length {} does not match grid with {} nodes",
                states.len(),
                grid.n_nodes()
            )));
        }
        Ok(Self { grid, states })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn states(&self) -> &[NormalizedState] {
        &self.states
    }

    pub fn at(&self, k: usize) -> &NormalizedState {
        &self.states[k]
    }

    pub fn terminal(&self) -> &NormalizedState {
        self.states.last().expect("non-empty by construction")
    }

    /// Midpoint of the interval `[t_k, t_{k+1}]` by linear interpolation.
    pub(crate) fn midpoint(&self, k: usize) -> NormalizedState {
        let a = self.states[k].to_array();
        let b = self.states[k + 1].to_array();
        let mut m = [0.0; 6];
        for (out, (x, y)) in m.iter_mut().zip(a.iter().zip(b.iter())) {
            *out = 0.5 * (x + y);
        }
        NormalizedState::from_array(m)
    }

    /// Worst conservation residual `|s+e+i+j+r-n|` over all nodes.
    pub fn max_conservation_residual(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.conservation_residual())
            .fold(0.0, f64::max)
    }

    /// Node index and value of the largest infectious fraction `i + j`.
    pub fn peak_infected(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (k, s) in self.states.iter().enumerate() {
            let v = s.infected();
            if v > best.1 {
                best = (k, v);
            }
        }
        best
    }
}

/// Piecewise-linear control described by its node values.
#[derive(Debug, Clone)]
pub struct ControlTrajectory {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl ControlTrajectory {
    /// Node values validated against the admissible interval.
    pub fn new(grid: TimeGrid, values: Vec<f64>, bounds: &ControlBounds) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::InvalidInput(format!(
                "control length {} does not match grid with {} nodes",
                values.len(),
                grid.n_nodes()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !bounds.contains(**v)) {
            return Err(Error::InvalidControl(format!(
                "control value {bad} outside [0, {}]",
                bounds.u_max
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TimeGrid, u: f64, bounds: &ControlBounds) -> Result<Self> {
        Self::new(grid, vec![u; grid.n_nodes()], bounds)
    }

    /// The identically zero control.
    pub fn zero(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_nodes()],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("non-empty by construction")
    }

    pub(crate) fn midpoint(&self, k: usize) -> f64 {
        0.5 * (self.values[k] + self.values[k + 1])
    }

    /// Linear interpolation onto a grid refined by an integer factor.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        let fine = self.grid.refined(factor)?;
        let mut values = Vec::with_capacity(fine.n_nodes());
        for k in 0..fine.n_nodes() {
            let coarse_pos = k as f64 / factor as f64;
            let base = (coarse_pos.floor() as usize).min(self.grid.n_steps() - 1);
            let frac = coarse_pos - base as f64;
            values.push(self.values[base] * (1.0 - frac) + self.values[base + 1] * frac);
        }
        Ok(Self { grid: fine, values })
    }

    /// Sup-norm distance to another control on the same grid.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest jump between adjacent node values.
    pub fn max_jump(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}
