//! Compartmental model core: domain types, right-hand sides of the
//! controlled and uncontrolled systems, normalization from raw counts,
//! and reproduction-number formulas.
//!
//! The population is split into susceptible `s`, exposed `e`,
//! asymptomatically infectious `i`, symptomatically infectious `j`, and
//! removed `r` fractions, with `n = s + e + i + j + r` the current
//! population fraction (it decays through disease-induced mortality).
//! Two incidence laws are covered: bilinear (`Model1`, force of infection
//! `β₁·i + β₂·j` scaled by `s`) and standard (`Model2`, the same force
//! divided by `n`). Quarantine intensity `u` removes a fraction of
//! contacts; it enters the bilinear incidence quadratically through the
//! susceptible and asymptomatic sides and the standard incidence linearly.

use crate::error::{Error, Result};

/// Tolerance for the `sigma1 + sigma2 = 1` branch-fraction identity.
pub const SIGMA_SUM_TOL: f64 = 1e-12;

/// `|A|` below this is treated as a vanishing quadratic coefficient.
pub const INDICATOR_A_EPS: f64 = 1e-14;

/// Division guard for the population fraction in standard incidence.
pub const N_FLOOR: f64 = 1e-12;

/// Which incidence law the system uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Bilinear incidence; quarantine enters as `(1-u)²` on the
    /// asymptomatic term and `(1-u)` on the symptomatic term.
    Model1,
    /// Standard incidence (force divided by `n`); quarantine enters as
    /// `(1-u)` on the asymptomatic term only.
    Model2,
}

impl ModelKind {
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(ModelKind::Model1),
            2 => Ok(ModelKind::Model2),
            other => Err(Error::InvalidInput(format!(
                "model must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            ModelKind::Model1 => 1,
            ModelKind::Model2 => 2,
        }
    }
}

/// Epidemiological rate constants, normalized so that `beta1`/`beta2`
/// are per-day rates in the fraction-valued system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicParams {
    /// Transmission rate from asymptomatic carriers (1/day).
    pub beta1: f64,
    /// Transmission rate from symptomatic carriers (1/day).
    pub beta2: f64,
    /// Latency exit rate (1/day).
    pub gamma: f64,
    /// Fraction of the exposed moving to the asymptomatic branch.
    pub sigma1: f64,
    /// Fraction of the exposed moving to the symptomatic branch.
    pub sigma2: f64,
    /// Removal rate of the asymptomatic group (1/day).
    pub rho1: f64,
    /// Removal rate of the symptomatic group (1/day).
    pub rho2: f64,
    /// Death probability within the symptomatic removals.
    pub q: f64,
}

impl EpidemicParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        beta1: f64,
        beta2: f64,
        gamma: f64,
        sigma1: f64,
        sigma2: f64,
        rho1: f64,
        rho2: f64,
        q: f64,
    ) -> Result<Self> {
        let params = Self {
            beta1,
            beta2,
            gamma,
            sigma1,
            sigma2,
            rho1,
            rho2,
            q,
        };
        params.validate()?;
        Ok(params)
    }

    /// Baseline COVID-19 rates: 14-day and 21-day removal, 0.18/day
    /// latency exit, 80/20 branch split, 15% case fatality.
    pub fn covid(beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(beta1, beta2, 0.18, 0.8, 0.2, 1.0 / 14.0, 1.0 / 21.0, 0.15)
    }

    /// Baseline rates with transmission chosen to realize the given
    /// basic reproduction number under `beta2 = beta_ratio * beta1`.
    pub fn covid_with_r0(r0: f64, beta_ratio: f64) -> Result<Self> {
        let mut params = Self::covid(1.0, 0.1)?;
        let (b1, b2) = beta_from_r0(r0, &params, beta_ratio)?;
        params.beta1 = b1;
        params.beta2 = b2;
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.beta1,
            self.beta2,
            self.gamma,
            self.sigma1,
            self.sigma2,
            self.rho1,
            self.rho2,
            self.q,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "all epidemic parameters must be finite and non-negative".into(),
            ));
        }
        if (self.sigma1 + self.sigma2 - 1.0).abs() > SIGMA_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "branch fractions must sum to 1, got {}",
                self.sigma1 + self.sigma2
            )));
        }
        if self.q > 1.0 {
            return Err(Error::InvalidInput(format!(
                "death probability must lie in [0,1], got {}",
                self.q
            )));
        }
        if self.beta1 <= self.beta2 {
            return Err(Error::InvalidInput(format!(
                "asymptomatic transmission must dominate: beta1 = {} <= beta2 = {}",
                self.beta1, self.beta2
            )));
        }
        Ok(())
    }
}

/// Head counts before normalization, with raw per-person transmission
/// rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPopulation {
    pub susceptible: f64,
    pub exposed: f64,
    pub infected_asymptomatic: f64,
    pub infected_symptomatic: f64,
    pub recovered: f64,
    pub total: f64,
    /// Raw asymptomatic transmission rate (1/(person·day)).
    pub beta1_tilde: f64,
    /// Raw symptomatic transmission rate (1/(person·day)).
    pub beta2_tilde: f64,
}

impl RawPopulation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        susceptible: f64,
        exposed: f64,
        infected_asymptomatic: f64,
        infected_symptomatic: f64,
        recovered: f64,
        total: f64,
        beta1_tilde: f64,
        beta2_tilde: f64,
    ) -> Result<Self> {
        let raw = Self {
            susceptible,
            exposed,
            infected_asymptomatic,
            infected_symptomatic,
            recovered,
            total,
            beta1_tilde,
            beta2_tilde,
        };
        raw.validate()?;
        Ok(raw)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total > 0.0) || !(self.susceptible > 0.0) {
            return Err(Error::InvalidInput(
                "susceptible and total counts must be positive".into(),
            ));
        }
        let nonneg = [
            self.exposed,
            self.infected_asymptomatic,
            self.infected_symptomatic,
            self.recovered,
            self.beta1_tilde,
            self.beta2_tilde,
        ];
        if nonneg.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "compartment counts and raw rates must be finite and non-negative".into(),
            ));
        }
        let sum = self.susceptible
            + self.exposed
            + self.infected_asymptomatic
            + self.infected_symptomatic
            + self.recovered;
        if (sum - self.total).abs() > 1e-6 * self.total {
            return Err(Error::InvalidInput(format!(
                "compartments sum to {sum}, expected total {}",
                self.total
            )));
        }
        Ok(())
    }
}

/// Fraction-valued state of either system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedState {
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub j: f64,
    pub r: f64,
    pub n: f64,
}

impl NormalizedState {
    pub fn new(s: f64, e: f64, i: f64, j: f64, r: f64, n: f64) -> Result<Self> {
        let state = Self { s, e, i, j, r, n };
        if state.to_array().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("state components must be finite".into()));
        }
        if state.conservation_residual() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "components must sum to n: residual {:e}",
                state.conservation_residual()
            )));
        }
        Ok(state)
    }

    /// Initial condition check: fractions of the starting population,
    /// so the components sum to one and `n = 1`.
    pub fn validate_initial(&self) -> Result<()> {
        if (self.n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "initial population fraction must be 1, got {}",
                self.n
            )));
        }
        let sum = self.s + self.e + self.i + self.j + self.r;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "initial fractions must sum to 1, got {sum}"
            )));
        }
        if self.to_array().iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidInput(
                "initial fractions must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// `|s + e + i + j + r - n|`.
    pub fn conservation_residual(&self) -> f64 {
        (self.s + self.e + self.i + self.j + self.r - self.n).abs()
    }

    /// Currently infectious fraction `i + j`.
    pub fn infected(&self) -> f64 {
        self.i + self.j
    }

    /// Virus-carrying fraction `e + i + j`.
    pub fn carriers(&self) -> f64 {
        self.e + self.i + self.j
    }

    pub(crate) fn to_array(self) -> [f64; 6] {
        [self.s, self.e, self.i, self.j, self.r, self.n]
    }

    pub(crate) fn from_array(a: [f64; 6]) -> Self {
        Self {
            s: a[0],
            e: a[1],
            i: a[2],
            j: a[3],
            r: a[4],
            n: a[5],
        }
    }
}

/// Admissible control interval `[0, u_max]` with `u_max < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBounds {
    pub u_max: f64,
}

impl ControlBounds {
    pub fn new(u_max: f64) -> Result<Self> {
        if !(u_max > 0.0 && u_max < 1.0) {
            return Err(Error::InvalidInput(format!(
                "u_max must lie in (0,1), got {u_max}"
            )));
        }
        Ok(Self { u_max })
    }

    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(0.0, self.u_max)
    }

    pub fn contains(&self, u: f64) -> bool {
        (0.0..=self.u_max).contains(&u)
    }
}

/// Weights of the cost functional: terminal infection level, cumulative
/// infection level, and quadratic quarantine cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

impl ObjectiveWeights {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64) -> Result<Self> {
        if !(alpha1 >= 0.0 && alpha1.is_finite()) || !(alpha2 >= 0.0 && alpha2.is_finite()) {
            return Err(Error::InvalidInput(
                "alpha1 and alpha2 must be finite and non-negative".into(),
            ));
        }
        if !(alpha3 > 0.0 && alpha3.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "alpha3 must be positive, got {alpha3}"
            )));
        }
        Ok(Self {
            alpha1,
            alpha2,
            alpha3,
        })
    }
}

/// Scale raw counts by the initial population and bring the raw
/// transmission rates to the fraction-valued system. Returns the initial
/// normalized state together with `(beta1, beta2)`.
pub fn normalize(raw: &RawPopulation) -> Result<(NormalizedState, (f64, f64))> {
    if !(raw.total > 0.0) {
        return Err(Error::InvalidInput(format!(
            "initial population must be positive, got {}",
            raw.total
        )));
    }
    let n0 = raw.total;
    let state = NormalizedState {
        s: raw.susceptible / n0,
        e: raw.exposed / n0,
        i: raw.infected_asymptomatic / n0,
        j: raw.infected_symptomatic / n0,
        r: raw.recovered / n0,
        n: 1.0,
    };
    Ok((state, (raw.beta1_tilde * n0, raw.beta2_tilde * n0)))
}

/// Right-hand side of the controlled system at one point. Returns the
/// derivative `(s', e', i', j', r', n')`.
pub fn rhs_controlled(
    kind: ModelKind,
    state: &NormalizedState,
    u: f64,
    params: &EpidemicParams,
) -> Result<[f64; 6]> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidControl(format!(
            "control must lie in [0,1), got {u}"
        )));
    }
    let NormalizedState { s, e, i, j, n, .. } = *state;
    let w = 1.0 - u;
    let force = match kind {
        ModelKind::Model1 => s * (params.beta1 * w * w * i + params.beta2 * w * j),
        ModelKind::Model2 => {
            if n < N_FLOOR {
                return Err(Error::SingularPopulation { t: f64::NAN, n });
            }
            (s / n) * (params.beta1 * w * i + params.beta2 * j)
        }
    };
    Ok([
        -force,
        force - params.gamma * e,
        params.sigma1 * params.gamma * e - params.rho1 * i,
        params.sigma2 * params.gamma * e - params.rho2 * j,
        params.rho1 * i + (1.0 - params.q) * params.rho2 * j,
        -params.q * params.rho2 * j,
    ])
}

/// Right-hand side of the uncontrolled system; identical to the
/// controlled system at `u = 0`.
pub fn rhs_uncontrolled(
    kind: ModelKind,
    state: &NormalizedState,
    params: &EpidemicParams,
) -> Result<[f64; 6]> {
    rhs_controlled(kind, state, 0.0, params)
}

/// Basic reproduction number `β₁σ₁/ρ₁ + β₂σ₂/ρ₂`; identical for both
/// incidence laws.
pub fn r0_basic(params: &EpidemicParams) -> Result<f64> {
    if params.rho1 <= 0.0 || params.rho2 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "removal rates must be positive, got rho1 = {}, rho2 = {}",
            params.rho1, params.rho2
        )));
    }
    Ok(params.beta1 * params.sigma1 / params.rho1 + params.beta2 * params.sigma2 / params.rho2)
}

/// Reproduction number of the controlled system under a constant control.
pub fn r0_controlled(kind: ModelKind, params: &EpidemicParams, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidControl(format!(
            "constant control must lie in [0,1), got {u}"
        )));
    }
    if params.rho1 <= 0.0 || params.rho2 <= 0.0 {
        return Err(Error::InvalidInput(
            "removal rates must be positive".into(),
        ));
    }
    let w = 1.0 - u;
    let term1 = params.beta1 * params.sigma1 / params.rho1;
    let term2 = params.beta2 * params.sigma2 / params.rho2;
    Ok(match kind {
        ModelKind::Model1 => w * w * term1 + w * term2,
        ModelKind::Model2 => w * term1 + term2,
    })
}

/// Invert the basic reproduction number for the transmission rates under
/// a fixed `beta2/beta1` ratio.
pub fn beta_from_r0(r0: f64, params: &EpidemicParams, beta_ratio: f64) -> Result<(f64, f64)> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "reproduction number must be positive, got {r0}"
        )));
    }
    if params.rho1 <= 0.0 || params.rho2 <= 0.0 {
        return Err(Error::InvalidInput(
            "removal rates must be positive".into(),
        ));
    }
    let denom = params.sigma1 / params.rho1 + beta_ratio * params.sigma2 / params.rho2;
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "degenerate inversion denominator {denom}"
        )));
    }
    let beta1 = r0 / denom;
    Ok((beta1, beta_ratio * beta1))
}
