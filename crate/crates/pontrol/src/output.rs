//! CSV emission. All numeric cells use 17 significant digits in
//! scientific notation with a dot decimal separator, which round-trips
//! `f64` losslessly and keeps runs byte-comparable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::grid::StateTrajectory;
use crate::ocp::HamiltonianCoeffs;
use crate::solver::SolveReport;

/// Fixed header of every per-node trajectory file.
pub const TRAJECTORY_HEADER: &str = "t,s,e,i,j,r,n,u,lambda,A,B";

/// 17 significant digits; enough to reconstruct the exact bit pattern.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Per-node rows for a plain simulation (no control, no costates).
pub fn trajectory_csv(traj: &StateTrajectory) -> String {
    let grid = traj.grid();
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (k, s) in traj.states().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},,,",
            fmt_f64(grid.node(k)),
            fmt_f64(s.s),
            fmt_f64(s.e),
            fmt_f64(s.i),
            fmt_f64(s.j),
            fmt_f64(s.r),
            fmt_f64(s.n),
            fmt_f64(0.0),
        );
    }
    out
}

/// Per-node rows for a solved problem, including the control, the
/// indicator, and (for the bilinear model) the Hamiltonian coefficients.
pub fn solution_csv(report: &SolveReport) -> String {
    let grid = report.states.grid();
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for k in 0..grid.n_nodes() {
        let s = report.states.at(k);
        let coeffs: Option<&HamiltonianCoeffs> = report.coeffs.as_ref().map(|c| &c[k]);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(grid.node(k)),
            fmt_f64(s.s),
            fmt_f64(s.e),
            fmt_f64(s.i),
            fmt_f64(s.j),
            fmt_f64(s.r),
            fmt_f64(s.n),
            fmt_f64(report.u_star.value(k)),
            opt_cell(report.indicator[k]),
            opt_cell(coeffs.map(|c| c.a)),
            opt_cell(coeffs.map(|c| c.b)),
        );
    }
    out
}

/// Human-oriented summary block appended to solve outputs.
pub fn report_summary(report: &SolveReport) -> String {
    let terminal = report.states.terminal();
    let mut out = String::new();
    let _ = writeln!(out, "converged: {}", report.converged);
    let _ = writeln!(out, "iterations: {}", report.iterations);
    let _ = writeln!(out, "objective: {}", fmt_f64(report.q_star));
    let _ = writeln!(
        out,
        "stationarity_residual: {}",
        fmt_f64(report.stationarity_residual)
    );
    let _ = writeln!(
        out,
        "terminal_infected: {}",
        fmt_f64(terminal.infected())
    );
    let _ = writeln!(out, "terminal_control: {}", fmt_f64(report.u_star.terminal()));
    for probe in &report.lemma_probes {
        let verdict = match (probe.pass, probe.vacuous) {
            (true, true) => "pass (vacuous)",
            (true, false) => "pass",
            (false, _) => "FAIL",
        };
        let _ = writeln!(out, "probe {}: {verdict}", probe.name);
    }
    out
}

/// Peak summary of an uncontrolled run: argmax of the infectious
/// fraction and its value.
pub fn peak_summary(traj: &StateTrajectory) -> String {
    let (k, value) = traj.peak_infected();
    format!(
        "peak_day: {}\npeak_infected: {}\n",
        fmt_f64(traj.grid().node(k)),
        fmt_f64(value)
    )
}

/// One sweep cell result; `error` is set when the cell failed.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub horizon: f64,
    pub r0: f64,
    pub model: u8,
    pub controlled: bool,
    pub terminal_infected: Option<f64>,
    pub objective: Option<f64>,
    pub converged: Option<bool>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str =
    "horizon,r0,model,controlled,terminal_infected,objective,converged,iterations,error";

/// Deterministic summary: rows sorted by (horizon, r0, model, controlled).
pub fn sweep_csv(rows: &mut [SweepRow]) -> String {
    rows.sort_by(|a, b| {
        a.horizon
            .total_cmp(&b.horizon)
            .then(a.r0.total_cmp(&b.r0))
            .then(a.model.cmp(&b.model))
            .then(a.controlled.cmp(&b.controlled))
    });
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(row.horizon),
            fmt_f64(row.r0),
            row.model,
            row.controlled,
            opt_cell(row.terminal_infected),
            opt_cell(row.objective),
            row.converged.map(|c| c.to_string()).unwrap_or_default(),
            row.iterations.map(|i| i.to_string()).unwrap_or_default(),
            row.error.clone().unwrap_or_default(),
        );
    }
    out
}

pub fn write_text(dir: &Path, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), content)?;
    Ok(())
}
