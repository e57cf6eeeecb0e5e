//! The verification probe suite run as a library: trajectory
//! admissibility, the indicator-sign implication along a converged
//! optimum, convexity of the reduced velocity set, finite-difference
//! agreement of the adjoint gradient, and the observed integrator order.

use pontrol::grid::{ControlTrajectory, TimeGrid};
use pontrol::integrate::{integrate_uncontrolled, step_refinement_check};
use pontrol::model::{ControlBounds, EpidemicParams, ModelKind, NormalizedState, ObjectiveWeights};
use pontrol::ocp::OcpProblem;
use pontrol::probe::{probe_convexity, probe_gradient, probe_lemma1, probe_lemma3, ProbeReport};
use pontrol::solver::{solve_fbsm, stationarity_probe, SweepSettings};

fn show(report: &ProbeReport) {
    let verdict = match (report.pass(), report.vacuous) {
        (true, true) => "pass (vacuous)",
        (true, false) => "pass",
        (false, _) => "FAIL",
    };
    println!(
        "{:<44} trials {:>6}  violations {:>3}  worst {:>10.2e}  {verdict}",
        report.name, report.trials, report.violations, report.worst_residual
    );
}

fn main() -> pontrol::Result<()> {
    let ic = NormalizedState {
        s: 0.99985,
        e: 5.0e-5,
        i: 8.0e-5,
        j: 2.0e-5,
        r: 0.0,
        n: 1.0,
    };
    let weights = ObjectiveWeights::new(1.0, 1.0, 5.0e-5)?;
    let bounds = ControlBounds::new(0.9)?;

    // admissibility of free-running trajectories
    for kind in [ModelKind::Model1, ModelKind::Model2] {
        let params = EpidemicParams::covid_with_r0(6.0, 0.1)?;
        let grid = TimeGrid::new(120.0, 5000)?;
        let traj = integrate_uncontrolled(kind, &params, &ic, grid)?;
        show(&probe_lemma1(&traj));
    }

    // indicator sign structure and stationarity along a converged optimum
    let problem = OcpProblem::new(
        ModelKind::Model1,
        EpidemicParams::covid_with_r0(3.0, 0.1)?,
        weights,
        bounds,
        ic,
        TimeGrid::new(30.0, 5000)?,
    )?;
    let report = solve_fbsm(&problem, &SweepSettings::default())?;
    show(&probe_lemma3(&problem, &report));
    show(&stationarity_probe(&problem, &report, 1e-6));

    // convexity of the reduced velocity set
    show(&probe_convexity(10_000, 42));

    // adjoint gradient against finite differences
    for kind in [ModelKind::Model1, ModelKind::Model2] {
        let p = OcpProblem::new(
            kind,
            EpidemicParams::covid_with_r0(3.0, 0.1)?,
            weights,
            bounds,
            ic,
            TimeGrid::new(15.0, 1500)?,
        )?;
        let u = ControlTrajectory::constant(p.grid, 0.4, &bounds).unwrap();
        show(&probe_gradient(&p, &u, 20, 42)?);
    }

    // observed integrator order on the fast-dynamics benchmark
    let params = EpidemicParams::covid_with_r0(6.0, 0.1)?;
    let grid = TimeGrid::new(60.0, 250)?;
    let refinement =
        step_refinement_check(ModelKind::Model1, &params, &ic, &ControlTrajectory::zero(grid))?;
    println!(
        "{:<44} coarse {:>9.2e}  fine {:>9.2e}  observed order {:.2}",
        "integrator-richardson-order", refinement.coarse_error, refinement.fine_error,
        refinement.observed_order
    );
    Ok(())
}
