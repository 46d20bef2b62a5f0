//! Cross-validation between the scaling-law pipeline and the wavefunction
//! oracle: convergence order, basis-size independence, the moment scaling
//! laws, the negative control, and direct evidence that free expansion
//! conserves both the mean energy and the energy variance.

mod common;

use common::{assert_rel, sup_rel_dev};
use scaledyn::ermakov::{integrate_ermakov, uniform_grid};
use scaledyn::observables::energy_observables;
use scaledyn::oracle::{compare, propagate, CompareTolerances, InitialState, OracleRun};
use scaledyn::protocol;
use scaledyn::state;
use scaledyn::Units;

const W0: f64 = 1.0;

type OracleGet = dyn Fn(&scaledyn::oracle::OracleSample) -> f64;
type PredictedGet = dyn Fn(&scaledyn::observables::ObservableSample) -> f64;

fn worst_observable_deviation(run: &OracleRun, pred: &scaledyn::EnergyObservables) -> f64 {
    let series: [(&OracleGet, &PredictedGet); 6] = [
        (&|s| s.mean_h, &|p| p.mean_e),
        (&|s| s.mean_h2, &|p| p.mean_e2),
        (&|s| s.mean_q, &|p| p.mean_q),
        (&|s| s.mean_q2, &|p| p.mean_q2),
        (&|s| s.mean_c, &|p| p.mean_c),
        (&|s| s.mean_c2, &|p| p.mean_c2),
    ];
    series
        .iter()
        .map(|(fo, fp)| {
            let o: Vec<f64> = run.samples.iter().map(*fo).collect();
            let p: Vec<f64> = pred.samples.iter().map(*fp).collect();
            sup_rel_dev(&o, &p)
        })
        .fold(0.0f64, f64::max)
}

#[test]
fn halving_the_step_quarters_the_oracle_deviation() {
    let units = Units::natural();
    let lcd = protocol::design_lcd(W0, 0.5, 2.0).unwrap();
    let grid = uniform_grid(2.0, 41);
    let traj = integrate_ermakov(&lcd, 2.0, 1e-12, &grid).unwrap();
    let pred = energy_observables(&traj, &state::qho_eigenstate(0, W0).unwrap());

    let dev = |dt: f64| {
        let run = propagate(&lcd, InitialState::Eigenstate(0), &grid, 128, dt, units).unwrap();
        worst_observable_deviation(&run, &pred)
    };
    let coarse = dev(2e-3);
    let fine = dev(1e-3);
    let ratio = coarse / fine;
    // the stepper is second order: halving dt divides the deviation from the
    // (independent) closed-form predictions by ~4
    assert!(
        (3.0..=5.0).contains(&ratio),
        "expected ~4x reduction, got {coarse:.3e} / {fine:.3e} = {ratio:.2}"
    );
}

#[test]
fn doubling_the_basis_leaves_converged_expectations_unchanged() {
    let units = Units::natural();
    let ramp = protocol::make_linear_ramp(W0, 0.1, 2.0).unwrap();
    let grid = uniform_grid(2.0, 41);
    let run = |dim: usize| {
        propagate(&ramp, InitialState::Eigenstate(0), &grid, dim, 1e-3, units).unwrap()
    };
    let small = run(128);
    let large = run(256);
    assert!(small.max_tail < 1e-8 && large.max_tail < 1e-8);

    let pairs: [&dyn Fn(&scaledyn::oracle::OracleSample) -> f64; 6] = [
        &|s| s.mean_h,
        &|s| s.mean_h2,
        &|s| s.mean_q,
        &|s| s.mean_q2,
        &|s| s.mean_c,
        &|s| s.mean_c2,
    ];
    for f in pairs {
        let a: Vec<f64> = small.samples.iter().map(f).collect();
        let b: Vec<f64> = large.samples.iter().map(f).collect();
        let dev = sup_rel_dev(&a, &b);
        assert!(
            dev < 1e-9,
            "basis-size dependence {dev:.3e} (should be converged)"
        );
    }
}

#[test]
fn oracle_moments_follow_the_scaling_laws() {
    let units = Units::natural();
    let ramp = protocol::make_linear_ramp(W0, 0.1, 2.0).unwrap();
    let grid = uniform_grid(2.0, 41);
    let traj = integrate_ermakov(&ramp, 2.0, 1e-12, &grid).unwrap();
    let run = propagate(&ramp, InitialState::Eigenstate(0), &grid, 256, 5e-4, units).unwrap();

    let q0 = run.samples[0].mean_q;
    let q20 = run.samples[0].mean_q2;
    let c = 0.5; // ground state's homogeneous exponent: E(0)/ħω₀
    for (ts, os) in traj.samples.iter().zip(&run.samples) {
        let b2 = ts.b * ts.b;
        // the cloud-size moments scale with powers of b alone
        assert_rel(os.mean_q / q0, b2, 1e-6);
        assert_rel(os.mean_q2 / q20, b2 * b2, 1e-6);
    }
    // the squeezing moment follows ḃb times the initial energy
    let pred_c: Vec<f64> = traj
        .samples
        .iter()
        .map(|ts| units.hbar * ts.bdot * ts.b * c / W0)
        .collect();
    let orac_c: Vec<f64> = run.samples.iter().map(|s| s.mean_c).collect();
    assert!(sup_rel_dev(&orac_c, &pred_c) < 1e-6);
}

#[test]
fn corrupted_scaling_factor_fails_the_comparison() {
    let units = Units::natural();
    let ramp = protocol::make_linear_ramp(W0, 0.1, 2.0).unwrap();
    let grid = uniform_grid(2.0, 41);
    let traj = integrate_ermakov(&ramp, 2.0, 1e-12, &grid).unwrap();
    let corrupted = traj.with_scaled_b(1.01);
    let pred = energy_observables(&corrupted, &state::qho_eigenstate(0, W0).unwrap());
    let run = propagate(&ramp, InitialState::Eigenstate(0), &grid, 256, 1e-3, units).unwrap();
    let report = compare(&run, &pred, &ramp, CompareTolerances::default()).unwrap();

    assert!(!report.pass, "a 1% corruption of b must not pass");
    let worst = report
        .rows
        .iter()
        .map(|r| r.deviation)
        .fold(0.0f64, f64::max);
    assert!(
        worst > 1e-3,
        "corruption should be clearly visible, worst {worst:.3e}"
    );
    for row in &report.rows {
        assert!(
            !row.pass,
            "{} slipped through at {:.3e}",
            row.observable, row.deviation
        );
    }
}

#[test]
fn free_expansion_oracle_confirms_conserved_mean_and_variance() {
    // Direct wavefunction evidence for the release-gate analysis: with the
    // trap off, each eigenstate keeps ⟨H⟩ at half its trapped energy AND
    // keeps the energy variance pinned at (ħω₀)²(n²+n+1)/8 — the variance
    // never decays toward zero.
    let units = Units::natural();
    let free = protocol::make_free_expansion(W0).unwrap();
    let grid = uniform_grid(4.0, 41);
    for n in [0usize, 1, 2] {
        let run = propagate(&free, InitialState::Eigenstate(n), &grid, 512, 5e-3, units).unwrap();
        let nf = n as f64;
        let mean_expect = 0.5 * (nf + 0.5); // kinetic half of the trapped energy
        let var_expect = (nf * nf + nf + 1.0) / 8.0;
        for s in &run.samples {
            assert_rel(s.mean_h, mean_expect, 1e-8);
            assert_rel(s.mean_h2 - s.mean_h * s.mean_h, var_expect, 1e-8);
        }
        assert!(run.invariant_drift < 1e-8);
    }
}

#[test]
fn sta_oracle_arrives_unexcited() {
    let units = Units::natural();
    let sta = protocol::design_sta_reverse(W0, 0.0625, 10.0).unwrap();
    let grid = uniform_grid(10.0, 101);
    let run = propagate(&sta, InitialState::Eigenstate(0), &grid, 256, 1e-3, units).unwrap();
    let last = run.samples.last().unwrap();
    let var_end = last.mean_h2 - last.mean_h * last.mean_h;
    assert!(
        var_end.abs() < 1e-6,
        "drive should end in an energy eigenstate, var = {var_end:.3e}"
    );
    // and the arrival energy is the adiabatic target ħω_F/2
    assert_rel(last.mean_h, 0.5 * 0.0625, 1e-6);
}
