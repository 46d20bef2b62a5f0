//! Independent validation oracle: direct Schrödinger propagation in a
//! truncated Fock basis.
//!
//! Nothing here reuses the scaling-solution formulas. A state is propagated
//! through the exact time-dependent Hamiltonian H(t) = p²/2m + (m/2)ω²(t)x²
//! with midpoint-exponential steps (exp(−iH(t_mid)Δt), second order in Δt,
//! exact wherever ω² is piecewise constant), and observables are read off the
//! wavefunction. Gibbs states are propagated member-by-member and combined
//! with Boltzmann weights. The scaling trajectory enters only through the
//! dynamical invariant
//!
//! ```text
//! I(t) = b²⟨p²⟩/2m + (m/2)(ω₀²/b² + ḃ²)⟨x²⟩ − bḃ⟨C⟩,     I(0) = ⟨H₀⟩,
//! ```
//!
//! which is conserved exactly by the continuum dynamics and therefore exposes
//! stepping or truncation error without reference to any prediction.
//!
//! Truncation is policed by the tail population (top 10% of the basis); a
//! breach fails the run, and [`propagate_auto`] reacts by doubling the basis
//! and rerunning from scratch.

pub mod operators;

use crate::ermakov::{integrate_ermakov, ErmakovError, ScalingTrajectory};
use crate::observables::EnergyObservables;
use crate::protocol::TrapProtocol;
use crate::state::{self, Units};
use num_complex::Complex64;
use operators::{norm_sq, FockOperatorSet, Propagator};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("basis dimension {dim} outside the supported range [8, 16384]")]
    InvalidDimension { dim: usize },
    #[error("time step too large: {0}")]
    StepTooLarge(String),
    #[error("basis truncation invalid: {0}")]
    TruncationInvalid(String),
    #[error("sample grids incompatible: {0}")]
    GridMismatch(String),
    #[error("unsupported initial state: {0}")]
    UnsupportedState(String),
    #[error(transparent)]
    Trajectory(#[from] ErmakovError),
}

/// States the wavefunction oracle can prepare exactly in the Fock basis.
#[derive(Debug, Clone, Copy)]
pub enum InitialState {
    Eigenstate(usize),
    Thermal { beta: f64 },
}

impl InitialState {
    fn label(&self) -> String {
        match self {
            InitialState::Eigenstate(n) => format!("eigenstate(n={n})"),
            InitialState::Thermal { beta } => format!("thermal(beta={beta})"),
        }
    }
}

/// Observables of the propagated state at one sample time, plus the
/// health diagnostics recorded alongside them.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleSample {
    pub t: f64,
    pub mean_h: f64,
    pub mean_h2: f64,
    pub mean_q: f64,
    pub mean_q2: f64,
    pub mean_c: f64,
    pub mean_c2: f64,
    pub invariant: f64,
    pub norm: f64,
    pub tail: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRun {
    pub label: String,
    pub dim: usize,
    pub dt: f64,
    pub samples: Vec<OracleSample>,
    /// max_t |I(t) − I(0)| / |I(0)|
    pub invariant_drift: f64,
    /// max over members and times of |‖ψ‖ − 1|
    pub max_norm_dev: f64,
    /// max over times of the trace-weighted tail population
    pub max_tail: f64,
}

const TAIL_LIMIT: f64 = 1e-8;
const DRIFT_LIMIT: f64 = 1e-6;

/// Per-member raw moments at each sample: x2, p2, c, h, h2, q2, c2, norm², tail.
type MomentRow = [f64; 9];

fn eigenstate_rows(
    ops: &FockOperatorSet,
    protocol: &TrapProtocol,
    n: usize,
    dt: f64,
    grid: &[f64],
) -> Result<Vec<MomentRow>, OracleError> {
    let dim = ops.dim();
    let tail_start = (9 * dim) / 10;
    if n + 3 > tail_start {
        return Err(OracleError::TruncationInvalid(format!(
            "initial level n = {n} sits inside the tail window of a {dim}-state basis"
        )));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[n] = Complex64::new(1.0, 0.0);
    let mut prop = Propagator::new(ops);
    let mut scratch = psi.clone();

    let mut cuts: Vec<f64> = protocol.breakpoints();
    cuts.retain(|&c| c > 0.0);
    cuts.sort_by(f64::total_cmp);

    let mut rows = Vec::with_capacity(grid.len());
    let mut record = |psi: &[Complex64], t: f64| {
        let mut hd = vec![0.0; dim];
        let mut ho = vec![0.0; dim - 2];
        ops.hamiltonian_bands(protocol.omega_sq(t), &mut hd, &mut ho);
        let x2 = ops.exp_x2(psi);
        let p2 = ops.exp_p2(psi);
        let c = ops.exp_c(psi, &mut scratch);
        let h = operators::expectation_sym(&hd, &ho, psi);
        operators::apply_sym_banded(&hd, &ho, psi, &mut scratch);
        let h2 = norm_sq(&scratch);
        ops.apply_x2(psi, &mut scratch);
        let q2 = norm_sq(&scratch);
        ops.apply_s(psi, &mut scratch);
        let c2 = norm_sq(&scratch);
        let nrm = norm_sq(psi);
        let tail: f64 = psi[tail_start..].iter().map(|z| z.norm_sqr()).sum();
        rows.push([x2, p2, c, h, h2, q2, c2, nrm, tail]);
    };

    let mut t_now = grid[0];
    record(&psi, t_now);
    for &t_next in &grid[1..] {
        if t_next > t_now {
            // split the interval at protocol breakpoints, then step uniformly
            let mut pieces = vec![t_now];
            for &c in &cuts {
                if c > t_now && c < t_next {
                    pieces.push(c);
                }
            }
            pieces.push(t_next);
            for w in 0..pieces.len() - 1 {
                let (a, b) = (pieces[w], pieces[w + 1]);
                let n_steps = ((b - a) / dt).ceil().max(1.0) as usize;
                let h = (b - a) / n_steps as f64;
                for j in 0..n_steps {
                    let t_mid = a + (j as f64 + 0.5) * h;
                    prop.step(protocol.omega_sq(t_mid), h, &mut psi)?;
                }
            }
        }
        t_now = t_next;
        record(&psi, t_now);
    }
    Ok(rows)
}

/// Oracle resolution knobs: starting and maximum basis size, time step.
#[derive(Debug, Clone, Copy)]
pub struct OracleSettings {
    pub dim: usize,
    pub max_dim: usize,
    pub dt: f64,
    pub units: Units,
}

/// Propagate `initial` through `protocol` in a `dim`-state basis with step
/// `dt`, sampling observables at `grid` (which must start at 0).
pub fn propagate(
    protocol: &TrapProtocol,
    initial: InitialState,
    grid: &[f64],
    dim: usize,
    dt: f64,
    units: Units,
) -> Result<OracleRun, OracleError> {
    let w0 = protocol.omega0();
    let dt_cap = 0.01 / w0.max(protocol.omega_f().abs());
    if !(dt > 0.0 && dt.is_finite()) || dt > dt_cap * (1.0 + 1e-12) {
        return Err(OracleError::StepTooLarge(format!(
            "dt = {dt} exceeds the stability cap {dt_cap:.3e} for this protocol"
        )));
    }
    let t_end = *grid
        .last()
        .ok_or_else(|| OracleError::GridMismatch("sample grid is empty".into()))?;
    if t_end <= 0.0 || t_end.is_nan() {
        return Err(OracleError::GridMismatch(
            "sample grid must extend past t = 0".into(),
        ));
    }
    let ops = FockOperatorSet::new(dim, w0, units)?;

    // scaling factor for the invariant only; also validates the grid
    let traj = integrate_ermakov(protocol, t_end, 1e-12, grid)?;

    let members: Vec<(usize, f64)> = match initial {
        InitialState::Eigenstate(n) => vec![(n, 1.0)],
        InitialState::Thermal { beta } => {
            // same truncation convention as the summed thermal moments
            let (weights, _) = state::boltzmann_weights(beta * units.hbar * w0)
                .map_err(|e| OracleError::UnsupportedState(e.to_string()))?;
            weights.into_iter().enumerate().collect()
        }
    };

    let member_rows: Vec<Vec<MomentRow>> = members
        .par_iter()
        .map(|&(n, _)| eigenstate_rows(&ops, protocol, n, dt, grid))
        .collect::<Result<_, _>>()?;

    let mass = units.mass;
    let mut samples = Vec::with_capacity(grid.len());
    let mut max_norm_dev: f64 = 0.0;
    let mut max_tail: f64 = 0.0;
    for (i, ts) in traj.samples.iter().enumerate() {
        let mut row = [0.0f64; 9];
        for (rows, &(_, w)) in member_rows.iter().zip(&members) {
            for (acc, v) in row.iter_mut().zip(&rows[i]) {
                *acc += w * v;
            }
        }
        for rows in &member_rows {
            max_norm_dev = max_norm_dev.max((rows[i][7].sqrt() - 1.0).abs());
        }
        let [x2, p2, c, h, h2, q2, c2, _, tail] = row;
        let (b, bd) = (ts.b, ts.bdot);
        let invariant = b * b * p2 / (2.0 * mass) + 0.5 * mass * (w0 * w0 / (b * b) + bd * bd) * x2
            - b * bd * c;
        max_tail = max_tail.max(tail);
        if tail > TAIL_LIMIT {
            return Err(OracleError::TruncationInvalid(format!(
                "tail population {tail:.3e} at t = {} exceeds {TAIL_LIMIT:.0e} (dim = {dim})",
                ts.t
            )));
        }
        samples.push(OracleSample {
            t: ts.t,
            mean_h: h,
            mean_h2: h2,
            mean_q: x2,
            mean_q2: q2,
            mean_c: c,
            mean_c2: c2,
            invariant,
            norm: row[7],
            tail,
        });
    }

    let i0 = samples[0].invariant;
    let drift = samples
        .iter()
        .map(|s| (s.invariant - i0).abs())
        .fold(0.0f64, f64::max)
        / i0.abs().max(f64::MIN_POSITIVE);
    if drift > DRIFT_LIMIT {
        return Err(OracleError::StepTooLarge(format!(
            "dynamical invariant drifted by {drift:.3e} (> {DRIFT_LIMIT:.0e}); reduce dt"
        )));
    }

    Ok(OracleRun {
        label: initial.label(),
        dim,
        dt,
        samples,
        invariant_drift: drift,
        max_norm_dev,
        max_tail,
    })
}

/// Like [`propagate`], but doubles the basis and reruns when the tail check
/// trips, up to `settings.max_dim`.
pub fn propagate_auto(
    protocol: &TrapProtocol,
    initial: InitialState,
    grid: &[f64],
    settings: OracleSettings,
) -> Result<OracleRun, OracleError> {
    let mut dim = settings.dim;
    loop {
        match propagate(protocol, initial, grid, dim, settings.dt, settings.units) {
            Err(OracleError::TruncationInvalid(_)) if dim * 2 <= settings.max_dim => dim *= 2,
            other => return other,
        }
    }
}

/// Sup-norm relative deviation between one predicted and one oracle series.
/// The denominator is the larger of the two sup-norms, floored at 1e-9 of
/// `energy_scale` so that observables that vanish identically (e.g. ⟨C⟩ in a
/// static trap) compare their raw noise against the physical energy scale
/// instead of against zero.
fn sup_rel_deviation(pred: &[f64], orac: &[f64], energy_scale: f64) -> f64 {
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let denom = sup(pred).max(sup(orac)).max(1e-9 * energy_scale.abs());
    pred.iter()
        .zip(orac)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / denom
}

/// 4-point Lagrange interpolation of (xs, ys) at x; xs must be ascending.
fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let j = xs.partition_point(|&v| v < x);
    let lo = j.saturating_sub(2).min(n.saturating_sub(4));
    let (xs, ys) = (&xs[lo..lo + 4], &ys[lo..lo + 4]);
    let mut acc = 0.0;
    for i in 0..4 {
        let mut li = 1.0;
        for k in 0..4 {
            if k != i {
                li *= (x - xs[k]) / (xs[i] - xs[k]);
            }
        }
        acc += li * ys[i];
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationRow {
    pub observable: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub state: String,
    pub protocol: String,
    pub dim: usize,
    pub dt: f64,
    pub rows: Vec<DeviationRow>,
    pub invariant_drift: f64,
    pub invariant_tolerance: f64,
    pub max_norm_dev: f64,
    pub norm_tolerance: f64,
    pub max_tail: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct CompareTolerances {
    pub observable: f64,
    pub invariant_drift: f64,
    pub norm: f64,
}

impl Default for CompareTolerances {
    fn default() -> Self {
        CompareTolerances {
            observable: 1e-6,
            invariant_drift: 1e-8,
            norm: 1e-10,
        }
    }
}

/// Compare predicted observables against an oracle run, observable by
/// observable, in the sup norm. Grids need not coincide: when they differ the
/// oracle series is resampled onto the prediction grid with cubic Lagrange
/// interpolation (the oracle grid must cover the prediction window).
pub fn compare(
    run: &OracleRun,
    predicted: &EnergyObservables,
    protocol: &TrapProtocol,
    tol: CompareTolerances,
) -> Result<ComparisonReport, OracleError> {
    if predicted.samples.is_empty() || run.samples.len() < 4 {
        return Err(OracleError::GridMismatch(
            "need a nonempty prediction grid and at least 4 oracle samples".into(),
        ));
    }
    let pt: Vec<f64> = predicted.samples.iter().map(|s| s.t).collect();
    let ot: Vec<f64> = run.samples.iter().map(|s| s.t).collect();
    let same_grid = pt.len() == ot.len()
        && pt
            .iter()
            .zip(&ot)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
    if !same_grid {
        let (lo, hi) = (ot[0], *ot.last().unwrap());
        let margin = 1e-9 * hi.abs().max(1.0);
        if pt[0] < lo - margin || *pt.last().unwrap() > hi + margin {
            return Err(OracleError::GridMismatch(format!(
                "prediction window [{}, {}] is not covered by the oracle window [{lo}, {hi}]",
                pt[0],
                pt.last().unwrap()
            )));
        }
    }

    let oracle_series = |f: &dyn Fn(&OracleSample) -> f64| -> Vec<f64> {
        let raw: Vec<f64> = run.samples.iter().map(f).collect();
        if same_grid {
            raw
        } else {
            pt.iter().map(|&t| lagrange4(&ot, &raw, t)).collect()
        }
    };

    let energy_scale = run
        .samples
        .iter()
        .map(|s| s.mean_h.abs())
        .fold(0.0f64, f64::max);

    let series: [(&str, Vec<f64>, Vec<f64>); 6] = [
        (
            "mean_E",
            predicted.samples.iter().map(|s| s.mean_e).collect(),
            oracle_series(&|s| s.mean_h),
        ),
        (
            "mean_E2",
            predicted.samples.iter().map(|s| s.mean_e2).collect(),
            oracle_series(&|s| s.mean_h2),
        ),
        (
            "mean_Q",
            predicted.samples.iter().map(|s| s.mean_q).collect(),
            oracle_series(&|s| s.mean_q),
        ),
        (
            "mean_Q2",
            predicted.samples.iter().map(|s| s.mean_q2).collect(),
            oracle_series(&|s| s.mean_q2),
        ),
        (
            "mean_C",
            predicted.samples.iter().map(|s| s.mean_c).collect(),
            oracle_series(&|s| s.mean_c),
        ),
        (
            "mean_C2",
            predicted.samples.iter().map(|s| s.mean_c2).collect(),
            oracle_series(&|s| s.mean_c2),
        ),
    ];

    let mut rows = Vec::with_capacity(series.len());
    for (name, pred, orac) in &series {
        // scale-free observables (Q, C families) still get the energy floor:
        // they share the run's dynamic range through b(t)
        let scale = match *name {
            "mean_Q" | "mean_Q2" => orac.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            _ => energy_scale,
        };
        let deviation = sup_rel_deviation(pred, orac, scale);
        rows.push(DeviationRow {
            observable: name.to_string(),
            deviation,
            tolerance: tol.observable,
            pass: deviation <= tol.observable,
        });
    }

    let pass = rows.iter().all(|r| r.pass)
        && run.invariant_drift <= tol.invariant_drift
        && run.max_norm_dev <= tol.norm;

    Ok(ComparisonReport {
        state: predicted.state_label.clone(),
        protocol: protocol.kind_name().to_string(),
        dim: run.dim,
        dt: run.dt,
        rows,
        invariant_drift: run.invariant_drift,
        invariant_tolerance: tol.invariant_drift,
        max_norm_dev: run.max_norm_dev,
        norm_tolerance: tol.norm,
        max_tail: run.max_tail,
        pass,
    })
}

/// Convenience wrapper: oracle propagation on the trajectory's grid followed
/// by the comparison, in one call.
pub fn validate_predictions(
    traj: &ScalingTrajectory,
    predicted: &EnergyObservables,
    initial: InitialState,
    settings: OracleSettings,
    tol: CompareTolerances,
) -> Result<(OracleRun, ComparisonReport), OracleError> {
    let grid: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let run = propagate_auto(&traj.protocol, initial, &grid, settings)?;
    let report = compare(&run, predicted, &traj.protocol, tol)?;
    Ok((run, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ermakov::uniform_grid;
    use crate::observables::energy_observables;
    use crate::protocol;

    fn assert_rel(a: f64, b: f64, tol: f64) {
        let scale = a.abs().max(b.abs()).max(1e-300);
        assert!((a - b).abs() / scale <= tol, "{a} vs {b} (rel tol {tol})");
    }

    #[test]
    fn static_trap_reproduces_eigenstate_moments() {
        let p = protocol::make_constant(1.0).unwrap();
        let grid = uniform_grid(2.0, 21);
        let run = propagate(
            &p,
            InitialState::Eigenstate(1),
            &grid,
            64,
            0.01,
            Units::natural(),
        )
        .unwrap();
        for s in &run.samples {
            assert_rel(s.mean_h, 1.5, 1e-12);
            assert_rel(s.mean_h2, 2.25, 1e-12);
            assert_rel(s.mean_q, 1.5, 1e-12);
            assert_rel(s.mean_q2, 0.25 * 15.0, 1e-12);
            assert!(s.mean_c.abs() < 1e-12);
            assert_rel(s.mean_c2, 1.5, 1e-12);
            assert_rel(s.invariant, 1.5, 1e-12);
        }
        assert!(run.invariant_drift < 1e-12);
        assert!(run.max_norm_dev < 1e-12);
    }

    #[test]
    fn quench_oracle_matches_exact_breather_moments() {
        // piecewise-constant drive: midpoint stepping is exact, so the oracle
        // and the closed-form predictions must agree at machine precision
        let p = protocol::make_sudden_quench(1.0, 0.5).unwrap();
        let grid = uniform_grid(10.0, 101);
        let traj = integrate_ermakov(&p, 10.0, 1e-12, &grid).unwrap();
        let state = crate::state::qho_eigenstate(0, 1.0).unwrap();
        let obs = energy_observables(&traj, &state);
        let run = propagate(
            &p,
            InitialState::Eigenstate(0),
            &grid,
            128,
            0.01,
            Units::natural(),
        )
        .unwrap();
        let report = compare(&run, &obs, &p, CompareTolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");
        for row in &report.rows {
            assert!(row.deviation < 1e-9, "{row:?}");
        }
        assert!(run.invariant_drift < 1e-10);
    }

    #[test]
    fn truncation_guard_trips_and_escalates() {
        // a quench from a high level spreads past a small basis
        let p = protocol::make_sudden_quench(1.0, 0.5).unwrap();
        let grid = uniform_grid(6.0, 25);
        let r = propagate(
            &p,
            InitialState::Eigenstate(20),
            &grid,
            64,
            0.01,
            Units::natural(),
        );
        assert!(matches!(r, Err(OracleError::TruncationInvalid(_))));
        let settings = OracleSettings {
            dim: 64,
            max_dim: 1024,
            dt: 0.01,
            units: Units::natural(),
        };
        let run = propagate_auto(&p, InitialState::Eigenstate(20), &grid, settings).unwrap();
        assert!(run.dim > 64);
        assert!(run.max_tail <= 1e-8);
    }

    #[test]
    fn dt_cap_is_enforced() {
        let p = protocol::make_sudden_quench(1.0, 2.0).unwrap();
        let r = propagate(
            &p,
            InitialState::Eigenstate(0),
            &[0.0, 1.0],
            64,
            0.009,
            Units::natural(),
        );
        assert!(matches!(r, Err(OracleError::StepTooLarge(_))));
    }

    #[test]
    fn lagrange_resampling_is_cubic_exact() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let f = |x: f64| 1.0 - 2.0 * x + 0.25 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for &x in &[0.0, 0.31, 4.77, 9.5] {
            assert_rel(lagrange4(&xs, &ys, x), f(x), 1e-12);
        }
    }
}
