//! Exact time-dependent observables built from a scaling trajectory and the
//! initial-state moments.
//!
//! The driven Hamiltonian, written in terms of t = 0 operators, is
//! H(t) = H₀/b² + α(t)Q + β(t)C with α = (m/2)(ḃ² − b̈b) and β = ḃ/b, so all
//! energy moments reduce to the frozen moment table of the initial state:
//!
//! ```text
//! ⟨H⟩  = ⟨H₀⟩/b² + α⟨Q⟩ + β⟨C⟩
//! ⟨H²⟩ = ⟨H₀²⟩(1/b⁴ + 2α/(mω₀²b²)) + α²⟨Q²⟩ + β²⟨C²⟩
//! ```
//!
//! The cross terms collapse as above for every initial state that is
//! stationary in the trap at ω₀ (⟨C⟩ = ⟨{Q,C}⟩ = 0 and the virial relation
//! ⟨Q⟩ₙ = Eₙ/(mω₀²) per energy level) — true for all built-in families.
//! Stationarity also gives the moment flow ⟨Q^k⟩_t = b^{2k}⟨Q^k⟩₀,
//! ⟨C⟩_t = mḃb⟨Q⟩₀ and ⟨C²⟩_t = ⟨C²⟩₀ + m²ḃ²b²⟨Q²⟩₀.

use crate::ermakov::{driving_coefficients, ScalingTrajectory, TrajectorySample};
use crate::state::{homogeneous_q_moment, StateMoments, Units};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObservablesError {
    #[error("nonadiabatic factor undefined at t = {t} (trap not bound)")]
    UndefinedQstar { t: f64 },
    #[error("moment order {k} requires a homogeneous state (known exponent c)")]
    MomentUnavailable { k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// All exported observables at one sample time. `qstar` and the adiabatic
/// reference energy exist only while the trap is bound (ω > 0); `var_e` is
/// `var_e_raw` clamped to zero from below (the raw value can undershoot by
/// rounding when the true variance vanishes).
#[derive(Debug, Clone, Copy)]
pub struct ObservableSample {
    pub t: f64,
    pub qstar: Option<f64>,
    pub mean_e: f64,
    pub mean_e_ad: Option<f64>,
    pub mean_e2: f64,
    pub var_e: f64,
    pub var_e_raw: f64,
    pub mean_q: f64,
    pub mean_q2: f64,
    pub mean_c: f64,
    pub mean_c2: f64,
}

#[derive(Debug, Clone)]
pub struct EnergyObservables {
    pub state_label: String,
    pub samples: Vec<ObservableSample>,
}

fn check_state_matches(traj: &ScalingTrajectory, state: &StateMoments) {
    let w0 = traj.protocol.omega0();
    assert!(
        (state.omega0 - w0).abs() <= 1e-12 * w0.abs(),
        "state prepared at omega0 = {} but trajectory drives from omega0 = {}",
        state.omega0,
        w0
    );
}

fn observables_at(sample: &TrajectorySample, state: &StateMoments) -> ObservableSample {
    let Units { hbar: _, mass } = state.units;
    let w0 = state.omega0;
    let b = sample.b;
    let b2 = b * b;
    let (alpha, beta) = driving_coefficients(b, sample.bdot, sample.bddot, mass);

    let mean_e = state.mean_h / b2 + alpha * state.mean_q + beta * state.mean_c;
    let mean_e_ad = (sample.omega > 0.0).then(|| state.mean_h * sample.omega / w0);
    let kernel = 1.0 / (b2 * b2) + 2.0 * alpha / (mass * w0 * w0 * b2);
    let mean_e2 =
        state.mean_h2 * kernel + alpha * alpha * state.mean_q2 + beta * beta * state.mean_c2;
    let var_h0 = state.mean_h2 - state.mean_h * state.mean_h;
    let var_q0 = state.mean_q2 - state.mean_q * state.mean_q;
    let var_e_raw = var_h0 * kernel + alpha * alpha * var_q0 + beta * beta * state.mean_c2;
    let mbb = mass * sample.bdot * b;

    ObservableSample {
        t: sample.t,
        qstar: sample.qstar,
        mean_e,
        mean_e_ad,
        mean_e2,
        var_e: var_e_raw.max(0.0),
        var_e_raw,
        mean_q: b2 * state.mean_q,
        mean_q2: b2 * b2 * state.mean_q2,
        mean_c: mbb * state.mean_q,
        mean_c2: state.mean_c2 + mbb * mbb * state.mean_q2,
    }
}

/// Evaluate every observable of `state` along `traj`.
pub fn energy_observables(traj: &ScalingTrajectory, state: &StateMoments) -> EnergyObservables {
    check_state_matches(traj, state);
    EnergyObservables {
        state_label: state.label.clone(),
        samples: traj
            .samples
            .iter()
            .map(|s| observables_at(s, state))
            .collect(),
    }
}

/// Mean energy ⟨H(t)⟩ along the trajectory.
pub fn mean_energy(traj: &ScalingTrajectory, state: &StateMoments) -> Vec<f64> {
    check_state_matches(traj, state);
    traj.samples
        .iter()
        .map(|s| observables_at(s, state).mean_e)
        .collect()
}

/// Second energy moment ⟨H²(t)⟩ along the trajectory.
pub fn second_moment(traj: &ScalingTrajectory, state: &StateMoments) -> Vec<f64> {
    check_state_matches(traj, state);
    traj.samples
        .iter()
        .map(|s| observables_at(s, state).mean_e2)
        .collect()
}

/// Energy variance of a homogeneous state with exponent c along the
/// trajectory, in the closed form ΔH²(t) = c ħ² [(α/mω₀)² + β²].
pub fn variance_homogeneous(
    traj: &ScalingTrajectory,
    c: f64,
    units: Units,
) -> Result<Vec<f64>, ObservablesError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(ObservablesError::InvalidParameter(format!(
            "homogeneous exponent c must be positive, got {c}"
        )));
    }
    let w0 = traj.protocol.omega0();
    Ok(traj
        .samples
        .iter()
        .map(|s| {
            let (alpha, beta) = driving_coefficients(s.b, s.bdot, s.bddot, units.mass);
            let a = alpha / (units.mass * w0);
            c * units.hbar * units.hbar * (a * a + beta * beta)
        })
        .collect())
}

/// Closed-form thermal energy variance
/// ΔH²(t) = (ħ²ω²/4) sinh⁻²(βħω₀/2) [Q*² + (Q*² − 1) cosh(βħω₀)].
/// Defined only while the trap is bound; fails with the first unbound time.
pub fn variance_thermal(
    traj: &ScalingTrajectory,
    beta: f64,
    units: Units,
) -> Result<Vec<f64>, ObservablesError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(ObservablesError::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    let x = beta * units.hbar * traj.protocol.omega0();
    let inv_sinh2 = 1.0 / (0.5 * x).sinh().powi(2);
    let cosh_x = x.cosh();
    traj.samples
        .iter()
        .map(|s| {
            let q = s.qstar.ok_or(ObservablesError::UndefinedQstar { t: s.t })?;
            let h2w2 = (units.hbar * s.omega).powi(2);
            Ok(0.25 * h2w2 * inv_sinh2 * (q * q + (q * q - 1.0) * cosh_x))
        })
        .collect()
}

/// ⟨Q^k(t)⟩ = b^{2k}⟨Q^k⟩₀. Orders k ≤ 2 work for every state; higher orders
/// need the homogeneous product form and therefore a known exponent.
pub fn q_moment_t(
    traj: &ScalingTrajectory,
    state: &StateMoments,
    k: usize,
) -> Result<Vec<f64>, ObservablesError> {
    check_state_matches(traj, state);
    let q0k = match k {
        0 => 1.0,
        1 => state.mean_q,
        2 => state.mean_q2,
        _ => {
            let c = state
                .c_param
                .ok_or(ObservablesError::MomentUnavailable { k })?;
            homogeneous_q_moment(c, k, state.omega0, state.units)
                .map_err(|e| ObservablesError::InvalidParameter(e.to_string()))?
        }
    };
    Ok(traj
        .samples
        .iter()
        .map(|s| (s.b * s.b).powi(k as i32) * q0k)
        .collect())
}

/// (⟨C(t)⟩, ⟨C²(t)⟩) along the trajectory.
pub fn c_moments_t(traj: &ScalingTrajectory, state: &StateMoments) -> (Vec<f64>, Vec<f64>) {
    check_state_matches(traj, state);
    let mut c1 = Vec::with_capacity(traj.samples.len());
    let mut c2 = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let mbb = state.units.mass * s.bdot * s.b;
        c1.push(mbb * state.mean_q);
        c2.push(state.mean_c2 + mbb * mbb * state.mean_q2);
    }
    (c1, c2)
}
