//! Initial-state moment tables for scale-invariant states.
//!
//! Everything downstream (energy, fluctuations, moment evolution) consumes a
//! [`StateMoments`] record: the t = 0 expectation values of the Hamiltonian
//! H₀, the squeezing generators Q = x² and C = (xp + px)/2, and their squares,
//! evaluated in the equilibrium trap at ω₀. Supported families:
//!
//! * harmonic-oscillator eigenstates and thermal (Gibbs) states,
//! * Calogero–Sutherland ground states of N particles at coupling g,
//! * the unitary Fermi gas, parameterized by its scaled energy variance σ²,
//! * generic "homogeneous" states — any state whose Q/C moment generating
//!   functions take the power-law form shared by the two families above,
//!   parameterized directly by the exponent c.
//!
//! For the homogeneous family the moments follow from two characteristic
//! functions: ⟨e^{−λQ}⟩ = [1 + λℏ/(mω₀)]^{−c} and the scaling overlap
//! ⟨b^{iC/ħ}⟩ = [(b + 1/b)/2]^{−c}, both exposed here because they are easy
//! to cross-check by quadrature.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("invalid state parameter: {0}")]
    InvalidParameter(String),
    #[error("moment order {k} not available for this state")]
    UnsupportedOrder { k: usize },
    #[error("{0}")]
    DomainError(String),
}

/// Unit system: ħ and the particle mass. Frequencies stay explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
}

impl Units {
    pub fn natural() -> Self {
        Units {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl Default for Units {
    fn default() -> Self {
        Units::natural()
    }
}

/// Equilibrium moments of one initial state in the trap at ω₀.
///
/// `c_param` is the homogeneous exponent c when the state belongs to that
/// family (thermal and excited eigenstates do not), enabling closed-form
/// higher moments and the full variance route.
#[derive(Debug, Clone, Serialize)]
pub struct StateMoments {
    pub label: String,
    pub omega0: f64,
    pub units: Units,
    pub mean_h: f64,
    pub mean_h2: f64,
    pub mean_q: f64,
    pub mean_q2: f64,
    pub mean_c: f64,
    pub mean_c2: f64,
    pub c_param: Option<f64>,
}

fn check_omega0(omega0: f64) -> Result<(), StateError> {
    if omega0.is_finite() && omega0 > 0.0 {
        Ok(())
    } else {
        Err(StateError::InvalidParameter(format!(
            "omega0 must be positive and finite, got {omega0}"
        )))
    }
}

fn check_units(units: Units) -> Result<(), StateError> {
    if units.hbar > 0.0 && units.hbar.is_finite() && units.mass > 0.0 && units.mass.is_finite() {
        Ok(())
    } else {
        Err(StateError::InvalidParameter(format!(
            "units must be positive and finite, got hbar = {}, mass = {}",
            units.hbar, units.mass
        )))
    }
}

/// n-th harmonic-oscillator eigenstate (ħ = m = 1).
pub fn qho_eigenstate(n: usize, omega0: f64) -> Result<StateMoments, StateError> {
    qho_eigenstate_in(Units::natural(), n, omega0)
}

pub fn qho_eigenstate_in(units: Units, n: usize, omega0: f64) -> Result<StateMoments, StateError> {
    check_omega0(omega0)?;
    check_units(units)?;
    let nf = n as f64;
    let hbar = units.hbar;
    let x0sq = hbar / (2.0 * units.mass * omega0); // <x^2> scale
    let mean_h = hbar * omega0 * (nf + 0.5);
    Ok(StateMoments {
        label: format!("qho-eigenstate(n={n})"),
        omega0,
        units,
        mean_h,
        mean_h2: mean_h * mean_h,
        mean_q: x0sq * (2.0 * nf + 1.0),
        mean_q2: x0sq * x0sq * (6.0 * nf * nf + 6.0 * nf + 3.0),
        mean_c: 0.0,
        mean_c2: 0.5 * hbar * hbar * (nf * nf + nf + 1.0),
        // The ground state is the c = 1/2 member of the homogeneous family;
        // excited eigenstates are not homogeneous (their <Q^k> do not follow
        // the power-law generating function even when low moments coincide).
        c_param: if n == 0 { Some(0.5) } else { None },
    })
}

/// Harmonic-oscillator Gibbs state at inverse temperature β.
pub fn qho_thermal(beta: f64, omega0: f64) -> Result<StateMoments, StateError> {
    qho_thermal_in(Units::natural(), beta, omega0)
}

pub fn qho_thermal_in(units: Units, beta: f64, omega0: f64) -> Result<StateMoments, StateError> {
    check_omega0(omega0)?;
    check_units(units)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    let (weights, _) = boltzmann_weights(beta * units.hbar * omega0)?;
    let mut acc = [0.0f64; 5]; // h, h2, q, q2, c2
    for (n, w) in weights.iter().enumerate() {
        let e = qho_eigenstate_in(units, n, omega0).expect("validated above");
        acc[0] += w * e.mean_h;
        acc[1] += w * e.mean_h * e.mean_h;
        acc[2] += w * e.mean_q;
        acc[3] += w * e.mean_q2;
        acc[4] += w * e.mean_c2;
    }
    Ok(StateMoments {
        label: format!("qho-thermal(beta={beta})"),
        omega0,
        units,
        mean_h: acc[0],
        mean_h2: acc[1],
        mean_q: acc[2],
        mean_q2: acc[3],
        mean_c: 0.0,
        mean_c2: acc[4],
        c_param: None,
    })
}

/// Cumulative neglected Boltzmann weight at which thermal summations and
/// mixtures stop. One shared convention, so a closed-form/summation
/// discrepancy beyond the truncation scale indicates a real error. Sums of
/// n²-weighted terms amplify the neglected mass by roughly n_max², so
/// summed moments are reliable to ~1e-9 relative, not to the raw 1e-12.
pub(crate) const BOLTZMANN_TAIL: f64 = 1e-12;

/// Normalized Boltzmann weights exp(−βħω₀ n)/Z for n = 0..n_max, truncated
/// once the neglected tail mass drops below [`BOLTZMANN_TAIL`].
pub(crate) fn boltzmann_weights(beta_hbar_omega0: f64) -> Result<(Vec<f64>, usize), StateError> {
    if !(beta_hbar_omega0 > 0.0 && beta_hbar_omega0.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "beta*hbar*omega0 must be positive, got {beta_hbar_omega0}"
        )));
    }
    // tail/Z = exp(-x(n_max+1)) relative to Z >= 1
    let n_max = (-BOLTZMANN_TAIL.ln() / beta_hbar_omega0).ceil() as usize;
    if n_max > 50_000_000 {
        return Err(StateError::DomainError(format!(
            "temperature too high: thermal sum needs {n_max} levels"
        )));
    }
    let q = (-beta_hbar_omega0).exp();
    let mut weights = Vec::with_capacity(n_max + 1);
    let mut w = 1.0;
    let mut z = 0.0;
    for _ in 0..=n_max {
        weights.push(w);
        z += w;
        w *= q;
    }
    for w in &mut weights {
        *w /= z;
    }
    Ok((weights, n_max))
}

/// Exponent of the homogeneous family for the Calogero–Sutherland ground
/// state: c = (N/2)[1 + g(N − 1)].
pub fn csm_exponent(n_particles: usize, g: f64) -> f64 {
    let n = n_particles as f64;
    0.5 * n * (1.0 + g * (n - 1.0))
}

/// Calogero–Sutherland ground state of N particles at coupling g ≥ 0.
/// g = 0 is the ideal Bose gas in its ground state; g = 2 maps to free
/// fermions in one dimension.
pub fn csm_ground(n_particles: usize, g: f64, omega0: f64) -> Result<StateMoments, StateError> {
    csm_ground_in(Units::natural(), n_particles, g, omega0)
}

pub fn csm_ground_in(
    units: Units,
    n_particles: usize,
    g: f64,
    omega0: f64,
) -> Result<StateMoments, StateError> {
    if n_particles == 0 {
        return Err(StateError::InvalidParameter(
            "n_particles must be >= 1".into(),
        ));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "coupling g must be nonnegative and finite, got {g}"
        )));
    }
    homogeneous_member(
        units,
        csm_exponent(n_particles, g),
        omega0,
        format!("csm-ground(N={n_particles}, g={g})"),
    )
}

/// Unitary Fermi gas ground state. Scale invariance at unitarity makes it a
/// member of the homogeneous family with exponent c = σ², where σ² is the
/// gas's scaled quench-response parameter (equal to E₀/ħω₀ for the trapped
/// ground state), so one number specifies every moment used here.
pub fn unitary_fermi(sigma2: f64, omega0: f64) -> Result<StateMoments, StateError> {
    unitary_fermi_in(Units::natural(), sigma2, omega0)
}

pub fn unitary_fermi_in(
    units: Units,
    sigma2: f64,
    omega0: f64,
) -> Result<StateMoments, StateError> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "sigma2 must be positive and finite, got {sigma2}"
        )));
    }
    homogeneous_member(
        units,
        sigma2,
        omega0,
        format!("unitary-fermi(sigma2={sigma2})"),
    )
}

/// Generic member of the homogeneous family with exponent c > 0.
pub fn homogeneous(c: f64, omega0: f64) -> Result<StateMoments, StateError> {
    homogeneous_member(Units::natural(), c, omega0, format!("homogeneous(c={c})"))
}

pub fn homogeneous_with_units(
    units: Units,
    c: f64,
    omega0: f64,
) -> Result<StateMoments, StateError> {
    homogeneous_member(units, c, omega0, format!("homogeneous(c={c})"))
}

fn homogeneous_member(
    units: Units,
    c: f64,
    omega0: f64,
    label: String,
) -> Result<StateMoments, StateError> {
    check_omega0(omega0)?;
    check_units(units)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "homogeneous exponent c must be positive, got {c}"
        )));
    }
    let hbar = units.hbar;
    let q0 = hbar / (units.mass * omega0);
    let mean_h = hbar * omega0 * c;
    Ok(StateMoments {
        label,
        omega0,
        units,
        mean_h,
        mean_h2: mean_h * mean_h, // energy eigenstate
        mean_q: q0 * c,
        mean_q2: q0 * q0 * c * (c + 1.0),
        mean_c: 0.0,
        mean_c2: hbar * hbar * c,
        c_param: Some(c),
    })
}

/// k-th moment ⟨Q^k⟩ of the homogeneous family: (ħ/mω₀)^k · c(c+1)⋯(c+k−1).
/// k = 0 returns 1.
pub fn homogeneous_q_moment(
    c: f64,
    k: usize,
    omega0: f64,
    units: Units,
) -> Result<f64, StateError> {
    check_omega0(omega0)?;
    check_units(units)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "c must be positive, got {c}"
        )));
    }
    let q0 = units.hbar / (units.mass * omega0);
    let mut acc = 1.0;
    for j in 0..k {
        acc *= q0 * (c + j as f64);
    }
    Ok(acc)
}

/// k-th moment ⟨Q^k⟩ of the Calogero–Sutherland ground state (ħ = m = 1).
pub fn csm_q_moment(n_particles: usize, g: f64, k: usize, omega0: f64) -> Result<f64, StateError> {
    if n_particles == 0 {
        return Err(StateError::InvalidParameter(
            "n_particles must be >= 1".into(),
        ));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "g must be nonnegative, got {g}"
        )));
    }
    homogeneous_q_moment(csm_exponent(n_particles, g), k, omega0, Units::natural())
}

/// k-th moment ⟨C^k⟩ of the homogeneous family (odd moments vanish).
/// Closed forms are tabulated through k = 6.
pub fn homogeneous_c_moment(c: f64, k: usize, units: Units) -> Result<f64, StateError> {
    check_units(units)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "c must be positive, got {c}"
        )));
    }
    let h2 = units.hbar * units.hbar;
    match k {
        0 => Ok(1.0),
        1 | 3 | 5 => Ok(0.0),
        2 => Ok(h2 * c),
        4 => Ok(h2 * h2 * c * (2.0 + 3.0 * c)),
        6 => Ok(h2 * h2 * h2 * c * (16.0 + 30.0 * c + 15.0 * c * c)),
        _ => Err(StateError::UnsupportedOrder { k }),
    }
}

/// k-th moment ⟨C^k⟩ of the Calogero–Sutherland ground state (ħ = 1).
pub fn csm_c_moment(n_particles: usize, g: f64, k: usize) -> Result<f64, StateError> {
    if n_particles == 0 {
        return Err(StateError::InvalidParameter(
            "n_particles must be >= 1".into(),
        ));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "g must be nonnegative, got {g}"
        )));
    }
    homogeneous_c_moment(csm_exponent(n_particles, g), k, Units::natural())
}

/// Laplace-transform characteristic function of Q for the homogeneous family:
/// ⟨e^{−λQ}⟩ = [1 + λħ/(mω₀)]^{−c}, defined for λ > −mω₀/ħ.
pub fn characteristic_q(c: f64, lambda: f64, omega0: f64, units: Units) -> Result<f64, StateError> {
    check_omega0(omega0)?;
    check_units(units)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "c must be positive, got {c}"
        )));
    }
    let q0 = units.hbar / (units.mass * omega0);
    let arg = 1.0 + lambda * q0;
    if arg <= 0.0 {
        return Err(StateError::DomainError(format!(
            "characteristic function diverges at lambda = {lambda} (needs lambda > -{})",
            1.0 / q0
        )));
    }
    Ok(arg.powf(-c))
}

/// Scaling-overlap characteristic function of C for the homogeneous family:
/// ⟨b^{iC/ħ}⟩ = [(b + 1/b)/2]^{−c} for b > 0. Equals the squared overlap
/// between the state and its b-dilated image.
pub fn characteristic_c(c: f64, b: f64) -> Result<f64, StateError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(StateError::InvalidParameter(format!(
            "c must be positive, got {c}"
        )));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(StateError::DomainError(format!(
            "dilation parameter must be positive, got {b}"
        )));
    }
    Ok((0.5 * (b + 1.0 / b)).powf(-c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rel(a: f64, b: f64, tol: f64) {
        let scale = a.abs().max(b.abs()).max(1e-300);
        assert!((a - b).abs() / scale <= tol, "{a} vs {b} (rel tol {tol})");
    }

    #[test]
    fn ground_state_moments() {
        let s = qho_eigenstate(0, 1.0).unwrap();
        assert_eq!(s.mean_h, 0.5);
        assert_eq!(s.mean_h2, 0.25);
        assert_eq!(s.mean_q, 0.5);
        assert_eq!(s.mean_q2, 0.75);
        assert_eq!(s.mean_c, 0.0);
        assert_eq!(s.mean_c2, 0.5);
        assert_eq!(s.c_param, Some(0.5));
        // and it coincides with the homogeneous member at c = 1/2
        let h = homogeneous(0.5, 1.0).unwrap();
        for (a, b) in [
            (s.mean_h, h.mean_h),
            (s.mean_q, h.mean_q),
            (s.mean_q2, h.mean_q2),
            (s.mean_c2, h.mean_c2),
        ] {
            assert_rel(a, b, 1e-15);
        }
    }

    #[test]
    fn excited_state_moments_scale_with_units() {
        let u = Units {
            hbar: 2.0,
            mass: 3.0,
        };
        let s = qho_eigenstate_in(u, 2, 1.5).unwrap();
        assert_rel(s.mean_h, 2.0 * 1.5 * 2.5, 1e-15);
        let x0sq = 2.0 / (2.0 * 3.0 * 1.5);
        assert_rel(s.mean_q, x0sq * 5.0, 1e-15);
        assert_rel(s.mean_q2, x0sq * x0sq * 39.0, 1e-15);
        assert_rel(s.mean_c2, 0.5 * 4.0 * 7.0, 1e-15);
        assert_eq!(s.c_param, None);
    }

    #[test]
    fn thermal_moments_match_closed_forms() {
        // gamma = coth(beta*hbar*omega0/2); closed forms:
        //   <H> = (hbar w0/2) gamma          <H^2> = (hbar w0)^2 (2 gamma^2 - 1)/4
        //   <Q> = (hbar/2 m w0) gamma        <Q^2> = (3/4) gamma^2 (hbar/m w0)^2
        //   <C^2> = hbar^2 (gamma^2 + 1)/4
        // The sums truncate at neglected mass 1e-12; n^2-weighted second
        // moments amplify that by ~n_max^2 (worst at beta = 0.5: ~4e-10
        // relative), first moments by ~n_max (~3e-11). Tolerances carry a
        // ~20x margin over that floor.
        for beta in [0.5, 1.0, 5.0, 50.0] {
            let s = qho_thermal(beta, 1.0).unwrap();
            let gamma = 1.0 / (0.5 * beta).tanh();
            assert_rel(s.mean_h, 0.5 * gamma, 1e-9);
            assert_rel(s.mean_h2, (2.0 * gamma * gamma - 1.0) / 4.0, 1e-8);
            assert_rel(s.mean_q, 0.5 * gamma, 1e-9);
            assert_rel(s.mean_q2, 0.75 * gamma * gamma, 1e-8);
            assert_rel(s.mean_c2, (gamma * gamma + 1.0) / 4.0, 1e-8);
            // thermal states fluctuate: DH^2 = (gamma^2-1)/4, which is
            // resolvable in f64 only while beta is moderate
            if beta <= 5.0 {
                assert_rel(
                    s.mean_h2 - s.mean_h * s.mean_h,
                    (gamma * gamma - 1.0) / 4.0,
                    1e-8,
                );
            }
        }
        // beta -> infinity limit is the ground state
        let cold = qho_thermal(200.0, 1.0).unwrap();
        assert_rel(cold.mean_h, 0.5, 1e-12);
        assert_rel(cold.mean_h2, 0.25, 1e-12);
    }

    #[test]
    fn csm_exponent_and_moments() {
        assert_eq!(csm_exponent(3, 1.0), 4.5);
        assert_eq!(csm_exponent(10, 0.0), 5.0);
        // N = 10 ideal bosons: c = 5, <Q^2> = 5*6 = 30 (hbar = m = omega0 = 1)
        assert_rel(csm_q_moment(10, 0.0, 2, 1.0).unwrap(), 30.0, 1e-15);
        // ground state c = 1/2: <Q^3> = (1/2)(3/2)(5/2) = 15/8
        assert_rel(
            homogeneous_q_moment(0.5, 3, 1.0, Units::natural()).unwrap(),
            1.875,
            1e-15,
        );
        // product form at k = 2, c = 1/2 against the tabulated mean_q2
        let s = homogeneous(0.5, 1.0).unwrap();
        assert_rel(
            homogeneous_q_moment(0.5, 2, 1.0, Units::natural()).unwrap(),
            s.mean_q2,
            1e-15,
        );
        assert_eq!(csm_q_moment(3, 1.0, 0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn c_moments_follow_the_overlap_series() {
        // derivatives of [(b+1/b)/2]^(-c) at b = e^u, u = 0 give the C moments
        assert_eq!(csm_c_moment(4, 0.5, 1).unwrap(), 0.0);
        assert_rel(csm_c_moment(1, 0.0, 2).unwrap(), 0.5, 1e-15); // c = 1/2
        assert_rel(
            homogeneous_c_moment(1.0, 4, Units::natural()).unwrap(),
            5.0,
            1e-15,
        );
        assert_rel(
            homogeneous_c_moment(0.5, 6, Units::natural()).unwrap(),
            17.375,
            1e-15,
        );
        assert!(matches!(
            homogeneous_c_moment(1.0, 8, Units::natural()),
            Err(StateError::UnsupportedOrder { k: 8 })
        ));
    }

    #[test]
    fn characteristic_functions_spot_values() {
        // c = 1/2, lambda = m w0 / hbar: (1 + 1)^(-1/2)
        assert_rel(
            characteristic_q(0.5, 1.0, 1.0, Units::natural()).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            1e-15,
        );
        // b = 2, c = 1: [(2 + 1/2)/2]^-1 = 0.8
        assert_rel(characteristic_c(1.0, 2.0).unwrap(), 0.8, 1e-15);
        assert_eq!(characteristic_c(0.7, 1.0).unwrap(), 1.0);
        assert!(characteristic_q(0.5, -2.0, 1.0, Units::natural()).is_err());
        assert!(characteristic_c(1.0, 0.0).is_err());
    }

    #[test]
    fn unitary_fermi_is_the_homogeneous_member() {
        let u = unitary_fermi(2.3, 1.0).unwrap();
        let h = homogeneous(2.3, 1.0).unwrap();
        assert_eq!(u.mean_h, h.mean_h);
        assert_eq!(u.mean_q2, h.mean_q2);
        assert_eq!(u.c_param, Some(2.3));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(qho_thermal(0.0, 1.0).is_err());
        assert!(qho_eigenstate(1, -1.0).is_err());
        assert!(csm_ground(0, 1.0, 1.0).is_err());
        assert!(csm_ground(3, -0.1, 1.0).is_err());
        assert!(unitary_fermi(0.0, 1.0).is_err());
        assert!(homogeneous(1.0, f64::INFINITY).is_err());
    }
}
