//! Banded operators in the equilibrium-trap Fock basis.
//!
//! The oscillator basis at ω₀ diagonalizes the t < 0 Hamiltonian; every
//! operator needed by the propagator couples |n⟩ only to |n ± 2⟩:
//!
//! ```text
//! x²: diag (2n+1)x₀²,  off  √((n+1)(n+2)) x₀²       x₀² = ħ/(2mω₀)
//! p²: diag (2n+1)p₀²,  off −√((n+1)(n+2)) p₀²       p₀² = mħω₀/2
//! C = iS,  S[n+2, n] = (ħ/2)√((n+1)(n+2)) = −S[n, n+2]
//! H(ω²) = p²/2m + (mω²/2)x²   (pentadiagonal, real symmetric)
//! ```
//!
//! Time stepping applies exp(−iH(t_mid)Δt) to the state through a shifted
//! Taylor series: the spectrum is bracketed with Gershgorin disks, H is
//! recentered at the midpoint of the bracket, and Δt is subdivided until the
//! residual radius ρ satisfies ρ·Δt ≤ 3, which keeps the series short and the
//! terms monotonically decaying (no catastrophic cancellation). Terms are
//! added until they fall below 1e-18 of the running sum.

use super::OracleError;
use crate::state::Units;
use num_complex::Complex64;

/// Series terms decay like (ρΔt)^k/k!; with ρΔt ≤ 3 the 1e-18 target is met
/// well inside this cap, which only guards against non-finite input.
const MAX_TAYLOR_TERMS: usize = 64;
const TAYLOR_TOL: f64 = 1e-18;
const MAX_RHO_DT: f64 = 3.0;

pub struct FockOperatorSet {
    dim: usize,
    omega0: f64,
    units: Units,
    x2_diag: Vec<f64>,
    x2_off: Vec<f64>,
    p2_diag: Vec<f64>,
    p2_off: Vec<f64>,
    s_off: Vec<f64>,
}

impl FockOperatorSet {
    pub fn new(dim: usize, omega0: f64, units: Units) -> Result<Self, OracleError> {
        if !(8..=16384).contains(&dim) {
            return Err(OracleError::InvalidDimension { dim });
        }
        let x0sq = units.hbar / (2.0 * units.mass * omega0);
        let p0sq = units.mass * units.hbar * omega0 / 2.0;
        let mut x2_diag = Vec::with_capacity(dim);
        let mut p2_diag = Vec::with_capacity(dim);
        let mut x2_off = Vec::with_capacity(dim - 2);
        let mut p2_off = Vec::with_capacity(dim - 2);
        let mut s_off = Vec::with_capacity(dim - 2);
        for n in 0..dim {
            let d = (2 * n + 1) as f64;
            x2_diag.push(x0sq * d);
            p2_diag.push(p0sq * d);
            if n < dim - 2 {
                let c = (((n + 1) * (n + 2)) as f64).sqrt();
                x2_off.push(x0sq * c);
                p2_off.push(-p0sq * c);
                s_off.push(0.5 * units.hbar * c);
            }
        }
        Ok(Self {
            dim,
            omega0,
            units,
            x2_diag,
            x2_off,
            p2_diag,
            p2_off,
            s_off,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn units(&self) -> Units {
        self.units
    }

    /// Equilibrium eigenenergy ħω₀(n + 1/2).
    pub fn eigen_energy(&self, n: usize) -> f64 {
        self.units.hbar * self.omega0 * (n as f64 + 0.5)
    }

    /// Fill the pentadiagonal bands of H(ω²) = p²/2m + (mω²/2)x².
    /// Both slices must be sized exactly (dim and dim − 2).
    pub fn hamiltonian_bands(&self, omega_sq: f64, diag: &mut [f64], off: &mut [f64]) {
        assert_eq!(diag.len(), self.dim);
        assert_eq!(off.len(), self.dim - 2);
        let km = 0.5 / self.units.mass;
        let vm = 0.5 * self.units.mass * omega_sq;
        for (d, (p, x)) in diag.iter_mut().zip(self.p2_diag.iter().zip(&self.x2_diag)) {
            *d = km * p + vm * x;
        }
        for (o, (p, x)) in off.iter_mut().zip(self.p2_off.iter().zip(&self.x2_off)) {
            *o = km * p + vm * x;
        }
    }

    pub fn apply_x2(&self, psi: &[Complex64], out: &mut [Complex64]) {
        apply_sym_banded(&self.x2_diag, &self.x2_off, psi, out);
    }

    pub fn apply_p2(&self, psi: &[Complex64], out: &mut [Complex64]) {
        apply_sym_banded(&self.p2_diag, &self.p2_off, psi, out);
    }

    /// out = Sψ where C = iS.
    pub fn apply_s(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for n in 0..d {
            let mut v = Complex64::new(0.0, 0.0);
            if n >= 2 {
                v += self.s_off[n - 2] * psi[n - 2];
            }
            if n + 2 < d {
                v -= self.s_off[n] * psi[n + 2];
            }
            out[n] = v;
        }
    }

    pub fn exp_x2(&self, psi: &[Complex64]) -> f64 {
        expectation_sym(&self.x2_diag, &self.x2_off, psi)
    }

    pub fn exp_p2(&self, psi: &[Complex64]) -> f64 {
        expectation_sym(&self.p2_diag, &self.p2_off, psi)
    }

    /// ⟨C⟩ = i⟨ψ|Sψ⟩ (real because S is real antisymmetric).
    pub fn exp_c(&self, psi: &[Complex64], scratch: &mut [Complex64]) -> f64 {
        self.apply_s(psi, scratch);
        let z: Complex64 = psi
            .iter()
            .zip(scratch.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        -z.im
    }
}

pub fn apply_sym_banded(diag: &[f64], off: &[f64], psi: &[Complex64], out: &mut [Complex64]) {
    let d = diag.len();
    for n in 0..d {
        let mut v = diag[n] * psi[n];
        if n >= 2 {
            v += off[n - 2] * psi[n - 2];
        }
        if n + 2 < d {
            v += off[n] * psi[n + 2];
        }
        out[n] = v;
    }
}

pub fn expectation_sym(diag: &[f64], off: &[f64], psi: &[Complex64]) -> f64 {
    let d = diag.len();
    let mut acc = 0.0;
    for n in 0..d {
        acc += diag[n] * psi[n].norm_sqr();
        if n + 2 < d {
            acc += 2.0 * off[n] * (psi[n].conj() * psi[n + 2]).re;
        }
    }
    acc
}

pub fn norm_sq(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

/// Reusable workspace for repeated exp(−iHΔt)ψ applications at one basis size.
pub struct Propagator<'a> {
    ops: &'a FockOperatorSet,
    diag: Vec<f64>,
    off: Vec<f64>,
    term: Vec<Complex64>,
    h_term: Vec<Complex64>,
    acc: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    pub fn new(ops: &'a FockOperatorSet) -> Self {
        let d = ops.dim();
        let zeros = vec![Complex64::new(0.0, 0.0); d];
        Propagator {
            ops,
            diag: vec![0.0; d],
            off: vec![0.0; d - 2],
            term: zeros.clone(),
            h_term: zeros.clone(),
            acc: zeros,
        }
    }

    pub fn ops(&self) -> &FockOperatorSet {
        self.ops
    }

    /// ψ ← exp(−iH(ω²)Δt/ħ)ψ.
    pub fn step(
        &mut self,
        omega_sq: f64,
        dt: f64,
        psi: &mut [Complex64],
    ) -> Result<(), OracleError> {
        self.ops
            .hamiltonian_bands(omega_sq, &mut self.diag, &mut self.off);
        let d = self.ops.dim();

        // Gershgorin bracket of the spectrum
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for n in 0..d {
            let mut r = 0.0;
            if n >= 2 {
                r += self.off[n - 2].abs();
            }
            if n + 2 < d {
                r += self.off[n].abs();
            }
            lo = lo.min(self.diag[n] - r);
            hi = hi.max(self.diag[n] + r);
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(OracleError::StepTooLarge(
                "hamiltonian bands are not finite".into(),
            ));
        }
        let mu = 0.5 * (lo + hi);
        let rho = 0.5 * (hi - lo) / self.ops.units.hbar;
        let n_sub = (rho * dt.abs() / MAX_RHO_DT).ceil().max(1.0) as usize;
        let dt_sub = dt / n_sub as f64;
        for _ in 0..n_sub {
            self.taylor_substep(mu, dt_sub, psi)?;
        }
        Ok(())
    }

    fn taylor_substep(
        &mut self,
        mu: f64,
        dt: f64,
        psi: &mut [Complex64],
    ) -> Result<(), OracleError> {
        let hbar = self.ops.units.hbar;
        let z = Complex64::new(0.0, -dt / hbar);
        self.acc.copy_from_slice(psi);
        self.term.copy_from_slice(psi);
        let mut converged = false;
        for k in 1..=MAX_TAYLOR_TERMS {
            apply_sym_banded(&self.diag, &self.off, &self.term, &mut self.h_term);
            let zk = z / k as f64;
            let mut term_nsq = 0.0;
            let mut acc_nsq = 0.0;
            for n in 0..psi.len() {
                let t = zk * (self.h_term[n] - mu * self.term[n]);
                self.term[n] = t;
                self.acc[n] += t;
                term_nsq += t.norm_sqr();
                acc_nsq += self.acc[n].norm_sqr();
            }
            if term_nsq <= TAYLOR_TOL * TAYLOR_TOL * acc_nsq {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(OracleError::StepTooLarge(format!(
                "propagator series failed to converge within {MAX_TAYLOR_TERMS} terms (dt = {dt})"
            )));
        }
        let phase = Complex64::from_polar(1.0, -mu * dt / hbar);
        for (p, a) in psi.iter_mut().zip(&self.acc) {
            *p = phase * *a;
        }
        Ok(())
    }
}
