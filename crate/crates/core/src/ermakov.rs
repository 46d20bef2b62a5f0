//! Scaling-factor dynamics: the Ermakov equation and derived quantities.
//!
//! For a harmonic trap driven from ω₀, the dynamics of any scale-invariant
//! state is captured by a single scaling factor b(t) obeying
//!
//! ```text
//! b̈ + ω²(t) b = ω₀² / b³,     b(0) = 1,  ḃ(0) = 0.
//! ```
//!
//! This module integrates that equation with an embedded Dormand–Prince 5(4)
//! pair, restarting at protocol breakpoints so no step straddles a frequency
//! jump, and evaluates requested sample times from the fifth-order dense
//! interpolant of each accepted step. The solution is bounded away from the
//! b → 0 singularity by the ω₀²/b³ barrier whenever ω² ≥ 0; inverted-trap
//! excursions are integrated as-is.
//!
//! Alongside b the module computes the nonadiabatic factor
//! Q*(t) = (ω₀/ω)[1/(2b²) + ω²b²/(2ω₀²) + ḃ²/(2ω₀²)] (≥ 1, undefined for
//! ω ≤ 0) and the driving coefficients α = (m/2)(ḃ² − b̈b), β = ḃ/b that feed
//! the energy moments.

use crate::protocol::TrapProtocol;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ErmakovError {
    #[error("relative tolerance {rel_tol} outside supported range [1e-13, 1e-6]")]
    InvalidTolerance { rel_tol: f64 },
    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),
    #[error("nonadiabatic factor undefined for omega = {omega} <= 0")]
    UndefinedQstar { omega: f64 },
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },
}

/// One sampled point of the scaling trajectory. `qstar` is present only while
/// the trap frequency is positive.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t: f64,
    pub b: f64,
    pub bdot: f64,
    pub bddot: f64,
    pub omega: f64,
    pub omega_sq: f64,
    pub qstar: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IntegratorStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone)]
pub struct ScalingTrajectory {
    pub protocol: TrapProtocol,
    pub samples: Vec<TrajectorySample>,
    pub stats: IntegratorStats,
}

impl ScalingTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Diagnostic transform: multiply b (and ḃ) by `factor`, recomputing b̈
    /// and Q* for the scaled values. The result no longer solves the Ermakov
    /// equation — useful as a negative control when validating against an
    /// independent propagation.
    pub fn with_scaled_b(&self, factor: f64) -> ScalingTrajectory {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let b = s.b * factor;
                let bdot = s.bdot * factor;
                make_sample(&self.protocol, s.t, b, bdot)
            })
            .collect();
        ScalingTrajectory {
            protocol: self.protocol.clone(),
            samples,
            stats: self.stats,
        }
    }
}

/// Nonadiabatic factor Q* ≥ 1. Requires a bound trap (ω > 0); the factor is
/// undefined during free expansion or inside an inverted trap.
pub fn nonadiabatic_factor(
    b: f64,
    bdot: f64,
    omega: f64,
    omega0: f64,
) -> Result<f64, ErmakovError> {
    if omega <= 0.0 || omega.is_nan() {
        return Err(ErmakovError::UndefinedQstar { omega });
    }
    let w0_sq = omega0 * omega0;
    Ok((omega0 / omega)
        * (0.5 / (b * b) + omega * omega * b * b / (2.0 * w0_sq) + bdot * bdot / (2.0 * w0_sq)))
}

/// Coefficients (α, β) multiplying the squeezing generators in the evolved
/// Hamiltonian: α = (m/2)(ḃ² − b̈b), β = ḃ/b.
pub fn driving_coefficients(b: f64, bdot: f64, bddot: f64, mass: f64) -> (f64, f64) {
    (0.5 * mass * (bdot * bdot - bddot * b), bdot / b)
}

fn make_sample(protocol: &TrapProtocol, t: f64, b: f64, bdot: f64) -> TrajectorySample {
    let omega_sq = protocol.omega_sq(t);
    let omega0 = protocol.omega0();
    let bddot = omega0 * omega0 / (b * b * b) - omega_sq * b;
    let omega = omega_sq.abs().sqrt().copysign(omega_sq);
    let qstar = nonadiabatic_factor(b, bdot, omega, omega0).ok();
    TrajectorySample {
        t,
        b,
        bdot,
        bddot,
        omega,
        omega_sq,
        qstar,
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Error weights b5 - b4 (the fifth-order solution is the A7x row itself).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights for the fifth interpolation coefficient.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 5_000_000;

type State = [f64; 2];

#[inline]
fn rhs(protocol: &TrapProtocol, t: f64, y: State) -> State {
    let b = y[0];
    let w0 = protocol.omega0();
    [y[1], w0 * w0 / (b * b * b) - protocol.omega_sq(t) * b]
}

/// Dense interpolant over one accepted step.
struct DenseSegment {
    t0: f64,
    h: f64,
    rcont: [State; 5],
}

impl DenseSegment {
    fn eval(&self, t: f64) -> State {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + theta1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + theta1 * self.rcont[4][i])));
        }
        out
    }
}

struct Dopri5<'a> {
    protocol: &'a TrapProtocol,
    rtol: f64,
    atol: f64,
    stats: IntegratorStats,
}

impl<'a> Dopri5<'a> {
    fn error_norm(&self, err: State, y0: State, y1: State) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            let sc = self.atol + self.rtol * y0[i].abs().max(y1[i].abs());
            acc += (err[i] / sc).powi(2);
        }
        (acc / 2.0).sqrt()
    }

    fn initial_step(&self, t: f64, y: State, f0: State, span: f64) -> f64 {
        let sc = |v: f64, y: f64| v / (self.atol + self.rtol * y.abs());
        let d0 = (sc(y[0], y[0]).powi(2) + sc(y[1], y[1]).powi(2)).sqrt();
        let d1 = (sc(f0[0], y[0]).powi(2) + sc(f0[1], y[1]).powi(2)).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let y1 = [y[0] + h0 * f0[0], y[1] + h0 * f0[1]];
        let f1 = rhs(self.protocol, t + h0, y1);
        let d2 = ((sc(f1[0] - f0[0], y[0]).powi(2) + sc(f1[1] - f0[1], y[1]).powi(2)).sqrt()) / h0;
        let d_max = d1.max(d2);
        let h1 = if d_max <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d_max).powf(0.2)
        };
        h1.min(100.0 * h0).min(span)
    }

    /// Integrate one smooth segment [ta, tb], invoking `emit` for every dense
    /// segment so the caller can pull interpolated samples.
    fn segment(
        &mut self,
        ta: f64,
        tb: f64,
        y_start: State,
        mut emit: impl FnMut(&DenseSegment),
    ) -> Result<State, ErmakovError> {
        let mut t = ta;
        let mut y = y_start;
        let mut k1 = rhs(self.protocol, t, y);
        let mut h = self.initial_step(t, y, k1, tb - ta);
        loop {
            if t >= tb {
                return Ok(y);
            }
            if self.stats.accepted_steps + self.stats.rejected_steps > MAX_STEPS {
                return Err(ErmakovError::IntegrationFailure {
                    t,
                    reason: "step budget exhausted".into(),
                });
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(ErmakovError::IntegrationFailure {
                    t,
                    reason: "step size underflow".into(),
                });
            }
            let last = t + h >= tb;
            if last {
                h = tb - t;
            }

            let p = self.protocol;
            let add = |y: State, terms: &[(f64, State)]| {
                let mut out = y;
                for &(c, k) in terms {
                    out[0] += h * c * k[0];
                    out[1] += h * c * k[1];
                }
                out
            };
            let k2 = rhs(p, t + C2 * h, add(y, &[(A21, k1)]));
            let k3 = rhs(p, t + C3 * h, add(y, &[(A31, k1), (A32, k2)]));
            let k4 = rhs(p, t + C4 * h, add(y, &[(A41, k1), (A42, k2), (A43, k3)]));
            let k5 = rhs(
                p,
                t + C5 * h,
                add(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]),
            );
            let k6 = rhs(
                p,
                t + h,
                add(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]),
            );
            let y_new = add(y, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
            let k7 = rhs(p, t + h, y_new);

            let mut err = [0.0; 2];
            for i in 0..2 {
                err[i] = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let err_norm = self.error_norm(err, y, y_new);

            if err_norm <= 1.0 {
                self.stats.accepted_steps += 1;
                if !(y_new[0].is_finite() && y_new[1].is_finite() && y_new[0] > 0.0) {
                    return Err(ErmakovError::IntegrationFailure {
                        t: t + h,
                        reason: format!(
                            "scaling factor left the physical domain (b = {})",
                            y_new[0]
                        ),
                    });
                }
                let mut rcont = [[0.0; 2]; 5];
                for i in 0..2 {
                    let dy = y_new[i] - y[i];
                    rcont[0][i] = y[i];
                    rcont[1][i] = dy;
                    rcont[2][i] = h * k1[i] - dy;
                    rcont[3][i] = dy - h * k7[i] - rcont[2][i];
                    rcont[4][i] = h
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                emit(&DenseSegment { t0: t, h, rcont });
                t += h;
                y = y_new;
                k1 = k7; // first-same-as-last
                if !last {
                    let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 10.0);
                    h *= fac;
                }
            } else {
                self.stats.rejected_steps += 1;
                h *= (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0).min(0.9);
            }
        }
    }
}

fn validate_grid(grid: &[f64], t_end: f64) -> Result<(), ErmakovError> {
    if grid.is_empty() {
        return Err(ErmakovError::InvalidGrid("sample grid is empty".into()));
    }
    if !grid.iter().all(|t| t.is_finite()) {
        return Err(ErmakovError::InvalidGrid(
            "sample grid contains non-finite times".into(),
        ));
    }
    if grid[0].abs() > 1e-12 {
        return Err(ErmakovError::InvalidGrid(format!(
            "sample grid must start at t = 0, got {}",
            grid[0]
        )));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(ErmakovError::InvalidGrid(
            "sample grid must be nondecreasing".into(),
        ));
    }
    let last = *grid.last().unwrap();
    if last > t_end * (1.0 + 1e-12) + 1e-15 {
        return Err(ErmakovError::InvalidGrid(format!(
            "sample grid extends past t_end = {t_end} (last = {last})"
        )));
    }
    Ok(())
}

/// Integrate the Ermakov equation from equilibrium at t = 0 and sample
/// (b, ḃ, b̈, ω, Q*) at the requested times. `rel_tol` controls the local
/// error per step; sample times are answered from the dense interpolant, so
/// they do not constrain step placement.
pub fn integrate_ermakov(
    protocol: &TrapProtocol,
    t_end: f64,
    rel_tol: f64,
    sample_grid: &[f64],
) -> Result<ScalingTrajectory, ErmakovError> {
    if !(1e-13..=1e-6).contains(&rel_tol) {
        return Err(ErmakovError::InvalidTolerance { rel_tol });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(ErmakovError::InvalidGrid(format!(
            "t_end must be positive and finite, got {t_end}"
        )));
    }
    validate_grid(sample_grid, t_end)?;

    // Closed-form path for the sudden quench: the post-quench trap is static,
    // so integrating would only accumulate error against the exact breather.
    if protocol.analytic_scaling(t_end).is_some()
        && matches!(
            protocol.kind(),
            crate::protocol::ProtocolKind::SuddenQuench | crate::protocol::ProtocolKind::Constant
        )
    {
        let samples = sample_grid
            .iter()
            .map(|&t| {
                let (b, bdot) = protocol
                    .analytic_scaling(t)
                    .expect("closed form covers t >= 0");
                make_sample(protocol, t, b, bdot)
            })
            .collect();
        return Ok(ScalingTrajectory {
            protocol: protocol.clone(),
            samples,
            stats: IntegratorStats::default(),
        });
    }

    let mut cuts: Vec<f64> = protocol
        .breakpoints()
        .into_iter()
        .filter(|&c| c > 0.0 && c < t_end)
        .collect();
    cuts.push(t_end);

    let mut solver = Dopri5 {
        protocol,
        rtol: rel_tol,
        atol: rel_tol * 1e-2,
        stats: IntegratorStats::default(),
    };

    let mut samples: Vec<TrajectorySample> = Vec::with_capacity(sample_grid.len());
    let mut idx = 0usize; // next unemitted grid entry
    let mut t_seg = 0.0;
    let mut y: State = [1.0, 0.0];

    // Emit every grid point at the segment head (t = 0 included) exactly.
    let emit_at = |t: f64, y: State, samples: &mut Vec<TrajectorySample>, idx: &mut usize| {
        while *idx < sample_grid.len() && sample_grid[*idx] <= t + 1e-14 * t.abs().max(1.0) {
            samples.push(make_sample(protocol, sample_grid[*idx], y[0], y[1]));
            *idx += 1;
        }
    };
    emit_at(0.0, y, &mut samples, &mut idx);

    for &cut in &cuts {
        if cut - t_seg < 1e-15 {
            continue;
        }
        let idx_cell = std::cell::RefCell::new((&mut samples, &mut idx));
        y = solver.segment(t_seg, cut, y, |seg| {
            let (samples, idx) = &mut *idx_cell.borrow_mut();
            let t_hi = seg.t0 + seg.h;
            while **idx < sample_grid.len()
                && sample_grid[**idx] <= t_hi + 1e-14 * t_hi.abs().max(1.0)
            {
                let ts = sample_grid[**idx];
                let ys = seg.eval(ts);
                samples.push(make_sample(protocol, ts, ys[0], ys[1]));
                **idx += 1;
            }
        })?;
        t_seg = cut;
    }
    // Roundoff stragglers at t_end take the final state.
    emit_at(t_seg, y, &mut samples, &mut idx);
    debug_assert_eq!(samples.len(), sample_grid.len());

    Ok(ScalingTrajectory {
        protocol: protocol.clone(),
        samples,
        stats: solver.stats,
    })
}

/// Uniform grid of `n` samples over [0, t_end] (n ≥ 2 gives both endpoints).
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol;

    fn assert_rel(a: f64, b: f64, tol: f64) {
        let scale = a.abs().max(b.abs()).max(1e-300);
        assert!((a - b).abs() / scale <= tol, "{a} vs {b} (rel tol {tol})");
    }

    #[test]
    fn free_expansion_matches_ballistic_form() {
        let p = protocol::make_free_expansion(1.0).unwrap();
        let grid = uniform_grid(10.0, 401);
        let traj = integrate_ermakov(&p, 10.0, 1e-10, &grid).unwrap();
        for s in &traj.samples {
            let b = (1.0 + s.t * s.t).sqrt();
            assert_rel(s.b, b, 1e-8);
            assert_rel(s.bdot, s.t / b, 1e-8);
            assert!(s.qstar.is_none());
        }
        // spot values at t = 1 and t = 2
        let s1 = traj
            .samples
            .iter()
            .find(|s| (s.t - 1.0).abs() < 1e-12)
            .unwrap();
        assert_rel(s1.b, 2.0f64.sqrt(), 1e-9);
        assert_rel(s1.bdot, 0.5f64.sqrt(), 1e-9);
        assert_rel(s1.bddot, 0.25 * 2.0f64.sqrt(), 1e-9);
        let s2 = traj
            .samples
            .iter()
            .find(|s| (s.t - 2.0).abs() < 1e-12)
            .unwrap();
        assert_rel(s2.b * s2.b, 5.0, 1e-9);
        let (alpha, beta) = driving_coefficients(s2.b, s2.bdot, s2.bddot, 1.0);
        assert_rel(alpha, 0.3, 1e-8);
        assert_rel(beta, 0.4, 1e-8);
    }

    #[test]
    fn sudden_quench_uses_exact_breather() {
        let p = protocol::make_sudden_quench(1.0, 0.5).unwrap();
        let t_end = 4.0 * std::f64::consts::PI;
        let grid = uniform_grid(t_end, 257);
        let traj = integrate_ermakov(&p, t_end, 1e-10, &grid).unwrap();
        assert_eq!(traj.stats.accepted_steps, 0);
        // peak of the breather: b = 2, bddot = omega0^2/8 - omega_f^2*2
        let peak = traj
            .samples
            .iter()
            .cloned()
            .max_by(|a, b| a.b.total_cmp(&b.b))
            .unwrap();
        assert_rel(peak.b, 2.0, 1e-12);
        assert_rel(peak.bddot, 1.0 / 8.0 - 0.5, 1e-10);
        let (alpha, _) = driving_coefficients(peak.b, peak.bdot, peak.bddot, 1.0);
        assert_rel(alpha, 0.375, 1e-10);
        // Q* is constant for the quench
        for s in &traj.samples {
            if s.t > 0.0 {
                assert_rel(s.qstar.unwrap(), 1.25, 1e-10);
            }
        }
    }

    #[test]
    fn quench_qstar_formula_for_strong_quench() {
        let q = nonadiabatic_factor(1.0, 0.0, 0.1, 1.0).unwrap();
        assert_rel(q, 5.05, 1e-14);
    }

    #[test]
    fn qstar_is_one_only_at_equilibrium() {
        // at b = (omega0/omega)^(1/2), bdot = 0: Q* = 1 exactly
        let b_eq = (1.0f64 / 0.5).sqrt();
        assert_rel(
            nonadiabatic_factor(b_eq, 0.0, 0.5, 1.0).unwrap(),
            1.0,
            1e-15,
        );
        assert!(nonadiabatic_factor(1.3, 0.2, 0.5, 1.0).unwrap() > 1.0);
        assert!(nonadiabatic_factor(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(nonadiabatic_factor(1.0, 0.0, -0.3, 1.0).is_err());
    }

    #[test]
    fn sta_ends_at_scaling_equilibrium() {
        let p = protocol::design_sta_reverse(1.0, 1.0 / 16.0, 10.0).unwrap();
        let grid = uniform_grid(10.0, 2001);
        let traj = integrate_ermakov(&p, 10.0, 1e-11, &grid).unwrap();
        // integrated b must track the designed quintic everywhere
        for s in &traj.samples {
            let (b_ref, bdot_ref) = p.analytic_scaling(s.t).unwrap();
            assert_rel(s.b, b_ref, 1e-8);
            assert!((s.bdot - bdot_ref).abs() < 1e-8 * (1.0 + bdot_ref.abs()));
        }
        let end = traj.samples.last().unwrap();
        assert_rel(end.b, 4.0, 1e-9);
        assert!(end.bdot.abs() < 1e-9);
        assert_rel(end.qstar.unwrap(), 1.0, 1e-9);
    }

    #[test]
    fn ramp_holds_equilibrium_after_the_drive() {
        // after t_f the trap is static; a state left non-equilibrium keeps
        // oscillating, but Q* stays exactly constant there
        let p = protocol::make_linear_ramp(1.0, 0.1, 2.0).unwrap();
        let grid = uniform_grid(6.0, 1201);
        let traj = integrate_ermakov(&p, 6.0, 1e-11, &grid).unwrap();
        let after: Vec<_> = traj.samples.iter().filter(|s| s.t >= 2.0).collect();
        let q0 = after[0].qstar.unwrap();
        for s in &after {
            assert_rel(s.qstar.unwrap(), q0, 1e-8);
        }
        assert!(q0 > 1.0);
    }

    #[test]
    fn dense_output_matches_tight_grid() {
        // sample a coarse run at off-step times and compare against a run
        // whose grid is so fine that samples land near accepted steps
        let p = protocol::make_linear_ramp(1.0, 0.3, 3.0).unwrap();
        let coarse = integrate_ermakov(&p, 3.0, 1e-10, &[0.0, 0.7331, 1.45, 2.6181, 3.0]).unwrap();
        let fine_grid = uniform_grid(3.0, 30001);
        let fine = integrate_ermakov(&p, 3.0, 1e-12, &fine_grid).unwrap();
        for s in &coarse.samples {
            let near = fine
                .samples
                .iter()
                .min_by(|a, b| (a.t - s.t).abs().total_cmp(&(b.t - s.t).abs()))
                .unwrap();
            assert!((near.t - s.t).abs() < 1.5e-4);
            assert_rel(s.b, near.b - near.bdot * (near.t - s.t), 1e-7);
        }
    }

    #[test]
    fn tolerance_and_grid_validation() {
        let p = protocol::make_free_expansion(1.0).unwrap();
        assert!(matches!(
            integrate_ermakov(&p, 1.0, 1e-3, &[0.0, 1.0]),
            Err(ErmakovError::InvalidTolerance { .. })
        ));
        assert!(matches!(
            integrate_ermakov(&p, 1.0, 1e-10, &[0.5, 1.0]),
            Err(ErmakovError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate_ermakov(&p, 1.0, 1e-10, &[0.0, 0.8, 0.4]),
            Err(ErmakovError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate_ermakov(&p, 1.0, 1e-10, &[0.0, 1.2]),
            Err(ErmakovError::InvalidGrid(_))
        ));
    }

    #[test]
    fn scaled_b_negative_control_breaks_the_solution() {
        let p = protocol::make_linear_ramp(1.0, 0.5, 2.0).unwrap();
        let grid = uniform_grid(2.0, 101);
        let traj = integrate_ermakov(&p, 2.0, 1e-10, &grid).unwrap();
        let corrupted = traj.with_scaled_b(1.01);
        let dev: f64 = corrupted
            .samples
            .iter()
            .zip(&traj.samples)
            .map(|(c, s)| (c.b - s.b).abs())
            .fold(0.0, f64::max);
        assert!(dev > 5e-3);
    }
}
