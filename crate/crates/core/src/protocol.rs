//! Trap frequency schedules ω(t) for a driven harmonic confinement.
//!
//! A [`TrapProtocol`] evaluates the squared frequency ω²(t) of the trap at any
//! time, with ω(t) = ω₀ frozen for t < 0 and ω(t) = ω_F held after the drive
//! ends. Schedules with a jump at t = 0 (sudden quench, trap release) are
//! right-continuous: the t = 0 value is the post-jump frequency.
//!
//! | kind                  | schedule                                          |
//! |-----------------------|---------------------------------------------------|
//! | `Constant`            | ω(t) = ω₀                                         |
//! | `FreeExpansion`       | trap released at t = 0 (ω = 0 for t ≥ 0)          |
//! | `SuddenQuench`        | instantaneous jump ω₀ → ω_F at t = 0              |
//! | `LinearRamp`          | ω interpolated linearly over [0, t_F]             |
//! | `PolynomialSta`       | ω² reverse-engineered from a quintic scaling b(t) |
//! | `LocalCounterdiabatic`| ω² dressed around a quintic reference ω_R(t)      |
//!
//! The two designed schedules may request an inverted trap (ω² < 0) when the
//! duration is too short; this is legal to evaluate and integrate, and is
//! reported through [`TrapProtocol::is_feasible`].

use thiserror::Error;

/// Resolution of the feasibility / positivity scans over [0, t_F].
const SCAN_POINTS: usize = 2000;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid protocol parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid reference schedule: {0}")]
    InvalidReference(String),
}

/// Polynomial schedule over s = t/t_F, clamped to its endpoint values outside
/// [0, t_F]. The standard constructor builds the quintic smoothstep
/// f(s) = start + Δ(10s³ − 15s⁴ + 6s⁵), whose value reaches `end` at s = 1
/// with vanishing first and second derivatives at both endpoints.
#[derive(Debug, Clone)]
pub struct PolynomialAnsatz {
    coeffs: [f64; 6],
    t_f: f64,
}

impl PolynomialAnsatz {
    /// Quintic smoothstep interpolation from `start` to `end` over [0, t_f].
    pub fn quintic(start: f64, end: f64, t_f: f64) -> Self {
        let d = end - start;
        Self {
            coeffs: [start, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d],
            t_f,
        }
    }

    /// Arbitrary quintic coefficients in s = t/t_f. Endpoint conditions are
    /// *not* implied; consumers that require them must validate.
    pub fn from_coefficients(coeffs: [f64; 6], t_f: f64) -> Self {
        Self { coeffs, t_f }
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn start(&self) -> f64 {
        self.poly(0.0)
    }

    pub fn end(&self) -> f64 {
        self.poly(1.0)
    }

    fn poly(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    fn poly_d1(&self, s: f64) -> f64 {
        (1..6)
            .rev()
            .fold(0.0, |acc, k| acc * s + k as f64 * self.coeffs[k])
    }

    fn poly_d2(&self, s: f64) -> f64 {
        (2..6).rev().fold(0.0, |acc, k| {
            acc * s + (k * (k - 1)) as f64 * self.coeffs[k]
        })
    }

    pub fn value(&self, t: f64) -> f64 {
        self.poly((t / self.t_f).clamp(0.0, 1.0))
    }

    /// d/dt; zero outside [0, t_f].
    pub fn deriv1(&self, t: f64) -> f64 {
        let s = t / self.t_f;
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        self.poly_d1(s) / self.t_f
    }

    /// d²/dt²; zero outside [0, t_f].
    pub fn deriv2(&self, t: f64) -> f64 {
        let s = t / self.t_f;
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        self.poly_d2(s) / (self.t_f * self.t_f)
    }
}

#[derive(Debug, Clone)]
pub enum ProtocolKind {
    Constant,
    FreeExpansion,
    SuddenQuench,
    LinearRamp,
    /// Shortcut to adiabaticity: the quintic ansatz is the scaling factor b(t)
    /// itself and ω²(t) = ω₀²/b⁴ − b̈/b follows from the Ermakov equation.
    PolynomialSta {
        scaling: PolynomialAnsatz,
    },
    /// Local counterdiabatic drive around a reference schedule ω_R(t):
    /// ω²(t) = ω_R² − (3/4)(ω̇_R/ω_R)² + ω̈_R/(2ω_R).
    LocalCounterdiabatic {
        reference: PolynomialAnsatz,
    },
}

#[derive(Debug, Clone)]
pub struct TrapProtocol {
    kind: ProtocolKind,
    omega0: f64,
    omega_f: f64,
    t_f: f64,
    feasible: bool,
}

impl TrapProtocol {
    pub fn kind(&self) -> &ProtocolKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProtocolKind::Constant => "constant",
            ProtocolKind::FreeExpansion => "free-expansion",
            ProtocolKind::SuddenQuench => "sudden-quench",
            ProtocolKind::LinearRamp => "linear-ramp",
            ProtocolKind::PolynomialSta { .. } => "sta",
            ProtocolKind::LocalCounterdiabatic { .. } => "lcd",
        }
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega_f(&self) -> f64 {
        self.omega_f
    }

    /// Drive duration; zero for schedules that act instantaneously at t = 0.
    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    /// Whether ω²(t) ≥ 0 over the whole drive (scanned on construction).
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    /// Squared trap frequency. Negative values mean an inverted trap.
    pub fn omega_sq(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.omega0 * self.omega0;
        }
        match &self.kind {
            ProtocolKind::Constant => self.omega0 * self.omega0,
            ProtocolKind::FreeExpansion => 0.0,
            ProtocolKind::SuddenQuench => self.omega_f * self.omega_f,
            ProtocolKind::LinearRamp => {
                if t >= self.t_f {
                    self.omega_f * self.omega_f
                } else {
                    let w = self.omega0 + (self.omega_f - self.omega0) * t / self.t_f;
                    w * w
                }
            }
            ProtocolKind::PolynomialSta { scaling } => {
                if t >= self.t_f {
                    self.omega_f * self.omega_f
                } else {
                    sta_omega_sq(scaling, self.omega0, t)
                }
            }
            ProtocolKind::LocalCounterdiabatic { reference } => {
                if t >= self.t_f {
                    self.omega_f * self.omega_f
                } else {
                    lcd_omega_sq(reference, t)
                }
            }
        }
    }

    /// Signed square root of ω²(t): −√|ω²| when the trap is inverted.
    pub fn omega(&self, t: f64) -> f64 {
        let w2 = self.omega_sq(t);
        w2.abs().sqrt().copysign(w2)
    }

    /// Times in (−∞, ∞) where ω(t) or one of its derivatives jumps; the
    /// Ermakov integrator restarts at these points and never steps across.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            ProtocolKind::Constant => vec![],
            ProtocolKind::FreeExpansion | ProtocolKind::SuddenQuench => vec![0.0],
            _ => vec![0.0, self.t_f],
        }
    }

    /// Closed-form scaling factor (b, ḃ) where the schedule admits one.
    /// Valid for all t ≥ 0 (designed schedules sit at the scaling equilibrium
    /// after t_F, so the clamped expressions remain exact solutions).
    pub fn analytic_scaling(&self, t: f64) -> Option<(f64, f64)> {
        if t < 0.0 {
            return match self.kind {
                ProtocolKind::LinearRamp => None,
                _ => Some((1.0, 0.0)),
            };
        }
        match &self.kind {
            ProtocolKind::Constant => Some((1.0, 0.0)),
            ProtocolKind::FreeExpansion => {
                let b = (1.0 + self.omega0 * self.omega0 * t * t).sqrt();
                Some((b, self.omega0 * self.omega0 * t / b))
            }
            ProtocolKind::SuddenQuench => {
                let r = (self.omega0 / self.omega_f).powi(2);
                let (sin, cos) = (self.omega_f * t).sin_cos();
                let b = (1.0 + (r - 1.0) * sin * sin).sqrt();
                Some((b, (r - 1.0) * self.omega_f * sin * cos / b))
            }
            ProtocolKind::LinearRamp => None,
            ProtocolKind::PolynomialSta { scaling } => Some((scaling.value(t), scaling.deriv1(t))),
            ProtocolKind::LocalCounterdiabatic { reference } => {
                let wr = reference.value(t);
                let b = (self.omega0 / wr).sqrt();
                let bdot = -0.5 * self.omega0.sqrt() * reference.deriv1(t) / wr.powf(1.5);
                Some((b, bdot))
            }
        }
    }

    /// Closed-form nonadiabatic factor where the schedule admits one.
    pub fn analytic_qstar(&self, t: f64) -> Option<f64> {
        if t < 0.0 {
            return Some(1.0);
        }
        match &self.kind {
            ProtocolKind::Constant => Some(1.0),
            ProtocolKind::SuddenQuench => {
                let (w0, wf) = (self.omega0, self.omega_f);
                Some((w0 * w0 + wf * wf) / (2.0 * w0 * wf))
            }
            ProtocolKind::LocalCounterdiabatic { reference } if t <= self.t_f => {
                let wr = reference.value(t);
                let wd = reference.deriv1(t);
                let wdd = reference.deriv2(t);
                let w = self.omega(t);
                if w <= 0.0 {
                    return None;
                }
                Some((wr / w) * (1.0 + 0.25 * (wdd / wr.powi(3) - wd * wd / wr.powi(4))))
            }
            ProtocolKind::LocalCounterdiabatic { .. } => Some(1.0),
            ProtocolKind::PolynomialSta { .. } if t >= self.t_f => {
                Some(1.0) // equilibrium at ω_F after the drive ends
            }
            _ => None,
        }
    }
}

fn sta_omega_sq(scaling: &PolynomialAnsatz, omega0: f64, t: f64) -> f64 {
    let b = scaling.value(t);
    (omega0 / (b * b)).powi(2) - scaling.deriv2(t) / b
}

fn lcd_omega_sq(reference: &PolynomialAnsatz, t: f64) -> f64 {
    let wr = reference.value(t);
    let wd = reference.deriv1(t);
    let wdd = reference.deriv2(t);
    wr * wr - 0.75 * (wd / wr).powi(2) + 0.5 * wdd / wr
}

fn check_positive(name: &str, value: f64) -> Result<(), ProtocolError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ProtocolError::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn scan_feasible(protocol: &TrapProtocol) -> bool {
    let floor = -1e-12 * protocol.omega0 * protocol.omega0;
    (0..=SCAN_POINTS)
        .map(|i| protocol.t_f * i as f64 / SCAN_POINTS as f64)
        .all(|t| protocol.omega_sq(t) >= floor)
}

/// Static trap at ω₀.
pub fn make_constant(omega0: f64) -> Result<TrapProtocol, ProtocolError> {
    check_positive("omega0", omega0)?;
    Ok(TrapProtocol {
        kind: ProtocolKind::Constant,
        omega0,
        omega_f: omega0,
        t_f: 0.0,
        feasible: true,
    })
}

/// Trap switched off at t = 0; the cloud expands ballistically with
/// b(t) = √(1 + ω₀²t²).
pub fn make_free_expansion(omega0: f64) -> Result<TrapProtocol, ProtocolError> {
    check_positive("omega0", omega0)?;
    Ok(TrapProtocol {
        kind: ProtocolKind::FreeExpansion,
        omega0,
        omega_f: 0.0,
        t_f: 0.0,
        feasible: true,
    })
}

/// Instantaneous frequency jump ω₀ → ω_F at t = 0. The scaling factor then
/// breathes as b(t) = √(1 + (ω₀²/ω_F² − 1)sin²(ω_F t)).
pub fn make_sudden_quench(omega0: f64, omega_f: f64) -> Result<TrapProtocol, ProtocolError> {
    check_positive("omega0", omega0)?;
    check_positive("omega_f", omega_f)?;
    Ok(TrapProtocol {
        kind: ProtocolKind::SuddenQuench,
        omega0,
        omega_f,
        t_f: 0.0,
        feasible: true,
    })
}

/// Linear frequency sweep ω₀ → ω_F over [0, t_f]; nonanalytic at both ends.
pub fn make_linear_ramp(
    omega0: f64,
    omega_f: f64,
    t_f: f64,
) -> Result<TrapProtocol, ProtocolError> {
    check_positive("omega0", omega0)?;
    check_positive("t_f", t_f)?;
    if !omega_f.is_finite() || omega_f < 0.0 {
        return Err(ProtocolError::InvalidParameter(format!(
            "omega_f must be nonnegative and finite, got {omega_f}"
        )));
    }
    Ok(TrapProtocol {
        kind: ProtocolKind::LinearRamp,
        omega0,
        omega_f,
        t_f,
        feasible: true,
    })
}

/// Reverse-engineered shortcut: impose the quintic scaling trajectory from
/// b(0) = 1 to b(t_F) = √(ω₀/ω_F) and read ω²(t) off the Ermakov equation.
/// Both ω(0) = ω₀ and ω(t_F) = ω_F hold exactly, and b̈ vanishes at the ends,
/// so the state starts and ends at scaling equilibrium (Q* = 1).
pub fn design_sta_reverse(
    omega0: f64,
    omega_f: f64,
    t_f: f64,
) -> Result<TrapProtocol, ProtocolError> {
    check_positive("omega0", omega0)?;
    check_positive("omega_f", omega_f)?;
    check_positive("t_f", t_f)?;
    let b_f = (omega0 / omega_f).sqrt();
    let scaling = PolynomialAnsatz::quintic(1.0, b_f, t_f);
    let mut protocol = TrapProtocol {
        kind: ProtocolKind::PolynomialSta { scaling },
        omega0,
        omega_f,
        t_f,
        feasible: true,
    };
    protocol.feasible = scan_feasible(&protocol);
    Ok(protocol)
}

/// Local counterdiabatic drive for the quintic reference ω_R: ω₀ → ω_F.
pub fn design_lcd(omega0: f64, omega_f: f64, t_f: f64) -> Result<TrapProtocol, ProtocolError> {
    check_positive("omega0", omega0)?;
    check_positive("omega_f", omega_f)?;
    check_positive("t_f", t_f)?;
    design_lcd_reference(PolynomialAnsatz::quintic(omega0, omega_f, t_f))
}

/// Local counterdiabatic drive around an arbitrary polynomial reference.
/// The reference must stay strictly positive and have vanishing first and
/// second derivatives at both endpoints (so that ω = ω_R and b̈ = 0 there);
/// otherwise the dressed trajectory would not start or end at equilibrium.
pub fn design_lcd_reference(reference: PolynomialAnsatz) -> Result<TrapProtocol, ProtocolError> {
    let t_f = reference.t_f();
    check_positive("t_f", t_f)?;
    // the scan includes t = 0 and t = t_f, so it also rejects nonpositive
    // or non-finite endpoint frequencies
    let positive = (0..=SCAN_POINTS)
        .map(|i| t_f * i as f64 / SCAN_POINTS as f64)
        .all(|t| reference.value(t) > 0.0);
    if !positive {
        return Err(ProtocolError::InvalidReference(
            "reference frequency must stay positive on [0, t_f]".into(),
        ));
    }
    let omega0 = reference.start();
    let omega_f = reference.end();

    let scale = omega0.max(omega_f);
    let d1_tol = 1e-12 * scale / t_f;
    let d2_tol = 1e-12 * scale / (t_f * t_f);
    for t in [0.0, t_f] {
        if reference.deriv1(t).abs() > d1_tol || reference.deriv2(t).abs() > d2_tol {
            return Err(ProtocolError::InvalidReference(format!(
                "reference derivatives do not vanish at t = {t}"
            )));
        }
    }

    let mut protocol = TrapProtocol {
        kind: ProtocolKind::LocalCounterdiabatic { reference },
        omega0,
        omega_f,
        t_f,
        feasible: true,
    };
    protocol.feasible = scan_feasible(&protocol);
    Ok(protocol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn quintic_hits_endpoints_with_flat_derivatives() {
        let p = PolynomialAnsatz::quintic(1.0, 4.0, 10.0);
        assert_eq!(p.value(0.0), 1.0);
        assert_eq!(p.value(10.0), 4.0);
        assert_eq!(p.deriv1(0.0), 0.0);
        assert_eq!(p.deriv1(10.0), 0.0);
        assert_eq!(p.deriv2(0.0), 0.0);
        assert_eq!(p.deriv2(10.0), 0.0);
        // clamped outside the drive window
        assert_eq!(p.value(-1.0), 1.0);
        assert_eq!(p.value(11.0), 4.0);
        assert_eq!(p.deriv1(11.0), 0.0);
    }

    #[test]
    fn sudden_quench_is_right_continuous() {
        let p = make_sudden_quench(1.0, 0.5).unwrap();
        assert_eq!(p.omega_sq(-1e-9), 1.0);
        assert_eq!(p.omega_sq(0.0), 0.25);
        assert_eq!(p.omega(0.0), 0.5);
        let (b, bdot) = p.analytic_scaling(std::f64::consts::PI).unwrap();
        assert_close(b, 2.0, 1e-12);
        assert_close(bdot, 0.0, 1e-12);
        // full breathing period returns to b = 1
        let (b, _) = p.analytic_scaling(2.0 * std::f64::consts::PI).unwrap();
        assert_close(b, 1.0, 1e-12);
    }

    #[test]
    fn free_expansion_releases_the_trap() {
        let p = make_free_expansion(2.0).unwrap();
        assert_eq!(p.omega_sq(-0.1), 4.0);
        assert_eq!(p.omega_sq(0.0), 0.0);
        let (b, bdot) = p.analytic_scaling(1.0).unwrap();
        assert_close(b, 5.0f64.sqrt(), 1e-15);
        assert_close(bdot, 4.0 / 5.0f64.sqrt(), 1e-15);
    }

    #[test]
    fn linear_ramp_interpolates() {
        let p = make_linear_ramp(1.0, 0.1, 2.0).unwrap();
        assert_close(p.omega(1.0), 0.55, 1e-15);
        assert_eq!(p.omega(2.0), 0.1);
        assert_eq!(p.omega(5.0), 0.1);
        assert_eq!(p.breakpoints(), vec![0.0, 2.0]);
    }

    #[test]
    fn sta_matches_boundary_frequencies_exactly() {
        let p = design_sta_reverse(1.0, 1.0 / 16.0, 10.0).unwrap();
        assert_close(p.omega_sq(0.0), 1.0, 1e-13);
        assert_close(p.omega_sq(10.0), (1.0f64 / 16.0).powi(2), 1e-13);
        assert!(p.is_feasible());
        let (b, bdot) = p.analytic_scaling(10.0).unwrap();
        assert_close(b, 4.0, 1e-13);
        assert_eq!(bdot, 0.0);
    }

    #[test]
    fn sta_flags_inverted_trap_for_short_drives() {
        // Same b(t_F) = 4 target squeezed into one trap period: the required
        // ω² dives far below zero mid-protocol.
        let p = design_sta_reverse(1.0, 1.0 / 16.0, 1.0).unwrap();
        assert!(!p.is_feasible());
        assert!((0..=100).any(|i| p.omega_sq(i as f64 / 100.0) < 0.0));
    }

    #[test]
    fn lcd_reduces_to_reference_at_endpoints() {
        let p = design_lcd(1.0, 0.5, 2.0).unwrap();
        assert_close(p.omega_sq(0.0), 1.0, 1e-13);
        assert_close(p.omega_sq(2.0), 0.25, 1e-13);
        assert_close(p.analytic_qstar(0.0).unwrap(), 1.0, 1e-13);
        assert_close(p.analytic_qstar(2.0).unwrap(), 1.0, 1e-13);
        // mid-drive the dressed frequency dips below the reference
        let wr = PolynomialAnsatz::quintic(1.0, 0.5, 2.0).value(0.9);
        assert!(p.omega_sq(0.9) < wr * wr);
    }

    #[test]
    fn lcd_with_trivial_reference_is_static() {
        let p = design_lcd(2.0, 2.0, 3.0).unwrap();
        for i in 0..=30 {
            let t = 3.0 * i as f64 / 30.0;
            assert_close(p.omega_sq(t), 4.0, 1e-13);
            let (b, bdot) = p.analytic_scaling(t).unwrap();
            assert_close(b, 1.0, 1e-13);
            assert_close(bdot, 0.0, 1e-13);
        }
    }

    #[test]
    fn lcd_rejects_references_with_sloped_endpoints() {
        // linear-in-s reference: nonzero slope at both ends
        let reference = PolynomialAnsatz::from_coefficients([1.0, -0.5, 0.0, 0.0, 0.0, 0.0], 2.0);
        assert!(matches!(
            design_lcd_reference(reference),
            Err(ProtocolError::InvalidReference(_))
        ));
    }

    #[test]
    fn lcd_rejects_references_that_touch_zero() {
        // quintic from 1 to -0.2 crosses zero inside the window
        let reference = PolynomialAnsatz::quintic(1.0, -0.2, 2.0);
        assert!(matches!(
            design_lcd_reference(reference),
            Err(ProtocolError::InvalidReference(_))
        ));
    }

    #[test]
    fn constructors_reject_nonpositive_scales() {
        assert!(make_constant(0.0).is_err());
        assert!(make_sudden_quench(1.0, -0.5).is_err());
        assert!(make_linear_ramp(1.0, 0.5, 0.0).is_err());
        assert!(design_sta_reverse(1.0, 0.0, 1.0).is_err());
        assert!(design_lcd(1.0, f64::NAN, 1.0).is_err());
    }
}
