//! C ABI for the scaledyn scaling-dynamics library.
//!
//! The API hands out opaque handles (`SdnProtocol`, `SdnState`,
//! `SdnTrajectory`, `SdnObservables`) that are created by `sdn_*` constructors
//! and released by the matching `sdn_*_destroy`. Every fallible call returns
//! an [`SdnStatus`]; on failure a human-readable message is stored in
//! thread-local storage and stays readable through
//! [`sdn_last_error_message`] until the next failing call on that thread.
//!
//! Sampled series are read out column-wise with `sdn_*_fill`, which writes
//! exactly `len` doubles and insists that `len` equals the handle's sample
//! count — no silent truncation. Entries that are undefined at a sample
//! (the nonadiabatic factor while the trap is unbound, the adiabatic
//! reference energy likewise) fill as NaN.
//!
//! The corresponding C header is generated into `include/scaledyn.h` at build
//! time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};

use scaledyn::ermakov::{self, integrate_ermakov, uniform_grid, ScalingTrajectory};
use scaledyn::observables::{energy_observables, EnergyObservables};
use scaledyn::protocol::{self, TrapProtocol};
use scaledyn::state::{self, StateMoments, Units};

/// Result of every fallible call in this API.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SdnStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A numeric argument or argument combination was rejected.
    InvalidParameter = 2,
    /// The adaptive integrator failed to reach the requested time.
    IntegrationFailed = 3,
    /// The request is well-formed but not defined for these inputs.
    Unsupported = 4,
    /// An internal invariant failed; file a bug.
    Internal = 5,
}

/// Unit system for state constructors; `sdn_units_natural()` gives ħ = m = 1.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct SdnUnits {
    pub hbar: f64,
    pub mass: f64,
}

/// Opaque trap-frequency protocol ω²(t).
pub struct SdnProtocol(TrapProtocol);

/// Opaque initial-state moment table.
pub struct SdnState(StateMoments);

/// Opaque solution b(t), ḃ(t), b̈(t), Q*(t) of the scaling equation.
pub struct SdnTrajectory(ScalingTrajectory);

/// Opaque table of energy observables along a trajectory.
pub struct SdnObservables(EnergyObservables);

/// Column selector for [`sdn_trajectory_fill`].
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SdnTrajectoryColumn {
    Time = 0,
    B,
    Bdot,
    Bddot,
    Omega,
    OmegaSq,
    /// NaN while the trap is unbound (ω ≤ 0).
    Qstar,
}

/// Column selector for [`sdn_observables_fill`].
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SdnObservableColumn {
    Time = 0,
    /// NaN while the trap is unbound (ω ≤ 0).
    Qstar,
    MeanE,
    /// Adiabatic reference energy; NaN while the trap is unbound.
    MeanEAdiabatic,
    MeanE2,
    /// Energy variance clamped to ≥ 0.
    VarE,
    /// Energy variance before the clamp (can undershoot by rounding).
    VarERaw,
    MeanQ,
    MeanQ2,
    MeanC,
    MeanC2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: SdnStatus, msg: impl Display) -> SdnStatus {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).unwrap_or_default());
    status
}

fn protocol_status(e: &protocol::ProtocolError) -> SdnStatus {
    let _ = e;
    SdnStatus::InvalidParameter
}

fn ermakov_status(e: &ermakov::ErmakovError) -> SdnStatus {
    use ermakov::ErmakovError::*;
    match e {
        InvalidTolerance { .. } | InvalidGrid(_) => SdnStatus::InvalidParameter,
        UndefinedQstar { .. } => SdnStatus::Unsupported,
        IntegrationFailure { .. } => SdnStatus::IntegrationFailed,
    }
}

fn state_status(e: &state::StateError) -> SdnStatus {
    use state::StateError::*;
    match e {
        InvalidParameter(_) | DomainError(_) => SdnStatus::InvalidParameter,
        UnsupportedOrder { .. } => SdnStatus::Unsupported,
    }
}

/// # Safety
/// `out` must be valid for writing one pointer.
unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> SdnStatus {
    if out.is_null() {
        return fail(SdnStatus::NullArgument, "out pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    SdnStatus::Ok
}

impl SdnUnits {
    fn to_units(self) -> Units {
        Units {
            hbar: self.hbar,
            mass: self.mass,
        }
    }
}

/// Natural units ħ = m = 1.
#[no_mangle]
pub extern "C" fn sdn_units_natural() -> SdnUnits {
    SdnUnits {
        hbar: 1.0,
        mass: 1.0,
    }
}

/// Message of the most recent failing call on this thread, as a
/// NUL-terminated UTF-8 string. Empty if nothing failed yet. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sdn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sdn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

// ---------------------------------------------------------------------------
// protocols

/// Static trap at `omega0`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_constant(
    omega0: f64,
    out: *mut *mut SdnProtocol,
) -> SdnStatus {
    match protocol::make_constant(omega0) {
        Ok(p) => write_handle(out, SdnProtocol(p)),
        Err(e) => fail(protocol_status(&e), e),
    }
}

/// Trap switched off at t = 0 (free expansion).
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_free_expansion(
    omega0: f64,
    out: *mut *mut SdnProtocol,
) -> SdnStatus {
    match protocol::make_free_expansion(omega0) {
        Ok(p) => write_handle(out, SdnProtocol(p)),
        Err(e) => fail(protocol_status(&e), e),
    }
}

/// Instantaneous jump `omega0` → `omega_f` at t = 0.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_sudden_quench(
    omega0: f64,
    omega_f: f64,
    out: *mut *mut SdnProtocol,
) -> SdnStatus {
    match protocol::make_sudden_quench(omega0, omega_f) {
        Ok(p) => write_handle(out, SdnProtocol(p)),
        Err(e) => fail(protocol_status(&e), e),
    }
}

/// Linear ramp of ω² from `omega0`² to `omega_f`² over [0, t_f].
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_linear_ramp(
    omega0: f64,
    omega_f: f64,
    t_f: f64,
    out: *mut *mut SdnProtocol,
) -> SdnStatus {
    match protocol::make_linear_ramp(omega0, omega_f, t_f) {
        Ok(p) => write_handle(out, SdnProtocol(p)),
        Err(e) => fail(protocol_status(&e), e),
    }
}

/// Shortcut-to-adiabaticity drive: ω²(t) engineered so the scaling factor
/// follows a smooth polynomial from equilibrium at `omega0` to equilibrium at
/// `omega_f` in time `t_f`. Check `sdn_protocol_is_feasible` — fast schedules
/// can require an inverted trap along the way.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_sta(
    omega0: f64,
    omega_f: f64,
    t_f: f64,
    out: *mut *mut SdnProtocol,
) -> SdnStatus {
    match protocol::design_sta_reverse(omega0, omega_f, t_f) {
        Ok(p) => write_handle(out, SdnProtocol(p)),
        Err(e) => fail(protocol_status(&e), e),
    }
}

/// Local counterdiabatic drive dressing a smooth polynomial reference ramp
/// from `omega0` to `omega_f` over [0, t_f].
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_lcd(
    omega0: f64,
    omega_f: f64,
    t_f: f64,
    out: *mut *mut SdnProtocol,
) -> SdnStatus {
    match protocol::design_lcd(omega0, omega_f, t_f) {
        Ok(p) => write_handle(out, SdnProtocol(p)),
        Err(e) => fail(protocol_status(&e), e),
    }
}

/// # Safety
/// `p` must be a pointer returned by a protocol constructor, not yet
/// destroyed, or null (no-op).
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_destroy(p: *mut SdnProtocol) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// ω²(t) of the protocol (right-continuous at jumps).
///
/// # Safety
/// `p` must be a live protocol handle; `out` valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_omega_sq(
    p: *const SdnProtocol,
    t: f64,
    out: *mut f64,
) -> SdnStatus {
    if p.is_null() || out.is_null() {
        return fail(SdnStatus::NullArgument, "protocol or out pointer is null");
    }
    *out = (*p).0.omega_sq(t);
    SdnStatus::Ok
}

/// Whether ω²(t) ≥ 0 over the whole drive (engineered protocols can dip
/// below zero; they are still integrable, but Q* is undefined there).
///
/// # Safety
/// `p` must be a live protocol handle; `out` valid for writing one bool.
#[no_mangle]
pub unsafe extern "C" fn sdn_protocol_is_feasible(
    p: *const SdnProtocol,
    out: *mut bool,
) -> SdnStatus {
    if p.is_null() || out.is_null() {
        return fail(SdnStatus::NullArgument, "protocol or out pointer is null");
    }
    *out = (*p).0.is_feasible();
    SdnStatus::Ok
}

// ---------------------------------------------------------------------------
// initial states

/// Harmonic-oscillator eigenstate `n` prepared in the trap at `omega0`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_state_eigenstate(
    units: SdnUnits,
    n: u32,
    omega0: f64,
    out: *mut *mut SdnState,
) -> SdnStatus {
    match state::qho_eigenstate_in(units.to_units(), n as usize, omega0) {
        Ok(s) => write_handle(out, SdnState(s)),
        Err(e) => fail(state_status(&e), e),
    }
}

/// Thermal (Gibbs) state at inverse temperature `beta` in the trap at
/// `omega0`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_state_thermal(
    units: SdnUnits,
    beta: f64,
    omega0: f64,
    out: *mut *mut SdnState,
) -> SdnStatus {
    match state::qho_thermal_in(units.to_units(), beta, omega0) {
        Ok(s) => write_handle(out, SdnState(s)),
        Err(e) => fail(state_status(&e), e),
    }
}

/// Calogero–Sutherland ground state of `n_particles` at coupling `g` ≥ 0.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_state_csm_ground(
    units: SdnUnits,
    n_particles: u32,
    g: f64,
    omega0: f64,
    out: *mut *mut SdnState,
) -> SdnStatus {
    match state::csm_ground_in(units.to_units(), n_particles as usize, g, omega0) {
        Ok(s) => write_handle(out, SdnState(s)),
        Err(e) => fail(state_status(&e), e),
    }
}

/// Unitary Fermi gas parameterized by its scaled energy variance `sigma2`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_state_unitary_fermi(
    units: SdnUnits,
    sigma2: f64,
    omega0: f64,
    out: *mut *mut SdnState,
) -> SdnStatus {
    match state::unitary_fermi_in(units.to_units(), sigma2, omega0) {
        Ok(s) => write_handle(out, SdnState(s)),
        Err(e) => fail(state_status(&e), e),
    }
}

/// Generic homogeneous state with moment exponent `c` > 0.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_state_homogeneous(
    units: SdnUnits,
    c: f64,
    omega0: f64,
    out: *mut *mut SdnState,
) -> SdnStatus {
    match state::homogeneous_with_units(units.to_units(), c, omega0) {
        Ok(s) => write_handle(out, SdnState(s)),
        Err(e) => fail(state_status(&e), e),
    }
}

/// # Safety
/// `s` must be a pointer returned by a state constructor, not yet destroyed,
/// or null (no-op).
#[no_mangle]
pub unsafe extern "C" fn sdn_state_destroy(s: *mut SdnState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// trajectories

/// Integrate the scaling equation under `p` and sample `n_samples` points
/// uniformly on [0, t_end]. `rel_tol` is the local error target per step,
/// accepted in [1e-13, 1e-6]; 1e-10 is a good default.
///
/// # Safety
/// `p` must be a live protocol handle; `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_trajectory_compute(
    p: *const SdnProtocol,
    t_end: f64,
    n_samples: usize,
    rel_tol: f64,
    out: *mut *mut SdnTrajectory,
) -> SdnStatus {
    if p.is_null() {
        return fail(SdnStatus::NullArgument, "protocol pointer is null");
    }
    if n_samples < 2 {
        return fail(
            SdnStatus::InvalidParameter,
            format!("n_samples must be at least 2, got {n_samples}"),
        );
    }
    let grid = uniform_grid(t_end, n_samples);
    finish_trajectory(&(*p).0, t_end, rel_tol, &grid, out)
}

/// Integrate the scaling equation under `p` and sample at caller-provided
/// `times` (must be finite, start at 0, and be nondecreasing); the
/// integration ends at the last entry.
///
/// # Safety
/// `p` must be a live protocol handle, `times` valid for reading `len`
/// doubles, and `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_trajectory_compute_at(
    p: *const SdnProtocol,
    times: *const f64,
    len: usize,
    rel_tol: f64,
    out: *mut *mut SdnTrajectory,
) -> SdnStatus {
    if p.is_null() || times.is_null() {
        return fail(SdnStatus::NullArgument, "protocol or times pointer is null");
    }
    if len == 0 {
        return fail(SdnStatus::InvalidParameter, "times array is empty");
    }
    let grid = std::slice::from_raw_parts(times, len);
    finish_trajectory(&(*p).0, grid[len - 1], rel_tol, grid, out)
}

/// # Safety
/// `out` must be valid for writing one pointer.
unsafe fn finish_trajectory(
    protocol: &TrapProtocol,
    t_end: f64,
    rel_tol: f64,
    grid: &[f64],
    out: *mut *mut SdnTrajectory,
) -> SdnStatus {
    let result = catch_unwind(AssertUnwindSafe(|| {
        integrate_ermakov(protocol, t_end, rel_tol, grid)
    }));
    match result {
        Ok(Ok(traj)) => write_handle(out, SdnTrajectory(traj)),
        Ok(Err(e)) => fail(ermakov_status(&e), e),
        Err(_) => fail(SdnStatus::Internal, "internal panic during integration"),
    }
}

/// Number of samples held by the trajectory (0 for null).
///
/// # Safety
/// `t` must be a live trajectory handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdn_trajectory_len(t: *const SdnTrajectory) -> usize {
    if t.is_null() {
        0
    } else {
        (*t).0.samples.len()
    }
}

/// Copy one column of the trajectory into `out`. `len` must equal
/// `sdn_trajectory_len(t)` exactly.
///
/// # Safety
/// `t` must be a live trajectory handle and `out` valid for writing `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn sdn_trajectory_fill(
    t: *const SdnTrajectory,
    column: SdnTrajectoryColumn,
    out: *mut f64,
    len: usize,
) -> SdnStatus {
    if t.is_null() || out.is_null() {
        return fail(SdnStatus::NullArgument, "trajectory or out pointer is null");
    }
    let samples = &(*t).0.samples;
    if len != samples.len() {
        return fail(
            SdnStatus::InvalidParameter,
            format!(
                "len is {len} but the trajectory has {} samples",
                samples.len()
            ),
        );
    }
    let dst = std::slice::from_raw_parts_mut(out, len);
    for (d, s) in dst.iter_mut().zip(samples) {
        *d = match column {
            SdnTrajectoryColumn::Time => s.t,
            SdnTrajectoryColumn::B => s.b,
            SdnTrajectoryColumn::Bdot => s.bdot,
            SdnTrajectoryColumn::Bddot => s.bddot,
            SdnTrajectoryColumn::Omega => s.omega,
            SdnTrajectoryColumn::OmegaSq => s.omega_sq,
            SdnTrajectoryColumn::Qstar => s.qstar.unwrap_or(f64::NAN),
        };
    }
    SdnStatus::Ok
}

/// # Safety
/// `t` must be a pointer returned by a trajectory constructor, not yet
/// destroyed, or null (no-op).
#[no_mangle]
pub unsafe extern "C" fn sdn_trajectory_destroy(t: *mut SdnTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

// ---------------------------------------------------------------------------
// observables

/// Evaluate all energy observables of `state` along `traj`. Fails with
/// `SDN_STATUS_INVALID_PARAMETER` if the state was prepared at a different
/// `omega0` than the trajectory's protocol drives from.
///
/// # Safety
/// `traj` and `state` must be live handles; `out` valid for writing one
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sdn_observables_compute(
    traj: *const SdnTrajectory,
    state: *const SdnState,
    out: *mut *mut SdnObservables,
) -> SdnStatus {
    if traj.is_null() || state.is_null() {
        return fail(
            SdnStatus::NullArgument,
            "trajectory or state pointer is null",
        );
    }
    let traj = &(*traj).0;
    let state = &(*state).0;
    let w0 = traj.protocol.omega0();
    if (state.omega0 - w0).abs() > 1e-12 * w0.abs() {
        return fail(
            SdnStatus::InvalidParameter,
            format!(
                "state prepared at omega0 = {} but the protocol drives from omega0 = {}",
                state.omega0, w0
            ),
        );
    }
    match catch_unwind(AssertUnwindSafe(|| energy_observables(traj, state))) {
        Ok(obs) => write_handle(out, SdnObservables(obs)),
        Err(_) => fail(SdnStatus::Internal, "internal panic during evaluation"),
    }
}

/// Number of samples held by the observables table (0 for null).
///
/// # Safety
/// `o` must be a live observables handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdn_observables_len(o: *const SdnObservables) -> usize {
    if o.is_null() {
        0
    } else {
        (*o).0.samples.len()
    }
}

/// Copy one column of the observables table into `out`. `len` must equal
/// `sdn_observables_len(o)` exactly.
///
/// # Safety
/// `o` must be a live observables handle and `out` valid for writing `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn sdn_observables_fill(
    o: *const SdnObservables,
    column: SdnObservableColumn,
    out: *mut f64,
    len: usize,
) -> SdnStatus {
    if o.is_null() || out.is_null() {
        return fail(
            SdnStatus::NullArgument,
            "observables or out pointer is null",
        );
    }
    let samples = &(*o).0.samples;
    if len != samples.len() {
        return fail(
            SdnStatus::InvalidParameter,
            format!("len is {len} but the table has {} samples", samples.len()),
        );
    }
    let dst = std::slice::from_raw_parts_mut(out, len);
    for (d, s) in dst.iter_mut().zip(samples) {
        *d = match column {
            SdnObservableColumn::Time => s.t,
            SdnObservableColumn::Qstar => s.qstar.unwrap_or(f64::NAN),
            SdnObservableColumn::MeanE => s.mean_e,
            SdnObservableColumn::MeanEAdiabatic => s.mean_e_ad.unwrap_or(f64::NAN),
            SdnObservableColumn::MeanE2 => s.mean_e2,
            SdnObservableColumn::VarE => s.var_e,
            SdnObservableColumn::VarERaw => s.var_e_raw,
            SdnObservableColumn::MeanQ => s.mean_q,
            SdnObservableColumn::MeanQ2 => s.mean_q2,
            SdnObservableColumn::MeanC => s.mean_c,
            SdnObservableColumn::MeanC2 => s.mean_c2,
        };
    }
    SdnStatus::Ok
}

/// # Safety
/// `o` must be a pointer returned by `sdn_observables_compute`, not yet
/// destroyed, or null (no-op).
#[no_mangle]
pub unsafe extern "C" fn sdn_observables_destroy(o: *mut SdnObservables) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

// ---------------------------------------------------------------------------
// scalar helpers

/// Nonadiabatic factor Q*(b, ḃ; ω, ω₀). Fails with `SDN_STATUS_UNSUPPORTED`
/// when ω ≤ 0 (factor undefined in an unbound trap).
///
/// # Safety
/// `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn sdn_nonadiabatic_factor(
    b: f64,
    bdot: f64,
    omega: f64,
    omega0: f64,
    out: *mut f64,
) -> SdnStatus {
    if out.is_null() {
        return fail(SdnStatus::NullArgument, "out pointer is null");
    }
    match ermakov::nonadiabatic_factor(b, bdot, omega, omega0) {
        Ok(q) => {
            *out = q;
            SdnStatus::Ok
        }
        Err(e) => fail(ermakov_status(&e), e),
    }
}
