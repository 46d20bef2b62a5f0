//! Exact nonadiabatic dynamics of scale-invariant quantum systems in
//! time-dependent harmonic traps.
//!
//! For a gas whose interactions are scale invariant (single particles, ideal
//! gases, Calogero–Sutherland models, the unitary Fermi gas), changing the
//! trap frequency ω(t) does not mix the many-body spectrum: the full
//! evolution is a dilation by one scaling factor b(t) obeying the Ermakov
//! equation, and every energy moment follows in closed form from the t = 0
//! moments of three operators — the Hamiltonian H₀, Q = x², and the
//! symmetrized dilation generator C = (xp + px)/2.
//!
//! The crate computes, for five driving protocols ([`protocol`]):
//!
//! * the scaling factor b(t) and the nonadiabatic factor Q*(t) ([`ermakov`]),
//! * mean energy, energy fluctuations, and Q/C moment flows ([`observables`])
//!   for several state families ([`state`]),
//! * and validates all of it against an independent Fock-basis Schrödinger
//!   integration ([`oracle`]).
//!
//! [`config`] and [`output`] back the `scaledyn` command-line binary.
//!
//! # Example
//!
//! ```
//! use scaledyn::{ermakov, observables, protocol, state};
//!
//! // quench the trap to half its frequency and watch the mean energy freeze
//! let p = protocol::make_sudden_quench(1.0, 0.5).unwrap();
//! let grid = ermakov::uniform_grid(10.0, 101);
//! let traj = ermakov::integrate_ermakov(&p, 10.0, 1e-10, &grid).unwrap();
//! let ground = state::qho_eigenstate(0, 1.0).unwrap();
//! let obs = observables::energy_observables(&traj, &ground);
//! for o in &obs.samples {
//!     assert!((o.mean_e - 0.3125).abs() < 1e-10);
//! }
//! ```

pub mod config;
pub mod ermakov;
pub mod observables;
pub mod oracle;
pub mod output;
pub mod protocol;
pub mod state;

pub use ermakov::{integrate_ermakov, ScalingTrajectory};
pub use observables::{energy_observables, EnergyObservables};
pub use protocol::TrapProtocol;
pub use state::{StateMoments, Units};
