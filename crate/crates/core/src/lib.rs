//! Simulation of single-step tripartite GHZ state generation for a trapped
//! ion inside an optical cavity.
//!
//! The three parties are the ion's internal levels `{g, e}`, one vibrational
//! (phonon) mode and one cavity (photon) mode. The ion is driven on the
//! carrier by a resonant laser and coupled to the cavity on the red
//! sideband (`ω₀ − ω_c = ν`). Within a four-state block
//! `{|g,m,n⟩, |e,m,n⟩, |g,m−1,n−1⟩, |e,m−1,n−1⟩}` a pulse of length
//! `t_p = pπ/μ` maps `|g,m−1,n−1⟩` onto the GHZ state
//! `(−1)^p (|g,m−1,n−1⟩ − i|e,m,n⟩)/√2`.
//!
//! Modules, bottom up:
//!
//! * [`fock`]: truncated Fock/qubit algebra, states, partial traces.
//! * [`hamiltonian`]: lab-frame, RWA, Lamb-Dicke and 4×4 block models.
//! * [`evolution`]: closed-form block propagator, eigendecomposition and
//!   fixed-step RK4 engines, interaction-picture transform.
//! * [`protocol`]: coupling tuning, schedules, GHZ targets, fidelity,
//!   protocol runs and parameter sweeps.
//! * [`io`] and [`cli`]: deterministic CSV/JSON tables and the
//!   `ghz-sim` command line.
//!
//! Units: `ħ = 1`, angular frequencies in rad/s and times in seconds. The
//! command line reads "MHz" as `10⁶ rad/s` and reports times in μs.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod hamiltonian;
pub mod io;
pub mod protocol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for every operator.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector used for every state.
pub type CVector = nalgebra::DVector<C64>;
