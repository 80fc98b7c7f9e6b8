//! Trapped-ion harmonic-oscillator Berry phase simulator.
//!
//! An ion with two internal levels is driven by two Raman pairs that couple
//! it to a vibrational mode through both the red and blue sidebands. When the
//! two couplings differ, the Hamiltonian is a squeezed Jaynes–Cummings model
//! whose eigenstates are squeezed Fock states. Cycling the relative laser
//! phase makes them acquire a geometric phase; two cycles with a flip pulse in
//! between cancel the dynamical phase and map |g⟩|α⟩ to |g⟩|−α⟩.
//!
//! Units: ħ = 1 and all dynamics parameters are angular frequencies. Only
//! [`feasibility`] deals in SI units.

pub mod bosonic;
pub mod error;
pub mod evolve;
pub mod feasibility;
pub mod hilbert;
pub mod model;
pub mod phases;
pub mod protocol;

pub use error::{Error, Result};
pub use hilbert::{Ket, Level, LinOp, QSpace};
pub use num_complex::Complex64 as C64;
