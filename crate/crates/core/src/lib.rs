//! Simulation of two superconducting microwave resonators coupled capacitively
//! through a flux-tunable transmon.
//!
//! The capacitance network of such a circuit produces, besides the two direct
//! qubit-resonator couplings `g₁, g₂`, a direct resonator-resonator exchange
//! term `κ` ("collateral" coupling) that does not depend on the distance
//! between the resonators. Because the qubit-mediated coupling `g₁g₂/Δ` is
//! flux-tunable while `κ` is not, the two can be brought to cancellation for
//! the qubit ground state: an *idling point* at which resonant resonators stop
//! exchanging photons. The cancellation is qubit-state dependent, which this
//! crate exploits to run a 2N+4-step protocol generating NOON states
//! `(|N,0⟩ + |0,N⟩)/√2` between the resonators.
//!
//! Everything internal is strict SI (farad, henry, joule, radian/second); the
//! CLI converts to GHz/MHz/fF/nH for display only. All frequency-valued fields
//! are angular unless a name says otherwise.
//!
//! Module map:
//! - [`params`]: raw circuit elements and every derived quantity (E_C, Ẽ_J,
//!   ω_q, ω_R, g₁, g₂, κ), plus the exact capacitance matrix.
//! - [`fock`]: truncated Fock-space algebra for the composite R₁ ⊗ Q ⊗ R₂.
//! - [`hamiltonians`]: full exchange (RWA) and extended transmon Hamiltonians.
//! - [`evolve`]: exact propagation by Hermitian eigendecomposition, population
//!   traces, and the time × flux sweep grid.
//! - [`effective`]: dispersive effective two-mode Hamiltonian and the
//!   qubit-state-dependent effective coupling.
//! - [`idling`]: idling-flux solvers (numeric root + closed form) and the
//!   effective-coupling curve.
//! - [`noon`]: the NOON-state pulse sequence, POVM post-selection, and
//!   fidelity scans.
//! - [`optical`]: the analogous mode-mode coupling estimate for an atom in
//!   crossed optical cavities.
//! - [`config`]: the flat key-value config file consumed by the CLI.

pub mod config;
pub mod consts;
pub mod effective;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod hamiltonians;
pub mod idling;
pub mod noon;
pub mod optical;
pub mod params;

pub use error::{Error, Result};
pub use fock::{HilbertSpace, Operator, StateVector, Subsystem};
pub use params::{CircuitParams, DerivedParams};
