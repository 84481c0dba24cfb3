//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid circuit parameter: {0}")]
    InvalidParams(String),

    #[error("qubit frequency undefined at this flux (effective Josephson energy {ej_tilde:.6e} J)")]
    QubitFrequencyUndefined { ej_tilde: f64 },

    #[error("resonators are not degenerate (omega_R1 = {omega_r1:.6e}, omega_R2 = {omega_r2:.6e} rad/s); no common detuning is defined")]
    NonDegenerateResonators { omega_r1: f64, omega_r2: f64 },

    #[error("dispersive regime undefined on resonance (Delta = 0)")]
    DispersiveOnResonance,

    #[error("no idling point in range [{lo}, {hi}] (flux quanta): effective ground-state coupling does not change sign")]
    NoIdlingPoint { lo: f64, hi: f64 },

    #[error("idling point unreachable for this E_J (requires tuned Josephson energy {required:.6e} J > maximum {max:.6e} J)")]
    IdlingUnreachable { required: f64, max: f64 },

    #[error("operator is not Hermitian (relative deviation {deviation:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("basis index out of range: (n1={n1}, q={q}, n2={n2}) for n_max={n_max}, qubit_levels={qubit_levels}")]
    IndexOutOfRange {
        n1: usize,
        q: usize,
        n2: usize,
        n_max: usize,
        qubit_levels: usize,
    },

    #[error("photon number {n} exceeds the Fock truncation n_max = {n_max}")]
    Truncation { n: usize, n_max: usize },

    #[error("operation requires qubit_levels = {required}, space has {actual}")]
    QubitLevels { required: usize, actual: usize },

    #[error("flux domain error over the entire requested range: {0}")]
    EmptyFluxRange(String),

    #[error("config error: {0}")]
    Config(String),
}
