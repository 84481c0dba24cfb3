//! Physical constants, strict SI (CODATA 2018).

/// Fundamental constants in SI units.
///
/// `flux_quantum` is Φ₀ = ħ/(2e) — note ħ, not h. With this convention the
/// tuned Josephson energy is 2π-periodic in Φ_ext/(2Φ₀) and the junction
/// phase variable is φ/Φ₀.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// Elementary charge e (coulomb).
    pub elementary_charge: f64,
    /// Reduced Planck constant ħ (joule second).
    pub reduced_planck: f64,
    /// Flux quantum Φ₀ = ħ/2e (weber), computed from the two fields above.
    pub flux_quantum: f64,
    /// Vacuum permittivity ε₀ (farad/meter).
    pub vacuum_permittivity: f64,
    /// Speed of light c (meter/second).
    pub light_speed: f64,
    /// Electron mass m_e (kilogram).
    pub electron_mass: f64,
}

impl PhysicalConstants {
    pub const fn si() -> Self {
        let e = 1.602_176_634e-19;
        let hbar = 1.054_571_817e-34;
        Self {
            elementary_charge: e,
            reduced_planck: hbar,
            flux_quantum: hbar / (2.0 * e),
            vacuum_permittivity: 8.854_187_812_8e-12,
            light_speed: 2.997_924_58e8,
            electron_mass: 9.109_383_701_5e-31,
        }
    }
}

/// The CODATA 2018 values used by every formula in this crate.
pub const SI: PhysicalConstants = PhysicalConstants::si();

/// Elementary charge (C).
pub const E_CHARGE: f64 = SI.elementary_charge;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = SI.reduced_planck;
/// Flux quantum ħ/2e (Wb).
pub const PHI0: f64 = SI.flux_quantum;
