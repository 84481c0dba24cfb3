//! Mode-mode coupling for an atom in crossed optical cavities.
//!
//! The diamagnetic q²A²/2m term of a charged particle in a radiation field
//! couples two confined modes directly, the optical analogue of the circuit's
//! collateral term: κ_c = q²/(4 m ε₀ V √(ω₁ω₂)), with q and m the valence
//! electron charge and mass and V the mode volume. Against the atom-mode
//! coupling g = d√(ω_a/2ε₀ħV) this gives the volume- and linewidth-only ratio
//! g/κ_c = m ε₀ √(24π V c³ Γ)/q².
//!
//! Γ is stored as an angular rate (s⁻¹). The "≈ 40 for a mHz-class clock
//! transition at V ~ 10⁴ µm³" landmark is reproduced by Γ = 1×10⁻³ s⁻¹; the
//! cyclic reading Γ/2π = 1 mHz gives ≈ 112 instead, so the angular reading is
//! the documented convention (config keys carry an explicit unit tag).

use serde::{Deserialize, Serialize};

use crate::consts::{HBAR, SI};
use crate::error::{Error, Result};

/// Crossed-cavity and atom parameters, SI. Frequencies and Γ are angular.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Mode volume (m³).
    pub mode_volume: f64,
    /// Mode frequencies (rad/s).
    pub omega1: f64,
    pub omega2: f64,
    /// Atomic transition frequency (rad/s).
    pub omega_a: f64,
    /// Transition linewidth (rad/s).
    pub gamma: f64,
    /// Electric dipole moment (C·m); derivable from Γ when absent.
    pub dipole_moment: Option<f64>,
}

impl CavityParams {
    /// Resonant case ω₁ = ω₂ = ω_a.
    pub fn resonant(mode_volume: f64, omega_a: f64, gamma: f64) -> Self {
        Self { mode_volume, omega1: omega_a, omega2: omega_a, omega_a, gamma, dipole_moment: None }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mode_volume", self.mode_volume),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega_a", self.omega_a),
            ("gamma", self.gamma),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v:e}")));
            }
        }
        if let Some(d) = self.dipole_moment {
            let implied = dipole_from_linewidth(self);
            if (d - implied).abs() > 0.01 * implied {
                return Err(Error::InvalidParams(format!(
                    "dipole moment {d:e} C·m inconsistent with the linewidth (Γ implies {implied:e})"
                )));
            }
        }
        Ok(())
    }
}

/// κ_c = q²/(4 m ε₀ V √(ω₁ω₂)) (rad/s).
pub fn kappa_c(cp: &CavityParams) -> f64 {
    let q = SI.elementary_charge;
    q * q / (4.0 * SI.electron_mass * SI.vacuum_permittivity * cp.mode_volume * (cp.omega1 * cp.omega2).sqrt())
}

/// Dipole moment implied by Γ = ω_a³ d²/(3π ε₀ ħ c³).
pub fn dipole_from_linewidth(cp: &CavityParams) -> f64 {
    let c3 = SI.light_speed.powi(3);
    (3.0 * std::f64::consts::PI * SI.vacuum_permittivity * HBAR * c3 * cp.gamma / cp.omega_a.powi(3)).sqrt()
}

/// Atom-mode coupling g = d √(ω_a / 2ε₀ħV) (rad/s), using the stored dipole
/// moment or the one implied by the linewidth.
pub fn atom_coupling(cp: &CavityParams) -> f64 {
    let d = cp.dipole_moment.unwrap_or_else(|| dipole_from_linewidth(cp));
    d * (cp.omega_a / (2.0 * SI.vacuum_permittivity * HBAR * cp.mode_volume)).sqrt()
}

/// g/κ_c = m ε₀ √(24π V c³ Γ)/q², directly from volume and linewidth.
pub fn g_over_kappa_c(cp: &CavityParams) -> f64 {
    let q = SI.elementary_charge;
    SI.electron_mass * SI.vacuum_permittivity
        * (24.0 * std::f64::consts::PI * cp.mode_volume * SI.light_speed.powi(3) * cp.gamma).sqrt()
        / (q * q)
}

/// Everything the CLI report prints.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OpticalReport {
    pub kappa_c_rad_per_s: f64,
    pub g_rad_per_s: f64,
    pub ratio_g_over_kappa_c: f64,
    /// Same ratio recomputed as g(d)/κ_c; equals the direct formula to < 1%
    /// whenever d comes from the linewidth identity.
    pub ratio_cross_check: f64,
}

pub fn report(cp: &CavityParams) -> Result<OpticalReport> {
    cp.validate()?;
    let kc = kappa_c(cp);
    let g = atom_coupling(cp);
    Ok(OpticalReport {
        kappa_c_rad_per_s: kc,
        g_rad_per_s: g,
        ratio_g_over_kappa_c: g_over_kappa_c(cp),
        ratio_cross_check: g / kc,
    })
}
