//! Raw circuit elements and the physical quantities derived from them.
//!
//! The circuit is two LC resonators (R₁, R₂) capacitively coupled through a
//! transmon box (total capacitance `C_T`, split-junction energies `E_J1`,
//! `E_J2` tuned by an external flux). Inverting the capacitance network gives
//! three interaction channels: the qubit-resonator couplings `g₁`, `g₂` and a
//! direct resonator-resonator ("collateral") coupling `κ` that scales as
//! `C_q1·C_q2` and is independent of the external flux.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::consts::{E_CHARGE, HBAR, PHI0};
use crate::error::{Error, Result};

/// Raw electrical elements, strict SI.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Total qubit box capacitance C_T = C_J + C_B (farad).
    pub c_t: f64,
    /// Qubit-resonator coupling capacitances (farad).
    pub c_q1: f64,
    pub c_q2: f64,
    /// Resonator capacitances (farad).
    pub c_r1: f64,
    pub c_r2: f64,
    /// Resonator inductances (henry).
    pub l_r1: f64,
    pub l_r2: f64,
    /// Josephson energies of the two junctions in the loop (joule).
    pub e_j1: f64,
    pub e_j2: f64,
    /// Optional direct parasitic capacitance between the resonators (farad).
    pub c_r1r2: f64,
    /// External flux through the qubit loop (weber).
    pub phi_ext: f64,
}

impl CircuitParams {
    /// Symmetric circuit: identical resonators, identical coupling capacitors,
    /// identical junctions with per-junction energy `e_j_over_ec · E_C`.
    pub fn symmetric(c_t: f64, c_q: f64, c_r: f64, l_r: f64, e_j_over_ec: f64, phi_ext: f64) -> Self {
        let e_c = E_CHARGE * E_CHARGE / (2.0 * c_t);
        let e_j = e_j_over_ec * e_c;
        Self {
            c_t,
            c_q1: c_q,
            c_q2: c_q,
            c_r1: c_r,
            c_r2: c_r,
            l_r1: l_r,
            l_r2: l_r,
            e_j1: e_j,
            e_j2: e_j,
            c_r1r2: 0.0,
            phi_ext,
        }
    }

    /// Same circuit with the external flux replaced.
    pub fn with_flux(&self, phi_ext: f64) -> Self {
        Self { phi_ext, ..*self }
    }

    /// Junction asymmetry d = (E_J1 − E_J2)/(E_J1 + E_J2).
    pub fn d_asym(&self) -> f64 {
        (self.e_j1 - self.e_j2) / (self.e_j1 + self.e_j2)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("C_T", self.c_t),
            ("C_R1", self.c_r1),
            ("C_R2", self.c_r2),
            ("L_R1", self.l_r1),
            ("L_R2", self.l_r2),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be strictly positive, got {v:e}")));
            }
        }
        let nonneg = [
            ("C_q1", self.c_q1),
            ("C_q2", self.c_q2),
            ("C_R1R2", self.c_r1r2),
            ("E_J1", self.e_j1),
            ("E_J2", self.e_j2),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be nonnegative, got {v:e}")));
            }
        }
        if !(self.e_j1 + self.e_j2 > 0.0) {
            return Err(Error::InvalidParams("E_J1 + E_J2 must be strictly positive".into()));
        }
        if !self.phi_ext.is_finite() {
            return Err(Error::InvalidParams("phi_ext must be finite".into()));
        }
        Ok(())
    }
}

/// Quantities derived from [`CircuitParams`]. Frequencies are angular (rad/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Charging energy E_C = e²/(2 C_T) (joule).
    pub e_c: f64,
    /// Flux-tuned Josephson energy Ẽ_J ≥ 0 (joule).
    pub e_j_tilde: f64,
    /// Qubit angular frequency, ħω_q = √(8 E_C Ẽ_J) − E_C.
    pub omega_q: f64,
    /// Resonator angular frequencies ω_Rk = 1/√(C_Rk L_Rk).
    pub omega_r1: f64,
    pub omega_r2: f64,
    /// Qubit-resonator couplings (rad/s), negative by the charge-coupling
    /// sign convention.
    pub g1: f64,
    pub g2: f64,
    /// Collateral resonator-resonator coupling (rad/s), positive whenever
    /// both coupling capacitors are present. Independent of the flux.
    pub kappa: f64,
    /// Zero-point energies ε_Rk = ħω_Rk/2 (joule).
    pub eps_r1: f64,
    pub eps_r2: f64,
    /// Detuning Δ = ω_q − ω_R, defined only for degenerate resonators.
    pub delta: Option<f64>,
}

/// Relative tolerance under which the two resonators count as degenerate.
const DEGENERACY_RTOL: f64 = 1e-9;

/// Flux-tuned Josephson energy of the split junction loop,
/// Ẽ_J = (E_J1 + E_J2)·√(cos²x + d²·sin²x) with x = Φ_ext/(2Φ₀).
///
/// This is the |cos| branch: Ẽ_J ≥ 0 for all flux, so the qubit spectrum is
/// well defined on sweeps past Φ_ext/Φ₀ = 1. Zeros occur only for d = 0 at
/// odd multiples of πΦ₀.
pub fn josephson_energy(cp: &CircuitParams) -> f64 {
    let x = cp.phi_ext / (2.0 * PHI0);
    let d = cp.d_asym();
    let (s, c) = x.sin_cos();
    (cp.e_j1 + cp.e_j2) * (c * c + d * d * s * s).sqrt()
}

/// Populate every derived quantity from the raw elements.
///
/// Fails when the tuned Josephson energy leaves the qubit frequency
/// undefined (ω_q ≤ 0).
pub fn derive(cp: &CircuitParams) -> Result<DerivedParams> {
    cp.validate()?;
    let e_c = E_CHARGE * E_CHARGE / (2.0 * cp.c_t);
    let e_j_tilde = josephson_energy(cp);
    let hw_q = (8.0 * e_c * e_j_tilde).sqrt() - e_c;
    if hw_q <= 0.0 {
        return Err(Error::QubitFrequencyUndefined { ej_tilde: e_j_tilde });
    }
    let omega_q = hw_q / HBAR;
    let omega_r1 = 1.0 / (cp.c_r1 * cp.l_r1).sqrt();
    let omega_r2 = 1.0 / (cp.c_r2 * cp.l_r2).sqrt();
    let eps_r1 = HBAR * omega_r1 / 2.0;
    let eps_r2 = HBAR * omega_r2 / 2.0;
    let g1 = -(cp.c_q1 / (cp.c_t * cp.c_r1).sqrt())
        * (2.0 * e_c * e_j_tilde * eps_r1 * eps_r1).powf(0.25)
        / HBAR;
    let g2 = -(cp.c_q2 / (cp.c_t * cp.c_r2).sqrt())
        * (2.0 * e_c * e_j_tilde * eps_r2 * eps_r2).powf(0.25)
        / HBAR;
    let kappa = cp.c_q1 * cp.c_q2 / (cp.c_t * (cp.c_r1 * cp.c_r2).sqrt()) * (eps_r1 * eps_r2).sqrt()
        / HBAR;
    let delta = if (omega_r1 - omega_r2).abs() <= DEGENERACY_RTOL * omega_r1.max(omega_r2) {
        Some(omega_q - omega_r1)
    } else {
        None
    };
    Ok(DerivedParams {
        e_c,
        e_j_tilde,
        omega_q,
        omega_r1,
        omega_r2,
        g1,
        g2,
        kappa,
        eps_r1,
        eps_r2,
        delta,
    })
}

/// The full 3×3 capacitance matrix of the network over the node fluxes
/// (φ_J, φ_R1, φ_R2), with no small-capacitance approximation.
pub fn capacitance_matrix(cp: &CircuitParams) -> Matrix3<f64> {
    Matrix3::new(
        cp.c_t + cp.c_q1 + cp.c_q2,
        -cp.c_q1,
        -cp.c_q2,
        -cp.c_q1,
        cp.c_r1 + cp.c_q1 + cp.c_r1r2,
        -cp.c_r1r2,
        -cp.c_q2,
        -cp.c_r1r2,
        cp.c_r2 + cp.c_q2 + cp.c_r1r2,
    )
}

/// Approximate inverse capacitance matrix, valid for C_T ≫ C_qk and
/// C_Rk ≫ C_qk. Entry (1,2) carries the resonator-resonator charge coupling.
pub fn approx_inverse_capacitance_matrix(cp: &CircuitParams) -> Matrix3<f64> {
    let det = cp.c_t * (cp.c_r1 * cp.c_r2 + cp.c_r1r2 * (cp.c_r1 + cp.c_r2));
    Matrix3::new(
        1.0 / cp.c_t,
        cp.c_q1 * cp.c_r2 / det,
        cp.c_q2 * cp.c_r1 / det,
        cp.c_q1 * cp.c_r2 / det,
        cp.c_t * (cp.c_r2 + cp.c_r1r2) / det,
        (cp.c_q1 * cp.c_q2 + cp.c_r1r2 * cp.c_t) / det,
        cp.c_q2 * cp.c_r1 / det,
        (cp.c_q1 * cp.c_q2 + cp.c_r1r2 * cp.c_t) / det,
        cp.c_t * (cp.c_r1 + cp.c_r1r2) / det,
    )
}

/// Generalized resonator-resonator coupling including the optional direct
/// parasitic capacitance: the charge-coupling coefficient
/// (C_q1·C_q2 + C_R1R2·C_T)/Det(Ĉ) converted to angular frequency with the
/// same zero-point factors as the collateral formula. Reduces exactly to
/// `derive().kappa` when C_R1R2 = 0.
pub fn collateral_with_parasitic(cp: &CircuitParams) -> Result<f64> {
    cp.validate()?;
    let omega_r1 = 1.0 / (cp.c_r1 * cp.l_r1).sqrt();
    let omega_r2 = 1.0 / (cp.c_r2 * cp.l_r2).sqrt();
    let eps = (HBAR * omega_r1 / 2.0 * HBAR * omega_r2 / 2.0).sqrt();
    let det = cp.c_t * (cp.c_r1 * cp.c_r2 + cp.c_r1r2 * (cp.c_r1 + cp.c_r2));
    let charge_coef = (cp.c_q1 * cp.c_q2 + cp.c_r1r2 * cp.c_t) / det;
    Ok(charge_coef * (cp.c_r1 * cp.c_r2).sqrt() * eps / HBAR)
}

/// Regime checks behind the model: they warn, they never fail a derivation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityChecks {
    /// C_T ≥ threshold · C_qk.
    pub small_cq_vs_ct: bool,
    /// C_Rk ≥ threshold · C_qk.
    pub small_cq_vs_cr: bool,
    /// min(ω_q, ω_Rk) ≥ threshold · max(|g_k|, κ), the condition behind the
    /// excitation-conserving (rotating-wave) form of the Hamiltonian.
    pub rwa: bool,
    /// The "≫" factor used for all three checks.
    pub threshold: f64,
}

pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 10.0;

pub fn check_validity(cp: &CircuitParams, dp: &DerivedParams, threshold: f64) -> ValidityChecks {
    let cq_max = cp.c_q1.max(cp.c_q2);
    let coupling_max = dp.g1.abs().max(dp.g2.abs()).max(dp.kappa);
    let freq_min = dp.omega_q.min(dp.omega_r1).min(dp.omega_r2);
    ValidityChecks {
        small_cq_vs_ct: cp.c_t >= threshold * cq_max,
        small_cq_vs_cr: cp.c_r1.min(cp.c_r2) >= threshold * cq_max,
        rwa: freq_min >= threshold * coupling_max,
        threshold,
    }
}

impl ValidityChecks {
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.small_cq_vs_ct {
            w.push(format!(
                "C_T is not large against the coupling capacitances (threshold {}): the quadratic network expansion degrades",
                self.threshold
            ));
        }
        if !self.small_cq_vs_cr {
            w.push(format!(
                "C_Rk is not large against the coupling capacitances (threshold {})",
                self.threshold
            ));
        }
        if !self.rwa {
            w.push(format!(
                "couplings are not small against the mode frequencies (threshold {}): the excitation-conserving Hamiltonian is questionable",
                self.threshold
            ));
        }
        w
    }
}
