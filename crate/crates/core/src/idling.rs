//! Locate the idling flux Φ*: the external flux at which the ground-state
//! effective resonator-resonator coupling κ + g₁(Φ)g₂(Φ)/Δ(Φ) crosses zero.
//!
//! The numeric bisection root is authoritative. The closed form obtained by
//! isolating √Ẽ_J from the same cancellation condition (symmetric circuit,
//! d = 0) is the cross-check; the two agree to well below 10⁻³ Φ₀.

use std::io::{self, Write};

use crate::consts::{HBAR, PHI0};
use crate::effective::effective_params_with_threshold;
use crate::error::{Error, Result};
use crate::params::{derive, CircuitParams};

/// Bisection bracket and tolerance, in units of Φ₀.
#[derive(Clone, Copy, Debug)]
pub struct IdlingConfig {
    pub bracket: (f64, f64),
    /// Absolute tolerance on the root, units of Φ₀.
    pub tol: f64,
    /// Collateral coupling substitution (rad/s) for counterfactual studies.
    pub kappa_override: Option<f64>,
}

impl Default for IdlingConfig {
    fn default() -> Self {
        Self { bracket: (0.5, 1.5), tol: 1e-6, kappa_override: None }
    }
}

/// Ground-state effective coupling as a function of flux (units of Φ₀),
/// with an optional κ substitution. Errors where the qubit frequency or the
/// detuning is undefined.
pub fn g_eff_ground_at(cp: &CircuitParams, flux_over_phi0: f64, kappa_override: Option<f64>) -> Result<f64> {
    let dp = derive(&cp.with_flux(flux_over_phi0 * PHI0))?;
    // Threshold 0: warnings are the caller's business here, the curve must
    // evaluate everywhere the detuning exists.
    let ep = effective_params_with_threshold(&dp, 0.0)?;
    match kappa_override {
        None => Ok(ep.g_eff_ground),
        Some(k) => Ok(k + dp.g1 * dp.g2 / ep.delta),
    }
}

/// Idling flux in units of Φ₀ by bisection on the sign-resolved ground-state
/// coupling, default bracket [0.5, 1.5]·Φ₀, tolerance 10⁻⁶·Φ₀.
///
/// Fails with [`Error::NoIdlingPoint`] when the coupling does not change sign
/// over the bracket — for instance with κ forced to zero, where the only
/// formal solution is the decoupled point Ẽ_J = 0.
pub fn idling_flux_numeric(cp: &CircuitParams) -> Result<f64> {
    idling_flux_numeric_with(cp, &IdlingConfig::default())
}

pub fn idling_flux_numeric_with(cp: &CircuitParams, config: &IdlingConfig) -> Result<f64> {
    let (mut lo, mut hi) = config.bracket;
    assert!(lo < hi, "empty bisection bracket");
    let f = |x: f64| g_eff_ground_at(cp, x, config.kappa_override);
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoIdlingPoint { lo, hi });
    }
    while hi - lo > config.tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form idling flux (units of Φ₀) for the symmetric circuit with
/// identical junctions: isolate the tuned Josephson energy from
/// κ + g²(Ẽ_J)/Δ(Ẽ_J) = 0,
///
/// ```text
/// √Ẽ_J* = 2κ C_T C_R (E_C + ħω_R) / ( √(2E_C) · (C_q²ω_R + 4κ C_T C_R) )
/// ```
///
/// then invert Ẽ_J(Φ) = (E_J1+E_J2)·cos(Φ/2Φ₀):  Φ*/Φ₀ = 2·arccos(Ẽ_J*/ΣE_J).
pub fn idling_flux_closed_form(cp: &CircuitParams) -> Result<f64> {
    cp.validate()?;
    let sym_tol = 1e-12;
    let symmetric = (cp.c_q1 - cp.c_q2).abs() <= sym_tol * cp.c_q1.abs().max(cp.c_q2.abs())
        && (cp.c_r1 - cp.c_r2).abs() <= sym_tol * cp.c_r1
        && (cp.l_r1 - cp.l_r2).abs() <= sym_tol * cp.l_r1
        && cp.d_asym().abs() <= 1e-12;
    if !symmetric {
        return Err(Error::InvalidParams(
            "closed-form idling flux requires a symmetric circuit (g1 = g2, d = 0); use the numeric solver".into(),
        ));
    }
    let dp0 = derive(&cp.with_flux(0.0))?;
    let (e_c, omega_r, kappa) = (dp0.e_c, dp0.omega_r1, dp0.kappa);
    if kappa == 0.0 {
        return Err(Error::NoIdlingPoint { lo: 0.0, hi: 2.0 * std::f64::consts::PI });
    }
    let c_tr = cp.c_t * cp.c_r1;
    let sqrt_ej = 2.0 * kappa * c_tr * (e_c + HBAR * omega_r)
        / ((2.0 * e_c).sqrt() * (cp.c_q1 * cp.c_q1 * omega_r + 4.0 * kappa * c_tr));
    let ej_star = sqrt_ej * sqrt_ej;
    let ej_sum = cp.e_j1 + cp.e_j2;
    if ej_star > ej_sum {
        return Err(Error::IdlingUnreachable { required: ej_star, max: ej_sum });
    }
    Ok(2.0 * (ej_star / ej_sum).acos())
}

/// One sample of the effective-coupling curve; magnitudes in rad/s.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub flux_over_phi0: f64,
    /// |g_eff_ground(Φ)| with the collateral term present.
    pub g_eff_abs: f64,
    /// |g_eff_ground(Φ)| with κ forced to zero.
    pub g_eff_abs_kappa0: f64,
}

/// Both |g_eff_ground| curves over a flux grid: with κ the curve touches zero
/// at Φ*; with κ = 0 it stays finite everywhere the qubit exists.
pub fn effective_coupling_curve(cp: &CircuitParams, flux_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    flux_grid
        .iter()
        .map(|&f| {
            Ok(CurvePoint {
                flux_over_phi0: f,
                g_eff_abs: g_eff_ground_at(cp, f, None)?.abs(),
                g_eff_abs_kappa0: g_eff_ground_at(cp, f, Some(0.0))?.abs(),
            })
        })
        .collect()
}

/// CSV with header `flux_over_phi0,g_eff_abs_hz,g_eff_abs_kappa0_hz`
/// (magnitudes converted to cyclic frequency, Hz).
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], mut w: W) -> io::Result<()> {
    writeln!(w, "flux_over_phi0,g_eff_abs_hz,g_eff_abs_kappa0_hz")?;
    let tau = std::f64::consts::TAU;
    for p in points {
        writeln!(
            w,
            "{:.6},{:.8e},{:.8e}",
            p.flux_over_phi0,
            p.g_eff_abs / tau,
            p.g_eff_abs_kappa0 / tau
        )?;
    }
    Ok(())
}
