//! Flat key-value config file (TOML syntax) consumed by the CLI.
//!
//! Units are declared per key by suffix: `C_T_fF`, `L_R1_nH`, `E_J_over_EC`,
//! `phi_ext_over_phi0`. Everything converts to strict SI on load. The
//! optional `optical_*` keys configure the crossed-cavity estimate; the
//! linewidth carries its unit in the key name (`optical_gamma_rad_per_s` or
//! `optical_gamma_over_2pi_Hz`, exactly one).

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

use crate::consts::{E_CHARGE, PHI0};
use crate::error::{Error, Result};
use crate::optical::CavityParams;
use crate::params::CircuitParams;

const FF: f64 = 1e-15;
const NH: f64 = 1e-9;
const UM3: f64 = 1e-18;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ConfigFile {
    pub C_T_fF: f64,
    pub C_q1_fF: f64,
    pub C_q2_fF: f64,
    pub C_R1_fF: f64,
    pub C_R2_fF: f64,
    pub L_R1_nH: f64,
    pub L_R2_nH: f64,
    /// Per-junction Josephson energy in units of E_C = e²/2C_T.
    pub E_J_over_EC: f64,
    /// Junction asymmetry d; the two junction energies are E_J(1 ± d).
    #[serde(default)]
    pub d_asym: f64,
    #[serde(default)]
    pub C_R1R2_fF: f64,
    pub phi_ext_over_phi0: f64,
    /// "Much greater than" factor for the validity warnings.
    #[serde(default = "default_threshold")]
    pub validity_threshold: f64,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_V_um3: Option<f64>,
    /// Atomic transition frequency, cyclic THz (defaults to 429.2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_omega_a_over_2pi_THz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_gamma_rad_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_gamma_over_2pi_Hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_dipole_Cm: Option<f64>,
}

fn default_threshold() -> f64 {
    crate::params::DEFAULT_VALIDITY_THRESHOLD
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parse config text; TOML syntax errors keep their line/column info.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_circuit_params(&self) -> Result<CircuitParams> {
        let c_t = self.C_T_fF * FF;
        if !(c_t > 0.0) {
            return Err(Error::Config("C_T_fF must be positive".into()));
        }
        let e_c = E_CHARGE * E_CHARGE / (2.0 * c_t);
        let e_j = self.E_J_over_EC * e_c;
        let cp = CircuitParams {
            c_t,
            c_q1: self.C_q1_fF * FF,
            c_q2: self.C_q2_fF * FF,
            c_r1: self.C_R1_fF * FF,
            c_r2: self.C_R2_fF * FF,
            l_r1: self.L_R1_nH * NH,
            l_r2: self.L_R2_nH * NH,
            e_j1: e_j * (1.0 + self.d_asym),
            e_j2: e_j * (1.0 - self.d_asym),
            c_r1r2: self.C_R1R2_fF * FF,
            phi_ext: self.phi_ext_over_phi0 * PHI0,
        };
        cp.validate()?;
        Ok(cp)
    }

    pub fn to_cavity_params(&self) -> Result<CavityParams> {
        let volume = self
            .optical_V_um3
            .ok_or_else(|| Error::Config("missing key optical_V_um3".into()))?
            * UM3;
        let gamma = match (self.optical_gamma_rad_per_s, self.optical_gamma_over_2pi_Hz) {
            (Some(g), None) => g,
            (None, Some(hz)) => TAU * hz,
            (None, None) => {
                return Err(Error::Config(
                    "missing linewidth: set optical_gamma_rad_per_s or optical_gamma_over_2pi_Hz".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set only one of optical_gamma_rad_per_s and optical_gamma_over_2pi_Hz".into(),
                ))
            }
        };
        let omega_a = TAU * self.optical_omega_a_over_2pi_THz.unwrap_or(429.2) * 1e12;
        let mut cavity = CavityParams::resonant(volume, omega_a, gamma);
        cavity.dipole_moment = self.optical_dipole_Cm;
        cavity.validate()?;
        Ok(cavity)
    }
}
