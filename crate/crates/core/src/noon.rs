//! NOON-state generation between the two resonators.
//!
//! The sequence exploits the state dependence of the idling point. With the
//! qubit parked at the idling flux Φ*, the ground-state effective coupling
//! vanishes while the excited-state coupling equals 2κ, so photons move
//! between the resonators only when the qubit is excited:
//!
//! 1. Load N photons into R₁ (N × [π-pulse; resonant swap], time τ₁).
//! 2. π/2-pulse on the qubit: (|N,g,0⟩ + |N,e,0⟩)/√2.
//! 3. Idle at Φ* for τ₂ = π/(2|g_eff_excited|): the excited component swaps
//!    to |0,e,N⟩, the ground component is frozen.
//! 4. Second π/2-pulse, then a projective qubit measurement. Either outcome
//!    post-selects a NOON state (|N,0⟩ ± e^{iθ}|0,N⟩)/√2 of the resonators,
//!    with equal probability.
//!
//! 2N prep steps + 4 protocol steps = 2N + 4 total.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use crate::consts::PHI0;
use crate::effective::effective_params_with_threshold;
use crate::error::{Error, Result};
use crate::evolve::Propagator;
use crate::fock::{basis_state, embed, HilbertSpace, Operator, StateVector, Subsystem, QUBIT_EXCITED, QUBIT_GROUND};
use crate::hamiltonians::{full_rwa, full_rwa_with, ModeOverrides};
use crate::idling::idling_flux_numeric;
use crate::params::{derive, CircuitParams};

/// Default detuning of R₂ during loading, in units of |g₂|.
pub const DEFAULT_DETUNE_MULTIPLE: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    SwapPulse,
    PiPulse,
    HalfPiPulse,
    IdleEvolution,
    Measure,
}

/// One entry of the pulse-sequence log. Instantaneous pulses have zero
/// duration but still count as steps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolStep {
    pub kind: StepKind,
    /// Seconds; 0 for instantaneous pulses and the measurement.
    pub duration: f64,
    /// External flux during the step (weber).
    pub flux_setting: f64,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepMode {
    /// Jump straight to |N, g, 0⟩; τ₁ is still reported.
    Ideal,
    /// Simulate the loading cycles under the full Hamiltonian with R₁ tuned
    /// to the qubit and R₂ detuned.
    Simulated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitOutcome {
    Ground,
    Excited,
}

/// One post-selected branch of the protocol.
#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub outcome: QubitOutcome,
    /// Renormalized post-measurement state; `None` when the branch
    /// probability is below 1e-12.
    pub post_state: Option<StateVector>,
    pub probability: f64,
    /// max over the relative phase θ' of |⟨NOON(θ')|Ψ⟩|².
    pub fidelity: f64,
    /// The maximizing relative phase (radian).
    pub theta: f64,
    /// τ₁ + τ₂ (seconds).
    pub total_time: f64,
    pub step_log: Vec<ProtocolStep>,
}

/// Both branches of one protocol execution.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub ground: ProtocolResult,
    pub excited: ProtocolResult,
    /// Idling flux used, units of Φ₀.
    pub idling_flux_over_phi0: f64,
    pub tau1: f64,
    pub tau2: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ProtocolOptions {
    pub prep_mode: PrepMode,
    /// R₂ detuning during loading, units of |g₂|.
    pub detune_multiple: f64,
    /// Fock truncation; `None` means N + 2.
    pub n_max: Option<usize>,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self { prep_mode: PrepMode::Ideal, detune_multiple: DEFAULT_DETUNE_MULTIPLE, n_max: None }
    }
}

/// Qubit rotation acting on the {|g⟩, |e⟩} block (identity on any higher
/// transmon level).
fn qubit_rotation(space: HilbertSpace, block: [[f64; 2]; 2]) -> Operator {
    let ql = space.qubit_levels();
    let mut m = DMatrix::<Complex64>::identity(ql, ql);
    for (i, row) in block.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = Complex64::new(v, 0.0);
        }
    }
    embed(space, Subsystem::Q, &m)
}

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// π/2 rotation: |g⟩ → (|g⟩+|e⟩)/√2, |e⟩ → (−|g⟩+|e⟩)/√2. The rotation axis
/// is a fixed convention; any other axis only changes the relative phase θ,
/// which the fidelity already maximizes over.
pub fn half_pi_pulse(psi: &StateVector) -> StateVector {
    qubit_rotation(psi.space(), [[INV_SQRT2, -INV_SQRT2], [INV_SQRT2, INV_SQRT2]]).apply(psi)
}

/// π rotation: |g⟩ → |e⟩, |e⟩ → −|g⟩ (two π/2 rotations).
pub fn pi_pulse(psi: &StateVector) -> StateVector {
    qubit_rotation(psi.space(), [[0.0, -1.0], [1.0, 0.0]]).apply(psi)
}

/// Load N photons into R₁: returns the prepared state and the loading time
/// τ₁ = Σ_{m=1..N} π/(2|g₁|√m).
///
/// `Ideal` constructs |N, g, 0⟩ exactly. `Simulated` alternates instantaneous
/// π-pulses with resonant swap segments under the full Hamiltonian, with R₁
/// tuned to the qubit frequency at `cp.phi_ext` and R₂ shifted to
/// ω_q + detune_multiple·|g₂|. The √m speedup of the m-th swap is the usual
/// Fock-ladder enhancement of the vacuum Rabi coupling.
pub fn prepare_fock(
    space: HilbertSpace,
    cp: &CircuitParams,
    n: usize,
    mode: PrepMode,
    detune_multiple: f64,
) -> Result<(StateVector, f64)> {
    if n > space.n_max() {
        return Err(Error::Truncation { n, n_max: space.n_max() });
    }
    let dp = derive(cp)?;
    let g1 = dp.g1.abs();
    let tau1: f64 = (1..=n).map(|m| std::f64::consts::PI / (2.0 * g1 * (m as f64).sqrt())).sum();
    match mode {
        PrepMode::Ideal => Ok((basis_state(space, n, QUBIT_GROUND, 0)?, tau1)),
        PrepMode::Simulated => {
            let ovr = ModeOverrides {
                omega_r1: Some(dp.omega_q),
                omega_r2: Some(dp.omega_q + detune_multiple * dp.g2.abs()),
                kappa: None,
            };
            let h = full_rwa_with(space, &dp, &ovr)?;
            let prop = Propagator::new(&h)?;
            let mut psi = basis_state(space, 0, QUBIT_GROUND, 0)?;
            for m in 1..=n {
                psi = pi_pulse(&psi);
                let seg = std::f64::consts::PI / (2.0 * g1 * (m as f64).sqrt());
                psi = prop.apply(&psi, seg);
            }
            Ok((psi, tau1))
        }
    }
}

/// Evolve under the full Hamiltonian at the idling flux for time `tau`
/// (resonators at their common circuit frequency, qubit at Φ*).
pub fn idle_evolve(psi: &StateVector, cp: &CircuitParams, tau: f64) -> Result<StateVector> {
    let f_star = idling_flux_numeric(cp)?;
    let dp = derive(&cp.with_flux(f_star * PHI0))?;
    let h = full_rwa(psi.space(), &dp)?;
    Ok(Propagator::new(&h)?.apply(psi, tau))
}

/// One post-selection branch: probability and renormalized state.
#[derive(Clone, Debug)]
pub struct MeasuredBranch {
    pub probability: f64,
    pub state: Option<StateVector>,
}

/// Project onto the qubit outcome with M_g = 1 ⊗ |g⟩⟨g| ⊗ 1 and
/// M_e = 1 ⊗ |e⟩⟨e| ⊗ 1, renormalizing each branch. Branches below
/// probability 1e-12 come back empty.
pub fn measure_qubit(psi: &StateVector) -> (MeasuredBranch, MeasuredBranch) {
    let space = psi.space();
    let branch = |q_keep: usize| {
        let mut projected = StateVector::zero(space);
        for i in 0..space.dim() {
            let (_, q, _) = space.unindex(i);
            if q == q_keep {
                projected.vector_mut()[i] = psi.vector()[i];
            }
        }
        let p = projected.norm().powi(2);
        if p < 1e-12 {
            MeasuredBranch { probability: p, state: None }
        } else {
            MeasuredBranch { probability: p, state: Some(projected.normalized()) }
        }
    };
    (branch(QUBIT_GROUND), branch(QUBIT_EXCITED))
}

/// F = max_θ' |⟨(|A⟩ + e^{iθ'}|B⟩)/√2 | ψ⟩|² and the maximizing θ', in closed
/// form: F = (|⟨A|ψ⟩| + |⟨B|ψ⟩|)²/2, θ' = arg⟨B|ψ⟩ − arg⟨A|ψ⟩.
pub fn noon_fidelity(psi: &StateVector, a: &StateVector, b: &StateVector) -> (f64, f64) {
    let amp_a = a.inner(psi);
    let amp_b = b.inner(psi);
    let fid = 0.5 * (amp_a.norm() + amp_b.norm()).powi(2);
    let theta = if amp_a.norm() > 0.0 && amp_b.norm() > 0.0 {
        (amp_b.arg() - amp_a.arg()).rem_euclid(std::f64::consts::TAU)
    } else {
        0.0
    };
    (fid, theta)
}

/// Execute the full 2N+4-step sequence and post-select both outcomes.
///
/// The qubit stays parked at the idling flux for the whole run: R₁ is tuned
/// to it for loading, and both resonators sit at their common circuit
/// frequency during the conditional-exchange segment.
pub fn run_protocol(cp: &CircuitParams, n: usize, opts: &ProtocolOptions) -> Result<ProtocolRun> {
    let n_max = opts.n_max.unwrap_or(n + 2);
    if n > n_max {
        return Err(Error::Truncation { n, n_max });
    }
    let space = HilbertSpace::new(n_max, 2);

    let f_star = idling_flux_numeric(cp)?;
    let phi_star = f_star * PHI0;
    let cp_star = cp.with_flux(phi_star);
    let dp = derive(&cp_star)?;
    let ep = effective_params_with_threshold(&dp, 0.0)?;
    let tau2 = std::f64::consts::PI / (2.0 * ep.g_eff_excited.abs());

    let mut steps = Vec::with_capacity(2 * n + 4);
    let (mut psi, tau1) = prepare_fock(space, &cp_star, n, opts.prep_mode, opts.detune_multiple)?;
    for m in 1..=n {
        let seg = std::f64::consts::PI / (2.0 * dp.g1.abs() * (m as f64).sqrt());
        steps.push(ProtocolStep {
            kind: StepKind::PiPulse,
            duration: 0.0,
            flux_setting: phi_star,
            label: format!("excite qubit (photon {m}/{n})"),
        });
        steps.push(ProtocolStep {
            kind: StepKind::SwapPulse,
            duration: seg,
            flux_setting: phi_star,
            label: format!("swap excitation into R1 ({m}/{n})"),
        });
    }

    psi = half_pi_pulse(&psi);
    steps.push(ProtocolStep {
        kind: StepKind::HalfPiPulse,
        duration: 0.0,
        flux_setting: phi_star,
        label: "split qubit".into(),
    });

    let h_idle = full_rwa(space, &dp)?;
    psi = Propagator::new(&h_idle)?.apply(&psi, tau2);
    steps.push(ProtocolStep {
        kind: StepKind::IdleEvolution,
        duration: tau2,
        flux_setting: phi_star,
        label: "conditional exchange at the idling flux".into(),
    });

    psi = half_pi_pulse(&psi);
    steps.push(ProtocolStep {
        kind: StepKind::HalfPiPulse,
        duration: 0.0,
        flux_setting: phi_star,
        label: "recombine qubit".into(),
    });
    steps.push(ProtocolStep {
        kind: StepKind::Measure,
        duration: 0.0,
        flux_setting: phi_star,
        label: "projective qubit measurement".into(),
    });

    debug_assert!((psi.norm() - 1.0).abs() < 1e-9, "pre-measurement norm drifted");

    let (g_branch, e_branch) = measure_qubit(&psi);
    let total_time = tau1 + tau2;

    let make = |outcome: QubitOutcome, branch: MeasuredBranch, q: usize| -> Result<ProtocolResult> {
        let target_a = basis_state(space, n, q, 0)?;
        let target_b = basis_state(space, 0, q, n)?;
        let (fidelity, theta) = match &branch.state {
            Some(s) => noon_fidelity(s, &target_a, &target_b),
            None => (0.0, 0.0),
        };
        Ok(ProtocolResult {
            outcome,
            post_state: branch.state,
            probability: branch.probability,
            fidelity,
            theta,
            total_time,
            step_log: steps.clone(),
        })
    };

    Ok(ProtocolRun {
        ground: make(QubitOutcome::Ground, g_branch, QUBIT_GROUND)?,
        excited: make(QubitOutcome::Excited, e_branch, QUBIT_EXCITED)?,
        idling_flux_over_phi0: f_star,
        tau1,
        tau2,
    })
}

/// One row of the fidelity scan table.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    /// C_qk / C_Rk for this column of the family.
    pub cq_over_cr: f64,
    pub fidelity_g_branch: f64,
    pub fidelity_e_branch: f64,
    pub prob_g: f64,
    pub tau1_s: f64,
    pub tau2_s: f64,
    pub steps: usize,
}

/// Fidelity table over photon number and coupling-capacitance ratio. The
/// family keeps everything of `base` except C_q1 = C_q2 = C_R1/divisor.
/// Cells run in parallel; row order is (divisor-major, then N) regardless.
pub fn fidelity_scan(
    base: &CircuitParams,
    max_n: usize,
    cq_divisors: &[f64],
    opts: &ProtocolOptions,
) -> Result<Vec<ScanRow>> {
    let cells: Vec<(f64, usize)> = cq_divisors
        .iter()
        .flat_map(|&d| (1..=max_n).map(move |n| (d, n)))
        .collect();
    cells
        .par_iter()
        .map(|&(divisor, n)| {
            let mut cp = *base;
            cp.c_q1 = cp.c_r1 / divisor;
            cp.c_q2 = cp.c_r1 / divisor;
            let run = run_protocol(&cp, n, opts)?;
            Ok(ScanRow {
                n,
                cq_over_cr: cp.c_q1 / cp.c_r1,
                fidelity_g_branch: run.ground.fidelity,
                fidelity_e_branch: run.excited.fidelity,
                prob_g: run.ground.probability,
                tau1_s: run.tau1,
                tau2_s: run.tau2,
                steps: run.ground.step_log.len(),
            })
        })
        .collect()
}

/// CSV with header
/// `N,cq_over_cr,fidelity_g_branch,fidelity_e_branch,prob_g,tau1_s,tau2_s,steps`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut w: W) -> io::Result<()> {
    writeln!(w, "N,cq_over_cr,fidelity_g_branch,fidelity_e_branch,prob_g,tau1_s,tau2_s,steps")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.8},{:.8},{:.8},{:.8},{:.6e},{:.6e},{}",
            r.n, r.cq_over_cr, r.fidelity_g_branch, r.fidelity_e_branch, r.prob_g, r.tau1_s, r.tau2_s, r.steps
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn nominal(ratio: f64, e_j_over_ec: f64) -> CircuitParams {
        CircuitParams::symmetric(100e-15, 400e-15 / ratio, 400e-15, 0.8e-9, e_j_over_ec, 0.0)
    }

    #[test]
    fn ideal_prep_constructs_fock_state() {
        let cp = nominal(50.0, 70.0);
        let space = HilbertSpace::new(5, 2);
        let (psi, tau1) = prepare_fock(space, &cp, 0, PrepMode::Ideal, 20.0).unwrap();
        assert_eq!(tau1, 0.0);
        assert_abs_diff_eq!(psi.overlap(&basis_state(space, 0, 0, 0).unwrap()), 1.0, epsilon = 1e-15);

        let (psi3, tau3) = prepare_fock(space, &cp, 3, PrepMode::Ideal, 20.0).unwrap();
        assert_abs_diff_eq!(psi3.overlap(&basis_state(space, 3, 0, 0).unwrap()), 1.0, epsilon = 1e-15);
        let g1 = derive(&cp).unwrap().g1.abs();
        let expected: f64 =
            (1..=3).map(|m| std::f64::consts::PI / (2.0 * g1 * (m as f64).sqrt())).sum();
        assert_relative_eq!(tau3, expected, max_relative = 1e-12);
    }

    #[test]
    fn prep_rejects_overfull_truncation() {
        let cp = nominal(50.0, 70.0);
        let space = HilbertSpace::new(2, 2);
        assert!(matches!(
            prepare_fock(space, &cp, 3, PrepMode::Ideal, 20.0),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn simulated_prep_single_photon_overlap() {
        // R2 detuned by 20|g2|: the loaded state overlaps |1,g,0> above 0.99.
        let cp = nominal(50.0, 70.0);
        let space = HilbertSpace::new(3, 2);
        let (psi, _) = prepare_fock(space, &cp, 1, PrepMode::Simulated, 20.0).unwrap();
        let target = basis_state(space, 1, 0, 0).unwrap();
        let overlap = psi.overlap(&target);
        assert!(overlap > 0.99, "overlap {overlap}");
    }

    #[test]
    fn half_pi_splits_and_squares_to_pi() {
        let cp = nominal(50.0, 70.0);
        let space = HilbertSpace::new(3, 2);
        let (ng0, _) = prepare_fock(space, &cp, 2, PrepMode::Ideal, 20.0).unwrap();
        let split = half_pi_pulse(&ng0);
        let ne0 = basis_state(space, 2, 1, 0).unwrap();
        assert_abs_diff_eq!(split.overlap(&ng0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(split.overlap(&ne0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(split.norm(), 1.0, epsilon = 1e-12);
        // two half-pi pulses act as a pi rotation (up to sign)
        let twice = half_pi_pulse(&half_pi_pulse(&ng0));
        assert_abs_diff_eq!(twice.overlap(&ne0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn idle_holds_ground_and_swaps_excited() {
        let cp = nominal(50.0, 70.0);
        let space = HilbertSpace::new(3, 2);
        let dp_star = derive(&cp.with_flux(idling_flux_numeric(&cp).unwrap() * PHI0)).unwrap();
        let ep = effective_params_with_threshold(&dp_star, 0.0).unwrap();
        let tau2 = std::f64::consts::PI / (2.0 * ep.g_eff_excited.abs());

        // |1,g,0> held over 3 would-be swap periods of the kappa-free system
        let j0 = (dp_star.g1 * dp_star.g2 / ep.delta).abs();
        let hold = 3.0 * std::f64::consts::PI / j0;
        let g_in = basis_state(space, 1, 0, 0).unwrap();
        for frac in [0.1, 0.35, 0.6, 0.85, 1.0] {
            let out = idle_evolve(&g_in, &cp, frac * hold).unwrap();
            let p = out.overlap(&g_in);
            assert!(p > 0.98, "ground component leaked: {p} at {frac}");
        }

        // |1,e,0> transfers to |0,e,1> at tau2
        let e_in = basis_state(space, 1, 1, 0).unwrap();
        let out = idle_evolve(&e_in, &cp, tau2).unwrap();
        let p = out.overlap(&basis_state(space, 0, 1, 1).unwrap());
        assert!(p > 0.98, "excited transfer incomplete: {p}");

        // tau = 0 is the identity
        let same = idle_evolve(&e_in, &cp, 0.0).unwrap();
        assert_abs_diff_eq!(same.overlap(&e_in), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn measure_splits_equal_superposition() {
        let cp = nominal(50.0, 70.0);
        let space = HilbertSpace::new(3, 2);
        let (ng0, _) = prepare_fock(space, &cp, 2, PrepMode::Ideal, 20.0).unwrap();
        let psi = half_pi_pulse(&ng0);
        let (g, e) = measure_qubit(&psi);
        assert_abs_diff_eq!(g.probability, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(e.probability, 0.5, epsilon = 1e-12);
        let g_state = g.state.unwrap();
        assert_abs_diff_eq!(g_state.overlap(&ng0), 1.0, epsilon = 1e-12);
        let e_state = e.state.unwrap();
        assert_abs_diff_eq!(
            e_state.overlap(&basis_state(space, 2, 1, 0).unwrap()),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn measure_marks_empty_branch() {
        let cp = nominal(50.0, 70.0);
        let space = HilbertSpace::new(2, 2);
        let (ng0, _) = prepare_fock(space, &cp, 1, PrepMode::Ideal, 20.0).unwrap();
        let (g, e) = measure_qubit(&ng0);
        assert!(g.state.is_some());
        assert!(e.state.is_none());
        assert_abs_diff_eq!(g.probability + e.probability, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn protocol_high_fidelity_at_small_coupling_ratio() {
        let cp = nominal(100.0, 70.0);
        let run = run_protocol(&cp, 1, &ProtocolOptions::default()).unwrap();
        assert!(run.ground.fidelity > 0.99, "g-branch fidelity {}", run.ground.fidelity);
        assert!(run.excited.fidelity > 0.99, "e-branch fidelity {}", run.excited.fidelity);
        assert!((run.ground.probability - 0.5).abs() < 0.02);
        assert_eq!(run.ground.step_log.len(), 2 * 1 + 4);
        assert_relative_eq!(
            run.ground.probability + run.excited.probability,
            1.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn fidelity_trends_across_n_and_ratio() {
        // Decreasing in N at fixed ratio, increasing as C_q shrinks at
        // fixed N.
        let opts = ProtocolOptions::default();
        let f = |ratio: f64, n: usize| {
            run_protocol(&nominal(ratio, 70.0), n, &opts).unwrap().ground.fidelity
        };
        let f75: Vec<f64> = (1..=3).map(|n| f(75.0, n)).collect();
        assert!(f75[0] > f75[1] && f75[1] > f75[2], "N-trend broken: {f75:?}");
        let by_ratio: Vec<f64> = [50.0, 75.0, 100.0].iter().map(|&r| f(r, 2)).collect();
        assert!(
            by_ratio[0] < by_ratio[1] && by_ratio[1] < by_ratio[2],
            "ratio-trend broken: {by_ratio:?}"
        );
    }

    #[test]
    fn theta_maximizes_the_reported_fidelity() {
        let cp = nominal(100.0, 70.0);
        let run = run_protocol(&cp, 2, &ProtocolOptions::default()).unwrap();
        let g = &run.ground;
        let state = g.post_state.as_ref().unwrap();
        let space = state.space();
        let a = basis_state(space, 2, 0, 0).unwrap();
        let b = basis_state(space, 0, 0, 2).unwrap();
        let fid_at = |theta: f64| {
            let mut target = StateVector::zero(space);
            let va = a.vector() * Complex64::new(INV_SQRT2, 0.0);
            let vb = b.vector() * Complex64::from_polar(INV_SQRT2, theta);
            *target.vector_mut() += va + vb;
            target.overlap(state)
        };
        let best = fid_at(g.theta);
        assert_relative_eq!(best, g.fidelity, max_relative = 1e-9);
        for delta in [-1.0, -1e-1, -1e-3, 1e-3, 1e-1, 1.0] {
            assert!(fid_at(g.theta + delta) <= best + 1e-9);
        }
    }

    #[test]
    fn ideal_and_simulated_agree_when_prep_is_clean() {
        // With R2 pushed 60|g2| away the simulated loading overlap passes
        // 0.999 and the two prep modes give the same fidelity to 0.01.
        let cp = nominal(100.0, 70.0);
        let f_star = idling_flux_numeric(&cp).unwrap();
        let space = HilbertSpace::new(3, 2);
        let (psi, _) =
            prepare_fock(space, &cp.with_flux(f_star * PHI0), 1, PrepMode::Simulated, 60.0).unwrap();
        let overlap = psi.overlap(&basis_state(space, 1, 0, 0).unwrap());
        assert!(overlap > 0.999, "prep overlap {overlap}");

        let ideal = run_protocol(&cp, 1, &ProtocolOptions::default()).unwrap();
        let sim = run_protocol(
            &cp,
            1,
            &ProtocolOptions {
                prep_mode: PrepMode::Simulated,
                detune_multiple: 60.0,
                n_max: None,
            },
        )
        .unwrap();
        assert!((ideal.ground.fidelity - sim.ground.fidelity).abs() < 0.01);
    }

    #[test]
    fn scan_table_shape_and_step_counts() {
        let base = nominal(50.0, 70.0);
        let rows = fidelity_scan(&base, 2, &[50.0, 75.0, 100.0], &ProtocolOptions::default()).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert_eq!(row.steps, 2 * row.n + 4);
            assert!(row.fidelity_g_branch > 0.5 && row.fidelity_g_branch <= 1.0);
            assert!(row.fidelity_e_branch > 0.5 && row.fidelity_e_branch <= 1.0);
        }
        // divisor-major ordering with N inner
        assert_eq!(rows[0].n, 1);
        assert_eq!(rows[1].n, 2);
        assert_relative_eq!(rows[0].cq_over_cr, 1.0 / 50.0, max_relative = 1e-12);
        assert_relative_eq!(rows[5].cq_over_cr, 1.0 / 100.0, max_relative = 1e-12);

        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("N,cq_over_cr,fidelity_g_branch,fidelity_e_branch,prob_g,tau1_s,tau2_s,steps\n"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn truncation_error_surfaces() {
        let cp = nominal(50.0, 70.0);
        let opts = ProtocolOptions { n_max: Some(2), ..Default::default() };
        assert!(matches!(run_protocol(&cp, 3, &opts), Err(Error::Truncation { .. })));
    }

    #[test]
    fn step_log_serializes() {
        let cp = nominal(100.0, 70.0);
        let run = run_protocol(&cp, 1, &ProtocolOptions::default()).unwrap();
        let json = serde_json::to_string(&run.ground.step_log).unwrap();
        assert!(json.contains("half_pi_pulse"));
        assert!(json.contains("idle_evolution"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn povm_probabilities_sum_to_one(seed in proptest::collection::vec(-1.0f64..1.0, 2 * 18)) {
            let space = HilbertSpace::new(2, 2);
            let v = nalgebra::DVector::from_iterator(
                18,
                (0..18).map(|i| Complex64::new(seed[2 * i] + 0.05, seed[2 * i + 1])),
            );
            let psi = StateVector::from_vector(space, v).normalized();
            let (g, e) = measure_qubit(&psi);
            prop_assert!((g.probability + e.probability - 1.0).abs() < 1e-9);
        }

        #[test]
        fn pulses_are_unitary(seed in proptest::collection::vec(-1.0f64..1.0, 2 * 18)) {
            let space = HilbertSpace::new(2, 2);
            let v = nalgebra::DVector::from_iterator(
                18,
                (0..18).map(|i| Complex64::new(seed[2 * i] + 0.05, seed[2 * i + 1])),
            );
            let psi = StateVector::from_vector(space, v).normalized();
            prop_assert!((half_pi_pulse(&psi).norm() - 1.0).abs() < 1e-12);
            prop_assert!((pi_pulse(&psi).norm() - 1.0).abs() < 1e-12);
        }
    }
}
