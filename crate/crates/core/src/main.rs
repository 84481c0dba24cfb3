//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 config error, 3 flux-domain error over an entire
//! range, 4 no idling point, 5 truncation exceeded, 1 anything else.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use rqrsim::config::ConfigFile;
use rqrsim::consts::HBAR;
use rqrsim::effective::effective_params_with_threshold;
use rqrsim::error::Error;
use rqrsim::evolve::{sweep_flux, SweepConfig};
use rqrsim::idling::{
    effective_coupling_curve, idling_flux_closed_form, idling_flux_numeric, write_curve_csv,
};
use rqrsim::noon::{fidelity_scan, write_scan_csv, PrepMode, ProtocolOptions};
use rqrsim::optical;
use rqrsim::params::{check_validity, derive};

#[derive(Parser)]
#[command(name = "rqrsim", version, about = "Two microwave resonators coupled through a flux-tunable transmon: parameter derivation, idling point, flux sweeps, and NOON-state protocol")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of the human-readable / CSV form.
    #[arg(long, global = true)]
    json: bool,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for sweeps and scans (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Derived circuit quantities (frequencies, couplings) with validity warnings.
    Derive {
        config: PathBuf,
    },
    /// Population grid P(t, Φ) of the initial |N,g,0⟩ state, as CSV.
    SweepFlux {
        config: PathBuf,
        #[arg(long, default_value_t = 0.90)]
        flux_min: f64,
        #[arg(long, default_value_t = 1.10)]
        flux_max: f64,
        #[arg(long, default_value_t = 201)]
        flux_points: usize,
        /// Sweep window length in seconds.
        #[arg(long, default_value_t = 1.5e-6)]
        time_max: f64,
        #[arg(long, default_value_t = 301)]
        time_points: usize,
        /// Photon number N of the initial state.
        #[arg(long, default_value_t = 1)]
        photons: usize,
        /// Cancel the collateral coupling (counterfactual).
        #[arg(long)]
        no_kappa: bool,
    },
    /// Idling flux: numeric root and closed form, optional coupling curve CSV.
    Idling {
        config: PathBuf,
        /// Also write |g_eff(Φ)| with and without κ to this CSV.
        #[arg(long, value_name = "PATH")]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 0.90)]
        flux_min: f64,
        #[arg(long, default_value_t = 1.10)]
        flux_max: f64,
        #[arg(long, default_value_t = 201)]
        flux_points: usize,
    },
    /// NOON-protocol fidelity scan over photon number and C_q/C_R ratio.
    Noon {
        config: PathBuf,
        /// Largest photon number N (rows run N = 1..=max).
        #[arg(long, default_value_t = 3)]
        max_photons: usize,
        /// C_R/C_q divisors defining the capacitance family.
        #[arg(long, value_delimiter = ',', default_values_t = vec![50.0, 75.0, 100.0])]
        ratios: Vec<f64>,
        #[arg(long, value_enum, default_value_t = PrepArg::Ideal)]
        prep: PrepArg,
        /// R₂ detuning during loading, in units of |g₂|.
        #[arg(long, default_value_t = rqrsim::noon::DEFAULT_DETUNE_MULTIPLE)]
        detune_multiple: f64,
        /// Fock truncation override (default N + 2).
        #[arg(long)]
        n_max: Option<usize>,
        /// Write the per-run pulse-sequence log (JSON) here.
        #[arg(long, value_name = "PATH")]
        step_log: Option<PathBuf>,
    },
    /// Crossed-optical-cavity collateral coupling report (JSON).
    Optical {
        config: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PrepArg {
    Ideal,
    Simulated,
}

impl From<PrepArg> for PrepMode {
    fn from(p: PrepArg) -> Self {
        match p {
            PrepArg::Ideal => PrepMode::Ideal,
            PrepArg::Simulated => PrepMode::Simulated,
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidParams(_) => 2,
        Error::QubitFrequencyUndefined { .. } | Error::EmptyFluxRange(_) => 3,
        Error::NoIdlingPoint { .. } | Error::IdlingUnreachable { .. } => 4,
        Error::Truncation { .. } | Error::IndexOutOfRange { .. } => 5,
        _ => 1,
    }
}

fn open_output(out: &Option<PathBuf>) -> std::io::Result<Box<dyn Write>> {
    match out {
        Some(path) => Ok(Box::new(std::fs::File::create(path)?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let io_err = |e: std::io::Error| Error::Config(format!("output error: {e}"));
    match &cli.command {
        Command::Derive { config } => {
            let cfg = ConfigFile::load(config)?;
            let cp = cfg.to_circuit_params()?;
            let dp = derive(&cp)?;
            let checks = check_validity(&cp, &dp, cfg.validity_threshold);
            let warnings = checks.warnings();
            let mut w = open_output(&cli.out).map_err(io_err)?;
            if cli.json {
                let doc = json!({
                    "config": cfg,
                    "derived": dp,
                    "checks": checks,
                    "warnings": warnings,
                });
                writeln!(w, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))
                    .map_err(io_err)?;
            } else {
                writeln!(w, "circuit ({} fF / {} nH family)", cfg.C_R1_fF, cfg.L_R1_nH).map_err(io_err)?;
                writeln!(w, "  C_T = {:.3} fF, C_q = {:.3}/{:.3} fF, C_R = {:.3}/{:.3} fF", cfg.C_T_fF, cfg.C_q1_fF, cfg.C_q2_fF, cfg.C_R1_fF, cfg.C_R2_fF).map_err(io_err)?;
                writeln!(w, "  E_J/E_C = {:.3} per junction, d = {:.4}, phi_ext/phi0 = {:.6}", cfg.E_J_over_EC, cfg.d_asym, cfg.phi_ext_over_phi0).map_err(io_err)?;
                writeln!(w, "derived").map_err(io_err)?;
                writeln!(w, "  E_C/h        = {:10.4} MHz", dp.e_c / HBAR / TAU / 1e6).map_err(io_err)?;
                writeln!(w, "  E_J_tilde    = {:10.4} E_C", dp.e_j_tilde / dp.e_c).map_err(io_err)?;
                writeln!(w, "  omega_q/2pi  = {:10.6} GHz", dp.omega_q / TAU / 1e9).map_err(io_err)?;
                writeln!(w, "  omega_R1/2pi = {:10.6} GHz", dp.omega_r1 / TAU / 1e9).map_err(io_err)?;
                writeln!(w, "  omega_R2/2pi = {:10.6} GHz", dp.omega_r2 / TAU / 1e9).map_err(io_err)?;
                writeln!(w, "  g1/2pi       = {:10.4} MHz", dp.g1 / TAU / 1e6).map_err(io_err)?;
                writeln!(w, "  g2/2pi       = {:10.4} MHz", dp.g2 / TAU / 1e6).map_err(io_err)?;
                writeln!(w, "  kappa/2pi    = {:10.4} MHz", dp.kappa / TAU / 1e6).map_err(io_err)?;
                match dp.delta {
                    Some(d) => writeln!(w, "  Delta/2pi    = {:10.6} GHz", d / TAU / 1e9).map_err(io_err)?,
                    None => writeln!(w, "  Delta        = undefined (non-degenerate resonators)").map_err(io_err)?,
                }
                if warnings.is_empty() {
                    writeln!(w, "warnings: none").map_err(io_err)?;
                } else {
                    writeln!(w, "warnings:").map_err(io_err)?;
                    for warning in &warnings {
                        writeln!(w, "  - {warning}").map_err(io_err)?;
                    }
                }
            }
            Ok(())
        }
        Command::SweepFlux {
            config,
            flux_min,
            flux_max,
            flux_points,
            time_max,
            time_points,
            photons,
            no_kappa,
        } => {
            let cfg = ConfigFile::load(config)?;
            let cp = cfg.to_circuit_params()?;
            let sweep = SweepConfig {
                flux_min: *flux_min,
                flux_max: *flux_max,
                flux_points: *flux_points,
                time_min: 0.0,
                time_max: *time_max,
                time_points: *time_points,
                photon_number: *photons,
                kappa_override: if *no_kappa { Some(0.0) } else { None },
            };
            let grid = sweep_flux(&cp, &sweep)?;
            let mut w = open_output(&cli.out).map_err(io_err)?;
            if cli.json {
                writeln!(w, "{}", serde_json::to_string(&grid.to_json()).expect("serializable"))
                    .map_err(io_err)?;
            } else {
                grid.write_csv(&mut w).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Idling { config, curve, flux_min, flux_max, flux_points } => {
            let cfg = ConfigFile::load(config)?;
            let cp = cfg.to_circuit_params()?;
            let numeric = idling_flux_numeric(&cp)?;
            // The closed form needs the symmetric circuit; report it as
            // unavailable rather than failing when only that premise breaks.
            let closed = match idling_flux_closed_form(&cp) {
                Ok(v) => Some(v),
                Err(Error::InvalidParams(_)) => None,
                Err(e) => return Err(e),
            };
            if let Some(path) = curve {
                let n = (*flux_points).max(2);
                let grid: Vec<f64> = (0..n)
                    .map(|i| flux_min + (flux_max - flux_min) * i as f64 / (n - 1) as f64)
                    .collect();
                let points = effective_coupling_curve(&cp, &grid)?;
                let file = std::fs::File::create(path).map_err(io_err)?;
                write_curve_csv(&points, file).map_err(io_err)?;
            }
            let dp = derive(&cp.with_flux(numeric * rqrsim::consts::PHI0))?;
            let ep = effective_params_with_threshold(&dp, 0.0)?;
            let mut w = open_output(&cli.out).map_err(io_err)?;
            if cli.json {
                let doc = json!({
                    "idling_flux_over_phi0_numeric": numeric,
                    "idling_flux_over_phi0_closed_form": closed,
                    "difference": closed.map(|c| (c - numeric).abs()),
                    "g_eff_excited_at_root_rad_per_s": ep.g_eff_excited,
                });
                writeln!(w, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))
                    .map_err(io_err)?;
            } else {
                writeln!(w, "idling flux (numeric root):  {numeric:.6} phi0").map_err(io_err)?;
                match closed {
                    Some(c) => {
                        writeln!(w, "idling flux (closed form):   {c:.6} phi0").map_err(io_err)?;
                        writeln!(w, "difference:                  {:.3e} phi0", (c - numeric).abs())
                            .map_err(io_err)?;
                    }
                    None => writeln!(w, "idling flux (closed form):   n/a (asymmetric circuit)")
                        .map_err(io_err)?,
                }
                writeln!(w, "g_eff(excited) at the root:  {:.4} MHz (2pi)", ep.g_eff_excited / TAU / 1e6)
                    .map_err(io_err)?;
            }
            Ok(())
        }
        Command::Noon {
            config,
            max_photons,
            ratios,
            prep,
            detune_multiple,
            n_max,
            step_log,
        } => {
            let cfg = ConfigFile::load(config)?;
            let cp = cfg.to_circuit_params()?;
            let opts = ProtocolOptions {
                prep_mode: (*prep).into(),
                detune_multiple: *detune_multiple,
                n_max: *n_max,
            };
            let rows = fidelity_scan(&cp, *max_photons, ratios, &opts)?;
            if let Some(path) = step_log {
                // one representative run per (ratio, N): rerun the largest case
                // and log every step of every scan cell
                let logs: Vec<serde_json::Value> = ratios
                    .iter()
                    .flat_map(|&ratio| (1..=*max_photons).map(move |n| (ratio, n)))
                    .map(|(ratio, n)| {
                        let mut cell = cp;
                        cell.c_q1 = cell.c_r1 / ratio;
                        cell.c_q2 = cell.c_r1 / ratio;
                        let run = rqrsim::noon::run_protocol(&cell, n, &opts)?;
                        Ok(json!({
                            "n": n,
                            "cq_over_cr": 1.0 / ratio,
                            "idling_flux_over_phi0": run.idling_flux_over_phi0,
                            "theta_g_branch": run.ground.theta,
                            "steps": run.ground.step_log,
                        }))
                    })
                    .collect::<Result<_, Error>>()?;
                let file = std::fs::File::create(path).map_err(io_err)?;
                serde_json::to_writer_pretty(file, &logs)
                    .map_err(|e| Error::Config(format!("step log: {e}")))?;
            }
            let mut w = open_output(&cli.out).map_err(io_err)?;
            if cli.json {
                writeln!(w, "{}", serde_json::to_string_pretty(&rows).expect("serializable"))
                    .map_err(io_err)?;
            } else {
                write_scan_csv(&rows, &mut w).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Optical { config } => {
            let cfg = ConfigFile::load(config)?;
            let cavity = cfg.to_cavity_params()?;
            let rep = optical::report(&cavity)?;
            let mut w = open_output(&cli.out).map_err(io_err)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&rep).expect("serializable")).map_err(io_err)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
