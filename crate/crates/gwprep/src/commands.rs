use std::path::Path;

use gwprep_core::gatecost::{c_gw, Variant};
use gwprep_core::grover_rudolph::{gr_plan, gr_prepare};
use gwprep_core::phase_prep::{phase_plan, phase_prepare, psi_prime_table};
use gwprep_core::qgan::{pqc_cnot_count, train, PqcParams, TrainResult};
use gwprep_core::statevector::{fidelity_amplitudes, mismatch_from_fidelity, project_register};
use gwprep_core::waveform::{bin_masses, bin_phases, target_amplitudes, target_state};
use gwprep_core::{Error as CoreError, QuantumState, SparseState, Statevector};
use num_complex::Complex64;

use crate::config::{Backend, RunConfig, TrainTarget};
use crate::error::CliError;
use crate::output::OutputDir;
use crate::presets::QGAN_L20_PARAMS;
use crate::report::{Method, PrepareReport, TargetSummary, TrainSummary};

pub const CONFIG_ECHO: &str = "config.json";

/// Amplitudes above this weight on nonzero ancilla values mean the ancillas
/// were not returned to zero.
const RESIDUAL_LIMIT: f64 = 1e-9;

pub fn cmd_target(cfg: &RunConfig, out: &OutputDir) -> Result<TargetSummary, CliError> {
    let grid = cfg.frequency_grid()?;
    let amps = target_amplitudes(&cfg.waveform, &grid, cfg.mass_mode)?;
    let phases = bin_phases(&cfg.waveform, &grid)?;
    out.write_text(CONFIG_ECHO, &cfg.to_json())?;
    out.write_target("target.csv", &grid.frequencies(), &amps, &phases)?;
    let summary = TargetSummary {
        command: "target".into(),
        bins: grid.bins(),
        delta_f: grid.delta_f,
        duration: grid.duration,
    };
    out.write_json("summary.json", &summary)?;
    Ok(summary)
}

/// Generator angles named by the config, or the bundled set.
pub fn load_pqc_params(cfg: &RunConfig) -> Result<PqcParams, CliError> {
    let text = match &cfg.pqc_params {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?,
        None => QGAN_L20_PARAMS.to_string(),
    };
    let params: PqcParams =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("invalid generator parameters: {e}")))?;
    params.validate()?;
    if params.n != cfg.grid.n {
        return Err(CliError::config(format!(
            "generator acts on {} qubits, grid has n = {}",
            params.n, cfg.grid.n
        )));
    }
    Ok(params)
}

/// Result of one amplitude + phase preparation.
#[derive(Clone, Debug)]
pub struct PrepareOutcome {
    pub report: PrepareReport,
    pub frequencies: Vec<f64>,
    pub state: Vec<Complex64>,
    pub target: Vec<Complex64>,
}

fn new_state(cfg: &RunConfig, n_qubits: usize) -> Result<Box<dyn QuantumState>, CoreError> {
    Ok(match cfg.backend {
        Backend::Sparse => Box::new(SparseState::new(n_qubits)?.with_policy(cfg.gr.policy)),
        Backend::Dense => Box::new(Statevector::new(n_qubits, cfg.precision)?.with_policy(cfg.gr.policy)),
    })
}

pub fn run_prepare(cfg: &RunConfig, method: Method, pqc: Option<&PqcParams>) -> Result<PrepareOutcome, CliError> {
    let grid = cfg.frequency_grid()?;
    let n = grid.n;
    let target = target_state(&cfg.waveform, &grid, cfg.mass_mode)?;
    let phase = phase_plan(&psi_prime_table(&cfg.waveform, &grid)?, &cfg.phase)?;

    let (mut state, cnot_amplitude, levels, bound) = match method {
        Method::Gr => {
            let p = bin_masses(&cfg.waveform, &grid, cfg.mass_mode)?;
            let plan = gr_plan(&p, &cfg.gr)?;
            let width = plan.layout.n_qubits().max(phase.layout.n_qubits());
            let mut state = new_state(cfg, width)?;
            gr_prepare(state.as_mut(), &plan)?;
            let bound = c_gw(n, cfg.gr.n_c, cfg.gr.n_l, Variant::GroverRudolph, cfg.gr.policy);
            (state, plan.circuit.cnot_cost(cfg.gr.policy), plan.reports(), bound)
        }
        Method::Pqc => {
            let params = pqc.ok_or_else(|| CliError::config("pqc method needs generator parameters"))?;
            let circuit = params.circuit()?;
            let width = (n as usize).max(phase.layout.n_qubits());
            let mut state = new_state(cfg, width)?;
            state.run(&circuit)?;
            let variant = Variant::Pqc { layers: params.layers };
            let bound = c_gw(n, cfg.phase.n_c, cfg.phase.n_l, variant, cfg.phase.policy);
            (state, pqc_cnot_count(n, params.layers), Vec::new(), bound)
        }
    };
    phase_prepare(state.as_mut(), &phase)?;

    let proj = project_register(state.as_ref(), &phase.layout.freq)?;
    if proj.residual_weight > RESIDUAL_LIMIT {
        return Err(CliError::internal(format!(
            "ancillas not cleared: residual weight {:e}",
            proj.residual_weight
        )));
    }
    let fidelity = fidelity_amplitudes(&target, &proj.amplitudes)?;
    let magnitudes: Vec<Complex64> = proj.amplitudes.iter().map(|a| Complex64::new(a.norm(), 0.0)).collect();
    let target_magnitudes: Vec<Complex64> = target.iter().map(|a| Complex64::new(a.norm(), 0.0)).collect();
    let amplitude_fidelity = fidelity_amplitudes(&target_magnitudes, &magnitudes)?;
    let cnot_phase_oracle = phase.forward.cnot_cost(cfg.phase.policy);
    let cnot_phase = phase.circuit().cnot_cost(cfg.phase.policy);
    let max_dpp = phase.max_delta_psi_prime();
    let report = PrepareReport {
        command: "prepare".into(),
        method,
        frequency_qubits: n,
        total_qubits: state.n_qubits(),
        fidelity,
        mismatch: mismatch_from_fidelity(fidelity),
        amplitude_fidelity,
        cnot_count: cnot_amplitude + cnot_phase,
        cnot_amplitude,
        cnot_phase_oracle,
        cnot_bound: bound,
        max_delta_psi_prime: max_dpp,
        max_delta_psi: 2.0 * std::f64::consts::PI * max_dpp,
        ancilla_residual: proj.residual_weight,
        levels,
    };
    Ok(PrepareOutcome {
        report,
        frequencies: grid.frequencies(),
        state: proj.amplitudes,
        target,
    })
}

pub fn cmd_prepare(cfg: &RunConfig, method: Method, out: &OutputDir) -> Result<PrepareReport, CliError> {
    let params = match method {
        Method::Pqc => Some(load_pqc_params(cfg)?),
        Method::Gr => None,
    };
    let outcome = run_prepare(cfg, method, params.as_ref())?;
    out.write_text(CONFIG_ECHO, &cfg.to_json())?;
    out.write_statevector("statevector.csv", &outcome.frequencies, &outcome.state, &outcome.target)?;
    out.write_json("report.json", &outcome.report)?;
    Ok(outcome.report)
}

pub fn train_target(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let bins = 1usize << cfg.qgan.n;
    match cfg.train_target {
        TrainTarget::Uniform => Ok(vec![1.0 / bins as f64; bins]),
        TrainTarget::Waveform => {
            if cfg.qgan.n != cfg.grid.n {
                return Err(CliError::config(format!(
                    "qgan.n = {} but the grid has n = {}",
                    cfg.qgan.n, cfg.grid.n
                )));
            }
            Ok(bin_masses(&cfg.waveform, &cfg.frequency_grid()?, cfg.mass_mode)?)
        }
    }
}

pub fn cmd_train(cfg: &RunConfig, out: &OutputDir) -> Result<TrainResult, CliError> {
    let p = train_target(cfg)?;
    match train(&p, &cfg.qgan) {
        Ok(r) => {
            out.write_text(CONFIG_ECHO, &cfg.to_json())?;
            out.write_history("history.csv", &r.history)?;
            out.write_json("params.json", &r.params)?;
            let last = r.history.len() - 1;
            out.write_json(
                "summary.json",
                &TrainSummary {
                    command: "train".into(),
                    iterations: r.history.len(),
                    best_mismatch: r.best_mismatch,
                    best_iteration: r.best_iteration,
                    final_generator_loss: r.history.generator_loss[last],
                    final_discriminator_loss: r.history.discriminator_loss[last],
                    seed: cfg.qgan.seed,
                },
            )?;
            Ok(r)
        }
        Err(CoreError::Training { iteration, history }) => {
            out.write_text(CONFIG_ECHO, &cfg.to_json())?;
            out.write_history("history.csv", &history)?;
            Err(CoreError::Training { iteration, history }.into())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_cost(cfg: &RunConfig, out: &OutputDir) -> Result<usize, CliError> {
    let rows = gwprep_core::gatecost::ratio_curve(&cfg.durations, &cfg.cost)?;
    out.write_text(CONFIG_ECHO, &cfg.to_json())?;
    out.write_cost("cost.csv", &rows)?;
    Ok(rows.len())
}

/// Output directory from the flag, the config, or `out/<command>`.
pub fn output_dir(flag: Option<&Path>, cfg: &RunConfig, command: &str) -> OutputDir {
    match (flag, &cfg.output_dir) {
        (Some(p), _) => OutputDir::new(p),
        (None, Some(p)) => OutputDir::new(p),
        (None, None) => OutputDir::new(Path::new("out").join(command)),
    }
}
