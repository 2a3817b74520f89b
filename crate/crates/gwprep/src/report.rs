use gwprep_core::grover_rudolph::LevelReport;
use serde::{Deserialize, Serialize};

/// Path of the report schema inside the crate.
pub const SCHEMA: &str = include_str!("../schemas/report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Gr,
    Pqc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepareReport {
    pub command: String,
    pub method: Method,
    pub frequency_qubits: u32,
    pub total_qubits: usize,
    pub fidelity: f64,
    pub mismatch: f64,
    /// Fidelity of the magnitudes alone.
    pub amplitude_fidelity: f64,
    pub cnot_count: u64,
    pub cnot_amplitude: u64,
    /// One application of the phase oracle; the pipeline runs it twice.
    pub cnot_phase_oracle: u64,
    pub cnot_bound: i128,
    /// Largest `|Ψ̂' - Ψ'|` over the bins, in cycles.
    pub max_delta_psi_prime: f64,
    /// The same in radians.
    pub max_delta_psi: f64,
    pub ancilla_residual: f64,
    pub levels: Vec<LevelReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub command: String,
    pub iterations: usize,
    pub best_mismatch: f64,
    pub best_iteration: usize,
    pub final_generator_loss: f64,
    pub final_discriminator_loss: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub command: String,
    pub bins: usize,
    pub delta_f: f64,
    pub duration: f64,
}
