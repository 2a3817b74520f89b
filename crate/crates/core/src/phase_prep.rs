//! Phase loading: write `Ψ'(j) = Ψ(f_j) / 2π` into an ancilla with the
//! piecewise-linear oracle, rotate each precision qubit, then uncompute.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::fixedpoint::{integer_bits_for, FixedPointFormat, Representation};
use crate::gatecost::AncillaPolicy;
use crate::math::wrap_unit;
use crate::minimax::{build_pwl_spec, fit_linear_minimax_points, PwlOptions, PwlSpec};
use crate::qarith::{ensure_cleared, pwl_circuit, pwl_emulate, pwl_tables, PwlOracleLayout};
use crate::statevector::{Circuit, QuantumState, RegisterMap, RegisterRole};
use crate::waveform::{bin_phases, FrequencyGrid, WaveformParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseConfig {
    pub n_a: u32,
    /// Ancilla precision bits; chosen from the data when absent.
    pub p_a: Option<i32>,
    pub n_c: u32,
    /// Coefficient precision bits; chosen from the data when absent.
    pub p_c: Option<i32>,
    pub n_l: u32,
    /// Reduce `Ψ'` modulo one: only the fractional part sets the phase.
    pub wrap: bool,
    pub policy: AncillaPolicy,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig {
            n_a: 10,
            p_a: None,
            n_c: 8,
            p_c: None,
            n_l: 4,
            wrap: true,
            policy: AncillaPolicy::None,
        }
    }
}

impl PhaseConfig {
    pub fn validate(&self, n: u32) -> Result<()> {
        if self.n_a < 2 || self.n_c < 2 || self.n_a > 40 || self.n_c > 40 {
            bail!(Config, "register widths n_a={} n_c={} outside 2..=40", self.n_a, self.n_c);
        }
        if self.n_l > n {
            bail!(Config, "n_l = {} exceeds the {n}-qubit frequency register", self.n_l);
        }
        if let Some(p) = self.p_a {
            if p > self.n_a as i32 {
                bail!(Config, "p_a = {p} exceeds n_a = {}", self.n_a);
            }
        }
        Ok(())
    }
}

/// `Ψ(f_j) / 2π` on the lower bin edges.
pub fn psi_prime_table(params: &WaveformParams, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    Ok(bin_phases(params, grid)?.into_iter().map(|p| p / (2.0 * PI)).collect())
}

/// Qubit assignment: frequency register, ancilla, coefficients, label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLayout {
    pub freq: Vec<usize>,
    pub ancilla: Vec<usize>,
    pub coeff: Vec<usize>,
    pub label: Vec<usize>,
}

impl PhaseLayout {
    pub fn new(n: u32, config: &PhaseConfig) -> Result<Self> {
        config.validate(n)?;
        let mut map = RegisterMap::new();
        Ok(PhaseLayout {
            freq: map.allocate("freq", RegisterRole::Frequency, n as usize)?,
            ancilla: map.allocate("ancilla", RegisterRole::Ancilla, config.n_a as usize)?,
            coeff: map.allocate("coeff", RegisterRole::Coefficient, config.n_c as usize)?,
            label: map.allocate("label", RegisterRole::Label, config.n_l as usize)?,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.freq.len() + self.ancilla.len() + self.coeff.len() + self.label.len()
    }
}

/// One phase per precision qubit: bit `i` of a code with precision `p` adds
/// `2π·2^{i-p}` (negated on the two's-complement sign bit). Bits of integer
/// weight contribute nothing and are skipped.
pub fn precision_rotations_circuit(ancilla: &[usize], format: &FixedPointFormat) -> Circuit {
    let mut c = Circuit::new();
    let n = ancilla.len();
    for (i, &q) in ancilla.iter().enumerate() {
        let e = i as i32 - format.precision();
        if e >= 0 {
            continue;
        }
        let mut w = libm::ldexp(1.0, e);
        if i + 1 == n && format.representation() == Representation::TwosComplement {
            w = -w;
        }
        c.phase(q, 2.0 * PI * w);
    }
    c
}

pub fn precision_rotations<S: QuantumState + ?Sized>(
    state: &mut S,
    ancilla: &[usize],
    format: &FixedPointFormat,
) -> Result<()> {
    state.run(&precision_rotations_circuit(ancilla, format))
}

/// Fitted phase oracle and the circuits built from it.
#[derive(Clone, Debug)]
pub struct PhasePlan {
    pub config: PhaseConfig,
    pub layout: PhaseLayout,
    pub oracle: PwlOracleLayout,
    pub spec: PwlSpec,
    /// `Ψ'` target values per bin.
    pub psi_prime: Vec<f64>,
    /// Decoded ancilla value per bin, by classical emulation of the oracle.
    pub emulated: Vec<f64>,
    pub forward: Circuit,
}

impl PhasePlan {
    /// `Ψ̂' - Ψ'` per bin; circular (in `[-1/2, 1/2]`) in wrap mode.
    pub fn deltas(&self) -> Vec<f64> {
        self.emulated
            .iter()
            .zip(&self.psi_prime)
            .map(|(e, t)| if self.config.wrap { wrap_unit(e - t) } else { e - t })
            .collect()
    }

    /// Largest `|ΔΨ'|` over the bins.
    pub fn max_delta_psi_prime(&self) -> f64 {
        self.deltas().iter().fold(0.0, |a, d| a.max(d.abs()))
    }

    pub fn ancilla_format(&self) -> FixedPointFormat {
        self.oracle.out_format
    }

    /// Forward oracle, precision rotations, inverse oracle.
    pub fn circuit(&self) -> Circuit {
        let mut c = self.forward.clone();
        c.append(&precision_rotations_circuit(&self.oracle.out_reg, &self.oracle.out_format));
        c.append(&self.forward.inverse());
        c
    }

    /// Phases `2π Ψ̂'(j)` the circuit applies.
    pub fn applied_phases(&self) -> Vec<f64> {
        self.emulated.iter().map(|e| 2.0 * PI * e).collect()
    }
}

fn coefficient_bound(psi: &[f64], n_l: u32) -> Result<f64> {
    let width = psi.len() >> n_l;
    let mut bound = 0.0f64;
    for (k, chunk) in psi.chunks(width).enumerate() {
        let xs: Vec<f64> = (0..chunk.len()).map(|i| (k * width + i) as f64).collect();
        let fit = fit_linear_minimax_points(&xs, chunk)?;
        bound = bound.max(fit.a0.abs()).max(fit.a1.abs());
    }
    Ok(bound)
}

/// Fits `Ψ'` over the bin index and assembles the oracle.
pub fn phase_plan(psi_prime: &[f64], config: &PhaseConfig) -> Result<PhasePlan> {
    let len = psi_prime.len();
    if len < 2 || !len.is_power_of_two() {
        bail!(Config, "phase table length {len} is not a power of two >= 2");
    }
    if psi_prime.iter().any(|v| !v.is_finite()) {
        bail!(Domain, "non-finite phase");
    }
    let n = len.trailing_zeros();
    let layout = PhaseLayout::new(n, config)?;
    let max_abs = psi_prime.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let p_a = match config.p_a {
        Some(p) => p,
        None if config.wrap => config.n_a as i32,
        None => config.n_a as i32 - 1 - integer_bits_for(max_abs + 0.5),
    };
    let ancilla_format = FixedPointFormat::twos_complement(config.n_a, p_a)?;
    let options = PwlOptions { wrap: config.wrap, ..PwlOptions::integers() };
    // In wrap mode a two's-complement code with p = n_c spans exactly one period.
    let start = match config.p_c {
        Some(p) => p,
        None if config.wrap => config.n_c as i32,
        None => FixedPointFormat::twos_complement_covering(config.n_c, coefficient_bound(psi_prime, config.n_l)?)?
            .precision(),
    };
    let f = |x: f64| psi_prime[(x as usize).min(len - 1)];
    let mut last_err = None;
    // Quantization can push a coefficient one step past the covering bound.
    let drops = if config.p_c.is_some() { 1 } else { 3 };
    for drop in 0..drops {
        let coeff_format = FixedPointFormat::twos_complement(config.n_c, start - drop)?;
        let spec = match build_pwl_spec(f, [0.0, len as f64], config.n_l, coeff_format, options) {
            Ok(s) => s,
            Err(e @ Error::CoefficientRange { .. }) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let oracle = PwlOracleLayout {
            x_reg: layout.freq.clone(),
            x_format: FixedPointFormat::unsigned(n, 0)?,
            out_reg: layout.ancilla.clone(),
            out_format: ancilla_format,
            coeff_reg: layout.coeff.clone(),
            coeff_format,
            label_reg: layout.label.clone(),
        };
        let tables = pwl_tables(&oracle, &spec)?;
        let emulated = (0..len as u64)
            .map(|x| ancilla_format.decode_code(pwl_emulate(&oracle, &tables, x)))
            .collect();
        let forward = pwl_circuit(&oracle, &spec)?;
        return Ok(PhasePlan {
            config: *config,
            layout,
            oracle,
            spec,
            psi_prime: psi_prime.to_vec(),
            emulated,
            forward,
        });
    }
    Err(last_err.expect("loop ran"))
}

pub fn psi_prime_oracle<S: QuantumState + ?Sized>(state: &mut S, plan: &PhasePlan, inverse: bool) -> Result<()> {
    let o = &plan.oracle;
    if inverse {
        ensure_cleared(state, &[&o.coeff_reg, &o.label_reg], "coefficient/label registers")?;
        state.run(&plan.forward.inverse())
    } else {
        ensure_cleared(state, &[&o.out_reg, &o.coeff_reg, &o.label_reg], "phase ancillas")?;
        state.run(&plan.forward)
    }
}

pub fn phase_prepare<S: QuantumState + ?Sized>(state: &mut S, plan: &PhasePlan) -> Result<()> {
    if state.n_qubits() < plan.layout.n_qubits() {
        bail!(Config, "state has {} qubits, plan needs more", state.n_qubits());
    }
    let o = &plan.oracle;
    ensure_cleared(state, &[&o.out_reg, &o.coeff_reg, &o.label_reg], "phase ancillas")?;
    state.run(&plan.circuit())
}
