//! Closed-form CNOT upper bounds for the arithmetic oracles and the cost-ratio
//! study over waveform duration. All bounds use exact integer arithmetic.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// Ancilla budget assumed when decomposing a `k`-controlled X.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaPolicy {
    /// `2k^2 - 6k + 5` CNOTs.
    #[default]
    None,
    /// `20(k - 2)` CNOTs with `k - 2` ancillas.
    NMinus2,
    /// `12(k - 1) + 1` CNOTs with `k - 1` ancillas.
    NMinus1,
}

/// CNOTs charged for an X gate with `k` controls. A single control is one CNOT
/// under every policy; the closed forms apply from two controls up.
pub fn mcx_cnots(k: u32, policy: AncillaPolicy) -> i128 {
    let k = i128::from(k);
    match k {
        0 => 0,
        1 => 1,
        _ => match policy {
            AncillaPolicy::None => 2 * k * k - 6 * k + 5,
            AncillaPolicy::NMinus2 => 20 * (k - 2),
            AncillaPolicy::NMinus1 => 12 * (k - 1) + 1,
        },
    }
}

pub fn c_mult(n1: u32, n2: u32) -> i128 {
    let (a, b) = (i128::from(n1), i128::from(n2));
    8 * (a + b) * b * (a - 1) + 20 * (a + b) * (a + b) - 13 * (a + b)
}

pub fn c_add(n1: u32, n2: u32) -> i128 {
    let (a, b) = (i128::from(n1), i128::from(n2));
    2 * a * b + 2 * b * (b - 1)
}

pub fn c_label(n: u32, n_l: u32) -> i128 {
    let (n, l) = (i128::from(n), i128::from(n_l));
    2 * l * (l - 1) + (1i128 << (n_l + 1)) * (6 * n + l + 1)
}

pub fn c_x(n_c: u32, n_l: u32, policy: AncillaPolicy) -> i128 {
    i128::from(n_c) * (1i128 << n_l) * mcx_cnots(n_l, policy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveCosts {
    pub c_mult: i128,
    pub c_add: i128,
    pub c_label: i128,
    pub c_x: i128,
    pub c_cnx: i128,
}

/// `C_Mult(n1, n2)`, `C_Add(n1, n2)`, `C_Label(n, n_l)`, `C_X(n_c, n_l)` and
/// `C_{C^nX}(n_l)` in one record.
pub fn primitive_costs(
    n1: u32,
    n2: u32,
    n: u32,
    n_l: u32,
    n_c: u32,
    policy: AncillaPolicy,
) -> PrimitiveCosts {
    PrimitiveCosts {
        c_mult: c_mult(n1, n2),
        c_add: c_add(n1, n2),
        c_label: c_label(n, n_l),
        c_x: c_x(n_c, n_l, policy),
        c_cnx: mcx_cnots(n_l, policy),
    }
}

/// Bound for one piecewise-linear oracle on an `n`-bit input.
pub fn c_lpf(n: u32, n_c: u32, n_l: u32, policy: AncillaPolicy) -> i128 {
    c_mult(n_c, n) + c_add(n_c, n_c + n) + c_label(n, n_l) + 3 * c_x(n_c, n_l, policy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    GroverRudolph,
    Pqc { layers: u32 },
}

/// Bound for amplitude plus phase preparation on `n` frequency qubits.
pub fn c_gw(n: u32, n_c: u32, n_l: u32, variant: Variant, policy: AncillaPolicy) -> i128 {
    let n_i = i128::from(n);
    match variant {
        Variant::GroverRudolph => {
            let sum: i128 = (1..=n).map(|m| c_lpf(m, n_c, n_l, policy)).sum();
            2 * sum + 2 * (n_i + i128::from(n_c) * (n_i - 1))
        }
        Variant::Pqc { layers } => 2 * c_lpf(n, n_c, n_l, policy) + i128::from(layers) * (n_i - 1),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostPolicy {
    pub ancilla_mode: AncillaPolicy,
    pub n_c: u32,
    pub n_l: u32,
    pub layers: u32,
    /// Frequency band that maps a duration `T` to `n = ceil(log2(bandwidth * T))`.
    pub f_min: f64,
    pub f_max: f64,
}

impl Default for CostPolicy {
    fn default() -> Self {
        CostPolicy {
            ancilla_mode: AncillaPolicy::None,
            n_c: 16,
            n_l: 4,
            layers: 100,
            f_min: 0.0,
            f_max: 2048.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub t_seconds: f64,
    pub n: u32,
    pub cnots_arbitrary: i128,
    pub cnots_gr: i128,
    pub cnots_pqc: i128,
    pub ratio_gr: f64,
    pub ratio_pqc: f64,
}

/// Frequency qubits needed to resolve a waveform of duration `t` over the band.
pub fn qubits_for_duration(t: f64, f_min: f64, f_max: f64) -> Result<u32> {
    let bins = (f_max - f_min) * t;
    if !(bins.is_finite() && bins > 0.0) {
        bail!(Domain, "band [{f_min}, {f_max}] Hz with duration {t} s gives no bins");
    }
    let n = libm::ceil(libm::log2(bins));
    if n > 100.0 {
        bail!(Domain, "duration {t} s needs {n} qubits");
    }
    Ok((n as i64).max(1) as u32)
}

/// Ratio of the `2^n` arbitrary-state cost to both oracle-based bounds for each duration.
pub fn ratio_curve(durations: &[f64], policy: &CostPolicy) -> Result<Vec<RatioRow>> {
    if policy.f_max <= policy.f_min {
        bail!(Config, "f_max must exceed f_min");
    }
    let mut rows = Vec::with_capacity(durations.len());
    let mut last = 0.0;
    for &t in durations {
        if !(t > 0.0) || t < last {
            bail!(Config, "durations must be positive and ascending");
        }
        last = t;
        let n = qubits_for_duration(t, policy.f_min, policy.f_max)?;
        let arbitrary = 1i128 << n;
        let gr = c_gw(n, policy.n_c, policy.n_l, Variant::GroverRudolph, policy.ancilla_mode);
        let pqc = c_gw(
            n,
            policy.n_c,
            policy.n_l,
            Variant::Pqc {
                layers: policy.layers,
            },
            policy.ancilla_mode,
        );
        rows.push(RatioRow {
            t_seconds: t,
            n,
            cnots_arbitrary: arbitrary,
            cnots_gr: gr,
            cnots_pqc: pqc,
            ratio_gr: arbitrary as f64 / gr as f64,
            ratio_pqc: arbitrary as f64 / pqc as f64,
        });
    }
    Ok(rows)
}
