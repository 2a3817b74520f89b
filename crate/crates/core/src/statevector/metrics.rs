use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::registers::{register_mask, register_value};
use super::QuantumState;
use crate::error::{bail, Result};

/// `|⟨a|b⟩|^2`, clamped to [0, 1].
pub fn fidelity<A: QuantumState + ?Sized, B: QuantumState + ?Sized>(a: &A, b: &B) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        bail!(
            Circuit,
            "fidelity of {} and {} qubit states",
            a.n_qubits(),
            b.n_qubits()
        );
    }
    let mut ip = Complex64::new(0.0, 0.0);
    a.for_each_amplitude(&mut |i, x| {
        if x.norm_sqr() > 0.0 {
            ip += x.conj() * b.amplitude(i);
        }
    });
    Ok(ip.norm_sqr().clamp(0.0, 1.0))
}

/// `|⟨a|b⟩|^2` of two amplitude vectors, clamped to [0, 1].
pub fn fidelity_amplitudes(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        bail!(Circuit, "fidelity of vectors of length {} and {}", a.len(), b.len());
    }
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    Ok(ip.norm_sqr().clamp(0.0, 1.0))
}

pub fn mismatch_from_fidelity(f: f64) -> f64 {
    1.0 - libm::sqrt(f.clamp(0.0, 1.0))
}

pub fn mismatch<A: QuantumState + ?Sized, B: QuantumState + ?Sized>(a: &A, b: &B) -> Result<f64> {
    Ok(mismatch_from_fidelity(fidelity(a, b)?))
}

/// Marginal probability of each value of `register`.
pub fn register_distribution<S: QuantumState + ?Sized>(
    state: &S,
    register: &[usize],
) -> BTreeMap<u64, f64> {
    let mut out = BTreeMap::new();
    state.for_each_amplitude(&mut |i, a| {
        let p = a.norm_sqr();
        if p > 0.0 {
            *out.entry(register_value(i, register)).or_insert(0.0) += p;
        }
    });
    out
}

/// Probability of each `(a, b)` register value pair.
pub fn joint_distribution<S: QuantumState + ?Sized>(
    state: &S,
    a: &[usize],
    b: &[usize],
) -> BTreeMap<(u64, u64), f64> {
    let mut out = BTreeMap::new();
    state.for_each_amplitude(&mut |i, x| {
        let p = x.norm_sqr();
        if p > 0.0 {
            *out
                .entry((register_value(i, a), register_value(i, b)))
                .or_insert(0.0) += p;
        }
    });
    out
}

/// Amplitudes of `register` on the branch where every other qubit is `|0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub amplitudes: Vec<Complex64>,
    /// Probability carried by basis states with any other qubit set.
    pub residual_weight: f64,
}

pub fn project_register<S: QuantumState + ?Sized>(state: &S, register: &[usize]) -> Result<Projection> {
    if register.is_empty() || register.len() > 24 {
        bail!(Circuit, "cannot project onto a {}-qubit register", register.len());
    }
    let mask = register_mask(register);
    let mut amplitudes = alloc::vec![Complex64::new(0.0, 0.0); 1usize << register.len()];
    let mut residual_weight = 0.0;
    state.for_each_amplitude(&mut |i, a| {
        if i & !mask == 0 {
            amplitudes[register_value(i, register) as usize] = a;
        } else {
            residual_weight += a.norm_sqr();
        }
    });
    Ok(Projection {
        amplitudes,
        residual_weight,
    })
}

/// Sample counts keyed by register value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    pub width: usize,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn frequency(&self, value: u64) -> f64 {
        self.counts.get(&value).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Counts keyed by MSB-first bit strings.
    pub fn labelled(&self) -> Vec<(alloc::string::String, u64)> {
        self.counts
            .iter()
            .map(|(&v, &c)| (crate::fixedpoint::bitstring(v, self.width as u32), c))
            .collect()
    }
}

/// Multinomial samples of `register` drawn from the state's marginal; the state
/// is left untouched.
pub fn measure_counts<S: QuantumState + ?Sized>(
    state: &S,
    register: &[usize],
    shots: u64,
    seed: u64,
) -> Result<Histogram> {
    if register.is_empty() {
        bail!(Circuit, "measurement register is empty");
    }
    if shots == 0 {
        bail!(Config, "shots must be at least 1");
    }
    let dist = register_distribution(state, register);
    let values: Vec<u64> = dist.keys().copied().collect();
    let mut cdf = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for p in dist.values() {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(values.len() - 1);
        *counts.entry(values[k]).or_insert(0) += 1;
    }
    Ok(Histogram {
        width: register.len(),
        shots,
        counts,
    })
}
