use alloc::vec::Vec;

use hashbrown::HashMap;
use num_complex::Complex64;

use super::{GateTally, Kernel, QuantumState};
use crate::error::{bail, Result};
use crate::gatecost::AncillaPolicy;

/// Largest register width the sparse backend indexes.
pub const SPARSE_MAX_QUBITS: usize = 63;

/// Statevector storing only amplitudes with `|a|^2` above a pruning threshold.
///
/// Gate semantics and CNOT accounting match [`super::Statevector`]. The number of
/// stored amplitudes is capped; exceeding the cap is a capacity error.
#[derive(Clone, Debug)]
pub struct SparseState {
    n_qubits: usize,
    amps: HashMap<u64, Complex64>,
    tally: GateTally,
    prune_below: f64,
    max_support: usize,
}

impl SparseState {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > SPARSE_MAX_QUBITS {
            bail!(
                Capacity,
                "{n_qubits} qubits outside the sparse backend's 1..={SPARSE_MAX_QUBITS}"
            );
        }
        let mut amps = HashMap::new();
        amps.insert(0, Complex64::new(1.0, 0.0));
        Ok(SparseState {
            n_qubits,
            amps,
            tally: GateTally::default(),
            prune_below: 1e-30,
            max_support: 1 << 24,
        })
    }

    pub fn with_policy(mut self, policy: AncillaPolicy) -> Self {
        self.tally = GateTally::new(policy);
        self
    }

    /// Amplitudes with squared magnitude below `threshold` are dropped after each gate.
    pub fn with_prune_threshold(mut self, threshold: f64) -> Self {
        self.prune_below = threshold;
        self
    }

    pub fn with_max_support(mut self, max_support: usize) -> Self {
        self.max_support = max_support;
        self
    }

    /// Sets the amplitudes of basis states `0..values.len()`; all others are zero.
    pub fn load_amplitudes(&mut self, values: &[Complex64]) -> Result<()> {
        if values.len() as u128 > 1u128 << self.n_qubits {
            bail!(Capacity, "{} amplitudes exceed the register", values.len());
        }
        self.amps.clear();
        for (i, a) in values.iter().enumerate() {
            if a.norm_sqr() > self.prune_below {
                self.amps.insert(i as u64, *a);
            }
        }
        Ok(())
    }

    /// Number of stored amplitudes.
    pub fn support(&self) -> usize {
        self.amps.len()
    }

    /// Stored amplitudes sorted by basis index.
    pub fn entries(&self) -> Vec<(u64, Complex64)> {
        let mut v: Vec<_> = self.amps.iter().map(|(&i, &a)| (i, a)).collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }

    fn remap(&mut self, f: impl Fn(u64) -> u64) {
        let old = core::mem::take(&mut self.amps);
        self.amps.reserve(old.len());
        for (i, a) in old {
            self.amps.insert(f(i), a);
        }
    }
}

impl QuantumState for SparseState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn tally(&self) -> &GateTally {
        &self.tally
    }

    fn tally_mut(&mut self) -> &mut GateTally {
        &mut self.tally
    }

    fn amplitude(&self, index: u64) -> Complex64 {
        self.amps.get(&index).copied().unwrap_or_default()
    }

    fn for_each_amplitude(&self, f: &mut dyn FnMut(u64, Complex64)) {
        for (&i, &a) in &self.amps {
            f(i, a);
        }
    }

    fn apply_kernel(&mut self, kernel: &Kernel) -> Result<()> {
        match *kernel {
            Kernel::Matrix { target, m, ctrl } => {
                let bit = 1u64 << target;
                let old = core::mem::take(&mut self.amps);
                let mut new: HashMap<u64, Complex64> = HashMap::with_capacity(old.len() * 2);
                for (i, a) in old {
                    if i & ctrl != ctrl {
                        *new.entry(i).or_default() += a;
                        continue;
                    }
                    let col = usize::from(i & bit != 0);
                    let base = i & !bit;
                    *new.entry(base).or_default() += m[0][col] * a;
                    *new.entry(base | bit).or_default() += m[1][col] * a;
                }
                let floor = self.prune_below;
                new.retain(|_, a| a.norm_sqr() > floor);
                self.amps = new;
            }
            Kernel::Diagonal { target, d0, d1, ctrl } => {
                let bit = 1u64 << target;
                for (&i, a) in self.amps.iter_mut() {
                    if i & ctrl == ctrl {
                        *a *= if i & bit != 0 { d1 } else { d0 };
                    }
                }
            }
            Kernel::Flip { target, ctrl } => {
                let bit = 1u64 << target;
                self.remap(|i| if i & ctrl == ctrl { i ^ bit } else { i });
            }
            Kernel::Swap { a, b, ctrl } => {
                let (ba, bb) = (1u64 << a, 1u64 << b);
                self.remap(|i| {
                    if i & ctrl == ctrl && ((i & ba != 0) != (i & bb != 0)) {
                        i ^ ba ^ bb
                    } else {
                        i
                    }
                });
            }
        }
        if self.amps.len() > self.max_support {
            bail!(
                Capacity,
                "sparse support {} exceeds cap {}",
                self.amps.len(),
                self.max_support
            );
        }
        Ok(())
    }
}
