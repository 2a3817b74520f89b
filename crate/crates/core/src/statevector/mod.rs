//! Statevector simulation with a minimal gate set and CNOT accounting.
//!
//! Two backends share the [`QuantumState`] trait: the dense [`Statevector`]
//! holding all `2^n` amplitudes, and [`SparseState`] holding only nonzero
//! amplitudes. Arithmetic oracles keep the register state a permutation of few
//! branches, so the sparse backend runs the full 28-qubit pipelines that the
//! dense one cannot hold in memory.

mod circuit;
mod dense;
mod metrics;
mod registers;
mod sparse;
mod tally;

pub use circuit::{Circuit, Gate, Instruction};
pub use dense::{Precision, Statevector, DEFAULT_MEMORY_CAP, MAX_QUBITS};
pub use metrics::{
    fidelity, fidelity_amplitudes, joint_distribution, measure_counts, mismatch,
    mismatch_from_fidelity, project_register, register_distribution, Histogram, Projection,
};
pub use registers::{register_bits, register_mask, register_value, NamedRegister, RegisterMap, RegisterRole};
pub use sparse::SparseState;
pub use tally::GateTally;

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{bail, Result};

/// Low-level amplitude update shared by both backends. `ctrl` is a bit mask of
/// control qubits that must all be 1.
#[derive(Clone, Copy, Debug)]
pub enum Kernel {
    Matrix {
        target: usize,
        m: [[Complex64; 2]; 2],
        ctrl: u64,
    },
    Diagonal {
        target: usize,
        d0: Complex64,
        d1: Complex64,
        ctrl: u64,
    },
    Flip {
        target: usize,
        ctrl: u64,
    },
    Swap {
        a: usize,
        b: usize,
        ctrl: u64,
    },
}

impl Kernel {
    fn for_instruction(ins: &Instruction) -> Kernel {
        let ctrl = ins.controls.iter().fold(0u64, |m, &c| m | (1u64 << c));
        let t = ins.targets[0];
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match ins.gate {
            Gate::X => Kernel::Flip { target: t, ctrl },
            Gate::H => {
                let h = core::f64::consts::FRAC_1_SQRT_2;
                Kernel::Matrix {
                    target: t,
                    m: [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
                    ctrl,
                }
            }
            Gate::Ry(theta) => {
                let (s, co) = libm::sincos(theta / 2.0);
                Kernel::Matrix {
                    target: t,
                    m: [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]],
                    ctrl,
                }
            }
            Gate::Rz(theta) => {
                let (s, co) = libm::sincos(theta / 2.0);
                Kernel::Diagonal {
                    target: t,
                    d0: c(co, -s),
                    d1: c(co, s),
                    ctrl,
                }
            }
            Gate::Phase(theta) => {
                let (s, co) = libm::sincos(theta);
                Kernel::Diagonal {
                    target: t,
                    d0: c(1.0, 0.0),
                    d1: c(co, s),
                    ctrl,
                }
            }
            Gate::Swap => Kernel::Swap {
                a: t,
                b: ins.targets[1],
                ctrl,
            },
        }
    }
}

/// Common interface of the simulator backends.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;

    fn tally(&self) -> &GateTally;

    fn tally_mut(&mut self) -> &mut GateTally;

    fn amplitude(&self, index: u64) -> Complex64;

    /// Calls `f` for every stored amplitude. Dense states visit all indices.
    fn for_each_amplitude(&self, f: &mut dyn FnMut(u64, Complex64));

    /// Applies a kernel without validation or counting.
    fn apply_kernel(&mut self, kernel: &Kernel) -> Result<()>;

    /// Validates, counts and applies one instruction.
    fn apply(&mut self, ins: &Instruction) -> Result<()> {
        ins.validate(self.n_qubits())?;
        self.apply_kernel(&Kernel::for_instruction(ins))?;
        self.tally_mut().record(ins.gate, ins.controls.len());
        Ok(())
    }

    fn apply_gate(&mut self, gate: Gate, targets: &[usize], controls: &[usize]) -> Result<()> {
        self.apply(&Instruction::new(gate, targets, controls))
    }

    fn run(&mut self, circuit: &Circuit) -> Result<()> {
        for ins in circuit.instructions() {
            self.apply(ins)?;
        }
        Ok(())
    }

    fn norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        self.for_each_amplitude(&mut |_, a| s += a.norm_sqr());
        s
    }

    /// Snapshot of the gate counters.
    fn tally_report(&self) -> GateTally {
        self.tally().clone()
    }

    /// All `2^n` amplitudes; refuses states wider than 24 qubits.
    fn to_dense(&self) -> Result<Vec<Complex64>> {
        let n = self.n_qubits();
        if n > 24 {
            bail!(Capacity, "refusing to expand {n} qubits densely");
        }
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); 1usize << n];
        self.for_each_amplitude(&mut |i, a| v[i as usize] = a);
        Ok(v)
    }
}
