//! Statevector simulation and state-preparation routines for frequency-domain
//! gravitational-wave inspiral templates.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, presets and the
//! command line live in the companion `gwprep` crate.

#![no_std]
#![forbid(unsafe_code)]
// NaN must fail range checks, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fixedpoint;
pub mod gatecost;
pub mod grover_rudolph;
pub mod minimax;
pub mod phase_prep;
pub mod qarith;
pub mod qgan;
pub mod statevector;
pub mod waveform;

mod math;

pub use error::{Error, Result};
pub use fixedpoint::{Bits, FixedPointFormat, Representation};
pub use gatecost::AncillaPolicy;
pub use statevector::{
    Circuit, Gate, GateTally, Instruction, Precision, QuantumState, RegisterMap, SparseState,
    Statevector,
};
