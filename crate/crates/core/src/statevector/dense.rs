use alloc::vec::Vec;

use num_complex::{Complex, Complex64};
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{GateTally, Kernel, QuantumState};
use crate::error::{bail, Result};
use crate::gatecost::AncillaPolicy;

pub const MAX_QUBITS: usize = 28;
/// Default ceiling on amplitude storage: 4 GiB.
pub const DEFAULT_MEMORY_CAP: u64 = 4 << 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    Double,
    Single,
}

impl Precision {
    pub fn bytes_per_amplitude(self) -> u64 {
        match self {
            Precision::Double => 16,
            Precision::Single => 8,
        }
    }

    /// Norm tolerance the simulator guarantees at this precision.
    pub fn norm_tolerance(self) -> f64 {
        match self {
            Precision::Double => 1e-10,
            Precision::Single => 1e-5,
        }
    }
}

#[derive(Clone, Debug)]
enum Amplitudes {
    Double(Vec<Complex<f64>>),
    Single(Vec<Complex<f32>>),
}

/// Dense statevector over `n` qubits; qubit 0 is the least significant index bit.
#[derive(Clone, Debug)]
pub struct Statevector {
    n_qubits: usize,
    amps: Amplitudes,
    tally: GateTally,
}

fn zeroed<T: Float>(len: usize) -> Result<Vec<Complex<T>>> {
    let mut v = Vec::new();
    if v.try_reserve_exact(len).is_err() {
        bail!(Capacity, "allocation of {len} amplitudes failed");
    }
    v.resize(len, Complex::new(T::zero(), T::zero()));
    v[0] = Complex::new(T::one(), T::zero());
    Ok(v)
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits under the default memory cap.
    pub fn new(n_qubits: usize, precision: Precision) -> Result<Self> {
        Self::with_memory_cap(n_qubits, precision, DEFAULT_MEMORY_CAP)
    }

    pub fn with_memory_cap(n_qubits: usize, precision: Precision, cap_bytes: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            bail!(
                Capacity,
                "{n_qubits} qubits outside the supported 1..={MAX_QUBITS}"
            );
        }
        let need = (1u64 << n_qubits) * precision.bytes_per_amplitude();
        if need > cap_bytes {
            bail!(
                Capacity,
                "{n_qubits} qubits need {need} bytes, cap is {cap_bytes}"
            );
        }
        let len = 1usize << n_qubits;
        let amps = match precision {
            Precision::Double => Amplitudes::Double(zeroed(len)?),
            Precision::Single => Amplitudes::Single(zeroed(len)?),
        };
        Ok(Statevector {
            n_qubits,
            amps,
            tally: GateTally::default(),
        })
    }

    /// Double-precision state holding `amplitudes` verbatim.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            bail!(Capacity, "amplitude count {len} is not 2^n with 1 <= n <= {MAX_QUBITS}");
        }
        Ok(Statevector {
            n_qubits: len.trailing_zeros() as usize,
            amps: Amplitudes::Double(amplitudes),
            tally: GateTally::default(),
        })
    }

    pub fn with_policy(mut self, policy: AncillaPolicy) -> Self {
        self.tally = GateTally::new(policy);
        self
    }

    pub fn precision(&self) -> Precision {
        match self.amps {
            Amplitudes::Double(_) => Precision::Double,
            Amplitudes::Single(_) => Precision::Single,
        }
    }

    pub fn len(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Amplitudes widened to double precision.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        match &self.amps {
            Amplitudes::Double(v) => v.clone(),
            Amplitudes::Single(v) => v
                .iter()
                .map(|a| Complex64::new(f64::from(a.re), f64::from(a.im)))
                .collect(),
        }
    }

    /// Direct access in double precision.
    pub fn as_slice(&self) -> Option<&[Complex64]> {
        match &self.amps {
            Amplitudes::Double(v) => Some(v),
            Amplitudes::Single(_) => None,
        }
    }
}

fn cast<T: Float>(z: Complex64) -> Complex<T> {
    Complex::new(T::from(z.re).unwrap(), T::from(z.im).unwrap())
}

fn kernel_on<T: Float>(amps: &mut [Complex<T>], kernel: &Kernel) {
    let len = amps.len();
    match *kernel {
        Kernel::Matrix { target, m, ctrl } => {
            let bit = 1usize << target;
            let ctrl = ctrl as usize;
            let [[a, b], [c, d]] = m.map(|row| row.map(cast::<T>));
            for i in 0..len {
                if i & bit != 0 || i & ctrl != ctrl {
                    continue;
                }
                let (x0, x1) = (amps[i], amps[i | bit]);
                amps[i] = a * x0 + b * x1;
                amps[i | bit] = c * x0 + d * x1;
            }
        }
        Kernel::Diagonal { target, d0, d1, ctrl } => {
            let bit = 1usize << target;
            let ctrl = ctrl as usize;
            let (d0, d1) = (cast::<T>(d0), cast::<T>(d1));
            let skip0 = d0 == Complex::new(T::one(), T::zero());
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & ctrl != ctrl {
                    continue;
                }
                if i & bit != 0 {
                    *amp = *amp * d1;
                } else if !skip0 {
                    *amp = *amp * d0;
                }
            }
        }
        Kernel::Flip { target, ctrl } => {
            let bit = 1usize << target;
            let ctrl = ctrl as usize;
            for i in 0..len {
                if i & bit == 0 && i & ctrl == ctrl {
                    amps.swap(i, i | bit);
                }
            }
        }
        Kernel::Swap { a, b, ctrl } => {
            let (ba, bb) = (1usize << a, 1usize << b);
            let ctrl = ctrl as usize;
            for i in 0..len {
                if i & ba != 0 && i & bb == 0 && i & ctrl == ctrl {
                    amps.swap(i, (i & !ba) | bb);
                }
            }
        }
    }
}

impl QuantumState for Statevector {
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
        let i = index as usize;
        match &self.amps {
            Amplitudes::Double(v) => v.get(i).copied().unwrap_or_default(),
            Amplitudes::Single(v) => v
                .get(i)
                .map(|a| Complex64::new(f64::from(a.re), f64::from(a.im)))
                .unwrap_or_default(),
        }
    }

    fn for_each_amplitude(&self, f: &mut dyn FnMut(u64, Complex64)) {
        match &self.amps {
            Amplitudes::Double(v) => {
                for (i, a) in v.iter().enumerate() {
                    f(i as u64, *a);
                }
            }
            Amplitudes::Single(v) => {
                for (i, a) in v.iter().enumerate() {
                    f(i as u64, Complex64::new(f64::from(a.re), f64::from(a.im)));
                }
            }
        }
    }

    fn apply_kernel(&mut self, kernel: &Kernel) -> Result<()> {
        match &mut self.amps {
            Amplitudes::Double(v) => kernel_on(v, kernel),
            Amplitudes::Single(v) => kernel_on(v, kernel),
        }
        Ok(())
    }
}
