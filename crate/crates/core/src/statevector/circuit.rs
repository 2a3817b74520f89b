use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    X,
    H,
    /// `Ry(θ)|0⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    Ry(f64),
    /// `diag(e^{-iθ/2}, e^{iθ/2})`.
    Rz(f64),
    /// `diag(1, e^{iθ})`.
    Phase(f64),
    Swap,
}

impl Gate {
    pub fn inverse(self) -> Gate {
        match self {
            Gate::Ry(t) => Gate::Ry(-t),
            Gate::Rz(t) => Gate::Rz(-t),
            Gate::Phase(t) => Gate::Phase(-t),
            g => g,
        }
    }

    pub fn arity(self) -> usize {
        if matches!(self, Gate::Swap) {
            2
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::X => "x",
            Gate::H => "h",
            Gate::Ry(_) => "ry",
            Gate::Rz(_) => "rz",
            Gate::Phase(_) => "phase",
            Gate::Swap => "swap",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub gate: Gate,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl Instruction {
    pub fn new(gate: Gate, targets: &[usize], controls: &[usize]) -> Self {
        Instruction {
            gate,
            targets: targets.to_vec(),
            controls: controls.to_vec(),
        }
    }

    pub fn inverse(&self) -> Self {
        Instruction {
            gate: self.gate.inverse(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.gate.arity() {
            bail!(
                Circuit,
                "{} takes {} target(s), got {}",
                self.gate.name(),
                self.gate.arity(),
                self.targets.len()
            );
        }
        let mut seen = 0u64;
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= n_qubits || q >= 64 {
                bail!(Circuit, "qubit {q} out of range for {n_qubits} qubits");
            }
            if seen & (1u64 << q) != 0 {
                bail!(Circuit, "qubit {q} used twice in one {}", self.gate.name());
            }
            seen |= 1u64 << q;
        }
        Ok(())
    }
}

/// Ordered instruction list. Qubit indices are checked when the circuit runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn push(&mut self, gate: Gate, targets: &[usize], controls: &[usize]) -> &mut Self {
        self.instructions
            .push(Instruction::new(gate, targets, controls));
        self
    }

    pub fn append(&mut self, other: &Circuit) -> &mut Self {
        self.instructions.extend_from_slice(&other.instructions);
        self
    }

    pub fn x(&mut self, t: usize) -> &mut Self {
        self.push(Gate::X, &[t], &[])
    }

    pub fn cx(&mut self, c: usize, t: usize) -> &mut Self {
        self.push(Gate::X, &[t], &[c])
    }

    pub fn mcx(&mut self, controls: &[usize], t: usize) -> &mut Self {
        self.push(Gate::X, &[t], controls)
    }

    pub fn h(&mut self, t: usize) -> &mut Self {
        self.push(Gate::H, &[t], &[])
    }

    pub fn ry(&mut self, t: usize, theta: f64) -> &mut Self {
        self.push(Gate::Ry(theta), &[t], &[])
    }

    pub fn cry(&mut self, controls: &[usize], t: usize, theta: f64) -> &mut Self {
        self.push(Gate::Ry(theta), &[t], controls)
    }

    pub fn rz(&mut self, t: usize, theta: f64) -> &mut Self {
        self.push(Gate::Rz(theta), &[t], &[])
    }

    pub fn phase(&mut self, t: usize, theta: f64) -> &mut Self {
        self.push(Gate::Phase(theta), &[t], &[])
    }

    pub fn cphase(&mut self, controls: &[usize], t: usize, theta: f64) -> &mut Self {
        self.push(Gate::Phase(theta), &[t], controls)
    }

    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(Gate::Swap, &[a, b], &[])
    }

    /// The adjoint circuit: reversed order, inverted gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            instructions: self.instructions.iter().rev().map(Instruction::inverse).collect(),
        }
    }

    /// Every instruction additionally conditioned on `controls`.
    pub fn controlled(&self, controls: &[usize]) -> Circuit {
        Circuit {
            instructions: self
                .instructions
                .iter()
                .map(|ins| {
                    let mut c = ins.controls.clone();
                    c.extend_from_slice(controls);
                    Instruction {
                        gate: ins.gate,
                        targets: ins.targets.clone(),
                        controls: c,
                    }
                })
                .collect(),
        }
    }

    /// CNOTs this circuit is charged when run under `policy`.
    pub fn cnot_cost(&self, policy: crate::gatecost::AncillaPolicy) -> u64 {
        self.instructions
            .iter()
            .map(|ins| super::tally::cnot_cost(ins.gate, ins.controls.len(), policy))
            .sum()
    }
}

impl Extend<Instruction> for Circuit {
    fn extend<I: IntoIterator<Item = Instruction>>(&mut self, iter: I) {
        self.instructions.extend(iter);
    }
}
