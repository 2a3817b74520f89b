use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegisterRole {
    Frequency,
    Label,
    Coefficient,
    Ancilla,
    Output,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedRegister {
    pub name: String,
    pub role: RegisterRole,
    /// Qubit indices, least significant first.
    pub qubits: Vec<usize>,
}

/// Disjoint named registers allocated in order from qubit 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterMap {
    registers: Vec<NamedRegister>,
    next: usize,
}

impl RegisterMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reserves the next `width` qubits under `name`.
    pub fn allocate(&mut self, name: &str, role: RegisterRole, width: usize) -> Result<Vec<usize>> {
        if self.get(name).is_some() {
            bail!(Config, "register {name:?} allocated twice");
        }
        let qubits: Vec<usize> = (self.next..self.next + width).collect();
        self.next += width;
        self.registers.push(NamedRegister {
            name: name.to_string(),
            role,
            qubits: qubits.clone(),
        });
        Ok(qubits)
    }

    pub fn get(&self, name: &str) -> Option<&[usize]> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.qubits.as_slice())
    }

    pub fn registers(&self) -> &[NamedRegister] {
        &self.registers
    }

    pub fn n_qubits(&self) -> usize {
        self.next
    }
}

/// Integer held by `register` (LSB first) in basis state `index`.
#[inline]
pub fn register_value(index: u64, register: &[usize]) -> u64 {
    register
        .iter()
        .enumerate()
        .fold(0, |v, (k, &q)| v | (((index >> q) & 1) << k))
}

/// Basis-index bits for `value` placed on `register`.
#[inline]
pub fn register_bits(value: u64, register: &[usize]) -> u64 {
    register
        .iter()
        .enumerate()
        .fold(0, |v, (k, &q)| v | (((value >> k) & 1) << q))
}

pub fn register_mask(register: &[usize]) -> u64 {
    register.iter().fold(0, |m, &q| m | (1u64 << q))
}
