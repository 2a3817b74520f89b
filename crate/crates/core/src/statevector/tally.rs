use serde::{Deserialize, Serialize};

use super::Gate;
use crate::gatecost::{mcx_cnots, AncillaPolicy};

/// CNOT cost of one gate with `k` controls. Controlled `SU(2)` rotations use
/// two multi-controlled X gates around single-qubit rotations; `Phase` and `H`
/// carry a global phase that becomes a `(k-1)`-controlled phase on the controls.
pub(crate) fn cnot_cost(gate: Gate, k: usize, policy: AncillaPolicy) -> u64 {
    let k = k as u32;
    let mcx = |k| mcx_cnots(k, policy).max(0) as u64;
    let su2 = |k| if k == 0 { 0 } else { 2 * mcx(k) };
    match gate {
        Gate::X => mcx(k),
        Gate::Swap => {
            if k == 0 {
                3
            } else {
                2 + mcx(k + 1)
            }
        }
        Gate::Ry(_) | Gate::Rz(_) => su2(k),
        Gate::H | Gate::Phase(_) => (1..=k).map(su2).sum(),
    }
}

/// Gate counters accumulated while a state is evolved.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateTally {
    pub policy: AncillaPolicy,
    pub cnot_count: u64,
    pub x: u64,
    pub h: u64,
    pub ry: u64,
    pub rz: u64,
    pub phase: u64,
    pub swap: u64,
    /// Gates carrying at least one control.
    pub controlled: u64,
    pub max_controls: u64,
}

impl GateTally {
    pub fn new(policy: AncillaPolicy) -> Self {
        GateTally {
            policy,
            ..Default::default()
        }
    }

    pub fn record(&mut self, gate: Gate, n_controls: usize) {
        self.cnot_count += cnot_cost(gate, n_controls, self.policy);
        match gate {
            Gate::X => self.x += 1,
            Gate::H => self.h += 1,
            Gate::Ry(_) => self.ry += 1,
            Gate::Rz(_) => self.rz += 1,
            Gate::Phase(_) => self.phase += 1,
            Gate::Swap => self.swap += 1,
        }
        if n_controls > 0 {
            self.controlled += 1;
            self.max_controls = self.max_controls.max(n_controls as u64);
        }
    }

    pub fn total_gates(&self) -> u64 {
        self.x + self.h + self.ry + self.rz + self.phase + self.swap
    }

    /// Clears all counters, keeping the policy.
    pub fn reset(&mut self) {
        *self = GateTally::new(self.policy);
    }
}
