//! Grover-Rudolph amplitude loading.
//!
//! Level `m` rotates frequency qubit `n-1-m` (the register is little endian, so
//! level 0 splits the band in halves on the most significant bit). The coarse
//! index at level `m` is the value of the `m` qubits above it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::fixedpoint::FixedPointFormat;
use crate::gatecost::AncillaPolicy;
use crate::minimax::{build_pwl_spec, fit_linear_minimax_points, PwlOptions, PwlSpec};
use crate::qarith::{ensure_cleared, pwl_circuit, pwl_emulate, pwl_tables, PwlOracleLayout};
use crate::statevector::{Circuit, QuantumState, RegisterMap, RegisterRole};

/// Where the rotation angles of levels `m_a..m_b` come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSource {
    /// Piecewise-linear oracle into the angle register.
    #[default]
    Oracle,
    /// Classical angles through uniformly controlled rotations.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrConfig {
    pub n: u32,
    pub m_a: u32,
    pub m_b: u32,
    pub n_c: u32,
    pub n_o: u32,
    pub n_l: u32,
    pub policy: AncillaPolicy,
    pub angle_source: AngleSource,
}

impl Default for GrConfig {
    fn default() -> Self {
        GrConfig {
            n: 6,
            m_a: 5,
            m_b: 6,
            n_c: 9,
            n_o: 9,
            n_l: 4,
            policy: AncillaPolicy::None,
            angle_source: AngleSource::Oracle,
        }
    }
}

impl GrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 24 {
            bail!(Config, "n = {} outside 1..=24", self.n);
        }
        if !(self.m_a <= self.m_b && self.m_b <= self.n) {
            bail!(Config, "need m_a <= m_b <= n, got m_a={} m_b={} n={}", self.m_a, self.m_b, self.n);
        }
        if self.uses_oracle() && (self.n_c < 2 || self.n_o < 2) {
            bail!(Config, "oracle registers need at least 2 qubits (n_c={}, n_o={})", self.n_c, self.n_o);
        }
        Ok(())
    }

    /// Level 0 has a single angle and is always rotated classically.
    fn first_oracle_level(&self) -> u32 {
        self.m_a.max(1)
    }

    pub fn uses_oracle(&self) -> bool {
        self.angle_source == AngleSource::Oracle && self.first_oracle_level() < self.m_b
    }

    /// Subdomain count exponent used at level `m`.
    pub fn effective_n_l(&self, m: u32) -> u32 {
        self.n_l.min(m)
    }
}

/// Qubit assignment: frequency register first, then the oracle ancillas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrLayout {
    pub freq: Vec<usize>,
    pub angle: Vec<usize>,
    pub coeff: Vec<usize>,
    pub label: Vec<usize>,
}

impl GrLayout {
    pub fn new(config: &GrConfig) -> Result<Self> {
        config.validate()?;
        let mut map = RegisterMap::new();
        let freq = map.allocate("freq", RegisterRole::Frequency, config.n as usize)?;
        if !config.uses_oracle() {
            return Ok(GrLayout { freq, angle: Vec::new(), coeff: Vec::new(), label: Vec::new() });
        }
        let n_l = (config.first_oracle_level()..config.m_b).map(|m| config.effective_n_l(m)).max().unwrap_or(0);
        let angle = map.allocate("angle", RegisterRole::Output, config.n_o as usize)?;
        let coeff = map.allocate("coeff", RegisterRole::Coefficient, config.n_c as usize)?;
        let label = map.allocate("label", RegisterRole::Label, n_l as usize)?;
        Ok(GrLayout { freq, angle, coeff, label })
    }

    pub fn n_qubits(&self) -> usize {
        self.freq.len() + self.angle.len() + self.coeff.len() + self.label.len()
    }

    pub fn register_map(&self) -> RegisterMap {
        let mut map = RegisterMap::new();
        for (name, role, reg) in [
            ("freq", RegisterRole::Frequency, &self.freq),
            ("angle", RegisterRole::Output, &self.angle),
            ("coeff", RegisterRole::Coefficient, &self.coeff),
            ("label", RegisterRole::Label, &self.label),
        ] {
            if !reg.is_empty() {
                map.allocate(name, role, reg.len()).expect("fresh names");
            }
        }
        map
    }

    /// Qubit rotated at level `m`.
    pub fn level_qubit(&self, m: u32) -> usize {
        self.freq[self.freq.len() - 1 - m as usize]
    }

    /// Qubits holding the coarse index at level `m`, least significant first.
    pub fn coarse_qubits(&self, m: u32) -> &[usize] {
        &self.freq[self.freq.len() - m as usize..]
    }
}

fn check_masses(p_mass: &[f64]) -> Result<u32> {
    let len = p_mass.len();
    if len < 2 || !len.is_power_of_two() {
        bail!(Config, "mass vector length {len} is not a power of two >= 2");
    }
    if p_mass.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        bail!(Domain, "masses must be finite and nonnegative");
    }
    if !(p_mass.iter().sum::<f64>() > 0.0) {
        bail!(Domain, "masses sum to zero");
    }
    Ok(len.trailing_zeros())
}

/// Masses summed over the `2^m` coarse bins.
pub fn coarse_masses(p_mass: &[f64], m: u32) -> Result<Vec<f64>> {
    let n = check_masses(p_mass)?;
    if m > n {
        bail!(Config, "level {m} beyond n = {n}");
    }
    let width = 1usize << (n - m);
    Ok(p_mass.chunks(width).map(|c| c.iter().sum()).collect())
}

/// `ζ_{m,x} = arccos sqrt(left half / whole)` for each coarse bin `x`; empty
/// bins get `π/4`.
pub fn zeta_table(p_mass: &[f64], m: u32) -> Result<Vec<f64>> {
    let n = check_masses(p_mass)?;
    if m >= n {
        bail!(Config, "level {m} needs m < n = {n}");
    }
    let fine = coarse_masses(p_mass, m + 1)?;
    Ok(fine
        .chunks(2)
        .map(|h| {
            let whole = h[0] + h[1];
            if whole > 0.0 {
                libm::acos(libm::sqrt((h[0] / whole).min(1.0)))
            } else {
                FRAC_PI_4
            }
        })
        .collect())
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Uniformly controlled `Ry(angles[x])` on `target`, where `x` is the value of
/// `controls` (least significant first). Uses `2^k` CNOTs for `k >= 1` controls.
pub fn ucry_circuit(controls: &[usize], target: usize, angles: &[f64]) -> Result<Circuit> {
    let k = controls.len();
    if angles.len() != 1 << k {
        bail!(Config, "{} angles for {k} controls", angles.len());
    }
    let mut c = Circuit::new();
    if k == 0 {
        c.ry(target, angles[0]);
        return Ok(c);
    }
    let count = 1usize << k;
    for i in 0..count {
        let g = gray(i);
        let theta = angles
            .iter()
            .enumerate()
            .map(|(x, a)| if (x & g).count_ones() % 2 == 0 { *a } else { -*a })
            .sum::<f64>()
            / count as f64;
        c.ry(target, theta);
        let changed = g ^ gray((i + 1) % count);
        c.cx(controls[changed.trailing_zeros() as usize], target);
    }
    Ok(c)
}

/// Exact amplitude loading of levels `0..m_a` by classically angled
/// uniformly controlled rotations.
pub fn small_m_circuit(layout: &GrLayout, p_mass: &[f64], m_a: u32) -> Result<Circuit> {
    let n = check_masses(p_mass)?;
    if n as usize != layout.freq.len() || m_a > n {
        bail!(Config, "m_a = {m_a} incompatible with a {n}-qubit frequency register");
    }
    let mut c = Circuit::new();
    for m in 0..m_a {
        let angles: Vec<f64> = zeta_table(p_mass, m)?.iter().map(|z| 2.0 * z).collect();
        c.append(&ucry_circuit(layout.coarse_qubits(m), layout.level_qubit(m), &angles)?);
    }
    Ok(c)
}

pub fn small_m_prepare<S: QuantumState + ?Sized>(
    state: &mut S,
    layout: &GrLayout,
    p_mass: &[f64],
    m_a: u32,
) -> Result<()> {
    let top = &layout.freq[layout.freq.len() - m_a as usize..];
    ensure_cleared(state, &[top], "leading frequency qubits")?;
    state.run(&small_m_circuit(layout, p_mass, m_a)?)
}

/// Fitted oracle for one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelOracle {
    pub m: u32,
    pub n_l: u32,
    pub spec: PwlSpec,
    pub layout: PwlOracleLayout,
    /// Largest `|ζ̂ - ζ|` over the coarse bins, from classical emulation.
    pub angle_err: f64,
}

fn max_abs_coefficients(zeta: &[f64], n_l: u32) -> Result<f64> {
    let width = zeta.len() >> n_l;
    let mut bound = 0.0f64;
    for (k, chunk) in zeta.chunks(width).enumerate() {
        let xs: Vec<f64> = (0..chunk.len()).map(|i| (k * width + i) as f64).collect();
        let fit = fit_linear_minimax_points(&xs, chunk)?;
        bound = bound.max(fit.a0.abs()).max(fit.a1.abs());
    }
    Ok(bound)
}

/// Fits the `ζ` oracle for level `m` and picks the coefficient and angle formats.
pub fn level_oracle(p_mass: &[f64], m: u32, config: &GrConfig, layout: &GrLayout) -> Result<LevelOracle> {
    if m == 0 || m >= config.n {
        bail!(Config, "oracle level {m} outside 1..{}", config.n);
    }
    let zeta = zeta_table(p_mass, m)?;
    let n_l = config.effective_n_l(m);
    let zmax = zeta.iter().fold(0.0f64, |a, z| a.max(*z));
    let angle_format = FixedPointFormat::twos_complement_covering(config.n_o, zmax + 1.0 / 16.0)?;
    let x_format = FixedPointFormat::unsigned(m, 0)?;
    let bound = max_abs_coefficients(&zeta, n_l)?;
    let start = FixedPointFormat::twos_complement_covering(config.n_c, bound)?;
    let f = |x: f64| zeta[(x as usize).min(zeta.len() - 1)];
    let domain = [0.0, (1u64 << m) as f64];
    let mut last_err = None;
    // Quantization can push a coefficient one step past the covering bound.
    for drop in 0..3 {
        let coeff_format = FixedPointFormat::twos_complement(config.n_c, start.precision() - drop)?;
        let spec = match build_pwl_spec(f, domain, n_l, coeff_format, PwlOptions::integers()) {
            Ok(s) => s,
            Err(e @ Error::CoefficientRange { .. }) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let pwl_layout = PwlOracleLayout {
            x_reg: layout.coarse_qubits(m).to_vec(),
            x_format,
            out_reg: layout.angle.clone(),
            out_format: angle_format,
            coeff_reg: layout.coeff.clone(),
            coeff_format,
            label_reg: layout.label[..n_l as usize].to_vec(),
        };
        let tables = pwl_tables(&pwl_layout, &spec)?;
        let angle_err = zeta
            .iter()
            .enumerate()
            .map(|(x, z)| (angle_format.decode_code(pwl_emulate(&pwl_layout, &tables, x as u64)) - z).abs())
            .fold(0.0, f64::max);
        return Ok(LevelOracle { m, n_l, spec, layout: pwl_layout, angle_err });
    }
    Err(last_err.expect("loop ran"))
}

/// Rotation of `target` by `2ζ̂` where `ζ̂` is the value of `angle`, one
/// controlled rotation per bit.
pub fn rotation_ladder(angle: &[usize], format: &FixedPointFormat, target: usize) -> Circuit {
    let mut c = Circuit::new();
    let n = angle.len();
    for (i, &q) in angle.iter().enumerate() {
        let mut w = libm::ldexp(1.0, i as i32 - format.precision());
        if i + 1 == n && format.representation() == crate::Representation::TwosComplement {
            w = -w;
        }
        c.cry(&[q], target, 2.0 * w);
    }
    c
}

/// Compute `ζ̂`, rotate, uncompute.
pub fn level_circuit(oracle: &LevelOracle, target: usize) -> Result<Circuit> {
    let q = pwl_circuit(&oracle.layout, &oracle.spec)?;
    let mut c = q.clone();
    c.append(&rotation_ladder(&oracle.layout.out_reg, &oracle.layout.out_format, target));
    c.append(&q.inverse());
    Ok(c)
}

pub fn gr_step<S: QuantumState + ?Sized>(state: &mut S, oracle: &LevelOracle, layout: &GrLayout) -> Result<()> {
    let l = &oracle.layout;
    ensure_cleared(state, &[&l.out_reg, &l.coeff_reg, &l.label_reg], "angle ancillas")?;
    ensure_cleared(state, &[&[layout.level_qubit(oracle.m)]], "level qubit")?;
    state.run(&level_circuit(oracle, layout.level_qubit(oracle.m))?)
}

/// Per-level summary of the oracle fits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub m: u32,
    pub n_l: u32,
    pub coeff_precision: i32,
    pub angle_precision: i32,
    pub fit_err_inf: f64,
    pub angle_err: f64,
}

/// Full preparation circuit plus the fitted oracles.
#[derive(Clone, Debug)]
pub struct GrPlan {
    pub config: GrConfig,
    pub layout: GrLayout,
    pub oracles: Vec<LevelOracle>,
    pub circuit: Circuit,
}

impl GrPlan {
    pub fn reports(&self) -> Vec<LevelReport> {
        self.oracles
            .iter()
            .map(|o| LevelReport {
                m: o.m,
                n_l: o.n_l,
                coeff_precision: o.layout.coeff_format.precision(),
                angle_precision: o.layout.out_format.precision(),
                fit_err_inf: o.spec.max_err(),
                angle_err: o.angle_err,
            })
            .collect()
    }

    /// Angles the circuit applies at every level: exact below `m_a` (and for
    /// the exact source), emulated oracle output above, `π/4` from `m_b`.
    pub fn applied_angles(&self, p_mass: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(self.config.n as usize);
        for m in 0..self.config.n {
            if m >= self.config.m_b {
                out.push(vec![FRAC_PI_4; 1 << m]);
            } else if let Some(o) = self.oracles.iter().find(|o| o.m == m) {
                let tables = pwl_tables(&o.layout, &o.spec)?;
                out.push(
                    (0..1u64 << m)
                        .map(|x| o.layout.out_format.decode_code(pwl_emulate(&o.layout, &tables, x)))
                        .collect(),
                );
            } else {
                out.push(zeta_table(p_mass, m)?);
            }
        }
        Ok(out)
    }
}

pub fn gr_plan(p_mass: &[f64], config: &GrConfig) -> Result<GrPlan> {
    let layout = GrLayout::new(config)?;
    let n = check_masses(p_mass)?;
    if n != config.n {
        bail!(Config, "mass vector has 2^{n} entries, config has n = {}", config.n);
    }
    let first = if config.angle_source == AngleSource::Oracle { config.first_oracle_level() } else { config.m_b };
    let first = first.min(config.m_b);
    let mut circuit = small_m_circuit(&layout, p_mass, first)?;
    let mut oracles = Vec::new();
    for m in first..config.m_b {
        let oracle = level_oracle(p_mass, m, config, &layout)?;
        circuit.append(&level_circuit(&oracle, layout.level_qubit(m))?);
        oracles.push(oracle);
    }
    for m in config.m_b..config.n {
        circuit.h(layout.level_qubit(m));
    }
    Ok(GrPlan { config: *config, layout, oracles, circuit })
}

/// Runs the plan on a fresh state.
pub fn gr_prepare<S: QuantumState + ?Sized>(state: &mut S, plan: &GrPlan) -> Result<()> {
    if state.n_qubits() < plan.layout.n_qubits() {
        bail!(Config, "state has {} qubits, plan needs {}", state.n_qubits(), plan.layout.n_qubits());
    }
    let all: Vec<usize> = (0..state.n_qubits()).collect();
    ensure_cleared(state, &[&all], "input state")?;
    state.run(&plan.circuit)
}

/// Classical amplitudes of a rotation tree: bin `j` gets the product over
/// levels of `cos ζ` or `sin ζ` according to its bit at that level.
pub fn tree_amplitudes(angles: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = angles.len();
    for (m, a) in angles.iter().enumerate() {
        if a.len() != 1 << m {
            bail!(Config, "level {m} has {} angles", a.len());
        }
    }
    Ok((0..1usize << n)
        .map(|j| {
            (0..n)
                .map(|m| {
                    let z = angles[m][j >> (n - m)];
                    if (j >> (n - 1 - m)) & 1 == 0 {
                        libm::cos(z)
                    } else {
                        libm::sin(z)
                    }
                })
                .product()
        })
        .collect())
}
