//! Reversible arithmetic in the Fourier basis: QFT, constant and register
//! addition, fixed-point multiplication, the subdomain label gate, coefficient
//! loading, and the piecewise-linear function oracle built from them.
//!
//! Internally the arithmetic uses the swap-free transform, after which qubit
//! `r[j]` carries the phase `e^{2πi x / 2^{j+1}}`; adding `a` is then one phase
//! `2π a / 2^{j+1}` per qubit. The public [`qft`] includes the final swaps and
//! is the exact discrete Fourier transform.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::fixedpoint::{FixedPointFormat, Representation};
use crate::minimax::PwlSpec;
use crate::statevector::{register_mask, Circuit, QuantumState};

fn check_disjoint(regs: &[&[usize]]) -> Result<()> {
    let mut seen = 0u64;
    for reg in regs {
        for &q in reg.iter() {
            if q >= 64 {
                bail!(Circuit, "qubit {q} out of range");
            }
            if seen & (1 << q) != 0 {
                bail!(Circuit, "qubit {q} appears in two registers");
            }
            seen |= 1 << q;
        }
    }
    Ok(())
}

/// Fails unless every basis state with nonzero amplitude has all `regs` at zero.
pub fn ensure_cleared<S: QuantumState + ?Sized>(state: &S, regs: &[&[usize]], what: &str) -> Result<()> {
    let mask = regs.iter().fold(0u64, |m, r| m | register_mask(r));
    let mut dirty = 0.0;
    state.for_each_amplitude(&mut |i, a| {
        if i & mask != 0 {
            dirty += a.norm_sqr();
        }
    });
    if dirty > 1e-20 {
        bail!(Precondition, "{what} not cleared (weight {dirty:e} on nonzero codes)");
    }
    Ok(())
}

/// Swap-free transform: afterwards `reg[j]` carries `e^{2πi x/2^{j+1}}`.
pub(crate) fn fourier_basis(reg: &[usize]) -> Circuit {
    let mut c = Circuit::new();
    for j in (0..reg.len()).rev() {
        c.h(reg[j]);
        for k in (0..j).rev() {
            c.cphase(&[reg[k]], reg[j], PI / (1u64 << (j - k)) as f64);
        }
    }
    c
}

/// Circuit for the QFT on `register`, `|x⟩ → 2^{-n/2} Σ_k e^{2πi xk/2^n}|k⟩`.
pub fn qft_circuit(register: &[usize], inverse: bool) -> Circuit {
    let mut c = fourier_basis(register);
    let n = register.len();
    for j in 0..n / 2 {
        c.swap(register[j], register[n - 1 - j]);
    }
    if inverse {
        c.inverse()
    } else {
        c
    }
}

pub fn qft<S: QuantumState + ?Sized>(state: &mut S, register: &[usize], inverse: bool) -> Result<()> {
    if register.is_empty() {
        bail!(Circuit, "QFT on an empty register");
    }
    check_disjoint(&[register])?;
    state.run(&qft_circuit(register, inverse))
}

/// Adds the integer `value` to a register whose phase qubits are `phases`
/// (`phases[j]` carrying `x/2^{j+1}`).
fn add_constant_phases(c: &mut Circuit, phases: &[usize], value: i64, controls: &[usize]) {
    for (j, &q) in phases.iter().enumerate() {
        if j >= 62 {
            break;
        }
        let modulus = 1i64 << (j + 1);
        let r = value.rem_euclid(modulus);
        if r != 0 {
            c.cphase(controls, q, 2.0 * PI * r as f64 / modulus as f64);
        }
    }
}

/// Adds `sign · 2^e` to the phase register, conditioned on `controls`.
fn add_power_phases(c: &mut Circuit, phases: &[usize], negative: bool, e: usize, controls: &[usize]) {
    for (j, &q) in phases.iter().enumerate().skip(e) {
        let angle = 2.0 * PI / (1u64 << (j + 1 - e)) as f64;
        c.cphase(controls, q, if negative { -angle } else { angle });
    }
}

/// Classical or quantum addend for [`fourier_add`].
#[derive(Clone, Copy, Debug)]
pub enum Addend<'a> {
    Constant(i64),
    /// Register value, read as two's complement when `signed`.
    Register { qubits: &'a [usize], signed: bool },
}

/// Addition onto `target`, which must already be in the Fourier basis produced by [`qft`].
pub fn fourier_add_circuit(addend: Addend<'_>, target: &[usize], controls: &[usize]) -> Result<Circuit> {
    let phases: Vec<usize> = target.iter().rev().copied().collect();
    let mut c = Circuit::new();
    match addend {
        Addend::Constant(v) => {
            check_disjoint(&[target, controls])?;
            add_constant_phases(&mut c, &phases, v, controls);
        }
        Addend::Register { qubits, signed } => {
            check_disjoint(&[target, controls, qubits])?;
            for (k, &q) in qubits.iter().enumerate() {
                let mut ctl = Vec::with_capacity(controls.len() + 1);
                ctl.push(q);
                ctl.extend_from_slice(controls);
                add_power_phases(&mut c, &phases, signed && k + 1 == qubits.len(), k, &ctl);
            }
        }
    }
    Ok(c)
}

/// Adds `addend` modulo `2^{|target|}` to a Fourier-basis `target`.
pub fn fourier_add<S: QuantumState + ?Sized>(
    state: &mut S,
    addend: Addend<'_>,
    target: &[usize],
    controls: &[usize],
) -> Result<()> {
    if target.is_empty() {
        bail!(Circuit, "empty addition target");
    }
    state.run(&fourier_add_circuit(addend, target, controls)?)
}

fn check_format(reg: &[usize], fmt: &FixedPointFormat, what: &str) -> Result<()> {
    if reg.len() != fmt.n_bits() as usize {
        bail!(
            Config,
            "{what} register has {} qubits but its format has {} bits",
            reg.len(),
            fmt.n_bits()
        );
    }
    Ok(())
}

/// Phases adding the product `a · b` into the phase register. Partial products
/// below the output's least significant bit are dropped.
fn product_phases(
    c: &mut Circuit,
    a: &[usize],
    a_fmt: &FixedPointFormat,
    b: &[usize],
    b_fmt: &FixedPointFormat,
    phases: &[usize],
    out_fmt: &FixedPointFormat,
) {
    let shift = a_fmt.precision() + b_fmt.precision() - out_fmt.precision();
    let b_signed = b_fmt.representation() == Representation::TwosComplement;
    for (i, &qa) in a.iter().enumerate() {
        for (k, &qb) in b.iter().enumerate() {
            let e = i as i32 + k as i32 - shift;
            if e < 0 || e as usize >= phases.len() {
                continue;
            }
            let negative = b_signed && k + 1 == b.len();
            add_power_phases(c, phases, negative, e as usize, &[qa, qb]);
        }
    }
}

fn check_multiply_formats(a_fmt: &FixedPointFormat, b_fmt: &FixedPointFormat, out_fmt: &FixedPointFormat) -> Result<()> {
    if a_fmt.representation() != Representation::Unsigned {
        bail!(Config, "multiplicand must be unsigned");
    }
    if b_fmt.representation() == Representation::SignedMagnitude
        || out_fmt.representation() == Representation::SignedMagnitude
    {
        bail!(Config, "multiplier and product must be unsigned or two's complement");
    }
    Ok(())
}

/// `out += a · b` for unsigned `a` and two's-complement (or unsigned) `b`, with
/// `out` in the computational basis before and after.
pub fn multiply_circuit(
    a: &[usize],
    a_fmt: &FixedPointFormat,
    b: &[usize],
    b_fmt: &FixedPointFormat,
    out: &[usize],
    out_fmt: &FixedPointFormat,
) -> Result<Circuit> {
    check_disjoint(&[a, b, out])?;
    check_format(a, a_fmt, "multiplicand")?;
    check_format(b, b_fmt, "multiplier")?;
    check_format(out, out_fmt, "product")?;
    check_multiply_formats(a_fmt, b_fmt, out_fmt)?;
    let mut c = fourier_basis(out);
    product_phases(&mut c, a, a_fmt, b, b_fmt, out, out_fmt);
    c.append(&fourier_basis(out).inverse());
    Ok(c)
}

/// Writes `a · b` into a cleared `out` register.
pub fn qft_multiply<S: QuantumState + ?Sized>(
    state: &mut S,
    a: (&[usize], FixedPointFormat),
    b: (&[usize], FixedPointFormat),
    out: (&[usize], FixedPointFormat),
) -> Result<()> {
    let c = multiply_circuit(a.0, &a.1, b.0, &b.1, out.0, &out.1)?;
    ensure_cleared(state, &[out.0], "product register")?;
    state.run(&c)
}

/// Label gate: for each branch, adds to `label` the number of `thresholds`
/// that are `<= x`. Uses `scratch` as a comparison flag, returned to `|0⟩`.
pub fn label_circuit(x: &[usize], label: &[usize], thresholds: &[u64], scratch: usize) -> Result<Circuit> {
    check_disjoint(&[x, label, &[scratch]])?;
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        bail!(Config, "label thresholds must be strictly ascending");
    }
    if label.len() < 63 && thresholds.len() as u64 > (1u64 << label.len()) - 1 {
        bail!(
            Config,
            "{} thresholds do not fit a {}-qubit label",
            thresholds.len(),
            label.len()
        );
    }
    let domain = 1u64 << x.len();
    let mut c = Circuit::new();
    if thresholds.is_empty() {
        return Ok(c);
    }
    let label_basis = fourier_basis(label);
    c.append(&label_basis);
    for &t in thresholds {
        if t >= domain {
            bail!(Config, "threshold {t} outside the {}-bit input domain", x.len());
        }
        if t == 0 {
            add_constant_phases(&mut c, label, 1, &[]);
            continue;
        }
        let s = t.trailing_zeros() as usize;
        let mut reg: Vec<usize> = x[s..].to_vec();
        reg.push(scratch);
        let cmp = fourier_basis(&reg);
        let value = (t >> s) as i64;
        // scratch <- [x < t]
        c.append(&cmp);
        add_constant_phases(&mut c, &reg, -value, &[]);
        c.append(&cmp.inverse());
        c.x(scratch);
        add_constant_phases(&mut c, label, 1, &[scratch]);
        c.x(scratch);
        c.append(&cmp);
        add_constant_phases(&mut c, &reg, value, &[]);
        c.append(&cmp.inverse());
    }
    c.append(&label_basis.inverse());
    Ok(c)
}

/// Writes the subdomain index of `x` into a cleared `label` register.
pub fn label<S: QuantumState + ?Sized>(
    state: &mut S,
    x: &[usize],
    label_reg: &[usize],
    thresholds: &[u64],
    scratch: usize,
) -> Result<()> {
    let c = label_circuit(x, label_reg, thresholds, scratch)?;
    ensure_cleared(state, &[label_reg, &[scratch]], "label register")?;
    state.run(&c)
}

/// XORs `table[label]` into `coeff` with label-controlled X gates. Self-inverse.
pub fn load_circuit(label: &[usize], coeff: &[usize], table: &[u64]) -> Result<Circuit> {
    check_disjoint(&[label, coeff])?;
    if label.len() >= 32 || table.len() != 1usize << label.len() {
        bail!(
            Config,
            "coefficient table has {} entries, label register addresses {}",
            table.len(),
            1u128 << label.len()
        );
    }
    let mut c = Circuit::new();
    for (l, &code) in table.iter().enumerate() {
        if code >> coeff.len() != 0 {
            bail!(Config, "code {code:#b} wider than the {}-qubit register", coeff.len());
        }
        if code == 0 {
            continue;
        }
        let zeros: Vec<usize> = label
            .iter()
            .enumerate()
            .filter(|(k, _)| (l >> k) & 1 == 0)
            .map(|(_, &q)| q)
            .collect();
        for &q in &zeros {
            c.x(q);
        }
        for (b, &q) in coeff.iter().enumerate() {
            if (code >> b) & 1 == 1 {
                c.mcx(label, q);
            }
        }
        for &q in &zeros {
            c.x(q);
        }
    }
    Ok(c)
}

pub fn load_constants<S: QuantumState + ?Sized>(
    state: &mut S,
    label_reg: &[usize],
    coeff_reg: &[usize],
    table: &[u64],
    uncompute: bool,
) -> Result<()> {
    let c = load_circuit(label_reg, coeff_reg, table)?;
    if !uncompute {
        ensure_cleared(state, &[coeff_reg], "coefficient register")?;
    }
    state.run(&c)
}

/// Register assignment for a piecewise-linear oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwlOracleLayout {
    pub x_reg: Vec<usize>,
    pub x_format: FixedPointFormat,
    pub out_reg: Vec<usize>,
    pub out_format: FixedPointFormat,
    pub coeff_reg: Vec<usize>,
    pub coeff_format: FixedPointFormat,
    pub label_reg: Vec<usize>,
}

impl PwlOracleLayout {
    pub fn validate(&self) -> Result<()> {
        check_disjoint(&[&self.x_reg, &self.out_reg, &self.coeff_reg, &self.label_reg])?;
        check_format(&self.x_reg, &self.x_format, "input")?;
        check_format(&self.out_reg, &self.out_format, "output")?;
        check_format(&self.coeff_reg, &self.coeff_format, "coefficient")?;
        check_multiply_formats(&self.x_format, &self.coeff_format, &self.out_format)
    }
}

/// Classical tables a layout needs from a spec: label thresholds on the input
/// code grid and the coefficient codes per subdomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwlTables {
    pub thresholds: Vec<u64>,
    pub a1_codes: Vec<u64>,
    pub a0_codes: Vec<u64>,
}

pub fn pwl_tables(layout: &PwlOracleLayout, spec: &PwlSpec) -> Result<PwlTables> {
    layout.validate()?;
    if spec.coeff_format != layout.coeff_format {
        bail!(Config, "spec coefficient format differs from the layout's");
    }
    if layout.label_reg.len() != spec.n_l as usize {
        bail!(
            Config,
            "spec has 2^{} subdomains, label register has {} qubits",
            spec.n_l,
            layout.label_reg.len()
        );
    }
    let step = layout.x_format.step();
    let domain = 1u64 << layout.x_reg.len();
    let mut thresholds = Vec::with_capacity(spec.pieces.len());
    for &b in &spec.boundaries[1..spec.boundaries.len() - 1] {
        let t = b / step;
        let code = libm::round(t);
        if (t - code).abs() > 1e-9 || code < 0.0 || code >= domain as f64 {
            bail!(Config, "boundary {b} is not an interior point of the input code grid");
        }
        thresholds.push(code as u64);
    }
    let fmt = &layout.coeff_format;
    let a1_codes = spec
        .pieces
        .iter()
        .map(|p| fmt.encode_code(p.a1))
        .collect::<Result<Vec<_>>>()?;
    let a0_codes = spec
        .pieces
        .iter()
        .map(|p| fmt.encode_code(p.a0))
        .collect::<Result<Vec<_>>>()?;
    Ok(PwlTables {
        thresholds,
        a1_codes,
        a0_codes,
    })
}

/// The oracle `|x⟩|0⟩ → |x⟩|A1·x + A0⟩` with label and coefficient registers
/// returned to `|0⟩`. The output stays in the Fourier basis between the
/// multiplication and the addition.
pub fn pwl_circuit(layout: &PwlOracleLayout, spec: &PwlSpec) -> Result<Circuit> {
    let tables = pwl_tables(layout, spec)?;
    let l = &layout;
    let scratch = *l
        .coeff_reg
        .first()
        .ok_or_else(|| crate::Error::Config("empty coefficient register".into()))?;
    let labeller = label_circuit(&l.x_reg, &l.label_reg, &tables.thresholds, scratch)?;
    let load_a1 = load_circuit(&l.label_reg, &l.coeff_reg, &tables.a1_codes)?;
    let load_a0 = load_circuit(&l.label_reg, &l.coeff_reg, &tables.a0_codes)?;

    let mut c = labeller.clone();
    c.append(&load_a1);
    c.append(&fourier_basis(&l.out_reg));
    product_phases(
        &mut c,
        &l.x_reg,
        &l.x_format,
        &l.coeff_reg,
        &l.coeff_format,
        &l.out_reg,
        &l.out_format,
    );
    c.append(&load_a1);
    c.append(&load_a0);
    let shift = l.coeff_format.precision() - l.out_format.precision();
    let signed = l.coeff_format.representation() == Representation::TwosComplement;
    for (k, &q) in l.coeff_reg.iter().enumerate() {
        let e = k as i32 - shift;
        if e >= 0 && (e as usize) < l.out_reg.len() {
            add_power_phases(&mut c, &l.out_reg, signed && k + 1 == l.coeff_reg.len(), e as usize, &[q]);
        }
    }
    c.append(&load_a0);
    c.append(&fourier_basis(&l.out_reg).inverse());
    c.append(&labeller.inverse());
    Ok(c)
}

/// Applies the oracle (or its inverse) to `state`.
pub fn pwl_apply<S: QuantumState + ?Sized>(
    state: &mut S,
    layout: &PwlOracleLayout,
    spec: &PwlSpec,
    inverse: bool,
) -> Result<()> {
    let c = pwl_circuit(layout, spec)?;
    if inverse {
        ensure_cleared(state, &[&layout.coeff_reg, &layout.label_reg], "coefficient/label registers")?;
        state.run(&c.inverse())
    } else {
        ensure_cleared(
            state,
            &[&layout.out_reg, &layout.coeff_reg, &layout.label_reg],
            "output/coefficient/label registers",
        )?;
        state.run(&c)
    }
}

/// Classical emulation of the oracle on input code `x`: the output code the
/// circuit writes, including dropped partial products and modular wrap.
pub fn pwl_emulate(layout: &PwlOracleLayout, tables: &PwlTables, x: u64) -> u64 {
    let label = tables.thresholds.iter().filter(|&&t| t <= x).count();
    let n_o = layout.out_reg.len() as i32;
    let n_c = layout.coeff_reg.len();
    let signed = layout.coeff_format.representation() == Representation::TwosComplement;
    let modulus = 1i128 << n_o;
    let mut acc: i128 = 0;
    let shift = layout.x_format.precision() + layout.coeff_format.precision() - layout.out_format.precision();
    let a1 = tables.a1_codes[label];
    for i in 0..layout.x_reg.len() {
        for k in 0..n_c {
            let e = i as i32 + k as i32 - shift;
            if (x >> i) & 1 == 1 && (a1 >> k) & 1 == 1 && (0..n_o).contains(&e) {
                let term = 1i128 << e;
                acc += if signed && k + 1 == n_c { -term } else { term };
            }
        }
    }
    let a0 = tables.a0_codes[label];
    let shift = layout.coeff_format.precision() - layout.out_format.precision();
    for k in 0..n_c {
        let e = k as i32 - shift;
        if (a0 >> k) & 1 == 1 && (0..n_o).contains(&e) {
            let term = 1i128 << e;
            acc += if signed && k + 1 == n_c { -term } else { term };
        }
    }
    acc.rem_euclid(modulus) as u64
}
