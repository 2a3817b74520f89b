use std::f64::consts::PI;

use gwprep_core::fixedpoint::FixedPointFormat;
use gwprep_core::gatecost::c_lpf;
use gwprep_core::minimax::{build_pwl_spec, eval_pwl, PwlOptions, PwlPiece, PwlSpec};
use gwprep_core::qarith::{
    fourier_add, label, load_constants, multiply_circuit, pwl_apply, pwl_circuit, pwl_emulate, pwl_tables, qft,
    qft_multiply, Addend, PwlOracleLayout,
};
use gwprep_core::statevector::{register_bits, register_value};
use gwprep_core::{AncillaPolicy, Error, Precision, QuantumState, SparseState, Statevector};
use num_complex::Complex64;
use proptest::prelude::*;

fn reg(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

/// Sparse state holding the basis state with `values[i]` on `regs[i]`.
fn basis(n: usize, regs: &[(&[usize], u64)]) -> SparseState {
    let mut s = SparseState::new(n).unwrap();
    for (r, v) in regs {
        for (k, &q) in r.iter().enumerate() {
            if (v >> k) & 1 == 1 {
                s.apply_gate(gwprep_core::Gate::X, &[q], &[]).unwrap();
            }
        }
    }
    s
}

/// The unique basis index carrying the state's weight.
fn single_index(s: &SparseState) -> u64 {
    let e: Vec<_> = s.entries().into_iter().filter(|(_, a)| a.norm_sqr() > 1e-12).collect();
    assert_eq!(e.len(), 1, "state is not a basis state: {e:?}");
    assert!((e[0].1.norm_sqr() - 1.0).abs() < 1e-9);
    e[0].0
}

#[test]
fn qft_is_the_dft() {
    let n = 3;
    let r = reg(0, n);
    for x in 0..8u64 {
        let mut s = Statevector::new(n, Precision::Double).unwrap();
        for k in 0..n {
            if (x >> k) & 1 == 1 {
                s.apply_gate(gwprep_core::Gate::X, &[k], &[]).unwrap();
            }
        }
        qft(&mut s, &r, false).unwrap();
        for k in 0..8u64 {
            let expect = Complex64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * (x * k) as f64 / 8.0);
            assert!((s.amplitude(k) - expect).norm() < 1e-12, "x={x} k={k}");
        }
    }
}

#[test]
fn qft_on_zero_is_uniform_and_inverse_restores() {
    let r = reg(0, 4);
    let mut s = Statevector::new(4, Precision::Double).unwrap();
    qft(&mut s, &r, false).unwrap();
    for a in s.amplitudes() {
        assert!((a - Complex64::new(0.25, 0.0)).norm() < 1e-12);
    }
    let mut t = Statevector::new(5, Precision::Double).unwrap();
    t.apply_gate(gwprep_core::Gate::Ry(0.4), &[1], &[]).unwrap();
    t.apply_gate(gwprep_core::Gate::H, &[3], &[]).unwrap();
    let before = t.amplitudes();
    qft(&mut t, &[4, 1, 3, 0], false).unwrap();
    qft(&mut t, &[4, 1, 3, 0], true).unwrap();
    for (a, b) in t.amplitudes().iter().zip(&before) {
        assert!((a - b).norm() < 1e-10);
    }
    assert!(qft(&mut t, &[], false).is_err());
}

fn twos(v: i64, bits: usize) -> u64 {
    (v as u64) & ((1u64 << bits) - 1)
}

#[test]
fn constant_addition_exhaustive() {
    for n in 1..=4usize {
        let target = reg(0, n);
        for v in 0..(1u64 << n) {
            for a in -16i64..16 {
                let mut s = basis(n, &[(&target, v)]);
                qft(&mut s, &target, false).unwrap();
                fourier_add(&mut s, Addend::Constant(a), &target, &[]).unwrap();
                qft(&mut s, &target, true).unwrap();
                let expect = (v as i64 + a).rem_euclid(1 << n) as u64;
                assert_eq!(single_index(&s), expect, "n={n} v={v} a={a}");
            }
        }
    }
}

#[test]
fn addition_examples() {
    let t = reg(0, 4);
    for (v, a, e) in [(3u64, 1i64, 4u64), (15, 1, 0), (9, 0, 9)] {
        let mut s = basis(4, &[(&t, v)]);
        qft(&mut s, &t, false).unwrap();
        fourier_add(&mut s, Addend::Constant(a), &t, &[]).unwrap();
        qft(&mut s, &t, true).unwrap();
        assert_eq!(single_index(&s), e);
    }
}

#[test]
fn register_addition_exhaustive() {
    for n_t in 1..=4usize {
        for n_s in 1..=4usize {
            for signed in [false, true] {
                if signed && n_s < 2 {
                    continue;
                }
                let target = reg(0, n_t);
                let source = reg(n_t, n_s);
                let ctl = n_t + n_s;
                for v in 0..(1u64 << n_t) {
                    for w in 0..(1u64 << n_s) {
                        for c in 0..2u64 {
                            let mut s = basis(ctl + 1, &[(&target, v), (&source, w), (&[ctl], c)]);
                            qft(&mut s, &target, false).unwrap();
                            let addend = Addend::Register { qubits: &source, signed };
                            fourier_add(&mut s, addend, &target, &[ctl]).unwrap();
                            qft(&mut s, &target, true).unwrap();
                            let wv = if signed && (w >> (n_s - 1)) & 1 == 1 {
                                w as i64 - (1 << n_s)
                            } else {
                                w as i64
                            };
                            let sum = if c == 1 { v as i64 + wv } else { v as i64 };
                            let idx = single_index(&s);
                            assert_eq!(register_value(idx, &target), sum.rem_euclid(1 << n_t) as u64);
                            assert_eq!(register_value(idx, &source), w);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn overlapping_addition_registers_rejected() {
    let mut s = SparseState::new(4).unwrap();
    let r = Addend::Register { qubits: &[1, 2], signed: false };
    assert!(matches!(fourier_add(&mut s, r, &[0, 1], &[]), Err(Error::Circuit(_))));
}

/// Product code written by the multiplier: sum of retained partial products.
#[allow(clippy::too_many_arguments)]
fn product_oracle(a: u64, na: usize, pa: i32, b: u64, nb: usize, pb: i32, no: usize, po: i32) -> u64 {
    let shift = pa + pb - po;
    let mut acc = 0i128;
    for i in 0..na {
        for k in 0..nb {
            if (a >> i) & 1 == 1 && (b >> k) & 1 == 1 {
                let e = i as i32 + k as i32 - shift;
                if e >= 0 {
                    let term = 1i128 << e;
                    acc += if k + 1 == nb { -term } else { term };
                }
            }
        }
    }
    acc.rem_euclid(1i128 << no) as u64
}

#[test]
fn multiply_integer_formats_exhaustive() {
    for na in 1..=4usize {
        for nb in 2..=4usize {
            for no in 1..=4usize {
                let fa = FixedPointFormat::unsigned(na as u32, 0).unwrap();
                let fb = FixedPointFormat::twos_complement(nb as u32, 0).unwrap();
                let fo = FixedPointFormat::twos_complement(no.max(2) as u32, 0).unwrap();
                let no = no.max(2);
                let (ra, rb, ro) = (reg(0, na), reg(na, nb), reg(na + nb, no));
                let circ = multiply_circuit(&ra, &fa, &rb, &fb, &ro, &fo).unwrap();
                for a in 0..(1u64 << na) {
                    for b in 0..(1u64 << nb) {
                        let mut s = basis(na + nb + no, &[(&ra, a), (&rb, b)]);
                        s.run(&circ).unwrap();
                        let idx = single_index(&s);
                        let bv = fb.scaled_from_code(b);
                        let expect = twos(a as i64 * bv, no);
                        assert_eq!(register_value(idx, &ro), expect, "a={a} b={bv} no={no}");
                        assert_eq!(register_value(idx, &ra), a);
                        assert_eq!(register_value(idx, &rb), b);
                    }
                }
            }
        }
    }
}

#[test]
fn multiply_fixed_point_formats_exhaustive() {
    for (pa, pb, po) in [(1, 2, 2), (0, 3, 1), (2, 2, 4), (1, 1, 3), (0, 2, 0)] {
        let (na, nb, no) = (3usize, 4usize, 4usize);
        let fa = FixedPointFormat::unsigned(na as u32, pa).unwrap();
        let fb = FixedPointFormat::twos_complement(nb as u32, pb).unwrap();
        let fo = FixedPointFormat::twos_complement(no as u32, po).unwrap();
        let (ra, rb, ro) = (reg(0, na), reg(na, nb), reg(na + nb, no));
        let circ = multiply_circuit(&ra, &fa, &rb, &fb, &ro, &fo).unwrap();
        for a in 0..(1u64 << na) {
            for b in 0..(1u64 << nb) {
                let mut s = basis(na + nb + no, &[(&ra, a), (&rb, b)]);
                s.run(&circ).unwrap();
                let got = register_value(single_index(&s), &ro);
                assert_eq!(got, product_oracle(a, na, pa, b, nb, pb, no, po), "p=({pa},{pb},{po}) a={a} b={b}");
                if po >= pa + pb {
                    // Nothing dropped: the exact product, wrapped to the output width.
                    let exact = fa.decode_code(a) * fb.decode_code(b);
                    let k = (exact * 2f64.powi(po)).round() as i64;
                    assert_eq!(got, twos(k, no));
                }
            }
        }
    }
}

#[test]
fn multiply_examples() {
    let fa = FixedPointFormat::unsigned(3, 0).unwrap();
    let fb = FixedPointFormat::twos_complement(3, 0).unwrap();
    let fo = FixedPointFormat::twos_complement(5, 0).unwrap();
    let (ra, rb, ro) = (reg(0, 3), reg(3, 3), reg(6, 5));
    for (a, b, e) in [(2u64, 3i64, 6i64), (3, -2, -6), (0, -4, 0), (0, 3, 0)] {
        let mut s = basis(11, &[(&ra, a), (&rb, twos(b, 3))]);
        qft_multiply(&mut s, (&ra, fa), (&rb, fb), (&ro, fo)).unwrap();
        let got = fo.decode_code(register_value(single_index(&s), &ro));
        assert_eq!(got, e as f64);
    }
    let mut dirty = basis(11, &[(&ro, 1)]);
    assert!(matches!(
        qft_multiply(&mut dirty, (&ra, fa), (&rb, fb), (&ro, fo)),
        Err(Error::Precondition(_))
    ));
    let signed = FixedPointFormat::twos_complement(3, 0).unwrap();
    assert!(multiply_circuit(&ra, &signed, &rb, &fb, &ro, &fo).is_err());
}

#[test]
fn label_uniform_subdomains() {
    let x = reg(0, 4);
    let l = reg(4, 2);
    let scratch = 6;
    for v in 0..16u64 {
        let mut s = basis(7, &[(&x, v)]);
        label(&mut s, &x, &l, &[4, 8, 12], scratch).unwrap();
        let idx = single_index(&s);
        assert_eq!(register_value(idx, &l), v / 4, "x={v}");
        assert_eq!(register_value(idx, &x), v);
        assert_eq!(idx >> scratch & 1, 0);
    }
    let mut s = basis(7, &[(&x, 7)]);
    label(&mut s, &x, &l, &[4, 8, 12], scratch).unwrap();
    assert_eq!(register_value(single_index(&s), &l), 1);
    let mut s = basis(7, &[(&x, 15)]);
    label(&mut s, &x, &l, &[4, 8, 12], scratch).unwrap();
    assert_eq!(register_value(single_index(&s), &l), 3);
}

#[test]
fn label_irregular_thresholds_brute_force() {
    let x = reg(0, 5);
    let l = reg(5, 3);
    let thresholds = [1u64, 3, 6, 7, 16, 21, 31];
    for v in 0..32u64 {
        let mut s = basis(9, &[(&x, v)]);
        label(&mut s, &x, &l, &thresholds, 8).unwrap();
        let expect = thresholds.iter().filter(|&&t| t <= v).count() as u64;
        assert_eq!(register_value(single_index(&s), &l), expect, "x={v}");
    }
}

#[test]
fn label_single_subdomain_and_errors() {
    let x = reg(0, 3);
    let mut s = basis(4, &[(&x, 5)]);
    label(&mut s, &x, &[], &[], 3).unwrap();
    assert_eq!(single_index(&s), 5);
    let l = reg(3, 2);
    let mut s = basis(6, &[(&x, 5)]);
    assert!(matches!(label(&mut s, &x, &l, &[4, 2, 6], 5), Err(Error::Config(_))));
    assert!(matches!(label(&mut s, &x, &l, &[2, 2, 6], 5), Err(Error::Config(_))));
    assert!(matches!(label(&mut s, &x, &l, &[2, 4, 8], 5), Err(Error::Config(_))));
    assert!(matches!(label(&mut s, &x, &l, &[1, 2, 3, 4], 5), Err(Error::Config(_))));
}

#[test]
fn load_constants_examples() {
    let l = reg(0, 2);
    let c = reg(2, 4);
    let table = [0b0001, 0b1010, 0b0110, 0b1111];
    let mut s = basis(6, &[(&l, 2)]);
    load_constants(&mut s, &l, &c, &table, false).unwrap();
    assert_eq!(register_value(single_index(&s), &c), 0b0110);
    load_constants(&mut s, &l, &c, &table, true).unwrap();
    assert_eq!(single_index(&s), register_bits(2, &l));
    assert!(matches!(load_constants(&mut s, &l, &c, &table[..3], false), Err(Error::Config(_))));

    let mut u = SparseState::new(6).unwrap();
    u.apply_gate(gwprep_core::Gate::H, &[0], &[]).unwrap();
    u.apply_gate(gwprep_core::Gate::H, &[1], &[]).unwrap();
    load_constants(&mut u, &l, &c, &table, false).unwrap();
    let entries = u.entries();
    assert_eq!(entries.len(), 4);
    for (idx, a) in entries {
        assert!((a.norm_sqr() - 0.25).abs() < 1e-12);
        let lv = register_value(idx, &l) as usize;
        assert_eq!(register_value(idx, &c), table[lv]);
    }
    load_constants(&mut u, &l, &c, &table, true).unwrap();
    for (idx, _) in u.entries() {
        assert_eq!(register_value(idx, &c), 0);
    }
}

fn layout(n: usize, fx: i32, n_o: usize, fo: i32, n_c: usize, fc: i32, n_l: usize) -> PwlOracleLayout {
    PwlOracleLayout {
        x_reg: reg(0, n),
        x_format: FixedPointFormat::unsigned(n as u32, fx).unwrap(),
        out_reg: reg(n, n_o),
        out_format: FixedPointFormat::twos_complement(n_o as u32, fo).unwrap(),
        coeff_reg: reg(n + n_o, n_c),
        coeff_format: FixedPointFormat::twos_complement(n_c as u32, fc).unwrap(),
        label_reg: reg(n + n_o + n_c, n_l),
    }
}

fn uniform_x(l: &PwlOracleLayout) -> SparseState {
    let total = l.label_reg.iter().chain(&l.coeff_reg).chain(&l.out_reg).chain(&l.x_reg).max().unwrap() + 1;
    let mut s = SparseState::new(total).unwrap();
    for &q in &l.x_reg {
        s.apply_gate(gwprep_core::Gate::H, &[q], &[]).unwrap();
    }
    s
}

/// Output code per input code, asserting label/coefficient registers are clean.
fn read_outputs(s: &SparseState, l: &PwlOracleLayout) -> Vec<(u64, u64)> {
    let mut v = Vec::new();
    for (idx, a) in s.entries() {
        if a.norm_sqr() < 1e-20 {
            continue;
        }
        assert_eq!(register_value(idx, &l.coeff_reg), 0, "coefficient register dirty");
        assert_eq!(register_value(idx, &l.label_reg), 0, "label register dirty");
        v.push((register_value(idx, &l.x_reg), register_value(idx, &l.out_reg)));
    }
    v
}

#[test]
fn pwl_identity_and_constant() {
    let l = layout(4, 0, 6, 0, 6, 0, 0);
    let spec = build_pwl_spec(|x| x, [0.0, 16.0], 0, l.coeff_format, PwlOptions::integers()).unwrap();
    let mut s = uniform_x(&l);
    pwl_apply(&mut s, &l, &spec, false).unwrap();
    let outs = read_outputs(&s, &l);
    assert_eq!(outs.len(), 16);
    for (x, o) in outs {
        assert_eq!(o, x);
    }

    let l = layout(3, 0, 6, 4, 6, 4, 1);
    let spec = build_pwl_spec(|_| 0.8, [0.0, 8.0], 1, l.coeff_format, PwlOptions::integers()).unwrap();
    let mut s = uniform_x(&l);
    pwl_apply(&mut s, &l, &spec, false).unwrap();
    for (_, o) in read_outputs(&s, &l) {
        assert_eq!(l.out_format.decode_code(o), l.out_format.quantize(0.8));
    }
}

#[test]
fn pwl_inverse_restores_state() {
    let l = layout(4, 0, 7, 5, 7, 4, 2);
    let spec = build_pwl_spec(|x| 0.3 + 0.05 * x - 0.004 * x * x, [0.0, 16.0], 2, l.coeff_format, PwlOptions::integers()).unwrap();
    let mut s = uniform_x(&l);
    s.apply_gate(gwprep_core::Gate::Ry(0.7), &[0], &[]).unwrap();
    let before = s.entries();
    pwl_apply(&mut s, &l, &spec, false).unwrap();
    assert!(pwl_apply(&mut s, &l, &spec, false).is_err());
    pwl_apply(&mut s, &l, &spec, true).unwrap();
    let after: Vec<_> = s.entries().into_iter().filter(|e| e.1.norm_sqr() > 1e-24).collect();
    assert_eq!(after.len(), before.len());
    for ((i, a), (j, b)) in after.iter().zip(&before) {
        assert_eq!(i, j);
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn pwl_layout_mismatch_rejected() {
    let l = layout(4, 0, 7, 5, 6, 5, 2);
    let other = FixedPointFormat::twos_complement(6, 4).unwrap();
    let spec = build_pwl_spec(|x| x * 0.1, [0.0, 16.0], 2, other, PwlOptions::integers()).unwrap();
    assert!(matches!(pwl_circuit(&l, &spec), Err(Error::Config(_))));
    let spec = build_pwl_spec(|x| x * 0.1, [0.0, 16.0], 1, l.coeff_format, PwlOptions::integers()).unwrap();
    assert!(matches!(pwl_circuit(&l, &spec), Err(Error::Config(_))));
}

fn random_spec(l: &PwlOracleLayout, coeffs: &[(i64, i64)]) -> PwlSpec {
    let n_l = l.label_reg.len() as u32;
    let k = 1usize << n_l;
    let hi = (1u64 << l.x_reg.len()) as f64 * l.x_format.step();
    let fmt = l.coeff_format;
    let (lo_s, hi_s) = fmt.scaled_range();
    let span = hi_s - lo_s + 1;
    let pieces = (0..k)
        .map(|i| {
            let (a1, a0) = coeffs[i % coeffs.len()];
            PwlPiece {
                a1: (lo_s + a1.rem_euclid(span)) as f64 * fmt.step(),
                a0: (lo_s + a0.rem_euclid(span)) as f64 * fmt.step(),
                err_inf: 0.0,
                fit_err: 0.0,
            }
        })
        .collect();
    PwlSpec {
        domain: [0.0, hi],
        n_l,
        boundaries: (0..=k).map(|i| hi * i as f64 / k as f64).collect(),
        pieces,
        coeff_format: fmt,
        options: PwlOptions::integers(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn pwl_matches_classical_emulation(
        n in 1usize..5, n_o in 2usize..7, n_c in 2usize..6, n_l in 0usize..3,
        px in 0i32..2, pc in 0i32..5, po in 0i32..5,
        coeffs in prop::collection::vec((0i64..64, 0i64..64), 4),
    ) {
        let n_l = n_l.min(n);
        let l = layout(n, px, n_o, po, n_c, pc, n_l);
        let spec = random_spec(&l, &coeffs);
        let tables = pwl_tables(&l, &spec).unwrap();
        let mut s = uniform_x(&l);
        pwl_apply(&mut s, &l, &spec, false).unwrap();
        let outs = read_outputs(&s, &l);
        prop_assert_eq!(outs.len(), 1 << n);
        for (x, o) in outs {
            prop_assert_eq!(o, pwl_emulate(&l, &tables, x));
            if po >= px + pc {
                let xv = l.x_format.decode_code(x);
                let p = &spec.pieces[spec.piece_index(xv).unwrap()];
                let k = ((p.a1 * xv + p.a0) * 2f64.powi(po)).round() as i64;
                prop_assert_eq!(o, twos(k, n_o));
                prop_assert!((eval_pwl(&spec, xv).unwrap() - (p.a1 * xv + p.a0)).abs() < 1e-12);
            }
        }
        let cnots = pwl_circuit(&l, &spec).unwrap().cnot_cost(AncillaPolicy::None);
        prop_assert!(i128::from(cnots) <= c_lpf(n as u32, n_c as u32, n_l as u32, AncillaPolicy::None));
    }
}
