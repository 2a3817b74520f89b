//! Acceptance criteria AC-1..AC-9. One line per criterion; exits nonzero if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gwprep::commands::run_prepare;
use gwprep::config::RunConfig;
use gwprep::Method;
use gwprep_core::fixedpoint::FixedPointFormat;
use gwprep_core::gatecost::{c_gw, c_lpf, ratio_curve, CostPolicy, Variant};
use gwprep_core::grover_rudolph::{gr_plan, gr_prepare};
use gwprep_core::minimax::{build_pwl_spec, PwlOptions};
use gwprep_core::phase_prep::{phase_plan, psi_prime_oracle, psi_prime_table};
use gwprep_core::qarith::{fourier_add, pwl_apply, qft, qft_multiply, Addend, PwlOracleLayout};
use gwprep_core::qgan::{expected_losses, generator_gradient, pqc_amplitudes, pqc_circuit, train, Discriminator, PqcParams, QganConfig};
use gwprep_core::statevector::{fidelity_amplitudes, mismatch_from_fidelity, project_register, register_value};
use gwprep_core::waveform::{bin_masses, spa_amplitude, target_amplitudes, MassMode, PnOrder, WaveformParams};
use gwprep_core::{AncillaPolicy, Gate, QuantumState, Representation, SparseState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const AC1_MIN_FIDELITY: f64 = 0.999;
const AC1_MAX_MISMATCH: f64 = 1e-3;
const AC2_MAX_DELTA_PSI: f64 = 0.04;
const AC3_MIN_FIDELITY: f64 = 0.99;
const AC4_MAX_BEST_MISMATCH: f64 = 2e-2;
const AC4_LOSS_BAND: (f64, f64) = (0.5, 0.9);
const AC4_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const AC5_MIN_FIDELITY: f64 = 0.95;
const AC6_PAPER_AMPLITUDE: u64 = 23_796;
const AC6_PAPER_PHASE_ORACLE: u64 = 9_464;
const AC6_PAPER_COMBINED: u64 = 42_724;
const AC6_FACTOR: f64 = 2.0;
const AC7_CROSSOVER_DECADES: (f64, f64) = (2.5, 3.5);
const AC7_TEN_DAYS: f64 = 864_000.0;
const AC7_MIN_GR_RATIO: f64 = 100.0;
const AC7_PQC_GAP_DECADES: (f64, f64) = (0.5, 1.5);
const AC8_RESTORE_TOL: f64 = 1e-9;
const AC9_SPA_REL: f64 = 1e-6;
const AC9_GRAD_REL: f64 = 1e-4;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn paper() -> RunConfig {
    RunConfig::load("paper-n6").unwrap().resolve().unwrap()
}

fn ac1() -> Verdict {
    let cfg = paper();
    let grid = cfg.frequency_grid().unwrap();
    let p = bin_masses(&cfg.waveform, &grid, MassMode::BinIntegral).unwrap();
    let plan = gr_plan(&p, &cfg.gr).unwrap();
    let mut s = SparseState::new(plan.layout.n_qubits()).unwrap();
    gr_prepare(&mut s, &plan).unwrap();
    let proj = project_register(&s, &plan.layout.freq).unwrap();
    let target: Vec<Complex64> = target_amplitudes(&cfg.waveform, &grid, MassMode::BinIntegral)
        .unwrap()
        .into_iter()
        .map(|a| Complex64::new(a, 0.0))
        .collect();
    let f = fidelity_amplitudes(&target, &proj.amplitudes).unwrap();
    let mm = mismatch_from_fidelity(f);
    verdict(
        f >= AC1_MIN_FIDELITY && mm <= AC1_MAX_MISMATCH && proj.residual_weight < 1e-12,
        format!("GR amplitude fidelity {f:.7}, mismatch {mm:.2e} (paper 0.999 / 4.1e-4)"),
    )
}

fn ac2() -> Verdict {
    let cfg = paper();
    let grid = cfg.frequency_grid().unwrap();
    let psi = psi_prime_table(&cfg.waveform, &grid).unwrap();
    let plan = phase_plan(&psi, &cfg.phase).unwrap();
    let mut s = SparseState::new(plan.layout.n_qubits()).unwrap();
    for &q in &plan.layout.freq {
        s.apply_gate(Gate::H, &[q], &[]).unwrap();
    }
    psi_prime_oracle(&mut s, &plan, false).unwrap();
    let fmt = plan.ancilla_format();
    let mut seen = vec![false; psi.len()];
    let mut worst = 0.0f64;
    let mut clean = true;
    for (idx, a) in s.entries() {
        if a.norm_sqr() < 1e-20 {
            continue;
        }
        let j = register_value(idx, &plan.layout.freq) as usize;
        let stored = fmt.decode_code(register_value(idx, &plan.layout.ancilla));
        let d = stored - psi[j];
        worst = worst.max((d - d.round()).abs());
        seen[j] = true;
        clean &= register_value(idx, &plan.layout.coeff) == 0 && register_value(idx, &plan.layout.label) == 0;
    }
    let all = seen.iter().all(|&b| b);
    verdict(
        worst < AC2_MAX_DELTA_PSI && all && clean,
        format!("max |dPsi'| = {worst:.4} over {} bins (paper < 0.04)", psi.len()),
    )
}

fn ac3() -> Verdict {
    let r = run_prepare(&paper(), Method::Gr, None).unwrap().report;
    verdict(
        r.fidelity >= AC3_MIN_FIDELITY,
        format!("GR + phase fidelity {:.5}, mismatch {:.2e} (paper 0.995 / 2.4e-3)", r.fidelity, r.mismatch),
    )
}

struct Trained {
    best: Option<(u64, PqcParams, f64)>,
}

fn ac4(trained: &mut Trained) -> Verdict {
    let cfg = RunConfig::load("qgan-l20").unwrap().resolve().unwrap();
    let grid = cfg.frequency_grid().unwrap();
    let p = bin_masses(&cfg.waveform, &grid, cfg.mass_mode).unwrap();
    let mut parts = Vec::new();
    let mut band_ok = None;
    for seed in AC4_SEEDS {
        let r = train(&p, &QganConfig { seed, ..cfg.qgan.clone() }).unwrap();
        let tail = &r.history.generator_loss[r.history.len() * 9 / 10..];
        let in_band = tail.iter().all(|&v| v >= AC4_LOSS_BAND.0 && v <= AC4_LOSS_BAND.1);
        parts.push(format!("{seed}:{:.1e}", r.best_mismatch));
        if trained.best.as_ref().is_none_or(|b| r.best_mismatch < b.2) {
            trained.best = Some((seed, r.params.clone(), r.best_mismatch));
            band_ok = Some(in_band);
        }
    }
    let (seed, _, best) = trained.best.as_ref().unwrap();
    let band_ok = band_ok.unwrap();
    verdict(
        *best <= AC4_MAX_BEST_MISMATCH && band_ok,
        format!(
            "best-of-5 mismatch {best:.2e} (seed {seed}), final-10% L_G in [0.5, 0.9]: {band_ok}; per seed {} (paper 8.36e-3)",
            parts.join(" ")
        ),
    )
}

fn ac5(trained: &Trained) -> Verdict {
    let Some((seed, params, _)) = trained.best.as_ref() else {
        return verdict(false, "no trained generator".into());
    };
    let r = run_prepare(&paper(), Method::Pqc, Some(params)).unwrap().report;
    verdict(
        r.fidelity >= AC5_MIN_FIDELITY,
        format!("trained generator (seed {seed}) + phase fidelity {:.5} (paper 0.979)", r.fidelity),
    )
}

fn within_factor(measured: u64, paper: u64) -> bool {
    let m = measured as f64;
    let p = paper as f64;
    m >= p / AC6_FACTOR && m <= p * AC6_FACTOR
}

fn ac6() -> Verdict {
    let cfg = paper();
    let gr = run_prepare(&cfg, Method::Gr, None).unwrap().report;
    let params = PqcParams { n: 6, layers: 20, params: vec![0.1; 126] };
    let pqc_cnots = pqc_circuit(&params.params, 6, 20).unwrap().cnot_cost(AncillaPolicy::None);
    let policy = cfg.gr.policy;
    let gw_bound = c_gw(6, cfg.gr.n_c, cfg.gr.n_l, Variant::GroverRudolph, policy);
    let phase_bound = c_lpf(6, cfg.phase.n_c, cfg.phase.n_l, cfg.phase.policy);
    let bounds_ok = gr.cnot_count as i128 <= gw_bound && gr.cnot_phase_oracle as i128 <= phase_bound;
    let amp_ok = within_factor(gr.cnot_amplitude, AC6_PAPER_AMPLITUDE);
    let phase_ok = within_factor(gr.cnot_phase_oracle, AC6_PAPER_PHASE_ORACLE);
    let combined_ok = within_factor(gr.cnot_count, AC6_PAPER_COMBINED);
    let pqc_ok = pqc_cnots == 100;
    let mark = |b: bool| if b { "ok" } else { "out" };
    verdict(
        bounds_ok && amp_ok && phase_ok && combined_ok && pqc_ok,
        format!(
            "amplitude {} [{}] vs 23796, phase oracle {} [{}] vs 9464, combined {} [{}] vs 42724, PQC {} [{}], \
             bounds C_GW {} / C_LPF {} [{}]",
            gr.cnot_amplitude,
            mark(amp_ok),
            gr.cnot_phase_oracle,
            mark(phase_ok),
            gr.cnot_count,
            mark(combined_ok),
            pqc_cnots,
            mark(pqc_ok),
            gw_bound,
            phase_bound,
            mark(bounds_ok)
        ),
    )
}

fn ac7() -> Verdict {
    let policy = CostPolicy::default();
    let durations: Vec<f64> = (0..=70).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
    let rows = ratio_curve(&durations, &policy).unwrap();
    let crossing = rows.iter().find(|r| r.ratio_gr > 1.0).map(|r| r.t_seconds);
    let ten = ratio_curve(&[AC7_TEN_DAYS], &policy).unwrap().remove(0);
    let gap = (ten.ratio_pqc / ten.ratio_gr).log10();
    let cross_ok = crossing.is_some_and(|t| {
        let d = t.log10();
        d >= AC7_CROSSOVER_DECADES.0 && d <= AC7_CROSSOVER_DECADES.1
    });
    let pass = cross_ok
        && ten.ratio_gr >= AC7_MIN_GR_RATIO
        && gap >= AC7_PQC_GAP_DECADES.0
        && gap <= AC7_PQC_GAP_DECADES.1;
    verdict(
        pass,
        format!(
            "GR ratio first > 1 at T = {:.0} s; at 10 days n = {}, GR ratio {:.0}, PQC/GR {:.2} decades",
            crossing.unwrap_or(f64::NAN),
            ten.n,
            ten.ratio_gr,
            gap
        ),
    )
}

fn basis(n: usize, regs: &[(&[usize], u64)]) -> SparseState {
    let mut s = SparseState::new(n).unwrap();
    for (r, v) in regs {
        for (k, &q) in r.iter().enumerate() {
            if (v >> k) & 1 == 1 {
                s.apply_gate(Gate::X, &[q], &[]).unwrap();
            }
        }
    }
    s
}

fn single_index(s: &SparseState) -> Option<u64> {
    let e: Vec<_> = s.entries().into_iter().filter(|(_, a)| a.norm_sqr() > 1e-12).collect();
    (e.len() == 1 && (e[0].1.norm_sqr() - 1.0).abs() < 1e-9).then(|| e[0].0)
}

fn reg(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

fn ac8() -> Verdict {
    let mut cases = 0u64;
    let mut bad = 0u64;
    // Register addition, signed and unsigned, with and without a control.
    for n_t in 1..=4usize {
        for n_s in 1..=4usize {
            for signed in [false, true] {
                if signed && n_s < 2 {
                    continue;
                }
                let (t, src, ctl) = (reg(0, n_t), reg(n_t, n_s), n_t + n_s);
                let fs = if signed {
                    FixedPointFormat::twos_complement(n_s as u32, 0).unwrap()
                } else {
                    FixedPointFormat::unsigned(n_s as u32, 0).unwrap()
                };
                for v in 0..1u64 << n_t {
                    for w in 0..1u64 << n_s {
                        for c in 0..2u64 {
                            let mut s = basis(ctl + 1, &[(&t, v), (&src, w), (&[ctl], c)]);
                            qft(&mut s, &t, false).unwrap();
                            fourier_add(&mut s, Addend::Register { qubits: &src, signed }, &t, &[ctl]).unwrap();
                            qft(&mut s, &t, true).unwrap();
                            let add = if c == 1 { fs.decode_code(w) as i64 } else { 0 };
                            let expect = (v as i64 + add).rem_euclid(1 << n_t) as u64;
                            cases += 1;
                            match single_index(&s) {
                                Some(i) if register_value(i, &t) == expect && register_value(i, &src) == w => {}
                                _ => bad += 1,
                            }
                        }
                    }
                }
            }
        }
    }
    // Multiplication with no dropped partial products: the exact fixed-point product.
    for na in 1..=4usize {
        for nb in 2..=4usize {
            for no in 2..=4usize {
                for (pa, pb) in [(0, 0), (1, 0), (0, 2), (1, 1)] {
                    let fa = FixedPointFormat::unsigned(na as u32, pa).unwrap();
                    let fb = FixedPointFormat::twos_complement(nb as u32, pb).unwrap();
                    let fo = FixedPointFormat::twos_complement(no as u32, pa + pb).unwrap();
                    let (ra, rb, ro) = (reg(0, na), reg(na, nb), reg(na + nb, no));
                    for a in 0..1u64 << na {
                        for b in 0..1u64 << nb {
                            let mut s = basis(na + nb + no, &[(&ra, a), (&rb, b)]);
                            qft_multiply(&mut s, (&ra, fa), (&rb, fb), (&ro, fo)).unwrap();
                            let k = fa.scaled_from_code(a) * fb.scaled_from_code(b);
                            let expect = (k as u64) & fo.mask();
                            cases += 1;
                            match single_index(&s) {
                                Some(i) if register_value(i, &ro) == expect && register_value(i, &ra) == a => {}
                                _ => bad += 1,
                            }
                        }
                    }
                }
            }
        }
    }
    // Forward then inverse oracle on a superposition.
    let layout = PwlOracleLayout {
        x_reg: reg(0, 4),
        x_format: FixedPointFormat::unsigned(4, 0).unwrap(),
        out_reg: reg(4, 7),
        out_format: FixedPointFormat::twos_complement(7, 5).unwrap(),
        coeff_reg: reg(11, 7),
        coeff_format: FixedPointFormat::twos_complement(7, 4).unwrap(),
        label_reg: reg(18, 2),
    };
    let spec = build_pwl_spec(
        |x| 0.3 + 0.05 * x - 0.004 * x * x,
        [0.0, 16.0],
        2,
        layout.coeff_format,
        PwlOptions::integers(),
    )
    .unwrap();
    let mut s = SparseState::new(20).unwrap();
    for q in 0..4 {
        s.apply_gate(Gate::H, &[q], &[]).unwrap();
    }
    s.apply_gate(Gate::Ry(0.7), &[0], &[]).unwrap();
    let before = s.entries();
    pwl_apply(&mut s, &layout, &spec, false).unwrap();
    let mut forward_clean = true;
    for (i, a) in s.entries() {
        if a.norm_sqr() > 1e-20 {
            forward_clean &= register_value(i, &layout.coeff_reg) == 0 && register_value(i, &layout.label_reg) == 0;
        }
    }
    pwl_apply(&mut s, &layout, &spec, true).unwrap();
    let after: Vec<_> = s.entries().into_iter().filter(|e| e.1.norm_sqr() > 1e-24).collect();
    let restore_err = if after.len() == before.len() {
        after
            .iter()
            .zip(&before)
            .map(|((i, a), (j, b))| if i == j { (a - b).norm() } else { f64::INFINITY })
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    verdict(
        bad == 0 && forward_clean && restore_err <= AC8_RESTORE_TOL,
        format!("{cases} exhaustive add/multiply cases, {bad} mismatches; pwl round trip error {restore_err:.1e}, ancillas cleared: {forward_clean}"),
    )
}

fn ac9() -> Verdict {
    // SPA amplitude slope.
    let w = WaveformParams::default();
    let h: f64 = 1e-4;
    let mut worst_slope = 0.0f64;
    for k in 0..=16 {
        let f = 40.0 + 8.0 * k as f64;
        let up = spa_amplitude(f * h.exp(), &w, PnOrder::Newtonian).unwrap().ln();
        let dn = spa_amplitude(f * (-h).exp(), &w, PnOrder::Newtonian).unwrap().ln();
        worst_slope = worst_slope.max(((up - dn) / (2.0 * h) / (-7.0 / 6.0) - 1.0).abs());
    }
    // Fixed-point round trips.
    let mut rt_bad = 0u64;
    let mut rt_cases = 0u64;
    for rep in [Representation::Unsigned, Representation::SignedMagnitude, Representation::TwosComplement] {
        for n in 2..=12u32 {
            for p in -2..=n as i32 + 1 {
                let fmt = FixedPointFormat::new(rep, n, p).unwrap();
                for code in 0..1u64 << n {
                    let back = fmt.encode_code(fmt.decode_code(code)).unwrap();
                    let neg_zero = rep == Representation::SignedMagnitude && code == 1 << (n - 1);
                    rt_cases += 1;
                    if back != code && !(neg_zero && back == 0) {
                        rt_bad += 1;
                    }
                }
            }
        }
    }
    // Parameter shift against central differences.
    let mut worst_grad = 0.0f64;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Discriminator::random(16, 2, &mut rng);
        let params: Vec<f64> = (0..9).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let g = generator_gradient(&params, 3, 2, &d).unwrap();
        let scale = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let loss = |t: &[f64]| {
            let q: Vec<f64> = pqc_amplitudes(t, 3, 2).unwrap().iter().map(|a| a * a).collect();
            expected_losses(&q, &[0.125; 8], &d).0
        };
        for k in 0..params.len() {
            let (mut up, mut dn) = (params.clone(), params.clone());
            up[k] += 1e-4;
            dn[k] -= 1e-4;
            let fd = (loss(&up) - loss(&dn)) / 2e-4;
            worst_grad = worst_grad.max((fd - g[k]).abs() / scale);
        }
    }
    verdict(
        worst_slope < AC9_SPA_REL && rt_bad == 0 && worst_grad < AC9_GRAD_REL,
        format!(
            "SPA slope rel err {worst_slope:.1e}; {rt_cases} fixed-point round trips, {rt_bad} failures; \
             parameter-shift vs finite difference rel err {worst_grad:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let mut trained = Trained { best: None };
    let mut failures = 0;
    let mut report = |id: &str, limit: Duration, run: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = run();
        let elapsed = t.elapsed();
        let pass = v.pass && elapsed <= limit;
        if !pass {
            failures += 1;
        }
        println!(
            "{id} {}: {} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64()
        );
    };
    report("AC-1", Duration::from_secs(300), &mut ac1);
    report("AC-2", Duration::from_secs(300), &mut ac2);
    report("AC-3", Duration::from_secs(600), &mut ac3);
    report("AC-4", Duration::from_secs(7200), &mut || ac4(&mut trained));
    report("AC-5", Duration::from_secs(600), &mut || ac5(&trained));
    report("AC-6", Duration::from_secs(600), &mut ac6);
    report("AC-7", Duration::from_secs(60), &mut ac7);
    report("AC-8", Duration::from_secs(600), &mut ac8);
    report("AC-9", Duration::from_secs(600), &mut ac9);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
