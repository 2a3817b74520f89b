//! Hybrid generative training of a layered `Ry` + CX-chain circuit against a
//! target distribution over `2^n` bins. The generator is simulated exactly;
//! the discriminator is a small classical network.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::statevector::{Circuit, Precision, QuantumState, Statevector};

const LEAKY_SLOPE: f64 = 0.2;
const LOG_CLAMP: f64 = 1e-12;
const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QganConfig {
    pub n: u32,
    pub layers: u32,
    pub iterations: usize,
    /// Samples per side each iteration; exact expectations when absent.
    pub shots: Option<u64>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub seed: u64,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    /// Discriminator updates per generator update.
    pub d_steps: u32,
    /// Initial generator angles are drawn from `[-s, s]`.
    pub init_scale: f64,
}

impl Default for QganConfig {
    fn default() -> Self {
        QganConfig {
            n: 6,
            layers: 20,
            iterations: 1500,
            shots: None,
            learning_rate: 0.01,
            beta1: 0.7,
            beta2: 0.999,
            seed: 0,
            hidden_width: 16,
            hidden_layers: 2,
            d_steps: 100,
            init_scale: 0.0,
        }
    }
}

impl QganConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 16 {
            bail!(Config, "n = {} outside 1..=16", self.n);
        }
        if self.layers == 0 {
            bail!(Config, "at least one layer is required");
        }
        if self.iterations == 0 {
            bail!(Config, "at least one iteration is required");
        }
        if self.shots == Some(0) {
            bail!(Config, "shots must be at least 1");
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            bail!(Config, "learning rate must be positive");
        }
        for b in [self.beta1, self.beta2] {
            if !(0.0..1.0).contains(&b) {
                bail!(Config, "Adam momentum {b} outside [0, 1)");
            }
        }
        if self.hidden_width == 0 || self.hidden_layers == 0 {
            bail!(Config, "discriminator needs at least one hidden unit and layer");
        }
        if !(self.init_scale >= 0.0) || !self.init_scale.is_finite() {
            bail!(Config, "init_scale must be finite and non-negative");
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        n_params(self.n, self.layers)
    }
}

/// Per-iteration generator loss, discriminator loss and mismatch.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub generator_loss: Vec<f64>,
    pub discriminator_loss: Vec<f64>,
    pub mismatch: Vec<f64>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.mismatch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mismatch.is_empty()
    }

    fn push(&mut self, lg: f64, ld: f64, mm: f64) {
        self.generator_loss.push(lg);
        self.discriminator_loss.push(ld);
        self.mismatch.push(mm);
    }
}

/// Trained generator angles, loadable in place of the amplitude oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PqcParams {
    pub n: u32,
    pub layers: u32,
    pub params: Vec<f64>,
}

impl PqcParams {
    pub fn validate(&self) -> Result<()> {
        if self.params.len() != n_params(self.n, self.layers) {
            bail!(
                Config,
                "expected {} angles for n={} L={}, found {}",
                n_params(self.n, self.layers),
                self.n,
                self.layers,
                self.params.len()
            );
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            bail!(Config, "non-finite angle");
        }
        Ok(())
    }

    pub fn circuit(&self) -> Result<Circuit> {
        pqc_circuit(&self.params, self.n, self.layers)
    }
}

pub fn n_params(n: u32, layers: u32) -> usize {
    (layers as usize + 1) * n as usize
}

pub fn pqc_cnot_count(n: u32, layers: u32) -> u64 {
    u64::from(layers) * u64::from(n.saturating_sub(1))
}

fn check_params(params: &[f64], n: u32, layers: u32) -> Result<()> {
    if n == 0 || layers == 0 {
        bail!(Config, "n and L must be at least 1");
    }
    if params.len() != n_params(n, layers) {
        bail!(
            Config,
            "expected (L+1)n = {} angles, found {}",
            n_params(n, layers),
            params.len()
        );
    }
    Ok(())
}

/// `H^{⊗n}`, then `L` layers of `Ry` on every qubit followed by CX `k -> k+1`,
/// then a closing `Ry` layer. Angle `i·n + j` drives qubit `j` in layer `i`.
pub fn pqc_circuit(params: &[f64], n: u32, layers: u32) -> Result<Circuit> {
    check_params(params, n, layers)?;
    let n = n as usize;
    let mut c = Circuit::new();
    for q in 0..n {
        c.h(q);
    }
    for (i, row) in params.chunks(n).enumerate() {
        for (q, &t) in row.iter().enumerate() {
            c.ry(q, t);
        }
        if i < layers as usize {
            for k in 0..n - 1 {
                c.cx(k, k + 1);
            }
        }
    }
    Ok(c)
}

pub fn pqc_apply(params: &[f64], n: u32, layers: u32) -> Result<Statevector> {
    let circuit = pqc_circuit(params, n, layers)?;
    let mut s = Statevector::new(n as usize, Precision::Double)?;
    s.run(&circuit)?;
    Ok(s)
}

/// Real amplitudes of the generator state, via a dedicated real simulator.
pub fn pqc_amplitudes(params: &[f64], n: u32, layers: u32) -> Result<Vec<f64>> {
    check_params(params, n, layers)?;
    Ok(real_pqc(params, n as usize, layers as usize))
}

fn real_pqc(params: &[f64], n: usize, layers: usize) -> Vec<f64> {
    let dim = 1usize << n;
    let mut psi = vec![libm::pow(2.0, -(n as f64) / 2.0); dim];
    let mut tmp = vec![0.0; dim];
    for (i, row) in params.chunks(n).enumerate() {
        for (q, &t) in row.iter().enumerate() {
            let (s, c) = (libm::sin(t / 2.0), libm::cos(t / 2.0));
            let bit = 1usize << q;
            for lo in (0..dim).filter(|i| i & bit == 0) {
                let (a0, a1) = (psi[lo], psi[lo | bit]);
                psi[lo] = c * a0 - s * a1;
                psi[lo | bit] = s * a0 + c * a1;
            }
        }
        if i < layers {
            for k in 0..n - 1 {
                for (idx, slot) in tmp.iter_mut().enumerate() {
                    let src = if (idx >> k) & 1 == 1 { idx ^ (1 << (k + 1)) } else { idx };
                    *slot = psi[src];
                }
                core::mem::swap(&mut psi, &mut tmp);
            }
        }
    }
    psi
}

fn sigmoid(z: f64) -> f64 {
    let s = 1.0 / (1.0 + libm::exp(-z));
    s.clamp(f64::EPSILON / 2.0, 1.0 - f64::EPSILON)
}

fn leaky(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        LEAKY_SLOPE * z
    }
}

fn leaky_slope(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// Fully connected `1 -> w -> ... -> w -> 1` network, leaky-ReLU hidden
/// units, sigmoid output. Weights are stored row-major per layer, then biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discriminator {
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

impl Discriminator {
    pub fn zeros(width: usize, depth: usize) -> Self {
        let mut sizes = vec![1];
        sizes.extend(core::iter::repeat_n(width, depth));
        sizes.push(1);
        let count = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        Discriminator {
            sizes,
            params: vec![0.0; count],
        }
    }

    /// Uniform `±1/√fan_in` initialisation.
    pub fn random<R: Rng>(width: usize, depth: usize, rng: &mut R) -> Self {
        let mut d = Self::zeros(width, depth);
        let mut off = 0;
        for w in d.sizes.clone().windows(2) {
            let bound = 1.0 / libm::sqrt(w[0] as f64);
            for p in &mut d.params[off..off + w[0] * w[1] + w[1]] {
                *p = rng.gen_range(-bound..bound);
            }
            off += w[0] * w[1] + w[1];
        }
        d
    }

    /// Pre-activations per layer for input `x`.
    fn activations(&self, x: f64) -> Vec<Vec<f64>> {
        let mut pre: Vec<Vec<f64>> = Vec::with_capacity(self.sizes.len() - 1);
        let mut input = vec![x];
        let mut off = 0;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &self.params[off..off + fan_in * fan_out];
            let bias = &self.params[off + fan_in * fan_out..off + fan_in * fan_out + fan_out];
            let z: Vec<f64> = (0..fan_out)
                .map(|o| bias[o] + weights[o * fan_in..(o + 1) * fan_in].iter().zip(&input).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            off += fan_in * fan_out + fan_out;
            if l + 2 < self.sizes.len() {
                input = z.iter().map(|&v| leaky(v)).collect();
            }
            pre.push(z);
        }
        pre
    }

    pub fn forward(&self, x: f64) -> f64 {
        sigmoid(self.activations(x).last().expect("output layer")[0])
    }

    /// Adds `scale · ∂z/∂ω` at input `x` to `grad`, where `z` is the output logit.
    fn accumulate_logit_gradient(&self, x: f64, pre: &[Vec<f64>], scale: f64, grad: &mut [f64]) {
        let n_layers = self.sizes.len() - 1;
        let mut offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for w in self.sizes.windows(2) {
            offsets.push(off);
            off += w[0] * w[1] + w[1];
        }
        let mut delta = vec![scale];
        for l in (0..n_layers).rev() {
            let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = offsets[l];
            let input: Vec<f64> = if l == 0 { vec![x] } else { pre[l - 1].iter().map(|&v| leaky(v)).collect() };
            for o in 0..fan_out {
                for i in 0..fan_in {
                    grad[off + o * fan_in + i] += delta[o] * input[i];
                }
                grad[off + fan_in * fan_out + o] += delta[o];
            }
            if l > 0 {
                let weights = &self.params[off..off + fan_in * fan_out];
                delta = (0..fan_in)
                    .map(|i| {
                        let back: f64 = (0..fan_out).map(|o| weights[o * fan_in + i] * delta[o]).sum();
                        back * leaky_slope(pre[l - 1][i])
                    })
                    .collect();
            }
        }
    }
}

fn clamped_ln(v: f64) -> f64 {
    libm::log(v.max(LOG_CLAMP))
}

/// `(L_G, L_D)` from sample values in `[0, 1]`:
/// `L_G = -mean ln D(x)`, `L_D = mean ln D(x') + mean ln(1 - D(x))`.
pub fn losses(gen_samples: &[f64], real_samples: &[f64], disc: &Discriminator) -> Result<(f64, f64)> {
    if gen_samples.is_empty() || real_samples.is_empty() {
        bail!(Config, "loss needs samples on both sides");
    }
    let (ng, nr) = (gen_samples.len() as f64, real_samples.len() as f64);
    let lg = -gen_samples.iter().map(|&x| clamped_ln(disc.forward(x))).sum::<f64>() / ng;
    let fake = gen_samples.iter().map(|&x| clamped_ln(1.0 - disc.forward(x))).sum::<f64>() / ng;
    let real = real_samples.iter().map(|&x| clamped_ln(disc.forward(x))).sum::<f64>() / nr;
    Ok((lg, real + fake))
}

/// Losses as expectations over bin distributions `q` (generator) and `p` (target).
pub fn expected_losses(q: &[f64], p: &[f64], disc: &Discriminator) -> (f64, f64) {
    let d = scores(disc, q.len());
    expected_losses_from_scores(q, p, &d)
}

fn expected_losses_from_scores(q: &[f64], p: &[f64], d: &[f64]) -> (f64, f64) {
    let mut lg = 0.0;
    let mut ld = 0.0;
    for j in 0..d.len() {
        lg -= q[j] * clamped_ln(d[j]);
        ld += p[j] * clamped_ln(d[j]) + q[j] * clamped_ln(1.0 - d[j]);
    }
    (lg, ld)
}

/// Discriminator input for bin `j` of `bins`.
pub fn bin_input(j: usize, bins: usize) -> f64 {
    if bins <= 1 {
        0.0
    } else {
        j as f64 / (bins - 1) as f64
    }
}

fn scores(disc: &Discriminator, bins: usize) -> Vec<f64> {
    (0..bins).map(|j| disc.forward(bin_input(j, bins))).collect()
}

/// Exact parameter-shift gradient of `L_G = -Σ q_j ln D_j`.
pub fn generator_gradient(params: &[f64], n: u32, layers: u32, disc: &Discriminator) -> Result<Vec<f64>> {
    check_params(params, n, layers)?;
    let d = scores(disc, 1 << n);
    Ok(shift_gradient(params, n as usize, layers as usize, &d, None))
}

fn shift_gradient(
    params: &[f64],
    n: usize,
    layers: usize,
    d: &[f64],
    mut sampler: Option<(&mut ChaCha8Rng, u64)>,
) -> Vec<f64> {
    let log_d: Vec<f64> = d.iter().map(|&v| clamped_ln(v)).collect();
    let mut shifted = params.to_vec();
    let mut probs = |theta: &[f64]| -> Vec<f64> {
        let q: Vec<f64> = real_pqc(theta, n, layers).iter().map(|a| a * a).collect();
        match sampler.as_mut() {
            Some((rng, shots)) => sample_frequencies(&q, *shots, rng),
            None => q,
        }
    };
    let half_pi = core::f64::consts::FRAC_PI_2;
    (0..params.len())
        .map(|k| {
            shifted[k] = params[k] + half_pi;
            let plus = probs(&shifted);
            shifted[k] = params[k] - half_pi;
            let minus = probs(&shifted);
            shifted[k] = params[k];
            -0.5 * plus.iter().zip(&minus).zip(&log_d).map(|((a, b), l)| (a - b) * l).sum::<f64>()
        })
        .collect()
}

/// Empirical frequencies of `shots` multinomial draws.
fn sample_frequencies<R: Rng>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        counts[cdf.partition_point(|&c| c <= u).min(probs.len() - 1)] += 1;
    }
    counts.into_iter().map(|c| c as f64 / shots as f64).collect()
}

#[derive(Clone, Debug)]
struct Adam {
    lr: f64,
    b1: f64,
    b2: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(len: usize, config: &QganConfig) -> Self {
        Adam {
            lr: config.learning_rate,
            b1: config.beta1,
            b2: config.beta2,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    /// One descent step along `grad`.
    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - libm::pow(self.b1, self.t as f64);
        let c2 = 1.0 - libm::pow(self.b2, self.t as f64);
        for i in 0..params.len() {
            self.m[i] = self.b1 * self.m[i] + (1.0 - self.b1) * grad[i];
            self.v[i] = self.b2 * self.v[i] + (1.0 - self.b2) * grad[i] * grad[i];
            params[i] -= self.lr * (self.m[i] / c1) / (libm::sqrt(self.v[i] / c2) + ADAM_EPS);
        }
    }
}

/// Gradient of `-L_D` with respect to the discriminator weights.
fn discriminator_gradient(disc: &Discriminator, q: &[f64], p: &[f64]) -> Vec<f64> {
    let mut grad = vec![0.0; disc.params.len()];
    let bins = q.len();
    for j in 0..bins {
        let x = bin_input(j, bins);
        let pre = disc.activations(x);
        let d = sigmoid(pre[pre.len() - 1][0]);
        let scale = q[j] * d - p[j] * (1.0 - d);
        if scale != 0.0 {
            disc.accumulate_logit_gradient(x, &pre, scale, &mut grad);
        }
    }
    grad
}

fn mismatch_real(amps: &[f64], target: &[f64]) -> f64 {
    let overlap: f64 = amps.iter().zip(target).map(|(a, b)| a * b).sum();
    1.0 - libm::fabs(overlap)
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    /// Angles with the lowest mismatch seen.
    pub params: PqcParams,
    pub best_mismatch: f64,
    pub best_iteration: usize,
    pub history: TrainHistory,
    pub discriminator: Discriminator,
}

/// Alternating discriminator ascent and generator descent against `p_mass`.
pub fn train(p_mass: &[f64], config: &QganConfig) -> Result<TrainResult> {
    config.validate()?;
    let bins = 1usize << config.n;
    if p_mass.len() != bins {
        bail!(Config, "target has {} bins, generator has {bins}", p_mass.len());
    }
    if p_mass.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        bail!(Domain, "target masses must be finite and non-negative");
    }
    let total: f64 = p_mass.iter().sum();
    if !(total > 0.0) {
        bail!(Domain, "target has no mass");
    }
    let p: Vec<f64> = p_mass.iter().map(|v| v / total).collect();
    let target: Vec<f64> = p.iter().map(|v| libm::sqrt(*v)).collect();
    let (n, layers) = (config.n as usize, config.layers as usize);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut theta: Vec<f64> = (0..config.n_params())
        .map(|_| {
            if config.init_scale > 0.0 {
                rng.gen_range(-config.init_scale..config.init_scale)
            } else {
                0.0
            }
        })
        .collect();
    let mut disc = Discriminator::random(config.hidden_width, config.hidden_layers, &mut rng);
    let mut d_opt = Adam::new(disc.params.len(), config);
    let mut g_opt = Adam::new(theta.len(), config);

    let mut history = TrainHistory::default();
    let mut best = (f64::INFINITY, 0usize, theta.clone());
    for it in 0..config.iterations {
        let amps = real_pqc(&theta, n, layers);
        let q: Vec<f64> = amps.iter().map(|a| a * a).collect();
        let mm = mismatch_real(&amps, &target);
        if mm < best.0 {
            best = (mm, it, theta.clone());
        }
        let (q_seen, p_seen) = match config.shots {
            Some(s) => (sample_frequencies(&q, s, &mut rng), sample_frequencies(&p, s, &mut rng)),
            None => (q.clone(), p.clone()),
        };
        for _ in 0..config.d_steps {
            let g = discriminator_gradient(&disc, &q_seen, &p_seen);
            d_opt.step(&mut disc.params, &g);
        }
        let d = scores(&disc, bins);
        let (lg, ld) = expected_losses_from_scores(&q_seen, &p_seen, &d);
        history.push(lg, ld, mm);
        if !lg.is_finite() || !ld.is_finite() || disc.params.iter().any(|v| !v.is_finite()) {
            return Err(Error::Training {
                iteration: it,
                history: Box::new(history),
            });
        }
        let sampler = config.shots.map(|s| (&mut rng, s));
        let grad = shift_gradient(&theta, n, layers, &d, sampler);
        g_opt.step(&mut theta, &grad);
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Training {
                iteration: it,
                history: Box::new(history),
            });
        }
    }
    Ok(TrainResult {
        params: PqcParams {
            n: config.n,
            layers: config.layers,
            params: best.2,
        },
        best_mismatch: best.0,
        best_iteration: best.1,
        history,
        discriminator: disc,
    })
}
