//! Inspiral waveform model: 2PN phase, Newtonian amplitude, frequency grid
//! and the normalised target state.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// `G M_sun / c^3` in seconds.
pub const MSUN_SECONDS: f64 = 4.92549e-6;

/// Source and detector parameters. Masses in solar masses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformParams {
    pub m1: f64,
    pub m2: f64,
    pub chi1z: f64,
    pub chi2z: f64,
    pub t_c: f64,
    pub phi_c: f64,
    pub distance: f64,
    pub f_plus: f64,
    pub f_cross: f64,
    pub iota: f64,
}

impl Default for WaveformParams {
    fn default() -> Self {
        Self {
            m1: 35.0,
            m2: 30.0,
            chi1z: 0.0,
            chi2z: 0.0,
            t_c: 0.0,
            phi_c: 0.0,
            distance: 1.0,
            f_plus: 1.0,
            f_cross: 0.0,
            iota: 0.0,
        }
    }
}

impl WaveformParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m1 > 0.0 && self.m2 > 0.0) || !self.m1.is_finite() || !self.m2.is_finite() {
            bail!(Domain, "masses must be positive and finite, got ({}, {})", self.m1, self.m2);
        }
        for chi in [self.chi1z, self.chi2z] {
            if !(chi.abs() <= 1.0) {
                bail!(Domain, "spin {chi} outside [-1, 1]");
            }
        }
        if !(self.distance > 0.0) {
            bail!(Domain, "distance must be positive, got {}", self.distance);
        }
        for v in [self.t_c, self.phi_c, self.f_plus, self.f_cross, self.iota] {
            if !v.is_finite() {
                bail!(Domain, "non-finite waveform parameter");
            }
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedParams {
        derived_params(self.m1, self.m2, self.chi1z, self.chi2z)
    }
}

/// Mass and spin combinations entering the PN coefficients. Masses in solar masses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub total_mass: f64,
    pub eta: f64,
    pub chirp_mass: f64,
    pub beta: f64,
    pub sigma: f64,
}

pub fn derived_params(m1: f64, m2: f64, chi1z: f64, chi2z: f64) -> DerivedParams {
    let m = m1 + m2;
    let eta = m1 * m2 / (m * m);
    let chirp_mass = libm::pow(eta, 0.6) * m;
    let so = |mi: f64, chi: f64| chi * (113.0 * (mi / m) * (mi / m) + 75.0 * eta);
    let beta = (so(m1, chi1z) + so(m2, chi2z)) / 12.0;
    // Aligned spins: L.chi1 L.chi2 and chi1.chi2 coincide.
    let sigma = eta / 48.0 * (721.0 - 247.0) * chi1z * chi2z;
    DerivedParams { total_mass: m, eta, chirp_mass, beta, sigma }
}

/// Returns `(Q, Phi0)`.
pub fn antenna_projection(f_plus: f64, f_cross: f64, iota: f64) -> (f64, f64) {
    let c = libm::cos(iota);
    let a_plus = f_plus * (1.0 + c * c) / 2.0;
    let a_cross = f_cross * c;
    (libm::hypot(a_plus, a_cross), libm::atan2(a_cross, a_plus))
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f > 0.0) || !f.is_finite() {
        bail!(Domain, "frequency must be positive and finite, got {f}");
    }
    Ok(())
}

/// Newtonian amplitude `Q M_c^{5/6} f^{-7/6} / D`, or bare `f^{-7/6}`.
pub fn amplitude_newtonian(f: f64, params: &WaveformParams, normalized: bool) -> Result<f64> {
    check_frequency(f)?;
    let shape = libm::pow(f, -7.0 / 6.0);
    if normalized {
        return Ok(shape);
    }
    let (q, _) = antenna_projection(params.f_plus, params.f_cross, params.iota);
    let mc = params.derived().chirp_mass * MSUN_SECONDS;
    Ok(q * libm::pow(mc, 5.0 / 6.0) * shape / params.distance)
}

/// Truncation order of the PN expansions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PnOrder {
    Newtonian,
    OnePn,
    OnePointFivePn,
    #[default]
    TwoPn,
}

impl PnOrder {
    fn includes(self, o: PnOrder) -> bool {
        self >= o
    }
}

/// Frequency-domain phase to 2PN order.
pub fn phase_2pn(f: f64, params: &WaveformParams) -> Result<f64> {
    phase_pn(f, params, PnOrder::TwoPn)
}

pub fn phase_pn(f: f64, params: &WaveformParams, order: PnOrder) -> Result<f64> {
    check_frequency(f)?;
    let d = params.derived();
    let m = d.total_mass * MSUN_SECONDS;
    let mc = d.chirp_mass * MSUN_SECONDS;
    let v = PI * m * f;
    let eta = d.eta;
    let mut bracket = 1.0;
    if order.includes(PnOrder::OnePn) {
        bracket += 20.0 / 9.0 * (743.0 / 336.0 + 11.0 / 4.0 * eta) * libm::pow(v, 2.0 / 3.0);
    }
    if order.includes(PnOrder::OnePointFivePn) {
        bracket -= 4.0 * (4.0 * PI - d.beta) * v;
    }
    if order.includes(PnOrder::TwoPn) {
        let c = 3058673.0 / 1016064.0 + 5429.0 / 1008.0 * eta + 617.0 / 144.0 * eta * eta - d.sigma;
        bracket += 10.0 * c * libm::pow(v, 4.0 / 3.0);
    }
    let chirp = 3.0 / 128.0 * libm::pow(PI * mc * f, -5.0 / 3.0) * bracket;
    Ok(2.0 * PI * f * params.t_c - params.phi_c - PI / 4.0 + chirp)
}

/// Frequency evolution `df/dt` in Hz/s.
pub fn dfdt_2pn(f: f64, params: &WaveformParams, order: PnOrder) -> Result<f64> {
    check_frequency(f)?;
    let d = params.derived();
    let m = d.total_mass * MSUN_SECONDS;
    let mc = d.chirp_mass * MSUN_SECONDS;
    let v = PI * m * f;
    let eta = d.eta;
    let mut bracket = 1.0;
    if order.includes(PnOrder::OnePn) {
        bracket -= (743.0 / 336.0 + 11.0 / 4.0 * eta) * libm::pow(v, 2.0 / 3.0);
    }
    if order.includes(PnOrder::OnePointFivePn) {
        bracket += (4.0 * PI - d.beta) * v;
    }
    if order.includes(PnOrder::TwoPn) {
        let c = 34103.0 / 18144.0 + 13661.0 / 2016.0 * eta + 59.0 / 18.0 * eta * eta + d.sigma;
        bracket += c * libm::pow(v, 4.0 / 3.0);
    }
    Ok(96.0 / (5.0 * PI * mc * mc) * libm::pow(PI * mc * f, 11.0 / 3.0) * bracket)
}

/// Stationary-phase amplitude `Q h_0(f) (d^2 Phi / dt^2)^{-1/2}` with
/// `d^2 Phi / dt^2 = 2 pi df/dt`.
pub fn spa_amplitude(f: f64, params: &WaveformParams, order: PnOrder) -> Result<f64> {
    let rate = dfdt_2pn(f, params, order)?;
    if !(rate > 0.0) {
        bail!(Domain, "df/dt = {rate} is not positive at f = {f}");
    }
    let (q, _) = antenna_projection(params.f_plus, params.f_cross, params.iota);
    let mc = params.derived().chirp_mass * MSUN_SECONDS;
    let h0 = libm::pow(mc, 5.0 / 3.0) * libm::pow(2.0 * PI * f, 2.0 / 3.0) / params.distance;
    Ok(q * h0 / libm::sqrt(2.0 * PI * rate))
}

/// Uniform discretisation of `[f_min, f_max)` into `2^n` bins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub f_min: f64,
    pub f_max: f64,
    pub n: u32,
    pub delta_f: f64,
    pub duration: f64,
    pub n_int: i32,
    pub p: i32,
}

fn ceil_log2(x: f64) -> i32 {
    let l = libm::log2(x);
    let r = libm::round(l);
    if (l - r).abs() < 1e-12 {
        r as i32
    } else {
        libm::ceil(l) as i32
    }
}

pub fn frequency_grid(f_min: f64, f_max: f64, n: u32) -> Result<FrequencyGrid> {
    if !(f_min >= 0.0 && f_max > f_min && f_max.is_finite()) {
        bail!(Domain, "need 0 <= f_min < f_max, got [{f_min}, {f_max}]");
    }
    if n == 0 || n > 40 {
        bail!(Domain, "qubit count {n} outside 1..=40");
    }
    let bins = (1u64 << n) as f64;
    let delta_f = (f_max - f_min) / bins;
    let duration = 1.0 / delta_f;
    Ok(FrequencyGrid {
        f_min,
        f_max,
        n,
        delta_f,
        duration,
        n_int: ceil_log2(bins * delta_f),
        p: ceil_log2(duration),
    })
}

impl FrequencyGrid {
    pub fn bins(&self) -> usize {
        1usize << self.n
    }

    /// Lower edge `f_min + j Δf`.
    pub fn frequency(&self, j: usize) -> f64 {
        self.f_min + j as f64 * self.delta_f
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.bins()).map(|j| self.frequency(j)).collect()
    }
}

/// How bin amplitudes are aggregated from the continuous amplitude.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMode {
    #[default]
    BinIntegral,
    Midpoint,
}

fn antiderivative(f: f64) -> f64 {
    -6.0 * libm::pow(f, -1.0 / 6.0)
}

/// Unnormalised real bin amplitudes.
fn raw_amplitudes(params: &WaveformParams, grid: &FrequencyGrid, mode: MassMode) -> Result<Vec<f64>> {
    let scale = amplitude_newtonian(1.0, params, false)?;
    if !(scale > 0.0) {
        bail!(Domain, "amplitude prefactor vanishes (Q = 0)");
    }
    let mut out = Vec::with_capacity(grid.bins());
    for j in 0..grid.bins() {
        let lo = grid.frequency(j);
        let a = match mode {
            MassMode::BinIntegral => {
                check_frequency(lo)?;
                antiderivative(lo + grid.delta_f) - antiderivative(lo)
            }
            MassMode::Midpoint => amplitude_newtonian(lo + grid.delta_f / 2.0, params, true)? * grid.delta_f,
        };
        out.push(scale * a);
    }
    Ok(out)
}

/// Unit-norm real amplitudes `Ã_j`.
pub fn target_amplitudes(params: &WaveformParams, grid: &FrequencyGrid, mode: MassMode) -> Result<Vec<f64>> {
    params.validate()?;
    let raw = raw_amplitudes(params, grid, mode)?;
    let norm = raw.iter().map(|a| a * a).sum::<f64>();
    let norm = libm::sqrt(norm);
    Ok(raw.into_iter().map(|a| a / norm).collect())
}

/// Probability masses `|Ã_j|^2`, summing to one.
pub fn bin_masses(params: &WaveformParams, grid: &FrequencyGrid, mode: MassMode) -> Result<Vec<f64>> {
    Ok(target_amplitudes(params, grid, mode)?.into_iter().map(|a| a * a).collect())
}

/// Phases `Ψ(f_j)` at the lower bin edges.
pub fn bin_phases(params: &WaveformParams, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    (0..grid.bins()).map(|j| phase_2pn(grid.frequency(j), params)).collect()
}

/// Normalised `Ã_j e^{iΨ(f_j)}`.
pub fn target_state(params: &WaveformParams, grid: &FrequencyGrid, mode: MassMode) -> Result<Vec<Complex64>> {
    let amps = target_amplitudes(params, grid, mode)?;
    let phases = bin_phases(params, grid)?;
    Ok(amps.into_iter().zip(phases).map(|(a, psi)| Complex64::from_polar(a, psi)).collect())
}
