//! Degree-1 minimax fits by Remez exchange, and piecewise-linear specs with
//! quantized coefficients for the arithmetic oracles.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::fixedpoint::FixedPointFormat;
use crate::math::wrap_unit;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub a0: f64,
    pub a1: f64,
    /// Largest absolute residual on the evaluation grid.
    pub err_inf: f64,
    /// Final reference points, ascending.
    pub alternation: [f64; 3],
    /// Residuals `f - (a1 x + a0)` at the reference points.
    pub residuals: [f64; 3],
}

/// Chebyshev extrema grid of `points` nodes spanning `[a, b]`, endpoints included.
pub fn chebyshev_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return alloc::vec![0.5 * (a + b)];
    }
    let mut xs: Vec<f64> = (0..points)
        .map(|k| {
            let t = libm::cos(PI * k as f64 / (points - 1) as f64);
            0.5 * (a + b) - 0.5 * (b - a) * t
        })
        .collect();
    xs[0] = a;
    xs[points - 1] = b;
    xs
}

/// Minimax line for `f` over `[a, b]`, evaluated on a Chebyshev grid of `grid_density` points.
pub fn fit_linear_minimax<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, grid_density: usize) -> Result<LinearFit> {
    if !(a < b) {
        bail!(Domain, "interval [{a}, {b}] is empty");
    }
    let xs = chebyshev_grid(a, b, grid_density.max(3));
    let ys = eval_finite(&f, &xs)?;
    fit_linear_minimax_points(&xs, &ys)
}

fn eval_finite<F: Fn(f64) -> f64>(f: &F, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let y = f(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::Domain(format!("f({x}) = {y} is not finite")))
            }
        })
        .collect()
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][c] = r[row];
        }
        *o = det(mc) / d;
    }
    Some(out)
}

/// Discrete minimax line through points `(xs, ys)`; `xs` strictly ascending.
pub fn fit_linear_minimax_points(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.is_empty() {
        bail!(Domain, "need matching, nonempty abscissae and ordinates");
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        bail!(Domain, "abscissae must be strictly ascending");
    }
    if ys.iter().chain(xs).any(|v| !v.is_finite()) {
        bail!(Domain, "non-finite sample");
    }
    let n = xs.len();
    if n == 1 {
        return Ok(LinearFit {
            a0: ys[0],
            a1: 0.0,
            err_inf: 0.0,
            alternation: [xs[0]; 3],
            residuals: [0.0; 3],
        });
    }
    if n == 2 {
        let a1 = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        let a0 = ys[0] - a1 * xs[0];
        return Ok(LinearFit {
            a0,
            a1,
            err_inf: 0.0,
            alternation: [xs[0], xs[1], xs[1]],
            residuals: [0.0; 3],
        });
    }
    // Center abscissae for conditioning.
    let xc = 0.5 * (xs[0] + xs[n - 1]);
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(f64::MIN_POSITIVE);
    let mut refs = [0, n / 2, n - 1];
    let (mut c0, mut c1, mut e) = (0.0, 0.0, 0.0);
    for _ in 0..200 {
        let m = core::array::from_fn(|r| {
            let s = if r % 2 == 0 { 1.0 } else { -1.0 };
            [1.0, xs[refs[r]] - xc, s]
        });
        let sol = solve3(m, refs.map(|i| ys[i]))
            .ok_or_else(|| Error::Domain("singular Remez reference".into()))?;
        (c0, c1, e) = (sol[0], sol[1], sol[2]);
        let (mut worst, mut worst_r) = (0, 0.0f64);
        for i in 0..n {
            let r = ys[i] - c0 - c1 * (xs[i] - xc);
            if r.abs() > worst_r.abs() {
                worst = i;
                worst_r = r;
            }
        }
        if worst_r.abs() <= e.abs() * (1.0 + 1e-12) + 1e-14 * scale || refs.contains(&worst) {
            break;
        }
        let sign_at = |k: usize| {
            let s = if k % 2 == 0 { e } else { -e };
            s >= 0.0
        };
        let up = worst_r >= 0.0;
        if worst < refs[0] {
            if up == sign_at(0) {
                refs[0] = worst;
            } else {
                refs = [worst, refs[0], refs[1]];
            }
        } else if worst > refs[2] {
            if up == sign_at(2) {
                refs[2] = worst;
            } else {
                refs = [refs[1], refs[2], worst];
            }
        } else if worst < refs[1] {
            if up == sign_at(0) {
                refs[0] = worst;
            } else {
                refs[1] = worst;
            }
        } else if up == sign_at(1) {
            refs[1] = worst;
        } else {
            refs[2] = worst;
        }
    }
    let a1 = c1;
    let a0 = c0 - c1 * xc;
    let err_inf = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - a1 * x - a0).abs())
        .fold(0.0, f64::max);
    let _ = e;
    Ok(LinearFit {
        a0,
        a1,
        err_inf,
        alternation: refs.map(|i| xs[i]),
        residuals: refs.map(|i| ys[i] - a1 * xs[i] - a0),
    })
}

/// Evaluation grid used per subdomain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitGrid {
    /// Chebyshev extrema on the closed subdomain.
    Chebyshev { points: usize },
    /// Integer codes `x` with `lo <= x < hi` in each subdomain.
    Integers,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PwlOptions {
    pub grid: FitGrid,
    /// Fit modulo one: coefficients are reduced by integers, which leaves
    /// `A1 x + A0 mod 1` unchanged on the integer grid. Requires [`FitGrid::Integers`].
    pub wrap: bool,
}

impl Default for PwlOptions {
    fn default() -> Self {
        PwlOptions {
            grid: FitGrid::Chebyshev { points: 512 },
            wrap: false,
        }
    }
}

impl PwlOptions {
    pub fn integers() -> Self {
        PwlOptions {
            grid: FitGrid::Integers,
            wrap: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwlPiece {
    /// Quantized intercept.
    pub a0: f64,
    /// Quantized slope.
    pub a1: f64,
    /// Largest error of the quantized line on the subdomain grid.
    pub err_inf: f64,
    /// Minimax error before quantization.
    pub fit_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwlSpec {
    pub domain: [f64; 2],
    pub n_l: u32,
    /// `2^{n_l} + 1` ascending points from `domain[0]` to `domain[1]`.
    pub boundaries: Vec<f64>,
    pub pieces: Vec<PwlPiece>,
    pub coeff_format: FixedPointFormat,
    pub options: PwlOptions,
}

impl PwlSpec {
    /// Subdomain holding `x`; boundaries belong to the piece on their right and
    /// the upper domain end to the last piece.
    pub fn piece_index(&self, x: f64) -> Result<usize> {
        let [lo, hi] = self.domain;
        if !(x >= lo && x <= hi) {
            bail!(Domain, "x = {x} outside [{lo}, {hi}]");
        }
        let k = self.boundaries[1..self.boundaries.len() - 1]
            .iter()
            .filter(|&&b| b <= x)
            .count();
        Ok(k)
    }

    pub fn max_err(&self) -> f64 {
        self.pieces.iter().map(|p| p.err_inf).fold(0.0, f64::max)
    }

    pub fn max_fit_err(&self) -> f64 {
        self.pieces.iter().map(|p| p.fit_err).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let k = 1usize << self.n_l;
        if self.boundaries.len() != k + 1 || self.pieces.len() != k {
            bail!(Config, "spec with n_l = {} needs {} pieces", self.n_l, k);
        }
        if self.boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            bail!(Config, "boundaries must be strictly ascending");
        }
        if self.boundaries[0] != self.domain[0] || self.boundaries[k] != self.domain[1] {
            bail!(Config, "boundaries must span the domain");
        }
        if self.pieces.iter().any(|p| !(p.err_inf >= 0.0)) {
            bail!(Config, "negative error bound");
        }
        Ok(())
    }
}

/// `A1 x + A0` with the quantized coefficients of `x`'s subdomain.
pub fn eval_pwl(spec: &PwlSpec, x: f64) -> Result<f64> {
    let p = &spec.pieces[spec.piece_index(x)?];
    Ok(p.a1 * x + p.a0)
}

fn piece_grid(lo: f64, hi: f64, grid: FitGrid) -> Vec<f64> {
    match grid {
        FitGrid::Chebyshev { points } => chebyshev_grid(lo, hi, points.max(3)),
        FitGrid::Integers => {
            let start = libm::ceil(lo) as i64;
            let mut v = Vec::new();
            let mut x = start;
            while (x as f64) < hi {
                v.push(x as f64);
                x += 1;
            }
            v
        }
    }
}

fn coefficient_error(fmt: &FixedPointFormat, k: usize, which: &str, value: f64) -> Error {
    Error::CoefficientRange {
        context: format!("subdomain {k}, {which}"),
        value,
        lo: fmt.min_value(),
        hi: fmt.max_value(),
    }
}

fn quantize_coefficient(fmt: &FixedPointFormat, value: f64, wrap: bool, k: usize, which: &str) -> Result<f64> {
    let scaled = if wrap {
        fmt.wrap_scaled(value)
            .map_err(|_| coefficient_error(fmt, k, which, value))?
    } else {
        let s = fmt.round_scaled(value);
        let (lo, hi) = fmt.scaled_range();
        if !(s >= lo as f64 && s <= hi as f64) {
            return Err(coefficient_error(fmt, k, which, value));
        }
        s as i64
    };
    Ok(scaled as f64 * fmt.step())
}

/// Uniformly split `domain` into `2^{n_l}` subdomains, fit each by minimax and
/// quantize the coefficients to `coeff_fmt`.
pub fn build_pwl_spec<F: Fn(f64) -> f64>(
    f: F,
    domain: [f64; 2],
    n_l: u32,
    coeff_fmt: FixedPointFormat,
    options: PwlOptions,
) -> Result<PwlSpec> {
    let [lo, hi] = domain;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        bail!(Domain, "domain [{lo}, {hi}] is empty");
    }
    if n_l > 20 {
        bail!(Config, "n_l = {n_l} is too large");
    }
    if options.wrap && options.grid != FitGrid::Integers {
        bail!(Config, "wrap mode needs the integer grid");
    }
    let k_count = 1usize << n_l;
    let width = (hi - lo) / k_count as f64;
    let mut boundaries: Vec<f64> = (0..=k_count).map(|k| lo + k as f64 * width).collect();
    boundaries[k_count] = hi;

    let mut pieces = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let xs = piece_grid(boundaries[k], boundaries[k + 1], options.grid);
        if xs.is_empty() {
            bail!(Config, "subdomain {k} holds no grid points");
        }
        let ys = eval_finite(&f, &xs)?;
        let fit = fit_linear_minimax_points(&xs, &ys)?;
        let step = coeff_fmt.step();
        let a1_unwrapped = coeff_fmt.round_scaled(fit.a1) * step;
        let a1 = quantize_coefficient(&coeff_fmt, fit.a1, options.wrap, k, "slope")?;
        let (rmin, rmax) = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| y - a1_unwrapped * x)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r), b.max(r)));
        let a0 = quantize_coefficient(&coeff_fmt, 0.5 * (rmin + rmax), options.wrap, k, "intercept")?;
        let err_inf = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let r = y - (a1 * x + a0);
                if options.wrap {
                    wrap_unit(r).abs()
                } else {
                    r.abs()
                }
            })
            .fold(0.0, f64::max);
        pieces.push(PwlPiece {
            a0,
            a1,
            err_inf,
            fit_err: fit.err_inf,
        });
    }
    Ok(PwlSpec {
        domain,
        n_l,
        boundaries,
        pieces,
        coeff_format: coeff_fmt,
        options,
    })
}
