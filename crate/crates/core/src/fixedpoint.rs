//! Binary fixed-point codecs: unsigned, signed-magnitude and two's complement.
//!
//! A format with `n_bits` bits and precision `p` encodes reals on the grid
//! `k · 2^{-p}`. Codes are plain `u64` bit patterns with bit 0 the least
//! significant; the same layout is used for quantum registers (qubit 0 = LSB).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::math::{pow2, round_half_away};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Unsigned,
    SignedMagnitude,
    TwosComplement,
}

impl Representation {
    pub fn is_signed(self) -> bool {
        !matches!(self, Representation::Unsigned)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFormat", into = "RawFormat")]
pub struct FixedPointFormat {
    representation: Representation,
    n_bits: u32,
    precision: i32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFormat {
    representation: Representation,
    n_bits: u32,
    precision: i32,
}

impl TryFrom<RawFormat> for FixedPointFormat {
    type Error = Error;
    fn try_from(raw: RawFormat) -> Result<Self> {
        FixedPointFormat::new(raw.representation, raw.n_bits, raw.precision)
    }
}

impl From<FixedPointFormat> for RawFormat {
    fn from(f: FixedPointFormat) -> Self {
        RawFormat {
            representation: f.representation,
            n_bits: f.n_bits,
            precision: f.precision,
        }
    }
}

/// Largest register handled by the codecs.
pub const MAX_BITS: u32 = 62;

impl FixedPointFormat {
    pub fn new(representation: Representation, n_bits: u32, precision: i32) -> Result<Self> {
        let min_bits = if representation.is_signed() { 2 } else { 1 };
        if n_bits < min_bits || n_bits > MAX_BITS {
            bail!(
                Format,
                "{representation:?} format needs {min_bits}..={MAX_BITS} bits, got {n_bits}"
            );
        }
        if precision.unsigned_abs() > 900 {
            bail!(Format, "precision {precision} out of range");
        }
        Ok(FixedPointFormat {
            representation,
            n_bits,
            precision,
        })
    }

    pub fn unsigned(n_bits: u32, precision: i32) -> Result<Self> {
        Self::new(Representation::Unsigned, n_bits, precision)
    }

    pub fn signed_magnitude(n_bits: u32, precision: i32) -> Result<Self> {
        Self::new(Representation::SignedMagnitude, n_bits, precision)
    }

    pub fn twos_complement(n_bits: u32, precision: i32) -> Result<Self> {
        Self::new(Representation::TwosComplement, n_bits, precision)
    }

    /// Two's-complement format with `n_bits` bits whose range covers `[-bound, bound]`,
    /// using as many fractional bits as the range allows.
    pub fn twos_complement_covering(n_bits: u32, bound: f64) -> Result<Self> {
        let n_int = integer_bits_for(bound);
        Self::twos_complement(n_bits, n_bits as i32 - 1 - n_int)
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn precision(&self) -> i32 {
        self.precision
    }

    /// Bits left of the binary point, excluding the sign bit.
    pub fn integer_bits(&self) -> i32 {
        let sign = i32::from(self.representation.is_signed());
        self.n_bits as i32 - self.precision - sign
    }

    pub fn step(&self) -> f64 {
        pow2(-self.precision)
    }

    pub fn mask(&self) -> u64 {
        (1u64 << self.n_bits) - 1
    }

    /// Smallest and largest scaled integers `k` with value `k · 2^{-p}`.
    pub fn scaled_range(&self) -> (i64, i64) {
        let n = self.n_bits;
        match self.representation {
            Representation::Unsigned => (0, (1i64 << n) - 1),
            Representation::SignedMagnitude => {
                let m = (1i64 << (n - 1)) - 1;
                (-m, m)
            }
            Representation::TwosComplement => (-(1i64 << (n - 1)), (1i64 << (n - 1)) - 1),
        }
    }

    pub fn min_value(&self) -> f64 {
        self.scaled_range().0 as f64 * self.step()
    }

    pub fn max_value(&self) -> f64 {
        self.scaled_range().1 as f64 * self.step()
    }

    fn scale(&self, x: f64) -> f64 {
        libm::ldexp(x, self.precision)
    }

    /// Scaled integer for `x` rounded to the grid (no range check).
    pub fn round_scaled(&self, x: f64) -> f64 {
        round_half_away(self.scale(x))
    }

    /// Code for the scaled integer `k`.
    pub fn code_from_scaled(&self, k: i64) -> Result<u64> {
        let (lo, hi) = self.scaled_range();
        if k < lo || k > hi {
            return Err(self.range_error(k as f64 * self.step()));
        }
        Ok(match self.representation {
            Representation::Unsigned => k as u64,
            Representation::SignedMagnitude => {
                let sign = u64::from(k < 0) << (self.n_bits - 1);
                sign | k.unsigned_abs()
            }
            Representation::TwosComplement => (k as u64) & self.mask(),
        })
    }

    /// Scaled integer held by `code`. Bits above `n_bits` are ignored.
    pub fn scaled_from_code(&self, code: u64) -> i64 {
        let code = code & self.mask();
        let top = 1u64 << (self.n_bits - 1);
        match self.representation {
            Representation::Unsigned => code as i64,
            Representation::SignedMagnitude => {
                let mag = (code & (top - 1)) as i64;
                if code & top != 0 {
                    -mag
                } else {
                    mag
                }
            }
            Representation::TwosComplement => {
                if code & top != 0 {
                    code as i64 - (1i64 << self.n_bits)
                } else {
                    code as i64
                }
            }
        }
    }

    fn range_error(&self, value: f64) -> Error {
        Error::Range {
            value,
            lo: self.min_value(),
            hi: self.max_value(),
        }
    }

    /// Code of `x` rounded to nearest, ties away from zero.
    pub fn encode_code(&self, x: f64) -> Result<u64> {
        if !x.is_finite() {
            return Err(self.range_error(x));
        }
        let k = self.round_scaled(x);
        let (lo, hi) = self.scaled_range();
        if k < lo as f64 || k > hi as f64 {
            return Err(self.range_error(x));
        }
        self.code_from_scaled(k as i64)
    }

    pub fn decode_code(&self, code: u64) -> f64 {
        let k = self.scaled_from_code(code);
        let v = k as f64 * self.step();
        // -0 is a valid signed-magnitude pattern but decodes to 0.0.
        if v == 0.0 {
            0.0
        } else {
            v
        }
    }

    pub fn encode(&self, x: f64) -> Result<Bits> {
        Ok(Bits::new(self.encode_code(x)?, self.n_bits))
    }

    pub fn decode(&self, bits: &Bits) -> Result<f64> {
        if bits.len() != self.n_bits {
            bail!(
                Format,
                "bitstring has {} bits, format expects {}",
                bits.len(),
                self.n_bits
            );
        }
        Ok(self.decode_code(bits.value()))
    }

    /// Nearest representable value, saturating at the range ends. NaN maps to 0.
    pub fn quantize(&self, x: f64) -> f64 {
        if x.is_nan() {
            return 0.0;
        }
        let (lo, hi) = self.scaled_range();
        let k = self.round_scaled(x).clamp(lo as f64, hi as f64);
        self.decode_code(self.code_from_scaled(k as i64).unwrap_or(0))
    }

    /// Scaled integer congruent to `x` modulo one unit (`2^p` steps) that fits the
    /// format, for quantities where only the fractional part matters.
    pub fn wrap_scaled(&self, x: f64) -> Result<i64> {
        if !x.is_finite() {
            return Err(self.range_error(x));
        }
        if self.precision < 0 {
            return Ok(0);
        }
        let period = pow2(self.precision);
        let k = self.round_scaled(x);
        let (lo, hi) = self.scaled_range();
        let reduced = k - period * libm::floor((k - lo as f64) / period);
        if reduced > hi as f64 {
            return Err(self.range_error(x));
        }
        Ok(reduced as i64)
    }
}

/// Integer bits (excluding sign) needed so that `2^{n_int} > bound`.
pub fn integer_bits_for(bound: f64) -> i32 {
    let bound = bound.abs();
    if bound == 0.0 || !bound.is_finite() {
        return 0;
    }
    let mut n = libm::ceil(libm::log2(bound)) as i32;
    while pow2(n) <= bound {
        n += 1;
    }
    while n > -60 && pow2(n - 1) > bound {
        n -= 1;
    }
    n
}

/// A bit pattern of fixed length, printed most-significant bit first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bits {
    value: u64,
    len: u32,
}

impl Bits {
    pub fn new(value: u64, len: u32) -> Self {
        let mask = if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
        Bits {
            value: value & mask,
            len,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bits from least to most significant.
    pub fn to_vec_lsb_first(&self) -> Vec<bool> {
        (0..self.len).map(|i| (self.value >> i) & 1 == 1).collect()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if (self.value >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 64 {
            bail!(Format, "bitstring length {} not in 1..=64", s.len());
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => bail!(Format, "invalid bit {c:?}"),
                };
        }
        Ok(Bits::new(value, s.len() as u32))
    }
}

/// MSB-first text for the low `len` bits of `value`.
pub fn bitstring(value: u64, len: u32) -> String {
    alloc::format!("{}", Bits::new(value, len))
}
