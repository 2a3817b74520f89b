//! Small float helpers shared across modules.

pub(crate) use num_traits::Float;

/// Exact `2^e` for any exponent inside the normal range.
#[inline]
pub(crate) fn pow2(e: i32) -> f64 {
    libm::ldexp(1.0, e)
}

/// Round half away from zero.
#[inline]
pub(crate) fn round_half_away(x: f64) -> f64 {
    Float::round(x)
}

/// Distance of `x` to the nearest integer, signed, in [-0.5, 0.5].
#[inline]
pub(crate) fn wrap_unit(x: f64) -> f64 {
    x - Float::round(x)
}

