//! Float math shims.
//!
//! Inherent `f64` transcendentals live in `std`; this crate builds without it,
//! so every module routes through these libm-backed wrappers. Using one code
//! path in both test and no_std builds also keeps results bit-identical
//! across build modes.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    num_traits::Float::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, e: f64) -> f64 {
    num_traits::Float::powf(x, e)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    num_traits::Float::ln(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    num_traits::Float::abs(x)
}

#[inline]
pub(crate) fn cbrt(x: f64) -> f64 {
    num_traits::Float::cbrt(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    num_traits::Float::ceil(x)
}
