//! Extended-value arithmetic on `[0, +inf]`.
//!
//! Infinity is a first-class value throughout the library. The conventions
//! `1/inf = 0`, `0 * inf = 0` and `0^0 = 1` are applied so that vanishing
//! weights never produce NaN in condition arithmetic.

/// Product with the convention `0 * inf = 0`.
#[inline]
pub fn xmul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Power with the conventions `0^0 = 1`, `inf^0 = 1`, `0^e = inf` for `e < 0`
/// and `inf^e = 0` for `e < 0`.
#[inline]
pub fn xpow(base: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if base == 0.0 {
        if e > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else if base.is_infinite() {
        if e > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        base.powf(e)
    }
}

/// Quotient with the conventions `x / inf = 0` and `0 / 0 = 0`.
#[inline]
pub fn xdiv(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b.is_infinite() {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}
