//! Rounding primitives shared by every approximation routine.

use crate::error::{ApxError, Result};
use crate::ratio::Ratio;

/// Largest admissible input value.
pub const VALUE_CAP: u64 = 1 << 50;

/// Largest power of two `≤ x`, or 1 when `x < 2`.
pub fn pow2_below(x: Ratio) -> u64 {
    let f = x.floor();
    if f < 2 {
        1
    } else {
        1u64 << (63 - f.leading_zeros())
    }
}

/// `⌈log₂ x⌉` for `x ≥ 1`, with `ceil_log2(1) = 0`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

fn scaled(x: u64, k: u64, q: u64, eps: Ratio, up: bool) -> Result<u64> {
    if q == 0 || eps.is_zero() {
        return Err(ApxError::input("scale and eps must be positive"));
    }
    let num = (x as u128)
        .checked_mul(k as u128)
        .and_then(|v| v.checked_mul(eps.den() as u128))
        .ok_or_else(|| ApxError::input("scaled value overflows"))?;
    let den = q as u128 * eps.num() as u128;
    let v = if up { num.div_ceil(den) } else { num / den };
    u64::try_from(v).map_err(|_| ApxError::input("scaled value overflows"))
}

/// `⌈k·x / (q·ε)⌉`
pub fn round_up_scaled(x: u64, k: u64, q: u64, eps: Ratio) -> Result<u64> {
    scaled(x, k, q, eps, true)
}

/// `⌊k·x / (q·ε)⌋`
pub fn round_down_scaled(x: u64, k: u64, q: u64, eps: Ratio) -> Result<u64> {
    scaled(x, k, q, eps, false)
}

pub fn check_eps(eps: Ratio) -> Result<()> {
    if eps.is_zero() || eps >= Ratio::ONE {
        return Err(ApxError::input(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(())
}

pub fn check_values(values: &[u64]) -> Result<()> {
    match values.iter().find(|&&v| v > VALUE_CAP) {
        Some(v) => Err(ApxError::input(format!("value {v} exceeds 2^50"))),
        None => Ok(()),
    }
}
