//! Capped boolean convolution (sumsets) with optional witnesses.

use crate::bitset::BoundedBitset;
use crate::error::{ApxError, Result};
use crate::ntt;

/// Marker for "no witness".
pub const NONE: u32 = u32::MAX;

fn with_zero(a: &BoundedBitset, t: u64) -> BoundedBitset {
    let mut a = a.truncated(t);
    a.set(0);
    a
}

fn ntt_cost(t: u64) -> u64 {
    let n = (2 * t + 2).next_power_of_two();
    // three transforms of n log n butterflies, in word-operation units
    3 * n * (64 - n.leading_zeros() as u64) / 4
}

fn check_len(t: u64) -> Result<()> {
    if (2 * t + 1) as usize > ntt::MAX_LEN {
        return Err(ApxError::resource(format!("convolution cap {t} too large")));
    }
    Ok(())
}

fn shift_or(small: &BoundedBitset, big: &BoundedBitset, cap: u64) -> BoundedBitset {
    let mut out = BoundedBitset::new(cap);
    for x in small.iter() {
        if x > cap {
            break;
        }
        out.or_shifted_from(big.words(), x, |_, _| {});
    }
    out
}

fn ntt_sumset(a: &BoundedBitset, b: &BoundedBitset, cap: u64) -> Result<BoundedBitset> {
    check_len(cap)?;
    let ind = |s: &BoundedBitset| {
        let mut v = vec![0u32; (cap + 1) as usize];
        for x in s.iter().take_while(|&x| x <= cap) {
            v[x as usize] = 1;
        }
        v
    };
    let c = ntt::convolve(&ind(a), &ind(b), (cap + 1) as usize)?;
    Ok(BoundedBitset::from_values(
        cap,
        c.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, _)| i as u64),
    ))
}

/// `{a + b : a ∈ A, b ∈ B, a + b ≤ cap}` without adding zero.
pub fn sumset(a: &BoundedBitset, b: &BoundedBitset, cap: u64) -> Result<BoundedBitset> {
    let (small, big) = if a.count() <= b.count() { (a, b) } else { (b, a) };
    let direct = small.count() * (cap / 64 + 1);
    if direct <= ntt_cost(cap) {
        Ok(shift_or(small, big, cap))
    } else {
        ntt_sumset(a, b, cap)
    }
}

/// `A ⊕_t B = {a + b ≤ t : a ∈ A ∪ {0}, b ∈ B ∪ {0}}`.
pub fn bool_convolve(a: &BoundedBitset, b: &BoundedBitset, t: u64) -> Result<BoundedBitset> {
    sumset(&with_zero(a, t), &with_zero(b, t), t)
}

/// [`bool_convolve`] that also records, for every member `s`, the part
/// `a ∈ A ∪ {0}` of one decomposition `s = a + b` (or [`NONE`]).
pub fn bool_convolve_witness(
    a: &BoundedBitset,
    b: &BoundedBitset,
    t: u64,
) -> Result<(BoundedBitset, Vec<u32>)> {
    let a = with_zero(a, t);
    let b = with_zero(b, t);
    check_len(t)?;
    let av = a.to_vec();
    let bv = b.to_vec();
    let mut left = vec![NONE; (t + 1) as usize];
    let mut out = BoundedBitset::new(t);
    if (av.len() as u64) * (bv.len() as u64) <= ntt_cost(t) * 2 {
        for &x in &av {
            for &y in bv.iter().take_while(|&&y| x + y <= t) {
                let s = (x + y) as usize;
                if left[s] == NONE {
                    left[s] = x as u32;
                    out.set(x + y);
                }
            }
        }
        return Ok((out, left));
    }
    let len = (t + 1) as usize;
    let mut ia = vec![0u32; len];
    let mut xa = vec![0u32; len];
    for &x in &av {
        ia[x as usize] = 1;
        xa[x as usize] = x as u32;
    }
    let mut ib = vec![0u32; len];
    for &y in &bv {
        ib[y as usize] = 1;
    }
    let counts = ntt::convolve(&ia, &ib, len)?;
    let sums = ntt::convolve(&xa, &ib, len)?;
    for s in 0..len {
        match counts[s] {
            0 => {}
            1 => {
                left[s] = sums[s];
                out.set(s as u64);
            }
            _ => {
                let x = av
                    .iter()
                    .take_while(|&&x| x <= s as u64)
                    .find(|&&x| b.get(s as u64 - x))
                    .expect("positive count has a decomposition");
                left[s] = *x as u32;
                out.set(s as u64);
            }
        }
    }
    Ok((out, left))
}
