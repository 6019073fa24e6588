//! Number-theoretic transform over the prime `15·2^27 + 1`.
//!
//! Products are exact as long as every true coefficient is below the
//! modulus, which callers guarantee by bounding counts by input length.

use crate::error::{ApxError, Result};

pub const MODULUS: u32 = 2_013_265_921;
const ROOT: u64 = 31;
/// Longest supported transform.
pub const MAX_LEN: usize = 1 << 27;

#[inline(always)]
fn mul(a: u32, b: u32) -> u32 {
    ((a as u64 * b as u64) % MODULUS as u64) as u32
}

#[inline(always)]
fn add(a: u32, b: u32) -> u32 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline(always)]
fn sub(a: u32, b: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn pow(mut b: u64, mut e: u64) -> u32 {
    let m = MODULUS as u64;
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u32
}

fn transform(a: &mut [u32], invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut twiddles = Vec::with_capacity(n / 2);
    let mut len = 2;
    while len <= n {
        let mut w = pow(ROOT, (MODULUS as u64 - 1) / len as u64);
        if invert {
            w = pow(w as u64, MODULUS as u64 - 2);
        }
        let half = len / 2;
        twiddles.clear();
        let mut cur = 1u32;
        for _ in 0..half {
            twiddles.push(cur);
            cur = mul(cur, w);
        }
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((x, y), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let u = *x;
                let v = mul(*y, t);
                *x = add(u, v);
                *y = sub(u, v);
            }
        }
        len <<= 1;
    }
    if invert {
        let inv = pow(n as u64, MODULUS as u64 - 2);
        for x in a.iter_mut() {
            *x = mul(*x, inv);
        }
    }
}

/// Transform length needed for a full linear product.
pub fn product_len(la: usize, lb: usize) -> usize {
    (la + lb - 1).next_power_of_two()
}

/// Linear convolution modulo [`MODULUS`], truncated to `out_len` terms.
pub fn convolve(a: &[u32], b: &[u32], out_len: usize) -> Result<Vec<u32>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Ok(vec![0; out_len]);
    }
    let n = product_len(a.len(), b.len());
    if n > MAX_LEN {
        return Err(ApxError::resource(format!(
            "transform length {n} exceeds 2^27"
        )));
    }
    let mut fa = vec![0u32; n];
    fa[..a.len()].copy_from_slice(a);
    transform(&mut fa, false);
    let mut fb = vec![0u32; n];
    fb[..b.len()].copy_from_slice(b);
    transform(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = mul(*x, *y);
    }
    transform(&mut fa, true);
    fa.resize(out_len.max(n), 0);
    fa.truncate(out_len);
    Ok(fa)
}
