//! Exact and `(1+ε)` min-plus (and max-plus) convolution.
//!
//! `None` entries are INFINITY: the identity of `min` in min mode and an
//! absent entry in max mode.  Outputs have length `|A| + |B| - 1`.

use serde::{Deserialize, Serialize};

use crate::bitset::BoundedBitset;
use crate::conv::sumset;
use crate::error::{ApxError, Result};
use crate::ntt;
use crate::numeric::{ceil_log2, check_eps, round_down_scaled, round_up_scaled, VALUE_CAP};
use crate::ratio::Ratio;

pub type Entry = Option<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Min,
    Max,
}

/// Exact engine used inside the scaling loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactEngine {
    /// Unary block encoding and one boolean convolution.
    Unary,
    /// Pairwise kernel over surviving entries.
    Direct,
    /// Cheapest of the two by a cost estimate.
    Auto,
}

fn check_seq(a: &[Entry]) -> Result<()> {
    if a.is_empty() {
        return Err(ApxError::input("sequences must be non-empty"));
    }
    if a.iter().flatten().any(|&v| v > VALUE_CAP) {
        return Err(ApxError::input("entry exceeds 2^50"));
    }
    Ok(())
}

fn max_finite(a: &[Entry], b: &[Entry]) -> Option<u64> {
    a.iter().chain(b).flatten().copied().max()
}

/// Unary encoding with blocks of width `2w`: value `v ∈ [1, w]` at
/// block `i` sets bit `2w·i + v - 1`.
pub fn unary_encode(a: &[Entry], w: u64) -> Result<BoundedBitset> {
    let width = 2 * w;
    let mut bits = BoundedBitset::new((a.len() as u64 * width).max(1) - 1);
    for (i, x) in a.iter().enumerate() {
        if let Some(v) = *x {
            if v == 0 || v > w {
                return Err(ApxError::input(format!("unary value {v} outside [1, {w}]")));
            }
            bits.set(i as u64 * width + v - 1);
        }
    }
    Ok(bits)
}

fn unary_len(na: usize, nb: usize, w: u64) -> u64 {
    (na + nb) as u64 * 2 * w
}

/// Exact convolution through the unary encoding.  Entries are shifted by
/// one so that zero is representable, and the result is shifted back by two.
pub fn minplus_exact(a: &[Entry], b: &[Entry], mode: Mode) -> Result<Vec<Entry>> {
    check_seq(a)?;
    check_seq(b)?;
    let n_out = a.len() + b.len() - 1;
    let Some(wmax) = max_finite(a, b) else {
        return Ok(vec![None; n_out]);
    };
    let w = wmax + 1;
    let len = unary_len(a.len(), b.len(), w);
    if len > ntt::MAX_LEN as u64 / 2 {
        return Err(ApxError::resource(format!(
            "unary encoding of length {len} exceeds the transform limit"
        )));
    }
    let shift = |s: &[Entry]| s.iter().map(|x| x.map(|v| v + 1)).collect::<Vec<_>>();
    let ea = unary_encode(&shift(a), w)?;
    let eb = unary_encode(&shift(b), w)?;
    let width = 2 * w;
    let cap = n_out as u64 * width - 1;
    let prod = sumset(&ea, &eb, cap)?;
    // block k holds offsets (x+1-1) + (y+1-1) = x + y ∈ [0, 2w-2]
    Ok((0..n_out as u64)
        .map(|k| {
            let lo = k * width;
            let hi = lo + width - 2;
            let hit = match mode {
                Mode::Min => prod.next_at_or_after(lo).filter(|&p| p <= hi),
                Mode::Max => prod.max_in(lo, hi),
            };
            hit.map(|p| p - lo + 2 - 2)
        })
        .collect())
}

// two sentinels sum to at most 2^30
const INF: i32 = 1 << 29;
const NEG: i32 = -(1 << 29);

trait Select {
    const ABSENT: i32;
    fn pick(a: i32, b: i32) -> i32;
}

struct MinSel;
struct MaxSel;

impl Select for MinSel {
    const ABSENT: i32 = INF;
    #[inline(always)]
    fn pick(a: i32, b: i32) -> i32 {
        a.min(b)
    }
}

impl Select for MaxSel {
    const ABSENT: i32 = NEG;
    #[inline(always)]
    fn pick(a: i32, b: i32) -> i32 {
        a.max(b)
    }
}

#[inline(always)]
fn fold_pairs<S: Select>(a: &[i32], b: &[i32]) -> i32 {
    const L: usize = 16;
    let mut acc = [S::ABSENT; L];
    let mut ca = a.chunks_exact(L);
    let mut cb = b.chunks_exact(L);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for j in 0..L {
            acc[j] = S::pick(acc[j], x[j].wrapping_add(y[j]));
        }
    }
    let mut r = S::ABSENT;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        r = S::pick(r, x.wrapping_add(*y));
    }
    acc.iter().fold(r, |m, &v| S::pick(m, v))
}

#[inline(always)]
fn dense_body<S: Select>(a: &[i32], brev: &[i32], out: &mut [i32]) {
    let (na, nb) = (a.len(), brev.len());
    for (k, o) in out.iter_mut().enumerate() {
        let lo = k.saturating_sub(nb - 1);
        let hi = k.min(na - 1);
        let off = nb - 1 + lo - k;
        *o = fold_pairs::<S>(&a[lo..=hi], &brev[off..off + hi - lo + 1]);
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn dense_avx2<S: Select>(a: &[i32], brev: &[i32], out: &mut [i32]) {
    dense_body::<S>(a, brev, out)
}

fn dense_kernel<S: Select>(a: &[i32], b: &[i32]) -> Vec<i32> {
    let brev: Vec<i32> = b.iter().rev().copied().collect();
    let mut out = vec![S::ABSENT; a.len() + b.len() - 1];
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the CPU supports AVX2, checked just above.
            unsafe { dense_avx2::<S>(a, &brev, &mut out) };
            return out;
        }
    }
    dense_body::<S>(a, &brev, &mut out);
    out
}

fn sparse_kernel<S: Select>(a: &[(usize, i32)], b: &[(usize, i32)], n_out: usize) -> Vec<i32> {
    let mut out = vec![S::ABSENT; n_out];
    for &(i, x) in a {
        for &(j, y) in b {
            let o = &mut out[i + j];
            *o = S::pick(*o, x.wrapping_add(y));
        }
    }
    out
}

fn survivors(a: &[Entry]) -> Vec<(usize, i32)> {
    a.iter()
        .enumerate()
        .filter_map(|(i, x)| x.map(|v| (i, v as i32)))
        .collect()
}

fn direct_small<S: Select>(a: &[Entry], b: &[Entry]) -> Vec<Entry> {
    let n_out = a.len() + b.len() - 1;
    let (sa, sb) = (survivors(a), survivors(b));
    let dense_cost = (a.len() * b.len()) as f64 * 0.1;
    let sparse_cost = (sa.len() * sb.len()) as f64;
    let raw = if sparse_cost <= dense_cost {
        sparse_kernel::<S>(&sa, &sb, n_out)
    } else {
        let enc = |s: &[Entry]| s.iter().map(|x| x.map_or(S::ABSENT, |v| v as i32)).collect::<Vec<_>>();
        dense_kernel::<S>(&enc(a), &enc(b))
    };
    raw.into_iter()
        .map(|v| (v.abs() < INF / 2 && v >= 0).then_some(v as u64))
        .collect()
}

/// Pairwise exact convolution for entries below `2^27`.
pub fn minplus_direct(a: &[Entry], b: &[Entry], mode: Mode) -> Result<Vec<Entry>> {
    check_seq(a)?;
    check_seq(b)?;
    if max_finite(a, b).unwrap_or(0) >= 1 << 27 {
        return Err(ApxError::input("direct kernel needs entries below 2^27"));
    }
    Ok(match mode {
        Mode::Min => direct_small::<MinSel>(a, b),
        Mode::Max => direct_small::<MaxSel>(a, b),
    })
}

fn pick_engine(a: &[Entry], b: &[Entry], engine: ExactEngine) -> ExactEngine {
    if engine != ExactEngine::Auto {
        return engine;
    }
    let w = max_finite(a, b).unwrap_or(0) + 1;
    let n = unary_len(a.len(), b.len(), w).next_power_of_two() as f64;
    let unary = 4.5 * n * n.log2();
    let sa = a.iter().flatten().count() as f64;
    let sb = b.iter().flatten().count() as f64;
    let direct = ((a.len() * b.len()) as f64 * 0.1).min(sa * sb);
    if unary < direct && (n as u64) <= ntt::MAX_LEN as u64 / 2 {
        ExactEngine::Unary
    } else {
        ExactEngine::Direct
    }
}

fn exact_with(a: &[Entry], b: &[Entry], mode: Mode, engine: ExactEngine) -> Result<Vec<Entry>> {
    match pick_engine(a, b, engine) {
        ExactEngine::Unary => minplus_exact(a, b, mode),
        _ => minplus_direct(a, b, mode),
    }
}

/// Scaled pass bookkeeping, exposed for diagnostics.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ApproxStats {
    pub iterations: u32,
    pub clamp: u64,
    pub unary_passes: u32,
    pub direct_passes: u32,
}

/// `(1+ε)`-approximate min-plus convolution (or `(1-ε)` max-plus).
///
/// Each pass with `q = 2^l` rescales entries to `⌈2x/(qε)⌉` (floor in max
/// mode), drops those above `⌈4/ε⌉`, convolves exactly and unscales.  The
/// best value seen over all passes is kept for every output index.
pub fn minplus_approx(a: &[Entry], b: &[Entry], eps: Ratio, mode: Mode) -> Result<Vec<Entry>> {
    Ok(minplus_approx_with(a, b, eps, mode, ExactEngine::Auto)?.0)
}

pub fn minplus_approx_with(
    a: &[Entry],
    b: &[Entry],
    eps: Ratio,
    mode: Mode,
    engine: ExactEngine,
) -> Result<(Vec<Entry>, ApproxStats)> {
    check_eps(eps)?;
    check_seq(a)?;
    check_seq(b)?;
    let n_out = a.len() + b.len() - 1;
    let mut stats = ApproxStats {
        clamp: eps_clamp(eps, 4),
        ..Default::default()
    };
    let Some(w) = max_finite(a, b) else {
        return Ok((vec![None; n_out], stats));
    };
    let mut best: Vec<Entry> = vec![None; n_out];
    let top = ceil_log2(2 * w.max(1));
    for l in (0..=top).rev() {
        let q = 1u64 << l;
        let scale = |s: &[Entry]| -> Result<Vec<Entry>> {
            s.iter()
                .map(|x| match x {
                    None => Ok(None),
                    Some(v) => {
                        let r = match mode {
                            Mode::Min => round_up_scaled(*v, 2, q, eps)?,
                            Mode::Max => round_down_scaled(*v, 2, q, eps)?,
                        };
                        Ok((r <= stats.clamp).then_some(r))
                    }
                })
                .collect()
        };
        let (sa, sb) = (scale(a)?, scale(b)?);
        if sa.iter().all(Option::is_none) || sb.iter().all(Option::is_none) {
            continue;
        }
        let chosen = pick_engine(&sa, &sb, engine);
        match chosen {
            ExactEngine::Unary => stats.unary_passes += 1,
            _ => stats.direct_passes += 1,
        }
        let c = exact_with(&sa, &sb, mode, chosen)?;
        stats.iterations += 1;
        for (k, v) in c.into_iter().enumerate() {
            let Some(v) = v else { continue };
            // unscale v·qε/2: floor in min mode, ceil in max mode
            let num = v as u128 * q as u128 * eps.num() as u128;
            let den = 2 * eps.den() as u128;
            let val = match mode {
                Mode::Min => (num / den) as u64,
                Mode::Max => num.div_ceil(den) as u64,
            };
            let slot = &mut best[k];
            *slot = Some(match (*slot, mode) {
                (None, _) => val,
                (Some(o), Mode::Min) => o.min(val),
                (Some(o), Mode::Max) => o.max(val),
            });
        }
    }
    Ok((best, stats))
}

/// `⌈c/ε⌉`
pub fn eps_clamp(eps: Ratio, c: u64) -> u64 {
    Ratio::new(eps.den(), eps.num())
        .expect("eps positive")
        .mul_int(c)
        .expect("clamp fits")
        .ceil()
}

/// Approximate convolution of fully finite sequences whose every output is
/// an attained pair sum `a[i] + b[k-i]`; `split[k] = i`.
pub fn approx_conv_witnessed(
    a: &[u64],
    b: &[u64],
    eps: Ratio,
    mode: Mode,
) -> Result<(Vec<u64>, Vec<u32>)> {
    check_eps(eps)?;
    if a.is_empty() || b.is_empty() {
        return Err(ApxError::input("sequences must be non-empty"));
    }
    let n_out = a.len() + b.len() - 1;
    let clamp = eps_clamp(eps, 4);
    let w = a.iter().chain(b).copied().max().unwrap_or(0);
    let mut val = vec![0u64; n_out];
    let mut split = vec![u32::MAX; n_out];
    let top = ceil_log2(2 * w.max(1));
    let mut sa = vec![0u64; a.len()];
    let mut sb = vec![0u64; b.len()];
    for l in (0..=top).rev() {
        let q = 1u64 << l;
        let sc = |x: u64| match mode {
            Mode::Min => round_up_scaled(x, 2, q, eps),
            Mode::Max => round_down_scaled(x, 2, q, eps),
        };
        for (d, &x) in sa.iter_mut().zip(a) {
            *d = sc(x)?;
        }
        for (d, &x) in sb.iter_mut().zip(b) {
            *d = sc(x)?;
        }
        for k in 0..n_out {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            let mut arg = usize::MAX;
            let mut bestv = 0u64;
            for i in lo..=hi {
                let (x, y) = (sa[i], sb[k - i]);
                if x > clamp || y > clamp {
                    continue;
                }
                let v = x + y;
                let better = arg == usize::MAX
                    || match mode {
                        Mode::Min => v < bestv,
                        Mode::Max => v > bestv,
                    };
                if better {
                    arg = i;
                    bestv = v;
                }
            }
            if arg == usize::MAX {
                continue;
            }
            let truth = a[arg] + b[k - arg];
            let better = split[k] == u32::MAX
                || match mode {
                    Mode::Min => truth < val[k],
                    Mode::Max => truth > val[k],
                };
            if better {
                val[k] = truth;
                split[k] = arg as u32;
            }
        }
    }
    Ok((val, split))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(a: &[Entry], b: &[Entry], mode: Mode) -> Vec<Entry> {
        let mut out = vec![None; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if let (Some(x), Some(y)) = (x, y) {
                    let s = x + y;
                    let o: &mut Entry = &mut out[i + j];
                    *o = Some(match (*o, mode) {
                        (None, _) => s,
                        (Some(v), Mode::Min) => v.min(s),
                        (Some(v), Mode::Max) => v.max(s),
                    });
                }
            }
        }
        out
    }

    fn fin(v: &[u64]) -> Vec<Entry> {
        v.iter().map(|&x| Some(x)).collect()
    }

    fn within(got: &[Entry], want: &[Entry], eps: Ratio, mode: Mode) -> bool {
        got.iter().zip(want).all(|(g, w)| match (g, w) {
            (None, None) => true,
            (Some(g), Some(w)) => {
                let (g, w) = (*g as u128, *w as u128);
                let (n, d) = (eps.num() as u128, eps.den() as u128);
                match mode {
                    Mode::Min => g >= w && g * d <= w * (d + n),
                    Mode::Max => g <= w && g * d >= w * (d - n),
                }
            }
            _ => false,
        })
    }

    #[test]
    fn unary_encoding_example() {
        let bits = unary_encode(&fin(&[2, 3, 1]), 3).unwrap();
        let s: String = (0..18).map(|i| if bits.get(i) { '1' } else { '0' }).collect();
        assert_eq!(s, "010000001000100000");
    }

    #[test]
    fn exact_examples() {
        assert_eq!(minplus_exact(&fin(&[1, 3]), &fin(&[2, 5]), Mode::Min).unwrap(), fin(&[3, 5, 8]));
        assert_eq!(minplus_exact(&fin(&[0, 2]), &fin(&[0, 1]), Mode::Min).unwrap(), fin(&[0, 1, 3]));
        assert_eq!(
            minplus_exact(&[Some(1), None], &fin(&[2, 5]), Mode::Min).unwrap(),
            vec![Some(3), Some(6), None]
        );
        assert_eq!(minplus_exact(&[None], &[None], Mode::Min).unwrap(), vec![None]);
        assert_eq!(minplus_exact(&fin(&[1, 3]), &fin(&[2, 5]), Mode::Max).unwrap(), fin(&[3, 6, 8]));
    }

    #[test]
    fn approx_example() {
        let eps = Ratio::new(1, 10).unwrap();
        let got = minplus_approx(&fin(&[1, 3]), &fin(&[2, 5]), eps, Mode::Min).unwrap();
        assert!(within(&got, &fin(&[3, 5, 8]), eps, Mode::Min), "{got:?}");
    }

    #[test]
    fn later_pass_cannot_worsen_an_entry() {
        // a finer pass clamps the optimal pair and would overwrite index 1
        // with 16 > (1+ε)·10 if passes replaced earlier results
        let eps = Ratio::new(1, 2).unwrap();
        let a = fin(&[9, 8]);
        let b = fin(&[8, 1]);
        let got = minplus_approx(&a, &b, eps, Mode::Min).unwrap();
        assert!(within(&got, &brute(&a, &b, Mode::Min), eps, Mode::Min), "{got:?}");
    }

    #[test]
    fn engines_agree_on_scaled_pass() {
        let a = fin(&[4, 0, 7, 7, 1]);
        let b = vec![Some(3), None, Some(0)];
        for mode in [Mode::Min, Mode::Max] {
            assert_eq!(minplus_exact(&a, &b, mode).unwrap(), brute(&a, &b, mode));
            assert_eq!(minplus_direct(&a, &b, mode).unwrap(), brute(&a, &b, mode));
        }
    }

    fn entry() -> impl Strategy<Value = Entry> {
        prop_oneof![9 => (0u64..200).prop_map(Some), 1 => Just(None)]
    }

    proptest! {
        #[test]
        fn exact_engines_match_brute(a in proptest::collection::vec(entry(), 1..40),
                                     b in proptest::collection::vec(entry(), 1..40),
                                     max in any::<bool>()) {
            let mode = if max { Mode::Max } else { Mode::Min };
            let want = brute(&a, &b, mode);
            prop_assert_eq!(minplus_exact(&a, &b, mode).unwrap(), want.clone());
            prop_assert_eq!(minplus_direct(&a, &b, mode).unwrap(), want);
        }

        #[test]
        fn approx_within_bounds(a in proptest::collection::vec(entry(), 1..30),
                                b in proptest::collection::vec(entry(), 1..30),
                                e in 1u64..99, max in any::<bool>(),
                                unary in any::<bool>()) {
            let mode = if max { Mode::Max } else { Mode::Min };
            let eps = Ratio::new(e, 100).unwrap();
            let engine = if unary { ExactEngine::Unary } else { ExactEngine::Direct };
            let (got, _) = minplus_approx_with(&a, &b, eps, mode, engine).unwrap();
            prop_assert!(within(&got, &brute(&a, &b, mode), eps, mode));
        }

        #[test]
        fn witnessed_outputs_are_pair_sums(a in proptest::collection::vec(0u64..10_000, 1..30),
                                           b in proptest::collection::vec(0u64..10_000, 1..30),
                                           e in 1u64..99, max in any::<bool>()) {
            let mode = if max { Mode::Max } else { Mode::Min };
            let eps = Ratio::new(e, 100).unwrap();
            let (val, split) = approx_conv_witnessed(&a, &b, eps, mode).unwrap();
            let want = brute(&fin(&a), &fin(&b), mode);
            let got: Vec<Entry> = val.iter().map(|&v| Some(v)).collect();
            prop_assert!(within(&got, &want, eps, mode));
            for (k, (&v, &i)) in val.iter().zip(&split).enumerate() {
                prop_assert_eq!(a[i as usize] + b[k - i as usize], v);
            }
        }
    }
}
