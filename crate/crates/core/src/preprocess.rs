//! Instance transformations that keep every subset sum within a known
//! additive distance while shrinking or structuring the item set.
//!
//! Every transformed [`Item`] remembers which input items it stands for, so
//! a witness over transformed items lifts to a witness over the input with
//! an exact sum at least the transformed one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{ApxError, Result};
use crate::numeric::{ceil_log2, pow2_below};
use crate::ratio::Ratio;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub value: u64,
    /// Input indices this item was derived from.
    pub origins: Vec<u32>,
}

impl Item {
    pub fn original(index: usize, value: u64) -> Self {
        Item {
            value,
            origins: vec![index as u32],
        }
    }
}

pub fn values_of(items: &[Item]) -> Vec<u64> {
    items.iter().map(|i| i.value).collect()
}

/// Result of the halving argument that makes the optimum large.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LargeOpt {
    /// All items `≤ t` together fit: the answer is exactly these indices.
    Immediate(Vec<usize>),
    /// Items `≤ t` and a subset of them with sum in `[t/2, t]`.
    Certified {
        items: Vec<usize>,
        certificate: Vec<usize>,
    },
}

pub fn ensure_large_opt(values: &[u64], t: u64) -> LargeOpt {
    let items: Vec<usize> = (0..values.len()).filter(|&i| values[i] <= t).collect();
    let sum = |s: &[usize]| s.iter().map(|&i| values[i] as u128).sum::<u128>();
    if sum(&items) <= t as u128 {
        return LargeOpt::Immediate(items);
    }
    let mut cur = items.clone();
    while sum(&cur) > t as u128 {
        let (a, b) = cur.split_at(cur.len() / 2);
        cur = if sum(a) >= sum(b) { a.to_vec() } else { b.to_vec() };
    }
    LargeOpt::Certified {
        items,
        certificate: cur,
    }
}

/// Caps every multiplicity at two without changing `SubSums(·; t)`:
/// `2k+1` copies of `x` become one `x` plus `k` copies of `2x`, and
/// `2k+2` copies become two `x` plus `k` copies of `2x`.
pub fn dedup_items(items: Vec<Item>, t: u64) -> Vec<Item> {
    let mut pending: BTreeMap<u64, Vec<Item>> = BTreeMap::new();
    for it in items {
        if it.value <= t {
            pending.entry(it.value).or_default().push(it);
        }
    }
    let mut out = Vec::new();
    while let Some((x, mut group)) = pending.pop_first() {
        if group.len() < 3 {
            out.extend(group);
            continue;
        }
        let keep = if group.len() % 2 == 1 { 1 } else { 2 };
        let rest = group.split_off(keep);
        out.extend(group);
        if 2 * x > t {
            continue;
        }
        let doubled = pending.entry(2 * x).or_default();
        for pair in rest.chunks_exact(2) {
            let mut origins = pair[0].origins.clone();
            origins.extend_from_slice(&pair[1].origins);
            doubled.push(Item {
                value: 2 * x,
                origins,
            });
        }
    }
    out
}

pub fn dedup_multiplicities(values: &[u64], t: u64) -> Vec<u64> {
    let items = values
        .iter()
        .enumerate()
        .map(|(i, &v)| Item::original(i, v))
        .collect();
    let mut out = values_of(&dedup_items(items, t));
    out.sort_unstable();
    out
}

/// Items of an `(ε, t)`-close instance of size `O((1/ε) log(n/ε) log n)`.
#[derive(Clone, Debug)]
pub struct EpsCloseInstance {
    pub items: Vec<Item>,
    /// Input indices discarded for being below `εt/(2n)`.
    pub dropped: Vec<u32>,
    /// Closeness radius consumed, as a fraction of `t`.
    pub eps_spent: Ratio,
    pub scales: u32,
    /// Scales whose granularity `⌊εt/2^(i+1)⌋` vanished and were left unrounded.
    pub degenerate_scales: u32,
}

/// Rounds items in `[t/2^i, t/2^(i-1))` down to multiples of
/// `⌊εt/2^(i+1)⌋`, drops items below `εt/(2n)`, then caps multiplicities.
pub fn reduce_items(items: Vec<Item>, t: u64, eps: Ratio) -> Result<EpsCloseInstance> {
    if t == 0 {
        return Err(ApxError::input("target must be positive"));
    }
    let n = items.len().max(1) as u64;
    // 2^L ≥ 2n/ε
    let scales = ceil_log2(Ratio::from_int(2 * n).checked_mul(Ratio::new(eps.den(), eps.num())?)
        .ok_or_else(|| ApxError::input("eps too small"))?
        .ceil())
    .max(1);
    let et = |shift: u32| -> u64 {
        // ⌊εt / 2^shift⌋
        (t as u128 * eps.num() as u128 / ((eps.den() as u128) << shift)) as u64
    };
    let mut degenerate = 0;
    for i in 1..=scales {
        if et(i + 1) == 0 {
            degenerate += 1;
        }
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for mut it in items {
        // x < εt/(2n)
        if (2 * n as u128) * (it.value as u128) * (eps.den() as u128)
            < eps.num() as u128 * t as u128
        {
            dropped.extend_from_slice(&it.origins);
            continue;
        }
        if it.value < t {
            let mut i = 1;
            while (it.value as u128) << i < t as u128 {
                i += 1;
            }
            let g = et(i + 1);
            if g > 1 {
                it.value -= it.value % g;
            }
        }
        kept.push(it);
    }
    Ok(EpsCloseInstance {
        items: dedup_items(kept, t),
        dropped,
        eps_spent: eps,
        scales,
        degenerate_scales: degenerate,
    })
}

/// Plain-value form of [`reduce_items`].
pub fn reduce_item_count(values: &[u64], t: u64, eps: Ratio) -> Result<EpsCloseInstance> {
    reduce_items(
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| Item::original(i, v))
            .collect(),
        t,
        eps,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitRound {
    pub m: u64,
    pub q: u64,
}

/// Large items (`≥ γt`) and small items made `(q_small, 2)`-distinct.
#[derive(Clone, Debug)]
pub struct SplitInstance {
    pub large: Vec<Item>,
    pub small: Vec<Item>,
    pub gamma: Ratio,
    /// Rounding unit of the last round; every small item is a multiple of it.
    pub q_small: u64,
    /// `m·⌈log₂ n⌉` for the final small count `m`.
    pub m_prime: u64,
    pub rounds: Vec<SplitRound>,
    /// Closeness radius consumed, as a fraction of `t`.
    pub eps_spent: Ratio,
}

fn is_small(v: u64, t: u64, gamma: Ratio) -> bool {
    (v as u128) * (gamma.den() as u128) < gamma.num() as u128 * t as u128
}

pub fn split_small_large(
    items: Vec<Item>,
    t: u64,
    eps: Ratio,
    gamma: Ratio,
    n_total: usize,
) -> Result<SplitInstance> {
    let logn = ceil_log2(n_total.max(2) as u64) as u64;
    let (mut small, mut large): (Vec<Item>, Vec<Item>) =
        items.into_iter().partition(|it| is_small(it.value, t, gamma));
    let mut rounds = Vec::new();
    let mut q_small = 1;
    let mut loss: u128 = 0;
    while !small.is_empty() {
        let m = small.len() as u64;
        let budget = Ratio::from_int(t)
            .checked_mul(eps)
            .and_then(|r| r.div_int(m * logn))
            .ok_or_else(|| ApxError::input("split budget overflows"))?;
        let q = pow2_below(budget).max(q_small);
        if q > 1 {
            loss += (m as u128) * (q as u128 - 1);
        }
        let rounded: Vec<Item> = small
            .into_iter()
            .filter_map(|mut it| {
                it.value -= it.value % q;
                (it.value > 0).then_some(it)
            })
            .collect();
        let (s, l): (Vec<Item>, Vec<Item>) = dedup_items(rounded, t)
            .into_iter()
            .partition(|it| is_small(it.value, t, gamma));
        small = s;
        large.extend(l);
        q_small = q;
        rounds.push(SplitRound { m, q });
        if 2 * small.len() as u64 >= m {
            break;
        }
    }
    let spent = Ratio::new(loss.min(u64::MAX as u128) as u64, t)?;
    Ok(SplitInstance {
        m_prime: small.len() as u64 * logn,
        large,
        small,
        gamma,
        q_small,
        rounds,
        eps_spent: spent,
    })
}
