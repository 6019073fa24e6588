//! Independent exhaustive oracles used by tests, acceptance and `apx oracle`.

use crate::error::{ApxError, Result};
use crate::ksum::KSumInstance;
use crate::minconv::{Entry, Mode};
use crate::treesparsity::WeightedTree;

pub const MAX_SSUM_N: usize = 24;
pub const MAX_CONV_N: usize = 1024;
pub const MAX_TREE_N: usize = 500;
pub const MAX_KSUM_TUPLES: u64 = 10_000_000;

fn cap_error(what: &str, n: usize, cap: usize) -> ApxError {
    ApxError::resource(format!("{what} oracle is capped at n = {cap}, got {n}"))
}

/// Largest subset sum `≤ t` and one subset attaining it, by Gray-code
/// enumeration of all `2^n` subsets.
pub fn subset_sum_opt(values: &[u64], t: u64) -> Result<(u64, Vec<usize>)> {
    let n = values.len();
    if n > MAX_SSUM_N {
        return Err(cap_error("subset sum", n, MAX_SSUM_N));
    }
    let (mut best, mut best_mask) = (0u64, 0u64);
    let (mut sum, mut mask) = (0u64, 0u64);
    for i in 1u64..(1 << n) {
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if mask & (1 << bit) != 0 {
            sum += values[bit];
        } else {
            sum -= values[bit];
        }
        if sum <= t && sum > best {
            best = sum;
            best_mask = mask;
        }
    }
    Ok((best, (0..n).filter(|&i| best_mask >> i & 1 == 1).collect()))
}

/// Best Partition side: the largest subset sum `≤ ⌊Σ/2⌋`.
pub fn partition_opt(values: &[u64]) -> Result<(u64, Vec<usize>)> {
    subset_sum_opt(values, values.iter().sum::<u64>() / 2)
}

/// Quadratic (min,+) or (max,+) convolution.
pub fn minplus_brute(a: &[Entry], b: &[Entry], mode: Mode) -> Result<Vec<Entry>> {
    let n = a.len().max(b.len());
    if n > MAX_CONV_N {
        return Err(cap_error("convolution", n, MAX_CONV_N));
    }
    if a.is_empty() || b.is_empty() {
        return Err(ApxError::input("sequences must be non-empty"));
    }
    let mut out: Vec<Entry> = vec![None; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        let Some(x) = x else { continue };
        for (j, y) in b.iter().enumerate() {
            let Some(y) = y else { continue };
            let s = x + y;
            let o = &mut out[i + j];
            *o = Some(match (*o, mode) {
                (None, _) => s,
                (Some(v), Mode::Min) => v.min(s),
                (Some(v), Mode::Max) => v.max(s),
            });
        }
    }
    Ok(out)
}

/// Exact head sparsity vector of the whole tree by tree knapsack.
pub fn tree_head_dp(tree: &WeightedTree) -> Result<Vec<u64>> {
    let n = tree.n();
    if n > MAX_TREE_N {
        return Err(cap_error("tree", n, MAX_TREE_N));
    }
    let mut f: Vec<Vec<u64>> = vec![Vec::new(); n];
    for &v in tree.bfs_order().iter().rev() {
        let mut cur = vec![0, tree.weight(v)];
        for &c in tree.children(v) {
            let g = std::mem::take(&mut f[c]);
            let mut next = vec![0u64; cur.len() + g.len() - 1];
            for (i, &x) in cur.iter().enumerate() {
                for (j, &y) in g.iter().enumerate() {
                    // the child contributes only if v is kept
                    if i == 0 && j > 0 {
                        continue;
                    }
                    next[i + j] = next[i + j].max(x + y);
                }
            }
            cur = next;
        }
        f[v] = cur;
    }
    Ok(std::mem::take(&mut f[tree.root()]))
}

/// Exact tail vector: discarded weight `total - head[k]`.
pub fn tree_tail_dp(tree: &WeightedTree) -> Result<Vec<u64>> {
    let total = tree.total();
    Ok(tree_head_dp(tree)?.into_iter().map(|h| total - h).collect())
}

/// Whether some tuple `a_1 + ... + a_{k-1}` lands in the target set.
pub fn ksum_brute(inst: &KSumInstance) -> Result<Option<Vec<u64>>> {
    let count = inst
        .addends
        .iter()
        .try_fold(1u64, |acc, s| acc.checked_mul(s.len() as u64))
        .filter(|&c| c <= MAX_KSUM_TUPLES);
    if count.is_none() {
        return Err(ApxError::resource("kSUM oracle tuple count exceeds 10^7"));
    }
    let mut idx = vec![0usize; inst.addends.len()];
    loop {
        let s: u64 = idx.iter().zip(&inst.addends).map(|(&i, a)| a[i]).sum();
        if inst.targets.binary_search(&s).is_ok() {
            let mut tuple: Vec<u64> = idx.iter().zip(&inst.addends).map(|(&i, a)| a[i]).collect();
            tuple.push(s);
            return Ok(Some(tuple));
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(None);
            }
            idx[j] += 1;
            if idx[j] < inst.addends[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}
