//! Seeded instance generators.

use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ApxError, Result};
use crate::format::{Instance, InstanceKind};
use crate::ksum::KSumInstance;
use crate::numeric::VALUE_CAP;
use crate::treesparsity::WeightedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Uniform,
    /// Guarantees an exact solution.
    Planted,
    /// Many small, repeated items.
    Dense,
    /// Few distinct sums relative to the range.
    Sparse,
}

impl FromStr for Shape {
    type Err = ApxError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => Self::Uniform,
            "planted" => Self::Planted,
            "dense" => Self::Dense,
            "sparse" => Self::Sparse,
            _ => return Err(ApxError::input(format!("unknown shape {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub kind: InstanceKind,
    pub n: usize,
    pub w: u64,
    pub seed: u64,
    pub shape: Shape,
    /// Only used by kSUM.
    pub k: usize,
}

pub fn generate(p: &GenParams) -> Result<Instance> {
    if p.n == 0 || p.w == 0 {
        return Err(ApxError::input("n and W must be positive"));
    }
    if p.w > VALUE_CAP {
        return Err(ApxError::input("W exceeds 2^50"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    Ok(match p.kind {
        InstanceKind::Ssum => ssum(&mut rng, p)?,
        InstanceKind::Partition => Instance::Partition { values: partition(&mut rng, p)? },
        InstanceKind::Seqpair => {
            let mut seq = || -> Vec<Option<u64>> {
                (0..p.n)
                    .map(|_| match p.shape {
                        Shape::Sparse if rng.random_bool(0.5) => None,
                        Shape::Dense => Some(rng.random_range(0..=p.w.min(16))),
                        _ => Some(rng.random_range(0..=p.w)),
                    })
                    .collect()
            };
            let a = seq();
            let b = seq();
            Instance::SeqPair { a, b }
        }
        InstanceKind::Tree => Instance::Tree(tree(&mut rng, p)?),
        InstanceKind::Ksum => Instance::KSum(ksum(&mut rng, p)?),
    })
}

fn ssum(rng: &mut ChaCha8Rng, p: &GenParams) -> Result<Instance> {
    let values: Vec<u64> = match p.shape {
        Shape::Dense => {
            let hi = (p.n as u64 / 2).clamp(2, p.w.max(2));
            (0..p.n).map(|_| rng.random_range(1..=hi)).collect()
        }
        Shape::Sparse => (0..p.n).map(|_| rng.random_range(p.w.div_ceil(2)..=p.w)).collect(),
        _ => (0..p.n).map(|_| rng.random_range(1..=p.w)).collect(),
    };
    let total: u64 = values.iter().sum();
    let t = match p.shape {
        Shape::Planted => {
            let s: u64 = values.iter().filter(|_| rng.random_bool(0.5)).sum();
            if s == 0 { values[0] } else { s }
        }
        Shape::Dense => (total / 3).max(1),
        _ => rng.random_range(total.div_ceil(4).max(1)..=(3 * total / 4).max(1)),
    };
    Ok(Instance::Ssum { values, t })
}

fn partition(rng: &mut ChaCha8Rng, p: &GenParams) -> Result<Vec<u64>> {
    if p.shape != Shape::Planted {
        let Instance::Ssum { values, .. } = ssum(rng, p)? else { unreachable!() };
        return Ok(values);
    }
    if p.n < 2 || p.w < 2 {
        return Err(ApxError::input("planted partition needs n >= 2 and W >= 2"));
    }
    // side A gets floor(n/2) items, side B splits the same total into the rest
    let na = p.n / 2;
    let nb = p.n - na;
    let side_a: Vec<u64> = (0..na).map(|_| rng.random_range(2..=p.w)).collect();
    let sum_a: u64 = side_a.iter().sum();
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() < nb - 1 {
        cuts.insert(rng.random_range(1..sum_a));
    }
    let mut prev = 0;
    let mut values = side_a;
    for c in cuts.into_iter().chain([sum_a]) {
        values.push(c - prev);
        prev = c;
    }
    // interleave so the planted sides are not contiguous
    for i in (1..values.len()).rev() {
        values.swap(i, rng.random_range(0..=i));
    }
    Ok(values)
}

fn tree(rng: &mut ChaCha8Rng, p: &GenParams) -> Result<WeightedTree> {
    let n = p.n;
    let mut parent = vec![-1i64; n];
    match p.shape {
        // complete binary tree
        Shape::Dense => (1..n).for_each(|v| parent[v] = ((v - 1) / 2) as i64),
        // caterpillar: a long path with single leaves hanging off it
        Shape::Sparse => {
            let mut spine = 0;
            for (v, p) in parent.iter_mut().enumerate().skip(1) {
                *p = spine as i64;
                if v % 2 == 1 {
                    spine = v;
                }
            }
        }
        _ => {
            let mut open = vec![0usize];
            let mut kids = vec![0u8; n];
            for (v, p) in parent.iter_mut().enumerate().skip(1) {
                let i = rng.random_range(0..open.len());
                let u = open[i];
                *p = u as i64;
                kids[u] += 1;
                if kids[u] == 2 {
                    open.swap_remove(i);
                }
                open.push(v);
            }
        }
    }
    let weight = (0..n).map(|_| rng.random_range(0..=p.w)).collect();
    WeightedTree::new(&parent, weight)
}

fn ksum(rng: &mut ChaCha8Rng, p: &GenParams) -> Result<KSumInstance> {
    if p.k < 2 {
        return Err(ApxError::input("kSUM needs k >= 2"));
    }
    let parts = (p.k - 1) as u64;
    let amax = (p.w / parts).max(1);
    let mut addends: Vec<Vec<u64>> = (1..p.k)
        .map(|_| (0..p.n).map(|_| rng.random_range(1..=amax)).collect())
        .collect();
    let mut targets: Vec<u64> = (0..p.n).map(|_| rng.random_range(1..=p.w.max(parts))).collect();
    match p.shape {
        Shape::Planted => {
            let s: u64 = addends.iter().map(|a| a[rng.random_range(0..a.len())]).sum();
            targets.push(s);
        }
        Shape::Sparse => {
            // targets far above every reachable sum
            let top = amax * parts;
            targets = (0..p.n).map(|_| top * 2 + rng.random_range(1..=amax)).collect();
        }
        Shape::Dense => addends.iter_mut().for_each(|a| a.iter_mut().for_each(|x| *x = 1 + *x % 16)),
        Shape::Uniform => {}
    }
    KSumInstance::new(addends, targets)
}
