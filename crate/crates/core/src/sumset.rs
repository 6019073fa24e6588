//! Exact capped subset-sum sets with per-sum witnesses.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BoundedBitset;
use crate::conv::{bool_convolve_witness, NONE};
use crate::error::{ApxError, Result};
use crate::numeric::ceil_log2;
use crate::ratio::Ratio;

/// Largest number of witness slots any table may allocate.
pub const MAX_TABLE: u64 = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineTag {
    Dp,
    BoundedCard,
    Randomized,
}

/// Which exact engine computes unbounded sumsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumsetEngine {
    Deterministic,
    Randomized { seed: u64, delta: Ratio },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Leaf(u32),
    Join(u32, u32),
}

#[derive(Clone, Debug)]
enum Witness {
    /// Item that first reached each sum; its predecessor is `s - value`.
    Chain(Vec<u32>),
    /// Same per cardinality layer; `min_layer[s]` is the first layer holding `s`.
    Layered {
        width: usize,
        item: Vec<u32>,
        min_layer: Vec<u16>,
    },
    Tree { nodes: Vec<Node>, root: Vec<u32> },
}

/// `SubSums(Z; t)` as a bitset plus a way to recover one subset per sum.
#[derive(Clone, Debug)]
pub struct SumsetResult {
    pub t: u64,
    pub sums: BoundedBitset,
    pub engine: EngineTag,
    values: Vec<u64>,
    witness: Witness,
}

fn check_table(slots: u64) -> Result<()> {
    if slots > MAX_TABLE {
        return Err(ApxError::resource(format!(
            "witness table of {slots} slots exceeds 2^28"
        )));
    }
    Ok(())
}

impl SumsetResult {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn contains(&self, s: u64) -> bool {
        self.sums.get(s)
    }

    /// For every member `s`, `Σ weights[i]` over the items of
    /// `reconstruct(s)`; zero for non-members.
    pub fn witness_weights(&self, weights: &[u64]) -> Vec<u64> {
        let len = (self.t + 1) as usize;
        let mut out = vec![0u64; len];
        match &self.witness {
            Witness::Chain(item) => {
                for s in self.sums.iter().skip(1) {
                    let i = item[s as usize] as usize;
                    out[s as usize] = out[(s - self.values[i]) as usize] + weights[i];
                }
            }
            Witness::Layered {
                width,
                item,
                min_layer,
            } => {
                let k = item.len() / width;
                let mut layer = vec![0u64; item.len()];
                for c in 1..k {
                    for s in 0..*width {
                        let i = item[c * width + s];
                        if i != NONE {
                            let prev = (c - 1) * width + s - self.values[i as usize] as usize;
                            layer[c * width + s] = layer[prev] + weights[i as usize];
                        }
                    }
                }
                for s in self.sums.iter() {
                    out[s as usize] = layer[min_layer[s as usize] as usize * width + s as usize];
                }
            }
            Witness::Tree { nodes, root } => {
                let mut w = vec![0u64; nodes.len()];
                let get = |w: &[u64], id: u32| if id == NONE { 0 } else { w[id as usize] };
                for (id, node) in nodes.iter().enumerate() {
                    w[id] = match *node {
                        Node::Leaf(i) => weights[i as usize],
                        Node::Join(a, b) => get(&w, a) + get(&w, b),
                    };
                }
                for s in self.sums.iter() {
                    out[s as usize] = get(&w, root[s as usize]);
                }
            }
        }
        out
    }

    /// Indices (ascending) of a subset of the input summing to `s`.
    pub fn reconstruct(&self, s: u64) -> Option<Vec<usize>> {
        if !self.sums.get(s) {
            return None;
        }
        let mut out = Vec::new();
        match &self.witness {
            Witness::Chain(item) => {
                let mut s = s;
                while s > 0 {
                    let i = item[s as usize];
                    out.push(i as usize);
                    s -= self.values[i as usize];
                }
            }
            Witness::Layered {
                width,
                item,
                min_layer,
            } => {
                let mut s = s;
                let mut c = min_layer[s as usize] as usize;
                while c > 0 {
                    let i = item[c * width + s as usize];
                    out.push(i as usize);
                    s -= self.values[i as usize];
                    c -= 1;
                }
                debug_assert_eq!(s, 0);
            }
            Witness::Tree { nodes, root } => {
                let mut stack = vec![root[s as usize]];
                while let Some(id) = stack.pop() {
                    if id == NONE {
                        continue;
                    }
                    match nodes[id as usize] {
                        Node::Leaf(i) => out.push(i as usize),
                        Node::Join(a, b) => {
                            stack.push(a);
                            stack.push(b);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        Some(out)
    }
}

/// Word-parallel subset-sum table; ties go to the earliest item.
pub fn sumset_dp(values: &[u64], t: u64) -> Result<SumsetResult> {
    check_table(t + 1)?;
    let mut sums = BoundedBitset::new(t);
    sums.set(0);
    let mut item = vec![NONE; (t + 1) as usize];
    for (idx, &v) in values.iter().enumerate() {
        if v == 0 || v > t {
            continue;
        }
        sums.or_self_shifted(v, |wi, mut w| {
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                item[wi * 64 + b] = idx as u32;
            }
        });
    }
    Ok(SumsetResult {
        t,
        sums,
        engine: EngineTag::Dp,
        values: values.to_vec(),
        witness: Witness::Chain(item),
    })
}

/// Subset sums using at most `k` items.
pub fn sumset_bounded_card(values: &[u64], t: u64, k: usize) -> Result<SumsetResult> {
    let live = values.iter().filter(|&&v| v > 0 && v <= t).count();
    if k >= live {
        let mut r = sumset_dp(values, t)?;
        r.engine = EngineTag::BoundedCard;
        return Ok(r);
    }
    if k > u16::MAX as usize {
        return Err(ApxError::resource("cardinality bound above 65535"));
    }
    let width = (t + 1) as usize;
    check_table((k as u64 + 1) * (t + 1))?;
    let mut layers: Vec<BoundedBitset> = (0..=k).map(|_| BoundedBitset::new(t)).collect();
    layers[0].set(0);
    let mut item = vec![NONE; (k + 1) * width];
    let mut seen = 0usize;
    for (idx, &v) in values.iter().enumerate() {
        if v == 0 || v > t {
            continue;
        }
        seen += 1;
        for c in (1..=k.min(seen)).rev() {
            let (lo, hi) = layers.split_at_mut(c);
            let base = c * width;
            hi[0].or_shifted_from(lo[c - 1].words(), v, |wi, mut w| {
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    item[base + wi * 64 + b] = idx as u32;
                }
            });
        }
    }
    let mut sums = BoundedBitset::new(t);
    let mut min_layer = vec![0u16; width];
    for c in (0..=k).rev() {
        for s in layers[c].iter() {
            min_layer[s as usize] = c as u16;
        }
        sums.union_with(&layers[c]);
    }
    Ok(SumsetResult {
        t,
        sums,
        engine: EngineTag::BoundedCard,
        values: values.to_vec(),
        witness: Witness::Layered {
            width,
            item,
            min_layer,
        },
    })
}

struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    fn join(&mut self, a: u32, b: u32) -> u32 {
        match (a, b) {
            (NONE, x) | (x, NONE) => x,
            _ => {
                self.nodes.push(Node::Join(a, b));
                (self.nodes.len() - 1) as u32
            }
        }
    }

    fn leaf(&mut self, item: u32) -> u32 {
        self.nodes.push(Node::Leaf(item));
        (self.nodes.len() - 1) as u32
    }

    /// `acc ⊕_t other`, each side carrying a node per sum.
    fn combine(
        &mut self,
        acc: &(BoundedBitset, Vec<u32>),
        other: &(BoundedBitset, Vec<u32>),
        t: u64,
    ) -> Result<(BoundedBitset, Vec<u32>)> {
        let (sums, left) = bool_convolve_witness(&acc.0, &other.0, t)?;
        let mut root = vec![NONE; (t + 1) as usize];
        for s in sums.iter() {
            let a = left[s as usize] as u64;
            root[s as usize] = self.join(acc.1[a as usize], other.1[(s - a) as usize]);
        }
        Ok((sums, root))
    }
}

fn singleton_zero(t: u64) -> (BoundedBitset, Vec<u32>) {
    let mut b = BoundedBitset::new(t);
    b.set(0);
    (b, vec![NONE; (t + 1) as usize])
}

fn union_into(acc: &mut (BoundedBitset, Vec<u32>), other: &(BoundedBitset, Vec<u32>)) {
    for s in other.0.iter() {
        if !acc.0.get(s) {
            acc.0.set(s);
            acc.1[s as usize] = other.1[s as usize];
        }
    }
}

/// Color-coding sumset engine.  Never reports a sum that is not
/// attainable; each attainable sum is missed with probability `≤ delta`.
pub fn sumset_randomized(values: &[u64], t: u64, seed: u64, delta: Ratio) -> Result<SumsetResult> {
    if delta.is_zero() || delta >= Ratio::ONE {
        return Err(ApxError::input("delta must lie in (0,1)"));
    }
    check_table(t + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let live: Vec<u32> = (0..values.len() as u32)
        .filter(|&i| values[i as usize] > 0 && values[i as usize] <= t)
        .collect();
    let levels = ceil_log2(live.len() as u64).max(1);
    // layer j holds items in (t/2^j, t/2^(j-1)]; the last layer takes the rest
    let mut layers: Vec<Vec<u32>> = vec![Vec::new(); levels as usize];
    for &i in &live {
        let v = values[i as usize] as u128;
        let mut j = 1u32;
        while j < levels && v * (1u128 << j) <= t as u128 {
            j += 1;
        }
        layers[(j - 1) as usize].push(i);
    }
    let per_level = Ratio::new(delta.num(), delta.den().saturating_mul(levels as u64))?;
    let reps = ceil_log2(per_level.den().div_ceil(per_level.num().max(1))) + 1;
    let mut tb = TreeBuilder { nodes: Vec::new() };
    let mut acc = singleton_zero(t);
    for (j, layer) in layers.iter().enumerate() {
        if layer.is_empty() {
            continue;
        }
        let last = j + 1 == levels as usize;
        let k = if last {
            layer.len() as u64
        } else {
            (layer.len() as u64).min(1 << (j + 1))
        };
        let groups = k * k;
        let mut layer_sums = singleton_zero(t);
        for _ in 0..reps {
            let mut assigned: Vec<(u64, u32)> =
                layer.iter().map(|&i| (rng.random_range(0..groups), i)).collect();
            assigned.sort_unstable();
            let mut cur = singleton_zero(t);
            for chunk in assigned.chunk_by(|a, b| a.0 == b.0) {
                let mut g = singleton_zero(t);
                for &(_, i) in chunk {
                    let v = values[i as usize];
                    if !g.0.get(v) {
                        g.0.set(v);
                        g.1[v as usize] = tb.leaf(i);
                    }
                }
                cur = tb.combine(&cur, &g, t)?;
            }
            union_into(&mut layer_sums, &cur);
        }
        acc = tb.combine(&acc, &layer_sums, t)?;
    }
    Ok(SumsetResult {
        t,
        sums: acc.0,
        engine: EngineTag::Randomized,
        values: values.to_vec(),
        witness: Witness::Tree {
            nodes: tb.nodes,
            root: acc.1,
        },
    })
}

/// Dispatches on the chosen engine.
pub fn sumset_with(values: &[u64], t: u64, engine: SumsetEngine) -> Result<SumsetResult> {
    match engine {
        SumsetEngine::Deterministic => sumset_dp(values, t),
        SumsetEngine::Randomized { seed, delta } => sumset_randomized(values, t, seed, delta),
    }
}
