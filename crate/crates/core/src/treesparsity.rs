//! Head and tail tree sparsity over node-weighted binary trees.
//!
//! Every spine `s_1..s_m` of the heavy-light decomposition is solved by
//! halving.  With `u^i` the vector of the light child of `s_i` (or `(0)`),
//! `u^{a,c} = u^a ⊕ ... ⊕ u^c` and `len = c - a + 1`, the head recursion is
//!
//! ```text
//! y^{a,a}[0] = 0,  y^{a,a}[k] = x(s_a) + u^a[k-1]
//! y^{a,b}[k] = max( y^{a,c}[k],  Σ_{i=a..c} x(s_i) + (u^{a,c} ⊕ y^{c+1,b})[k - len] )
//! ```
//!
//! The tail works on discarded weight.  With `ū` the light tail vectors,
//! `U(v)` the total weight below `v` and `W^{a,b}` the weight of a segment
//! with its light subtrees, the dual is
//!
//! ```text
//! ȳ^{a,a}[0] = x(s_a) + U(light),  ȳ^{a,a}[k] = ū^a[k-1]
//! ȳ^{a,b}[k] = min( ȳ^{a,c}[k] + W^{c+1,b},  (ū^{a,c} ⊕_min ȳ^{c+1,b})[k - len] )
//! ```
//!
//! Convolutions are approximate with a recorded split per entry, so every
//! entry is the exact weight of a subtree that can be walked back.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{ApxError, Result};
use crate::minconv::{approx_conv_witnessed, Mode};
use crate::numeric::{ceil_log2, check_eps, VALUE_CAP};
use crate::ratio::Ratio;

/// Rooted binary tree with nonnegative node weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTree {
    parent: Vec<Option<usize>>,
    weight: Vec<u64>,
    children: Vec<Vec<usize>>,
    root: usize,
    order: Vec<usize>,
}

impl WeightedTree {
    /// `parent[v] = -1` marks the root.
    pub fn new(parent: &[i64], weight: Vec<u64>) -> Result<Self> {
        let n = parent.len();
        if n == 0 || weight.len() != n {
            return Err(ApxError::input("tree needs n >= 1 nodes and n weights"));
        }
        if weight.iter().any(|&w| w > VALUE_CAP) {
            return Err(ApxError::input("node weight exceeds 2^50"));
        }
        if weight.iter().try_fold(0u64, |a, &w| a.checked_add(w)).is_none_or(|s| s > 1 << 62) {
            return Err(ApxError::input("total tree weight exceeds 2^62"));
        }
        let mut root = None;
        let mut par = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (v, &p) in parent.iter().enumerate() {
            if p == -1 {
                if root.replace(v).is_some() {
                    return Err(ApxError::input("tree has more than one root"));
                }
            } else if p < 0 || p as usize >= n || p as usize == v {
                return Err(ApxError::input(format!("node {v} has invalid parent {p}")));
            } else {
                let p = p as usize;
                par[v] = Some(p);
                children[p].push(v);
                if children[p].len() > 2 {
                    return Err(ApxError::input(format!("node {p} has more than two children")));
                }
            }
        }
        let root = root.ok_or_else(|| ApxError::input("tree has no root"))?;
        let mut order = Vec::with_capacity(n);
        order.push(root);
        let mut i = 0;
        while i < order.len() {
            order.extend_from_slice(&children[order[i]]);
            i += 1;
        }
        if order.len() != n {
            return Err(ApxError::input("parent array contains a cycle"));
        }
        Ok(Self { parent: par, weight, children, root, order })
    }

    pub fn n(&self) -> usize {
        self.weight.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weight[v]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weight
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Parent array with `-1` at the root.
    pub fn parent_array(&self) -> Vec<i64> {
        self.parent.iter().map(|p| p.map_or(-1, |p| p as i64)).collect()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Breadth-first order from the root.
    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    pub fn total(&self) -> u64 {
        self.weight.iter().sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.n()];
        for &v in self.order.iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    fn subtree_weights(&self) -> Vec<u64> {
        let mut w = self.weight.clone();
        for &v in self.order.iter().rev() {
            if let Some(p) = self.parent[v] {
                w[p] += w[v];
            }
        }
        w
    }

    /// Whether `nodes` is a connected node set containing the root.
    pub fn is_rooted_subtree(&self, nodes: &[usize]) -> bool {
        let mut inside = vec![false; self.n()];
        for &v in nodes {
            if v >= self.n() || inside[v] {
                return false;
            }
            inside[v] = true;
        }
        nodes.is_empty()
            || (inside[self.root]
                && nodes.iter().all(|&v| self.parent[v].is_none_or(|p| inside[p])))
    }
}

/// A heavy path listed from its head downwards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Spine {
    pub nodes: Vec<usize>,
}

fn heavy_children(tree: &WeightedTree, size: &[usize]) -> Vec<Option<usize>> {
    (0..tree.n())
        .map(|v| {
            // ties go to the first child
            tree.children(v).iter().copied().fold(None, |best: Option<usize>, c| match best {
                Some(b) if size[b] >= size[c] => Some(b),
                _ => Some(c),
            })
        })
        .collect()
}

/// Spines in breadth-first order of their heads; the root spine is first.
pub fn heavy_light_spines(tree: &WeightedTree) -> Vec<Spine> {
    let size = tree.sizes();
    let heavy = heavy_children(tree, &size);
    let mut spines = Vec::new();
    for &v in tree.bfs_order() {
        if tree.parent(v).is_some_and(|p| heavy[p] == Some(v)) {
            continue;
        }
        let mut nodes = vec![v];
        while let Some(h) = heavy[*nodes.last().expect("nonempty")] {
            nodes.push(h);
        }
        spines.push(Spine { nodes });
    }
    spines
}

/// Largest number of light edges on a node-to-root path.
pub fn max_spine_crossings(tree: &WeightedTree) -> usize {
    let size = tree.sizes();
    let heavy = heavy_children(tree, &size);
    let mut cross = vec![0usize; tree.n()];
    for &v in tree.bfs_order() {
        if let Some(p) = tree.parent(v) {
            cross[v] = cross[p] + usize::from(heavy[p] != Some(v));
        }
    }
    cross.into_iter().max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SparsityMode {
    Head,
    Tail,
}

impl SparsityMode {
    fn conv_mode(self) -> Mode {
        match self {
            SparsityMode::Head => Mode::Max,
            SparsityMode::Tail => Mode::Min,
        }
    }
}

const LEFT: u32 = u32::MAX;

#[derive(Clone, Debug)]
enum Kind {
    Unit,
    Conv { left: usize, right: usize, split: Vec<u32> },
    SpineLeaf { node: usize, light: usize },
    SpineJoin { left: usize, u: usize, right: usize, nodes: Vec<usize>, choice: Vec<u32> },
}

#[derive(Clone, Debug)]
struct VecNode {
    val: Vec<u64>,
    depth: u32,
    kind: Kind,
}

/// Root vector plus everything needed to walk an entry back to a subtree.
#[derive(Clone, Debug)]
pub struct SparsityRecord {
    pub mode: SparsityMode,
    pub eps: Ratio,
    pub delta: Ratio,
    /// Largest number of approximate convolutions on any derivation chain.
    pub depth: u32,
    arena: Vec<VecNode>,
    root: usize,
    n: usize,
}

impl SparsityRecord {
    pub fn vector(&self) -> &[u64] {
        &self.arena[self.root].val
    }

    /// Proven multiplicative bound: `(1-δ)^depth` for head, `(1+δ)^depth`
    /// for tail.
    pub fn realized_factor(&self) -> f64 {
        let d = self.delta.to_f64();
        match self.mode {
            SparsityMode::Head => (1.0 - d).powi(self.depth as i32),
            SparsityMode::Tail => (1.0 + d).powi(self.depth as i32),
        }
    }

    /// Nodes of a rooted subtree of size `k` realising entry `k`.
    pub fn retrieve(&self, k: usize) -> Result<Vec<usize>> {
        if k > self.n {
            return Err(ApxError::Query(format!("k = {k} outside [0, {}]", self.n)));
        }
        let mut out = Vec::with_capacity(k);
        let mut stack = vec![(self.root, k)];
        while let Some((id, k)) = stack.pop() {
            match &self.arena[id].kind {
                Kind::Unit => debug_assert_eq!(k, 0),
                Kind::Conv { left, right, split } => {
                    let i = split[k] as usize;
                    stack.push((*left, i));
                    stack.push((*right, k - i));
                }
                Kind::SpineLeaf { node, light } => {
                    if k > 0 {
                        out.push(*node);
                        stack.push((*light, k - 1));
                    }
                }
                Kind::SpineJoin { left, u, right, nodes, choice } => {
                    if choice[k] == LEFT {
                        stack.push((*left, k));
                    } else {
                        let i = choice[k] as usize;
                        out.extend_from_slice(nodes);
                        stack.push((*u, i));
                        stack.push((*right, k - nodes.len() - i));
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

struct Builder<'a> {
    tree: &'a WeightedTree,
    mode: SparsityMode,
    delta: Ratio,
    arena: Vec<VecNode>,
    unit: usize,
    below: Vec<u64>,
}

struct SpineCtx {
    nodes: Vec<usize>,
    light: Vec<usize>,
    /// prefix sums of `x(s_i)` and of segment weights
    xs: Vec<u64>,
    ws: Vec<u64>,
}

impl Builder<'_> {
    fn push(&mut self, val: Vec<u64>, depth: u32, kind: Kind) -> usize {
        self.arena.push(VecNode { val, depth, kind });
        self.arena.len() - 1
    }

    fn conv(&mut self, a: usize, b: usize) -> Result<(Vec<u64>, Vec<u32>)> {
        let (va, vb) = (&self.arena[a].val, &self.arena[b].val);
        let (val, split) = approx_conv_witnessed(va, vb, self.delta, self.mode.conv_mode())?;
        if split.contains(&u32::MAX) {
            return Err(ApxError::contract("approximate convolution left an entry unset"));
        }
        Ok((val, split))
    }

    fn product(&mut self, sp: &SpineCtx, a: usize, b: usize, memo: &mut HashMap<(usize, usize), usize>) -> Result<usize> {
        if a == b {
            return Ok(sp.light[a]);
        }
        if let Some(&id) = memo.get(&(a, b)) {
            return Ok(id);
        }
        let c = (a + b) / 2;
        let l = self.product(sp, a, c, memo)?;
        let r = self.product(sp, c + 1, b, memo)?;
        let (val, split) = self.conv(l, r)?;
        let depth = 1 + self.arena[l].depth.max(self.arena[r].depth);
        let id = self.push(val, depth, Kind::Conv { left: l, right: r, split });
        memo.insert((a, b), id);
        Ok(id)
    }

    fn segment(&mut self, sp: &SpineCtx, a: usize, b: usize, memo: &mut HashMap<(usize, usize), usize>) -> Result<usize> {
        if a == b {
            let s = sp.nodes[a];
            let light = sp.light[a];
            let lv = &self.arena[light].val;
            let val: Vec<u64> = match self.mode {
                SparsityMode::Head => std::iter::once(0)
                    .chain(lv.iter().map(|&v| self.tree.weight(s) + v))
                    .collect(),
                SparsityMode::Tail => std::iter::once(self.below[s] - self.below_heavy(sp, a))
                    .chain(lv.iter().copied())
                    .collect(),
            };
            let depth = self.arena[light].depth;
            return Ok(self.push(val, depth, Kind::SpineLeaf { node: s, light }));
        }
        let c = (a + b) / 2;
        let len = c - a + 1;
        let yl = self.segment(sp, a, c, memo)?;
        let yr = self.segment(sp, c + 1, b, memo)?;
        let u = self.product(sp, a, c, memo)?;
        let (cv, split) = self.conv(u, yr)?;
        let out_len = len + cv.len();
        let left = &self.arena[yl].val;
        let mut val = vec![0u64; out_len];
        let mut choice = vec![LEFT; out_len];
        let spine_x = sp.xs[c + 1] - sp.xs[a];
        let rest_w = sp.ws[b + 1] - sp.ws[c + 1];
        for k in 0..out_len {
            let lhs = left.get(k).map(|&v| match self.mode {
                SparsityMode::Head => v,
                SparsityMode::Tail => v + rest_w,
            });
            let rhs = (k >= len).then(|| match self.mode {
                SparsityMode::Head => spine_x + cv[k - len],
                SparsityMode::Tail => cv[k - len],
            });
            let take_right = match (lhs, rhs) {
                (_, None) => false,
                (None, Some(_)) => true,
                (Some(l), Some(r)) => match self.mode {
                    SparsityMode::Head => r > l,
                    SparsityMode::Tail => r < l,
                },
            };
            if take_right {
                val[k] = rhs.expect("checked");
                choice[k] = split[k - len];
            } else {
                val[k] = lhs.ok_or_else(|| ApxError::contract("segment entry unreachable"))?;
            }
        }
        let depth = self.arena[yl]
            .depth
            .max(1 + self.arena[u].depth.max(self.arena[yr].depth));
        let nodes = sp.nodes[a..=c].to_vec();
        Ok(self.push(val, depth, Kind::SpineJoin { left: yl, u, right: yr, nodes, choice }))
    }

    /// Weight below `s_a` that hangs off its heavy child.
    fn below_heavy(&self, sp: &SpineCtx, a: usize) -> u64 {
        sp.nodes.get(a + 1).map_or(0, |&h| self.below[h])
    }
}

/// Approximate head or tail sparsity vector of the whole tree.
///
/// Every convolution uses `δ = ε / (2B)` with `B = ⌈log₂ n⌉²`; if the
/// realised nesting depth exceeds `B` the vectors are recomputed with
/// `B = depth`, so the returned bound always holds.
pub fn sparsity_vectors(tree: &WeightedTree, eps: Ratio, mode: SparsityMode) -> Result<SparsityRecord> {
    check_eps(eps)?;
    let lg = ceil_log2(tree.n() as u64).max(1) as u64;
    let mut budget = lg * lg;
    loop {
        let delta = eps.div_int(2 * budget).ok_or_else(|| ApxError::input("eps too small"))?;
        let rec = build(tree, eps, delta, mode)?;
        if rec.depth as u64 <= budget {
            return Ok(rec);
        }
        budget = rec.depth as u64;
    }
}

fn build(tree: &WeightedTree, eps: Ratio, delta: Ratio, mode: SparsityMode) -> Result<SparsityRecord> {
    let mut b = Builder {
        tree,
        mode,
        delta,
        arena: Vec::new(),
        unit: 0,
        below: tree.subtree_weights(),
    };
    b.unit = b.push(vec![0], 0, Kind::Unit);
    let spines = heavy_light_spines(tree);
    let mut head_vec = vec![usize::MAX; tree.n()];
    for spine in spines.iter().rev() {
        let nodes = spine.nodes.clone();
        let on_spine = |v: usize, i: usize| nodes.get(i + 1) == Some(&v);
        let light: Vec<usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                tree.children(s)
                    .iter()
                    .find(|&&c| !on_spine(c, i))
                    .map_or(b.unit, |&c| head_vec[c])
            })
            .collect();
        let mut xs = vec![0u64];
        let mut ws = vec![0u64];
        for (i, &s) in nodes.iter().enumerate() {
            xs.push(xs[i] + tree.weight(s));
            let seg = b.below[s] - nodes.get(i + 1).map_or(0, |&h| b.below[h]);
            ws.push(ws[i] + seg);
        }
        let ctx = SpineCtx { nodes, light, xs, ws };
        let mut memo = HashMap::new();
        let id = b.segment(&ctx, 0, ctx.nodes.len() - 1, &mut memo)?;
        head_vec[ctx.nodes[0]] = id;
    }
    let root = head_vec[tree.root()];
    let depth = b.arena[root].depth;
    Ok(SparsityRecord {
        mode,
        eps,
        delta,
        depth,
        arena: b.arena,
        root,
        n: tree.n(),
    })
}
