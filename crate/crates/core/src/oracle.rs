//! Approximate membership oracles for capped subset sums.
//!
//! An oracle over items `Z` stores witnessed *entries*: genuine subsets of
//! `Z` with their exact sums.  Every `x ∈ SubSums(Z; t)` has an entry within
//! [`MembershipOracle::err`] of it, so with radius `r = slack·εt ≥ err` a
//! query `q` answers yes exactly when an entry lies within `2r` of `q`.
//!
//! Oracles built directly from a rounded sumset answer with the windowed
//! rule on rounded sums; merged and union oracles keep at most one entry per
//! cell `[ip, (i+1)p)` of width `p` (the *unit*).

use std::sync::Arc;

use crate::bitset::BoundedBitset;
use crate::conv::{bool_convolve_witness, NONE};
use crate::error::{ApxError, Result};
use crate::numeric::{pow2_below, round_down_scaled};
use crate::ratio::Ratio;
use crate::sumset::{sumset_bounded_card, sumset_dp, sumset_with, SumsetEngine, SumsetResult};

/// Growth of `slack` per merge: `slack(out) ≤ slack(a) + slack(b) + C_MERGE`.
pub const C_MERGE: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleParams {
    pub t: u64,
    pub eps: Ratio,
    pub unit: u64,
}

impl OracleParams {
    /// Unit `p = pow2_below(εt/8)`.
    pub fn new(t: u64, eps: Ratio) -> Result<Self> {
        if t == 0 {
            return Err(ApxError::input("oracle target must be positive"));
        }
        let et = eps
            .mul_int(t)
            .ok_or_else(|| ApxError::input("eps·t overflows"))?;
        Ok(OracleParams {
            t,
            eps,
            unit: pow2_below(et.div_int(8).expect("nonzero")),
        })
    }

    pub fn eps_t(&self) -> Ratio {
        self.eps.mul_int(self.t).expect("checked at construction")
    }

    /// Largest integer strictly below `εt`.
    fn below_eps_t(&self) -> u64 {
        self.eps_t().ceil() - 1
    }

    fn slack_for(&self, err: u64) -> u64 {
        let et = self.eps_t();
        // ⌈err / εt⌉
        let s = (err as u128 * et.den() as u128).div_ceil(et.num() as u128) as u64;
        s.max(1)
    }
}

/// A yes answer: the witness value and a handle to recover the subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Answer {
    pub value: u64,
    pub key: u32,
}

/// Items of a rounded table: exact values, rounded values and the scale.
#[derive(Clone, Debug)]
pub struct RoundedInstance {
    pub exact: Vec<u64>,
    pub rounded: Vec<u64>,
    pub k: u64,
    pub cap: u64,
}

impl RoundedInstance {
    /// `z' = ⌊kz/(εt)⌋` with cap `⌊k/ε⌋`.
    pub fn new(exact: &[u64], k: u64, eps: Ratio, t: u64) -> Result<Self> {
        let k = k.max(1);
        let rounded = exact
            .iter()
            .map(|&z| round_down_scaled(z, k, t, eps))
            .collect::<Result<Vec<_>>>()?;
        let cap = Ratio::new(eps.den(), eps.num())?
            .mul_int(k)
            .ok_or_else(|| ApxError::input("k/eps overflows"))?
            .floor();
        Ok(RoundedInstance {
            exact: exact.to_vec(),
            rounded,
            k,
            cap,
        })
    }

    /// Cardinality-bounded exact sumset of the rounded values.
    pub fn sumset(&self, engine: SumsetEngine) -> Result<SumsetResult> {
        if self.k as usize >= self.rounded.len() {
            sumset_with(&self.rounded, self.cap, engine)
        } else {
            sumset_bounded_card(&self.rounded, self.cap, self.k as usize)
        }
    }
}

#[derive(Debug)]
struct RoundedBody {
    ids: Vec<u32>,
    k: u64,
    sums: SumsetResult,
    /// Exact witness value for each rounded sum.
    value: Vec<u64>,
}

/// Exact sumset over values that are all multiples of `scale`.
#[derive(Debug)]
pub struct TableSource {
    ids: Vec<u32>,
    scale: u64,
    /// Rounded total `Σ z/scale`.
    total: u64,
    sums: SumsetResult,
}

impl TableSource {
    pub fn new(ids: Vec<u32>, exact: &[u64], scale: u64, cap: u64) -> Result<Self> {
        if exact.iter().any(|&z| z % scale != 0) {
            return Err(ApxError::contract("table items must be multiples of the scale"));
        }
        let rounded: Vec<u64> = exact.iter().map(|&z| z / scale).collect();
        let total = rounded.iter().sum::<u64>();
        Ok(TableSource {
            ids,
            scale,
            total,
            sums: sumset_dp(&rounded, cap.min(total))?,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cap(&self) -> u64 {
        self.sums.t
    }

    fn witness(&self, sum: u32, complement: bool, out: &mut Vec<u32>) {
        let w = self.sums.reconstruct(sum as u64).expect("table sum present");
        if complement {
            let mut it = w.iter().peekable();
            for local in 0..self.ids.len() {
                if it.peek() == Some(&&local) {
                    it.next();
                } else {
                    out.push(self.ids[local]);
                }
            }
        } else {
            out.extend(w.iter().map(|&i| self.ids[i]));
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Link {
    Empty,
    Child { child: u8, key: u32 },
    Pair { a: u32, b: u32 },
    Table { sum: u32, complement: bool },
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    value: u64,
    link: Link,
}

#[derive(Debug)]
struct GridBody {
    children: Vec<Arc<MembershipOracle>>,
    table: Option<Arc<TableSource>>,
    cells: Vec<u32>,
    entries: Vec<Entry>,
}

#[derive(Debug)]
enum Body {
    Rounded(RoundedBody),
    Grid(GridBody),
}

#[derive(Debug)]
pub struct MembershipOracle {
    params: OracleParams,
    err: u64,
    body: Body,
}

/// How a dense table is restricted when sampled onto the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Range {
    /// Rounded sums in `[0, hi]`.
    Low { hi: u64 },
    /// Rounded sums in `(lo, hi)`.
    Mid { lo: u64, hi: u64 },
    /// Complements `Σ - s` of rounded sums `s ∈ [0, lo_cap]`.
    High { lo_cap: u64 },
}

impl MembershipOracle {
    pub fn params(&self) -> OracleParams {
        self.params
    }

    /// Completeness error: every `x ∈ SubSums(Z; t)` has an entry within it.
    pub fn err(&self) -> u64 {
        self.err
    }

    /// Multiplier `c` such that this is a `(c·ε, t)`-oracle.
    pub fn slack(&self) -> u64 {
        self.params.slack_for(self.err)
    }

    pub fn radius(&self) -> Ratio {
        self.params.eps_t().mul_int(self.slack()).expect("radius fits")
    }

    fn aligned(&self) -> bool {
        matches!(self.body, Body::Grid(_))
    }

    /// Wraps an exact sumset of rounded items; ids name the items.
    pub fn from_rounded(
        params: OracleParams,
        ids: Vec<u32>,
        inst: &RoundedInstance,
        sums: SumsetResult,
    ) -> Result<Self> {
        if sums.values() != inst.rounded.as_slice() || sums.t != inst.cap {
            return Err(ApxError::contract("sumset does not match the rounded instance"));
        }
        if ids.len() != inst.exact.len() {
            return Err(ApxError::contract("one id per item required"));
        }
        let value = sums.witness_weights(&inst.exact);
        Ok(MembershipOracle {
            params,
            err: params.below_eps_t(),
            body: Body::Rounded(RoundedBody {
                ids,
                k: inst.k,
                sums,
                value,
            }),
        })
    }

    /// Rounds with `k` (at most `k` items per relevant subset) and builds
    /// the exact table with the chosen engine.
    pub fn from_items(
        params: OracleParams,
        ids: Vec<u32>,
        exact: &[u64],
        k: u64,
        engine: SumsetEngine,
    ) -> Result<Self> {
        let inst = RoundedInstance::new(exact, k, params.eps, params.t)?;
        let sums = inst.sumset(engine)?;
        Self::from_rounded(params, ids, &inst, sums)
    }

    /// Samples a range of an exact table onto the grid: for every cell the
    /// largest attainable sum not above the cell's end is kept if it falls
    /// inside the cell.
    pub fn from_table(params: OracleParams, table: Arc<TableSource>, range: Range) -> Result<Self> {
        let p = params.unit;
        let err = p - 1;
        let limit = params.t + err;
        let ncells = (limit / p + 1) as usize;
        let sc = table.scale;
        let sums = &table.sums.sums;
        let mut cells = vec![NONE; ncells];
        let mut entries = Vec::new();
        for (i, cell) in cells.iter_mut().enumerate() {
            let lo = i as u64 * p;
            let hi = (lo + p - 1).min(limit);
            let top = hi / sc;
            let found = match range {
                Range::Low { hi: h } => sums.prev_at_or_before(top.min(h)).map(|s| (s, false)),
                Range::Mid { lo: l, hi: h } => {
                    if h == 0 {
                        None
                    } else {
                        sums.prev_at_or_before(top.min(h - 1))
                            .filter(|&s| s > l)
                            .map(|s| (s, false))
                    }
                }
                Range::High { lo_cap } => {
                    // largest Σ - s ≤ top, i.e. smallest s ≥ Σ - top
                    let need = table.total.saturating_sub(top);
                    sums.next_at_or_after(need)
                        .filter(|&s| s <= lo_cap)
                        .map(|s| (table.total - s, true))
                }
            };
            if let Some((r, complement)) = found {
                let v = r * sc;
                if v >= lo && v <= hi {
                    let sum = if complement { table.total - r } else { r };
                    *cell = entries.len() as u32;
                    entries.push(Entry {
                        value: v,
                        link: Link::Table {
                            sum: sum as u32,
                            complement,
                        },
                    });
                }
            }
        }
        Ok(MembershipOracle {
            params,
            err,
            body: Body::Grid(GridBody {
                children: Vec::new(),
                table: Some(table),
                cells,
                entries,
            }),
        })
    }

    /// All entries as `(value, key)`.
    pub fn entries(&self) -> Vec<Answer> {
        match &self.body {
            Body::Rounded(r) => r
                .sums
                .sums
                .iter()
                .map(|j| Answer {
                    value: r.value[j as usize],
                    key: j as u32,
                })
                .collect(),
            Body::Grid(g) => g
                .cells
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != NONE)
                .map(|(c, &e)| Answer {
                    value: g.entries[e as usize].value,
                    key: c as u32,
                })
                .collect(),
        }
    }

    /// Definition-level query with this oracle's own radius.
    pub fn query(&self, q: u64) -> Result<Option<Answer>> {
        let bound = self
            .params
            .eps
            .checked_add(Ratio::ONE)
            .and_then(|r| r.mul_int(self.params.t))
            .expect("bound fits");
        if bound.cmp_int(q) == std::cmp::Ordering::Less {
            return Err(ApxError::Query(format!(
                "q = {q} exceeds (1+ε)t = {bound}"
            )));
        }
        match &self.body {
            Body::Rounded(r) => {
                // q' = ⌊kq/(εt)⌋; answer from rounded sums in (q'-2k, q'+k]
                let qr = round_down_scaled(q, r.k, self.params.t, self.params.eps)?;
                let lo = (qr + 1).saturating_sub(2 * r.k);
                Ok(r.sums.sums.max_in(lo, qr + r.k).map(|j| Answer {
                    value: r.value[j as usize],
                    key: j as u32,
                }))
            }
            Body::Grid(_) => self.query_radius(q, self.radius()),
        }
    }

    /// Largest entry within `2r` of `q`.
    pub fn query_radius(&self, q: u64, r: Ratio) -> Result<Option<Answer>> {
        let two_r = r.mul_int(2).ok_or_else(|| ApxError::input("radius overflows"))?;
        let lo = q.saturating_sub(two_r.floor());
        let hi = q + two_r.floor();
        Ok(self.max_entry_in(lo, hi))
    }

    fn max_entry_in(&self, lo: u64, hi: u64) -> Option<Answer> {
        match &self.body {
            Body::Rounded(r) => {
                // an exact value z lies in [j·u, (j+k)·u) for rounded sum j
                let jhi = round_down_scaled(hi, r.k, self.params.t, self.params.eps).ok()?;
                let jlo = round_down_scaled(lo, r.k, self.params.t, self.params.eps)
                    .ok()?
                    .saturating_sub(r.k);
                let sums = &r.sums.sums;
                let mut best: Option<Answer> = None;
                let mut j = sums.next_at_or_after(jlo);
                while let Some(s) = j {
                    if s > jhi {
                        break;
                    }
                    let v = r.value[s as usize];
                    if v >= lo && v <= hi && best.is_none_or(|b| v > b.value) {
                        best = Some(Answer { value: v, key: s as u32 });
                    }
                    j = sums.next_at_or_after(s + 1);
                }
                best
            }
            Body::Grid(g) => {
                let p = self.params.unit;
                let top = ((hi / p) as usize).min(g.cells.len().saturating_sub(1));
                let bottom = (lo / p) as usize;
                if bottom > top {
                    return None;
                }
                (bottom..=top).rev().find_map(|c| {
                    let e = g.cells[c];
                    if e == NONE {
                        return None;
                    }
                    let v = g.entries[e as usize].value;
                    (v >= lo && v <= hi).then_some(Answer {
                        value: v,
                        key: c as u32,
                    })
                })
            }
        }
    }

    /// Item ids of the subset behind `key`.
    pub fn witness(&self, key: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack: Vec<(&MembershipOracle, u32)> = vec![(self, key)];
        while let Some((o, key)) = stack.pop() {
            match &o.body {
                Body::Rounded(r) => {
                    let w = r.sums.reconstruct(key as u64).expect("key names a rounded sum");
                    out.extend(w.iter().map(|&i| r.ids[i]));
                }
                Body::Grid(g) => {
                    let e = g.cells[key as usize];
                    assert!(e != NONE, "key names an empty cell");
                    match g.entries[e as usize].link {
                        Link::Empty => {}
                        Link::Child { child, key } => stack.push((&g.children[child as usize], key)),
                        Link::Pair { a, b } => {
                            if a != NONE {
                                stack.push((&g.children[0], a));
                            }
                            if b != NONE {
                                stack.push((&g.children[1], b));
                            }
                        }
                        Link::Table { sum, complement } => {
                            g.table
                                .as_ref()
                                .expect("table link without table")
                                .witness(sum, complement, &mut out);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Entries binned at the unit, one per cell, smallest value first,
    /// dropping values above `limit`; cell 0 always holds a witness.
    fn binned(&self, limit: u64) -> (BoundedBitset, Vec<Answer>) {
        let p = self.params.unit;
        let ncells = limit / p;
        let mut entries = self.entries();
        entries.sort_by_key(|a| a.value);
        let mut cells = BoundedBitset::new(ncells);
        let mut at = vec![
            Answer {
                value: 0,
                key: NONE
            };
            (ncells + 1) as usize
        ];
        for a in entries {
            if a.value > limit {
                break;
            }
            let c = a.value / p;
            if !cells.get(c) {
                cells.set(c);
                at[c as usize] = a;
            }
        }
        cells.set(0);
        (cells, at)
    }

    fn binned_err(&self) -> u64 {
        if self.aligned() {
            self.err
        } else {
            self.err + self.params.unit - 1
        }
    }
}

fn same_params(a: &MembershipOracle, b: &MembershipOracle) -> Result<OracleParams> {
    if a.params != b.params {
        return Err(ApxError::contract(format!(
            "oracle parameters differ: {:?} vs {:?}",
            a.params, b.params
        )));
    }
    Ok(a.params)
}

/// Oracle for `SubSums(Z1 ∪ Z2; t)` from oracles over disjoint `Z1`, `Z2`.
pub fn merge_oracles(
    a: Arc<MembershipOracle>,
    b: Arc<MembershipOracle>,
) -> Result<MembershipOracle> {
    let params = same_params(&a, &b)?;
    let p = params.unit;
    if p > 1 && params.eps_t().cmp_int(p) == std::cmp::Ordering::Less {
        return Err(ApxError::contract("unit exceeds εt"));
    }
    let err = a.binned_err() + b.binned_err() + 3 * (p - 1);
    let limit = params.t + err;
    let (ca, ea) = a.binned(limit);
    let (cb, eb) = b.binned(limit);
    let ncells = limit / p;
    let (conv, left) = bool_convolve_witness(&ca, &cb, ncells)?;
    let mut cells = vec![NONE; (ncells + 1) as usize];
    let mut entries = Vec::new();
    for k in conv.iter() {
        let i = left[k as usize] as u64;
        let (x, y) = (ea[i as usize], eb[(k - i) as usize]);
        let v = x.value + y.value;
        if v > limit {
            continue;
        }
        let c = (v / p) as usize;
        if cells[c] == NONE {
            cells[c] = entries.len() as u32;
            entries.push(Entry {
                value: v,
                link: Link::Pair { a: x.key, b: y.key },
            });
        }
    }
    if cells[0] == NONE {
        cells[0] = entries.len() as u32;
        entries.push(Entry {
            value: 0,
            link: Link::Empty,
        });
    }
    Ok(MembershipOracle {
        params,
        err,
        body: Body::Grid(GridBody {
            children: vec![a, b],
            table: None,
            cells,
            entries,
        }),
    })
}

/// Oracle answering yes wherever any child does; children cover the same
/// items (typically restricted to different ranges).
pub fn union_oracles(children: Vec<Arc<MembershipOracle>>) -> Result<MembershipOracle> {
    let first = children
        .first()
        .ok_or_else(|| ApxError::contract("union of no oracles"))?;
    for c in &children[1..] {
        same_params(first, c)?;
    }
    if children.len() > u8::MAX as usize {
        return Err(ApxError::contract("too many union children"));
    }
    let params = first.params;
    let p = params.unit;
    let err = children.iter().map(|c| c.binned_err()).max().unwrap_or(0) + (p - 1);
    let limit = params.t + err;
    let mut cells = vec![NONE; (limit / p + 1) as usize];
    let mut entries = Vec::new();
    for (ci, child) in children.iter().enumerate() {
        for a in child.entries() {
            if a.value > limit {
                continue;
            }
            let c = (a.value / p) as usize;
            if cells[c] == NONE {
                cells[c] = entries.len() as u32;
                entries.push(Entry {
                    value: a.value,
                    link: Link::Child {
                        child: ci as u8,
                        key: a.key,
                    },
                });
            }
        }
    }
    if cells[0] == NONE {
        cells[0] = entries.len() as u32;
        entries.push(Entry {
            value: 0,
            link: Link::Empty,
        });
    }
    Ok(MembershipOracle {
        params,
        err,
        body: Body::Grid(GridBody {
            children,
            table: None,
            cells,
            entries,
        }),
    })
}

/// Reads a weak `(1-ε)`-approximation from an oracle whose radius is at
/// most `εt/6`: queries `⌊iεt/6⌋` from the top and returns the largest entry
/// in the first window that answers yes and passes `accept`.
pub fn read_weak_answer_with(
    o: &MembershipOracle,
    eps: Ratio,
    mut accept: impl FnMut(&Answer) -> bool,
) -> Result<Option<Answer>> {
    let t = o.params.t;
    let step = eps
        .mul_int(t)
        .and_then(|r| r.div_int(6))
        .ok_or_else(|| ApxError::input("eps·t overflows"))?;
    if o.radius() > step {
        return Err(ApxError::contract(format!(
            "oracle radius {} exceeds εt/6 = {}",
            o.radius(),
            step
        )));
    }
    // largest i with ⌊i·step⌋ ≤ t
    let imax = Ratio::new(step.den(), step.num())?.floor_mul(t) as u64;
    let mut tried = std::collections::HashSet::new();
    for i in (0..=imax).rev() {
        let q = step.floor_mul(i) as u64;
        if let Some(a) = o.query_radius(q, step)? {
            if tried.insert(a.key) && accept(&a) {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

pub fn read_weak_answer(o: &MembershipOracle, eps: Ratio) -> Result<Answer> {
    read_weak_answer_with(o, eps, |_| true)?
        .ok_or_else(|| ApxError::contract("oracle has no entry near any query"))
}
