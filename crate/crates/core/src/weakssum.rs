//! Weak `(1-ε)`-approximation for subset sum, and Partition on top of it.
//!
//! The pipeline spends an internal accuracy `e = ε/48`: item reduction,
//! the small/large split, oracle construction and the final readout each
//! consume a recorded share, and the total is checked against `ε`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::error::{ApxError, Result};
use crate::numeric::{ceil_log2, check_eps, check_values};
use crate::oracle::{
    merge_oracles, read_weak_answer_with, union_oracles, MembershipOracle, OracleParams, Range,
    TableSource,
};
use crate::preprocess::{
    ensure_large_opt, reduce_items, split_small_large, values_of, Item, LargeOpt,
};
use crate::ratio::Ratio;
use crate::sumset::{EngineTag, SumsetEngine};

/// Internal accuracy is `ε / EPS_DIVISOR`.
pub const EPS_DIVISOR: u64 = 48;
/// Constant in the dense low/high threshold `L = ⌈L_CONST·Σ·ℓ/m²⌉`.
pub const L_CONST: u64 = 1;

#[derive(Clone, Copy, Debug)]
pub struct WeakConfig {
    pub eps: Ratio,
    /// Large/small threshold; defaults to `ε^(2/3)`.
    pub gamma: Option<Ratio>,
    pub engine: SumsetEngine,
}

impl WeakConfig {
    pub fn new(eps: Ratio) -> Self {
        WeakConfig {
            eps,
            gamma: None,
            engine: SumsetEngine::Deterministic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Sparse,
    Dense,
}

#[derive(Clone, Debug, Serialize)]
pub struct HalfStats {
    pub m: u64,
    /// Largest small item in units of `q_small`.
    pub ell: u64,
    pub branch: Branch,
}

/// Shares of the accuracy budget, as fractions of `t`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EpsLedger {
    pub reduce: f64,
    pub split: f64,
    pub oracle: f64,
    pub readout: f64,
    /// Worst-case shortfall below the optimum, as a fraction of `t`.
    pub lower_total: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PipelineStats {
    pub immediate: bool,
    pub n_input: usize,
    pub n_reduced: usize,
    pub n_large: usize,
    pub n_small: usize,
    pub eps_internal: String,
    pub gamma: String,
    pub unit: u64,
    pub q_small: u64,
    pub m_prime: u64,
    pub k_large: u64,
    pub l_const: u64,
    pub halves: Vec<HalfStats>,
    pub oracle_err: u64,
    pub oracle_slack: u64,
    pub engine: Option<EngineTag>,
    pub ledger: EpsLedger,
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakSolution {
    pub value: u64,
    /// Input indices, ascending.
    pub witness: Vec<usize>,
    pub stats: PipelineStats,
}

/// `ε^(2/3)` rounded down to a dyadic rational.
pub fn default_gamma(eps: Ratio) -> Ratio {
    let g = Ratio::from_f64_floor(eps.to_f64().powf(2.0 / 3.0), 24);
    if g.is_zero() {
        Ratio::new(1, 1 << 24).expect("valid")
    } else {
        g
    }
}

fn below_one_plus(x: u128, t: u64, eps: Ratio) -> bool {
    // x < (1+ε)t
    x * (eps.den() as u128) < (eps.den() as u128 + eps.num() as u128) * (t as u128)
}

struct Timer(BTreeMap<String, f64>, Instant);

impl Timer {
    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.0
            .insert(name.to_string(), (now - self.1).as_secs_f64() * 1e3);
        self.1 = now;
    }
}

fn seed_engine(engine: SumsetEngine, salt: u64) -> SumsetEngine {
    match engine {
        SumsetEngine::Deterministic => engine,
        SumsetEngine::Randomized { seed, delta } => SumsetEngine::Randomized {
            seed: seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            delta,
        },
    }
}

/// Oracle for one odd/even half of the small items.
fn half_oracle(
    params: OracleParams,
    all: &[Item],
    ids: Vec<u32>,
    q_small: u64,
    engine: SumsetEngine,
) -> Result<(MembershipOracle, HalfStats)> {
    let exact: Vec<u64> = ids.iter().map(|&i| all[i as usize].value).collect();
    let m = exact.len() as u64;
    let ell = exact.iter().max().copied().unwrap_or(0) / q_small;
    let lg = ceil_log2(ell).max(1) as u128;
    if (m as u128) * (m as u128) < (ell as u128) * lg * lg {
        let o = MembershipOracle::from_items(params, ids, &exact, m, engine)?;
        return Ok((
            o,
            HalfStats {
                m,
                ell,
                branch: Branch::Sparse,
            },
        ));
    }
    let total: u64 = exact.iter().map(|z| z / q_small).sum();
    let l = ((L_CONST as u128 * total as u128 * ell as u128).div_ceil((m * m) as u128) as u64)
        .min(total);
    let cap = (params.t / q_small).max(l).min(total);
    let table = Arc::new(TableSource::new(ids, &exact, q_small, cap)?);
    let low = MembershipOracle::from_table(params, table.clone(), Range::Low { hi: l })?;
    let mid = MembershipOracle::from_table(
        params,
        table.clone(),
        Range::Mid {
            lo: l,
            hi: total - l,
        },
    )?;
    let high = MembershipOracle::from_table(params, table, Range::High { lo_cap: l })?;
    let o = union_oracles(vec![Arc::new(low), Arc::new(mid), Arc::new(high)])?;
    Ok((
        o,
        HalfStats {
            m,
            ell,
            branch: Branch::Dense,
        },
    ))
}

/// Returns a subset with sum `V`, `(1-ε)·OPT ≤ V < (1+ε)·t`, where OPT is
/// the best subset sum not exceeding `t`.
pub fn weak_subset_sum(values: &[u64], t: u64, cfg: &WeakConfig) -> Result<WeakSolution> {
    weak_subset_sum_inspect(values, t, cfg, &mut |_| {})
}

/// One complete oracle built by the pipeline, over the items named by `ids`.
pub struct OracleView<'a> {
    pub stage: &'static str,
    pub oracle: &'a MembershipOracle,
    pub ids: Vec<u32>,
    /// Rounded item values indexed by id.
    pub item_values: &'a [u64],
}

/// [`weak_subset_sum`] that hands every complete oracle to `inspect`.
pub fn weak_subset_sum_inspect(
    values: &[u64],
    t: u64,
    cfg: &WeakConfig,
    inspect: &mut dyn FnMut(OracleView<'_>),
) -> Result<WeakSolution> {
    check_eps(cfg.eps)?;
    check_values(values)?;
    if t == 0 {
        return Err(ApxError::input("target must be positive"));
    }
    let mut timer = Timer(BTreeMap::new(), Instant::now());
    let mut stats = PipelineStats {
        n_input: values.len(),
        l_const: L_CONST,
        ..Default::default()
    };
    let items = match ensure_large_opt(values, t) {
        LargeOpt::Immediate(items) => {
            stats.immediate = true;
            timer.lap("large_opt");
            stats.timings_ms = timer.0;
            return Ok(WeakSolution {
                value: items.iter().map(|&i| values[i]).sum(),
                witness: items,
                stats,
            });
        }
        LargeOpt::Certified { items, .. } => items,
    };
    timer.lap("large_opt");

    let eps = cfg.eps;
    let e = eps.div_int(EPS_DIVISOR).ok_or_else(|| ApxError::input("eps too small"))?;
    stats.eps_internal = e.to_string();
    let reduced = reduce_items(
        items.iter().map(|&i| Item::original(i, values[i])).collect(),
        t,
        e,
    )?;
    stats.n_reduced = reduced.items.len();
    timer.lap("reduce");

    let gamma = cfg.gamma.unwrap_or_else(|| default_gamma(eps));
    if gamma.is_zero() {
        return Err(ApxError::input("gamma must be positive"));
    }
    stats.gamma = gamma.to_string();
    let split = split_small_large(reduced.items, t, e, gamma, items.len())?;
    stats.n_large = split.large.len();
    stats.n_small = split.small.len();
    stats.q_small = split.q_small;
    stats.m_prime = split.m_prime;
    timer.lap("split");

    let params = OracleParams::new(t, e)?;
    stats.unit = params.unit;
    let mut all: Vec<Item> = split.large;
    let n_large = all.len();
    all.extend(split.small);

    // at most ⌈1/γ⌉ large items fit under t
    let k_large = Ratio::new(gamma.den(), gamma.num())?.ceil().min(n_large as u64).max(1);
    stats.k_large = k_large;
    let large_ids: Vec<u32> = (0..n_large as u32).collect();
    let large_vals = values_of(&all[..n_large]);
    let large = MembershipOracle::from_items(
        params,
        large_ids,
        &large_vals,
        k_large,
        seed_engine(cfg.engine, 1),
    )?;
    let item_values = values_of(&all);
    inspect(OracleView {
        stage: "large",
        oracle: &large,
        ids: (0..n_large as u32).collect(),
        item_values: &item_values,
    });
    stats.engine = Some(match cfg.engine {
        SumsetEngine::Deterministic => EngineTag::Dp,
        SumsetEngine::Randomized { .. } => EngineTag::Randomized,
    });
    timer.lap("large_oracle");

    let mut small_ids: Vec<u32> = (n_large as u32..all.len() as u32).collect();
    small_ids.sort_by_key(|&i| all[i as usize].value);
    let mut halves = Vec::new();
    for parity in 0..2 {
        let ids: Vec<u32> = small_ids.iter().skip(parity).step_by(2).copied().collect();
        if ids.is_empty() {
            continue;
        }
        let (o, hs) = half_oracle(
            params,
            &all,
            ids.clone(),
            split.q_small,
            seed_engine(cfg.engine, 2 + parity as u64),
        )?;
        inspect(OracleView {
            stage: if parity == 0 { "half-even" } else { "half-odd" },
            oracle: &o,
            ids,
            item_values: &item_values,
        });
        stats.halves.push(hs);
        halves.push(Arc::new(o));
    }
    let small = match halves.len() {
        0 => None,
        1 => halves.pop(),
        _ => {
            let b = halves.pop().expect("two halves");
            let a = halves.pop().expect("two halves");
            Some(Arc::new(merge_oracles(a, b)?))
        }
    };
    if let Some(o) = &small {
        inspect(OracleView {
            stage: "small",
            oracle: o,
            ids: (n_large as u32..all.len() as u32).collect(),
            item_values: &item_values,
        });
    }
    timer.lap("small_oracle");

    let large = Arc::new(large);
    let fin = match small {
        Some(s) => merge_oracles(large, s)?,
        None => Arc::try_unwrap(large).expect("sole owner"),
    };
    inspect(OracleView {
        stage: "final",
        oracle: &fin,
        ids: (0..all.len() as u32).collect(),
        item_values: &item_values,
    });
    stats.oracle_err = fin.err();
    stats.oracle_slack = fin.slack();
    timer.lap("merge");

    let mut lifted_best: Option<(u128, Vec<usize>)> = None;
    let answer = read_weak_answer_with(&fin, eps, |a| {
        let mut orig: Vec<usize> = fin
            .witness(a.key)
            .iter()
            .flat_map(|&id| all[id as usize].origins.iter().map(|&o| o as usize))
            .collect();
        orig.sort_unstable();
        let sum: u128 = orig.iter().map(|&i| values[i] as u128).sum();
        if below_one_plus(sum, t, eps) {
            lifted_best = Some((sum, orig));
            true
        } else {
            false
        }
    })?;
    if answer.is_none() {
        return Err(ApxError::contract("no oracle answer passed the readout"));
    }
    let (mut sum, mut witness) = lifted_best.expect("accepted answer recorded");
    let mut tiny: Vec<usize> = reduced.dropped.iter().map(|&i| i as usize).collect();
    tiny.sort_unstable_by_key(|&i| std::cmp::Reverse(values[i]));
    for i in tiny {
        if below_one_plus(sum + values[i] as u128, t, eps) {
            sum += values[i] as u128;
            witness.push(i);
        }
    }
    witness.sort_unstable();
    timer.lap("readout");

    let tf = t as f64;
    let ledger = EpsLedger {
        reduce: e.to_f64(),
        split: split.eps_spent.to_f64(),
        oracle: fin.err() as f64 / tf,
        readout: 2.0 * eps.to_f64() / 6.0,
        lower_total: e.to_f64() + split.eps_spent.to_f64() + fin.err() as f64 / tf,
    };
    // the shortfall is measured against OPT ≥ t/2
    if ledger.lower_total > eps.to_f64() / 2.0 {
        return Err(ApxError::contract(format!(
            "accuracy ledger overspent: {:.6} > ε/2",
            ledger.lower_total
        )));
    }
    stats.ledger = ledger;
    stats.timings_ms = timer.0;
    Ok(WeakSolution {
        value: sum as u64,
        witness,
        stats,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionSolution {
    /// Sum of the lighter side, at most `⌊Σ/2⌋`.
    pub value: u64,
    pub side: Vec<usize>,
    pub total: u64,
    pub complemented: bool,
    pub stats: PipelineStats,
}

/// A side with sum `V ≤ ⌊Σ/2⌋` and `V ≥ (1-ε)·OPT`.
pub fn approx_partition(values: &[u64], cfg: &WeakConfig) -> Result<PartitionSolution> {
    check_values(values)?;
    let total: u64 = values.iter().sum();
    let t = total / 2;
    if t == 0 {
        check_eps(cfg.eps)?;
        return Ok(PartitionSolution {
            value: 0,
            side: Vec::new(),
            total,
            complemented: false,
            stats: PipelineStats::default(),
        });
    }
    let sol = weak_subset_sum(values, t, cfg)?;
    if sol.value <= t {
        return Ok(PartitionSolution {
            value: sol.value,
            side: sol.witness,
            total,
            complemented: false,
            stats: sol.stats,
        });
    }
    let mut chosen = vec![false; values.len()];
    for &i in &sol.witness {
        chosen[i] = true;
    }
    let side: Vec<usize> = (0..values.len()).filter(|&i| !chosen[i]).collect();
    Ok(PartitionSolution {
        value: total - sol.value,
        side,
        total,
        complemented: true,
        stats: sol.stats,
    })
}
