use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use apx_core::brute::{ksum_brute, minplus_brute, partition_opt, subset_sum_opt, tree_head_dp, tree_tail_dp, MAX_CONV_N};
use apx_core::format::{parse_instance, write_instance, Instance, InstanceKind};
use apx_core::gen::{generate, GenParams};
use apx_core::ksum::{ksum_approx, ksum_exact, KSumInstance, KSumTuple, KSumVerdict};
use apx_core::minconv::{minplus_approx_with, minplus_exact, Entry, ExactEngine, Mode};
use apx_core::sumset::SumsetEngine;
use apx_core::treesparsity::{sparsity_vectors, SparsityMode, WeightedTree};
use apx_core::weakssum::{approx_partition, weak_subset_sum, PipelineStats, WeakConfig};
use apx_core::{ApxError, Ratio};
use serde_json::{json, Value};

use crate::{EngineArg, GenArgs, KsumArgs, MinconvArgs, OracleArgs, SsumArgs, TreeArgs};

pub fn read_instance(path: &Path, kind: InstanceKind) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_instance(&text, kind)?)
}

/// Pretty JSON, or one `key: value` line per non-null top-level field.
pub fn emit(v: &Value, as_json: bool) -> Result<()> {
    let mut out = io::stdout().lock();
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
        return Ok(());
    }
    if let Value::Object(map) = v {
        for (k, x) in map {
            match x {
                Value::Null => {}
                Value::String(s) => writeln!(out, "{k}: {s}")?,
                Value::Array(a) if a.iter().all(|e| !e.is_object()) => {
                    let parts: Vec<String> = a
                        .iter()
                        .map(|e| match e {
                            Value::Null => "inf".to_string(),
                            other => other.to_string(),
                        })
                        .collect();
                    writeln!(out, "{k}: {}", parts.join(" "))?;
                }
                other => writeln!(out, "{k}: {other}")?,
            }
        }
    }
    Ok(())
}

fn contract(msg: String) -> anyhow::Error {
    ApxError::contract(msg).into()
}

pub fn weak_config(a: &SsumArgs) -> WeakConfig {
    WeakConfig {
        eps: a.eps,
        gamma: a.gamma,
        engine: match a.engine {
            EngineArg::Det => SumsetEngine::Deterministic,
            EngineArg::Rand => SumsetEngine::Randomized { seed: a.seed, delta: a.delta },
        },
    }
}

/// `immediate`, or the branch of each small-item half joined by `+`.
pub fn branch_summary(stats: &PipelineStats) -> String {
    if stats.immediate {
        return "immediate".into();
    }
    if stats.halves.is_empty() {
        return "large-only".into();
    }
    stats
        .halves
        .iter()
        .map(|h| serde_json::to_value(h.branch).expect("enum").as_str().unwrap_or("").to_string())
        .collect::<Vec<_>>()
        .join("+")
}

fn below_one_plus(v: u64, t: u64, eps: Ratio) -> bool {
    (v as u128) * (eps.den() as u128) < (t as u128) * (eps.den() + eps.num()) as u128
}

pub fn ssum_weak(a: &SsumArgs) -> Result<()> {
    let Instance::Ssum { values, t } = read_instance(&a.input, InstanceKind::Ssum)? else { unreachable!() };
    let sol = weak_subset_sum(&values, t, &weak_config(a))?;
    let witness_values: Vec<u64> = sol.witness.iter().map(|&i| values[i]).collect();
    let resum: u64 = witness_values.iter().sum();
    if resum != sol.value || !below_one_plus(sol.value, t, a.eps) {
        return Err(contract(format!("self-check failed: value {} resum {resum} t {t}", sol.value)));
    }
    let out = json!({
        "command": "ssum-weak",
        "n": values.len(),
        "t": t,
        "eps": a.eps.to_string(),
        "eps_used": sol.stats.eps_internal,
        "value": sol.value,
        "witness": sol.witness,
        "witness_values": witness_values,
        "branch": branch_summary(&sol.stats),
        "stats": sol.stats,
    });
    emit(&out, a.json)
}

pub fn partition(a: &SsumArgs) -> Result<()> {
    let Instance::Partition { values } = read_instance(&a.input, InstanceKind::Partition)? else { unreachable!() };
    let sol = approx_partition(&values, &weak_config(a))?;
    let witness_values: Vec<u64> = sol.side.iter().map(|&i| values[i]).collect();
    let resum: u64 = witness_values.iter().sum();
    if resum != sol.value || sol.value > sol.total / 2 {
        return Err(contract(format!("self-check failed: value {} resum {resum}", sol.value)));
    }
    let out = json!({
        "command": "partition",
        "n": values.len(),
        "total": sol.total,
        "half": sol.total / 2,
        "eps": a.eps.to_string(),
        "eps_used": sol.stats.eps_internal,
        "value": sol.value,
        "witness": sol.side,
        "witness_values": witness_values,
        "complemented": sol.complemented,
        "branch": branch_summary(&sol.stats),
        "stats": sol.stats,
    });
    emit(&out, a.json)
}

fn sandwich(got: &[Entry], want: &[Entry], eps: Ratio, mode: Mode) -> bool {
    let (n, d) = (eps.num() as u128, eps.den() as u128);
    got.iter().zip(want).all(|(g, w)| match (g, w) {
        (None, None) => true,
        (Some(g), Some(w)) => {
            let (g, w) = (*g as u128, *w as u128);
            match mode {
                Mode::Min => g >= w && g * d <= w * (d + n),
                Mode::Max => g <= w && g * d >= w * (d - n),
            }
        }
        _ => false,
    })
}

pub fn minconv(a: &MinconvArgs) -> Result<()> {
    let Instance::SeqPair { a: xs, b: ys } = read_instance(&a.input, InstanceKind::Seqpair)? else { unreachable!() };
    let mode: Mode = a.mode.into();
    let (seq, stats, self_checked) = if a.exact {
        let w = a.w_bound.expect("clap requires --w-bound");
        if let Some(v) = xs.iter().chain(&ys).flatten().find(|&&v| v > w) {
            return Err(ApxError::input(format!("entry {v} exceeds --w-bound {w}")).into());
        }
        (minplus_exact(&xs, &ys, mode)?, Value::Null, false)
    } else {
        let eps = a.eps.expect("clap requires --eps");
        let (seq, stats) = minplus_approx_with(&xs, &ys, eps, mode, ExactEngine::Auto)?;
        let checked = xs.len() <= MAX_CONV_N;
        if checked && !sandwich(&seq, &minplus_brute(&xs, &ys, mode)?, eps, mode) {
            return Err(contract("self-check failed: output outside the (1±ε) sandwich".into()));
        }
        (seq, serde_json::to_value(stats)?, checked)
    };
    let out = json!({
        "command": "minconv",
        "n": xs.len(),
        "mode": mode,
        "exact": a.exact,
        "eps": a.eps.map(|e| e.to_string()),
        "self_checked": self_checked,
        "sequence": seq,
        "stats": stats,
    });
    emit(&out, a.json)
}

fn check_subtree(tree: &WeightedTree, nodes: &[usize], k: usize, kept: u64) -> Result<()> {
    let sum: u64 = nodes.iter().map(|&v| tree.weight(v)).sum();
    if nodes.len() != k || !tree.is_rooted_subtree(nodes) || sum != kept {
        return Err(contract(format!("self-check failed: subtree for k = {k} is invalid")));
    }
    Ok(())
}

pub fn tree_sparsity(a: &TreeArgs) -> Result<()> {
    let Instance::Tree(tree) = read_instance(&a.input, InstanceKind::Tree)? else { unreachable!() };
    let mode: SparsityMode = a.mode.into();
    let rec = sparsity_vectors(&tree, a.eps, mode)?;
    let v = rec.vector();
    let kept = |k: usize| match mode {
        SparsityMode::Head => v[k],
        SparsityMode::Tail => tree.total() - v[k],
    };
    let mut out = json!({
        "command": "tree-sparsity",
        "n": tree.n(),
        "mode": mode,
        "eps": a.eps.to_string(),
        "delta": rec.delta.to_string(),
        "depth": rec.depth,
        "realized_factor": rec.realized_factor(),
    });
    let obj = out.as_object_mut().expect("object");
    match a.k {
        Some(k) => {
            let nodes = rec.retrieve(k)?;
            check_subtree(&tree, &nodes, k, kept(k))?;
            obj.insert("k".into(), json!(k));
            obj.insert("entry".into(), json!(v[k]));
            obj.insert("kept_weight".into(), json!(kept(k)));
            obj.insert("nodes".into(), json!(nodes));
        }
        None => {
            for k in [0, tree.n() / 2, tree.n()] {
                check_subtree(&tree, &rec.retrieve(k)?, k, kept(k))?;
            }
            obj.insert("vector".into(), json!(v));
        }
    }
    emit(&out, a.json)
}

fn tuple_json(t: &KSumTuple) -> Value {
    json!({ "addends": t.addends, "target": t.target, "sum": t.sum() })
}

fn check_members(inst: &KSumInstance, t: &KSumTuple) -> bool {
    inst.targets.binary_search(&t.target).is_ok()
        && t.addends.iter().zip(&inst.addends).all(|(a, s)| s.binary_search(a).is_ok())
}

pub fn ksum(a: &KsumArgs, fixed_k: Option<usize>) -> Result<()> {
    let Instance::KSum(inst) = read_instance(&a.input, InstanceKind::Ksum)? else { unreachable!() };
    for want in [fixed_k, a.k].into_iter().flatten() {
        if inst.k() != want {
            return Err(ApxError::input(format!("file holds a {}SUM instance, expected k = {want}", inst.k())).into());
        }
    }
    let command = if fixed_k == Some(3) { "threesum" } else { "ksum" };
    let out = if a.exact {
        let found = ksum_exact(&inst)?;
        if let Some(t) = &found {
            if !check_members(&inst, t) || t.sum() != t.target {
                return Err(contract(format!("self-check failed: {t:?}")));
            }
        }
        json!({
            "command": command,
            "k": inst.k(),
            "exact": true,
            "verdict": if found.is_some() { "found" } else { "not-found" },
            "tuple": found.as_ref().map(tuple_json),
        })
    } else {
        let eps = a.eps.expect("clap requires --eps");
        let verdict = ksum_approx(&inst, eps)?;
        let (name, tuple, q) = match &verdict {
            KSumVerdict::NoneExists => ("none-exists", None, None),
            KSumVerdict::NearTuple { tuple, q } => {
                if !check_members(&inst, tuple) || !tuple.within(eps) {
                    return Err(contract(format!("self-check failed: {tuple:?}")));
                }
                ("near-tuple", Some(tuple_json(tuple)), Some(*q))
            }
        };
        json!({
            "command": command,
            "k": inst.k(),
            "exact": false,
            "eps": eps.to_string(),
            "verdict": name,
            "tuple": tuple,
            "q": q,
        })
    };
    emit(&out, a.json)
}

pub fn gen(a: &GenArgs) -> Result<()> {
    let inst = generate(&GenParams {
        kind: a.kind.into(),
        n: a.n,
        w: a.w,
        seed: a.seed,
        shape: a.shape.into(),
        k: a.k,
    })?;
    let text = write_instance(&inst);
    match &a.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn oracle(a: &OracleArgs) -> Result<()> {
    let kind: InstanceKind = a.kind.into();
    let mut out = json!({ "command": "oracle", "kind": kind });
    let obj = out.as_object_mut().expect("object");
    match read_instance(&a.input, kind)? {
        Instance::Ssum { values, t } => {
            let (opt, w) = subset_sum_opt(&values, t)?;
            obj.insert("value".into(), json!(opt));
            obj.insert("witness".into(), json!(w));
        }
        Instance::Partition { values } => {
            let (opt, w) = partition_opt(&values)?;
            obj.insert("value".into(), json!(opt));
            obj.insert("witness".into(), json!(w));
        }
        Instance::SeqPair { a: xs, b: ys } => {
            let mode: Mode = a.mode.into();
            obj.insert("mode".into(), json!(mode));
            obj.insert("sequence".into(), json!(minplus_brute(&xs, &ys, mode)?));
        }
        Instance::Tree(t) => {
            obj.insert("head".into(), json!(tree_head_dp(&t)?));
            obj.insert("tail".into(), json!(tree_tail_dp(&t)?));
        }
        Instance::KSum(inst) => {
            let found = ksum_brute(&inst)?;
            obj.insert("found".into(), json!(found.is_some()));
            obj.insert("tuple".into(), json!(found));
        }
    }
    emit(&out, a.json)
}
