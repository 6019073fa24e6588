//! `apx bench`: median wall time per (n, ε) grid cell, written as CSV.

use std::fs::File;
use std::io::{self, Write};
use std::time::Instant;

use anyhow::{Context, Result};
use apx_core::format::{Instance, InstanceKind};
use apx_core::gen::{generate, GenParams};
use apx_core::ksum::{ksum_approx, KSumVerdict};
use apx_core::minconv::{minplus_approx_with, minplus_exact, ExactEngine, Mode};
use apx_core::treesparsity::{sparsity_vectors, SparsityMode};
use apx_core::weakssum::{approx_partition, weak_subset_sum, WeakConfig};
use apx_core::Ratio;
use clap::ValueEnum;
use serde::Serialize;

use crate::commands::branch_summary;
use crate::{BenchArgs, BenchCommand};

#[derive(Serialize)]
struct Row {
    command: &'static str,
    n: usize,
    eps: String,
    repeats: usize,
    median_ms: f64,
    min_ms: f64,
    max_ms: f64,
    branch: String,
    eps_used: String,
    engine: String,
}

/// What one run reports besides its time.
struct Outcome {
    branch: String,
    eps_used: String,
    engine: String,
}

fn name(c: BenchCommand) -> &'static str {
    match c {
        BenchCommand::MinconvApprox => "minconv-approx",
        BenchCommand::MinconvExact => "minconv-exact",
        BenchCommand::SsumWeak => "ssum-weak",
        BenchCommand::Partition => "partition",
        BenchCommand::TreeSparsity => "tree-sparsity",
        BenchCommand::Threesum => "threesum",
    }
}

fn kind(c: BenchCommand) -> InstanceKind {
    match c {
        BenchCommand::MinconvApprox | BenchCommand::MinconvExact => InstanceKind::Seqpair,
        BenchCommand::SsumWeak => InstanceKind::Ssum,
        BenchCommand::Partition => InstanceKind::Partition,
        BenchCommand::TreeSparsity => InstanceKind::Tree,
        BenchCommand::Threesum => InstanceKind::Ksum,
    }
}

fn run_once(c: BenchCommand, inst: &Instance, eps: Ratio) -> Result<Outcome> {
    let plain = |branch: String, engine: &str| Outcome { branch, eps_used: eps.to_string(), engine: engine.into() };
    Ok(match (c, inst) {
        (BenchCommand::MinconvApprox, Instance::SeqPair { a, b }) => {
            let (_, s) = minplus_approx_with(a, b, eps, Mode::Min, ExactEngine::Auto)?;
            let branch = format!("unary:{}/direct:{}", s.unary_passes, s.direct_passes);
            plain(branch, "auto")
        }
        (BenchCommand::MinconvExact, Instance::SeqPair { a, b }) => {
            minplus_exact(a, b, Mode::Min)?;
            Outcome { branch: "exact".into(), eps_used: "0".into(), engine: "unary".into() }
        }
        (BenchCommand::SsumWeak, Instance::Ssum { values, t }) => {
            let s = weak_subset_sum(values, *t, &WeakConfig::new(eps))?.stats;
            Outcome { branch: branch_summary(&s), eps_used: s.eps_internal.clone(), engine: engine_of(&s) }
        }
        (BenchCommand::Partition, Instance::Partition { values }) => {
            let s = approx_partition(values, &WeakConfig::new(eps))?.stats;
            Outcome { branch: branch_summary(&s), eps_used: s.eps_internal.clone(), engine: engine_of(&s) }
        }
        (BenchCommand::TreeSparsity, Instance::Tree(t)) => {
            let r = sparsity_vectors(t, eps, SparsityMode::Head)?;
            Outcome { branch: format!("depth:{}", r.depth), eps_used: r.delta.to_string(), engine: "head".into() }
        }
        (BenchCommand::Threesum, Instance::KSum(k)) => {
            let branch = match ksum_approx(k, eps)? {
                KSumVerdict::NoneExists => "none-exists",
                KSumVerdict::NearTuple { .. } => "near-tuple",
            };
            plain(branch.into(), "ntt")
        }
        _ => unreachable!("generator produced the wrong instance kind"),
    })
}

fn engine_of(s: &apx_core::weakssum::PipelineStats) -> String {
    s.engine
        .map(|e| serde_json::to_value(e).expect("enum").as_str().unwrap_or("").to_string())
        .unwrap_or_else(|| "none".into())
}

fn cell(a: &BenchArgs, n: usize, eps: Ratio) -> Result<Row> {
    let inst = generate(&GenParams {
        kind: kind(a.command),
        n,
        w: a.w,
        seed: a.seed,
        shape: a.shape.into(),
        k: 3,
    })?;
    let mut times = Vec::with_capacity(a.repeats);
    let mut last = None;
    for _ in 0..a.repeats.max(1) {
        let start = Instant::now();
        last = Some(run_once(a.command, &inst, eps)?);
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    let o = last.expect("at least one repeat");
    Ok(Row {
        command: name(a.command),
        n,
        eps: eps.to_string(),
        repeats: times.len(),
        median_ms: times[times.len() / 2],
        min_ms: times[0],
        max_ms: times[times.len() - 1],
        branch: o.branch,
        eps_used: o.eps_used,
        engine: o.engine,
    })
}

pub fn run(a: &BenchArgs) -> Result<()> {
    let grid: Vec<(usize, Ratio)> = a.n.iter().flat_map(|&n| a.eps.iter().map(move |&e| (n, e))).collect();
    let jobs = a.jobs.clamp(1, grid.len().max(1));
    let mut slots: Vec<Option<Result<Row>>> = (0..grid.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        for (w, chunk) in slots.chunks_mut(grid.len().div_ceil(jobs).max(1)).enumerate() {
            let base = w * grid.len().div_ceil(jobs).max(1);
            let grid = &grid;
            s.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    let (n, eps) = grid[base + i];
                    *slot = Some(cell(a, n, eps));
                }
            });
        }
    });

    let mut out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "# apx {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# os={} arch={} cpus={}", std::env::consts::OS, std::env::consts::ARCH, cpus())?;
    writeln!(out, "# repeats={} seed={} w={} shape={} jobs={jobs}", a.repeats, a.seed, a.w, shape_name(a))?;
    let mut csv = csv::Writer::from_writer(out);
    for slot in slots {
        csv.serialize(slot.expect("every cell ran")?)?;
    }
    csv.flush()?;
    Ok(())
}

fn cpus() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn shape_name(a: &BenchArgs) -> String {
    a.shape.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string())
}
