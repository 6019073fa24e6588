//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p apx-core --test acceptance`; pass criterion
//! numbers (e.g. `-- 4 5`) to select a subset.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::panic;
use std::time::Instant;

use apx_core::brute::{ksum_brute, minplus_brute, partition_opt, subset_sum_opt, tree_head_dp, tree_tail_dp};
use apx_core::format::{Instance, InstanceKind};
use apx_core::gen::{generate, GenParams, Shape};
use apx_core::ksum::{ksum_approx, ksum_exact, KSumInstance, KSumVerdict};
use apx_core::minconv::{minplus_approx, minplus_direct, minplus_exact, unary_encode, Entry, Mode};
use apx_core::numeric::{round_down_scaled, round_up_scaled};
use apx_core::sumset::{sumset_dp, sumset_randomized};
use apx_core::treesparsity::{sparsity_vectors, SparsityMode, WeightedTree};
use apx_core::weakssum::{approx_partition, weak_subset_sum, weak_subset_sum_inspect, OracleView, WeakConfig};
use apx_core::Ratio;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Counts checks and keeps the first few violations.
#[derive(Default)]
struct Tally {
    checks: u64,
    violations: u64,
    first: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first.len() < 3 {
                self.first.push(msg());
            }
        }
    }

    fn outcome(self, what: &str) -> Outcome {
        Outcome {
            pass: self.violations == 0,
            detail: if self.violations == 0 {
                format!("{} checks, 0 violations ({what})", self.checks)
            } else {
                format!("{} of {} checks violated; first: {}", self.violations, self.checks, self.first.join(" | "))
            },
        }
    }
}

fn eps(n: u64, d: u64) -> Ratio {
    Ratio::new(n, d).unwrap()
}

/// `v·den ≥ opt·(den - num)`
fn at_least_one_minus(v: u64, opt: u64, e: Ratio) -> bool {
    v as u128 * e.den() as u128 >= opt as u128 * (e.den() - e.num()) as u128
}

/// `v·den ≤ opt·(den + num)`
fn at_most_one_plus(v: u64, opt: u64, e: Ratio) -> bool {
    v as u128 * e.den() as u128 <= opt as u128 * (e.den() + e.num()) as u128
}

fn ssum_family(rng: &mut ChaCha8Rng) -> Vec<u64> {
    let n = rng.random_range(1..=18);
    let w = 10u64.pow(rng.random_range(0..=6u32)).clamp(2, 1_000_000);
    (0..n).map(|_| rng.random_range(1..=w)).collect()
}

fn weak_contract() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for e in [eps(1, 2), eps(1, 4), eps(1, 10)] {
        let cfg = WeakConfig::new(e);
        for _ in 0..1000 {
            let values = ssum_family(&mut rng);
            let total: u64 = values.iter().sum();
            let t = rng.random_range(1..=total);
            let (opt, _) = subset_sum_opt(&values, t).unwrap();
            match weak_subset_sum(&values, t, &cfg) {
                Ok(sol) => {
                    let v = sol.value;
                    let resum: u64 = sol.witness.iter().map(|&i| values[i]).sum();
                    let distinct = sol.witness.windows(2).all(|w| w[0] < w[1]);
                    let upper = (v as u128) * (e.den() as u128) < (t as u128) * (e.den() + e.num()) as u128;
                    tally.check(at_least_one_minus(v, opt, e) && upper && resum == v && distinct, || {
                        format!("eps={e} t={t} values={values:?}: V={v} OPT={opt} resum={resum}")
                    });
                }
                Err(err) => tally.check(false, || format!("eps={e} t={t} values={values:?}: {err}")),
            }
        }
    }
    tally.outcome("3000 instances, n <= 18, W <= 10^6")
}

fn partition_contract() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for e in [eps(1, 2), eps(1, 4), eps(1, 10)] {
        let cfg = WeakConfig::new(e);
        for _ in 0..1000 {
            let values = ssum_family(&mut rng);
            let half = values.iter().sum::<u64>() / 2;
            let (opt, _) = partition_opt(&values).unwrap();
            match approx_partition(&values, &cfg) {
                Ok(sol) => {
                    let resum: u64 = sol.side.iter().map(|&i| values[i]).sum();
                    tally.check(sol.value <= half && at_least_one_minus(sol.value, opt, e) && resum == sol.value, || {
                        format!("eps={e} values={values:?}: V={} OPT={opt}", sol.value)
                    });
                }
                Err(err) => tally.check(false, || format!("values={values:?}: {err}")),
            }
        }
    }
    let cfg = WeakConfig::new(eps(1, 100));
    for seed in 0..200 {
        let n = 2 + seed as usize % 17;
        let p = GenParams { kind: InstanceKind::Partition, n, w: 1_000_000, seed, shape: Shape::Planted, k: 3 };
        let Instance::Partition { values } = generate(&p).unwrap() else { unreachable!() };
        let total: u64 = values.iter().sum();
        match approx_partition(&values, &cfg) {
            // V ≥ 0.99·Σ/2
            Ok(sol) => tally.check(200 * sol.value as u128 >= 99 * total as u128 && total % 2 == 0, || {
                format!("planted seed={seed}: V={} total={total}", sol.value)
            }),
            Err(err) => tally.check(false, || format!("planted seed={seed}: {err}")),
        }
    }
    tally.outcome("3000 random + 200 planted at eps = 0.01")
}

fn check_view(view: &OracleView<'_>, tally: &mut Tally, label: &str) {
    let o = view.oracle;
    let params = o.params();
    let t = params.t;
    let et = params.eps_t();
    let r = o.radius();
    let two_r = r.mul_int(2).unwrap().floor();
    let items: Vec<u64> = view.ids.iter().map(|&i| view.item_values[i as usize]).collect();
    let capped: BTreeSet<u64> = sumset_dp(&items, t).unwrap().sums.iter().collect();
    let uncapped: BTreeSet<u64> = sumset_dp(&items, t + two_r + 1).unwrap().sums.iter().collect();
    let allowed: BTreeSet<u32> = view.ids.iter().copied().collect();
    let step = et.div_int(4).unwrap();
    let count = Ratio::new(step.den(), step.num()).unwrap().floor_mul(t) as u64;
    let r_int = r.floor();
    for i in 0..=count {
        let q = step.floor_mul(i) as u64;
        let near = |set: &BTreeSet<u64>, rad: u64| set.range(q.saturating_sub(rad)..=q + rad).next().is_some();
        let ans = o.query(q).unwrap();
        tally.check(!near(&capped, r_int) || ans.is_some(), || {
            format!("{label} {}: completeness fails at q={q}", view.stage)
        });
        if let Some(a) = ans {
            let wit = o.witness(a.key);
            let resum: u64 = wit.iter().map(|&i| view.item_values[i as usize]).sum();
            let ok = near(&uncapped, two_r)
                && resum == a.value
                && a.value.abs_diff(q) <= two_r
                && wit.iter().all(|i| allowed.contains(i));
            tally.check(ok, || format!("{label} {}: soundness/witness fails at q={q}", view.stage));
        }
    }
}

fn oracle_contract() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut stages = BTreeSet::new();
    let mut run = |values: &[u64], t: u64, e: Ratio, label: String, tally: &mut Tally| {
        let cfg = WeakConfig::new(e);
        let mut seen = Vec::new();
        let res = weak_subset_sum_inspect(values, t, &cfg, &mut |view| {
            seen.push(view.stage);
            check_view(&view, tally, &label);
        });
        stages.extend(seen);
        if let Err(err) = res {
            tally.check(false, || format!("{label}: {err}"));
        }
    };
    for i in 0..60 {
        let n = rng.random_range(2..=40);
        let w = rng.random_range(2..=5000u64);
        let values: Vec<u64> = (0..n).map(|_| rng.random_range(1..=w)).collect();
        let total: u64 = values.iter().sum();
        let t = rng.random_range(total / 4 + 1..=total);
        let e = [eps(1, 2), eps(1, 4), eps(1, 10)][i % 3];
        run(&values, t, e, format!("uniform#{i}"), &mut tally);
    }
    for seed in 0..12 {
        let p = GenParams { kind: InstanceKind::Ssum, n: 200 + 40 * seed as usize, w: 1000, seed, shape: Shape::Dense, k: 3 };
        let Instance::Ssum { values, t } = generate(&p).unwrap() else { unreachable!() };
        let e = [eps(1, 2), eps(1, 5)][seed as usize % 2];
        run(&values, t, e, format!("dense#{seed}"), &mut tally);
    }
    let stages: Vec<&str> = stages.into_iter().collect();
    tally.outcome(&format!("oracle stages checked: {}", stages.join(", ")))
}

fn random_seq(rng: &mut ChaCha8Rng, n: usize, w: u64, inf_rate: f64) -> Vec<Entry> {
    (0..n)
        .map(|_| (!rng.random_bool(inf_rate)).then(|| rng.random_range(0..=w)))
        .collect()
}

fn exact_minconv() -> Outcome {
    let mut tally = Tally::default();
    let enc = unary_encode(&[Some(2), Some(3), Some(1)], 3).unwrap();
    let bits: String = (0..18).map(|i| if enc.get(i) { '1' } else { '0' }).collect();
    tally.check(bits == "010000001000100000", || format!("unary encoding gave {bits}"));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..1000 {
        let (na, nb) = (rng.random_range(1..=256), rng.random_range(1..=256));
        let w = rng.random_range(0..=64);
        let a = random_seq(&mut rng, na, w, 0.05);
        let b = random_seq(&mut rng, nb, w, 0.05);
        let mode = if i % 2 == 0 { Mode::Min } else { Mode::Max };
        let want = minplus_brute(&a, &b, mode).unwrap();
        let unary = minplus_exact(&a, &b, mode).unwrap();
        let direct = minplus_direct(&a, &b, mode).unwrap();
        tally.check(unary == want && direct == want, || format!("instance {i} ({mode:?}) differs from brute force"));
    }
    tally.outcome("1000 instances, n <= 256, W <= 64, plus unary encoding of (2,3,1)")
}

fn sandwich(got: &[Entry], want: &[Entry], e: Ratio, mode: Mode) -> bool {
    got.len() == want.len()
        && got.iter().zip(want).all(|(g, w)| match (g, w) {
            (None, None) => true,
            (Some(g), Some(w)) => match mode {
                Mode::Min => g >= w && at_most_one_plus(*g, *w, e),
                Mode::Max => g <= w && at_least_one_minus(*g, *w, e),
            },
            _ => false,
        })
}

fn approx_minconv() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..1000 {
        let e = if i % 2 == 0 { eps(1, 10) } else { eps(1, 100) };
        let mode = if i % 4 < 2 { Mode::Min } else { Mode::Max };
        let n = rng.random_range(1..=512);
        let w = 10u64.pow(rng.random_range(0..=9u32));
        let a = random_seq(&mut rng, n, w, 0.02);
        let b = random_seq(&mut rng, n, w, 0.02);
        let want = minplus_brute(&a, &b, mode).unwrap();
        let got = minplus_approx(&a, &b, e, mode).unwrap();
        tally.check(sandwich(&got, &want, e, mode), || format!("instance {i} eps={e} {mode:?} n={n} W={w}"));
    }
    let a = random_seq(&mut rng, 1 << 16, 1_000_000_000, 0.0);
    let b = random_seq(&mut rng, 1 << 16, 1_000_000_000, 0.0);
    let t0 = Instant::now();
    let got = minplus_approx(&a, &b, eps(1, 100), Mode::Min).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    tally.check(secs < 10.0 && got.len() == (1 << 17) - 1, || format!("n = 2^16 smoke took {secs:.2}s"));
    tally.outcome(&format!("1000 instances n <= 512, W <= 10^9; n = 2^16 smoke at eps = 0.01 in {secs:.2}s"))
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> WeightedTree {
    let seed = rng.random_range(0..u64::MAX);
    let w = 10u64.pow(rng.random_range(0..=6u32));
    let shape = [Shape::Uniform, Shape::Uniform, Shape::Dense, Shape::Sparse][rng.random_range(0..4)];
    let p = GenParams { kind: InstanceKind::Tree, n, w, seed, shape, k: 3 };
    let Instance::Tree(t) = generate(&p).unwrap() else { unreachable!() };
    t
}

fn tree_sparsity() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let n = rng.random_range(1..=200);
        let tree = random_tree(&mut rng, n);
        let e = [eps(1, 2), eps(1, 10), eps(1, 100)][i % 3];
        let head = tree_head_dp(&tree).unwrap();
        let tail = tree_tail_dp(&tree).unwrap();
        for mode in [SparsityMode::Head, SparsityMode::Tail] {
            let rec = sparsity_vectors(&tree, e, mode).unwrap();
            let v = rec.vector();
            tally.check(v.len() == n + 1, || format!("tree {i}: vector length {}", v.len()));
            for k in 0..=n.min(v.len() - 1) {
                let ok = match mode {
                    SparsityMode::Head => v[k] <= head[k] && at_least_one_minus(v[k], head[k], e),
                    SparsityMode::Tail => v[k] >= tail[k] && at_most_one_plus(v[k], tail[k], e),
                };
                tally.check(ok, || format!("tree {i} {mode:?} k={k}: got {} exact {}", v[k], head[k]));
                let nodes = rec.retrieve(k).unwrap();
                let kept: u64 = nodes.iter().map(|&x| tree.weight(x)).sum();
                let reported = match mode {
                    SparsityMode::Head => v[k],
                    SparsityMode::Tail => tree.total() - v[k],
                };
                tally.check(nodes.len() == k && tree.is_rooted_subtree(&nodes) && kept == reported, || {
                    format!("tree {i} {mode:?} k={k}: retrieved subtree invalid")
                });
            }
        }
    }
    tally.outcome("200 trees n <= 200, every k, head and tail")
}

fn ksum_checks() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let e_grid = [eps(1, 2), eps(1, 10), eps(1, 100)];
    for i in 0..1000 {
        let k = rng.random_range(2..=4);
        let addends: Vec<Vec<u64>> = (1..k)
            .map(|_| (0..rng.random_range(1..=12)).map(|_| rng.random_range(1..=200)).collect())
            .collect();
        let targets: Vec<u64> = (0..rng.random_range(1..=12)).map(|_| rng.random_range(1..=200)).collect();
        let inst = KSumInstance::new(addends, targets).unwrap();
        let truth = ksum_brute(&inst).unwrap().is_some();
        let got = ksum_exact(&inst).unwrap();
        let valid = got.as_ref().is_none_or(|t| t.sum() == t.target && inst.targets.contains(&t.target));
        tally.check(got.is_some() == truth && valid, || format!("exact instance {i} disagrees with enumeration"));
        let e = e_grid[i % 3];
        match ksum_approx(&inst, e).unwrap() {
            KSumVerdict::NoneExists => tally.check(!truth, || format!("approx instance {i}: none-exists with exact tuple")),
            KSumVerdict::NearTuple { tuple, .. } => tally.check(tuple.within(e), || format!("approx instance {i}: {tuple:?}")),
        }
    }
    for seed in 0..300 {
        let k = 2 + seed as usize % 3;
        let w = 10u64.pow(1 + (seed % 6) as u32);
        let p = GenParams { kind: InstanceKind::Ksum, n: 12, w, seed, shape: Shape::Planted, k };
        let Instance::KSum(inst) = generate(&p).unwrap() else { unreachable!() };
        let e = e_grid[seed as usize % 3];
        match ksum_approx(&inst, e).unwrap() {
            KSumVerdict::NoneExists => tally.check(false, || format!("planted seed {seed}: none-exists")),
            KSumVerdict::NearTuple { tuple, .. } => tally.check(tuple.within(e), || format!("planted seed {seed}: {tuple:?}")),
        }
    }
    tally.outcome("1000 random k <= 4, n <= 12 and 300 planted instances")
}

fn randomized_sumset() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let delta = eps(1, 100);
    for i in 0..50 {
        let n = rng.random_range(1..=25);
        let w = rng.random_range(1..=400u64);
        let values: Vec<u64> = (0..n).map(|_| rng.random_range(1..=w)).collect();
        let t = rng.random_range(1..=values.iter().sum::<u64>());
        let exact = sumset_dp(&values, t).unwrap().sums;
        let mut union = BTreeSet::new();
        for run in 0..100 {
            let got = sumset_randomized(&values, t, rng.random_range(0..u64::MAX), delta).unwrap();
            let false_pos = got.sums.iter().filter(|&s| !exact.get(s)).count();
            tally.check(false_pos == 0, || format!("instance {i} run {run}: {false_pos} false positives"));
            union.extend(got.sums.iter());
        }
        let want: BTreeSet<u64> = exact.iter().collect();
        tally.check(union == want, || format!("instance {i}: union misses {} sums", want.len() - union.len()));
    }
    tally.outcome("50 instances x 100 runs at delta = 0.01")
}

fn rounding_bound() -> Outcome {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 10_000 {
        let k = rng.random_range(1..=6u64);
        let bits = rng.random_range(0..40);
        let xs: Vec<u64> = (0..k).map(|_| rng.random_range(0..=1u64 << bits)).collect();
        let total: u64 = xs.iter().sum();
        if total == 0 {
            continue;
        }
        let q = rng.random_range(1..=total);
        let e = eps(rng.random_range(1..1000), 1000);
        let up: u128 = xs.iter().map(|&x| round_up_scaled(x, k, q, e).unwrap() as u128).sum();
        let down: u128 = xs.iter().map(|&x| round_down_scaled(x, k, q, e).unwrap() as u128).sum();
        // (qε/k)·v compared with c: scale both sides by k·den
        let unscale = |v: u128| v * q as u128 * e.num() as u128;
        let c = total as u128 * k as u128 * e.den() as u128;
        let (n, d) = (e.num() as u128, e.den() as u128);
        let ceil_ok = unscale(up) >= c && unscale(up) * d < c * (d + n);
        let floor_ok = unscale(down) * d > c * (d - n) && unscale(down) <= c;
        tally.check(ceil_ok && floor_ok, || format!("xs={xs:?} q={q} eps={e}"));
        done += 1;
    }
    tally.outcome("10^4 tuples with q <= sum")
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Least-squares slope of `ln y` against `ln x`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

fn scaling_trend() -> Outcome {
    let grid = [eps(1, 10), eps(1, 20), eps(1, 40), eps(1, 80)];
    let inv: Vec<f64> = grid.iter().map(|e| 1.0 / e.to_f64()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let n = 1 << 12;
    let a = random_seq(&mut rng, n, 1_000_000_000, 0.0);
    let b = random_seq(&mut rng, n, 1_000_000_000, 0.0);
    let p = GenParams { kind: InstanceKind::Ssum, n: 2000, w: 1000, seed: 10, shape: Shape::Dense, k: 3 };
    let Instance::Ssum { values, t } = generate(&p).unwrap() else { unreachable!() };
    let mut rows = Vec::new();
    let mut conv_t = Vec::new();
    let mut weak_t = Vec::new();
    for e in grid {
        let runs: Vec<f64> = (0..5)
            .map(|_| {
                let t0 = Instant::now();
                minplus_approx(&a, &b, e, Mode::Min).unwrap();
                t0.elapsed().as_secs_f64()
            })
            .collect();
        let m = median(runs);
        rows.push(format!("minconv_approx,{n},{e},{m:.6}"));
        conv_t.push(m);
        let cfg = WeakConfig::new(e);
        let mut branch = String::new();
        let runs: Vec<f64> = (0..5)
            .map(|_| {
                let t0 = Instant::now();
                let sol = weak_subset_sum(&values, t, &cfg).unwrap();
                branch = sol.stats.halves.iter().map(|h| format!("{:?}", h.branch)).collect::<Vec<_>>().join("+");
                t0.elapsed().as_secs_f64()
            })
            .collect();
        let m = median(runs);
        rows.push(format!("weak_subset_sum[{branch}],{},{e},{m:.6}", values.len()));
        weak_t.push(m);
    }
    let (sc, sw) = (slope(&inv, &conv_t), slope(&inv, &weak_t));
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("scaling_trend.csv");
    if let Ok(mut f) = std::fs::File::create(&path) {
        let _ = writeln!(f, "command,n,eps,median_s");
        for r in &rows {
            let _ = writeln!(f, "{r}");
        }
        let _ = writeln!(f, "# slope minconv_approx {sc:.3} (gate 1.3), weak_subset_sum {sw:.3} (gate 1.9)");
    }
    let warn = sc > 1.3 || sw > 1.9;
    if warn {
        println!("warning: scaling trend above gate, see {}", path.display());
    }
    Outcome {
        // informational gate: a slow trend warns but does not fail
        pass: true,
        detail: format!(
            "{}slopes minconv {sc:.2} (<= 1.3), weak ssum {sw:.2} (<= 1.9); csv {}",
            if warn { "WARN " } else { "" },
            path.display()
        ),
    }
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "weak subset sum contract", weak_contract),
        (2, "partition contract", partition_contract),
        (3, "membership oracle soundness and completeness", oracle_contract),
        (4, "exact min-plus convolution", exact_minconv),
        (5, "approximate min/max-plus convolution", approx_minconv),
        (6, "tree sparsity", tree_sparsity),
        (7, "kSUM and 3SUM", ksum_checks),
        (8, "randomized sumset engine", randomized_sumset),
        (9, "rounding bound", rounding_bound),
        (10, "scaling trend", scaling_trend),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (n, name, f) in criteria {
        let selected = filters.is_empty()
            || filters.iter().any(|flt| flt == &n.to_string() || name.contains(flt.as_str()));
        if !selected {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let out = panic::catch_unwind(f).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("panicked: {}", panic_message(e)),
        });
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("[criterion {n}] {verdict} {name}: {} [{:.1}s]", out.detail, t0.elapsed().as_secs_f64());
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
