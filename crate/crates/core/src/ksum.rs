//! Exact kSUM through iterated indicator convolution, and the scaling loop
//! that turns it into a `(1+ε)`-approximate kSUM.

use serde::{Deserialize, Serialize};

use crate::bitset::BoundedBitset;
use crate::conv::sumset;
use crate::error::{ApxError, Result};
use crate::minconv::eps_clamp;
use crate::numeric::{ceil_log2, check_eps, round_up_scaled, VALUE_CAP};
use crate::ratio::Ratio;

/// Largest target value the exact engine accepts.
pub const MAX_W: u64 = 1 << 32;

/// `k - 1` addend sets and one target set, all deduplicated and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSumInstance {
    pub addends: Vec<Vec<u64>>,
    pub targets: Vec<u64>,
    pub w: u64,
}

impl KSumInstance {
    pub fn new(addends: Vec<Vec<u64>>, targets: Vec<u64>) -> Result<Self> {
        if addends.is_empty() {
            return Err(ApxError::input("kSUM needs k >= 2"));
        }
        let norm = |mut v: Vec<u64>| -> Result<Vec<u64>> {
            if v.iter().any(|&x| x == 0 || x > VALUE_CAP) {
                return Err(ApxError::input("kSUM values must lie in [1, 2^50]"));
            }
            v.sort_unstable();
            v.dedup();
            Ok(v)
        };
        let addends = addends.into_iter().map(norm).collect::<Result<Vec<_>>>()?;
        let targets = norm(targets)?;
        let w = addends.iter().flatten().chain(&targets).copied().max().unwrap_or(1);
        Ok(Self { addends, targets, w })
    }

    pub fn k(&self) -> usize {
        self.addends.len() + 1
    }
}

/// One addend from each set plus the target they approximate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSumTuple {
    pub addends: Vec<u64>,
    pub target: u64,
}

impl KSumTuple {
    pub fn sum(&self) -> u64 {
        self.addends.iter().sum()
    }

    /// `s/(1+ε) ≤ Σa ≤ s(1+ε)` by cross-multiplication.
    pub fn within(&self, eps: Ratio) -> bool {
        let (n, d) = (eps.num() as u128, eps.den() as u128);
        let (a, s) = (self.sum() as u128, self.target as u128);
        a * (d + n) >= s * d && a * d <= s * (d + n)
    }
}

/// Layers `L_0 = {0}`, `L_j = L_{j-1} + A_j` truncated at `cap`.
fn layers(sets: &[Vec<u64>], cap: u64) -> Result<Vec<BoundedBitset>> {
    let mut out = Vec::with_capacity(sets.len() + 1);
    out.push(BoundedBitset::from_values(cap, [0]));
    for set in sets {
        let a = BoundedBitset::from_values(cap, set.iter().copied());
        let next = sumset(out.last().expect("nonempty"), &a, cap)?;
        out.push(next);
    }
    Ok(out)
}

/// Picks `a_j ∈ A_j` with `cur - a_j ∈ L_{j-1}`, from the last set down.
fn back_substitute(sets: &[Vec<u64>], layers: &[BoundedBitset], mut cur: u64) -> Vec<usize> {
    let mut picks = vec![0; sets.len()];
    for j in (0..sets.len()).rev() {
        let i = sets[j]
            .iter()
            .position(|&a| a <= cur && layers[j].get(cur - a))
            .expect("layer membership implies a predecessor");
        picks[j] = i;
        cur -= sets[j][i];
    }
    picks
}

pub fn ksum_exact(inst: &KSumInstance) -> Result<Option<KSumTuple>> {
    let Some(&cap) = inst.targets.last() else {
        return Ok(None);
    };
    if cap > MAX_W {
        return Err(ApxError::resource(format!("W = {cap} exceeds the exact kSUM budget")));
    }
    let ls = layers(&inst.addends, cap)?;
    let top = ls.last().expect("nonempty");
    let Some(&s) = inst.targets.iter().find(|&&s| top.get(s)) else {
        return Ok(None);
    };
    let picks = back_substitute(&inst.addends, &ls, s);
    Ok(Some(KSumTuple {
        addends: picks.iter().zip(&inst.addends).map(|(&i, a)| a[i]).collect(),
        target: s,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum KSumVerdict {
    NoneExists,
    NearTuple { tuple: KSumTuple, q: u64 },
}

/// Scaling loop over `q = 2^l`, descending.  A pass only looks at targets in
/// `[q, 2q)`; addends and targets are rescaled by `⌈k·x/(q·ε_s)⌉` with
/// `ε_s = min(ε, 1/(k-1))`, addends above `⌈4k/ε_s⌉` are dropped, and a
/// target `s'` matches when some scaled sum lies in `[s', s' + k - 2]`.
pub fn ksum_approx(inst: &KSumInstance, eps: Ratio) -> Result<KSumVerdict> {
    check_eps(eps)?;
    let k = inst.k() as u64;
    let eps_s = eps.min(Ratio::new(1, k - 1)?);
    let clamp = eps_clamp(eps_s, 4 * k);
    let top = 2 * ceil_log2(inst.w.max(2));
    for l in (0..=top).rev() {
        let q = 1u64 << l;
        let band: Vec<u64> = inst
            .targets
            .iter()
            .copied()
            .filter(|&s| s >= q && s / 2 < q)
            .collect();
        if band.is_empty() {
            continue;
        }
        let scale = |x: u64| round_up_scaled(x, k, q, eps_s);
        let mut scaled: Vec<Vec<u64>> = Vec::with_capacity(inst.addends.len());
        let mut origin: Vec<Vec<u64>> = Vec::with_capacity(inst.addends.len());
        for set in &inst.addends {
            let mut s = Vec::new();
            let mut o = Vec::new();
            for &a in set {
                let v = scale(a)?;
                if v <= clamp {
                    s.push(v);
                    o.push(a);
                }
            }
            scaled.push(s);
            origin.push(o);
        }
        if scaled.iter().any(Vec::is_empty) {
            continue;
        }
        let sband = band.iter().map(|&s| scale(s)).collect::<Result<Vec<_>>>()?;
        let cap = sband.iter().max().expect("nonempty") + k - 2;
        let ls = layers(&scaled, cap)?;
        let last = ls.last().expect("nonempty");
        for (&s, &sp) in band.iter().zip(&sband) {
            let Some(hit) = last.next_at_or_after(sp).filter(|&h| h <= sp + k - 2) else {
                continue;
            };
            let picks = back_substitute(&scaled, &ls, hit);
            let tuple = KSumTuple {
                addends: picks.iter().zip(&origin).map(|(&i, o)| o[i]).collect(),
                target: s,
            };
            if !tuple.within(eps) {
                return Err(ApxError::contract(format!(
                    "scaled match {tuple:?} falls outside the (1±ε) interval"
                )));
            }
            return Ok(KSumVerdict::NearTuple { tuple, q });
        }
    }
    Ok(KSumVerdict::NoneExists)
}

pub fn threesum_approx(a: Vec<u64>, b: Vec<u64>, c: Vec<u64>, eps: Ratio) -> Result<KSumVerdict> {
    ksum_approx(&KSumInstance::new(vec![a, b], c)?, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(a: &[&[u64]], s: &[u64]) -> KSumInstance {
        KSumInstance::new(a.iter().map(|x| x.to_vec()).collect(), s.to_vec()).unwrap()
    }

    fn brute(inst: &KSumInstance) -> bool {
        let mut sums = vec![0u64];
        for set in &inst.addends {
            sums = sums.iter().flat_map(|s| set.iter().map(move |a| s + a)).collect();
        }
        sums.iter().any(|s| inst.targets.contains(s))
    }

    fn eps(n: u64, d: u64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn exact_examples() {
        let t = ksum_exact(&inst(&[&[1, 2], &[3]], &[4, 5])).unwrap().unwrap();
        assert_eq!(t.sum(), t.target);
        assert_eq!(t, KSumTuple { addends: vec![1, 3], target: 4 });
        assert_eq!(ksum_exact(&inst(&[&[1], &[1]], &[3])).unwrap(), None);
    }

    #[test]
    fn approx_examples() {
        let v = ksum_approx(&inst(&[&[1, 2], &[3]], &[4]), eps(1, 10)).unwrap();
        assert!(matches!(v, KSumVerdict::NearTuple { .. }));
        let v = ksum_approx(&inst(&[&[100], &[100]], &[500]), eps(1, 10)).unwrap();
        assert_eq!(v, KSumVerdict::NoneExists);
        if let KSumVerdict::NearTuple { tuple, .. } =
            ksum_approx(&inst(&[&[100], &[100]], &[201]), eps(1, 100)).unwrap()
        {
            assert!(tuple.within(eps(1, 100)));
        }
        let v = threesum_approx(vec![1], vec![1], vec![2], eps(1, 2)).unwrap();
        let KSumVerdict::NearTuple { tuple, .. } = v else { panic!("missed exact triple") };
        assert_eq!(tuple, KSumTuple { addends: vec![1, 1], target: 2 });
        let v = threesum_approx(vec![1, 2], vec![1, 3], vec![100, 120], eps(1, 10)).unwrap();
        assert_eq!(v, KSumVerdict::NoneExists);
    }

    #[test]
    fn rejects_zero_and_empty() {
        assert!(KSumInstance::new(vec![vec![0]], vec![1]).is_err());
        assert!(KSumInstance::new(vec![], vec![1]).is_err());
    }

    fn small_inst() -> impl Strategy<Value = KSumInstance> {
        (2usize..=4)
            .prop_flat_map(|k| {
                (
                    proptest::collection::vec(proptest::collection::vec(1u64..=60, 1..8), k - 1),
                    proptest::collection::vec(1u64..=200, 1..8),
                )
            })
            .prop_map(|(a, s)| KSumInstance::new(a, s).unwrap())
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(i in small_inst()) {
            let got = ksum_exact(&i).unwrap();
            prop_assert_eq!(got.is_some(), brute(&i));
            if let Some(t) = got {
                prop_assert_eq!(t.sum(), t.target);
                for (a, set) in t.addends.iter().zip(&i.addends) {
                    prop_assert!(set.contains(a));
                }
            }
        }

        #[test]
        fn approx_sound_and_valid(i in small_inst(), e in 1u64..99) {
            let eps = Ratio::new(e, 100).unwrap();
            match ksum_approx(&i, eps).unwrap() {
                KSumVerdict::NoneExists => prop_assert!(!brute(&i)),
                KSumVerdict::NearTuple { tuple, .. } => {
                    prop_assert!(tuple.within(eps));
                    prop_assert!(i.targets.contains(&tuple.target));
                    for (a, set) in tuple.addends.iter().zip(&i.addends) {
                        prop_assert!(set.contains(a));
                    }
                }
            }
        }
    }
}
