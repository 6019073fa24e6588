//! Whitespace-separated instance files.
//!
//! ```text
//! ssum, partition   n t, then n values (partition ignores t)
//! seqpair           n, then n values, then n values ("inf" = INFINITY)
//! tree              n, a parent line (root = -1), a weight line
//! ksum              k, then k-1 blocks of m + m values, then m_S + S values
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ApxError, Result};
use crate::ksum::KSumInstance;
use crate::minconv::Entry;
use crate::numeric::VALUE_CAP;
use crate::treesparsity::WeightedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Ssum,
    Partition,
    Seqpair,
    Tree,
    Ksum,
}

impl FromStr for InstanceKind {
    type Err = ApxError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ssum" => Self::Ssum,
            "partition" => Self::Partition,
            "seqpair" => Self::Seqpair,
            "tree" => Self::Tree,
            "ksum" => Self::Ksum,
            _ => return Err(ApxError::input(format!("unknown instance kind {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Ssum { values: Vec<u64>, t: u64 },
    Partition { values: Vec<u64> },
    SeqPair { a: Vec<Entry>, b: Vec<Entry> },
    Tree(WeightedTree),
    KSum(KSumInstance),
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Ssum { .. } => InstanceKind::Ssum,
            Instance::Partition { .. } => InstanceKind::Partition,
            Instance::SeqPair { .. } => InstanceKind::Seqpair,
            Instance::Tree(_) => InstanceKind::Tree,
            Instance::KSum(_) => InstanceKind::Ksum,
        }
    }
}

struct Tokens<'a> {
    toks: Vec<(&'a str, usize)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut toks = Vec::new();
        let mut last_line = 1;
        for (i, line) in text.lines().enumerate() {
            last_line = i + 1;
            toks.extend(line.split_whitespace().map(|t| (t, i + 1)));
        }
        Self { toks, pos: 0, last_line }
    }

    fn next(&mut self, what: &str) -> Result<(&'a str, usize)> {
        let tok = self.toks.get(self.pos).copied().ok_or_else(|| ApxError::Parse {
            line: self.last_line,
            msg: format!("unexpected end of input, expected {what}"),
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn int<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let (tok, line) = self.next(what)?;
        tok.parse().map_err(|_| ApxError::Parse {
            line,
            msg: format!("expected {what}, found {tok:?}"),
        })
    }

    fn value(&mut self, what: &str) -> Result<u64> {
        let (tok, line) = self.next(what)?;
        let v: u64 = tok.parse().map_err(|_| ApxError::Parse {
            line,
            msg: format!("expected {what}, found {tok:?}"),
        })?;
        if v > VALUE_CAP {
            return Err(ApxError::Parse { line, msg: format!("{what} {v} exceeds 2^50") });
        }
        Ok(v)
    }

    fn entry(&mut self) -> Result<Entry> {
        let (tok, line) = self.next("sequence entry")?;
        if tok.eq_ignore_ascii_case("inf") {
            return Ok(None);
        }
        match tok.parse::<u64>() {
            Ok(v) if v <= VALUE_CAP => Ok(Some(v)),
            _ => Err(ApxError::Parse { line, msg: format!("bad sequence entry {tok:?}") }),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.toks.get(self.pos) {
            Some((tok, line)) => Err(ApxError::Parse {
                line: *line,
                msg: format!("trailing token {tok:?}"),
            }),
            None => Ok(()),
        }
    }
}

pub fn parse_instance(text: &str, kind: InstanceKind) -> Result<Instance> {
    let mut tk = Tokens::new(text);
    let inst = match kind {
        InstanceKind::Ssum | InstanceKind::Partition => {
            let n: usize = tk.int("item count n")?;
            let t = tk.value("target t")?;
            let values = (0..n).map(|_| tk.value("item value")).collect::<Result<Vec<_>>>()?;
            if kind == InstanceKind::Ssum {
                Instance::Ssum { values, t }
            } else {
                Instance::Partition { values }
            }
        }
        InstanceKind::Seqpair => {
            let n: usize = tk.int("sequence length n")?;
            if n == 0 {
                return Err(ApxError::Parse { line: 1, msg: "sequence length must be positive".into() });
            }
            let a = (0..n).map(|_| tk.entry()).collect::<Result<Vec<_>>>()?;
            let b = (0..n).map(|_| tk.entry()).collect::<Result<Vec<_>>>()?;
            Instance::SeqPair { a, b }
        }
        InstanceKind::Tree => {
            let n: usize = tk.int("node count n")?;
            let parent = (0..n).map(|_| tk.int::<i64>("parent index")).collect::<Result<Vec<_>>>()?;
            let weight = (0..n).map(|_| tk.value("node weight")).collect::<Result<Vec<_>>>()?;
            Instance::Tree(WeightedTree::new(&parent, weight)?)
        }
        InstanceKind::Ksum => {
            let k: usize = tk.int("k")?;
            if k < 2 {
                return Err(ApxError::Parse { line: 1, msg: "k must be at least 2".into() });
            }
            let mut block = |what: &str| -> Result<Vec<u64>> {
                let m: usize = tk.int("set size m")?;
                (0..m).map(|_| tk.value(what)).collect()
            };
            let addends = (1..k).map(|_| block("addend")).collect::<Result<Vec<_>>>()?;
            let targets = block("target")?;
            Instance::KSum(KSumInstance::new(addends, targets)?)
        }
    };
    tk.finish()?;
    Ok(inst)
}

fn join(v: impl IntoIterator<Item = String>) -> String {
    v.into_iter().collect::<Vec<_>>().join(" ")
}

pub fn write_instance(inst: &Instance) -> String {
    let mut s = String::new();
    let nums = |v: &[u64]| join(v.iter().map(u64::to_string));
    match inst {
        Instance::Ssum { values, t } => {
            let _ = writeln!(s, "{} {t}", values.len());
            for v in values {
                let _ = writeln!(s, "{v}");
            }
        }
        Instance::Partition { values } => {
            let _ = writeln!(s, "{} {}", values.len(), values.iter().sum::<u64>() / 2);
            for v in values {
                let _ = writeln!(s, "{v}");
            }
        }
        Instance::SeqPair { a, b } => {
            let ent = |v: &[Entry]| join(v.iter().map(|x| x.map_or("inf".to_string(), |v| v.to_string())));
            let _ = writeln!(s, "{}\n{}\n{}", a.len(), ent(a), ent(b));
        }
        Instance::Tree(t) => {
            let _ = writeln!(
                s,
                "{}\n{}\n{}",
                t.n(),
                join(t.parent_array().iter().map(i64::to_string)),
                nums(t.weights())
            );
        }
        Instance::KSum(k) => {
            let _ = writeln!(s, "{}", k.k());
            for set in k.addends.iter().chain([&k.targets]) {
                let _ = writeln!(s, "{}\n{}", set.len(), nums(set));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(
            parse_instance("3 10\n3\n5\n8", InstanceKind::Ssum).unwrap(),
            Instance::Ssum { values: vec![3, 5, 8], t: 10 }
        );
        let Instance::Tree(t) = parse_instance("3\n-1 0 0\n5 3 4", InstanceKind::Tree).unwrap() else {
            panic!("kind")
        };
        assert_eq!(t.root(), 0);
        assert_eq!(t.children(0), &[1, 2]);
        assert_eq!((t.weight(0), t.weight(1), t.weight(2)), (5, 3, 4));
        match parse_instance("3 10\n3\n5", InstanceKind::Ssum) {
            Err(ApxError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_lines() {
        match parse_instance("2 10\n3\nx", InstanceKind::Ssum) {
            Err(ApxError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_instance("1 10\n3\n4", InstanceKind::Ssum) {
            Err(ApxError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_instance("1 1\n2000000000000000", InstanceKind::Ssum).is_err());
    }

    #[test]
    fn round_trips() {
        let cases = [
            Instance::Ssum { values: vec![3, 5, 8], t: 10 },
            Instance::Partition { values: vec![3, 1, 1, 2] },
            Instance::SeqPair { a: vec![Some(2), None], b: vec![Some(0), Some(7)] },
            Instance::Tree(WeightedTree::new(&[-1, 0, 0, 2], vec![5, 3, 4, 0]).unwrap()),
            Instance::KSum(KSumInstance::new(vec![vec![1, 2], vec![3]], vec![4, 5]).unwrap()),
        ];
        for c in cases {
            assert_eq!(parse_instance(&write_instance(&c), c.kind()).unwrap(), c);
        }
    }
}
