//! Exact non-negative rationals with 64-bit numerator and denominator.
//!
//! All accuracy parameters are carried as [`Ratio`] so that rounding
//! decisions never depend on floating point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ApxError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(ApxError::input("zero denominator"));
        }
        Ok(Self::reduced(num as u128, den as u128).expect("reduced fraction fits"))
    }

    pub fn from_int(x: u64) -> Self {
        Ratio { num: x, den: 1 }
    }

    fn reduced(num: u128, den: u128) -> Option<Self> {
        let g = gcd(num, den).max(1);
        let (n, d) = (num / g, den / g);
        if n > u64::MAX as u128 || d > u64::MAX as u128 {
            return None;
        }
        Some(Ratio {
            num: n as u64,
            den: d as u64,
        })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Largest rational with denominator `2^bits` not exceeding `x`.
    pub fn from_f64_floor(x: f64, bits: u32) -> Self {
        let den = 1u64 << bits;
        let num = (x.max(0.0) * den as f64).floor() as u64;
        Self::reduced(num as u128, den as u128).expect("fits")
    }

    /// Checked product, failing when the reduced result does not fit.
    pub fn checked_mul(self, other: Ratio) -> Option<Ratio> {
        Self::reduced(
            self.num as u128 * other.num as u128,
            self.den as u128 * other.den as u128,
        )
    }

    pub fn checked_add(self, other: Ratio) -> Option<Ratio> {
        Self::reduced(
            self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128,
            self.den as u128 * other.den as u128,
        )
    }

    pub fn checked_sub(self, other: Ratio) -> Option<Ratio> {
        let a = self.num as u128 * other.den as u128;
        let b = other.num as u128 * self.den as u128;
        Self::reduced(a.checked_sub(b)?, self.den as u128 * other.den as u128)
    }

    pub fn mul_int(self, k: u64) -> Option<Ratio> {
        self.checked_mul(Ratio::from_int(k))
    }

    pub fn div_int(self, k: u64) -> Option<Ratio> {
        if k == 0 {
            return None;
        }
        Self::reduced(self.num as u128, self.den as u128 * k as u128)
    }

    /// `⌊x · self⌋`
    pub fn floor_mul(self, x: u64) -> u128 {
        x as u128 * self.num as u128 / self.den as u128
    }

    /// `⌈x · self⌉`
    pub fn ceil_mul(self, x: u64) -> u128 {
        (x as u128 * self.num as u128).div_ceil(self.den as u128)
    }

    pub fn floor(self) -> u64 {
        self.num / self.den
    }

    pub fn ceil(self) -> u64 {
        self.num.div_ceil(self.den)
    }

    /// Compares `x` against `self` without rounding.
    pub fn cmp_int(self, x: u64) -> Ordering {
        (self.num as u128).cmp(&(x as u128 * self.den as u128))
    }

    pub fn min(self, other: Ratio) -> Ratio {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = ApxError;

    /// Accepts `a/b`, integers, and finite decimals such as `0.025`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || ApxError::input(format!("not a rational number: {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            return Ratio::new(a, b);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = (int as u128) * den as u128 + frac as u128;
        Self::reduced(num, den as u128).ok_or_else(bad)
    }
}
