use serde::{Deserialize, Serialize};

/// Set of integers in `[0, cap]` stored one bit per position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedBitset {
    cap: u64,
    words: Vec<u64>,
}

impl BoundedBitset {
    pub fn new(cap: u64) -> Self {
        let n = (cap / 64 + 1) as usize;
        BoundedBitset {
            cap,
            words: vec![0; n],
        }
    }

    pub fn from_values(cap: u64, values: impl IntoIterator<Item = u64>) -> Self {
        let mut b = Self::new(cap);
        for v in values {
            if v <= cap {
                b.set(v);
            }
        }
        b
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        i <= self.cap && self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: u64) {
        assert!(i <= self.cap, "bit {i} beyond cap {}", self.cap);
        self.words[(i >> 6) as usize] |= 1 << (i & 63);
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(wi as u64 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn max(&self) -> Option<u64> {
        self.prev_at_or_before(self.cap)
    }

    /// Smallest member `≥ i`.
    pub fn next_at_or_after(&self, i: u64) -> Option<u64> {
        if i > self.cap {
            return None;
        }
        let mut wi = (i >> 6) as usize;
        let mut w = self.words[wi] & (!0u64 << (i & 63));
        loop {
            if w != 0 {
                return Some(wi as u64 * 64 + w.trailing_zeros() as u64);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    /// Largest member `≤ i`.
    pub fn prev_at_or_before(&self, i: u64) -> Option<u64> {
        let i = i.min(self.cap);
        let mut wi = (i >> 6) as usize;
        let sh = 63 - (i & 63);
        let mut w = (self.words[wi] << sh) >> sh;
        loop {
            if w != 0 {
                return Some(wi as u64 * 64 + 63 - w.leading_zeros() as u64);
            }
            if wi == 0 {
                return None;
            }
            wi -= 1;
            w = self.words[wi];
        }
    }

    /// Any member in `[lo, hi]`, preferring the largest.
    pub fn max_in(&self, lo: u64, hi: u64) -> Option<u64> {
        if lo > hi || lo > self.cap {
            return None;
        }
        self.prev_at_or_before(hi).filter(|&v| v >= lo)
    }

    fn mask_top(&mut self) {
        let used = self.cap % 64 + 1;
        if used < 64 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << used) - 1;
        }
    }

    /// `self |= (src << shift)`, truncated at `cap`.  For every word that
    /// gains bits, `on_new(word_index, gained_bits)` is called; words are
    /// visited from high to low, so `src` may be a snapshot of `self`.
    pub fn or_shifted_from(
        &mut self,
        src: &[u64],
        shift: u64,
        mut on_new: impl FnMut(usize, u64),
    ) {
        let ws = (shift >> 6) as usize;
        let bs = (shift & 63) as u32;
        let n = self.words.len();
        if ws >= n {
            return;
        }
        let used = self.cap % 64 + 1;
        for i in (ws..n).rev() {
            let j = i - ws;
            let mut w = if j < src.len() { src[j] << bs } else { 0 };
            if bs > 0 && j >= 1 && j - 1 < src.len() {
                w |= src[j - 1] >> (64 - bs);
            }
            if i == n - 1 && used < 64 {
                w &= (1u64 << used) - 1;
            }
            let gained = w & !self.words[i];
            if gained != 0 {
                self.words[i] |= gained;
                on_new(i, gained);
            }
        }
    }

    /// In-place `self |= self << shift`, reporting gained bits.
    pub fn or_self_shifted(&mut self, shift: u64, on_new: impl FnMut(usize, u64)) {
        let ws = (shift >> 6) as usize;
        let bs = (shift & 63) as u32;
        let n = self.words.len();
        if ws >= n {
            return;
        }
        let used = self.cap % 64 + 1;
        let mut on_new = on_new;
        for i in (ws..n).rev() {
            let j = i - ws;
            let mut w = self.words[j] << bs;
            if bs > 0 && j >= 1 {
                w |= self.words[j - 1] >> (64 - bs);
            }
            if i == n - 1 && used < 64 {
                w &= (1u64 << used) - 1;
            }
            let gained = w & !self.words[i];
            if gained != 0 {
                self.words[i] |= gained;
                on_new(i, gained);
            }
        }
    }

    pub fn union_with(&mut self, other: &BoundedBitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        self.mask_top();
    }

    /// Copy restricted to `[0, cap]`.
    pub fn truncated(&self, cap: u64) -> BoundedBitset {
        let mut out = BoundedBitset::new(cap);
        let n = out.words.len().min(self.words.len());
        out.words[..n].copy_from_slice(&self.words[..n]);
        out.mask_top();
        out
    }
}
