//! Bit-parallel LCS-length kernel.
//!
//! For a fixed pattern of length `m`, the column of the LCS table is held
//! as `m` bits spread over `ceil(m/64)` words, and each text symbol is
//! absorbed with a masked add/subtract pair. Text symbols absent from the
//! pattern leave the state unchanged and are skipped outright.

use std::collections::HashMap;

use super::SymbolString;

/// Preprocessed match masks for one pattern string. Build once, then run
/// [`LcsPattern::lcs_with`] against many texts.
#[derive(Clone, Debug)]
pub struct LcsPattern {
    /// Match mask per symbol that occurs in the pattern; bit `i` of mask
    /// word `i/64` is set iff `pattern[i] == sym`.
    masks: HashMap<u32, Vec<u64>>,
    m: usize,
    nwords: usize,
}

impl LcsPattern {
    pub fn new(pattern: &SymbolString) -> Self {
        Self::from_syms(pattern.syms())
    }

    pub(crate) fn from_syms(pattern: &[u32]) -> Self {
        let m = pattern.len();
        let nwords = m.div_ceil(64);
        let mut masks: HashMap<u32, Vec<u64>> = HashMap::new();
        for (i, &sym) in pattern.iter().enumerate() {
            masks
                .entry(sym)
                .or_insert_with(|| vec![0u64; nwords])
                [i / 64] |= 1u64 << (i % 64);
        }
        Self { masks, m, nwords }
    }

    pub fn pattern_len(&self) -> usize {
        self.m
    }

    /// LCS length between the pattern and `text`. Symbols of `text` may
    /// exceed the pattern's alphabet; they simply never match.
    pub fn lcs_with(&self, text: &[u32]) -> usize {
        if self.m == 0 || text.is_empty() {
            return 0;
        }
        if self.nwords == 1 {
            return self.lcs_one_word(text);
        }
        let mut v = vec![u64::MAX; self.nwords];
        for &c in text {
            let Some(mask) = self.masks.get(&c) else {
                continue;
            };
            let mut carry = 0u64;
            for w in 0..self.nwords {
                let u = v[w] & mask[w];
                let sum = v[w] as u128 + u as u128 + carry as u128;
                // u is a bitwise subset of v[w], so v - u never borrows.
                v[w] = (sum as u64) | (v[w] - u);
                carry = (sum >> 64) as u64;
            }
        }
        count_zeros_low(&v, self.m)
    }

    /// Same recurrence with scalar state; avoids the Vec churn on short
    /// patterns, which dominate the inner-decode hot path.
    fn lcs_one_word(&self, text: &[u32]) -> usize {
        let mut v = u64::MAX;
        for &c in text {
            let Some(mask) = self.masks.get(&c) else {
                continue;
            };
            let u = v & mask[0];
            v = v.wrapping_add(u) | (v - u);
        }
        (!v & low_bits(self.m)).count_ones() as usize
    }
}

fn low_bits(n: usize) -> u64 {
    debug_assert!(n >= 1 && n <= 64);
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Zero bits of `v` among bit positions `0..m`: each is one LCS unit.
fn count_zeros_low(v: &[u64], m: usize) -> usize {
    let mut zeros = 0usize;
    let mut remaining = m;
    for &word in v {
        let take = remaining.min(64);
        zeros += take - (word & low_bits(take)).count_ones() as usize;
        remaining -= take;
        if remaining == 0 {
            break;
        }
    }
    zeros
}
