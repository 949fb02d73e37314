//! Strings over a finite alphabet, LCS computation, insdel distance, and
//! exhaustive decodability checks.

mod balls;
mod bitlcs;

pub use balls::{decodable_under, decodable_under_with_budget, DEFAULT_NODE_BUDGET};
pub use bitlcs::LcsPattern;

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A string over the alphabet `{0, 1, ..., k-1}`.
///
/// The invariant `sym < k` for every symbol is enforced at construction,
/// so consumers may index tables of size `k` without bounds checks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolString {
    syms: Vec<u32>,
    k: u32,
}

impl SymbolString {
    pub fn new(syms: Vec<u32>, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput(format!(
                "alphabet size must be at least 2, got {k}"
            )));
        }
        if let Some(&s) = syms.iter().find(|&&s| s >= k) {
            return Err(Error::InvalidInput(format!(
                "symbol {s} out of range for alphabet size {k}"
            )));
        }
        Ok(Self { syms, k })
    }

    /// Skips the range check; callers must guarantee `sym < k` throughout.
    pub(crate) fn new_unchecked(syms: Vec<u32>, k: u32) -> Self {
        debug_assert!(k >= 2 && syms.iter().all(|&s| s < k));
        Self { syms, k }
    }

    pub fn syms(&self) -> &[u32] {
        &self.syms
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn into_syms(self) -> Vec<u32> {
        self.syms
    }
}

/// Requires both strings to share one alphabet; LCS over different
/// alphabets is a category error that silently produces nonsense.
fn check_same_k(a: &SymbolString, b: &SymbolString) -> Result<u32> {
    if a.k != b.k {
        return Err(Error::AlphabetMismatch(format!(
            "left has k={}, right has k={}",
            a.k, b.k
        )));
    }
    Ok(a.k)
}

/// Length of the longest common subsequence of `a` and `b`.
pub fn lcs(a: &SymbolString, b: &SymbolString) -> Result<usize> {
    check_same_k(a, b)?;
    Ok(LcsPattern::new(a).lcs_with(b.syms()))
}

/// Reference LCS by two-row dynamic programming. Quadratic; exists to
/// cross-check the bit-parallel kernel, and as the backtrace base.
pub fn lcs_dp(a: &SymbolString, b: &SymbolString) -> Result<usize> {
    check_same_k(a, b)?;
    Ok(lcs_dp_raw(a.syms(), b.syms()))
}

pub(crate) fn lcs_dp_raw(a: &[u32], b: &[u32]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for &ca in a {
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Insdel distance: the least number of insertions plus deletions that
/// transforms `a` into `b`. Equals `|a| + |b| - 2*LCS(a, b)`.
pub fn insdel_distance(a: &SymbolString, b: &SymbolString) -> Result<usize> {
    let l = lcs(a, b)?;
    Ok(a.len() + b.len() - 2 * l)
}

/// Maximum LCS over all pairs of distinct codewords; 0 when fewer than
/// two codewords exist (no pair to take the maximum over).
///
/// Codewords must share one length and one alphabet, with no duplicates
/// (a duplicate pair would make every error budget undecodable, which is
/// always a caller bug rather than a measurement).
pub fn lcs_of_code(code: &[SymbolString]) -> Result<usize> {
    if code.len() < 2 {
        return Ok(0);
    }
    validate_code(code)?;
    let patterns: Vec<LcsPattern> = code.iter().map(LcsPattern::new).collect();
    let mut best = 0usize;
    for i in 0..code.len() {
        for j in (i + 1)..code.len() {
            best = best.max(patterns[i].lcs_with(code[j].syms()));
        }
    }
    Ok(best)
}

/// Checks the code-shape preconditions shared by LCS and decodability
/// measurements: same alphabet, equal lengths, no duplicates, |C| >= 2.
pub(crate) fn validate_code(code: &[SymbolString]) -> Result<()> {
    if code.len() < 2 {
        return Err(Error::InvalidInput(
            "code must contain at least two codewords".into(),
        ));
    }
    let k = code[0].k;
    let n = code[0].len();
    for w in code {
        if w.k != k {
            return Err(Error::AlphabetMismatch(format!(
                "codewords mix alphabet sizes {k} and {}",
                w.k
            )));
        }
        if w.len() != n {
            return Err(Error::RaggedLengths(format!(
                "codewords mix lengths {n} and {}",
                w.len()
            )));
        }
    }
    let mut seen = std::collections::HashSet::with_capacity(code.len());
    for (i, w) in code.iter().enumerate() {
        if !seen.insert(w.syms()) {
            return Err(Error::InvalidInput(format!(
                "duplicate codeword at index {i}"
            )));
        }
    }
    Ok(())
}

/// Largest error budget the code tolerates: `n - lcs_of_code(C) - 1`.
/// Agrees with [`decodable_under`] on every instance small enough for
/// ball enumeration, for all three error kinds.
pub fn radius_from_lcs(code: &[SymbolString]) -> Result<usize> {
    validate_code(code)?;
    Ok(radius_formula(code[0].len(), lcs_of_code(code)?))
}

/// The radius formula itself, for callers that already hold the maximum
/// pairwise LCS. Saturates at zero (distinct equal-length words always
/// have `l < n`, but loaded headers may claim anything).
pub(crate) fn radius_formula(n: usize, l: usize) -> usize {
    n.saturating_sub(l + 1)
}

/// Which operations the channel may apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    DeletionsOnly,
    InsertionsOnly,
    Mixed,
}

/// An adversary limited to `budget` operations of the given kind
/// (for `Mixed`, insertions and deletions share the budget).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ErrorModel {
    pub kind: ErrorKind,
    pub budget: usize,
}

/// Histogram of symbol occurrences; the pairwise minimum-sum over two
/// histograms upper-bounds their LCS.
pub(crate) fn symbol_histogram(s: &[u32]) -> HashMap<u32, u32> {
    let mut h = HashMap::new();
    for &c in s {
        *h.entry(c).or_insert(0u32) += 1;
    }
    h
}

#[cfg(test)]
pub(crate) fn histogram_lcs_bound(a: &HashMap<u32, u32>, b: &HashMap<u32, u32>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .map(|(sym, &ca)| large.get(sym).map_or(0, |&cb| ca.min(cb) as usize))
        .sum()
}

// ---------------------------------------------------------------------------
// Text serialization: `k=<int>` header, one word per line in base-36
// (digits then lowercase letters), `-` for the empty word, `#` comments.
// Alphabets past 36 don't fit one char per symbol; their words are
// space-separated decimal instead, same header and empty-word mark.
// ---------------------------------------------------------------------------

const EMPTY_WORD_MARK: &str = "-";

fn sym_to_char(s: u32) -> char {
    match s {
        0..=9 => (b'0' + s as u8) as char,
        10..=35 => (b'a' + (s - 10) as u8) as char,
        _ => unreachable!("symbol out of base-36 range"),
    }
}

fn char_to_sym(c: char) -> Option<u32> {
    match c {
        '0'..='9' => Some(c as u32 - '0' as u32),
        'a'..='z' => Some(c as u32 - 'a' as u32 + 10),
        _ => None,
    }
}

/// Renders words to the text format: base-36 digits for `k <= 36`,
/// space-separated decimal symbols for larger alphabets.
pub fn format_strings(k: u32, words: &[SymbolString]) -> Result<String> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "text format needs k >= 2, got {k}"
        )));
    }
    let mut out = format!("k={k}\n");
    for w in words {
        if w.k != k {
            return Err(Error::AlphabetMismatch(format!(
                "word has k={}, header says {k}",
                w.k
            )));
        }
        if w.is_empty() {
            out.push_str(EMPTY_WORD_MARK);
        } else if k <= 36 {
            out.extend(w.syms().iter().map(|&s| sym_to_char(s)));
        } else {
            let rendered: Vec<String> = w.syms().iter().map(u32::to_string).collect();
            out.push_str(&rendered.join(" "));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses the text format produced by [`format_strings`].
pub fn parse_strings(text: &str) -> Result<(u32, Vec<SymbolString>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("missing k= header".into()))?;
    let k: u32 = header
        .strip_prefix("k=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::InvalidInput(format!("bad header line: {header:?}")))?;
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "text format needs k >= 2, got {k}"
        )));
    }
    let mut words = Vec::new();
    for line in lines {
        if line == EMPTY_WORD_MARK {
            words.push(SymbolString::new_unchecked(Vec::new(), k));
            continue;
        }
        let mut syms = Vec::with_capacity(line.len());
        if k <= 36 {
            for c in line.chars() {
                let s = char_to_sym(c)
                    .ok_or_else(|| Error::InvalidInput(format!("bad symbol char {c:?}")))?;
                if s >= k {
                    return Err(Error::InvalidInput(format!(
                        "symbol {c:?} out of range for k={k}"
                    )));
                }
                syms.push(s);
            }
        } else {
            for tok in line.split_whitespace() {
                let s: u32 = tok
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad symbol token {tok:?}")))?;
                if s >= k {
                    return Err(Error::InvalidInput(format!(
                        "symbol {s} out of range for k={k}"
                    )));
                }
                syms.push(s);
            }
        }
        words.push(SymbolString::new_unchecked(syms, k));
    }
    Ok((k, words))
}

/// Convenience: parse a single word in base-36 with an explicit alphabet.
pub fn parse_word(line: &str, k: u32) -> Result<SymbolString> {
    let text = format!("k={k}\n{line}\n");
    let (_, mut words) = parse_strings(&text)?;
    words
        .pop()
        .ok_or_else(|| Error::InvalidInput("empty word line".into()))
}
