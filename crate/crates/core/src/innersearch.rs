//! Greedy construction of small "inner" code tables with guaranteed
//! pairwise-LCS caps, plus encoding and nearest-codeword decoding
//! against an explicit table.
//!
//! Tables are found by filtering a candidate stream: density and
//! endpoint filters first, then the LCS constraint against every
//! already-accepted codeword. When the whole space `k^m` fits the
//! candidate budget the stream is exhaustive in lexicographic order and
//! the result is maximal; otherwise candidates are drawn from a seeded
//! generator, which keeps the result reproducible but only examines a
//! sample of the space.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::seqkit::{self, LcsPattern, SymbolString};
use crate::{mul_ceil, strict_cap, Frac};

/// Knobs for the search loop beyond the code parameters themselves.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Stop as soon as this many codewords are accepted; error if the
    /// stream ends first. `None` keeps everything the stream yields.
    pub target_size: Option<usize>,
    /// Examine at most this many candidates. Spaces no larger than this
    /// are enumerated exhaustively in lexicographic order; larger spaces
    /// are sampled from the seeded generator instead.
    pub max_candidates: u64,
    /// Seed for the sampled mode. Ignored in exhaustive mode.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            target_size: None,
            max_candidates: 1 << 22,
            seed: 0x1a5e_ed00,
        }
    }
}

/// An explicit code: equal-length codewords over a common alphabet,
/// with the verified decoding radius and any density guarantee carried
/// alongside. Construction re-derives both claims from the codewords;
/// a table whose metadata cannot be re-verified cannot exist.
#[derive(Clone, Debug)]
pub struct CodeTable {
    codewords: Vec<SymbolString>,
    m: usize,
    k: u32,
    verified_radius: usize,
    density: Option<(usize, usize)>,
    /// For each symbol, the codewords containing it and how many times:
    /// the decode prefilter accumulates multiset overlaps from this
    /// instead of intersecting per-codeword histograms.
    sym_index: HashMap<u32, Vec<(u32, u32)>>,
}

impl CodeTable {
    /// Validates and wraps a list of codewords, recomputing the radius
    /// from scratch. `density` is `(window length, min ones per window)`
    /// and is only meaningful for binary tables.
    pub fn new(codewords: Vec<SymbolString>, density: Option<(usize, usize)>) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::InvalidInput("a code table cannot be empty".into()));
        }
        seqkit::validate_code(&codewords)?;
        let verified_radius = seqkit::radius_from_lcs(&codewords)?;
        Self::assemble(codewords, verified_radius, density)
    }

    /// Trusted path for the search loop, which has already computed the
    /// exact maximum pairwise LCS while filtering candidates.
    fn from_search(
        codewords: Vec<SymbolString>,
        max_lcs: usize,
        density: Option<(usize, usize)>,
    ) -> Result<Self> {
        let m = codewords[0].len();
        debug_assert!(
            codewords.len() > 64 || seqkit::lcs_of_code(&codewords).unwrap() == max_lcs
        );
        Self::assemble(codewords, seqkit::radius_formula(m, max_lcs), density)
    }

    fn assemble(
        codewords: Vec<SymbolString>,
        verified_radius: usize,
        density: Option<(usize, usize)>,
    ) -> Result<Self> {
        let m = codewords[0].len();
        let k = codewords[0].k();
        if let Some((window, min_ones)) = density {
            if k != 2 {
                return Err(Error::InvalidInput(
                    "density guarantees only apply to binary tables".into(),
                ));
            }
            if window == 0 || min_ones > window {
                return Err(Error::InvalidInput(format!(
                    "density {min_ones} ones per window of {window} is malformed"
                )));
            }
            for (i, w) in codewords.iter().enumerate() {
                if !density_ok(w.syms(), window, min_ones) {
                    return Err(Error::InvalidInput(format!(
                        "codeword {i} violates the declared density guarantee"
                    )));
                }
            }
        }
        let mut sym_index: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for (i, w) in codewords.iter().enumerate() {
            for (sym, count) in seqkit::symbol_histogram(w.syms()) {
                sym_index.entry(sym).or_default().push((i as u32, count));
            }
        }
        Ok(CodeTable {
            codewords,
            m,
            k,
            verified_radius,
            density,
            sym_index,
        })
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Codeword length.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Alphabet size.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Largest t such that t insertions/deletions are correctable:
    /// m - (max pairwise LCS) - 1.
    pub fn verified_radius(&self) -> usize {
        self.verified_radius
    }

    /// `(window length, min ones per window)` guarantee, if declared.
    pub fn density(&self) -> Option<(usize, usize)> {
        self.density
    }

    pub fn codewords(&self) -> &[SymbolString] {
        &self.codewords
    }

    /// Forges the radius claim, bypassing re-verification. Exists only
    /// so negative-control tests can exercise claim-vs-recompute checks.
    #[cfg(test)]
    pub(crate) fn with_claimed_radius(mut self, radius: usize) -> Self {
        self.verified_radius = radius;
        self
    }

    pub fn position(&self, word: &SymbolString) -> Option<usize> {
        self.codewords.iter().position(|c| c == word)
    }

    /// log2 |table| / (m log2 k).
    pub fn rate(&self) -> f64 {
        (self.codewords.len() as f64).log2() / (self.m as f64 * (self.k as f64).log2())
    }

    /// Renders the table to its text format: `m=`, `k=`, `radius=`,
    /// optional `density=L:count` headers, then one codeword per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("m={}\nk={}\nradius={}\n", self.m, self.k, self.verified_radius);
        if let Some((window, min_ones)) = self.density {
            out.push_str(&format!("density={window}:{min_ones}\n"));
        }
        let body = seqkit::format_strings(self.k, &self.codewords)
            .expect("table invariants guarantee serializable words");
        // format_strings emits its own k= header; the table format
        // already carries one.
        let (_, words) = body.split_once('\n').expect("header line present");
        out.push_str(words);
        out
    }

    /// Parses and re-verifies the text format. Header claims that fail
    /// re-verification (radius, density, lengths) are rejected.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut m = None;
        let mut k = None;
        let mut radius = None;
        let mut density = None;
        let mut body = String::new();
        let mut in_headers = true;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if in_headers {
                if let Some((key, value)) = line.split_once('=') {
                    let parse_usize = |v: &str| {
                        v.parse::<usize>()
                            .map_err(|_| Error::InvalidInput(format!("bad header value {v:?}")))
                    };
                    match key {
                        "m" => {
                            m = Some(parse_usize(value)?);
                            continue;
                        }
                        "k" => {
                            k = Some(parse_usize(value)? as u32);
                            continue;
                        }
                        "radius" => {
                            radius = Some(parse_usize(value)?);
                            continue;
                        }
                        "density" => {
                            let (w, c) = value.split_once(':').ok_or_else(|| {
                                Error::InvalidInput(format!("bad density header {value:?}"))
                            })?;
                            density = Some((parse_usize(w)?, parse_usize(c)?));
                            continue;
                        }
                        _ => {}
                    }
                }
                in_headers = false;
            }
            body.push_str(line);
            body.push('\n');
        }
        let m = m.ok_or_else(|| Error::InvalidInput("missing m= header".into()))?;
        let k = k.ok_or_else(|| Error::InvalidInput("missing k= header".into()))?;
        let radius = radius.ok_or_else(|| Error::InvalidInput("missing radius= header".into()))?;
        let (_, words) = seqkit::parse_strings(&format!("k={k}\n{body}"))?;
        if let Some(w) = words.iter().find(|w| w.len() != m) {
            return Err(Error::InvalidInput(format!(
                "codeword length {} contradicts header m={m}",
                w.len()
            )));
        }
        let table = CodeTable::new(words, density)?;
        if table.verified_radius != radius {
            return Err(Error::InvalidInput(format!(
                "header claims radius {radius}, re-verification found {}",
                table.verified_radius
            )));
        }
        Ok(table)
    }
}

/// Returns the codeword at `index`.
pub fn inner_encode(table: &CodeTable, index: usize) -> Result<SymbolString> {
    table
        .codewords
        .get(index)
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("index {index} out of range for table of {}", table.len())))
}

/// Finds the unique codeword within insdel distance `max_distance` of
/// `window` and returns its index. `None` when no codeword qualifies or
/// several do; both are ordinary outcomes, not errors.
pub fn inner_decode(
    table: &CodeTable,
    window: &SymbolString,
    max_distance: usize,
) -> Result<Option<usize>> {
    if window.k() != table.k {
        return Err(Error::AlphabetMismatch(format!(
            "window alphabet {} != table alphabet {}",
            window.k(),
            table.k
        )));
    }
    let pattern = LcsPattern::new(window);
    // Multiset overlap with every codeword at once: an upper bound on
    // each LCS, hence a lower bound on each distance.
    let mut shared = vec![0u32; table.codewords.len()];
    for (sym, wcount) in seqkit::symbol_histogram(window.syms()) {
        if let Some(entries) = table.sym_index.get(&sym) {
            for &(cw, count) in entries {
                shared[cw as usize] += wcount.min(count);
            }
        }
    }
    let mut hit = None;
    for (i, cw) in table.codewords.iter().enumerate() {
        if table.m + window.len() > 2 * shared[i] as usize + max_distance {
            continue;
        }
        let lcs = pattern.lcs_with(cw.syms());
        let dist = table.m + window.len() - 2 * lcs;
        if dist <= max_distance {
            if hit.is_some() {
                return Ok(None);
            }
            hit = Some(i);
        }
    }
    Ok(hit)
}

/// Every length-`window` slice has at least `min_ones` ones. Vacuous
/// when the word is shorter than the window.
pub(crate) fn density_ok(syms: &[u32], window: usize, min_ones: usize) -> bool {
    if syms.len() < window {
        return true;
    }
    let mut ones = syms[..window].iter().filter(|&&s| s == 1).count();
    if ones < min_ones {
        return false;
    }
    for i in window..syms.len() {
        ones += (syms[i] == 1) as usize;
        ones -= (syms[i - window] == 1) as usize;
        if ones < min_ones {
            return false;
        }
    }
    true
}

enum CandidateStream {
    Lex { next: u128, total: u128 },
    Sampled { rng: Box<ChaCha20Rng>, remaining: u64 },
}

impl CandidateStream {
    fn open(m: usize, k: u32, opts: &SearchOptions) -> Self {
        let mut total: u128 = 1;
        let mut fits = true;
        for _ in 0..m {
            match total.checked_mul(k as u128) {
                Some(t) if t <= opts.max_candidates as u128 => total = t,
                _ => {
                    fits = false;
                    break;
                }
            }
        }
        if fits {
            CandidateStream::Lex { next: 0, total }
        } else {
            CandidateStream::Sampled {
                rng: Box::new(ChaCha20Rng::seed_from_u64(opts.seed)),
                remaining: opts.max_candidates,
            }
        }
    }

    fn exhaustive(&self) -> bool {
        matches!(self, CandidateStream::Lex { .. })
    }

    /// In sampled mode `force_ones_at_ends` pins both end symbols to 1
    /// so draws aren't wasted on strings the endpoint filter would
    /// discard; lexicographic mode emits the space as-is and leaves
    /// rejection to the filters.
    fn next(&mut self, m: usize, k: u32, force_ones_at_ends: bool) -> Option<Vec<u32>> {
        match self {
            CandidateStream::Lex { next, total } => {
                if next == total {
                    return None;
                }
                let mut rem = *next;
                *next += 1;
                let mut syms = vec![0u32; m];
                for slot in syms.iter_mut().rev() {
                    *slot = (rem % k as u128) as u32;
                    rem /= k as u128;
                }
                Some(syms)
            }
            CandidateStream::Sampled { rng, remaining } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                let mut syms: Vec<u32> = (0..m).map(|_| rng.random_range(0..k)).collect();
                if force_ones_at_ends {
                    syms[0] = 1;
                    syms[m - 1] = 1;
                }
                Some(syms)
            }
        }
    }
}

struct GreedyOutcome {
    accepted: Vec<SymbolString>,
    max_lcs: usize,
    examined: u64,
    exhaustive: bool,
}

/// Core greedy loop: accept each passing candidate whose LCS with every
/// accepted codeword stays at or below `lcs_cap`.
fn greedy_search<F>(
    m: usize,
    k: u32,
    lcs_cap: i64,
    opts: &SearchOptions,
    force_ones_at_ends: bool,
    mut passes_filters: F,
) -> GreedyOutcome
where
    F: FnMut(&[u32]) -> bool,
{
    let mut stream = CandidateStream::open(m, k, opts);
    let exhaustive = stream.exhaustive();
    let mut accepted: Vec<SymbolString> = Vec::new();
    let mut patterns: Vec<LcsPattern> = Vec::new();
    let mut max_lcs = 0usize;
    let mut examined = 0u64;
    while let Some(syms) = stream.next(m, k, force_ones_at_ends) {
        examined += 1;
        if !passes_filters(&syms) {
            continue;
        }
        let mut best = 0usize;
        let ok = patterns.iter().all(|p| {
            let l = p.lcs_with(&syms);
            best = best.max(l);
            l as i64 <= lcs_cap
        });
        if !ok {
            continue;
        }
        let word = SymbolString::new_unchecked(syms, k);
        patterns.push(LcsPattern::new(&word));
        accepted.push(word);
        max_lcs = max_lcs.max(best);
        if opts.target_size == Some(accepted.len()) {
            break;
        }
    }
    GreedyOutcome {
        accepted,
        max_lcs,
        examined,
        exhaustive,
    }
}

fn finish_search(
    outcome: GreedyOutcome,
    m: usize,
    k: u32,
    lcs_cap: i64,
    opts: &SearchOptions,
    density: Option<(usize, usize)>,
) -> Result<CodeTable> {
    let GreedyOutcome {
        accepted,
        max_lcs,
        examined,
        exhaustive,
    } = outcome;
    let mode = if exhaustive { "exhaustive" } else { "sampled" };
    if let Some(target) = opts.target_size {
        if accepted.len() < target {
            return Err(Error::ConstructionFailure(format!(
                "search for m={m} k={k} reached {} of {target} codewords \
                 (pairwise LCS cap {lcs_cap}, {examined} candidates, {mode} mode); \
                 a longer m is needed for this table size",
                accepted.len()
            )));
        }
    }
    if accepted.is_empty() {
        return Err(Error::ConstructionFailure(format!(
            "no length-{m} string over {k} symbols passed the filters \
             ({examined} candidates, {mode} mode)"
        )));
    }
    CodeTable::from_search(accepted, max_lcs, density)
}

/// Searches for a binary table whose every codeword keeps at least
/// `ceil(beta*m/10)` ones in every window of `ceil(beta*m)` positions,
/// optionally begins and ends with 1, and whose pairwise LCS stays
/// below `(1-delta)*m` — so the table corrects a `delta` fraction of
/// insertions and deletions.
pub fn search_dense_binary(
    m: usize,
    delta: Frac,
    beta: Frac,
    require_endpoints: bool,
) -> Result<CodeTable> {
    search_dense_binary_with(m, delta, beta, require_endpoints, &SearchOptions::default())
}

pub fn search_dense_binary_with(
    m: usize,
    delta: Frac,
    beta: Frac,
    require_endpoints: bool,
    opts: &SearchOptions,
) -> Result<CodeTable> {
    let zero = Frac::from_integer(0);
    let one = Frac::from_integer(1);
    if m == 0 {
        return Err(Error::InvalidInput("codeword length must be positive".into()));
    }
    if delta <= zero || delta >= one {
        return Err(Error::InvalidInput(format!(
            "insdel fraction {delta} outside (0, 1) leaves no decoding radius"
        )));
    }
    if beta <= zero || beta >= one {
        return Err(Error::InvalidInput(format!(
            "density interval fraction {beta} outside (0, 1)"
        )));
    }
    let window = mul_ceil(beta, m);
    let min_ones = mul_ceil(beta / Frac::from_integer(10), m);
    let lcs_cap = strict_cap(one - delta, m);
    let outcome = greedy_search(m, 2, lcs_cap, opts, require_endpoints, |syms| {
        (!require_endpoints || (syms[0] == 1 && syms[m - 1] == 1))
            && density_ok(syms, window, min_ones)
    });
    finish_search(outcome, m, 2, lcs_cap, opts, Some((window, min_ones)))
}

/// Searches for a k-ary table whose pairwise LCS stays below
/// `(1-tau)*m`, so the table corrects a `tau` fraction of insertions
/// and deletions.
pub fn search_kary(m: usize, k: u32, tau: Frac) -> Result<CodeTable> {
    search_kary_with(m, k, tau, &SearchOptions::default())
}

pub fn search_kary_with(m: usize, k: u32, tau: Frac, opts: &SearchOptions) -> Result<CodeTable> {
    let zero = Frac::from_integer(0);
    let one = Frac::from_integer(1);
    if m == 0 {
        return Err(Error::InvalidInput("codeword length must be positive".into()));
    }
    if k < 2 {
        return Err(Error::InvalidInput(format!("alphabet {k} below 2")));
    }
    if tau < zero || tau >= one {
        return Err(Error::InvalidInput(format!(
            "target fraction {tau} outside [0, 1)"
        )));
    }
    let lcs_cap = strict_cap(one - tau, m);
    let outcome = greedy_search(m, k, lcs_cap, opts, false, |_| true);
    finish_search(outcome, m, k, lcs_cap, opts, None)
}
