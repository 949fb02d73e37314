//! Concatenated Reed-Solomon codes decoded through a window sweep and
//! list decoding, for correcting error fractions approaching 1.
//!
//! Decoding slides windows of a few coarse granularities across the
//! received string, decodes each against the inner table, harvests the
//! uniquely-decoding (point, value) pairs, list-decodes the outer code
//! over that set, and finally disambiguates by distance to the received
//! string.

pub use crate::rs::CandidateSet;

use crate::error::{Error, Result};
use crate::gf::{Fe, Poly};
use crate::innersearch::{inner_decode, inner_encode, CodeTable};
use crate::rs::{rs_encode, sudan_list_decode, RsCodeSpec};
use crate::seqkit::{insdel_distance, SymbolString};
use crate::{mul_ceil, mul_floor, Frac};

/// A concatenated code: an outer Reed-Solomon code over F_q evaluated
/// at all q points, with each (point, value) pair encoded by an inner
/// table of exactly q*q codewords, laid out in point-major order.
#[derive(Clone, Debug)]
pub struct ConcatCodeSpec {
    outer: RsCodeSpec,
    inner: CodeTable,
    delta: Frac,
    gamma: Frac,
}

impl ConcatCodeSpec {
    /// `delta`: the inner code corrects a (1-delta) fraction of m, so
    /// its verified radius must reach floor((1-delta)*m). `gamma`: the
    /// decoder's slack; the code corrects a (1-delta-gamma) fraction.
    pub fn new(outer: RsCodeSpec, inner: CodeTable, delta: Frac, gamma: Frac) -> Result<Self> {
        let q = outer.field().order() as usize;
        if outer.n() != q {
            return Err(Error::ParameterError(format!(
                "outer code must evaluate at all {q} field points, got n={}",
                outer.n()
            )));
        }
        if inner.len() != q * q {
            return Err(Error::ParameterError(format!(
                "inner table must hold {q}*{q} codewords for pair encoding, got {}",
                inner.len()
            )));
        }
        let zero = Frac::from_integer(0);
        let one = Frac::from_integer(1);
        if delta <= zero || gamma <= zero || delta + gamma >= one {
            return Err(Error::ParameterError(format!(
                "need 0 < delta, 0 < gamma, delta + gamma < 1; got {delta}, {gamma}"
            )));
        }
        let needed = mul_floor(one - delta, inner.m());
        if inner.verified_radius() < needed {
            return Err(Error::ParameterError(format!(
                "inner radius {} below the required floor((1-delta)m) = {needed}",
                inner.verified_radius()
            )));
        }
        Ok(ConcatCodeSpec {
            outer,
            inner,
            delta,
            gamma,
        })
    }

    pub fn outer(&self) -> &RsCodeSpec {
        &self.outer
    }

    pub fn inner(&self) -> &CodeTable {
        &self.inner
    }

    pub fn delta(&self) -> Frac {
        self.delta
    }

    pub fn gamma(&self) -> Frac {
        self.gamma
    }

    /// Outer block count (= field order).
    pub fn n(&self) -> usize {
        self.outer.n()
    }

    /// Inner codeword length.
    pub fn m(&self) -> usize {
        self.inner.m()
    }

    /// Total codeword length n*m.
    pub fn total_len(&self) -> usize {
        self.n() * self.m()
    }

    /// Inner table index for the pair (point, value).
    pub fn pair_index(&self, alpha: Fe, beta: Fe) -> usize {
        alpha.0 as usize * self.n() + beta.0 as usize
    }

    fn pair_of_index(&self, index: usize) -> (Fe, Fe) {
        ((Fe((index / self.n()) as u32)), Fe((index % self.n()) as u32))
    }

    /// The decoder's edit budget: floor((1 - delta - gamma) * n * m).
    pub fn decode_budget(&self) -> usize {
        let one = Frac::from_integer(1);
        mul_floor(one - self.delta - self.gamma, self.total_len())
    }
}

/// Encodes a message polynomial of degree < d: evaluate the outer code,
/// then inner-encode each (point, value) pair in point order.
pub fn concat_encode(spec: &ConcatCodeSpec, message: &Poly) -> Result<SymbolString> {
    let outer = rs_encode(&spec.outer, message)?;
    let mut syms = Vec::with_capacity(spec.total_len());
    for (i, &beta) in outer.iter().enumerate() {
        let idx = spec.pair_index(Fe(i as u32), beta);
        let block = inner_encode(&spec.inner, idx)?;
        syms.extend_from_slice(block.syms());
    }
    SymbolString::new(syms, spec.inner.k())
}

/// Slides windows of every coarse size across `s` and decodes each
/// against the inner table; windows that decode uniquely contribute
/// their (point, value) pair. Window starts step by floor(gamma*m/2);
/// lengths run over 1..=ceil(4/gamma) steps; starts run to the design
/// bound ceil(2n/gamma) or the end of `s`, whichever is later, and
/// windows are clipped to `s`.
pub fn window_sweep(spec: &ConcatCodeSpec, s: &SymbolString) -> Result<CandidateSet> {
    if s.k() != spec.inner.k() {
        return Err(Error::AlphabetMismatch(format!(
            "received alphabet {} != inner alphabet {}",
            s.k(),
            spec.inner.k()
        )));
    }
    let one = Frac::from_integer(1);
    let two = Frac::from_integer(2);
    let four = Frac::from_integer(4);
    let step = mul_floor(spec.gamma / two, spec.m());
    if step == 0 {
        return Err(Error::ParameterError(format!(
            "window step floor(gamma*m/2) vanishes for gamma={} m={}",
            spec.gamma,
            spec.m()
        )));
    }
    let j_design = mul_ceil(two / spec.gamma, spec.n());
    let j_cover = s.len().div_ceil(step);
    let j_end = j_design.max(j_cover);
    let width_steps = (four / spec.gamma).ceil().to_integer() as usize;
    let max_distance = mul_floor(one - spec.delta, spec.m());

    let mut pairs = CandidateSet::new();
    for j in 0..=j_end {
        let start = j * step;
        if start >= s.len() {
            break;
        }
        for jp in 1..=width_steps {
            let end = (start + jp * step).min(s.len());
            if end <= start {
                continue;
            }
            let window = SymbolString::new(s.syms()[start..end].to_vec(), s.k())?;
            if let Some(idx) = inner_decode(&spec.inner, &window, max_distance)? {
                let (alpha, beta) = spec.pair_of_index(idx);
                pairs.insert(alpha, beta);
            }
        }
    }
    Ok(pairs)
}

/// Full decoder: window sweep, outer list decode at agreement
/// ceil(gamma*n/2), then return the unique list element whose encoding
/// is within the decode budget of `s`.
///
/// Correct whenever some codeword is within `decode_budget()` edits of
/// `s` *and* the code is combinatorially decodable at that budget. A
/// received string with no codeword in range is a decode failure;
/// two list elements in range mean the combinatorial precondition was
/// false, reported as a contract violation rather than a guess.
pub fn list_concat_decode(spec: &ConcatCodeSpec, s: &SymbolString) -> Result<Poly> {
    let pairs = window_sweep(spec, s)?;
    let two = Frac::from_integer(2);

    // The list-decoding threshold must clear the soundness bound; with
    // an explicitly chosen gamma this can genuinely fail, so it is a
    // parameter error, not an internal bug.
    let threshold = mul_ceil(spec.gamma / two, spec.n());
    let gn_half = spec.gamma / two * Frac::from_integer(spec.n() as i64);
    let sound = Frac::from_integer(2 * spec.outer.d() as i64 * pairs.len() as i64);
    if gn_half * gn_half <= sound {
        return Err(Error::ParameterError(format!(
            "list threshold gamma*n/2 = {gn_half} is not above sqrt(2*d*|J|) \
             with d={} |J|={}; gamma is too small for this sweep",
            spec.outer.d(),
            pairs.len()
        )));
    }
    let list = sudan_list_decode(&spec.outer, &pairs, threshold)?;

    let budget = spec.decode_budget();
    let mut qualifying = Vec::new();
    for p in list {
        let enc = concat_encode(spec, &p)?;
        if insdel_distance(&enc, s)? <= budget {
            qualifying.push(p);
        }
    }
    match qualifying.len() {
        0 => Err(Error::DecodeFailure(format!(
            "no candidate within {budget} edits of the received string"
        ))),
        1 => Ok(qualifying.pop().expect("len checked")),
        n => Err(Error::ContractViolation(format!(
            "{n} candidates within {budget} edits; the code is not \
             combinatorially decodable at this budget"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{corrupt, segment_edit_costs, Strategy};
    use crate::frac;
    use crate::gf::FieldSpec;
    use crate::innersearch::{search_kary_with, SearchOptions};
    use crate::seqkit::lcs_dp;
    use std::sync::OnceLock;

    /// Tiny instance for encode- and sweep-side semantics: GF(8) outer,
    /// inner over 32 symbols at length 8 with radius >= 3 (delta = 5/8).
    /// Too small for the full decoder — the list threshold gamma*n/2 can
    /// never clear sqrt(2*d*|J|) when a clean sweep already yields n
    /// pairs — which is itself one of the tests below.
    fn tiny_spec() -> &'static ConcatCodeSpec {
        static SPEC: OnceLock<ConcatCodeSpec> = OnceLock::new();
        SPEC.get_or_init(|| {
            let field = FieldSpec::with_order(8).unwrap();
            let outer = RsCodeSpec::new(field, 8, 2).unwrap();
            let opts = SearchOptions {
                target_size: Some(64),
                max_candidates: 1 << 22,
                seed: 5,
            };
            let inner = search_kary_with(8, 32, frac(3, 8), &opts).unwrap();
            ConcatCodeSpec::new(outer, inner, frac(5, 8), frac(1, 4)).unwrap()
        })
    }

    /// Full-scale decoding instance: GF(64) outer at d = 2, inner over
    /// 256 symbols at length 16 with radius >= 11 (delta = 5/16), slack
    /// gamma = 5/8. Corrects floor(N/16) = 64 edits out of N = 1024.
    fn decode_spec() -> &'static ConcatCodeSpec {
        static SPEC: OnceLock<ConcatCodeSpec> = OnceLock::new();
        SPEC.get_or_init(|| {
            let field = FieldSpec::with_order(64).unwrap();
            let outer = RsCodeSpec::new(field, 64, 2).unwrap();
            let opts = SearchOptions {
                target_size: Some(64 * 64),
                max_candidates: 200_000,
                seed: 7,
            };
            let inner = search_kary_with(16, 256, frac(11, 16), &opts).unwrap();
            ConcatCodeSpec::new(outer, inner, frac(5, 16), frac(5, 8)).unwrap()
        })
    }

    fn poly(cs: &[u32]) -> Poly {
        Poly::from_coeffs(cs.iter().map(|&c| Fe(c)).collect())
    }

    #[test]
    fn encode_layout_and_block_round_trip() {
        let spec = tiny_spec();
        let msg = poly(&[3, 1]);
        let cw = concat_encode(spec, &msg).unwrap();
        assert_eq!(cw.len(), spec.total_len());
        let outer = rs_encode(spec.outer(), &msg).unwrap();
        for i in 0..spec.n() {
            let block = SymbolString::new(
                cw.syms()[i * spec.m()..(i + 1) * spec.m()].to_vec(),
                cw.k(),
            )
            .unwrap();
            let idx = inner_decode(spec.inner(), &block, 0).unwrap().unwrap();
            assert_eq!(idx, spec.pair_index(Fe(i as u32), outer[i]));
        }
        assert!(concat_encode(spec, &poly(&[1, 1, 1])).is_err());
    }

    #[test]
    fn messages_differ_in_many_blocks() {
        // Exhaustive over GF(8) degree-<2 messages: any two distinct
        // codewords differ in at least n - d + 1 = 7 inner blocks.
        let spec = tiny_spec();
        let m = spec.m();
        let words: Vec<SymbolString> = (0..64)
            .map(|i| concat_encode(spec, &poly(&[i / 8, i % 8])).unwrap())
            .collect();
        for a in 0..words.len() {
            for b in (a + 1)..words.len() {
                let differing = (0..spec.n())
                    .filter(|&i| {
                        words[a].syms()[i * m..(i + 1) * m] != words[b].syms()[i * m..(i + 1) * m]
                    })
                    .count();
                assert!(differing >= 7, "only {differing} blocks differ");
            }
        }
    }

    #[test]
    fn sweep_covers_clean_codewords() {
        let spec = tiny_spec();
        for coeffs in [[0, 0], [3, 1], [7, 6]] {
            let msg = poly(&coeffs);
            let cw = concat_encode(spec, &msg).unwrap();
            let pairs = window_sweep(spec, &cw).unwrap();
            let values = rs_encode(spec.outer(), &msg).unwrap();
            for (i, &beta) in values.iter().enumerate() {
                assert!(
                    pairs.contains(Fe(i as u32), beta),
                    "pair {i} missing from clean sweep"
                );
            }
        }
    }

    #[test]
    fn sweep_of_empty_string_is_empty() {
        let spec = tiny_spec();
        let empty = SymbolString::new(vec![], 32).unwrap();
        assert!(window_sweep(spec, &empty).unwrap().is_empty());
    }

    #[test]
    fn small_fields_cannot_clear_the_list_threshold() {
        // On GF(8) a clean sweep alone yields 8 pairs, so the soundness
        // requirement (gamma*n/2)^2 > 2*d*|J| would force gamma > 1.
        // The decoder reports this as a parameter problem, not a decode
        // failure and not a guess.
        let spec = tiny_spec();
        let cw = concat_encode(spec, &poly(&[3, 1])).unwrap();
        assert!(matches!(
            list_concat_decode(spec, &cw),
            Err(Error::ParameterError(_))
        ));
    }

    #[test]
    fn clean_round_trip_and_all_strategies_at_budget() {
        let spec = decode_spec();
        let budget = spec.decode_budget();
        assert_eq!(budget, 64);
        let strategies = [
            Strategy::Uniform,
            Strategy::BufferSpoof {
                block_len: spec.m(),
                buffer_len: 4,
            },
            Strategy::ChunkKill {
                block_len: spec.m(),
                buffer_len: 4,
                ones_per_chunk: 1,
            },
            Strategy::BlockShift {
                block_len: spec.m(),
            },
        ];
        let msg = poly(&[13, 57]);
        let cw = concat_encode(spec, &msg).unwrap();
        assert_eq!(list_concat_decode(spec, &cw).unwrap(), msg);
        for (si, strategy) in strategies.iter().enumerate() {
            let (corrupted, plan) = corrupt(&cw, budget, strategy, si as u64).unwrap();
            assert!(plan.edits.len() <= budget);
            let got = list_concat_decode(spec, &corrupted).unwrap();
            assert_eq!(got, msg, "strategy {} seed {si}", strategy.name());
        }
    }

    #[test]
    fn good_block_count_matches_the_averaging_bound() {
        let spec = decode_spec();
        let budget = spec.decode_budget();
        let msg = poly(&[13, 57]);
        let cw = concat_encode(spec, &msg).unwrap();
        let segments = vec![spec.m(); spec.n()];
        // Blocks taking at most floor((1-delta-gamma/2)*m) edits stay
        // recoverable; simple averaging forces at least ceil(gamma*n/2)
        // of them under any budget-respecting corruption.
        let good_cap =
            mul_floor(frac(1, 1) - spec.delta() - spec.gamma() / frac(2, 1), spec.m());
        let needed = mul_ceil(spec.gamma() / frac(2, 1), spec.n());
        for seed in 0..30 {
            let (_, plan) = corrupt(&cw, budget, &Strategy::Uniform, seed).unwrap();
            let costs = segment_edit_costs(&segments, &plan).unwrap();
            let good = costs.iter().filter(|&&c| c <= good_cap).count();
            assert!(good >= needed, "{good} good blocks < {needed}");
        }
    }

    #[test]
    fn over_budget_never_yields_a_silent_wrong_answer() {
        let spec = decode_spec();
        let msg = poly(&[13, 57]);
        let cw = concat_encode(spec, &msg).unwrap();
        for seed in 0..3 {
            let (corrupted, _) =
                corrupt(&cw, spec.total_len() / 2, &Strategy::Uniform, seed).unwrap();
            match list_concat_decode(spec, &corrupted) {
                Ok(p) => {
                    // Allowed only if the corruption happened to stay
                    // within reach of this candidate.
                    let enc = concat_encode(spec, &p).unwrap();
                    assert!(insdel_distance(&enc, &corrupted).unwrap() <= spec.decode_budget());
                }
                Err(Error::DecodeFailure(_))
                | Err(Error::ContractViolation(_))
                | Err(Error::ParameterError(_)) => {}
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn candidate_pool_stays_inside_the_soundness_ceiling() {
        let spec = decode_spec();
        let msg = poly(&[40, 3]);
        let cw = concat_encode(spec, &msg).unwrap();
        let (corrupted, _) = corrupt(&cw, spec.decode_budget(), &Strategy::Uniform, 3).unwrap();
        let pairs = window_sweep(spec, &corrupted).unwrap();
        // All n correct pairs minus a few damaged blocks, plus not too
        // much noise: the threshold check needs |J| < (gamma*n/2)^2/(2d)
        // = 100 here.
        assert!(pairs.len() >= 40, "sweep found only {} pairs", pairs.len());
        assert!(pairs.len() < 100, "sweep flooded: {} pairs", pairs.len());
    }

    #[test]
    fn spec_validation_rejects_mismatches() {
        let spec = tiny_spec();
        let inner = spec.inner().clone();
        let field = FieldSpec::with_order(8).unwrap();
        let outer_short = RsCodeSpec::new(field.clone(), 7, 2).unwrap();
        assert!(
            ConcatCodeSpec::new(outer_short, inner.clone(), frac(5, 8), frac(1, 4)).is_err()
        );

        let outer = RsCodeSpec::new(field, 8, 2).unwrap();
        // delta = 1/8 would need radius floor(7m/8) = 7; the table holds
        // radius 3.
        assert!(matches!(
            ConcatCodeSpec::new(outer.clone(), inner.clone(), frac(1, 8), frac(1, 4)),
            Err(Error::ParameterError(_))
        ));
        assert!(ConcatCodeSpec::new(outer, inner, frac(5, 8), frac(3, 8)).is_err());
    }

    #[test]
    fn window_decode_semantics_spot_check() {
        // A window equal to a codeword decodes to it even at distance 0,
        // and the inner radius honours the spec's delta.
        let spec = tiny_spec();
        let cw0 = inner_encode(spec.inner(), 0).unwrap();
        assert_eq!(inner_decode(spec.inner(), &cw0, 0).unwrap(), Some(0));
        for i in [1usize, 17, 40] {
            let a = inner_encode(spec.inner(), i).unwrap();
            let l = lcs_dp(&cw0, &a).unwrap();
            assert!(l <= 4, "pairwise LCS {l} too large");
        }
    }
}
