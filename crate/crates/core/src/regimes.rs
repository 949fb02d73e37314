//! Parameter wiring for two concatenated-code regimes — the high-noise
//! regime (decode from a `1-eps` fraction of edits over a modest
//! alphabet) and the near-optimal k-ary regime (decodable fraction
//! approaching `1-2/(k+1)`) — plus a whole-code verifier that re-checks
//! a constructed instance's claims by measurement.

use num::{BigUint, CheckedMul};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldSpec, Poly};
use crate::highrate::HighRateSpec;
use crate::innersearch::{inner_encode, search_kary_with, CodeTable, SearchOptions};
use crate::listconcat::{concat_encode, ConcatCodeSpec};
use crate::rs::{rs_encode, RsCodeSpec};
use crate::seqkit::{self, LcsPattern};
use crate::{frac, mul_ceil, mul_floor, Frac};

/// Largest inner alphabet the builders will instantiate.
const ALPHABET_CAP: i64 = 1 << 20;

/// Seed for the verifier's pair sampling.
const VERIFY_SEED: u64 = 23;

/// Parameter source for the high-noise construction.
#[derive(Clone, Debug)]
pub enum HighNoiseMode {
    /// Reference formulas: inner alphabet k = ceil(4096/eps^3), block
    /// length m = ceil(24*log2(q)/eps), outer rate (eps/8)^4.
    Reference,
    /// Directly chosen inner alphabet, block length, and outer rate;
    /// the decodable-fraction split is still derived from eps.
    Explicit { k: u32, m: usize, outer_rate: Frac },
}

/// Parameter source for the near-optimal k-ary construction.
#[derive(Clone, Debug)]
pub enum KaryMode {
    /// The reference parameterization is a probabilistic existence
    /// bound whose rate (gamma/k)^Omega(1/gamma^3) fixes no usable
    /// block length; this mode validates inputs and then reports the
    /// resource limit.
    Reference,
    Explicit { m: usize, outer_rate: Frac },
}

fn quartic(f: Frac) -> Result<Frac> {
    f.checked_mul(&f)
        .and_then(|s| s.checked_mul(&s))
        .ok_or_else(|| Error::Arithmetic(format!("quartic of {f} overflows exact arithmetic")))
}

fn cube(f: Frac) -> Result<Frac> {
    f.checked_mul(&f)
        .and_then(|s| s.checked_mul(&f))
        .ok_or_else(|| Error::Arithmetic(format!("cube of {f} overflows exact arithmetic")))
}

/// Exact `ceil(mult * log2(q))` using only integer comparisons: with
/// `mult = p/r`, the least M with r*M >= p*log2(q) is read off the bit
/// length of q^p (q is a power of two on the exact fast path).
fn ceil_mult_log2(q: u64, mult: Frac) -> Result<usize> {
    debug_assert!(q >= 2);
    debug_assert!(mult > Frac::from_integer(0));
    if q.is_power_of_two() {
        let e = frac(q.trailing_zeros() as i64, 1);
        let scaled = mult
            .checked_mul(&e)
            .ok_or_else(|| Error::Arithmetic("log scaling overflows".into()))?;
        return Ok(mul_ceil(scaled, 1));
    }
    let p = usize::try_from(*mult.numer())
        .map_err(|_| Error::Arithmetic(format!("multiplier {mult} too large for exact logs")))?;
    let r = *mult.denom() as u64;
    // q is not a power of two, so neither is q^p, and 2^x >= q^p
    // exactly when x >= bits(q^p).
    let bits = num::pow(BigUint::from(q), p).bits();
    Ok(bits.div_ceil(r) as usize)
}

pub fn build_highnoise(eps: Frac, q: u64, mode: &HighNoiseMode) -> Result<ConcatCodeSpec> {
    build_highnoise_with(eps, q, mode, &SearchOptions::default())
}

pub fn build_highnoise_with(
    eps: Frac,
    q: u64,
    mode: &HighNoiseMode,
    opts: &SearchOptions,
) -> Result<ConcatCodeSpec> {
    let zero = Frac::from_integer(0);
    let one = Frac::from_integer(1);
    match *mode {
        HighNoiseMode::Reference => {
            if eps <= zero || eps >= frac(1, 2) {
                return Err(Error::InvalidInput(format!(
                    "high-noise reference mode needs 0 < eps < 1/2, got {eps}"
                )));
            }
            let k_frac = frac(4096, 1) / cube(eps)?;
            if k_frac > frac(ALPHABET_CAP, 1) {
                return Err(Error::ResourceLimit(format!(
                    "eps = {eps} asks for an inner alphabet of {k_frac} symbols \
                     (cap {ALPHABET_CAP}); use explicit mode"
                )));
            }
            let k = mul_ceil(k_frac, 1) as u32;
            let m = ceil_mult_log2(q, frac(24, 1) / eps)?;
            let outer_rate = quartic(eps / frac(8, 1))?;
            assemble_concat(eps, q, k, m, outer_rate, opts)
        }
        HighNoiseMode::Explicit { k, m, outer_rate } => {
            if eps <= zero || eps >= one {
                return Err(Error::InvalidInput(format!(
                    "explicit high-noise mode needs 0 < eps < 1, got {eps}"
                )));
            }
            if k < 2 || m == 0 {
                return Err(Error::InvalidInput(
                    "inner alphabet must have k >= 2 and m >= 1".into(),
                ));
            }
            if outer_rate <= zero || outer_rate > one {
                return Err(Error::InvalidInput(format!(
                    "outer rate must lie in (0, 1], got {outer_rate}"
                )));
            }
            assemble_concat(eps, q, k, m, outer_rate, opts)
        }
    }
}

/// Common tail: the inner code gives up an eps/4 fraction, the list
/// stage the remaining 3*eps/4, so the decode budget lands at exactly
/// `floor((1-eps) * N)`.
fn assemble_concat(
    eps: Frac,
    q: u64,
    k: u32,
    m: usize,
    outer_rate: Frac,
    opts: &SearchOptions,
) -> Result<ConcatCodeSpec> {
    let field = FieldSpec::with_order(q)?;
    let n = q as usize;
    let d = mul_ceil(outer_rate, n).max(1);
    let outer = RsCodeSpec::new(field, n, d)?;
    let delta = eps / frac(4, 1);
    let gamma = eps * frac(3, 4);
    let tau = Frac::from_integer(1) - delta;
    let search_opts = SearchOptions {
        target_size: Some(n * n),
        max_candidates: opts.max_candidates,
        seed: opts.seed,
    };
    let inner = search_kary_with(m, k, tau, &search_opts)?;
    ConcatCodeSpec::new(outer, inner, delta, gamma)
}

pub fn build_kary(k: u32, eps: Frac, q: u64, mode: &KaryMode) -> Result<ConcatCodeSpec> {
    build_kary_with(k, eps, q, mode, &SearchOptions::default())
}

pub fn build_kary_with(
    k: u32,
    eps: Frac,
    q: u64,
    mode: &KaryMode,
    opts: &SearchOptions,
) -> Result<ConcatCodeSpec> {
    let zero = Frac::from_integer(0);
    let one = Frac::from_integer(1);
    if k < 2 {
        return Err(Error::InvalidInput(format!("alphabet {k} below 2")));
    }
    if eps <= zero {
        return Err(Error::InvalidInput(format!(
            "target slack must be positive, got {eps}"
        )));
    }
    if frac(2, k as i64 + 1) + eps >= one {
        return Err(Error::InvalidInput(format!(
            "2/(k+1) + eps = {} leaves no decodable fraction",
            frac(2, k as i64 + 1) + eps
        )));
    }
    let gamma = frac(2, 1) * quartic(eps / frac(5, 1))?;
    match *mode {
        KaryMode::Reference => Err(Error::ResourceLimit(format!(
            "the near-optimal regime's probabilistic existence bound fixes no \
             usable block length at rate (gamma/k)^Omega(1/gamma^3) with \
             gamma = {gamma}; choose explicit parameters"
        ))),
        KaryMode::Explicit { m, outer_rate } => {
            if m == 0 {
                return Err(Error::InvalidInput("block length m must be positive".into()));
            }
            if outer_rate <= zero || outer_rate > one {
                return Err(Error::InvalidInput(format!(
                    "outer rate must lie in (0, 1], got {outer_rate}"
                )));
            }
            let field = FieldSpec::with_order(q)?;
            let n = q as usize;
            let d = mul_ceil(outer_rate, n).max(1);
            let outer = RsCodeSpec::new(field, n, d)?;
            let delta = frac(2, k as i64 + 1) + gamma / frac(4, 1);
            let tau = Frac::from_integer(1) - delta;
            let inner = search_with_probe(m, k, tau, n * n, opts)?;
            ConcatCodeSpec::new(outer, inner, delta, gamma)
        }
    }
}

/// Runs the k-ary search; on failure, probes a few coarser target
/// fractions (in steps of the radius grid 1/m) so the error can say
/// what this alphabet and length do achieve.
fn search_with_probe(
    m: usize,
    k: u32,
    tau: Frac,
    target: usize,
    opts: &SearchOptions,
) -> Result<CodeTable> {
    let search_opts = SearchOptions {
        target_size: Some(target),
        max_candidates: opts.max_candidates,
        seed: opts.seed,
    };
    match search_kary_with(m, k, tau, &search_opts) {
        Err(Error::ConstructionFailure(orig)) => {
            let small_space = (k as u128)
                .checked_pow(m as u32)
                .is_some_and(|space| space <= opts.max_candidates as u128);
            let mut note = String::from("no smaller fraction available to probe");
            if small_space {
                note = "no fraction in the probe range reaches this table size".into();
                for r in (0..mul_floor(tau, m)).rev().take(8) {
                    if let Ok(t) =
                        search_kary_with(m, k, frac(r as i64, m as i64), &search_opts)
                    {
                        note = format!(
                            "largest fraction achieved by a probe search: {}/{m}",
                            t.verified_radius()
                        );
                        break;
                    }
                }
            }
            Err(Error::ConstructionFailure(format!("{orig}; {note}")))
        }
        other => other,
    }
}

/// One executed verification with its outcome.
#[derive(Clone, Debug)]
pub struct RegimeCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Measured summary of a constructed code: parameter echo, achieved
/// rate, the fraction of edits the decoder is designed for, and one
/// entry per executed check. Flags are never assumed — each one is the
/// outcome of a computation done here.
#[derive(Clone, Debug)]
pub struct RegimeReport {
    pub params: Vec<(String, String)>,
    pub rate: f64,
    pub decodable_fraction: Frac,
    pub checks: Vec<RegimeCheck>,
}

impl RegimeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `key=value` lines, then one PASS/FAIL line per check.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.params {
            out.push_str(&format!("{k}={v}\n"));
        }
        out.push_str(&format!("rate={}\n", self.rate));
        out.push_str(&format!("decodable_fraction={}\n", self.decodable_fraction));
        for c in &self.checks {
            let flag = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("check {}: {} ({})\n", c.name, flag, c.detail));
        }
        out
    }
}

/// A constructed code the verifier knows how to measure.
pub enum CodeUnderTest<'a> {
    Concat(&'a ConcatCodeSpec),
    Buffered(&'a HighRateSpec),
}

/// Re-checks a constructed code's claims by measurement: the inner
/// table's radius, the concatenation LCS bound on encoded message
/// pairs, and the spec's own invariants. `effort` caps the pair count
/// per check; failures are reported in the result, never thrown.
pub fn verify_code(code: &CodeUnderTest, effort: usize) -> RegimeReport {
    match code {
        CodeUnderTest::Concat(spec) => verify_concat(spec, effort),
        CodeUnderTest::Buffered(spec) => verify_buffered(spec, effort),
    }
}

fn verify_concat(spec: &ConcatCodeSpec, effort: usize) -> RegimeReport {
    let mut rng = ChaCha20Rng::seed_from_u64(VERIFY_SEED);
    let inner = spec.inner();
    let (n, m) = (spec.n(), spec.m());
    let d = spec.outer().d();
    let order = spec.outer().field().order() as u64;
    let max_in = m - 1 - inner.verified_radius();

    let mut checks = vec![check_inner_radius(inner, effort, &mut rng)];
    checks.push(check_concat_bound(
        spec.outer(),
        max_in,
        m,
        effort,
        &mut rng,
        |msg| concat_encode(spec, msg).map(|w| w.syms().to_vec()),
    ));

    let mut violations = Vec::new();
    if spec.outer().n() != order as usize {
        violations.push("outer length differs from the field order".to_string());
    }
    if inner.len() != n * n {
        violations.push(format!("inner table has {} of {} entries", inner.len(), n * n));
    }
    let zero = Frac::from_integer(0);
    if spec.delta() <= zero || spec.gamma() <= zero
        || spec.delta() + spec.gamma() >= Frac::from_integer(1)
    {
        violations.push("fraction split leaves no decode budget".to_string());
    }
    let needed = mul_floor(Frac::from_integer(1) - spec.delta(), m);
    if inner.verified_radius() < needed {
        violations.push(format!(
            "inner radius claim {} below the required {needed}",
            inner.verified_radius()
        ));
    }
    checks.push(RegimeCheck {
        name: "spec-invariants",
        pass: violations.is_empty(),
        detail: if violations.is_empty() {
            "all structural invariants re-verified".into()
        } else {
            violations.join("; ")
        },
    });

    // Combinatorial radius: the measured normalized LCS bound
    // outer (d-1)/n + 2 * inner/m must leave the decode budget inside
    // the code's packing radius.
    let bound = frac(d as i64 - 1, n as i64) + frac(2 * max_in as i64, m as i64);
    let loss = spec.delta() + spec.gamma();
    checks.push(RegimeCheck {
        name: "combinatorial-radius",
        pass: bound < loss,
        detail: format!("lcs bound {bound} vs tolerated loss {loss}"),
    });

    let total = spec.total_len();
    let rate = d as f64 * (order as f64).log2()
        / (total as f64 * (inner.k() as f64).log2());
    RegimeReport {
        params: vec![
            ("kind".into(), "concat".into()),
            ("n".into(), n.to_string()),
            ("m".into(), m.to_string()),
            ("k".into(), inner.k().to_string()),
            ("order".into(), order.to_string()),
            ("d".into(), d.to_string()),
            ("total_len".into(), total.to_string()),
            ("delta".into(), spec.delta().to_string()),
            ("gamma".into(), spec.gamma().to_string()),
            ("inner_size".into(), inner.len().to_string()),
        ],
        rate,
        decodable_fraction: Frac::from_integer(1) - spec.delta() - spec.gamma(),
        checks,
    }
}

fn verify_buffered(spec: &HighRateSpec, effort: usize) -> RegimeReport {
    let mut rng = ChaCha20Rng::seed_from_u64(VERIFY_SEED);
    let inner = spec.inner();
    let (n, m) = (spec.n(), spec.m());
    let d = spec.outer().d();
    let order = spec.outer().field().order() as u64;
    let max_in = m - 1 - inner.verified_radius();

    let mut checks = vec![check_inner_radius(inner, effort, &mut rng)];
    // The bound applies to the buffer-free block concatenation.
    checks.push(check_concat_bound(
        spec.outer(),
        max_in,
        m,
        effort,
        &mut rng,
        |msg| {
            let values = rs_encode(spec.outer(), msg)?;
            let mut syms = Vec::with_capacity(n * m);
            for (i, &v) in values.iter().enumerate() {
                syms.extend_from_slice(inner_encode(inner, spec.pack_index(i, v))?.syms());
            }
            Ok(syms)
        },
    ));

    let mut violations = Vec::new();
    let expected = (order as usize) * spec.n();
    if inner.len() != expected {
        violations.push(format!("inner table has {} of {expected} entries", inner.len()));
    }
    if inner.k() != 2 {
        violations.push("inner table is not binary".to_string());
    }
    if inner.density().is_none() {
        violations.push("inner table carries no density guarantee".to_string());
    }
    if inner
        .codewords()
        .iter()
        .any(|w| w.syms()[0] != 1 || w.syms()[w.len() - 1] != 1)
    {
        violations.push("an inner codeword does not start and end with 1".to_string());
    }
    if inner.verified_radius() < spec.inner_distance() {
        violations.push(format!(
            "inner radius claim {} below the required {}",
            inner.verified_radius(),
            spec.inner_distance()
        ));
    }
    checks.push(RegimeCheck {
        name: "spec-invariants",
        pass: violations.is_empty(),
        detail: if violations.is_empty() {
            "all structural invariants re-verified".into()
        } else {
            violations.join("; ")
        },
    });

    let total = spec.total_len();
    let rate = d as f64 * (order as f64).log2() / total as f64;
    RegimeReport {
        params: vec![
            ("kind".into(), "buffered".into()),
            ("n".into(), n.to_string()),
            ("m".into(), m.to_string()),
            ("h".into(), spec.h().to_string()),
            ("order".into(), order.to_string()),
            ("d".into(), d.to_string()),
            ("buffer_len".into(), spec.buffer_len().to_string()),
            ("total_len".into(), total.to_string()),
            ("delta".into(), spec.delta().to_string()),
            ("theta_buf".into(), spec.theta_buf().to_string()),
            ("eps".into(), spec.eps().to_string()),
        ],
        rate,
        decodable_fraction: spec.eps(),
        checks,
    }
}

/// Recomputes the inner table's pairwise-LCS radius — exhaustively when
/// the pair count fits the effort budget, on sampled pairs otherwise —
/// and compares it with the table's claim.
fn check_inner_radius(table: &CodeTable, effort: usize, rng: &mut ChaCha20Rng) -> RegimeCheck {
    let len = table.len();
    let m = table.m();
    let claimed = table.verified_radius();
    let total_pairs = len * (len - 1) / 2;
    if total_pairs == 0 {
        return RegimeCheck {
            name: "inner-radius",
            pass: true,
            detail: "single-word table; radius is definitional".into(),
        };
    }
    if total_pairs <= effort {
        let max = seqkit::lcs_of_code(table.codewords()).expect("table words are uniform");
        let recomputed = m - 1 - max;
        return RegimeCheck {
            name: "inner-radius",
            pass: recomputed >= claimed,
            detail: format!(
                "exhaustive over {total_pairs} pairs: recomputed {recomputed}, claimed {claimed}"
            ),
        };
    }
    let mut worst = 0usize;
    for _ in 0..effort {
        let i = rng.random_range(0..len);
        let mut j = rng.random_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        let l = LcsPattern::new(&table.codewords()[i]).lcs_with(table.codewords()[j].syms());
        worst = worst.max(l);
    }
    RegimeCheck {
        name: "inner-radius",
        pass: m - 1 - worst >= claimed,
        detail: format!(
            "sampled {effort} pairs: worst LCS {worst} allows radius {}, claimed {claimed}",
            m - 1 - worst
        ),
    }
}

/// Checks, over message pairs, that the concatenated words' LCS never
/// exceeds `outer_lcs*m + 2*max_inner_lcs*n` — the staircase bound
/// that caps any common subsequence by its full-block matches (which
/// form a common subsequence of the outer words, wherever they align)
/// plus two partial matches per block boundary.
fn check_concat_bound(
    outer: &RsCodeSpec,
    max_in: usize,
    m: usize,
    effort: usize,
    rng: &mut ChaCha20Rng,
    encode: impl Fn(&Poly) -> Result<Vec<u32>>,
) -> RegimeCheck {
    let order = outer.field().order() as u64;
    let n = outer.n();
    let d = outer.d() as u32;
    let space = (order as u128).pow(d);
    let exhaustive = space
        .checked_mul(space.saturating_sub(1))
        .is_some_and(|double| double / 2 <= effort as u128);

    let message = |index: u128| {
        let mut rem = index;
        let coeffs = (0..d)
            .map(|_| {
                let c = (rem % order as u128) as u32;
                rem /= order as u128;
                Fe(c)
            })
            .collect();
        Poly::from_coeffs(coeffs)
    };
    let mut pairs: Vec<(Poly, Poly)> = Vec::new();
    if exhaustive {
        for i in 0..space {
            for j in i + 1..space {
                pairs.push((message(i), message(j)));
            }
        }
    } else {
        // Message spaces can exceed any index type, so sample by
        // drawing coefficients directly.
        let draw = |rng: &mut ChaCha20Rng| {
            Poly::from_coeffs(
                (0..d)
                    .map(|_| Fe(rng.random_range(0..order as u32)))
                    .collect(),
            )
        };
        while pairs.len() < effort {
            let a = draw(rng);
            let b = draw(rng);
            if a != b {
                pairs.push((a, b));
            }
        }
    }

    let count = pairs.len();
    let mut worst_slack = i64::MIN;
    for (a, b) in pairs {
        let (va, vb) = match (rs_encode(outer, &a), rs_encode(outer, &b)) {
            (Ok(va), Ok(vb)) => (va, vb),
            _ => {
                return RegimeCheck {
                    name: "concat-lcs-bound",
                    pass: false,
                    detail: "outer encoding failed on a sampled message".into(),
                }
            }
        };
        let va_syms: Vec<u32> = va.iter().map(|f| f.0).collect();
        let vb_syms: Vec<u32> = vb.iter().map(|f| f.0).collect();
        let outer_lcs = LcsPattern::from_syms(&va_syms).lcs_with(&vb_syms);
        let (wa, wb) = match (encode(&a), encode(&b)) {
            (Ok(wa), Ok(wb)) => (wa, wb),
            _ => {
                return RegimeCheck {
                    name: "concat-lcs-bound",
                    pass: false,
                    detail: "concatenated encoding failed on a sampled message".into(),
                }
            }
        };
        let lcs = LcsPattern::from_syms(&wa).lcs_with(&wb);
        let bound = outer_lcs * m + 2 * max_in * n;
        if lcs > bound {
            return RegimeCheck {
                name: "concat-lcs-bound",
                pass: false,
                detail: format!("a pair reached LCS {lcs} above its bound {bound}"),
            };
        }
        worst_slack = worst_slack.max(lcs as i64 - bound as i64);
    }
    let mode = if exhaustive { "exhaustive" } else { "sampled" };
    RegimeCheck {
        name: "concat-lcs-bound",
        pass: true,
        detail: format!("{mode} over {count} pairs; worst slack {worst_slack}"),
    }
}
