//! Error-correcting codes for channels that insert and delete symbols.
//!
//! The crate is organized bottom-up:
//!
//! - [`seqkit`]: symbol strings, longest common subsequence (bit-parallel
//!   kernel plus a simple reference), insdel distance, code radius, and
//!   exhaustive decodability checks by ball enumeration.
//! - [`gf`]: finite fields `GF(p^e)` with packed-integer element encoding,
//!   polynomial arithmetic, and linear algebra over a field.
//! - [`rs`]: Reed-Solomon encoding, unique decoding with errors and
//!   erasures, and Sudan-style list decoding for low-rate codes.
//! - [`innersearch`]: greedy searches for small codes with guaranteed
//!   pairwise LCS bounds, plus fast nearest-codeword decoding.
//! - [`channel`]: adversarial and random corruption within an edit budget,
//!   with replayable plans.
//! - [`highrate`]: a concatenated construction with buffers between inner
//!   blocks, decoded by buffer scanning; corrects a small constant
//!   fraction of insdel errors at rate close to the outer code's.
//! - [`listconcat`]: a concatenated construction decoded by a window sweep
//!   feeding a list decoder; corrects error fractions approaching 1.
//! - [`regimes`]: preset builders tying the constructions to named
//!   parameter regimes, and code verification reports.

pub mod channel;
pub mod error;
pub mod gf;
pub mod highrate;
pub mod innersearch;
pub mod listconcat;
pub mod regimes;
pub mod rs;
pub mod seqkit;

pub use error::{Error, Result};

/// Exact fraction for code parameters (error fractions, rates, slacks).
///
/// Thresholds in this crate are strict or non-strict comparisons against
/// products like `(1 - delta) * m`; doing these in floating point walks
/// straight into off-by-one bugs whenever the product lands on an
/// integer, so parameters stay rational end to end.
pub type Frac = num::rational::Ratio<i64>;

/// Shorthand constructor; panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Frac {
    Frac::new(num, den)
}

/// `floor(f * n)`, for nonnegative `f`.
pub fn mul_floor(f: Frac, n: usize) -> usize {
    let v = f * Frac::from_integer(n as i64);
    debug_assert!(v >= Frac::from_integer(0));
    v.floor().to_integer() as usize
}

/// `ceil(f * n)`, for nonnegative `f`.
pub fn mul_ceil(f: Frac, n: usize) -> usize {
    let v = f * Frac::from_integer(n as i64);
    debug_assert!(v >= Frac::from_integer(0));
    v.ceil().to_integer() as usize
}

/// The largest integer strictly below `f * n`. May be negative when the
/// product is at most zero; callers compare rather than index with it.
pub fn strict_cap(f: Frac, n: usize) -> i64 {
    let v = f * Frac::from_integer(n as i64);
    v.ceil().to_integer() - 1
}

/// Smallest grid fraction `g / grid` whose `k`-th power is at least
/// `f`, for nonnegative `f`. Parameters defined through irrational
/// roots are replaced by this upper bound so that thresholds derived
/// from them only get stricter and budgets only shrink.
pub fn root_upper(f: Frac, k: u32, grid: i64) -> Frac {
    assert!(k >= 1 && grid >= 1 && f >= Frac::from_integer(0));
    if f == Frac::from_integer(0) {
        return f;
    }
    let mut lo = 0i64; // (lo/grid)^k < f
    let mut hi = 1i64;
    while Frac::new(hi, grid).pow(k as i32) < f {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if Frac::new(mid, grid).pow(k as i32) < f {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Frac::new(hi, grid)
}

/// Parses `"2/3"`, `"0.25"`, or `"3"` into an exact fraction.
pub fn parse_frac(text: &str) -> Result<Frac> {
    let bad = || Error::InvalidInput(format!("cannot parse fraction from {text:?}"));
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num: i64 = n.trim().parse().map_err(|_| bad())?;
        let den: i64 = d.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Frac::new(num, den));
    }
    if let Some((whole, dec)) = t.split_once('.') {
        if dec.is_empty() || dec.len() > 15 || !dec.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let w: i64 = if whole == "-" { 0 } else { whole.parse().map_err(|_| bad())? };
        let scale = 10i64.pow(dec.len() as u32);
        let d: i64 = dec.parse().map_err(|_| bad())?;
        let num = w.checked_mul(scale).ok_or_else(bad)?;
        let frac_part = if negative { -d } else { d };
        let num = num.checked_add(frac_part).ok_or_else(bad)?;
        return Ok(Frac::new(num, scale));
    }
    let whole: i64 = t.parse().map_err(|_| bad())?;
    Ok(Frac::from_integer(whole))
}

#[cfg(test)]
mod frac_tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_frac("2/3").unwrap(), frac(2, 3));
        assert_eq!(parse_frac("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse_frac("3").unwrap(), frac(3, 1));
        assert_eq!(parse_frac("-0.5").unwrap(), frac(-1, 2));
        assert_eq!(parse_frac("1/0").unwrap_err().to_string().contains("fraction"), true);
        assert!(parse_frac("abc").is_err());
    }

    #[test]
    fn root_upper_is_the_least_grid_bound() {
        // sqrt(1/14641) = 1/121; the tightest 1/4096 grid point above
        // it is 34/4096.
        let r = root_upper(frac(1, 14641), 2, 4096);
        assert_eq!(r, frac(34, 4096));
        assert!(r * r >= frac(1, 14641));
        assert!(frac(33, 4096) * frac(33, 4096) < frac(1, 14641));
        // Exact powers are returned exactly when on the grid.
        assert_eq!(root_upper(frac(1, 4), 2, 4096), frac(1, 2));
        assert_eq!(root_upper(frac(1, 16), 4, 4096), frac(1, 2));
        assert_eq!(root_upper(frac(0, 1), 3, 4096), frac(0, 1));
        assert_eq!(root_upper(frac(16, 1), 2, 8), frac(4, 1));
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(mul_floor(frac(1, 3), 10), 3);
        assert_eq!(mul_ceil(frac(1, 3), 10), 4);
        assert_eq!(mul_ceil(frac(1, 2), 4), 2);
        // Strict cap drops to v-1 exactly when the product is integral.
        assert_eq!(strict_cap(frac(2, 3), 6), 3);
        assert_eq!(strict_cap(frac(2, 3), 7), 4);
        assert_eq!(strict_cap(frac(1, 2), 1), 0);
        assert_eq!(strict_cap(frac(0, 1), 5), -1);
    }
}
