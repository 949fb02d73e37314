//! Reed-Solomon codes: evaluation encoding, unique decoding with errors
//! and erasures, and Sudan-style list decoding.

mod sudan;

pub use sudan::sudan_list_decode;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::{nullspace_vector, Fe, FieldSpec, Poly};

/// Parameters of one Reed-Solomon code: messages are polynomials of
/// degree < `d`, codewords their evaluations at the first `n` field
/// elements in packed-integer order. Minimum distance is `n - d + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsCodeSpec {
    field: FieldSpec,
    n: usize,
    d: usize,
}

impl RsCodeSpec {
    pub fn new(field: FieldSpec, n: usize, d: usize) -> Result<Self> {
        if n == 0 || n > field.order() as usize {
            return Err(Error::ParameterError(format!(
                "block length {n} must be in [1, {}] for this field",
                field.order()
            )));
        }
        if d == 0 || d > n {
            return Err(Error::ParameterError(format!(
                "degree bound {d} must be in [1, n={n}]"
            )));
        }
        Ok(Self { field, n, d })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Message length: polynomials of degree < d.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn distance(&self) -> usize {
        self.n - self.d + 1
    }

    /// Canonical evaluation points: packed values 0, 1, ..., n-1.
    pub fn eval_points(&self) -> impl Iterator<Item = Fe> {
        (0..self.n as u32).map(Fe)
    }
}

/// Evaluates the message polynomial at the canonical points.
pub fn rs_encode(spec: &RsCodeSpec, message: &Poly) -> Result<Vec<Fe>> {
    if message.coeffs().len() > spec.d {
        return Err(Error::InvalidInput(format!(
            "message degree {} exceeds bound {}",
            message.degree().unwrap_or(0),
            spec.d - 1
        )));
    }
    for &c in message.coeffs() {
        spec.field.elt(c.0)?;
    }
    Ok(spec
        .eval_points()
        .map(|x| message.eval(&spec.field, x))
        .collect())
}

/// Unique decoding with errors and erasures (`None` = erased).
///
/// Recovers the message whenever `2E + S < n - d + 1` over the actual
/// error count E and erasure count S. Outside that region it returns
/// a decode failure; it never silently returns a wrong polynomial that
/// would itself violate the bound, because every output is re-encoded
/// and checked against the received word before being released.
pub fn rs_decode_ee(spec: &RsCodeSpec, received: &[Option<Fe>]) -> Result<Poly> {
    let field = &spec.field;
    if received.len() != spec.n {
        return Err(Error::InvalidInput(format!(
            "received length {} != block length {}",
            received.len(),
            spec.n
        )));
    }
    for v in received.iter().flatten() {
        field.elt(v.0)?;
    }
    let present: Vec<(Fe, Fe)> = spec
        .eval_points()
        .zip(received)
        .filter_map(|(x, v)| v.map(|y| (x, y)))
        .collect();
    let s = spec.n - present.len();
    if s + spec.d > spec.n {
        return Err(Error::DecodeFailure(format!(
            "{s} erasures exceed the correctable budget n-d = {}",
            spec.n - spec.d
        )));
    }
    // Locator degree: the largest error count still inside the radius.
    let e = (spec.n - spec.d - s) / 2;

    // Solve W(x_i) y_i = N(x_i) with deg W <= e, deg N <= e+d-1. Inside
    // the radius the kernel is nonempty and every nonzero member has
    // N = f*W for the transmitted f.
    let w_len = e + 1;
    let n_len = e + spec.d;
    let rows: Vec<Vec<Fe>> = present
        .iter()
        .map(|&(x, y)| {
            let mut row = Vec::with_capacity(w_len + n_len);
            let mut xp = field.one();
            for _ in 0..w_len {
                row.push(field.mul(y, xp));
                xp = field.mul(xp, x);
            }
            let mut xp = field.one();
            for _ in 0..n_len {
                row.push(field.neg(xp));
                xp = field.mul(xp, x);
            }
            row
        })
        .collect();
    let sol = nullspace_vector(field, &rows)
        .ok_or_else(|| Error::DecodeFailure("no locator/evaluator pair exists".into()))?;
    let w_poly = Poly::from_coeffs(sol[..w_len].to_vec());
    let n_poly = Poly::from_coeffs(sol[w_len..].to_vec());
    if w_poly.is_zero() {
        return Err(Error::DecodeFailure("degenerate error locator".into()));
    }
    let (f, rem) = n_poly.divrem(field, &w_poly)?;
    if !rem.is_zero() || f.coeffs().len() > spec.d {
        return Err(Error::DecodeFailure(
            "received word has no codeword within the unique-decoding radius".into(),
        ));
    }
    // Acceptance: the candidate must itself sit inside the radius.
    let disagreements = present
        .iter()
        .filter(|&&(x, y)| f.eval(field, x) != y)
        .count();
    if 2 * disagreements + s < spec.distance() {
        Ok(f)
    } else {
        Err(Error::DecodeFailure(
            "received word has no codeword within the unique-decoding radius".into(),
        ))
    }
}

/// The set of (evaluation point, value) pairs harvested for list
/// decoding. A set: duplicate discoveries collapse; several values per
/// point may coexist. Iteration order is the canonical packed order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    pairs: BTreeSet<(Fe, Fe)>,
}

impl CandidateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, alpha: Fe, beta: Fe) -> bool {
        self.pairs.insert((alpha, beta))
    }

    pub fn contains(&self, alpha: Fe, beta: Fe) -> bool {
        self.pairs.contains(&(alpha, beta))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Fe, Fe)> {
        self.pairs.iter()
    }

    /// How many of the set's pairs lie on the graph of `p`: the number
    /// of points alpha with (alpha, p(alpha)) present.
    pub fn agreement(&self, field: &FieldSpec, p: &Poly) -> usize {
        self.pairs
            .iter()
            .filter(|&&(a, b)| p.eval(field, a) == b)
            .count()
    }
}

impl FromIterator<(Fe, Fe)> for CandidateSet {
    fn from_iter<T: IntoIterator<Item = (Fe, Fe)>>(iter: T) -> Self {
        CandidateSet {
            pairs: iter.into_iter().collect(),
        }
    }
}
