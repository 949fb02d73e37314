//! List decoding past half the minimum distance: weighted-degree
//! bivariate interpolation followed by recursive Y-root extraction.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::{nullspace_vector, Fe, FieldSpec, Poly};
use crate::rs::{CandidateSet, RsCodeSpec};

/// Finds every polynomial of degree < d whose graph meets `points` in
/// at least `agreement` pairs. Sound whenever
/// `agreement^2 > 2 * d * |points|`; thresholds at or below that bound
/// are rejected as invalid input. The returned list is sorted by
/// coefficient vector and never exceeds sqrt(2|points|/d) entries.
pub fn sudan_list_decode(
    spec: &RsCodeSpec,
    points: &CandidateSet,
    agreement: usize,
) -> Result<Vec<Poly>> {
    let field = spec.field();
    let d = spec.d();
    for &(a, b) in points.iter() {
        field.elt(a.0)?;
        field.elt(b.0)?;
    }
    if agreement == 0 || agreement * agreement <= 2 * d * points.len() {
        return Err(Error::InvalidInput(format!(
            "agreement threshold {agreement} is not above the sound bound \
             sqrt(2 * {d} * {})",
            points.len()
        )));
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }

    let mut found: BTreeSet<Poly> = BTreeSet::new();
    if d == 1 {
        // Candidates are constants; no interpolation needed.
        for c in field.elements() {
            let p = Poly::constant(c);
            if points.agreement(field, &p) >= agreement {
                found.insert(p);
            }
        }
    } else {
        let q_poly = interpolate(field, d, points, agreement);
        let mut out = Vec::new();
        y_roots(field, &q_poly, d, &mut Vec::new(), &mut out);
        for coeffs in out {
            let p = Poly::from_coeffs(coeffs);
            if points.agreement(field, &p) >= agreement {
                found.insert(p);
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Builds a nonzero Q(X, Y) = sum_j q_j(X) Y^j with
/// deg q_j <= agreement - 1 - j*(d-1) that vanishes on every pair.
/// The monomial count strictly exceeds |points| whenever the caller's
/// soundness gate holds, so the kernel is nonempty.
fn interpolate(field: &FieldSpec, d: usize, points: &CandidateSet, agreement: usize) -> Vec<Poly> {
    let w = d - 1;
    let ell = (agreement - 1) / w;
    let x_len: Vec<usize> = (0..=ell).map(|j| agreement - j * w).collect();
    let total: usize = x_len.iter().sum();
    debug_assert!(total > points.len(), "kernel could be empty");

    let rows: Vec<Vec<Fe>> = points
        .iter()
        .map(|&(a, b)| {
            let mut row = Vec::with_capacity(total);
            let mut bp = field.one();
            for &len in &x_len {
                let mut ap = bp;
                for _ in 0..len {
                    row.push(ap);
                    ap = field.mul(ap, a);
                }
                bp = field.mul(bp, b);
            }
            row
        })
        .collect();
    let sol = nullspace_vector(field, &rows).expect("underdetermined system has a kernel");
    let mut q = Vec::with_capacity(ell + 1);
    let mut off = 0;
    for &len in &x_len {
        q.push(Poly::from_coeffs(sol[off..off + len].to_vec()));
        off += len;
    }
    q
}

fn q_is_zero(q: &[Poly]) -> bool {
    q.iter().all(Poly::is_zero)
}

/// Divides out the largest power of X dividing every coefficient.
fn strip_x(q: &[Poly]) -> Vec<Poly> {
    let shift = q
        .iter()
        .filter_map(|p| p.coeffs().iter().position(|c| c.0 != 0))
        .min()
        .unwrap_or(0);
    q.iter()
        .map(|p| {
            if p.is_zero() {
                Poly::zero()
            } else {
                Poly::from_coeffs(p.coeffs()[shift..].to_vec())
            }
        })
        .collect()
}

/// Substitutes Y <- X*Y + a, by Horner in the Y variable.
fn shift_substitute(field: &FieldSpec, q: &[Poly], a: Fe) -> Vec<Poly> {
    let mut acc: Vec<Poly> = Vec::new();
    for qj in q.iter().rev() {
        // acc <- acc * (X*Y + a) + q_j
        let mut next: Vec<Poly> = Vec::with_capacity(acc.len() + 1);
        next.push(qj.clone());
        for (i, c) in acc.iter().enumerate() {
            let scaled = c.scale(field, a);
            match next.get_mut(i) {
                Some(slot) => *slot = slot.add(field, &scaled),
                None => next.push(scaled),
            }
        }
        for (i, c) in acc.iter().enumerate() {
            let lifted = c.shift_up(1);
            match next.get_mut(i + 1) {
                Some(slot) => *slot = slot.add(field, &lifted),
                None => next.push(lifted),
            }
        }
        acc = next;
    }
    while acc.last().is_some_and(Poly::is_zero) {
        acc.pop();
    }
    acc
}

/// Collects candidate coefficient vectors (a_0, ..., a_{d-1}) along the
/// classic recursion: at each level the next coefficient must be a root
/// of Q(0, Y). Necessary but not sufficient, so callers re-filter by
/// agreement; every true Y-root of the original Q survives to the output.
fn y_roots(field: &FieldSpec, q: &[Poly], depth: usize, prefix: &mut Vec<Fe>, out: &mut Vec<Vec<Fe>>) {
    if q_is_zero(q) {
        // Unreachable from a nonzero interpolant (the substitution is
        // invertible), but guard so recursion cannot misbehave.
        return;
    }
    let stripped = strip_x(q);
    let at_zero: Vec<Fe> = stripped
        .iter()
        .map(|p| p.coeff(0))
        .collect();
    let u = Poly::from_coeffs(at_zero);
    for a in field.elements() {
        if u.eval(field, a).0 != 0 {
            continue;
        }
        prefix.push(a);
        if depth == 1 {
            out.push(prefix.clone());
        } else {
            let next = shift_substitute(field, &stripped, a);
            y_roots(field, &next, depth - 1, prefix, out);
        }
        prefix.pop();
    }
}
