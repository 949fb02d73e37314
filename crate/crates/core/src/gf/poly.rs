//! Polynomials over a [`FieldSpec`] and the small dense linear algebra
//! the decoders need.

use super::{Fe, FieldSpec};
use crate::error::{Error, Result};

/// A polynomial with coefficients lowest-degree first. Canonical form:
/// no trailing zero coefficient; the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Fe) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// Normalizes: strips trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last() == Some(&Fe(0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe(0))
    }

    pub fn eval(&self, field: &FieldSpec, x: Fe) -> Fe {
        let mut acc = Fe(0);
        for &c in self.coeffs.iter().rev() {
            acc = field.add(field.mul(acc, x), c);
        }
        acc
    }

    pub fn add(&self, field: &FieldSpec, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| field.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, field: &FieldSpec, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| field.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, field: &FieldSpec, c: Fe) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &FieldSpec, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Multiplies by `x^s`.
    pub fn shift_up(&self, s: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Fe(0); s];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `self = q*divisor + r` and `deg r < deg divisor`.
    pub fn divrem(&self, field: &FieldSpec, divisor: &Poly) -> Result<(Poly, Poly)> {
        if divisor.is_zero() {
            return Err(Error::Arithmetic("polynomial division by zero".into()));
        }
        let dlead = *divisor.coeffs.last().unwrap();
        let dinv = field.inv(dlead)?;
        let ddeg = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Fe(0); self.coeffs.len().saturating_sub(ddeg)];
        while rem.len() > ddeg {
            let lead = *rem.last().unwrap();
            if lead == Fe(0) {
                rem.pop();
                continue;
            }
            let factor = field.mul(lead, dinv);
            let shift = rem.len() - 1 - ddeg;
            quot[shift] = factor;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = field.sub(rem[shift + i], field.mul(factor, dc));
            }
            debug_assert_eq!(*rem.last().unwrap(), Fe(0));
            rem.pop();
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }
}

/// Interpolation with a degree bound: `Ok(Some(p))` when a polynomial of
/// degree < `degree_bound` passes through every point, `Ok(None)` when
/// none does, and an error for duplicate evaluation points.
pub fn poly_interpolate(
    field: &FieldSpec,
    points: &[(Fe, Fe)],
    degree_bound: usize,
) -> Result<Option<Poly>> {
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|(xj, _)| xj == xi) {
            return Err(Error::InvalidInput(format!(
                "duplicate evaluation point {xi}"
            )));
        }
    }
    if points.is_empty() {
        return Ok(Some(Poly::zero()));
    }
    // Lagrange: the unique degree-<|points| fit; a degree-<bound fit
    // exists iff this one already obeys the bound.
    let mut acc = Poly::zero();
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut basis = Poly::constant(Fe(1));
        let mut denom = Fe(1);
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = basis.mul(field, &Poly::from_coeffs(vec![field.neg(xj), Fe(1)]));
            denom = field.mul(denom, field.sub(xi, xj));
        }
        let w = field.mul(yi, field.inv(denom)?);
        acc = acc.add(field, &basis.scale(field, w));
    }
    if acc.coeffs().len() > degree_bound {
        return Ok(None);
    }
    Ok(Some(acc))
}

/// Solves `A x = b` by Gaussian elimination; `None` when inconsistent.
/// Underdetermined systems get free variables set to zero.
pub fn gaussian_solve(
    field: &FieldSpec,
    a: &[Vec<Fe>],
    b: &[Fe],
) -> Option<Vec<Fe>> {
    assert_eq!(a.len(), b.len());
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Fe>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            assert_eq!(row.len(), cols);
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| m[r][col] != Fe(0)) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = field.inv(m[rank][col]).expect("pivot nonzero");
        for v in m[rank][col..].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != Fe(0) {
                let factor = m[r][col];
                for c in col..=cols {
                    let delta = field.mul(factor, m[rank][c]);
                    m[r][c] = field.sub(m[r][c], delta);
                }
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // Inconsistent iff a zero row has nonzero rhs.
    for r in 0..rows {
        if m[r][..cols].iter().all(|&v| v == Fe(0)) && m[r][cols] != Fe(0) {
            return None;
        }
    }
    let mut x = vec![Fe(0); cols];
    for col in 0..cols {
        if pivot_of_col[col] != usize::MAX {
            x[col] = m[pivot_of_col[col]][cols];
        }
    }
    Some(x)
}

/// A nonzero vector in the kernel of `A`, or `None` when the kernel is
/// trivial. Deterministic: the lowest-index free column carries the 1.
pub fn nullspace_vector(field: &FieldSpec, a: &[Vec<Fe>]) -> Option<Vec<Fe>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if cols == 0 {
        return None;
    }
    let mut m: Vec<Vec<Fe>> = a.to_vec();
    for row in &m {
        assert_eq!(row.len(), cols);
    }
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| m[r][col] != Fe(0)) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = field.inv(m[rank][col]).expect("pivot nonzero");
        for v in m[rank][col..].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != Fe(0) {
                let factor = m[r][col];
                for c in col..cols {
                    let delta = field.mul(factor, m[rank][c]);
                    m[r][c] = field.sub(m[r][c], delta);
                }
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let free = (0..cols).find(|&c| pivot_of_col[c] == usize::MAX)?;
    let mut x = vec![Fe(0); cols];
    x[free] = Fe(1);
    for col in 0..cols {
        let pr = pivot_of_col[col];
        if pr != usize::MAX {
            // Row: x[col] + sum_{c>col, non-pivot} m[pr][c]*x[c] = 0.
            x[col] = field.neg(m[pr][free]);
        }
    }
    Some(x)
}
