//! Finite fields `GF(p^e)` with table-driven arithmetic.
//!
//! Elements are packed integers in `[0, q)`: the element `sum c_i x^i`
//! packs as `sum c_i p^i`. Multiplication runs through discrete-log
//! tables over a fixed generator, so construction is `O(q)` time and
//! space and every operation afterwards is a couple of table lookups.

mod poly;

pub use poly::{gaussian_solve, nullspace_vector, poly_interpolate, Poly};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Orders above this would need >8 MiB of tables; reject rather than
/// silently thrash (desk-scale constructions stay far below it).
pub const MAX_ORDER: u64 = 1 << 20;

/// A field element, packed as an integer in `[0, q)`. Only meaningful
/// relative to the [`FieldSpec`] it came from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub u32);

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    /// exp[i] = g^i for i in 0..q-1, g the least generator.
    exp: Vec<u32>,
    /// log[v] with log[exp[i]] = i; log[0] is a sentinel, never read.
    log: Vec<u32>,
}

/// An immutable field `GF(p^e)`: characteristic, modulus, and the
/// multiplication tables. Cheap to clone (tables are shared).
///
/// The modulus is the lexicographically least monic irreducible of
/// degree `e` over `GF(p)` (least packed integer), so a `(p, e)` pair
/// names one reproducible field.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    /// Monic, degree e, coefficients lowest-first (length e+1).
    modulus: Vec<u32>,
    tables: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e
    }
}

impl Eq for FieldSpec {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over GF(p) as little-endian coefficient vectors with no
// trailing zeros; used only during field construction.
mod fp {
    pub fn trim(mut v: Vec<u32>) -> Vec<u32> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &ca) in a.iter().enumerate() {
            for (j, &cb) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ca * cb) % p;
            }
        }
        trim(out)
    }

    /// Remainder of a mod b; b monic with leading coefficient inverse
    /// precomputed by the caller being unnecessary (monic only).
    pub fn rem_monic(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        debug_assert!(b.last() == Some(&1));
        let mut r: Vec<u32> = a.to_vec();
        while r.len() >= b.len() {
            let lead = *r.last().unwrap();
            let shift = r.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                let sub = (lead * bc) % p;
                let idx = shift + i;
                r[idx] = (r[idx] + p - sub) % p;
            }
            r = trim(r);
            if r.len() < b.len() {
                break;
            }
        }
        r
    }

    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let e = f.len() - 1;
        if e == 0 {
            return false;
        }
        if e == 1 {
            return true;
        }
        // Trial division by every monic polynomial of degree 1..=e/2.
        for d in 1..=(e / 2) {
            let count = (p as u64).pow(d as u32);
            for packed in 0..count {
                let mut g = unpack(packed + count, p); // monic: leading digit 1
                g = trim(g);
                debug_assert_eq!(g.len(), d + 1);
                if rem_monic(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    pub fn unpack(mut v: u64, p: u32) -> Vec<u32> {
        let mut out = Vec::new();
        while v > 0 {
            out.push((v % p as u64) as u32);
            v /= p as u64;
        }
        out
    }
}

impl FieldSpec {
    /// Builds `GF(p^e)`. Deterministic: modulus and generator are the
    /// least candidates, so tables are identical across runs.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!(
                "characteristic {p} is not prime"
            )));
        }
        if e == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        let q64 = (p as u64).checked_pow(e).filter(|&q| q <= MAX_ORDER);
        let Some(q64) = q64 else {
            return Err(Error::ParameterError(format!(
                "field order {p}^{e} exceeds the supported maximum {MAX_ORDER}"
            )));
        };
        let q = q64 as u32;

        // Least monic irreducible of degree e: scan packed values upward.
        let base = (p as u64).pow(e);
        let modulus = (0..base)
            .map(|low| fp::unpack(base + low, p))
            .find(|f| fp::is_irreducible(f, p))
            .expect("an irreducible polynomial of every degree exists");

        let mut field = Self {
            p,
            e,
            q,
            modulus,
            tables: Arc::new(Tables {
                exp: Vec::new(),
                log: Vec::new(),
            }),
        };
        field.build_tables();
        Ok(field)
    }

    /// Builds the field of the given order, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Self> {
        if q < 2 || q > MAX_ORDER {
            return Err(Error::ParameterError(format!(
                "field order must be in [2, {MAX_ORDER}], got {q}"
            )));
        }
        let p = prime_factors(q.min(u32::MAX as u64) as u32);
        if p.len() != 1 {
            return Err(Error::InvalidInput(format!(
                "field order {q} is not a prime power"
            )));
        }
        let p = p[0];
        let mut e = 0u32;
        let mut acc = 1u64;
        while acc < q {
            acc *= p as u64;
            e += 1;
        }
        if acc != q {
            return Err(Error::InvalidInput(format!(
                "field order {q} is not a prime power"
            )));
        }
        Self::new(p, e)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        // Multiplication before tables exist: schoolbook mod modulus.
        let slow_mul = |a: u32, b: u32| -> u32 {
            let pa = fp::unpack(a as u64, self.p);
            let pb = fp::unpack(b as u64, self.p);
            let prod = fp::mul(&pa, &pb, self.p);
            let red = fp::rem_monic(&prod, &self.modulus, self.p);
            red.iter()
                .rev()
                .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64) as u32
        };
        let pow_slow = |mut base: u32, mut n: u64| -> u32 {
            let mut acc = 1u32;
            while n > 0 {
                if n & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                n >>= 1;
            }
            acc
        };
        let factors = prime_factors(q - 1);
        let g = (2..q)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&f| pow_slow(g, ((q - 1) / f) as u64) != 1)
            })
            .unwrap_or(1); // q = 2: trivial group, generator 1

        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut acc = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = acc;
            log[acc as usize] = i as u32;
            acc = slow_mul(acc, g);
        }
        debug_assert_eq!(acc, 1, "generator order must be q-1");
        self.tables = Arc::new(Tables { exp, log });
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.e
    }

    /// Packed integer of the modulus polynomial (for reporting).
    pub fn modulus_packed(&self) -> u64 {
        self.modulus
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    pub fn one(&self) -> Fe {
        Fe(1)
    }

    /// Checked element constructor.
    pub fn elt(&self, v: u32) -> Result<Fe> {
        if v < self.q {
            Ok(Fe(v))
        } else {
            Err(Error::InvalidInput(format!(
                "element {v} out of range for field of order {}",
                self.q
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (mut va, mut vb) = (a.0, b.0);
        let mut out = 0u32;
        let mut mult = 1u32;
        while va > 0 || vb > 0 {
            out += ((va % self.p + vb % self.p) % self.p) * mult;
            va /= self.p;
            vb /= self.p;
            mult *= self.p;
        }
        Fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let mut va = a.0;
        let mut out = 0u32;
        let mut mult = 1u32;
        while va > 0 {
            out += ((self.p - va % self.p) % self.p) * mult;
            va /= self.p;
            mult *= self.p;
        }
        Fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if a.0 == 0 || b.0 == 0 {
            return Fe(0);
        }
        let t = &self.tables;
        let s = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
        Fe(t.exp[(s % (self.q as u64 - 1)) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::Arithmetic("inverse of zero".into()));
        }
        let t = &self.tables;
        let l = t.log[a.0 as usize];
        Ok(Fe(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, n: u64) -> Fe {
        if n == 0 {
            return Fe(1);
        }
        if a.0 == 0 {
            return Fe(0);
        }
        let t = &self.tables;
        let l = t.log[a.0 as usize] as u128 * n as u128;
        Fe(t.exp[(l % (self.q as u128 - 1)) as usize])
    }
}
