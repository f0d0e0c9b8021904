//! Arithmetic in finite fields GF(p^k).
//!
//! Elements are polynomials of degree < k over GF(p) reduced modulo a fixed
//! monic irreducible polynomial. The modulus is the lexicographically
//! smallest monic irreducible of degree k, comparing coefficient lists with
//! the constant term first.
//!
//! Besides the checked [`FieldElement`] API, a [`FieldSpec`] offers `raw_*`
//! operations on integer encodings `Σ c_i p^i`; the matrix groups store their
//! entries that way.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order accepted by [`field`].
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 1024;

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// A finite field GF(p^k) with its modulus. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldData>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.0.p, self.0.k, self.0.modulus)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p as u32, k))
}

/// Builds GF(p^k) with the deterministic smallest irreducible modulus.
pub fn field(p: u32, k: u32) -> Result<FieldSpec> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if k < 1 {
        return Err(Error::InvalidInput("field degree must be at least 1".into()));
    }
    let q = (p as u64)
        .checked_pow(k)
        .filter(|&q| q <= MAX_FIELD_ORDER as u64)
        .ok_or_else(|| Error::InvalidInput(format!("GF({p}^{k}) exceeds the field size cap")))?
        as u32;
    let modulus = if k == 1 { vec![0, 1] } else { smallest_irreducible(p, k as usize) };
    let mut data = FieldData { p, k, q, modulus, tables: None };
    if q <= TABLE_LIMIT {
        data.tables = Some(build_tables(&data));
    }
    Ok(FieldSpec(Arc::new(data)))
}

/// Builds GF(q) for a prime power `q`.
pub fn field_of_order(q: u64) -> Result<FieldSpec> {
    let (p, k) = prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
    field(p, k)
}

// Polynomials over GF(p) as coefficient vectors, constant term first, no
// trailing zeros except for the zero polynomial which is empty.

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &mc) in m.iter().enumerate() {
            let sub = (c as u64 * mc as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    mod_pow(a, p as u64 - 2, p)
}

fn mod_pow(a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Every monic polynomial of degree `d`, in index order of the lower coefficients.
fn monic_polys(p: u32, d: usize) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push((idx % p as u64) as u32);
            idx /= p as u64;
        }
        v.push(1);
        v
    })
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for g in monic_polys(p, d) {
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: usize) -> Vec<u32> {
    // Lexicographic order with the constant term most significant: decode the
    // counter with c0 as the leading digit.
    let count = (p as u64).pow(k as u32);
    for idx in 0..count {
        let mut coeffs = vec![0u32; k + 1];
        let mut rest = idx;
        for i in (0..k).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[k] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn build_tables(data: &FieldData) -> Tables {
    let q = data.q as usize;
    let mut add = vec![0; q * q];
    let mut mul = vec![0; q * q];
    let mut neg = vec![0; q];
    let mut inv = vec![0; q];
    for a in 0..q as u32 {
        neg[a as usize] = slow_neg(data, a);
        for b in 0..q as u32 {
            add[a as usize * q + b as usize] = slow_add(data, a, b);
            let m = slow_mul(data, a, b);
            mul[a as usize * q + b as usize] = m;
            if m == 1 {
                inv[a as usize] = b;
            }
        }
    }
    Tables { add, mul, neg, inv }
}

fn decode(data: &FieldData, mut idx: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(data.k as usize);
    for _ in 0..data.k {
        v.push(idx % data.p);
        idx /= data.p;
    }
    v
}

fn encode(data: &FieldData, coeffs: &[u32]) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * data.p + c)
}

fn slow_add(data: &FieldData, a: u32, b: u32) -> u32 {
    let (x, y) = (decode(data, a), decode(data, b));
    let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % data.p).collect();
    encode(data, &s)
}

fn slow_neg(data: &FieldData, a: u32) -> u32 {
    let s: Vec<u32> = decode(data, a).iter().map(|&u| (data.p - u) % data.p).collect();
    encode(data, &s)
}

fn slow_mul(data: &FieldData, a: u32, b: u32) -> u32 {
    let (x, y) = (decode(data, a), decode(data, b));
    let p = data.p as u64;
    let mut prod = vec![0u32; 2 * data.k as usize];
    for (i, &u) in x.iter().enumerate() {
        for (j, &v) in y.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % p) as u32;
        }
    }
    let mut r = if data.k == 1 { vec![prod[0]] } else { poly_rem(&prod, &data.modulus, data.p) };
    r.resize(data.k as usize, 0);
    encode(data, &r)
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    /// Field order q = p^k.
    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        self.from_index(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_index(1)
    }

    /// Element from a coefficient list (constant term first); coefficients are
    /// reduced mod p and the list is padded or must fit in k entries.
    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.0.k as usize {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for a degree-{} extension",
                coeffs.len(),
                self.0.k
            )));
        }
        let mut c: Vec<u32> = coeffs.iter().map(|&x| x % self.0.p).collect();
        c.resize(self.0.k as usize, 0);
        Ok(FieldElement { spec: self.clone(), coeffs: c })
    }

    pub fn from_index(&self, idx: u32) -> FieldElement {
        assert!(idx < self.0.q, "field index out of range");
        FieldElement { spec: self.clone(), coeffs: decode(&self.0, idx) }
    }

    /// All elements in lexicographic order of their encodings.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(|i| self.from_index(i))
    }

    /// Encoding of the polynomial `x`; 1 in a prime field.
    pub fn generator_x(&self) -> u32 {
        if self.0.k == 1 {
            1
        } else {
            self.0.p
        }
    }

    #[inline]
    pub fn raw_add(&self, a: u32, b: u32) -> u32 {
        match &self.0.tables {
            Some(t) => t.add[(a * self.0.q + b) as usize],
            None => slow_add(&self.0, a, b),
        }
    }

    #[inline]
    pub fn raw_mul(&self, a: u32, b: u32) -> u32 {
        match &self.0.tables {
            Some(t) => t.mul[(a * self.0.q + b) as usize],
            None => slow_mul(&self.0, a, b),
        }
    }

    #[inline]
    pub fn raw_neg(&self, a: u32) -> u32 {
        match &self.0.tables {
            Some(t) => t.neg[a as usize],
            None => slow_neg(&self.0, a),
        }
    }

    #[inline]
    pub fn raw_sub(&self, a: u32, b: u32) -> u32 {
        self.raw_add(a, self.raw_neg(b))
    }

    pub fn raw_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn raw_inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero(self.0.q));
        }
        Ok(match &self.0.tables {
            Some(t) => t.inv[a as usize],
            None => self.raw_pow(a, self.0.q as u64 - 2),
        })
    }

    /// `a^(p^m)`.
    pub fn raw_frobenius(&self, a: u32, m: u32) -> u32 {
        (0..m % self.0.k).fold(a, |x, _| self.raw_pow(x, self.0.p as u64))
    }

    /// Multiplicative order of a nonzero element.
    pub fn raw_order(&self, a: u32) -> u64 {
        assert!(a != 0);
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.raw_mul(x, a);
            n += 1;
        }
        n
    }

    /// Smallest-index generator of the multiplicative group.
    pub fn primitive_element(&self) -> u32 {
        let target = self.0.q as u64 - 1;
        (1..self.0.q).find(|&a| self.raw_order(a) == target).expect("GF(q)* is cyclic")
    }
}

/// An element of GF(p^k) tied to its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: FieldSpec,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn index(&self) -> u32 {
        encode(&self.spec.0, &self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn wrap(&self, idx: u32) -> FieldElement {
        self.spec.from_index(idx)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.raw_add(self.index(), other.index())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.raw_sub(self.index(), other.index())))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.raw_mul(self.index(), other.index())))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.spec.raw_neg(self.index()))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.wrap(self.spec.raw_inv(self.index())?))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.wrap(self.spec.raw_pow(self.index(), e))
    }

    /// `a^(p^m)`, the m-th power of the Frobenius automorphism.
    pub fn frobenius(&self, m: u32) -> Self {
        self.wrap(self.spec.raw_frobenius(self.index(), m))
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn random_triples_satisfy_field_axioms(q_idx in 0usize..6, a in 0u32..u32::MAX, b in 0u32..u32::MAX, c in 0u32..u32::MAX) {
            let q = [16u64, 25, 27, 49, 81, 121][q_idx];
            let f = field_of_order(q).unwrap();
            let n = f.order();
            let (a, b, c) = (a % n, b % n, c % n);
            prop_assert_eq!(f.raw_mul(f.raw_mul(a, b), c), f.raw_mul(a, f.raw_mul(b, c)));
            prop_assert_eq!(f.raw_mul(a, f.raw_add(b, c)), f.raw_add(f.raw_mul(a, b), f.raw_mul(a, c)));
            prop_assert_eq!(f.raw_add(a, f.raw_neg(a)), 0);
            // Frobenius is additive and multiplicative.
            prop_assert_eq!(f.raw_frobenius(f.raw_add(a, b), 1), f.raw_add(f.raw_frobenius(a, 1), f.raw_frobenius(b, 1)));
            prop_assert_eq!(f.raw_frobenius(f.raw_mul(a, b), 1), f.raw_mul(f.raw_frobenius(a, 1), f.raw_frobenius(b, 1)));
        }
    }
}
