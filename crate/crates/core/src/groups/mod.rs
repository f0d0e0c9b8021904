//! Finite groups with enumerated elements.
//!
//! A [`Group`] is built by breadth-first closure over a generator list, so
//! every element gets a reproducible integer id (the identity is 0). All
//! later computation (subgroups, classes, centralizers) works on ids.

mod element;
mod subgroup;

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::gf::FieldSpec;

pub use element::{Element, Matrix};
pub(crate) use element::{determinant, inverse as matrix_inverse, mat_mul_into};
pub use subgroup::{ClassData, ConjugacyClass, Subgroup};

/// Groups larger than this are refused at construction.
pub const MAX_GROUP_ORDER: usize = 250_000;

/// Groups up to this order precompute a full multiplication table.
const TABLE_LIMIT: usize = 2048;

/// Widest raw element encoding (permutation degree or matrix entries).
const MAX_WIDTH: usize = 256;

/// How elements of a group are represented and multiplied.
#[derive(Clone)]
pub enum Kind {
    Perm { degree: usize },
    Matrix { field: FieldSpec, dim: usize },
    /// Elements are labels `0..size`; `table[a * size + b]` is `a * b`.
    Abstract { size: usize, table: Arc<Vec<u32>> },
}

impl std::fmt::Debug for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::Perm { degree } => write!(f, "Perm({degree})"),
            Kind::Matrix { field, dim } => write!(f, "Matrix({dim}, {field:?})"),
            Kind::Abstract { size, .. } => write!(f, "Abstract({size})"),
        }
    }
}

impl Kind {
    fn width(&self) -> usize {
        match self {
            Kind::Perm { degree } => *degree,
            Kind::Matrix { dim, .. } => dim * dim,
            Kind::Abstract { .. } => 1,
        }
    }

    fn identity_raw(&self) -> Result<Vec<u32>> {
        Ok(match self {
            Kind::Perm { degree } => (0..*degree as u32).collect(),
            Kind::Matrix { field, dim } => Matrix::identity(field, *dim).entries,
            Kind::Abstract { size, table } => {
                let e = (0..*size)
                    .find(|&e| (0..*size).all(|x| table[e * size + x] as usize == x))
                    .ok_or_else(|| Error::InconsistentGenerators("table has no identity".into()))?;
                vec![e as u32]
            }
        })
    }

    #[inline]
    pub(crate) fn product(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        match self {
            Kind::Perm { .. } => {
                for (o, &bi) in out.iter_mut().zip(b) {
                    *o = a[bi as usize];
                }
            }
            Kind::Matrix { field, dim } => mat_mul_into(field, *dim, a, b, out),
            Kind::Abstract { size, table } => out[0] = table[a[0] as usize * size + b[0] as usize],
        }
    }

    fn raw_of(&self, e: &Element) -> Result<Vec<u32>> {
        match (self, e) {
            (Kind::Perm { degree }, Element::Perm(img)) => {
                if img.len() != *degree {
                    return Err(Error::InconsistentGenerators(format!(
                        "permutation on {} points in a degree-{degree} group",
                        img.len()
                    )));
                }
                let mut seen = vec![false; *degree];
                for &i in img {
                    if i as usize >= *degree || std::mem::replace(&mut seen[i as usize], true) {
                        return Err(Error::InconsistentGenerators("image vector is not a bijection".into()));
                    }
                }
                Ok(img.clone())
            }
            (Kind::Matrix { field, dim }, Element::Matrix(m)) => {
                if m.dim != *dim || m.field != *field {
                    return Err(Error::InconsistentGenerators("matrix of the wrong shape or field".into()));
                }
                if determinant(field, *dim, &m.entries) == 0 {
                    return Err(Error::Singular);
                }
                Ok(m.entries.clone())
            }
            (Kind::Abstract { size, .. }, Element::Abstract(i)) if (*i as usize) < *size => Ok(vec![*i]),
            _ => Err(Error::InconsistentGenerators(format!("element {e:?} does not match {self:?}"))),
        }
    }

    pub(crate) fn element_of(&self, raw: &[u32]) -> Element {
        match self {
            Kind::Perm { .. } => Element::Perm(raw.to_vec()),
            Kind::Matrix { field, dim } => {
                Element::Matrix(Matrix { field: field.clone(), dim: *dim, entries: raw.to_vec() })
            }
            Kind::Abstract { .. } => Element::Abstract(raw[0]),
        }
    }
}

/// A finite group with all elements enumerated.
pub struct Group {
    descriptor: String,
    kind: Kind,
    width: usize,
    data: Vec<u32>,
    lookup: FxHashMap<Box<[u32]>, u32>,
    inverse: Vec<u32>,
    generators: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group({}, order {})", self.descriptor, self.order())
    }
}

impl Group {
    /// The group generated by `generators`.
    ///
    /// Ids follow breadth-first discovery from the identity: each dequeued
    /// element is left-multiplied by the generators in list order and new
    /// products are numbered as they are first seen.
    pub fn closure(descriptor: impl Into<String>, kind: Kind, generators: &[Element]) -> Result<Group> {
        let width = kind.width();
        if width > MAX_WIDTH {
            return Err(Error::Unsupported(format!("raw element width {width} above {MAX_WIDTH}")));
        }
        let gens_raw = generators.iter().map(|g| kind.raw_of(g)).collect::<Result<Vec<_>>>()?;
        let identity = kind.identity_raw()?;

        let mut data = identity.clone();
        let mut lookup: FxHashMap<Box<[u32]>, u32> = FxHashMap::default();
        lookup.insert(identity.into_boxed_slice(), 0);
        let mut buf = vec![0u32; width];
        let mut x = vec![0u32; width];
        let mut head = 0usize;
        while head < lookup.len() {
            x.copy_from_slice(&data[head * width..(head + 1) * width]);
            for g in &gens_raw {
                kind.product(g, &x, &mut buf);
                if !lookup.contains_key(&buf[..]) {
                    let id = lookup.len();
                    if id >= MAX_GROUP_ORDER {
                        return Err(Error::SizeCap { order: id as u64 + 1, cap: MAX_GROUP_ORDER as u64 });
                    }
                    lookup.insert(buf.clone().into_boxed_slice(), id as u32);
                    data.extend_from_slice(&buf);
                }
            }
            head += 1;
        }
        let n = lookup.len();
        let generators: Vec<u32> = {
            let mut ids: Vec<u32> = Vec::new();
            for g in &gens_raw {
                let id = lookup[&g[..]];
                if id != 0 && !ids.contains(&id) {
                    ids.push(id);
                }
            }
            ids
        };

        let mut group = Group {
            descriptor: descriptor.into(),
            kind,
            width,
            data,
            lookup,
            inverse: Vec::new(),
            generators,
            table: None,
        };
        group.inverse = (0..n as u32).map(|a| group.compute_inverse(a)).collect::<Result<_>>()?;
        if n <= TABLE_LIMIT {
            let mut table = vec![0u32; n * n];
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    table[a as usize * n + b as usize] = group.mul_slow(a, b);
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    fn compute_inverse(&self, a: u32) -> Result<u32> {
        let raw = self.raw(a);
        let inv: Vec<u32> = match &self.kind {
            Kind::Perm { .. } => {
                let mut r = vec![0; raw.len()];
                for (i, &x) in raw.iter().enumerate() {
                    r[x as usize] = i as u32;
                }
                r
            }
            Kind::Matrix { field, dim } => matrix_inverse(field, *dim, raw).ok_or(Error::Singular)?,
            Kind::Abstract { .. } => {
                let e = self.raw(0)[0];
                let mut buf = [0u32];
                let mut found = None;
                for cand in 0..self.order() as u32 {
                    self.kind.product(raw, self.raw(cand), &mut buf);
                    if buf[0] == e {
                        found = Some(self.raw(cand).to_vec());
                        break;
                    }
                }
                found.ok_or_else(|| Error::InconsistentGenerators("element without inverse".into()))?
            }
        };
        self.lookup
            .get(&inv[..])
            .copied()
            .ok_or_else(|| Error::Internal("inverse outside the closure".into()))
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn order(&self) -> usize {
        self.lookup.len()
    }

    pub fn identity(&self) -> u32 {
        0
    }

    /// Generator ids, identity and duplicates removed.
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// Raw encoding of element `id`.
    #[inline]
    pub fn raw(&self, id: u32) -> &[u32] {
        let i = id as usize * self.width;
        &self.data[i..i + self.width]
    }

    pub fn element(&self, id: u32) -> Element {
        self.kind.element_of(self.raw(id))
    }

    pub fn id_of(&self, e: &Element) -> Option<u32> {
        let raw = self.kind.raw_of(e).ok()?;
        self.lookup.get(&raw[..]).copied()
    }

    pub fn id_of_raw(&self, raw: &[u32]) -> Option<u32> {
        self.lookup.get(raw).copied()
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let mut buf = [0u32; MAX_WIDTH];
        let out = &mut buf[..self.width];
        self.kind.product(self.raw(a), self.raw(b), out);
        self.lookup[&out[..]]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.mul_slow(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// `g x g^-1`.
    #[inline]
    pub fn conj(&self, g: u32, x: u32) -> u32 {
        match &self.table {
            Some(_) => self.mul(self.mul(g, x), self.inv(g)),
            None => {
                let mut b1 = [0u32; MAX_WIDTH];
                let mut b2 = [0u32; MAX_WIDTH];
                let w = self.width;
                self.kind.product(self.raw(g), self.raw(x), &mut b1[..w]);
                self.kind.product(&b1[..w], self.raw(self.inv(g)), &mut b2[..w]);
                self.lookup[&b2[..w]]
            }
        }
    }

    /// Whether `a b = b a`.
    #[inline]
    pub fn commutes(&self, a: u32, b: u32) -> bool {
        if a == b || a == 0 || b == 0 {
            return true;
        }
        if let Some(t) = &self.table {
            let n = self.order();
            return t[a as usize * n + b as usize] == t[b as usize * n + a as usize];
        }
        let (x, y) = (self.raw(a), self.raw(b));
        match &self.kind {
            Kind::Perm { .. } => x.iter().zip(y).all(|(&xi, &yi)| x[yi as usize] == y[xi as usize]),
            Kind::Matrix { field, dim } => {
                let d = *dim;
                for i in 0..d {
                    for j in 0..d {
                        let mut s = 0;
                        let mut t = 0;
                        for k in 0..d {
                            s = field.raw_add(s, field.raw_mul(x[i * d + k], y[k * d + j]));
                            t = field.raw_add(t, field.raw_mul(y[i * d + k], x[k * d + j]));
                        }
                        if s != t {
                            return false;
                        }
                    }
                }
                true
            }
            Kind::Abstract { .. } => self.mul(a, b) == self.mul(b, a),
        }
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn element_order(&self, x: u32) -> usize {
        let mut y = x;
        let mut n = 1;
        while y != 0 {
            y = self.mul(y, x);
            n += 1;
        }
        n
    }

    /// Exhaustive check of closure, identity and inverses. Quadratic in the
    /// order; intended for tests on small groups.
    pub fn verify_axioms(&self) -> bool {
        let n = self.order() as u32;
        (0..n).all(|a| {
            self.mul(0, a) == a
                && self.mul(a, 0) == a
                && self.mul(a, self.inv(a)) == 0
                && (0..n).all(|b| {
                    let mut buf = vec![0u32; self.width];
                    self.kind.product(self.raw(a), self.raw(b), &mut buf);
                    self.lookup.contains_key(&buf[..])
                })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field;

    fn s3() -> Group {
        Group::closure(
            "S(3)",
            Kind::Perm { degree: 3 },
            &[Element::perm_from_cycles(3, &[&[0, 1]]), Element::perm_from_cycles(3, &[&[0, 1, 2]])],
        )
        .unwrap()
    }

    #[test]
    fn symmetric_group_from_two_generators() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(g.verify_axioms());
        assert_eq!(g.element(0), Element::Perm(vec![0, 1, 2]));
    }

    #[test]
    fn sl2_over_f3() {
        let f = field(3, 1).unwrap();
        let a = Matrix::from_rows(&f, &[&[1, 1], &[0, 1]]);
        let b = Matrix::from_rows(&f, &[&[0, 2], &[1, 0]]);
        let g = Group::closure("SL(2,3)", Kind::Matrix { field: f.clone(), dim: 2 }, &[
            Element::Matrix(a),
            Element::Matrix(b),
        ])
        .unwrap();
        assert_eq!(g.order(), 24);
        assert!(g.verify_axioms());
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = Group::closure("1", Kind::Perm { degree: 4 }, &[]).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.generators().is_empty());
    }

    #[test]
    fn rejects_bad_generators() {
        let f = field(3, 1).unwrap();
        let singular = Matrix::from_rows(&f, &[&[1, 1], &[1, 1]]);
        let err = Group::closure("x", Kind::Matrix { field: f, dim: 2 }, &[Element::Matrix(singular)]);
        assert!(matches!(err, Err(Error::Singular)));
        let err = Group::closure("x", Kind::Perm { degree: 3 }, &[Element::Perm(vec![0, 1])]);
        assert!(matches!(err, Err(Error::InconsistentGenerators(_))));
        let err = Group::closure("x", Kind::Perm { degree: 3 }, &[Element::Perm(vec![0, 0, 1])]);
        assert!(matches!(err, Err(Error::InconsistentGenerators(_))));
    }

    #[test]
    fn ids_are_reproducible() {
        let (a, b) = (s3(), s3());
        for i in 0..6 {
            assert_eq!(a.element(i), b.element(i));
        }
    }

    #[test]
    fn untabled_multiplication_matches_tabled() {
        // S(7) has 5040 elements, above the table limit.
        let big = Group::closure(
            "S(7)",
            Kind::Perm { degree: 7 },
            &[Element::perm_from_cycles(7, &[&[0, 1]]), Element::perm_from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]])],
        )
        .unwrap();
        assert_eq!(big.order(), 5040);
        assert!(big.table.is_none());
        for (a, b) in [(3u32, 17u32), (100, 4000), (5039, 1)] {
            let ab = big.mul(a, b);
            assert_eq!(big.mul(ab, big.inv(b)), a);
            assert_eq!(big.commutes(a, b), big.mul(a, b) == big.mul(b, a));
            assert_eq!(big.conj(a, b), big.mul(big.mul(a, b), big.inv(a)));
        }
    }

    #[test]
    fn abstract_table_group() {
        // Z/4 as an addition table.
        let table: Vec<u32> = (0..16).map(|i| ((i / 4 + i % 4) % 4) as u32).collect();
        let g = Group::closure("Z4", Kind::Abstract { size: 4, table: Arc::new(table) }, &[Element::Abstract(1)])
            .unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.element_order(1), 4);
    }
}
