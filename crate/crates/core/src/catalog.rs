//! Group families keyed by a textual descriptor.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! C(n)  CxC(n1,..,nr)  S(n)  A(n)  D(n)  Q8  UT(3,p)
//! GL(d,q)  SL(d,q)  Sp(2,q)  U(d,q) d in {2,3}  PSL(2,q)  M(d,q)
//! ```
//!
//! `D(n)` is dihedral of order 2n. `U(d,q)` is the full unitary group of the
//! identity Hermitian form over GF(q^2). `M(d,q)` names the full matrix
//! algebra; it parses but is not a group and only feeds the pair-count oracle.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::gf::{field_of_order, is_prime, prime_power, FieldSpec};
use crate::groups::{determinant, Element, Group, Kind, Matrix, MAX_GROUP_ORDER};

/// Largest matrix degree accepted for GL/SL.
const MAX_MATRIX_DIM: u32 = 4;

/// GL(d,q) is cross-checked against a scan of all matrices up to this many.
const MAX_ENUMERATED_MATRICES: u64 = 300_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Descriptor {
    Cyclic(u32),
    Abelian(Vec<u32>),
    Symmetric(u32),
    Alternating(u32),
    Dihedral(u32),
    Quaternion,
    Unitriangular(u32),
    GeneralLinear(u32, u64),
    SpecialLinear(u32, u64),
    Symplectic(u32, u64),
    Unitary(u32, u64),
    ProjectiveSpecialLinear(u32, u64),
    MatrixAlgebra(u32, u64),
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Descriptor::*;
        match self {
            Cyclic(n) => write!(f, "C({n})"),
            Abelian(ns) => {
                let parts: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                write!(f, "CxC({})", parts.join(","))
            }
            Symmetric(n) => write!(f, "S({n})"),
            Alternating(n) => write!(f, "A({n})"),
            Dihedral(n) => write!(f, "D({n})"),
            Quaternion => write!(f, "Q8"),
            Unitriangular(p) => write!(f, "UT(3,{p})"),
            GeneralLinear(d, q) => write!(f, "GL({d},{q})"),
            SpecialLinear(d, q) => write!(f, "SL({d},{q})"),
            Symplectic(d, q) => write!(f, "Sp({d},{q})"),
            Unitary(d, q) => write!(f, "U({d},{q})"),
            ProjectiveSpecialLinear(d, q) => write!(f, "PSL({d},{q})"),
            MatrixAlgebra(d, q) => write!(f, "M({d},{q})"),
        }
    }
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        let chars = src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Lexer { chars, pos: 0, src }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |(i, _)| *i)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn ident(&mut self) -> Result<String> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric()) {
            s.push(c);
            self.pos += 1;
        }
        if s.is_empty() {
            return self.err("expected a group name");
        }
        Ok(s)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        let mut v: u64 = 0;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            v = match v.checked_mul(10).and_then(|v| v.checked_add(d as u64)) {
                Some(v) => v,
                None => return self.err("number too large"),
            };
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        Ok(v)
    }

    fn args(&mut self) -> Result<Vec<u64>> {
        self.expect('(')?;
        let mut out = vec![self.number()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(self.number()?);
        }
        self.expect(')')?;
        Ok(out)
    }
}

fn small(n: u64, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::InvalidInput(format!("{what} = {n} is too large")))
}

fn positive(n: u64, what: &str) -> Result<u32> {
    if n < 1 {
        return Err(Error::InvalidInput(format!("{what} must be at least 1")));
    }
    small(n, what)
}

fn prime_power_arg(q: u64) -> Result<u64> {
    prime_power(q)
        .map(|_| q)
        .ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))
}

/// Parses a descriptor.
pub fn parse(text: &str) -> Result<Descriptor> {
    use Descriptor::*;
    let mut lx = Lexer::new(text);
    let name = lx.ident()?;
    let name_end = lx.offset();
    let desc = if name == "Q8" {
        Quaternion
    } else {
        let args = lx.args()?;
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse { pos: name_end, msg: format!("{name} takes {n} argument(s), got {}", args.len()) })
            }
        };
        match name.as_str() {
            "C" => {
                arity(1)?;
                Cyclic(positive(args[0], "n")?)
            }
            "CxC" => Abelian(args.iter().map(|&n| positive(n, "n")).collect::<Result<_>>()?),
            "S" => {
                arity(1)?;
                Symmetric(positive(args[0], "n")?)
            }
            "A" => {
                arity(1)?;
                Alternating(positive(args[0], "n")?)
            }
            "D" => {
                arity(1)?;
                Dihedral(positive(args[0], "n")?)
            }
            "UT" => {
                arity(2)?;
                if args[0] != 3 {
                    return Err(Error::Unsupported(format!("UT({},..): only degree 3 is supported", args[0])));
                }
                if !is_prime(args[1]) {
                    return Err(Error::InvalidInput(format!("{} is not prime", args[1])));
                }
                Unitriangular(small(args[1], "p")?)
            }
            "GL" | "SL" | "Sp" | "U" | "PSL" | "M" => {
                arity(2)?;
                let d = positive(args[0], "d")?;
                let q = prime_power_arg(args[1])?;
                match name.as_str() {
                    "GL" | "SL" if d > MAX_MATRIX_DIM => {
                        return Err(Error::Unsupported(format!("{name}({d},{q}): degree above {MAX_MATRIX_DIM}")))
                    }
                    "GL" => GeneralLinear(d, q),
                    "SL" => SpecialLinear(d, q),
                    "Sp" if d == 2 => Symplectic(d, q),
                    "Sp" => return Err(Error::Unsupported(format!("Sp({d},{q}): only Sp(2,q) is supported"))),
                    "U" if d == 2 || d == 3 => Unitary(d, q),
                    "U" => return Err(Error::Unsupported(format!("U({d},{q}): unitary degree must be 2 or 3"))),
                    "PSL" if d == 2 => ProjectiveSpecialLinear(d, q),
                    "PSL" => return Err(Error::Unsupported(format!("PSL({d},{q}): only PSL(2,q) is supported"))),
                    _ => MatrixAlgebra(d, q),
                }
            }
            _ => return Err(Error::Parse { pos: 0, msg: format!("unknown group family {name:?}") }),
        }
    };
    if lx.peek().is_some() {
        return lx.err("trailing input");
    }
    Ok(desc)
}

impl FromStr for Descriptor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Known structural facts about a catalog group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metadata {
    pub abelian: bool,
    pub nonabelian_simple: bool,
    /// Solvability known from the classification of the family.
    pub solvable: bool,
    /// The prime `p` when the order is a power of `p` (> 1).
    pub p_group: Option<u32>,
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Descriptor {
    /// Registered closed-form order; `None` for the matrix algebra.
    pub fn order_formula(&self) -> Option<BigUint> {
        use Descriptor::*;
        let big = BigUint::from;
        Some(match *self {
            Cyclic(n) => big(n),
            Abelian(ref ns) => ns.iter().fold(BigUint::one(), |acc, &n| acc * n),
            Symmetric(n) => factorial(n),
            Alternating(n) if n < 2 => BigUint::one(),
            Alternating(n) => factorial(n) / 2u32,
            Dihedral(n) => big(2 * n),
            Quaternion => big(8),
            Unitriangular(p) => big(p).pow(3),
            GeneralLinear(d, q) => gl_order(d, q),
            SpecialLinear(d, q) => gl_order(d, q) / BigUint::from(q - 1),
            Symplectic(_, q) => big_q(q) * (big_q(q).pow(2) - 1u32),
            Unitary(2, q) => big_q(q) * (big_q(q) + 1u32) * (big_q(q).pow(2) - 1u32),
            Unitary(_, q) => {
                big_q(q).pow(3) * (big_q(q) + 1u32) * (big_q(q).pow(2) - 1u32) * (big_q(q).pow(3) + 1u32)
            }
            ProjectiveSpecialLinear(_, q) => big_q(q) * (big_q(q).pow(2) - 1u32) / BigUint::from(gcd(2, q - 1)),
            MatrixAlgebra(..) => return None,
        })
    }

    pub fn metadata(&self) -> Metadata {
        use Descriptor::*;
        let abelian = match *self {
            Cyclic(_) | Abelian(_) => true,
            Symmetric(n) | Dihedral(n) => n <= 2,
            Alternating(n) => n <= 3,
            GeneralLinear(d, _) | SpecialLinear(d, _) => d == 1,
            _ => false,
        };
        let nonabelian_simple = match *self {
            Alternating(n) => n >= 5,
            ProjectiveSpecialLinear(_, q) => q >= 4,
            SpecialLinear(d, q) => d >= 2 && gcd(d as u64, q - 1) == 1 && !(d == 2 && q <= 3),
            GeneralLinear(d, 2) => d >= 3,
            _ => false,
        };
        let solvable = abelian
            || match *self {
                Symmetric(n) | Alternating(n) => n <= 4,
                Dihedral(_) | Quaternion | Unitriangular(_) => true,
                GeneralLinear(2, q) | SpecialLinear(2, q) | Symplectic(_, q) | ProjectiveSpecialLinear(_, q) => q <= 3,
                Unitary(2, q) => q <= 3,
                Unitary(3, q) => q == 2,
                _ => false,
            };
        let p_group = self.order_formula().and_then(|n| n.to_u64()).and_then(|n| {
            prime_power(n).map(|(p, _)| p)
        });
        Metadata { abelian, nonabelian_simple, solvable, p_group }
    }
}

fn big_q(q: u64) -> BigUint {
    BigUint::from(q)
}

fn gl_order(d: u32, q: u64) -> BigUint {
    let qd = big_q(q).pow(d);
    (0..d).fold(BigUint::one(), |acc, i| acc * (&qd - big_q(q).pow(i)))
}

fn cycle(degree: usize, points: impl IntoIterator<Item = u32>) -> Element {
    let pts: Vec<u32> = points.into_iter().collect();
    Element::perm_from_cycles(degree, &[&pts])
}

/// Additive basis `1, x, .., x^(k-1)` of GF(q) over its prime field.
fn field_basis(f: &FieldSpec) -> Vec<u32> {
    (0..f.k()).map(|i| f.p().pow(i)).collect()
}

fn transvection(f: &FieldSpec, d: usize, i: usize, j: usize, a: u32) -> Element {
    let mut m = Matrix::identity(f, d);
    m.entries[i * d + j] = a;
    Element::Matrix(m)
}

fn transvections(f: &FieldSpec, d: usize) -> Vec<Element> {
    let mut gens = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                for &a in &field_basis(f) {
                    gens.push(transvection(f, d, i, j, a));
                }
            }
        }
    }
    gens
}

/// Picks generators from an enumerated element list by the same greedy rule
/// used for subgroups: keep each element not yet in the span of those kept.
fn greedy_generators(kind: &Kind, identity: &[u32], elements: &[Vec<u32>]) -> Vec<Element> {
    let mut kept: Vec<Vec<u32>> = Vec::new();
    let mut span: FxHashSet<Vec<u32>> = FxHashSet::default();
    span.insert(identity.to_vec());
    let mut buf = vec![0u32; identity.len()];
    for e in elements {
        if span.len() == elements.len() {
            break;
        }
        if span.contains(e) {
            continue;
        }
        kept.push(e.clone());
        span.clear();
        span.insert(identity.to_vec());
        let mut queue = vec![identity.to_vec()];
        let mut head = 0;
        while head < queue.len() {
            for g in &kept {
                kind.product(g, &queue[head], &mut buf);
                if span.insert(buf.clone()) {
                    queue.push(buf.clone());
                }
            }
            head += 1;
        }
    }
    kept.iter().map(|raw| kind.element_of(raw)).collect()
}

fn quaternion_table() -> Vec<u32> {
    // label = 4 * sign + unit, units 1, i, j, k.
    const UNIT: [[(u32, u32); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let mut t = vec![0; 64];
    for a in 0..8u32 {
        for b in 0..8u32 {
            let (s, u) = UNIT[(a % 4) as usize][(b % 4) as usize];
            let sign = (a / 4) ^ (b / 4) ^ s;
            t[(a * 8 + b) as usize] = sign * 4 + u;
        }
    }
    t
}

/// Orthonormal-column enumeration of the unitary group of the identity form.
fn unitary_elements(f2: &FieldSpec, d: usize, q: u64) -> Vec<Vec<u32>> {
    let conj = |x: u32| f2.raw_pow(x, q);
    let size = f2.order() as usize;
    let vectors: Vec<Vec<u32>> = (0..size.pow(d as u32))
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let c = (idx % size) as u32;
                    idx /= size;
                    c
                })
                .collect()
        })
        .collect();
    let herm = |v: &[u32], w: &[u32]| v.iter().zip(w).fold(0, |acc, (&a, &b)| f2.raw_add(acc, f2.raw_mul(conj(a), b)));
    let unit: Vec<&Vec<u32>> = vectors.iter().filter(|v| herm(v, v) == 1).collect();

    let mut partial: Vec<Vec<&Vec<u32>>> = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for cols in &partial {
            for &v in &unit {
                if cols.iter().all(|c| herm(c, v) == 0) {
                    let mut ext = cols.clone();
                    ext.push(v);
                    next.push(ext);
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|cols| {
            let mut m = vec![0; d * d];
            for (j, c) in cols.iter().enumerate() {
                for i in 0..d {
                    m[i * d + j] = c[i];
                }
            }
            m
        })
        .collect()
}

/// Image of a 2x2 matrix acting on the projective line, points `0..q` for
/// the affine coordinates and `q` for infinity.
fn projective_action(f: &FieldSpec, m: &[u32]) -> Vec<u32> {
    let q = f.order();
    let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
    let apply = |x: u32, y: u32| -> u32 {
        if y == 0 {
            q
        } else {
            f.raw_mul(x, f.raw_inv(y).expect("nonzero"))
        }
    };
    (0..=q)
        .map(|pt| {
            if pt == q {
                apply(a, c)
            } else {
                apply(f.raw_add(f.raw_mul(a, pt), b), f.raw_add(f.raw_mul(c, pt), d))
            }
        })
        .collect()
}

/// Every invertible `d x d` matrix over `f`, by exhaustive scan.
/// Every `d x d` matrix over `f` (row-major raw entries) accepted by `keep`.
fn matrices_where(f: &FieldSpec, d: usize, keep: impl Fn(&[u32]) -> bool + Sync) -> Vec<Vec<u32>> {
    use rayon::prelude::*;
    let q = f.order() as u64;
    let total = q.pow((d * d) as u32);
    (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let m: Vec<u32> = (0..d * d)
                .map(|_| {
                    let c = (idx % q) as u32;
                    idx /= q;
                    c
                })
                .collect();
            keep(&m).then_some(m)
        })
        .collect()
}

fn invertible_matrices(f: &FieldSpec, d: usize) -> Vec<Vec<u32>> {
    matrices_where(f, d, |m| determinant(f, d, m) != 0)
}

/// The group generated by an enumerated element list, checked to be
/// exactly that list.
fn group_from_elements(name: String, kind: Kind, identity: &[u32], elements: &[Vec<u32>]) -> Result<Group> {
    let gens = greedy_generators(&kind, identity, elements);
    let g = Group::closure(name, kind, &gens)?;
    if g.order() != elements.len() || elements.iter().any(|e| g.id_of_raw(e).is_none()) {
        return Err(Error::Internal(format!("{}: closure {} != enumeration {}", g.descriptor(), g.order(), elements.len())));
    }
    Ok(g)
}

fn matrix_field(q: u64) -> Result<FieldSpec> {
    field_of_order(q)
}

/// Builds the group named by `desc` and checks its order against the
/// registered formula.
pub fn build(desc: &Descriptor) -> Result<Group> {
    use Descriptor::*;
    let expected = desc
        .order_formula()
        .ok_or_else(|| Error::Unsupported(format!("{desc} is a matrix algebra, not a group")))?;
    if expected > BigUint::from(MAX_GROUP_ORDER) {
        return Err(Error::SizeCap { order: expected.to_u64().unwrap_or(u64::MAX), cap: MAX_GROUP_ORDER as u64 });
    }
    let name = desc.to_string();
    let group = match *desc {
        Cyclic(n) => {
            let n = n as usize;
            let gens = if n > 1 { vec![cycle(n, 0..n as u32)] } else { vec![] };
            Group::closure(name, Kind::Perm { degree: n }, &gens)?
        }
        Abelian(ref ns) => {
            let degree: u32 = ns.iter().sum();
            let mut start = 0;
            let mut gens = Vec::new();
            for &n in ns {
                if n > 1 {
                    gens.push(cycle(degree as usize, start..start + n));
                }
                start += n;
            }
            Group::closure(name, Kind::Perm { degree: degree as usize }, &gens)?
        }
        Symmetric(n) => {
            let gens = if n >= 2 { vec![cycle(n as usize, [0, 1]), cycle(n as usize, 0..n)] } else { vec![] };
            Group::closure(name, Kind::Perm { degree: n as usize }, &gens)?
        }
        Alternating(n) => {
            let gens: Vec<Element> = (2..n).map(|i| cycle(n as usize, [0, 1, i])).collect();
            Group::closure(name, Kind::Perm { degree: n as usize }, &gens)?
        }
        Dihedral(n) => {
            let (degree, gens) = match n {
                1 => (2, vec![cycle(2, [0, 1])]),
                2 => (4, vec![
                    Element::perm_from_cycles(4, &[&[0, 1], &[2, 3]]),
                    Element::perm_from_cycles(4, &[&[0, 2], &[1, 3]]),
                ]),
                _ => {
                    let reflection = Element::Perm((0..n).map(|i| (n - i) % n).collect());
                    (n as usize, vec![cycle(n as usize, 0..n), reflection])
                }
            };
            Group::closure(name, Kind::Perm { degree }, &gens)?
        }
        Quaternion => {
            let kind = Kind::Abstract { size: 8, table: Arc::new(quaternion_table()) };
            Group::closure(name, kind, &[Element::Abstract(1), Element::Abstract(2)])?
        }
        Unitriangular(p) => {
            let f = matrix_field(p as u64)?;
            let gens = vec![transvection(&f, 3, 0, 1, 1), transvection(&f, 3, 1, 2, 1)];
            Group::closure(name, Kind::Matrix { field: f, dim: 3 }, &gens)?
        }
        GeneralLinear(d, q) => {
            let f = matrix_field(q)?;
            let d = d as usize;
            let mut diag = Matrix::identity(&f, d);
            diag.entries[0] = f.primitive_element();
            let mut gens = vec![Element::Matrix(diag)];
            gens.extend(transvections(&f, d));
            let g = Group::closure(name, Kind::Matrix { field: f.clone(), dim: d }, &gens)?;
            if (q as f64).powi((d * d) as i32) <= MAX_ENUMERATED_MATRICES as f64 {
                let invertible = invertible_matrices(&f, d);
                if invertible.len() != g.order() || invertible.iter().any(|m| g.id_of_raw(m).is_none()) {
                    return Err(Error::Internal(format!("{desc}: closure differs from the invertible matrices")));
                }
            }
            g
        }
        SpecialLinear(2, q) => {
            let f = matrix_field(q)?;
            let elements = matrices_where(&f, 2, |m| determinant(&f, 2, m) == 1);
            let id = Matrix::identity(&f, 2).entries;
            group_from_elements(name, Kind::Matrix { field: f, dim: 2 }, &id, &elements)?
        }
        SpecialLinear(d, q) => {
            let f = matrix_field(q)?;
            let gens = transvections(&f, d as usize);
            Group::closure(name, Kind::Matrix { field: f, dim: d as usize }, &gens)?
        }
        Symplectic(_, q) => {
            let f = matrix_field(q)?;
            let j = Matrix::from_rows(&f, &[&[0, 1], &[f.raw_neg(1), 0]]);
            let preserves_form = |m: &[u32]| {
                let m = Matrix { field: f.clone(), dim: 2, entries: m.to_vec() };
                m.transpose().mul(&j).mul(&m) == j
            };
            let elements = matrices_where(&f, 2, preserves_form);
            let id = Matrix::identity(&f, 2).entries;
            group_from_elements(name, Kind::Matrix { field: f.clone(), dim: 2 }, &id, &elements)?
        }
        Unitary(d, q) => {
            let f2 = field_of_order(q * q)?;
            let elements = unitary_elements(&f2, d as usize, q);
            let kind = Kind::Matrix { field: f2.clone(), dim: d as usize };
            group_from_elements(name, kind, &Matrix::identity(&f2, d as usize).entries, &elements)?
        }
        ProjectiveSpecialLinear(_, q) => {
            let f = matrix_field(q)?;
            let gens: Vec<Element> = transvections(&f, 2)
                .into_iter()
                .map(|t| match t {
                    Element::Matrix(m) => Element::Perm(projective_action(&f, &m.entries)),
                    _ => unreachable!(),
                })
                .collect();
            Group::closure(name, Kind::Perm { degree: q as usize + 1 }, &gens)?
        }
        MatrixAlgebra(..) => unreachable!("rejected above"),
    };
    if BigUint::from(group.order()) != expected {
        return Err(Error::Internal(format!("{desc}: built order {} but formula gives {expected}", group.order())));
    }
    Ok(group)
}

/// Parses and builds in one step.
pub fn build_str(text: &str) -> Result<Group> {
    build(&parse(text)?)
}

/// Representative descriptors of every family whose order is at most
/// `max_order`, sorted by order then text. Abelian groups are sampled and
/// dihedral groups stop at D(100); the other families are listed in full.
pub fn enumerate(max_order: u64) -> Vec<Descriptor> {
    use Descriptor::*;
    let mut out = vec![Quaternion];
    out.extend((1..=16).map(Cyclic));
    for ns in [&[2, 2][..], &[2, 4], &[3, 3], &[2, 6], &[4, 4], &[2, 2, 2], &[2, 2, 4], &[2, 2, 2, 2], &[3, 3, 3]] {
        out.push(Abelian(ns.to_vec()));
    }
    out.extend((3..=7).map(Symmetric));
    out.extend((4..=7).map(Alternating));
    out.extend((3..=max_order.min(200) as u32 / 2).map(Dihedral));
    out.extend((2..=7).filter(|&p| is_prime(p as u64)).map(Unitriangular));
    let qs: Vec<u64> = (2..=64).filter(|&q| prime_power(q).is_some()).collect();
    for &q in &qs {
        for d in 2..=3 {
            out.extend([GeneralLinear(d, q), SpecialLinear(d, q), Unitary(d, q)]);
        }
        out.extend([Symplectic(2, q), ProjectiveSpecialLinear(2, q)]);
    }
    let mut out: Vec<(BigUint, Descriptor)> = out
        .into_iter()
        .filter_map(|d| d.order_formula().filter(|o| *o <= BigUint::from(max_order)).map(|o| (o, d)))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.to_string().cmp(&b.1.to_string())));
    out.dedup_by(|a, b| a.1 == b.1);
    out.into_iter().map(|(_, d)| d).collect()
}
