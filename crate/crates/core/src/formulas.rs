//! Registry of closed forms for commuting probabilities, evaluated exactly
//! at concrete `q`, and the harness comparing them with the engine.
//!
//! Formulas are stored as the printed text and parsed into dense
//! polynomials without any simplification, so a transcription slip shows up
//! as a consistency failure instead of being absorbed.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::branching::{build_branching, cp_from_matrix, cp_via_lescot};
use crate::catalog::{self, Descriptor};
use crate::error::{Error, Result};
use crate::gf::prime_power;
use crate::rational::ExactRational;

/// Dense polynomial in `q` with rational coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<BigRational>,
}

impl Poly {
    fn constant(c: BigRational) -> Poly {
        Poly { coeffs: vec![c] }.trimmed()
    }

    fn int(c: i64) -> Poly {
        Poly::constant(BigRational::from_integer(c.into()))
    }

    fn q() -> Poly {
        Poly { coeffs: vec![BigRational::zero(), BigRational::one()] }
    }

    fn trimmed(mut self) -> Poly {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn add(&self, o: &Poly, sign: i64) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
        let sign = BigRational::from_integer(sign.into());
        Poly { coeffs: (0..n).map(|i| get(self, i) + get(o, i) * &sign).collect() }.trimmed()
    }

    fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly { coeffs: vec![] };
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly { coeffs: c }.trimmed()
    }

    fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::int(1), |acc, _| acc.mul(self))
    }

    /// Horner evaluation.
    pub fn eval(&self, q: u64) -> BigRational {
        let q = BigRational::from_integer(q.into());
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * &q + c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            if i == 0 || !a.is_one() {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{i}")?,
            }
        }
        Ok(())
    }
}

/// Recursive-descent parser for `+ - * / ^`, implicit products, integers,
/// `q`, parentheses and binomials `C(a,k)` with `a` a polynomial.
struct PolyParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl PolyParser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn int(&mut self) -> Result<u32> {
        self.peek();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().or_else(|_| self.err("expected an integer"))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.mul(&Poly::int(-1))
            }
            _ => self.term()?,
        };
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = acc.add(&t, if op == b'+' { 1 } else { -1 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.int()?;
                    if d == 0 {
                        return self.err("division by zero");
                    }
                    acc = acc.mul(&Poly::constant(BigRational::new(1.into(), d.into())));
                }
                Some(b'(' | b'q' | b'C' | b'0'..=b'9') => acc = acc.mul(&self.factor()?),
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.int()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'q') => {
                self.pos += 1;
                Ok(Poly::q())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'C') => {
                self.pos += 1;
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let k = self.int()?;
                self.expect(b')')?;
                let falling = (0..k).fold(Poly::int(1), |acc, i| acc.mul(&a.add(&Poly::int(i as i64), -1)));
                let fact: BigInt = (1..=k).map(BigInt::from).product();
                Ok(falling.mul(&Poly::constant(BigRational::new(1.into(), fact))))
            }
            Some(b'0'..=b'9') => Ok(Poly::int(self.int()? as i64)),
            _ => self.err("expected a term"),
        }
    }
}

/// Parses a polynomial in `q`.
pub fn parse_poly(text: &str) -> Result<Poly> {
    let mut p = PolyParser { s: text.as_bytes(), pos: 0 };
    let poly = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(poly)
}

/// Which `q` a formula is stated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Validity {
    PrimePowers,
    OddPrimePowers,
}

impl Validity {
    pub fn admits(self, q: u64) -> bool {
        prime_power(q).is_some() && (self == Validity::PrimePowers || q % 2 == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: Poly,
    pub denominator: Poly,
    pub validity: Validity,
}

impl RationalFunction {
    pub fn parse(num: &str, den: &str, validity: Validity) -> Result<RationalFunction> {
        let numerator = parse_poly(num)?;
        let denominator = parse_poly(den)?;
        if !numerator.has_integer_coeffs() || !denominator.has_integer_coeffs() {
            return Err(Error::InvalidInput(format!("{num:?} / {den:?} needs integer coefficients")));
        }
        if denominator.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(RationalFunction { numerator, denominator, validity })
    }

    pub fn evaluate(&self, q: u64) -> Result<ExactRational> {
        if !self.validity.admits(q) {
            return Err(Error::InvalidInput(format!("q = {q} outside the formula's range ({:?})", self.validity)));
        }
        let den = self.denominator.eval(q);
        if den.is_zero() {
            return Err(Error::InvalidInput(format!("denominator vanishes at q = {q}")));
        }
        Ok(ExactRational::from(self.numerator.eval(q) / den))
    }
}

/// Group families with registered closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    GL2,
    U2,
    Sp2,
    GL3,
    U3,
    PSL2,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::GL2, Family::U2, Family::Sp2, Family::GL3, Family::U3, Family::PSL2];

    pub fn descriptor(self, q: u64) -> Descriptor {
        match self {
            Family::GL2 => Descriptor::GeneralLinear(2, q),
            Family::U2 => Descriptor::Unitary(2, q),
            Family::Sp2 => Descriptor::Symplectic(2, q),
            Family::GL3 => Descriptor::GeneralLinear(3, q),
            Family::U3 => Descriptor::Unitary(3, q),
            Family::PSL2 => Descriptor::ProjectiveSpecialLinear(2, q),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Family::GL2 => "GL2",
            Family::U2 => "U2",
            Family::Sp2 => "Sp2",
            Family::GL3 => "GL3",
            Family::U3 => "U3",
            Family::PSL2 => "PSL2",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a registry entry evaluates to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Quantity {
    Cp(u32),
    ClassCount,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    InQ { family: Family, formula: RationalFunction },
    Constant { descriptor: Descriptor, value: ExactRational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistryEntry {
    /// Unique key such as `GL2.cp3` or `Q8.cp2`.
    pub key: String,
    pub quantity: Quantity,
    pub formula: Formula,
    /// Which printed table or statement the formula is copied from.
    pub source: &'static str,
}

impl RegistryEntry {
    pub fn family(&self) -> Option<Family> {
        match self.formula {
            Formula::InQ { family, .. } => Some(family),
            Formula::Constant { .. } => None,
        }
    }

    pub fn descriptor(&self, q: Option<u64>) -> Result<Descriptor> {
        match (&self.formula, q) {
            (Formula::InQ { family, .. }, Some(q)) => Ok(family.descriptor(q)),
            (Formula::Constant { descriptor, .. }, None) => Ok(descriptor.clone()),
            _ => Err(Error::InvalidInput(format!("{}: q given for a constant or missing for a family", self.key))),
        }
    }

    pub fn validity(&self) -> Option<Validity> {
        match &self.formula {
            Formula::InQ { formula, .. } => Some(formula.validity),
            Formula::Constant { .. } => None,
        }
    }
}

/// `(n, numerator, denominator)` rows of a printed cp_n table.
type Table = &'static [(u32, &'static str, &'static str)];

const GL2_TABLE: Table = &[
    (2, "1", "q^2 - q"),
    (3, "q^2 + q + 2", "q^6 - 2q^4 + q^2"),
    (4, "q^3 + q^2 + 4q + 1", "q^9 - 3q^7 + 3q^5 - q^3"),
    (5, "q^4 + q^3 + 7q^2 + q + 2", "q^12 - 4q^10 + 6q^8 - 4q^6 + q^4"),
];

const U2_TABLE: Table = GL2_TABLE;

const SP2_TABLE: Table = &[
    (2, "q + 4", "q^3 - q"),
    (3, "q^2 + 8q + 9", "q^5 - 2q^3 + q"),
    (4, "q^3 + 16q^2 + 19q + 16", "q^7 - 3q^5 + 3q^3 - q"),
    (5, "q^4 + 32q^3 + 38q^2 + 32q + 33", "q^9 - 4q^7 + 6q^5 - 4q^3 + q"),
];

const GL3_TABLE: Table = &[
    (2, "1", "(q - 1)^2 q^2 (q^2 + q + 1)"),
    (3, "q^4 + q^3 + q^2 + 4", "(q + 1)^2 (q - 1)^4 q^6 (q^2 + q + 1)^2"),
    (4, "q^6 + q^5 + 2q^4 + q^3 + 8q^2 + 4q + 1", "(q + 1)^3 (q - 1)^6 q^9 (q^2 + q + 1)^3"),
    (
        5,
        "q^8 + q^7 + 4q^6 + 23q^4 - 2q^3 + 13q^2 - q + 4",
        "(q + 1)^4 (q - 1)^8 q^12 (q^2 + q + 1)^4",
    ),
];

const U3_TABLE: Table = &[
    (2, "q^2 + q + 2", "(q - 1)(q + 1)^2 q^3 (q^2 - q + 1)"),
    (3, "q^4 + q^3 + 5q^2 + 4q + 2", "(q - 1)^2 (q + 1)^4 q^6 (q^2 - q + 1)^2"),
    (4, "q^6 + q^5 + 8q^4 + 9q^3 + 14q^2 + 4q + 1", "(q - 1)^3 (q + 1)^6 q^9 (q^2 - q + 1)^3"),
    (
        5,
        "q^8 + q^7 + 12q^6 + 16q^5 + 37q^4 + 20q^3 + 17q^2 + 5q + 2",
        "(q - 1)^4 (q + 1)^8 q^12 (q^2 - q + 1)^4",
    ),
];

/// Every registered closed form, sorted by key.
pub fn registry() -> Vec<RegistryEntry> {
    let mut out = Vec::new();
    let tables: [(Family, Table, Validity, &'static str); 5] = [
        (Family::GL2, GL2_TABLE, Validity::PrimePowers, "cp_n table for GL_2"),
        (Family::U2, U2_TABLE, Validity::PrimePowers, "cp_n table for U_2"),
        (Family::Sp2, SP2_TABLE, Validity::OddPrimePowers, "cp_n table for Sp_2"),
        (Family::GL3, GL3_TABLE, Validity::PrimePowers, "cp_n table for GL_3"),
        (Family::U3, U3_TABLE, Validity::PrimePowers, "cp_n table for U_3"),
    ];
    for (family, table, validity, source) in tables {
        for &(n, num, den) in table {
            out.push(RegistryEntry {
                key: format!("{family}.cp{n}"),
                quantity: Quantity::Cp(n),
                formula: Formula::InQ {
                    family,
                    formula: RationalFunction::parse(num, den, validity).expect("registered formula parses"),
                },
                source,
            });
        }
    }
    let psl = |num: &str, den: &str| Formula::InQ {
        family: Family::PSL2,
        formula: RationalFunction::parse(num, den, Validity::OddPrimePowers).expect("registered formula parses"),
    };
    out.push(RegistryEntry {
        key: "PSL2.cp2".into(),
        quantity: Quantity::Cp(2),
        formula: psl("q + 5", "(q + 1) q (q - 1)"),
        source: "cp_2 of PSL_2(q), q odd",
    });
    // (q+5)/2 as a rational function with constant denominator.
    out.push(RegistryEntry {
        key: "PSL2.k".into(),
        quantity: Quantity::ClassCount,
        formula: psl("q + 5", "2"),
        source: "class count of PSL_2(q), q odd",
    });
    let constants: [(&str, &str, &str, &'static str); 4] = [
        ("Q8.cp2", "Q8", "5/8", "cp_2 of the quaternion group"),
        ("D4.cp2", "D(4)", "5/8", "cp_2 of the dihedral group of order 8"),
        ("A5.cp2", "A(5)", "1/12", "cp_2 of A_5"),
        ("PSL2(3).cp2", "PSL(2,3)", "1/3", "cp_2 of PSL_2(3)"),
    ];
    for (key, desc, value, source) in constants {
        out.push(RegistryEntry {
            key: key.into(),
            quantity: Quantity::Cp(2),
            formula: Formula::Constant {
                descriptor: catalog::parse(desc).expect("registered descriptor parses"),
                value: value.parse().expect("registered constant parses"),
            },
            source,
        });
    }
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out
}

pub fn lookup(key: &str) -> Option<RegistryEntry> {
    registry().into_iter().find(|e| e.key == key)
}

/// Value of an entry at `q` (`None` for constants).
pub fn evaluate(entry: &RegistryEntry, q: Option<u64>) -> Result<ExactRational> {
    match (&entry.formula, q) {
        (Formula::InQ { formula, .. }, Some(q)) => formula.evaluate(q),
        (Formula::Constant { value, .. }, None) => Ok(value.clone()),
        _ => Err(Error::InvalidInput(format!("{}: q given for a constant or missing for a family", entry.key))),
    }
}

/// A printed branching matrix: entry text by `[row][column]`, column 0 the
/// whole group.
pub struct PrintedMatrix {
    pub family: Family,
    pub entries: &'static [&'static [&'static str]],
    pub validity: Validity,
}

const U2_MATRIX: &[&[&str]] = &[
    &["q + 1", "0", "0", "0"],
    &["q + 1", "q(q + 1)", "0", "0"],
    &["(q + 1)q / 2", "0", "(q + 1)^2", "0"],
    &["(q^2 - q - 2) / 2", "0", "0", "q^2 - 1"],
];

const SP2_MATRIX: &[&[&str]] = &[
    &["2", "0", "0", "0", "0"],
    &["2", "2q", "0", "0", "0"],
    &["2", "0", "2q", "0", "0"],
    &["(q - 3) / 2", "0", "0", "q - 1", "0"],
    &["(q - 1) / 2", "0", "0", "0", "q + 1"],
];

const GL3_MATRIX: &[&[&str]] = &[
    &["q - 1", "0", "0", "0", "0", "0", "0", "0"],
    &["q - 1", "q(q - 1)", "0", "0", "0", "0", "0", "0"],
    &["(q - 1)(q - 2)", "0", "(q - 1)^2", "0", "0", "0", "0", "0"],
    &["q - 1", "q^2 - 1", "0", "q^2(q - 1)", "0", "0", "0", "0"],
    &["(q - 1)(q - 2)", "(q - 1)(q - 2)q", "(q - 1)^2", "0", "q(q - 1)^2", "0", "0", "0"],
    &["C(q - 1, 3)", "0", "(q - 1)C(q - 1, 2)", "0", "0", "(q - 1)^3", "0", "0"],
    &["(q - 1)C(q, 2)", "0", "(q - 1)C(q, 2)", "0", "0", "0", "(q - 1)^2(q + 1)", "0"],
    &["(q^3 - q) / 3", "0", "0", "0", "0", "0", "0", "q^3 - 1"],
];

const U3_MATRIX: &[&[&str]] = &[
    &["q + 1", "0", "0", "0", "0", "0", "0", "0"],
    &["q + 1", "q(q + 1)", "0", "0", "0", "0", "0", "0"],
    &["q(q + 1)", "0", "(q + 1)^2", "0", "0", "0", "0", "0"],
    &["q + 1", "q^2 - 1", "0", "(q + 1)q^2", "0", "0", "0", "0"],
    &["q(q + 1)", "(q + 1)q^2", "(q + 1)^2", "0", "q^2(q + 1)", "0", "0", "0"],
    &["C(q + 1, 3)", "0", "(q + 1)C(q + 1, 2)", "0", "0", "(q + 1)^3", "0", "0"],
    &["(q + 1)(q^2 - q - 2) / 2", "0", "(q + 1)(q^2 - q - 2) / 2", "0", "0", "0", "(q + 1)(q^2 - 1)", "0"],
    &["(q^3 - q) / 3", "0", "0", "0", "0", "0", "0", "q^3 + 1"],
];

pub fn printed_matrices() -> [PrintedMatrix; 4] {
    [
        PrintedMatrix { family: Family::U2, entries: U2_MATRIX, validity: Validity::PrimePowers },
        PrintedMatrix { family: Family::Sp2, entries: SP2_MATRIX, validity: Validity::OddPrimePowers },
        PrintedMatrix { family: Family::GL3, entries: GL3_MATRIX, validity: Validity::PrimePowers },
        PrintedMatrix { family: Family::U3, entries: U3_MATRIX, validity: Validity::PrimePowers },
    ]
}

impl PrintedMatrix {
    /// Entries at `q`; each must be a nonnegative integer.
    pub fn evaluate(&self, q: u64) -> Result<Vec<Vec<BigUint>>> {
        if !self.validity.admits(q) {
            return Err(Error::InvalidInput(format!("{} matrix not stated for q = {q}", self.family)));
        }
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|text| {
                        let v = parse_poly(text)?.eval(q);
                        if !v.is_integer() || v.is_negative() {
                            return Err(Error::InvalidInput(format!("{text:?} at q = {q} is not a count")));
                        }
                        Ok(v.to_integer().magnitude().clone())
                    })
                    .collect()
            })
            .collect()
    }

    /// Column sums at `q`; column 0 is `k(G)`.
    pub fn column_sums(&self, q: u64) -> Result<Vec<BigUint>> {
        let m = self.evaluate(q)?;
        Ok((0..m.len()).map(|i| m.iter().map(|row| &row[i]).sum()).collect())
    }

    /// `1^T B^(n-1) e_1 / |G|^(n-1)`.
    pub fn cp(&self, q: u64, n: u32) -> Result<ExactRational> {
        let m = self.evaluate(q)?;
        let k = m.len();
        let mut w = vec![BigUint::one(); k];
        for _ in 1..n {
            w = (0..k).map(|i| (0..k).map(|j| &w[j] * &m[j][i]).sum()).collect();
        }
        let order = self.family.descriptor(q).order_formula().expect("families are groups");
        Ok(ExactRational::from_ratio(&w[0], &order.pow(n - 1)))
    }
}

/// One point of a verification grid: a registry key and, for families, `q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub key: String,
    pub q: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    Default,
    Full,
}

impl std::str::FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Grid::Default),
            "full" => Ok(Grid::Full),
            _ => Err(Error::InvalidInput(format!("unknown grid {s:?}; expected default or full"))),
        }
    }
}

/// The `q` values visited for each family. Sp2 includes q = 2, where its
/// formulas are not stated; that row is reported as an exclusion.
pub fn grid_qs(grid: Grid, family: Family) -> Vec<u64> {
    match (grid, family) {
        (Grid::Default, Family::GL2 | Family::U2) => vec![2, 3, 4, 5],
        (Grid::Default, Family::Sp2) => vec![2, 3, 5, 7],
        (Grid::Default, Family::GL3) => vec![2, 3],
        (Grid::Default, Family::U3) => vec![2],
        (Grid::Default, Family::PSL2) => vec![3, 5, 7, 9],
        (Grid::Full, Family::GL2 | Family::U2) => vec![2, 3, 4, 5, 7, 8, 9],
        (Grid::Full, Family::Sp2) => vec![2, 3, 5, 7, 9, 11, 13],
        (Grid::Full, Family::GL3) => vec![2, 3, 4],
        (Grid::Full, Family::U3) => vec![2, 3],
        (Grid::Full, Family::PSL2) => vec![3, 5, 7, 9, 11, 13, 17, 19],
    }
}

pub fn grid_points(grid: Grid) -> Vec<GridPoint> {
    let mut pts = Vec::new();
    for e in registry() {
        match e.family() {
            Some(f) => pts.extend(grid_qs(grid, f).into_iter().map(|q| GridPoint { key: e.key.clone(), q: Some(q) })),
            None => pts.push(GridPoint { key: e.key.clone(), q: None }),
        }
    }
    pts.sort();
    pts
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub key: String,
    pub q: Option<u64>,
    pub n: u32,
    pub descriptor: String,
    pub engine_branching: String,
    pub engine_lescot: String,
    /// `None` when the formula is not stated at this `q`.
    pub registry: Option<String>,
    /// Engines agree with each other and, when stated, with the registry.
    #[serde(rename = "match")]
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<ReportRow>,
}

impl VerifyReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("report serializes")
    }

    /// Plain-text table, one row per grid point.
    pub fn to_table(&self) -> String {
        let mut s = format!("{:<14} {:>4} {:>3}  {:<26} {:<26} {:<26} {}\n", "key", "q", "n", "branching", "lescot", "registry", "ok");
        for r in &self.rows {
            let q = r.q.map_or("-".into(), |q| q.to_string());
            s += &format!(
                "{:<14} {:>4} {:>3}  {:<26} {:<26} {:<26} {}{}\n",
                r.key,
                q,
                r.n,
                r.engine_branching,
                r.engine_lescot,
                r.registry.as_deref().unwrap_or("(not stated)"),
                if r.matches { "yes" } else { "NO" },
                r.note.as_ref().map_or(String::new(), |n| format!("  {n}")),
            );
        }
        s
    }
}

/// Engine values for one group at every requested `n`.
struct EngineValues {
    order: BigUint,
    branching: BTreeMap<u32, ExactRational>,
    lescot: BTreeMap<u32, ExactRational>,
}

fn engine_values(desc: &Descriptor, ns: &[u32]) -> Result<EngineValues> {
    let g = catalog::build(desc)?;
    let b = build_branching(&g)?;
    let mut branching = BTreeMap::new();
    let mut lescot = BTreeMap::new();
    for &n in ns {
        branching.insert(n, cp_from_matrix(&b, n)?);
        lescot.insert(n, cp_via_lescot(&g, n)?);
    }
    Ok(EngineValues { order: BigUint::from(g.order()), branching, lescot })
}

/// Builds every group of the grid once, computes `cp_n` by branching and by
/// the Lescot recurrence, and compares with the registry. Groups run in
/// parallel; rows come back sorted by key, then `q`.
pub fn verify_suite(points: &[GridPoint]) -> Result<VerifyReport> {
    let entries: BTreeMap<String, RegistryEntry> = registry().into_iter().map(|e| (e.key.clone(), e)).collect();
    let mut by_group: BTreeMap<Descriptor, Vec<u32>> = BTreeMap::new();
    let mut resolved = Vec::new();
    for p in points {
        let e = entries.get(&p.key).ok_or_else(|| Error::InvalidInput(format!("unknown registry key {:?}", p.key)))?;
        let d = e.descriptor(p.q)?;
        let n = match e.quantity {
            Quantity::Cp(n) => n,
            Quantity::ClassCount => 2,
        };
        by_group.entry(d.clone()).or_default().push(n);
        resolved.push((p, e, d, n));
    }
    let groups: Vec<(Descriptor, Vec<u32>)> = by_group
        .into_iter()
        .map(|(d, mut ns)| {
            ns.sort_unstable();
            ns.dedup();
            (d, ns)
        })
        .collect();
    let values: BTreeMap<Descriptor, EngineValues> = groups
        .par_iter()
        .map(|(d, ns)| Ok((d.clone(), engine_values(d, ns)?)))
        .collect::<Result<_>>()?;

    let mut rows: Vec<ReportRow> = resolved
        .into_iter()
        .map(|(p, e, d, n)| {
            let v = &values[&d];
            let scale = |x: &ExactRational| match e.quantity {
                Quantity::ClassCount => x.clone() * ExactRational::from_ratio(&v.order, &BigUint::one()),
                Quantity::Cp(_) => x.clone(),
            };
            let br = scale(&v.branching[&n]);
            let le = scale(&v.lescot[&n]);
            let stated = e.validity().is_none_or(|val| p.q.is_some_and(|q| val.admits(q)));
            let (registry, note) = if stated {
                (Some(evaluate(e, p.q)?), None)
            } else {
                (None, Some(format!("formula stated for odd q only; engine value {br} recorded")))
            };
            let matches = br == le && registry.as_ref().is_none_or(|r| *r == br);
            Ok(ReportRow {
                key: e.key.clone(),
                q: p.q,
                n,
                descriptor: d.to_string(),
                engine_branching: br.to_string(),
                engine_lescot: le.to_string(),
                registry: registry.map(|r| r.to_string()),
                matches,
                note,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| (&a.key, a.q).cmp(&(&b.key, b.q)));
    Ok(VerifyReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn polynomial_parsing() {
        let p = parse_poly("q^2 - 2q + 1").unwrap();
        assert_eq!(p, parse_poly("(q - 1)^2").unwrap());
        assert_eq!(p.to_string(), "q^2 - 2q + 1");
        assert_eq!(parse_poly("(q+1) q (q-1)").unwrap(), parse_poly("q^3 - q").unwrap());
        assert_eq!(parse_poly("-q + 3").unwrap().eval(5), BigRational::from_integer((-2).into()));
        assert_eq!(parse_poly("7").unwrap().degree(), Some(0));
        assert!(parse_poly("q +").is_err());
        assert!(parse_poly("(q").is_err());
        assert!(parse_poly("q / 0").is_err());
        assert_eq!(parse_poly("(q - 1)C(q, 2)").unwrap(), parse_poly("(q - 1) q (q - 1) / 2").unwrap());
        assert_eq!(parse_poly("C(q + 1, 3)").unwrap(), parse_poly("(q + 1) q (q - 1) / 6").unwrap());
        assert_eq!(parse_poly("q / 2").unwrap().to_string(), "1/2q");
        assert!(RationalFunction::parse("q / 2", "1", Validity::PrimePowers).is_err());
    }

    #[test]
    fn registry_keys_are_unique() {
        let reg = registry();
        let mut keys: Vec<&str> = reg.iter().map(|e| e.key.as_str()).collect();
        keys.dedup();
        assert_eq!(keys.len(), reg.len());
        assert!(lookup("GL3.cp5").is_some());
    }

    #[test]
    fn evaluation_examples() {
        let at = |k: &str, q| evaluate(&lookup(k).unwrap(), Some(q)).unwrap();
        assert_eq!(at("GL2.cp2", 4), r("1/12"));
        assert_eq!(at("Sp2.cp2", 5), r("3/40"));
        assert_eq!(at("GL3.cp5", 2), r("1046/796594176"));
        assert_eq!(at("PSL2.cp2", 7), r("1/28"));
        assert_eq!(at("PSL2.k", 9), r("7"));
        assert_eq!(at("U2.cp3", 3), r("7/288"));
        assert!(evaluate(&lookup("Sp2.cp2").unwrap(), Some(2)).is_err());
        assert!(evaluate(&lookup("GL2.cp2").unwrap(), Some(6)).is_err());
        assert_eq!(evaluate(&lookup("A5.cp2").unwrap(), None).unwrap(), r("1/12"));
    }

    #[test]
    fn printed_matrices_are_counts_with_expected_first_columns() {
        let [u2, sp2, gl3, u3] = printed_matrices();
        for q in [2u64, 3, 4, 5] {
            assert_eq!(u2.column_sums(q).unwrap()[0], BigUint::from((q + 1) * (q + 1)));
            assert_eq!(gl3.column_sums(q).unwrap()[0], BigUint::from(q * q * q - q));
            assert_eq!(u3.column_sums(q).unwrap()[0], BigUint::from((q + 1) * (q * q + q + 2)));
        }
        assert_eq!(sp2.column_sums(3).unwrap()[0], BigUint::from(7u32));
        assert!(sp2.evaluate(2).is_err());
        assert_eq!(gl3.column_sums(2).unwrap()[0], BigUint::from(6u32));
        assert_eq!(u3.column_sums(2).unwrap()[0], BigUint::from(24u32));
    }

    #[test]
    fn matrices_reproduce_consistent_tables() {
        let [u2, _, gl3, _] = printed_matrices();
        for q in [2u64, 3, 4, 5] {
            for n in 2..=5 {
                let key = |f: &str| format!("{f}.cp{n}");
                assert_eq!(u2.cp(q, n).unwrap(), evaluate(&lookup(&key("U2")).unwrap(), Some(q)).unwrap());
                assert_eq!(gl3.cp(q, n).unwrap(), evaluate(&lookup(&key("GL3")).unwrap(), Some(q)).unwrap());
            }
        }
    }

    #[test]
    fn grid_is_sorted_and_covers_constants() {
        let pts = grid_points(Grid::Default);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(pts.iter().any(|p| p.key == "Q8.cp2" && p.q.is_none()));
        assert!(pts.iter().any(|p| p.key == "Sp2.cp2" && p.q == Some(2)));
        assert!(grid_points(Grid::Full).len() > pts.len());
    }

    #[test]
    fn small_verify_run() {
        let pts = vec![
            GridPoint { key: "U2.cp2".into(), q: Some(2) },
            GridPoint { key: "PSL2.cp2".into(), q: Some(7) },
            GridPoint { key: "A5.cp2".into(), q: None },
            GridPoint { key: "Sp2.cp2".into(), q: Some(2) },
        ];
        let rep = verify_suite(&pts).unwrap();
        assert_eq!(rep.rows.len(), 4);
        assert!(rep.all_match(), "{}", rep.to_table());
        let sp = rep.rows.iter().find(|r| r.key == "Sp2.cp2").unwrap();
        assert_eq!(sp.registry, None);
        assert_eq!(sp.engine_branching, "1/2");
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json[0]["key"], "A5.cp2");
        assert!(json[0]["match"].as_bool().unwrap());
    }
}
