use std::fmt;

use crate::gf::FieldSpec;

/// A square matrix over a finite field, entries stored as field encodings in
/// row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub field: FieldSpec,
    pub dim: usize,
    pub entries: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u32>> = self.entries.chunks(self.dim).map(|r| r.to_vec()).collect();
        write!(f, "{:?}", rows)
    }
}

impl Matrix {
    pub fn identity(field: &FieldSpec, dim: usize) -> Matrix {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Matrix { field: field.clone(), dim, entries }
    }

    /// Matrix from integer rows; each value is a field encoding.
    pub fn from_rows(field: &FieldSpec, rows: &[&[u32]]) -> Matrix {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), dim, "matrix must be square");
                r.iter().copied()
            })
            .collect();
        Matrix { field: field.clone(), dim, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.dim + j]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let mut out = vec![0; self.dim * self.dim];
        mat_mul_into(&self.field, self.dim, &self.entries, &other.entries, &mut out);
        Matrix { field: self.field.clone(), dim: self.dim, entries: out }
    }

    pub fn determinant(&self) -> u32 {
        determinant(&self.field, self.dim, &self.entries)
    }

    pub fn transpose(&self) -> Matrix {
        let d = self.dim;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        Matrix { field: self.field.clone(), dim: d, entries }
    }
}

/// `out = a * b` for row-major `dim x dim` matrices.
#[inline]
pub(crate) fn mat_mul_into(f: &FieldSpec, dim: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0;
            for k in 0..dim {
                let x = a[i * dim + k];
                let y = b[k * dim + j];
                if x != 0 && y != 0 {
                    acc = f.raw_add(acc, f.raw_mul(x, y));
                }
            }
            out[i * dim + j] = acc;
        }
    }
}

/// Determinant by Gaussian elimination.
pub(crate) fn determinant(f: &FieldSpec, dim: usize, entries: &[u32]) -> u32 {
    let mut m = entries.to_vec();
    let mut det = 1;
    for col in 0..dim {
        let Some(pivot) = (col..dim).find(|&r| m[r * dim + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for j in 0..dim {
                m.swap(pivot * dim + j, col * dim + j);
            }
            det = f.raw_neg(det);
        }
        let pv = m[col * dim + col];
        det = f.raw_mul(det, pv);
        let pinv = f.raw_inv(pv).expect("pivot is nonzero");
        for r in col + 1..dim {
            let factor = f.raw_mul(m[r * dim + col], pinv);
            if factor == 0 {
                continue;
            }
            for j in col..dim {
                let sub = f.raw_mul(factor, m[col * dim + j]);
                m[r * dim + j] = f.raw_sub(m[r * dim + j], sub);
            }
        }
    }
    det
}

/// Matrix inverse by Gauss-Jordan elimination; `None` when singular.
pub(crate) fn inverse(f: &FieldSpec, dim: usize, entries: &[u32]) -> Option<Vec<u32>> {
    let w = 2 * dim;
    let mut m = vec![0; dim * w];
    for i in 0..dim {
        m[i * w..i * w + dim].copy_from_slice(&entries[i * dim..(i + 1) * dim]);
        m[i * w + dim + i] = 1;
    }
    for col in 0..dim {
        let pivot = (col..dim).find(|&r| m[r * w + col] != 0)?;
        if pivot != col {
            for j in 0..w {
                m.swap(pivot * w + j, col * w + j);
            }
        }
        let pinv = f.raw_inv(m[col * w + col]).ok()?;
        for j in 0..w {
            m[col * w + j] = f.raw_mul(m[col * w + j], pinv);
        }
        for r in 0..dim {
            if r == col {
                continue;
            }
            let factor = m[r * w + col];
            if factor == 0 {
                continue;
            }
            for j in 0..w {
                let sub = f.raw_mul(factor, m[col * w + j]);
                m[r * w + j] = f.raw_sub(m[r * w + j], sub);
            }
        }
    }
    let mut out = vec![0; dim * dim];
    for i in 0..dim {
        out[i * dim..(i + 1) * dim].copy_from_slice(&m[i * w + dim..(i + 1) * w]);
    }
    Some(out)
}

/// A concrete group element, before it is assigned an id by a [`super::Group`].
#[derive(Clone, PartialEq, Eq)]
pub enum Element {
    /// Image vector of a permutation of `{0, .., n-1}`.
    Perm(Vec<u32>),
    Matrix(Matrix),
    /// Index into a multiplication table supplied to the group.
    Abstract(u32),
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Perm(p) => write!(f, "Perm{:?}", p),
            Element::Matrix(m) => write!(f, "Matrix{:?}", m),
            Element::Abstract(i) => write!(f, "Abstract({i})"),
        }
    }
}

impl Element {
    /// Permutation from disjoint cycles on `n` points.
    pub fn perm_from_cycles(n: usize, cycles: &[&[u32]]) -> Element {
        let mut img: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for i in 0..c.len() {
                img[c[i] as usize] = c[(i + 1) % c.len()];
            }
        }
        Element::Perm(img)
    }
}
