//! Brute-force ground truth: commuting tuples counted by backtracking,
//! explicit orbits under simultaneous conjugation, and the Burnside count.
//!
//! Nothing here uses conjugacy classes or the branching matrix, so the
//! results can be compared against those routes.

use num_bigint::BigUint;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::gf::field_of_order;
use crate::groups::{mat_mul_into, Group};

/// Limits checked before any enumeration starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Cap on the work bound `sum_x |Z(x)|^(n-1)` (pair scans for the
    /// matrix algebra).
    pub work: u128,
    /// Cap on the estimated memory of an explicit tuple set.
    pub memory_bytes: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { work: 20_000_000_000, memory_bytes: 2 << 30 }
    }
}

/// Centralizer of every element, as ascending id lists.
fn centralizers(g: &Group) -> Vec<Vec<u32>> {
    let n = g.order() as u32;
    (0..n).into_par_iter().map(|x| (0..n).filter(|&y| g.commutes(x, y)).collect()).collect()
}

fn check_work(cents: &[Vec<u32>], n: u32, budget: &Budget) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    // Every tuple extends some x by n-1 elements of Z(x).
    let estimate = cents.iter().fold(0u128, |acc, c| acc.saturating_add((c.len() as u128).saturating_pow(n - 1)));
    if estimate > budget.work {
        return Err(Error::Budget { estimate, budget: budget.work });
    }
    Ok(())
}

/// Commuting `n`-tuples extending a prefix whose common centralizer is
/// `pool`, with `left` coordinates still to choose.
fn extend_count(g: &Group, pool: &[u32], left: u32) -> u128 {
    if left == 0 {
        return 1;
    }
    if left == 1 {
        return pool.len() as u128;
    }
    pool.iter()
        .map(|&x| {
            let next: Vec<u32> = pool.iter().copied().filter(|&y| g.commutes(x, y)).collect();
            extend_count(g, &next, left - 1)
        })
        .sum()
}

fn tuples_in(g: &Group, cents: &[Vec<u32>], pool: &[u32], n: u32) -> u128 {
    match n {
        0 => 1,
        1 => pool.len() as u128,
        _ => pool
            .par_iter()
            .map(|&x| {
                let next: Vec<u32> = cents[x as usize].iter().copied().filter(|y| pool.binary_search(y).is_ok()).collect();
                extend_count(g, &next, n - 1)
            })
            .sum(),
    }
}

/// `|G^(n)|`, the number of pairwise commuting `n`-tuples.
pub fn commuting_tuples_count(g: &Group, n: u32, budget: &Budget) -> Result<BigUint> {
    let cents = centralizers(g);
    check_work(&cents, n, budget)?;
    let all: Vec<u32> = (0..g.order() as u32).collect();
    Ok(BigUint::from(tuples_in(g, &cents, &all, n)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleOrbitReport {
    pub descriptor: String,
    pub n: u32,
    /// `|G^(n)|`.
    pub tuple_count: BigUint,
    /// Orbits found by breadth-first search under conjugation.
    pub orbit_count: BigUint,
    /// `(1/|G|) sum_g |Z(g)^(n)|`.
    pub burnside_count: BigUint,
    /// Sum of the explicit orbit sizes; equals `tuple_count`.
    pub orbit_size_sum: BigUint,
    pub method: String,
}

impl TupleOrbitReport {
    pub fn consistent(&self) -> bool {
        self.orbit_count == self.burnside_count && self.orbit_size_sum == self.tuple_count
    }
}

fn enumerate_tuples(g: &Group, cents: &[Vec<u32>], n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n as usize);
    fn rec(g: &Group, pool: &[u32], left: u32, prefix: &mut Vec<u32>, out: &mut Vec<u32>) {
        if left == 0 {
            out.extend_from_slice(prefix);
            return;
        }
        for &x in pool {
            prefix.push(x);
            let next: Vec<u32> = pool.iter().copied().filter(|&y| g.commutes(x, y)).collect();
            rec(g, &next, left - 1, prefix, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return out;
    }
    for x in 0..g.order() as u32 {
        prefix.push(x);
        rec(g, &cents[x as usize], n - 1, &mut prefix, &mut out);
        prefix.pop();
    }
    out
}

/// `c_G(n)` by explicit orbit enumeration, cross-checked with Burnside.
pub fn simultaneous_classes_count(g: &Group, n: u32, budget: &Budget) -> Result<TupleOrbitReport> {
    let cents = centralizers(g);
    check_work(&cents, n, budget)?;
    let all: Vec<u32> = (0..g.order() as u32).collect();
    let tuple_count = tuples_in(g, &cents, &all, n);
    let width = n.max(1) as u128;
    let memory = tuple_count.saturating_mul(4 * width + 48);
    if memory > budget.memory_bytes {
        return Err(Error::Budget { estimate: memory, budget: budget.memory_bytes });
    }

    let (orbit_count, orbit_size_sum) = if n == 0 {
        (1u128, 1u128)
    } else {
        let flat = enumerate_tuples(g, &cents, n);
        let w = n as usize;
        let index: FxHashMap<&[u32], usize> = flat.chunks(w).enumerate().map(|(i, t)| (t, i)).collect();
        let mut seen = vec![false; index.len()];
        let gens = g.generators();
        let (mut orbits, mut total) = (0u128, 0u128);
        let mut buf = vec![0u32; w];
        for start in 0..seen.len() {
            if seen[start] {
                continue;
            }
            orbits += 1;
            seen[start] = true;
            let mut queue = vec![start];
            let mut head = 0;
            while head < queue.len() {
                let t = &flat[queue[head] * w..(queue[head] + 1) * w];
                for &s in gens {
                    for (b, &x) in buf.iter_mut().zip(t) {
                        *b = g.conj(s, x);
                    }
                    let j = index[&buf[..]];
                    if !seen[j] {
                        seen[j] = true;
                        queue.push(j);
                    }
                }
                head += 1;
            }
            total += queue.len() as u128;
        }
        (orbits, total)
    };

    let fixed: u128 = all.par_iter().map(|&x| tuples_in(g, &cents, &cents[x as usize], n)).sum();
    if !fixed.is_multiple_of(g.order() as u128) {
        return Err(Error::Internal(format!("Burnside sum {fixed} not divisible by |G|")));
    }
    Ok(TupleOrbitReport {
        descriptor: g.descriptor().to_string(),
        n,
        tuple_count: BigUint::from(tuple_count),
        orbit_count: BigUint::from(orbit_count),
        burnside_count: BigUint::from(fixed / g.order() as u128),
        orbit_size_sum: BigUint::from(orbit_size_sum),
        method: "orbit BFS over generators; Burnside over all elements".into(),
    })
}

/// Ordered pairs `(A, B)` of `d x d` matrices over GF(q) with `AB = BA`,
/// by scanning every pair.
pub fn commuting_pairs_matrix_algebra(d: u32, q: u64, budget: &Budget) -> Result<BigUint> {
    let f = field_of_order(q)?;
    let d = d as usize;
    let cells = (d * d) as u32;
    let count = (q as u128).checked_pow(cells).filter(|&c| c <= u32::MAX as u128);
    let estimate = count.and_then(|c| c.checked_mul(c)).unwrap_or(u128::MAX);
    if d == 0 || estimate > budget.work {
        return Err(Error::Budget { estimate, budget: budget.work });
    }
    let count = count.expect("checked above") as u64;
    let decode = |mut idx: u64| -> Vec<u32> {
        (0..d * d)
            .map(|_| {
                let c = (idx % q) as u32;
                idx /= q;
                c
            })
            .collect()
    };
    let mats: Vec<Vec<u32>> = (0..count).map(decode).collect();
    let pairs: u128 = mats
        .par_iter()
        .map(|a| {
            let mut ab = vec![0; d * d];
            let mut ba = vec![0; d * d];
            mats.iter()
                .filter(|b| {
                    mat_mul_into(&f, d, a, b, &mut ab);
                    mat_mul_into(&f, d, b, a, &mut ba);
                    ab == ba
                })
                .count() as u128
        })
        .sum();
    Ok(BigUint::from(pairs))
}
