//! Branching matrices over iterated centralizers.
//!
//! Each state is an exact subgroup `H` of the ambient group reached from `G`
//! by repeatedly taking centralizers of class representatives. Column `i`
//! of the matrix records, for every class of state `i`, which state its
//! centralizer is. Abelian states are absorbing with weight `|H|`.
//!
//! `c_G(n) = 1^T B^n e_root` counts orbits of commuting `n`-tuples under
//! simultaneous conjugation, and `cp_n(G) = c_G(n-1) / |G|^(n-1)`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::groups::{Group, Subgroup};
use crate::rational::ExactRational;

/// Total subgroup members held during expansion before giving up.
const MAX_STORED_MEMBERS: usize = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateInfo {
    /// First 16 hex digits of the SHA-256 of the member list.
    pub label: String,
    pub order: usize,
    pub class_count: usize,
    pub abelian: bool,
}

/// Square nonnegative matrix over centralizer states, stored by sparse
/// columns: `columns[i]` lists `(j, counts[j][i])` with ascending `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingMatrix {
    states: Vec<StateInfo>,
    columns: Vec<Vec<(usize, u64)>>,
    root: usize,
}

pub fn state_label(key: &[u32]) -> String {
    let mut h = Sha256::new();
    for m in key {
        h.update(m.to_le_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

struct Expansion {
    abelian: bool,
    class_count: usize,
    branches: Vec<(Subgroup, u64)>,
}

fn expand(g: &Group, h: &Subgroup) -> Result<Expansion> {
    if g.is_abelian(h) {
        return Ok(Expansion { abelian: true, class_count: h.order(), branches: Vec::new() });
    }
    let cd = g.conjugacy_classes(h);
    let centralizers = cd
        .classes
        .par_iter()
        .map(|c| g.centralizer(h, c.rep))
        .collect::<Result<Vec<_>>>()?;
    let mut agg: FxHashMap<Arc<[u32]>, (Subgroup, u64)> = FxHashMap::default();
    for z in centralizers {
        agg.entry(z.shared_key()).or_insert_with(|| (z, 0)).1 += 1;
    }
    let mut branches: Vec<(Subgroup, u64)> = agg.into_values().collect();
    branches.sort_by(|a, b| a.0.key().cmp(b.0.key()));
    Ok(Expansion { abelian: false, class_count: cd.len(), branches })
}

impl BranchingMatrix {
    /// Assembles a matrix from parts, checking shape, column sums and the
    /// absorbing property of abelian states.
    pub fn from_parts(states: Vec<StateInfo>, columns: Vec<Vec<(usize, u64)>>, root: usize) -> Result<Self> {
        let m = states.len();
        let bad = |msg: String| Err(Error::InvalidInput(format!("branching matrix: {msg}")));
        if columns.len() != m || root >= m {
            return bad(format!("{} columns for {m} states, root {root}", columns.len()));
        }
        for (i, col) in columns.iter().enumerate() {
            if col.windows(2).any(|w| w[0].0 >= w[1].0) || col.iter().any(|&(j, c)| j >= m || c == 0) {
                return bad(format!("column {i} is malformed"));
            }
            let sum: u64 = col.iter().map(|e| e.1).sum();
            if sum != states[i].class_count as u64 {
                return bad(format!("column {i} sums to {sum}, expected {}", states[i].class_count));
            }
            if states[i].abelian && col.as_slice() != [(i, states[i].order as u64)] {
                return bad(format!("abelian state {i} is not absorbing"));
            }
        }
        Ok(BranchingMatrix { states, columns, root })
    }

    pub fn states(&self) -> &[StateInfo] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn group_order(&self) -> usize {
        self.states[self.root].order
    }

    pub fn column(&self, i: usize) -> &[(usize, u64)] {
        &self.columns[i]
    }

    /// `counts[j][i]`.
    pub fn entry(&self, j: usize, i: usize) -> u64 {
        let col = &self.columns[i];
        col.binary_search_by_key(&j, |e| e.0).map_or(0, |p| col[p].1)
    }

    pub fn column_sum(&self, i: usize) -> u64 {
        self.columns[i].iter().map(|e| e.1).sum()
    }

    /// Row-major dense copy.
    pub fn dense(&self) -> Vec<Vec<u64>> {
        let m = self.dim();
        let mut out = vec![vec![0; m]; m];
        for (i, col) in self.columns.iter().enumerate() {
            for &(j, c) in col {
                out[j][i] = c;
            }
        }
        out
    }

    /// `1^T B^k` for `k = 0..=n`; entry `i` of row `k` is `c_{H_i}(k)`.
    pub fn weights(&self, n: u32) -> Vec<Vec<BigUint>> {
        let mut w = vec![BigUint::one(); self.dim()];
        let mut out = vec![w.clone()];
        for _ in 0..n {
            w = self
                .columns
                .iter()
                .map(|col| col.iter().map(|&(j, c)| &w[j] * c).sum())
                .collect();
            out.push(w.clone());
        }
        out
    }

    /// `c_G(k)` for `k = 0..=n`.
    pub fn c_series(&self, n: u32) -> Vec<BigUint> {
        self.weights(n).into_iter().map(|mut w| w.swap_remove(self.root)).collect()
    }
}

/// Builds the branching matrix of `g` by a breadth-first worklist over
/// states. Each wave of new states is expanded in parallel; state indices
/// are assigned afterwards in ascending key order, so the result does not
/// depend on scheduling.
pub fn build_branching(g: &Group) -> Result<BranchingMatrix> {
    let mut subgroups = vec![g.whole()];
    let mut known: FxHashMap<Arc<[u32]>, usize> = FxHashMap::default();
    known.insert(subgroups[0].shared_key(), 0);
    let mut expansions: Vec<Option<Expansion>> = vec![None];
    let mut stored = g.order();
    let mut wave = vec![0usize];
    while !wave.is_empty() {
        let results: Vec<Result<Expansion>> = wave.par_iter().map(|&i| expand(g, &subgroups[i])).collect();
        let mut next = Vec::new();
        for (&i, r) in wave.iter().zip(results) {
            let e = r?;
            for (z, _) in &e.branches {
                if !known.contains_key(z.key()) {
                    stored += z.order();
                    if stored > MAX_STORED_MEMBERS {
                        return Err(Error::SizeCap { order: z.order() as u64, cap: MAX_STORED_MEMBERS as u64 });
                    }
                    known.insert(z.shared_key(), subgroups.len());
                    next.push(subgroups.len());
                    subgroups.push(z.clone());
                    expansions.push(None);
                }
            }
            expansions[i] = Some(e);
        }
        log::debug!("{}: wave of {} states, {} new", g.descriptor(), wave.len(), next.len());
        wave = next;
    }

    let m = subgroups.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| subgroups[a].key().cmp(subgroups[b].key()));
    let mut index_of = vec![0; m];
    for (new, &old) in order.iter().enumerate() {
        index_of[old] = new;
    }
    let mut states = Vec::with_capacity(m);
    let mut columns = Vec::with_capacity(m);
    for (new, &old) in order.iter().enumerate() {
        let h = &subgroups[old];
        let e = expansions[old].as_ref().expect("every state is expanded");
        states.push(StateInfo {
            label: state_label(h.key()),
            order: h.order(),
            class_count: e.class_count,
            abelian: e.abelian,
        });
        let mut col: Vec<(usize, u64)> = if e.abelian {
            vec![(new, h.order() as u64)]
        } else {
            e.branches.iter().map(|(z, c)| (index_of[known[z.key()]], *c)).collect()
        };
        col.sort_unstable();
        columns.push(col);
    }
    BranchingMatrix::from_parts(states, columns, index_of[0])
}

/// A lumpable partition of the states and its quotient matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypePartition {
    /// Blocks of state indices, each ascending, ordered by least member.
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
    /// `quotient[p][s] = sum over u in block p of counts[u][t]` for any `t` in block `s`.
    pub quotient: Vec<Vec<u64>>,
    pub root_block: usize,
}

impl TypePartition {
    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    /// `1^T Q^n e_root_block`.
    pub fn c_tuples(&self, n: u32) -> BigUint {
        let k = self.dim();
        let mut w = vec![BigUint::one(); k];
        for _ in 0..n {
            w = (0..k).map(|s| (0..k).map(|p| &w[p] * self.quotient[p][s]).sum()).collect();
        }
        w[self.root_block].clone()
    }
}

/// Block ids numbered by first occurrence of each label.
fn canonical_blocks(labels: &[Vec<u64>]) -> Vec<usize> {
    let mut first: FxHashMap<&[u64], usize> = FxHashMap::default();
    labels
        .iter()
        .map(|l| {
            let next = first.len();
            *first.entry(l.as_slice()).or_insert(next)
        })
        .collect()
}

/// Coarsest lumpable partition refining the (order, class count) partition.
pub fn lump(b: &BranchingMatrix) -> TypePartition {
    let m = b.dim();
    let seed: Vec<Vec<u64>> = b.states.iter().map(|s| vec![s.order as u64, s.class_count as u64]).collect();
    let mut block_of = canonical_blocks(&seed);
    loop {
        let count = block_of.iter().max().map_or(0, |&x| x + 1);
        let sigs: Vec<Vec<u64>> = (0..m)
            .map(|s| {
                let mut agg: Vec<(u64, u64)> = Vec::new();
                for &(u, c) in &b.columns[s] {
                    agg.push((block_of[u] as u64, c));
                }
                agg.sort_unstable();
                let mut sig = vec![block_of[s] as u64];
                for (blk, c) in agg {
                    match sig.len() {
                        l if l >= 3 && sig[l - 2] == blk => sig[l - 1] += c,
                        _ => sig.extend([blk, c]),
                    }
                }
                sig
            })
            .collect();
        let refined = canonical_blocks(&sigs);
        let new_count = refined.iter().max().map_or(0, |&x| x + 1);
        block_of = refined;
        if new_count == count {
            break;
        }
    }
    let k = block_of.iter().max().map_or(0, |&x| x + 1);
    let mut blocks = vec![Vec::new(); k];
    for (s, &p) in block_of.iter().enumerate() {
        blocks[p].push(s);
    }
    let mut quotient = vec![vec![0u64; k]; k];
    for (s, blk) in blocks.iter().enumerate() {
        for &(u, c) in &b.columns[blk[0]] {
            quotient[block_of[u]][s] += c;
        }
    }
    TypePartition { root_block: block_of[b.root], blocks, block_of, quotient }
}

/// `c_G(n) = 1^T B^n e_root`.
pub fn c_tuples(b: &BranchingMatrix, n: u32) -> BigUint {
    b.weights(n).pop().expect("weights has n + 1 rows").swap_remove(b.root)
}

/// `cp_n(G) = c_G(n-1) / |G|^(n-1)` from a prebuilt matrix.
pub fn cp_from_matrix(b: &BranchingMatrix, n: u32) -> Result<ExactRational> {
    if n < 1 {
        return Err(Error::InvalidInput("cp_n needs n >= 1".into()));
    }
    let den = BigUint::from(b.group_order()).pow(n - 1);
    Ok(ExactRational::from_ratio(&c_tuples(b, n - 1), &den))
}

pub fn cp_via_branching(g: &Group, n: u32) -> Result<ExactRational> {
    cp_from_matrix(&build_branching(g)?, n)
}

/// `k(G) / |G|`.
pub fn cp2_classcount(g: &Group) -> ExactRational {
    let k = g.class_count(&g.whole());
    ExactRational::from_ratio(&BigUint::from(k), &BigUint::from(g.order()))
}

type ClassSplit = Arc<Vec<(Subgroup, usize)>>;

/// Recursive evaluation of
/// `cp_n(H) = (1/|H|) sum_i cp_{n-1}(Z_H(h_i)) / |C_i|^(n-2)`,
/// memoized by subgroup key and `n`.
struct Lescot<'a> {
    g: &'a Group,
    splits: FxHashMap<Arc<[u32]>, ClassSplit>,
    memo: FxHashMap<(Arc<[u32]>, u32), ExactRational>,
}

impl Lescot<'_> {
    /// Centralizers and sizes of the classes of `h`.
    fn split(&mut self, h: &Subgroup) -> Result<ClassSplit> {
        if let Some(s) = self.splits.get(h.key()) {
            return Ok(s.clone());
        }
        let cd = self.g.conjugacy_classes(h);
        let parts = cd
            .classes
            .par_iter()
            .map(|c| Ok((self.g.centralizer(h, c.rep)?, c.size)))
            .collect::<Result<Vec<_>>>()?;
        let parts = Arc::new(parts);
        self.splits.insert(h.shared_key(), parts.clone());
        Ok(parts)
    }

    fn cp(&mut self, h: &Subgroup, n: u32) -> Result<ExactRational> {
        if n <= 1 || self.g.is_abelian(h) {
            return Ok(ExactRational::one());
        }
        let memo_key = (h.shared_key(), n);
        if let Some(v) = self.memo.get(&memo_key) {
            return Ok(v.clone());
        }
        let mut total = ExactRational::zero();
        for (z, size) in self.split(h)?.iter() {
            let inner = self.cp(z, n - 1)?;
            let scale = BigUint::from(*size).pow(n - 2);
            total = total + inner / ExactRational::from_ratio(&scale, &BigUint::one());
        }
        let v = total / ExactRational::from_ratio(&BigUint::from(h.order()), &BigUint::one());
        self.memo.insert(memo_key, v.clone());
        Ok(v)
    }
}

pub fn cp_via_lescot(g: &Group, n: u32) -> Result<ExactRational> {
    if n < 1 {
        return Err(Error::InvalidInput("cp_n needs n >= 1".into()));
    }
    let mut l = Lescot { g, splits: FxHashMap::default(), memo: FxHashMap::default() };
    l.cp(&g.whole(), n)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_str;

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn cyclic_group_is_one_absorbing_state() {
        let g = build_str("C(6)").unwrap();
        let b = build_branching(&g).unwrap();
        assert_eq!(b.dense(), vec![vec![6]]);
        assert_eq!(c_tuples(&b, 3), BigUint::from(216u32));
        assert_eq!(lump(&b).dim(), 1);
    }

    #[test]
    fn column_sums_are_class_counts() {
        for s in ["S(4)", "Q8", "SL(2,3)", "U(2,2)", "D(6)"] {
            let g = build_str(s).unwrap();
            let b = build_branching(&g).unwrap();
            for (i, st) in b.states().iter().enumerate() {
                assert_eq!(b.column_sum(i), st.class_count as u64, "{s}");
            }
            assert_eq!(b.column_sum(b.root()) as usize, g.class_count(&g.whole()));
        }
    }

    #[test]
    fn small_values() {
        let q8 = build_str("Q8").unwrap();
        let b = build_branching(&q8).unwrap();
        assert_eq!(c_tuples(&b, 1), BigUint::from(5u32));
        assert_eq!(cp_from_matrix(&b, 2).unwrap(), r("5/8"));
        assert_eq!(cp_from_matrix(&b, 3).unwrap(), r("11/32"));

        let gl22 = build_str("GL(2,2)").unwrap();
        let b = build_branching(&gl22).unwrap();
        assert_eq!(c_tuples(&b, 2), BigUint::from(8u32));
        assert_eq!(cp_from_matrix(&b, 2).unwrap(), r("1/2"));

        let u23 = build_str("U(2,3)").unwrap();
        assert_eq!(cp_via_branching(&u23, 3).unwrap(), r("7/288"));
    }

    #[test]
    fn lescot_agrees_with_branching() {
        for s in ["S(4)", "A(5)", "Q8", "SL(2,3)", "U(2,2)", "GL(2,3)", "UT(3,3)", "C(4)"] {
            let g = build_str(s).unwrap();
            let b = build_branching(&g).unwrap();
            for n in 1..=5 {
                assert_eq!(cp_via_lescot(&g, n).unwrap(), cp_from_matrix(&b, n).unwrap(), "{s} n={n}");
            }
            assert_eq!(cp2_classcount(&g), cp_from_matrix(&b, 2).unwrap(), "{s}");
        }
    }

    #[test]
    fn a5_and_abelian_examples() {
        let a5 = build_str("A(5)").unwrap();
        assert_eq!(cp_via_lescot(&a5, 2).unwrap(), r("1/12"));
        let c = build_str("CxC(2,3)").unwrap();
        for n in 2..=4 {
            assert_eq!(cp_via_lescot(&c, n).unwrap(), ExactRational::one());
        }
    }

    #[test]
    fn lumping_preserves_counts() {
        for s in ["S(4)", "GL(2,3)", "U(2,3)", "SL(2,5)", "D(5)"] {
            let b = build_branching(&build_str(s).unwrap()).unwrap();
            let t = lump(&b);
            for n in 0..=6 {
                assert_eq!(t.c_tuples(n), c_tuples(&b, n), "{s} n={n}");
            }
            for blk in &t.blocks {
                for &s2 in blk {
                    let mut sums = vec![0u64; t.dim()];
                    for &(u, c) in b.column(s2) {
                        sums[t.block_of[u]] += c;
                    }
                    let col: Vec<u64> = (0..t.dim()).map(|p| t.quotient[p][t.block_of[s2]]).collect();
                    assert_eq!(sums, col);
                }
            }
        }
    }

    #[test]
    fn gl2_over_f5_has_four_types() {
        let b = build_branching(&build_str("GL(2,5)").unwrap()).unwrap();
        assert_eq!(lump(&b).dim(), 4);
    }

    #[test]
    fn from_parts_rejects_bad_input() {
        let st = |order, class_count, abelian| StateInfo { label: String::new(), order, class_count, abelian };
        assert!(BranchingMatrix::from_parts(vec![st(4, 4, true)], vec![vec![(0, 4)]], 0).is_ok());
        assert!(BranchingMatrix::from_parts(vec![st(4, 4, true)], vec![vec![(0, 3)]], 0).is_err());
        assert!(BranchingMatrix::from_parts(vec![st(4, 4, true)], vec![vec![(0, 4)]], 1).is_err());
        assert!(BranchingMatrix::from_parts(vec![st(4, 4, true)], vec![vec![(1, 4)]], 0).is_err());
    }

    #[test]
    fn labels_are_stable() {
        assert_eq!(state_label(&[0]).len(), 16);
        assert_eq!(state_label(&[0, 1, 2]), state_label(&[0, 1, 2]));
        assert_ne!(state_label(&[0, 1]), state_label(&[0, 2]));
    }
}
