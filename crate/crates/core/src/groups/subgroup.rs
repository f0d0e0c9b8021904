//! Subgroups of an enumerated group and the class-theoretic operations on them.

use std::sync::Arc;

use crate::error::{Error, Result};

use super::Group;

/// A subgroup, identified by the sorted list of its ambient ids.
///
/// Two subgroups of the same ambient group are equal iff their keys are
/// equal. The generator list is a small generating set found by a greedy
/// scan and is only used to speed up orbit computations.
#[derive(Clone, Debug)]
pub struct Subgroup {
    members: Arc<[u32]>,
    generators: Vec<u32>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.members.hash(state)
    }
}

impl Subgroup {
    /// Canonical key: the sorted ambient ids.
    pub fn key(&self) -> &[u32] {
        &self.members
    }

    pub fn shared_key(&self) -> Arc<[u32]> {
        self.members.clone()
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn contains(&self, id: u32) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    fn position(&self, id: u32) -> Option<usize> {
        self.members.binary_search(&id).ok()
    }
}

/// One conjugacy class of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    /// Smallest member id.
    pub rep: u32,
    pub size: usize,
    /// Members in ascending id order.
    pub members: Vec<u32>,
}

/// Conjugacy classes of a subgroup, ordered by representative.
#[derive(Clone, Debug)]
pub struct ClassData {
    pub owner: Subgroup,
    pub classes: Vec<ConjugacyClass>,
    /// Class index of each owner member, aligned with `owner.members()`.
    class_of: Vec<u32>,
}

impl ClassData {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_index(&self, id: u32) -> Option<usize> {
        self.owner.position(id).map(|p| self.class_of[p] as usize)
    }
}

/// Dense membership marks over the ambient ids.
struct Marks {
    bits: Vec<u64>,
}

impl Marks {
    fn new(n: usize) -> Self {
        Marks { bits: vec![0; n.div_ceil(64)] }
    }

    #[inline]
    fn get(&self, i: u32) -> bool {
        self.bits[i as usize / 64] >> (i % 64) & 1 == 1
    }

    /// Sets the mark and reports whether it was newly set.
    #[inline]
    fn set(&mut self, i: u32) -> bool {
        let w = &mut self.bits[i as usize / 64];
        let m = 1u64 << (i % 64);
        let fresh = *w & m == 0;
        *w |= m;
        fresh
    }
}

impl Group {
    /// The whole group as a subgroup of itself.
    pub fn whole(&self) -> Subgroup {
        Subgroup {
            members: (0..self.order() as u32).collect::<Vec<_>>().into(),
            generators: self.generators().to_vec(),
        }
    }

    /// Closure of `gens` inside this group, as a sorted id list.
    fn close(&self, gens: &[u32], marks: &mut Marks) -> Vec<u32> {
        let mut elems = vec![0u32];
        marks.set(0);
        let mut head = 0;
        while head < elems.len() {
            let x = elems[head];
            for &g in gens {
                let y = self.mul(g, x);
                if marks.set(y) {
                    elems.push(y);
                }
            }
            head += 1;
        }
        elems
    }

    /// The subgroup generated by the given ids.
    pub fn generate(&self, gens: &[u32]) -> Subgroup {
        let mut marks = Marks::new(self.order());
        let mut members = self.close(gens, &mut marks);
        members.sort_unstable();
        let members: Arc<[u32]> = members.into();
        let generators = self.greedy_generators(&members);
        Subgroup { members, generators }
    }

    /// Greedy generating set: scan members in id order and keep each one that
    /// is not yet in the span of those kept so far. Every kept element at
    /// least doubles the span, so at most log2 |H| are kept.
    fn greedy_generators(&self, members: &[u32]) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut marks = Marks::new(self.order());
        let mut span = 1usize;
        marks.set(0);
        for &m in members {
            if span == members.len() {
                break;
            }
            if marks.get(m) {
                continue;
            }
            gens.push(m);
            marks = Marks::new(self.order());
            span = self.close(&gens, &mut marks).len();
        }
        gens
    }

    /// Wraps a member list known to be a subgroup.
    fn subgroup_unchecked(&self, mut members: Vec<u32>) -> Subgroup {
        members.sort_unstable();
        members.dedup();
        let members: Arc<[u32]> = members.into();
        let generators = self.greedy_generators(&members);
        Subgroup { members, generators }
    }

    /// Builds a subgroup from a member list, checking closure.
    pub fn subgroup(&self, members: Vec<u32>) -> Result<Subgroup> {
        let mut sorted = members;
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.first() != Some(&0) || sorted.iter().any(|&m| m as usize >= self.order()) {
            return Err(Error::InvalidInput("member list is not a subgroup".into()));
        }
        let h = self.subgroup_unchecked(sorted);
        let closed = h.members.iter().all(|&a| h.contains(self.inv(a)))
            && h.generators.iter().all(|&g| h.members.iter().all(|&a| h.contains(self.mul(g, a))));
        if !closed {
            return Err(Error::InvalidInput("member list is not closed".into()));
        }
        Ok(h)
    }

    /// Conjugacy classes of `h` under conjugation by `h`.
    ///
    /// Orbits are expanded breadth-first using the generators of `h`; seeds
    /// are taken in ascending id order, so each representative is the
    /// minimal id in its class.
    pub fn conjugacy_classes(&self, h: &Subgroup) -> ClassData {
        const UNSET: u32 = u32::MAX;
        let mut class_of = vec![UNSET; h.order()];
        let mut classes = Vec::new();
        let gens: Vec<(u32, u32)> = h.generators.iter().map(|&g| (g, self.inv(g))).collect();
        for (pos, &x) in h.members.iter().enumerate() {
            if class_of[pos] != UNSET {
                continue;
            }
            let idx = classes.len() as u32;
            class_of[pos] = idx;
            let mut orbit = vec![x];
            let mut head = 0;
            while head < orbit.len() {
                let y = orbit[head];
                for &(g, _) in &gens {
                    let z = self.conj(g, y);
                    let zp = h.position(z).expect("conjugate stays in the subgroup");
                    if class_of[zp] == UNSET {
                        class_of[zp] = idx;
                        orbit.push(z);
                    }
                }
                head += 1;
            }
            orbit.sort_unstable();
            classes.push(ConjugacyClass { rep: x, size: orbit.len(), members: orbit });
        }
        ClassData { owner: h.clone(), classes, class_of }
    }

    /// Number of conjugacy classes of `h`; `|h|` when abelian.
    pub fn class_count(&self, h: &Subgroup) -> usize {
        if self.is_abelian(h) {
            h.order()
        } else {
            self.conjugacy_classes(h).len()
        }
    }

    /// `Z_h(x)`, by a full scan of the members of `h`.
    pub fn centralizer(&self, h: &Subgroup, x: u32) -> Result<Subgroup> {
        if !h.contains(x) {
            return Err(Error::NotMember);
        }
        let members: Vec<u32> = h.members.iter().copied().filter(|&y| self.commutes(x, y)).collect();
        if members.len() == h.order() {
            return Ok(h.clone());
        }
        Ok(self.subgroup_unchecked(members))
    }

    pub fn is_abelian(&self, h: &Subgroup) -> bool {
        let g = &h.generators;
        g.iter().enumerate().all(|(i, &a)| g[i + 1..].iter().all(|&b| self.commutes(a, b)))
    }

    pub fn center(&self, h: &Subgroup) -> Subgroup {
        let members: Vec<u32> = h
            .members
            .iter()
            .copied()
            .filter(|&x| h.generators.iter().all(|&g| self.commutes(g, x)))
            .collect();
        self.subgroup_unchecked(members)
    }

    /// `[h, h]`: the normal closure in `h` of the commutators of generator
    /// pairs, which is the subgroup generated by all commutators.
    pub fn commutator_subgroup(&self, h: &Subgroup) -> Subgroup {
        let mut gens: Vec<u32> = Vec::new();
        for &a in &h.generators {
            for &b in &h.generators {
                let c = self.commutator(a, b);
                if c != 0 && !gens.contains(&c) {
                    gens.push(c);
                }
            }
        }
        let mut marks = Marks::new(self.order());
        let mut span = self.close(&gens, &mut marks);
        loop {
            let mut extra = None;
            'search: for &n in &gens {
                for &g in &h.generators {
                    let c = self.conj(g, n);
                    if !marks.get(c) {
                        extra = Some(c);
                        break 'search;
                    }
                }
            }
            match extra {
                Some(c) => {
                    gens.push(c);
                    marks = Marks::new(self.order());
                    span = self.close(&gens, &mut marks);
                }
                None => break,
            }
        }
        self.subgroup_unchecked(span)
    }

    /// Derived series `h = h0 > h1 > ...` up to the first repeated term.
    pub fn derived_series(&self, h: &Subgroup) -> Vec<Subgroup> {
        let mut series = vec![h.clone()];
        loop {
            let last = series.last().unwrap();
            let next = self.commutator_subgroup(last);
            if next == *last {
                return series;
            }
            let trivial = next.order() == 1;
            series.push(next);
            if trivial {
                return series;
            }
        }
    }

    /// Number of strict steps to the trivial group; `None` if not solvable.
    pub fn derived_length(&self, h: &Subgroup) -> Option<usize> {
        let series = self.derived_series(h);
        (series.last().unwrap().order() == 1).then(|| series.len() - 1)
    }

    /// Whether some `g` in `within` conjugates `a` onto `b`.
    pub fn subgroups_conjugate(&self, within: &Subgroup, a: &Subgroup, b: &Subgroup) -> bool {
        if a.order() != b.order() {
            return false;
        }
        if a == b {
            return true;
        }
        within.members.iter().any(|&g| a.generators.iter().all(|&x| b.contains(self.conj(g, x))))
    }

    /// Partition of the class indices of `classes` into z-classes: classes
    /// whose representatives have conjugate centralizers in the owner.
    pub fn z_classes(&self, classes: &ClassData) -> Vec<Vec<usize>> {
        let h = &classes.owner;
        let cents: Vec<Subgroup> = classes
            .classes
            .iter()
            .map(|c| self.centralizer(h, c.rep).expect("rep is a member"))
            .collect();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, c) in cents.iter().enumerate() {
            match blocks.iter_mut().find(|b| self.subgroups_conjugate(h, &cents[b[0]], c)) {
                Some(b) => b.push(i),
                None => blocks.push(vec![i]),
            }
        }
        blocks
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Element, Kind};
    use super::*;

    fn perm_group(degree: usize, gens: &[&[&[u32]]]) -> Group {
        let gens: Vec<Element> = gens.iter().map(|c| Element::perm_from_cycles(degree, c)).collect();
        Group::closure("test", Kind::Perm { degree }, &gens).unwrap()
    }

    fn s3() -> Group {
        perm_group(3, &[&[&[0, 1]], &[&[0, 1, 2]]])
    }

    fn a5() -> Group {
        perm_group(5, &[&[&[0, 1, 2]], &[&[0, 1, 3]], &[&[0, 1, 4]]])
    }

    #[test]
    fn s3_classes_and_centralizers() {
        let g = s3();
        let whole = g.whole();
        let cd = g.conjugacy_classes(&whole);
        assert_eq!(cd.len(), 3);
        let mut sizes: Vec<usize> = cd.classes.iter().map(|c| c.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        for c in &cd.classes {
            assert_eq!(c.rep, c.members[0]);
            let z = g.centralizer(&whole, c.rep).unwrap();
            assert_eq!(c.size * z.order(), 6);
        }
        let t = g.id_of(&Element::perm_from_cycles(3, &[&[0, 1]])).unwrap();
        assert_eq!(g.centralizer(&whole, t).unwrap().order(), 2);
        assert_eq!(g.centralizer(&whole, 0).unwrap(), whole);
    }

    #[test]
    fn centralizer_rejects_non_members() {
        let g = s3();
        let t = g.id_of(&Element::perm_from_cycles(3, &[&[0, 1]])).unwrap();
        let small = g.generate(&[t]);
        let c = g.id_of(&Element::perm_from_cycles(3, &[&[0, 1, 2]])).unwrap();
        assert_eq!(g.centralizer(&small, c), Err(Error::NotMember));
    }

    #[test]
    fn derived_series_of_s3_and_a5() {
        let g = s3();
        let series = g.derived_series(&g.whole());
        let orders: Vec<usize> = series.iter().map(|h| h.order()).collect();
        assert_eq!(orders, vec![6, 3, 1]);
        assert_eq!(g.derived_length(&g.whole()), Some(2));

        let a = a5();
        assert_eq!(a.order(), 60);
        let series = a.derived_series(&a.whole());
        assert_eq!(series.len(), 1);
        assert_eq!(a.derived_length(&a.whole()), None);
        assert_eq!(a.conjugacy_classes(&a.whole()).len(), 5);
    }

    #[test]
    fn commutator_subgroup_matches_all_pairs() {
        for g in [s3(), a5(), perm_group(4, &[&[&[0, 1]], &[&[0, 1, 2, 3]]])] {
            let whole = g.whole();
            let n = g.order() as u32;
            let all: Vec<u32> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| g.commutator(a, b)).collect();
            assert_eq!(g.commutator_subgroup(&whole), g.generate(&all));
        }
    }

    #[test]
    fn z_classes_of_s3() {
        let g = s3();
        let cd = g.conjugacy_classes(&g.whole());
        assert_eq!(g.z_classes(&cd).len(), 3);
    }

    #[test]
    fn abelian_subgroup_is_one_z_class() {
        let g = perm_group(5, &[&[&[0, 1, 2, 3, 4]]]);
        let cd = g.conjugacy_classes(&g.whole());
        assert_eq!(cd.len(), 5);
        assert!(cd.classes.iter().all(|c| c.size == 1));
        assert_eq!(g.z_classes(&cd), vec![vec![0, 1, 2, 3, 4]]);
        assert!(g.is_abelian(&g.whole()));
    }

    #[test]
    fn subgroup_validation() {
        let g = s3();
        let t = g.id_of(&Element::perm_from_cycles(3, &[&[0, 1]])).unwrap();
        assert!(g.subgroup(vec![0, t]).is_ok());
        let c = g.id_of(&Element::perm_from_cycles(3, &[&[0, 1, 2]])).unwrap();
        assert!(g.subgroup(vec![0, c]).is_err());
        assert!(g.subgroup(vec![t]).is_err());
    }

    #[test]
    fn greedy_generators_are_small() {
        let g = a5();
        let whole = g.whole();
        let h = g.generate(whole.members());
        assert_eq!(h, whole);
        assert!(h.generators().len() <= 6);
        assert_eq!(g.generate(h.generators()), whole);
    }
}
