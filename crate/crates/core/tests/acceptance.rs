//! Acceptance criteria, one test each. Every test writes a single
//! `PASS`/`FAIL` line to standard output (outside the test harness capture)
//! and fails if any of its checks fails. All comparisons are exact.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Mutex, OnceLock};

use commprob::branching::{build_branching, c_tuples, cp2_classcount, cp_from_matrix, cp_via_lescot, BranchingMatrix};
use commprob::catalog::{self, Descriptor};
use commprob::cli::cli_main;
use commprob::feitfine::feit_fine_pairs;
use commprob::formulas::{
    evaluate, grid_points, grid_qs, lookup, printed_matrices, registry, verify_suite, Family, Grid, GridPoint,
};
use commprob::groups::Group;
use commprob::oracle::{commuting_pairs_matrix_algebra, commuting_tuples_count, simultaneous_classes_count, Budget};
use commprob::rational::ExactRational;
use num_bigint::BigUint;

/// Collects the outcome of one criterion.
struct Criterion {
    id: u32,
    title: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn eq<T: PartialEq + std::fmt::Display>(&mut self, label: &str, got: &T, want: &T) {
        self.check(got == want, || format!("{label}: got {got}, expected {want}"));
    }

    fn finish(self) {
        let line = if self.failures.is_empty() {
            format!("PASS criterion {:>2}: {} ({} checks)\n", self.id, self.title, self.checks)
        } else {
            format!(
                "FAIL criterion {:>2}: {} ({} of {} checks failed; first: {})\n",
                self.id,
                self.title,
                self.failures.len(),
                self.checks,
                self.failures[0]
            )
        };
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        assert!(self.failures.is_empty(), "criterion {} failed:\n{}", self.id, self.failures.join("\n"));
    }
}

type Built = &'static (Group, BranchingMatrix);

/// Group and branching matrix, built once per descriptor across tests.
fn built(desc: &Descriptor) -> Built {
    static CACHE: OnceLock<Mutex<HashMap<String, Built>>> = OnceLock::new();
    let key = desc.to_string();
    if let Some(b) = CACHE.get_or_init(Default::default).lock().unwrap().get(&key) {
        return b;
    }
    let g = catalog::build(desc).unwrap();
    let b = build_branching(&g).unwrap();
    let leaked: Built = Box::leak(Box::new((g, b)));
    CACHE.get().unwrap().lock().unwrap().insert(key, leaked);
    leaked
}

fn registry_value(key: &str, q: Option<u64>) -> ExactRational {
    evaluate(&lookup(key).unwrap_or_else(|| panic!("{key} not registered")), q).unwrap()
}

/// Engine cp_n by the branching matrix and by the Lescot recurrence, both
/// required to equal `want`.
fn check_cp_table(c: &mut Criterion, family: Family, qs: &[u64], ns: &[u32]) {
    for &q in qs {
        let d = family.descriptor(q);
        let (g, b) = built(&d);
        for &n in ns {
            let want = registry_value(&format!("{family}.cp{n}"), Some(q));
            c.eq(&format!("{d} cp{n} branching"), &cp_from_matrix(b, n).unwrap(), &want);
            c.eq(&format!("{d} cp{n} lescot"), &cp_via_lescot(g, n).unwrap(), &want);
        }
    }
}

fn rat(s: &str) -> ExactRational {
    s.parse().unwrap()
}

#[test]
fn criterion_01_degree_two_tables() {
    let mut c = Criterion::new(1, "cp_n of GL2 and U2 equal the printed tables, q in 2..5, n in 2..5");
    for family in [Family::GL2, Family::U2] {
        check_cp_table(&mut c, family, &[2, 3, 4, 5], &[2, 3, 4, 5]);
    }
    c.finish();
}

#[test]
fn criterion_02_gl2_equals_u2() {
    let mut c = Criterion::new(2, "cp_n(GL2(q)) = cp_n(U2(q)), q in 2..5, n in 2..6");
    for q in [2, 3, 4, 5] {
        let (_, gl) = built(&Family::GL2.descriptor(q));
        let (_, u) = built(&Family::U2.descriptor(q));
        for n in 2..=6 {
            c.eq(&format!("q={q} n={n}"), &cp_from_matrix(gl, n).unwrap(), &cp_from_matrix(u, n).unwrap());
        }
    }
    c.finish();
}

#[test]
fn criterion_03_sp2_table() {
    let mut c = Criterion::new(3, "cp_n of Sp2 equals the printed table, q in {3,5,7}, n in 2..5; q=2 excluded");
    check_cp_table(&mut c, Family::Sp2, &[3, 5, 7], &[2, 3, 4, 5]);
    let (_, b) = built(&Family::Sp2.descriptor(2));
    c.eq("Sp(2,2) cp2", &cp_from_matrix(b, 2).unwrap(), &rat("1/2"));
    let report = verify_suite(&[GridPoint { key: "Sp2.cp2".into(), q: Some(2) }]).unwrap();
    let row = &report.rows[0];
    c.check(row.registry.is_none(), || "q=2 row carries a registry value".into());
    c.check(row.note.as_deref().is_some_and(|n| n.contains("1/2")), || format!("q=2 note {:?}", row.note));
    c.finish();
}

#[test]
fn criterion_04_degree_three_tables() {
    let mut c = Criterion::new(4, "cp_n of GL3 (q=2,3) and U3 (q=2,3) equal the printed tables, n in 2..5");
    check_cp_table(&mut c, Family::GL3, &[2, 3], &[2, 3, 4, 5]);
    check_cp_table(&mut c, Family::U3, &[2, 3], &[2, 3, 4, 5]);
    c.eq("|U(3,3)|", &built(&Family::U3.descriptor(3)).0.order(), &24192);
    c.finish();
}

#[test]
fn criterion_05_small_group_constants() {
    let mut c = Criterion::new(5, "cp2 of Q8, D4, A5, PSL2(3) and k(PSL2(q)) for q in {5,7,9}");
    for (desc, want) in [("Q8", "5/8"), ("D(4)", "5/8"), ("A(5)", "1/12"), ("PSL(2,3)", "1/3")] {
        let g = catalog::build_str(desc).unwrap();
        c.eq(desc, &cp2_classcount(&g), &rat(want));
    }
    for key in ["Q8.cp2", "D4.cp2", "A5.cp2", "PSL2(3).cp2"] {
        let entry = lookup(key).unwrap();
        let g = catalog::build(&entry.descriptor(None).unwrap()).unwrap();
        c.eq(key, &cp2_classcount(&g), &evaluate(&entry, None).unwrap());
    }
    for q in [5u64, 7, 9] {
        let (g, _) = built(&Family::PSL2.descriptor(q));
        let k = g.class_count(&g.whole()) as u64;
        c.eq(&format!("k(PSL(2,{q}))"), &k, &((q + 5) / 2));
        c.eq(&format!("PSL2.k at {q}"), &ExactRational::from_integer(k), &registry_value("PSL2.k", Some(q)));
    }
    c.finish();
}

#[test]
fn criterion_06_cross_method() {
    let mut c = Criterion::new(6, "branching, Lescot and oracle agree; branching = Lescot on the full grid");
    let budget = Budget::default();
    for d in catalog::enumerate(200) {
        let g = catalog::build(&d).unwrap();
        let b = build_branching(&g).unwrap();
        let order = BigUint::from(g.order());
        for n in 1..=5 {
            let via_b = cp_from_matrix(&b, n).unwrap();
            c.eq(&format!("{d} n={n} lescot"), &cp_via_lescot(&g, n).unwrap(), &via_b);
            if n == 2 {
                c.eq(&format!("{d} class count"), &cp2_classcount(&g), &via_b);
            }
            if n <= 3 {
                let t = commuting_tuples_count(&g, n, &budget).unwrap();
                c.eq(&format!("{d} n={n} oracle"), &ExactRational::from_ratio(&t, &order.pow(n)), &via_b);
            }
        }
    }
    let report = verify_suite(&grid_points(Grid::Full)).unwrap();
    for row in &report.rows {
        c.check(row.engine_branching == row.engine_lescot, || {
            format!("{} q={:?}: {} vs {}", row.key, row.q, row.engine_branching, row.engine_lescot)
        });
    }
    c.finish();
}

#[test]
fn criterion_07_burnside_and_tuple_identity() {
    let mut c = Criterion::new(7, "Burnside = orbit partition; |G^(n+1)| = |G| c_G(n) on the oracle grid");
    let budget = Budget::default();
    for d in catalog::enumerate(200) {
        let (g, b) = built(&d);
        for n in 1..=2 {
            let r = simultaneous_classes_count(g, n, &budget).unwrap();
            c.check(r.consistent(), || format!("{d} n={n}: report inconsistent"));
            c.eq(&format!("{d} n={n} burnside"), &r.burnside_count, &r.orbit_count);
            c.eq(&format!("{d} n={n} branching"), &c_tuples(b, n), &r.orbit_count);
            let next = commuting_tuples_count(g, n + 1, &budget).unwrap();
            c.eq(&format!("{d} n={n} identity"), &next, &(BigUint::from(g.order()) * &r.orbit_count));
        }
    }
    c.finish();
}

#[test]
fn criterion_08_feit_fine() {
    let mut c = Criterion::new(8, "P(d,q) equals brute-force pair counts; P(2,2) = 88");
    let budget = Budget::default();
    for (d, q) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)] {
        let brute = commuting_pairs_matrix_algebra(d, q, &budget).unwrap();
        c.eq(&format!("P({d},{q})"), &feit_fine_pairs(d, q).unwrap(), &brute);
    }
    c.eq("P(2,2)", &feit_fine_pairs(2, 2).unwrap(), &BigUint::from(88u32));
    c.finish();
}

/// cp2 bound for a p-group of derived length `d`.
fn p_group_bound(p: u64, d: u32) -> ExactRational {
    let p = BigUint::from(p);
    let num = p.pow(d) + p.pow(d - 1) - 1u32;
    ExactRational::from_ratio(&num, &p.pow(2 * d - 1))
}

#[test]
fn criterion_09_bound_suite() {
    let mut c = Criterion::new(9, "Gustafson, Dixon, p-group bound, rank-2 formula and the 3/40 threshold");
    let five_eighths = rat("5/8");
    let three_fortieths = rat("3/40");
    for d in catalog::enumerate(30_000) {
        let g = catalog::build(&d).unwrap();
        let whole = g.whole();
        let cp2 = cp2_classcount(&g);
        let meta = d.metadata();
        c.eq(&format!("{d} abelian flag"), &g.is_abelian(&whole), &meta.abelian);
        if !meta.abelian {
            c.check(cp2 <= five_eighths, || format!("{d}: cp2 {cp2} > 5/8"));
        }
        if meta.nonabelian_simple {
            c.check(cp2 <= rat("1/12"), || format!("{d}: simple with cp2 {cp2} > 1/12"));
        }
        if cp2 > three_fortieths && g.derived_length(&whole).is_none() {
            // Otherwise G must be A5 times an abelian group.
            let derived = g.commutator_subgroup(&whole);
            let center = g.center(&whole);
            let meet = derived.members().iter().filter(|&&x| center.contains(x)).count();
            let ok = derived.order() == 60 && meet == 1 && derived.order() * center.order() == g.order();
            c.check(ok, || format!("{d}: cp2 {cp2} > 3/40 but neither solvable nor A5 x abelian"));
        }
    }
    for desc in ["A(5)", "PSL(2,5)"] {
        c.eq(&format!("{desc} Dixon equality"), &cp2_classcount(&catalog::build_str(desc).unwrap()), &rat("1/12"));
    }
    for desc in ["Q8", "D(4)"] {
        c.eq(&format!("{desc} Gustafson equality"), &cp2_classcount(&catalog::build_str(desc).unwrap()), &five_eighths);
    }
    let p_groups: [(&str, u64); 9] = [
        ("D(4)", 2),
        ("Q8", 2),
        ("UT(3,2)", 2),
        ("UT(3,3)", 3),
        ("UT(3,5)", 5),
        ("UT(3,7)", 7),
        ("D(8)", 2),
        ("D(16)", 2),
        ("D(32)", 2),
    ];
    for (desc, p) in p_groups {
        let g = catalog::build_str(desc).unwrap();
        let dl = g.derived_length(&g.whole()).unwrap() as u32;
        c.check(dl >= 2, || format!("{desc}: derived length {dl}"));
        let cp2 = cp2_classcount(&g);
        let bound = p_group_bound(p, dl);
        c.check(cp2 <= bound, || format!("{desc}: cp2 {cp2} > {bound}"));
    }
    for (desc, p) in [("Q8", 2u64), ("D(4)", 2), ("UT(3,3)", 3)] {
        let (_, b) = built(&catalog::parse(desc).unwrap());
        for n in 2..=4u32 {
            let pb = BigUint::from(p);
            let want = ExactRational::from_ratio(&(pb.pow(n) + pb.pow(n - 1) - 1u32), &pb.pow(2 * n - 1));
            c.eq(&format!("{desc} rank-2 n={n}"), &cp_from_matrix(b, n).unwrap(), &want);
        }
    }
    c.finish();
}

#[test]
fn criterion_10_printed_matrices() {
    let mut c = Criterion::new(10, "printed branching matrices reproduce the printed tables; column-1 sums = k(G)");
    for pm in printed_matrices() {
        let ns: Vec<u32> = registry()
            .iter()
            .filter(|e| e.family() == Some(pm.family))
            .filter_map(|e| match e.quantity {
                commprob::formulas::Quantity::Cp(n) => Some(n),
                _ => None,
            })
            .collect();
        for q in grid_qs(Grid::Full, pm.family).into_iter().filter(|&q| pm.validity.admits(q)) {
            for &n in &ns {
                let table = registry_value(&format!("{}.cp{n}", pm.family), Some(q));
                c.eq(&format!("{} q={q} n={n} matrix vs table", pm.family), &pm.cp(q, n).unwrap(), &table);
            }
            let (g, _) = built(&pm.family.descriptor(q));
            let k = BigUint::from(g.class_count(&g.whole()));
            c.eq(&format!("{} q={q} column-1 sum", pm.family), &pm.column_sums(q).unwrap()[0], &k);
        }
    }
    let q = |x: u64| BigUint::from(x);
    for (family, qq, want) in [
        (Family::U2, 3u64, q(16)),
        (Family::Sp2, 5, q(9)),
        (Family::GL3, 2, q(6)),
        (Family::U3, 2, q(24)),
    ] {
        let pm = printed_matrices().into_iter().find(|m| m.family == family).unwrap();
        c.eq(&format!("{family} q={qq} column-1 sum example"), &pm.column_sums(qq).unwrap()[0], &want);
    }
    c.finish();
}

fn verify_json(threads: &str, dir: &std::path::Path, name: &str) -> Vec<u8> {
    let path = dir.join(name);
    let mut sink = Vec::new();
    let args = ["commprob", "--threads", threads, "verify", "--grid", "full", "--json", path.to_str().unwrap()];
    let code = cli_main(args, &mut sink);
    assert!(code == 0 || code == 1, "verify exited with {code}");
    std::fs::read(path).unwrap()
}

#[test]
fn criterion_11_determinism() {
    let mut c = Criterion::new(11, "full verify JSON is byte-identical across runs and thread counts 1 and 8");
    let dir = tempfile::tempdir().unwrap();
    let a = verify_json("1", dir.path(), "t1.json");
    let b = verify_json("8", dir.path(), "t8.json");
    let again = verify_json("8", dir.path(), "t8b.json");
    c.check(!a.is_empty(), || "empty report".into());
    c.check(a == b, || "thread counts 1 and 8 differ".into());
    c.check(b == again, || "two runs with 8 threads differ".into());
    c.finish();
}
