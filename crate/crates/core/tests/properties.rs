use std::sync::OnceLock;

use commprob::branching::{build_branching, c_tuples, cp2_classcount, cp_from_matrix, lump};
use commprob::catalog::{self, Descriptor};
use commprob::oracle::{commuting_tuples_count, Budget};
use commprob::rational::ExactRational;
use num_bigint::BigUint;
use proptest::prelude::*;

fn small() -> &'static [Descriptor] {
    static LIST: OnceLock<Vec<Descriptor>> = OnceLock::new();
    LIST.get_or_init(|| catalog::enumerate(200))
}

fn any_small() -> impl Strategy<Value = Descriptor> {
    (0..small().len()).prop_map(|i| small()[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn class_equation_and_orbit_stabilizer(d in any_small()) {
        let g = catalog::build(&d).unwrap();
        let whole = g.whole();
        let cd = g.conjugacy_classes(&whole);
        prop_assert_eq!(cd.classes.iter().map(|c| c.size).sum::<usize>(), g.order());
        for c in &cd.classes {
            prop_assert_eq!(c.size * g.centralizer(&whole, c.rep).unwrap().order(), g.order());
        }
    }

    #[test]
    fn cp2_matches_pair_count(d in any_small()) {
        let g = catalog::build(&d).unwrap();
        let pairs = commuting_tuples_count(&g, 2, &Budget::default()).unwrap();
        let order = BigUint::from(g.order());
        prop_assert_eq!(cp2_classcount(&g), ExactRational::from_ratio(&pairs, &(&order * &order)));
    }

    #[test]
    fn column_sums_are_class_counts(d in any_small()) {
        let g = catalog::build(&d).unwrap();
        let b = build_branching(&g).unwrap();
        for (i, s) in b.states().iter().enumerate() {
            prop_assert_eq!(b.column_sum(i), s.class_count as u64);
            prop_assert_eq!(s.abelian, s.order == s.class_count);
        }
        prop_assert_eq!(b.column_sum(b.root()), g.class_count(&g.whole()) as u64);
    }

    #[test]
    fn lumping_preserves_counts(d in any_small(), n in 1u32..7) {
        let b = build_branching(&catalog::build(&d).unwrap()).unwrap();
        let t = lump(&b);
        prop_assert!(t.dim() <= b.dim());
        prop_assert_eq!(t.c_tuples(n), c_tuples(&b, n));
    }

    #[test]
    fn cp_decreases_in_n(d in any_small(), n in 1u32..6) {
        let b = build_branching(&catalog::build(&d).unwrap()).unwrap();
        let (a, next) = (cp_from_matrix(&b, n).unwrap(), cp_from_matrix(&b, n + 1).unwrap());
        prop_assert!(next <= a);
        prop_assert!(next > ExactRational::zero());
        prop_assert_eq!(cp_from_matrix(&b, 1).unwrap(), ExactRational::one());
    }
}

#[test]
fn abelian_groups_have_cp_one() {
    for d in small().iter().filter(|d| d.metadata().abelian) {
        let b = build_branching(&catalog::build(d).unwrap()).unwrap();
        assert_eq!(b.dim(), 1, "{d}");
        for n in 1..=6 {
            assert_eq!(cp_from_matrix(&b, n).unwrap(), ExactRational::one(), "{d}");
        }
    }
}

#[test]
fn p2_closed_form() {
    for q in [2u64, 3, 4, 5] {
        let want = BigUint::from(q.pow(6) + q.pow(5) - q.pow(3));
        assert_eq!(commprob::feitfine::feit_fine_pairs(2, q).unwrap(), want);
    }
}
