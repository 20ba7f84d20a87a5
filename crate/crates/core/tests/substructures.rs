//! Ideals, quotients, centers, normalizers and series against subset
//! enumeration.

use mlakit_core::substructures::{
    abelian_ideal_check, all_ideals, centers, classify_series, commutator_ideal, ideal_closure,
    is_ideal, is_subalgebra, normalizer, quotient,
};
use mlakit_core::{catalog, validate_algebra, FiniteMla, Subset};
use proptest::prelude::*;

fn subsets_with_identity(n: usize) -> impl Iterator<Item = Subset> {
    (0u32..1 << (n - 1)).map(move |bits| {
        Subset::from_indices(
            n,
            std::iter::once(0).chain((1..n).filter(move |&x| bits >> (x - 1) & 1 == 1)),
        )
    })
}

fn naive_is_ideal(a: &FiniteMla, s: &Subset) -> bool {
    let n = a.order();
    let inside = |x: usize| s.contains(x);
    (0..n).filter(|&x| inside(x)).all(|h| {
        (0..n).filter(|&k| inside(k)).all(|k| inside(a.mul(h, a.inv(k))))
            && (0..n).all(|x| {
                inside(a.mul(a.mul(x, h), a.inv(x))) && inside(a.bracket(h, x)) && inside(a.bracket(x, h))
            })
    })
}

fn naive_ideals(a: &FiniteMla) -> Vec<Subset> {
    let mut v: Vec<Subset> = subsets_with_identity(a.order()).filter(|s| naive_is_ideal(a, s)).collect();
    v.sort();
    v
}

const SMALL_KEYS: &[&str] = &[
    "trivial",
    "cyclic(2)",
    "cyclic(4)",
    "klein4",
    "cyclic(6)",
    "sym(3)",
    "heisenberg(2)",
    "lie_ring_zero(2,2,2)",
    "lie_ring_zero(2,4)",
    "commutator(sym(3))",
    "commutator(dihedral(4))",
    "dihedral(4)",
    "cyclic(8)",
];

fn build(key: &str) -> FiniteMla {
    catalog::build(key).unwrap()
}

#[test]
fn ideal_counts_of_small_groups() {
    let count = |k: &str| all_ideals(&build(k), 64).unwrap().len();
    assert_eq!(count("cyclic(2)"), 2);
    assert_eq!(count("klein4"), 5);
    assert_eq!(count("cyclic(4)"), 3);
}

#[test]
fn ideal_lattice_matches_subset_enumeration() {
    for key in SMALL_KEYS {
        let a = build(key);
        if a.order() > 8 {
            continue;
        }
        assert_eq!(all_ideals(&a, 64).unwrap(), naive_ideals(&a), "{key}");
    }
}

#[test]
fn ideal_enumeration_respects_its_bound() {
    assert!(all_ideals(&build("cyclic(8)"), 4).is_err());
}

#[test]
fn heisenberg_three_has_small_center_and_class_two() {
    let h = build("heisenberg(3)");
    let c = centers(&h);
    assert_eq!(c.algebraic_center.len(), 3);
    let s = classify_series(&h);
    assert_eq!(s.nilpotent_class, Some(2));
    assert_eq!(s.solvable_length, Some(2));
}

#[test]
fn sym_three_is_solvable_but_not_nilpotent() {
    let s = classify_series(&build("sym(3)"));
    assert_eq!(s.solvable_length, Some(2));
    assert_eq!(s.nilpotent_class, None);
    assert_eq!(s.derived[1].len(), 3);
}

#[test]
fn abelian_algebras_have_class_one_and_length_one() {
    for key in ["cyclic(6)", "klein4", "lie_ring_zero(2,4)"] {
        let s = classify_series(&build(key));
        assert_eq!((s.nilpotent_class, s.solvable_length), (Some(1), Some(1)), "{key}");
    }
    let s = classify_series(&build("trivial"));
    assert_eq!((s.nilpotent_class, s.solvable_length), (Some(0), Some(0)));
}

#[test]
fn transposition_is_self_normalizing_in_sym_three() {
    let a = build("sym(3)");
    let t = a.elements().find(|&x| a.element_order(x) == 2).unwrap();
    let h = Subset::from_indices(6, [0, t]);
    assert_eq!(normalizer(&a, &h).unwrap(), h);
}

#[test]
fn normalizer_rejects_non_subalgebras() {
    let a = build("cyclic(4)");
    assert!(normalizer(&a, &Subset::from_indices(4, [0, 1])).is_err());
}

#[test]
fn normalizer_is_the_largest_subalgebra_normalizing_h() {
    for key in SMALL_KEYS {
        let a = build(key);
        let n = a.order();
        if n > 8 {
            continue;
        }
        let subalgebras: Vec<Subset> = subsets_with_identity(n).filter(|s| is_subalgebra(&a, s)).collect();
        for h in &subalgebras {
            let nh = normalizer(&a, h).unwrap();
            assert!(h.is_subset_of(&nh), "{key}");
            assert!(is_subalgebra(&a, &nh), "{key}: {nh:?}");
            // Any subalgebra in which H is normal and absorbs left brackets sits inside.
            for s in subalgebras.iter().filter(|s| h.is_subset_of(s)) {
                let normalizes = s.iter().all(|g| {
                    h.iter().all(|x| h.contains(a.conj(x, g)) && h.contains(a.bracket(g, x)))
                });
                if normalizes {
                    assert!(s.is_subset_of(&nh), "{key}: {s:?} not in {nh:?}");
                }
            }
        }
    }
}

#[test]
fn quotient_by_center_of_heisenberg() {
    let h = build("heisenberg(3)");
    let z = centers(&h).algebraic_center;
    let q = quotient(&h, &z).unwrap();
    assert_eq!(q.quotient.order(), 9);
    assert!(q.quotient.has_trivial_bracket() || q.quotient.is_abelian_group());
    assert_eq!(q.coset_reps[0], 0);
}

#[test]
fn quotient_requires_an_ideal() {
    let a = build("sym(3)");
    let t = a.elements().find(|&x| a.element_order(x) == 2).unwrap();
    assert!(quotient(&a, &Subset::from_indices(6, [0, t])).is_err());
}

fn key_strategy() -> impl Strategy<Value = &'static str> {
    proptest::sample::select(SMALL_KEYS)
}

fn seed_for(a: &FiniteMla, bits: u64) -> Subset {
    Subset::from_indices(a.order(), a.elements().filter(|&x| bits >> (x % 64) & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_idempotent_monotone_and_minimal(key in key_strategy(), b1 in any::<u64>(), b2 in any::<u64>()) {
        let a = build(key);
        let s = seed_for(&a, b1);
        let t = s.union(&seed_for(&a, b2));
        let cs = ideal_closure(&a, &s);
        prop_assert!(is_ideal(&a, &cs));
        prop_assert!(s.is_subset_of(&cs));
        prop_assert_eq!(ideal_closure(&a, &cs), cs);
        prop_assert!(cs.is_subset_of(&ideal_closure(&a, &t)));
        for i in all_ideals(&a, 64).unwrap() {
            if s.is_subset_of(&i) {
                prop_assert!(cs.is_subset_of(&i));
            }
        }
    }

    #[test]
    fn centers_nest_and_are_ideals(key in key_strategy()) {
        let a = build(key);
        let c = centers(&a);
        prop_assert!(c.algebraic_center.is_subset_of(&c.group_center.intersection(&c.null)));
        prop_assert!(c.null.is_subset_of(&c.left_zero));
        prop_assert!(is_ideal(&a, &c.algebraic_center));
        prop_assert!(is_ideal(&a, &c.null));
    }

    #[test]
    fn quotients_validate(key in key_strategy(), pick in any::<usize>()) {
        let a = build(key);
        let ideals = all_ideals(&a, 64).unwrap();
        let i = ideals[pick % ideals.len()];
        let q = quotient(&a, &i).unwrap();
        prop_assert_eq!(q.quotient.order() * i.len(), a.order());
        let qa = &q.quotient;
        prop_assert!(validate_algebra(qa.order(), &qa.mul_rows(), &qa.bracket_rows()).is_ok());
        for x in a.elements() {
            for y in a.elements() {
                prop_assert_eq!(q.projection[a.mul(x, y)], qa.mul(q.projection[x], q.projection[y]));
                prop_assert_eq!(q.projection[a.bracket(x, y)], qa.bracket(q.projection[x], q.projection[y]));
            }
        }
    }

    #[test]
    fn commutator_ideal_is_symmetric_and_inside_both(key in key_strategy(), p1 in any::<usize>(), p2 in any::<usize>()) {
        let a = build(key);
        let ideals = all_ideals(&a, 64).unwrap();
        let (i, j) = (ideals[p1 % ideals.len()], ideals[p2 % ideals.len()]);
        let c = commutator_ideal(&a, &i, &j).unwrap();
        prop_assert_eq!(c, commutator_ideal(&a, &j, &i).unwrap());
        prop_assert!(c.is_subset_of(&i.intersection(&j)));
    }

    #[test]
    fn abelian_ideals_are_those_with_trivial_self_commutator(key in key_strategy(), pick in any::<usize>()) {
        let a = build(key);
        let ideals = all_ideals(&a, 64).unwrap();
        let i = ideals[pick % ideals.len()];
        let c = commutator_ideal(&a, &i, &i).unwrap();
        prop_assert_eq!(abelian_ideal_check(&a, &i), c.is_trivial());
    }
}
