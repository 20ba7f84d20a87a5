mod common;

use common::{arc, tuples};
use mlakit_core::correspondence::{
    act_h2_on_extension, act_violations, actions_equivalent, center_action, closure_check,
    convention_disagreements, resection, verify_correspondence, ActionClass,
};
use mlakit_core::substructures::{all_ideals, centers};
use mlakit_core::{
    build_crossed_product, catalog, cocycles_equivalent, extract_cocycle, ActionTerms, Cocycle2,
    Extension, FactorSet, Limits, Subset,
};

fn realized_actions(max_total: usize) -> Vec<(String, Extension, ActionTerms)> {
    let mut out = Vec::new();
    for key in catalog::STANDARD_KEYS {
        let a = arc(key);
        if a.order() > max_total {
            continue;
        }
        for ideal in all_ideals(&a, 64).unwrap() {
            let ext = Extension::from_ideal(a.clone(), &ideal).unwrap();
            let chi = extract_cocycle(&ext, &ext.canonical_section()).unwrap().action;
            out.push((format!("{key} {ideal:?}"), ext, chi));
        }
    }
    out
}

#[test]
fn equivalence_of_action_terms() {
    let (z2, z3) = (arc("cyclic(2)"), arc("cyclic(3)"));
    let triv = ActionTerms::trivial(z2.clone(), z3.clone());
    assert_eq!(actions_equivalent(&triv, &triv).unwrap(), Some(vec![0, 0]));
    let inv = ActionTerms::from_fn(z2, z3, |x, a| if x == 0 { a } else { (3 - a) % 3 }, |_, _| 0, |_, _| 0).unwrap();
    assert_eq!(actions_equivalent(&triv, &inv).unwrap(), None);
}

#[test]
fn inner_twists_are_equivalent() {
    // σ'_x = c·σ_x·c⁻¹ pointwise for a fixed c ∈ S₃ kernel.
    let a = arc("cyclic(2)*sym(3)");
    let ext = Extension::from_ideal(a, &Subset::from_indices(12, 0..6)).unwrap();
    let c = extract_cocycle(&ext, &ext.canonical_section()).unwrap();
    for s in ext.all_sections() {
        let d = extract_cocycle(&ext, &s).unwrap();
        let h = actions_equivalent(&d.action, &c.action).unwrap().expect("sections give equivalent terms");
        let r = resection(&c, &h).unwrap();
        assert_eq!(r.action, d.action);
    }
}

#[test]
fn equivalence_is_an_equivalence_relation() {
    let cases = realized_actions(12);
    let by_datum = |k: usize| (cases[k].2.nq(), cases[k].2.ni());
    for x in 0..cases.len() {
        for y in 0..cases.len() {
            if by_datum(x) != by_datum(y) || cases[x].2.q != cases[y].2.q || cases[x].2.i != cases[y].2.i {
                continue;
            }
            let xy = actions_equivalent(&cases[x].2, &cases[y].2).unwrap().is_some();
            let yx = actions_equivalent(&cases[y].2, &cases[x].2).unwrap().is_some();
            assert_eq!(xy, yx);
        }
        assert!(actions_equivalent(&cases[x].2, &cases[x].2).unwrap().is_some());
    }
}

#[test]
fn null_and_center_are_closed_under_realized_actions() {
    for (name, ext, chi) in realized_actions(32) {
        let c = centers(&ext.kernel);
        assert!(closure_check(&chi, &c.null), "{name}");
        assert!(closure_check(&chi, &c.algebraic_center), "{name}");
        assert!(closure_check(&chi, &ext.kernel.full_subset()));
        let (chi_z, _) = center_action(&chi).unwrap();
        assert!(chi_z.i.is_abelian());
    }
}

#[test]
fn non_invariant_subgroup_is_not_closed() {
    // Z2 acting on S3 by conjugation with a transposition; the subgroup
    // generated by another transposition is moved.
    let a = arc("cyclic(2)*sym(3)");
    let ext = Extension::from_ideal(a, &Subset::from_indices(12, 0..6)).unwrap();
    let s = ext.section(vec![0, 7]).unwrap();
    let chi = extract_cocycle(&ext, &s).unwrap().action;
    let moved = (0..6).find(|&b| chi.sigma(1, b) != b).expect("conjugation by a transposition");
    let b = Subset::from_indices(6, [0, moved]);
    assert!(!closure_check(&chi, &b));
}

#[test]
fn extracted_group_factor_set_witnesses_act_conditions() {
    for (name, ext, _) in realized_actions(24) {
        let class = ActionClass::from_extension(&ext).unwrap();
        let s = class.witness_s.as_ref().unwrap();
        assert_eq!(act_violations(&class.representative, s), vec![], "{name}");
        let searched = ActionClass::from_terms(class.representative.clone());
        let found = searched.witness_s.expect("a witness exists");
        assert!(act_violations(&searched.representative, &found).is_empty());
    }
}

#[test]
fn star_action_examples() {
    let z2 = arc("cyclic(2)");
    let chi = ActionTerms::trivial(z2.clone(), z2.clone());
    let t = Cocycle2::new(chi.clone(), FactorSet::zero(2)).unwrap();
    let (chi_z, embed) = center_action(&chi).unwrap();
    assert_eq!(chi_z.ni(), 2);
    assert_eq!(act_h2_on_extension(&t, &FactorSet::zero(2), &embed).unwrap(), t);
    let s = FactorSet::new(2, vec![0, 0, 0, 1], vec![0; 4]).unwrap();
    let moved = act_h2_on_extension(&t, &s, &embed).unwrap();
    let built = build_crossed_product(&moved, 256).unwrap().algebra;
    assert!(mlakit_core::are_isomorphic(&built, &catalog::build("cyclic(4)").unwrap()));
    let back = act_h2_on_extension(&moved, &s, &embed).unwrap();
    assert!(cocycles_equivalent(&back, &t, 100).unwrap().is_some());
}

#[test]
fn correspondence_on_small_data() {
    let limits = Limits::default();
    for (q, i, expected) in [("cyclic(2)", "cyclic(2)", 2), ("cyclic(2)", "cyclic(3)", 1), ("trivial", "cyclic(3)", 1)] {
        let chi = ActionTerms::trivial(arc(q), arc(i));
        let r = verify_correspondence(&chi, &limits).unwrap();
        assert!(r.passed(), "{q} {i}: {r:?}");
        assert_eq!(r.ext_classes, expected);
        assert_eq!(r.h2_order, expected);
    }
}

#[test]
fn correspondence_on_realized_nontrivial_actions() {
    let limits = Limits::default();
    for (name, ext, chi) in realized_actions(8) {
        if ext.kernel.order() == 1 || ext.quotient.order() == 1 {
            continue;
        }
        let r = verify_correspondence(&chi, &limits).unwrap();
        assert!(r.passed(), "{name}: {r:?}");
    }
}

#[test]
fn h2_class_count_matches_naive_center_scan() {
    // |H²(Z2, Z2)| by counting all normalized tables that build, divided by
    // the number of distinct coboundaries.
    let z2 = arc("cyclic(2)");
    let chi = ActionTerms::trivial(z2.clone(), z2);
    let compatible = tuples(1, 2)
        .into_iter()
        .filter(|v| {
            let fs = FactorSet::new(2, vec![0, 0, 0, v[0]], vec![0; 4]).unwrap();
            build_crossed_product(&Cocycle2::new(chi.clone(), fs).unwrap(), 256).is_ok()
        })
        .count();
    let r = verify_correspondence(&chi, &Limits::default()).unwrap();
    assert_eq!(r.h2_order, compatible);
}

#[test]
fn tau_conventions_agree_on_lie_rings_with_abelian_kernel() {
    let (_, _, chi) = realized_actions(8)
        .into_iter()
        .find(|(n, _, _)| n.starts_with("heisenberg(2)"))
        .unwrap();
    assert!(convention_disagreements(&[chi]).unwrap().is_empty());
}

#[test]
fn tau_conventions_differ_on_nonabelian_kernels() {
    // Sections of Z2 × S3 over Z2 give equivalent terms under the bracket
    // convention; with trivial bracket the commutator variant rejects some.
    let a = arc("cyclic(2)*sym(3)");
    let ext = Extension::from_ideal(a, &Subset::from_indices(12, 0..6)).unwrap();
    let terms: Vec<ActionTerms> = ext
        .all_sections()
        .iter()
        .map(|s| action_terms_of_section(&ext, s))
        .collect();
    assert!(!convention_disagreements(&terms).unwrap().is_empty());
}

fn action_terms_of_section(ext: &Extension, s: &mlakit_core::Section) -> ActionTerms {
    extract_cocycle(ext, s).unwrap().action
}
