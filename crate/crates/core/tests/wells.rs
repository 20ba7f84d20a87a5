mod common;

use common::arc;
use mlakit_core::substructures::{all_ideals, classify_series};
use mlakit_core::wells::{
    pair_action_on_cocycle, series_stabilizer_nilpotency, verify_wells, CompatiblePair, WellsContext,
};
use mlakit_core::{
    build_crossed_product, catalog, iso, Extension, Limits, Subset,
};

fn ext(key: &str, ideal: &[usize]) -> Extension {
    let a = arc(key);
    let n = a.order();
    Extension::from_ideal(a, &Subset::from_indices(n, ideal.iter().copied())).unwrap()
}

#[test]
fn wells_sequence_on_the_standard_examples() {
    let limits = Limits::default();
    for (key, ideal) in [("cyclic(4)", vec![0, 2]), ("klein4", vec![0, 1]), ("sym(3)", vec![0, 3, 4])] {
        let r = verify_wells(&ext(key, &ideal), &limits).unwrap();
        assert!(r.passed(), "{key}: {r:?}");
        assert!(r.kernel_pairs > 0);
    }
}

#[test]
fn wells_sequence_over_small_catalog_extensions() {
    let limits = Limits::default();
    for key in catalog::STANDARD_KEYS {
        let a = arc(key);
        if a.order() > 16 {
            continue;
        }
        for ideal in all_ideals(&a, 64).unwrap() {
            let e = Extension::from_ideal(a.clone(), &ideal).unwrap();
            let r = verify_wells(&e, &limits).unwrap();
            assert!(r.passed(), "{key} {ideal:?}: {r:?}");
        }
    }
}

#[test]
fn compatible_pairs_examples() {
    let limits = Limits::default();
    let ctx = WellsContext::new(&ext("cyclic(6)", &[0, 2, 4]), &limits).unwrap();
    let pairs = ctx.compatible_pairs().unwrap();
    assert_eq!(pairs.len(), 2);
    assert!(pairs.contains(&CompatiblePair::identity(3, 2)));
    let ctx = WellsContext::new(&ext("klein4", &[0, 1]), &limits).unwrap();
    assert_eq!(ctx.compatible_pairs().unwrap(), vec![CompatiblePair::identity(2, 2)]);
    assert_eq!(ctx.wells_class(&CompatiblePair::identity(2, 2)).unwrap(), 0);
}

#[test]
fn pair_action_composes_and_preserves_compatibility() {
    let e = ext("cyclic(2)*sym(3)", &[0, 1, 2, 3, 4, 5]);
    let ctx = WellsContext::new(&e, &Limits::default()).unwrap();
    let c = &ctx.cocycle;
    for w1 in &ctx.aut_i {
        for w2 in ctx.aut_i.iter().step_by(2) {
            let k = &ctx.aut_q[0];
            let step = pair_action_on_cocycle(&pair_action_on_cocycle(c, w1, k), w2, k);
            let once = pair_action_on_cocycle(c, &iso::compose(w2, w1), &iso::compose(k, k));
            assert_eq!(step, once);
            assert!(build_crossed_product(&step, 256).is_ok());
        }
    }
    let id = CompatiblePair::identity(6, 2);
    assert_eq!(pair_action_on_cocycle(c, &id.omega, &id.kappa), *c);
}

#[test]
fn z4_inversion_maps_to_the_identity_pair() {
    let ctx = WellsContext::new(&ext("cyclic(4)", &[0, 2]), &Limits::default()).unwrap();
    let aut = ctx.aut_i_group().unwrap();
    let inversion = aut.iter().find(|g| g.map == vec![0, 3, 2, 1]).unwrap();
    assert!(inversion.psi.is_identity());
}

#[test]
fn wells_classes_do_not_depend_on_the_section() {
    let limits = Limits::default();
    for (key, ideal) in [("cyclic(4)", vec![0, 2]), ("sym(3)", vec![0, 3, 4]), ("dihedral(4)", vec![0, 2])] {
        let e = ext(key, &ideal);
        let base = WellsContext::new(&e, &limits).unwrap();
        let pairs = base.compatible_pairs().unwrap();
        let classes: Vec<usize> = pairs.iter().map(|p| base.wells_class(p).unwrap()).collect();
        for s in e.all_sections() {
            let ctx = WellsContext::with_section(&e, &s, &limits).unwrap();
            assert_eq!(ctx.compatible_pairs().unwrap(), pairs);
            let again: Vec<usize> = pairs.iter().map(|p| ctx.wells_class(p).unwrap()).collect();
            assert_eq!(again, classes, "{key}");
        }
    }
}

#[test]
fn nonzero_wells_class_has_no_lift() {
    // Search the catalog for a pair with W ≠ 0 and confirm exhaustively that
    // no kernel-preserving automorphism induces it.
    let limits = Limits::default();
    let mut found = 0;
    for key in catalog::STANDARD_KEYS {
        let a = arc(key);
        if a.order() > 24 {
            continue;
        }
        for ideal in all_ideals(&a, 64).unwrap() {
            let e = Extension::from_ideal(a.clone(), &ideal).unwrap();
            let Ok(ctx) = WellsContext::new(&e, &limits) else { continue };
            let aut = ctx.aut_i_group().unwrap();
            for p in ctx.compatible_pairs().unwrap() {
                if ctx.wells_class(&p).unwrap() != 0 {
                    found += 1;
                    assert!(aut.iter().all(|g| g.psi != p), "{key} {ideal:?}");
                    assert!(ctx.lift(&p).unwrap().is_none());
                }
            }
        }
    }
    assert!(found > 0, "no obstructed pair in the catalog");
}

#[test]
fn series_stabilizers() {
    let limits = Limits::default();
    let z4 = catalog::build("cyclic(4)").unwrap();
    let r = series_stabilizer_nilpotency(&z4, &[z4.full_subset(), z4.identity_subset()], &limits).unwrap();
    assert_eq!((r.stabilizer_order, r.nilpotency_class), (1, Some(0)));
    let series = [z4.full_subset(), Subset::from_indices(4, [0, 2]), z4.identity_subset()];
    let r = series_stabilizer_nilpotency(&z4, &series, &limits).unwrap();
    assert!(r.bound_holds);
    assert!(r.nilpotency_class.unwrap() <= 1);
    let h = catalog::build("heisenberg(3)").unwrap();
    let lower = classify_series(&h).lower_central;
    let series: Vec<Subset> = lower.iter().map(|m| Subset::from_indices(27, m.iter().copied())).collect();
    let limits = Limits { max_aut_order: 27, ..Limits::default() };
    let r = series_stabilizer_nilpotency(&h, &series, &limits).unwrap();
    assert!(r.bound_holds, "{r:?}");
}
