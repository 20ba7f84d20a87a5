//! The acceptance criteria, one check each, with a PASS/FAIL line per
//! criterion. Run with `cargo test -p mlakit-cli --test acceptance -- --nocapture`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use mlakit_core::abelian::{
    action_terms_of, derivations, realize, shift_map, stabilizing_automorphisms,
};
use mlakit_core::correspondence::{closure_check, verify_correspondence};
use mlakit_core::format::CocycleFile;
use mlakit_core::substructures::{
    abelian_ideal_check, all_ideals, centers, classify_series, commutator_ideal,
};
use mlakit_core::wells::verify_wells;
use mlakit_core::{
    are_isomorphic, build_crossed_product, catalog, check_derived_identities, cocycles_equivalent,
    extract_cocycle, h2_group, is_homomorphism, roundtrip_map, validate_algebra, verify_five_term,
    ActionTerms, Extension, FactorSet, FiniteMla, Limits, Subset,
};

use common::{arc, naive_cocycles, tuples};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn extension(key: &str, ideal: &[usize]) -> Extension {
    let a = arc(key);
    let n = a.order();
    Extension::from_ideal(a, &Subset::from_indices(n, ideal.iter().copied())).unwrap()
}

/// Every `(catalog algebra, proper nontrivial ideal)` up to the given order.
fn catalog_extensions(max_order: usize) -> Vec<(String, Extension)> {
    let mut out = Vec::new();
    for key in catalog::STANDARD_KEYS {
        let a = arc(key);
        if a.order() > max_order {
            continue;
        }
        for ideal in all_ideals(&a, 64).unwrap() {
            if ideal.is_trivial() || ideal.is_full() {
                continue;
            }
            let ext = Extension::from_ideal(a.clone(), &ideal).unwrap();
            out.push((format!("{key} / {:?}", ideal.members()), ext));
        }
    }
    out
}

fn axioms_and_mutations() -> Outcome {
    for key in catalog::STANDARD_KEYS {
        let a = catalog::build(key).unwrap();
        validate_algebra(a.order(), &a.mul_rows(), &a.bracket_rows())
            .map_err(|r| format!("{key} fails validation: {r:?}"))?;
        let ids = check_derived_identities(&a);
        ensure(ids.all_passed(), || format!("{key} fails a derived identity"))?;
    }
    let mut summary = Vec::new();
    for key in ["cyclic(4)", "heisenberg(3)"] {
        let a = catalog::build(key).unwrap();
        let n = a.order();
        let (mul, base) = (a.mul_rows(), a.bracket_rows());
        let (mut total, mut rejected) = (0usize, 0usize);
        for x in 0..n {
            for y in 0..n {
                for v in (0..n).filter(|&v| v != base[x][y]) {
                    let mut br = base.clone();
                    br[x][y] = v;
                    total += 1;
                    if let Err(r) = validate_algebra(n, &mul, &br) {
                        if !r.violations.is_empty() && r.violations.iter().all(|w| !w.witness.is_empty()) {
                            rejected += 1;
                        }
                    }
                }
            }
        }
        let rate = rejected as f64 / total as f64;
        ensure(rate >= 0.95, || format!("{key}: rejection rate {rate:.4}"))?;
        summary.push(format!("{key} {rejected}/{total}"));
    }
    Ok(format!("{} entries valid; mutations rejected: {}", catalog::STANDARD_KEYS.len(), summary.join(", ")))
}

fn roundtrip() -> Outcome {
    let cases = catalog_extensions(16);
    for (name, ext) in &cases {
        let s = ext.canonical_section();
        let c = extract_cocycle(ext, &s).map_err(|e| format!("{name}: {e}"))?;
        let cp = build_crossed_product(&c, 256).map_err(|e| format!("{name}: {e}"))?;
        let phi = roundtrip_map(ext, &s).map_err(|e| format!("{name}: {e}"))?;
        let bijective = Subset::from_indices(phi.len(), phi.iter().copied()).is_full();
        ensure(bijective && is_homomorphism(&ext.total, &cp.algebra, &phi).unwrap(), || {
            format!("{name}: roundtrip map is not an isomorphism")
        })?;
        // The greatest element of each fibre gives a second section.
        let mut lift = vec![0; ext.quotient.order()];
        for e in ext.total.elements() {
            lift[ext.proj[e]] = e;
        }
        lift[0] = 0;
        let t = ext.section(lift).unwrap();
        if t.table() != s.table() {
            let d = extract_cocycle(ext, &t).unwrap();
            let w = cocycles_equivalent(&c, &d, 10_000_000).map_err(|e| format!("{name}: {e}"))?;
            ensure(w.is_some(), || format!("{name}: sections give inequivalent cocycles"))?;
        }
    }
    Ok(format!("{} (algebra, ideal) pairs", cases.len()))
}

/// `|Z²| / |B²|` by trying every normalized table pair and every normalized
/// map `Q → I`.
fn naive_h2_order(chi: &ActionTerms) -> usize {
    let cocycles: BTreeSet<Vec<usize>> = naive_cocycles(&chi.q, &chi.i, Some(chi))
        .iter()
        .map(|c| c.factors.key())
        .collect();
    let (nq, ni) = (chi.nq(), chi.ni());
    let cobs: BTreeSet<Vec<usize>> = tuples(nq - 1, ni)
        .into_iter()
        .map(|rest| {
            let h: Vec<usize> = std::iter::once(0).chain(rest).collect();
            coboundary_naive(chi, &h).key()
        })
        .collect();
    assert!(cobs.is_subset(&cocycles));
    cocycles.len() / cobs.len()
}

fn coboundary_naive(chi: &ActionTerms, h: &[usize]) -> FactorSet {
    let (q, i) = (chi.q.as_ref(), chi.i.as_ref());
    let nq = q.order();
    let mut t = vec![0; nq * nq];
    let mut tf = vec![0; nq * nq];
    for x in 0..nq {
        for y in 0..nq {
            t[x * nq + y] = i.product(&[h[x], chi.sigma(x, h[y]), i.inv(h[q.mul(x, y)])]);
            let u = q.bracket(x, y);
            let inner = i.product(&[chi.nu(y, h[x]), i.inv(h[x]), i.inv(h[y])]);
            tf[x * nq + y] = i.product(&[chi.tau(x, h[y]), h[x], h[y], chi.sigma(u, inner), i.inv(h[u])]);
        }
    }
    FactorSet::new(nq, t, tf).unwrap()
}

fn h2_values() -> Outcome {
    let (z2, z3) = (arc("cyclic(2)"), arc("cyclic(3)"));
    let chi = ActionTerms::trivial(z2.clone(), z2.clone());
    let h = h2_group(&chi, 10_000_000).map_err(|e| e.to_string())?;
    ensure(h.group.invariant_factors == vec![2], || format!("H²(Z2,Z2) factors {:?}", h.group.invariant_factors))?;
    ensure(naive_h2_order(&chi) == 2, || "naive H²(Z2,Z2) order differs".into())?;
    let realized: Vec<Arc<FiniteMla>> = h
        .representatives
        .iter()
        .map(|f| realize(&chi, f, 256).unwrap())
        .collect();
    let (z4, v4) = (catalog::build("cyclic(4)").unwrap(), catalog::build("klein4").unwrap());
    let hits_z4 = realized.iter().filter(|a| are_isomorphic(a, &z4)).count();
    let hits_v4 = realized.iter().filter(|a| are_isomorphic(a, &v4)).count();
    ensure(hits_z4 == 1 && hits_v4 == 1, || format!("classes realize Z4×{hits_z4}, V4×{hits_v4}"))?;

    let chi3 = ActionTerms::trivial(z2, z3);
    let h3 = h2_group(&chi3, 10_000_000).map_err(|e| e.to_string())?;
    ensure(h3.order() == 1 && h3.group.invariant_factors.is_empty(), || {
        format!("H²(Z2,Z3) has order {}", h3.order())
    })?;
    ensure(naive_h2_order(&chi3) == 1, || "naive H²(Z2,Z3) order differs".into())?;
    Ok("H²(Z2,Z2) = Z2 realizing Z4 and Z2×Z2; H²(Z2,Z3) = 0".into())
}

fn stab_is_der() -> Outcome {
    let mut checked = 0;
    for (name, ext) in catalog_extensions(16) {
        if !ext.kernel.is_abelian() {
            continue;
        }
        let chi = action_terms_of(&ext).unwrap();
        let ders: BTreeSet<Vec<usize>> = derivations(&chi, 10_000_000).unwrap().into_iter().collect();
        let stabs = stabilizing_automorphisms(&ext, 10_000_000).unwrap();
        ensure(stabs.len() == ders.len(), || {
            format!("{name}: |Stab| = {} but |Der| = {}", stabs.len(), ders.len())
        })?;
        let image: BTreeSet<Vec<usize>> = stabs.iter().map(|s| s.derivation.clone()).collect();
        ensure(image == ders, || format!("{name}: γ ↦ d_γ is not onto Der"))?;
        for s in &stabs {
            ensure(shift_map(&ext, &s.derivation) == s.map, || format!("{name}: d_γ does not rebuild γ"))?;
        }
        checked += 1;
    }
    ensure(checked > 0, || "no abelian-kernel extensions".into())?;
    Ok(format!("{checked} abelian-kernel extensions"))
}

fn correspondence() -> Outcome {
    let limits = Limits::default();
    let mut parts = Vec::new();
    for k in ["cyclic(2)", "cyclic(3)"] {
        let chi = ActionTerms::trivial(arc("cyclic(2)"), arc(k));
        let r = verify_correspondence(&chi, &limits).map_err(|e| e.to_string())?;
        ensure(r.passed() && r.free && r.transitive, || format!("Z2/{k}: {r:?}"))?;
        ensure(r.ext_classes == r.h2_order, || format!("Z2/{k}: |Ext| != |H²|"))?;
        parts.push(format!("Z2/{k}: |Ext| = |H²| = {}", r.h2_order));
    }
    Ok(parts.join("; "))
}

fn wells() -> Outcome {
    let limits = Limits::default();
    let mut parts = Vec::new();
    for (key, ideal) in [("cyclic(4)", vec![0, 2]), ("klein4", vec![0, 1])] {
        let r = verify_wells(&extension(key, &ideal), &limits).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{key}: {r:?}"))?;
        parts.push(format!("{key} lifts {}/{}", r.lifts_verified, r.kernel_pairs));
    }
    let s3 = arc("sym(3)");
    let a3 = Subset::from_indices(6, s3.elements().filter(|&x| s3.element_order(x) != 2));
    ensure(a3.len() == 3, || "alternating subgroup not found".into())?;
    let r = verify_wells(&Extension::from_ideal(s3, &a3).unwrap(), &limits).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("sym(3): {r:?}"))?;
    parts.push(format!("sym(3) lifts {}/{}", r.lifts_verified, r.kernel_pairs));
    Ok(parts.join(", "))
}

fn hochschild_serre() -> Outcome {
    let ext = extension("cyclic(4)", &[0, 2]);
    let chi = ActionTerms::from_fn(
        ext.total.clone(),
        arc("cyclic(3)"),
        |x, v| if x % 2 == 1 { (3 - v) % 3 } else { v },
        |_, _| 0,
        |_, _| 0,
    )
    .unwrap();
    let r = verify_five_term(&ext, &chi, &Limits::default()).map_err(|e| e.to_string())?;
    ensure(r.junctions.iter().all(|j| j.holds), || format!("{:?}", r.junctions))?;
    ensure(r.eta_independent && r.witnesses_checked > 0, || "transgression depends on the witness".into())?;
    ensure(r.passed(), || format!("{r:?}"))?;
    Ok(format!("four junctions hold; {} witnesses agree", r.witnesses_checked))
}

fn structural() -> Outcome {
    let mut pairs = 0;
    for key in catalog::STANDARD_KEYS {
        let a = catalog::build(key).unwrap();
        let ideals = all_ideals(&a, 64).unwrap();
        for i in &ideals {
            let cii = commutator_ideal(&a, i, i).unwrap();
            ensure(abelian_ideal_check(&a, i) == cii.is_trivial(), || format!("{key}: abelian check on {i:?}"))?;
            for j in &ideals {
                let cij = commutator_ideal(&a, i, j).unwrap();
                ensure(cij == commutator_ideal(&a, j, i).unwrap(), || format!("{key}: C(I,J) != C(J,I)"))?;
                pairs += 1;
            }
        }
    }
    let cases = catalog_extensions(64);
    for (name, ext) in &cases {
        let chi = extract_cocycle(ext, &ext.canonical_section()).unwrap().action;
        let zeta = centers(&ext.kernel).algebraic_center;
        ensure(closure_check(&chi, &zeta), || format!("{name}: ζ(I) not closed under χ"))?;
    }
    let s3 = classify_series(&catalog::build("sym(3)").unwrap());
    ensure(s3.solvable_length == Some(2) && s3.nilpotent_class.is_none(), || format!("sym(3): {s3:?}"))?;
    let h3 = classify_series(&catalog::build("heisenberg(3)").unwrap());
    ensure(h3.nilpotent_class == Some(2), || format!("heisenberg(3): {h3:?}"))?;
    Ok(format!("{pairs} ideal pairs, {} realized actions", cases.len()))
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run_cli(args: &[String], threads: Option<usize>) -> (i32, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mlakit"));
    cmd.args(args).arg("--json");
    if let Some(t) = threads {
        cmd.arg("--threads").arg(t.to_string());
    }
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ext = extension("cyclic(4)", &[0, 2]);
    let c = extract_cocycle(&ext, &ext.canonical_section()).unwrap();
    let d = extract_cocycle(&ext, &ext.section(vec![0, 3]).unwrap()).unwrap();
    let write = |name: &str, body: String| -> PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let c_path = write("c.json", serde_json::to_string(&CocycleFile::from_cocycle(&c)).unwrap());
    let d_path = write("d.json", serde_json::to_string(&CocycleFile::from_cocycle(&d)).unwrap());
    let s = |x: &str| x.to_string();
    let p = |x: &PathBuf| x.to_string_lossy().into_owned();
    let datum22 = [s("--datum"), s("catalog:cyclic(2)"), s("catalog:cyclic(2)"), s("--action"), s("trivial")];
    let with = |head: &str| -> Vec<String> { std::iter::once(s(head)).chain(datum22.iter().cloned()).collect() };
    let commands: Vec<Vec<String>> = vec![
        vec![s("verify"), s("catalog:heisenberg(3)")],
        vec![s("identities"), s("catalog:heisenberg(3)")],
        vec![s("centers"), s("catalog:dihedral(4)")],
        vec![s("ideals"), s("catalog:cyclic(2)*heisenberg(2)")],
        vec![s("series"), s("catalog:sym(3)")],
        vec![s("extend"), s("--cocycle"), p(&c_path)],
        vec![s("census"), s("--datum"), s("catalog:cyclic(2)"), s("catalog:cyclic(2)")],
        vec![s("equiv"), p(&c_path), p(&d_path)],
        with("h2"),
        with("h1"),
        with("derivations"),
        with("correspondence"),
        vec![s("stab"), s("--extension"), data("z4_over_z2.json")],
        vec![s("wells"), s("--extension"), data("klein_over_z2.json")],
        vec![
            s("hs"),
            s("--extension"),
            data("z4_over_z2.json"),
            s("--coeff"),
            s("catalog:cyclic(3)"),
            s("--action"),
            data("z4_on_z3_inversion.json"),
        ],
        vec![s("catalog"), s("list")],
    ];
    let n = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4).max(4);
    for args in &commands {
        let (code, first) = run_cli(args, None);
        ensure(code == 0, || format!("`{}` exited {code}", args.join(" ")))?;
        for _ in 0..2 {
            ensure(run_cli(args, None).1 == first, || format!("`{}` differs across runs", args.join(" ")))?;
        }
        let (_, one) = run_cli(args, Some(1));
        let (_, many) = run_cli(args, Some(n));
        ensure(one == first && many == first, || format!("`{}` depends on --threads", args.join(" ")))?;
    }
    Ok(format!("{} commands identical over 3 runs and --threads 1 vs {n}", commands.len()))
}

#[test]
fn acceptance_criteria() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, u64); 9] = [
        ("axiom and identity suite with mutations", axioms_and_mutations, 10),
        ("extract/rebuild roundtrip and section independence", roundtrip, 60),
        ("second cohomology desk values", h2_values, 30),
        ("stabilizing automorphisms match derivations", stab_is_der, 120),
        ("H² action on extension classes is free and transitive", correspondence, 60),
        ("automorphism exact sequence", wells, 120),
        ("five-term inflation-restriction sequence", hochschild_serre, 120),
        ("structural oracles", structural, 120),
        ("CLI determinism", determinism, 300),
    ];
    let mut failures = Vec::new();
    println!();
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > Duration::from_secs(*budget) {
                Err(format!("took {elapsed:.1?}, budget {budget}s ({detail})"))
            } else {
                Ok(detail)
            }
        });
        match &result {
            Ok(detail) => println!("PASS {}: {name} ({detail}; {elapsed:.2?})", k + 1),
            Err(why) => {
                println!("FAIL {}: {name}: {why}", k + 1);
                failures.push(k + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
