//! Brute-force oracles shared by the integration tests. Nothing here calls the
//! search routines under test; everything is plain enumeration plus the table
//! homomorphism check.

#![allow(dead_code)]

use std::sync::Arc;

use mlakit_core::{
    build_crossed_product, catalog, is_homomorphism, ActionTerms, Cocycle2, FactorSet, FiniteMla,
};

pub fn arc(key: &str) -> Arc<FiniteMla> {
    Arc::new(catalog::build(key).unwrap())
}

/// All tuples over `0..base` of the given length, lexicographic.
pub fn tuples(len: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..base).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Every normalized cocycle of `(Q, I)` whose crossed product validates,
/// found by trying all tables. `fixed` restricts to one set of action terms.
pub fn naive_cocycles(q: &Arc<FiniteMla>, i: &Arc<FiniteMla>, fixed: Option<&ActionTerms>) -> Vec<Cocycle2> {
    let (nq, ni) = (q.order(), i.order());
    let actions: Vec<ActionTerms> = match fixed {
        Some(chi) => vec![chi.clone()],
        None => {
            let mut out = Vec::new();
            let free_rows = nq - 1;
            let sigmas = tuples(free_rows * ni, ni);
            let taus = tuples(free_rows * (ni - 1), ni);
            for s in &sigmas {
                for t in &taus {
                    for n in &taus {
                        let sigma: Vec<usize> = (0..ni).chain(s.iter().copied()).collect();
                        let expand = |v: &[usize]| -> Vec<usize> {
                            let mut full = vec![0; nq * ni];
                            for x in 1..nq {
                                for a in 1..ni {
                                    full[x * ni + a] = v[(x - 1) * (ni - 1) + a - 1];
                                }
                            }
                            full
                        };
                        out.push(ActionTerms::new(q.clone(), i.clone(), sigma, expand(t), expand(n)).unwrap());
                    }
                }
            }
            out
        }
    };
    let t_cells: Vec<(usize, usize)> = (1..nq).flat_map(|x| (1..nq).map(move |y| (x, y))).collect();
    let tf_cells: Vec<(usize, usize)> = (1..nq)
        .flat_map(|x| (1..nq).filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    let ts = tuples(t_cells.len(), ni);
    let tfs = tuples(tf_cells.len(), ni);
    let mut out = Vec::new();
    for chi in &actions {
        for tv in &ts {
            for tfv in &tfs {
                let mut t = vec![0; nq * nq];
                let mut tf = vec![0; nq * nq];
                for (k, &(x, y)) in t_cells.iter().enumerate() {
                    t[x * nq + y] = tv[k];
                }
                for (k, &(x, y)) in tf_cells.iter().enumerate() {
                    tf[x * nq + y] = tfv[k];
                }
                let c = Cocycle2::new(chi.clone(), FactorSet::new(nq, t, tf).unwrap()).unwrap();
                if build_crossed_product(&c, 256).is_ok() {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Whether `⟨a,x⟩ ↦ ⟨a·h(x), x⟩` is a homomorphism `I ⋊_c Q → I ⋊_d Q` for
/// some normalized `h`, by trying every `h`.
pub fn naive_equivalent(c: &Cocycle2, d: &Cocycle2) -> bool {
    let (nq, ni) = (c.q().order(), c.i().order());
    let ac = build_crossed_product(c, 256).unwrap().algebra;
    let ad = build_crossed_product(d, 256).unwrap().algebra;
    let i = c.i();
    tuples(nq - 1, ni).into_iter().any(|rest| {
        let h: Vec<usize> = std::iter::once(0).chain(rest).collect();
        let map: Vec<usize> = (0..nq * ni)
            .map(|e| {
                let (a, x) = (e % ni, e / ni);
                x * ni + i.mul(a, h[x])
            })
            .collect();
        is_homomorphism(&ac, &ad, &map).unwrap()
    })
}

/// Number of classes of `cocycles` under [`naive_equivalent`].
pub fn naive_class_count(cocycles: &[Cocycle2]) -> usize {
    let mut reps: Vec<&Cocycle2> = Vec::new();
    for c in cocycles {
        if !reps.iter().any(|r| naive_equivalent(c, r)) {
            reps.push(c);
        }
    }
    reps.len()
}
