//! Ideals, quotients, centers, normalizers, commutator ideals and the
//! lower central and derived series.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteMla;
use crate::error::{MlaError, Result};
use crate::subset::Subset;

/// Smallest ideal containing `seed` (and the identity).
///
/// Worklist fixpoint: each new member contributes its inverse, products with
/// current members, conjugates by every element and brackets with every
/// element on both sides.
pub fn ideal_closure(a: &FiniteMla, seed: &Subset) -> Subset {
    let n = a.order();
    let mut s = *seed;
    s.insert(0);
    let mut members = s.members();
    let mut queue = members.clone();
    while let Some(x) = queue.pop() {
        let mut fresh = Vec::new();
        fresh.push(a.inv(x));
        for &y in &members {
            fresh.push(a.mul(x, y));
            fresh.push(a.mul(y, x));
        }
        for z in 0..n {
            fresh.push(a.conj(x, z));
            fresh.push(a.bracket(x, z));
            fresh.push(a.bracket(z, x));
        }
        for y in fresh {
            if s.insert(y) {
                members.push(y);
                queue.push(y);
            }
        }
    }
    s
}

/// Normal subgroup of the group reduct absorbing brackets on both sides.
pub fn is_ideal(a: &FiniteMla, s: &Subset) -> bool {
    if !s.contains(0) || s.universe() != a.order() {
        return false;
    }
    s.iter().all(|h| {
        s.contains(a.inv(h))
            && s.iter().all(|k| s.contains(a.mul(h, k)))
            && a.elements().all(|x| {
                s.contains(a.conj(h, x)) && s.contains(a.bracket(h, x)) && s.contains(a.bracket(x, h))
            })
    })
}

pub fn is_subalgebra(a: &FiniteMla, s: &Subset) -> bool {
    s.contains(0)
        && s.iter()
            .all(|x| s.iter().all(|y| s.contains(a.mul(x, y)) && s.contains(a.bracket(x, y))))
}

/// Every ideal, sorted by size and then by member list.
pub fn all_ideals(a: &FiniteMla, max_order: usize) -> Result<Vec<Subset>> {
    if a.order() > max_order {
        return Err(MlaError::SizeBound {
            what: "ideal enumeration",
            size: a.order(),
            limit: max_order,
        });
    }
    let mut ideals: Vec<Subset> = vec![a.identity_subset()];
    for x in a.elements() {
        let p = ideal_closure(a, &Subset::from_indices(a.order(), [x]));
        if !ideals.contains(&p) {
            ideals.push(p);
        }
    }
    // Every ideal is the join of the principal ideals of its members, so
    // closing the principal ones under pairwise joins reaches all of them.
    let principal = ideals.clone();
    let mut k = 0;
    while k < ideals.len() {
        let current = ideals[k];
        for p in &principal {
            if p.is_subset_of(&current) {
                continue;
            }
            let join = ideal_closure(a, &current.union(p));
            if !ideals.contains(&join) {
                ideals.push(join);
            }
        }
        k += 1;
    }
    ideals.sort();
    Ok(ideals)
}

#[derive(Debug, Clone)]
pub struct QuotientResult {
    pub quotient: FiniteMla,
    /// Element of `A` ↦ its coset index.
    pub projection: Vec<usize>,
    /// Least element of each coset; `coset_reps[0] = 0`.
    pub coset_reps: Vec<usize>,
}

/// `A/I`, with cosets numbered by their least element.
pub fn quotient(a: &FiniteMla, ideal: &Subset) -> Result<QuotientResult> {
    if !is_ideal(a, ideal) {
        return Err(MlaError::NotAnIdeal(format!("{ideal:?}")));
    }
    let n = a.order();
    let mut projection = vec![usize::MAX; n];
    let mut coset_reps = Vec::new();
    for x in 0..n {
        if projection[x] != usize::MAX {
            continue;
        }
        let c = coset_reps.len();
        coset_reps.push(x);
        for h in ideal.iter() {
            projection[a.mul(x, h)] = c;
        }
    }
    let m = coset_reps.len();
    let mut mul = vec![0; m * m];
    let mut br = vec![0; m * m];
    for (i, &x) in coset_reps.iter().enumerate() {
        for (j, &y) in coset_reps.iter().enumerate() {
            mul[i * m + j] = projection[a.mul(x, y)];
            br[i * m + j] = projection[a.bracket(x, y)];
        }
    }
    let name = a.name().map(|s| format!("{s}/I"));
    let quotient = FiniteMla::from_flat(name, m, mul, br).map_err(MlaError::Invalid)?;
    Ok(QuotientResult {
        quotient,
        projection,
        coset_reps,
    })
}

/// The four centers of an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Centers {
    /// Center of the group reduct.
    pub group_center: Subset,
    /// `{x : {x,y} = 1 for all y}`.
    pub left_zero: Subset,
    /// `{x : {x,y} = {y,x} = 1 for all y}`.
    pub null: Subset,
    /// Group center ∩ null: the algebraic center ζ.
    pub algebraic_center: Subset,
}

pub fn centers(a: &FiniteMla) -> Centers {
    let n = a.order();
    let pick = |f: &dyn Fn(usize) -> bool| Subset::from_indices(n, (0..n).filter(|&x| f(x)));
    let group_center = pick(&|x| a.elements().all(|y| a.mul(x, y) == a.mul(y, x)));
    let left_zero = pick(&|x| a.elements().all(|y| a.bracket(x, y) == 0));
    let null = pick(&|x| a.elements().all(|y| a.bracket(x, y) == 0 && a.bracket(y, x) == 0));
    let algebraic_center = group_center.intersection(&null);
    Centers {
        group_center,
        left_zero,
        null,
        algebraic_center,
    }
}

pub fn algebraic_center(a: &FiniteMla) -> Subset {
    centers(a).algebraic_center
}

/// Normalizer of a subalgebra: elements `g` with `gH = Hg` and `{g,H} ⊆ H`.
pub fn normalizer(a: &FiniteMla, h: &Subset) -> Result<Subset> {
    if !is_subalgebra(a, h) {
        return Err(MlaError::NotASubalgebra(format!("{h:?}")));
    }
    let n = a.order();
    let members = h.members();
    let out = Subset::from_indices(
        n,
        (0..n).filter(|&g| {
            let left = Subset::from_indices(n, members.iter().map(|&x| a.mul(g, x)));
            let right = Subset::from_indices(n, members.iter().map(|&x| a.mul(x, g)));
            left == right && members.iter().all(|&x| h.contains(a.bracket(g, x)))
        }),
    );
    Ok(out)
}

/// `C(I,J)`: the ideal generated by `[a,b]`, `{a,b}` and `{b,a}` for `a ∈ I`, `b ∈ J`.
pub fn commutator_ideal(a: &FiniteMla, i: &Subset, j: &Subset) -> Result<Subset> {
    for s in [i, j] {
        if !is_ideal(a, s) {
            return Err(MlaError::NotAnIdeal(format!("{s:?}")));
        }
    }
    Ok(commutator_ideal_unchecked(a, i, j))
}

fn commutator_ideal_unchecked(a: &FiniteMla, i: &Subset, j: &Subset) -> Subset {
    let mut seed = a.identity_subset();
    for x in i.iter() {
        for y in j.iter() {
            seed.insert(a.commutator(x, y));
            seed.insert(a.bracket(x, y));
            seed.insert(a.bracket(y, x));
        }
    }
    ideal_closure(a, &seed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    /// `γ₁ = A`, `γ_{k+1} = C(γ_k, A)`, until it stabilizes.
    pub lower_central: Vec<Vec<usize>>,
    /// `A⁰ = A`, `A^{k+1} = C(A^k, A^k)`, until it stabilizes.
    pub derived: Vec<Vec<usize>>,
    /// Least `c` with `γ_{c+1}` trivial.
    pub nilpotent_class: Option<usize>,
    /// Least `l` with `A^l` trivial.
    pub solvable_length: Option<usize>,
}

pub fn classify_series(a: &FiniteMla) -> SeriesReport {
    let full = a.full_subset();
    let run = |step: &dyn Fn(&Subset) -> Subset| -> (Vec<Subset>, Option<usize>) {
        let mut series = vec![full];
        loop {
            let last = *series.last().unwrap();
            if last.is_trivial() {
                return (series.clone(), Some(series.len() - 1));
            }
            let next = step(&last);
            if next == last {
                return (series, None);
            }
            series.push(next);
        }
    };
    let (lower, nil) = run(&|g| commutator_ideal_unchecked(a, g, &full));
    let (derived, sol) = run(&|d| commutator_ideal_unchecked(a, d, d));
    SeriesReport {
        lower_central: lower.iter().map(Subset::members).collect(),
        derived: derived.iter().map(Subset::members).collect(),
        nilpotent_class: nil,
        solvable_length: sol,
    }
}

/// True when `I` has commutative group reduct and trivial internal bracket.
pub fn abelian_ideal_check(a: &FiniteMla, i: &Subset) -> bool {
    i.iter().all(|x| {
        i.iter()
            .all(|y| a.mul(x, y) == a.mul(y, x) && a.bracket(x, y) == 0)
    })
}
