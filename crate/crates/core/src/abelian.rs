//! Abelian kernels: action terms, factor sets, coboundaries, derivations and
//! the groups H⁰, H¹, H².
//!
//! The kernel `I` is written multiplicatively like every other algebra in the
//! crate, but here its group is commutative and its bracket trivial.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteMla, Law, ValidationReport};
use crate::error::{MlaError, Result};
use crate::extension::{
    build_crossed_product, check_compatibility, extract_cocycle, ActionTerms, Cocycle2, Extension,
    FactorSet,
};
use crate::subset::Subset;

pub type Derivation = Vec<usize>;

pub fn require_abelian(i: &FiniteMla, what: &str) -> Result<()> {
    if i.is_abelian() {
        Ok(())
    } else {
        Err(MlaError::NotAbelianKernel(what.to_string()))
    }
}

/// Action terms and the zero factor set as one cocycle.
pub fn with_factors(chi: &ActionTerms, fs: &FactorSet) -> Cocycle2 {
    Cocycle2::new(chi.clone(), fs.clone()).expect("factor set sized for its action terms")
}

/// Compatibility of `χ` alone: the semidirect product `I ⋊_χ Q` must validate.
pub fn check_action_compatibility(chi: &ActionTerms) -> Result<ValidationReport> {
    require_abelian(&chi.i, "kernel")?;
    Ok(check_compatibility(&with_factors(chi, &FactorSet::zero(chi.nq()))))
}

/// Action terms of an extension read through its canonical section.
pub fn action_terms_of(ext: &Extension) -> Result<ActionTerms> {
    Ok(extract_cocycle(ext, &ext.canonical_section())?.action)
}

/// The coboundary of `h : Q → I`:
/// `G(x,y) = h(x) + σ_x(h(y)) − h(xy)` and
/// `G_f(x,y) = τ_x(h(y)) + h(x) + h(y) + σ_{{x,y}}(ν_y(h(x)) − h(x) − h(y)) − h({x,y})`.
pub fn coboundary_from(chi: &ActionTerms, h: &[usize]) -> FactorSet {
    let (q, i) = (chi.q.as_ref(), chi.i.as_ref());
    let nq = q.order();
    let add = |a, b| i.mul(a, b);
    let sub = |a, b| i.mul(a, i.inv(b));
    let mut t = vec![0; nq * nq];
    let mut tf = vec![0; nq * nq];
    for x in 0..nq {
        for y in 0..nq {
            t[x * nq + y] = sub(add(h[x], chi.sigma(x, h[y])), h[q.mul(x, y)]);
            let u = q.bracket(x, y);
            let inner = sub(sub(chi.nu(y, h[x]), h[x]), h[y]);
            let v = i.product(&[chi.tau(x, h[y]), h[x], h[y], chi.sigma(u, inner)]);
            tf[x * nq + y] = sub(v, h[u]);
        }
    }
    FactorSet::from_tables_unchecked(nq, t, tf)
}

/// Pointwise sum of two factor sets with values in the abelian kernel.
pub fn add_factor_sets(i: &FiniteMla, a: &FactorSet, b: &FactorSet) -> FactorSet {
    a.zip_with(b, |x, y| i.mul(x, y))
}

pub fn neg_factor_set(i: &FiniteMla, a: &FactorSet) -> FactorSet {
    a.map_values(|x| i.inv(x))
}

/// A factor-set cell: `(false, x, y)` is `T(x,y)`, `(true, x, y)` is `T_f(x,y)`.
type Cell = (bool, usize, usize);

/// Pair operations of `I ⋊_{χ,T} Q` with factor-set values supplied by `look`.
struct PairOps<'a, L> {
    chi: &'a ActionTerms,
    look: L,
}

impl<L: Fn(Cell) -> usize> PairOps<'_, L> {
    fn mul(&self, (a, x): (usize, usize), (b, y): (usize, usize)) -> (usize, usize) {
        let i = self.chi.i.as_ref();
        let v = i.product(&[a, self.chi.sigma(x, b), (self.look)((false, x, y))]);
        (v, self.chi.q.mul(x, y))
    }

    fn bracket(&self, (a, x): (usize, usize), (b, y): (usize, usize)) -> (usize, usize) {
        let (i, chi) = (self.chi.i.as_ref(), self.chi);
        let u = chi.q.bracket(x, y);
        let inner = i.product(&[i.inv(a), chi.nu(y, a), i.inv(b)]);
        let v = i.product(&[
            i.conj(chi.tau(x, b), a),
            i.bracket(a, b),
            b,
            a,
            (self.look)((true, x, y)),
            chi.sigma(u, inner),
        ]);
        (v, u)
    }

    fn inverse(&self, (a, x): (usize, usize)) -> (usize, usize) {
        let i = self.chi.i.as_ref();
        let xi = self.chi.q.inv(x);
        let t = (self.look)((false, x, xi));
        (self.chi.sigma(xi, i.mul(i.inv(t), i.inv(a))), xi)
    }

    fn conj(&self, p: (usize, usize), z: (usize, usize)) -> (usize, usize) {
        self.mul(self.mul(z, p), self.inverse(z))
    }

    /// One law instance on `⟨1,x⟩, ⟨1,y⟩, ⟨1,z⟩`.
    fn holds(&self, law: Law, x: usize, y: usize, z: usize) -> bool {
        let (px, py, pz) = ((0, x), (0, y), (0, z));
        let one = (0, 0);
        match law {
            Law::Associativity => self.mul(self.mul(px, py), pz) == self.mul(px, self.mul(py, pz)),
            Law::Alternating => self.bracket(px, px) == one,
            Law::RightProduct => {
                self.bracket(px, self.mul(py, pz)) == self.mul(self.bracket(px, py), self.conj(self.bracket(px, pz), py))
            }
            Law::LeftProduct => {
                self.bracket(self.mul(px, py), pz) == self.mul(self.conj(self.bracket(py, pz), px), self.bracket(px, pz))
            }
            Law::Jacobi => {
                let a = self.bracket(self.bracket(px, py), self.conj(pz, py));
                let b = self.bracket(self.bracket(py, pz), self.conj(px, pz));
                let c = self.bracket(self.bracket(pz, px), self.conj(py, px));
                self.mul(self.mul(a, b), c) == one
            }
            Law::ConjugationInvariance => {
                self.conj(self.bracket(px, py), pz) == self.bracket(self.conj(px, pz), self.conj(py, pz))
            }
            _ => true,
        }
    }
}

const FACTOR_LAWS: [Law; 6] = [
    Law::Associativity,
    Law::Alternating,
    Law::RightProduct,
    Law::LeftProduct,
    Law::Jacobi,
    Law::ConjugationInvariance,
];

fn law_instances(nq: usize) -> Vec<(Law, usize, usize, usize)> {
    let mut out = Vec::new();
    for law in FACTOR_LAWS {
        for x in 0..nq {
            if law == Law::Alternating {
                out.push((law, x, 0, 0));
                continue;
            }
            for y in 0..nq {
                for z in 0..nq {
                    out.push((law, x, y, z));
                }
            }
        }
    }
    out
}

/// Decides compatibility of a factor set for compatible `χ`.
///
/// Every coordinate of a term in `I ⋊_{χ,T} Q` is additive in the kernel
/// coordinates and in `T` jointly, and `χ` compatible makes the kernel part of
/// each law vanish. So the laws hold everywhere iff they hold on the elements
/// `⟨1,x⟩`, which is an `|Q|³` check instead of `(|I||Q|)³`.
pub fn factor_set_compatible(chi: &ActionTerms, fs: &FactorSet) -> bool {
    let ops = PairOps {
        chi,
        look: |(f, x, y): Cell| if f { fs.tf(x, y) } else { fs.t(x, y) },
    };
    law_instances(chi.nq())
        .into_iter()
        .all(|(law, x, y, z)| ops.holds(law, x, y, z))
}

fn search_bound(what: &'static str, explored: u128, limit: u64) -> MlaError {
    MlaError::SearchBound {
        what,
        explored,
        limit,
    }
}

/// Every compatible normalized factor set for compatible `χ`, sorted.
///
/// Cells are assigned one at a time, `T` before `T_f`. Which cells a law
/// instance on `⟨1,x⟩, ⟨1,y⟩, ⟨1,z⟩` reads depends only on `x, y, z`, so each
/// instance is checked as soon as its last cell is assigned; the group-layer
/// cocycle law `T(x,y) + T(xy,z) = σ_x(T(y,z)) + T(x,yz)` is the
/// associativity instance. A full assignment passing every instance is
/// compatible by [`factor_set_compatible`].
pub fn compatible_factor_sets(chi: &ActionTerms, max_candidates: u64) -> Result<Vec<FactorSet>> {
    require_abelian(&chi.i, "kernel")?;
    let report = check_action_compatibility(chi)?;
    if !report.is_valid() {
        return Err(MlaError::Incompatible(report));
    }
    let (nq, ni) = (chi.nq(), chi.ni());
    if ni == 1 || nq == 1 {
        return Ok(vec![FactorSet::zero(nq)]);
    }
    let mut cells: Vec<Cell> = (1..nq).flat_map(|x| (1..nq).map(move |y| (false, x, y))).collect();
    for x in 1..nq {
        for y in x + 1..nq {
            cells.push((true, x, y));
            cells.push((true, y, x));
        }
    }
    let position: HashMap<Cell, usize> = cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();

    // Trigger each instance at the position of the last cell it reads.
    let mut triggers: Vec<Vec<(Law, usize, usize, usize)>> = vec![Vec::new(); cells.len()];
    for (law, x, y, z) in law_instances(nq) {
        let reads = std::cell::RefCell::new(Vec::new());
        let ops = PairOps {
            chi,
            look: |c: Cell| {
                reads.borrow_mut().push(c);
                0
            },
        };
        ops.holds(law, x, y, z);
        let last = reads.borrow().iter().filter_map(|c| position.get(c).copied()).max();
        if let Some(k) = last {
            triggers[k].push((law, x, y, z));
        }
    }

    let mut st = FsSearch {
        chi,
        cells,
        triggers,
        t: vec![0; nq * nq],
        tf: vec![0; nq * nq],
        nodes: 0,
        limit: max_candidates,
        out: Vec::new(),
    };
    st.assign(0)?;
    let mut out = st.out;
    out.sort();
    Ok(out)
}

struct FsSearch<'a> {
    chi: &'a ActionTerms,
    cells: Vec<Cell>,
    triggers: Vec<Vec<(Law, usize, usize, usize)>>,
    t: Vec<usize>,
    tf: Vec<usize>,
    nodes: u64,
    limit: u64,
    out: Vec<FactorSet>,
}

impl FsSearch<'_> {
    fn assign(&mut self, k: usize) -> Result<()> {
        let nq = self.chi.nq();
        if k == self.cells.len() {
            self.out.push(FactorSet::from_tables_unchecked(nq, self.t.clone(), self.tf.clone()));
            return Ok(());
        }
        let (f, x, y) = self.cells[k];
        for v in 0..self.chi.ni() {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(search_bound("factor-set enumeration", self.nodes as u128, self.limit));
            }
            if f {
                self.tf[x * nq + y] = v;
            } else {
                self.t[x * nq + y] = v;
            }
            let ok = {
                let (t, tf) = (&self.t, &self.tf);
                let ops = PairOps {
                    chi: self.chi,
                    look: |(f, a, b): Cell| if f { tf[a * nq + b] } else { t[a * nq + b] },
                };
                self.triggers[k].iter().all(|&(law, a, b, c)| ops.holds(law, a, b, c))
            };
            if ok {
                self.assign(k + 1)?;
            }
        }
        if f {
            self.tf[x * nq + y] = 0;
        } else {
            self.t[x * nq + y] = 0;
        }
        Ok(())
    }
}

/// All maps `h : Q → I` with `h(1) = 1`, in lexicographic order.
pub fn all_normalized_maps(nq: usize, ni: usize, max_candidates: u64) -> Result<Vec<Vec<usize>>> {
    let count = (ni as u128).checked_pow(nq.saturating_sub(1) as u32).unwrap_or(u128::MAX);
    if count > max_candidates as u128 {
        return Err(search_bound("map enumeration", count, max_candidates));
    }
    let mut out = vec![vec![0usize]];
    for _ in 1..nq {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..ni).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out.truncate(count as usize);
    if nq == 0 {
        out.clear();
    }
    Ok(out)
}

/// Distinct coboundaries, sorted.
pub fn coboundaries(chi: &ActionTerms, max_candidates: u64) -> Result<Vec<FactorSet>> {
    let maps = all_normalized_maps(chi.nq(), chi.ni(), max_candidates)?;
    let mut out: Vec<FactorSet> = maps.iter().map(|h| coboundary_from(chi, h)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// A finite abelian group given by a table on canonical representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupPresentation {
    /// Canonical representative of each element, as a flattened table key.
    pub elements: Vec<Vec<usize>>,
    /// `add[i][j]` is the index of `elements[i] + elements[j]`.
    pub add: Vec<Vec<usize>>,
    pub zero: usize,
    /// `n₁ | n₂ | …` with product the group order; empty for the trivial group.
    pub invariant_factors: Vec<usize>,
}

impl AbelianGroupPresentation {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.add[a][b] == self.zero).unwrap()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut p = a;
        while p != self.zero {
            p = self.add[p][a];
            k += 1;
        }
        k
    }
}

/// Invariant factors of a finite abelian group from its element orders.
///
/// For each prime `p`, `|G[p^j]| / |G[p^{j−1}]| = p^{r_j}` where `r_j` counts
/// cyclic factors of order at least `p^j`.
pub fn invariant_factors(element_orders: &[usize]) -> Vec<usize> {
    let n = element_orders.len();
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            primes.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    // exponents[prime] = cyclic factor exponents, descending.
    let mut per_prime: Vec<(usize, Vec<u32>)> = Vec::new();
    for &p in &primes {
        let killed = |pj: usize| element_orders.iter().filter(|&&o| pj.is_multiple_of(o)).count();
        let mut ranks = Vec::new();
        let mut prev = 1usize;
        let mut pj = p;
        loop {
            let c = killed(pj);
            if c == prev {
                break;
            }
            let mut ratio = c / prev;
            let mut r = 0;
            while ratio > 1 {
                ratio /= p;
                r += 1;
            }
            ranks.push(r);
            prev = c;
            pj *= p;
        }
        // ranks[j-1] = number of factors with exponent ≥ j.
        let count = ranks.first().copied().unwrap_or(0);
        let exps: Vec<u32> = (0..count)
            .map(|k| ranks.iter().filter(|&&r| r > k).count() as u32)
            .collect();
        per_prime.push((p, exps));
    }
    let width = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut factors: Vec<usize> = (0..width)
        .map(|k| {
            per_prime
                .iter()
                .map(|(p, e)| e.get(k).map(|&x| p.pow(x)).unwrap_or(1))
                .product()
        })
        .collect();
    factors.reverse();
    factors
}

/// Quotient of a finite abelian group (given by sorted elements, zero first,
/// and an addition) by a subgroup. Cosets are represented by their least
/// element; class 0 is the subgroup itself.
pub(crate) fn quotient_presentation<K, F>(
    elements: &[K],
    subgroup: &[K],
    add: F,
) -> (AbelianGroupPresentation, Vec<K>, HashMap<K, usize>)
where
    K: Clone + Eq + Hash,
    F: Fn(&K, &K) -> K,
{
    let mut class: HashMap<K, usize> = HashMap::new();
    let mut reps: Vec<K> = Vec::new();
    for e in elements {
        if class.contains_key(e) {
            continue;
        }
        let c = reps.len();
        reps.push(e.clone());
        for b in subgroup {
            class.insert(add(e, b), c);
        }
    }
    let k = reps.len();
    let add_table: Vec<Vec<usize>> = (0..k)
        .map(|a| (0..k).map(|b| class[&add(&reps[a], &reps[b])]).collect())
        .collect();
    let mut pres = AbelianGroupPresentation {
        elements: Vec::new(),
        add: add_table,
        zero: 0,
        invariant_factors: Vec::new(),
    };
    let orders: Vec<usize> = (0..k).map(|a| pres.element_order(a)).collect();
    pres.invariant_factors = invariant_factors(&orders);
    (pres, reps, class)
}

/// `H²(Q, I, χ)`: compatible factor sets modulo coboundaries.
#[derive(Debug, Clone)]
pub struct H2Group {
    pub group: AbelianGroupPresentation,
    /// Least member of each class; index 0 is the zero class.
    pub representatives: Vec<FactorSet>,
    pub cocycles: Vec<FactorSet>,
    pub coboundaries: Vec<FactorSet>,
    class: HashMap<FactorSet, usize>,
}

impl H2Group {
    pub fn order(&self) -> usize {
        self.representatives.len()
    }

    /// Class of a compatible factor set, or `None` if it is not one.
    pub fn class_of(&self, fs: &FactorSet) -> Option<usize> {
        self.class.get(fs).copied()
    }
}

pub fn h2_group(chi: &ActionTerms, max_candidates: u64) -> Result<H2Group> {
    let cocycles = compatible_factor_sets(chi, max_candidates)?;
    let cobs = coboundaries(chi, max_candidates)?;
    let i = chi.i.clone();
    let members: std::collections::HashSet<&FactorSet> = cocycles.iter().collect();
    // Closure under addition: the subgroup generated by the set is the set.
    let mut span: std::collections::HashSet<FactorSet> = std::iter::once(FactorSet::zero(chi.nq())).collect();
    for z in &cocycles {
        if span.contains(z) {
            continue;
        }
        let mut grown = span.clone();
        let mut layer: Vec<FactorSet> = span.iter().cloned().collect();
        loop {
            layer = layer.iter().map(|a| add_factor_sets(&i, a, z)).collect();
            if span.contains(&layer[0]) {
                break;
            }
            grown.extend(layer.iter().cloned());
        }
        span = grown;
    }
    if span.len() != cocycles.len() || !span.iter().all(|a| members.contains(a)) {
        return Err(MlaError::IllDefined("compatible factor sets are not closed under addition".into()));
    }
    if let Some(b) = cobs.iter().find(|b| !members.contains(b)) {
        return Err(MlaError::IllDefined(format!("coboundary {:?} is not compatible", b.key())));
    }
    let (mut group, reps, class) = quotient_presentation(&cocycles, &cobs, |a, b| add_factor_sets(&i, a, b));
    group.elements = reps.iter().map(FactorSet::key).collect();
    for rep in &reps {
        build_crossed_product(&with_factors(chi, rep), crate::MAX_ORDER)?;
    }
    Ok(H2Group {
        group,
        representatives: reps,
        cocycles,
        coboundaries: cobs,
        class,
    })
}

/// Both derivation laws:
/// `d(xy) = d(x) + σ_x(d(y))` and
/// `d({x,y}) = τ_x(d(y)) + d(x) + d(y) + σ_{{x,y}}(ν_y(d(x)) − d(x) − d(y))`.
pub fn is_derivation(chi: &ActionTerms, d: &[usize]) -> bool {
    let q = chi.q.as_ref();
    d.len() == q.order()
        && d[0] == 0
        && q.elements().all(|x| q.elements().all(|y| derivation_laws_at(chi, d, x, y)))
}

fn derivation_laws_at(chi: &ActionTerms, d: &[usize], x: usize, y: usize) -> bool {
    let (q, i) = (chi.q.as_ref(), chi.i.as_ref());
    if d[q.mul(x, y)] != i.mul(d[x], chi.sigma(x, d[y])) {
        return false;
    }
    let u = q.bracket(x, y);
    let inner = i.product(&[chi.nu(y, d[x]), i.inv(d[x]), i.inv(d[y])]);
    d[u] == i.product(&[chi.tau(x, d[y]), d[x], d[y], chi.sigma(u, inner)])
}

/// All derivations, sorted lexicographically.
pub fn derivations(chi: &ActionTerms, max_candidates: u64) -> Result<Vec<Derivation>> {
    require_abelian(&chi.i, "kernel")?;
    let nq = chi.nq();
    let mut d = vec![0; nq];
    let mut out = Vec::new();
    let mut nodes = 0u64;

    fn go(
        k: usize,
        chi: &ActionTerms,
        d: &mut Vec<usize>,
        out: &mut Vec<Derivation>,
        nodes: &mut u64,
        limit: u64,
    ) -> Result<()> {
        let (q, i) = (chi.q.as_ref(), chi.i.as_ref());
        let nq = q.order();
        if k == nq {
            out.push(d.clone());
            return Ok(());
        }
        for v in 0..i.order() {
            *nodes += 1;
            if *nodes > limit {
                return Err(search_bound("derivation enumeration", *nodes as u128, limit));
            }
            d[k] = v;
            let ok = (0..=k).all(|x| {
                (0..=k).all(|y| {
                    let (p, b) = (q.mul(x, y), q.bracket(x, y));
                    let involved = x == k || y == k || p == k || b == k;
                    !involved || p > k || b > k || derivation_laws_at(chi, d, x, y)
                })
            });
            if ok {
                go(k + 1, chi, d, out, nodes, limit)?;
            }
        }
        d[k] = 0;
        Ok(())
    }

    if nq == 1 {
        return Ok(vec![vec![0]]);
    }
    go(1, chi, &mut d, &mut out, &mut nodes, max_candidates)?;
    out.retain(|d| is_derivation(chi, d));
    Ok(out)
}

/// `d_a(x) = a − σ_x(a)`.
pub fn principal_derivation(chi: &ActionTerms, a: usize) -> Derivation {
    let i = chi.i.as_ref();
    chi.q
        .elements()
        .map(|x| i.mul(a, i.inv(chi.sigma(x, a))))
        .collect()
}

/// Distinct principal derivations, sorted.
pub fn principal_derivations(chi: &ActionTerms) -> Vec<Derivation> {
    let mut out: Vec<Derivation> = chi.i.elements().map(|a| principal_derivation(chi, a)).collect();
    out.sort();
    out.dedup();
    out
}

/// `H¹(Q, I, χ) = Der / PDer`.
#[derive(Debug, Clone)]
pub struct H1Group {
    pub group: AbelianGroupPresentation,
    pub representatives: Vec<Derivation>,
    pub derivations: Vec<Derivation>,
    pub principal: Vec<Derivation>,
    class: HashMap<Derivation, usize>,
}

impl H1Group {
    pub fn order(&self) -> usize {
        self.representatives.len()
    }

    pub fn class_of(&self, d: &[usize]) -> Option<usize> {
        self.class.get(d).copied()
    }
}

pub fn add_maps(i: &FiniteMla, a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b).map(|(&x, &y)| i.mul(x, y)).collect()
}

pub fn h1_group(chi: &ActionTerms, max_candidates: u64) -> Result<H1Group> {
    let ders = derivations(chi, max_candidates)?;
    let principal = principal_derivations(chi);
    let i = chi.i.clone();
    let (mut group, reps, class) = quotient_presentation(&ders, &principal, |a, b| add_maps(&i, a, b));
    group.elements = reps.clone();
    Ok(H1Group {
        group,
        representatives: reps,
        derivations: ders,
        principal,
        class,
    })
}

/// `H⁰ = {a : σ_x(a) = a for all x}`.
pub fn h0_set(chi: &ActionTerms) -> Subset {
    let ni = chi.ni();
    Subset::from_indices(
        ni,
        (0..ni).filter(|&a| chi.q.elements().all(|x| chi.sigma(x, a) == a)),
    )
}

/// An automorphism fixing the kernel pointwise and inducing the identity on
/// the quotient, paired with its derivation `d(x) = i⁻¹(γ(l(x))·l(x)⁻¹)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizingAutomorphism {
    pub map: Vec<usize>,
    pub derivation: Derivation,
}

/// `i(a)·l(x) ↦ i(a)·i(c(x))·l(x)` for the canonical section `l`.
pub fn shift_map(ext: &Extension, c: &[usize]) -> Vec<usize> {
    let a = ext.total.as_ref();
    let s = ext.canonical_section();
    a.elements()
        .map(|e| {
            let x = ext.proj[e];
            let k = a.mul(e, a.inv(s.lift(x)));
            a.product(&[k, ext.embed[c[x]], s.lift(x)])
        })
        .collect()
}

/// Enumerates the stabilizing automorphisms of an abelian-kernel extension.
///
/// Any such automorphism sends `i(a)·l(x)` to `i(a)·γ(l(x))` with `γ(l(x))` in
/// the fibre of `x`, so it is a [`shift_map`] for some `c : Q → I`. All such
/// `c` are tried and kept when the shift is a homomorphism.
pub fn stabilizing_automorphisms(ext: &Extension, max_candidates: u64) -> Result<Vec<StabilizingAutomorphism>> {
    require_abelian(&ext.kernel, "kernel")?;
    let (nq, ni) = (ext.quotient.order(), ext.kernel.order());
    let a = ext.total.as_ref();
    let s = ext.canonical_section();
    let mut out = Vec::new();
    for c in all_normalized_maps(nq, ni, max_candidates)? {
        let map = shift_map(ext, &c);
        if crate::algebra::is_homomorphism(a, a, &map)? {
            let derivation: Vec<usize> = (0..nq)
                .map(|x| {
                    let v = a.mul(map[s.lift(x)], a.inv(s.lift(x)));
                    ext.preimage(v).expect("fibre-preserving shift")
                })
                .collect();
            out.push(StabilizingAutomorphism { map, derivation });
        }
    }
    Ok(out)
}

/// `I ⋊_{χ,T} Q` for abelian `I`, validated in full.
pub fn realize(chi: &ActionTerms, fs: &FactorSet, max_order: usize) -> Result<Arc<FiniteMla>> {
    Ok(build_crossed_product(&with_factors(chi, fs), max_order)?.algebra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn arc(key: &str) -> Arc<FiniteMla> {
        Arc::new(catalog::build(key).unwrap())
    }

    fn inversion(q: Arc<FiniteMla>, i: Arc<FiniteMla>) -> ActionTerms {
        let n = i.order();
        ActionTerms::from_fn(
            q,
            i,
            |x, a| if x == 0 { a } else { (n - a) % n },
            |_, _| 0,
            |_, _| 0,
        )
        .unwrap()
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(invariant_factors(&[1]), Vec::<usize>::new());
        assert_eq!(invariant_factors(&[1, 2]), vec![2]);
        assert_eq!(invariant_factors(&[1, 2, 2, 2]), vec![2, 2]);
        assert_eq!(invariant_factors(&[1, 4, 2, 4]), vec![4]);
        // Z2 × Z6: orders of (a,b)
        let orders: Vec<usize> = (0..2)
            .flat_map(|a| (0..6).map(move |b| {
                let oa = if a == 0 { 1 } else { 2 };
                let ob = 6 / num_gcd(b, 6);
                oa * ob / num_gcd(oa, ob)
            }))
            .collect();
        assert_eq!(invariant_factors(&orders), vec![2, 6]);
    }

    fn num_gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { num_gcd(b, a % b) }
    }

    #[test]
    fn coboundary_examples() {
        let (z2, z3) = (arc("cyclic(2)"), arc("cyclic(3)"));
        let triv = ActionTerms::trivial(z2.clone(), z2.clone());
        assert!(coboundary_from(&triv, &[0, 0]).is_zero());
        assert!(coboundary_from(&triv, &[0, 1]).is_zero());
        let inv = inversion(z2, z3);
        let g = coboundary_from(&inv, &[0, 1]);
        assert!(g.is_zero());
    }

    #[test]
    fn action_compatibility_examples() {
        let (z2, z3) = (arc("cyclic(2)"), arc("cyclic(3)"));
        assert!(check_action_compatibility(&ActionTerms::trivial(z2.clone(), z3.clone())).unwrap().is_valid());
        assert!(check_action_compatibility(&inversion(z2.clone(), z3.clone())).unwrap().is_valid());
        let bad = ActionTerms::from_fn(z2.clone(), z3.clone(), |x, a| if x == 0 { a } else { [0, 2, 2][a] }, |_, _| 0, |_, _| 0).unwrap();
        assert!(!check_action_compatibility(&bad).unwrap().is_valid());
        let s3 = arc("sym(3)");
        assert!(matches!(
            check_action_compatibility(&ActionTerms::trivial(z2, s3)),
            Err(MlaError::NotAbelianKernel(_))
        ));
    }

    #[test]
    fn h2_examples() {
        let (z1, z2, z3) = (arc("trivial"), arc("cyclic(2)"), arc("cyclic(3)"));
        let h = h2_group(&ActionTerms::trivial(z2.clone(), z2.clone()), 1_000_000).unwrap();
        assert_eq!(h.group.invariant_factors, vec![2]);
        assert_eq!(h2_group(&ActionTerms::trivial(z2.clone(), z3.clone()), 1_000_000).unwrap().order(), 1);
        assert_eq!(h2_group(&ActionTerms::trivial(z1, z3), 1_000_000).unwrap().order(), 1);
    }

    #[test]
    fn derivation_examples() {
        let (z2, z3, z4) = (arc("cyclic(2)"), arc("cyclic(3)"), arc("cyclic(4)"));
        let triv = ActionTerms::trivial(z2.clone(), z2.clone());
        assert_eq!(derivations(&triv, 1000).unwrap().len(), 2);
        assert_eq!(principal_derivations(&triv).len(), 1);
        assert_eq!(h1_group(&triv, 1000).unwrap().order(), 2);
        let inv = inversion(z2.clone(), z3.clone());
        assert_eq!(derivations(&inv, 1000).unwrap().len(), 3);
        assert_eq!(principal_derivations(&inv).len(), 3);
        assert_eq!(principal_derivation(&inv, 1), vec![0, 2]);
        assert_eq!(h1_group(&inv, 1000).unwrap().order(), 1);
        assert!(h0_set(&triv).is_full());
        assert!(h0_set(&inv).is_trivial());
        assert_eq!(h0_set(&inversion(z2, z4)).members(), vec![0, 2]);
    }
}
