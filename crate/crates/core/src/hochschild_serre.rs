//! The five-term sequence of an extension `1 → I → M → Q → 1` with abelian
//! coefficients `A`:
//!
//! `0 → H¹(Q, A^I, χ̂) → H¹(M, A, χ) → H¹(I, A, χ_I)^□ → H²(Q, A^I, χ̂) → H²(M, A, χ)`.
//!
//! Everything is computed in the coordinates of `M` itself with its canonical
//! section `l`, so the factor set of the extension appears as the element
//! `T^s(x,y) = l(x)·l(y)·l(xy)⁻¹` of `I ⊆ M`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{h0_set, h1_group, h2_group, require_abelian, Derivation, H1Group, H2Group};
use crate::algebra::{subalgebra, FiniteMla};
use crate::error::{MlaError, Result};
use crate::extension::{ActionTerms, Extension, FactorSet, Section};
use crate::subset::Subset;
use crate::substructures::is_subalgebra;
use crate::Limits;

/// `A^I = {a : σ_n(a) = a, τ_n(a) = ν_n(a) = 1 for all n ∈ I}`, where `χ` acts
/// by `M` and `ideal` is a subset of `M`.
pub fn fixed_subalgebra(chi: &ActionTerms, ideal: &Subset) -> Result<Subset> {
    require_abelian(&chi.i, "coefficient algebra")?;
    let fixed = Subset::from_indices(
        chi.ni(),
        chi.i.elements().filter(|&a| {
            ideal
                .iter()
                .all(|n| chi.sigma(n, a) == a && chi.tau(n, a) == 0 && chi.nu(n, a) == 0)
        }),
    );
    if !is_subalgebra(&chi.i, &fixed) {
        return Err(MlaError::NotASubalgebra(format!("fixed points {fixed:?}")));
    }
    Ok(fixed)
}

/// `χ̂` on `(Q, A^I)`: `σ̂_q(a) = σ_m(a)` for any `m` over `q`, and likewise for
/// `τ̂`, `ν̂`. Every representative of every fibre is compared. Returns the
/// action with `A^I` relabelled in ascending order, plus its embedding in `A`.
pub fn induced_action(ext: &Extension, chi: &ActionTerms, fixed: &Subset) -> Result<(ActionTerms, Vec<usize>)> {
    let (sub, embed) = subalgebra(&chi.i, fixed)?;
    let mut back = vec![usize::MAX; chi.ni()];
    for (k, &a) in embed.iter().enumerate() {
        back[a] = k;
    }
    let nq = ext.quotient.order();
    let mut reps = vec![usize::MAX; nq];
    for m in ext.total.elements() {
        let q = ext.proj[m];
        if reps[q] == usize::MAX {
            reps[q] = m;
        }
    }
    type Term = fn(&ActionTerms, usize, usize) -> usize;
    let tables: [(&str, Term); 3] = [
        ("sigma", ActionTerms::sigma),
        ("tau", ActionTerms::tau),
        ("nu", ActionTerms::nu),
    ];
    for m in ext.total.elements() {
        let r = reps[ext.proj[m]];
        for &a in &embed {
            for (name, f) in &tables {
                let (u, v) = (f(chi, m, a), f(chi, r, a));
                if u != v {
                    return Err(MlaError::IllDefined(format!(
                        "{name} at {a} differs between representatives {r} and {m} of class {}",
                        ext.proj[m]
                    )));
                }
                if back[u] == usize::MAX {
                    return Err(MlaError::IllDefined(format!("{name}_{m}({a}) = {u} leaves the fixed subalgebra")));
                }
            }
        }
    }
    let hat = ActionTerms::from_fn(
        ext.quotient.clone(),
        Arc::new(sub),
        |q, k| back[chi.sigma(reps[q], embed[k])],
        |q, k| back[chi.tau(reps[q], embed[k])],
        |q, k| back[chi.nu(reps[q], embed[k])],
    )?;
    Ok((hat, embed))
}

/// `χ_I`: the action restricted along the embedding of `I` in `M`.
pub fn restricted_action(ext: &Extension, chi: &ActionTerms) -> Result<ActionTerms> {
    let e = &ext.embed;
    ActionTerms::from_fn(
        ext.kernel.clone(),
        chi.i.clone(),
        |n, a| chi.sigma(e[n], a),
        |n, a| chi.tau(e[n], a),
        |n, a| chi.nu(e[n], a),
    )
}

/// A derivation on `I` together with a map `η : M → A` witnessing the
/// □-condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareWitness {
    pub d: Derivation,
    pub eta: Vec<usize>,
}

/// The pieces of the five-term sequence shared by every map in it.
#[derive(Debug, Clone)]
pub struct HsDatum {
    pub ext: Extension,
    /// `χ` on `(M, A)`.
    pub chi: ActionTerms,
    /// `A^I` as a subset of `A`.
    pub fixed: Subset,
    /// `χ̂` on `(Q, A^I)`.
    pub chi_hat: ActionTerms,
    /// Labels of `A^I` inside `A`.
    pub fixed_embed: Vec<usize>,
    /// `χ_I` on `(I, A)`.
    pub chi_i: ActionTerms,
    section: Section,
    fixed_back: Vec<usize>,
    limits: Limits,
}

fn same_tables(a: &FiniteMla, b: &FiniteMla) -> bool {
    a.order() == b.order()
        && a.elements()
            .all(|x| a.elements().all(|y| a.mul(x, y) == b.mul(x, y) && a.bracket(x, y) == b.bracket(x, y)))
}

impl HsDatum {
    pub fn new(ext: &Extension, chi: &ActionTerms, limits: &Limits) -> Result<Self> {
        if !same_tables(&ext.total, &chi.q) {
            return Err(MlaError::Format("the action terms do not act by the middle algebra of the extension".into()));
        }
        require_abelian(&chi.i, "coefficient algebra")?;
        let fixed = fixed_subalgebra(chi, &ext.kernel_subset())?;
        let (chi_hat, fixed_embed) = induced_action(ext, chi, &fixed)?;
        let chi_i = restricted_action(ext, chi)?;
        let mut fixed_back = vec![usize::MAX; chi.ni()];
        for (k, &a) in fixed_embed.iter().enumerate() {
            fixed_back[a] = k;
        }
        Ok(HsDatum {
            ext: ext.clone(),
            chi: chi.clone(),
            fixed,
            chi_hat,
            fixed_embed,
            chi_i,
            section: ext.canonical_section(),
            fixed_back,
            limits: *limits,
        })
    }

    fn a(&self) -> &FiniteMla {
        &self.chi.i
    }

    fn m(&self) -> &FiniteMla {
        &self.ext.total
    }

    fn sub(&self, x: usize, y: usize) -> usize {
        self.a().mul(x, self.a().inv(y))
    }

    /// `d` on an element of `M` known to lie in `I`.
    fn d_at(&self, d: &[usize], m: usize) -> usize {
        d[self.ext.preimage(m).expect("element of the ideal")]
    }

    /// Values `e` such that `η(m) = e` satisfies (S1) and (S2) at `m` for
    /// every `n ∈ I`. Both conditions involve `η` only through `η(m)`.
    pub fn square_values(&self, d: &[usize], m: usize) -> Vec<usize> {
        let (a, mm) = (self.a(), self.m());
        let chi = &self.chi;
        let rows: Vec<(usize, usize, usize, usize)> = self
            .ext
            .embed
            .iter()
            .map(|&n| {
                let inner = mm.product(&[mm.inv(m), n, m]);
                let s1 = self.sub(chi.sigma(m, self.d_at(d, inner)), self.d_at(d, n));
                let b = mm.bracket(m, n);
                let dn = self.d_at(d, n);
                let s2 = a.product(&[
                    self.d_at(d, b),
                    a.inv(chi.tau(m, dn)),
                    chi.sigma(b, dn),
                    a.inv(dn),
                ]);
                (n, b, s1, s2)
            })
            .collect();
        a.elements()
            .filter(|&e| {
                rows.iter().all(|&(n, b, s1, s2)| {
                    s1 == self.sub(chi.sigma(n, e), e)
                        && s2 == a.mul(e, chi.sigma(b, self.sub(chi.nu(n, e), e)))
                })
            })
            .collect()
    }

    /// A □-witness for `d`, or `None`. On `I` the witness agrees with `d`
    /// whenever that value is admissible; elsewhere it takes the least
    /// admissible value.
    pub fn square_condition(&self, d: &[usize]) -> Result<Option<SquareWitness>> {
        let nm = self.m().order();
        let explored = (nm * self.a().order()) as u128;
        if explored > self.limits.max_candidates as u128 {
            return Err(MlaError::SearchBound {
                what: "square-condition witness",
                explored,
                limit: self.limits.max_candidates,
            });
        }
        let ideal = self.ext.kernel_subset();
        let mut eta = vec![0; nm];
        for (m, slot) in eta.iter_mut().enumerate() {
            let values = self.square_values(d, m);
            let preferred = ideal.contains(m).then(|| self.d_at(d, m));
            *slot = match preferred.filter(|v| values.contains(v)).or(values.first().copied()) {
                Some(v) => v,
                None => return Ok(None),
            };
        }
        if eta[0] != 0 {
            return Ok(None);
        }
        Ok(Some(SquareWitness { d: d.to_vec(), eta }))
    }

    /// Every witness for `d` up to its values off the section image, which the
    /// transgression never reads. Sorted lexicographically.
    pub fn section_witnesses(&self, d: &[usize]) -> Result<Vec<SquareWitness>> {
        let Some(base) = self.square_condition(d)? else {
            return Ok(Vec::new());
        };
        let lifts: Vec<usize> = (1..self.ext.quotient.order()).map(|x| self.section.lift(x)).collect();
        let choices: Vec<Vec<usize>> = lifts.iter().map(|&m| self.square_values(d, m)).collect();
        let total: u128 = choices.iter().map(|c| c.len() as u128).product();
        if total > self.limits.max_candidates as u128 {
            return Err(MlaError::SearchBound {
                what: "square-condition witnesses",
                explored: total,
                limit: self.limits.max_candidates,
            });
        }
        let mut out = vec![base];
        for (k, &m) in lifts.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|w| {
                    choices[k].iter().map(move |&v| {
                        let mut w = w.clone();
                        w.eta[m] = v;
                        w
                    })
                })
                .collect();
        }
        out.sort_by(|a, b| a.eta.cmp(&b.eta));
        out.dedup();
        Ok(out)
    }

    /// The transgressed factor set on `(Q, A^I)`:
    /// `∂(x,y) = η(x) + σ_{l(x)}η(y) − σ_{T^s(x,y)}η(xy) − d(T^s(x,y))` and
    /// `∂_f(x,y) = η(x) + η(y) + τ_{l(x)}η(y) + σ_{{l(x),l(y)}}(ν_{l(y)}η(x) − η(x) − η(y))
    ///             − σ_{T^s_f(x,y)}η({x,y}) − d(T^s_f(x,y))`,
    /// with `η(x)` read at `l(x)`.
    pub fn transgression(&self, w: &SquareWitness) -> Result<FactorSet> {
        let (a, mm, q) = (self.a(), self.m(), self.ext.quotient.as_ref());
        let chi = &self.chi;
        let l = |x| self.section.lift(x);
        let eta = |x| w.eta[l(x)];
        let nq = q.order();
        let mut t = vec![0; nq * nq];
        let mut tf = vec![0; nq * nq];
        let relabel = |v: usize, part: &str, x: usize, y: usize| {
            let k = self.fixed_back[v];
            if k == usize::MAX {
                Err(MlaError::ImageEscape {
                    context: format!("transgression {part} at ({x},{y}) = {v}"),
                })
            } else {
                Ok(k)
            }
        };
        for x in 0..nq {
            for y in 0..nq {
                let (lx, ly) = (l(x), l(y));
                let xy = q.mul(x, y);
                let ts = mm.mul(mm.mul(lx, ly), mm.inv(l(xy)));
                let v = a.product(&[
                    eta(x),
                    chi.sigma(lx, eta(y)),
                    a.inv(chi.sigma(ts, eta(xy))),
                    a.inv(self.d_at(&w.d, ts)),
                ]);
                t[x * nq + y] = relabel(v, "group part", x, y)?;

                let u = q.bracket(x, y);
                let blxy = mm.bracket(lx, ly);
                let tsf = mm.mul(blxy, mm.inv(l(u)));
                let inner = a.product(&[chi.nu(ly, eta(x)), a.inv(eta(x)), a.inv(eta(y))]);
                let v = a.product(&[
                    eta(x),
                    eta(y),
                    chi.tau(lx, eta(y)),
                    chi.sigma(blxy, inner),
                    a.inv(chi.sigma(tsf, eta(u))),
                    a.inv(self.d_at(&w.d, tsf)),
                ]);
                tf[x * nq + y] = relabel(v, "bracket part", x, y)?;
            }
        }
        FactorSet::new(nq, t, tf)
    }

    /// `d ↦ d|_I` for a derivation on `M`.
    pub fn restrict_derivation(&self, d: &[usize]) -> Derivation {
        self.ext.embed.iter().map(|&m| d[m]).collect()
    }

    /// `d ↦ j ∘ d ∘ π` for a derivation on `(Q, A^I)`.
    pub fn inflate_derivation(&self, d: &[usize]) -> Derivation {
        self.ext.proj.iter().map(|&x| self.fixed_embed[d[x]]).collect()
    }

    /// `S ↦ j ∘ S ∘ (π × π)` for a factor set on `(Q, A^I)`.
    pub fn inflate_factor_set(&self, s: &FactorSet) -> Result<FactorSet> {
        let nm = self.m().order();
        let p = &self.ext.proj;
        let cell = |f: &dyn Fn(usize, usize) -> usize| -> Vec<usize> {
            (0..nm * nm).map(|k| self.fixed_embed[f(p[k / nm], p[k % nm])]).collect()
        };
        FactorSet::new(nm, cell(&|x, y| s.t(x, y)), cell(&|x, y| s.tf(x, y)))
    }
}

/// One exactness check: whether it holds and, if not, a representative of a
/// class in the symmetric difference of the two sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junction {
    pub name: String,
    pub holds: bool,
    pub counterexample: Option<Vec<usize>>,
}

impl Junction {
    fn compare(name: &str, left: &BTreeSet<usize>, right: &BTreeSet<usize>, key: impl Fn(usize) -> Vec<usize>) -> Self {
        let witness = left.symmetric_difference(right).next().copied();
        Junction {
            name: name.to_string(),
            holds: witness.is_none(),
            counterexample: witness.map(key),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiveTermReport {
    /// `|H¹(Q,A^I,χ̂)|, |H¹(M,A,χ)|, |H¹(I,A,χ_I)^□|, |H²(Q,A^I,χ̂)|, |H²(M,A,χ)|`.
    pub node_orders: [usize; 5],
    pub fixed_order: usize,
    /// Inflation injective, `im inf = ker res`, `im res = ker ∂`, `im ∂ = ker inf`.
    pub junctions: [Junction; 4],
    /// Classes of `H¹(I,A,χ_I)` satisfying the □-condition.
    pub square_classes: Vec<usize>,
    /// `(class in H¹(I), class in H²(Q))` for each □-class.
    pub transgression: Vec<(usize, usize)>,
    /// The class of `∂` agrees across every member of each □-class and every
    /// witness of each member.
    pub eta_independent: bool,
    pub witnesses_checked: usize,
    pub transgression_additive: bool,
}

impl FiveTermReport {
    pub fn passed(&self) -> bool {
        self.junctions.iter().all(|j| j.holds) && self.eta_independent && self.transgression_additive
    }
}

/// The cohomology groups of the five nodes, plus `H¹(I,A,χ_I)` in full.
#[derive(Debug, Clone)]
pub struct FiveTermNodes {
    pub h1_quotient: H1Group,
    pub h1_middle: H1Group,
    pub h1_ideal: H1Group,
    pub h2_quotient: H2Group,
    pub h2_middle: H2Group,
}

impl FiveTermNodes {
    pub fn compute(datum: &HsDatum) -> Result<Self> {
        let max = datum.limits.max_candidates;
        Ok(FiveTermNodes {
            h1_quotient: h1_group(&datum.chi_hat, max)?,
            h1_middle: h1_group(&datum.chi, max)?,
            h1_ideal: h1_group(&datum.chi_i, max)?,
            h2_quotient: h2_group(&datum.chi_hat, max)?,
            h2_middle: h2_group(&datum.chi, max)?,
        })
    }
}

fn class_or_err<T>(found: Option<usize>, what: &str, key: &[T]) -> Result<usize>
where
    T: std::fmt::Debug,
{
    found.ok_or_else(|| MlaError::IllDefined(format!("{what} {key:?} is not a cocycle of the target")))
}

/// Classes of `H¹(I,A,χ_I)` satisfying the □-condition. The condition is
/// checked on every derivation; a class whose members disagree is reported
/// as ill-defined, as is a set of classes that is not a subgroup.
pub fn square_classes(datum: &HsDatum, h1: &H1Group) -> Result<Vec<usize>> {
    let mut verdict: Vec<Option<bool>> = vec![None; h1.order()];
    for d in &h1.derivations {
        let c = h1.class_of(d).expect("derivation has a class");
        let ok = datum.square_condition(d)?.is_some();
        match verdict[c] {
            Some(v) if v != ok => {
                return Err(MlaError::IllDefined(format!("□-condition differs within the class of {d:?}")))
            }
            _ => verdict[c] = Some(ok),
        }
    }
    let classes: Vec<usize> = (0..h1.order()).filter(|&c| verdict[c] == Some(true)).collect();
    let set: BTreeSet<usize> = classes.iter().copied().collect();
    if !set.contains(&h1.group.zero) {
        return Err(MlaError::IllDefined("principal derivations fail the □-condition".into()));
    }
    for &a in &classes {
        for &b in &classes {
            if !set.contains(&h1.group.add[a][b]) {
                return Err(MlaError::IllDefined("□-classes are not closed under addition".into()));
            }
        }
    }
    Ok(classes)
}

/// Computes the five nodes and the four maps, and checks each junction over
/// all class representatives. Requires `H⁰(M, A, χ) = 0`.
pub fn verify_five_term(ext: &Extension, chi: &ActionTerms, limits: &Limits) -> Result<FiveTermReport> {
    let datum = HsDatum::new(ext, chi, limits)?;
    let h0 = h0_set(chi);
    if !h0.is_trivial() {
        return Err(MlaError::HypothesisFailed(format!(
            "H⁰(M, A, χ) has {} elements; the sequence needs it trivial",
            h0.len()
        )));
    }
    let nodes = FiveTermNodes::compute(&datum)?;
    let FiveTermNodes {
        h1_quotient: h1q,
        h1_middle: h1m,
        h1_ideal: h1i,
        h2_quotient: h2q,
        h2_middle: h2m,
    } = &nodes;

    // Inflation on H¹.
    let inf1: Vec<usize> = h1q
        .representatives
        .iter()
        .map(|d| {
            let lifted = datum.inflate_derivation(d);
            class_or_err(h1m.class_of(&lifted), "inflated derivation", &lifted)
        })
        .collect::<Result<_>>()?;
    let zero_preimages: BTreeSet<usize> = (0..h1q.order()).filter(|&c| inf1[c] == h1m.group.zero).collect();
    let trivial: BTreeSet<usize> = [h1q.group.zero].into();
    let injective = Junction::compare("inflation_injective", &zero_preimages, &trivial, |c| {
        h1q.representatives[c].clone()
    });

    // Restriction.
    let res: Vec<usize> = h1m
        .representatives
        .iter()
        .map(|d| {
            let r = datum.restrict_derivation(d);
            class_or_err(h1i.class_of(&r), "restricted derivation", &r)
        })
        .collect::<Result<_>>()?;
    let image_inf: BTreeSet<usize> = inf1.iter().copied().collect();
    let kernel_res: BTreeSet<usize> = (0..h1m.order()).filter(|&c| res[c] == h1i.group.zero).collect();
    let inf_res = Junction::compare("image_inflation_is_kernel_restriction", &image_inf, &kernel_res, |c| {
        h1m.representatives[c].clone()
    });

    // Transgression on the □-subgroup, with η-independence over every member
    // and every witness.
    let square = square_classes(&datum, h1i)?;
    let square_set: BTreeSet<usize> = square.iter().copied().collect();
    let mut trans = vec![usize::MAX; h1i.order()];
    let mut eta_independent = true;
    let mut witnesses_checked = 0;
    for d in &h1i.derivations {
        let c = h1i.class_of(d).expect("derivation has a class");
        if !square_set.contains(&c) {
            continue;
        }
        for w in datum.section_witnesses(d)? {
            let fs = datum.transgression(&w)?;
            let k = class_or_err(h2q.class_of(&fs), "transgressed factor set", &fs.key())?;
            witnesses_checked += 1;
            if trans[c] == usize::MAX {
                trans[c] = k;
            } else if trans[c] != k {
                eta_independent = false;
            }
        }
    }
    let transgression: Vec<(usize, usize)> = square.iter().map(|&c| (c, trans[c])).collect();
    let transgression_additive = square
        .iter()
        .all(|&a| square.iter().all(|&b| trans[h1i.group.add[a][b]] == h2q.group.add[trans[a]][trans[b]]));

    let image_res: BTreeSet<usize> = res.iter().copied().collect();
    let kernel_trans: BTreeSet<usize> = square.iter().copied().filter(|&c| trans[c] == h2q.group.zero).collect();
    let res_trans = Junction::compare("image_restriction_is_kernel_transgression", &image_res, &kernel_trans, |c| {
        h1i.representatives[c].clone()
    });

    // Inflation on H².
    let mut kernel_inf2 = BTreeSet::new();
    for (c, s) in h2q.representatives.iter().enumerate() {
        let lifted = datum.inflate_factor_set(s)?;
        let k = class_or_err(h2m.class_of(&lifted), "inflated factor set", &lifted.key())?;
        if k == h2m.group.zero {
            kernel_inf2.insert(c);
        }
    }
    let image_trans: BTreeSet<usize> = transgression.iter().map(|&(_, k)| k).collect();
    let trans_inf = Junction::compare("image_transgression_is_kernel_inflation", &image_trans, &kernel_inf2, |c| {
        h2q.representatives[c].key()
    });

    Ok(FiveTermReport {
        node_orders: [h1q.order(), h1m.order(), square.len(), h2q.order(), h2m.order()],
        fixed_order: datum.fixed.len(),
        junctions: [injective, inf_res, res_trans, trans_inf],
        square_classes: square,
        transgression,
        eta_independent,
        witnesses_checked,
        transgression_additive,
    })
}
