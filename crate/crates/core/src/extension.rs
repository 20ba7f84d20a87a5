//! Extensions `I ↣ A ↠ Q`, the 2-cocycles `{T, T_f, σ, τ, ν}` read off them
//! through a section, and the crossed product `I ⋊_T Q` that rebuilds them.
//!
//! Compatibility of a cocycle is decided by building the crossed product and
//! running the validator on it. No separate list of cocycle equations is kept.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{is_homomorphism, FiniteMla, Law, ValidationReport, Violation};
use crate::error::{MlaError, Result};
use crate::iso::automorphisms;
use crate::subset::Subset;
use crate::substructures::{is_ideal, quotient};
use crate::Limits;

/// A short exact sequence `kernel ↣ total ↠ quotient`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub total: Arc<FiniteMla>,
    pub kernel: Arc<FiniteMla>,
    pub quotient: Arc<FiniteMla>,
    /// Kernel index ↦ total index.
    pub embed: Vec<usize>,
    /// Total index ↦ quotient index.
    pub proj: Vec<usize>,
    preimage: Vec<Option<usize>>,
}

impl Extension {
    /// Checks that `embed` is an injective homomorphism, `proj` a surjective
    /// one, and that the image of the first is the kernel of the second.
    pub fn new(
        total: Arc<FiniteMla>,
        kernel: Arc<FiniteMla>,
        quotient: Arc<FiniteMla>,
        embed: Vec<usize>,
        proj: Vec<usize>,
    ) -> Result<Self> {
        if !is_homomorphism(&kernel, &total, &embed)? {
            return Err(MlaError::NotExact("kernel map is not a homomorphism".into()));
        }
        if !is_homomorphism(&total, &quotient, &proj)? {
            return Err(MlaError::NotExact("projection is not a homomorphism".into()));
        }
        let mut preimage = vec![None; total.order()];
        for (a, &e) in embed.iter().enumerate() {
            if preimage[e].replace(a).is_some() {
                return Err(MlaError::NotExact("kernel map is not injective".into()));
            }
        }
        let hit = Subset::from_indices(quotient.order(), proj.iter().copied());
        if !hit.is_full() {
            return Err(MlaError::NotExact("projection is not surjective".into()));
        }
        if let Some(e) = total
            .elements()
            .find(|&e| (proj[e] == 0) != preimage[e].is_some())
        {
            return Err(MlaError::NotExact(format!(
                "element {e} breaks image = kernel"
            )));
        }
        Ok(Extension {
            total,
            kernel,
            quotient,
            embed,
            proj,
            preimage,
        })
    }

    /// The extension `I ↣ A ↠ A/I` of an ideal, with `I` relabelled in
    /// ascending index order and cosets numbered by least element.
    pub fn from_ideal(total: Arc<FiniteMla>, ideal: &Subset) -> Result<Self> {
        if !is_ideal(&total, ideal) {
            return Err(MlaError::NotAnIdeal(format!("{ideal:?}")));
        }
        let (kernel, embed) = crate::algebra::subalgebra(&total, ideal)?;
        let q = quotient(&total, ideal)?;
        Extension::new(
            total,
            Arc::new(kernel),
            Arc::new(q.quotient),
            embed,
            q.projection,
        )
    }

    pub fn kernel_subset(&self) -> Subset {
        Subset::from_indices(self.total.order(), self.embed.iter().copied())
    }

    /// `i⁻¹(e)` when `e` lies in the embedded kernel.
    #[inline]
    pub fn preimage(&self, e: usize) -> Option<usize> {
        self.preimage[e]
    }

    /// Least element of each fibre.
    pub fn canonical_section(&self) -> Section {
        let mut lift = vec![usize::MAX; self.quotient.order()];
        for e in self.total.elements().rev() {
            lift[self.proj[e]] = e;
        }
        Section { lift }
    }

    /// Validates an arbitrary lift table.
    pub fn section(&self, lift: Vec<usize>) -> Result<Section> {
        if lift.len() != self.quotient.order() {
            return Err(MlaError::SizeMismatch {
                expected: self.quotient.order(),
                found: lift.len(),
            });
        }
        if lift[0] != 0 {
            return Err(MlaError::Format("a section must send 1 to 1".into()));
        }
        if let Some(x) = (0..lift.len()).find(|&x| lift[x] >= self.total.order() || self.proj[lift[x]] != x) {
            return Err(MlaError::Format(format!("lift of {x} is not in its fibre")));
        }
        Ok(Section { lift })
    }

    /// All sections, in lexicographic order of their lift tables.
    pub fn all_sections(&self) -> Vec<Section> {
        let nq = self.quotient.order();
        let fibres: Vec<Vec<usize>> = (0..nq)
            .map(|x| self.total.elements().filter(|&e| self.proj[e] == x).collect())
            .collect();
        let mut out = vec![vec![0usize]];
        for fibre in fibres.iter().skip(1) {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    fibre.iter().map(move |&e| {
                        let mut p = prefix.clone();
                        p.push(e);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(|lift| Section { lift }).collect()
    }
}

/// A set-theoretic lift `Q → A` with `l(1) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Section {
    lift: Vec<usize>,
}

impl Section {
    #[inline]
    pub fn lift(&self, x: usize) -> usize {
        self.lift[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.lift
    }
}

/// The action terms `χ = {σ, τ, ν}` of a datum `(Q, I)`.
///
/// `sigma[x·|I| + a] = σ_x(a)`, and likewise for `tau` and `nu`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionTerms {
    pub q: Arc<FiniteMla>,
    pub i: Arc<FiniteMla>,
    sigma: Vec<usize>,
    tau: Vec<usize>,
    nu: Vec<usize>,
}

impl ActionTerms {
    /// Checks table sizes and `τ_x(1) = ν_x(1) = 1`. Whether each `σ_x` is an
    /// automorphism is left to the compatibility check, which reports it.
    pub fn new(
        q: Arc<FiniteMla>,
        i: Arc<FiniteMla>,
        sigma: Vec<usize>,
        tau: Vec<usize>,
        nu: Vec<usize>,
    ) -> Result<Self> {
        let (nq, ni) = (q.order(), i.order());
        for t in [&sigma, &tau, &nu] {
            if t.len() != nq * ni {
                return Err(MlaError::SizeMismatch {
                    expected: nq * ni,
                    found: t.len(),
                });
            }
            if let Some(&v) = t.iter().find(|&&v| v >= ni) {
                return Err(MlaError::SizeMismatch {
                    expected: ni,
                    found: v,
                });
            }
        }
        for (name, t) in [("tau", &tau), ("nu", &nu)] {
            if let Some(x) = (0..nq).find(|&x| t[x * ni] != 0) {
                return Err(MlaError::NotNormalized {
                    table: name,
                    witness: vec![x, 0],
                });
            }
        }
        Ok(ActionTerms {
            q,
            i,
            sigma,
            tau,
            nu,
        })
    }

    /// `σ ≡ id`, `τ ≡ ν ≡ 1`.
    pub fn trivial(q: Arc<FiniteMla>, i: Arc<FiniteMla>) -> Self {
        let (nq, ni) = (q.order(), i.order());
        let sigma = (0..nq * ni).map(|k| k % ni).collect();
        ActionTerms {
            q,
            i,
            sigma,
            tau: vec![0; nq * ni],
            nu: vec![0; nq * ni],
        }
    }

    /// Builds tables from closures.
    pub fn from_fn(
        q: Arc<FiniteMla>,
        i: Arc<FiniteMla>,
        sigma: impl Fn(usize, usize) -> usize,
        tau: impl Fn(usize, usize) -> usize,
        nu: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let (nq, ni) = (q.order(), i.order());
        let tab = |f: &dyn Fn(usize, usize) -> usize| (0..nq * ni).map(|k| f(k / ni, k % ni)).collect();
        let (s, t, n) = (tab(&sigma), tab(&tau), tab(&nu));
        ActionTerms::new(q, i, s, t, n)
    }

    pub fn nq(&self) -> usize {
        self.q.order()
    }

    pub fn ni(&self) -> usize {
        self.i.order()
    }

    #[inline]
    pub fn sigma(&self, x: usize, a: usize) -> usize {
        self.sigma[x * self.i.order() + a]
    }

    #[inline]
    pub fn tau(&self, x: usize, a: usize) -> usize {
        self.tau[x * self.i.order() + a]
    }

    #[inline]
    pub fn nu(&self, x: usize, a: usize) -> usize {
        self.nu[x * self.i.order() + a]
    }

    pub fn sigma_table(&self) -> &[usize] {
        &self.sigma
    }

    pub fn tau_table(&self) -> &[usize] {
        &self.tau
    }

    pub fn nu_table(&self) -> &[usize] {
        &self.nu
    }

    /// Concatenated `σ, τ, ν` tables; the tie-break key for representatives.
    pub fn key(&self) -> Vec<usize> {
        [self.sigma.as_slice(), &self.tau, &self.nu].concat()
    }

    pub fn is_trivial(&self) -> bool {
        let ni = self.ni();
        self.sigma.iter().enumerate().all(|(k, &v)| v == k % ni)
            && self.tau.iter().all(|&v| v == 0)
            && self.nu.iter().all(|&v| v == 0)
    }

    /// True when every `σ_x` is an automorphism of `I`.
    pub fn sigma_is_automorphic(&self) -> bool {
        let ni = self.ni();
        (0..self.nq()).all(|x| {
            let row = &self.sigma[x * ni..(x + 1) * ni];
            let image = Subset::from_indices(ni, row.iter().copied());
            image.is_full() && is_homomorphism(&self.i, &self.i, row).unwrap_or(false)
        })
    }
}

/// Factor sets `T, T_f : Q × Q → I`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorSet {
    nq: usize,
    t: Vec<usize>,
    tf: Vec<usize>,
}

impl FactorSet {
    /// Checks `T(x,1) = T(1,x) = 1` and `T_f(x,x) = T_f(x,1) = T_f(1,x) = 1`.
    pub fn new(nq: usize, t: Vec<usize>, tf: Vec<usize>) -> Result<Self> {
        for v in [&t, &tf] {
            if v.len() != nq * nq {
                return Err(MlaError::SizeMismatch {
                    expected: nq * nq,
                    found: v.len(),
                });
            }
        }
        for x in 0..nq {
            if t[x * nq] != 0 || t[x] != 0 {
                return Err(MlaError::NotNormalized {
                    table: "T",
                    witness: vec![x],
                });
            }
            if tf[x * nq] != 0 || tf[x] != 0 || tf[x * nq + x] != 0 {
                return Err(MlaError::NotNormalized {
                    table: "T_f",
                    witness: vec![x],
                });
            }
        }
        Ok(FactorSet { nq, t, tf })
    }

    pub fn zero(nq: usize) -> Self {
        FactorSet {
            nq,
            t: vec![0; nq * nq],
            tf: vec![0; nq * nq],
        }
    }

    pub(crate) fn from_tables_unchecked(nq: usize, t: Vec<usize>, tf: Vec<usize>) -> Self {
        FactorSet { nq, t, tf }
    }

    pub fn nq(&self) -> usize {
        self.nq
    }

    #[inline]
    pub fn t(&self, x: usize, y: usize) -> usize {
        self.t[x * self.nq + y]
    }

    #[inline]
    pub fn tf(&self, x: usize, y: usize) -> usize {
        self.tf[x * self.nq + y]
    }

    pub fn t_table(&self) -> &[usize] {
        &self.t
    }

    pub fn tf_table(&self) -> &[usize] {
        &self.tf
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().chain(self.tf.iter()).all(|&v| v == 0)
    }

    /// Applies `f` to every value.
    pub fn map_values(&self, f: impl Fn(usize) -> usize) -> FactorSet {
        FactorSet {
            nq: self.nq,
            t: self.t.iter().map(|&v| f(v)).collect(),
            tf: self.tf.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination with another factor set over the same `Q`.
    pub fn zip_with(&self, other: &FactorSet, f: impl Fn(usize, usize) -> usize) -> FactorSet {
        FactorSet {
            nq: self.nq,
            t: self.t.iter().zip(&other.t).map(|(&a, &b)| f(a, b)).collect(),
            tf: self.tf.iter().zip(&other.tf).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Concatenated `T, T_f`.
    pub fn key(&self) -> Vec<usize> {
        [self.t.as_slice(), &self.tf].concat()
    }
}

/// A nonabelian 2-cocycle `{T, T_f, σ, τ, ν}` appropriate to `(Q, I)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cocycle2 {
    pub action: ActionTerms,
    pub factors: FactorSet,
}

impl Cocycle2 {
    pub fn new(action: ActionTerms, factors: FactorSet) -> Result<Self> {
        if factors.nq() != action.nq() {
            return Err(MlaError::SizeMismatch {
                expected: action.nq(),
                found: factors.nq(),
            });
        }
        if let Some(&v) = factors.t.iter().chain(&factors.tf).find(|&&v| v >= action.ni()) {
            return Err(MlaError::SizeMismatch {
                expected: action.ni(),
                found: v,
            });
        }
        Ok(Cocycle2 { action, factors })
    }

    pub fn q(&self) -> &Arc<FiniteMla> {
        &self.action.q
    }

    pub fn i(&self) -> &Arc<FiniteMla> {
        &self.action.i
    }

    #[inline]
    pub fn t(&self, x: usize, y: usize) -> usize {
        self.factors.t(x, y)
    }

    #[inline]
    pub fn tf(&self, x: usize, y: usize) -> usize {
        self.factors.tf(x, y)
    }

    #[inline]
    pub fn sigma(&self, x: usize, a: usize) -> usize {
        self.action.sigma(x, a)
    }

    #[inline]
    pub fn tau(&self, x: usize, a: usize) -> usize {
        self.action.tau(x, a)
    }

    #[inline]
    pub fn nu(&self, x: usize, a: usize) -> usize {
        self.action.nu(x, a)
    }

    /// Concatenated `T, T_f, σ, τ, ν`: the lexicographic tie-break key.
    pub fn key(&self) -> Vec<usize> {
        [self.factors.key(), self.action.key()].concat()
    }

    /// Product of `⟨a,x⟩` and `⟨b,y⟩` in `I ⋊_T Q`.
    pub fn pair_mul(&self, (a, x): (usize, usize), (b, y): (usize, usize)) -> (usize, usize) {
        let (i, q) = (self.i(), self.q());
        (
            i.mul(i.mul(a, self.sigma(x, b)), self.t(x, y)),
            q.mul(x, y),
        )
    }

    /// Bracket of `⟨a,x⟩` and `⟨b,y⟩` in `I ⋊_T Q`:
    /// `⟨τ_x(b)^a·{a,b}·b·a·T_f(x,y)·σ_{{x,y}}(a⁻¹·ν_y(a)·b⁻¹), {x,y}⟩`.
    pub fn pair_bracket(&self, (a, x): (usize, usize), (b, y): (usize, usize)) -> (usize, usize) {
        let (i, q) = (self.i(), self.q());
        let u = q.bracket(x, y);
        let inner = i.product(&[i.inv(a), self.nu(y, a), i.inv(b)]);
        (
            i.product(&[
                i.conj(self.tau(x, b), a),
                i.bracket(a, b),
                b,
                a,
                self.tf(x, y),
                self.sigma(u, inner),
            ]),
            u,
        )
    }

    /// `⟨a,x⟩⁻¹ = ⟨σ_{x⁻¹}(T(x,x⁻¹)⁻¹·a⁻¹), x⁻¹⟩`.
    pub fn pair_inverse(&self, (a, x): (usize, usize)) -> (usize, usize) {
        let (i, q) = (self.i(), self.q());
        let xi = q.inv(x);
        (
            self.sigma(xi, i.mul(i.inv(self.t(x, xi)), i.inv(a))),
            xi,
        )
    }
}

/// The crossed product `I ⋊_T Q` together with its canonical extension.
///
/// `⟨a,x⟩` is stored at index `x·|I| + a`, so `i(a) = ⟨a,1⟩` is index `a` and
/// the canonical section `l(x) = ⟨1,x⟩` is index `x·|I|`.
#[derive(Debug, Clone)]
pub struct CrossedProduct {
    pub algebra: Arc<FiniteMla>,
    pub extension: Extension,
    ni: usize,
}

impl CrossedProduct {
    #[inline]
    pub fn index(&self, a: usize, x: usize) -> usize {
        x * self.ni + a
    }

    #[inline]
    pub fn pair(&self, e: usize) -> (usize, usize) {
        (e % self.ni, e / self.ni)
    }
}

fn crossed_tables(c: &Cocycle2) -> (usize, Vec<usize>, Vec<usize>) {
    let (ni, nq) = (c.i().order(), c.q().order());
    let n = ni * nq;
    let mut mul = vec![0; n * n];
    let mut br = vec![0; n * n];
    for e in 0..n {
        let p = (e % ni, e / ni);
        for f in 0..n {
            let r = (f % ni, f / ni);
            let (a, x) = c.pair_mul(p, r);
            mul[e * n + f] = x * ni + a;
            let (a, x) = c.pair_bracket(p, r);
            br[e * n + f] = x * ni + a;
        }
    }
    (n, mul, br)
}

/// Builds `I ⋊_T Q` and validates it; an incompatible cocycle yields
/// [`MlaError::Incompatible`] with the violated laws and witnesses.
pub fn build_crossed_product(c: &Cocycle2, max_order: usize) -> Result<CrossedProduct> {
    let (ni, nq) = (c.i().order(), c.q().order());
    let limit = max_order.min(crate::MAX_ORDER);
    if ni * nq > limit {
        return Err(MlaError::OrderOverflow {
            order: ni * nq,
            limit,
        });
    }
    let (n, mul, br) = crossed_tables(c);
    let algebra = FiniteMla::from_flat(None, n, mul, br).map_err(MlaError::Incompatible)?;
    // Cross-check the closed-form inverse against the table.
    for e in 0..n {
        let (a, x) = c.pair_inverse((e % ni, e / ni));
        if x * ni + a != algebra.inv(e) {
            return Err(MlaError::Incompatible(ValidationReport {
                violations: vec![Violation {
                    law: Law::InverseFormula,
                    witness: vec![e % ni, e / ni],
                    detail: format!("formula gives {}, table gives {}", x * ni + a, algebra.inv(e)),
                }],
            }));
        }
    }
    let algebra = Arc::new(algebra);
    let extension = Extension::new(
        algebra.clone(),
        c.i().clone(),
        c.q().clone(),
        (0..ni).collect(),
        (0..n).map(|e| e / ni).collect(),
    )
    .map_err(|e| {
        MlaError::Incompatible(ValidationReport {
            violations: vec![Violation {
                law: Law::Shape,
                witness: vec![],
                detail: e.to_string(),
            }],
        })
    })?;
    Ok(CrossedProduct {
        algebra,
        extension,
        ni,
    })
}

/// Compatibility report: empty exactly when `I ⋊_T Q` is a valid algebra.
pub fn check_compatibility(c: &Cocycle2) -> ValidationReport {
    match build_crossed_product(c, crate::MAX_ORDER) {
        Ok(_) => ValidationReport::default(),
        Err(MlaError::Incompatible(r)) => r,
        Err(e) => ValidationReport {
            violations: vec![Violation {
                law: Law::Shape,
                witness: vec![],
                detail: e.to_string(),
            }],
        },
    }
}

pub fn is_compatible(c: &Cocycle2) -> bool {
    check_compatibility(c).is_valid()
}

/// Reads `{T, T_f, σ, τ, ν}` off an extension through a section.
pub fn extract_cocycle(ext: &Extension, s: &Section) -> Result<Cocycle2> {
    let (a, q) = (&ext.total, &ext.quotient);
    let (nq, ni) = (q.order(), ext.kernel.order());
    let pre = |e: usize, what: &str| {
        ext.preimage(e).ok_or_else(|| MlaError::KernelEscape {
            context: what.to_string(),
            value: e,
        })
    };
    let l = |x| s.lift(x);
    let mut t = vec![0; nq * nq];
    let mut tf = vec![0; nq * nq];
    for x in 0..nq {
        for y in 0..nq {
            let v = a.mul(a.mul(l(x), l(y)), a.inv(l(q.mul(x, y))));
            t[x * nq + y] = pre(v, "T")?;
            let v = a.mul(a.bracket(l(x), l(y)), a.inv(l(q.bracket(x, y))));
            tf[x * nq + y] = pre(v, "T_f")?;
        }
    }
    let mut sigma = vec![0; nq * ni];
    let mut tau = vec![0; nq * ni];
    let mut nu = vec![0; nq * ni];
    for x in 0..nq {
        for b in 0..ni {
            let e = ext.embed[b];
            sigma[x * ni + b] = pre(a.conj(e, l(x)), "sigma")?;
            tau[x * ni + b] = pre(a.bracket(l(x), e), "tau")?;
            nu[x * ni + b] = pre(a.bracket(e, l(x)), "nu")?;
        }
    }
    let action = ActionTerms::new(q.clone(), ext.kernel.clone(), sigma, tau, nu)?;
    Cocycle2::new(action, FactorSet::new(nq, t, tf)?)
}

/// The isomorphism `A → I ⋊_T Q`, `e ↦ ⟨i⁻¹(e·l(π(e))⁻¹), π(e)⟩`, where `T`
/// is the cocycle extracted through `s`.
pub fn roundtrip_map(ext: &Extension, s: &Section) -> Result<Vec<usize>> {
    let a = &ext.total;
    let ni = ext.kernel.order();
    a.elements()
        .map(|e| {
            let x = ext.proj[e];
            let k = a.mul(e, a.inv(s.lift(x)));
            ext.preimage(k)
                .map(|b| x * ni + b)
                .ok_or(MlaError::KernelEscape {
                    context: "roundtrip".into(),
                    value: k,
                })
        })
        .collect()
}

/// Searches for `h : Q → I`, `h(1) = 1`, such that `⟨a,x⟩ ↦ ⟨a·h(x), x⟩` is an
/// isomorphism `I ⋊_T Q → I ⋊_{T'} Q` commuting with the sequences. Returns
/// the lexicographically first witness.
///
/// The conditions are checked directly on the tables: conjugation, the two
/// bracket actions, the group factor set and the bracket factor set.
pub fn cocycles_equivalent(c: &Cocycle2, d: &Cocycle2, max_candidates: u64) -> Result<Option<Vec<usize>>> {
    if c.q().order() != d.q().order() || c.i().order() != d.i().order() {
        return Err(MlaError::SizeMismatch {
            expected: c.q().order() * c.i().order(),
            found: d.q().order() * d.i().order(),
        });
    }
    let (i, q) = (c.i().as_ref(), c.q().as_ref());
    let (nq, ni) = (q.order(), i.order());

    // Per-point conditions only involve h(x).
    let mut allowed: Vec<Vec<usize>> = Vec::with_capacity(nq);
    allowed.push(vec![0]);
    for x in 1..nq {
        let ok: Vec<usize> = (0..ni)
            .filter(|&h| {
                (0..ni).all(|a| {
                    c.sigma(x, a) == i.conj(d.sigma(x, a), h)
                        && c.tau(x, a) == i.mul(i.conj(d.tau(x, a), h), i.bracket(h, a))
                        && c.nu(x, a) == i.mul(i.bracket(a, h), i.conj(d.nu(x, a), h))
                })
            })
            .collect();
        if ok.is_empty() {
            return Ok(None);
        }
        allowed.push(ok);
    }
    let space: u128 = allowed.iter().map(|v| v.len() as u128).product();
    if space > max_candidates as u128 {
        return Err(MlaError::SearchBound {
            what: "cocycle equivalence",
            explored: space,
            limit: max_candidates,
        });
    }

    let pair_ok = |h: &[usize], x: usize, y: usize| -> bool {
        let (hx, hy) = (h[x], h[y]);
        let lhs = i.mul(c.t(x, y), h[q.mul(x, y)]);
        let rhs = i.product(&[hx, d.sigma(x, hy), d.t(x, y)]);
        if lhs != rhs {
            return false;
        }
        let u = q.bracket(x, y);
        let lhs = i.mul(c.tf(x, y), h[u]);
        let inner = i.product(&[i.inv(hx), d.nu(y, hx), i.inv(hy)]);
        let rhs = i.product(&[
            i.conj(d.tau(x, hy), hx),
            i.bracket(hx, hy),
            hy,
            hx,
            d.tf(x, y),
            d.sigma(u, inner),
        ]);
        lhs == rhs
    };

    fn go(
        k: usize,
        h: &mut Vec<usize>,
        allowed: &[Vec<usize>],
        q: &FiniteMla,
        pair_ok: &dyn Fn(&[usize], usize, usize) -> bool,
    ) -> bool {
        let nq = q.order();
        if k == nq {
            return true;
        }
        for &v in &allowed[k] {
            h[k] = v;
            // Check every pair whose cells are now all assigned and involve k.
            let ok = (0..=k).all(|x| {
                (0..=k).all(|y| {
                    let (p, b) = (q.mul(x, y), q.bracket(x, y));
                    let involved = x == k || y == k || p == k || b == k;
                    !involved || p > k || b > k || pair_ok(h, x, y)
                })
            });
            if ok && go(k + 1, h, allowed, q, pair_ok) {
                return true;
            }
        }
        false
    }

    let mut h = vec![0; nq];
    if go(1, &mut h, &allowed, q, &pair_ok) {
        Ok(Some(h))
    } else {
        Ok(None)
    }
}

/// Options for [`classify_extensions`].
#[derive(Debug, Clone)]
pub struct CensusOptions {
    /// Restrict to cocycles with exactly these action terms. Every extension
    /// class whose action terms are equivalent to them has such a member.
    pub action: Option<ActionTerms>,
    pub max_candidates: u64,
    pub max_order: usize,
}

impl CensusOptions {
    pub fn new(limits: &Limits) -> Self {
        CensusOptions {
            action: None,
            max_candidates: limits.max_candidates,
            max_order: limits.max_order,
        }
    }

    pub fn with_action(mut self, action: ActionTerms) -> Self {
        self.action = Some(action);
        self
    }
}

#[derive(Debug, Clone)]
pub struct CensusClass {
    /// Lexicographically least member.
    pub representative: Cocycle2,
    pub members: usize,
    /// Every enumerated member, sorted by key; the first is the representative.
    pub cocycles: Vec<Cocycle2>,
}

#[derive(Debug, Clone)]
pub struct Census {
    pub classes: Vec<CensusClass>,
    pub members_found: usize,
    pub nodes_explored: u64,
}

struct CensusSearch<'a> {
    q: &'a FiniteMla,
    i: &'a FiniteMla,
    auts: Vec<Vec<usize>>,
    fixed: Option<&'a ActionTerms>,
    q_arc: Arc<FiniteMla>,
    i_arc: Arc<FiniteMla>,
    sigma: Vec<usize>,
    t: Vec<Option<usize>>,
    tf: Vec<usize>,
    tau: Vec<Option<usize>>,
    nodes: u64,
    max_nodes: u64,
    max_order: usize,
    found: Vec<Cocycle2>,
}

impl CensusSearch<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(MlaError::SearchBound {
                what: "extension census",
                explored: self.nodes as u128,
                limit: self.max_nodes,
            });
        }
        Ok(())
    }

    fn sigma(&self, x: usize, a: usize) -> usize {
        self.sigma[x * self.i.order() + a]
    }

    // Stage 1: σ_x for x ≥ 1, σ_1 = id.
    fn choose_sigma(&mut self, x: usize) -> Result<()> {
        let (nq, ni) = (self.q.order(), self.i.order());
        if x == nq {
            return self.choose_t(0);
        }
        for k in 0..self.auts.len() {
            self.tick()?;
            let row = self.auts[k].clone();
            self.sigma[x * ni..(x + 1) * ni].copy_from_slice(&row);
            self.choose_sigma(x + 1)?;
        }
        Ok(())
    }

    fn t_cells(&self) -> Vec<(usize, usize)> {
        let nq = self.q.order();
        (1..nq).flat_map(|x| (1..nq).map(move |y| (x, y))).collect()
    }

    // Stage 2: T cell by cell, pruned by the group-layer cocycle laws.
    fn choose_t(&mut self, k: usize) -> Result<()> {
        let cells = self.t_cells();
        if k == cells.len() {
            return self.choose_tf(0);
        }
        let (x, y) = cells[k];
        let (nq, ni) = (self.q.order(), self.i.order());
        for v in 0..ni {
            self.tick()?;
            self.t[x * nq + y] = Some(v);
            if self.t_consistent(x, y) {
                self.choose_t(k + 1)?;
            }
        }
        self.t[x * nq + y] = None;
        Ok(())
    }

    fn t_consistent(&self, x: usize, y: usize) -> bool {
        let (q, i) = (self.q, self.i);
        let nq = q.order();
        let t = |a: usize, b: usize| self.t[a * nq + b];
        let tv = t(x, y).unwrap();
        // σ_x σ_y (a) · T(x,y) = T(x,y) · σ_xy(a)
        let xy = q.mul(x, y);
        if !(0..i.order()).all(|a| i.mul(self.sigma(x, self.sigma(y, a)), tv) == i.mul(tv, self.sigma(xy, a))) {
            return false;
        }
        // T(a,b)·T(ab,c) = σ_a(T(b,c))·T(a,bc) once all four cells are known.
        for a in 0..nq {
            for b in 0..nq {
                for c in 0..nq {
                    let cells = [(a, b), (q.mul(a, b), c), (b, c), (a, q.mul(b, c))];
                    if !cells.contains(&(x, y)) {
                        continue;
                    }
                    let vals: Option<Vec<usize>> = cells.iter().map(|&(u, w)| t(u, w)).collect();
                    if let Some(v) = vals {
                        if i.mul(v[0], v[1]) != i.mul(self.sigma(a, v[2]), v[3]) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn tf_cells(&self) -> Vec<(usize, usize)> {
        let nq = self.q.order();
        let mut cells = Vec::new();
        for x in 1..nq {
            for y in x + 1..nq {
                cells.push((x, y));
                cells.push((y, x));
            }
        }
        cells
    }

    // Stage 3: T_f, with {l(x),l(y)}·{l(y),l(x)} = 1 checked per pair.
    fn choose_tf(&mut self, k: usize) -> Result<()> {
        let cells = self.tf_cells();
        if k == cells.len() {
            return self.choose_tau(0);
        }
        let (x, y) = cells[k];
        let (q, i) = (self.q, self.i);
        let nq = q.order();
        for v in 0..i.order() {
            self.tick()?;
            self.tf[x * nq + y] = v;
            if x > y {
                let u = q.bracket(y, x);
                let w = q.bracket(x, y);
                let prod = i.product(&[
                    self.tf[y * nq + x],
                    self.sigma(u, v),
                    self.t[u * nq + w].unwrap(),
                ]);
                if prod != 0 {
                    continue;
                }
            }
            self.choose_tf(k + 1)?;
        }
        self.tf[x * nq + y] = 0;
        Ok(())
    }

    fn tau_cells(&self) -> usize {
        if self.fixed.is_some() {
            0
        } else {
            (self.q.order() - 1) * (self.i.order() - 1)
        }
    }

    // Stage 4: τ_x(a), constrained by τ_x(ab) = τ_x(a)·τ_x(b)^a; ν = τ⁻¹.
    fn choose_tau(&mut self, k: usize) -> Result<()> {
        if k == self.tau_cells() {
            return self.leaf();
        }
        let ni = self.i.order();
        let (x, a) = (1 + k / (ni - 1), 1 + k % (ni - 1));
        for v in 0..ni {
            self.tick()?;
            self.tau[x * ni + a] = Some(v);
            if self.tau_consistent(x, a) {
                self.choose_tau(k + 1)?;
            }
        }
        self.tau[x * ni + a] = None;
        Ok(())
    }

    fn tau_consistent(&self, x: usize, c: usize) -> bool {
        let i = self.i;
        let ni = i.order();
        let tau = |a: usize| self.tau[x * ni + a];
        for a in 0..ni {
            for b in 0..ni {
                let ab = i.mul(a, b);
                if a != c && b != c && ab != c {
                    continue;
                }
                if let (Some(ta), Some(tb), Some(tab)) = (tau(a), tau(b), tau(ab)) {
                    if tab != i.mul(ta, i.conj(tb, a)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn leaf(&mut self) -> Result<()> {
        let nq = self.q.order();
        let action = match self.fixed {
            Some(chi) => chi.clone(),
            None => {
                let tau: Vec<usize> = self.tau.iter().map(|v| v.unwrap()).collect();
                let nu: Vec<usize> = tau.iter().map(|&v| self.i.inv(v)).collect();
                ActionTerms::new(self.q_arc.clone(), self.i_arc.clone(), self.sigma.clone(), tau, nu)?
            }
        };
        let t: Vec<usize> = self.t.iter().map(|v| v.unwrap()).collect();
        let factors = FactorSet::from_tables_unchecked(nq, t, self.tf.clone());
        let c = Cocycle2 { action, factors };
        match build_crossed_product(&c, self.max_order) {
            Ok(_) => self.found.push(c),
            Err(MlaError::Incompatible(_)) => {}
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

/// Enumerates every compatible normalized cocycle of `(Q, I)` and groups them
/// into equivalence classes. Classes are sorted by their least member in the
/// lexicographic order of the concatenated tables.
pub fn classify_extensions(q: &Arc<FiniteMla>, i: &Arc<FiniteMla>, opts: &CensusOptions) -> Result<Census> {
    let (nq, ni) = (q.order(), i.order());
    if nq * ni > opts.max_order.min(crate::MAX_ORDER) {
        return Err(MlaError::OrderOverflow {
            order: nq * ni,
            limit: opts.max_order.min(crate::MAX_ORDER),
        });
    }
    let mut t = vec![None; nq * nq];
    for x in 0..nq {
        t[x] = Some(0);
        t[x * nq] = Some(0);
    }
    let mut tau = vec![None; nq * ni];
    for x in 0..nq {
        tau[x * ni] = Some(0);
    }
    for t in tau.iter_mut().take(ni) {
        *t = Some(0);
    }
    let identity: Vec<usize> = (0..ni).collect();
    let (auts, sigma) = match &opts.action {
        Some(chi) => {
            if chi.nq() != nq || chi.ni() != ni {
                return Err(MlaError::SizeMismatch {
                    expected: nq * ni,
                    found: chi.nq() * chi.ni(),
                });
            }
            (Vec::new(), chi.sigma_table().to_vec())
        }
        None => {
            let auts = automorphisms(i, crate::MAX_ORDER, opts.max_candidates as usize)?;
            let mut sigma = vec![0; nq * ni];
            sigma[..ni].copy_from_slice(&identity);
            (auts, sigma)
        }
    };
    let mut s = CensusSearch {
        q,
        i,
        auts,
        fixed: opts.action.as_ref(),
        q_arc: q.clone(),
        i_arc: i.clone(),
        sigma,
        t,
        tf: vec![0; nq * nq],
        tau,
        nodes: 0,
        max_nodes: opts.max_candidates,
        max_order: opts.max_order,
        found: Vec::new(),
    };
    if opts.action.is_some() {
        s.choose_t(0)?;
    } else {
        s.choose_sigma(1)?;
    }
    let nodes = s.nodes;
    let mut found = s.found;
    found.sort_by_key(|c| c.key());
    let members_found = found.len();

    let mut classes: Vec<CensusClass> = Vec::new();
    for c in found {
        let mut placed = false;
        for class in classes.iter_mut() {
            if cocycles_equivalent(&c, &class.representative, opts.max_candidates)?.is_some() {
                class.members += 1;
                class.cocycles.push(c.clone());
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(CensusClass {
                representative: c.clone(),
                members: 1,
                cocycles: vec![c],
            });
        }
    }
    Ok(Census {
        classes,
        members_found,
        nodes_explored: nodes,
    })
}

/// The element `e` written as the pair it corresponds to under `s`:
/// `(i⁻¹(e·l(π e)⁻¹), π e)`.
pub fn coordinates(ext: &Extension, s: &Section, e: usize) -> Option<(usize, usize)> {
    let a = &ext.total;
    let x = ext.proj[e];
    ext.preimage(a.mul(e, a.inv(s.lift(x)))).map(|b| (b, x))
}

/// Serializable view of a cocycle's tables (rows).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleTables {
    #[serde(rename = "T")]
    pub t: Vec<Vec<usize>>,
    #[serde(rename = "Tf")]
    pub tf: Vec<Vec<usize>>,
    pub sigma: Vec<Vec<usize>>,
    pub tau: Vec<Vec<usize>>,
    pub nu: Vec<Vec<usize>>,
}

impl From<&Cocycle2> for CocycleTables {
    fn from(c: &Cocycle2) -> Self {
        let (nq, ni) = (c.q().order(), c.i().order());
        let rows = |v: &[usize], w: usize| v.chunks(w).map(|r| r.to_vec()).collect::<Vec<_>>();
        CocycleTables {
            t: rows(c.factors.t_table(), nq),
            tf: rows(c.factors.tf_table(), nq),
            sigma: rows(c.action.sigma_table(), ni),
            tau: rows(c.action.tau_table(), ni),
            nu: rows(c.action.nu_table(), ni),
        }
    }
}
