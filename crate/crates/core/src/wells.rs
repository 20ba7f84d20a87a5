//! Compatible automorphism pairs, the Wells map and the exact sequence
//! `1 → Der(Q, ζ(I), χ_ζ) → Aut_I A → C(Q, I, χ) → H²(Q, ζ(I), χ_ζ)`.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{derivations, h2_group, H2Group};
use crate::algebra::{is_homomorphism, FiniteMla};
use crate::correspondence::{actions_equivalent, center_action, resection};
use crate::error::{MlaError, Result};
use crate::extension::{
    build_crossed_product, cocycles_equivalent, extract_cocycle, roundtrip_map, ActionTerms,
    Cocycle2, CrossedProduct, Extension, FactorSet,
};
use crate::iso::{automorphisms, compose, invert};
use crate::subset::Subset;
use crate::substructures::algebraic_center;
use crate::Limits;

/// A pair `(ω, κ) ∈ Aut I × Aut Q`, as index maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompatiblePair {
    pub omega: Vec<usize>,
    pub kappa: Vec<usize>,
}

impl CompatiblePair {
    pub fn identity(ni: usize, nq: usize) -> Self {
        CompatiblePair {
            omega: (0..ni).collect(),
            kappa: (0..nq).collect(),
        }
    }

    /// `self ∘ other`, componentwise.
    pub fn compose(&self, other: &CompatiblePair) -> CompatiblePair {
        CompatiblePair {
            omega: compose(&self.omega, &other.omega),
            kappa: compose(&self.kappa, &other.kappa),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.omega.iter().enumerate().all(|(k, &v)| k == v)
            && self.kappa.iter().enumerate().all(|(k, &v)| k == v)
    }
}

/// `σ^{(ω,κ)}_x = ω ∘ σ_{κ⁻¹(x)} ∘ ω⁻¹`, and likewise `τ, ν` with `ω` applied
/// after and `ω⁻¹` before.
pub fn pair_action_on_terms(chi: &ActionTerms, omega: &[usize], kappa: &[usize]) -> ActionTerms {
    let (wi, ki) = (invert(omega), invert(kappa));
    ActionTerms::from_fn(
        chi.q.clone(),
        chi.i.clone(),
        |x, a| omega[chi.sigma(ki[x], wi[a])],
        |x, a| omega[chi.tau(ki[x], wi[a])],
        |x, a| omega[chi.nu(ki[x], wi[a])],
    )
    .expect("automorphisms keep the tables normalized")
}

/// `T^{(ω,κ)}(x,y) = ω(T(κ⁻¹x, κ⁻¹y))` together with the transformed terms.
pub fn pair_action_on_cocycle(c: &Cocycle2, omega: &[usize], kappa: &[usize]) -> Cocycle2 {
    let nq = c.q().order();
    let ki = invert(kappa);
    let mut t = vec![0; nq * nq];
    let mut tf = vec![0; nq * nq];
    for x in 0..nq {
        for y in 0..nq {
            t[x * nq + y] = omega[c.t(ki[x], ki[y])];
            tf[x * nq + y] = omega[c.tf(ki[x], ki[y])];
        }
    }
    let factors = FactorSet::new(nq, t, tf).expect("automorphisms keep factor sets normalized");
    Cocycle2::new(pair_action_on_terms(&c.action, omega, kappa), factors).expect("same datum")
}

/// An automorphism of the total algebra that preserves the kernel, with its
/// image `ψ(φ) = (φ|_I, π ∘ φ ∘ l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelAutomorphism {
    pub map: Vec<usize>,
    pub psi: CompatiblePair,
}

/// Everything the Wells sequence is computed from, for one extension.
#[derive(Debug, Clone)]
pub struct WellsContext {
    pub ext: Extension,
    /// The cocycle read through the canonical section.
    pub cocycle: Cocycle2,
    pub chi_z: ActionTerms,
    /// `ζ(I)` index ↦ `I` index.
    pub z_embed: Vec<usize>,
    pub h2: H2Group,
    pub aut_i: Vec<Vec<usize>>,
    pub aut_q: Vec<Vec<usize>>,
    cp: CrossedProduct,
    /// `E → I ⋊_T Q` and back.
    rho: Vec<usize>,
    rho_inv: Vec<usize>,
    limits: Limits,
}

impl WellsContext {
    pub fn new(ext: &Extension, limits: &Limits) -> Result<Self> {
        Self::with_section(ext, &ext.canonical_section(), limits)
    }

    /// Reads `T` through the section `s` instead of the canonical one.
    pub fn with_section(ext: &Extension, s: &crate::extension::Section, limits: &Limits) -> Result<Self> {
        let cocycle = extract_cocycle(ext, s)?;
        let (chi_z, z_embed) = center_action(&cocycle.action)?;
        let h2 = h2_group(&chi_z, limits.max_candidates)?;
        let cap = limits.max_pairs as usize;
        let aut_i = automorphisms(&ext.kernel, crate::MAX_ORDER, cap)?;
        let aut_q = automorphisms(&ext.quotient, crate::MAX_ORDER, cap)?;
        let pairs = aut_i.len() as u128 * aut_q.len() as u128;
        if pairs > limits.max_pairs as u128 {
            return Err(MlaError::SearchBound {
                what: "automorphism pairs",
                explored: pairs,
                limit: limits.max_pairs,
            });
        }
        let cp = build_crossed_product(&cocycle, limits.max_order)?;
        let rho = roundtrip_map(ext, s)?;
        let rho_inv = invert(&rho);
        Ok(WellsContext {
            ext: ext.clone(),
            cocycle,
            chi_z,
            z_embed,
            h2,
            aut_i,
            aut_q,
            cp,
            rho,
            rho_inv,
            limits: *limits,
        })
    }

    fn nq(&self) -> usize {
        self.ext.quotient.order()
    }

    /// Transports a map on `I ⋊_T Q` (pair coordinates) to the total algebra.
    fn transport(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Vec<usize> {
        self.ext
            .total
            .elements()
            .map(|e| {
                let (a, x) = self.cp.pair(self.rho[e]);
                let (b, y) = f(a, x);
                self.rho_inv[self.cp.index(b, y)]
            })
            .collect()
    }

    /// `C(Q, I, χ)`: pairs with `χ^{(ω,κ)} ~ χ`, in lexicographic order.
    pub fn compatible_pairs(&self) -> Result<Vec<CompatiblePair>> {
        let chi = &self.cocycle.action;
        let candidates: Vec<CompatiblePair> = self
            .aut_i
            .iter()
            .flat_map(|w| {
                self.aut_q.iter().map(move |k| CompatiblePair {
                    omega: w.clone(),
                    kappa: k.clone(),
                })
            })
            .collect();
        let keep: Vec<bool> = candidates
            .par_iter()
            .map(|p| {
                actions_equivalent(&pair_action_on_terms(chi, &p.omega, &p.kappa), chi).map(|h| h.is_some())
            })
            .collect::<Result<_>>()?;
        let mut out: Vec<CompatiblePair> = candidates
            .into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect();
        out.sort();
        let set: HashSet<&CompatiblePair> = out.iter().collect();
        for a in &out {
            for b in &out {
                if !set.contains(&a.compose(b)) {
                    return Err(MlaError::IllDefined("compatible pairs are not closed under composition".into()));
                }
            }
        }
        Ok(out)
    }

    /// The re-sectioned cocycle `T^t` with action terms exactly `χ^{(ω,κ)}`,
    /// the transformed `T^{(ω,κ)}`, and the re-sectioning witness `h`.
    fn aligned(&self, pair: &CompatiblePair) -> Result<(Cocycle2, Cocycle2, Vec<usize>)> {
        let moved = pair_action_on_cocycle(&self.cocycle, &pair.omega, &pair.kappa);
        let h = actions_equivalent(&moved.action, &self.cocycle.action)?
            .ok_or_else(|| MlaError::HypothesisFailed("the pair is not compatible".into()))?;
        let tt = resection(&self.cocycle, &h)?;
        if tt.action != moved.action {
            return Err(MlaError::IllDefined("re-sectioning did not reach the transformed action terms".into()));
        }
        Ok((tt, moved, h))
    }

    /// `W_T(ω,κ)`: the class of `T^{(ω,κ)⁻¹}·T^t` in `H²(Q, ζ(I), χ_ζ)`.
    pub fn wells_class(&self, pair: &CompatiblePair) -> Result<usize> {
        let (tt, moved, _) = self.aligned(pair)?;
        let i = self.ext.kernel.as_ref();
        let center = algebraic_center(i);
        let diff = moved.factors.zip_with(&tt.factors, |a, b| i.mul(i.inv(a), b));
        if let Some(v) = diff.key().into_iter().find(|&v| !center.contains(v)) {
            return Err(MlaError::ImageNotCentral { witness: vec![v] });
        }
        let mut back = vec![usize::MAX; i.order()];
        for (k, &e) in self.z_embed.iter().enumerate() {
            back[e] = k;
        }
        let s = diff.map_values(|v| back[v]);
        self.h2
            .class_of(&s)
            .ok_or_else(|| MlaError::IllDefined("the Wells difference is not a compatible factor set".into()))
    }

    /// For a pair with `W_T = 0`, the automorphism
    /// `⟨a,x⟩ ↦ ⟨ω(a)·k(κx)⁻¹·h(κx), κx⟩`, where `h` re-sections `T` to the
    /// transformed action terms and `k` witnesses `T^t ~ T^{(ω,κ)}`.
    /// Returns `None` when the pair has no lift of this shape.
    pub fn lift(&self, pair: &CompatiblePair) -> Result<Option<Vec<usize>>> {
        let (tt, moved, h) = self.aligned(pair)?;
        let Some(k) = cocycles_equivalent(&tt, &moved, self.limits.max_candidates)? else {
            return Ok(None);
        };
        let i = self.ext.kernel.as_ref();
        let map = self.transport(|a, x| {
            let y = pair.kappa[x];
            (i.product(&[pair.omega[a], i.inv(k[y]), h[y]]), y)
        });
        let a = self.ext.total.as_ref();
        let bijective = Subset::from_indices(map.len(), map.iter().copied()).is_full();
        if bijective && is_homomorphism(a, a, &map)? {
            Ok(Some(map))
        } else {
            Err(MlaError::IllDefined("the lifted map is not an automorphism".into()))
        }
    }

    /// `ψ(φ) = (φ|_I, π ∘ φ ∘ l)` through section `s`.
    pub fn psi_with(&self, phi: &[usize], s: &crate::extension::Section) -> Result<CompatiblePair> {
        let e = &self.ext;
        let omega: Vec<usize> = e
            .embed
            .iter()
            .map(|&v| e.preimage(phi[v]).ok_or(MlaError::KernelEscape { context: "psi".into(), value: phi[v] }))
            .collect::<Result<_>>()?;
        let kappa = (0..self.nq()).map(|x| e.proj[phi[s.lift(x)]]).collect();
        Ok(CompatiblePair { omega, kappa })
    }

    pub fn psi(&self, phi: &[usize]) -> Result<CompatiblePair> {
        self.psi_with(phi, &self.ext.canonical_section())
    }

    /// `Aut_I A`: automorphisms of the total algebra preserving the kernel,
    /// with `ψ` computed through the canonical section and checked against
    /// up to 16 other sections.
    pub fn aut_i_group(&self) -> Result<Vec<KernelAutomorphism>> {
        let a = self.ext.total.as_ref();
        let all = automorphisms(a, self.limits.max_aut_order, self.limits.max_pairs as usize)?;
        let kernel = self.ext.kernel_subset();
        let sections: Vec<_> = self.ext.all_sections().into_iter().take(16).collect();
        let mut out = Vec::new();
        for map in all {
            if !kernel.iter().all(|v| kernel.contains(map[v])) {
                continue;
            }
            let psi = self.psi(&map)?;
            for s in &sections {
                if self.psi_with(&map, s)? != psi {
                    return Err(MlaError::IllDefined("ψ depends on the section".into()));
                }
            }
            out.push(KernelAutomorphism { map, psi });
        }
        Ok(out)
    }

    /// `Der(Q, ζ(I), χ_ζ)`, as `ζ(I)`-indexed tables.
    pub fn center_derivations(&self) -> Result<Vec<Vec<usize>>> {
        derivations(&self.chi_z, self.limits.max_candidates)
    }

    /// `i(d)`: `⟨a,x⟩ ↦ ⟨a·d(x), x⟩`.
    pub fn derivation_automorphism(&self, d: &[usize]) -> Vec<usize> {
        let i = self.ext.kernel.as_ref();
        self.transport(|a, x| (i.mul(a, self.z_embed[d[x]]), x))
    }
}

/// Exactness verdicts for the Wells sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WellsReport {
    /// `|Der(Q,ζ(I),χ_ζ)|, |Aut_I A|, |C(Q,I,χ)|, |H²(Q,ζ(I),χ_ζ)|`.
    pub node_orders: [usize; 4],
    pub i_injective: bool,
    pub image_i_is_kernel_psi: bool,
    pub image_psi_is_kernel_w: bool,
    pub psi_is_homomorphism: bool,
    /// Kernel pairs of `W_T`, each lifted explicitly.
    pub kernel_pairs: usize,
    pub lifts_verified: usize,
    pub wells_classes: Vec<usize>,
}

impl WellsReport {
    pub fn passed(&self) -> bool {
        self.i_injective
            && self.image_i_is_kernel_psi
            && self.image_psi_is_kernel_w
            && self.psi_is_homomorphism
            && self.lifts_verified == self.kernel_pairs
    }
}

/// Builds all four nodes and the three maps and checks exactness exhaustively.
pub fn verify_wells(ext: &Extension, limits: &Limits) -> Result<WellsReport> {
    let ctx = WellsContext::new(ext, limits)?;
    let ders = ctx.center_derivations()?;
    let aut = ctx.aut_i_group()?;
    let pairs = ctx.compatible_pairs()?;

    let images: Vec<Vec<usize>> = ders.iter().map(|d| ctx.derivation_automorphism(d)).collect();
    let distinct: BTreeSet<&Vec<usize>> = images.iter().collect();
    let aut_maps: BTreeSet<&Vec<usize>> = aut.iter().map(|g| &g.map).collect();
    let i_injective = distinct.len() == images.len() && images.iter().all(|m| aut_maps.contains(m));

    let kernel_psi: BTreeSet<&Vec<usize>> = aut.iter().filter(|g| g.psi.is_identity()).map(|g| &g.map).collect();
    let image_i_is_kernel_psi = distinct == kernel_psi;

    let classes: Vec<usize> = pairs.iter().map(|p| ctx.wells_class(p)).collect::<Result<_>>()?;
    let kernel_w: BTreeSet<&CompatiblePair> = pairs.iter().zip(&classes).filter(|(_, &c)| c == 0).map(|(p, _)| p).collect();
    let image_psi: BTreeSet<&CompatiblePair> = aut.iter().map(|g| &g.psi).collect();
    let image_psi_is_kernel_w = image_psi == kernel_w;

    let mut lifts_verified = 0;
    for p in &kernel_w {
        if let Some(phi) = ctx.lift(p)? {
            if ctx.psi(&phi)? == **p && aut_maps.contains(&phi) {
                lifts_verified += 1;
            }
        }
    }

    let psi_is_homomorphism = aut.iter().all(|f| {
        aut.iter().all(|g| {
            let fg = compose(&f.map, &g.map);
            ctx.psi(&fg).map(|p| p == f.psi.compose(&g.psi)).unwrap_or(false)
        })
    });

    Ok(WellsReport {
        node_orders: [ders.len(), aut.len(), pairs.len(), ctx.h2.order()],
        i_injective,
        image_i_is_kernel_psi,
        image_psi_is_kernel_w,
        psi_is_homomorphism,
        kernel_pairs: kernel_w.len(),
        lifts_verified,
        wells_classes: classes,
    })
}

/// Stabilizer of an ideal series and its nilpotency class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesStabilizerReport {
    pub series_length: usize,
    pub stabilizer_order: usize,
    pub nilpotency_class: Option<usize>,
    pub bound_holds: bool,
}

/// Closure of a set of permutations under composition.
pub fn permutation_group(gens: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(g) = queue.pop() {
        for s in gens {
            let h = compose(s, &g);
            if seen.insert(h.clone()) {
                queue.push(h);
            }
        }
    }
    seen.into_iter().collect()
}

/// Nilpotency class of a permutation group via its lower central series;
/// `None` when the series stalls above the trivial group.
pub fn group_nilpotency_class(group: &[Vec<usize>], n: usize) -> Option<usize> {
    let mut current: Vec<Vec<usize>> = group.to_vec();
    let mut class = 0;
    while current.len() > 1 {
        let mut gens = Vec::new();
        for g in group {
            for h in &current {
                let c = compose(&compose(g, h), &compose(&invert(g), &invert(h)));
                gens.push(c);
            }
        }
        gens.sort();
        gens.dedup();
        let next = permutation_group(&gens, n);
        if next.len() == current.len() {
            return None;
        }
        current = next;
        class += 1;
    }
    Some(class)
}

/// Automorphisms `φ` with `φ(A_k) = A_k` and `φ(x)·x⁻¹ ∈ A_{k+1}` for
/// `x ∈ A_k`, where `series` lists `A_0 = A ▷ A_1 ▷ … ▷ A_n = 1`.
pub fn series_stabilizer_nilpotency(a: &FiniteMla, series: &[Subset], limits: &Limits) -> Result<SeriesStabilizerReport> {
    let n = series.len().saturating_sub(1);
    let ok_series = series.first().is_some_and(|s| s.is_full())
        && series.last().is_some_and(|s| s.is_trivial())
        && series.windows(2).all(|w| w[1].is_subset_of(&w[0]) && w[1] != w[0]);
    if !ok_series {
        return Err(MlaError::HypothesisFailed("not a strictly descending series from A to 1".into()));
    }
    let auts = automorphisms(a, limits.max_aut_order, limits.max_pairs as usize)?;
    let stab: Vec<Vec<usize>> = auts
        .into_iter()
        .filter(|phi| {
            series.windows(2).all(|w| {
                w[0].iter().all(|x| w[0].contains(phi[x]) && w[1].contains(a.mul(phi[x], a.inv(x))))
            })
        })
        .collect();
    let class = group_nilpotency_class(&stab, a.order());
    Ok(SeriesStabilizerReport {
        series_length: n,
        stabilizer_order: stab.len(),
        nilpotency_class: class,
        bound_holds: class.is_some_and(|c| c <= n.saturating_sub(1)),
    })
}
