//! Equivalence of action terms, restriction of action terms to closed
//! subalgebras, and the free and transitive action of `H²(Q, ζ(I), χ_ζ)` on
//! the extension classes realizing a fixed `χ`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{h2_group, H2Group};
use crate::algebra::subalgebra;
use crate::error::{MlaError, Result};
use crate::extension::{
    build_crossed_product, classify_extensions, cocycles_equivalent, extract_cocycle, ActionTerms,
    CensusClass, CensusOptions, Cocycle2, CocycleTables, Extension, FactorSet,
};
use crate::subset::Subset;
use crate::substructures::algebraic_center;
use crate::Limits;

/// Which commutator enters the `τ` condition of action equivalence.
///
/// Re-sectioning an extension produces the bracket `{h(x), a}`; the variant
/// with the group commutator `[h(x), a]` is kept for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauConvention {
    Bracket,
    GroupCommutator,
}

fn witness_ok(chi: &ActionTerms, other: &ActionTerms, x: usize, h: usize, conv: TauConvention) -> bool {
    let i = chi.i.as_ref();
    i.elements().all(|a| {
        let twist = match conv {
            TauConvention::Bracket => i.bracket(h, a),
            TauConvention::GroupCommutator => i.commutator(h, a),
        };
        chi.sigma(x, a) == i.conj(other.sigma(x, a), h)
            && chi.tau(x, a) == i.mul(i.conj(other.tau(x, a), h), twist)
            && chi.nu(x, a) == i.mul(i.bracket(a, h), i.conj(other.nu(x, a), h))
    })
}

/// Searches for `h : Q → I` with `σ_x(a) = h(x)·σ'_x(a)·h(x)⁻¹`,
/// `τ_x(a) = τ'_x(a)^{h(x)}·{h(x),a}` and `ν_x(a) = {a,h(x)}·ν'_x(a)^{h(x)}`.
///
/// The conditions are independent for each `x`, so the least admissible value
/// is taken pointwise. `h(1) = 1` whenever both sides are normalized.
pub fn actions_equivalent(chi: &ActionTerms, other: &ActionTerms) -> Result<Option<Vec<usize>>> {
    actions_equivalent_with(chi, other, TauConvention::Bracket)
}

pub fn actions_equivalent_with(
    chi: &ActionTerms,
    other: &ActionTerms,
    conv: TauConvention,
) -> Result<Option<Vec<usize>>> {
    if chi.nq() != other.nq() || chi.ni() != other.ni() {
        return Err(MlaError::SizeMismatch {
            expected: chi.nq() * chi.ni(),
            found: other.nq() * other.ni(),
        });
    }
    let mut h = Vec::with_capacity(chi.nq());
    for x in chi.q.elements() {
        match chi.i.elements().find(|&v| witness_ok(chi, other, x, v, conv)) {
            Some(v) => h.push(v),
            None => return Ok(None),
        }
    }
    Ok(Some(h))
}

/// Re-sections `I ⋊_c Q` along `t(x) = ⟨h(x), x⟩`. When `h` witnesses
/// `χ ~ χ_c`, the result carries exactly the action terms `χ`.
pub fn resection(c: &Cocycle2, h: &[usize]) -> Result<Cocycle2> {
    let cp = build_crossed_product(c, crate::MAX_ORDER)?;
    let lift: Vec<usize> = h.iter().enumerate().map(|(x, &v)| cp.index(v, x)).collect();
    let s = cp.extension.section(lift)?;
    extract_cocycle(&cp.extension, &s)
}

/// Closure of a subalgebra `B ≤ I` under `σ`, `τ` and `ν`.
pub fn closure_check(chi: &ActionTerms, b: &Subset) -> bool {
    chi.q.elements().all(|x| {
        b.iter().all(|a| {
            b.contains(chi.sigma(x, a)) && b.contains(chi.tau(x, a)) && b.contains(chi.nu(x, a))
        })
    })
}

/// `χ_B`: the action terms restricted to a closed subalgebra, together with
/// the embedding of `B` (relabelled in ascending order) into `I`.
pub fn restrict_action(chi: &ActionTerms, b: &Subset) -> Result<(ActionTerms, Vec<usize>)> {
    if !closure_check(chi, b) {
        return Err(MlaError::IllDefined(format!("{b:?} is not closed under the action terms")));
    }
    let (sub, embed) = subalgebra(&chi.i, b)?;
    let mut back = vec![usize::MAX; chi.ni()];
    for (k, &e) in embed.iter().enumerate() {
        back[e] = k;
    }
    let sub = Arc::new(sub);
    let restricted = ActionTerms::from_fn(
        chi.q.clone(),
        sub,
        |x, k| back[chi.sigma(x, embed[k])],
        |x, k| back[chi.tau(x, embed[k])],
        |x, k| back[chi.nu(x, embed[k])],
    )?;
    Ok((restricted, embed))
}

/// `χ_ζ` on the algebraic center of `I`.
pub fn center_action(chi: &ActionTerms) -> Result<(ActionTerms, Vec<usize>)> {
    restrict_action(chi, &algebraic_center(&chi.i))
}

/// One violated cell of the conditions tying a witness `S` to `χ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActViolation {
    /// 1, 2 or 3 for the conjugation, `τ` and `ν` conditions.
    pub condition: u8,
    pub x: usize,
    pub y: usize,
    pub a: usize,
}

/// Checks one value `s = S(x,y)` against the three conditions
/// `σ_x σ_y(a)·s = s·σ_{xy}(a)`,
/// `s·τ_{xy}(a) = σ_x(τ_y(a))·τ_x(a)·{s⁻¹, a^s}·s` and
/// `s·ν_{xy}(a) = {a^{s⁻¹}, s⁻¹}·ν_x(a)·σ_x(ν_y(a))·s`, where `a^s = s a s⁻¹`.
fn act_cell(chi: &ActionTerms, x: usize, y: usize, s: usize) -> Option<ActViolation> {
    let (q, i) = (chi.q.as_ref(), chi.i.as_ref());
    let xy = q.mul(x, y);
    let si = i.inv(s);
    for a in i.elements() {
        let v = |condition| Some(ActViolation { condition, x, y, a });
        if i.mul(chi.sigma(x, chi.sigma(y, a)), s) != i.mul(s, chi.sigma(xy, a)) {
            return v(1);
        }
        let rhs = i.product(&[chi.sigma(x, chi.tau(y, a)), chi.tau(x, a), i.bracket(si, i.conj(a, s)), s]);
        if i.mul(s, chi.tau(xy, a)) != rhs {
            return v(2);
        }
        let rhs = i.product(&[i.bracket(i.conj(a, si), si), chi.nu(x, a), chi.sigma(x, chi.nu(y, a)), s]);
        if i.mul(s, chi.nu(xy, a)) != rhs {
            return v(3);
        }
    }
    None
}

/// Every violated cell of the conditions for the table `s` (row-major).
pub fn act_violations(chi: &ActionTerms, s: &[usize]) -> Vec<ActViolation> {
    let nq = chi.nq();
    (0..nq * nq)
        .filter_map(|k| act_cell(chi, k / nq, k % nq, s[k]))
        .collect()
}

/// A class of action terms together with a witness `S : Q² → I`.
#[derive(Debug, Clone)]
pub struct ActionClass {
    pub representative: ActionTerms,
    pub witness_s: Option<Vec<usize>>,
}

impl ActionClass {
    /// Searches `S` cell by cell; the conditions do not couple cells.
    pub fn from_terms(chi: ActionTerms) -> Self {
        let nq = chi.nq();
        let witness_s = (0..nq * nq)
            .map(|k| chi.i.elements().find(|&s| act_cell(&chi, k / nq, k % nq, s).is_none()))
            .collect();
        ActionClass {
            representative: chi,
            witness_s,
        }
    }

    /// Uses the extracted group factor set as the witness.
    pub fn from_extension(ext: &Extension) -> Result<Self> {
        let c = extract_cocycle(ext, &ext.canonical_section())?;
        Ok(ActionClass {
            witness_s: Some(c.factors.t_table().to_vec()),
            representative: c.action,
        })
    }
}

/// `T ∗ S`: pointwise product of `T, T_f` with the embedded `S, S_f`.
pub fn act_h2_on_extension(c: &Cocycle2, s: &FactorSet, embed: &[usize]) -> Result<Cocycle2> {
    let i = c.i();
    let center = algebraic_center(i);
    if let Some(&v) = embed.iter().find(|&&v| !center.contains(v)) {
        return Err(MlaError::ImageNotCentral { witness: vec![v] });
    }
    let lifted = s.map_values(|v| embed[v]);
    let factors = c.factors.zip_with(&lifted, |a, b| i.mul(a, b));
    Cocycle2::new(c.action.clone(), factors)
}

/// Outcome of [`verify_correspondence`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub ext_classes: usize,
    pub h2_order: usize,
    pub h2_invariant_factors: Vec<usize>,
    pub center: Vec<usize>,
    /// `orbit_table[k][j]`: class of `T_k ∗ S_j`.
    pub orbit_table: Vec<Vec<usize>>,
    pub well_defined: bool,
    pub group_action: bool,
    pub free: bool,
    pub transitive: bool,
    /// For every pair of classes, `T_k⁻¹·T_l` is a `ζ(I)`-valued compatible
    /// factor set carrying `T_k` to `T_l`.
    pub central_difference: bool,
    pub representatives: Vec<CocycleTables>,
}

impl CorrespondenceReport {
    pub fn cardinalities_match(&self) -> bool {
        self.ext_classes == self.h2_order
    }

    pub fn passed(&self) -> bool {
        self.cardinalities_match()
            && self.well_defined
            && self.group_action
            && self.free
            && self.transitive
            && self.central_difference
    }
}

fn class_index(c: &Cocycle2, classes: &[CensusClass], max_candidates: u64) -> Result<Option<usize>> {
    for (k, class) in classes.iter().enumerate() {
        if cocycles_equivalent(c, &class.representative, max_candidates)?.is_some() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// The census of `Ext_χ(Q, I)`: every compatible cocycle with exactly the
/// action terms `χ`, grouped into classes.
pub fn ext_classes(chi: &ActionTerms, limits: &Limits) -> Result<Vec<CensusClass>> {
    let opts = CensusOptions::new(limits).with_action(chi.clone());
    Ok(classify_extensions(&chi.q, &chi.i, &opts)?.classes)
}

/// Exhaustive check that `H²(Q, ζ(I), χ_ζ)` acts freely and transitively on
/// `Ext_χ(Q, I)` through `∗`.
pub fn verify_correspondence(chi: &ActionTerms, limits: &Limits) -> Result<CorrespondenceReport> {
    let classes = ext_classes(chi, limits)?;
    if classes.is_empty() {
        return Err(MlaError::HypothesisFailed(
            "the action terms are not realized by any extension".into(),
        ));
    }
    let (chi_z, embed) = center_action(chi)?;
    let h2: H2Group = h2_group(&chi_z, limits.max_candidates)?;
    let mc = limits.max_candidates;
    let i = chi.i.clone();

    let star = |c: &Cocycle2, s: &FactorSet| -> Result<usize> {
        let moved = act_h2_on_extension(c, s, &embed)?;
        build_crossed_product(&moved, limits.max_order)?;
        class_index(&moved, &classes, mc)?
            .ok_or_else(|| MlaError::IllDefined("T ∗ S left the census".into()))
    };

    let mut table = Vec::with_capacity(classes.len());
    for class in &classes {
        let row: Vec<usize> = h2
            .representatives
            .iter()
            .map(|s| star(&class.representative, s))
            .collect::<Result<_>>()?;
        table.push(row);
    }

    let mut well_defined = true;
    'wd: for (k, class) in classes.iter().enumerate() {
        for t in &class.cocycles {
            for s in &h2.cocycles {
                let j = h2.class_of(s).expect("listed cocycle has a class");
                if star(t, s)? != table[k][j] {
                    well_defined = false;
                    break 'wd;
                }
            }
        }
    }

    let n = h2.order();
    let group_action = (0..classes.len()).all(|k| {
        table[k][0] == k
            && (0..n).all(|j| (0..n).all(|j2| table[table[k][j]][j2] == table[k][h2.group.add[j][j2]]))
    });
    let free = (0..classes.len()).all(|k| (1..n).all(|j| table[k][j] != k));
    let transitive = (0..classes.len()).all(|k| (0..classes.len()).all(|l| table[k][..].contains(&l)));

    let center = algebraic_center(&i);
    let mut back = vec![usize::MAX; i.order()];
    for (k, &e) in embed.iter().enumerate() {
        back[e] = k;
    }
    let mut central_difference = true;
    'cd: for a in &classes {
        for b in &classes {
            let (ta, tb) = (&a.representative.factors, &b.representative.factors);
            let diff = ta.zip_with(tb, |x, y| i.mul(i.inv(x), y));
            if diff.key().iter().any(|&v| !center.contains(v)) {
                central_difference = false;
                break 'cd;
            }
            let s = diff.map_values(|v| back[v]);
            let ok = h2.class_of(&s).is_some()
                && act_h2_on_extension(&a.representative, &s, &embed)?.factors == *tb;
            if !ok {
                central_difference = false;
                break 'cd;
            }
        }
    }

    Ok(CorrespondenceReport {
        ext_classes: classes.len(),
        h2_order: n,
        h2_invariant_factors: h2.group.invariant_factors.clone(),
        center: center.members(),
        orbit_table: table,
        well_defined,
        group_action,
        free,
        transitive,
        central_difference,
        representatives: classes.iter().map(|c| CocycleTables::from(&c.representative)).collect(),
    })
}

/// Pairs `(χ, χ')` among the given action terms where the two `τ`
/// conventions disagree on equivalence.
pub fn convention_disagreements(terms: &[ActionTerms]) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (a, x) in terms.iter().enumerate() {
        for (b, y) in terms.iter().enumerate() {
            let br = actions_equivalent_with(x, y, TauConvention::Bracket)?.is_some();
            let gc = actions_equivalent_with(x, y, TauConvention::GroupCommutator)?.is_some();
            if br != gc {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

