//! Finite multiplicative Lie algebras stored as operation tables.
//!
//! Elements are dense indices `0..n` and index 0 is always the group identity.
//! Conjugation is `x^z = z·x·z⁻¹` throughout the crate; every module goes
//! through [`FiniteMla::conj`] so the convention cannot drift.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MlaError, Result};
use crate::subset::Subset;

/// Hard ceiling on the order of any algebra the crate will build or validate.
pub const MAX_ORDER: usize = 256;

/// The defining laws a table pair can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// Table dimensions or entries out of range.
    Shape,
    /// Index 0 is not a two-sided identity.
    IdentityElement,
    /// Some row of the product table is not a permutation.
    Latin,
    Associativity,
    /// `{x,x} = 1`.
    Alternating,
    /// `{x,yz} = {x,y}·{x,z}^y`.
    RightProduct,
    /// `{xy,z} = {y,z}^x·{x,z}`.
    LeftProduct,
    /// `{{x,y},z^y}·{{y,z},x^z}·{{z,x},y^x} = 1`.
    Jacobi,
    /// `{x,y}^z = {x^z,y^z}`.
    ConjugationInvariance,
    /// A closed-form inverse disagrees with the inverse read off the table.
    InverseFormula,
}

impl Law {
    pub fn is_group_law(self) -> bool {
        matches!(
            self,
            Law::Shape | Law::IdentityElement | Law::Latin | Law::Associativity
        )
    }
}

/// One broken law together with the element tuple that breaks it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: Law,
    pub witness: Vec<usize>,
    pub detail: String,
}

/// Every violated law, each with its lexicographically first witness.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when the product table itself is not a group table.
    pub fn is_group_failure(&self) -> bool {
        self.violations.iter().any(|v| v.law.is_group_law())
    }

    pub fn violates(&self, law: Law) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }

    fn push(&mut self, law: Law, witness: Vec<usize>, detail: String) {
        self.violations.push(Violation {
            law,
            witness,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?} at {:?}: {}", v.law, v.witness, v.detail)?;
        }
        Ok(())
    }
}

/// A validated finite multiplicative Lie algebra.
///
/// Immutable after construction and cheap to share behind an `Arc`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteMla {
    name: Option<String>,
    n: usize,
    mul: Vec<u16>,
    bracket: Vec<u16>,
    inv: Vec<u16>,
}

impl fmt::Debug for FiniteMla {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteMla({}, order {})",
            self.name.as_deref().unwrap_or("unnamed"),
            self.n
        )
    }
}

impl FiniteMla {
    /// Validates the tables and builds the algebra.
    pub fn new(name: Option<String>, mul: &[Vec<usize>], bracket: &[Vec<usize>]) -> Result<Self> {
        let mut a = validate_algebra(mul.len(), mul, bracket).map_err(MlaError::Invalid)?;
        a.name = name;
        Ok(a)
    }

    /// Validates flat row-major tables.
    pub fn from_flat(
        name: Option<String>,
        n: usize,
        mul: Vec<usize>,
        bracket: Vec<usize>,
    ) -> Result<Self, ValidationReport> {
        let mut a = validate_flat(n, mul, bracket)?;
        a.name = name;
        Ok(a)
    }

    /// Builds without checking the bracket laws. The product table must be a
    /// group table with identity 0; callers use this only for constructions
    /// that are valid by theory (direct products, relabelings).
    pub(crate) fn from_group_unchecked(
        name: Option<String>,
        n: usize,
        mul: Vec<usize>,
        bracket: Vec<usize>,
    ) -> Self {
        let mul: Vec<u16> = mul.into_iter().map(|v| v as u16).collect();
        let bracket: Vec<u16> = bracket.into_iter().map(|v| v as u16).collect();
        let inv = inverse_table(n, &mul).expect("group table without inverses");
        FiniteMla {
            name,
            n,
            mul,
            bracket,
            inv,
        }
    }

    /// The one-element algebra.
    pub fn trivial() -> Self {
        FiniteMla::from_group_unchecked(Some("trivial".into()), 1, vec![0], vec![0])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn elements(&self) -> Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.n + y] as usize
    }

    #[inline]
    pub fn bracket(&self, x: usize, y: usize) -> usize {
        self.bracket[x * self.n + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x] as usize
    }

    /// `x^z = z·x·z⁻¹`.
    #[inline]
    pub fn conj(&self, x: usize, z: usize) -> usize {
        self.mul(self.mul(z, x), self.inv(z))
    }

    /// Group commutator `[x,y] = x·y·x⁻¹·y⁻¹`.
    #[inline]
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y)))
    }

    /// Left-to-right product of a slice; the empty product is the identity.
    pub fn product(&self, xs: &[usize]) -> usize {
        xs.iter().fold(0, |acc, &x| self.mul(acc, x))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut p = x;
        while p != 0 {
            p = self.mul(p, x);
            k += 1;
        }
        k
    }

    pub fn is_abelian_group(&self) -> bool {
        self.elements()
            .all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn has_trivial_bracket(&self) -> bool {
        self.bracket.iter().all(|&b| b == 0)
    }

    /// Commutative group reduct and zero bracket: the kernels the abelian
    /// cohomology layer accepts.
    pub fn is_abelian(&self) -> bool {
        self.is_abelian_group() && self.has_trivial_bracket()
    }

    pub fn mul_rows(&self) -> Vec<Vec<usize>> {
        self.mul
            .chunks(self.n)
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn bracket_rows(&self) -> Vec<Vec<usize>> {
        self.bracket
            .chunks(self.n)
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn full_subset(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn identity_subset(&self) -> Subset {
        Subset::identity(self.n)
    }

    /// Smallest subgroup of the group reduct containing `seed`.
    pub fn subgroup_closure(&self, seed: &Subset) -> Subset {
        let mut s = *seed;
        s.insert(0);
        let mut queue: Vec<usize> = s.members();
        let mut members = queue.clone();
        while let Some(x) = queue.pop() {
            for k in 0..members.len() {
                let y = members[k];
                for z in [self.mul(x, y), self.mul(y, x)] {
                    if s.insert(z) {
                        members.push(z);
                        queue.push(z);
                    }
                }
            }
        }
        s
    }

    fn check_axioms(&self, report: &mut ValidationReport) {
        let n = self.n;
        let a = self;

        if let Some(x) = (0..n).find(|&x| a.bracket(x, x) != 0) {
            report.push(
                Law::Alternating,
                vec![x],
                format!("{{{x},{x}}} = {}", a.bracket(x, x)),
            );
        }

        let right = (0..n).into_par_iter().find_map_first(|x| {
            for y in 0..n {
                for z in 0..n {
                    let lhs = a.bracket(x, a.mul(y, z));
                    let rhs = a.mul(a.bracket(x, y), a.conj(a.bracket(x, z), y));
                    if lhs != rhs {
                        return Some((vec![x, y, z], format!("{{x,yz}} = {lhs} but {{x,y}}·{{x,z}}^y = {rhs}")));
                    }
                }
            }
            None
        });
        if let Some((w, d)) = right {
            report.push(Law::RightProduct, w, d);
        }

        let left = (0..n).into_par_iter().find_map_first(|x| {
            for y in 0..n {
                for z in 0..n {
                    let lhs = a.bracket(a.mul(x, y), z);
                    let rhs = a.mul(a.conj(a.bracket(y, z), x), a.bracket(x, z));
                    if lhs != rhs {
                        return Some((vec![x, y, z], format!("{{xy,z}} = {lhs} but {{y,z}}^x·{{x,z}} = {rhs}")));
                    }
                }
            }
            None
        });
        if let Some((w, d)) = left {
            report.push(Law::LeftProduct, w, d);
        }

        let jacobi = (0..n).into_par_iter().find_map_first(|x| {
            for y in 0..n {
                for z in 0..n {
                    let t1 = a.bracket(a.bracket(x, y), a.conj(z, y));
                    let t2 = a.bracket(a.bracket(y, z), a.conj(x, z));
                    let t3 = a.bracket(a.bracket(z, x), a.conj(y, x));
                    let lhs = a.product(&[t1, t2, t3]);
                    if lhs != 0 {
                        return Some((
                            vec![x, y, z],
                            format!("{{{{x,y}},z^y}}·{{{{y,z}},x^z}}·{{{{z,x}},y^x}} = {t1}·{t2}·{t3} = {lhs}"),
                        ));
                    }
                }
            }
            None
        });
        if let Some((w, d)) = jacobi {
            report.push(Law::Jacobi, w, d);
        }

        let conj = (0..n).into_par_iter().find_map_first(|x| {
            for y in 0..n {
                for z in 0..n {
                    let lhs = a.conj(a.bracket(x, y), z);
                    let rhs = a.bracket(a.conj(x, z), a.conj(y, z));
                    if lhs != rhs {
                        return Some((vec![x, y, z], format!("{{x,y}}^z = {lhs} but {{x^z,y^z}} = {rhs}")));
                    }
                }
            }
            None
        });
        if let Some((w, d)) = conj {
            report.push(Law::ConjugationInvariance, w, d);
        }
    }
}

fn inverse_table(n: usize, mul: &[u16]) -> Option<Vec<u16>> {
    (0..n)
        .map(|x| (0..n).find(|&y| mul[x * n + y] == 0).map(|y| y as u16))
        .collect()
}

/// Validates a table pair given as rows.
///
/// Rejects non-square input, an identity that is not at index 0, non-group
/// product tables, and every failing bracket law, each with a concrete witness.
pub fn validate_algebra(
    order: usize,
    mul: &[Vec<usize>],
    bracket: &[Vec<usize>],
) -> Result<FiniteMla, ValidationReport> {
    let mut report = ValidationReport::default();
    let square = |t: &[Vec<usize>]| t.len() == order && t.iter().all(|r| r.len() == order);
    if !square(mul) || !square(bracket) {
        report.push(
            Law::Shape,
            vec![],
            format!("tables must be {order}x{order}"),
        );
        return Err(report);
    }
    validate_flat(
        order,
        mul.iter().flatten().copied().collect(),
        bracket.iter().flatten().copied().collect(),
    )
}

fn validate_flat(
    n: usize,
    mul: Vec<usize>,
    bracket: Vec<usize>,
) -> Result<FiniteMla, ValidationReport> {
    let mut report = ValidationReport::default();
    if n == 0 || n > MAX_ORDER {
        report.push(
            Law::Shape,
            vec![],
            format!("order {n} outside 1..={MAX_ORDER}"),
        );
        return Err(report);
    }
    if mul.len() != n * n || bracket.len() != n * n {
        report.push(Law::Shape, vec![], format!("tables must have {} cells", n * n));
        return Err(report);
    }
    if let Some(k) = mul.iter().chain(bracket.iter()).position(|&v| v >= n) {
        let k = k % (n * n);
        report.push(
            Law::Shape,
            vec![k / n, k % n],
            format!("entry out of range 0..{n}"),
        );
        return Err(report);
    }

    let m = |x: usize, y: usize| mul[x * n + y];
    if let Some(x) = (0..n).find(|&x| m(0, x) != x || m(x, 0) != x) {
        let hint = (0..n)
            .find(|&e| (0..n).all(|y| m(e, y) == y && m(y, e) == y))
            .map(|e| format!("; the identity is at index {e}, relabel it to 0"))
            .unwrap_or_default();
        report.push(
            Law::IdentityElement,
            vec![x],
            format!("index 0 is not an identity for {x}{hint}"),
        );
        return Err(report);
    }
    for x in 0..n {
        let mut seen = vec![false; n];
        for y in 0..n {
            let v = m(x, y);
            if seen[v] {
                report.push(Law::Latin, vec![x, y], format!("row {x} repeats {v}"));
                return Err(report);
            }
            seen[v] = true;
        }
    }
    let assoc = (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            for z in 0..n {
                if m(m(x, y), z) != m(x, m(y, z)) {
                    return Some(vec![x, y, z]);
                }
            }
        }
        None
    });
    if let Some(w) = assoc {
        let (x, y, z) = (w[0], w[1], w[2]);
        let detail = format!("(xy)z = {} but x(yz) = {}", m(m(x, y), z), m(x, m(y, z)));
        report.push(Law::Associativity, w, detail);
        return Err(report);
    }

    let mul16: Vec<u16> = mul.iter().map(|&v| v as u16).collect();
    let inv = inverse_table(n, &mul16).expect("latin rows always contain the identity");
    let a = FiniteMla {
        name: None,
        n,
        mul: mul16,
        bracket: bracket.iter().map(|&v| v as u16).collect(),
        inv,
    };
    a.check_axioms(&mut report);
    if report.is_valid() {
        Ok(a)
    } else {
        Err(report)
    }
}

/// The consequences of the axioms checked by [`check_derived_identities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedIdentity {
    /// `{x,y}·{y,x} = 1`.
    Antisymmetry,
    /// `{u,v}^{{x,y}} = {u,v}^{[x,y]}`.
    BracketActsAsCommutator,
    /// `[{x,y},z] = {[x,y],z}`.
    CommutatorSwap,
    /// `{x⁻¹,y} = ({x,y}⁻¹)^{x⁻¹}`.
    InverseArgument,
    /// `{1,x} = 1 = {x,1}`.
    IdentityAnnihilates,
    /// `{x,y} = {y⁻¹,x^y}`.
    InverseConjugate,
    /// `{x,y₁y₂y₃} = {x,y₁}·{x,y₂}^{y₁}·{x,y₃}^{y₁y₂}`.
    ProductExpansion,
    /// `{x,y} = {x,z}` implies `{x,y⁻¹z} = 1`.
    Cancellation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: DerivedIdentity,
    pub passed: bool,
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    /// Longest product checked by the expansion identity. Three-fold products
    /// cost n⁴ and are only run for n ≤ 64; above that the two-fold case is
    /// the defining axiom itself.
    pub expansion_length: usize,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn pair_search<F>(n: usize, f: F) -> Option<Vec<usize>>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    (0..n)
        .into_par_iter()
        .find_map_first(|x| (0..n).find(|&y| !f(x, y)).map(|y| vec![x, y]))
}

fn triple_search<F>(n: usize, f: F) -> Option<Vec<usize>>
where
    F: Fn(usize, usize, usize) -> bool + Sync,
{
    (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            for z in 0..n {
                if !f(x, y, z) {
                    return Some(vec![x, y, z]);
                }
            }
        }
        None
    })
}

/// Exhaustively evaluates the derived identities on a validated algebra.
pub fn check_derived_identities(a: &FiniteMla) -> IdentityReport {
    let n = a.order();
    let mut checks = Vec::new();
    let mut record = |identity, witness: Option<Vec<usize>>| {
        checks.push(IdentityCheck {
            identity,
            passed: witness.is_none(),
            witness,
        })
    };

    record(
        DerivedIdentity::Antisymmetry,
        pair_search(n, |x, y| a.mul(a.bracket(x, y), a.bracket(y, x)) == 0),
    );

    // Conjugating by {x,y} and by [x,y] only needs to agree on bracket values.
    let mut bracket_values: Vec<(usize, usize, usize)> = Vec::new();
    let mut seen = Subset::empty(n);
    for u in 0..n {
        for v in 0..n {
            let b = a.bracket(u, v);
            if seen.insert(b) {
                bracket_values.push((b, u, v));
            }
        }
    }
    let w = (0..n).into_par_iter().find_map_first(|x| {
        for y in 0..n {
            let (br, cm) = (a.bracket(x, y), a.commutator(x, y));
            for &(b, u, v) in &bracket_values {
                if a.conj(b, br) != a.conj(b, cm) {
                    return Some(vec![u, v, x, y]);
                }
            }
        }
        None
    });
    record(DerivedIdentity::BracketActsAsCommutator, w);

    record(
        DerivedIdentity::CommutatorSwap,
        triple_search(n, |x, y, z| {
            a.commutator(a.bracket(x, y), z) == a.bracket(a.commutator(x, y), z)
        }),
    );
    record(
        DerivedIdentity::InverseArgument,
        pair_search(n, |x, y| {
            let xi = a.inv(x);
            a.bracket(xi, y) == a.conj(a.inv(a.bracket(x, y)), xi)
        }),
    );
    record(
        DerivedIdentity::IdentityAnnihilates,
        (0..n)
            .find(|&x| a.bracket(0, x) != 0 || a.bracket(x, 0) != 0)
            .map(|x| vec![x]),
    );
    record(
        DerivedIdentity::InverseConjugate,
        pair_search(n, |x, y| a.bracket(x, y) == a.bracket(a.inv(y), a.conj(x, y))),
    );

    let expansion_length = if n <= 64 { 3 } else { 2 };
    let w = if expansion_length == 3 {
        (0..n).into_par_iter().find_map_first(|x| {
            for y1 in 0..n {
                for y2 in 0..n {
                    let y12 = a.mul(y1, y2);
                    let head = a.mul(a.bracket(x, y1), a.conj(a.bracket(x, y2), y1));
                    for y3 in 0..n {
                        let lhs = a.bracket(x, a.mul(y12, y3));
                        let rhs = a.mul(head, a.conj(a.bracket(x, y3), y12));
                        if lhs != rhs {
                            return Some(vec![x, y1, y2, y3]);
                        }
                    }
                }
            }
            None
        })
    } else {
        triple_search(n, |x, y, z| {
            a.bracket(x, a.mul(y, z)) == a.mul(a.bracket(x, y), a.conj(a.bracket(x, z), y))
        })
    };
    record(DerivedIdentity::ProductExpansion, w);

    record(
        DerivedIdentity::Cancellation,
        triple_search(n, |x, y, z| {
            a.bracket(x, y) != a.bracket(x, z) || a.bracket(x, a.mul(a.inv(y), z)) == 0
        }),
    );

    IdentityReport {
        checks,
        expansion_length,
    }
}

/// Checks that `map` respects products and brackets.
pub fn is_homomorphism(source: &FiniteMla, target: &FiniteMla, map: &[usize]) -> Result<bool> {
    if map.len() != source.order() {
        return Err(MlaError::SizeMismatch {
            expected: source.order(),
            found: map.len(),
        });
    }
    if let Some(&v) = map.iter().find(|&&v| v >= target.order()) {
        return Err(MlaError::SizeMismatch {
            expected: target.order(),
            found: v,
        });
    }
    Ok(source.elements().all(|x| {
        source.elements().all(|y| {
            map[source.mul(x, y)] == target.mul(map[x], map[y])
                && map[source.bracket(x, y)] == target.bracket(map[x], map[y])
        })
    }))
}

/// A checked structure-preserving map between two algebras.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Homomorphism {
    map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(source: &FiniteMla, target: &FiniteMla, map: Vec<usize>) -> Result<Self> {
        if is_homomorphism(source, target, &map)? {
            Ok(Homomorphism { map })
        } else {
            Err(MlaError::Format("map does not preserve the operations".into()))
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.map.iter().all(|v| seen.insert(*v))
    }

    pub fn into_map(self) -> Vec<usize> {
        self.map
    }
}

/// Direct product with element `(x, y)` stored at index `x·|B| + y`.
pub fn direct_product(a: &FiniteMla, b: &FiniteMla, limit: usize) -> Result<FiniteMla> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let limit = limit.min(MAX_ORDER);
    if n > limit {
        return Err(MlaError::OrderOverflow { order: n, limit });
    }
    let mut mul = vec![0; n * n];
    let mut br = vec![0; n * n];
    for x in 0..n {
        let (x1, x2) = (x / nb, x % nb);
        for y in 0..n {
            let (y1, y2) = (y / nb, y % nb);
            mul[x * n + y] = a.mul(x1, y1) * nb + b.mul(x2, y2);
            br[x * n + y] = a.bracket(x1, y1) * nb + b.bracket(x2, y2);
        }
    }
    let name = format!(
        "{}*{}",
        a.name().unwrap_or("A"),
        b.name().unwrap_or("B")
    );
    Ok(FiniteMla::from_group_unchecked(Some(name), n, mul, br))
}

/// The subalgebra on `s`, relabelled by ascending index, and its embedding.
pub fn subalgebra(a: &FiniteMla, s: &Subset) -> Result<(FiniteMla, Vec<usize>)> {
    if !s.contains(0) {
        return Err(MlaError::NotASubalgebra("missing the identity".into()));
    }
    let members = s.members();
    let mut index = vec![usize::MAX; a.order()];
    for (k, &x) in members.iter().enumerate() {
        index[x] = k;
    }
    let m = members.len();
    let mut mul = vec![0; m * m];
    let mut br = vec![0; m * m];
    for (i, &x) in members.iter().enumerate() {
        for (j, &y) in members.iter().enumerate() {
            let (p, b) = (a.mul(x, y), a.bracket(x, y));
            if !s.contains(p) || !s.contains(b) {
                return Err(MlaError::NotASubalgebra(format!(
                    "not closed at ({x}, {y})"
                )));
            }
            mul[i * m + j] = index[p];
            br[i * m + j] = index[b];
        }
    }
    Ok((FiniteMla::from_group_unchecked(None, m, mul, br), members))
}
