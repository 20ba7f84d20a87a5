//! JSON file formats for algebras, action terms, cocycles and extensions.
//!
//! An algebra is `{"name": str?, "order": n, "mul": [[..]], "bracket": [[..]]}`
//! with the identity at index 0. Wherever an algebra is expected, a string
//! `"catalog:<key>"` may stand in for the inline object.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteMla;
use crate::catalog;
use crate::error::{MlaError, Result};
use crate::extension::{ActionTerms, Cocycle2, CocycleTables, Extension, FactorSet};
use crate::subset::Subset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    pub bracket: Vec<Vec<usize>>,
}

impl AlgebraFile {
    pub fn from_algebra(a: &FiniteMla) -> Self {
        AlgebraFile {
            name: a.name().map(str::to_string),
            order: a.order(),
            mul: a.mul_rows(),
            bracket: a.bracket_rows(),
        }
    }

    pub fn build(&self) -> Result<FiniteMla> {
        if self.mul.len() != self.order {
            return Err(MlaError::SizeMismatch {
                expected: self.order,
                found: self.mul.len(),
            });
        }
        FiniteMla::new(self.name.clone(), &self.mul, &self.bracket)
    }
}

/// An algebra given inline or by catalog key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Key(String),
    Inline(AlgebraFile),
}

impl AlgebraRef {
    pub fn resolve(&self) -> Result<FiniteMla> {
        match self {
            AlgebraRef::Key(k) => {
                let key = k
                    .strip_prefix("catalog:")
                    .ok_or_else(|| MlaError::Format(format!("expected `catalog:<key>`, found `{k}`")))?;
                catalog::build(key)
            }
            AlgebraRef::Inline(f) => f.build(),
        }
    }
}

/// Parses an algebra from JSON text.
pub fn parse_algebra(text: &str) -> Result<FiniteMla> {
    let r: AlgebraRef = serde_json::from_str(text).map_err(|e| MlaError::Format(e.to_string()))?;
    r.resolve()
}

pub fn algebra_to_json(a: &FiniteMla) -> String {
    serde_json::to_string_pretty(&AlgebraFile::from_algebra(a)).expect("tables serialize")
}

/// Action terms as rows: `sigma[x][a] = σ_x(a)`, likewise `tau`, `nu`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionFile {
    pub sigma: Vec<Vec<usize>>,
    pub tau: Vec<Vec<usize>>,
    pub nu: Vec<Vec<usize>>,
}

fn flatten(rows: &[Vec<usize>], width: usize, height: usize, what: &str) -> Result<Vec<usize>> {
    if rows.len() != height || rows.iter().any(|r| r.len() != width) {
        return Err(MlaError::Format(format!("{what} must be a {height}×{width} table")));
    }
    Ok(rows.concat())
}

fn rows(v: &[usize], width: usize) -> Vec<Vec<usize>> {
    v.chunks(width.max(1)).map(<[usize]>::to_vec).collect()
}

impl ActionFile {
    pub fn from_terms(chi: &ActionTerms) -> Self {
        let ni = chi.ni();
        ActionFile {
            sigma: rows(chi.sigma_table(), ni),
            tau: rows(chi.tau_table(), ni),
            nu: rows(chi.nu_table(), ni),
        }
    }

    pub fn build(&self, q: Arc<FiniteMla>, i: Arc<FiniteMla>) -> Result<ActionTerms> {
        let (nq, ni) = (q.order(), i.order());
        ActionTerms::new(
            q,
            i,
            flatten(&self.sigma, ni, nq, "sigma")?,
            flatten(&self.tau, ni, nq, "tau")?,
            flatten(&self.nu, ni, nq, "nu")?,
        )
    }
}

/// Action terms from JSON, or the word `trivial`.
pub fn parse_action(text: &str, q: Arc<FiniteMla>, i: Arc<FiniteMla>) -> Result<ActionTerms> {
    if text.trim() == "trivial" {
        return Ok(ActionTerms::trivial(q, i));
    }
    let f: ActionFile = serde_json::from_str(text).map_err(|e| MlaError::Format(e.to_string()))?;
    f.build(q, i)
}

/// A cocycle on a datum given by its two algebras.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleFile {
    #[serde(rename = "Q", alias = "quotient")]
    pub quotient: AlgebraRef,
    #[serde(rename = "I", alias = "kernel")]
    pub kernel: AlgebraRef,
    #[serde(flatten)]
    pub tables: CocycleTables,
}

impl CocycleFile {
    pub fn from_cocycle(c: &Cocycle2) -> Self {
        CocycleFile {
            quotient: AlgebraRef::Inline(AlgebraFile::from_algebra(c.q())),
            kernel: AlgebraRef::Inline(AlgebraFile::from_algebra(c.i())),
            tables: CocycleTables::from(c),
        }
    }

    pub fn build(&self) -> Result<Cocycle2> {
        let q = Arc::new(self.quotient.resolve()?);
        let i = Arc::new(self.kernel.resolve()?);
        cocycle_from_tables(&self.tables, q, i)
    }
}

/// Builds a cocycle from bare tables over a datum supplied separately.
pub fn cocycle_from_tables(t: &CocycleTables, q: Arc<FiniteMla>, i: Arc<FiniteMla>) -> Result<Cocycle2> {
    let nq = q.order();
    let action = ActionFile {
        sigma: t.sigma.clone(),
        tau: t.tau.clone(),
        nu: t.nu.clone(),
    }
    .build(q, i)?;
    let factors = FactorSet::new(nq, flatten(&t.t, nq, nq, "T")?, flatten(&t.tf, nq, nq, "Tf")?)?;
    Cocycle2::new(action, factors)
}

pub fn parse_cocycle(text: &str) -> Result<Cocycle2> {
    let f: CocycleFile = serde_json::from_str(text).map_err(|e| MlaError::Format(e.to_string()))?;
    f.build()
}

/// An extension given as an algebra and the members of an ideal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionFile {
    pub algebra: AlgebraRef,
    pub ideal: Vec<usize>,
}

impl ExtensionFile {
    pub fn build(&self) -> Result<Extension> {
        let a = Arc::new(self.algebra.resolve()?);
        let n = a.order();
        if let Some(&bad) = self.ideal.iter().find(|&&x| x >= n) {
            return Err(MlaError::Format(format!("ideal member {bad} is out of range 0..{n}")));
        }
        Extension::from_ideal(a, &Subset::from_indices(n, self.ideal.iter().copied()))
    }
}

pub fn parse_extension(text: &str) -> Result<Extension> {
    let f: ExtensionFile = serde_json::from_str(text).map_err(|e| MlaError::Format(e.to_string()))?;
    f.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trips() {
        let h = catalog::build("heisenberg(3)").unwrap();
        let back = parse_algebra(&algebra_to_json(&h)).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn catalog_reference() {
        assert_eq!(parse_algebra("\"catalog:cyclic(4)\"").unwrap().order(), 4);
        assert!(matches!(parse_algebra("\"cyclic(4)\""), Err(MlaError::Format(_))));
    }

    #[test]
    fn misplaced_identity_is_rejected_with_hint() {
        let text = r#"{"order": 2, "mul": [[1,0],[0,1]], "bracket": [[0,0],[0,0]]}"#;
        let err = parse_algebra(text).unwrap_err().to_string();
        assert!(err.contains("relabel"), "{err}");
    }

    #[test]
    fn cocycle_round_trips() {
        let ext = parse_extension(r#"{"algebra": "catalog:cyclic(4)", "ideal": [0, 2]}"#).unwrap();
        let c = crate::extension::extract_cocycle(&ext, &ext.canonical_section()).unwrap();
        let text = serde_json::to_string(&CocycleFile::from_cocycle(&c)).unwrap();
        assert_eq!(parse_cocycle(&text).unwrap(), c);
    }

    #[test]
    fn extension_and_action_files() {
        let ext = parse_extension(r#"{"algebra": "catalog:cyclic(4)", "ideal": [0, 2]}"#).unwrap();
        assert_eq!(ext.quotient.order(), 2);
        let chi = parse_action("trivial", ext.quotient.clone(), ext.kernel.clone()).unwrap();
        let text = serde_json::to_string(&ActionFile::from_terms(&chi)).unwrap();
        assert_eq!(parse_action(&text, ext.quotient.clone(), ext.kernel.clone()).unwrap(), chi);
    }
}
