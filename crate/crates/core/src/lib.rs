//! Finite multiplicative Lie algebras: groups carrying a second binary
//! operation, the bracket, subject to five compatibility laws.
//!
//! Algebras are stored as operation tables over dense indices. On top of the
//! table layer the crate implements ideals and series, extensions described by
//! nonabelian 2-cocycles, the abelian-kernel cohomology groups H⁰, H¹ and H²,
//! the action of H² on extension classes, the automorphism exact sequence of
//! an extension and the five-term inflation-restriction sequence. Every
//! computation is exhaustive and meant for algebras of a few dozen elements.

pub mod abelian;
pub mod algebra;
pub mod catalog;
pub mod correspondence;
pub mod error;
pub mod extension;
pub mod format;
pub mod hochschild_serre;
pub mod iso;
pub mod subset;
pub mod substructures;
pub mod wells;

pub use abelian::{h1_group, h2_group, AbelianGroupPresentation, H1Group, H2Group};
pub use algebra::{
    check_derived_identities, direct_product, is_homomorphism, subalgebra, validate_algebra,
    DerivedIdentity, FiniteMla, Homomorphism, IdentityReport, Law, ValidationReport, Violation,
    MAX_ORDER,
};
pub use error::{MlaError, Result};
pub use extension::{
    build_crossed_product, check_compatibility, classify_extensions, cocycles_equivalent,
    extract_cocycle, is_compatible, roundtrip_map, ActionTerms, Census, CensusOptions, Cocycle2,
    CrossedProduct, Extension, FactorSet, Section,
};
pub use hochschild_serre::{verify_five_term, FiveTermReport, HsDatum, SquareWitness};
pub use iso::{are_isomorphic, automorphisms, find_isomorphism};
pub use subset::Subset;

/// Ceilings for the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest algebra order built or validated.
    pub max_order: usize,
    /// Candidate ceiling for map searches and cocycle enumeration.
    pub max_candidates: u64,
    /// Largest order for which all ideals are enumerated.
    pub max_ideal_order: usize,
    /// Largest order for which the full automorphism group is enumerated.
    pub max_aut_order: usize,
    /// Ceiling on `|Aut I|·|Aut Q|` when filtering compatible pairs.
    pub max_pairs: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: MAX_ORDER,
            max_candidates: 10_000_000,
            max_ideal_order: 64,
            max_aut_order: 24,
            max_pairs: 1_000_000,
        }
    }
}
