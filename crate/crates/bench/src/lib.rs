//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use mlakit_core::{catalog, ActionTerms, Extension, FiniteMla, Subset};

pub fn algebra(key: &str) -> Arc<FiniteMla> {
    Arc::new(catalog::build(key).expect("catalog key"))
}

/// `Z₂ ↣ Z₄ ↠ Z₂` with `Z₄` acting on `Z₃` by inversion through the quotient.
pub fn five_term_instance() -> (Extension, ActionTerms) {
    let m = algebra("cyclic(4)");
    let ext = Extension::from_ideal(m.clone(), &Subset::from_indices(4, [0, 2])).expect("ideal");
    let chi = ActionTerms::from_fn(
        m,
        algebra("cyclic(3)"),
        |x, v| if x % 2 == 1 { (3 - v) % 3 } else { v },
        |_, _| 0,
        |_, _| 0,
    )
    .expect("action terms");
    (ext, chi)
}

pub fn extension(key: &str, ideal: &[usize]) -> Extension {
    let a = algebra(key);
    let n = a.order();
    Extension::from_ideal(a, &Subset::from_indices(n, ideal.iter().copied())).expect("ideal")
}
