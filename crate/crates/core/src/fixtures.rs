//! Shipped example documents.

use crate::io::{parse_document, AlgebraDocument};

pub const L2B: &str = include_str!("../fixtures/l2b.alg");
pub const L2_ACTION: &str = include_str!("../fixtures/l2_action.alg");
pub const ABELIAN3: &str = include_str!("../fixtures/abelian3.alg");
pub const HEMI: &str = include_str!("../fixtures/hemi.alg");
pub const LIE_ABELIAN: &str = include_str!("../fixtures/lie_abelian.alg");
pub const MC_HEIS: &str = include_str!("../fixtures/mc_heis.alg");
pub const MC_HEIS_NON_MC: &str = include_str!("../fixtures/mc_heis_non_mc.alg");
pub const HEMI_PERTURBED: &str = include_str!("../fixtures/hemi_perturbed.alg");

/// The fixtures whose deformation satisfies the deformation condition.
pub const VALID: [(&str, &str); 6] = [
    ("l2b", L2B),
    ("l2_action", L2_ACTION),
    ("abelian3", ABELIAN3),
    ("hemi", HEMI),
    ("lie_abelian", LIE_ABELIAN),
    ("mc_heis", MC_HEIS),
];

/// Parses a shipped fixture; they are known to be well formed.
pub fn document(text: &str) -> AlgebraDocument {
    parse_document(text).unwrap_or_else(|e| panic!("shipped fixture does not parse: {e:?}"))
}

pub fn valid_documents() -> Vec<(&'static str, AlgebraDocument)> {
    VALID.iter().map(|(n, t)| (*n, document(t))).collect()
}
