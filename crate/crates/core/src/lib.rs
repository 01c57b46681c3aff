//! Finite multary quasigroups as operation tables: validation, isotopy and
//! parastrophy, consecutive factorization and the factorization graph,
//! block decomposition, group recognition, corpus generators and
//! transversal designs.

pub mod design;
pub mod enumerate;
pub mod error;
pub mod factorization;
pub mod generators;
pub mod group;
pub mod mqt;
pub mod perm;
pub mod quasigroup;
pub mod recognition;
pub mod structure;

pub use design::{
    group_design, i_compose, i_compose_with, rotate_classes, to_design, verify_design, DesignReport, DesignViolation,
    TransversalDesign, TD_FORMAT_VERSION,
};
pub use enumerate::{enumerate_all, enumerate_all_with_limit, Enumeration, DEFAULT_ENUMERATION_LIMIT};
pub use error::{Error, Result};
pub use factorization::{
    check_ij_associative, check_multary_group, compose, factorization_graph, multary_group_extension, reducible_at,
    FactorPair, FactorizationGraph, Segment,
};
pub use generators::{
    iterated_group, random_composition, random_isotopy, random_latin_hypercube, rng_from_seed, search_irreducible,
    search_nongroup_binary, twisted_composition, SearchBudget, DEFAULT_MAX_CANDIDATES,
};
pub use group::{catalog, catalog_group, group_isomorphic, group_isomorphic_with_limit, GroupTable};
pub use mqt::{parse_mqt, write_mqt, MqtDocument, MQT_FORMAT_VERSION};
pub use perm::Permutation;
pub use quasigroup::{validate, Isotopy, MultaryQuasigroup, Parastrophe};
pub use recognition::{
    extract_group, failing_residual_ternary, is_iterated_group_isotope, is_pseudoisomorphism, quadrangle_criterion,
    residual_ternary_test, Division, GroupWitness, QuadrangleWitness,
};
pub use structure::{
    block_decomposition, decompose_quasigroup, is_theta_complete, Block, BlockKind, BlockTree, Component,
    DecompositionTree, ThetaReport, ThetaWitness, Traversal,
};
