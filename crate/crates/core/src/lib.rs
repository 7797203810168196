//! Exact-arithmetic engine for relations among kappa classes on moduli of
//! curves: builds the nilpotent class on the n-pointed space, expands its
//! (g+1)-st power, fibre-integrates through weighted-graph combinatorics, and
//! row-reduces the resulting vectors into canonical relations.

pub mod kappa;
pub mod omega;
pub mod oracle;
pub mod parse;
pub mod pipeline;
pub mod points;
pub mod serial;
pub mod solver;

pub use kappa::{
    basis_of_degree, convention_flip, kappa_product, rat_int, GenusContext, KappaMonomial,
    KappaPolynomial, Rat,
};
pub use omega::{
    build_omega, clear_denominators, expand_pushforward, kappa_gm1_coefficient, morita_relation,
    multiplier_stabilizer, omega_at, MultiDegree, OmegaPower, RelationVectorMap,
};
pub use oracle::{
    brute_expand, brute_pushforward, golden_tables, GoldenEntry, GoldenTable, OracleError,
};
pub use parse::parse_point_monomial;
pub use pipeline::{standard_sets, verify, LabelledSet, VerifyReport};
pub use points::{
    enumerate_multipliers, nf_multiply, normal_form, pushforward, PointMonomial, PointPolynomial,
    WeightedPartition,
};
pub use solver::{RelationSet, SolverError};
