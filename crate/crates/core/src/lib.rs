//! Exact counting of integer points in parametric polyhedra
//! {x ∈ Z^{n_x} : A x ≤ b + B y}.
//!
//! The library builds a piece-wise periodic step-polynomial representation
//! of the counting function E(y): the parameter space is decomposed into
//! chambers, each chamber carries one periodic step-polynomial assembled
//! from Brion's decomposition over the fiber's vertex cones, and queries
//! evaluate it with exact rational arithmetic. On top of that sit the
//! rational/integer Ehrhart quasi-polynomial coefficients and a loop-nest
//! front-end that maps affine nested loops to parametric systems.
//!
//! No floating point is used anywhere; all arithmetic is arbitrary
//! precision.

pub mod arith;
pub mod chambers;
pub mod cones;
pub mod counting;
pub mod error;
pub mod group_gf;
pub mod loopnest;
pub mod lp;
pub mod param_count;
pub mod polyhedron;
pub mod repr_json;
pub mod selftest;

pub use arith::{Int, IntMatrix, Rat, RatMatrix};
pub use counting::{brute_force_count, count_fixed, Count};
pub use error::{Error, Result};
pub use param_count::{build_representation, Evaluation, Representation};
pub use polyhedron::ParametricSystem;

/// Default box budget for the brute-force oracle.
pub const DEFAULT_BUDGET: u64 = 50_000_000;
