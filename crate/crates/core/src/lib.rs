//! Solvers for discrete dynamic programming equations u = Tu on finite point sets.
//!
//! The operators come from game-theoretic schemes for nonlinear PDEs: tug-of-war
//! (infinity Laplacian), its biased variant with running payoff, the level-set
//! mean curvature game, discrete Eikonal control, two p-Laplacian stencils, and a
//! space-time max-min operator for fully nonlinear parabolic equations.
//!
//! The crate builds lattice domains with boundary collars ([`domain`]), applies
//! the operators as pure maps on scalar fields ([`operators`], [`parabolic`]),
//! constructs explicit sub- and supersolutions ([`barriers`]), computes extremal
//! fixed points by monotone Perron iteration ([`solver`]), and checks the
//! structural axioms (monotonicity, translation, scaling, comparison, maximum
//! principle) numerically ([`verify`]).

pub mod barriers;
pub mod domain;
pub mod error;
pub mod field;
pub mod operators;
pub mod parabolic;
pub mod solver;
pub mod verify;

pub use domain::{build_grid, AnnularPartition, DiscreteDomain, LayerPartition, Role, Shape};
pub use error::{Error, Result};
pub use field::ScalarField;
pub use operators::{OperatorKind, OperatorSpec};
pub use solver::{SolveDirection, SolveOptions, SolveReport};
pub use verify::VerificationReport;
