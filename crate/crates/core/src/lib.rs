//! Exact polyhedral convex analysis: rational linear programming, double
//! description, conjugates and epsilon-subdifferentials of polyhedral functions,
//! and a verification catalog for supremum-function calculus.

pub mod certificate;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod polyhedron;
pub mod rational;
pub mod vector;

pub use error::{Error, Result};
pub use lp::{lp_solve, Constraint, LinearProgram, LpBuilder, LpResult, LpStatus, Relation, Sense};
pub use rational::{ExtendedRational, Rational};
pub use vector::QVector;
pub use polyhedron::{cco_union, minkowski_sum, HalfSpace, LiftedPolyhedron, Polyhedron};
pub use certificate::{Counterexample, Inclusion};

pub mod function;
pub mod report;
pub mod sampling;
pub mod sup;
pub mod oracles;
pub mod generate;
pub mod instance;
pub mod harness;
