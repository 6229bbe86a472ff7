//! Numerical library for the infinity fractional Laplacian with exponent
//! s in (1/2, 1): pointwise operator evaluation with certified error
//! estimates, the nonlocal tug-of-war game that generates the operator,
//! monotone Perron-style solvers for the graph-strip Dirichlet problem
//! and the double-obstacle problem, a comparison-failure certifier for
//! the gradient-free weak formulation, and regularity analysis tooling.

pub mod counterexample;
pub mod dirichlet;
pub mod harness;
pub mod error;
pub mod field;
pub mod game;
pub mod geom;
pub mod grid;
pub mod obstacle;
pub mod operator;
pub mod quad;

pub use error::{Error, Result};
pub use field::{Growth, ScalarField, C11};
pub use operator::{Exponent, OperatorResult, QuadratureConfig, WeakSide};
