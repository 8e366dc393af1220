//! # divot
//!
//! Discrete optimal transport with f-divergence regularization.
//!
//! Couples two finite probability vectors through a cost matrix, with the
//! coupling's deviation from the product of its marginals penalized by
//! λ times a divergence from a catalogue of Legendre-type generators
//! (KL, reverse KL, Jensen–Shannon, squared Hellinger, and the α family).
//!
//! ## What's inside
//!
//! | Module | Role |
//! |--------|------|
//! | [`generators`] | The divergence catalogue: φ, φ', φ'⁻¹, φ*, and the conjugate boundary β |
//! | [`problem`] | Instances, primal/dual objectives, admissibility, marginal residuals |
//! | [`solver`] | Generalized Sinkhorn: alternating coordinate maximization of the dual |
//! | [`transform`] | Cost transformation that swaps the regularizer without moving the optimum |
//! | [`files`] | JSON interchange for problems, results, and certificates |
//! | [`instances`] | Seeded random instances for testing and benchmarks |
//!
//! ## Quick start
//!
//! ```rust
//! use divot::{Generator, Matrix, Problem64, SolverConfig};
//!
//! let prob = Problem64::new(
//!     vec![0.5, 0.5],
//!     vec![0.5, 0.5],
//!     Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
//!     1.0,
//! )
//! .unwrap();
//!
//! let sol = divot::solve(&prob, Generator::Kl, &SolverConfig::default()).unwrap();
//! assert!(sol.report.converged);
//! assert!(sol.report.duality_gap.abs() < 1e-7);
//!
//! // Re-express the same optimum under reverse-KL regularization.
//! let cert = divot::verify_equivalence(
//!     &prob,
//!     Generator::Kl,
//!     Generator::ReverseKl,
//!     &SolverConfig::default(),
//! )
//! .unwrap();
//! assert!(cert.passed);
//! ```
//!
//! The whole numeric core is generic over the scalar type through
//! [`scalar::Real`] (`f32` or `f64`); the `*64` aliases below pin the
//! common double-precision case.

pub mod error;
pub mod files;
pub mod generators;
pub mod instances;
pub mod matrix;
pub mod problem;
pub mod scalar;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
pub use generators::{catalogue, Generator};
pub use matrix::Matrix;
pub use problem::{
    check_admissible, default_admissibility_margin, divergence, dual_objective, marginal_residuals,
    primal_objective, Admissibility, Coupling, DiscreteProblem, Potentials,
};
pub use scalar::Real;
pub use solver::{
    coordinate_update, recover_coupling, solve, solve_from, Solution, SolveReport, SolverConfig,
};
pub use transform::{
    equivalence_tolerance, scaling_condition_residuals, transform_cost, verify_equivalence,
    EquivalenceCertificate, TransformResult,
};

/// Double-precision aliases for the main types.
pub type Generator64 = Generator<f64>;
pub type Matrix64 = Matrix<f64>;
pub type Problem64 = DiscreteProblem<f64>;
pub type Potentials64 = Potentials<f64>;
pub type Coupling64 = Coupling<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type Solution64 = Solution<f64>;
pub type Certificate64 = EquivalenceCertificate<f64>;

/// Single-precision aliases; remember to loosen the solver tolerances.
pub type Generator32 = Generator<f32>;
pub type Matrix32 = Matrix<f32>;
pub type Problem32 = DiscreteProblem<f32>;
pub type SolverConfig32 = SolverConfig<f32>;
