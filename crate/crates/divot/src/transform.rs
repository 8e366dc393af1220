//! Cost transformation between regularizers, and its certification.
//!
//! A solved instance (cost `c`, generator φ, optimal potentials `f̂, ĝ`)
//! can be re-expressed under any other catalogue generator ψ without
//! moving the optimal coupling: the transformed cost
//!
//! ```text
//! v[i][j] = −λ · ψ'( φ'⁻¹( (f̂[i] + ĝ[j] − c[i][j]) / λ ) ) + 1
//! ```
//!
//! makes the constant potentials (1/2, 1/2) optimal for the
//! ψ-regularized problem with cost `v`, and both problems share the same
//! coupling. When ψ = φ the chain ψ'∘φ'⁻¹ collapses to the identity and
//! `v = c − f̂⊕ĝ + 1` exactly.
//!
//! [`verify_equivalence`] certifies this numerically: it solves the
//! source, transforms, checks the scaling conditions of the predicted
//! constant potentials, re-solves the transformed problem from scratch,
//! and compares couplings entrywise. A certificate can pass, fail, or be
//! inconclusive (either solve did not converge) — never a false pass.

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::matrix::Matrix;
use crate::problem::{
    check_admissible, default_admissibility_margin, dot, Coupling, DiscreteProblem, Potentials,
};
use crate::scalar::Real;
use crate::solver::{solve, SolveReport, SolverConfig};

/// A transformed cost with its predicted optimal potentials.
#[derive(Clone, Debug)]
pub struct TransformResult<T> {
    /// The transformed cost matrix `v`.
    pub cost: Matrix<T>,
    pub source: Generator<T>,
    pub target: Generator<T>,
    /// Constant potentials (1/2, 1/2), optimal for `(v, target)` by
    /// construction.
    pub predicted_potentials: Potentials<T>,
    /// Whether (1/2, 1/2) clears the target generator's admissibility
    /// bound, and by how much.
    pub admissible_for_target: bool,
    pub target_slack: T,
}

/// Computes the transformed cost `v` from solved source potentials.
///
/// The potentials must be admissible for `(source, c)` with the default
/// margin; the transformed entries are checked to be finite.
pub fn transform_cost<T: Real>(
    prob: &DiscreteProblem<T>,
    source: Generator<T>,
    pot_hat: &Potentials<T>,
    target: Generator<T>,
) -> Result<TransformResult<T>> {
    let margin = default_admissibility_margin(source);
    let adm = check_admissible(prob, source, pot_hat, margin);
    if !adm.admissible {
        return Err(Error::Inadmissible {
            row: adm.worst_cell.0,
            col: adm.worst_cell.1,
            value: adm.max_arg.to_f64().unwrap_or(f64::NAN),
            bound: source.beta().to_f64().unwrap_or(f64::NAN),
        });
    }

    let lambda = prob.lambda();
    let one = T::one();
    let cost = Matrix::from_fn(prob.n(), prob.m(), |i, j| {
        let arg = (pot_hat.f[i] + pot_hat.g[j] - prob.cost()[(i, j)]) / lambda;
        -lambda * target.phi_prime(source.phi_prime_inv(arg)) + one
    });
    for ((i, j), v) in cost.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFiniteTransform {
                row: i,
                col: j,
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let half = T::c(0.5);
    let predicted = Potentials::new(vec![half; prob.n()], vec![half; prob.m()]);
    // (1 − v)/λ = ψ'(φ'⁻¹(·)) must stay below β_ψ.
    let target_prob = prob.with_cost(cost.clone())?;
    let target_adm = check_admissible(
        &target_prob,
        target,
        &predicted,
        default_admissibility_margin(target),
    );

    Ok(TransformResult {
        cost,
        source,
        target,
        predicted_potentials: predicted,
        admissible_for_target: target_adm.admissible,
        target_slack: target_adm.slack,
    })
}

/// L∞ errors of the scaling conditions for given potentials: how far
/// `Σ_j φ'⁻¹((f[i]+g[j]−c[i][j])/λ)·py[j]` and its column counterpart are
/// from 1.
pub fn scaling_condition_residuals<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    pot: &Potentials<T>,
) -> (T, T) {
    let lambda = prob.lambda();
    let one = T::one();
    let density = Matrix::from_fn(prob.n(), prob.m(), |i, j| {
        gen.phi_prime_inv((pot.f[i] + pot.g[j] - prob.cost()[(i, j)]) / lambda)
    });
    let mut row = T::zero();
    for i in 0..prob.n() {
        let s: T = density
            .row(i)
            .iter()
            .zip(prob.py())
            .map(|(&r, &q)| r * q)
            .sum();
        row = row.max((s - one).abs());
    }
    let mut col = T::zero();
    for j in 0..prob.m() {
        let s: T = (0..prob.n()).map(|i| density[(i, j)] * prob.px()[i]).sum();
        col = col.max((s - one).abs());
    }
    (row, col)
}

/// Outcome of an end-to-end equivalence check.
#[derive(Clone, Debug)]
pub struct EquivalenceCertificate<T> {
    pub source: String,
    pub target: String,
    /// Largest entrywise difference between the source coupling and the
    /// coupling of the independently solved transformed problem.
    pub max_joint_discrepancy: T,
    /// Scaling-condition errors of the predicted (1/2, 1/2) potentials on
    /// the transformed problem.
    pub predicted_residual_row: T,
    pub predicted_residual_col: T,
    /// Shift aligning the independently solved target potentials with the
    /// predicted constants (zero up to solver tolerance, since the
    /// canonical normalization picks the same representative).
    pub potential_alignment_shift: T,
    pub passed: bool,
    /// Set when either solve failed to converge; `passed` is then false.
    pub inconclusive: bool,
    pub source_report: SolveReport<T>,
    pub target_report: Option<SolveReport<T>>,
}

/// Tolerance at which couplings are declared equal: 100× the outer
/// tolerance, absorbing error composition across two solves plus the
/// transform (10⁻⁶ at the default configuration).
pub fn equivalence_tolerance<T: Real>(config: &SolverConfig<T>) -> T {
    T::c(100.0) * config.outer_tol
}

/// Solves `(c, source)`, transforms the cost toward `target`, verifies the
/// predicted constant potentials, re-solves `(v, target)` from scratch,
/// and compares the couplings.
pub fn verify_equivalence<T: Real>(
    prob: &DiscreteProblem<T>,
    source: Generator<T>,
    target: Generator<T>,
    config: &SolverConfig<T>,
) -> Result<EquivalenceCertificate<T>> {
    let source_sol = solve(prob, source, config)?;
    if !source_sol.report.converged {
        return Ok(EquivalenceCertificate {
            source: source.name(),
            target: target.name(),
            max_joint_discrepancy: T::infinity(),
            predicted_residual_row: T::infinity(),
            predicted_residual_col: T::infinity(),
            potential_alignment_shift: T::zero(),
            passed: false,
            inconclusive: true,
            source_report: source_sol.report,
            target_report: None,
        });
    }

    let transform = transform_cost(prob, source, &source_sol.potentials, target)?;
    let target_prob = prob.with_cost(transform.cost.clone())?;
    let (pred_row, pred_col) =
        scaling_condition_residuals(&target_prob, target, &transform.predicted_potentials);

    let target_sol = solve(&target_prob, target, config)?;
    let shift = dot(&target_sol.potentials.f, prob.px()) - T::c(0.5);
    if !target_sol.report.converged {
        return Ok(EquivalenceCertificate {
            source: source.name(),
            target: target.name(),
            max_joint_discrepancy: T::infinity(),
            predicted_residual_row: pred_row,
            predicted_residual_col: pred_col,
            potential_alignment_shift: shift,
            passed: false,
            inconclusive: true,
            source_report: source_sol.report,
            target_report: Some(target_sol.report),
        });
    }

    let discrepancy = max_abs_difference(&source_sol.coupling, &target_sol.coupling);
    let joint_tol = equivalence_tolerance(config);
    let residual_tol = T::c(10.0) * config.outer_tol;
    let passed = discrepancy <= joint_tol && pred_row <= residual_tol && pred_col <= residual_tol;

    Ok(EquivalenceCertificate {
        source: source.name(),
        target: target.name(),
        max_joint_discrepancy: discrepancy,
        predicted_residual_row: pred_row,
        predicted_residual_col: pred_col,
        potential_alignment_shift: shift,
        passed,
        inconclusive: false,
        source_report: source_sol.report,
        target_report: Some(target_sol.report),
    })
}

fn max_abs_difference<T: Real>(a: &Coupling<T>, b: &Coupling<T>) -> T {
    assert_eq!(a.joint.shape(), b.joint.shape(), "coupling shape mismatch");
    a.joint
        .iter()
        .zip(b.joint.iter())
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}
