//! Dual ascent by alternating coordinate sweeps, and coupling recovery.
//!
//! For fixed `g` the dual objective separates across the entries of `f`,
//! so a full row sweep maximizes the dual over the whole `f` block (and
//! symmetrically for columns). Each coordinate maximum is the root of the
//! scalar scaling equation
//!
//! ```text
//! h(t) = Σ_j φ'⁻¹((t + g[j] − c[i][j]) / λ) · py[j] = 1,
//! ```
//!
//! which is continuous and strictly increasing in `t`, so a bracketed
//! search is unconditionally safe. For `kl` the equation has the familiar
//! log-sum-exp closed form and no iteration is needed.
//!
//! Convergence is declared on the scaling conditions themselves: the run
//! stops once every row and column condition holds to `outer_tol`, which
//! bounds the coupling's marginal residuals by the same amount (each
//! residual is the condition error scaled by a marginal atom ≤ 1).
//!
//! Costs are shifted by their minimum before iterating, which makes the
//! all-zero initialization admissible for every catalogue generator; the
//! shift is recorded in the report and reported objectives refer to the
//! original costs.

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::matrix::Matrix;
use crate::problem::{
    check_admissible, default_admissibility_margin, dot, dual_objective, marginal_residuals,
    primal_objective, Coupling, DiscreteProblem, Potentials,
};
use crate::scalar::Real;

/// Iteration tolerances and limits.
///
/// `outer_tol` bounds the scaling-condition residuals at exit, `inner_tol`
/// bounds `|h(t) − 1|` for each scalar root. The defaults assume `f64`.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig<T> {
    pub outer_tol: T,
    pub inner_tol: T,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    /// Distance the potentials must keep from the conjugate boundary for
    /// the admissibility report; `None` uses
    /// [`default_admissibility_margin`].
    pub admissibility_margin: Option<T>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            outer_tol: T::c(1e-8),
            inner_tol: T::c(1e-12),
            max_outer_iters: 10_000,
            max_inner_iters: 200,
            admissibility_margin: None,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.outer_tol.is_finite() || self.outer_tol <= T::zero() {
            return Err(Error::InvalidConfig("outer_tol must be positive"));
        }
        if !self.inner_tol.is_finite() || self.inner_tol <= T::zero() {
            return Err(Error::InvalidConfig("inner_tol must be positive"));
        }
        if self.inner_tol >= self.outer_tol {
            return Err(Error::InvalidConfig(
                "inner_tol must be smaller than outer_tol",
            ));
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::InvalidConfig("iteration limits must be positive"));
        }
        if let Some(m) = self.admissibility_margin {
            if !m.is_finite() || m <= T::zero() {
                return Err(Error::InvalidConfig(
                    "admissibility_margin must be positive",
                ));
            }
        }
        Ok(())
    }
}

/// Convergence diagnostics of a solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveReport<T> {
    /// Full sweeps (row pass + column pass) performed.
    pub iterations: usize,
    /// L∞ marginal residuals of the recovered coupling.
    pub residual_row: T,
    pub residual_col: T,
    pub primal_value: T,
    pub dual_value: T,
    /// `primal_value − dual_value`; small and non-negative (up to
    /// round-off) on converged runs.
    pub duality_gap: T,
    pub admissible: bool,
    pub admissibility_slack: T,
    pub converged: bool,
    /// Minimum of the original costs, subtracted internally before
    /// iterating.
    pub cost_shift: T,
}

/// Potentials, coupling, and diagnostics from one solve.
#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub potentials: Potentials<T>,
    pub coupling: Coupling<T>,
    pub report: SolveReport<T>,
}

/// Solves one coordinate of the dual: the `t` with
/// `Σ_j φ'⁻¹((t + fixed_pot[j] − cost_slice[j])/λ) · fixed_marginal[j] = 1`.
///
/// `h` is strictly increasing, so the root is bracketed (by downward
/// doubling from the boundary abscissa when β is finite, by doubling in
/// both directions otherwise) and then narrowed by bisection interleaved
/// with secant steps. Errors only if no bracket is found within
/// `max_inner_iters` doublings.
pub fn coordinate_update<T: Real>(
    gen: Generator<T>,
    lambda: T,
    fixed_pot: &[T],
    fixed_marginal: &[T],
    cost_slice: &[T],
    config: &SolverConfig<T>,
) -> Result<T> {
    assert_eq!(fixed_pot.len(), fixed_marginal.len(), "length mismatch");
    assert_eq!(fixed_pot.len(), cost_slice.len(), "length mismatch");
    assert!(
        fixed_marginal.iter().all(|&q| q > T::zero()),
        "fixed marginal must be strictly positive"
    );
    update_coordinate(
        gen,
        lambda,
        fixed_pot,
        fixed_marginal,
        cost_slice,
        config,
        T::zero(),
    )
}

fn update_coordinate<T: Real>(
    gen: Generator<T>,
    lambda: T,
    fixed_pot: &[T],
    fixed_marginal: &[T],
    cost_slice: &[T],
    config: &SolverConfig<T>,
    hint: T,
) -> Result<T> {
    if let Generator::Kl = gen {
        return Ok(kl_closed_form(
            lambda,
            fixed_pot,
            fixed_marginal,
            cost_slice,
        ));
    }

    let one = T::one();
    let h = |t: T| -> T {
        let mut sum = T::zero();
        for ((&p, &q), &c) in fixed_pot.iter().zip(fixed_marginal).zip(cost_slice) {
            sum = sum + q * gen.phi_prime_inv((t + p - c) / lambda);
            if sum == T::infinity() {
                break;
            }
        }
        sum
    };

    let h_hint = h(hint);
    if (h_hint - one).abs() <= config.inner_tol {
        return Ok(hint);
    }

    // Bracket the root: h(lo) < 1 ≤ h(hi).
    let beta = gen.beta();
    let step0 = one.max(lambda);
    let mut doublings = 0usize;
    let (mut lo, mut h_lo, mut hi, mut h_hi);
    if beta.is_finite() {
        // h blows up at t_limit, where the tightest argument reaches β.
        let t_limit = lambda * beta
            + cost_slice
                .iter()
                .zip(fixed_pot)
                .map(|(&c, &p)| c - p)
                .fold(T::infinity(), T::min);
        if hint < t_limit && h_hint >= one {
            hi = hint;
            h_hi = h_hint;
        } else {
            hi = t_limit;
            h_hi = T::infinity();
        }
        let mut step = step0;
        lo = hi - step;
        h_lo = h(lo);
        while h_lo >= one {
            hi = lo;
            h_hi = h_lo;
            doublings += 1;
            if doublings > config.max_inner_iters {
                return Err(Error::BracketFailure { doublings });
            }
            step = step + step;
            lo = lo - step;
            h_lo = h(lo);
        }
    } else if h_hint >= one {
        hi = hint;
        h_hi = h_hint;
        let mut step = step0;
        lo = hi - step;
        h_lo = h(lo);
        while h_lo >= one {
            hi = lo;
            h_hi = h_lo;
            doublings += 1;
            if doublings > config.max_inner_iters {
                return Err(Error::BracketFailure { doublings });
            }
            step = step + step;
            lo = lo - step;
            h_lo = h(lo);
        }
    } else {
        lo = hint;
        h_lo = h_hint;
        let mut step = step0;
        hi = lo + step;
        h_hi = h(hi);
        while h_hi < one {
            lo = hi;
            h_lo = h_hi;
            doublings += 1;
            if doublings > config.max_inner_iters {
                return Err(Error::BracketFailure { doublings });
            }
            step = step + step;
            hi = hi + step;
            h_hi = h(hi);
        }
    }

    // Narrow: secant steps, with a plain bisection every other iteration
    // so the bracket provably shrinks.
    let mut best_t = lo;
    let mut best_gap = (h_lo - one).abs();
    for iter in 0..config.max_inner_iters {
        let width = hi - lo;
        if width <= T::epsilon() * (one.max(lo.abs()).max(hi.abs())) {
            break;
        }
        let half = T::c(0.5);
        let mut t = if iter % 2 == 0 && h_hi.is_finite() && h_hi > h_lo {
            lo + (one - h_lo) * width / (h_hi - h_lo)
        } else {
            lo + width * half
        };
        if !(t > lo && t < hi) {
            t = lo + width * half;
        }
        if !(t > lo && t < hi) {
            break; // interval exhausted at this precision
        }
        let ht = h(t);
        let gap = (ht - one).abs();
        if gap < best_gap {
            best_gap = gap;
            best_t = t;
        }
        if gap <= config.inner_tol {
            return Ok(t);
        }
        if ht < one {
            lo = t;
            h_lo = ht;
        } else {
            hi = t;
            h_hi = ht;
        }
    }
    Ok(best_t)
}

/// Exact row/column update for `kl`:
/// `t = −λ · ln Σ_j fixed_marginal[j] · exp((fixed_pot[j] − cost_slice[j])/λ)`,
/// evaluated with the usual max-shift so the exponentials cannot overflow.
fn kl_closed_form<T: Real>(
    lambda: T,
    fixed_pot: &[T],
    fixed_marginal: &[T],
    cost_slice: &[T],
) -> T {
    let mut max_arg = T::neg_infinity();
    let mut args = Vec::with_capacity(fixed_pot.len());
    for ((&p, &q), &c) in fixed_pot.iter().zip(fixed_marginal).zip(cost_slice) {
        let a = (p - c) / lambda + q.ln();
        if a > max_arg {
            max_arg = a;
        }
        args.push(a);
    }
    let sum: T = args.iter().map(|&a| (a - max_arg).exp()).sum();
    -lambda * (max_arg + sum.ln())
}

/// Solves the dual from the all-zero initialization.
pub fn solve<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    config: &SolverConfig<T>,
) -> Result<Solution<T>> {
    solve_from(prob, gen, config, &Potentials::zeros(prob))
}

/// Solves the dual starting from the given potentials. The starting `f` is
/// irrelevant (the first row sweep replaces it); the starting `g` seeds
/// the iteration.
pub fn solve_from<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    config: &SolverConfig<T>,
    init: &Potentials<T>,
) -> Result<Solution<T>> {
    config.validate()?;
    let n = prob.n();
    let m = prob.m();
    let lambda = prob.lambda();
    let one = T::one();

    // Shift costs so the minimum is zero; the zero potentials are then
    // admissible for every generator (arguments ≤ 0 < β).
    let cost_shift = prob.cost().min_value();
    let cost = prob.cost().map(|c| c - cost_shift);
    let cost_t = Matrix::from_fn(m, n, |j, i| cost[(i, j)]);

    let mut f = init.f.clone();
    let mut g = init.g.clone();
    if f.len() != n || g.len() != m {
        return Err(Error::PotentialLength {
            which: if f.len() != n { "f" } else { "g" },
            expected: if f.len() != n { n } else { m },
            got: if f.len() != n { f.len() } else { g.len() },
        });
    }

    let mut sweeps = 0usize;
    let mut converged = false;
    while sweeps < config.max_outer_iters {
        sweeps += 1;
        for (i, fi) in f.iter_mut().enumerate() {
            *fi = update_coordinate(gen, lambda, &g, prob.py(), cost.row(i), config, *fi).map_err(
                |e| Error::CoordinateUpdate {
                    axis: "row",
                    index: i,
                    source: Box::new(e),
                },
            )?;
        }
        for (j, gj) in g.iter_mut().enumerate() {
            *gj = update_coordinate(gen, lambda, &f, prob.px(), cost_t.row(j), config, *gj)
                .map_err(|e| Error::CoordinateUpdate {
                    axis: "column",
                    index: j,
                    source: Box::new(e),
                })?;
        }

        // Scaling-condition residuals of the current iterate.
        let density = Matrix::from_fn(n, m, |i, j| {
            gen.phi_prime_inv((f[i] + g[j] - cost[(i, j)]) / lambda)
        });
        let mut worst = T::zero();
        for i in 0..n {
            let s: T = density
                .row(i)
                .iter()
                .zip(prob.py())
                .map(|(&r, &q)| r * q)
                .sum();
            worst = worst.max((s - one).abs());
        }
        for j in 0..m {
            let s: T = (0..n).map(|i| density[(i, j)] * prob.px()[i]).sum();
            worst = worst.max((s - one).abs());
        }
        if worst <= config.outer_tol {
            converged = true;
            break;
        }
    }

    // Canonical representative of the shift class, expressed against the
    // original (un-shifted) costs.
    let a = (dot(&g, prob.py()) - dot(&f, prob.px())) * T::c(0.5);
    let half_shift = cost_shift * T::c(0.5);
    for fi in f.iter_mut() {
        *fi = *fi + a + half_shift;
    }
    for gj in g.iter_mut() {
        *gj = *gj - a + half_shift;
    }
    let potentials = Potentials::new(f, g);
    let coupling = coupling_from_potentials(prob, gen, &potentials);

    let (residual_row, residual_col) = marginal_residuals(prob, &coupling);
    let primal_value = primal_objective(prob, gen, &coupling);
    let dual_value = dual_objective(prob, gen, &potentials);
    let margin = config
        .admissibility_margin
        .unwrap_or_else(|| default_admissibility_margin(gen));
    let adm = check_admissible(prob, gen, &potentials, margin);

    Ok(Solution {
        potentials,
        coupling,
        report: SolveReport {
            iterations: sweeps,
            residual_row,
            residual_col,
            primal_value,
            dual_value,
            duality_gap: primal_value - dual_value,
            admissible: adm.admissible,
            admissibility_slack: adm.slack,
            converged,
            cost_shift,
        },
    })
}

/// Closed-form primal minimizer for admissible potentials:
/// `density[i][j] = φ'⁻¹((f[i] + g[j] − c[i][j])/λ)` and
/// `joint = density · px · py`.
///
/// Errors when the potentials violate the admissibility bound (with the
/// default margin), naming the offending cell.
pub fn recover_coupling<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    pot: &Potentials<T>,
) -> Result<Coupling<T>> {
    let margin = default_admissibility_margin(gen);
    let adm = check_admissible(prob, gen, pot, margin);
    if !adm.admissible {
        return Err(Error::Inadmissible {
            row: adm.worst_cell.0,
            col: adm.worst_cell.1,
            value: adm.max_arg.to_f64().unwrap_or(f64::NAN),
            bound: gen.beta().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(coupling_from_potentials(prob, gen, pot))
}

fn coupling_from_potentials<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    pot: &Potentials<T>,
) -> Coupling<T> {
    let lambda = prob.lambda();
    let density = Matrix::from_fn(prob.n(), prob.m(), |i, j| {
        gen.phi_prime_inv((pot.f[i] + pot.g[j] - prob.cost()[(i, j)]) / lambda)
    });
    let joint = Matrix::from_fn(prob.n(), prob.m(), |i, j| {
        density[(i, j)] * prob.px()[i] * prob.py()[j]
    });
    Coupling { joint, density }
}
