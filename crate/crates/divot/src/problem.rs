//! Discrete problem instances, objective functionals, and admissibility.
//!
//! An instance couples two strictly positive probability vectors through a
//! bounded cost matrix, regularized by λ times a divergence from the
//! [`Generator`] catalogue:
//!
//! ```text
//! minimize   Σ_ij (c[i][j]·r[i][j] + λ·φ(r[i][j])) · px[i]·py[j]
//! over       r ≥ 0 with row/column averages matching the marginals,
//! ```
//!
//! where `r` is the coupling's density relative to the product `px·py`.
//! The dual maximizes
//!
//! ```text
//! ⟨f, px⟩ + ⟨g, py⟩ − λ · Σ_ij φ*((f[i] + g[j] − c[i][j])/λ) · px[i]·py[j]
//! ```
//!
//! over potential vectors `(f, g)`, which are only determined up to the
//! shift `(f, g) ↦ (f + a, g − a)`; the solver reports the representative
//! with ⟨f, px⟩ = ⟨g, py⟩.

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::matrix::Matrix;
use crate::scalar::Real;

/// A discrete transport instance: marginals, cost matrix, and λ.
#[derive(Clone, Debug)]
pub struct DiscreteProblem<T> {
    px: Vec<T>,
    py: Vec<T>,
    cost: Matrix<T>,
    lambda: T,
}

impl<T: Real> DiscreteProblem<T> {
    /// Validates and builds an instance.
    ///
    /// Marginal atoms must be strictly positive (zero-mass atoms make the
    /// coupling density ill-defined on the corresponding null set — trim
    /// them before constructing) and each vector must sum to 1 within a
    /// small tolerance. Costs must be finite and λ strictly positive.
    pub fn new(px: Vec<T>, py: Vec<T>, cost: Matrix<T>, lambda: T) -> Result<Self> {
        check_marginal("marginal_x", &px)?;
        check_marginal("marginal_y", &py)?;
        if cost.shape() != (px.len(), py.len()) {
            return Err(Error::CostShape {
                rows: px.len(),
                cols: py.len(),
                got_rows: cost.rows(),
                got_cols: cost.cols(),
            });
        }
        for ((i, j), v) in cost.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteCost {
                    row: i,
                    col: j,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if !lambda.is_finite() || lambda <= T::zero() {
            return Err(Error::InvalidLambda(lambda.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            px,
            py,
            cost,
            lambda,
        })
    }

    pub fn px(&self) -> &[T] {
        &self.px
    }

    pub fn py(&self) -> &[T] {
        &self.py
    }

    pub fn cost(&self) -> &Matrix<T> {
        &self.cost
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Number of support atoms of the first marginal.
    pub fn n(&self) -> usize {
        self.px.len()
    }

    /// Number of support atoms of the second marginal.
    pub fn m(&self) -> usize {
        self.py.len()
    }

    /// Same marginals and λ, different cost matrix.
    pub fn with_cost(&self, cost: Matrix<T>) -> Result<Self> {
        Self::new(self.px.clone(), self.py.clone(), cost, self.lambda)
    }

    /// Same instance with a different λ.
    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.px.clone(), self.py.clone(), self.cost.clone(), lambda)
    }

    /// The product coupling px ⊗ py (density ≡ 1).
    pub fn product_coupling(&self) -> Coupling<T> {
        let joint = Matrix::from_fn(self.n(), self.m(), |i, j| self.px[i] * self.py[j]);
        let density = Matrix::filled(self.n(), self.m(), T::one());
        Coupling { joint, density }
    }
}

fn check_marginal<T: Real>(which: &'static str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    for (i, &p) in v.iter().enumerate() {
        if !p.is_finite() || p <= T::zero() {
            return Err(Error::NonPositiveMarginal {
                which,
                index: i,
                value: p.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let sum: T = v.iter().copied().sum();
    let tol = marginal_sum_tolerance::<T>(v.len());
    if (sum - T::one()).abs() > tol {
        return Err(Error::MarginalSum {
            which,
            sum: sum.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Accepted deviation of a marginal's sum from 1: 10⁻¹² for `f64`,
/// widened for lower-precision scalars.
pub fn marginal_sum_tolerance<T: Real>(len: usize) -> T {
    T::c(1e-12).max(T::epsilon() * T::c(32.0) * T::c(len as f64))
}

/// Dual potential vectors, one value per support atom of each marginal.
#[derive(Clone, Debug, PartialEq)]
pub struct Potentials<T> {
    pub f: Vec<T>,
    pub g: Vec<T>,
}

impl<T: Real> Potentials<T> {
    pub fn new(f: Vec<T>, g: Vec<T>) -> Self {
        Self { f, g }
    }

    /// All-zero potentials of the instance's shape.
    pub fn zeros(prob: &DiscreteProblem<T>) -> Self {
        Self {
            f: vec![T::zero(); prob.n()],
            g: vec![T::zero(); prob.m()],
        }
    }

    /// Applies `(f, g) ↦ (f + a, g − a)`, which leaves the dual objective
    /// unchanged.
    pub fn shifted(&self, a: T) -> Self {
        Self {
            f: self.f.iter().map(|&v| v + a).collect(),
            g: self.g.iter().map(|&v| v - a).collect(),
        }
    }

    /// Picks the representative of the shift class with ⟨f, px⟩ = ⟨g, py⟩.
    pub fn canonicalized(&self, prob: &DiscreteProblem<T>) -> Self {
        let fx = dot(&self.f, prob.px());
        let gy = dot(&self.g, prob.py());
        self.shifted((gy - fx) * T::c(0.5))
    }

    fn check_shape(&self, prob: &DiscreteProblem<T>) -> Result<()> {
        if self.f.len() != prob.n() {
            return Err(Error::PotentialLength {
                which: "f",
                expected: prob.n(),
                got: self.f.len(),
            });
        }
        if self.g.len() != prob.m() {
            return Err(Error::PotentialLength {
                which: "g",
                expected: prob.m(),
                got: self.g.len(),
            });
        }
        Ok(())
    }
}

/// A joint probability matrix plus its density relative to the product of
/// the marginals: `joint[i][j] = density[i][j] · px[i] · py[j]`.
#[derive(Clone, Debug)]
pub struct Coupling<T> {
    pub joint: Matrix<T>,
    pub density: Matrix<T>,
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// φ-divergence Σ φ(p/q)·q between two non-negative matrices of equal
/// shape.
///
/// Cells with q = 0 contribute +∞ when p > 0 there and 0 otherwise; a
/// vanishing p entry over positive q also yields +∞ (the generators'
/// domain is the open half-line). Entries must not be NaN.
pub fn divergence<T: Real>(gen: Generator<T>, p: &Matrix<T>, q: &Matrix<T>) -> T {
    assert_eq!(p.shape(), q.shape(), "divergence: shape mismatch");
    let mut total = T::zero();
    for (&pi, &qi) in p.iter().zip(q.iter()) {
        assert!(!pi.is_nan() && !qi.is_nan(), "divergence: NaN input");
        if qi == T::zero() {
            if pi > T::zero() {
                return T::infinity();
            }
            continue;
        }
        total = total + qi * gen.phi(pi / qi);
    }
    total
}

/// Primal value Σ (c·r + λ·φ(r))·px·py of a coupling with strictly
/// positive density.
pub fn primal_objective<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    coup: &Coupling<T>,
) -> T {
    assert_eq!(
        coup.joint.shape(),
        prob.cost.shape(),
        "coupling shape mismatch"
    );
    let mut total = T::zero();
    for i in 0..prob.n() {
        for j in 0..prob.m() {
            let r = coup.density[(i, j)];
            let weight = prob.px[i] * prob.py[j];
            total = total + (prob.cost[(i, j)] * r + prob.lambda * gen.phi(r)) * weight;
        }
    }
    total
}

/// Dual value ⟨f,px⟩ + ⟨g,py⟩ − λ·Σ φ*((f⊕g−c)/λ)·px·py.
///
/// Returns −∞ when some argument reaches the conjugate boundary β, which
/// signals infeasible potentials for finite-β generators.
pub fn dual_objective<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    pot: &Potentials<T>,
) -> T {
    pot.check_shape(prob).expect("potential shape mismatch");
    let mut conjugate_term = T::zero();
    for i in 0..prob.n() {
        for j in 0..prob.m() {
            let arg = (pot.f[i] + pot.g[j] - prob.cost[(i, j)]) / prob.lambda;
            conjugate_term = conjugate_term + gen.phi_star(arg) * prob.px[i] * prob.py[j];
        }
    }
    dot(&pot.f, &prob.px) + dot(&pot.g, &prob.py) - prob.lambda * conjugate_term
}

/// Outcome of an admissibility check: whether (f⊕g−c)/λ stays at least
/// `margin` below the conjugate boundary β, and by how much.
#[derive(Clone, Copy, Debug)]
pub struct Admissibility<T> {
    pub admissible: bool,
    /// β − max (f⊕g−c)/λ; +∞ when β = +∞.
    pub slack: T,
    /// Largest argument and the cell attaining it.
    pub max_arg: T,
    pub worst_cell: (usize, usize),
}

/// Tests membership in the admissible potential set: the maximum of
/// (f⊕g−c)/λ must stay `margin` below β. Always admissible when β = +∞.
pub fn check_admissible<T: Real>(
    prob: &DiscreteProblem<T>,
    gen: Generator<T>,
    pot: &Potentials<T>,
    margin: T,
) -> Admissibility<T> {
    pot.check_shape(prob).expect("potential shape mismatch");
    let mut max_arg = T::neg_infinity();
    let mut worst_cell = (0, 0);
    for i in 0..prob.n() {
        for j in 0..prob.m() {
            let arg = (pot.f[i] + pot.g[j] - prob.cost[(i, j)]) / prob.lambda;
            if arg > max_arg {
                max_arg = arg;
                worst_cell = (i, j);
            }
        }
    }
    let beta = gen.beta();
    let slack = beta - max_arg;
    Admissibility {
        admissible: beta.is_infinite() || max_arg <= beta - margin,
        slack,
        max_arg,
        worst_cell,
    }
}

/// Default admissibility margin: 10⁻⁹·max(1, β) for finite β, keeping the
/// conjugate-derivative evaluations away from the singularity at β. Zero
/// when β = +∞ (no boundary to protect).
pub fn default_admissibility_margin<T: Real>(gen: Generator<T>) -> T {
    let beta = gen.beta();
    if beta.is_infinite() {
        T::zero()
    } else {
        T::c(1e-9) * T::one().max(beta)
    }
}

/// L∞ deviations of the coupling's row and column sums from the marginals.
pub fn marginal_residuals<T: Real>(prob: &DiscreteProblem<T>, coup: &Coupling<T>) -> (T, T) {
    assert_eq!(
        coup.joint.shape(),
        prob.cost.shape(),
        "coupling shape mismatch"
    );
    let mut row = T::zero();
    for i in 0..prob.n() {
        let sum: T = coup.joint.row(i).iter().copied().sum();
        row = row.max((sum - prob.px[i]).abs());
    }
    let mut col = T::zero();
    for j in 0..prob.m() {
        let sum: T = (0..prob.n()).map(|i| coup.joint[(i, j)]).sum();
        col = col.max((sum - prob.py[j]).abs());
    }
    (row, col)
}
