//! Seeded random instances.
//!
//! Everything here is deterministic in the seed: the same seed always
//! yields the same instance, byte for byte once serialized.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::matrix::Matrix;
use crate::problem::DiscreteProblem;

/// How cost entries are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostLaw {
    /// Independent uniform draws on [0, 1).
    Uniform,
}

/// How marginal vectors are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginalLaw {
    /// Symmetric Dirichlet(1): normalized unit exponentials.
    Dirichlet,
    /// Equal atoms 1/n.
    Uniform,
}

impl CostLaw {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(Self::Uniform),
            _ => None,
        }
    }
}

impl MarginalLaw {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dirichlet" => Some(Self::Dirichlet),
            "uniform" => Some(Self::Uniform),
            _ => None,
        }
    }
}

/// Draws an `n × m` instance with the given laws and λ.
pub fn random_problem(
    seed: u64,
    n: usize,
    m: usize,
    cost_law: CostLaw,
    marginal_law: MarginalLaw,
    lambda: f64,
) -> Result<DiscreteProblem<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let px = draw_marginal(&mut rng, n, marginal_law);
    let py = draw_marginal(&mut rng, m, marginal_law);
    let cost = match cost_law {
        CostLaw::Uniform => Matrix::from_fn(n, m, |_, _| rng.random::<f64>()),
    };
    DiscreteProblem::new(px, py, cost, lambda)
}

fn draw_marginal(rng: &mut ChaCha8Rng, len: usize, law: MarginalLaw) -> Vec<f64> {
    match law {
        MarginalLaw::Uniform => vec![1.0 / len as f64; len],
        MarginalLaw::Dirichlet => {
            let mut v: Vec<f64> = (0..len)
                .map(|_| {
                    let u: f64 = rng.random();
                    // Exp(1) draw, floored so no atom collapses to zero.
                    (-(1.0 - u).ln()).max(1e-9)
                })
                .collect();
            let sum: f64 = v.iter().sum();
            for x in v.iter_mut() {
                *x /= sum;
            }
            v
        }
    }
}

/// One instance of the benchmark family: sizes in {2, …, 10}, Dirichlet
/// marginals, uniform costs on [0, 1), and λ log-uniform on [0.05, 5].
pub fn suite_instance(seed: u64) -> DiscreteProblem<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=10usize);
    let m = rng.random_range(2..=10usize);
    let px = draw_marginal(&mut rng, n, MarginalLaw::Dirichlet);
    let py = draw_marginal(&mut rng, m, MarginalLaw::Dirichlet);
    let cost = Matrix::from_fn(n, m, |_, _| rng.random::<f64>());
    let lambda = {
        let u: f64 = rng.random();
        let (lo, hi) = (0.05f64.ln(), 5.0f64.ln());
        (lo + u * (hi - lo)).exp()
    };
    DiscreteProblem::new(px, py, cost, lambda).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let a = random_problem(7, 5, 4, CostLaw::Uniform, MarginalLaw::Dirichlet, 1.0).unwrap();
        let b = random_problem(7, 5, 4, CostLaw::Uniform, MarginalLaw::Dirichlet, 1.0).unwrap();
        assert_eq!(a.px(), b.px());
        assert_eq!(a.py(), b.py());
        assert_eq!(a.cost(), b.cost());
        let c = random_problem(8, 5, 4, CostLaw::Uniform, MarginalLaw::Dirichlet, 1.0).unwrap();
        assert_ne!(a.cost(), c.cost());
    }

    #[test]
    fn generated_instances_validate() {
        for seed in [1u64, 2, 3, 42] {
            let p = suite_instance(seed);
            assert!(p.n() >= 2 && p.n() <= 10);
            assert!(p.m() >= 2 && p.m() <= 10);
            assert!(p.lambda() >= 0.05 && p.lambda() <= 5.0);
            let sum: f64 = p.px().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_marginal_law() {
        let p = random_problem(3, 4, 2, CostLaw::Uniform, MarginalLaw::Uniform, 2.0).unwrap();
        assert_eq!(p.px(), &[0.25; 4]);
    }
}
