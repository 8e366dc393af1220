//! JSON interchange: problem files, solve results, and certificates.
//!
//! All files are double precision. Numbers are written in shortest
//! round-trip form, so every emitted file re-parses to exactly the values
//! that were written.
//!
//! A problem file looks like
//!
//! ```json
//! {
//!   "marginal_x": [0.5, 0.5],
//!   "marginal_y": [0.5, 0.5],
//!   "cost": [[0.0, 1.0], [1.0, 0.0]],
//!   "lambda": 1.0
//! }
//! ```
//!
//! Marginals that sum to 1 within 10⁻¹² are accepted as-is; deviations up
//! to 10⁻⁶ are renormalized with a warning; anything worse is rejected.
//! Transformed-problem files carry the same fields plus the predicted
//! potentials, so they load anywhere a plain problem does.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::problem::{marginal_sum_tolerance, DiscreteProblem, Potentials};
use crate::solver::{Solution, SolveReport};
use crate::transform::EquivalenceCertificate;

/// On-disk problem instance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProblemFile {
    pub marginal_x: Vec<f64>,
    pub marginal_y: Vec<f64>,
    pub cost: Vec<Vec<f64>>,
    pub lambda: f64,
    /// Seed recorded by the instance generator, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Set on transformed-problem files: the constant potentials that are
    /// optimal for this cost under `target_divergence`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_f: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_g: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_divergence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_divergence: Option<String>,
}

impl ProblemFile {
    pub fn from_problem(prob: &DiscreteProblem<f64>) -> Self {
        Self {
            marginal_x: prob.px().to_vec(),
            marginal_y: prob.py().to_vec(),
            cost: prob.cost().to_rows(),
            lambda: prob.lambda(),
            seed: None,
            predicted_f: None,
            predicted_g: None,
            source_divergence: None,
            target_divergence: None,
        }
    }

    /// Validates into an instance. Returns any renormalization warnings
    /// alongside.
    pub fn into_problem(mut self) -> Result<(DiscreteProblem<f64>, Vec<String>)> {
        let mut warnings = Vec::new();
        renormalize("marginal_x", &mut self.marginal_x, &mut warnings)?;
        renormalize("marginal_y", &mut self.marginal_y, &mut warnings)?;
        let cost = Matrix::from_rows(self.cost)?;
        let prob = DiscreteProblem::new(self.marginal_x, self.marginal_y, cost, self.lambda)?;
        Ok((prob, warnings))
    }
}

fn renormalize(which: &'static str, v: &mut [f64], warnings: &mut Vec<String>) -> Result<()> {
    let sum: f64 = v.iter().sum();
    if !sum.is_finite() {
        return Err(Error::MarginalSum {
            which,
            sum,
            tol: 1e-6,
        });
    }
    let dev = (sum - 1.0).abs();
    if dev > 1e-6 {
        return Err(Error::MarginalSum {
            which,
            sum,
            tol: 1e-6,
        });
    }
    if dev > marginal_sum_tolerance::<f64>(v.len()) {
        for x in v.iter_mut() {
            *x /= sum;
        }
        warnings.push(format!(
            "{which} summed to {sum} (off by {dev:.3e}); renormalized"
        ));
    }
    Ok(())
}

/// Serialized [`SolveReport`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportFile {
    pub iterations: usize,
    pub residual_row: f64,
    pub residual_col: f64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub admissible: bool,
    pub admissibility_slack: f64,
    pub converged: bool,
    pub cost_shift: f64,
}

impl From<&SolveReport<f64>> for ReportFile {
    fn from(r: &SolveReport<f64>) -> Self {
        Self {
            iterations: r.iterations,
            residual_row: r.residual_row,
            residual_col: r.residual_col,
            primal: r.primal_value,
            dual: r.dual_value,
            gap: r.duality_gap,
            admissible: r.admissible,
            admissibility_slack: r.admissibility_slack,
            converged: r.converged,
            cost_shift: r.cost_shift,
        }
    }
}

/// On-disk solve result: potentials, coupling, and diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultFile {
    pub generator: String,
    pub lambda: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub joint: Vec<Vec<f64>>,
    pub density: Vec<Vec<f64>>,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub residuals: (f64, f64),
    pub converged: bool,
    pub cost_shift: f64,
}

impl ResultFile {
    pub fn from_solution(generator: &str, lambda: f64, sol: &Solution<f64>) -> Self {
        Self {
            generator: generator.to_string(),
            lambda,
            f: sol.potentials.f.clone(),
            g: sol.potentials.g.clone(),
            joint: sol.coupling.joint.to_rows(),
            density: sol.coupling.density.to_rows(),
            primal: sol.report.primal_value,
            dual: sol.report.dual_value,
            gap: sol.report.duality_gap,
            iterations: sol.report.iterations,
            residuals: (sol.report.residual_row, sol.report.residual_col),
            converged: sol.report.converged,
            cost_shift: sol.report.cost_shift,
        }
    }

    pub fn potentials(&self) -> Potentials<f64> {
        Potentials::new(self.f.clone(), self.g.clone())
    }
}

/// On-disk equivalence certificate.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateFile {
    pub source_generator: String,
    pub target_generator: String,
    pub max_joint_discrepancy: f64,
    pub predicted_potential_residuals: (f64, f64),
    pub potential_alignment_shift: f64,
    pub passed: bool,
    pub inconclusive: bool,
    pub source_report: ReportFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_report: Option<ReportFile>,
}

impl From<&EquivalenceCertificate<f64>> for CertificateFile {
    fn from(c: &EquivalenceCertificate<f64>) -> Self {
        Self {
            source_generator: c.source.clone(),
            target_generator: c.target.clone(),
            max_joint_discrepancy: c.max_joint_discrepancy,
            predicted_potential_residuals: (c.predicted_residual_row, c.predicted_residual_col),
            potential_alignment_shift: c.potential_alignment_shift,
            passed: c.passed,
            inconclusive: c.inconclusive,
            source_report: ReportFile::from(&c.source_report),
            target_report: c.target_report.as_ref().map(ReportFile::from),
        }
    }
}

/// Reads and parses a JSON value of any of the file types.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Pretty-prints a value as JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Writes a value as pretty JSON.
pub fn save<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
