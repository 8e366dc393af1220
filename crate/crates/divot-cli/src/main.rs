//! `divot` — solve, transform, and certify divergence-regularized
//! transport problems from the command line.
//!
//! Exit codes: 0 success (converged / certificate passed), 1 input error,
//! 2 non-convergence or inconclusive certificate, 3 certificate failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use divot::files::{self, CertificateFile, ProblemFile, ResultFile};
use divot::instances::{CostLaw, MarginalLaw};
use divot::{
    divergence, solve, transform_cost, verify_equivalence, DiscreteProblem, Generator, Matrix,
    SolverConfig,
};

type G = Generator<f64>;

#[derive(Parser)]
#[command(
    name = "divot",
    version,
    about = "Discrete optimal transport with f-divergence regularization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write the result JSON.
    Solve {
        /// Problem file (JSON).
        #[arg(long)]
        problem: PathBuf,
        /// Divergence: kl, reverse_kl, jensen_shannon, hellinger_sq, alpha:<v>.
        #[arg(long)]
        divergence: G,
        /// Override the problem file's lambda.
        #[arg(long)]
        lambda: Option<f64>,
        /// Output result file.
        #[arg(long)]
        out: PathBuf,
        /// Also write the joint coupling as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Solve under one divergence, then write the transformed problem
    /// whose cost makes another divergence share the same optimum.
    Transform {
        #[arg(long)]
        problem: PathBuf,
        /// Source divergence (the problem is solved under this one).
        #[arg(long)]
        from: G,
        /// Target divergence.
        #[arg(long)]
        to: G,
        #[arg(long)]
        lambda: Option<f64>,
        /// Output: a problem file with the transformed cost and the
        /// predicted potentials.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// End-to-end certificate that two regularizations share the optimum.
    Equivalence {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        from: G,
        #[arg(long)]
        to: G,
        #[arg(long)]
        lambda: Option<f64>,
        /// Output certificate file.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Generate a seeded random problem file.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Atoms of the first marginal (>= 2).
        #[arg(long)]
        n: usize,
        /// Atoms of the second marginal (>= 2).
        #[arg(long)]
        m: usize,
        /// Cost law: uniform.
        #[arg(long, default_value = "uniform")]
        cost_law: String,
        /// Marginal law: dirichlet or uniform.
        #[arg(long, default_value = "dirichlet")]
        marginal_law: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Divergence between two probability arrays (printed to stdout).
    Divergence {
        /// JSON array (vector or matrix) for P.
        #[arg(long)]
        p: PathBuf,
        /// JSON array (vector or matrix) for Q.
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        divergence: G,
    },
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Convergence tolerance on the scaling conditions.
    #[arg(long = "tol-outer")]
    tol_outer: Option<f64>,
    /// Tolerance for each scalar coordinate root.
    #[arg(long = "tol-inner")]
    tol_inner: Option<f64>,
    /// Maximum full sweeps.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
}

impl TolArgs {
    fn config(&self) -> SolverConfig<f64> {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol_outer {
            cfg.outer_tol = t;
        }
        if let Some(t) = self.tol_inner {
            cfg.inner_tol = t;
        }
        if let Some(n) = self.max_iters {
            cfg.max_outer_iters = n;
        }
        cfg
    }
}

/// A validated invocation: input paths exist, generator selections are
/// parsed, and solver overrides are folded into one config.
struct RunManifest {
    command: &'static str,
    inputs: Vec<PathBuf>,
    generators: Vec<G>,
    lambda_override: Option<f64>,
    config: SolverConfig<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

impl RunManifest {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            generators: Vec::new(),
            lambda_override: None,
            config: SolverConfig::default(),
            seed: None,
            out: None,
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        for path in &self.inputs {
            if !path.exists() {
                return Err(Failure::Input(format!(
                    "{}: input file `{}` does not exist",
                    self.command,
                    path.display()
                )));
            }
        }
        self.config.validate()?;
        if let Some(l) = self.lambda_override {
            if !l.is_finite() || l <= 0.0 {
                return Err(Failure::Input(format!("lambda must be positive, got {l}")));
            }
        }
        Ok(())
    }

    fn load_problem(&self, path: &Path) -> Result<DiscreteProblem<f64>, Failure> {
        let file: ProblemFile = files::load(path)?;
        let (mut prob, warnings) = file.into_problem()?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        if let Some(l) = self.lambda_override {
            prob = prob.with_lambda(l)?;
        }
        Ok(prob)
    }
}

/// One outcome class per exit code; no outcome maps to more than one.
enum Failure {
    /// Bad input: missing/malformed files, invalid parameters. Exit 1.
    Input(String),
    /// Solver did not converge, or a certificate is inconclusive. Exit 2.
    NotConverged(String),
    /// A certificate failed. Exit 3.
    CertificateFailed(String),
}

impl Failure {
    fn exit(&self) -> ExitCode {
        match self {
            Failure::Input(_) => ExitCode::from(1),
            Failure::NotConverged(_) => ExitCode::from(2),
            Failure::CertificateFailed(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::NotConverged(m) | Failure::CertificateFailed(m) => m,
        }
    }
}

impl From<divot::Error> for Failure {
    fn from(e: divot::Error) -> Self {
        use divot::Error::*;
        match e {
            BracketFailure { .. } | CoordinateUpdate { .. } => Failure::NotConverged(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit()
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve {
            problem,
            divergence,
            lambda,
            out,
            csv,
            tols,
        } => {
            let manifest = RunManifest {
                inputs: vec![problem],
                generators: vec![divergence],
                lambda_override: lambda,
                config: tols.config(),
                out: Some(out),
                ..RunManifest::new("solve")
            };
            manifest.validate()?;
            cmd_solve(&manifest, csv.as_deref())
        }
        Command::Transform {
            problem,
            from,
            to,
            lambda,
            out,
            tols,
        } => {
            let manifest = RunManifest {
                inputs: vec![problem],
                generators: vec![from, to],
                lambda_override: lambda,
                config: tols.config(),
                out: Some(out),
                ..RunManifest::new("transform")
            };
            manifest.validate()?;
            cmd_transform(&manifest)
        }
        Command::Equivalence {
            problem,
            from,
            to,
            lambda,
            out,
            tols,
        } => {
            let manifest = RunManifest {
                inputs: vec![problem],
                generators: vec![from, to],
                lambda_override: lambda,
                config: tols.config(),
                out: Some(out),
                ..RunManifest::new("equivalence")
            };
            manifest.validate()?;
            cmd_equivalence(&manifest)
        }
        Command::Gen {
            seed,
            n,
            m,
            cost_law,
            marginal_law,
            lambda,
            out,
        } => {
            let manifest = RunManifest {
                seed: Some(seed),
                out: Some(out),
                ..RunManifest::new("gen")
            };
            manifest.validate()?;
            cmd_gen(&manifest, n, m, &cost_law, &marginal_law, lambda)
        }
        Command::Divergence { p, q, divergence } => {
            let manifest = RunManifest {
                inputs: vec![p, q],
                generators: vec![divergence],
                ..RunManifest::new("divergence")
            };
            manifest.validate()?;
            cmd_divergence(&manifest)
        }
    }
}

fn cmd_solve(manifest: &RunManifest, csv: Option<&Path>) -> Result<(), Failure> {
    let gen = manifest.generators[0];
    let prob = manifest.load_problem(&manifest.inputs[0])?;
    let sol = solve(&prob, gen, &manifest.config)?;
    let result = ResultFile::from_solution(&gen.name(), prob.lambda(), &sol);
    files::save(manifest.out.as_deref().unwrap(), &result)?;
    if let Some(csv_path) = csv {
        write_csv(csv_path, &sol.coupling.joint)?;
    }
    println!(
        "{gen}: {} in {} sweeps, primal {:.9}, dual {:.9}, gap {:.3e}, residuals ({:.3e}, {:.3e})",
        if sol.report.converged {
            "converged"
        } else {
            "NOT converged"
        },
        sol.report.iterations,
        sol.report.primal_value,
        sol.report.dual_value,
        sol.report.duality_gap,
        sol.report.residual_row,
        sol.report.residual_col,
    );
    if sol.report.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "no convergence within {} sweeps (residuals {:.3e}, {:.3e})",
            sol.report.iterations, sol.report.residual_row, sol.report.residual_col
        )))
    }
}

fn cmd_transform(manifest: &RunManifest) -> Result<(), Failure> {
    let (from, to) = (manifest.generators[0], manifest.generators[1]);
    let prob = manifest.load_problem(&manifest.inputs[0])?;
    let sol = solve(&prob, from, &manifest.config)?;
    if !sol.report.converged {
        return Err(Failure::NotConverged(format!(
            "source solve under {from} did not converge within {} sweeps",
            sol.report.iterations
        )));
    }
    let tr = transform_cost(&prob, from, &sol.potentials, to)?;
    let out = manifest.out.as_deref().unwrap();
    let mut file = ProblemFile::from_problem(&prob);
    file.cost = tr.cost.to_rows();
    file.predicted_f = Some(tr.predicted_potentials.f.clone());
    file.predicted_g = Some(tr.predicted_potentials.g.clone());
    file.source_divergence = Some(from.name());
    file.target_divergence = Some(to.name());
    files::save(out, &file)?;
    println!(
        "{from} -> {to}: transformed cost written to {} (target admissibility slack {:.3e})",
        out.display(),
        tr.target_slack
    );
    Ok(())
}

fn cmd_equivalence(manifest: &RunManifest) -> Result<(), Failure> {
    let (from, to) = (manifest.generators[0], manifest.generators[1]);
    let prob = manifest.load_problem(&manifest.inputs[0])?;
    let cert = verify_equivalence(&prob, from, to, &manifest.config)?;
    files::save(
        manifest.out.as_deref().unwrap(),
        &CertificateFile::from(&cert),
    )?;
    println!(
        "{from} -> {to}: {} (max joint discrepancy {:.3e}, predicted residuals ({:.3e}, {:.3e}))",
        if cert.passed {
            "PASS"
        } else if cert.inconclusive {
            "INCONCLUSIVE"
        } else {
            "FAIL"
        },
        cert.max_joint_discrepancy,
        cert.predicted_residual_row,
        cert.predicted_residual_col,
    );
    if cert.passed {
        Ok(())
    } else if cert.inconclusive {
        Err(Failure::NotConverged(
            "certificate inconclusive: a solve did not converge".into(),
        ))
    } else {
        Err(Failure::CertificateFailed(format!(
            "couplings differ by {:.3e}",
            cert.max_joint_discrepancy
        )))
    }
}

fn cmd_gen(
    manifest: &RunManifest,
    n: usize,
    m: usize,
    cost_law: &str,
    marginal_law: &str,
    lambda: f64,
) -> Result<(), Failure> {
    if n < 2 || m < 2 {
        return Err(Failure::Input(format!(
            "n and m must be at least 2, got n={n}, m={m}"
        )));
    }
    let cost_law = CostLaw::parse(cost_law).ok_or_else(|| {
        Failure::Input(format!("unknown cost law `{cost_law}` (expected uniform)"))
    })?;
    let marginal_law = MarginalLaw::parse(marginal_law).ok_or_else(|| {
        Failure::Input(format!(
            "unknown marginal law `{marginal_law}` (expected dirichlet or uniform)"
        ))
    })?;
    let seed = manifest.seed.unwrap_or(0);
    let prob = divot::instances::random_problem(seed, n, m, cost_law, marginal_law, lambda)?;
    let out = manifest.out.as_deref().unwrap();
    let mut file = ProblemFile::from_problem(&prob);
    file.seed = Some(seed);
    files::save(out, &file)?;
    println!(
        "wrote {n}x{m} instance (seed {seed}, lambda {lambda}) to {}",
        out.display()
    );
    Ok(())
}

fn cmd_divergence(manifest: &RunManifest) -> Result<(), Failure> {
    let gen = manifest.generators[0];
    let p = load_probability_array(&manifest.inputs[0])?;
    let q = load_probability_array(&manifest.inputs[1])?;
    if p.shape() != q.shape() {
        return Err(Failure::Input(format!(
            "shape mismatch: {} is {:?}, {} is {:?}",
            manifest.inputs[0].display(),
            p.shape(),
            manifest.inputs[1].display(),
            q.shape()
        )));
    }
    let d = divergence(gen, &p, &q);
    println!("{d:.11e}");
    Ok(())
}

/// Reads a JSON array — either a vector or a matrix of probabilities.
fn load_probability_array(path: &Path) -> Result<Matrix<f64>, Failure> {
    let value: serde_json::Value = files::load(path)?;
    let rows: Vec<Vec<f64>> = match &value {
        serde_json::Value::Array(items) if items.iter().all(|v| v.is_array()) => items
            .iter()
            .map(|row| parse_number_row(path, row))
            .collect::<Result<_, _>>()?,
        serde_json::Value::Array(_) => vec![parse_number_row(path, &value)?],
        _ => {
            return Err(Failure::Input(format!(
                "{}: expected a JSON array of probabilities",
                path.display()
            )))
        }
    };
    for row in &rows {
        for &v in row {
            if !v.is_finite() || v < 0.0 {
                return Err(Failure::Input(format!(
                    "{}: probabilities must be finite and non-negative, got {v}",
                    path.display()
                )));
            }
        }
    }
    Matrix::from_rows(rows).map_err(Into::into)
}

fn parse_number_row(path: &Path, value: &serde_json::Value) -> Result<Vec<f64>, Failure> {
    value
        .as_array()
        .ok_or_else(|| Failure::Input(format!("{}: expected an array", path.display())))?
        .iter()
        .map(|v| {
            v.as_f64().ok_or_else(|| {
                Failure::Input(format!("{}: expected a number, got {v}", path.display()))
            })
        })
        .collect()
}

fn write_csv(path: &Path, joint: &Matrix<f64>) -> Result<(), Failure> {
    let mut text = String::new();
    for i in 0..joint.rows() {
        let row = joint.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                text.push(',');
            }
            let _ = write!(text, "{v}");
        }
        text.push('\n');
    }
    std::fs::write(path, text)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}
