//! qgacs: budgeted universal matrices, entropy and information scores, and
//! the conservation experiment suite.
//!
//! Every command is deterministic in its flags; Monte Carlo commands are
//! deterministic given `--seed`. The process exits 0 exactly when every
//! verdict in the emitted report passes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qgacs_core::experiments::{
    exp_addition, exp_conservation, exp_nocloning, exp_povm, exp_selfinfo, explore_conjectures,
    fields, ExperimentParams, ExperimentReport, FieldValue,
};
use qgacs_core::info::{
    deficiency, default_test_family, mutual_information, product_test_family,
};
use qgacs_core::mat::{load_matrix_document, MatrixDocument, SemiDensityMatrix};
use qgacs_core::universal::{entropy, mu_cached, Entropy, UniversalMatrix};

#[derive(Parser)]
#[command(
    name = "qgacs",
    about = "Budgeted universal semi-density matrices and algorithmic information scores",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Number of qubits n.
    #[arg(long, default_value_t = 2)]
    qubits: u32,
    /// Code-length budget B in bits.
    #[arg(long, default_value_t = 30)]
    budget: u64,
    /// Monte Carlo sample count (commands pick their own default).
    #[arg(long)]
    samples: Option<u64>,
    /// RNG seed for Monte Carlo commands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Charge transport description costs to test weights.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    charge_transforms: bool,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format printed to stdout (and written to --out).
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

impl Common {
    fn params(&self, default_samples: u64) -> ExperimentParams {
        ExperimentParams::new(self.qubits, self.budget)
            .with_samples(self.samples.unwrap_or(default_samples))
            .with_seed(self.seed)
            .with_charge(self.charge_transforms)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Universal-matrix utilities.
    Mu {
        #[command(subcommand)]
        command: MuCommand,
    },
    /// Entropy of a state against the universal matrix.
    Entropy {
        #[command(flatten)]
        common: Common,
        /// Matrix document holding the state.
        #[arg(long)]
        state: PathBuf,
    },
    /// Randomness deficiency of sigma with respect to rho.
    Deficiency {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        /// Number of per-test ledger rows in the report (0 = all).
        #[arg(long, default_value_t = 64)]
        ledger_limit: usize,
    },
    /// Mutual information between two states.
    MutualInfo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        rho: PathBuf,
    },
    /// Addition-inequality harness.
    Addition {
        #[command(flatten)]
        common: Common,
    },
    /// Conservation of randomness and information under unitaries and
    /// partial traces.
    Conservation {
        #[command(flatten)]
        common: Common,
    },
    /// Self-information and Haar-moment harness.
    Selfinfo {
        #[command(flatten)]
        common: Common,
    },
    /// POVM deficiency and two-measurement bounds.
    Povm {
        #[command(flatten)]
        common: Common,
    },
    /// Algorithmic no-cloning harness.
    NoCloning {
        #[command(flatten)]
        common: Common,
    },
    /// Exploratory data for the open questions; emits data, never a verdict.
    ExploreConjectures {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum MuCommand {
    /// Build the universal matrix and write its ledger and matrix.
    Build {
        #[command(flatten)]
        common: Common,
    },
}

fn load_state(path: &Path, expected_dim: usize) -> Result<(SemiDensityMatrix, MatrixDocument)> {
    let doc = load_matrix_document(path)
        .with_context(|| format!("loading matrix document {}", path.display()))?;
    let matrix = doc.to_complex();
    if matrix.rows() != expected_dim {
        bail!(
            "state in {} has dimension {}, expected {expected_dim}",
            path.display(),
            matrix.rows()
        );
    }
    let state = SemiDensityMatrix::new_hermitized(matrix)
        .with_context(|| format!("{} is not a semi-density matrix", path.display()))?;
    Ok((state, doc))
}

fn emit(report: &ExperimentReport, common: &Common) -> Result<bool> {
    let text = match common.format {
        OutputFormat::Json => report.to_json()?,
        OutputFormat::Csv => report.to_csv(),
    };
    println!("{text}");
    if let Some(path) = &common.out {
        std::fs::write(path, &text)
            .with_context(|| format!("writing report to {}", path.display()))?;
    }
    Ok(report.verdict)
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Mu {
            command: MuCommand::Build { common },
        } => {
            let mu = UniversalMatrix::build(common.qubits, common.budget)?;
            let text = mu.to_json()?;
            match &common.out {
                Some(path) => {
                    std::fs::write(path, &text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!(
                        "built mu: qubits={} budget={} ledger={} trace={} -> {}",
                        mu.n_qubits(),
                        mu.budget(),
                        mu.ledger().len(),
                        mu.trace(),
                        path.display()
                    );
                }
                None => println!("{text}"),
            }
            Ok(true)
        }
        Command::Entropy { common, state } => {
            let mu = mu_cached(common.qubits, common.budget)?;
            let (sigma, _) = load_state(&state, mu.dim())?;
            let h = entropy(&sigma, &mu)?;
            let overlap = mu.expectation(&sigma)?;
            let mut report = ExperimentReport::new("entropy", common.params(0));
            report.info(
                "entropy",
                fields(vec![
                    (
                        "entropy_bits",
                        match h {
                            Entropy::Finite(k) => FieldValue::Int(k),
                            Entropy::Infinite => FieldValue::Text("inf".into()),
                        },
                    ),
                    ("trace_mu_sigma", FieldValue::float(overlap)),
                    ("state_trace", FieldValue::float(sigma.trace())),
                ]),
            );
            emit(&report, &common)
        }
        Command::Deficiency {
            common,
            sigma,
            rho,
            ledger_limit,
        } => {
            let mu = mu_cached(common.qubits, common.budget)?;
            let (sigma_state, _) = load_state(&sigma, mu.dim())?;
            let (rho_state, rho_doc) = load_state(&rho, mu.dim())?;
            let rho_exact = rho_doc.to_elementary().ok();
            let family = default_test_family(&rho_state, rho_exact.as_ref(), &mu)?;
            let score = deficiency(&sigma_state, &family)?;
            let mut report = ExperimentReport::new("deficiency", common.params(0));
            report.info(
                "score",
                fields(vec![
                    ("value_log2", FieldValue::float(score.value_or_neg_inf())),
                    ("aggregate", FieldValue::float(score.aggregate)),
                    ("family_id", FieldValue::Text(score.family_id.clone())),
                    ("family_size", FieldValue::Int(family.tests().len() as i64)),
                ]),
            );
            // Top ledger rows by contribution.
            let mut rows: Vec<(f64, String, f64, f64, usize)> = family
                .tests()
                .iter()
                .map(|t| {
                    let trace = t.matrix.expectation(&sigma_state);
                    (
                        t.weight * trace,
                        t.id.clone(),
                        t.weight,
                        trace,
                        t.provenance.len(),
                    )
                })
                .collect();
            rows.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let shown = if ledger_limit == 0 {
                rows.len()
            } else {
                ledger_limit.min(rows.len())
            };
            for (rank, (contribution, id, weight, trace, provenance)) in
                rows.into_iter().take(shown).enumerate()
            {
                report.info(
                    format!("ledger-{rank:05}"),
                    fields(vec![
                        ("test_id", FieldValue::Text(id)),
                        ("weight", FieldValue::float(weight)),
                        ("trace_value", FieldValue::float(trace)),
                        ("contribution", FieldValue::float(contribution)),
                        ("provenance_steps", FieldValue::Int(provenance as i64)),
                    ]),
                );
            }
            emit(&report, &common)
        }
        Command::MutualInfo { common, sigma, rho } => {
            let mu = mu_cached(common.qubits, common.budget)?;
            let (sigma_state, _) = load_state(&sigma, mu.dim())?;
            let (rho_state, _) = load_state(&rho, mu.dim())?;
            let family = product_test_family(&mu)?;
            let score = mutual_information(&sigma_state, &rho_state, &family)?;
            let swapped = mutual_information(&rho_state, &sigma_state, &family)?;
            let mut report = ExperimentReport::new("mutual-info", common.params(0));
            report.check(
                "score",
                score.aggregate.to_bits() == swapped.aggregate.to_bits(),
                fields(vec![
                    ("value_log2", FieldValue::float(score.value_or_neg_inf())),
                    ("aggregate", FieldValue::float(score.aggregate)),
                    ("family_id", FieldValue::Text(score.family_id.clone())),
                    (
                        "swap_symmetric",
                        FieldValue::Bool(score.aggregate.to_bits() == swapped.aggregate.to_bits()),
                    ),
                ]),
            );
            emit(&report, &common)
        }
        Command::Addition { common } => emit(&exp_addition(&common.params(0))?, &common),
        Command::Conservation { common } => {
            emit(&exp_conservation(&common.params(0))?, &common)
        }
        Command::Selfinfo { common } => emit(&exp_selfinfo(&common.params(20000))?, &common),
        Command::Povm { common } => emit(&exp_povm(&common.params(0))?, &common),
        Command::NoCloning { common } => emit(&exp_nocloning(&common.params(500))?, &common),
        Command::ExploreConjectures { common } => {
            emit(&explore_conjectures(&common.params(16))?, &common)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
