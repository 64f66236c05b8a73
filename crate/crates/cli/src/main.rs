mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hgs_core::convergence::analyze_methods;
use hgs_core::corpus::{self, random_in_class, CorpusClass, CorpusId};
use hgs_core::graph::IndexSet;
use hgs_core::linalg::IterationMethod;
use hgs_core::precondition::{from_strategy, verify_preconditioned, Preconditioner, Strategy};
use hgs_core::solver::{default_maxit, preconditioned_solve, solve, zeros, SolveStatus, DEFAULT_TOL};
use hgs_core::{classify, mm, numerical_verdict, Complex64, ComplexMatrix};

use report::{Entry, Input, PreconditionOut, Report, SolveOut};

const EXIT_INPUT: u8 = 2;
const EXIT_DISAGREE: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(name = "hgs", version, about = "Gauss-Seidel convergence analysis for H-matrices")]
struct Cli {
    /// Print one JSON document instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Report wall-clock time.
    #[arg(long, global = true)]
    timing: bool,

    /// Replace entries of modulus at most TOL by exact zeros before analysis.
    #[arg(long, global = true, value_name = "TOL")]
    drop_tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dominance class, H-class, irreducibility and Frobenius blocks.
    Classify {
        /// Matrix Market file, or `corpus:<id>`.
        input: String,
    },
    /// Theorem verdicts against numerical spectral radii.
    Analyze {
        /// One or more Matrix Market files or `corpus:<id>` names.
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values = ["j", "fgs", "bgs", "sgs"])]
        method: Vec<IterationMethod>,
    },
    /// Build a Gauss-type preconditioner and check the radius bounds.
    Precondition {
        input: String,
        /// first-column, gauss-chain, column-k or schur-alpha.
        #[arg(long)]
        strategy: Strategy,
        /// 1-based pivot for column-k and gauss-chain.
        #[arg(long)]
        k: Option<usize>,
        /// 1-based index set for schur-alpha, e.g. `3,4`.
        #[arg(long)]
        alpha: Option<String>,
        /// Write the preconditioned matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the stationary iteration on `A x = b`.
    Solve {
        input: String,
        /// Right-hand side vector file; defaults to all ones.
        rhs: Option<PathBuf>,
        #[arg(long, default_value = "sgs")]
        method: IterationMethod,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Sweep limit; defaults to a budget derived from the spectral radius.
        #[arg(long)]
        maxit: Option<usize>,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        alpha: Option<String>,
        /// Write the solution vector here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a corpus matrix (ex11A, ex11B, ex12A, ex12B, ex62, family61) or a
    /// random member of a class (SDD, IDD, DE_irreducible, GDE_irreducible,
    /// MixedH, NotH).
    Gen {
        id: String,
        /// Order for family61 and the random classes.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

impl From<hgs_core::Error> for Failure {
    fn from(e: hgs_core::Error) -> Self {
        input_error(e.to_string())
    }
}

fn load(spec: &str, drop_tol: Option<f64>) -> Result<(Input, ComplexMatrix), Failure> {
    let a = match spec.strip_prefix("corpus:") {
        Some(id) => corpus::get(&id.parse::<CorpusId>()?)?,
        None => {
            let text = fs::read_to_string(spec).map_err(|e| input_error(format!("{spec}: {e}")))?;
            mm::parse_matrix(&text).map_err(|e| input_error(format!("{spec}: {e}")))?
        }
    };
    let a = match drop_tol {
        Some(t) if !(t >= 0.0 && t.is_finite()) => {
            return Err(input_error("--drop-tol must be a finite nonnegative number"))
        }
        Some(t) => a.thresholded(t),
        None => a,
    };
    Ok((Input { source: spec.to_string(), order: a.order(), drop_tol }, a))
}

fn write_file(path: &Path, text: &str) -> Result<String, Failure> {
    fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn pivot_arg(k: Option<usize>, n: usize) -> Result<Option<usize>, Failure> {
    match k {
        None => Ok(None),
        Some(k) if (1..=n).contains(&k) => Ok(Some(k - 1)),
        Some(k) => Err(input_error(format!("--k {k} is out of range 1..={n}"))),
    }
}

fn build_preconditioner(
    a: &ComplexMatrix,
    strategy: Strategy,
    k: Option<usize>,
    alpha: Option<&str>,
) -> Result<Preconditioner, Failure> {
    let n = a.order();
    let k = pivot_arg(k, n)?;
    let alpha = alpha.map(|s| IndexSet::parse_one_based(s, n)).transpose()?;
    Ok(from_strategy(a, strategy, k, alpha.as_ref())?)
}

fn run(cli: &Cli) -> Result<(Report, u8), Failure> {
    let mut code = 0;
    let (command, results) = match &cli.command {
        Command::Classify { input } => {
            let (input, a) = load(input, cli.drop_tol)?;
            let class = classify(&a);
            let fnf = hgs_core::frobenius_normal_form(&a);
            ("classify", vec![Entry { classification: Some(class), fnf_blocks: Some(fnf.blocks), ..Entry::new(input) }])
        }
        Command::Analyze { inputs, method } => {
            let loaded = inputs.iter().map(|s| load(s, cli.drop_tol)).collect::<Result<Vec<_>, _>>()?;
            let reports = std::thread::scope(|scope| {
                let handles: Vec<_> =
                    loaded.iter().map(|(_, a)| scope.spawn(move || analyze_methods(a, method))).collect();
                handles.into_iter().map(|h| h.join().expect("analysis worker panicked")).collect::<Vec<_>>()
            });
            let mut results = Vec::new();
            for ((input, _), r) in loaded.into_iter().zip(reports) {
                if !r.all_agree() {
                    code = EXIT_DISAGREE;
                }
                results.push(Entry {
                    classification: Some(r.classification),
                    fnf_blocks: Some(r.fnf.blocks),
                    methods: Some(r.methods),
                    ..Entry::new(input)
                });
            }
            ("analyze", results)
        }
        Command::Precondition { input, strategy, k, alpha, out } => {
            let (input, a) = load(input, cli.drop_tol)?;
            let p = build_preconditioner(&a, *strategy, *k, alpha.as_deref())?;
            let check = verify_preconditioned(&a, &p);
            if !check.all_bounds_hold() {
                code = EXIT_DISAGREE;
            }
            let output =
                out.as_deref().map(|path| write_file(path, &mm::write_matrix(&check.preconditioned))).transpose()?;
            let pre = PreconditionOut::new(*strategy, &p, check);
            ("precondition", vec![Entry { preconditioner: Some(pre), output, ..Entry::new(input) }])
        }
        Command::Solve { input, rhs, method, tol, maxit, strategy, k, alpha, out } => {
            let (input, a) = load(input, cli.drop_tol)?;
            let n = a.order();
            let b = match rhs {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
                    mm::parse_vector(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?
                }
                None => vec![Complex64::new(1.0, 0.0); n],
            };
            if !(*tol > 0.0 && tol.is_finite()) {
                return Err(input_error("--tol must be a positive number"));
            }
            let p = strategy.map(|s| build_preconditioner(&a, s, *k, alpha.as_deref())).transpose()?;
            let system = p.as_ref().map_or_else(|| a.clone(), |p| p.apply(&a));
            let maxit =
                maxit.unwrap_or_else(|| default_maxit(n, numerical_verdict(&system, *method).ok().map(|(r, _)| r)));
            let result = match &p {
                Some(p) => preconditioned_solve(&a, &b, p, *method, &zeros(n), *tol, maxit)?,
                None => solve(&a, &b, *method, &zeros(n), *tol, maxit)?,
            };
            if result.status != SolveStatus::Converged {
                code = EXIT_NO_CONVERGENCE;
            }
            let output = out.as_deref().map(|path| write_file(path, &mm::write_vector(&result.x))).transpose()?;
            let s = SolveOut::new(*method, *strategy, maxit, result);
            ("solve", vec![Entry { solve: Some(s), output, ..Entry::new(input) }])
        }
        Command::Gen { id, n, seed, out } => {
            let a = generate(id, *n, *seed)?;
            let text = mm::write_matrix(&a);
            let input = Input { source: id.clone(), order: a.order(), drop_tol: None };
            let entry = match out {
                Some(path) => Entry { output: Some(write_file(path, &text)?), ..Entry::new(input) },
                None => Entry { matrix_market: Some(text), ..Entry::new(input) },
            };
            ("gen", vec![entry])
        }
    };
    Ok((Report::new(command, results), code))
}

fn generate(id: &str, n: Option<usize>, seed: u64) -> Result<ComplexMatrix, Failure> {
    if let Ok(class) = id.parse::<CorpusClass>() {
        let n = n.ok_or_else(|| input_error(format!("{class} needs --n")))?;
        return Ok(random_in_class(class, n, seed)?);
    }
    if id.eq_ignore_ascii_case("family61") && !n.is_some_and(|n| n >= 2) {
        return Err(input_error("family61 needs --n of at least 2"));
    }
    Ok(corpus::get(&CorpusId::from_name(id, n)?)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok((mut report, code)) => {
            if cli.timing {
                report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.render());
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
