use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nclp::algebra::{Algebra, State};
use nclp::expectation::Subalgebra;
use nclp::factory::{random_invariant_inclusion, random_isometry_data, well_conditioned_state};
use nclp::isometry::{build_isometry, classify_with, ClassifyOptions, Verdict};
use nclp::json::{from_json, to_json, Wire};
use nclp::lp::{lp_norm, state_power, LpMap, LpVector};
use nclp::suites::{parse_sizes, run_suite, Suite};

#[derive(Parser)]
#[command(name = "nclp", version, about = "Noncommutative L_p toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as JSON.
    #[command(subcommand)]
    Gen(Gen),
    /// Print the L_p norm of a vector file.
    Norm {
        vector: PathBuf,
        /// Exponent; defaults to the one stored in the file.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Classify an L_p map against a reference state.
    Classify {
        map: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 48)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Algebras as comma-separated block lists, e.g. `2,3,2+1`.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<f64>>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Out {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Gen {
    /// `{"blocks": [...]}` from a block list such as `2+1`.
    Algebra {
        #[arg(long)]
        sizes: String,
        #[arg(long, value_delimiter = ',')]
        trace_weights: Option<Vec<f64>>,
        #[command(flatten)]
        out: Out,
    },
    /// A seeded faithful state, or its density power as an L_p vector.
    State {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tracial: bool,
        /// Write `φ^{1/p}` as an L_p vector instead of the state.
        #[arg(long)]
        as_vector: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// A subalgebra of the given parent.
    Subalgebra {
        #[arg(long)]
        parent: PathBuf,
        #[arg(long, value_enum, default_value_t = SubKind::Diagonal)]
        kind: SubKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Seeded isometry data; writes the built map and its reference state.
    Isometry {
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reference state output.
        #[arg(long)]
        state_out: Option<PathBuf>,
        /// Full `(π, w, φ, φ̄)` output.
        #[arg(long)]
        data_out: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SubKind {
    Diagonal,
    Scalars,
    Full,
    /// Image of a random invariant embedding of the parent's block list.
    Random,
}

fn emit(out: &Out, json: &str) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, format!("{json}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => print_line(json),
    }
}

/// Print to stdout; a closed pipe is not an error.
fn print_line(s: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{s}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn read<W: Wire>(path: &Path) -> Result<W> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn single_algebra(sizes: &str) -> Result<Algebra> {
    let mut menu = parse_sizes(sizes)?;
    if menu.len() != 1 {
        bail!("expected one algebra, e.g. `2+1`");
    }
    Ok(Algebra::new(menu.remove(0))?)
}

/// Shortest decimal with at most 12 fractional digits, always with a point.
fn format_number(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

fn generate(g: Gen) -> Result<()> {
    match g {
        Gen::Algebra {
            sizes,
            trace_weights,
            out,
        } => {
            let mut alg = single_algebra(&sizes)?;
            if let Some(w) = trace_weights {
                alg = alg.with_trace_weights(w)?;
            }
            emit(&out, &to_json(&alg))
        }
        Gen::State {
            algebra,
            seed,
            tracial,
            as_vector,
            out,
        } => {
            let alg: Algebra = read(&algebra)?;
            let state = if tracial {
                State::<f64>::tracial(&alg)
            } else {
                well_conditioned_state(&alg, &mut ChaCha8Rng::seed_from_u64(seed))
            };
            match as_vector {
                Some(p) => emit(&out, &to_json(&state_power(&state, 1.0 / p)?)),
                None => emit(&out, &to_json(&state)),
            }
        }
        Gen::Subalgebra {
            parent,
            kind,
            seed,
            out,
        } => {
            let parent: Algebra = read(&parent)?;
            let sub = match kind {
                SubKind::Diagonal => Subalgebra::<f64>::diagonal(&parent),
                SubKind::Scalars => Subalgebra::scalars(&parent),
                SubKind::Full => Subalgebra::full(&parent),
                SubKind::Random => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    random_invariant_inclusion::<f64, _>(&parent, &mut rng)?.0
                }
            };
            emit(&out, &to_json(&sub))
        }
        Gen::Isometry {
            sizes,
            p,
            seed,
            state_out,
            data_out,
            out,
        } => {
            let src = single_algebra(&sizes)?;
            let data = random_isometry_data::<f64, _>(&src, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let t = build_isometry(&data, p)?;
            if let Some(path) = state_out {
                emit(&Out { out: Some(path) }, &to_json(data.reference_state()))?;
            }
            if let Some(path) = data_out {
                emit(&Out { out: Some(path) }, &to_json(&data))?;
            }
            emit(&out, &to_json(&t))
        }
    }
}

/// `Ok(true)` for success, `Ok(false)` for a failing verdict.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(g) => generate(g).map(|_| true),
        Command::Norm { vector, p } => {
            let mut v: LpVector<f64> = read(&vector)?;
            if let Some(p) = p {
                v = v.with_p(p)?;
            }
            print_line(&format_number(lp_norm(&v)))?;
            Ok(true)
        }
        Command::Classify {
            map,
            state,
            p,
            samples,
            seed,
            out,
        } => {
            let t: LpMap<f64> = read(&map)?;
            let t = t.with_p(p)?;
            let phi: State<f64> = read(&state)?;
            let opts = ClassifyOptions {
                samples,
                seed,
                ..ClassifyOptions::default()
            };
            let report = classify_with(&t, &phi, p, &opts)?;
            emit(&out, &report.to_json())?;
            Ok(report.verdict == Verdict::Accept)
        }
        Command::Verify {
            suite,
            seed,
            sizes,
            p_list,
            samples,
            cases,
            tol,
            out,
        } => {
            let suite: Suite = suite.parse()?;
            let mut cfg = suite.default_config();
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(s) = sizes {
                cfg.sizes = parse_sizes(&s)?;
            }
            if let Some(p) = p_list {
                cfg.exponents = p;
            }
            if let Some(s) = samples {
                cfg.samples = s;
            }
            if let Some(c) = cases {
                cfg.cases = c;
            }
            if let Some(t) = tol {
                cfg.tol = t;
            }
            let report = run_suite(&cfg)?;
            emit(&out, &report.to_json())?;
            eprintln!(
                "{}: {} ({} of {} cases failed)",
                report.suite,
                if report.pass { "pass" } else { "FAIL" },
                report.failures,
                report.cases.len()
            );
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
