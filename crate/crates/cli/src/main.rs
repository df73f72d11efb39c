use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use sturm::connectivity::connection_graph;
use sturm::enumerate::{enumerate_sturm_with, EnumerateOptions};
use sturm::export::{analysis_json, graph_to_dot, graph_to_json, meander_to_svg};
use sturm::families::{chafee_infante, primitive_sigma, three_nose_permutation};
use sturm::kernel::analyze;
use sturm::ode::{
    integrate, model_connection_audit, trajectory_csv, CiField, ModelState, ReversibleField,
    StepControl, VectorField,
};
use sturm::transforms::{kappa, lift, rho, suspend_times};
use sturm::verify::{run_suite, Bounds, Suite};
use sturm::{MeanderPermutation, SturmError};

#[derive(Parser)]
#[command(name = "sturm", version, about = "Sturm meanders, connection graphs and reversibility checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Morse indices and zero numbers of a permutation, as JSON.
    Analyze {
        /// One-line permutation, e.g. "1 6 3 4 5 2 7".
        #[arg(required = true, num_args = 1..)]
        perm: Vec<String>,
    },
    /// Print a member of a named family.
    Family {
        #[command(subcommand)]
        family: Family,
    },
    /// Apply a trivial equivalence or suspension.
    Transform {
        #[arg(value_enum)]
        op: TransformOp,
        #[arg(required = true, num_args = 1..)]
        perm: Vec<String>,
        /// Number of suspensions.
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Export the connection graph (dot, json) or the meander (svg).
    Graph {
        #[arg(required = true, num_args = 1..)]
        perm: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List all Sturm permutations of length N.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Allow N = 11.
        #[arg(long)]
        allow_large: bool,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// Run verification suites; exits 1 on any counterexample.
    Verify {
        /// Suite name, alias, or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        max_p: Option<usize>,
        #[arg(long)]
        max_q: Option<usize>,
        #[arg(long)]
        max_r: Option<usize>,
        #[arg(long)]
        max_sum: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        max_d: Option<usize>,
        #[arg(long)]
        max_s: Option<usize>,
        /// Emit JSON reports instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Reversible ODE model.
    Ode {
        #[command(subcommand)]
        command: OdeCommand,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Chafee–Infante permutation of dimension d.
    Ci {
        #[arg(long)]
        d: usize,
    },
    /// Closed 3-nose meander with nose sizes p and q.
    ThreeNose {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Primitive 3-nose Sturm permutation.
    Primitive {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        q: usize,
        /// Conjugate by kappa.
        #[arg(long)]
        kappa: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    Kappa,
    Rho,
    Suspend,
    Lift,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum OdeCommand {
    /// Heteroclinic audit of the reversible model, as JSON.
    Audit {
        #[arg(long)]
        q: usize,
    },
    /// Integrate one trajectory and print it as CSV.
    Trajectory {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        radius: f64,
        /// Comma-separated angle components (normalized).
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
        #[arg(long, default_value_t = 10.0)]
        time: f64,
        /// Use the Chafee–Infante flow instead of the reversible model.
        #[arg(long)]
        ci: bool,
        /// Stay in a single chart.
        #[arg(long)]
        raw: bool,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Violation(anyhow::Error),
}

impl From<SturmError> for Failure {
    fn from(e: SturmError) -> Self {
        match e {
            SturmError::Parse { .. }
            | SturmError::Empty
            | SturmError::NotABijection { .. }
            | SturmError::EvenLength(_)
            | SturmError::InvalidParameter(_)
            | SturmError::CapExceeded(_)
            | SturmError::UnknownSuite(_) => Failure::Usage(e.into()),
            other => Failure::Violation(other.into()),
        }
    }
}

impl From<sturm::ode::OdeError> for Failure {
    fn from(e: sturm::ode::OdeError) -> Self {
        use sturm::ode::OdeError::*;
        match e {
            InvalidState(_) | InvalidParameter(_) => Failure::Usage(e.into()),
            other => Failure::Violation(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn permutation(words: &[String]) -> Result<MeanderPermutation, Failure> {
    Ok(MeanderPermutation::parse(&words.join(" "))?)
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Usage),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { perm } => {
            let sigma = permutation(&perm)?;
            emit(&analysis_json(&sigma)?, None)
        }
        Command::Family { family } => {
            let sigma = match family {
                Family::Ci { d } => chafee_infante(d)?,
                Family::ThreeNose { p, q } => three_nose_permutation(p, q)?,
                Family::Primitive { r, q, kappa: k } => {
                    let s = primitive_sigma(r, q)?;
                    if k {
                        kappa(&s)
                    } else {
                        s
                    }
                }
            };
            emit(&sigma.to_string(), None)
        }
        Command::Transform { op, perm, times } => {
            let sigma = permutation(&perm)?;
            let out = match op {
                TransformOp::Kappa => kappa(&sigma),
                TransformOp::Rho => rho(&sigma),
                TransformOp::Suspend => suspend_times(&sigma, times)?,
                TransformOp::Lift => lift(&sigma),
            };
            emit(&out.to_string(), None)
        }
        Command::Graph {
            perm,
            format,
            output,
        } => {
            let sigma = permutation(&perm)?;
            let text = match format {
                Format::Svg => meander_to_svg(&sigma)?,
                Format::Dot | Format::Json => {
                    let graph = connection_graph(&analyze(&sigma)?)?;
                    if matches!(format, Format::Dot) {
                        graph_to_dot(&graph, &sigma.to_string())
                    } else {
                        graph_to_json(&graph)
                    }
                }
            };
            emit(&text, output.as_ref())
        }
        Command::Enumerate {
            n,
            allow_large,
            count,
        } => {
            let all = enumerate_sturm_with(
                n,
                EnumerateOptions {
                    allow_large,
                    parallel: true,
                },
            )?;
            if count {
                println!("{}", all.len());
            } else {
                for s in all {
                    println!("{s}");
                }
            }
            Ok(())
        }
        Command::Verify {
            suite,
            max_p,
            max_q,
            max_r,
            max_sum,
            max_n,
            max_d,
            max_s,
            json,
        } => {
            let mut bounds = Bounds::default();
            let set = |slot: &mut usize, v: Option<usize>| {
                if let Some(v) = v {
                    *slot = v;
                }
            };
            set(&mut bounds.max_p, max_p);
            set(&mut bounds.max_q, max_q);
            set(&mut bounds.max_r, max_r);
            set(&mut bounds.max_sum, max_sum);
            set(&mut bounds.max_n, max_n);
            set(&mut bounds.max_d, max_d);
            set(&mut bounds.max_s, max_s);
            if let Some(q) = max_q {
                bounds.max_closed_q = bounds.max_closed_q.min(q.max(2));
                bounds.max_graph_q = bounds.max_graph_q.min(q.max(2));
            }
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![Suite::from_str(&suite)?]
            };
            let mut failed = 0;
            for s in suites {
                let report = run_suite(s, &bounds)?;
                if !report.passed() {
                    failed += 1;
                }
                if json {
                    println!("{}", serde_json::to_string(&report).map_err(|e| anyhow!(e))?);
                } else {
                    print!("{report}");
                }
            }
            if failed > 0 {
                return Err(Failure::Violation(anyhow!("{failed} suite(s) failed")));
            }
            Ok(())
        }
        Command::Ode { command } => match command {
            OdeCommand::Audit { q } => {
                let report = model_connection_audit(q)?;
                println!("{}", report.to_json());
                if report.passed() {
                    Ok(())
                } else {
                    Err(Failure::Violation(anyhow!(
                        "{} mismatch(es) in the audit",
                        report.mismatches.len()
                    )))
                }
            }
            OdeCommand::Trajectory {
                q,
                radius,
                angle,
                time,
                ci,
                raw,
            } => {
                let angle = angle
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| anyhow!("bad angle component: {e}"))?;
                if angle.len() != q {
                    return Err(Failure::Usage(anyhow!("angle needs {q} components")));
                }
                let start = ModelState::new(radius, angle)?;
                let control = if raw {
                    StepControl::raw()
                } else {
                    StepControl::default()
                };
                let field: Box<dyn VectorField<f64>> = if ci {
                    Box::new(CiField::standard(q)?)
                } else {
                    Box::new(ReversibleField::standard(q)?)
                };
                let traj = integrate(field.as_ref(), &start, time, &control)?;
                emit(&trajectory_csv(&traj), None)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
