use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sl2chow::abvar::{fourier, weight_components, PolarizedContext};
use sl2chow::action::{act_closed_form, build_action};
use sl2chow::corr::{compose, Correspondence};
use sl2chow::lefschetz::primitive_decomposition;
use sl2chow::sl2rep::GroupElement;
use sl2chow::{Error, Rational};
use sl2chow_cli::expr::{parse, parse_pair, render, ExprError};
use sl2chow_cli::suite::{configure_workers_from_env, run_suite, SuiteName};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DIMENSION_GUARD: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sl2chow",
    version,
    about = "Exact SL2 action on cycle classes of polarized abelian varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct VarietyArgs {
    /// Dimension of the abelian variety (defaults to the length of --type, else 1).
    #[arg(long)]
    g: Option<usize>,
    /// Polarization type c1,c2,..,cg of positive integers (defaults to all ones).
    #[arg(long = "type", value_name = "C1,C2,..")]
    polarization: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    /// Exponentials of X and Y along an elementary factorization.
    General,
    /// Closed forms along the Bruhat factorization.
    Bruhat,
    /// A single closed form; only for torus, w, -w and unipotent matrices.
    Closed,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier transform of a class.
    Fourier {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long)]
        expr: String,
    },
    /// Action of an element of SL2(Q) on a class.
    Act {
        #[command(flatten)]
        variety: VarietyArgs,
        /// Matrix "a,b;c,d" with rational entries and determinant 1.
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value_t = Route::General)]
        route: Route,
    },
    /// Composition of correspondences: `--expr B --expr A` gives B o A.
    Compose {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long, num_args = 1, required = true)]
        expr: Vec<String>,
    },
    /// Primitive decomposition z = sum theta^k z_q of each graded part.
    Decompose {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long)]
        expr: String,
    },
    /// Runs a verification suite.
    Suite {
        /// brackets, sl2z, formulas12, kunneth, fourier, lefschetz, demazure, isogeny or all.
        name: SuiteName,
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Eval(e) => Failure::Core(e),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn context(args: &VarietyArgs) -> Result<Arc<PolarizedContext>, Failure> {
    let types: Option<Vec<u64>> = args
        .polarization
        .as_deref()
        .map(|s| {
            s.split(',')
                .map(|c| c.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Usage(format!("bad --type '{s}'")))
        })
        .transpose()?;
    let g = match (args.g, &types) {
        (Some(g), Some(t)) if t.len() != g => {
            return Err(Failure::Usage(format!(
                "--type has {} entries but --g is {g}",
                t.len()
            )))
        }
        (Some(g), _) => g,
        (None, Some(t)) => t.len(),
        (None, None) => 1,
    };
    if g == 0 {
        return Err(Failure::Usage("--g must be positive".into()));
    }
    let types = types.unwrap_or_else(|| vec![1; g]);
    Ok(PolarizedContext::new(g, types)?)
}

fn parse_matrix(s: &str) -> Result<GroupElement, Failure> {
    let bad = || Failure::Usage(format!("bad --matrix '{s}', expected \"a,b;c,d\""));
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 2 {
        return Err(bad());
    }
    let mut entries = Vec::with_capacity(4);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 2 {
            return Err(bad());
        }
        for c in cols {
            entries.push(c.trim().parse::<Rational>().map_err(|_| bad())?);
        }
    }
    let [a, b, c, d]: [Rational; 4] = entries.try_into().map_err(|_| bad())?;
    GroupElement::new(a, b, c, d).map_err(|e| Failure::Usage(e.to_string()))
}

#[derive(Serialize)]
struct ClassOutput<'a> {
    command: &'a str,
    g: usize,
    polarization_type: &'a [u64],
    inputs: Vec<String>,
    result: String,
}

#[derive(Serialize)]
struct ComponentOutput {
    degree: u32,
    q: u32,
    power: u32,
    primitive: String,
}

#[derive(Serialize)]
struct DecomposeOutput<'a> {
    command: &'a str,
    g: usize,
    polarization_type: &'a [u64],
    input: String,
    components: Vec<ComponentOutput>,
}

fn print_class(
    command: &str,
    args: &VarietyArgs,
    ctx: &PolarizedContext,
    inputs: Vec<String>,
    result: String,
) {
    match args.format {
        Format::Text => println!("{result}"),
        Format::Structured => {
            let out = ClassOutput {
                command,
                g: ctx.g(),
                polarization_type: ctx.polarization_type(),
                inputs,
                result,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("serializes")
            );
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fourier { variety, expr } => {
            let ctx = context(&variety)?;
            let z = parse(&expr, &ctx)?;
            print_class("fourier", &variety, &ctx, vec![expr], render(&fourier(&z)?));
        }
        Command::Act {
            variety,
            matrix,
            expr,
            route,
        } => {
            let ctx = context(&variety)?;
            let m = parse_matrix(&matrix)?;
            let z = parse(&expr, &ctx)?;
            let out = match route {
                Route::General => build_action(&ctx)?.act_general(&m, &z)?,
                Route::Bruhat => build_action(&ctx)?.act_bruhat(&m, &z)?,
                Route::Closed => act_closed_form(&m, &z)?,
            };
            print_class("act", &variety, &ctx, vec![matrix, expr], render(&out));
        }
        Command::Compose { variety, expr } => {
            let ctx = context(&variety)?;
            if expr.len() != 2 {
                return Err(Failure::Usage(format!(
                    "compose needs exactly two --expr, got {}",
                    expr.len()
                )));
            }
            let beta = Correspondence::new(parse_pair(&expr[0], &ctx)?)?;
            let alpha = Correspondence::new(parse_pair(&expr[1], &ctx)?)?;
            let out = compose(&beta, &alpha)?;
            print_class("compose", &variety, &ctx, expr, render(out.value()));
        }
        Command::Decompose { variety, expr } => {
            let ctx = context(&variety)?;
            let z = parse(&expr, &ctx)?;
            let action = build_action(&ctx)?;
            let mut components = Vec::new();
            for (degree, part) in weight_components(&z) {
                for c in primitive_decomposition(&action, &part)? {
                    components.push(ComponentOutput {
                        degree,
                        q: c.q,
                        power: c.power,
                        primitive: render(&c.primitive),
                    });
                }
            }
            match variety.format {
                Format::Text => {
                    if components.is_empty() {
                        println!("0");
                    }
                    for c in &components {
                        println!(
                            "degree {}  q={}  theta^{} * ({})",
                            c.degree, c.q, c.power, c.primitive
                        );
                    }
                }
                Format::Structured => {
                    let out = DecomposeOutput {
                        command: "decompose",
                        g: ctx.g(),
                        polarization_type: ctx.polarization_type(),
                        input: expr,
                        components,
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&out).expect("serializes")
                    );
                }
            }
        }
        Command::Suite {
            name,
            variety,
            seed,
        } => {
            let ctx = context(&variety)?;
            let report = run_suite(name, &ctx, seed)?;
            match variety.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Structured => print!("{}", report.to_structured()),
            }
            if !report.passed() {
                return Err(Failure::ChecksFailed);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    configure_workers_from_env();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::DimensionGuard { .. } => EXIT_DIMENSION_GUARD,
                Error::BracketViolation(_) => EXIT_CHECK_FAILED,
                _ => EXIT_USAGE,
            })
        }
    }
}
