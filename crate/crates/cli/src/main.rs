use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use superpull_cli::{run, CliError, Command, Context, Request};

#[derive(Parser)]
#[command(name = "superpull", version, about = "Symbolic pullbacks along superspace maps")]
struct Cli {
    #[command(flatten)]
    context: ContextArgs,

    /// Emit one JSON record per term instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct ContextArgs {
    /// Number of source odd coordinates theta1..thetaq.
    #[arg(long, global = true, default_value_t = 0)]
    q: usize,

    /// Number of auxiliary odd generators eta1..etaL.
    #[arg(long = "L", global = true, default_value_t = 0)]
    aux: usize,

    /// Odd symbol names.
    #[arg(long, global = true, value_delimiter = ',')]
    odd: Vec<String>,

    /// Even symbol names.
    #[arg(long, global = true, value_delimiter = ',')]
    even: Vec<String>,

    /// Function declarations `name` or `name:arity`.
    #[arg(long = "fn", global = true, value_delimiter = ',')]
    functions: Vec<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Pull a function (or a polynomial in y1..yn) back along a superfield.
    Pullback {
        /// Superfield components; read one per line from stdin if absent.
        #[arg(long = "field")]
        fields: Vec<String>,
        #[arg(long, conflicts_with = "poly")]
        f: Option<String>,
        #[arg(long)]
        poly: Option<String>,
    },
    /// Expand e^Xi applied to a function.
    ExpExpand {
        /// `indices: c1 | c2 | ...`, one per multi-index.
        #[arg(long, required = true)]
        xi: Vec<String>,
        #[arg(long, default_value = "f")]
        f: String,
    },
    /// Recover the vector field coefficients of a superfield.
    Reconstruct {
        #[arg(long = "field")]
        fields: Vec<String>,
    },
    /// Berezin integral over the given generators.
    Berezin {
        #[arg(long)]
        vars: String,
        /// Expression; read from stdin if absent.
        #[arg(long)]
        expr: Option<String>,
    },
    /// Evaluate D_I on a polynomial in s{..}.
    Dop {
        #[arg(long = "I")]
        index: String,
        #[arg(long)]
        poly: Option<String>,
    },
    /// Decide membership in the ideal of s-relations.
    IdealCheck {
        #[arg(long)]
        poly: Option<String>,
    },
    /// Compare both sides of the D_I chain rule.
    ChainCheck {
        #[arg(long = "I")]
        index: String,
        /// Polynomial in y1..ym.
        #[arg(long)]
        poly: String,
        /// Components Y1..Ym as polynomials in s{..}.
        #[arg(long = "y", required = true)]
        y: Vec<String>,
    },
    /// Decide whether a self-map of s-space has identity D-jet.
    TqCheck {
        /// Components in lexicographic order of the positive even indices.
        #[arg(long = "S", required = true)]
        s: Vec<String>,
    },
    /// Map a polynomial in s{..} into the even Grassmann algebra.
    Iso {
        #[arg(long)]
        poly: Option<String>,
    },
    /// Compare the symbolic pullback against direct numeric evaluation.
    OracleCompare {
        #[arg(long = "field")]
        fields: Vec<String>,
        /// Smooth function in u (or u1..un), e.g. `sin(u)`.
        #[arg(long)]
        f: String,
        /// `name=value`, where odd symbols bind to expressions in eta<k>.
        #[arg(long)]
        bind: Vec<String>,
    },
}

fn stdin_text() -> io::Result<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s)?;
    Ok(s.trim().to_string())
}

fn stdin_lines(given: Vec<String>) -> io::Result<Vec<String>> {
    if !given.is_empty() {
        return Ok(given);
    }
    Ok(stdin_text()?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn or_stdin(given: Option<String>) -> io::Result<String> {
    match given {
        Some(s) => Ok(s),
        None => stdin_text(),
    }
}

fn build(sub: Sub) -> io::Result<Command> {
    Ok(match sub {
        Sub::Pullback { fields, f, poly } => Command::Pullback { fields: stdin_lines(fields)?, f, poly },
        Sub::ExpExpand { xi, f } => Command::ExpExpand { xi, f },
        Sub::Reconstruct { fields } => Command::Reconstruct { fields: stdin_lines(fields)? },
        Sub::Berezin { vars, expr } => Command::Berezin { vars, expr: or_stdin(expr)? },
        Sub::Dop { index, poly } => Command::Dop { index, poly: or_stdin(poly)? },
        Sub::IdealCheck { poly } => Command::IdealCheck { poly: or_stdin(poly)? },
        Sub::ChainCheck { index, poly, y } => Command::ChainCheck { index, poly, y },
        Sub::TqCheck { s } => Command::TqCheck { s },
        Sub::Iso { poly } => Command::Iso { poly: or_stdin(poly)? },
        Sub::OracleCompare { fields, f, bind } => Command::OracleCompare { fields: stdin_lines(fields)?, f, bind },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.context;
    let context = Context { q: c.q, aux: c.aux, odd: c.odd, even: c.even, functions: c.functions };
    let command = match build(cli.command) {
        Ok(cmd) => cmd,
        Err(e) => {
            eprintln!("error: reading stdin: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&Request { context, command }) {
        Ok(resp) => {
            for d in &resp.diagnostics {
                eprintln!("{d}");
            }
            print!("{}", if cli.json { resp.to_json_lines() } else { resp.to_text() });
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    e.exit_code() as u8
}
