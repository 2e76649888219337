//! `perverse`: intersection homology of filtered simplicial complexes from
//! the command line.

mod commands;
mod input;

use clap::{Args, Parser, Subcommand};

use input::Failure;

#[derive(Parser)]
#[command(name = "perverse", version, about = "Intersection homology of filtered simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to this path, or to stdout with `-`.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<String>,
}

#[derive(Args)]
pub struct HomologyArgs {
    /// Complex file (or `builtin:NAME`).
    pub complex: String,
    /// Perversity file; 0̄ when omitted.
    #[arg(short, long)]
    pub perversity: Option<String>,
    /// Coefficients: z, q or f<p>.
    #[arg(long, default_value = "z")]
    pub ring: String,
    /// Tame intersection homology.
    #[arg(long)]
    pub tame: bool,
    /// Homology relative to this full subcomplex.
    #[arg(long, value_name = "SUB")]
    pub relative: Option<String>,
    /// Reduce degree 0 when the augmentation allows it.
    #[arg(long)]
    pub reduced: bool,
}

#[derive(Args)]
pub struct ConstructArgs {
    pub complex: String,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<String>,
}

#[derive(Args)]
pub struct ProductArgs {
    pub complex: String,
    /// Number of vertices (circle) or segments (interval) of the second factor.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(short, long)]
    pub output: Option<String>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
pub enum Class {
    King,
    Gm,
    K,
}

#[derive(Args)]
pub struct CheckArgs {
    pub complex: String,
    #[arg(short, long)]
    pub perversity: String,
    #[arg(long, value_enum)]
    pub class: Class,
    /// Equivalence declaration, for `--class k`.
    #[arg(long)]
    pub equiv: Option<String>,
}

#[derive(Args)]
pub struct InvarianceArgs {
    pub fine: String,
    pub coarse: String,
    /// Perversity on the coarse complex.
    #[arg(short, long)]
    pub perversity: Option<String>,
    /// Replaces the pulled-back perversity on the fine complex.
    #[arg(long, value_name = "FILE")]
    pub fine_perversity: Option<String>,
    /// Compare tame homology instead.
    #[arg(long)]
    pub tame: bool,
    /// Coefficient rings, repeatable.
    #[arg(long, default_values = ["z"])]
    pub ring: Vec<String>,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    pub complex: String,
    #[arg(short, long)]
    pub perversity: Option<String>,
    /// Admissible simplices with a funest face.
    #[arg(long)]
    pub funest: bool,
    /// Strata above the top perversity.
    #[arg(long)]
    pub grandes_strates: bool,
    /// Defect counts by dimension.
    #[arg(long)]
    pub defects: bool,
}

#[derive(Subcommand)]
pub enum BuiltinCommand {
    /// Names and kinds of the shipped examples.
    List,
    /// Print or write one example.
    Show {
        name: String,
        #[arg(short, long)]
        output: Option<String>,
    },
}

#[derive(Subcommand)]
enum Command {
    /// Parse a complex and print its strata.
    Validate { complex: String },
    Homology(HomologyArgs),
    Cone(ConstructArgs),
    Suspend(ConstructArgs),
    Sd(ConstructArgs),
    #[command(name = "prod-i")]
    ProdI(ProductArgs),
    #[command(name = "prod-s1")]
    ProdS1(ProductArgs),
    Union {
        first: String,
        second: String,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Test a perversity for membership in a class.
    Check(CheckArgs),
    /// Compare a refinement with its coarsening.
    Invariance(InvarianceArgs),
    Diagnose(DiagnoseArgs),
    #[command(subcommand)]
    Builtin(BuiltinCommand),
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = commands::Output { json: cli.json };
    match cli.command {
        Command::Validate { complex } => commands::validate(&complex, &out),
        Command::Homology(a) => commands::homology(&a, &out),
        Command::Cone(a) => commands::construct(&a.complex, None, a.output.as_deref(), commands::Shape::Cone),
        Command::Suspend(a) => commands::construct(&a.complex, None, a.output.as_deref(), commands::Shape::Suspension),
        Command::Sd(a) => commands::construct(&a.complex, None, a.output.as_deref(), commands::Shape::Subdivision),
        Command::ProdI(a) => {
            commands::construct(&a.complex, None, a.output.as_deref(), commands::Shape::Interval(a.m.unwrap_or(1)))
        }
        Command::ProdS1(a) => {
            commands::construct(&a.complex, None, a.output.as_deref(), commands::Shape::Circle(a.m.unwrap_or(3)))
        }
        Command::Union { first, second, output } => {
            commands::construct(&first, Some(&second), output.as_deref(), commands::Shape::Union)
        }
        Command::Check(a) => commands::check(&a, &out),
        Command::Invariance(a) => commands::invariance(&a, &out),
        Command::Diagnose(a) => commands::diagnose(&a, &out),
        Command::Builtin(b) => commands::builtin(&b, &out),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return;
        }
        Err(e) => {
            let f = Failure::usage(e.to_string().trim_end());
            eprintln!("{}", f.to_json());
            std::process::exit(f.code);
        }
    };
    if let Err(f) = run(cli) {
        eprintln!("{}", f.to_json());
        std::process::exit(f.code);
    }
}
