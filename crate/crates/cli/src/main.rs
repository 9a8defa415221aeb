//! `verify`: batch verification campaigns over finite Grassmannian stages.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grassmann_core::campaign::{self, CampaignConfig, Command};
use grassmann_core::exterior::Stage;
use grassmann_core::scalars::FieldSpec;
use grassmann_core::Error;

const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    version,
    about = "Exact verification campaigns for finite Grassmannian stages"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Big-cell minors against direct pairing, all stages up to --max-symbols.
    Lemma5(Common),
    /// Divisibility up to symmetry for the antichain a_n b_n.
    Antichain(Common),
    /// Strict inclusions of the degree-2 ideal chain at one stage.
    Chain(Common),
    /// Commuting square of transition maps, order lemmas and surjectivity.
    Diagram(Common),
    /// Contraction/deletion correspondence, matroid of a matrix, or a minor test.
    Matroid(Common),
    /// Plücker relations on random points, or coordinates of a given matrix.
    Plucker(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Common {
    /// Coefficient field, `gf:<p>` or `q`; repeatable. Defaults depend on the command.
    #[arg(long = "field", value_name = "FIELD")]
    fields: Vec<FieldSpec>,
    /// Stage `n,p`: exact for chain and antichain, an upper bound elsewhere.
    #[arg(long, value_name = "N,P")]
    stage: Option<Stage>,
    #[arg(long, default_value_t = 6)]
    max_n: u32,
    #[arg(long, default_value_t = 4)]
    lmax: u32,
    #[arg(long, default_value_t = 7)]
    max_symbols: usize,
    /// Random samples per stage and field.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for the ChaCha8 generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Matrix input (CSV, or JSON when the name ends in .json).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Matroid JSON to search for minors in.
    #[arg(long)]
    matroid: Option<PathBuf>,
    /// Matroid JSON of the candidate minor.
    #[arg(long)]
    minor: Option<PathBuf>,
}

fn config(command: Command, c: &Common) -> CampaignConfig {
    let mut cfg = CampaignConfig::new(command);
    if !c.fields.is_empty() {
        cfg.fields = c.fields.clone();
    }
    if c.stage.is_some() {
        cfg.stage = c.stage;
    }
    if let Some(s) = c.samples {
        cfg.samples = s;
    }
    cfg.max_n = c.max_n;
    cfg.lmax = c.lmax;
    cfg.max_symbols = c.max_symbols;
    cfg.seed = c.seed;
    cfg.matrix = c.matrix.clone();
    cfg.matroid = c.matroid.clone();
    cfg.minor = c.minor.clone();
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match &cli.command {
        Sub::Lemma5(c) => (Command::Lemma5, c),
        Sub::Antichain(c) => (Command::Antichain, c),
        Sub::Chain(c) => (Command::Chain, c),
        Sub::Diagram(c) => (Command::Diagram, c),
        Sub::Matroid(c) => (Command::Matroid, c),
        Sub::Plucker(c) => (Command::Plucker, c),
    };
    let cfg = config(command, common);
    let report = match campaign::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verify: {e}");
            return ExitCode::from(match e {
                Error::Input(_)
                | Error::InvalidField(_)
                | Error::InvalidStage { .. }
                | Error::StageTooSmall { .. } => EXIT_USAGE,
                _ => EXIT_ERROR,
            });
        }
    };
    let rendered = match common.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = campaign::write_atomic(path, &rendered) {
                eprintln!("verify: {e}");
                return ExitCode::from(EXIT_ERROR);
            }
            eprintln!(
                "verify {command}: {}",
                if report.passed() { "pass" } else { "fail" }
            );
        }
        None => print!("{rendered}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
