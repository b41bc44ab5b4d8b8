//! Run law suites from a scenario file or flags. Exit 0 when every case passes, 1 when any
//! fails, 2 on bad input.

use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use webtaylor::ll::{Mutation, TruncCfg};
use webtaylor::scenario::{all_suites, Scenario};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MutationArg {
    Dig,
    Seely2,
    Coalgebra,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::Dig => Mutation::Dig,
            MutationArg::Seely2 => Mutation::Seely2,
            MutationArg::Coalgebra => Mutation::Coalgebra,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "webtaylor", version, about = "Check linear-logic, summability and Taylor laws on finite webs")]
struct Cli {
    /// TOML scenario; flags below override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Suite id or group (pcm, spaces, ll, sum, taylor, all). Repeatable.
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Model tag (rel, wrel, pcoh, coh, fin, kothe), comma list, or `all`.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Largest multiset size kept in !X.
    #[arg(long)]
    bang_degree: Option<usize>,
    /// Number of indices in the summation object.
    #[arg(long)]
    s_bound: Option<usize>,
    /// Write the structured report here as well.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Corrupt one structural matrix; the suites should then fail.
    #[arg(long, value_enum)]
    mutation: Option<MutationArg>,
    /// Print every suite id and exit.
    #[arg(long)]
    list_suites: bool,
}

fn build(cli: &Cli) -> Result<Scenario, String> {
    let mut sc = match &cli.scenario {
        Some(p) => Scenario::load(p).map_err(|e| e.to_string())?,
        None => Scenario::default(),
    };
    if !cli.suites.is_empty() {
        sc.suites = cli.suites.clone();
    }
    if let Some(m) = &cli.model {
        sc.model = m.clone();
    }
    if let Some(s) = cli.seed {
        sc.seed = s;
    }
    if let Some(n) = cli.samples {
        sc.samples = n;
    }
    let TruncCfg { bang_degree, s_bound } = sc.trunc;
    sc.trunc = TruncCfg { bang_degree: cli.bang_degree.unwrap_or(bang_degree), s_bound: cli.s_bound.unwrap_or(s_bound) };
    if let Some(m) = cli.mutation {
        sc.mutation = Some(m.into());
    }
    if let Some(r) = &cli.report {
        sc.report = Some(r.display().to_string());
    }
    sc.validate().map_err(|e| e.to_string())?;
    Ok(sc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_suites {
        for s in all_suites() {
            println!("{s}");
        }
        return ExitCode::SUCCESS;
    }
    let sc = match build(&cli) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let run = match sc.run() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.format {
        Format::Text => print!("{}", run.report.render_text()),
        Format::Structured => println!("{}", run.to_json()),
    }
    if let Some(path) = &sc.report {
        if let Err(e) = std::fs::write(path, run.to_json()) {
            eprintln!("error: cannot write {path}: {e}");
            return ExitCode::from(2);
        }
    }
    if run.report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
