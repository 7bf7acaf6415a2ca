use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use toralrank::frontend::{self, corpus, CertificateDocument, ModelDocument, OpError};
use toralrank::SearchSpace;

/// Sullivan models, toral rank witnesses and their certificates.
#[derive(Parser)]
#[command(name = "toralrank", version)]
struct Cli {
    /// Print the certificate as JSON instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check degrees and D∘D = 0 of one model or witness, or of every one in the file.
    CheckD2 {
        file: PathBuf,
        #[arg(long)]
        model: Option<String>,
    },
    /// Betti numbers of a model or of a witness' Borel model.
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        model: String,
        /// Defaults to the formal dimension bound.
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Decide whether cohomology is finite dimensional.
    Elliptic {
        file: PathBuf,
        #[arg(long)]
        model: String,
    },
    VerifyWitness {
        file: PathBuf,
        #[arg(long)]
        witness: String,
    },
    VerifyMapWitness {
        file: PathBuf,
        #[arg(long)]
        witness: String,
    },
    /// Bounded search for a witness on a model, or for a map witness on a map.
    Search {
        file: PathBuf,
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        model: Option<String>,
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        rank: usize,
        /// Comma separated rationals, tried in the given order.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Option<Vec<String>>,
        #[arg(long, default_value_t = 2)]
        max_terms: usize,
        /// Cap on complete assignments evaluated; 0 removes the cap.
        #[arg(long)]
        max_assignments: Option<u64>,
    },
    /// Ranks of the map induced in cohomology.
    InducedMap {
        file: PathBuf,
        #[arg(long)]
        map: String,
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Run the bundled example suite.
    Corpus,
}

fn load(path: &PathBuf) -> Result<ModelDocument, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    frontend::parse(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn parse_coeff(s: &str) -> Result<BigRational, String> {
    let t = s.trim().replace('−', "-");
    t.parse::<BigRational>()
        .map_err(|_| format!("bad coefficient '{s}'"))
}

fn op(r: Result<CertificateDocument, OpError>) -> Result<CertificateDocument, String> {
    r.map_err(|e| e.to_string())
}

fn run_corpus(json: bool) -> ExitCode {
    let reports = corpus::run_corpus();
    let ok = reports.iter().all(|r| r.passed());
    if json {
        let v: Vec<_> = reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "fixture": r.name,
                    "passed": r.passed(),
                    "checks": r.checks.iter().map(|c| serde_json::json!({
                        "check": c.check.to_string(),
                        "passed": c.passed,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&v).expect("JSON values serialize"));
    } else {
        for r in &reports {
            for c in &r.checks {
                println!(
                    "{:<18} {:<4} {}",
                    r.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.check
                );
                if !c.passed {
                    for line in c.detail.lines() {
                        println!("{:<23} {line}", "");
                    }
                }
            }
        }
        let passed = reports.iter().filter(|r| r.passed()).count();
        println!("{passed}/{} fixtures passed", reports.len());
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn dispatch(cli: &Cli) -> Result<CertificateDocument, String> {
    match &cli.command {
        Command::CheckD2 { file, model } => op(frontend::check_d2(&load(file)?, model.as_deref())),
        Command::Cohomology {
            file,
            model,
            max_degree,
        } => op(frontend::cohomology(&load(file)?, model, *max_degree)),
        Command::Elliptic { file, model } => op(frontend::elliptic(&load(file)?, model)),
        Command::VerifyWitness { file, witness } => op(frontend::verify_witness(&load(file)?, witness)),
        Command::VerifyMapWitness { file, witness } => op(frontend::verify_map_witness(&load(file)?, witness)),
        Command::Search {
            file,
            model,
            map,
            rank,
            coeffs,
            max_terms,
            max_assignments,
        } => {
            let doc = load(file)?;
            let mut space = SearchSpace {
                max_terms: *max_terms,
                ..SearchSpace::default()
            };
            if let Some(cs) = coeffs {
                space.coefficients = cs.iter().map(|c| parse_coeff(c)).collect::<Result<_, _>>()?;
            }
            if let Some(cap) = max_assignments {
                space.max_assignments = (*cap > 0).then_some(*cap);
            }
            let name = model.as_deref().or(map.as_deref()).expect("clap requires one");
            op(frontend::search(&doc, name, *rank, &space))
        }
        Command::InducedMap { file, map, max_degree } => op(frontend::induced_map(&load(file)?, map, *max_degree)),
        Command::Corpus => unreachable!("handled before dispatch"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if matches!(cli.command, Command::Corpus) {
        return run_corpus(cli.json);
    }
    match dispatch(&cli) {
        Ok(cert) => {
            if cli.json {
                println!("{}", cert.render_json());
            } else {
                println!("{}", cert.summary);
            }
            ExitCode::from(cert.exit_code() as u8)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
