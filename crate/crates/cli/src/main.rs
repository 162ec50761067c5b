use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quadgenus::oracle::SearchBudget;
use quadgenus_cli::commands::{cmd_build, cmd_embed, cmd_faces, cmd_genus, cmd_oracle, cmd_verify};
use quadgenus_cli::selftest::{cmd_selftest, SELFTEST_SEED};
use quadgenus_cli::Result;

#[derive(Parser)]
#[command(
    name = "quadgenus",
    version,
    about = "Minimum-genus embeddings of product graphs"
)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the graph of a family expression such as "K(4,4)xC(6)".
    Build {
        expr: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a minimal quadrilateral embedding of a supported family.
    Embed {
        expr: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-trace an embedding file and compare it with its certificate.
    Verify {
        embedding: PathBuf,
        /// Certificate to compare with (default: the sibling .cert.json).
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// List the faces of an embedding file.
    Faces { embedding: PathBuf },
    /// Evaluate a closed-form genus formula; parameters are key=value vertex counts.
    Genus {
        #[arg(long)]
        formula: String,
        #[arg(long, num_args = 0..)]
        params: Vec<String>,
    },
    /// Minimum-genus search over rotation systems.
    Oracle {
        graph: PathBuf,
        #[arg(long)]
        target: Option<u64>,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the witness embedding here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run acceptance criteria 1 to 9.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = SELFTEST_SEED)]
        seed: u64,
    },
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { expr, out } => {
            let (_, s) = cmd_build(&expr, out.as_deref())?;
            if cli.json {
                print_json(&s);
            } else {
                println!("n={} m={} bipartite={}", s.n, s.m, s.bipartite);
            }
        }
        Command::Embed { expr, out } => {
            let res = cmd_embed(&expr, &out)?;
            let c = &res.certificate;
            if cli.json {
                print_json(c);
            } else {
                println!(
                    "{}: n={} m={} f={} genus={} lower_bound={} quadrilateral={} minimal={}",
                    c.construction_tag,
                    c.n,
                    c.m,
                    c.f,
                    c.genus,
                    c.lower_bound,
                    c.quadrilateral,
                    c.minimal
                );
            }
        }
        Command::Verify { embedding, cert } => {
            let c = cmd_verify(&embedding, cert.as_deref())?;
            if cli.json {
                print_json(&c);
            } else {
                println!(
                    "ok: n={} m={} f={} genus={} minimal={}",
                    c.n, c.m, c.f, c.genus, c.minimal
                );
            }
        }
        Command::Faces { embedding } => {
            let faces = cmd_faces(&embedding)?;
            if cli.json {
                print_json(&faces);
            } else {
                for f in faces {
                    let walk: Vec<String> = f.iter().map(|v| v.to_string()).collect();
                    println!("{}", walk.join(" "));
                }
            }
        }
        Command::Genus { formula, params } => print_json(&cmd_genus(&formula, &params)?),
        Command::Oracle {
            graph,
            target,
            budget,
            seed,
            out,
        } => {
            let budget = SearchBudget {
                max_rotation_systems: budget,
                seed,
                target_genus: target,
            };
            print_json(&cmd_oracle(&graph, budget, out.as_deref())?);
        }
        Command::Selftest { out, seed } => {
            let report = cmd_selftest(out.as_deref(), seed)?;
            if cli.json {
                print_json(&report);
            } else {
                for c in &report.criteria {
                    let verdict = if c.passed { "PASS" } else { "FAIL" };
                    println!("criterion {} {verdict} {}: {}", c.id, c.name, c.detail);
                }
            }
            report.into_result()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
