use clap::{Parser, Subcommand};
use nullhom_cli::{cmd_derive, cmd_verify, recover, DeriveTarget, VerifyConfig, EXIT_USAGE};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact verification, derivation and displacement recovery for the
/// de Rham and elasticity complexes.
#[derive(Parser)]
#[command(name = "nullhom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact identity suites and write a conformance report.
    Verify {
        /// Spatial dimension (2 or 3).
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Maximum polynomial degree of the monomial probe bases.
        #[arg(long = "max-degree", default_value_t = 6)]
        max_degree: i64,
        /// Master seed for the randomized spot checks.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Where to write the conformance report JSON.
        #[arg(long, default_value = "conformance-report.json")]
        report: PathBuf,
        /// Worker threads for probe evaluation.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print a derived operator and its sign-resolved closed form.
    Derive {
        /// One of P1, P2, P3, P1_2D, P2_2D.
        #[arg(long)]
        target: String,
        /// Output format: text or json.
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Recover a displacement from a strain JSON along a path JSON.
    Recover {
        /// Strain field JSON file.
        #[arg(long)]
        strain: PathBuf,
        /// Path JSON file ({"vertices": [[..], ..]}).
        #[arg(long)]
        path: PathBuf,
        /// Gauss-Legendre order per segment.
        #[arg(long = "quad-order", default_value_t = 8)]
        quad_order: usize,
        /// Also compare against the straight chord; exit 1 beyond this
        /// tolerance.
        #[arg(long = "check-independence")]
        check_independence: Option<f64>,
        /// Extra sample points along the path.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify {
            dim,
            max_degree,
            seed,
            report,
            jobs,
        } => {
            let cfg = VerifyConfig {
                dim,
                max_degree,
                seed,
                report_path: report,
                jobs,
            };
            match cmd_verify(&cfg) {
                Ok((code, report)) => {
                    for id in &report.identities {
                        println!("{:40} {}", id.name, id.status);
                    }
                    println!(
                        "report written to {} ({})",
                        cfg.report_path.display(),
                        if report.all_passed {
                            "all pass"
                        } else {
                            "FAILURES"
                        }
                    );
                    code
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Command::Derive { target, format } => match DeriveTarget::parse(&target) {
            None => {
                eprintln!("error: unknown target {target:?} (use P1, P2, P3, P1_2D, P2_2D)");
                EXIT_USAGE
            }
            Some(t) => match cmd_derive(t, &format) {
                Ok((code, text)) => {
                    println!("{text}");
                    code
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            },
        },
        Command::Recover {
            strain,
            path,
            quad_order,
            check_independence,
            samples,
            out,
        } => {
            let cfg = recover::RecoverConfig {
                strain_path: strain,
                path_path: path,
                quad_order,
                check_independence,
                samples,
            };
            let (code, csv, log) = recover::cmd_recover(&cfg);
            for line in &log {
                eprintln!("{line}");
            }
            if !csv.is_empty() {
                match out {
                    Some(p) => {
                        if let Err(e) = std::fs::write(&p, &csv) {
                            eprintln!("error: cannot write {}: {e}", p.display());
                            return ExitCode::from(EXIT_USAGE as u8);
                        }
                    }
                    None => print!("{csv}"),
                }
            }
            code
        }
    };
    ExitCode::from(code as u8)
}
