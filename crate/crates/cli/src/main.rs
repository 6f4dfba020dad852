use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use berlab::blockops::BerConvention;
use berlab::harness::report::{render, to_json_string};
use berlab::harness::{case, explore, run_campaign, CampaignConfig, HarnessError, OutputFormat};
use berlab::rkhs::KernelTag;
use berlab::theorems::TheoremId;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "berlab", version, about = "Seeded verification of Berezin-number inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write its report.
    Verify {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Master seed; same as `--master-seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Record wall time in the report (makes it run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Minimize the slack of one checker starting from its worst random witness.
    Explore {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Master seed; same as `--master-seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Reproduce one trial from its seed and print its certificate.
    Case {
        #[command(flatten)]
        campaign: CampaignArgs,
        #[arg(long)]
        theorem: TheoremId,
        /// Trial seed as recorded in a certificate witness.
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        link: Option<usize>,
        /// `pair`, `joint`, `directsum`, or `none` for convention-free links.
        #[arg(long, value_parser = parse_convention)]
        convention: Option<ConventionArg>,
    },
}

/// Campaign settings; flags override values read from `--config`.
#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated `n1xn2` pairs.
    #[arg(long, value_parser = parse_dims_arg)]
    dims: Option<Dims>,
    #[arg(long, value_delimiter = ',')]
    kernel: Option<Vec<KernelTag>>,
    #[arg(long, value_delimiter = ',')]
    theorems: Option<Vec<TheoremId>>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone)]
struct Dims(Vec<(usize, usize)>);

fn parse_dims_arg(s: &str) -> Result<Dims, String> {
    berlab::harness::parse_dims(s).map(Dims)
}

#[derive(Clone, Copy)]
struct ConventionArg(Option<BerConvention>);

fn parse_convention(s: &str) -> Result<ConventionArg, String> {
    if s.eq_ignore_ascii_case("none") {
        Ok(ConventionArg(None))
    } else {
        s.parse().map(|c| ConventionArg(Some(c)))
    }
}

impl CampaignArgs {
    fn resolve(mut self, seed: Option<u64>) -> Result<CampaignConfig, HarnessError> {
        self.master_seed = seed.or(self.master_seed);
        let mut cfg = match &self.config {
            Some(path) => CampaignConfig::from_file(path)?,
            None => CampaignConfig::default(),
        };
        if let Some(v) = self.master_seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.trials {
            cfg.trials_per_checker = v;
        }
        if let Some(Dims(v)) = self.dims {
            cfg.dims = v;
        }
        if let Some(v) = self.kernel {
            cfg.kernel_families = v;
        }
        if let Some(v) = self.theorems {
            cfg.checker_filter = v;
        }
        if let Some(v) = self.tol {
            cfg.check_tol = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Verify {
            campaign,
            seed,
            out,
            format,
            timing,
        } => {
            let mut cfg = campaign.resolve(seed)?;
            if let Some(f) = format {
                cfg.format = f;
            }
            if out.is_some() {
                cfg.output = out;
            }
            let start = Instant::now();
            let mut report = run_campaign(&cfg)?;
            let elapsed = start.elapsed();
            if timing {
                report.wall_time_ms = Some(elapsed.as_millis() as u64);
            }
            write_output(&render(&report, cfg.format)?, cfg.output.as_ref())?;
            let anomalies: usize = report.anomalies.iter().map(|a| a.count).sum();
            eprintln!(
                "{} aggregates, {} gating failures, {} anomalous trials, {:.1} s",
                report.results.len(),
                report.gating_failures(),
                anomalies,
                elapsed.as_secs_f64()
            );
            for a in report.results.iter().filter(|a| a.failures > 0) {
                let conv = a.convention.map(|c| c.as_str()).unwrap_or("-");
                eprintln!(
                    "FAIL {} link {} {}: {}/{} trials, min slack {:.3e} (seed {})",
                    a.theorem_id, a.link, conv, a.failures, a.trials, a.min_slack, a.min_slack_seed
                );
            }
            Ok(report.exit_code() as u8)
        }
        Command::Explore {
            campaign,
            seed,
            theorem,
            budget,
        } => {
            let cfg = campaign.resolve(seed)?;
            let cert = explore(&cfg, theorem, budget)?;
            print!("{}", to_json_string(&cert)?);
            Ok(u8::from(cert.is_violation()))
        }
        Command::Case {
            campaign,
            theorem,
            seed,
            link,
            convention,
        } => {
            let cfg = campaign.resolve(None)?;
            let cert = case(&cfg, theorem, seed, link, convention.map(|c| c.0))?;
            print!("{}", to_json_string(&cert)?);
            Ok(u8::from(cert.is_violation()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
