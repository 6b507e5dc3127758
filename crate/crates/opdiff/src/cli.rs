//! Argument parsing. Usage errors from clap exit with code 2.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use opdiff_core::Complex64;

use crate::commands::{self, Outcome};
use crate::config::RunConfig;
use crate::error::{AppError, AppResult};

#[derive(Debug, Parser)]
#[command(name = "opdiff", version, about = "Polynomial families orthogonal to a modified Jacobi measure")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks; overrides `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Allow the flow model for `m != 1`.
    #[arg(long, global = true)]
    pub exploratory: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write coefficient records for n = 1..=n_max.
    Build {
        /// Overrides `n_max`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run every check; exit 1 if one fails.
    Verify {
        /// Overrides `n_max`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Ratio and n-th root diagnostics.
    Asymptotics {
        /// Degrees, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        /// Evaluation point `re,im`; repeatable.
        #[arg(long, value_parser = parse_point)]
        z: Vec<Complex64>,
    },
    /// Zeros of Q_n and the ellipse through zeta_n.
    Zeros {
        /// Degree; defaults to `n_max`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Velocity field and its sources and stagnation points.
    Flow {
        /// Degree; defaults to `n_max`.
        #[arg(long)]
        n: Option<usize>,
    },
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let bad = || format!("expected `re,im` or `re`, got `{s}`");
    let mut parts = s.split(',').map(str::trim);
    let re = parts.next().ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?;
    let im = match parts.next() {
        Some(p) => p.parse::<f64>().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Loads the config and applies flag overrides.
pub fn load(cli: &Cli, n_max: Option<usize>) -> AppResult<RunConfig> {
    let path = cli.config.as_ref().ok_or_else(|| AppError::Usage("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = n_max {
        cfg.n_max = n;
        cfg.check()?;
    }
    Ok(cfg)
}

pub fn run(cli: &Cli) -> AppResult<Outcome> {
    match &cli.command {
        Command::Build { n } => commands::build(&load(cli, *n)?),
        Command::Verify { n } => commands::verify(&load(cli, *n)?),
        Command::Asymptotics { n, z } => {
            let cfg = load(cli, None)?;
            let ns = if n.is_empty() { cfg.degrees() } else { n.clone() };
            let zs = if z.is_empty() { cfg.z_points() } else { z.clone() };
            commands::asymptotics(&cfg, &zs, &ns)
        }
        Command::Zeros { n } => {
            let cfg = load(cli, None)?;
            let n = n.unwrap_or(cfg.n_max);
            commands::zeros(&cfg, n)
        }
        Command::Flow { n } => {
            let cfg = load(cli, None)?;
            let n = n.unwrap_or(cfg.n_max);
            commands::flow(&cfg, n, cli.exploratory)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points() {
        assert_eq!(parse_point("0.5,0.2").unwrap(), Complex64::new(0.5, 0.2));
        assert_eq!(parse_point(" 5 ").unwrap(), Complex64::new(5.0, 0.0));
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_point("x").is_err());
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["opdiff", "--config", "c.json", "asymptotics", "--n", "25,50", "--z", "5,0"]).unwrap();
        match cli.command {
            Command::Asymptotics { n, z } => {
                assert_eq!(n, vec![25, 50]);
                assert_eq!(z, vec![Complex64::new(5.0, 0.0)]);
            }
            _ => panic!("wrong command"),
        }
        assert!(Cli::try_parse_from(["opdiff", "frobnicate"]).is_err());
    }
}
