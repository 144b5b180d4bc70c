use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wigner_lab::scenario::{
    run_concentrate, run_conditions, run_gauss, run_moments, run_scenario, sweep_summary,
    write_concentrate, write_conditions, write_gauss, write_moments, write_scenario, write_walks,
    ScenarioConfig, ScenarioName,
};
use wigner_lab::walks::census;
use wigner_lab::Result;

#[derive(Parser)]
#[command(name = "wignerlab", version, about = "Spectral experiments on heterogeneous Wigner matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full scenario sweep: conditions, mean ESD, distances, moments, histogram, trends.
    Simulate(Common),
    /// Condition functionals only (no sampling).
    Conditions(Common),
    /// Empirical moments against tree-sum predictions.
    Moments(Common),
    /// Canonical walk census up to --k-max.
    Walks(Common),
    /// Row sums with random signs against the standard normal.
    Gauss(Common),
    /// Inequality suites, truncation survival and spectral concentration.
    Concentrate(Common),
    /// List the scenario catalog.
    Scenarios,
}

#[derive(Args)]
struct Common {
    /// key=value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// Comma-separated, ascending.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    profile_file: Option<PathBuf>,
    /// Entry family: gaussian, rademacher, zero, heavy-tail, two-point:<p>.
    #[arg(long)]
    law: Option<String>,
    /// real or complex.
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    eps_grid: Option<String>,
    #[arg(long)]
    delta_grid: Option<String>,
    #[arg(long)]
    resamples: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut c = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::default(),
        };
        let path = |p: &PathBuf| p.to_string_lossy().into_owned();
        let pairs = [
            ("scenario", self.scenario.clone()),
            ("n", self.n.clone()),
            ("trials", self.trials.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("k-max", self.k_max.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(path)),
            ("format", self.format.clone()),
            ("profile-file", self.profile_file.as_ref().map(path)),
            ("law", self.law.clone()),
            ("class", self.class.clone()),
            ("eps-grid", self.eps_grid.clone()),
            ("delta-grid", self.delta_grid.clone()),
            ("resamples", self.resamples.map(|v| v.to_string())),
            ("threads", self.threads.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        Ok(c)
    }
}

fn report(written: Vec<PathBuf>) {
    for p in written {
        println!("wrote {}", p.display());
    }
}

fn run(cmd: Command) -> Result<()> {
    let common = match &cmd {
        Command::Scenarios => {
            for s in ScenarioName::ALL {
                println!("{:<20} {}", s.as_str(), s.description());
            }
            return Ok(());
        }
        Command::Simulate(c)
        | Command::Conditions(c)
        | Command::Moments(c)
        | Command::Walks(c)
        | Command::Gauss(c)
        | Command::Concentrate(c) => c,
    };
    let config = common.config()?;
    let out = config.out.clone();
    match cmd {
        Command::Simulate(_) => {
            let result = run_scenario(&config)?;
            match out {
                Some(dir) => report(write_scenario(&result, dir)?),
                None => {
                    println!("n,stage,kolmogorov,levy,row_one");
                    for p in &result.points {
                        for s in &p.stages {
                            let row_one = s.conditions.row_one.map(|v| v.to_string()).unwrap_or_default();
                            println!("{},{},{},{},{}", p.n, s.stage, s.kolmogorov, s.levy, row_one);
                        }
                    }
                    if result.points.len() >= 2 {
                        for t in sweep_summary(&result)? {
                            if t.functional == "kolmogorov" {
                                println!("trend {} {}: {}", t.functional, t.stage, t.flag);
                            }
                        }
                    }
                }
            }
        }
        Command::Conditions(_) => {
            let reports = run_conditions(&config)?;
            match out {
                Some(dir) => report(write_conditions(&config, &reports, dir)?),
                None => {
                    for (stage, r) in &reports {
                        println!("# n = {}, stage = {stage}", r.n);
                        r.write_csv(std::io::stdout().lock())?;
                    }
                }
            }
        }
        Command::Moments(_) => {
            let moments = run_moments(&config)?;
            match out {
                Some(dir) => report(write_moments(&config, &moments, dir)?),
                None => {
                    println!("n,stage,k,empirical,prediction,semicircle");
                    for (n, stage, rows) in &moments {
                        for m in rows {
                            let p = m.prediction.map(|v| v.to_string()).unwrap_or_default();
                            println!("{n},{stage},{},{},{p},{}", m.k, m.empirical, m.semicircle);
                        }
                    }
                }
            }
        }
        Command::Walks(_) => match out {
            Some(dir) => report(write_walks(&config, dir)?),
            None => {
                println!("k,t,walks,zeroed_out,tree_pair,sub_leading");
                for k in 1..=config.k_max.max(1) {
                    for r in census(k)? {
                        println!("{},{},{},{},{},{}", r.k, r.t, r.walks, r.zeroed_out, r.tree_pair, r.sub_leading);
                    }
                }
            }
        },
        Command::Gauss(_) => {
            let studies = run_gauss(&config)?;
            match out {
                Some(dir) => report(write_gauss(&config, &studies, dir)?),
                None => {
                    println!("n,resamples,average");
                    for s in &studies {
                        println!("{},{},{}", s.n, s.resamples, s.average);
                    }
                }
            }
        }
        Command::Concentrate(_) => {
            let r = run_concentrate(&config)?;
            match out {
                Some(dir) => report(write_concentrate(&config, &r, dir)?),
                None => {
                    for s in &r.suites {
                        println!("{:?}: {} cases, {} violations", s.inequality, s.cases, s.violations);
                    }
                    for t in &r.spectral {
                        for row in &t.rows {
                            println!(
                                "n={} t={} empirical={} bound={} satisfied={}",
                                t.n, row.t, row.empirical, row.bound, row.check.satisfied
                            );
                        }
                    }
                }
            }
        }
        Command::Scenarios => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
