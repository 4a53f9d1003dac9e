use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use lbrs::config::{AgentKind, SimConfig};
use lbrs::harness::{
    load_config_file, run_experiment, run_sweep, write_summary_csv, write_trace_csv, Manifest, ManifestRun,
    RunOptions, SummaryRow, SweepParam, SweepSpec, SweepTable,
};
use lbrs::metrics::RunSummary;

#[derive(Parser)]
#[command(name = "lbrs", version, about = "Simulate load-balanced slate recommenders against a budgeted user")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write summary.csv (and trace.csv with --trace).
    Run(Common),
    /// Vary one parameter and write sweep_<param>.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary: p, k, lambda, q_threshold, M or agent_kind.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values of the swept parameter.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long)]
        replicates: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML config file. Command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// b-lbrs, p-lbrs, h-lbrs, random or eps-greedy.
    #[arg(long)]
    agent: Option<AgentKind>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    items: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q_threshold: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Any other config key, as KEY=VALUE. May be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write every step to a trace CSV.
    #[arg(long)]
    trace: bool,
    /// Run sessions one at a time.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn resolve(&self) -> Result<(SimConfig, SweepTable)> {
        let (mut config, sweep) = match &self.config {
            Some(path) => load_config_file(path).with_context(|| format!("reading {}", path.display()))?,
            None => (SimConfig::default(), SweepTable::default()),
        };
        for entry in &self.overrides {
            let Some((key, value)) = entry.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{entry}`");
            };
            config.set(key.trim(), value)?;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.agent {
            config.agent_kind = v;
        }
        if let Some(v) = self.users {
            config.users = v;
        }
        if let Some(v) = self.items {
            config.items = v;
        }
        if let Some(v) = self.k {
            config.k = v;
        }
        if let Some(v) = self.p {
            config.p = Some(v);
        }
        if let Some(v) = self.lambda {
            config.lambda = v;
        }
        if let Some(v) = self.q_threshold {
            config.q_threshold = v;
        }
        if let Some(v) = self.epsilon {
            config.epsilon = v;
        }
        config.validate()?;
        Ok((config, sweep))
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            trace: self.trace,
            sequential: self.sequential,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn report(label: &str, s: &RunSummary) {
    println!(
        "{label}: reward/step {:.4} ±{:.4}  reward/session {:.3} ±{:.3}  D {:.4} ±{:.4}  ILS {:.4}  BLS {:.4}  steps/session {:.2}",
        s.avg_reward_per_step,
        s.ci_reward_step,
        s.avg_cumulative_reward_per_session,
        s.ci_reward_session,
        s.avg_diversity,
        s.ci_diversity,
        s.avg_ils,
        s.avg_bls,
        s.mean_session_length,
    );
}

fn run(common: &Common) -> Result<()> {
    let (config, _) = common.resolve()?;
    let options = common.options();
    fs::create_dir_all(&common.out)?;
    let output = run_experiment(&config, options)?;

    let row = SummaryRow {
        parameter: "none".into(),
        value: String::new(),
        agent: config.agent_kind,
        replicate: 0,
        seed: config.seed,
        summary: output.summary.clone(),
        early_resets: output.early_resets,
    };
    write_summary_csv(create(&common.out.join("summary.csv"))?, &[row])?;
    if options.trace {
        write_trace_csv(create(&common.out.join("trace.csv"))?, &output.trace)?;
    }
    Manifest {
        run: ManifestRun {
            command: "run".into(),
            parameter: None,
            values: Vec::new(),
            replicates: 1,
            trace: options.trace,
            sequential: options.sequential,
        },
        config: config.clone(),
    }
    .write(&common.out.join("manifest.toml"))?;

    report(config.agent_kind.name(), &output.summary);
    Ok(())
}

fn sweep(common: &Common, param: Option<&str>, values: &[String], replicates: Option<usize>) -> Result<()> {
    let (base, table) = common.resolve()?;
    let options = common.options();
    let param = param
        .or(table.parameter.as_deref())
        .context("no sweep parameter: pass --param or add `parameter` to the [sweep] table")?;
    let parameter: SweepParam = param.parse()?;
    let values = if values.is_empty() { table.values } else { values.to_vec() };
    let spec = SweepSpec {
        parameter,
        values,
        replicates: replicates.or(table.replicates).unwrap_or(1),
        base: base.clone(),
    };
    fs::create_dir_all(&common.out)?;
    let results = run_sweep(&spec, options)?;

    let rows: Vec<SummaryRow> = results
        .iter()
        .map(|r| SummaryRow {
            parameter: parameter.key().into(),
            value: r.cell.value.clone(),
            agent: r.cell.config.agent_kind,
            replicate: r.cell.replicate,
            seed: r.cell.config.seed,
            summary: r.output.summary.clone(),
            early_resets: r.output.early_resets,
        })
        .collect();
    let summary_path = common.out.join(lbrs::harness::output::sweep_file_name(parameter));
    write_summary_csv(create(&summary_path)?, &rows)?;
    if options.trace {
        for r in &results {
            let name = format!("trace_{}_{}_r{}.csv", parameter.key(), r.cell.value_index, r.cell.replicate);
            write_trace_csv(create(&common.out.join(name))?, &r.output.trace)?;
        }
    }
    Manifest {
        run: ManifestRun {
            command: "sweep".into(),
            parameter: Some(parameter.key().into()),
            values: spec.values.clone(),
            replicates: spec.replicates,
            trace: options.trace,
            sequential: options.sequential,
        },
        config: base,
    }
    .write(&common.out.join("manifest.toml"))?;

    for r in &results {
        let label = format!("{}={} r{}", parameter.key(), r.cell.value, r.cell.replicate);
        report(&label, &r.output.summary);
    }
    println!("wrote {}", summary_path.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run(common) => run(common),
        Command::Sweep {
            common,
            param,
            values,
            replicates,
        } => sweep(common, param.as_deref(), values, *replicates),
    }
}
