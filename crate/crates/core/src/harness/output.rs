//! Output files: summary CSV, per-step trace CSV and the run manifest.
//!
//! CSVs have a header row, fixed column order, and floats printed with six
//! decimals, so identical runs produce identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{AgentKind, SimConfig};
use crate::error::{Error, Result};
use crate::metrics::{RunSummary, StepRecord};

use super::sweep::SweepParam;

pub const SUMMARY_COLUMNS: [&str; 19] = [
    "parameter",
    "value",
    "agent",
    "replicate",
    "seed",
    "users",
    "avg_reward_step",
    "avg_reward_session",
    "avg_diversity",
    "avg_ils",
    "avg_bls",
    "mean_session_len",
    "ci_reward_step",
    "ci_reward_session",
    "ci_diversity",
    "ci_ils",
    "ci_bls",
    "ci_session_len",
    "early_resets",
];

pub const TRACE_COLUMNS: [&str; 9] = [
    "user_id",
    "step",
    "slate",
    "chosen",
    "reward",
    "ils",
    "bls",
    "d_score",
    "budget_after",
];

/// One line of a summary CSV.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    /// Swept parameter key, or `none` for a single run.
    pub parameter: String,
    pub value: String,
    pub agent: AgentKind,
    pub replicate: usize,
    pub seed: u64,
    pub summary: RunSummary,
    pub early_resets: u64,
}

fn float(x: f64) -> String {
    format!("{x:.6}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn write_summary_csv<W: Write>(writer: W, rows: &[SummaryRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(SUMMARY_COLUMNS)?;
    for row in rows {
        let s = &row.summary;
        csv.write_record([
            row.parameter.clone(),
            row.value.clone(),
            row.agent.to_string(),
            row.replicate.to_string(),
            row.seed.to_string(),
            s.users.to_string(),
            float(s.avg_reward_per_step),
            float(s.avg_cumulative_reward_per_session),
            float(s.avg_diversity),
            float(s.avg_ils),
            float(s.avg_bls),
            float(s.mean_session_length),
            float(s.ci_reward_step),
            float(s.ci_reward_session),
            float(s.ci_diversity),
            float(s.ci_ils),
            float(s.ci_bls),
            float(s.ci_session_length),
            row.early_resets.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(writer: W, records: &[StepRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(TRACE_COLUMNS)?;
    for r in records {
        let slate = r
            .slate
            .iter()
            .map(|id| id.to_string())
            .collect::<Vec<_>>()
            .join(";");
        csv.write_record([
            r.user_id.to_string(),
            r.step.to_string(),
            slate,
            r.chosen.map(|c| c.to_string()).unwrap_or_default(),
            float(r.reward),
            opt_float(r.ils),
            opt_float(r.bls),
            opt_float(r.d_score),
            float(r.budget_after),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRun {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    pub replicates: usize,
    pub trace: bool,
    pub sequential: bool,
}

/// Resolved configuration of a run or sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run: ManifestRun,
    pub config: SimConfig,
}

impl Manifest {
    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }
}

/// Sweep settings read from a `[sweep]` table in a config file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub parameter: Option<String>,
    pub values: Vec<String>,
    pub replicates: Option<usize>,
}

/// Reads a config file: flat `SimConfig` keys plus an optional `[sweep]` table
/// with `parameter`, `values` and `replicates`.
pub fn load_config_file(path: &Path) -> Result<(SimConfig, SweepTable)> {
    let text = fs::read_to_string(path)?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<(SimConfig, SweepTable)> {
    let mut table: toml::Table = text.parse()?;
    let sweep = match table.remove("sweep") {
        None => SweepTable::default(),
        Some(toml::Value::Table(t)) => parse_sweep_table(t)?,
        Some(_) => return Err(Error::config("sweep", "must be a table")),
    };
    let config: SimConfig = toml::Value::Table(table).try_into()?;
    Ok((config, sweep))
}

fn value_text(value: &toml::Value) -> Result<String> {
    match value {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        other => Err(Error::config("values", format!("unsupported sweep value `{other}`"))),
    }
}

fn parse_sweep_table(mut t: toml::Table) -> Result<SweepTable> {
    let parameter = match t.remove("parameter") {
        None => None,
        Some(toml::Value::String(s)) => Some(s),
        Some(_) => return Err(Error::config("parameter", "must be a string")),
    };
    let values = match t.remove("values") {
        None => Vec::new(),
        Some(toml::Value::Array(items)) => items.iter().map(value_text).collect::<Result<_>>()?,
        Some(_) => return Err(Error::config("values", "must be an array")),
    };
    let replicates = match t.remove("replicates") {
        None => None,
        Some(toml::Value::Integer(n)) if n >= 1 => Some(n as usize),
        Some(_) => return Err(Error::config("replicates", "must be a positive integer")),
    };
    if let Some(key) = t.keys().next() {
        return Err(Error::config("sweep", format!("unknown key `{key}`")));
    }
    Ok(SweepTable {
        parameter,
        values,
        replicates,
    })
}

/// Summary file name for a sweep over `parameter`.
pub fn sweep_file_name(parameter: SweepParam) -> String {
    format!("sweep_{}.csv", parameter.key())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::summarize_records;

    fn record(user_id: u64, step: u64) -> StepRecord {
        StepRecord {
            user_id,
            step,
            slate: vec![3, 1, 4],
            chosen: if step == 1 { Some(1) } else { None },
            reward: if step == 1 { 4.0 } else { 0.0 },
            ils: Some(1.0 / 3.0),
            bls: if step == 1 { None } else { Some(0.25) },
            d_score: Some(0.2),
            budget_after: 196.0 + 1.0 / 7.0,
        }
    }

    #[test]
    fn trace_csv_layout() {
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &[record(0, 1), record(0, 2)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "user_id,step,slate,chosen,reward,ils,bls,d_score,budget_after");
        assert_eq!(lines[1], "0,1,3;1;4,1,4.000000,0.333333,,0.200000,196.142857");
        assert_eq!(lines[2], "0,2,3;1;4,,0.000000,0.333333,0.250000,0.200000,196.142857");
    }

    #[test]
    fn summary_csv_layout() {
        let summary = summarize_records(&[record(0, 1), record(1, 1)]).unwrap();
        let row = SummaryRow {
            parameter: "p".into(),
            value: "0.05".into(),
            agent: AgentKind::BasicLbrs,
            replicate: 0,
            seed: 9,
            summary,
            early_resets: 0,
        };
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SUMMARY_COLUMNS.join(","));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), SUMMARY_COLUMNS.len());
        assert_eq!(&fields[..7], &["p", "0.05", "b-lbrs", "0", "9", "2", "4.000000"]);
    }

    #[test]
    fn config_file_with_sweep_table() {
        let text = r#"
            N = 100
            M = 500
            agent_kind = "h-lbrs"
            lambda = 20.0

            [sweep]
            parameter = "q_threshold"
            values = [-2, 0.5, "2"]
            replicates = 3
        "#;
        let (config, sweep) = parse_config_text(text).unwrap();
        assert_eq!((config.users, config.items), (100, 500));
        assert_eq!(config.agent_kind, AgentKind::HeteroLbrs);
        assert_eq!(config.lambda, 20.0);
        assert_eq!(config.k, 5);
        assert_eq!(sweep.parameter.as_deref(), Some("q_threshold"));
        assert_eq!(sweep.values, vec!["-2", "0.5", "2"]);
        assert_eq!(sweep.replicates, Some(3));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        assert!(parse_config_text("users_count = 3").is_err());
        assert!(parse_config_text("[sweep]\nparam = \"p\"").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let manifest = Manifest {
            run: ManifestRun {
                command: "sweep".into(),
                parameter: Some("p".into()),
                values: vec!["0.01".into()],
                replicates: 1,
                trace: false,
                sequential: false,
            },
            config: SimConfig::default(),
        };
        let text = manifest.to_toml_string().unwrap();
        let back: Manifest = toml::from_str(&text).unwrap();
        assert_eq!(back, manifest);
    }
}
