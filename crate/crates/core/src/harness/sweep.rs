use std::fmt;
use std::str::FromStr;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::rng::derive_seed;

use super::experiment::{run_experiment, RunOptions, RunOutput};

/// Parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    P,
    K,
    Lambda,
    QThreshold,
    Items,
    Agent,
}

impl SweepParam {
    /// Key under which the parameter appears in config files and CSV output.
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::P => "p",
            SweepParam::K => "k",
            SweepParam::Lambda => "lambda",
            SweepParam::QThreshold => "q_threshold",
            SweepParam::Items => "M",
            SweepParam::Agent => "agent_kind",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "p" => Ok(SweepParam::P),
            "k" => Ok(SweepParam::K),
            "lambda" => Ok(SweepParam::Lambda),
            "q_threshold" | "q-threshold" | "Q_th" => Ok(SweepParam::QThreshold),
            "M" | "items" => Ok(SweepParam::Items),
            "agent_kind" | "agent" => Ok(SweepParam::Agent),
            other => Err(Error::config(
                "parameter",
                format!("cannot sweep `{other}` (expected p, k, lambda, q_threshold, M or agent_kind)"),
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub values: Vec<String>,
    pub replicates: usize,
    pub base: SimConfig,
}

/// One run of a sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub value_index: usize,
    pub value: String,
    pub replicate: usize,
    pub config: SimConfig,
}

impl SweepSpec {
    /// Expands the sweep into validated per-run configurations, in sweep
    /// order. Each run's seed is derived from the base seed, the value index
    /// and the replicate index.
    pub fn cells(&self) -> Result<Vec<SweepCell>> {
        if self.values.is_empty() {
            return Err(Error::config("values", "a sweep needs at least one value"));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        let mut cells = Vec::with_capacity(self.values.len() * self.replicates);
        for (value_index, value) in self.values.iter().enumerate() {
            for replicate in 0..self.replicates {
                let mut config = self.base.clone();
                config.set(self.parameter.key(), value)?;
                config.seed = derive_seed(self.base.seed, &[value_index as u64, replicate as u64]);
                config.validate()?;
                cells.push(SweepCell {
                    value_index,
                    value: value.trim().to_string(),
                    replicate,
                    config,
                });
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub cell: SweepCell,
    pub output: RunOutput,
}

pub fn run_sweep(spec: &SweepSpec, options: RunOptions) -> Result<Vec<SweepResult>> {
    spec.cells()?
        .into_iter()
        .map(|cell| {
            let output = run_experiment(&cell.config, options)?;
            Ok(SweepResult { cell, output })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AgentKind;

    fn base() -> SimConfig {
        SimConfig {
            users: 5,
            items: 40,
            seed: 3,
            ..SimConfig::default()
        }
    }

    #[test]
    fn cells_follow_sweep_order_with_derived_seeds() {
        let spec = SweepSpec {
            parameter: SweepParam::P,
            values: vec!["0.01".into(), "0.1".into()],
            replicates: 2,
            base: base(),
        };
        let cells = spec.cells().unwrap();
        let order: Vec<(usize, usize)> = cells.iter().map(|c| (c.value_index, c.replicate)).collect();
        assert_eq!(order, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(cells[0].config.p(), 0.01);
        assert_eq!(cells[3].config.p(), 0.1);
        let seeds: std::collections::HashSet<u64> = cells.iter().map(|c| c.config.seed).collect();
        assert_eq!(seeds.len(), 4);
        assert_eq!(cells[1].config.seed, derive_seed(3, &[0, 1]));
    }

    #[test]
    fn agent_and_item_sweeps() {
        let spec = SweepSpec {
            parameter: SweepParam::Agent,
            values: vec!["random".into(), "h-lbrs".into()],
            replicates: 1,
            base: base(),
        };
        let cells = spec.cells().unwrap();
        assert_eq!(cells[1].config.agent_kind, AgentKind::HeteroLbrs);

        let spec = SweepSpec {
            parameter: "M".parse().unwrap(),
            values: vec!["10".into(), "20".into()],
            replicates: 1,
            base: base(),
        };
        assert_eq!(spec.cells().unwrap()[1].config.items, 20);
    }

    #[test]
    fn invalid_sweeps_are_rejected() {
        let empty = SweepSpec {
            parameter: SweepParam::K,
            values: vec![],
            replicates: 1,
            base: base(),
        };
        assert!(empty.cells().is_err());
        let too_big = SweepSpec {
            parameter: SweepParam::K,
            values: vec!["5".into(), "50".into()],
            replicates: 1,
            base: base(),
        };
        assert!(matches!(too_big.cells(), Err(Error::Config { field: "k", .. })));
        assert!("gamma".parse::<SweepParam>().is_err());
    }

    #[test]
    fn sweep_runs_every_cell() {
        let spec = SweepSpec {
            parameter: SweepParam::Lambda,
            values: vec!["0".into(), "50".into()],
            replicates: 2,
            base: SimConfig {
                agent_kind: AgentKind::HeteroLbrs,
                ..base()
            },
        };
        let results = run_sweep(&spec, RunOptions::default()).unwrap();
        assert_eq!(results.len(), 4);
        assert!(results.iter().all(|r| r.output.summary.users == 5));
    }
}
