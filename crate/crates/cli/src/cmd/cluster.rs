use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ssnmf::evalcluster::{topic_scores, AssignMode, GroundTruth};
use ssnmf::{io, Result, SsnmfError};

use super::topics::ground_truth;
use crate::config::{self, override_fields, Common};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    common: Common,
    /// Representation matrix (topics × documents).
    #[arg(long)]
    s: Option<PathBuf>,
    /// Subgroup index of every document, one per line.
    #[arg(long)]
    subgroups: Option<PathBuf>,
    /// Subgroup indicator matrix (subgroups × documents), instead of `--subgroups`.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Directory for report.json; nothing is written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterConfig {
    pub s: Option<PathBuf>,
    pub subgroups: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct TopicScore {
    topic: usize,
    hard_subgroup: usize,
    hard: f64,
    soft_subgroup: usize,
    soft: f64,
}

#[derive(Serialize)]
struct ClusterReport<'a> {
    command: &'static str,
    settings: &'a ClusterConfig,
    topics: Vec<TopicScore>,
    hard_mean: f64,
    soft_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_unix: Option<u64>,
}

pub fn run(mut args: Args) -> Result<()> {
    let mut cfg: ClusterConfig = args.common.load()?;
    override_fields!(cfg, args, [s, subgroups, truth, out]);

    let s = io::read_matrix(config::require(&cfg.s, "s")?)?;
    let truth = match (&cfg.subgroups, &cfg.truth) {
        (Some(p), None) => ground_truth(p)?,
        (None, Some(p)) => GroundTruth::from_matrix(io::read_matrix(p)?)?,
        _ => {
            return Err(SsnmfError::Config(
                "give exactly one of `subgroups` or `truth`".into(),
            ))
        }
    };
    let hard = topic_scores(&s, &truth, AssignMode::Hard)?;
    let soft = topic_scores(&s, &truth, AssignMode::Soft)?;
    let mean = |v: &[(usize, f64)]| v.iter().map(|(_, p)| p).sum::<f64>() / v.len() as f64;
    let report = ClusterReport {
        command: "cluster-score",
        settings: &cfg,
        topics: hard
            .iter()
            .zip(&soft)
            .enumerate()
            .map(|(l, (h, s))| TopicScore {
                topic: l,
                hard_subgroup: h.0,
                hard: h.1,
                soft_subgroup: s.0,
                soft: s.1,
            })
            .collect(),
        hard_mean: mean(&hard),
        soft_mean: mean(&soft),
        created_unix: args.common.timestamp(),
    };
    if let Some(dir) = &cfg.out {
        config::create_dir(dir)?;
        config::write_report(dir, &report)?;
    }
    println!("{:<8}{:>10}{:>10}", "topic", "hard P", "soft P");
    for t in &report.topics {
        println!("{:<8}{:>10.4}{:>10.4}", t.topic + 1, t.hard, t.soft);
    }
    println!(
        "{:<8}{:>10.4}{:>10.4}",
        "mean", report.hard_mean, report.soft_mean
    );
    Ok(())
}
