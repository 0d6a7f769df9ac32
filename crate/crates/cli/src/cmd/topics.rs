use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ssnmf::classify::ClassifierModel;
use ssnmf::evalcluster::{GroundTruth, TopicReport};
use ssnmf::textprep::Vocabulary;
use ssnmf::{io, DenseMatrix, Result, SsnmfError};

use crate::config::{self, override_fields, Common};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    common: Common,
    /// Dictionary matrix (terms × topics).
    #[arg(long)]
    a: Option<PathBuf>,
    /// Saved classifier directory, used instead of `--a`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// One term per line; defaults to the vocabulary recorded in the model.
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    /// Representation matrix (topics × documents) to score topics with.
    #[arg(long)]
    s: Option<PathBuf>,
    /// Subgroup index of every document, one per line.
    #[arg(long)]
    subgroups: Option<PathBuf>,
    /// Subgroup names, one per line.
    #[arg(long)]
    subgroup_names: Option<PathBuf>,
    /// Directory for report.json; nothing is written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopicsConfig {
    pub a: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub count: usize,
    pub s: Option<PathBuf>,
    pub subgroups: Option<PathBuf>,
    pub subgroup_names: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for TopicsConfig {
    fn default() -> Self {
        TopicsConfig {
            a: None,
            model: None,
            vocab: None,
            count: 10,
            s: None,
            subgroups: None,
            subgroup_names: None,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct TopicsOutput<'a> {
    command: &'static str,
    settings: &'a TopicsConfig,
    report: &'a TopicReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_unix: Option<u64>,
}

/// Subgroup labels as ground truth, sized by the largest index.
pub fn ground_truth(path: &Path) -> Result<GroundTruth> {
    let labels = io::read_labels(path)?;
    let count = labels.iter().max().map_or(1, |&m| m + 1);
    GroundTruth::from_labels(&labels, count)
}

fn dictionary(cfg: &TopicsConfig) -> Result<(DenseMatrix, Option<PathBuf>)> {
    match (&cfg.a, &cfg.model) {
        (Some(a), None) => Ok((io::read_matrix(a)?, None)),
        (None, Some(dir)) => {
            let (model, manifest) = ClassifierModel::load(dir)?;
            // the recorded path is used as written, relative to the working directory
            Ok((model.a_train, manifest.vocabulary))
        }
        (Some(_), Some(_)) => Err(SsnmfError::Config(
            "give either `a` or `model`, not both".into(),
        )),
        (None, None) => Err(SsnmfError::Config(
            "missing required setting `a` or `model`".into(),
        )),
    }
}

pub fn run(mut args: Args) -> Result<()> {
    let mut cfg: TopicsConfig = args.common.load()?;
    override_fields!(
        cfg,
        args,
        [a, model, vocab, count, s, subgroups, subgroup_names, out]
    );

    let (a, model_vocab) = dictionary(&cfg)?;
    let vocab_path = cfg
        .vocab
        .clone()
        .or(model_vocab)
        .ok_or_else(|| SsnmfError::Config("missing required setting `vocab`".into()))?;
    let vocab = Vocabulary::parse(&io::read_text(&vocab_path)?)?;

    let scoring = match (&cfg.s, &cfg.subgroups) {
        (Some(s), Some(g)) => Some((io::read_matrix(s)?, ground_truth(g)?)),
        (None, None) => None,
        _ => {
            return Err(SsnmfError::Config(
                "topic scoring needs both `s` and `subgroups`".into(),
            ))
        }
    };
    let names: Option<Vec<String>> = cfg
        .subgroup_names
        .as_ref()
        .map(|p| io::read_text(p).map(|t| t.lines().map(str::to_string).collect()))
        .transpose()?;
    let report = TopicReport::build(
        &a,
        &vocab,
        cfg.count,
        scoring.as_ref().map(|(s, t)| (s, t, names.as_deref())),
    )?;

    if let Some(dir) = &cfg.out {
        config::create_dir(dir)?;
        let out = TopicsOutput {
            command: "topics",
            settings: &cfg,
            report: &report,
            created_unix: args.common.timestamp(),
        };
        config::write_report(dir, &out)?;
    }
    print!("{}", report.to_table());
    Ok(())
}
