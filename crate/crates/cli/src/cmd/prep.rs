use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ssnmf::textprep::{load_corpus, prepare, PrepConfig, PreparedPart, SplitRatios, VocabConfig};
use ssnmf::{io, Result};

use crate::config::{self, override_fields, Common};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    common: Common,
    /// Corpus directory (class/subgroup/file) or JSON-lines file.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    min_df: Option<usize>,
    #[arg(long)]
    max_df_ratio: Option<f64>,
    #[arg(long)]
    max_size: Option<usize>,
    /// Documents kept per class; defaults to the size of the smallest class.
    #[arg(long)]
    per_class_cap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the bundled English stopword list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Keep headers, signatures and quoted replies.
    #[arg(long)]
    keep_boilerplate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrepCmdConfig {
    pub corpus: Option<PathBuf>,
    pub out: PathBuf,
    pub vocab: VocabConfig,
    pub ratios: SplitRatios,
    pub per_class_cap: Option<usize>,
    pub seed: u64,
    pub strip_boilerplate: bool,
    pub stopwords: Option<PathBuf>,
}

impl Default for PrepCmdConfig {
    fn default() -> Self {
        let p = PrepConfig::default();
        PrepCmdConfig {
            corpus: None,
            out: PathBuf::from("prep-out"),
            vocab: p.vocab,
            ratios: p.ratios,
            per_class_cap: p.per_class_cap,
            seed: p.seed,
            strip_boilerplate: p.strip_boilerplate,
            stopwords: p.stopwords,
        }
    }
}

#[derive(Serialize)]
struct PartReport {
    documents: usize,
    empty_documents: Vec<usize>,
}

#[derive(Serialize)]
struct PrepReport<'a> {
    command: &'static str,
    settings: &'a PrepCmdConfig,
    corpus_documents: usize,
    classes: &'a [String],
    subgroups: &'a [String],
    vocabulary_size: usize,
    train: PartReport,
    val: Option<PartReport>,
    test: Option<PartReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_unix: Option<u64>,
}

fn write_part(dir: &Path, name: &str, part: &PreparedPart) -> Result<PartReport> {
    io::write_matrix(&dir.join(format!("tfidf_{name}.csv")), &part.tfidf.matrix)?;
    io::write_labels(&dir.join(format!("labels_{name}.csv")), &part.labels)?;
    io::write_labels(&dir.join(format!("subgroups_{name}.csv")), &part.subgroups)?;
    io::write_labels(
        &dir.join(format!("documents_{name}.csv")),
        &part.doc_indices,
    )?;
    Ok(PartReport {
        documents: part.doc_indices.len(),
        empty_documents: part.tfidf.empty_documents.clone(),
    })
}

fn lines(names: &[String]) -> String {
    names.iter().map(|n| format!("{n}\n")).collect()
}

pub fn run(mut args: Args) -> Result<()> {
    let mut cfg: PrepCmdConfig = args.common.load()?;
    override_fields!(cfg, args, [corpus, out, per_class_cap, seed, stopwords]);
    if let Some(v) = args.min_df {
        cfg.vocab.min_df = v;
    }
    if let Some(v) = args.max_df_ratio {
        cfg.vocab.max_df_ratio = v;
    }
    if let Some(v) = args.max_size {
        cfg.vocab.max_size = Some(v);
    }
    if args.keep_boilerplate {
        cfg.strip_boilerplate = false;
    }

    let corpus = load_corpus(config::require(&cfg.corpus, "corpus")?)?;
    let prep_cfg = PrepConfig {
        vocab: cfg.vocab,
        ratios: cfg.ratios,
        per_class_cap: cfg.per_class_cap,
        seed: cfg.seed,
        strip_boilerplate: cfg.strip_boilerplate,
        stopwords: cfg.stopwords.clone(),
    };
    let prepared = prepare(&corpus, &prep_cfg)?;

    let dir = &cfg.out;
    config::create_dir(dir)?;
    io::write_text(&dir.join("vocab.txt"), &prepared.vocab.to_text())?;
    io::write_text(&dir.join("class_names.txt"), &lines(&corpus.class_names))?;
    io::write_text(
        &dir.join("subgroup_names.txt"),
        &lines(&corpus.subgroup_names),
    )?;
    let train = write_part(dir, "train", &prepared.train)?;
    let val = prepared
        .val
        .as_ref()
        .map(|p| write_part(dir, "val", p))
        .transpose()?;
    let test = prepared
        .test
        .as_ref()
        .map(|p| write_part(dir, "test", p))
        .transpose()?;
    let report = PrepReport {
        command: "prep",
        settings: &cfg,
        corpus_documents: corpus.len(),
        classes: &corpus.class_names,
        subgroups: &corpus.subgroup_names,
        vocabulary_size: prepared.vocab.len(),
        train,
        val,
        test,
        created_unix: args.common.timestamp(),
    };
    config::write_report(dir, &report)?;
    println!(
        "{} documents, {} terms: train {}, val {}, test {}",
        corpus.len(),
        prepared.vocab.len(),
        report.train.documents,
        report.val.as_ref().map_or(0, |p| p.documents),
        report.test.as_ref().map_or(0, |p| p.documents),
    );
    Ok(())
}
