use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ssnmf::synth::{run_experiments, ErrorGrid, ExperimentSpec};
use ssnmf::{io, Result, Shape, SsnmfError};

use crate::config::{self, override_fields, Common};

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 100×100, 20000 iterations.
    Desk,
    /// 500×500, 100000 iterations.
    Paper,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    common: Common,
    /// 1, 2, 3, 4 or `all`.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Rows, columns and classes of the synthetic data.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub experiment: String,
    pub scale: Scale,
    pub size: Option<usize>,
    pub rank: Option<usize>,
    pub iters: Option<usize>,
    pub trials: Option<usize>,
    pub density: Option<f64>,
    pub lambda: Option<f64>,
    pub eps: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            experiment: "all".into(),
            scale: Scale::Desk,
            size: None,
            rank: None,
            iters: None,
            trials: None,
            density: None,
            lambda: None,
            eps: None,
            seed: 0,
            out: PathBuf::from("synth-out"),
        }
    }
}

fn experiment_ids(s: &str) -> Result<Vec<u8>> {
    match s.trim() {
        "all" => Ok(vec![1, 2, 3, 4]),
        id => match id.parse::<u8>() {
            Ok(n @ 1..=4) => Ok(vec![n]),
            _ => Err(SsnmfError::Config(format!(
                "experiment must be 1, 2, 3, 4 or all, got '{s}'"
            ))),
        },
    }
}

fn build_spec(cfg: &SynthConfig, id: u8) -> Result<ExperimentSpec> {
    let mut spec = match cfg.scale {
        Scale::Desk => ExperimentSpec::desk_scale(id, cfg.seed)?,
        Scale::Paper => ExperimentSpec::paper_scale(id, cfg.seed)?,
    };
    if cfg.size.is_some() || cfg.rank.is_some() {
        let n = cfg.size.unwrap_or(spec.shape.n1);
        let r = cfg.rank.unwrap_or(spec.shape.r);
        let shape = Shape::new(n, n, n, r)?;
        // noise variances depend on the rank
        spec = ExperimentSpec::new(id, shape, spec.iters, spec.trials, cfg.seed)?;
    }
    if let Some(v) = cfg.iters {
        spec.iters = v;
    }
    if let Some(v) = cfg.trials {
        spec.trials = v;
    }
    if let Some(v) = cfg.density {
        spec.density = v;
    }
    if let Some(v) = cfg.lambda {
        spec.lambda = v;
    }
    if let Some(v) = cfg.eps {
        spec.eps = v;
    }
    spec.validate()?;
    Ok(spec)
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var("SSNMF_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(SsnmfError::Config(format!(
                "SSNMF_THREADS must be a positive integer, got '{v}'"
            ))),
        },
    }
}

#[derive(Serialize)]
struct SynthReport<'a> {
    command: &'static str,
    settings: &'a SynthConfig,
    grid: &'a ErrorGrid,
    /// Per experiment, whether the matched variant has the strictly smallest
    /// mean error.
    matched_minimum: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_unix: Option<u64>,
}

pub fn run(mut args: Args) -> Result<()> {
    let mut cfg: SynthConfig = args.common.load()?;
    override_fields!(
        cfg,
        args,
        [experiment, scale, size, rank, iters, trials, density, lambda, eps, seed, out]
    );
    let specs = experiment_ids(&cfg.experiment)?
        .into_iter()
        .map(|id| build_spec(&cfg, id))
        .collect::<Result<Vec<_>>>()?;

    let grid = match thread_count()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SsnmfError::Config(format!("thread pool: {e}")))?
            .install(|| run_experiments(&specs))?,
        None => run_experiments(&specs)?,
    };

    config::create_dir(&cfg.out)?;
    io::write_text(&cfg.out.join("error_grid.csv"), &grid.to_csv())?;
    let report = SynthReport {
        command: "synth-bench",
        settings: &cfg,
        grid: &grid,
        matched_minimum: grid
            .experiments
            .iter()
            .map(|e| e.matched_is_strict_minimum())
            .collect(),
        created_unix: args.common.timestamp(),
    };
    config::write_report(&cfg.out, &report)?;
    print!("{}", grid.to_table());
    Ok(())
}
