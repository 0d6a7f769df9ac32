use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ssnmf::{fit, io, DenseMatrix, ModelVariant, Result, Shape, SsnmfConfig, SsnmfError};

use crate::config::{self, override_fields, Common};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    common: Common,
    /// Data matrix X (features × samples), comma separated.
    #[arg(long)]
    x: Option<PathBuf>,
    /// Label matrix Y (classes × samples). Without it the fit is unsupervised.
    #[arg(long)]
    y: Option<PathBuf>,
    /// Mask for X; all ones when omitted.
    #[arg(long)]
    w: Option<PathBuf>,
    /// Mask for Y; all ones when omitted.
    #[arg(long)]
    l: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// FF, FD, DF or DD.
    #[arg(long)]
    variant: Option<ModelVariant>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub w: Option<PathBuf>,
    pub l: Option<PathBuf>,
    pub out: PathBuf,
    pub variant: ModelVariant,
    pub rank: usize,
    pub lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        let s = SsnmfConfig::default();
        FitConfig {
            x: None,
            y: None,
            w: None,
            l: None,
            out: PathBuf::from("fit-out"),
            variant: ModelVariant::FF,
            rank: s.rank,
            lambda: s.lambda,
            max_iters: s.max_iters,
            tol: s.tol,
            eps: s.eps,
            seed: s.seed,
        }
    }
}

#[derive(Serialize)]
struct FitReport<'a> {
    command: &'static str,
    settings: &'a FitConfig,
    shape: Shape,
    iterations_run: usize,
    relative_error: f64,
    objective_trace: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    created_unix: Option<u64>,
}

fn read_or(path: &Option<PathBuf>, fallback: impl FnOnce() -> DenseMatrix) -> Result<DenseMatrix> {
    match path {
        Some(p) => io::read_matrix(p),
        None => Ok(fallback()),
    }
}

pub fn run(mut args: Args) -> Result<()> {
    let mut cfg: FitConfig = args.common.load()?;
    override_fields!(
        cfg,
        args,
        [x, y, w, l, out, variant, rank, lambda, max_iters, tol, eps, seed]
    );

    if cfg.y.is_none() && cfg.l.is_some() {
        return Err(SsnmfError::Config(
            "a label mask was given without labels".into(),
        ));
    }
    let x = io::read_matrix(config::require(&cfg.x, "x")?)?;
    let (n1, n2) = x.shape();
    let y = read_or(&cfg.y, || DenseMatrix::zeros(1, n2))?;
    let w = read_or(&cfg.w, || DenseMatrix::ones(n1, n2))?;
    let l = match (&cfg.l, &cfg.y) {
        (Some(p), _) => io::read_matrix(p)?,
        (None, Some(_)) => DenseMatrix::ones(y.rows(), y.cols()),
        (None, None) => DenseMatrix::zeros(1, n2),
    };

    let solver = SsnmfConfig {
        rank: cfg.rank,
        lambda: cfg.lambda,
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        eps: cfg.eps,
        seed: cfg.seed,
    };
    let result = fit(cfg.variant, &x, &y, &w, &l, &solver, None)?;

    config::create_dir(&cfg.out)?;
    io::write_matrix(&cfg.out.join("A.csv"), &result.state.a)?;
    io::write_matrix(&cfg.out.join("B.csv"), &result.state.b)?;
    io::write_matrix(&cfg.out.join("S.csv"), &result.state.s)?;
    let report = FitReport {
        command: "fit",
        settings: &cfg,
        shape: result.state.shape(),
        iterations_run: result.iterations_run,
        relative_error: result.relative_error,
        objective_trace: &result.objective_trace,
        created_unix: args.common.timestamp(),
    };
    config::write_report(&cfg.out, &report)?;
    println!(
        "{} rank {}: {} iterations, relative error {:.6}",
        cfg.variant, cfg.rank, result.iterations_run, result.relative_error
    );
    Ok(())
}
