use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ssnmf::classify::{accuracy, predict, train, transform, ClassifierModel, LabelMatrix};
use ssnmf::rng::derive_seed;
use ssnmf::solver::DEFAULT_EPS;
use ssnmf::{io, DenseMatrix, ModelVariant, Result, SsnmfConfig, SsnmfError};

use crate::config::{self, override_fields, Common};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    x_train: Option<PathBuf>,
    /// Class index of every training column, one per line.
    #[arg(long)]
    y_train: Option<PathBuf>,
    #[arg(long)]
    x_test: Option<PathBuf>,
    /// Test classes; accuracy is only reported when given.
    #[arg(long)]
    y_test: Option<PathBuf>,
    #[arg(long)]
    x_val: Option<PathBuf>,
    #[arg(long)]
    y_val: Option<PathBuf>,
    /// Vocabulary file recorded in the saved model.
    #[arg(long)]
    vocabulary: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    variant: Option<ModelVariant>,
    /// Number of classes; inferred from the labels when omitted.
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    /// Defaults to the tuned value for the variant.
    #[arg(long)]
    lambda: Option<f64>,
    /// Defaults to the tuned value for the variant.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    transform_iters: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Pick tol and lambda by validation accuracy over the search grid.
    #[arg(long)]
    grid: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub x_train: Option<PathBuf>,
    pub y_train: Option<PathBuf>,
    pub x_test: Option<PathBuf>,
    pub y_test: Option<PathBuf>,
    pub x_val: Option<PathBuf>,
    pub y_val: Option<PathBuf>,
    pub vocabulary: Option<PathBuf>,
    pub out: PathBuf,
    pub variant: ModelVariant,
    pub classes: Option<usize>,
    pub rank: usize,
    pub lambda: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: usize,
    pub transform_iters: usize,
    pub eps: f64,
    pub seed: u64,
    pub trials: usize,
    pub grid: bool,
    pub grid_tol: Vec<f64>,
    pub grid_lambda: Vec<f64>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            x_train: None,
            y_train: None,
            x_test: None,
            y_test: None,
            x_val: None,
            y_val: None,
            vocabulary: None,
            out: PathBuf::from("classify-out"),
            variant: ModelVariant::DF,
            classes: None,
            rank: 13,
            lambda: None,
            tol: None,
            max_iters: 50,
            transform_iters: 200,
            eps: DEFAULT_EPS,
            seed: 0,
            trials: 1,
            grid: false,
            grid_tol: vec![1e-4, 1e-3, 1e-2],
            grid_lambda: vec![10.0, 100.0, 1000.0],
        }
    }
}

/// Tolerance and supervision weight found best for each variant on the
/// newsgroup benchmark.
pub fn tuned(variant: ModelVariant) -> (f64, f64) {
    match variant.code() {
        "FF" => (1e-4, 1e2),
        "FD" => (1e-4, 10.0),
        "DF" => (1e-3, 1e2),
        _ => (1e-3, 1e3),
    }
}

struct Labeled {
    x: DenseMatrix,
    labels: Vec<usize>,
}

fn load_pair(x: &Option<PathBuf>, y: &Option<PathBuf>, name: &str) -> Result<Option<Labeled>> {
    let Some(xp) = x else {
        return Ok(None);
    };
    let x = io::read_matrix(xp)?;
    let labels = match y {
        Some(p) => io::read_labels(p)?,
        None => Vec::new(),
    };
    if !labels.is_empty() && labels.len() != x.cols() {
        return Err(SsnmfError::Config(format!(
            "{name}: {} labels for {} columns",
            labels.len(),
            x.cols()
        )));
    }
    Ok(Some(Labeled { x, labels }))
}

struct Fitted {
    model: ClassifierModel,
    iterations_run: usize,
    relative_error: f64,
}

fn fit_model(
    train_set: &Labeled,
    k: usize,
    variant: ModelVariant,
    cfg: &SsnmfConfig,
) -> Result<Fitted> {
    let y = LabelMatrix::from_labels(&train_set.labels, k)?;
    let w = DenseMatrix::ones(train_set.x.rows(), train_set.x.cols());
    let (model, fit) = train(&train_set.x, &w, y.as_matrix(), variant, cfg)?;
    Ok(Fitted {
        model,
        iterations_run: fit.iterations_run,
        relative_error: fit.relative_error,
    })
}

fn predict_set(model: &ClassifierModel, x: &DenseMatrix, iters: usize) -> Result<LabelMatrix> {
    let w = DenseMatrix::ones(x.rows(), x.cols());
    let proj = transform(model, x, &w, iters)?;
    predict(model, &proj.s)
}

fn score(pred: &LabelMatrix, labels: &[usize], k: usize) -> Result<f64> {
    accuracy(&LabelMatrix::from_labels(labels, k)?, pred)
}

#[derive(Serialize)]
struct GridPoint {
    tol: f64,
    lambda: f64,
    val_accuracy: f64,
}

#[derive(Serialize)]
struct TrialReport {
    trial: usize,
    seed: u64,
    iterations_run: usize,
    train_relative_error: f64,
    test_accuracy: Option<f64>,
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    command: &'static str,
    settings: &'a ClassifyConfig,
    classes: usize,
    tol: f64,
    lambda: f64,
    grid: Vec<GridPoint>,
    trials: Vec<TrialReport>,
    mean_accuracy: Option<f64>,
    /// Sample standard deviation over trials; 0 for a single trial.
    sd_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_unix: Option<u64>,
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive_seed(seed, "trial", trial as u64)
}

pub fn run(mut args: Args) -> Result<()> {
    let mut cfg: ClassifyConfig = args.common.load()?;
    override_fields!(
        cfg,
        args,
        [
            x_train,
            y_train,
            x_test,
            y_test,
            x_val,
            y_val,
            vocabulary,
            out,
            variant,
            classes,
            rank,
            lambda,
            tol,
            max_iters,
            transform_iters,
            eps,
            seed,
            trials,
        ]
    );
    cfg.grid |= args.grid;
    if cfg.trials == 0 {
        return Err(SsnmfError::Config("trials must be >= 1".into()));
    }
    config::require(&cfg.y_train, "y_train")?;
    let train_set = load_pair(&cfg.x_train, &cfg.y_train, "train")?
        .ok_or_else(|| SsnmfError::Config("missing required setting `x_train`".into()))?;
    config::require(&cfg.x_test, "x_test")?;
    let test_set = load_pair(&cfg.x_test, &cfg.y_test, "test")?.expect("checked above");
    let val_set = load_pair(&cfg.x_val, &cfg.y_val, "validation")?;

    let k = match cfg.classes {
        Some(k) => k,
        None => {
            let val_labels = val_set.as_ref().map_or(&[][..], |v| v.labels.as_slice());
            train_set
                .labels
                .iter()
                .chain(&test_set.labels)
                .chain(val_labels)
                .max()
                .map_or(1, |&m| m + 1)
        }
    };
    let (tuned_tol, tuned_lambda) = tuned(cfg.variant);
    let mut tol = cfg.tol.unwrap_or(tuned_tol);
    let mut lambda = cfg.lambda.unwrap_or(tuned_lambda);
    let base = |tol: f64, lambda: f64, seed: u64| SsnmfConfig {
        rank: cfg.rank,
        lambda,
        max_iters: cfg.max_iters,
        tol,
        eps: cfg.eps,
        seed,
    };

    let mut grid = Vec::new();
    if cfg.grid {
        let val = val_set
            .as_ref()
            .filter(|v| !v.labels.is_empty())
            .ok_or_else(|| SsnmfError::Config("the grid search needs x_val and y_val".into()))?;
        let mut best: Option<(f64, f64, f64)> = None;
        for &t in &cfg.grid_tol {
            for &lam in &cfg.grid_lambda {
                let fitted = fit_model(
                    &train_set,
                    k,
                    cfg.variant,
                    &base(t, lam, trial_seed(cfg.seed, 0)),
                )?;
                let pred = predict_set(&fitted.model, &val.x, cfg.transform_iters)?;
                let acc = score(&pred, &val.labels, k)?;
                grid.push(GridPoint {
                    tol: t,
                    lambda: lam,
                    val_accuracy: acc,
                });
                if best.is_none_or(|(_, _, b)| acc > b) {
                    best = Some((t, lam, acc));
                }
            }
        }
        if let Some((t, lam, _)) = best {
            tol = t;
            lambda = lam;
        }
    }

    config::create_dir(&cfg.out)?;
    let mut trials = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, t);
        let fitted = fit_model(&train_set, k, cfg.variant, &base(tol, lambda, seed))?;
        let pred = predict_set(&fitted.model, &test_set.x, cfg.transform_iters)?;
        let test_accuracy = if test_set.labels.is_empty() {
            None
        } else {
            Some(score(&pred, &test_set.labels, k)?)
        };
        if t == 0 {
            io::write_labels(&cfg.out.join("predictions.csv"), &pred.labels())?;
            let dir = cfg.out.join("model");
            config::create_dir(&dir)?;
            fitted.model.save(&dir, cfg.vocabulary.clone())?;
        }
        trials.push(TrialReport {
            trial: t,
            seed,
            iterations_run: fitted.iterations_run,
            train_relative_error: fitted.relative_error,
            test_accuracy,
        });
    }

    let accs: Option<Vec<f64>> = trials.iter().map(|t| t.test_accuracy).collect();
    let (mean, sd) = match &accs {
        Some(a) => {
            let n = a.len() as f64;
            let mean = a.iter().sum::<f64>() / n;
            let sd = if a.len() > 1 {
                (a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            (Some(mean), Some(sd))
        }
        None => (None, None),
    };
    let report = ClassifyReport {
        command: "classify",
        settings: &cfg,
        classes: k,
        tol,
        lambda,
        grid,
        trials,
        mean_accuracy: mean,
        sd_accuracy: sd,
        created_unix: args.common.timestamp(),
    };
    config::write_report(&cfg.out, &report)?;
    match (mean, sd) {
        (Some(m), Some(s)) if cfg.trials > 1 => {
            println!("accuracy: {m:.4} (sd {s:.4} over {} trials)", cfg.trials)
        }
        (Some(m), _) => println!("accuracy: {m:.4}"),
        _ => println!(
            "predictions written to {}",
            cfg.out.join("predictions.csv").display()
        ),
    }
    Ok(())
}
