//! Synthetic data under Gaussian and Poisson noise, and the four
//! matched-versus-mismatched maximum-likelihood experiments.
//!
//! Each experiment draws `X` around `AS` and `Y` around `BS` from one noise
//! pair, fits all four variants from a shared initialization, and scores
//! every fit with the experiment's own objective evaluated against the
//! noiseless products. The variant whose error functions match the noise is
//! expected to score lowest.

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::combine;
use crate::error::{Result, SsnmfError};
use crate::matrix::{matmul, DenseMatrix, Shape};
use crate::rng::{self, streams};
use crate::solver::{
    fit_untraced, initialize, ErrorFunction, FactorState, ModelVariant, SsnmfConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseModel {
    Gaussian { variance: f64 },
    Poisson,
}

impl NoiseModel {
    fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Gaussian { variance } if !(variance > 0.0 && variance.is_finite()) => Err(
                SsnmfError::Config(format!("Gaussian variance must be > 0, got {variance}")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: u8,
    pub x_noise: NoiseModel,
    pub y_noise: NoiseModel,
    pub shape: Shape,
    pub density: f64,
    pub lambda: f64,
    pub iters: usize,
    pub trials: usize,
    pub seed: u64,
    pub eps: f64,
}

impl ExperimentSpec {
    /// Experiment `id` (1 to 4) with the given size and iteration budget.
    ///
    /// 1: Gaussian/Gaussian, 2: Gaussian/Poisson, 3: Poisson/Gaussian,
    /// 4: Poisson/Poisson. Gaussian variance is 1 when both sides are
    /// Gaussian and `1/(2r)` when paired with a Poisson side.
    pub fn new(id: u8, shape: Shape, iters: usize, trials: usize, seed: u64) -> Result<Self> {
        let small = NoiseModel::Gaussian {
            variance: 1.0 / (2.0 * shape.r as f64),
        };
        let unit = NoiseModel::Gaussian { variance: 1.0 };
        let (x_noise, y_noise) = match id {
            1 => (unit, unit),
            2 => (small, NoiseModel::Poisson),
            3 => (NoiseModel::Poisson, small),
            4 => (NoiseModel::Poisson, NoiseModel::Poisson),
            _ => {
                return Err(SsnmfError::Config(format!(
                    "experiment id must be 1..=4, got {id}"
                )))
            }
        };
        Ok(ExperimentSpec {
            id,
            x_noise,
            y_noise,
            shape,
            density: 0.5,
            lambda: 1.0,
            iters,
            trials,
            seed,
            eps: crate::solver::DEFAULT_EPS,
        })
    }

    /// 500×500 data, 500 classes, rank 5, 100000 iterations, 5 trials.
    pub fn paper_scale(id: u8, seed: u64) -> Result<Self> {
        Self::new(id, Shape::new(500, 500, 500, 5)?, 100_000, 5, seed)
    }

    /// 100×100 data, 100 classes, rank 5, 20000 iterations, 5 trials.
    pub fn desk_scale(id: u8, seed: u64) -> Result<Self> {
        Self::new(id, Shape::new(100, 100, 100, 5)?, 20_000, 5, seed)
    }

    /// The variant whose error functions are the likelihoods of the noise.
    pub fn matched_variant(&self) -> ModelVariant {
        ModelVariant::from_objective_index(self.id as usize).expect("id validated")
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.id) {
            return Err(SsnmfError::Config(format!(
                "experiment id must be 1..=4, got {}",
                self.id
            )));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(SsnmfError::Config(format!(
                "density must be in (0, 1], got {}",
                self.density
            )));
        }
        if self.trials == 0 || self.iters == 0 {
            return Err(SsnmfError::Config("trials and iters must be >= 1".into()));
        }
        self.x_noise.validate()?;
        self.y_noise.validate()?;
        Shape::new(self.shape.n1, self.shape.n2, self.shape.k, self.shape.r)?;
        Ok(())
    }
}

fn sparse_uniform(rows: usize, cols: usize, density: f64, rng: &mut rng::Rng) -> DenseMatrix {
    let size = rows * cols;
    let nnz = ((density * size as f64).round() as usize).min(size);
    let mut m = DenseMatrix::zeros(rows, cols);
    let mut support = index::sample(rng, size, nnz).into_vec();
    support.sort_unstable();
    let data = m.as_mut_slice();
    for pos in support {
        data[pos] = rng.random::<f64>();
    }
    m
}

/// Ground-truth factors: `A` dense uniform on [0, 1), `B` and `S` with
/// exactly `round(density·size)` nonzeros at uniformly chosen positions,
/// each uniform on [0, 1).
pub fn gen_factors(shape: Shape, density: f64, seed: u64) -> Result<FactorState> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(SsnmfError::Config(format!(
            "density must be in (0, 1], got {density}"
        )));
    }
    let mut rng = rng::stream(seed, streams::FACTORS, 0);
    let mut a = DenseMatrix::zeros(shape.n1, shape.r);
    for v in a.as_mut_slice() {
        *v = rng.random::<f64>();
    }
    let s = sparse_uniform(shape.r, shape.n2, density, &mut rng);
    let b = sparse_uniform(shape.k, shape.r, density, &mut rng);
    Ok(FactorState { a, b, s })
}

/// Entrywise `N(mean, variance)` draws clamped at zero.
pub fn gaussian_with(mean: &DenseMatrix, variance: f64, rng: &mut rng::Rng) -> Result<DenseMatrix> {
    NoiseModel::Gaussian { variance }.validate()?;
    let sd = variance.sqrt();
    let normal = Normal::new(0.0, sd).map_err(|e| SsnmfError::Config(e.to_string()))?;
    Ok(mean.map(|mu| (mu + normal.sample(rng)).max(0.0)))
}

pub fn sample_gaussian(mean: &DenseMatrix, variance: f64, seed: u64) -> Result<DenseMatrix> {
    gaussian_with(mean, variance, &mut rng::stream(seed, streams::SAMPLE, 0))
}

/// Entrywise Poisson draws with intensity `mean`.
pub fn poisson_with(mean: &DenseMatrix, rng: &mut rng::Rng) -> Result<DenseMatrix> {
    mean.check_nonnegative()?;
    Ok(mean.map(|lam| poisson_draw(lam, rng)))
}

pub fn sample_poisson(mean: &DenseMatrix, seed: u64) -> Result<DenseMatrix> {
    poisson_with(mean, &mut rng::stream(seed, streams::SAMPLE, 0))
}

pub fn sample(noise: NoiseModel, mean: &DenseMatrix, rng: &mut rng::Rng) -> Result<DenseMatrix> {
    match noise {
        NoiseModel::Gaussian { variance } => gaussian_with(mean, variance, rng),
        NoiseModel::Poisson => poisson_with(mean, rng),
    }
}

/// Intensities below this use sequential-search inversion, above it
/// transformed rejection.
const POISSON_INVERSION_LIMIT: f64 = 30.0;

fn poisson_draw(lam: f64, rng: &mut rng::Rng) -> f64 {
    if lam <= 0.0 {
        0.0
    } else if lam < POISSON_INVERSION_LIMIT {
        poisson_inversion(lam, rng)
    } else {
        poisson_ptrs(lam, rng)
    }
}

fn poisson_inversion(lam: f64, rng: &mut rng::Rng) -> f64 {
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-lam).exp();
    let mut cdf = p;
    // The cap only matters when rounding leaves cdf just below u.
    while u > cdf && k < 1000 {
        k += 1;
        p *= lam / k as f64;
        cdf += p;
    }
    k as f64
}

/// Hörmann's transformed rejection with squeeze (PTRS).
fn poisson_ptrs(lam: f64, rng: &mut rng::Rng) -> f64 {
    let slam = lam.sqrt();
    let loglam = lam.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lam + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        if lhs <= -lam + k * loglam - ln_factorial(k) {
            return k;
        }
    }
}

/// `ln(k!)` for integral `k ≥ 0`: exact sums for small `k`, Stirling's
/// series otherwise.
fn ln_factorial(k: f64) -> f64 {
    if k < 16.0 {
        (2..=k as u32).map(|i| (i as f64).ln()).sum()
    } else {
        let n = k + 1.0;
        let inv = 1.0 / n;
        let inv2 = inv * inv;
        (n - 0.5) * n.ln() - n
            + 0.5 * (2.0 * std::f64::consts::PI).ln()
            + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
    }
}

/// Objective of `variant` with the noiseless products as data.
///
/// Fits can legitimately drive a model entry to exactly zero (a sampled row
/// of counts that is all zero, say) while the noiseless product there is
/// positive, which makes the exact divergence infinite. The divergence terms
/// are therefore scored with the divisor guard inside the logarithm,
/// `Σ x·ln(x/(z+eps)) − x + z`.
fn score(
    variant: ModelVariant,
    lambda: f64,
    state: &FactorState,
    as_true: &DenseMatrix,
    bs_true: &DenseMatrix,
    eps: f64,
) -> f64 {
    let term = |kind: ErrorFunction, data: &DenseMatrix, model: &DenseMatrix| {
        let pairs = data.as_slice().iter().zip(model.as_slice());
        match kind {
            ErrorFunction::Fro => pairs.map(|(x, z)| (x - z) * (x - z)).sum::<f64>(),
            ErrorFunction::Div => pairs
                .map(|(&x, &z)| {
                    let log = if x > 0.0 {
                        x * (x / (z + eps)).ln()
                    } else {
                        0.0
                    };
                    log - x + z
                })
                .sum(),
        }
    };
    let as_fit = matmul(&state.a, &state.s).expect("factor shapes checked by fit");
    let bs_fit = matmul(&state.b, &state.s).expect("factor shapes checked by fit");
    combine(
        term(variant.reconstruction, as_true, &as_fit),
        lambda,
        term(variant.supervision, bs_true, &bs_fit),
    )
}

/// Relative errors of the four variants in one trial, indexed like
/// [`ModelVariant::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialErrors {
    pub trial: usize,
    pub errors: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub matched: ModelVariant,
    pub trials: Vec<TrialErrors>,
    /// Mean over trials, indexed like [`ModelVariant::ALL`].
    pub mean: [f64; 4],
}

impl ExperimentResult {
    /// Index of the smallest mean error; `None` when two variants tie for it.
    pub fn strict_minimum(&self) -> Option<usize> {
        let best = (0..4).min_by(|&i, &j| self.mean[i].total_cmp(&self.mean[j]))?;
        let ties = self.mean.iter().filter(|&&v| v == self.mean[best]).count();
        (ties == 1).then_some(best)
    }

    pub fn matched_is_strict_minimum(&self) -> bool {
        self.strict_minimum() == Some(self.matched.objective_index() - 1)
    }
}

fn run_trial(
    spec: &ExperimentSpec,
    truth: &FactorState,
    as_: &DenseMatrix,
    bs: &DenseMatrix,
    trial: usize,
) -> Result<TrialErrors> {
    let sample_index = ((spec.id as u64) << 32) | trial as u64;
    let mut rng = rng::stream(spec.seed, streams::SAMPLE, sample_index);
    let x = sample(spec.x_noise, as_, &mut rng)?;
    let y = sample(spec.y_noise, bs, &mut rng)?;
    let w = DenseMatrix::ones(x.rows(), x.cols());
    let l = DenseMatrix::ones(y.rows(), y.cols());

    let init_seed = rng::derive_seed(spec.seed, streams::INIT, trial as u64);
    let init = initialize(truth.shape(), init_seed);
    let config = SsnmfConfig {
        rank: spec.shape.r,
        lambda: spec.lambda,
        max_iters: spec.iters,
        tol: 0.0,
        eps: spec.eps,
        seed: init_seed,
    };
    let matched = spec.matched_variant();
    let before = score(matched, spec.lambda, &init, as_, bs, spec.eps);
    let mut errors = [0.0; 4];
    for (slot, &v) in errors.iter_mut().zip(ModelVariant::ALL.iter()) {
        let res = fit_untraced(v, &x, &y, &w, &l, &config, Some(init.clone())).map_err(|e| {
            SsnmfError::Fit(format!("experiment {} trial {trial}, {v}: {e}", spec.id))
        })?;
        let after = score(matched, spec.lambda, &res.state, as_, bs, spec.eps);
        *slot = if before > 0.0 { after / before } else { 0.0 };
    }
    Ok(TrialErrors { trial, errors })
}

/// Runs all trials of one experiment. The ground-truth factors depend only
/// on the seed and the shape, so every experiment with the same seed shares
/// them.
pub fn run_mle_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut grid = run_experiments(std::slice::from_ref(spec))?;
    Ok(grid.experiments.remove(0))
}

/// Runs several experiments, spreading their trials over the current rayon
/// pool.
pub fn run_experiments(specs: &[ExperimentSpec]) -> Result<ErrorGrid> {
    for spec in specs {
        spec.validate()?;
    }
    let prepared: Vec<(FactorState, DenseMatrix, DenseMatrix)> = specs
        .iter()
        .map(|spec| {
            let truth = gen_factors(spec.shape, spec.density, spec.seed)?;
            let as_ = matmul(&truth.a, &truth.s)?;
            let bs = matmul(&truth.b, &truth.s)?;
            Ok((truth, as_, bs))
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = specs
        .iter()
        .enumerate()
        .flat_map(|(e, spec)| (0..spec.trials).map(move |t| (e, t)))
        .collect();
    let outcomes: Vec<Result<TrialErrors>> = jobs
        .par_iter()
        .map(|&(e, t)| {
            let (truth, as_, bs) = &prepared[e];
            run_trial(&specs[e], truth, as_, bs, t)
        })
        .collect();

    let mut experiments: Vec<ExperimentResult> = specs
        .iter()
        .map(|spec| ExperimentResult {
            spec: *spec,
            matched: spec.matched_variant(),
            trials: Vec::with_capacity(spec.trials),
            mean: [0.0; 4],
        })
        .collect();
    for (&(e, _), outcome) in jobs.iter().zip(outcomes) {
        experiments[e].trials.push(outcome?);
    }
    for exp in &mut experiments {
        let n = exp.trials.len() as f64;
        for i in 0..4 {
            exp.mean[i] = exp.trials.iter().map(|t| t.errors[i]).sum::<f64>() / n;
        }
    }
    Ok(ErrorGrid { experiments })
}

/// Mean relative errors, variants by experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorGrid {
    pub experiments: Vec<ExperimentResult>,
}

impl ErrorGrid {
    /// One row per variant, one column per experiment, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..4 {
            let row: Vec<String> = self
                .experiments
                .iter()
                .map(|e| e.mean[i].to_string())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Human-readable table; the smallest entry of each column carries a `*`.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<8}", "model");
        for e in &self.experiments {
            out.push_str(&format!("{:>14}", format!("F{}", e.spec.id)));
        }
        out.push('\n');
        for (i, v) in ModelVariant::ALL.iter().enumerate() {
            out.push_str(&format!("{:<8}", v.to_string()));
            for e in &self.experiments {
                let mark = if e.strict_minimum() == Some(i) {
                    "*"
                } else {
                    " "
                };
                out.push_str(&format!("{:>13.4}{mark}", e.mean[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Well-separated classes: each class owns a block of features, and every
/// sample of class `c` loads only on dictionary column `c`. Returns the data
/// (with clamped Gaussian noise) and the class of each sample.
pub fn separable_classes(
    features_per_class: usize,
    samples_per_class: usize,
    k: usize,
    noise_variance: f64,
    seed: u64,
) -> Result<(DenseMatrix, Vec<usize>)> {
    if features_per_class == 0 || samples_per_class == 0 || k == 0 {
        return Err(SsnmfError::Config(
            "separable data needs positive block sizes and k".into(),
        ));
    }
    let n1 = features_per_class * k;
    let n2 = samples_per_class * k;
    let mut rng = rng::stream(seed, streams::FACTORS, 1);
    let mut a = DenseMatrix::zeros(n1, k);
    for c in 0..k {
        for i in c * features_per_class..(c + 1) * features_per_class {
            a.set(i, c, 0.5 + rng.random::<f64>());
        }
    }
    let mut s = DenseMatrix::zeros(k, n2);
    let mut labels = Vec::with_capacity(n2);
    for j in 0..n2 {
        let c = j % k;
        s.set(c, j, 0.5 + rng.random::<f64>());
        labels.push(c);
    }
    let mean = matmul(&a, &s)?;
    let x = gaussian_with(
        &mean,
        noise_variance,
        &mut rng::stream(seed, streams::SAMPLE, 1),
    )?;
    Ok((x, labels))
}
