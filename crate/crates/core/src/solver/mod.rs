//! Multiplicative-update training for the four joint factorization models.
//!
//! [`fit`] runs sweeps of [`mu_step`] and records the objective before the
//! first sweep and after each one. Training stops after `max_iters` sweeps or
//! once the objective has fallen below `tol` times its initial value.

mod gradient;
mod updates;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use crate::divergence::{ErrorFunction, ModelVariant};
pub use gradient::{gradient, mu_step_sizes, Gradients};

use crate::divergence::combine;
use crate::error::{Result, SsnmfError};
use crate::matrix::{check_eps, DenseMatrix, Shape};
use crate::rng::{self, streams};

pub(crate) use updates::term;
use updates::{Problem, Workspace};

pub const DEFAULT_EPS: f64 = 1e-10;

/// Lower end of the uniform initialization range; strictly positive so no
/// entry starts at the absorbing value zero.
pub const INIT_LOW: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsnmfConfig {
    pub rank: usize,
    pub lambda: f64,
    pub max_iters: usize,
    /// Relative-error stopping threshold; 0 disables it.
    pub tol: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for SsnmfConfig {
    fn default() -> Self {
        SsnmfConfig {
            rank: 5,
            lambda: 1.0,
            max_iters: 100,
            tol: 0.0,
            eps: DEFAULT_EPS,
            seed: 0,
        }
    }
}

impl SsnmfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(SsnmfError::Config("rank must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(SsnmfError::Config("max_iters must be >= 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(SsnmfError::Config(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(SsnmfError::Config(format!(
                "tol must be >= 0, got {}",
                self.tol
            )));
        }
        check_eps(self.eps)
    }
}

/// The three factors: dictionary `a` (n1×r), supervision `b` (k×r) and
/// shared representation `s` (r×n2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorState {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub s: DenseMatrix,
}

impl FactorState {
    pub fn shape(&self) -> Shape {
        Shape {
            n1: self.a.rows(),
            n2: self.s.cols(),
            k: self.b.rows(),
            r: self.s.rows(),
        }
    }

    fn check(&self, shape: Shape) -> Result<()> {
        let expect = [
            ("A", self.a.shape(), (shape.n1, shape.r)),
            ("B", self.b.shape(), (shape.k, shape.r)),
            ("S", self.s.shape(), (shape.r, shape.n2)),
        ];
        for (name, got, want) in expect {
            if got != want {
                return Err(SsnmfError::Config(format!(
                    "initial factor {name} is {got:?}, expected {want:?}"
                )));
            }
        }
        self.a.check_nonnegative()?;
        self.b.check_nonnegative()?;
        self.s.check_nonnegative()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub variant: ModelVariant,
    pub config: SsnmfConfig,
    pub state: FactorState,
    /// Objective before the first sweep and after every sweep.
    pub objective_trace: Vec<f64>,
    pub relative_error: f64,
    pub iterations_run: usize,
}

/// Uniform draws on `[INIT_LOW, INIT_LOW + 1)`.
pub fn uniform_positive(rows: usize, cols: usize, rng: &mut rng::Rng) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = INIT_LOW + rng.random::<f64>();
    }
    m
}

/// Seeded initial factors, A then B then S from the `init` stream.
pub fn initialize(shape: Shape, seed: u64) -> FactorState {
    let mut rng = rng::stream(seed, streams::INIT, 0);
    let a = uniform_positive(shape.n1, shape.r, &mut rng);
    let b = uniform_positive(shape.k, shape.r, &mut rng);
    let s = uniform_positive(shape.r, shape.n2, &mut rng);
    FactorState { a, b, s }
}

fn check_inputs(x: &DenseMatrix, y: &DenseMatrix, w: &DenseMatrix, l: &DenseMatrix) -> Result<()> {
    let dim = |op, a: &DenseMatrix, b: &DenseMatrix| SsnmfError::Dimension {
        op,
        left: a.shape(),
        right: b.shape(),
    };
    if w.shape() != x.shape() {
        return Err(dim("data mask", x, w));
    }
    if l.shape() != y.shape() {
        return Err(dim("label mask", y, l));
    }
    if x.cols() != y.cols() {
        return Err(dim("data vs labels", x, y));
    }
    for m in [x, y, w, l] {
        m.check_nonnegative()?;
    }
    Ok(())
}

fn check_state(state: &FactorState, x: &DenseMatrix, y: &DenseMatrix) -> Result<()> {
    let r = state.s.rows();
    let ok = state.a.shape() == (x.rows(), r)
        && state.b.shape() == (y.rows(), r)
        && state.s.cols() == x.cols();
    if !ok {
        return Err(SsnmfError::Dimension {
            op: "factor state",
            left: (state.a.rows(), state.s.cols()),
            right: x.shape(),
        });
    }
    Ok(())
}

/// One sweep of the variant's multiplicative updates (A, then B, then S).
#[allow(clippy::too_many_arguments)]
pub fn mu_step(
    variant: ModelVariant,
    state: &FactorState,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
    lambda: f64,
    eps: f64,
) -> Result<FactorState> {
    check_inputs(x, y, w, l)?;
    check_state(state, x, y)?;
    check_eps(eps)?;
    let problem = Problem::new(x, y, w, l);
    let sh = state.shape();
    let mut ws = Workspace::new(sh.n1, sh.n2, sh.k, sh.r);
    let mut next = state.clone();
    ws.step(variant, &problem, &mut next, lambda, eps);
    Ok(next)
}

/// Trains the variant on `(x, y)` with masks `(w, l)`.
#[allow(clippy::too_many_arguments)]
pub fn fit(
    variant: ModelVariant,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
    config: &SsnmfConfig,
    init: Option<FactorState>,
) -> Result<FitResult> {
    run(variant, x, y, w, l, config, init, true)
}

/// Like [`fit`] without a stopping tolerance, evaluating the objective only
/// at the start and the end. The trace then has two entries.
#[allow(clippy::too_many_arguments)]
pub fn fit_untraced(
    variant: ModelVariant,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
    config: &SsnmfConfig,
    init: Option<FactorState>,
) -> Result<FitResult> {
    let config = SsnmfConfig {
        tol: 0.0,
        ..*config
    };
    run(variant, x, y, w, l, &config, init, false)
}

#[allow(clippy::too_many_arguments)]
fn run(
    variant: ModelVariant,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
    config: &SsnmfConfig,
    init: Option<FactorState>,
    traced: bool,
) -> Result<FitResult> {
    config.validate()?;
    check_inputs(x, y, w, l)?;
    let shape = Shape::new(x.rows(), x.cols(), y.rows(), config.rank)?;
    let mut state = match init {
        Some(s) => {
            s.check(shape)?;
            s
        }
        None => initialize(shape, config.seed),
    };

    let problem = Problem::new(x, y, w, l);
    let mut ws = Workspace::new(shape.n1, shape.n2, shape.k, shape.r);
    let eval = |ws: &mut Workspace, state: &FactorState| {
        let (recon, sup) = ws.objective_terms(variant, &problem, state);
        combine(recon, config.lambda, sup)
    };

    let first = eval(&mut ws, &state);
    if !first.is_finite() {
        return Err(SsnmfError::Fit(format!(
            "{variant} objective is {first} at initialization; the model has zeros where \
             the data are positive"
        )));
    }
    let mut trace = Vec::with_capacity(config.max_iters + 1);
    trace.push(first);
    let mut iterations = 0;
    while iterations < config.max_iters {
        ws.step(variant, &problem, &mut state, config.lambda, config.eps);
        iterations += 1;
        if !traced {
            continue;
        }
        let f = eval(&mut ws, &state);
        trace.push(f);
        if config.tol > 0.0 && first > 0.0 && f / first < config.tol {
            break;
        }
    }
    if !traced {
        trace.push(eval(&mut ws, &state));
    }
    let last = *trace.last().unwrap();
    let relative_error = if first > 0.0 { last / first } else { 0.0 };
    Ok(FitResult {
        variant,
        config: *config,
        state,
        objective_trace: trace,
        relative_error,
        iterations_run: iterations,
    })
}
