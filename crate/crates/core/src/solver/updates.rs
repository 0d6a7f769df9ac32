//! Multiplicative update sweeps.
//!
//! A sweep updates A, then B, then S, each update seeing the factors already
//! refreshed earlier in the same sweep. All divisors carry the `eps` guard.
//!
//! | variant | A            | B            | S numerator / denominator                          |
//! |---------|--------------|--------------|----------------------------------------------------|
//! | (F,F)   | Frobenius    | Frobenius    | Aᵀ(W⊙X) + λBᵀ(L⊙Y) / Aᵀ(W⊙AS) + λBᵀ(L⊙BS)          |
//! | (F,D)   | Frobenius    | divergence   | 2Aᵀ(W⊙X) + λBᵀR_Y / 2Aᵀ(W⊙AS) + λBᵀL               |
//! | (D,F)   | divergence   | Frobenius    | AᵀR_X + 2λBᵀ(L⊙Y) / AᵀW + 2λBᵀ(L⊙BS)               |
//! | (D,D)   | divergence   | divergence   | AᵀR_X + λBᵀR_Y / AᵀW + λBᵀL                        |
//!
//! with `R_X = ((W⊙X) / (W⊙AS)) ⊙ W` and `R_Y` likewise for the labels.

use crate::divergence::{div_term, fro_term, ErrorFunction, ModelVariant};
use crate::matrix::{matmul_into, matmul_nt_into, matmul_tn_into, DenseMatrix};

use super::FactorState;

/// Data side of one factorization problem. A mask of `None` means all ones,
/// which lets the kernels skip the elementwise weighting.
pub(crate) struct Problem<'a> {
    pub x: &'a DenseMatrix,
    pub y: &'a DenseMatrix,
    pub w: Option<&'a DenseMatrix>,
    pub l: Option<&'a DenseMatrix>,
    /// `W⊙X`, or `None` when `W` is all ones.
    wx: Option<DenseMatrix>,
    ly: Option<DenseMatrix>,
}

impl<'a> Problem<'a> {
    pub fn new(
        x: &'a DenseMatrix,
        y: &'a DenseMatrix,
        w: &'a DenseMatrix,
        l: &'a DenseMatrix,
    ) -> Self {
        let w = (!w.all_equal(1.0)).then_some(w);
        let l = (!l.all_equal(1.0)).then_some(l);
        let weighted = |d: &DenseMatrix, m: &DenseMatrix| {
            let mut out = d.clone();
            for (o, &mv) in out.as_mut_slice().iter_mut().zip(m.as_slice()) {
                *o *= mv;
            }
            out
        };
        Problem {
            x,
            y,
            w,
            l,
            wx: w.map(|m| weighted(x, m)),
            ly: l.map(|m| weighted(y, m)),
        }
    }

    fn wx(&self) -> &DenseMatrix {
        self.wx.as_ref().unwrap_or(self.x)
    }

    fn ly(&self) -> &DenseMatrix {
        self.ly.as_ref().unwrap_or(self.y)
    }
}

/// Preallocated scratch for one problem size.
pub(crate) struct Workspace {
    /// AS for the current factors, when `as_fresh` is set.
    as_: DenseMatrix,
    bs: DenseMatrix,
    as_fresh: bool,
    bs_fresh: bool,
    rx: DenseMatrix,
    ry: DenseMatrix,
    gram: DenseMatrix,
    num_a: DenseMatrix,
    den_a: DenseMatrix,
    num_b: DenseMatrix,
    den_b: DenseMatrix,
    num_s: DenseMatrix,
    den_s: DenseMatrix,
    num_sup: DenseMatrix,
    den_sup: DenseMatrix,
}

impl Workspace {
    pub fn new(n1: usize, n2: usize, k: usize, r: usize) -> Self {
        Workspace {
            as_: DenseMatrix::zeros(n1, n2),
            bs: DenseMatrix::zeros(k, n2),
            as_fresh: false,
            bs_fresh: false,
            rx: DenseMatrix::zeros(n1, n2),
            ry: DenseMatrix::zeros(k, n2),
            gram: DenseMatrix::zeros(r, r),
            num_a: DenseMatrix::zeros(n1, r),
            den_a: DenseMatrix::zeros(n1, r),
            num_b: DenseMatrix::zeros(k, r),
            den_b: DenseMatrix::zeros(k, r),
            num_s: DenseMatrix::zeros(r, n2),
            den_s: DenseMatrix::zeros(r, n2),
            num_sup: DenseMatrix::zeros(r, n2),
            den_sup: DenseMatrix::zeros(r, n2),
        }
    }

    /// Objective terms at `state`; leaves AS and BS cached for the next sweep.
    pub fn objective_terms(
        &mut self,
        variant: ModelVariant,
        problem: &Problem<'_>,
        state: &FactorState,
    ) -> (f64, f64) {
        matmul_into(&state.a, &state.s, &mut self.as_);
        matmul_into(&state.b, &state.s, &mut self.bs);
        self.as_fresh = true;
        self.bs_fresh = true;
        let recon = term(variant.reconstruction, problem.x, &self.as_, problem.w);
        let sup = term(variant.supervision, problem.y, &self.bs, problem.l);
        (recon, sup)
    }

    /// One A → B → S sweep, in place.
    pub fn step(
        &mut self,
        variant: ModelVariant,
        problem: &Problem<'_>,
        state: &mut FactorState,
        lambda: f64,
        eps: f64,
    ) {
        let needs_product = |kind: ErrorFunction, mask: Option<&DenseMatrix>| {
            kind == ErrorFunction::Div || mask.is_some()
        };
        let recon_product = needs_product(variant.reconstruction, problem.w);
        let sup_product = needs_product(variant.supervision, problem.l);
        if recon_product && !self.as_fresh {
            matmul_into(&state.a, &state.s, &mut self.as_);
        }
        if sup_product && !self.bs_fresh {
            matmul_into(&state.b, &state.s, &mut self.bs);
        }
        self.as_fresh = false;
        self.bs_fresh = false;
        if !recon_product || !sup_product {
            matmul_nt_into(&state.s, &state.s, &mut self.gram);
        }

        // A, using AS from before the sweep
        data_side(
            variant.reconstruction,
            problem.wx(),
            problem.w,
            &self.as_,
            &state.a,
            &state.s,
            &self.gram,
            &mut self.rx,
            &mut self.num_a,
            &mut self.den_a,
            eps,
        );
        apply_ratio(&mut state.a, &self.num_a, &self.den_a, eps);

        // B, using BS from before the sweep (B and S unchanged so far)
        data_side(
            variant.supervision,
            problem.ly(),
            problem.l,
            &self.bs,
            &state.b,
            &state.s,
            &self.gram,
            &mut self.ry,
            &mut self.num_b,
            &mut self.den_b,
            eps,
        );
        apply_ratio(&mut state.b, &self.num_b, &self.den_b, eps);

        // S, with the new A and B
        let (cr, cs) = s_weights(variant);
        if recon_product {
            matmul_into(&state.a, &state.s, &mut self.as_);
        }
        code_side(
            variant.reconstruction,
            problem.wx(),
            problem.w,
            &self.as_,
            &state.a,
            &state.s,
            &mut self.gram,
            &mut self.rx,
            &mut self.num_s,
            &mut self.den_s,
            eps,
        );
        if cr != 1.0 {
            scale_in_place(&mut self.num_s, cr);
            scale_in_place(&mut self.den_s, cr);
        }
        if lambda != 0.0 {
            if sup_product {
                matmul_into(&state.b, &state.s, &mut self.bs);
            }
            code_side(
                variant.supervision,
                problem.ly(),
                problem.l,
                &self.bs,
                &state.b,
                &state.s,
                &mut self.gram,
                &mut self.ry,
                &mut self.num_sup,
                &mut self.den_sup,
                eps,
            );
            let c = cs * lambda;
            for (n, v) in self
                .num_s
                .as_mut_slice()
                .iter_mut()
                .zip(self.num_sup.as_slice())
            {
                *n += c * v;
            }
            for (d, v) in self
                .den_s
                .as_mut_slice()
                .iter_mut()
                .zip(self.den_sup.as_slice())
            {
                *d += c * v;
            }
        }
        apply_ratio(&mut state.s, &self.num_s, &self.den_s, eps);
    }
}

/// Constant factors on the two S-update terms; they mirror the gradient
/// scaling of each error function.
fn s_weights(variant: ModelVariant) -> (f64, f64) {
    match (variant.reconstruction, variant.supervision) {
        (ErrorFunction::Fro, ErrorFunction::Div) => (2.0, 1.0),
        (ErrorFunction::Div, ErrorFunction::Fro) => (1.0, 2.0),
        _ => (1.0, 1.0),
    }
}

pub(crate) fn term(
    kind: ErrorFunction,
    data: &DenseMatrix,
    model: &DenseMatrix,
    mask: Option<&DenseMatrix>,
) -> f64 {
    let m = mask.map(DenseMatrix::as_slice);
    match kind {
        ErrorFunction::Fro => fro_term(data.as_slice(), model.as_slice(), m),
        ErrorFunction::Div => div_term(data.as_slice(), model.as_slice(), m),
    }
}

/// Numerator and denominator for the dictionary-side update (A or B):
/// Frobenius: `(M⊙D)Sᵀ` over `(M⊙Z)Sᵀ`; divergence: `R Sᵀ` over `M Sᵀ`.
///
/// Without a mask the Frobenius denominator is `F(SSᵀ)`, which needs neither
/// `model` nor `r` times `n2` work per entry; `gram` must then hold `SSᵀ`.
#[allow(clippy::too_many_arguments)]
fn data_side(
    kind: ErrorFunction,
    masked_data: &DenseMatrix,
    mask: Option<&DenseMatrix>,
    model: &DenseMatrix,
    factor: &DenseMatrix,
    s: &DenseMatrix,
    gram: &DenseMatrix,
    scratch: &mut DenseMatrix,
    num: &mut DenseMatrix,
    den: &mut DenseMatrix,
    eps: f64,
) {
    match kind {
        ErrorFunction::Fro => {
            matmul_nt_into(masked_data, s, num);
            match mask {
                None => matmul_into(factor, gram, den),
                Some(m) => {
                    masked_model(model, m, scratch);
                    matmul_nt_into(scratch, s, den);
                }
            }
        }
        ErrorFunction::Div => {
            div_ratio(masked_data, model, mask, scratch, eps);
            matmul_nt_into(scratch, s, num);
            match mask {
                None => {
                    let sums = s.row_sums();
                    for i in 0..den.rows() {
                        den.row_mut(i).copy_from_slice(&sums);
                    }
                }
                Some(m) => matmul_nt_into(m, s, den),
            }
        }
    }
}

/// Numerator and denominator contributed to the S update by one term:
/// Frobenius: `Fᵀ(M⊙D)` over `Fᵀ(M⊙Z)`; divergence: `FᵀR` over `FᵀM`.
/// Without a mask the Frobenius denominator is `(FᵀF)S`, built in `gram`.
#[allow(clippy::too_many_arguments)]
fn code_side(
    kind: ErrorFunction,
    masked_data: &DenseMatrix,
    mask: Option<&DenseMatrix>,
    model: &DenseMatrix,
    factor: &DenseMatrix,
    s: &DenseMatrix,
    gram: &mut DenseMatrix,
    scratch: &mut DenseMatrix,
    num: &mut DenseMatrix,
    den: &mut DenseMatrix,
    eps: f64,
) {
    match kind {
        ErrorFunction::Fro => {
            matmul_tn_into(factor, masked_data, num);
            match mask {
                None => {
                    matmul_tn_into(factor, factor, gram);
                    matmul_into(gram, s, den);
                }
                Some(m) => {
                    masked_model(model, m, scratch);
                    matmul_tn_into(factor, scratch, den);
                }
            }
        }
        ErrorFunction::Div => {
            div_ratio(masked_data, model, mask, scratch, eps);
            matmul_tn_into(factor, scratch, num);
            match mask {
                None => {
                    let sums = factor.column_sums();
                    for (l, &v) in sums.iter().enumerate() {
                        den.row_mut(l).fill(v);
                    }
                }
                Some(m) => matmul_tn_into(factor, m, den),
            }
        }
    }
}

fn masked_model(model: &DenseMatrix, mask: &DenseMatrix, out: &mut DenseMatrix) {
    for ((o, &z), &m) in out
        .as_mut_slice()
        .iter_mut()
        .zip(model.as_slice())
        .zip(mask.as_slice())
    {
        *o = m * z;
    }
}

/// `((M⊙D) / (M⊙Z + eps)) ⊙ M`.
fn div_ratio(
    masked_data: &DenseMatrix,
    model: &DenseMatrix,
    mask: Option<&DenseMatrix>,
    out: &mut DenseMatrix,
    eps: f64,
) {
    let o = out.as_mut_slice();
    let d = masked_data.as_slice();
    let z = model.as_slice();
    match mask {
        None => {
            for ((o, &d), &z) in o.iter_mut().zip(d).zip(z) {
                *o = d / (z + eps);
            }
        }
        Some(m) => {
            for (((o, &d), &z), &m) in o.iter_mut().zip(d).zip(z).zip(m.as_slice()) {
                *o = d / (m * z + eps) * m;
            }
        }
    }
}

/// Entries that decay below this are set to zero, which is where the
/// multiplicative updates send them anyway. Stopping the decay early keeps
/// products of factors out of the subnormal range, whose arithmetic is many
/// times slower.
pub(crate) const ZERO_FLOOR: f64 = 1e-150;

pub(crate) fn apply_ratio(
    factor: &mut DenseMatrix,
    num: &DenseMatrix,
    den: &DenseMatrix,
    eps: f64,
) {
    for ((f, &n), &d) in factor
        .as_mut_slice()
        .iter_mut()
        .zip(num.as_slice())
        .zip(den.as_slice())
    {
        let v = *f * (n / (d + eps));
        *f = if v < ZERO_FLOOR { 0.0 } else { v };
    }
}

fn scale_in_place(m: &mut DenseMatrix, c: f64) {
    for v in m.as_mut_slice() {
        *v *= c;
    }
}
