//! Analytic gradients of the four objectives and the entrywise step sizes
//! under which plain gradient descent coincides with the multiplicative
//! updates.
//!
//! The Frobenius term is differentiated as written, `‖W⊙(X−AS)‖²`, so its
//! residual carries `W⊙W`. For binary masks this is the usual `W`.

use crate::divergence::ErrorFunction;
use crate::error::Result;
use crate::matrix::{matmul, matmul_nt, matmul_tn, DenseMatrix};

use super::{check_inputs, check_state, FactorState, ModelVariant};

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub s: DenseMatrix,
}

/// Gradient of one error term with respect to the model product `Z`.
fn product_gradient(
    kind: ErrorFunction,
    data: &DenseMatrix,
    model: &DenseMatrix,
    mask: &DenseMatrix,
    eps: f64,
) -> DenseMatrix {
    let mut g = DenseMatrix::zeros(data.rows(), data.cols());
    let it = g
        .as_mut_slice()
        .iter_mut()
        .zip(data.as_slice())
        .zip(model.as_slice())
        .zip(mask.as_slice());
    match kind {
        ErrorFunction::Fro => {
            for (((g, &d), &z), &m) in it {
                *g = -2.0 * m * m * (d - z);
            }
        }
        ErrorFunction::Div => {
            for (((g, &d), &z), &m) in it {
                *g = m - (m * d) / (m * z + eps) * m;
            }
        }
    }
    g
}

/// `(∇_A F, ∇_B F, ∇_S F)` for the variant's objective with weight `lambda`.
/// Quotients inside the divergence gradients are guarded by `eps`.
#[allow(clippy::too_many_arguments)]
pub fn gradient(
    variant: ModelVariant,
    state: &FactorState,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
    lambda: f64,
    eps: f64,
) -> Result<Gradients> {
    check_inputs(x, y, w, l)?;
    check_state(state, x, y)?;
    let as_ = matmul(&state.a, &state.s)?;
    let bs = matmul(&state.b, &state.s)?;
    let gx = product_gradient(variant.reconstruction, x, &as_, w, eps);
    let gy = product_gradient(variant.supervision, y, &bs, l, eps).scale(lambda);

    let a = matmul_nt(&gx, &state.s);
    let b = matmul_nt(&gy, &state.s);
    let s = matmul_tn(&state.a, &gx).add(&matmul_tn(&state.b, &gy))?;
    Ok(Gradients { a, b, s })
}

/// Step sizes Γ with `factor − Γ ⊙ ∇F` equal to the multiplicative update of
/// each factor, all three evaluated at `state`.
///
/// Frobenius terms contribute `2(M⊙Z)` to the denominator, divergence terms
/// contribute `M` (times the transposed partner factor).
#[allow(clippy::too_many_arguments)]
pub fn mu_step_sizes(
    variant: ModelVariant,
    state: &FactorState,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
    lambda: f64,
    eps: f64,
) -> Result<Gradients> {
    check_inputs(x, y, w, l)?;
    check_state(state, x, y)?;
    let as_ = matmul(&state.a, &state.s)?;
    let bs = matmul(&state.b, &state.s)?;
    let weight = |kind: ErrorFunction, model: &DenseMatrix, mask: &DenseMatrix| match kind {
        ErrorFunction::Fro => {
            let mut out = model.clone();
            for (o, &m) in out.as_mut_slice().iter_mut().zip(mask.as_slice()) {
                *o *= 2.0 * m;
            }
            out
        }
        ErrorFunction::Div => mask.clone(),
    };
    let px = weight(variant.reconstruction, &as_, w);
    let py = weight(variant.supervision, &bs, l).scale(lambda);

    let den_a = matmul_nt(&px, &state.s);
    let den_b = matmul_nt(&py, &state.s);
    let den_s = matmul_tn(&state.a, &px).add(&matmul_tn(&state.b, &py))?;
    let ratio = |f: &DenseMatrix, d: &DenseMatrix| {
        let mut out = f.clone();
        for (o, &dv) in out.as_mut_slice().iter_mut().zip(d.as_slice()) {
            *o /= dv + eps;
        }
        out
    };
    Ok(Gradients {
        a: ratio(&state.a, &den_a),
        b: ratio(&state.b, &den_b),
        s: ratio(&state.s, &den_s),
    })
}
