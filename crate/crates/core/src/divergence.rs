//! Error functions and the four joint objectives.
//!
//! Both error functions take a nonnegative weight matrix that is applied to
//! both arguments before comparison. For the I-divergence the convention
//! `0 · log 0 = 0` is used, and a positive data entry facing a zero model
//! entry yields `+inf` rather than an error.
//!
//! The weights may be any nonnegative reals. Only binary weights (observed /
//! missing) carry the maximum-likelihood interpretation; fractional weights
//! are accepted as confidence weights.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SsnmfError};
use crate::matrix::{matmul, same_shape, DenseMatrix};

/// Which error function a term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorFunction {
    /// Squared Frobenius norm of the weighted residual.
    Fro,
    /// I-divergence (generalized Kullback-Leibler).
    Div,
}

/// One of the four (reconstruction, supervision) error pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelVariant {
    pub reconstruction: ErrorFunction,
    pub supervision: ErrorFunction,
}

impl ModelVariant {
    pub const FF: ModelVariant = ModelVariant::new(ErrorFunction::Fro, ErrorFunction::Fro);
    pub const FD: ModelVariant = ModelVariant::new(ErrorFunction::Fro, ErrorFunction::Div);
    pub const DF: ModelVariant = ModelVariant::new(ErrorFunction::Div, ErrorFunction::Fro);
    pub const DD: ModelVariant = ModelVariant::new(ErrorFunction::Div, ErrorFunction::Div);

    /// In the conventional order F1..F4.
    pub const ALL: [ModelVariant; 4] = [Self::FF, Self::FD, Self::DF, Self::DD];

    pub const fn new(reconstruction: ErrorFunction, supervision: ErrorFunction) -> Self {
        ModelVariant {
            reconstruction,
            supervision,
        }
    }

    /// Short code: `FF`, `FD`, `DF` or `DD`.
    pub fn code(&self) -> &'static str {
        match (self.reconstruction, self.supervision) {
            (ErrorFunction::Fro, ErrorFunction::Fro) => "FF",
            (ErrorFunction::Fro, ErrorFunction::Div) => "FD",
            (ErrorFunction::Div, ErrorFunction::Fro) => "DF",
            (ErrorFunction::Div, ErrorFunction::Div) => "DD",
        }
    }

    /// 1-based objective index (F1 = FF, F2 = FD, F3 = DF, F4 = DD).
    pub fn objective_index(&self) -> usize {
        Self::ALL.iter().position(|v| v == self).unwrap() + 1
    }

    pub fn from_objective_index(idx: usize) -> Option<Self> {
        idx.checked_sub(1).and_then(|i| Self::ALL.get(i).copied())
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |e: ErrorFunction| match e {
            ErrorFunction::Fro => "F",
            ErrorFunction::Div => "D",
        };
        write!(
            f,
            "({},{})",
            name(self.reconstruction),
            name(self.supervision)
        )
    }
}

impl FromStr for ModelVariant {
    type Err = SsnmfError;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        let v = match norm.as_str() {
            "FF" | "FROFRO" | "F1" | "1" => Self::FF,
            "FD" | "FRODIV" | "F2" | "2" => Self::FD,
            "DF" | "DIVFRO" | "F3" | "3" => Self::DF,
            "DD" | "DIVDIV" | "F4" | "4" => Self::DD,
            _ => {
                return Err(SsnmfError::Config(format!(
                    "unknown model variant '{s}' (expected FF, FD, DF or DD)"
                )))
            }
        };
        Ok(v)
    }
}

impl Serialize for ModelVariant {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for ModelVariant {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A variant together with the supervision weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub variant: ModelVariant,
    pub lambda: f64,
}

impl ObjectiveSpec {
    pub fn new(variant: ModelVariant, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(SsnmfError::Config(format!(
                "lambda must be a finite nonnegative number, got {lambda}"
            )));
        }
        Ok(ObjectiveSpec { variant, lambda })
    }
}

/// `Σ (m_ij (x_ij − z_ij))²`.
pub fn frobenius_sq(x: &DenseMatrix, z: &DenseMatrix, mask: &DenseMatrix) -> Result<f64> {
    same_shape("frobenius_sq", x, z)?;
    same_shape("frobenius_sq", x, mask)?;
    Ok(fro_term(x.as_slice(), z.as_slice(), Some(mask.as_slice())))
}

/// `D(m ⊙ x ‖ m ⊙ z)`; may be `+inf`.
pub fn i_divergence(x: &DenseMatrix, z: &DenseMatrix, mask: &DenseMatrix) -> Result<f64> {
    same_shape("i_divergence", x, z)?;
    same_shape("i_divergence", x, mask)?;
    Ok(div_term(x.as_slice(), z.as_slice(), Some(mask.as_slice())))
}

/// Error function `kind` between data `x` and model `z` under `mask`.
pub fn error_term(
    kind: ErrorFunction,
    x: &DenseMatrix,
    z: &DenseMatrix,
    mask: &DenseMatrix,
) -> Result<f64> {
    match kind {
        ErrorFunction::Fro => frobenius_sq(x, z, mask),
        ErrorFunction::Div => i_divergence(x, z, mask),
    }
}

/// Reconstruction and (unweighted) supervision terms of the objective.
#[allow(clippy::too_many_arguments)]
pub fn objective_terms(
    spec: &ObjectiveSpec,
    a: &DenseMatrix,
    b: &DenseMatrix,
    s: &DenseMatrix,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
) -> Result<(f64, f64)> {
    let as_ = matmul(a, s)?;
    let bs = matmul(b, s)?;
    let recon = error_term(spec.variant.reconstruction, x, &as_, w)?;
    let sup = error_term(spec.variant.supervision, y, &bs, l)?;
    Ok((recon, sup))
}

/// `R(W⊙X, W⊙AS) + λ S(L⊙Y, L⊙BS)` for the variant's pair (R, S).
#[allow(clippy::too_many_arguments)]
pub fn objective(
    spec: &ObjectiveSpec,
    a: &DenseMatrix,
    b: &DenseMatrix,
    s: &DenseMatrix,
    x: &DenseMatrix,
    y: &DenseMatrix,
    w: &DenseMatrix,
    l: &DenseMatrix,
) -> Result<f64> {
    let (recon, sup) = objective_terms(spec, a, b, s, x, y, w, l)?;
    Ok(combine(recon, spec.lambda, sup))
}

/// `recon + λ·sup`, treating `0 · inf` as 0 so that λ = 0 really drops the
/// supervision term.
#[inline]
pub(crate) fn combine(recon: f64, lambda: f64, sup: f64) -> f64 {
    if lambda == 0.0 {
        recon
    } else {
        recon + lambda * sup
    }
}

/// Slice-level kernels. `mask = None` means all ones.
pub(crate) fn fro_term(x: &[f64], z: &[f64], mask: Option<&[f64]>) -> f64 {
    match mask {
        None => x
            .iter()
            .zip(z)
            .map(|(a, b)| {
                let d = a - b;
                d * d
            })
            .sum(),
        Some(m) => x
            .iter()
            .zip(z)
            .zip(m)
            .map(|((a, b), w)| {
                let d = w * a - w * b;
                d * d
            })
            .sum(),
    }
}

#[inline]
fn div_entry(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        b
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a * (a / b).ln() - a + b
    }
}

pub(crate) fn div_term(x: &[f64], z: &[f64], mask: Option<&[f64]>) -> f64 {
    match mask {
        None => x.iter().zip(z).map(|(&a, &b)| div_entry(a, b)).sum(),
        Some(m) => x
            .iter()
            .zip(z)
            .zip(m)
            .map(|((&a, &b), &w)| div_entry(w * a, w * b))
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn frobenius_examples() {
        let x = m(&[&[1.0, 2.0]]);
        assert_eq!(frobenius_sq(&x, &x, &m(&[&[3.0, 0.5]])).unwrap(), 0.0);
        assert_eq!(
            frobenius_sq(&x, &m(&[&[3.0, 5.0]]), &m(&[&[1.0, 0.0]])).unwrap(),
            4.0
        );
        // weight enters inside the square
        assert_eq!(
            frobenius_sq(&m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[2.0]])).unwrap(),
            4.0
        );
    }

    #[test]
    fn divergence_examples() {
        let x = m(&[&[1.0, 2.0], &[0.0, 4.0]]);
        assert_eq!(i_divergence(&x, &x, &DenseMatrix::ones(2, 2)).unwrap(), 0.0);
        let d = i_divergence(&m(&[&[2.0]]), &m(&[&[1.0]]), &m(&[&[1.0]])).unwrap();
        assert!((d - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
        assert!((d - 0.386294).abs() < 1e-6);
        assert_eq!(
            i_divergence(&m(&[&[0.0]]), &m(&[&[3.0]]), &m(&[&[1.0]])).unwrap(),
            3.0
        );
        let inf = i_divergence(&m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[1.0]])).unwrap();
        assert!(inf.is_infinite() && inf > 0.0);
        // masked-out entry: both arguments vanish
        assert_eq!(
            i_divergence(&m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[0.0]])).unwrap(),
            0.0
        );
    }

    #[test]
    fn objective_examples() {
        let one = m(&[&[1.0]]);
        let spec = ObjectiveSpec::new(ModelVariant::FD, 1.0).unwrap();
        let f = objective(
            &spec,
            &one,
            &one,
            &one,
            &m(&[&[2.0]]),
            &m(&[&[3.0]]),
            &one,
            &one,
        )
        .unwrap();
        let expected = 1.0 + 3.0 * 3f64.ln() - 2.0;
        assert!((f - expected).abs() < 1e-12);
        assert!((f - 2.295837).abs() < 1e-6);

        let a = m(&[&[0.5, 1.0], &[2.0, 0.1], &[0.3, 0.3]]);
        let b = m(&[&[1.0, 0.0], &[0.2, 0.7]]);
        let s = m(&[&[1.0, 0.4, 0.0], &[0.3, 2.0, 1.0]]);
        let x = matmul(&a, &s).unwrap();
        let y = matmul(&b, &s).unwrap();
        let w = DenseMatrix::ones(3, 3);
        let l = DenseMatrix::ones(2, 3);
        for v in ModelVariant::ALL {
            let spec = ObjectiveSpec::new(v, 1.0).unwrap();
            let f = objective(&spec, &a, &b, &s, &x, &y, &w, &l).unwrap();
            assert!(f.abs() < 1e-12, "{v}: {f}");
        }

        let x2 = x.map(|v| v + 0.25);
        let spec = ObjectiveSpec::new(ModelVariant::FF, 0.0).unwrap();
        let f = objective(&spec, &a, &b, &s, &x2, &y.scale(3.0), &w, &l).unwrap();
        let direct = frobenius_sq(&x2, &matmul(&a, &s).unwrap(), &w).unwrap();
        assert_eq!(f, direct);
    }

    #[test]
    fn objective_is_sum_of_terms() {
        let a = m(&[&[0.5, 1.0], &[2.0, 0.1]]);
        let b = m(&[&[1.0, 0.2]]);
        let s = m(&[&[1.0, 0.4, 0.2], &[0.3, 2.0, 1.0]]);
        let x = m(&[&[1.0, 0.0, 2.0], &[0.5, 3.0, 1.0]]);
        let y = m(&[&[1.0, 0.0, 1.0]]);
        let w = m(&[&[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0]]);
        let l = m(&[&[1.0, 1.0, 0.0]]);
        for v in ModelVariant::ALL {
            let spec = ObjectiveSpec::new(v, 2.5).unwrap();
            let total = objective(&spec, &a, &b, &s, &x, &y, &w, &l).unwrap();
            let recon = error_term(v.reconstruction, &x, &matmul(&a, &s).unwrap(), &w).unwrap();
            let sup = error_term(v.supervision, &y, &matmul(&b, &s).unwrap(), &l).unwrap();
            assert!((total - (recon + 2.5 * sup)).abs() < 1e-12);
        }
    }

    #[test]
    fn variant_parsing_and_naming() {
        for v in ModelVariant::ALL {
            assert_eq!(v.code().parse::<ModelVariant>().unwrap(), v);
            assert_eq!(
                ModelVariant::from_objective_index(v.objective_index()),
                Some(v)
            );
        }
        assert_eq!("(F,D)".parse::<ModelVariant>().unwrap(), ModelVariant::FD);
        assert_eq!("div-fro".parse::<ModelVariant>().unwrap(), ModelVariant::DF);
        assert!("xx".parse::<ModelVariant>().is_err());
        assert_eq!(ModelVariant::DF.to_string(), "(D,F)");
        assert!(ObjectiveSpec::new(ModelVariant::FF, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn error_functions_nonnegative_and_mask_blind(
            x in prop::collection::vec(0.0f64..5.0, 6),
            z in prop::collection::vec(0.01f64..5.0, 6),
            mask in prop::collection::vec(prop::bool::ANY, 6),
            junk in 0.0f64..100.0,
            scale in 0.1f64..50.0,
        ) {
            let xm = DenseMatrix::from_vec(2, 3, x.clone()).unwrap();
            let zm = DenseMatrix::from_vec(2, 3, z).unwrap();
            let w = DenseMatrix::from_vec(2, 3, mask.iter().map(|&b| b as u8 as f64).collect()).unwrap();
            let fro = frobenius_sq(&xm, &zm, &w).unwrap();
            let div = i_divergence(&xm, &zm, &w).unwrap();
            prop_assert!(fro >= 0.0);
            prop_assert!(div >= -1e-12);

            // perturbing masked-out entries changes nothing
            let mut xp = xm.clone();
            let mut zp = zm.clone();
            for (idx, &keep) in mask.iter().enumerate() {
                if !keep {
                    xp.as_mut_slice()[idx] += junk;
                    zp.as_mut_slice()[idx] += junk;
                }
            }
            prop_assert_eq!(frobenius_sq(&xp, &zp, &w).unwrap(), fro);
            prop_assert_eq!(i_divergence(&xp, &zp, &w).unwrap(), div);

            let ones = DenseMatrix::ones(2, 3);
            let sx = xm.scale(scale);
            prop_assert_eq!(i_divergence(&sx, &sx, &ones).unwrap(), 0.0);
            prop_assert_eq!(frobenius_sq(&sx, &sx, &ones).unwrap(), 0.0);
        }
    }
}
