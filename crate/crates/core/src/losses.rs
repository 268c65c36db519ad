//! Magnitude-constraint-adjustable (MCA) loss on compressed magnitude
//! spectrograms: per-element MSE plus an `alpha`-weighted cosine term.
//!
//! The cosine term only constrains the *shape* of the spectrogram, so a
//! label that is right up to a global gain is not penalised by it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::MagnitudeSpectrogram;

pub const DEFAULT_ALPHA: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub alpha: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param(
                "alpha",
                format!("{} must be >= 0", self.alpha),
            ));
        }
        Ok(())
    }
}

fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean over all T·F elements of `(a - b)²`.
pub fn mse_loss(a: &MagnitudeSpectrogram, b: &MagnitudeSpectrogram) -> Result<f64> {
    a.check_same_shape(b)?;
    let n = a.data().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / n as f64)
}

/// Cosine similarity under the Frobenius inner product.
pub fn cosine_similarity(a: &MagnitudeSpectrogram, b: &MagnitudeSpectrogram) -> Result<f64> {
    a.check_same_shape(b)?;
    let na = frobenius(a.data());
    let nb = frobenius(b.data());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((inner(a.data(), b.data()) / (na * nb)).clamp(-1.0, 1.0))
}

/// `1 - cos(a, b)`.
pub fn cossim_loss(a: &MagnitudeSpectrogram, b: &MagnitudeSpectrogram) -> Result<f64> {
    Ok(1.0 - cosine_similarity(a, b)?)
}

/// `mse + alpha · (1 - cos)`.
pub fn mca_loss(
    a: &MagnitudeSpectrogram,
    b: &MagnitudeSpectrogram,
    cfg: &LossConfig,
) -> Result<f64> {
    cfg.validate()?;
    let mse = mse_loss(a, b)?;
    if cfg.alpha == 0.0 {
        return Ok(mse);
    }
    Ok(mse + cfg.alpha * cossim_loss(a, b)?)
}

/// Gradient of [`mca_loss`] with respect to the estimate `b`.
pub fn mca_loss_grad(
    a: &MagnitudeSpectrogram,
    b: &MagnitudeSpectrogram,
    cfg: &LossConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    a.check_same_shape(b)?;
    let n = a.data().len() as f64;
    let mut grad: Vec<f64> = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| 2.0 * (y - x) / n)
        .collect();
    if cfg.alpha != 0.0 {
        let na = frobenius(a.data());
        let nb = frobenius(b.data());
        if na == 0.0 || nb == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let dot = inner(a.data(), b.data());
        // d/db [-<a,b>/(|a||b|)] = -a/(|a||b|) + <a,b> b/(|a||b|³)
        for ((g, x), y) in grad.iter_mut().zip(a.data()).zip(b.data()) {
            *g += cfg.alpha * (-x / (na * nb) + dot * y / (na * nb * nb * nb));
        }
    }
    Ok(grad)
}

/// Batch mean of per-pair [`mca_loss`] values.
pub fn mca_loss_batch(
    pairs: &[(MagnitudeSpectrogram, MagnitudeSpectrogram)],
    cfg: &LossConfig,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::param("pairs", "batch is empty"));
    }
    let mut total = 0.0;
    for (a, b) in pairs {
        total += mca_loss(a, b, cfg)?;
    }
    Ok(total / pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> MagnitudeSpectrogram {
        MagnitudeSpectrogram::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn mse_examples() {
        let a = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(mse_loss(&a, &a).unwrap(), 0.0);
        assert_eq!(mse_loss(&a, &b).unwrap(), 1.0);
        let ones = m(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let zeros = m(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(mse_loss(&ones, &zeros).unwrap(), 1.0);
    }

    #[test]
    fn cossim_examples() {
        let a = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(cossim_loss(&a, &b).unwrap(), 1.0);
        let a2 = m(&[&[2.0, 0.0], &[0.0, 2.0]]);
        assert!(cossim_loss(&a, &a2).unwrap().abs() < 1e-15);
        let x = m(&[&[1.0, 0.0]]);
        let y = m(&[&[1.0, 1.0]]);
        assert!((cossim_loss(&x, &y).unwrap() - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-15);
        let z = m(&[&[0.0, 0.0]]);
        assert!(matches!(cossim_loss(&x, &z), Err(Error::ZeroNorm)));
    }

    #[test]
    fn mca_examples() {
        let cfg = LossConfig::default();
        let a = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(mca_loss(&a, &a, &cfg).unwrap().abs() < 1e-15);
        assert!((mca_loss(&a, &b, &cfg).unwrap() - 1.2).abs() < 1e-12);
        let plain = LossConfig { alpha: 0.0 };
        assert_eq!(mca_loss(&a, &b, &plain).unwrap(), mse_loss(&a, &b).unwrap());
        assert!(mca_loss(&a, &b, &LossConfig { alpha: -1.0 }).is_err());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = m(&[&[1.0, 0.0]]);
        let b = m(&[&[1.0], &[0.0]]);
        assert!(matches!(mse_loss(&a, &b), Err(Error::ShapeMismatch { .. })));
        assert!(cossim_loss(&a, &b).is_err());
    }

    #[test]
    fn batch_is_mean_of_pairs() {
        let cfg = LossConfig::default();
        let a = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let batch = vec![(a.clone(), a.clone()), (a, b)];
        assert!((mca_loss_batch(&batch, &cfg).unwrap() - 0.6).abs() < 1e-12);
    }
}
