//! Direct sound estimation.
//!
//! For every subband `f` a multi-frame filter `h(f)` of order `L` maps the
//! close-talk reference onto the far-field mixture:
//!
//! ```text
//! h(f) = argmin  Σ_t |G(t,f) - h(f)^H Ỹ(t,f)|² / λ(t,f)
//! Ỹ(t,f) = [Y(t,f), Y(t-1,f), ..., Y(t-L+1,f)]^T      (zero before t = 0)
//! λ(t,f) = max(ε · max |G|², |G(t,f)|²)
//! ```
//!
//! and the direct sound estimate is `X(t,f) = h(f)^H Ỹ(t,f)`. The weighted
//! normal equations are solved per subband with a Cholesky factorisation:
//!
//! ```text
//! (R + δ · tr(R)/L · I) h = r,   R = Σ_t Ỹ Ỹ^H / λ,   r = Σ_t Ỹ G* / λ
//! ```
//!
//! Subbands are independent; they are solved in parallel and each solve is
//! sequential, so results do not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ComplexSpectrogram, StftConfig};

pub const DEFAULT_DISTANCE_M: f64 = 5.0;
pub const DEFAULT_SPEED_OF_SOUND: f64 = 340.0;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_DIAGONAL_LOADING: f64 = 1e-6;

/// Ratios within this relative distance of an integer are treated as that
/// integer before taking the ceiling, so decimal inputs such as
/// `4.25 / (340 * 0.00625)` do not gain a spurious extra frame.
const CEIL_SNAP: f64 = 1e-9;

/// Pivots below this fraction of the largest diagonal entry mark the normal
/// matrix as singular.
const PIVOT_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DseConfig {
    pub distance_m: f64,
    pub speed_of_sound: f64,
    /// STFT hop in seconds.
    pub hop_s: f64,
    pub epsilon: f64,
    pub diagonal_loading: f64,
    pub order_override: Option<usize>,
}

impl DseConfig {
    pub fn new(distance_m: f64, hop_s: f64) -> Self {
        Self {
            distance_m,
            speed_of_sound: DEFAULT_SPEED_OF_SOUND,
            hop_s,
            epsilon: DEFAULT_EPSILON,
            diagonal_loading: DEFAULT_DIAGONAL_LOADING,
            order_override: None,
        }
    }

    pub fn for_stft(distance_m: f64, stft: &StftConfig) -> Self {
        Self::new(distance_m, stft.hop_seconds())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m >= 0.0 && self.distance_m.is_finite()) {
            return Err(Error::param(
                "distance_m",
                format!("{} must be >= 0", self.distance_m),
            ));
        }
        if !(self.speed_of_sound > 0.0 && self.speed_of_sound.is_finite()) {
            return Err(Error::param(
                "speed_of_sound",
                format!("{} must be > 0", self.speed_of_sound),
            ));
        }
        if !(self.hop_s > 0.0 && self.hop_s.is_finite()) {
            return Err(Error::param("hop_s", format!("{} must be > 0", self.hop_s)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(
                "epsilon",
                format!("{} is outside (0, 1)", self.epsilon),
            ));
        }
        if !(self.diagonal_loading >= 0.0 && self.diagonal_loading.is_finite()) {
            return Err(Error::param(
                "diagonal_loading",
                format!("{} must be >= 0", self.diagonal_loading),
            ));
        }
        if self.order_override == Some(0) {
            return Err(Error::param("order_override", "filter order must be >= 1"));
        }
        Ok(())
    }

    /// Filter order: the override if set, otherwise derived from geometry.
    pub fn order(&self) -> Result<usize> {
        match self.order_override {
            Some(order) => Ok(order),
            None => filter_order(self.distance_m, self.speed_of_sound, self.hop_s),
        }
    }
}

/// Propagation delay from `distance_m` in whole STFT frames, rounded up.
pub fn delay_frames(distance_m: f64, speed_of_sound: f64, hop_s: f64) -> Result<usize> {
    if !(speed_of_sound > 0.0 && speed_of_sound.is_finite()) {
        return Err(Error::param(
            "speed_of_sound",
            format!("{speed_of_sound} must be > 0"),
        ));
    }
    if !(hop_s > 0.0 && hop_s.is_finite()) {
        return Err(Error::param("hop_s", format!("{hop_s} must be > 0")));
    }
    if !(distance_m >= 0.0 && distance_m.is_finite()) {
        return Err(Error::param(
            "distance_m",
            format!("{distance_m} must be >= 0"),
        ));
    }
    let ratio = distance_m / (speed_of_sound * hop_s);
    let nearest = ratio.round();
    let frames = if (ratio - nearest).abs() <= CEIL_SNAP * nearest.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    Ok(frames as usize)
}

/// `ceil(D / (a·H)) + 1`.
pub fn filter_order(distance_m: f64, speed_of_sound: f64, hop_s: f64) -> Result<usize> {
    Ok(delay_frames(distance_m, speed_of_sound, hop_s)? + 1)
}

/// Per-subband filter bank, `order` taps for each of `bins` subbands.
#[derive(Clone, Debug, PartialEq)]
pub struct DseFilter {
    bins: usize,
    order: usize,
    taps: Vec<Complex64>,
}

impl DseFilter {
    pub fn from_taps(bins: usize, order: usize, taps: Vec<Complex64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::param("order", "filter order must be >= 1"));
        }
        if taps.len() != bins * order {
            return Err(Error::LengthMismatch {
                left: taps.len(),
                right: bins * order,
            });
        }
        if let Some(i) = taps
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { bins, order, taps })
    }

    pub fn zeros(bins: usize, order: usize) -> Self {
        Self {
            bins,
            order,
            taps: vec![Complex64::new(0.0, 0.0); bins * order],
        }
    }

    /// Unit tap at lag 0 in every subband.
    pub fn identity(bins: usize, order: usize) -> Self {
        let mut filter = Self::zeros(bins, order);
        for f in 0..bins {
            filter.taps[f * order] = Complex64::new(1.0, 0.0);
        }
        filter
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tap(&self, f: usize, lag: usize) -> Complex64 {
        self.taps[f * self.order + lag]
    }

    pub fn subband_taps(&self, f: usize) -> &[Complex64] {
        &self.taps[f * self.order..(f + 1) * self.order]
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }
}

/// `λ(t,f) = max(ε · max |G|², |G(t,f)|²)`, frame-major like `g`.
pub fn weighting_term(g: &ComplexSpectrogram, epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(
            "epsilon",
            format!("{epsilon} is outside (0, 1)"),
        ));
    }
    if g.data().is_empty() {
        return Err(Error::ZeroSpectrogram);
    }
    let power = g.power();
    let peak = power.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::ZeroSpectrogram);
    }
    let floor = epsilon * peak;
    Ok(power.into_iter().map(|p| p.max(floor)).collect())
}

/// Outcome of one subband solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbandFit {
    pub taps: Vec<Complex64>,
    /// The reference carried no energy in this subband; taps are zero.
    pub silent: bool,
    /// Squared ratio of largest to smallest Cholesky pivot, a cheap
    /// condition-number indicator for the loaded normal matrix.
    pub pivot_ratio: f64,
}

/// Solves the weighted multi-frame fit for a single subband.
///
/// `target`, `reference` and `weights` are per-frame sequences of equal
/// length; `loading` is the relative diagonal loading δ.
pub fn solve_subband(
    target: &[Complex64],
    reference: &[Complex64],
    weights: &[f64],
    order: usize,
    loading: f64,
) -> Result<SubbandFit> {
    fit_subband(target, reference, weights, order, loading, 0)
}

fn fit_subband(
    target: &[Complex64],
    reference: &[Complex64],
    weights: &[f64],
    order: usize,
    loading: f64,
    bin: usize,
) -> Result<SubbandFit> {
    let frames = target.len();
    if reference.len() != frames {
        return Err(Error::LengthMismatch {
            left: frames,
            right: reference.len(),
        });
    }
    if weights.len() != frames {
        return Err(Error::LengthMismatch {
            left: frames,
            right: weights.len(),
        });
    }
    if order == 0 {
        return Err(Error::param("order", "filter order must be >= 1"));
    }
    if frames < order {
        return Err(Error::TooFewFrames { frames, order });
    }
    if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::param(
            "weights",
            format!("weight {i} is not positive"),
        ));
    }

    let zero = Complex64::new(0.0, 0.0);
    // R is Hermitian; only the lower triangle is accumulated.
    let mut normal = vec![zero; order * order];
    let mut rhs = vec![zero; order];
    let mut stacked = vec![zero; order];
    for t in 0..frames {
        for (lag, slot) in stacked.iter_mut().enumerate() {
            *slot = if t >= lag { reference[t - lag] } else { zero };
        }
        let inv = 1.0 / weights[t];
        let g_conj = target[t].conj();
        for i in 0..order {
            let yi = stacked[i] * inv;
            for j in 0..=i {
                normal[i * order + j] += yi * stacked[j].conj();
            }
            rhs[i] += yi * g_conj;
        }
    }

    let trace: f64 = (0..order).map(|i| normal[i * order + i].re).sum();
    if trace == 0.0 {
        return Ok(SubbandFit {
            taps: vec![zero; order],
            silent: true,
            pivot_ratio: 1.0,
        });
    }
    let shift = loading * trace / order as f64;
    for i in 0..order {
        normal[i * order + i] += shift;
    }

    let (taps, pivot_ratio) =
        cholesky_solve(&mut normal, &rhs, order).ok_or(Error::SingularSystem { bin })?;
    Ok(SubbandFit {
        taps,
        silent: false,
        pivot_ratio,
    })
}

/// Solves `A x = b` for Hermitian positive definite `A` given by its lower
/// triangle (row-major, overwritten by the factor). Returns `None` when a
/// pivot falls below tolerance.
fn cholesky_solve(a: &mut [Complex64], b: &[Complex64], n: usize) -> Option<(Vec<Complex64>, f64)> {
    let max_diag = (0..n).map(|i| a[i * n + i].re).fold(0.0, f64::max);
    let tol = PIVOT_TOLERANCE * max_diag;
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot: f64 = 0.0;

    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        if d.is_nan() || d <= tol {
            return None;
        }
        let pivot = d.sqrt();
        min_pivot = min_pivot.min(pivot);
        max_pivot = max_pivot.max(pivot);
        a[j * n + j] = Complex64::new(pivot, 0.0);
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s / pivot;
        }
    }

    // L z = b
    let mut z = b.to_vec();
    for i in 0..n {
        let mut s = z[i];
        for k in 0..i {
            s -= a[i * n + k] * z[k];
        }
        z[i] = s / a[i * n + i].re;
    }
    // L^H x = z
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= a[k * n + i].conj() * z[k];
        }
        z[i] = s / a[i * n + i].re;
    }
    let ratio = (max_pivot / min_pivot).powi(2);
    Some((z, ratio))
}

/// Summary of a full-spectrogram fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub order: usize,
    pub frames: usize,
    pub bins: usize,
    pub silent_bins: usize,
    pub max_pivot_ratio: f64,
}

/// Fits the filter bank with explicit per-bin weights (frame-major).
pub fn estimate_filter_weighted(
    g: &ComplexSpectrogram,
    y_close: &ComplexSpectrogram,
    weights: &[f64],
    order: usize,
    loading: f64,
) -> Result<(DseFilter, FitDiagnostics)> {
    g.check_same_shape(y_close)?;
    if weights.len() != g.data().len() {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: g.data().len(),
        });
    }
    let (frames, bins) = g.shape();
    if frames < order {
        return Err(Error::TooFewFrames { frames, order });
    }

    let fits: Vec<Result<SubbandFit>> = (0..bins)
        .into_par_iter()
        .map(|f| {
            let w: Vec<f64> = (0..frames).map(|t| weights[t * bins + f]).collect();
            fit_subband(&g.subband(f), &y_close.subband(f), &w, order, loading, f)
        })
        .collect();

    let mut taps = Vec::with_capacity(bins * order);
    let mut silent_bins = 0;
    let mut max_pivot_ratio: f64 = 1.0;
    for fit in fits {
        let fit = fit?;
        silent_bins += usize::from(fit.silent);
        max_pivot_ratio = max_pivot_ratio.max(fit.pivot_ratio);
        taps.extend(fit.taps);
    }
    let filter = DseFilter::from_taps(bins, order, taps)?;
    let diagnostics = FitDiagnostics {
        order,
        frames,
        bins,
        silent_bins,
        max_pivot_ratio,
    };
    Ok((filter, diagnostics))
}

/// Fits the direct-sound filter from far-field mixture `g` and close-talk
/// reference `y_close`.
pub fn estimate_filter(
    g: &ComplexSpectrogram,
    y_close: &ComplexSpectrogram,
    cfg: &DseConfig,
) -> Result<DseFilter> {
    estimate_filter_with_diagnostics(g, y_close, cfg).map(|(filter, _)| filter)
}

pub fn estimate_filter_with_diagnostics(
    g: &ComplexSpectrogram,
    y_close: &ComplexSpectrogram,
    cfg: &DseConfig,
) -> Result<(DseFilter, FitDiagnostics)> {
    cfg.validate()?;
    g.check_same_shape(y_close)?;
    let order = cfg.order()?;
    if g.frames() < order {
        return Err(Error::TooFewFrames {
            frames: g.frames(),
            order,
        });
    }
    let weights = weighting_term(g, cfg.epsilon)?;
    estimate_filter_weighted(g, y_close, &weights, order, cfg.diagonal_loading)
}

/// `X(t,f) = h(f)^H Ỹ(t,f)` with zero history before the first frame.
pub fn apply_filter(
    filter: &DseFilter,
    y_close: &ComplexSpectrogram,
) -> Result<ComplexSpectrogram> {
    if filter.bins() != y_close.bins() {
        return Err(Error::ShapeMismatch {
            left: (filter.order(), filter.bins()),
            right: y_close.shape(),
        });
    }
    let (frames, bins) = y_close.shape();
    let order = filter.order();
    let mut out = vec![Complex64::new(0.0, 0.0); frames * bins];
    for t in 0..frames {
        for f in 0..bins {
            let taps = filter.subband_taps(f);
            let mut acc = Complex64::new(0.0, 0.0);
            for (lag, h) in taps.iter().enumerate().take(order.min(t + 1)) {
                acc += h.conj() * y_close.get(t - lag, f);
            }
            out[t * bins + f] = acc;
        }
    }
    Ok(y_close.with_data(out))
}

#[derive(Clone, Debug)]
pub struct DseEstimate {
    pub estimate: ComplexSpectrogram,
    pub filter: DseFilter,
    pub diagnostics: FitDiagnostics,
}

/// Fit and apply in one step.
pub fn dse_estimate(
    g: &ComplexSpectrogram,
    y_close: &ComplexSpectrogram,
    cfg: &DseConfig,
) -> Result<DseEstimate> {
    let (filter, diagnostics) = estimate_filter_with_diagnostics(g, y_close, cfg)?;
    let estimate = apply_filter(&filter, y_close)?;
    Ok(DseEstimate {
        estimate,
        filter,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn spec_from_columns(cols: &[Vec<Complex64>]) -> ComplexSpectrogram {
        let bins = cols.len();
        let frames = cols[0].len();
        let mut data = Vec::with_capacity(frames * bins);
        for t in 0..frames {
            for col in cols {
                data.push(col[t]);
            }
        }
        let cfg = StftConfig {
            fft_size: Some(2 * (bins.max(2) - 1)),
            window_ms: 0.125 * (bins.max(2) - 1) as f64,
            hop_ms: 0.0625 * (bins.max(2) - 1) as f64,
            ..StftConfig::default()
        };
        ComplexSpectrogram::from_data(frames, bins, data, cfg, 0).unwrap()
    }

    #[test]
    fn filter_order_examples() {
        assert_eq!(filter_order(5.0, 340.0, 0.00625).unwrap(), 4);
        assert_eq!(filter_order(0.0, 340.0, 0.00625).unwrap(), 1);
        assert_eq!(filter_order(10.0, 340.0, 0.00625).unwrap(), 6);
        // Exact multiples of a·H do not pick up an extra frame.
        assert_eq!(filter_order(4.25, 340.0, 0.00625).unwrap(), 3);
        assert_eq!(delay_frames(2.125, 340.0, 100.0 / 16_000.0).unwrap(), 1);
        // 10.2 / (340 · 0.01) evaluates to 3.0000000000000004 in floating point.
        assert_eq!(filter_order(10.2, 340.0, 0.01).unwrap(), 4);
    }

    #[test]
    fn filter_order_rejects_bad_geometry() {
        assert!(filter_order(5.0, 0.0, 0.00625).is_err());
        assert!(filter_order(5.0, 340.0, 0.0).is_err());
        assert!(filter_order(5.0, -340.0, 0.00625).is_err());
        assert!(filter_order(-1.0, 340.0, 0.00625).is_err());
    }

    #[test]
    fn weighting_examples() {
        let g = spec_from_columns(&[vec![
            c(3.0),
            Complex64::new(0.0, 0.02f64.sqrt()),
            c(0.5f64.sqrt()),
        ]]);
        let w = weighting_term(&g, 0.01).unwrap();
        assert!((w[0] - 9.0).abs() < 1e-12);
        assert!((w[1] - 0.09).abs() < 1e-12);
        assert!((w[2] - 0.5).abs() < 1e-12);
        assert!(w.iter().all(|&l| l >= 0.09 - 1e-15));
    }

    #[test]
    fn weighting_rejects_zero_and_bad_epsilon() {
        let zero = spec_from_columns(&[vec![c(0.0); 4]]);
        assert!(matches!(
            weighting_term(&zero, 0.01),
            Err(Error::ZeroSpectrogram)
        ));
        let g = spec_from_columns(&[vec![c(1.0); 4]]);
        assert!(weighting_term(&g, 0.0).is_err());
        assert!(weighting_term(&g, 1.0).is_err());
    }

    #[test]
    fn collinear_scalar_fit() {
        let fit = solve_subband(&[c(2.0), c(4.0)], &[c(1.0), c(2.0)], &[1.0, 1.0], 1, 0.0).unwrap();
        assert!((fit.taps[0] - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn weighted_scalar_fit_matches_hand_computation() {
        // h = (1·1/1 + 1·3/0.5) / (1/1 + 1/0.5) = 7/3
        let fit = solve_subband(&[c(1.0), c(3.0)], &[c(1.0), c(1.0)], &[1.0, 0.5], 1, 0.0).unwrap();
        assert!((fit.taps[0] - c(7.0 / 3.0)).norm() < 1e-14);
    }

    #[test]
    fn conjugation_convention_for_complex_taps() {
        // G = conj(h) · Y for h = 1 - 2i, i.e. G = (1 + 2i) Y.
        let y = [
            c(1.0),
            Complex64::new(0.5, -1.0),
            Complex64::new(-2.0, 0.25),
        ];
        let g: Vec<Complex64> = y.iter().map(|v| Complex64::new(1.0, 2.0) * v).collect();
        let fit = solve_subband(&g, &y, &[1.0; 3], 1, 0.0).unwrap();
        assert!((fit.taps[0] - Complex64::new(1.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn too_few_frames_and_singular_systems_are_reported() {
        assert!(matches!(
            solve_subband(&[c(1.0)], &[c(1.0)], &[1.0], 2, 0.0),
            Err(Error::TooFewFrames {
                frames: 1,
                order: 2
            })
        ));
        // Constant reference with two taps: columns [1,1,1] and [0,1,1] are
        // independent, but a reference that only fires in the last frame
        // leaves the lag-1 column empty.
        let y = [c(0.0), c(0.0), c(1.0)];
        let g = [c(0.0), c(0.0), c(2.0)];
        assert!(matches!(
            solve_subband(&g, &y, &[1.0; 3], 2, 0.0),
            Err(Error::SingularSystem { .. })
        ));
        // Loading makes it solvable.
        let fit = solve_subband(&g, &y, &[1.0; 3], 2, 1e-3).unwrap();
        assert!(fit.taps.iter().all(|z| z.re.is_finite()));
    }

    #[test]
    fn silent_subband_yields_zero_taps() {
        let fit = solve_subband(&[c(1.0), c(2.0)], &[c(0.0), c(0.0)], &[1.0, 1.0], 2, 0.0).unwrap();
        assert!(fit.silent);
        assert!(fit.taps.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn identity_and_zero_filters() {
        let y = spec_from_columns(&[
            vec![c(1.0), c(-2.0), Complex64::new(0.5, 3.0)],
            vec![Complex64::new(0.0, 1.0), c(4.0), c(7.0)],
        ]);
        let out = apply_filter(&DseFilter::identity(2, 3), &y).unwrap();
        assert_eq!(out, y);
        let out = apply_filter(&DseFilter::zeros(2, 3), &y).unwrap();
        assert!(out.is_all_zero());
        assert!(apply_filter(&DseFilter::zeros(3, 1), &y).is_err());
    }

    #[test]
    fn delayed_tap_shifts_frames() {
        let y = spec_from_columns(&[vec![c(1.0), c(2.0), c(3.0), c(4.0)]]);
        let filter = DseFilter::from_taps(1, 3, vec![c(0.0), c(0.0), c(0.5)]).unwrap();
        let out = apply_filter(&filter, &y).unwrap();
        let got: Vec<f64> = out.subband(0).iter().map(|z| z.re).collect();
        assert_eq!(got, vec![0.0, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn degenerate_estimate_collapses_to_identity() {
        let y = spec_from_columns(&[
            vec![c(1.0), c(-2.0), Complex64::new(0.5, 3.0), c(0.25), c(1.5)],
            vec![Complex64::new(0.0, 1.0), c(4.0), c(7.0), c(-1.0), c(2.0)],
        ]);
        let mut cfg = DseConfig::new(0.0, 0.00625);
        cfg.diagonal_loading = 0.0;
        let out = dse_estimate(&y, &y, &cfg).unwrap();
        assert_eq!(out.filter.order(), 1);
        for (a, b) in out.estimate.data().iter().zip(y.data()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = DseConfig::new(5.0, 0.00625);
        cfg.validate().unwrap();
        assert_eq!(cfg.order().unwrap(), 4);
        cfg.order_override = Some(7);
        assert_eq!(cfg.order().unwrap(), 7);
        cfg.order_override = Some(0);
        assert!(cfg.validate().is_err());
        let mut cfg = DseConfig::new(5.0, 0.00625);
        cfg.epsilon = 1.0;
        assert!(cfg.validate().is_err());
        cfg.epsilon = 0.01;
        cfg.diagonal_loading = -1.0;
        assert!(cfg.validate().is_err());
    }
}
