use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

use super::estimators::Estimate;
use super::histogram::CoincidenceHistogram;
use super::lm::levenberg_marquardt;

const MIN_TAIL_BINS: usize = 20;
const IRLS_PASSES: usize = 4;
const MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeFit {
    pub tau: Estimate,
    /// Onset of the decay, ps. Fixed at the peak bin edge when σ_irf = 0.
    pub t0: Estimate,
    /// Total counts in the decay component.
    pub amplitude: Estimate,
    /// Flat background per bin.
    pub background: Estimate,
    pub reduced_chi2: f64,
    pub iterations: usize,
}

/// Exponential decay of lifetime `tau` starting at `t0` convolved with a
/// unit-area Gaussian of width `sigma` (the exponentially modified Gaussian).
pub fn emg_density(t: f64, tau: f64, sigma: f64, t0: f64) -> f64 {
    let u = t - t0;
    if sigma <= 0.0 {
        return if u >= 0.0 { (-u / tau).exp() / tau } else { 0.0 };
    }
    let z = u / sigma - sigma / tau;
    let log = sigma * sigma / (2.0 * tau * tau) - u / tau + ln_std_normal_cdf(z);
    log.exp() / tau
}

fn ln_std_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        (0.5 * erfc(-z / SQRT_2)).ln()
    } else {
        // Mills-ratio asymptote for the far left tail.
        -0.5 * z * z - (-z * (2.0 * PI).sqrt()).ln()
    }
}

/// Fits A·[exp ⊗ Gaussian](t; τ, σ_irf, t₀) + B to a decay histogram by
/// iteratively reweighted least squares with Poisson (model) variances.
///
/// With `irf_sigma = 0` the onset is not identifiable separately from the
/// amplitude, so t₀ is pinned to the start of the peak bin and only bins
/// from there on enter the fit.
pub fn fit_lifetime(hist: &CoincidenceHistogram, irf_sigma: f64) -> Result<LifetimeFit> {
    if !(irf_sigma >= 0.0 && irf_sigma.is_finite()) {
        return Err(Error::Validation(format!("invalid irf_sigma {irf_sigma}")));
    }
    let counts: Vec<f64> = hist.counts.iter().map(|&c| c as f64).collect();
    let nbins = counts.len();
    let peak = counts
        .iter()
        .enumerate()
        .fold(0, |best, (i, &c)| if c > counts[best] { i } else { best });
    let populated_tail = counts[peak + 1..].iter().filter(|&&c| c > 0.0).count();
    if populated_tail < MIN_TAIL_BINS {
        return Err(Error::InsufficientData(format!(
            "{populated_tail} populated bins after the peak, need {MIN_TAIL_BINS}"
        )));
    }

    let edge = (nbins / 20).max(1);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let b0 = if peak >= edge {
        mean(&counts[..edge]).min(mean(&counts[nbins - edge..]))
    } else {
        mean(&counts[nbins - edge..])
    };
    let top = counts[peak] - b0;
    let t_peak = hist.bin_center(peak);
    let tau0 = (peak..nbins)
        .find(|&i| counts[i] - b0 < top / std::f64::consts::E)
        .map(|i| hist.bin_center(i) - t_peak)
        .unwrap_or(hist.bin_width as f64 * 10.0)
        .max(hist.bin_width as f64);
    let a0: f64 = counts.iter().map(|c| (c - b0).max(0.0)).sum();
    let bw = hist.bin_width as f64;

    let pinned = irf_sigma == 0.0;
    let first = if pinned { peak } else { 0 };
    let t_pinned = hist.bin_start(peak);
    let xs: Vec<f64> = (first..nbins).map(|i| hist.bin_center(i)).collect();
    let ys = &counts[first..];

    let model = |p: &[f64], i: usize| -> f64 {
        let (amp, tau, t0, bg) = if pinned {
            (p[0], p[1], t_pinned, p[2])
        } else {
            (p[0], p[1], p[2], p[3])
        };
        if !(tau > 0.0) {
            return f64::NAN;
        }
        amp * bw * emg_density(xs[i], tau, irf_sigma, t0) + bg
    };

    let mut params = if pinned {
        vec![a0, tau0, b0]
    } else {
        vec![a0, tau0, t_peak - irf_sigma.min(tau0), b0]
    };
    let mut weights: Vec<f64> = ys.iter().map(|&y| 1.0 / y.max(1.0)).collect();
    let mut fit = None;
    let mut iterations = 0;
    for _ in 0..IRLS_PASSES {
        let pass = levenberg_marquardt(model, ys, &weights, &params, MAX_ITER)?;
        iterations += pass.iterations;
        params = pass.params.clone();
        weights = (0..ys.len())
            .map(|i| 1.0 / model(&params, i).max(1e-3))
            .collect();
        fit = Some(pass);
    }
    let fit = fit.expect("at least one pass");
    let p = &fit.params;
    let sd = |k: usize| fit.covariance[(k, k)].max(0.0).sqrt();
    if !(p[1] > 0.0 && p[1].is_finite()) {
        return Err(Error::FitFailure {
            reason: format!("non-physical lifetime {}", p[1]),
            iterations,
            chi2: fit.chi2,
        });
    }
    let dof = (ys.len() - p.len()).max(1) as f64;
    let (t0, background) = if pinned {
        (Estimate::new(t_pinned, 0.0), Estimate::new(p[2], sd(2)))
    } else {
        (Estimate::new(p[2], sd(2)), Estimate::new(p[3], sd(3)))
    };
    Ok(LifetimeFit {
        tau: Estimate::new(p[1], sd(1)),
        t0,
        amplitude: Estimate::new(p[0], sd(0)),
        background,
        reduced_chi2: fit.chi2 / dof,
        iterations,
    })
}
