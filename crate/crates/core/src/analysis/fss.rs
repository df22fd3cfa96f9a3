use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::estimators::Estimate;

const MIN_SAMPLES: usize = 8;
const MIN_SPAN_DEG: f64 = 180.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FssFit {
    /// Peak-to-peak swing of the fitted sinusoid, μeV.
    pub fss: Estimate,
    pub offset: Estimate,
    /// Phase φ of sin(2θ + φ), radians.
    pub phase: f64,
    pub residual_rms: f64,
}

/// Fits ΔE(θ) = E₀ + (s/2)·sin(2θ + φ) to polarization-resolved energy
/// differences. The model is linear in (E₀, a, b) with
/// a·sin 2θ + b·cos 2θ, so the fit is a single least-squares solve.
pub fn fit_fss(angles_deg: &[f64], delta_e: &[f64]) -> Result<FssFit> {
    if angles_deg.len() != delta_e.len() {
        return Err(Error::Validation(format!(
            "{} angles but {} energies",
            angles_deg.len(),
            delta_e.len()
        )));
    }
    let n = angles_deg.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{n} angle samples, need at least {MIN_SAMPLES}"
        )));
    }
    let (lo, hi) = angles_deg
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)));
    if hi - lo < MIN_SPAN_DEG {
        return Err(Error::InsufficientData(format!(
            "angles span {:.1}°, need at least {MIN_SPAN_DEG}°",
            hi - lo
        )));
    }
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let two_theta = 2.0 * angles_deg[i].to_radians();
        match j {
            0 => 1.0,
            1 => two_theta.sin(),
            _ => two_theta.cos(),
        }
    });
    let y = DVector::from_column_slice(delta_e);
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::FitFailure {
            reason: format!("rank-deficient design (singular values {smin:.3e} / {smax:.3e})"),
            iterations: 0,
            chi2: f64::NAN,
        });
    }
    let coef = svd
        .solve(&y, 1e-12 * smax)
        .map_err(|e| Error::FitFailure {
            reason: e.to_string(),
            iterations: 0,
            chi2: f64::NAN,
        })?;
    let resid = &y - &design * &coef;
    let rss = resid.norm_squared();
    let s2 = rss / (n - 3) as f64;
    let cov = (design.transpose() * &design)
        .try_inverse()
        .ok_or_else(|| Error::FitFailure {
            reason: "singular normal matrix".into(),
            iterations: 0,
            chi2: rss,
        })?
        * s2;
    let (e0, a, b) = (coef[0], coef[1], coef[2]);
    let r = a.hypot(b);
    let var_r = if r > 0.0 {
        (a * a * cov[(1, 1)] + b * b * cov[(2, 2)] + 2.0 * a * b * cov[(1, 2)]) / (r * r)
    } else {
        (cov[(1, 1)] + cov[(2, 2)]) / 2.0
    };
    Ok(FssFit {
        fss: Estimate::new(2.0 * r, 2.0 * var_r.max(0.0).sqrt()),
        offset: Estimate::new(e0, cov[(0, 0)].max(0.0).sqrt()),
        phase: b.atan2(a),
        residual_rms: (rss / n as f64).sqrt(),
    })
}
