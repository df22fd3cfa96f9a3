use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::peaks::PeakAreas;

/// HOM normalization skips the nearest side peaks, whose sub-peak structure
/// is shaped by the double-pulse geometry.
pub const HOM_SIDE_MIN_ORDER: i64 = 2;

/// A value with its one-standard-deviation uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

impl Estimate {
    pub fn new(value: f64, sigma: f64) -> Self {
        Self { value, sigma }
    }

    /// |value − target| in units of σ.
    pub fn pull(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.sigma
    }
}

/// Central area divided by the mean of side peaks with |order| ≥ `min_order`.
///
/// A zero central area is given a one-count Poisson σ.
pub fn normalized_central(peaks: &PeakAreas, min_order: i64) -> Result<Estimate> {
    let central = peaks
        .central()
        .ok_or_else(|| Error::InsufficientData("no zero-delay peak".into()))?;
    let sides: Vec<f64> = peaks.side(min_order).map(|p| p.area).collect();
    if sides.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} side peaks with |order| >= {min_order}, need at least 2",
            sides.len()
        )));
    }
    let n = sides.len() as f64;
    let sum: f64 = sides.iter().sum();
    let mean = sum / n;
    if !(mean > 0.0) {
        return Err(Error::UndefinedEstimate("side-peak mean is zero".into()));
    }
    let sigma_mean = sum.sqrt() / n;
    let a0 = central.area;
    let sigma_a0 = if a0 > 0.0 { a0.sqrt() } else { 1.0 };
    let value = a0 / mean;
    let sigma = ((sigma_a0 / mean).powi(2) + (a0 * sigma_mean / (mean * mean)).powi(2)).sqrt();
    Ok(Estimate::new(value, sigma))
}

/// Zero-delay autocorrelation: central area over the mean side-peak area.
pub fn g2_zero(peaks: &PeakAreas) -> Result<Estimate> {
    normalized_central(peaks, 1)
}

/// Degree of polarization correlation from co- and cross-polarized
/// coincidence histograms.
pub fn correlation_from_areas(co: &PeakAreas, cross: &PeakAreas) -> Result<Estimate> {
    let g_co = normalized_central(co, 1)?;
    let g_cross = normalized_central(cross, 1)?;
    let s = g_co.value + g_cross.value;
    if !(s > 0.0) {
        return Err(Error::UndefinedEstimate(
            "co- and cross-polarized central areas are both zero".into(),
        ));
    }
    let value = (g_co.value - g_cross.value) / s;
    let d_co = 2.0 * g_cross.value / (s * s);
    let d_cross = 2.0 * g_co.value / (s * s);
    let sigma = ((d_co * g_co.sigma).powi(2) + (d_cross * g_cross.sigma).powi(2)).sqrt();
    Ok(Estimate::new(value, sigma))
}

/// Two-photon interference visibility 1 − Ã_co/Ã_cross from normalized
/// central areas.
pub fn hom_visibility(co: &PeakAreas, cross: &PeakAreas) -> Result<Estimate> {
    let g_co = normalized_central(co, HOM_SIDE_MIN_ORDER)?;
    let g_cross = normalized_central(cross, HOM_SIDE_MIN_ORDER)?;
    if cross.central().map_or(0.0, |p| p.area) == 0.0 {
        return Err(Error::UndefinedEstimate(
            "cross-polarized central area is zero".into(),
        ));
    }
    let ratio = g_co.value / g_cross.value;
    let rel = ((g_co.sigma / g_co.value.max(f64::MIN_POSITIVE)).powi(2)
        + (g_cross.sigma / g_cross.value).powi(2))
    .sqrt();
    let sigma = if g_co.value > 0.0 {
        ratio * rel
    } else {
        g_co.sigma / g_cross.value
    };
    Ok(Estimate::new(1.0 - ratio, sigma))
}
