use crate::error::{Error, Result};

use super::histogram::CoincidenceHistogram;

#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    /// Delay in units of the repetition period.
    pub order: i64,
    pub center: f64,
    pub area: f64,
    pub sigma: f64,
}

/// Integrated coincidence peaks at integer multiples of the period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakAreas {
    pub rep_period: f64,
    pub window: f64,
    pub peaks: Vec<Peak>,
}

const MIN_SIDE_PEAKS: usize = 3;

impl PeakAreas {
    pub fn from_areas(rep_period: f64, window: f64, areas: &[(i64, f64)]) -> Self {
        Self {
            rep_period,
            window,
            peaks: areas
                .iter()
                .map(|&(order, area)| Peak {
                    order,
                    center: order as f64 * rep_period,
                    area,
                    sigma: area.max(0.0).sqrt(),
                })
                .collect(),
        }
    }

    pub fn central(&self) -> Option<&Peak> {
        self.peaks.iter().find(|p| p.order == 0)
    }

    /// Peaks with |order| ≥ `min_order`.
    pub fn side(&self, min_order: i64) -> impl Iterator<Item = &Peak> {
        self.peaks.iter().filter(move |p| p.order.abs() >= min_order)
    }

    /// Multiplies every area by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let areas: Vec<(i64, f64)> = self.peaks.iter().map(|p| (p.order, p.area * factor)).collect();
        Self::from_areas(self.rep_period, self.window, &areas)
    }
}

/// Sums counts in ±window/2 around each multiple of `rep_period` that fits
/// entirely inside the histogram range.
pub fn integrate_peaks(hist: &CoincidenceHistogram, rep_period: f64, window: f64) -> Result<PeakAreas> {
    if !(rep_period > 0.0) {
        return Err(Error::Validation("repetition period must be positive".into()));
    }
    if !(window > 0.0 && window <= rep_period) {
        return Err(Error::Validation(format!(
            "integration window {window} ps must lie in (0, {rep_period}] ps"
        )));
    }
    let (min, max) = (hist.delay_range.0 as f64, hist.delay_range.1 as f64);
    let half = window / 2.0;
    let k_lo = ((min + half) / rep_period).ceil() as i64;
    let k_hi = ((max - half) / rep_period).floor() as i64;
    let mut areas = Vec::new();
    for k in k_lo..=k_hi {
        let center = k as f64 * rep_period;
        let area: u64 = (0..hist.len())
            .filter(|&i| {
                let c = hist.bin_center(i);
                c >= center - half && c < center + half
            })
            .map(|i| hist.counts[i])
            .sum();
        areas.push((k, area as f64));
    }
    let peaks = PeakAreas::from_areas(rep_period, window, &areas);
    if peaks.central().is_none() {
        return Err(Error::InsufficientData("histogram range excludes zero delay".into()));
    }
    let sides = peaks.side(1).count();
    if sides < MIN_SIDE_PEAKS {
        return Err(Error::InsufficientData(format!(
            "{sides} side peaks in range, need at least {MIN_SIDE_PEAKS}"
        )));
    }
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: f64 = 1000.0;

    #[test]
    fn empty_histogram_has_zero_areas() {
        let h = CoincidenceHistogram::zeros(10, (-3500, 3500), T).unwrap();
        let p = integrate_peaks(&h, T, T / 2.0).unwrap();
        assert_eq!(p.peaks.len(), 7);
        assert!(p.peaks.iter().all(|p| p.area == 0.0 && p.sigma == 0.0));
    }

    #[test]
    fn delta_comb_gives_peak_heights() {
        let mut h = CoincidenceHistogram::zeros(10, (-3500, 3500), T).unwrap();
        for k in -3i64..=3 {
            for _ in 0..17 {
                h.record(k * 1000);
            }
        }
        let p = integrate_peaks(&h, T, T / 2.0).unwrap();
        assert!(p.peaks.iter().all(|p| p.area == 17.0));
        assert!(p.peaks.iter().all(|p| (p.sigma - 17f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn too_few_side_peaks() {
        let h = CoincidenceHistogram::zeros(10, (-1500, 1500), T).unwrap();
        assert!(matches!(
            integrate_peaks(&h, T, T / 2.0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn window_larger_than_period_rejected() {
        let h = CoincidenceHistogram::zeros(10, (-3500, 3500), T).unwrap();
        assert!(integrate_peaks(&h, T, 1.5 * T).is_err());
    }
}
