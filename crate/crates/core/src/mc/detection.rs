use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::physics::SourceParams;

use super::config::ExperimentConfig;

/// A photon reaching a detector input before losses and jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emission {
    pub channel: u16,
    /// ps from run start
    pub time: f64,
    pub pulse_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DetectionRecord {
    /// ps from run start; first field so the derived ordering is time-major.
    pub timestamp: u64,
    pub channel: u16,
    pub pulse_index: u64,
}

impl DetectionRecord {
    pub fn new(channel: u16, pulse_index: u64, timestamp: u64) -> Self {
        Self {
            timestamp,
            channel,
            pulse_index,
        }
    }
}

/// Applies collection loss η·ξ, Gaussian timing jitter and dark counts over
/// one repetition period starting at `period_start`.
///
/// Records are returned in emission order followed by dark counts; the
/// caller sorts the merged stream.
pub fn apply_detection_chain<R: Rng + ?Sized>(
    emissions: &[Emission],
    params: &SourceParams,
    config: &ExperimentConfig,
    period_start: f64,
    pulse_index: u64,
    rng: &mut R,
) -> Vec<DetectionRecord> {
    let survival = params.eta * params.xi;
    let jitter = (config.irf_sigma > 0.0)
        .then(|| Normal::new(0.0, config.irf_sigma).expect("validated jitter"));
    let mut out = Vec::with_capacity(emissions.len());
    for e in emissions {
        if survival < 1.0 && !rng.random_bool(survival) {
            continue;
        }
        let t = match &jitter {
            Some(n) => e.time + n.sample(rng),
            None => e.time,
        };
        out.push(DetectionRecord::new(e.channel, e.pulse_index, to_timestamp(t)));
    }
    let period = params.rep_period();
    let mean_dark = config.dark_rate * period * 1e-12;
    if mean_dark > 0.0 {
        let poisson = Poisson::new(mean_dark).expect("positive mean");
        for &channel in config.kind.photon_channels() {
            let n = poisson.sample(rng) as u64;
            for _ in 0..n {
                let t = period_start + rng.random::<f64>() * period;
                out.push(DetectionRecord::new(channel, pulse_index, to_timestamp(t)));
            }
        }
    }
    out
}

pub(crate) fn to_timestamp(t: f64) -> u64 {
    if t <= 0.0 {
        0
    } else {
        t.round() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::ExperimentKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_chain_is_identity() {
        let params = SourceParams {
            eta: 1.0,
            xi: 1.0,
            ..Default::default()
        };
        let mut config = ExperimentConfig::new(ExperimentKind::HbtX);
        config.irf_sigma = 0.0;
        config.dark_rate = 0.0;
        let emissions: Vec<Emission> = (0..100)
            .map(|i| Emission {
                channel: (i % 2) as u16,
                time: 1000.0 + 37.0 * i as f64,
                pulse_index: i,
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = apply_detection_chain(&emissions, &params, &config, 0.0, 0, &mut rng);
        assert_eq!(out.len(), emissions.len());
        for (r, e) in out.iter().zip(&emissions) {
            assert_eq!(r.channel, e.channel);
            assert_eq!(r.pulse_index, e.pulse_index);
            assert_eq!(r.timestamp as f64, e.time);
        }
    }

    #[test]
    fn jitter_is_gaussian() {
        let params = SourceParams {
            eta: 1.0,
            xi: 1.0,
            ..Default::default()
        };
        let mut config = ExperimentConfig::new(ExperimentKind::HbtX);
        config.irf_sigma = 50.0;
        let n = 200_000;
        let emissions: Vec<Emission> = (0..n)
            .map(|i| Emission {
                channel: 0,
                time: 10_000.0,
                pulse_index: i,
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let out = apply_detection_chain(&emissions, &params, &config, 0.0, 0, &mut rng);
        let residuals: Vec<f64> = out.iter().map(|r| r.timestamp as f64 - 10_000.0).collect();
        let m = residuals.iter().sum::<f64>() / n as f64;
        let var = residuals.iter().map(|r| (r - m).powi(2)).sum::<f64>() / n as f64;
        // Rounding to integer ps adds 1/12 ps² of variance.
        assert!(m.abs() < 3.0 * 50.0 / (n as f64).sqrt());
        assert!((var.sqrt() - 50.0).abs() < 0.5, "{}", var.sqrt());
        // Chi-square against N(0, 50²). Bin edges sit on half-integers so the
        // integer rounding of timestamps falls exactly on bin boundaries.
        use statrs::distribution::ContinuousCDF;
        let normal = statrs::distribution::Normal::new(0.0, 50.0).unwrap();
        let edges: Vec<f64> = (0..=13).map(|j| -149.5 + 23.0 * j as f64).collect();
        let mut observed = vec![0u64; edges.len() + 1];
        for &r in &residuals {
            let bin = edges.iter().take_while(|&&e| r > e).count();
            observed[bin] += 1;
        }
        let mut chi2 = 0.0;
        for (bin, &o) in observed.iter().enumerate() {
            let lo = if bin == 0 { 0.0 } else { normal.cdf(edges[bin - 1]) };
            let hi = if bin == edges.len() { 1.0 } else { normal.cdf(edges[bin]) };
            let e = (hi - lo) * n as f64;
            chi2 += (o as f64 - e).powi(2) / e;
        }
        // 14 degrees of freedom, 99.9th percentile.
        assert!(chi2 < 36.12, "chi2 = {chi2}");
    }

    #[test]
    fn survival_rate_matches_efficiency() {
        let params = SourceParams::default();
        let config = ExperimentConfig::new(ExperimentKind::HbtX);
        let n = 1_000_000u64;
        let emissions: Vec<Emission> = (0..n)
            .map(|i| Emission {
                channel: 0,
                time: 1.0e5,
                pulse_index: i,
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let out = apply_detection_chain(&emissions, &params, &config, 0.0, 0, &mut rng);
        let p = params.eta * params.xi;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((out.len() as f64 / n as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn dark_counts_follow_rate() {
        let params = SourceParams::default();
        let mut config = ExperimentConfig::new(ExperimentKind::HbtX);
        config.dark_rate = 1.0e6; // 1 MHz so the test sees enough counts
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let periods = 100_000;
        let mut total = 0usize;
        for i in 0..periods {
            let start = i as f64 * params.rep_period();
            let out = apply_detection_chain(&[], &params, &config, start, i, &mut rng);
            for r in &out {
                assert!((r.timestamp as f64) >= start.floor());
                assert!((r.timestamp as f64) <= start + params.rep_period() + 1.0);
            }
            total += out.len();
        }
        let expected = 2.0 * config.dark_rate * params.rep_period() * 1e-12 * periods as f64;
        assert!((total as f64 - expected).abs() < 3.0 * expected.sqrt(), "{total} vs {expected}");
    }
}
