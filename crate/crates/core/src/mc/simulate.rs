use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::physics::{Jones, SourceParams};

use super::cascade::{project_polarization, sample_pair_event, Port};
use super::config::{ExperimentConfig, ExperimentKind, RelativePol};
use super::detection::{apply_detection_chain, to_timestamp, DetectionRecord, Emission};
use super::rng::PulseRng;
use super::stream::{StreamHeader, TimeTagStream};

/// Output ports of the HOM combiner.
pub const HOM_CHANNELS: [u16; 2] = [0, 1];
/// Laser trigger channel in lifetime runs.
pub const LIFETIME_TRIGGER: u16 = 0;

const CHUNK: u64 = 8192;

/// Per-pulse probability of an uncorrelated extra photon such that the
/// zero-delay peak ratio of an HBT measurement equals `g2`.
///
/// With signal probability p and background q, the central/side ratio is
/// 2pq/(p+q)²; solving for u = q/p gives u = g2 / ((1−g2) + √(1−2·g2)).
pub fn background_probability(g2: f64, signal: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&g2) {
        return Err(Error::Validation(format!(
            "residual g2 = {g2} cannot be produced by an independent background (max 0.5)"
        )));
    }
    Ok(signal * g2 / ((1.0 - g2) + (1.0 - 2.0 * g2).sqrt()))
}

struct Plan<'a> {
    params: &'a SourceParams,
    config: &'a ExperimentConfig,
    period: f64,
    background: f64,
    analyzers: (Jones, Jones),
    hom_co: bool,
}

impl Plan<'_> {
    fn pulse(&self, index: u64, rng: &mut ChaCha8Rng, out: &mut Vec<DetectionRecord>) {
        let p = self.params;
        let start = (index + 1) as f64 * self.period;
        let mut emissions: Vec<Emission> = Vec::with_capacity(4);
        let emit = |channel: u16, time: f64| Emission {
            channel,
            time,
            pulse_index: index,
        };
        match self.config.kind {
            kind @ (ExperimentKind::HbtX | ExperimentKind::HbtXx) => {
                let take = |o: &super::CascadeOutcome| match kind {
                    ExperimentKind::HbtX => o.x_emit_time,
                    _ => o.xx_emit_time,
                };
                if rng.random_bool(p.eta_xx) {
                    let t = take(&sample_pair_event(p, rng));
                    let ch = rng.random::<bool>() as u16;
                    emissions.push(emit(ch, start + t));
                }
                if self.background > 0.0 && rng.random_bool(self.background) {
                    let t = take(&sample_pair_event(p, rng));
                    let ch = rng.random::<bool>() as u16;
                    emissions.push(emit(ch, start + t));
                }
            }
            ExperimentKind::CrossCorrelation => {
                if rng.random_bool(p.eta_xx) {
                    let o = sample_pair_event(p, rng);
                    let (ax, axx) = &self.analyzers;
                    let (px, pxx) = project_polarization(&o.polarization, ax, axx, rng)
                        .expect("basis states are normalized");
                    if px == Port::Pass {
                        emissions.push(emit(0, start + o.x_emit_time));
                    }
                    if pxx == Port::Pass {
                        emissions.push(emit(1, start + o.xx_emit_time));
                    }
                }
            }
            kind @ (ExperimentKind::HomX | ExperimentKind::HomXx) => {
                let delay = self.config.mzi_delay;
                // (arrival time, slot) for each photon; slot = excitation + long arm.
                let mut photons: [Option<(f64, u8)>; 2] = [None, None];
                for (e, slot) in photons.iter_mut().enumerate() {
                    if rng.random_bool(p.eta_xx) {
                        let o = sample_pair_event(p, rng);
                        let t = if kind == ExperimentKind::HomX {
                            o.x_emit_time
                        } else {
                            o.xx_emit_time
                        };
                        let long = rng.random::<bool>();
                        let arrival = start
                            + e as f64 * self.config.double_pulse_sep
                            + t
                            + if long { delay } else { 0.0 };
                        *slot = Some((arrival, e as u8 + long as u8));
                    }
                }
                match photons {
                    [Some((t0, 1)), Some((t1, 1))] => {
                        // Both photons meet at the combiner.
                        let bunch = (1.0 + p.overlap_m * if self.hom_co { 1.0 } else { 0.0 }) / 2.0;
                        let first = rng.random::<bool>() as u16;
                        let second = if rng.random_bool(bunch) { first } else { 1 - first };
                        emissions.push(emit(HOM_CHANNELS[first as usize], t0));
                        emissions.push(emit(HOM_CHANNELS[second as usize], t1));
                    }
                    _ => {
                        for (t, _) in photons.into_iter().flatten() {
                            let ch = rng.random::<bool>() as u16;
                            emissions.push(emit(HOM_CHANNELS[ch as usize], t));
                        }
                    }
                }
            }
            ExperimentKind::LifetimeX | ExperimentKind::LifetimeXx => {
                out.push(DetectionRecord::new(LIFETIME_TRIGGER, index, to_timestamp(start)));
                if rng.random_bool(p.eta_xx) {
                    let o = sample_pair_event(p, rng);
                    if self.config.kind == ExperimentKind::LifetimeX {
                        emissions.push(emit(1, start + o.x_emit_time));
                        emissions.push(emit(2, start + o.xx_emit_time));
                    } else {
                        emissions.push(emit(1, start + o.xx_emit_time));
                    }
                }
            }
        }
        out.extend(apply_detection_chain(
            &emissions, p, self.config, start, index, rng,
        ));
    }
}

/// Runs one experiment. Deterministic in (params, config): each pulse draws
/// from its own counter-based stream and the merge is a total-order sort.
pub fn simulate(params: &SourceParams, config: &ExperimentConfig) -> Result<TimeTagStream> {
    params.validate()?;
    config.validate()?;
    let background = match config.kind {
        ExperimentKind::HbtX => background_probability(params.g2_x, params.eta_xx)?,
        ExperimentKind::HbtXx => background_probability(params.g2_xx, params.eta_xx)?,
        _ => 0.0,
    };
    let analyzers = match (config.basis, config.relative_pol) {
        (Some(basis), Some(pol)) => {
            let (a, b) = basis.states();
            (a, if pol == RelativePol::Co { a } else { b })
        }
        _ => (Jones::H, Jones::H),
    };
    let plan = Plan {
        params,
        config,
        period: params.rep_period(),
        background,
        analyzers,
        hom_co: config.relative_pol == Some(RelativePol::Co),
    };
    let factory = PulseRng::new(config.seed);
    let n = config.n_pulses;
    let chunks: Vec<Vec<DetectionRecord>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = factory.for_pulse(i);
                plan.pulse(i, &mut rng, &mut out);
            }
            out.sort_unstable();
            out
        })
        .collect();
    let mut records: Vec<DetectionRecord> =
        Vec::with_capacity(chunks.iter().map(Vec::len).sum());
    for c in chunks {
        records.extend(c);
    }
    // Chunks overlap in time only through jitter at their boundaries.
    records.sort();
    Ok(TimeTagStream::from_sorted(
        StreamHeader {
            source: *params,
            experiment: config.clone(),
        },
        records,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::PolarizationBasis;

    #[test]
    fn background_inverts_peak_ratio() {
        for g2 in [0.0, 0.001, 0.007, 0.1, 0.5] {
            let p = 0.9;
            let q = background_probability(g2, p).unwrap();
            let ratio = 2.0 * p * q / (p + q).powi(2);
            assert!((ratio - g2).abs() < 1e-12, "{g2}: {ratio}");
        }
        assert!(background_probability(0.6, 0.9).is_err());
    }

    #[test]
    fn same_seed_same_stream() {
        let p = SourceParams::default();
        let c = ExperimentConfig::new(ExperimentKind::CrossCorrelation)
            .with_basis(PolarizationBasis::Diagonal, RelativePol::Co)
            .with_pulses(50_000)
            .with_seed(42);
        let a = simulate(&p, &c).unwrap();
        let b = simulate(&p, &c).unwrap();
        assert_eq!(a, b);
        let other = simulate(&p, &c.clone().with_seed(43)).unwrap();
        assert_ne!(a.records(), other.records());
    }

    #[test]
    fn records_are_time_sorted_and_within_pulse_range() {
        let p = SourceParams::default();
        let c = ExperimentConfig::new(ExperimentKind::LifetimeX).with_pulses(20_000);
        let s = simulate(&p, &c).unwrap();
        assert!(s.records().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.records().iter().all(|r| r.pulse_index < 20_000));
        assert_eq!(s.channel_count(LIFETIME_TRIGGER), 20_000);
    }

    #[test]
    fn basis_on_hbt_is_rejected() {
        let p = SourceParams::default();
        let c = ExperimentConfig::new(ExperimentKind::HbtX)
            .with_basis(PolarizationBasis::Linear, RelativePol::Co);
        assert!(matches!(simulate(&p, &c), Err(Error::Validation(_))));
    }
}
