//! Stream-level analysis: builds the histograms each experiment needs and
//! feeds the estimators.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{ExperimentKind, RelativePol, TimeTagStream, LIFETIME_TRIGGER};
use crate::physics::{collection_efficiency_from_rate, PolarizationBasis, SourceParams};

use super::estimators::{correlation_from_areas, g2_zero, hom_visibility, Estimate};
use super::fss::fit_fss;
use super::histogram::{build_histogram, CoincidenceHistogram};
use super::lifetime::{fit_lifetime, LifetimeFit};
use super::peaks::{integrate_peaks, PeakAreas};
use super::report::{ReportInputs, Thresholds};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    /// Coincidence histogram bin width, ps.
    pub bin_width: u64,
    /// Peak integration window for HBT and cross-correlation, ps.
    /// Defaults to one repetition period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Central-peak window for HOM, ps. Defaults to the interferometer delay.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hom_window: Option<f64>,
    /// Side peaks integrated on each side of zero delay.
    pub side_orders: u32,
    /// Bin width of decay histograms, ps.
    pub lifetime_bin: u64,
    /// Delay range of decay histograms, ps.
    pub lifetime_range: [i64; 2],
    /// Detector correction used when inverting count rates. Simulated
    /// streams carry no detector nonlinearity, hence 1.
    pub apd_correction: f64,
    pub thresholds: Thresholds,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            bin_width: 16,
            window: None,
            hom_window: None,
            side_orders: 5,
            lifetime_bin: 4,
            lifetime_range: [-500, 3000],
            apd_correction: 1.0,
            thresholds: Thresholds::default(),
        }
    }
}

fn comb_histogram(
    stream: &TimeTagStream,
    start: u16,
    stop: u16,
    opts: &AnalysisOptions,
) -> Result<CoincidenceHistogram> {
    let period = stream.header.source.rep_period();
    let bw = opts.bin_width;
    let half = (opts.side_orders as f64 + 0.5) * period;
    let hi = ((half / bw as f64).ceil() as i64) * bw as i64;
    let mut h = build_histogram(
        &stream.channel_timestamps(start),
        &stream.channel_timestamps(stop),
        bw,
        (-hi, hi),
        period,
    )?;
    h.channels = (start, stop);
    Ok(h)
}

fn expect_kind(stream: &TimeTagStream, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{what} analysis needs a matching stream, got {}",
            stream.header.experiment.kind
        )))
    }
}

/// Autocorrelation peaks between the two HBT detectors.
pub fn hbt_peaks(stream: &TimeTagStream, opts: &AnalysisOptions) -> Result<PeakAreas> {
    expect_kind(stream, stream.header.experiment.kind.is_hbt(), "HBT")?;
    let period = stream.header.source.rep_period();
    let h = comb_histogram(stream, 0, 1, opts)?;
    integrate_peaks(&h, period, opts.window.unwrap_or(period))
}

/// XX-start, X-stop cross-correlation peaks.
pub fn cross_correlation_peaks(stream: &TimeTagStream, opts: &AnalysisOptions) -> Result<PeakAreas> {
    expect_kind(
        stream,
        stream.header.experiment.kind == ExperimentKind::CrossCorrelation,
        "cross-correlation",
    )?;
    let period = stream.header.source.rep_period();
    let h = comb_histogram(stream, 1, 0, opts)?;
    integrate_peaks(&h, period, opts.window.unwrap_or(period))
}

/// Peaks between the two HOM output ports.
pub fn hom_peaks(stream: &TimeTagStream, opts: &AnalysisOptions) -> Result<PeakAreas> {
    expect_kind(stream, stream.header.experiment.kind.is_hom(), "HOM")?;
    let period = stream.header.source.rep_period();
    let h = comb_histogram(stream, 0, 1, opts)?;
    let window = opts.hom_window.unwrap_or(stream.header.experiment.mzi_delay);
    integrate_peaks(&h, period, window)
}

/// Decay histogram of a lifetime stream and the timing response it carries.
///
/// XX decays are referenced to the laser trigger. X decays are referenced
/// to the XX photon of the same cascade, which removes the XX feeding time
/// but doubles the jitter variance.
pub fn decay_histogram(stream: &TimeTagStream, opts: &AnalysisOptions) -> Result<(CoincidenceHistogram, f64)> {
    let kind = stream.header.experiment.kind;
    expect_kind(stream, kind.is_lifetime(), "lifetime")?;
    let sigma = stream.header.experiment.irf_sigma;
    let (start, irf) = match kind {
        ExperimentKind::LifetimeX => (2, sigma * std::f64::consts::SQRT_2),
        _ => (LIFETIME_TRIGGER, sigma),
    };
    let [lo, hi] = opts.lifetime_range;
    let bw = opts.lifetime_bin as i64;
    let hi = lo + ((hi - lo + bw - 1) / bw) * bw;
    let mut h = build_histogram(
        &stream.channel_timestamps(start),
        &stream.channel_timestamps(1),
        opts.lifetime_bin,
        (lo, hi),
        stream.header.source.rep_period(),
    )?;
    h.channels = (start, 1);
    Ok((h, irf))
}

pub fn lifetime_from_stream(stream: &TimeTagStream, opts: &AnalysisOptions) -> Result<LifetimeFit> {
    let (h, irf) = decay_histogram(stream, opts)?;
    fit_lifetime(&h, irf)
}

/// Collection efficiency from the total detected rate of an HBT stream.
pub fn efficiency_from_hbt(stream: &TimeTagStream, opts: &AnalysisOptions) -> Result<Estimate> {
    expect_kind(stream, stream.header.experiment.kind.is_hbt(), "efficiency")?;
    let p = &stream.header.source;
    let counts = (stream.channel_count(0) + stream.channel_count(1)) as f64;
    if counts == 0.0 {
        return Err(Error::InsufficientData("no detections in HBT stream".into()));
    }
    let rate_mhz = counts / stream.duration_ps() * 1.0e6;
    let eta = collection_efficiency_from_rate(rate_mhz, p.rep_rate, p.xi, opts.apd_correction, p.eta_xx)?;
    Ok(Estimate::new(eta, eta / counts.sqrt()))
}

/// Polarization-resolved splitting data: (angle in degrees, ΔE in μeV).
pub type FssSamples = [(f64, f64)];

/// Runs every estimator the given streams support.
///
/// Cross-correlation streams pair up by basis (co and cross); HOM streams
/// pair up by transition. Returns the estimates and the source parameters
/// of the first stream.
pub fn analyze_streams(
    streams: &[TimeTagStream],
    fss_samples: Option<&FssSamples>,
    opts: &AnalysisOptions,
) -> Result<(ReportInputs, SourceParams)> {
    let params = streams
        .first()
        .map(|s| s.header.source)
        .ok_or_else(|| Error::InsufficientData("no tag streams given".into()))?;
    let mut inputs = ReportInputs::default();
    let mut correlations: HashMap<(PolarizationBasis, RelativePol), PeakAreas> = HashMap::new();
    let mut hom: HashMap<(ExperimentKind, RelativePol), PeakAreas> = HashMap::new();
    let duplicate = |what: String| Error::Validation(format!("duplicate {what} stream"));

    for s in streams {
        let e = &s.header.experiment;
        match e.kind {
            ExperimentKind::HbtX => {
                if inputs.g2_x.replace(g2_zero(&hbt_peaks(s, opts)?)?).is_some() {
                    return Err(duplicate("hbt_x".into()));
                }
                inputs.eta = Some(efficiency_from_hbt(s, opts)?);
            }
            ExperimentKind::HbtXx => {
                if inputs.g2_xx.replace(g2_zero(&hbt_peaks(s, opts)?)?).is_some() {
                    return Err(duplicate("hbt_xx".into()));
                }
                if inputs.eta.is_none() {
                    inputs.eta = Some(efficiency_from_hbt(s, opts)?);
                }
            }
            ExperimentKind::CrossCorrelation => {
                let key = (e.basis.expect("validated"), e.relative_pol.expect("validated"));
                if correlations.insert(key, cross_correlation_peaks(s, opts)?).is_some() {
                    return Err(duplicate(format!("{} {}", key.0, key.1)));
                }
            }
            kind @ (ExperimentKind::HomX | ExperimentKind::HomXx) => {
                let key = (kind, e.relative_pol.expect("validated"));
                if hom.insert(key, hom_peaks(s, opts)?).is_some() {
                    return Err(duplicate(format!("{kind} {}", key.1)));
                }
            }
            ExperimentKind::LifetimeX => inputs.tau_x = Some(lifetime_from_stream(s, opts)?.tau),
            ExperimentKind::LifetimeXx => inputs.tau_xx = Some(lifetime_from_stream(s, opts)?.tau),
        }
    }

    for basis in PolarizationBasis::ALL {
        let (Some(co), Some(cross)) = (
            correlations.get(&(basis, RelativePol::Co)),
            correlations.get(&(basis, RelativePol::Cross)),
        ) else {
            continue;
        };
        let c = Some(correlation_from_areas(co, cross)?);
        match basis {
            PolarizationBasis::Linear => inputs.c_lin = c,
            PolarizationBasis::Diagonal => inputs.c_diag = c,
            PolarizationBasis::Circular => inputs.c_circ = c,
        }
    }
    for kind in [ExperimentKind::HomX, ExperimentKind::HomXx] {
        let (Some(co), Some(cross)) = (
            hom.get(&(kind, RelativePol::Co)),
            hom.get(&(kind, RelativePol::Cross)),
        ) else {
            continue;
        };
        let v = Some(hom_visibility(co, cross)?);
        if kind == ExperimentKind::HomX {
            inputs.v_hom_x = v;
        } else {
            inputs.v_hom_xx = v;
        }
    }
    if let Some(samples) = fss_samples {
        let (angles, de): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        inputs.fss = Some(fit_fss(&angles, &de)?.fss);
    }
    Ok((inputs, params))
}
