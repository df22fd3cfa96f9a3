//! Time-tag processing: coincidence histograms, peak integration and the
//! figure-of-merit estimators, all with first-order Poisson uncertainties.

mod estimators;
mod fss;
mod histogram;
mod lifetime;
mod lm;
mod peaks;
mod pipeline;
mod report;

pub use estimators::{
    correlation_from_areas, g2_zero, hom_visibility, normalized_central, Estimate,
    HOM_SIDE_MIN_ORDER,
};
pub use fss::{fit_fss, FssFit};
pub use histogram::{build_histogram, CoincidenceHistogram};
pub use lifetime::{emg_density, fit_lifetime, LifetimeFit};
pub use peaks::{integrate_peaks, Peak, PeakAreas};
pub use pipeline::{
    analyze_streams, cross_correlation_peaks, decay_histogram, efficiency_from_hbt, hbt_peaks,
    hom_peaks, lifetime_from_stream, AnalysisOptions, FssSamples,
};
pub use report::{compile_report, FomReport, Quantity, ReportInputs, Thresholds};
