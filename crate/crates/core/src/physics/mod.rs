//! Closed-form model of the cascade two-photon polarization state and the
//! analytic figure-of-merit formulas built on it.
//!
//! Units: energies in μeV, times in ps, rates in MHz.

mod basis;
mod density;
mod formulas;
mod params;

pub use basis::{Jones, PolarizationBasis};
pub use density::{model_density_matrix, TwoPhotonDensityMatrix};
pub use formulas::{
    coherence_factor, collection_efficiency_from_rate, fidelity_from_correlations,
    fidelity_to_psi_plus, fidelity_vs_fss, fidelity_vs_fss_curve, pair_collection_probability,
    phase_parameter, predicted_correlation, preparation_probability, purcell_factor,
    scattering_survival,
};
pub use params::SourceParams;

/// Reduced Planck constant in μeV·ps.
pub const HBAR_UEV_PS: f64 = 658.211_956_9;
