use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, ensure_unit_interval, Error, Result};

/// Physical parameters of one cascade source.
///
/// Defaults describe the Purcell-enhanced GaAs device: 4.8 μeV splitting,
/// 60 ps exciton lifetime, 15 ns spin scattering, 79 MHz excitation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceParams {
    /// Fine structure splitting, μeV.
    #[serde(rename = "fss")]
    pub fss_s: f64,
    /// Exciton lifetime, ps.
    pub tau_x: f64,
    /// Biexciton lifetime, ps.
    pub tau_xx: f64,
    /// Spin scattering time, ps. May be infinite.
    pub tau_ss: f64,
    /// Biexciton preparation probability per pulse.
    pub eta_xx: f64,
    /// Single-photon collection efficiency at the first lens.
    pub eta: f64,
    /// Setup transmission after the first lens, detectors included.
    pub xi: f64,
    pub g2_x: f64,
    pub g2_xx: f64,
    /// Pulse repetition rate, MHz.
    pub rep_rate: f64,
    /// Two-photon wavepacket overlap used for HOM interference.
    pub overlap_m: f64,
    /// Detector nonlinearity correction applied when inverting count rates.
    pub apd_correction: f64,
}

impl Default for SourceParams {
    fn default() -> Self {
        Self {
            fss_s: 4.8,
            tau_x: 60.0,
            tau_xx: 50.0,
            tau_ss: 15_000.0,
            eta_xx: 0.9,
            eta: 0.85,
            xi: 0.07,
            g2_x: 0.001,
            g2_xx: 0.007,
            rep_rate: 79.0,
            overlap_m: 0.9,
            apd_correction: 1.25,
        }
    }
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fss_s >= 0.0 && self.fss_s.is_finite()) {
            return Err(Error::Domain {
                name: "fss",
                value: self.fss_s,
                constraint: "must be finite and non-negative",
            });
        }
        ensure_positive("tau_x", self.tau_x)?;
        ensure_positive("tau_xx", self.tau_xx)?;
        if !(self.tau_ss > 0.0) {
            return Err(Error::Domain {
                name: "tau_ss",
                value: self.tau_ss,
                constraint: "must be positive",
            });
        }
        ensure_positive("rep_rate", self.rep_rate)?;
        ensure_unit_interval("eta_xx", self.eta_xx)?;
        ensure_unit_interval("eta", self.eta)?;
        ensure_unit_interval("xi", self.xi)?;
        ensure_unit_interval("overlap_m", self.overlap_m)?;
        for (name, g2) in [("g2_x", self.g2_x), ("g2_xx", self.g2_xx)] {
            if !(0.0..1.0).contains(&g2) {
                return Err(Error::Domain {
                    name,
                    value: g2,
                    constraint: "must lie in [0, 1)",
                });
            }
        }
        if !(self.apd_correction >= 1.0 && self.apd_correction.is_finite()) {
            return Err(Error::Domain {
                name: "apd_correction",
                value: self.apd_correction,
                constraint: "must be >= 1",
            });
        }
        Ok(())
    }

    /// Pulse period in ps.
    pub fn rep_period(&self) -> f64 {
        1.0e6 / self.rep_rate
    }
}
