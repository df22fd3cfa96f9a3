use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::PolarizationBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    HbtX,
    HbtXx,
    CrossCorrelation,
    HomX,
    HomXx,
    LifetimeX,
    LifetimeXx,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::HbtX,
        Self::HbtXx,
        Self::CrossCorrelation,
        Self::HomX,
        Self::HomXx,
        Self::LifetimeX,
        Self::LifetimeXx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::HbtX => "hbt_x",
            Self::HbtXx => "hbt_xx",
            Self::CrossCorrelation => "cross_correlation",
            Self::HomX => "hom_x",
            Self::HomXx => "hom_xx",
            Self::LifetimeX => "lifetime_x",
            Self::LifetimeXx => "lifetime_xx",
        }
    }

    pub fn is_hom(self) -> bool {
        matches!(self, Self::HomX | Self::HomXx)
    }

    pub fn is_hbt(self) -> bool {
        matches!(self, Self::HbtX | Self::HbtXx)
    }

    pub fn is_lifetime(self) -> bool {
        matches!(self, Self::LifetimeX | Self::LifetimeXx)
    }

    /// Detector channels that can register photons or dark counts.
    pub fn photon_channels(self) -> &'static [u16] {
        match self {
            Self::LifetimeX => &[1, 2],
            Self::LifetimeXx => &[1],
            _ => &[0, 1],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown experiment kind `{s}`")))
    }
}

/// Relative orientation of the two analyzers (cross-correlation) or of the
/// two interferometer arms (HOM).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelativePol {
    Co,
    Cross,
}

impl FromStr for RelativePol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "co" => Ok(Self::Co),
            "cross" => Ok(Self::Cross),
            other => Err(Error::Validation(format!("unknown relative polarization `{other}`"))),
        }
    }
}

impl fmt::Display for RelativePol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Co => "co",
            Self::Cross => "cross",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<PolarizationBasis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_pol: Option<RelativePol>,
    /// Unbalanced interferometer delay, ps.
    pub mzi_delay: f64,
    /// Separation of the two excitation pulses in each period, ps.
    pub double_pulse_sep: f64,
    /// Detector timing jitter σ, ps.
    pub irf_sigma: f64,
    /// Dark count rate per channel, Hz.
    pub dark_rate: f64,
    pub n_pulses: u64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::HbtX,
            basis: None,
            relative_pol: None,
            mzi_delay: 1900.0,
            double_pulse_sep: 1900.0,
            irf_sigma: 20.0,
            dark_rate: 0.0,
            n_pulses: 1_000_000,
            seed: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            ..Default::default()
        }
    }

    pub fn with_basis(mut self, basis: PolarizationBasis, pol: RelativePol) -> Self {
        self.basis = Some(basis);
        self.relative_pol = Some(pol);
        self
    }

    pub fn with_pol(mut self, pol: RelativePol) -> Self {
        self.relative_pol = Some(pol);
        self
    }

    pub fn with_pulses(mut self, n: u64) -> Self {
        self.n_pulses = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pulses == 0 {
            return Err(Error::Validation("n_pulses must be >= 1".into()));
        }
        if self.n_pulses >= 1 << 48 {
            return Err(Error::Validation("n_pulses must fit in 48 bits".into()));
        }
        if !(self.irf_sigma >= 0.0 && self.irf_sigma.is_finite()) {
            return Err(Error::Validation(format!(
                "irf_sigma must be a finite non-negative value, got {}",
                self.irf_sigma
            )));
        }
        if !(self.dark_rate >= 0.0 && self.dark_rate.is_finite()) {
            return Err(Error::Validation("dark_rate must be non-negative".into()));
        }
        if !(self.mzi_delay > 0.0 && self.double_pulse_sep > 0.0) {
            return Err(Error::Validation("HOM delays must be positive".into()));
        }
        if self.mzi_delay != self.double_pulse_sep {
            return Err(Error::Validation(format!(
                "mzi_delay ({}) must equal double_pulse_sep ({})",
                self.mzi_delay, self.double_pulse_sep
            )));
        }
        match self.kind {
            ExperimentKind::CrossCorrelation => {
                if self.basis.is_none() {
                    return Err(Error::Validation("cross_correlation requires `basis`".into()));
                }
                if self.relative_pol.is_none() {
                    return Err(Error::Validation(
                        "cross_correlation requires `relative_pol`".into(),
                    ));
                }
            }
            k if k.is_hom() => {
                if self.basis.is_some() {
                    return Err(Error::Validation(format!("`basis` is not valid for {k}")));
                }
                if self.relative_pol.is_none() {
                    return Err(Error::Validation(format!("{k} requires `relative_pol`")));
                }
            }
            k => {
                if self.basis.is_some() {
                    return Err(Error::Validation(format!("`basis` is not valid for {k}")));
                }
                if self.relative_pol.is_some() {
                    return Err(Error::Validation(format!("`relative_pol` is not valid for {k}")));
                }
            }
        }
        Ok(())
    }
}
