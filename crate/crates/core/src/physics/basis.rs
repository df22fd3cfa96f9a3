use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-photon polarization state in the (H, V) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jones(pub [Complex64; 2]);

impl Jones {
    pub const H: Jones = Jones([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    pub const V: Jones = Jones([Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);

    pub fn new(h: Complex64, v: Complex64) -> Self {
        Jones([h, v])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Jones) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// The state orthogonal to `self` with the same handedness convention
    /// used by the fixed bases (H→V, D→A, L→R).
    pub fn orthogonal(&self) -> Jones {
        Jones([self.0[1].conj(), -self.0[0].conj()]).with_real_leading()
    }

    fn with_real_leading(self) -> Jones {
        // Rotate the global phase so the H component is real and non-negative.
        let h = self.0[0];
        if h.norm() > 1e-15 {
            let phase = h.conj() / h.norm();
            Jones([self.0[0] * phase, self.0[1] * phase])
        } else {
            let v = self.0[1];
            let phase = v.conj() / v.norm();
            Jones([self.0[0] * phase, self.0[1] * phase])
        }
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > 1e-9 || !n.is_finite() {
            return Err(Error::Validation(format!(
                "analyzer must be a unit vector, |a|^2 = {n}"
            )));
        }
        Ok(())
    }
}

/// Polarization analysis basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationBasis {
    /// H / V
    Linear,
    /// D = (H+V)/√2, A = (H−V)/√2
    Diagonal,
    /// L = (H+iV)/√2, R = (H−iV)/√2
    Circular,
}

impl PolarizationBasis {
    pub const ALL: [PolarizationBasis; 3] = [Self::Linear, Self::Diagonal, Self::Circular];

    /// The two basis states `(a, b)`.
    pub fn states(self) -> (Jones, Jones) {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let is = Complex64::new(0.0, FRAC_1_SQRT_2);
        match self {
            Self::Linear => (Jones::H, Jones::V),
            Self::Diagonal => (Jones::new(s, s), Jones::new(s, -s)),
            Self::Circular => (Jones::new(s, is), Jones::new(s, -is)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Diagonal => "diagonal",
            Self::Circular => "circular",
        }
    }
}

impl fmt::Display for PolarizationBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolarizationBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "hv" => Ok(Self::Linear),
            "diagonal" | "da" => Ok(Self::Diagonal),
            "circular" | "lr" => Ok(Self::Circular),
            other => Err(Error::Validation(format!("unknown basis `{other}`"))),
        }
    }
}
