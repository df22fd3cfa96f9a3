use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use super::basis::Jones;
use super::formulas::{coherence_factor, scattering_survival};
use super::params::SourceParams;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Two-photon polarization density matrix over (HH, HV, VH, VV); the first
/// factor is the exciton photon, the second the biexciton photon.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonDensityMatrix {
    entries: Matrix4<Complex64>,
}

impl TwoPhotonDensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(entries: Matrix4<Complex64>) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                let d = entries[(i, j)] - entries[(j, i)].conj();
                if d.norm() > HERMITIAN_TOL {
                    return Err(Error::Validation(format!(
                        "density matrix not Hermitian at ({i},{j}): deviation {:.3e}",
                        d.norm()
                    )));
                }
            }
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace {trace} differs from 1"
            )));
        }
        let min = SymmetricEigen::new(entries)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::Validation(format!(
                "density matrix not positive semidefinite: eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { entries })
    }

    /// |ψ⟩⟨ψ| for a normalized amplitude vector.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| psi[i] * psi[j].conj()))
    }

    /// Projector onto ψ⁺ = (|HH⟩ + |VV⟩)/√2.
    pub fn psi_plus() -> Self {
        let h = Complex64::new(0.5, 0.0);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = h;
        m[(0, 3)] = h;
        m[(3, 0)] = h;
        m[(3, 3)] = h;
        Self { entries: m }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            entries: Matrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Joint probability of projecting the exciton photon onto `x` and the
    /// biexciton photon onto `xx`.
    pub fn joint_probability(&self, x: &Jones, xx: &Jones) -> f64 {
        let v = product_state(x, xx);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += v[i].conj() * self.entries[(i, j)] * v[j];
            }
        }
        acc.re
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn product_state(x: &Jones, xx: &Jones) -> [Complex64; 4] {
    [
        x.0[0] * xx.0[0],
        x.0[0] * xx.0[1],
        x.0[1] * xx.0[0],
        x.0[1] * xx.0[1],
    ]
}

/// Time-averaged cascade state: with probability `k` (no spin flip before
/// the exciton decays) the FSS-dephased entangled state, otherwise I/4.
///
/// The entangled component is the average of |ψ(τ)⟩⟨ψ(τ)| with
/// ψ(τ) = (|HH⟩ + e^{isτ/ħ}|VV⟩)/√2, so ρ[VV,HH] = k·c/2 with
/// c = 1/(1 − ix) and ρ[HH,VV] its conjugate.
pub fn model_density_matrix(params: &SourceParams) -> Result<TwoPhotonDensityMatrix> {
    params.validate()?;
    let k = scattering_survival(params.tau_x, params.tau_ss)?;
    let c = coherence_factor(params.fss_s, params.tau_x)?;
    let mixed = (1.0 - k) / 4.0;
    let mut m = Matrix4::<Complex64>::zeros();
    for i in 0..4 {
        m[(i, i)] = Complex64::new(mixed, 0.0);
    }
    m[(0, 0)] += k / 2.0;
    m[(3, 3)] += k / 2.0;
    m[(3, 0)] = c * (k / 2.0);
    m[(0, 3)] = c.conj() * (k / 2.0);
    TwoPhotonDensityMatrix::new(m)
}
