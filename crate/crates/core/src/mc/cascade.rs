use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::Result;
use crate::physics::{Jones, SourceParams, HBAR_UEV_PS};

/// Photon-pair polarization after one cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairPolarization {
    /// (|HH⟩ + e^{iφ}|VV⟩)/√2, exciton photon first.
    Entangled { phase: f64 },
    /// Product state after a spin flip; `true` means V.
    Product { x_vertical: bool, xx_vertical: bool },
}

impl PairPolarization {
    /// Amplitudes over (HH, HV, VH, VV).
    pub fn amplitudes(&self) -> [Complex64; 4] {
        let z = Complex64::new(0.0, 0.0);
        match *self {
            Self::Entangled { phase } => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                [Complex64::new(s, 0.0), z, z, Complex64::from_polar(s, phase)]
            }
            Self::Product {
                x_vertical,
                xx_vertical,
            } => {
                let mut a = [z; 4];
                a[(x_vertical as usize) * 2 + xx_vertical as usize] = Complex64::new(1.0, 0.0);
                a
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOutcome {
    /// Biexciton photon emission time after excitation, ps.
    pub xx_emit_time: f64,
    /// Exciton photon emission time after excitation, ps.
    pub x_emit_time: f64,
    pub polarization: PairPolarization,
    pub spin_flipped: bool,
}

/// Samples one XX→X cascade. The caller decides whether XX was prepared.
///
/// A spin flip scrambles the pair with probability 1 − k, k = τ_SS/(τ_SS+τ_X),
/// drawn independently of the exciton delay: conditioning the phase on an
/// exponential race would shorten the unflipped delays to mean k·τ_X and
/// break the single-channel dephasing model.
pub fn sample_pair_event<R: Rng + ?Sized>(params: &SourceParams, rng: &mut R) -> CascadeOutcome {
    let xx_delay = Exp::new(1.0 / params.tau_xx).expect("validated lifetime").sample(rng);
    let x_delay = Exp::new(1.0 / params.tau_x).expect("validated lifetime").sample(rng);
    let spin_flipped = if params.tau_ss.is_infinite() {
        false
    } else {
        let k = params.tau_ss / (params.tau_ss + params.tau_x);
        rng.random::<f64>() >= k
    };
    let polarization = if spin_flipped {
        PairPolarization::Product {
            x_vertical: rng.random(),
            xx_vertical: rng.random(),
        }
    } else {
        PairPolarization::Entangled {
            phase: params.fss_s * x_delay / HBAR_UEV_PS,
        }
    };
    CascadeOutcome {
        xx_emit_time: xx_delay,
        x_emit_time: xx_delay + x_delay,
        polarization,
        spin_flipped,
    }
}

/// Output port of a polarizing analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    /// Projected onto the analyzer state.
    Pass,
    /// Projected onto the orthogonal state.
    Block,
}

/// Born-rule sample of the joint projection of both photons.
pub fn project_polarization<R: Rng + ?Sized>(
    pair: &PairPolarization,
    analyzer_x: &Jones,
    analyzer_xx: &Jones,
    rng: &mut R,
) -> Result<(Port, Port)> {
    analyzer_x.ensure_normalized()?;
    analyzer_xx.ensure_normalized()?;
    let psi = pair.amplitudes();
    let xs = [(*analyzer_x, Port::Pass), (analyzer_x.orthogonal(), Port::Block)];
    let xxs = [
        (*analyzer_xx, Port::Pass),
        (analyzer_xx.orthogonal(), Port::Block),
    ];
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last = (Port::Block, Port::Block);
    for (a, pa) in &xs {
        for (b, pb) in &xxs {
            let amp = a.0[0].conj() * b.0[0].conj() * psi[0]
                + a.0[0].conj() * b.0[1].conj() * psi[1]
                + a.0[1].conj() * b.0[0].conj() * psi[2]
                + a.0[1].conj() * b.0[1].conj() * psi[3];
            cumulative += amp.norm_sqr();
            last = (*pa, *pb);
            if u < cumulative {
                return Ok(last);
            }
        }
    }
    Ok(last)
}
