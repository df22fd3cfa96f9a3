use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::basis::PolarizationBasis;
use super::density::TwoPhotonDensityMatrix;
use super::params::SourceParams;
use super::HBAR_UEV_PS;
use crate::error::{ensure_positive, ensure_unit_interval, Error, Result};

/// Dimensionless FSS phase rate x = s·τ_X/ħ.
pub fn phase_parameter(fss: f64, tau_x: f64) -> f64 {
    fss * tau_x / HBAR_UEV_PS
}

/// Average of e^{isτ/ħ} over τ ~ Exp(mean `tau_x`): c = 1/(1 − ix).
pub fn coherence_factor(fss: f64, tau_x: f64) -> Result<Complex64> {
    ensure_positive("tau_x", tau_x)?;
    if !(fss >= 0.0) {
        return Err(Error::Domain {
            name: "fss",
            value: fss,
            constraint: "must be non-negative",
        });
    }
    let x = phase_parameter(fss, tau_x);
    if !x.is_finite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = 1.0 + x * x;
    Ok(Complex64::new(1.0 / d, x / d))
}

/// Probability that no spin flip occurs before the exciton decays.
pub fn scattering_survival(tau_x: f64, tau_ss: f64) -> Result<f64> {
    ensure_positive("tau_x", tau_x)?;
    if !(tau_ss > 0.0) {
        return Err(Error::Domain {
            name: "tau_ss",
            value: tau_ss,
            constraint: "must be positive",
        });
    }
    if tau_ss.is_infinite() {
        return Ok(1.0);
    }
    Ok(tau_ss / (tau_ss + tau_x))
}

/// ⟨ψ⁺|ρ|ψ⁺⟩
pub fn fidelity_to_psi_plus(rho: &TwoPhotonDensityMatrix) -> f64 {
    (rho.get(0, 0).re + rho.get(3, 3).re) / 2.0 + rho.get(0, 3).re
}

/// Degree of polarization correlation (P_co − P_cross)/(P_co + P_cross).
pub fn predicted_correlation(rho: &TwoPhotonDensityMatrix, basis: PolarizationBasis) -> f64 {
    let (a, b) = basis.states();
    let co = rho.joint_probability(&a, &a) + rho.joint_probability(&b, &b);
    let cross = rho.joint_probability(&a, &b) + rho.joint_probability(&b, &a);
    (co - cross) / (co + cross)
}

pub fn fidelity_from_correlations(c_lin: f64, c_diag: f64, c_circ: f64) -> Result<f64> {
    for (name, c) in [("c_lin", c_lin), ("c_diag", c_diag), ("c_circ", c_circ)] {
        if !(-1.0..=1.0).contains(&c) {
            return Err(Error::Domain {
                name,
                value: c,
                constraint: "must lie in [-1, 1]",
            });
        }
    }
    Ok((1.0 + c_lin + c_diag - c_circ) / 4.0)
}

/// Closed-form fidelity 1/4 + k/4 + (k/2)/(1 + x²).
pub fn fidelity_vs_fss(fss: f64, tau_x: f64, tau_ss: f64) -> Result<f64> {
    let k = scattering_survival(tau_x, tau_ss)?;
    let c = coherence_factor(fss, tau_x)?;
    Ok(0.25 + 0.25 * k + 0.5 * k * c.re)
}

/// Fidelity over a grid of splittings, other parameters taken from `params`.
pub fn fidelity_vs_fss_curve(params: &SourceParams, fss_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if fss_grid.is_empty() {
        return Err(Error::Validation("FSS grid is empty".into()));
    }
    fss_grid
        .iter()
        .map(|&s| Ok((s, fidelity_vs_fss(s, params.tau_x, params.tau_ss)?)))
        .collect()
}

/// Collected photon-pair probability per pulse.
pub fn pair_collection_probability(eta_xx: f64, eta: f64, g2_x: f64, g2_xx: f64) -> Result<f64> {
    ensure_unit_interval("eta_xx", eta_xx)?;
    ensure_unit_interval("eta", eta)?;
    ensure_unit_interval("g2_x", g2_x)?;
    ensure_unit_interval("g2_xx", g2_xx)?;
    Ok(eta_xx * eta * eta * (1.0 - g2_x).sqrt() * (1.0 - g2_xx).sqrt())
}

/// First-lens collection efficiency inferred from a detected count rate.
pub fn collection_efficiency_from_rate(
    detected_rate: f64,
    rep_rate: f64,
    xi: f64,
    apd_correction: f64,
    eta_xx: f64,
) -> Result<f64> {
    ensure_positive("detected_rate", detected_rate)?;
    ensure_positive("rep_rate", rep_rate)?;
    for (name, v) in [("xi", xi), ("eta_xx", eta_xx)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Domain {
                name,
                value: v,
                constraint: "must lie in (0, 1]",
            });
        }
    }
    if !(apd_correction >= 1.0) {
        return Err(Error::Domain {
            name: "apd_correction",
            value: apd_correction,
            constraint: "must be >= 1",
        });
    }
    let eta = detected_rate * apd_correction / (rep_rate * xi * eta_xx);
    if eta > 1.0 + 1e-12 {
        return Err(Error::InconsistentInputs(format!(
            "inferred collection efficiency {eta:.4} exceeds 1"
        )));
    }
    Ok(eta.min(1.0))
}

/// Lifetime ratio bulk/cavity.
pub fn purcell_factor(tau_bulk: f64, tau_cavity: f64) -> Result<f64> {
    ensure_positive("tau_bulk", tau_bulk)?;
    ensure_positive("tau_cavity", tau_cavity)?;
    Ok(tau_bulk / tau_cavity)
}

/// Phenomenological two-photon Rabi curve η_XX(P) = η_max·sin²((π/2)·√(P/P_π)).
pub fn preparation_probability(power: f64, p_pi: f64, eta_max: f64) -> Result<f64> {
    ensure_positive("p_pi", p_pi)?;
    ensure_unit_interval("eta_max", eta_max)?;
    if !(power >= 0.0) {
        return Err(Error::Domain {
            name: "power",
            value: power,
            constraint: "must be non-negative",
        });
    }
    Ok(eta_max * (FRAC_PI_2 * (power / p_pi).sqrt()).sin().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::model_density_matrix;

    fn device(fss: f64, tau_x: f64, tau_ss: f64) -> SourceParams {
        SourceParams {
            fss_s: fss,
            tau_x,
            tau_ss,
            ..Default::default()
        }
    }

    /// Composite Simpson integration of (1/τ)e^{−t/τ}e^{ist/ħ} on [0, 40τ].
    fn coherence_by_quadrature(fss: f64, tau: f64) -> Complex64 {
        let n = 200_000;
        let upper = 40.0 * tau;
        let h = upper / n as f64;
        let f = |t: f64| {
            let w = (-t / tau).exp() / tau;
            let ph = fss * t / HBAR_UEV_PS;
            Complex64::new(w * ph.cos(), w * ph.sin())
        };
        let mut acc = f(0.0) + f(upper);
        for i in 1..n {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(i as f64 * h) * weight;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn coherence_factor_examples() {
        assert_eq!(coherence_factor(0.0, 60.0).unwrap(), Complex64::new(1.0, 0.0));
        let c = coherence_factor(4.8, 60.0).unwrap();
        let q = coherence_by_quadrature(4.8, 60.0);
        assert!((c - q).norm() < 1e-9, "{c} vs {q}");
        assert!((c.re - 0.8393).abs() < 1e-4);
        assert!((c.im - 0.3673).abs() < 1e-4);
        assert!((phase_parameter(4.8, 60.0) - 0.43756).abs() < 2e-5);
        assert!(coherence_factor(1e9, 60.0).unwrap().norm() < 1e-6);
        assert!(coherence_factor(1.0, 0.0).is_err());
        assert!(coherence_factor(1.0, -3.0).is_err());
    }

    #[test]
    fn survival_examples() {
        assert_eq!(scattering_survival(60.0, f64::INFINITY).unwrap(), 1.0);
        assert!((scattering_survival(60.0, 15_000.0).unwrap() - 0.99602).abs() < 1e-5);
        assert!((scattering_survival(60.0, 1_000.0).unwrap() - 0.94340).abs() < 1e-5);
        assert!(scattering_survival(0.0, 10.0).is_err());
        assert!(scattering_survival(60.0, 0.0).is_err());
    }

    #[test]
    fn model_fidelity_at_device_parameters() {
        let rho = model_density_matrix(&device(4.8, 60.0, 15_000.0)).unwrap();
        let f = fidelity_to_psi_plus(&rho);
        assert!((f - 0.917).abs() < 5e-4, "{f}");
        assert!((fidelity_to_psi_plus(&TwoPhotonDensityMatrix::psi_plus()) - 1.0).abs() < 1e-15);
        assert!(
            (fidelity_to_psi_plus(&TwoPhotonDensityMatrix::maximally_mixed()) - 0.25).abs() < 1e-15
        );
    }

    #[test]
    fn correlations_of_bell_state_and_model() {
        let bell = TwoPhotonDensityMatrix::psi_plus();
        assert!((predicted_correlation(&bell, PolarizationBasis::Linear) - 1.0).abs() < 1e-14);
        assert!((predicted_correlation(&bell, PolarizationBasis::Diagonal) - 1.0).abs() < 1e-14);
        assert!((predicted_correlation(&bell, PolarizationBasis::Circular) + 1.0).abs() < 1e-14);

        let p = device(4.8, 60.0, 15_000.0);
        let rho = model_density_matrix(&p).unwrap();
        let k = scattering_survival(60.0, 15_000.0).unwrap();
        let x = phase_parameter(4.8, 60.0);
        let lin = predicted_correlation(&rho, PolarizationBasis::Linear);
        let diag = predicted_correlation(&rho, PolarizationBasis::Diagonal);
        let circ = predicted_correlation(&rho, PolarizationBasis::Circular);
        assert!((lin - k).abs() < 1e-14);
        assert!((lin - 0.99602).abs() < 1e-5);
        assert!((diag - k / (1.0 + x * x)).abs() < 1e-14);
        assert!((diag - 0.836).abs() < 5e-4);
        assert!(circ <= 0.0);
        assert!((diag + circ).abs() < 1e-14);
    }

    #[test]
    fn fidelity_from_correlation_examples() {
        // Exact decimal arithmetic: (1 + 0.92 + 0.81 + 0.80)/4 = 0.8825
        let f = fidelity_from_correlations(0.92, 0.81, -0.80).unwrap();
        assert!((f - 0.8825).abs() < 1e-15);
        assert_eq!(fidelity_from_correlations(1.0, 1.0, -1.0).unwrap(), 1.0);
        assert_eq!(fidelity_from_correlations(0.0, 0.0, 0.0).unwrap(), 0.25);
        assert!(fidelity_from_correlations(1.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn fidelity_curve_anchors() {
        let f = |s, tx, tss| fidelity_vs_fss(s, tx, tss).unwrap();
        assert!((f(10.0, 60.0, 15_000.0) - 0.771).abs() < 5e-4);
        assert!((f(4.8, 210.0, 15_000.0) - 0.644).abs() < 5e-4);
        assert!((f(4.8, 60.0, 1_000.0) - 0.882).abs() < 5e-4);
        let k = scattering_survival(60.0, 15_000.0).unwrap();
        assert!((f(0.0, 60.0, 15_000.0) - (1.0 + 3.0 * k) / 4.0).abs() < 1e-15);

        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.1).collect();
        let curve = fidelity_vs_fss_curve(&device(0.0, 60.0, 15_000.0), &grid).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1));
        assert!(fidelity_vs_fss_curve(&SourceParams::default(), &[]).is_err());
    }

    #[test]
    fn brightness_examples() {
        let p = pair_collection_probability(0.9, 0.85, 0.001, 0.007).unwrap();
        assert!((p - 0.648).abs() < 5e-4, "{p}");
        assert_eq!(pair_collection_probability(1.0, 1.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(pair_collection_probability(0.9, 0.85, 1.0, 0.0).unwrap(), 0.0);

        let eta = collection_efficiency_from_rate(3.4, 79.0, 0.07, 1.25, 0.9).unwrap();
        assert!((eta - 0.854).abs() < 5e-4, "{eta}");
        let id = collection_efficiency_from_rate(79.0 * 0.07 * 0.9, 79.0, 0.07, 1.0, 0.9).unwrap();
        assert!((id - 1.0).abs() < 1e-12);
        assert!((collection_efficiency_from_rate(7.9, 79.0, 1.0, 1.0, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(
            collection_efficiency_from_rate(10.0, 79.0, 0.07, 1.25, 0.9),
            Err(Error::InconsistentInputs(_))
        ));
    }

    #[test]
    fn purcell_examples() {
        assert_eq!(purcell_factor(210.0, 60.0).unwrap(), 3.5);
        assert_eq!(purcell_factor(210.0, 210.0).unwrap(), 1.0);
        assert!((purcell_factor(220.0, 50.0).unwrap() - 4.4).abs() < 1e-15);
        assert!(purcell_factor(0.0, 60.0).is_err());
    }

    #[test]
    fn rabi_curve_peaks_at_pi_power() {
        assert!((preparation_probability(1.0, 1.0, 0.9).unwrap() - 0.9).abs() < 1e-15);
        assert_eq!(preparation_probability(0.0, 1.0, 0.9).unwrap(), 0.0);
        assert!(preparation_probability(4.0, 1.0, 0.9).unwrap() < 1e-15);
    }
}
