use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct LmFit {
    pub params: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub chi2: f64,
    pub iterations: usize,
}

/// Weighted Levenberg–Marquardt with central-difference Jacobians.
///
/// `model(p, i)` evaluates the prediction for data point `i`.
pub(crate) fn levenberg_marquardt<F>(
    model: F,
    ys: &[f64],
    weights: &[f64],
    start: &[f64],
    max_iter: usize,
) -> Result<LmFit>
where
    F: Fn(&[f64], usize) -> f64,
{
    let n = ys.len();
    let m = start.len();
    let chi2_of = |p: &[f64]| -> f64 {
        (0..n)
            .map(|i| weights[i] * (ys[i] - model(p, i)).powi(2))
            .sum()
    };
    let jacobian = |p: &[f64]| -> DMatrix<f64> {
        let mut j = DMatrix::zeros(n, m);
        let mut work = p.to_vec();
        for k in 0..m {
            let h = 1e-6 * p[k].abs().max(1e-3);
            work[k] = p[k] + h;
            let up: Vec<f64> = (0..n).map(|i| model(&work, i)).collect();
            work[k] = p[k] - h;
            for i in 0..n {
                j[(i, k)] = (up[i] - model(&work, i)) / (2.0 * h);
            }
            work[k] = p[k];
        }
        j
    };

    let mut p = start.to_vec();
    let mut chi2 = chi2_of(&p);
    if !chi2.is_finite() {
        return Err(Error::FitFailure {
            reason: "non-finite objective at the starting point".into(),
            iterations: 0,
            chi2,
        });
    }
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let j = jacobian(&p);
        let r = DVector::from_iterator(n, (0..n).map(|i| ys[i] - model(&p, i)));
        let jt_w = weighted_transpose(&j, weights);
        let jtj = &jt_w * &j;
        let grad = &jt_w * r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..m {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&grad) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let trial_chi2 = chi2_of(&trial);
            if trial_chi2.is_finite() && trial_chi2 <= chi2 {
                let rel_step = step
                    .iter()
                    .zip(&p)
                    .map(|(s, v)| (s / v.abs().max(1e-9)).abs())
                    .fold(0.0, f64::max);
                let rel_chi2 = (chi2 - trial_chi2) / chi2.max(1e-300);
                p = trial;
                chi2 = trial_chi2;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if rel_chi2 < 1e-12 || rel_step < 1e-10 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // No downhill step at any damping: already at the minimum.
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::FitFailure {
            reason: format!("no convergence, parameters {p:?}"),
            iterations,
            chi2,
        });
    }
    let j = jacobian(&p);
    let jtj = weighted_transpose(&j, weights) * &j;
    let covariance = jtj.try_inverse().ok_or_else(|| Error::FitFailure {
        reason: "singular curvature matrix at the optimum".into(),
        iterations,
        chi2,
    })?;
    Ok(LmFit {
        params: p,
        covariance,
        chi2,
        iterations,
    })
}

fn weighted_transpose(j: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let mut t = j.transpose();
    for (i, mut col) in t.column_iter_mut().enumerate() {
        col *= weights[i];
    }
    t
}
