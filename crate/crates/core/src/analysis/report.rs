use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{fidelity_from_correlations, pair_collection_probability, SourceParams};

use super::estimators::Estimate;

/// A reported figure of merit. `value` is clamped to its physical range;
/// `raw` keeps the estimator output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub raw: f64,
    pub sigma: f64,
}

impl Quantity {
    fn clamped(e: Estimate, lo: f64, hi: f64) -> Self {
        Self {
            value: e.value.clamp(lo, hi),
            raw: e.value,
            sigma: e.sigma.max(0.0),
        }
    }

    fn unbounded(e: Estimate) -> Self {
        Self {
            value: e.value,
            raw: e.value,
            sigma: e.sigma.max(0.0),
        }
    }
}

/// Estimator outputs collected from an analysis run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportInputs {
    pub g2_x: Option<Estimate>,
    pub g2_xx: Option<Estimate>,
    pub c_lin: Option<Estimate>,
    pub c_diag: Option<Estimate>,
    pub c_circ: Option<Estimate>,
    pub v_hom_x: Option<Estimate>,
    pub v_hom_xx: Option<Estimate>,
    pub tau_x: Option<Estimate>,
    pub tau_xx: Option<Estimate>,
    pub fss: Option<Estimate>,
    pub eta: Option<Estimate>,
}

impl ReportInputs {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub min_fidelity: f64,
    pub max_g2: f64,
    pub min_visibility: f64,
    pub min_pair_probability: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            min_fidelity: 0.5,
            max_g2: 0.05,
            min_visibility: 0.5,
            min_pair_probability: 0.1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FomReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2_x: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2_xx: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_lin: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_diag: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_circ: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_hom_x: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_hom_xx: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_x: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_xx: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fss: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_probability: Option<Quantity>,
    /// Threshold checks by name; only evaluated quantities appear.
    pub checks: BTreeMap<String, bool>,
}

impl FomReport {
    fn entries(&self) -> Vec<(&'static str, Option<&Quantity>)> {
        vec![
            ("g2_x", self.g2_x.as_ref()),
            ("g2_xx", self.g2_xx.as_ref()),
            ("c_lin", self.c_lin.as_ref()),
            ("c_diag", self.c_diag.as_ref()),
            ("c_circ", self.c_circ.as_ref()),
            ("fidelity", self.fidelity.as_ref()),
            ("v_hom_x", self.v_hom_x.as_ref()),
            ("v_hom_xx", self.v_hom_xx.as_ref()),
            ("tau_x", self.tau_x.as_ref()),
            ("tau_xx", self.tau_xx.as_ref()),
            ("fss", self.fss.as_ref()),
            ("eta", self.eta.as_ref()),
            ("pair_probability", self.pair_probability.as_ref()),
        ]
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let mut out = String::from("figure of merit       value        sigma\n");
        for (name, q) in self.entries() {
            if let Some(q) = q {
                let _ = write!(out, "{name:<18} {:>12.6} {:>12.6}", q.value, q.sigma);
                if q.raw != q.value {
                    let _ = write!(out, "   (raw {:.6})", q.raw);
                }
                out.push('\n');
            }
        }
        if !self.checks.is_empty() {
            out.push_str("\nchecks\n");
            for (name, ok) in &self.checks {
                let _ = writeln!(out, "{name:<30} {}", if *ok { "pass" } else { "FAIL" });
            }
        }
        out
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }
}

/// Aggregates estimator outputs, deriving the fidelity from the three
/// correlations and the pair probability from η and both g² values.
///
/// The correlation triple is all-or-nothing; so is (η, g²_X, g²_XX) once η
/// is present.
pub fn compile_report(
    inputs: &ReportInputs,
    params: &SourceParams,
    thresholds: &Thresholds,
) -> Result<FomReport> {
    if inputs.is_empty() {
        return Err(Error::IncompleteReport("estimates"));
    }
    let prob = |e: Option<Estimate>| e.map(|e| Quantity::clamped(e, 0.0, 1.0));
    let corr = |e: Option<Estimate>| e.map(|e| Quantity::clamped(e, -1.0, 1.0));
    let mut report = FomReport {
        g2_x: prob(inputs.g2_x),
        g2_xx: prob(inputs.g2_xx),
        c_lin: corr(inputs.c_lin),
        c_diag: corr(inputs.c_diag),
        c_circ: corr(inputs.c_circ),
        v_hom_x: prob(inputs.v_hom_x),
        v_hom_xx: prob(inputs.v_hom_xx),
        tau_x: inputs.tau_x.map(Quantity::unbounded),
        tau_xx: inputs.tau_xx.map(Quantity::unbounded),
        fss: inputs.fss.map(Quantity::unbounded),
        eta: prob(inputs.eta),
        ..Default::default()
    };

    let triple = [inputs.c_lin, inputs.c_diag, inputs.c_circ];
    if triple.iter().any(Option::is_some) {
        let names = ["c_lin", "c_diag", "c_circ"];
        if let Some(i) = triple.iter().position(Option::is_none) {
            return Err(Error::IncompleteReport(names[i]));
        }
        let [lin, diag, circ] = triple.map(Option::unwrap);
        let f = fidelity_from_correlations(
            lin.value.clamp(-1.0, 1.0),
            diag.value.clamp(-1.0, 1.0),
            circ.value.clamp(-1.0, 1.0),
        )?;
        let sigma = (lin.sigma.powi(2) + diag.sigma.powi(2) + circ.sigma.powi(2)).sqrt() / 4.0;
        report.fidelity = prob(Some(Estimate::new(f, sigma)));
    }

    if let Some(eta) = inputs.eta {
        let g2_x = inputs.g2_x.ok_or(Error::IncompleteReport("g2_x"))?;
        let g2_xx = inputs.g2_xx.ok_or(Error::IncompleteReport("g2_xx"))?;
        let (e, gx, gxx) = (
            eta.value.clamp(0.0, 1.0),
            g2_x.value.clamp(0.0, 1.0),
            g2_xx.value.clamp(0.0, 1.0),
        );
        let p = pair_collection_probability(params.eta_xx, e, gx, gxx)?;
        let d_eta = if e > 0.0 { 2.0 * p / e } else { 0.0 };
        let d_gx = if gx < 1.0 { p / (2.0 * (1.0 - gx)) } else { 0.0 };
        let d_gxx = if gxx < 1.0 { p / (2.0 * (1.0 - gxx)) } else { 0.0 };
        let sigma = ((d_eta * eta.sigma).powi(2)
            + (d_gx * g2_x.sigma).powi(2)
            + (d_gxx * g2_xx.sigma).powi(2))
        .sqrt();
        report.pair_probability = prob(Some(Estimate::new(p, sigma)));
    }

    let mut checks = BTreeMap::new();
    for (name, q) in [("g2_x", report.g2_x), ("g2_xx", report.g2_xx)] {
        if let Some(q) = q {
            checks.insert(format!("{name} <= {}", thresholds.max_g2), q.value <= thresholds.max_g2);
        }
    }
    if let Some(q) = report.fidelity {
        checks.insert(
            format!("fidelity >= {}", thresholds.min_fidelity),
            q.value >= thresholds.min_fidelity,
        );
    }
    for (name, q) in [("v_hom_x", report.v_hom_x), ("v_hom_xx", report.v_hom_xx)] {
        if let Some(q) = q {
            checks.insert(
                format!("{name} >= {}", thresholds.min_visibility),
                q.value >= thresholds.min_visibility,
            );
        }
    }
    if let Some(q) = report.pair_probability {
        checks.insert(
            format!("pair_probability >= {}", thresholds.min_pair_probability),
            q.value >= thresholds.min_pair_probability,
        );
    }
    report.checks = checks;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measured() -> ReportInputs {
        ReportInputs {
            c_lin: Some(Estimate::new(0.92, 0.02)),
            c_diag: Some(Estimate::new(0.81, 0.02)),
            c_circ: Some(Estimate::new(-0.80, 0.02)),
            g2_x: Some(Estimate::new(0.001, 0.001)),
            g2_xx: Some(Estimate::new(0.007, 0.001)),
            eta: Some(Estimate::new(0.85, 0.03)),
            ..Default::default()
        }
    }

    #[test]
    fn measured_correlations_give_fidelity() {
        let r = compile_report(&measured(), &SourceParams::default(), &Thresholds::default()).unwrap();
        let f = r.fidelity.unwrap();
        assert!((f.value - 0.8825).abs() < 1e-12);
        // √3·0.02/4
        assert!((f.sigma - 3f64.sqrt() * 0.02 / 4.0).abs() < 1e-12);
        assert!(r.checks["fidelity >= 0.5"]);
    }

    #[test]
    fn measured_brightness_gives_pair_probability() {
        let r = compile_report(&measured(), &SourceParams::default(), &Thresholds::default()).unwrap();
        let p = r.pair_probability.unwrap();
        assert!((p.value - 0.648).abs() < 5e-4);
        assert!((p.sigma - 0.046).abs() < 1e-3, "{}", p.sigma);
    }

    #[test]
    fn empty_and_partial_inputs_rejected() {
        let params = SourceParams::default();
        let t = Thresholds::default();
        assert!(matches!(
            compile_report(&ReportInputs::default(), &params, &t),
            Err(Error::IncompleteReport(_))
        ));
        let mut partial = measured();
        partial.c_diag = None;
        assert!(matches!(
            compile_report(&partial, &params, &t),
            Err(Error::IncompleteReport("c_diag"))
        ));
    }

    #[test]
    fn clamps_but_keeps_raw() {
        let inputs = ReportInputs {
            g2_x: Some(Estimate::new(-0.002, 0.001)),
            ..Default::default()
        };
        let r = compile_report(&inputs, &SourceParams::default(), &Thresholds::default()).unwrap();
        let g = r.g2_x.unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.raw, -0.002);
        assert!(r.to_text().contains("raw -0.002"));
        let back: FomReport = toml::from_str(&r.to_toml()).unwrap();
        assert_eq!(back, r);
    }
}
