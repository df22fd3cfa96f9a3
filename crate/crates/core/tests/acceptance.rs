//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use qdpairs::analysis::{
    analyze_streams, fit_fss, fit_lifetime, g2_zero, hbt_peaks, hom_peaks, hom_visibility,
    AnalysisOptions, CoincidenceHistogram, ReportInputs,
};
use qdpairs::cli::DEVICE_1_CONFIG;
use qdpairs::io::{decode_binary, decode_csv, encode_binary, encode_csv, parse_config, read_tagfile, write_tagfile};
use qdpairs::mc::{sample_pair_event, simulate, ExperimentConfig, ExperimentKind, RelativePol, TimeTagStream};
use qdpairs::physics::{
    collection_efficiency_from_rate, fidelity_from_correlations, fidelity_to_psi_plus,
    fidelity_vs_fss, model_density_matrix, pair_collection_probability, predicted_correlation,
    purcell_factor, PolarizationBasis, SourceParams,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn fidelity_anchors() -> Outcome {
    let a = fidelity_vs_fss(4.8, 60.0, 15_000.0).map_err(|e| e.to_string())?;
    let b = fidelity_vs_fss(4.8, 210.0, 15_000.0).map_err(|e| e.to_string())?;
    let c = fidelity_vs_fss(10.0, 60.0, 15_000.0).map_err(|e| e.to_string())?;
    let d = fidelity_vs_fss(4.8, 60.0, 1_000.0).map_err(|e| e.to_string())?;
    check(
        within(a, 0.92, 0.01) && within(b, 0.64, 0.01) && c > 0.75 && within(d, 0.88, 0.01),
        format!("f = {a:.4}, {b:.4}, {c:.4}, {d:.4}"),
    )
}

fn fidelity_arithmetic() -> Outcome {
    let f = fidelity_from_correlations(0.92, 0.81, -0.80).map_err(|e| e.to_string())?;
    check(within(f, 0.8825, 1e-12), format!("f = {f}"))
}

fn brightness_arithmetic() -> Outcome {
    let p = pair_collection_probability(0.9, 0.85, 0.001, 0.007).map_err(|e| e.to_string())?;
    let eta = collection_efficiency_from_rate(3.4, 79.0, 0.07, 1.25, 0.9).map_err(|e| e.to_string())?;
    check(
        within(p, 0.648, 0.001) && within(eta, 0.854, 0.005),
        format!("p = {p:.5}, eta = {eta:.5}"),
    )
}

fn purcell() -> Outcome {
    let f = purcell_factor(210.0, 60.0).map_err(|e| e.to_string())?;
    check(within(f, 3.5, 1e-12), format!("F_p = {f}"))
}

fn device_1() -> SourceParams {
    parse_config(DEVICE_1_CONFIG).expect("bundled config parses").source
}

fn closed_loop() -> Outcome {
    const PULSES: u64 = 10_000_000;
    let params = device_1();
    let opts = AnalysisOptions::default();
    let run = |p: &SourceParams, c: ExperimentConfig, seed: u64| -> Result<TimeTagStream, String> {
        simulate(p, &c.with_pulses(PULSES).with_seed(seed)).map_err(|e| e.to_string())
    };
    let mut failures = Vec::new();
    let mut detail = Vec::new();

    let hbt = run(&params, ExperimentConfig::new(ExperimentKind::HbtX), 501)?;
    let g2 = g2_zero(&hbt_peaks(&hbt, &opts).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    detail.push(format!("g2_x = {:.4}", g2.value));
    if !(0.0..=0.01).contains(&g2.value) {
        failures.push("g2_x");
    }

    let mut streams = Vec::new();
    for (i, basis) in PolarizationBasis::ALL.into_iter().enumerate() {
        for (j, pol) in [RelativePol::Co, RelativePol::Cross].into_iter().enumerate() {
            let c = ExperimentConfig::new(ExperimentKind::CrossCorrelation).with_basis(basis, pol);
            streams.push(run(&params, c, 510 + 2 * i as u64 + j as u64)?);
        }
    }
    let (inputs, _) = analyze_streams(&streams, None, &opts).map_err(|e| e.to_string())?;
    let rho = model_density_matrix(&params).map_err(|e| e.to_string())?;
    let estimates = [inputs.c_lin, inputs.c_diag, inputs.c_circ];
    let mut cs = [0.0; 3];
    for (k, (basis, est)) in PolarizationBasis::ALL.into_iter().zip(estimates).enumerate() {
        let est = est.ok_or("missing correlation estimate")?;
        let predicted = predicted_correlation(&rho, basis);
        cs[k] = est.value;
        detail.push(format!(
            "C_{} = {:.4}±{:.4} (model {:.4})",
            basis.name(),
            est.value,
            est.sigma,
            predicted
        ));
        if est.pull(predicted) > 3.0 {
            failures.push("C");
        }
    }
    let f = fidelity_from_correlations(cs[0], cs[1], cs[2]).map_err(|e| e.to_string())?;
    let sigma_f = [inputs.c_lin, inputs.c_diag, inputs.c_circ]
        .iter()
        .map(|e| e.unwrap().sigma.powi(2))
        .sum::<f64>()
        .sqrt()
        / 4.0;
    let f_model = fidelity_to_psi_plus(&rho);
    detail.push(format!("f = {f:.4}±{sigma_f:.4} (model {f_model:.4})"));
    if (f - f_model).abs() > 3.0 * sigma_f {
        failures.push("f");
    }

    for (i, m) in [0.5, 0.9, 1.0].into_iter().enumerate() {
        let p = SourceParams {
            overlap_m: m,
            ..params
        };
        let co = run(&p, ExperimentConfig::new(ExperimentKind::HomX).with_pol(RelativePol::Co), 530 + 2 * i as u64)?;
        let cross = run(&p, ExperimentConfig::new(ExperimentKind::HomX).with_pol(RelativePol::Cross), 531 + 2 * i as u64)?;
        let v = hom_visibility(
            &hom_peaks(&co, &opts).map_err(|e| e.to_string())?,
            &hom_peaks(&cross, &opts).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        detail.push(format!("V(M={m}) = {:.4}±{:.4}", v.value, v.sigma));
        if !within(v.value, m, 0.01) {
            failures.push("V");
        }
    }
    let detail = detail.join(", ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; out of tolerance: {}", failures.join(" ")))
    }
}

fn density_oracle() -> Outcome {
    const SAMPLES: usize = 10_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for set in 0..10 {
        let params = SourceParams {
            fss_s: rng.random_range(0.0..20.0),
            tau_x: rng.random_range(30.0..1000.0),
            tau_xx: rng.random_range(20.0..200.0),
            tau_ss: if set == 0 { f64::INFINITY } else { rng.random_range(300.0..30_000.0) },
            ..SourceParams::default()
        };
        let mut sum = [[Complex64::new(0.0, 0.0); 4]; 4];
        let mut sum_sq = [[(0.0f64, 0.0f64); 4]; 4];
        for _ in 0..SAMPLES {
            let a = sample_pair_event(&params, &mut rng).polarization.amplitudes();
            for i in 0..4 {
                for j in 0..4 {
                    let v = a[i] * a[j].conj();
                    sum[i][j] += v;
                    sum_sq[i][j].0 += v.re * v.re;
                    sum_sq[i][j].1 += v.im * v.im;
                }
            }
        }
        let rho = model_density_matrix(&params).map_err(|e| e.to_string())?;
        let n = SAMPLES as f64;
        for i in 0..4 {
            for j in 0..4 {
                let mean = sum[i][j] / n;
                let se = |s2: f64, m: f64| ((s2 / n - m * m).max(0.0) / (n - 1.0)).sqrt();
                let (se_re, se_im) = (se(sum_sq[i][j].0, mean.re), se(sum_sq[i][j].1, mean.im));
                let model = rho.get(i, j);
                for (d, se) in [(mean.re - model.re, se_re), (mean.im - model.im, se_im)] {
                    if se == 0.0 {
                        if d.abs() > 1e-12 {
                            return Err(format!("set {set} element ({i},{j}) deterministic mismatch {d:e}"));
                        }
                    } else {
                        worst = worst.max(d.abs() / se);
                    }
                }
            }
        }
    }
    check(
        worst <= 3.0,
        format!("10 parameter sets x 10^7 cascades, largest deviation {worst:.2} SE"),
    )
}

fn synthetic_decay(tau: f64, sigma: f64, counts: usize, seed: u64) -> CoincidenceHistogram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Exp::new(1.0 / tau).unwrap();
    let jitter = Normal::new(0.0, sigma).unwrap();
    let mut h = CoincidenceHistogram::zeros(4, (-500, 3000), 12_658.0).unwrap();
    for _ in 0..counts {
        let t = exp.sample(&mut rng) + jitter.sample(&mut rng);
        h.record(t.floor() as i64);
    }
    h
}

fn fss_samples(s: f64, noise: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise).unwrap();
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let angles: Vec<f64> = (0..36).map(|i| i as f64 * 10.0).collect();
    let de = angles
        .iter()
        .map(|a: &f64| 12.0 + 0.5 * s * (2.0 * a.to_radians() + phase).sin() + normal.sample(&mut rng))
        .collect();
    (angles, de)
}

fn fit_recovery() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (i, tau) in [60.0, 210.0].into_iter().enumerate() {
        let h = synthetic_decay(tau, 50.0, 1_000_000, 70 + i as u64);
        let fit = fit_lifetime(&h, 50.0).map_err(|e| e.to_string())?;
        ok &= (fit.tau.value / tau - 1.0).abs() <= 0.02;
        detail.push(format!("tau {tau} -> {:.2}±{:.2}", fit.tau.value, fit.tau.sigma));
    }
    for (i, s) in [3.4, 4.8, 11.6].into_iter().enumerate() {
        let (angles, de) = fss_samples(s, 0.15, 80 + i as u64);
        let fit = fit_fss(&angles, &de).map_err(|e| e.to_string())?;
        ok &= within(fit.fss.value, s, 0.2);
        detail.push(format!("s {s} -> {:.3}±{:.3}", fit.fss.value, fit.fss.sigma));
    }
    check(ok, detail.join(", "))
}

fn format_integrity() -> Outcome {
    let params = device_1();
    let configs = [
        ExperimentConfig::new(ExperimentKind::HbtX),
        ExperimentConfig::new(ExperimentKind::CrossCorrelation).with_basis(PolarizationBasis::Linear, RelativePol::Co),
        ExperimentConfig::new(ExperimentKind::CrossCorrelation).with_basis(PolarizationBasis::Linear, RelativePol::Cross),
        ExperimentConfig::new(ExperimentKind::LifetimeX),
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut from_bin = Vec::new();
    let mut from_csv = Vec::new();
    for (i, c) in configs.into_iter().enumerate() {
        let c = c.with_pulses(200_000).with_seed(800 + i as u64);
        let s = simulate(&params, &c).map_err(|e| e.to_string())?;
        let again = simulate(&params, &c).map_err(|e| e.to_string())?;
        if encode_binary(&s) != encode_binary(&again) {
            return Err(format!("{}: seeded rerun not byte-identical", c.kind));
        }
        if decode_binary(&encode_binary(&s)).map_err(|e| e.to_string())? != s
            || decode_csv(&encode_csv(&s)).map_err(|e| e.to_string())? != s
        {
            return Err(format!("{}: in-memory round trip lost data", c.kind));
        }
        let bin = dir.path().join(format!("{i}.cstg"));
        let csv = dir.path().join(format!("{i}.csv"));
        write_tagfile(&bin, &s).map_err(|e| e.to_string())?;
        write_tagfile(&csv, &s).map_err(|e| e.to_string())?;
        from_bin.push(read_tagfile(&bin).map_err(|e| e.to_string())?);
        from_csv.push(read_tagfile(&csv).map_err(|e| e.to_string())?);
    }
    if from_bin != from_csv {
        return Err("binary and CSV files decode to different streams".into());
    }
    let opts = AnalysisOptions::default();
    let a: ReportInputs = analyze_streams(&from_bin, None, &opts).map_err(|e| e.to_string())?.0;
    let b: ReportInputs = analyze_streams(&from_csv, None, &opts).map_err(|e| e.to_string())?.0;
    check(
        a == b,
        format!(
            "4 streams, {} records; identical estimates from either encoding",
            from_bin.iter().map(|s| s.record_count()).sum::<usize>()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("fidelity curve anchors", fidelity_anchors),
        ("fidelity arithmetic", fidelity_arithmetic),
        ("brightness arithmetic", brightness_arithmetic),
        ("Purcell factor", purcell),
        ("closed-loop statistics at 10^7 pulses", closed_loop),
        ("density matrix vs brute-force cascades", density_oracle),
        ("lifetime and FSS fit recovery", fit_recovery),
        ("tag format integrity and reproducibility", format_integrity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {}: PASS  {name} [{secs:.1}s] {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.1}s] {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
