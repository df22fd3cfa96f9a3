//! Simulates every experiment for the default device and analyzes the
//! resulting streams, printing estimates next to the model predictions.
//!
//! ```bash
//! cargo run --release -p qdpairs --example closed_loop -- 2000000
//! ```

use qdpairs::analysis::{analyze_streams, compile_report, AnalysisOptions, Thresholds};
use qdpairs::mc::{simulate, ExperimentConfig, ExperimentKind, RelativePol};
use qdpairs::physics::{
    fidelity_to_psi_plus, model_density_matrix, predicted_correlation, PolarizationBasis,
    SourceParams,
};

fn main() -> qdpairs::Result<()> {
    let pulses: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000);
    let params = SourceParams::default();

    let mut configs = vec![
        ExperimentConfig::new(ExperimentKind::HbtX),
        ExperimentConfig::new(ExperimentKind::HbtXx),
        ExperimentConfig::new(ExperimentKind::LifetimeX),
        ExperimentConfig::new(ExperimentKind::LifetimeXx),
    ];
    for basis in PolarizationBasis::ALL {
        for pol in [RelativePol::Co, RelativePol::Cross] {
            configs.push(ExperimentConfig::new(ExperimentKind::CrossCorrelation).with_basis(basis, pol));
        }
    }
    for kind in [ExperimentKind::HomX, ExperimentKind::HomXx] {
        for pol in [RelativePol::Co, RelativePol::Cross] {
            configs.push(ExperimentConfig::new(kind).with_pol(pol));
        }
    }
    let streams = configs
        .into_iter()
        .enumerate()
        .map(|(i, c)| simulate(&params, &c.with_pulses(pulses).with_seed(100 + i as u64)))
        .collect::<qdpairs::Result<Vec<_>>>()?;

    let (inputs, params) = analyze_streams(&streams, None, &AnalysisOptions::default())?;
    let report = compile_report(&inputs, &params, &Thresholds::default())?;
    print!("{}", report.to_text());

    let rho = model_density_matrix(&params)?;
    println!("\nmodel");
    for basis in PolarizationBasis::ALL {
        println!("C_{basis:<10} {:.6}", predicted_correlation(&rho, basis));
    }
    println!("fidelity     {:.6}", fidelity_to_psi_plus(&rho));
    println!("visibility   {:.6}", params.overlap_m);
    Ok(())
}
