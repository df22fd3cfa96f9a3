//! Polarization-resolved XX–X cross-correlations in three bases and the
//! fidelity reconstructed from them.

use qdpairs::analysis::{correlation_from_areas, cross_correlation_peaks, AnalysisOptions};
use qdpairs::mc::{simulate, ExperimentConfig, ExperimentKind, RelativePol};
use qdpairs::physics::{
    fidelity_from_correlations, fidelity_to_psi_plus, model_density_matrix, predicted_correlation,
    PolarizationBasis, SourceParams,
};

fn main() -> qdpairs::Result<()> {
    let pulses = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000_000);
    let params = SourceParams::default();
    let rho = model_density_matrix(&params)?;
    let opts = AnalysisOptions::default();
    let mut c = Vec::new();
    for (i, basis) in PolarizationBasis::ALL.into_iter().enumerate() {
        let run = |pol, seed| {
            let cfg = ExperimentConfig::new(ExperimentKind::CrossCorrelation)
                .with_basis(basis, pol)
                .with_pulses(pulses)
                .with_seed(seed);
            cross_correlation_peaks(&simulate(&params, &cfg)?, &opts)
        };
        let e = correlation_from_areas(&run(RelativePol::Co, 10 + 2 * i as u64)?, &run(RelativePol::Cross, 11 + 2 * i as u64)?)?;
        println!(
            "C_{:<9} {:+.4} ± {:.4}   model {:+.4}",
            basis.name(),
            e.value,
            e.sigma,
            predicted_correlation(&rho, basis)
        );
        c.push(e.value);
    }
    println!(
        "fidelity {:.4}   model {:.4}",
        fidelity_from_correlations(c[0], c[1], c[2])?,
        fidelity_to_psi_plus(&rho)
    );
    Ok(())
}
