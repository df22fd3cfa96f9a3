//! Two-photon interference of consecutive photons in an unbalanced
//! Mach–Zehnder interferometer, for a range of wavepacket overlaps.

use qdpairs::analysis::{hom_peaks, hom_visibility, AnalysisOptions};
use qdpairs::mc::{simulate, ExperimentConfig, ExperimentKind, RelativePol};
use qdpairs::physics::SourceParams;

fn main() -> qdpairs::Result<()> {
    let pulses = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000_000);
    let opts = AnalysisOptions::default();
    for m in [0.0, 0.5, 0.9, 1.0] {
        let params = SourceParams {
            overlap_m: m,
            ..Default::default()
        };
        let run = |pol, seed| {
            let cfg = ExperimentConfig::new(ExperimentKind::HomXx)
                .with_pol(pol)
                .with_pulses(pulses)
                .with_seed(seed);
            hom_peaks(&simulate(&params, &cfg)?, &opts)
        };
        let co = run(RelativePol::Co, 1)?;
        let cross = run(RelativePol::Cross, 2)?;
        let v = hom_visibility(&co, &cross)?;
        println!(
            "M = {m:.1}: central co {:>6.0}, cross {:>6.0}, V = {:.4} ± {:.4}",
            co.central().map_or(0.0, |p| p.area),
            cross.central().map_or(0.0, |p| p.area),
            v.value,
            v.sigma
        );
    }
    Ok(())
}
