//! Hanbury Brown–Twiss autocorrelation of the exciton or biexciton line.
//!
//! ```bash
//! cargo run --release --example hbt_g2 -- xx 2000000
//! ```

use qdpairs::analysis::{g2_zero, hbt_peaks, AnalysisOptions};
use qdpairs::mc::{simulate, ExperimentConfig, ExperimentKind};
use qdpairs::physics::SourceParams;

fn main() -> qdpairs::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = match args.next().as_deref() {
        Some("xx") => ExperimentKind::HbtXx,
        _ => ExperimentKind::HbtX,
    };
    let pulses = args.next().and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let params = SourceParams::default();
    let stream = simulate(&params, &ExperimentConfig::new(kind).with_pulses(pulses))?;
    let peaks = hbt_peaks(&stream, &AnalysisOptions::default())?;
    for p in &peaks.peaks {
        println!("order {:+} area {:>8.0}", p.order, p.area);
    }
    let g2 = g2_zero(&peaks)?;
    let configured = if kind == ExperimentKind::HbtX { params.g2_x } else { params.g2_xx };
    println!("{kind}: g2(0) = {:.4} ± {:.4} (configured {configured})", g2.value, g2.sigma);
    Ok(())
}
