//! Fine-structure splitting from polarization-resolved XX–X energy
//! differences: ΔE(θ) = E₀ + (s/2)·sin(2θ + φ).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use qdpairs::analysis::fit_fss;

fn main() -> qdpairs::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.15).unwrap();
    let angles: Vec<f64> = (0..36).map(|i| i as f64 * 10.0).collect();
    for s in [3.4, 4.8, 11.6] {
        let de: Vec<f64> = angles
            .iter()
            .map(|a| 4000.0 + 0.5 * s * (2.0 * a.to_radians() + 0.7).sin() + noise.sample(&mut rng))
            .collect();
        let fit = fit_fss(&angles, &de)?;
        println!(
            "s = {s:>4.1} ueV -> {:.3} ± {:.3} (phase {:.3} rad, rms {:.3})",
            fit.fss.value, fit.fss.sigma, fit.phase, fit.residual_rms
        );
    }
    Ok(())
}
