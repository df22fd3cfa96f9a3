//! Pair collection probability, collection efficiency from a detected
//! rate, and the Rabi-type preparation curve under two-photon excitation.

use qdpairs::physics::{collection_efficiency_from_rate, pair_collection_probability, preparation_probability, SourceParams};

fn main() -> qdpairs::Result<()> {
    let p = SourceParams::default();
    let eta = collection_efficiency_from_rate(3.4, p.rep_rate, p.xi, p.apd_correction, p.eta_xx)?;
    println!("collection efficiency from 3.4 MHz detected: {eta:.3}");
    let pair = pair_collection_probability(p.eta_xx, p.eta, p.g2_x, p.g2_xx)?;
    println!("pair collection probability per pulse: {pair:.3}");
    println!("collected pair rate: {:.1} MHz", pair * p.rep_rate);
    println!("\nsqrt(P/P_pi)  eta_xx");
    for i in 0..=12 {
        let power = (i as f64 / 4.0).powi(2);
        println!("{:>12.2}  {:.3}", power.sqrt(), preparation_probability(power, 1.0, p.eta_xx)?);
    }
    Ok(())
}
