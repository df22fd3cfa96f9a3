//! Time-averaged entanglement fidelity versus fine-structure splitting for
//! a Purcell-enhanced and a bulk-like exciton lifetime.

use qdpairs::physics::{fidelity_vs_fss, purcell_factor};

fn main() -> qdpairs::Result<()> {
    let (tau_cavity, tau_bulk, tau_ss) = (60.0, 210.0, 15_000.0);
    println!("Purcell factor {:.2}", purcell_factor(tau_bulk, tau_cavity)?);
    println!("{:>8} {:>10} {:>10}", "fss_uev", "f(60 ps)", "f(210 ps)");
    for i in 0..=20 {
        let s = i as f64;
        println!(
            "{s:>8.1} {:>10.4} {:>10.4}",
            fidelity_vs_fss(s, tau_cavity, tau_ss)?,
            fidelity_vs_fss(s, tau_bulk, tau_ss)?
        );
    }
    // Shorter spin scattering time at the device splitting.
    println!("f(4.8 ueV, tau_ss = 1 ns) = {:.4}", fidelity_vs_fss(4.8, tau_cavity, 1_000.0)?);
    Ok(())
}
