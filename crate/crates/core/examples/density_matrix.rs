//! Model two-photon density matrix, its eigenvalues and the correlations
//! an analyzer in each basis would see.

use qdpairs::physics::{
    fidelity_from_correlations, fidelity_to_psi_plus, model_density_matrix, predicted_correlation,
    PolarizationBasis, SourceParams,
};

fn main() -> qdpairs::Result<()> {
    let params = SourceParams::default();
    let rho = model_density_matrix(&params)?;
    let labels = ["HH", "HV", "VH", "VV"];
    println!("rho (rows/cols {labels:?})");
    for (i, label) in labels.iter().enumerate() {
        let row: Vec<String> = (0..4)
            .map(|j| {
                let z = rho.get(i, j);
                format!("{:+.4}{:+.4}i", z.re, z.im)
            })
            .collect();
        println!("  {label} {}", row.join("  "));
    }
    println!("smallest eigenvalue {:.3e}", rho.smallest_eigenvalue());
    let c: Vec<f64> = PolarizationBasis::ALL
        .iter()
        .map(|&b| predicted_correlation(&rho, b))
        .collect();
    for (b, v) in PolarizationBasis::ALL.iter().zip(&c) {
        println!("C_{:<9} {v:+.4}", b.name());
    }
    println!("fidelity {:.4} (from correlations {:.4})", fidelity_to_psi_plus(&rho), fidelity_from_correlations(c[0], c[1], c[2])?);
    Ok(())
}
