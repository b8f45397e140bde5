//! Density matrices, spectra and entropies on a few textbook states.

use std::f64::consts::FRAC_1_SQRT_2;

use tempokey::linalg::{
    binary_entropy, eigvals_hermitian, partial_trace, von_neumann_entropy, ComplexMatrix,
    StateVector,
};

fn main() -> tempokey::Result<()> {
    let bell = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])?;
    let rho = bell.projector();
    println!("S(|Φ+⟩⟨Φ+|)      = {:.6}", von_neumann_entropy(&rho)?);

    let rho_a = partial_trace(&rho, &[2, 2], 0)?;
    println!("S(Tr_B |Φ+⟩⟨Φ+|) = {:.6}", von_neumann_entropy(&rho_a)?);

    let mixed = ComplexMatrix::from_real_rows(&[vec![0.7, 0.2], vec![0.2, 0.3]])?;
    println!(
        "spectrum of [[0.7, 0.2], [0.2, 0.3]] = {:?}",
        eigvals_hermitian(&mixed)?
    );
    println!(
        "its entropy                           = {:.6}",
        von_neumann_entropy(&mixed)?
    );

    for q in [0.0, 0.02, 0.11, 0.5] {
        println!("h({q:<4}) = {:.6}", binary_entropy(q)?);
    }
    Ok(())
}
