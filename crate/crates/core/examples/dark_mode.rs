//! Eigenmodes of the dynamic matrix and the mechanical dark mode.
//!
//! With `g1 = 4`, `g2 = 3` the dark mode `[-g2, 0, g1]/g0` lives on the two
//! cavities only. Damping mixes in a small mechanical component, which the
//! first-order formula predicts.

use optomech::model::build_dynamic_matrix;
use optomech::spectral::{dark_mode_exact, dark_mode_perturbative, eigensystem, ray_distance};
use optomech::SystemParams;

fn main() -> optomech::Result<()> {
    let (g1, g2) = (4.0, 3.0);

    let es = eigensystem(&build_dynamic_matrix(&SystemParams::lossless(), g1, g2))?;
    println!("lossless eigenvalues: {:.6?}", es.values.map(|v| v.re));

    println!("\n{:>8} {:>24} {:>12} {:>12}", "kappa1", "lambda_1", "|psi_b|^2", "1st-order err");
    for kappa1 in [0.05, 0.1, 0.2, 0.5] {
        let params = SystemParams::new(kappa1, 0.5 * kappa1, 1e-3, 0.0)?;
        let exact = dark_mode_exact(&build_dynamic_matrix(&params, g1, g2))?;
        let approx = dark_mode_perturbative(&params, g1, g2)?;
        println!(
            "{kappa1:>8} {:>24.3e} {:>12.3e} {:>12.3e}",
            exact.lambda,
            exact.mechanical_weight,
            ray_distance(&exact.vector, &approx.vector)
        );
    }
    Ok(())
}
