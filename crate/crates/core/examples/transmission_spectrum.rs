//! `|T31(w)|` for the four damping pairs used with `g1 = 4`, `g2 = 3`.
//!
//! Rates are scaled by `g0 = 5`. The last pair breaks the optimal condition
//! `g1^2 k2 = g2^2 k1` and does not reach unit transmission.

use optomech::transmission::{half_width, t31_resonant, TransmissionSpectrum};
use optomech::SystemParams;

fn main() -> optomech::Result<()> {
    let g0 = 5.0;
    for (k1, k2) in [(0.096, 0.054), (0.064, 0.036), (0.032, 0.018), (0.0192, 0.032)] {
        let params = SystemParams::new(k1 * g0, k2 * g0, 2e-4 * g0, 0.0)?;
        let res = t31_resonant(&params, 4.0, 3.0)?;
        let hw = half_width(&params, 4.0, 3.0)?;
        println!(
            "kappa/g0 = ({k1}, {k2}): T31(0) = {:.6} (optimal: {}), half-width {:.4} g0 (analytic {:.4} g0)",
            res.value,
            res.optimal,
            hw.numeric / g0,
            hw.analytic / g0
        );
        let spectrum = TransmissionSpectrum::uniform(&params, 4.0, 3.0, 0.0, 0.1 * g0, 6)?;
        let row: Vec<String> = spectrum.t31_abs().iter().map(|t| format!("{t:.3}")).collect();
        println!("    |T31| at w/g0 = 0, 0.02, .., 0.1: {}", row.join(" "));
    }
    Ok(())
}
