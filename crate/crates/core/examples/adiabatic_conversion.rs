//! Transfer of a coherent state from cavity 1 to cavity 2 with
//! `g1 = 5 sin t`, `g2 = -5 cos t` over `T = pi/2`.
//!
//! The moment integrator gives the full dynamics; the adiabatic-limit
//! evolution drops the non-adiabatic coupling and should match the
//! closed-form `F1 F2`.

use optomech::adiabatic::{adiabatic_limit_evolution, analytic_fidelity};
use optomech::gaussian::{
    embed_initial, gaussian_fidelity, integrate, make_squeezed_coherent, reduce_to_mode, StepControl,
};
use optomech::model::adiabaticity;
use optomech::{CouplingSchedule, SystemParams, C64};

fn main() -> optomech::Result<()> {
    let alpha = C64::new(1.0, 0.0);
    let control = StepControl::default();

    for duration in [std::f64::consts::FRAC_PI_2, 5.0 * std::f64::consts::PI] {
        let schedule = CouplingSchedule::Trig { amplitude: 5.0, duration };
        println!("T = {duration:.4}, adiabaticity max|dg/dt|/g0^2 = {:.3}", adiabaticity(&schedule, 200)?);
        println!("{:>8} {:>8} {:>10} {:>10} {:>10}", "kappa1", "r", "numeric", "adiabatic", "F1 F2");
        // keep kappa1 T, and with it f(0,T), fixed as T grows
        for kappa1 in [0.0, 0.1, 0.2].map(|k| k * std::f64::consts::FRAC_PI_2 / duration) {
            for r in [0.0, 0.4] {
                let params = SystemParams::new(kappa1, 0.0, 0.0, 0.0)?;
                let input = make_squeezed_coherent(alpha, r, 0.0)?;
                let state0 = embed_initial(&input, 0.0)?;

                let run = integrate(&state0, &params, &schedule, duration, &control)?;
                let numeric = gaussian_fidelity(&input, &reduce_to_mode(run.last(), 3)?)?;
                let limit = adiabatic_limit_evolution(&state0, &params, &schedule, duration, &control)?;
                let adiabatic = gaussian_fidelity(&input, &reduce_to_mode(&limit, 3)?)?;
                let analytic = analytic_fidelity(alpha, r, 0.0, &params, &schedule, duration)?;
                println!("{kappa1:>8.4} {r:>8} {numeric:>10.6} {adiabatic:>10.6} {:>10.6}", analytic.fidelity);
            }
        }
        println!();
    }
    Ok(())
}
