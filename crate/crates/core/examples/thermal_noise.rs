//! Sensitivity of the transfer to a hot mechanical bath.
//!
//! Each point is integrated twice, with and without mechanical damping at
//! `n_th = 100`, and the fidelity difference is compared with `3 fs cosh 2r`.

use optomech::adiabatic::{adiabatic_limit_evolution, fs_bound};
use optomech::gaussian::{
    embed_initial, gaussian_fidelity, integrate, make_squeezed_coherent, reduce_to_mode, StepControl,
};
use optomech::{CouplingSchedule, SystemParams, C64};

fn main() -> optomech::Result<()> {
    let schedule = CouplingSchedule::Trig { amplitude: 5.0, duration: std::f64::consts::FRAC_PI_2 };
    let t = schedule.duration();
    let control = StepControl::default();
    let r = 0.4;
    let input = make_squeezed_coherent(C64::new(1.0, 0.0), r, 0.0)?;

    println!("{:>7} {:>11} {:>11} {:>11}", "kappa1", "dF numeric", "dF limit", "bound");
    for kappa1 in [0.2, 0.5, 1.0] {
        let mut f = Vec::new();
        for gamma_m in [0.0, 2e-4] {
            let params = SystemParams::new(kappa1, 0.0, gamma_m, 100.0)?;
            let state0 = embed_initial(&input, params.n_th)?;
            let full = integrate(&state0, &params, &schedule, t, &control)?;
            let limit = adiabatic_limit_evolution(&state0, &params, &schedule, t, &control)?;
            f.push((
                gaussian_fidelity(&input, &reduce_to_mode(full.last(), 3)?)?,
                gaussian_fidelity(&input, &reduce_to_mode(&limit, 3)?)?,
            ));
        }
        let hot = SystemParams::new(kappa1, 0.0, 2e-4, 100.0)?;
        let bound = 3.0 * fs_bound(&hot, &schedule, t)? * (2.0 * r).cosh();
        println!("{kappa1:>7} {:>11.3e} {:>11.3e} {bound:>11.3e}", f[0].0 - f[1].0, f[0].1 - f[1].1);
    }
    Ok(())
}
