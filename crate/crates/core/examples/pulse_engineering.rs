//! Time-domain transmission under time-dependent couplings.
//!
//! The same pulse goes through three schedules: constant couplings, couplings
//! that switch on only at the pulse peak, and couplings ramped up around it.

use optomech::model::Breakpoint;
use optomech::pulse::{pulse_fidelity, Pulse};
use optomech::transmission::transmit_pulse_time;
use optomech::{CouplingSchedule, SystemParams};

fn main() -> optomech::Result<()> {
    let g0 = 5.0;
    let params = SystemParams::new(0.064 * g0, 0.032 * g0, 2e-4 * g0, 0.0)?;
    let input = Pulse::gaussian(0.04 * g0, 1.0, 1024)?;
    let t_end = input.t_end();
    let bp = |t: f64, g1: f64, g2: f64| Breakpoint { t, g1, g2 };

    let schedules = [
        ("constant", CouplingSchedule::Constant { g1: 4.0, g2: 3.0, duration: t_end }),
        (
            "late switch-on",
            CouplingSchedule::PiecewiseLinear {
                breakpoints: vec![
                    bp(0.0, 0.0, 0.0),
                    bp(0.45 * t_end, 0.0, 0.0),
                    bp(0.5 * t_end, 4.0, 3.0),
                    bp(t_end, 4.0, 3.0),
                ],
            },
        ),
        (
            "ramped x2",
            CouplingSchedule::PiecewiseLinear {
                breakpoints: vec![bp(0.0, 4.0, 3.0), bp(25.0, 8.0, 6.0), bp(55.0, 8.0, 6.0), bp(t_end, 4.0, 3.0)],
            },
        ),
    ];
    for (name, schedule) in schedules {
        let out = transmit_pulse_time(&input, &params, &schedule)?;
        let peak_at =
            (0..out.len()).max_by(|&a, &b| out.amplitudes[a].norm().total_cmp(&out.amplitudes[b].norm())).unwrap();
        println!(
            "{name:>15}: Fp = {:.4}, energy ratio = {:.4}, output peak {:.3} at t = {:.1}",
            pulse_fidelity(&input, &out)?,
            out.energy() / input.energy(),
            out.peak(),
            out.time(peak_at)
        );
    }
    Ok(())
}
