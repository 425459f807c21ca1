//! Gaussian pulses sent from cavity 1's input to cavity 2's output through
//! constant couplings. Narrow-band pulses pass almost undistorted; pulses
//! wider than the transmission window lose shape.

use optomech::pulse::{pulse_fidelity, Pulse};
use optomech::transmission::transmit_pulse_freq;
use optomech::SystemParams;

fn main() -> optomech::Result<()> {
    let g0 = 5.0;
    let params = SystemParams::new(0.064 * g0, 0.032 * g0, 2e-4 * g0, 0.0)?;
    println!("{:>10} {:>8} {:>8} {:>12}", "sigma/g0", "Fp", "sqrt Fp", "energy out");
    for sigma in [0.004, 0.008, 0.02, 0.04, 0.06] {
        let input = Pulse::gaussian(sigma * g0, 1.0, 2048)?;
        let out = transmit_pulse_freq(&input, &params, 4.0, 3.0)?;
        let fp = pulse_fidelity(&input, &out.output)?;
        println!("{sigma:>10} {fp:>8.4} {:>8.4} {:>12.4}", fp.sqrt(), out.energy_ratio);
    }
    Ok(())
}
