//! Closed-form Gaussian fidelity against a truncated Fock-basis computation.

use optomech::gaussian::{fock_oracle_fidelity, gaussian_fidelity, suggested_cutoff, SingleModeGaussian};
use optomech::C64;

fn main() -> optomech::Result<()> {
    let states = [
        ("vacuum", SingleModeGaussian::vacuum()),
        ("coherent 1+0.5i", SingleModeGaussian::coherent(C64::new(1.0, 0.5))),
        ("thermal 0.7", SingleModeGaussian::thermal(0.7)),
        ("squeezed r=0.4", SingleModeGaussian::squeezed_thermal(C64::new(1.0, 0.0), 0.4, 0.0, 0.0)?),
        ("sq. thermal", SingleModeGaussian::squeezed_thermal(C64::new(-0.5, 1.0), 0.6, 1.1, 0.3)?),
    ];
    for (i, (name_a, a)) in states.iter().enumerate() {
        for (name_b, b) in &states[i..] {
            let closed = gaussian_fidelity(a, b)?;
            let fock = fock_oracle_fidelity(a, b, suggested_cutoff(a).max(suggested_cutoff(b)))?;
            println!("{name_a:>16} | {name_b:<16} {closed:.10}  diff {:.1e}", (closed - fock).abs());
        }
    }
    Ok(())
}
