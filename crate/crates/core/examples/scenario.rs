//! Drives a small sweep from a config string and prints the summary CSV.

use optomech::scenario::{parse_config, run_scenario, summary_lines};

const CONFIG: &str = "
[scenario]
kind = convert

[params]
kappa1 = 0.1

[schedule]
kind = trig
amplitude = 5
duration = pi/2

[initial]
alpha_re = 1

[sweep]
mode = grid
params.kappa1 = 0, 0.1, 0.2
initial.r = 0, 0.4

[output]
path = example/convert
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = parse_config(CONFIG)?;
    let out_dir = std::env::temp_dir().join("optomech-example");
    let artifacts = run_scenario(&config, &out_dir, None)?;
    for line in summary_lines(&artifacts) {
        println!("{line}");
    }
    println!("\n{}", std::fs::read_to_string(&artifacts.files[0])?);
    println!("{} files under {}", artifacts.files.len(), out_dir.display());
    Ok(())
}
