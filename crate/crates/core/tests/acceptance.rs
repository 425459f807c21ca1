//! Acceptance criteria, one PASS/FAIL line each, followed by indented
//! diagnostics. Exits non-zero when any criterion fails.

use std::time::Instant;

use optomech::adiabatic::{adiabatic_limit_evolution, analytic_fidelity, fs_bound};
use optomech::gaussian::{
    embed_initial, fock_oracle_fidelity, gaussian_fidelity, integrate, make_squeezed_coherent, reduce_to_mode,
    suggested_cutoff, SingleModeGaussian, StepControl,
};
use optomech::model::build_dynamic_matrix;
use optomech::pulse::{pulse_fidelity, Pulse};
use optomech::spectral::{dark_mode_exact, dark_mode_perturbative, eigensystem, ray_distance};
use optomech::transmission::{
    half_width, relative_l2, t31_resonant, transmission_matrix, transmit_pulse_freq, transmit_pulse_time,
};
use optomech::{CouplingSchedule, SystemParams, C64};
use rand::{Rng, SeedableRng};

const G0: f64 = 5.0;
const PAIRS: [(f64, f64); 4] = [(0.096, 0.054), (0.064, 0.036), (0.032, 0.018), (0.0192, 0.032)];

/// Damping pair given as ratios to `g0 = 5`, with `gamma_m = 2e-4 g0`.
fn fig2(k1: f64, k2: f64) -> SystemParams {
    SystemParams::new(k1 * G0, k2 * G0, 2e-4 * G0, 0.0).unwrap()
}

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

fn criterion(id: usize, name: &str, limit_s: f64, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let secs = start.elapsed().as_secs_f64();
    let pass = out.pass && secs < limit_s;
    println!(
        "{} criterion {id} {name}: {} [{secs:.2} s, limit {limit_s} s]",
        if pass { "PASS" } else { "FAIL" },
        out.summary
    );
    for note in out.notes {
        println!("    {note}");
    }
    pass
}

fn pulse_fidelity_reproduction() -> Outcome {
    let mut notes = Vec::new();
    let mut fp = Vec::new();
    for (k1, k2) in [(0.064, 0.032), (0.064, 0.036)] {
        for sigma in [0.008, 0.04] {
            let pulse = Pulse::gaussian(sigma * G0, 1.0, 2048).unwrap();
            let out = transmit_pulse_freq(&pulse, &fig2(k1, k2), 4.0, 3.0).unwrap();
            let f = pulse_fidelity(&pulse, &out.output).unwrap();
            notes.push(format!("kappa/g0 = ({k1}, {k2}), sigma/g0 = {sigma}: Fp = {f:.4}, sqrt(Fp) = {:.4}", f.sqrt()));
            if k2 == 0.032 {
                fp.push(f);
            }
        }
    }
    let pass = (fp[0] - 0.97).abs() <= 0.02 && (fp[1] - 0.77).abs() <= 0.03;
    Outcome {
        pass,
        summary: format!("Fp = {:.4} (target 0.97 +- 0.02), {:.4} (target 0.77 +- 0.03)", fp[0], fp[1]),
        notes,
    }
}

fn resonant_transmission() -> Outcome {
    let res = t31_resonant(&fig2(0.064, 0.036), 4.0, 3.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (k1, k2) in PAIRS {
        let p = fig2(k1, k2);
        let closed = t31_resonant(&p, 4.0, 3.0).unwrap().value;
        let inverse = transmission_matrix(&p, 4.0, 3.0, 0.0).unwrap()[(2, 0)].norm();
        let rel = (inverse - closed).abs() / closed;
        worst = worst.max(rel);
        notes.push(format!("({k1}, {k2}): T31(0) = {closed:.9}, matrix inverse relative error {rel:.2e}"));
    }
    let pass = res.optimal && (res.value - 1.0).abs() <= 1e-5 && worst <= 1e-12;
    Outcome {
        pass,
        summary: format!(
            "T31(0) at (0.064, 0.036) = {:.8}, optimal = {}, worst closed-form mismatch {worst:.2e}",
            res.value, res.optimal
        ),
        notes,
    }
}

fn half_width_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (k1, k2) in PAIRS {
        let hw = half_width(&fig2(k1, k2), 4.0, 3.0).unwrap();
        let rel = (hw.numeric - hw.analytic).abs() / hw.analytic;
        worst = worst.max(rel);
        notes.push(format!(
            "({k1}, {k2}): analytic {:.5} g0, numeric {:.5} g0, relative {rel:.3}",
            hw.analytic / G0,
            hw.numeric / G0
        ));
    }
    let text = half_width(&fig2(0.064, 0.032), 4.0, 3.0).unwrap().analytic / G0;
    let quoted = (text - 0.04).abs() / 0.04;
    let pass = worst <= 0.05 && (text - 0.0377).abs() < 5e-5 && quoted <= 0.07;
    Outcome {
        pass,
        summary: format!(
            "worst numeric/analytic mismatch {worst:.4} (limit 0.05); (0.064, 0.032) analytic {text:.5} g0, {quoted:.3} from 0.04"
        ),
        notes,
    }
}

fn fig1(kappa1: f64, gamma_m: f64, n_th: f64) -> SystemParams {
    SystemParams::new(kappa1, 0.0, gamma_m, n_th).unwrap()
}

fn final_fidelity(single: &SingleModeGaussian, params: &SystemParams, schedule: &CouplingSchedule) -> (f64, f64) {
    let state0 = embed_initial(single, params.n_th).unwrap();
    let t = schedule.duration();
    let control = StepControl::default();
    let numeric = integrate(&state0, params, schedule, t, &control).unwrap();
    let limit = adiabatic_limit_evolution(&state0, params, schedule, t, &control).unwrap();
    (
        gaussian_fidelity(single, &reduce_to_mode(numeric.last(), 3).unwrap()).unwrap(),
        gaussian_fidelity(single, &reduce_to_mode(&limit, 3).unwrap()).unwrap(),
    )
}

fn adiabatic_conversion() -> Outcome {
    let schedule = CouplingSchedule::Trig { amplitude: 5.0, duration: std::f64::consts::FRAC_PI_2 };
    let alpha = C64::new(1.0, 0.0);
    let coherent = make_squeezed_coherent(alpha, 0.0, 0.0).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    let mut worst_margin = f64::NEG_INFINITY;
    for kappa1 in [0.05, 0.1, 0.2, 0.5] {
        let params = fig1(kappa1, 0.0, 0.0);
        let report = analytic_fidelity(alpha, 0.0, 0.0, &params, &schedule, schedule.duration()).unwrap();
        let (numeric, limit) = final_fidelity(&coherent, &params, &schedule);
        let tol = 2.0 * report.f0t * report.f0t;
        let err = (numeric - report.fidelity).abs();
        pass &= err <= tol;
        worst_margin = worst_margin.max(err - tol);
        notes.push(format!(
            "kappa1 = {kappa1}: F_numeric = {numeric:.6}, F1 F2 = {:.6}, |diff| = {err:.2e}, tol 2 f^2 = {tol:.2e}; \
             adiabatic limit {limit:.6} (|diff| {:.2e})",
            report.fidelity,
            (limit - report.fidelity).abs()
        ));
    }
    let slow = CouplingSchedule::Trig { amplitude: 5.0, duration: 10.0 * std::f64::consts::FRAC_PI_2 };
    let (slow_f, _) = final_fidelity(&coherent, &fig1(0.0, 0.0, 0.0), &slow);
    pass &= 1.0 - slow_f < 1e-3;
    notes.push(format!("zero damping, T x 10: infidelity {:.2e} (limit 1e-3)", 1.0 - slow_f));
    Outcome {
        pass,
        summary: format!(
            "largest excess over 2 f(0,T)^2: {worst_margin:.2e}; slow-schedule infidelity {:.2e}",
            1.0 - slow_f
        ),
        notes,
    }
}

fn thermal_noise_immunity() -> Outcome {
    let schedule = CouplingSchedule::Trig { amplitude: 5.0, duration: std::f64::consts::FRAC_PI_2 };
    let t = schedule.duration();
    let mut pass = true;
    let mut violations = 0;
    let mut notes = Vec::new();
    for r in [0.0, 0.4] {
        let single = make_squeezed_coherent(C64::new(1.0, 0.0), r, 0.0).unwrap();
        for step in 0..=10 {
            let kappa1 = step as f64 / 10.0;
            let hot = fig1(kappa1, 2e-4, 100.0);
            let quiet = fig1(kappa1, 0.0, 100.0);
            let bound = 3.0 * fs_bound(&hot, &schedule, t).unwrap() * (2.0 * r).cosh();
            let (f_hot, l_hot) = final_fidelity(&single, &hot, &schedule);
            let (f_quiet, l_quiet) = final_fidelity(&single, &quiet, &schedule);
            let df = (f_quiet - f_hot).abs();
            let ok = df <= bound;
            if !ok {
                violations += 1;
            }
            pass &= ok;
            notes.push(format!(
                "r = {r}, kappa1 = {kappa1:.1}: dF = {df:.3e}, bound = {bound:.3e} {}; adiabatic-limit dF = {:.3e}",
                if ok { "ok" } else { "exceeded" },
                (l_quiet - l_hot).abs()
            ));
        }
    }
    let at_one = 3.0 * fs_bound(&fig1(1.0, 2e-4, 100.0), &schedule, t).unwrap();
    let bound_ok = (at_one - 4.7e-4).abs() / 4.7e-4 < 0.02;
    pass &= bound_ok;
    Outcome {
        pass,
        summary: format!(
            "{violations} of 22 points exceed 3 fs cosh(2r); 3 fs at kappa1 = 1 is {at_one:.3e} (expected ~4.7e-4)"
        ),
        notes,
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut pick = || {
            let alpha = C64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let r: f64 = rng.gen_range(0.0..0.8);
            let phi = rng.gen_range(0.0..std::f64::consts::PI);
            let n_max = ((3.5 / (2.0 * r).cosh()) - 0.5).max(0.0);
            let n_th = rng.gen_range(0.0..=n_max.min(1.5));
            SingleModeGaussian::squeezed_thermal(alpha, r, phi, n_th).unwrap()
        };
        let (a, b) = (pick(), pick());
        let cutoff = suggested_cutoff(&a).max(suggested_cutoff(&b));
        let diff = (gaussian_fidelity(&a, &b).unwrap() - fock_oracle_fidelity(&a, &b, cutoff).unwrap()).abs();
        worst = worst.max(diff);
    }
    Outcome { pass: worst < 1e-6, summary: format!("largest difference over 50 pairs {worst:.2e}"), notes: Vec::new() }
}

fn spectral_properties() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let mut worst_zero: f64 = 0.0;
    for (g1, g2) in [(4.0, 3.0), (5.0, 0.1), (0.3, -5.0), (3.0, -4.0)] {
        let g0 = f64::hypot(g1, g2);
        let es = eigensystem(&build_dynamic_matrix(&SystemParams::lossless(), g1, g2)).unwrap();
        for (v, want) in es.values.iter().zip([-g0, 0.0, g0]) {
            worst_zero = worst_zero.max((v - C64::new(want, 0.0)).norm() / g0);
        }
    }
    pass &= worst_zero <= 1e-12;
    notes.push(format!("zero damping: eigenvalue error {worst_zero:.2e} g0 (limit 1e-12 g0)"));

    let (g1, g2) = (4.0, 3.0);
    let mut worst_ratio: f64 = 0.0;
    for ratio in [0.01, 0.02, 0.05, 0.1] {
        let params = SystemParams::new(ratio * G0, 0.4 * ratio * G0, 0.1 * ratio * G0, 0.0).unwrap();
        let exact = dark_mode_exact(&build_dynamic_matrix(&params, g1, g2)).unwrap();
        let approx = dark_mode_perturbative(&params, g1, g2).unwrap();
        let scale = 5.0 * ratio * ratio;
        let dl = (exact.lambda - approx.lambda).norm();
        let dv = ray_distance(&exact.vector, &approx.vector);
        pass &= dl < scale * G0 && dv < scale;
        worst_ratio = worst_ratio.max(dl / (scale * G0)).max(dv / scale);
        notes.push(format!(
            "kappa/g0 = {ratio}: |d lambda| = {dl:.2e} (limit {:.2e}), |d psi| = {dv:.2e} (limit {scale:.2e})",
            scale * G0
        ));
    }
    Outcome {
        pass,
        summary: format!(
            "eigenvalue error {worst_zero:.2e} g0; perturbative error at most {worst_ratio:.3} of the 5 (kappa/g0)^2 budget"
        ),
        notes,
    }
}

fn cross_domain() -> Outcome {
    let params = fig2(0.064, 0.032);
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for sigma in [0.008, 0.04] {
        let pulse = Pulse::gaussian(sigma * G0, 1.0, 1024).unwrap();
        let freq = transmit_pulse_freq(&pulse, &params, 4.0, 3.0).unwrap().output;
        let schedule = CouplingSchedule::Constant { g1: 4.0, g2: 3.0, duration: pulse.t_end() };
        let time = transmit_pulse_time(&pulse, &params, &schedule).unwrap();
        let err = relative_l2(&time, &freq.resample(0.0, pulse.dt, pulse.len()).unwrap());
        worst = worst.max(err);
        notes.push(format!("sigma/g0 = {sigma}: relative L2 {err:.2e}"));
    }
    Outcome { pass: worst < 1e-3, summary: format!("largest relative L2 difference {worst:.2e} (limit 1e-3)"), notes }
}

fn main() {
    let results = [
        criterion(1, "pulse fidelity reproduction", 5.0, pulse_fidelity_reproduction),
        criterion(2, "resonant transmission and optimality", 1.0, resonant_transmission),
        criterion(3, "transmission half-width", 1.0, half_width_agreement),
        criterion(4, "adiabatic conversion", 30.0, adiabatic_conversion),
        criterion(5, "thermal-noise immunity", 60.0, thermal_noise_immunity),
        criterion(6, "Gaussian fidelity oracle equivalence", 60.0, oracle_equivalence),
        criterion(7, "spectral properties", 1.0, spectral_properties),
        criterion(8, "cross-domain consistency", 10.0, cross_domain),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("{passed} of {} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
