use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{RunPoint, ScenarioConfig, ScenarioKind, ScheduleKind};
use super::{ConfigError, ScenarioError};
use crate::adiabatic::{adiabatic_limit_evolution, analytic_fidelity, f_integral, fs_bound};
use crate::csv::{fmt_f64, write_atomic, Table};
use crate::gaussian::{
    embed_initial, gaussian_fidelity, integrate, make_squeezed_coherent, reduce_to_mode, StepControl,
};
use crate::model::{CouplingSchedule, SystemParams};
use crate::pulse::{pulse_fidelity, Pulse};
use crate::transmission::{half_width, t31_resonant, transmit_pulse_freq, transmit_pulse_time, TransmissionSpectrum};
use crate::{Error, Result, C64};

/// Scalars reported for one run; `None` when the quantity is undefined at
/// that point (e.g. the perturbative expansion broke down).
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub index: usize,
    pub labels: Vec<(String, f64)>,
    pub values: Vec<(&'static str, Option<f64>)>,
}

impl RunSummary {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == name).and_then(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub kind: ScenarioKind,
    pub files: Vec<PathBuf>,
    pub runs: Vec<RunSummary>,
}

/// Resolved inputs of one run, in absolute units.
#[derive(Debug, Clone)]
pub struct RunInputs {
    pub params: SystemParams,
    pub schedule: CouplingSchedule,
    pub pulse: Option<Pulse>,
}

struct RunOutput {
    summary: RunSummary,
    files: Vec<(&'static str, String)>,
}

/// Applies `g_ref` and builds the model objects for one run.
pub fn resolve(config: &ScenarioConfig) -> std::result::Result<RunInputs, ConfigError> {
    let g = config.g_ref;
    let p = &config.params;
    let params = SystemParams {
        kappa1: p.kappa1 * g,
        kappa2: p.kappa2 * g,
        gamma_m: p.gamma_m * g,
        n_th: p.n_th,
        omega_m: p.omega_m.map(|w| w * g),
        detuning1: p.detuning1.map(|d| d * g),
        detuning2: p.detuning2.map(|d| d * g),
    };
    params.validate().map_err(|e| ConfigError::new(e.to_string()))?;
    if config.initial.r < 0.0 || config.initial.mech_occupation.is_some_and(|n| n < 0.0) {
        return Err(ConfigError::new("r and mech_occupation must be >= 0"));
    }

    let pulse = match config.pulse.sigma_omega {
        Some(sigma) if matches!(config.kind, ScenarioKind::Transmit | ScenarioKind::Engineer) => Some(
            Pulse::gaussian(sigma * g, config.pulse.amplitude, config.pulse.points)
                .map_err(|e| ConfigError::new(e.to_string()))?,
        ),
        _ => None,
    };

    let s = &config.schedule;
    let field = |v: Option<f64>| v.expect("presence checked at parse time");
    let duration = || match (s.duration, &pulse) {
        (Some(d), _) => d,
        (None, Some(p)) => p.t_end(),
        (None, None) => 1.0,
    };
    let schedule = match s.kind {
        ScheduleKind::Constant => CouplingSchedule::Constant { g1: field(s.g1), g2: field(s.g2), duration: duration() },
        ScheduleKind::Trig => CouplingSchedule::Trig { amplitude: field(s.amplitude), duration: duration() },
        ScheduleKind::Piecewise => CouplingSchedule::PiecewiseLinear { breakpoints: s.breakpoints.clone() },
        ScheduleKind::Tanh => CouplingSchedule::TanhRamp {
            g_max: field(s.g_max),
            center: field(s.center),
            width: field(s.width),
            duration: duration(),
        },
    };
    schedule.validate().map_err(|e| ConfigError::new(e.to_string()))?;
    if let (ScenarioKind::Engineer, Some(p)) = (config.kind, &pulse) {
        if (schedule.duration() - p.t_end()).abs() > 1e-9 * p.t_end() {
            return Err(ConfigError::new(format!(
                "schedule must end at the pulse window end t = {}, got {}",
                p.t_end(),
                schedule.duration()
            )));
        }
    }
    Ok(RunInputs { params, schedule, pulse })
}

fn constant_couplings(schedule: &CouplingSchedule) -> (f64, f64) {
    match schedule {
        CouplingSchedule::Constant { g1, g2, .. } => (*g1, *g2),
        _ => unreachable!("spectrum and transmit configs are checked to use constant schedules"),
    }
}

fn run_convert(config: &ScenarioConfig, inputs: &RunInputs) -> Result<RunOutput> {
    let (params, schedule) = (&inputs.params, &inputs.schedule);
    let init = &config.initial;
    let alpha = C64::new(init.alpha_re, init.alpha_im);
    let single = make_squeezed_coherent(alpha, init.r, init.phi)?;
    let state0 = embed_initial(&single, init.mech_occupation.unwrap_or(params.n_th))?;
    let control = StepControl { g_ref: config.g_ref, samples: config.samples, ..StepControl::default() };
    let t_end = schedule.duration();

    let trajectory = integrate(&state0, params, schedule, t_end, &control)?;
    let f_numeric = gaussian_fidelity(&single, &reduce_to_mode(trajectory.last(), 3)?)?;
    let limit = adiabatic_limit_evolution(&state0, params, schedule, t_end, &control)?;
    let f_limit = gaussian_fidelity(&single, &reduce_to_mode(&limit, 3)?)?;
    let analytic = match analytic_fidelity(alpha, init.r, init.phi, params, schedule, t_end) {
        Ok(report) => Some(report),
        Err(e @ Error::ExpansionBreakdown { .. }) => {
            log::warn!("analytic fidelity unavailable: {e}");
            None
        }
        Err(e) => return Err(e),
    };
    let f0t = f_integral(params, schedule, 0.0, t_end)?;
    let fs = fs_bound(params, schedule, t_end)?;

    let mut values = vec![
        ("F_numeric", Some(f_numeric)),
        ("F1_analytic", analytic.as_ref().map(|r| r.f1)),
        ("F_analytic", analytic.as_ref().map(|r| r.fidelity)),
        ("F2_analytic", analytic.as_ref().map(|r| r.f2)),
        ("F_adiabatic_limit", Some(f_limit)),
        ("f0T", Some(f0t)),
        ("fs", Some(fs)),
    ];
    if config.compare_noiseless {
        let quiet = SystemParams { gamma_m: 0.0, ..*params };
        let quiet_state0 = embed_initial(&single, init.mech_occupation.unwrap_or(params.n_th))?;
        let quiet_run = integrate(&quiet_state0, &quiet, schedule, t_end, &control)?;
        let f_quiet = gaussian_fidelity(&single, &reduce_to_mode(quiet_run.last(), 3)?)?;
        let quiet_limit = adiabatic_limit_evolution(&quiet_state0, &quiet, schedule, t_end, &control)?;
        let f_quiet_limit = gaussian_fidelity(&single, &reduce_to_mode(&quiet_limit, 3)?)?;
        values.push(("F_noiseless", Some(f_quiet)));
        values.push(("dF_noise", Some(f_quiet - f_numeric)));
        values.push(("dF_noise_adiabatic_limit", Some(f_quiet_limit - f_limit)));
        values.push(("dF_bound", Some(3.0 * fs * (2.0 * init.r).cosh())));
    }
    Ok(RunOutput {
        summary: RunSummary { index: 0, labels: Vec::new(), values },
        files: vec![("trajectory", trajectory.to_csv())],
    })
}

fn run_spectrum(config: &ScenarioConfig, inputs: &RunInputs) -> Result<RunOutput> {
    let (g1, g2) = constant_couplings(&inputs.schedule);
    let params = &inputs.params;
    let span = config.omega_span * config.g_ref;
    let spectrum = TransmissionSpectrum::uniform(params, g1, g2, -span, span, config.omega_points)?;
    let resonant = t31_resonant(params, g1, g2)?;
    let width = half_width(params, g1, g2)?;
    let values = vec![
        ("T31_0", Some(resonant.value)),
        ("optimal", Some(if resonant.optimal { 1.0 } else { 0.0 })),
        ("half_width_analytic", Some(width.analytic)),
        ("half_width_numeric", Some(width.numeric)),
    ];
    Ok(RunOutput {
        summary: RunSummary { index: 0, labels: Vec::new(), values },
        files: vec![("spectrum", spectrum.to_csv())],
    })
}

fn run_transmit(inputs: &RunInputs) -> Result<RunOutput> {
    let (g1, g2) = constant_couplings(&inputs.schedule);
    let params = &inputs.params;
    let p_in = inputs.pulse.as_ref().expect("transmit configs carry a pulse");
    let out = transmit_pulse_freq(p_in, params, g1, g2)?;
    let resonant = t31_resonant(params, g1, g2)?;
    let width = half_width(params, g1, g2)?;
    let values = vec![
        ("T31_0", Some(resonant.value)),
        ("half_width_analytic", Some(width.analytic)),
        ("half_width_numeric", Some(width.numeric)),
        ("Fp", Some(pulse_fidelity(p_in, &out.output)?)),
        ("energy_ratio", Some(out.energy_ratio)),
    ];
    Ok(RunOutput {
        summary: RunSummary { index: 0, labels: Vec::new(), values },
        files: vec![("pulse_in", p_in.to_csv()), ("pulse_out", out.output.to_csv())],
    })
}

fn run_engineer(inputs: &RunInputs) -> Result<RunOutput> {
    let p_in = inputs.pulse.as_ref().expect("engineer configs carry a pulse");
    let out = transmit_pulse_time(p_in, &inputs.params, &inputs.schedule)?;
    let values = vec![("Fp", Some(pulse_fidelity(p_in, &out)?)), ("energy_ratio", Some(out.energy() / p_in.energy()))];
    Ok(RunOutput {
        summary: RunSummary { index: 0, labels: Vec::new(), values },
        files: vec![("pulse_in", p_in.to_csv()), ("pulse_out", out.to_csv())],
    })
}

fn run_point(point: &RunPoint, inputs: &RunInputs) -> Result<RunOutput> {
    let config = &point.config;
    let mut out = match config.kind {
        ScenarioKind::Convert => run_convert(config, inputs),
        ScenarioKind::Spectrum => run_spectrum(config, inputs),
        ScenarioKind::Transmit => run_transmit(inputs),
        ScenarioKind::Engineer => run_engineer(inputs),
    }?;
    if let Some((name, v)) = out.summary.values.iter().find(|(_, v)| v.is_some_and(|x| !x.is_finite())) {
        return Err(Error::NonFinite { quantity: format!("{name} = {v:?}") });
    }
    out.summary.index = point.index;
    out.summary.labels = point.labels.clone();
    Ok(out)
}

fn describe(point: &RunPoint) -> String {
    if point.labels.is_empty() {
        return "single run".to_string();
    }
    point.labels.iter().map(|(k, v)| format!("{k}={}", fmt_f64(*v))).collect::<Vec<_>>().join(", ")
}

fn summary_csv(runs: &[RunSummary]) -> String {
    let first = &runs[0];
    let header = first.labels.iter().map(|(k, _)| k.as_str()).chain(first.values.iter().map(|(k, _)| *k));
    let mut table = Table::new(header);
    for run in runs {
        let cells = run
            .labels
            .iter()
            .map(|(_, v)| fmt_f64(*v))
            .chain(run.values.iter().map(|(_, v)| v.map(fmt_f64).unwrap_or_default()))
            .collect();
        table.push_row(cells);
    }
    table.render()
}

fn write(path: PathBuf, contents: &str) -> std::result::Result<PathBuf, ScenarioError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| ScenarioError::Io { path: dir.to_path_buf(), source })?;
    }
    write_atomic(&path, contents).map_err(|source| ScenarioError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Checks every sweep point without running anything; returns the plan.
pub fn validate_scenario(config: &ScenarioConfig) -> std::result::Result<Vec<(RunPoint, RunInputs)>, ConfigError> {
    config
        .plan()?
        .into_iter()
        .map(|point| {
            let inputs = resolve(&point.config)
                .map_err(|e| ConfigError::new(format!("run {} ({}): {}", point.index, describe(&point), e.message)))?;
            Ok((point, inputs))
        })
        .collect()
}

/// Runs every sweep point, in parallel on `jobs` threads (all cores when
/// `None`), then writes `<stem>_summary.csv` and the per-run CSVs under
/// `out_dir` in sweep order.
pub fn run_scenario(
    config: &ScenarioConfig,
    out_dir: &Path,
    jobs: Option<usize>,
) -> std::result::Result<RunArtifacts, ScenarioError> {
    let plan = validate_scenario(config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| ScenarioError::Config(ConfigError::new(e.to_string())))?;
    let results: Vec<Result<RunOutput>> =
        pool.install(|| plan.par_iter().map(|(point, inputs)| run_point(point, inputs)).collect());

    let mut outputs = Vec::with_capacity(results.len());
    for ((point, _), result) in plan.iter().zip(results) {
        let out =
            result.map_err(|source| ScenarioError::Numeric { index: point.index, point: describe(point), source })?;
        outputs.push(out);
    }

    let stem = out_dir.join(&config.output);
    let stem_name = stem.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let sibling = |suffix: String| stem.with_file_name(format!("{stem_name}_{suffix}.csv"));
    let runs: Vec<RunSummary> = outputs.iter().map(|o| o.summary.clone()).collect();
    let mut files = vec![write(sibling("summary".into()), &summary_csv(&runs))?];
    for out in &outputs {
        for (name, contents) in &out.files {
            files.push(write(sibling(format!("run{:03}_{name}", out.summary.index)), contents)?);
        }
    }
    Ok(RunArtifacts { kind: config.kind, files, runs })
}
