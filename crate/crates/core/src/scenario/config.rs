//! Line-based scenario configuration: `[section]` headers and `key = value`
//! pairs, `#` comments.
//!
//! ```text
//! [scenario]
//! kind = convert          # convert | spectrum | transmit | engineer
//! g_ref = 1               # scales [params], [pulse] and the spectrum grid
//!
//! [params]
//! kappa1 = 0.2
//!
//! [schedule]
//! kind = trig             # constant | trig | piecewise | tanh
//! amplitude = 5
//! duration = pi/2
//!
//! [sweep]
//! mode = grid             # zip | grid
//! params.kappa1 = 0, 0.1, 0.2
//! ```
//!
//! In grid mode a `zip = params.kappa1, params.kappa2` line makes the named
//! axes advance together as one grid dimension. A swept key counts as given.
//!
//! Numbers accept `pi` forms such as `pi/2`, `2*pi` or `0.5*pi/3`.

use std::collections::HashSet;
use std::fmt;

use crate::model::Breakpoint;

/// Parse or validation failure, with the offending line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub(crate) fn new(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// State conversion `a1 -> a2` under a time-dependent schedule.
    Convert,
    /// `T(w)` on a frequency grid.
    Spectrum,
    /// Gaussian pulse through constant couplings, by FFT.
    Transmit,
    /// Gaussian pulse through a time-dependent schedule, in the time domain.
    Engineer,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Convert => "convert",
            Self::Spectrum => "spectrum",
            Self::Transmit => "transmit",
            Self::Engineer => "engineer",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Convert, Self::Spectrum, Self::Transmit, Self::Engineer].into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Constant,
    Trig,
    Piecewise,
    Tanh,
}

impl ScheduleKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::Trig => "trig",
            Self::Piecewise => "piecewise",
            Self::Tanh => "tanh",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Constant, Self::Trig, Self::Piecewise, Self::Tanh].into_iter().find(|k| k.name() == s)
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Self::Constant => &["g1", "g2", "duration"],
            Self::Trig => &["amplitude", "duration"],
            Self::Piecewise => &["breakpoints"],
            Self::Tanh => &["g_max", "center", "width", "duration"],
        }
    }
}

/// Rates in units of `g_ref`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamsSpec {
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma_m: f64,
    pub n_th: f64,
    pub omega_m: Option<f64>,
    pub detuning1: Option<f64>,
    pub detuning2: Option<f64>,
}

/// Schedule values are absolute, not scaled by `g_ref`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub amplitude: Option<f64>,
    pub duration: Option<f64>,
    pub g_max: Option<f64>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub breakpoints: Vec<Breakpoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub r: f64,
    pub phi: f64,
    /// Defaults to `n_th`.
    pub mech_occupation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    /// In units of `g_ref`.
    pub sigma_omega: Option<f64>,
    pub amplitude: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Lists advance together.
    Zip,
    /// Cartesian product, first axis outermost; axes named in
    /// [`SweepSpec::linked`] form one dimension and advance together.
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub section: String,
    pub key: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub axes: Vec<SweepAxis>,
    /// `section.key` names from the `zip = ...` line.
    pub linked: Vec<String>,
}

impl SweepAxis {
    fn name(&self) -> String {
        format!("{}.{}", self.section, self.key)
    }
}

impl SweepSpec {
    /// Groups of axis indices that advance together, outermost first.
    fn dimensions(&self) -> Vec<Vec<usize>> {
        if self.mode == SweepMode::Zip {
            return vec![(0..self.axes.len()).collect()];
        }
        let mut dims: Vec<Vec<usize>> = Vec::new();
        let mut linked_dim: Option<usize> = None;
        for (i, axis) in self.axes.iter().enumerate() {
            if self.linked.contains(&axis.name()) {
                match linked_dim {
                    Some(d) => dims[d].push(i),
                    None => {
                        linked_dim = Some(dims.len());
                        dims.push(vec![i]);
                    }
                }
            } else {
                dims.push(vec![i]);
            }
        }
        dims
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub g_ref: f64,
    /// Spectrum grid `[-span, span] g_ref`.
    pub omega_span: f64,
    pub omega_points: usize,
    /// Convert: also run with `gamma_m = 0` and report the difference.
    pub compare_noiseless: bool,
    /// Recorded trajectory intervals.
    pub samples: usize,
    pub params: ParamsSpec,
    pub schedule: ScheduleSpec,
    pub initial: InitialSpec,
    pub pulse: PulseSpec,
    pub sweep: Option<SweepSpec>,
    /// Output stem, relative to the output directory.
    pub output: String,
}

/// One planned run: the sweep values applied to a copy of the config.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPoint {
    pub index: usize,
    pub labels: Vec<(String, f64)>,
    pub config: ScenarioConfig,
}

const SECTIONS: [&str; 7] = ["scenario", "params", "schedule", "initial", "pulse", "sweep", "output"];

fn parse_number(text: &str) -> Option<f64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    // [c*]pi[/d], optionally negated
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.as_str()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().ok()?)),
        None => (body, None),
    };
    let factor = match num.strip_suffix("pi")? {
        "" => 1.0,
        prefix => prefix.strip_suffix('*')?.parse::<f64>().ok()?,
    };
    let v = sign * factor * std::f64::consts::PI / den.unwrap_or(1.0);
    v.is_finite().then_some(v)
}

fn parse_list(text: &str) -> Option<Vec<f64>> {
    text.split(',').map(parse_number).collect()
}

fn parse_breakpoints(text: &str) -> Option<Vec<Breakpoint>> {
    text.split(',')
        .map(|item| {
            let parts: Vec<f64> = item.split(':').map(parse_number).collect::<Option<_>>()?;
            match parts[..] {
                [t, g1, g2] => Some(Breakpoint { t, g1, g2 }),
                _ => None,
            }
        })
        .collect()
}

fn unknown(key: &str, section: &str) -> String {
    format!("unknown key {key} in [{section}]")
}

impl ScenarioConfig {
    fn skeleton() -> Self {
        Self {
            kind: ScenarioKind::Convert,
            g_ref: 1.0,
            omega_span: 0.3,
            omega_points: 601,
            compare_noiseless: false,
            samples: 200,
            params: ParamsSpec {
                kappa1: 0.0,
                kappa2: 0.0,
                gamma_m: 0.0,
                n_th: 0.0,
                omega_m: None,
                detuning1: None,
                detuning2: None,
            },
            schedule: ScheduleSpec {
                kind: ScheduleKind::Constant,
                g1: None,
                g2: None,
                amplitude: None,
                duration: None,
                g_max: None,
                center: None,
                width: None,
                breakpoints: Vec::new(),
            },
            initial: InitialSpec { alpha_re: 0.0, alpha_im: 0.0, r: 0.0, phi: 0.0, mech_occupation: None },
            pulse: PulseSpec { sigma_omega: None, amplitude: 1.0, points: 1024 },
            sweep: None,
            output: String::new(),
        }
    }

    /// Sets a numeric field; the sweep uses the same entry point.
    pub fn set_number(&mut self, section: &str, key: &str, v: f64) -> Result<(), String> {
        let slot: &mut f64 = match (section, key) {
            ("scenario", "g_ref") => &mut self.g_ref,
            ("scenario", "omega_span") => &mut self.omega_span,
            ("params", "kappa1") => &mut self.params.kappa1,
            ("params", "kappa2") => &mut self.params.kappa2,
            ("params", "gamma_m") => &mut self.params.gamma_m,
            ("params", "n_th") => &mut self.params.n_th,
            ("params", "omega_m") => self.params.omega_m.insert(0.0),
            ("params", "detuning1") => self.params.detuning1.insert(0.0),
            ("params", "detuning2") => self.params.detuning2.insert(0.0),
            ("schedule", "g1") => self.schedule.g1.insert(0.0),
            ("schedule", "g2") => self.schedule.g2.insert(0.0),
            ("schedule", "amplitude") => self.schedule.amplitude.insert(0.0),
            ("schedule", "duration") => self.schedule.duration.insert(0.0),
            ("schedule", "g_max") => self.schedule.g_max.insert(0.0),
            ("schedule", "center") => self.schedule.center.insert(0.0),
            ("schedule", "width") => self.schedule.width.insert(0.0),
            ("initial", "alpha_re") => &mut self.initial.alpha_re,
            ("initial", "alpha_im") => &mut self.initial.alpha_im,
            ("initial", "r") => &mut self.initial.r,
            ("initial", "phi") => &mut self.initial.phi,
            ("initial", "mech_occupation") => self.initial.mech_occupation.insert(0.0),
            ("pulse", "sigma_omega") => self.pulse.sigma_omega.insert(0.0),
            ("pulse", "amplitude") => &mut self.pulse.amplitude,
            _ => return Err(unknown(key, section)),
        };
        *slot = v;
        Ok(())
    }

    /// Expands the sweep into runs, in order.
    pub fn plan(&self) -> Result<Vec<RunPoint>, ConfigError> {
        let Some(sweep) = &self.sweep else {
            let mut config = self.clone();
            config.sweep = None;
            return Ok(vec![RunPoint { index: 0, labels: Vec::new(), config }]);
        };
        let n_axes = sweep.axes.len();
        let combos: Vec<Vec<usize>> = sweep.dimensions().into_iter().fold(vec![vec![0; n_axes]], |acc, dim| {
            let len = sweep.axes[dim[0]].values.len();
            acc.into_iter()
                .flat_map(|prefix| {
                    let dim = dim.clone();
                    (0..len).map(move |i| {
                        let mut next = prefix.clone();
                        for &a in &dim {
                            next[a] = i;
                        }
                        next
                    })
                })
                .collect()
        });
        combos
            .into_iter()
            .enumerate()
            .map(|(index, combo)| {
                let mut config = self.clone();
                config.sweep = None;
                let mut labels = Vec::with_capacity(combo.len());
                for (axis, &i) in sweep.axes.iter().zip(&combo) {
                    let v = axis.values[i];
                    config.set_number(&axis.section, &axis.key, v).map_err(ConfigError::new)?;
                    labels.push((axis.key.clone(), v));
                }
                Ok(RunPoint { index, labels, config })
            })
            .collect()
    }

    /// Checks cross-field rules that do not depend on numerics.
    fn validate(&self, seen: &HashSet<(String, String)>) -> Result<(), ConfigError> {
        let swept = |s: &str, k: &str| {
            self.sweep.as_ref().is_some_and(|sw| sw.axes.iter().any(|a| a.section == s && a.key == k))
        };
        let has = |s: &str, k: &str| seen.contains(&(s.to_string(), k.to_string())) || swept(s, k);
        for (s, k) in [("scenario", "kind"), ("params", "kappa1"), ("schedule", "kind")] {
            if !has(s, k) {
                return Err(ConfigError::new(format!("missing required key {k} in [{s}]")));
            }
        }
        if !(self.g_ref > 0.0) {
            return Err(ConfigError::new("g_ref must be > 0"));
        }
        let allowed = self.schedule.kind.keys();
        let swept_keys = self.sweep.iter().flat_map(|sw| sw.axes.iter().map(|a| (&a.section, &a.key)));
        for (s, k) in seen.iter().map(|(s, k)| (s, k)).chain(swept_keys) {
            if s == "schedule" && k != "kind" && !allowed.contains(&k.as_str()) {
                return Err(ConfigError::new(format!(
                    "key {k} in [schedule] is not used by schedule kind {}",
                    self.schedule.kind.name()
                )));
            }
        }
        let needs = |k: &str| {
            let duration_optional =
                k == "duration" && self.schedule.kind == ScheduleKind::Constant && self.kind != ScenarioKind::Convert;
            if has("schedule", k) || duration_optional {
                Ok(())
            } else {
                Err(ConfigError::new(format!(
                    "missing required key {k} in [schedule] for kind {}",
                    self.schedule.kind.name()
                )))
            }
        };
        for k in allowed {
            needs(k)?;
        }
        let constant = self.schedule.kind == ScheduleKind::Constant;
        if matches!(self.kind, ScenarioKind::Spectrum | ScenarioKind::Transmit) && !constant {
            return Err(ConfigError::new(format!("scenario kind {} needs a constant schedule", self.kind.name())));
        }
        if matches!(self.kind, ScenarioKind::Transmit | ScenarioKind::Engineer) && !has("pulse", "sigma_omega") {
            return Err(ConfigError::new("missing required key sigma_omega in [pulse]"));
        }
        if self.omega_points < 2 || self.samples < 1 || self.pulse.points < 3 {
            return Err(ConfigError::new("omega_points >= 2, samples >= 1 and points >= 3 are required"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.axes.is_empty() {
                return Err(ConfigError::new("[sweep] lists no parameters"));
            }
            if !sweep.linked.is_empty() && sweep.mode == SweepMode::Zip {
                return Err(ConfigError::new("zip = ... in [sweep] needs mode = grid"));
            }
            if let Some(name) = sweep.linked.iter().find(|n| !sweep.axes.iter().any(|a| &a.name() == *n)) {
                return Err(ConfigError::new(format!("zip names {name}, which is not swept")));
            }
            for dim in sweep.dimensions() {
                let n = sweep.axes[dim[0]].values.len();
                if let Some(bad) = dim.iter().map(|&i| &sweep.axes[i]).find(|a| a.values.len() != n) {
                    return Err(ConfigError::new(format!(
                        "zipped sweep lists must have equal length: {} has {}, expected {n}",
                        bad.name(),
                        bad.values.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut config = ScenarioConfig::skeleton();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut section: Option<String> = None;
    let mut sweep_mode: Option<SweepMode> = None;
    let mut linked: Vec<String> = Vec::new();
    let mut axes: Vec<SweepAxis> = Vec::new();
    let mut output: Option<String> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::at(line, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected key = value, got {content:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section.as_deref() else {
            return Err(ConfigError::at(line, format!("key {key} appears before any [section]")));
        };
        if !seen.insert((sec.to_string(), key.to_string())) {
            return Err(ConfigError::at(line, format!("duplicate key {key} in [{sec}]")));
        }
        let number = || {
            parse_number(value).ok_or_else(|| ConfigError::at(line, format!("malformed number {value:?} for {key}")))
        };
        let count = || {
            value.parse::<usize>().map_err(|_| ConfigError::at(line, format!("malformed count {value:?} for {key}")))
        };
        match (sec, key) {
            ("scenario", "kind") => {
                config.kind = ScenarioKind::parse(value)
                    .ok_or_else(|| ConfigError::at(line, format!("unknown scenario kind {value:?}")))?;
            }
            ("scenario", "omega_points") => config.omega_points = count()?,
            ("scenario", "samples") => config.samples = count()?,
            ("scenario", "compare_noiseless") => {
                config.compare_noiseless = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(ConfigError::at(line, format!("expected true or false for {key}, got {value:?}"))),
                };
            }
            ("schedule", "kind") => {
                config.schedule.kind = ScheduleKind::parse(value)
                    .ok_or_else(|| ConfigError::at(line, format!("unknown schedule kind {value:?}")))?;
            }
            ("schedule", "breakpoints") => {
                config.schedule.breakpoints = parse_breakpoints(value).ok_or_else(|| {
                    ConfigError::at(line, format!("malformed breakpoints {value:?}, expected t:g1:g2, ..."))
                })?;
            }
            ("pulse", "points") => config.pulse.points = count()?,
            ("sweep", "mode") => {
                sweep_mode = Some(match value {
                    "zip" => SweepMode::Zip,
                    "grid" => SweepMode::Grid,
                    _ => return Err(ConfigError::at(line, format!("unknown sweep mode {value:?}"))),
                });
            }
            ("sweep", "zip") => linked = value.split(',').map(|n| n.trim().to_string()).collect(),
            ("sweep", target) => {
                let Some((s, k)) = target.split_once('.') else {
                    return Err(ConfigError::at(line, format!("sweep key {target} must be section.key")));
                };
                let values = parse_list(value)
                    .ok_or_else(|| ConfigError::at(line, format!("malformed number list {value:?} for {target}")))?;
                config.clone().set_number(s, k, 0.0).map_err(|m| ConfigError::at(line, m))?;
                axes.push(SweepAxis { section: s.to_string(), key: k.to_string(), values });
            }
            ("output", "path") => output = Some(value.to_string()),
            ("output", _) => return Err(ConfigError::at(line, unknown(key, sec))),
            _ => {
                let v = number()?;
                config.set_number(sec, key, v).map_err(|m| ConfigError::at(line, m))?;
            }
        }
    }
    if !axes.is_empty() || sweep_mode.is_some() || !linked.is_empty() {
        config.sweep = Some(SweepSpec { mode: sweep_mode.unwrap_or(SweepMode::Zip), axes, linked });
    }
    config.output = output.unwrap_or_else(|| config.kind.name().to_string());
    config.validate(&seen)?;
    Ok(config)
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `config` back in the file format; `parse_config` inverts it.
pub fn serialize_config(config: &ScenarioConfig) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line("[scenario]".into());
    line(format!("kind = {}", config.kind.name()));
    line(format!("g_ref = {}", num(config.g_ref)));
    line(format!("omega_span = {}", num(config.omega_span)));
    line(format!("omega_points = {}", config.omega_points));
    line(format!("compare_noiseless = {}", config.compare_noiseless));
    line(format!("samples = {}", config.samples));

    let p = &config.params;
    line("\n[params]".into());
    for (k, v) in [("kappa1", p.kappa1), ("kappa2", p.kappa2), ("gamma_m", p.gamma_m), ("n_th", p.n_th)] {
        line(format!("{k} = {}", num(v)));
    }
    for (k, v) in [("omega_m", p.omega_m), ("detuning1", p.detuning1), ("detuning2", p.detuning2)] {
        if let Some(v) = v {
            line(format!("{k} = {}", num(v)));
        }
    }

    let s = &config.schedule;
    line("\n[schedule]".into());
    line(format!("kind = {}", s.kind.name()));
    let fields = [
        ("g1", s.g1),
        ("g2", s.g2),
        ("amplitude", s.amplitude),
        ("duration", s.duration),
        ("g_max", s.g_max),
        ("center", s.center),
        ("width", s.width),
    ];
    for (k, v) in fields {
        if let Some(v) = v {
            line(format!("{k} = {}", num(v)));
        }
    }
    if !s.breakpoints.is_empty() {
        let items: Vec<String> =
            s.breakpoints.iter().map(|b| format!("{}:{}:{}", num(b.t), num(b.g1), num(b.g2))).collect();
        line(format!("breakpoints = {}", items.join(", ")));
    }

    let i = &config.initial;
    line("\n[initial]".into());
    for (k, v) in [("alpha_re", i.alpha_re), ("alpha_im", i.alpha_im), ("r", i.r), ("phi", i.phi)] {
        line(format!("{k} = {}", num(v)));
    }
    if let Some(v) = i.mech_occupation {
        line(format!("mech_occupation = {}", num(v)));
    }

    line("\n[pulse]".into());
    if let Some(v) = config.pulse.sigma_omega {
        line(format!("sigma_omega = {}", num(v)));
    }
    line(format!("amplitude = {}", num(config.pulse.amplitude)));
    line(format!("points = {}", config.pulse.points));

    if let Some(sweep) = &config.sweep {
        line("\n[sweep]".into());
        line(format!("mode = {}", if sweep.mode == SweepMode::Zip { "zip" } else { "grid" }));
        if !sweep.linked.is_empty() {
            line(format!("zip = {}", sweep.linked.join(", ")));
        }
        for axis in &sweep.axes {
            let values: Vec<String> = axis.values.iter().map(|v| num(*v)).collect();
            line(format!("{}.{} = {}", axis.section, axis.key, values.join(", ")));
        }
    }

    line("\n[output]".into());
    line(format!("path = {}", config.output));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "
[scenario]
kind = convert
[params]
kappa1 = 0.1
[schedule]
kind = trig
amplitude = 5
duration = pi/2
";

    #[test]
    fn minimal_convert_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.kind, ScenarioKind::Convert);
        assert_eq!((c.params.gamma_m, c.params.n_th, c.params.kappa2), (0.0, 0.0, 0.0));
        assert_eq!(c.initial.mech_occupation, None);
        assert_eq!(c.pulse.amplitude, 1.0);
        assert_eq!(c.schedule.duration, Some(std::f64::consts::FRAC_PI_2));
        assert_eq!(c.output, "convert");
        assert_eq!(c.plan().unwrap().len(), 1);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("kappa1 = 0.1", "kappa_one = 0.1");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.message, "unknown key kappa_one in [params]");
        assert_eq!(err.line, Some(5));
    }

    #[test]
    fn malformed_number_reports_line() {
        let text = MINIMAL.replace("amplitude = 5", "amplitude = 5x");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.line, Some(8));
        assert!(err.message.contains("malformed number"));
    }

    #[test]
    fn missing_and_misplaced_keys() {
        let err = parse_config(&MINIMAL.replace("kappa1 = 0.1", "")).unwrap_err();
        assert!(err.message.contains("missing required key kappa1"));
        let err = parse_config(&MINIMAL.replace("amplitude = 5", "")).unwrap_err();
        assert!(err.message.contains("amplitude"));
        let err = parse_config(&MINIMAL.replace("amplitude = 5", "amplitude = 5\ng1 = 1")).unwrap_err();
        assert!(err.message.contains("not used by schedule kind trig"));
        let err = parse_config(&format!("{MINIMAL}\n[pulse]\nwidth = 2\n")).unwrap_err();
        assert_eq!(err.message, "unknown key width in [pulse]");
        let err = parse_config("kind = convert").unwrap_err();
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn sweep_expansion() {
        let fig2 = "
[scenario]
kind = spectrum
g_ref = 5
[params]
kappa1 = 0.064
kappa2 = 0.036
gamma_m = 0.0002
[schedule]
kind = constant
g1 = 4
g2 = 3
[sweep]
mode = zip
params.kappa1 = 0.096, 0.064, 0.032, 0.0192
params.kappa2 = 0.054, 0.036, 0.018, 0.032
";
        let c = parse_config(fig2).unwrap();
        let runs = c.plan().unwrap();
        assert_eq!(runs.len(), 4);
        assert_eq!(runs[3].config.params.kappa1, 0.0192);
        assert_eq!(runs[3].labels, vec![("kappa1".to_string(), 0.0192), ("kappa2".to_string(), 0.032)]);

        let grid = fig2.replace("mode = zip", "mode = grid");
        assert_eq!(parse_config(&grid).unwrap().plan().unwrap().len(), 16);

        let bad = fig2.replace("0.054, 0.036, 0.018, 0.032", "0.054");
        assert!(parse_config(&bad).unwrap_err().message.contains("equal length"));
        let linked = format!(
            "{}pulse.sigma_omega = 0.008, 0.02, 0.04\n",
            grid.replace("mode = grid", "mode = grid\nzip = params.kappa1, params.kappa2")
        )
        .replace("kind = spectrum", "kind = transmit");
        let c = parse_config(&linked).unwrap();
        let runs = c.plan().unwrap();
        assert_eq!(runs.len(), 12);
        assert_eq!((runs[4].config.params.kappa1, runs[4].config.params.kappa2), (0.064, 0.036));
        assert_eq!(runs[4].config.pulse.sigma_omega, Some(0.02));
        assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
        let bad = fig2.replace("params.kappa2", "params.kappa3");
        assert_eq!(parse_config(&bad).unwrap_err().message, "unknown key kappa3 in [params]");
    }

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("pi"), Some(std::f64::consts::PI));
        assert_eq!(parse_number("-pi/2"), Some(-std::f64::consts::FRAC_PI_2));
        assert_eq!(parse_number("2*pi"), Some(2.0 * std::f64::consts::PI));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("pie"), None);
        assert_eq!(parse_number("nan"), None);
    }

    #[test]
    fn round_trip_of_a_full_config() {
        let text = "
[scenario]
kind = engineer
g_ref = 5
[params]
kappa1 = 0.064
kappa2 = 0.036
gamma_m = 2e-4
n_th = 10
omega_m = 100
detuning1 = -100
detuning2 = -100
[schedule]
kind = piecewise
breakpoints = 0:0:0, 100:4:3, 400:4:3
[initial]
mech_occupation = 3
[pulse]
sigma_omega = 0.008
points = 512
[output]
path = out/engineer
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.schedule.breakpoints.len(), 3);
        assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
    }

    proptest! {
        #[test]
        fn serialize_round_trips(k1 in 0.0..1.0f64, k2 in 0.0..1.0f64, amp in 0.1..10.0f64,
                                 dur in 0.1..10.0f64, r in 0.0..1.0f64, sweep in prop::collection::vec(0.0..1.0f64, 1..5)) {
            let c = parse_config(&format!(
                "[scenario]\nkind = convert\n[params]\nkappa1 = {k1}\nkappa2 = {k2}\n[schedule]\nkind = trig\namplitude = {amp}\nduration = {dur}\n[initial]\nr = {r}\n[sweep]\nparams.kappa1 = {}\n",
                sweep.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            )).unwrap();
            prop_assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
        }
    }
}
