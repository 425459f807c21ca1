//! Physical parameters, coupling schedules and the dynamic matrix `M(t)`.
//!
//! The model works in the interaction picture with both cavities pumped on
//! the red sideband, so the linear dynamics of `v = (a1, b, a2)` is fully
//! described by
//!
//! ```text
//!        | -i k1/2    g1      0     |
//!   M =  |   g1    -i gm/2    g2    |
//!        |   0        g2   -i k2/2  |
//! ```
//!
//! together with the damping matrix `K = diag(k1, gm, k2)`.

use std::f64::consts::FRAC_PI_2;

use log::warn;

use crate::{Error, Mat3, Result, C64};

/// Damping rates and bath occupation of the three modes.
///
/// `omega_m` and the detunings are metadata only: they are checked for the
/// resolved-sideband, two-photon-resonant regime but never enter `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma_m: f64,
    pub n_th: f64,
    pub omega_m: Option<f64>,
    pub detuning1: Option<f64>,
    pub detuning2: Option<f64>,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::lossless()
    }
}

impl SystemParams {
    /// Builds and validates the parameter set without sideband metadata.
    pub fn new(kappa1: f64, kappa2: f64, gamma_m: f64, n_th: f64) -> Result<Self> {
        let params = Self { kappa1, kappa2, gamma_m, n_th, omega_m: None, detuning1: None, detuning2: None };
        params.validate()?;
        Ok(params)
    }

    /// All dampings zero, zero-temperature bath.
    pub fn lossless() -> Self {
        Self { kappa1: 0.0, kappa2: 0.0, gamma_m: 0.0, n_th: 0.0, omega_m: None, detuning1: None, detuning2: None }
    }

    /// Attaches the mechanical frequency and laser detunings and revalidates.
    pub fn with_sideband(mut self, omega_m: f64, detuning1: Option<f64>, detuning2: Option<f64>) -> Result<Self> {
        self.omega_m = Some(omega_m);
        self.detuning1 = detuning1;
        self.detuning2 = detuning2;
        self.validate()?;
        Ok(self)
    }

    /// Checks the invariants, logging a warning when the sideband is only
    /// marginally resolved. Returns the warnings that were emitted.
    pub fn validate(&self) -> Result<Vec<String>> {
        let rates = [("kappa1", self.kappa1), ("kappa2", self.kappa2), ("gamma_m", self.gamma_m), ("n_th", self.n_th)];
        for (name, value) in rates {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::param(name, format!("must be finite and >= 0, got {value}")));
            }
        }

        let mut warnings = Vec::new();
        if let Some(omega_m) = self.omega_m {
            if !omega_m.is_finite() || omega_m <= 0.0 {
                return Err(Error::param("omega_m", format!("must be > 0, got {omega_m}")));
            }
            for (name, value) in &rates[..3] {
                if *value >= omega_m {
                    return Err(Error::param(
                        name,
                        format!("{value} violates the resolved-sideband condition (< omega_m = {omega_m})"),
                    ));
                }
                if *value > omega_m / 10.0 {
                    let msg = format!("{name} = {value} is not well below omega_m = {omega_m}");
                    warn!("{msg}");
                    warnings.push(msg);
                }
            }
        }

        if self.detuning1.is_some() || self.detuning2.is_some() {
            let Some(omega_m) = self.omega_m else {
                return Err(Error::param("detuning1", "detunings require omega_m"));
            };
            for (name, detuning) in [("detuning1", self.detuning1), ("detuning2", self.detuning2)] {
                match detuning {
                    Some(d) if d == -omega_m => {}
                    Some(d) => {
                        return Err(Error::param(
                            name,
                            format!("{d} is off the red sideband (must equal -omega_m = {})", -omega_m),
                        ))
                    }
                    None => return Err(Error::param(name, "both detunings must be given")),
                }
            }
        }
        Ok(warnings)
    }

    /// Diagonal of `K = diag(k1, gm, k2)`.
    pub fn damping(&self) -> [f64; 3] {
        [self.kappa1, self.gamma_m, self.kappa2]
    }

    /// Diagonal of `sqrt(K)`.
    pub fn sqrt_damping(&self) -> [f64; 3] {
        self.damping().map(f64::sqrt)
    }

    pub fn max_rate(&self) -> f64 {
        self.kappa1.max(self.kappa2).max(self.gamma_m)
    }

    pub fn is_lossless(&self) -> bool {
        self.kappa1 == 0.0 && self.kappa2 == 0.0 && self.gamma_m == 0.0
    }
}

/// Instantaneous couplings and their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub g1: f64,
    pub g2: f64,
    pub dg1: f64,
    pub dg2: f64,
}

impl Coupling {
    /// `g0 = sqrt(g1^2 + g2^2)`.
    pub fn g0(&self) -> f64 {
        self.g1.hypot(self.g2)
    }

    /// Magnitude of the coupling velocity `|(dg1, dg2)|`.
    pub fn speed(&self) -> f64 {
        self.dg1.hypot(self.dg2)
    }
}

/// Breakpoint `(t, g1, g2)` of a piecewise-linear schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub t: f64,
    pub g1: f64,
    pub g2: f64,
}

/// Time dependence of the couplings on `[0, duration]`.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSchedule {
    Constant {
        g1: f64,
        g2: f64,
        duration: f64,
    },
    /// `g1 = A sin(pi t / 2T)`, `g2 = -A cos(pi t / 2T)`. With `A = 5` and
    /// `T = pi/2` this is `g1 = 5 sin t`, `g2 = -5 cos t`.
    Trig {
        amplitude: f64,
        duration: f64,
    },
    /// Linear interpolation between breakpoints; the first must sit at `t = 0`.
    PiecewiseLinear {
        breakpoints: Vec<Breakpoint>,
    },
    /// Smooth hand-over: `g1 = g_max s`, `g2 = -g_max (1 - s)` with
    /// `s = (1 + tanh((t - center)/width)) / 2`.
    TanhRamp {
        g_max: f64,
        center: f64,
        width: f64,
        duration: f64,
    },
}

impl CouplingSchedule {
    pub fn duration(&self) -> f64 {
        match self {
            Self::Constant { duration, .. } | Self::Trig { duration, .. } | Self::TanhRamp { duration, .. } => {
                *duration
            }
            Self::PiecewiseLinear { breakpoints } => breakpoints.last().map_or(0.0, |b| b.t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite, got {v}")))
            }
        };
        match self {
            Self::Constant { g1, g2, .. } => {
                finite("g1", *g1)?;
                finite("g2", *g2)?;
            }
            Self::Trig { amplitude, .. } => finite("amplitude", *amplitude)?,
            Self::TanhRamp { g_max, center, width, .. } => {
                finite("g_max", *g_max)?;
                finite("center", *center)?;
                if !(*width > 0.0) || !width.is_finite() {
                    return Err(Error::param("width", format!("must be > 0, got {width}")));
                }
            }
            Self::PiecewiseLinear { breakpoints } => {
                if breakpoints.len() < 2 {
                    return Err(Error::param("breakpoints", "need at least two breakpoints"));
                }
                if breakpoints[0].t != 0.0 {
                    return Err(Error::param("breakpoints", "first breakpoint must be at t = 0"));
                }
                for pair in breakpoints.windows(2) {
                    if !(pair[1].t > pair[0].t) {
                        return Err(Error::param("breakpoints", "times must strictly increase"));
                    }
                }
                for b in breakpoints {
                    finite("breakpoints", b.g1)?;
                    finite("breakpoints", b.g2)?;
                }
            }
        }
        let duration = self.duration();
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::param("duration", format!("must be > 0, got {duration}")));
        }
        Ok(())
    }

    /// Couplings and derivatives at `t`. Times within `1e-12 T` outside the
    /// domain are clamped to absorb rounding from time stepping.
    pub fn coupling_at(&self, t: f64) -> Result<Coupling> {
        let duration = self.duration();
        let slack = 1e-12 * duration.max(1.0);
        if !(t >= -slack && t <= duration + slack) {
            return Err(Error::Domain { t, duration });
        }
        let t = t.clamp(0.0, duration);

        let c = match self {
            Self::Constant { g1, g2, .. } => Coupling { g1: *g1, g2: *g2, dg1: 0.0, dg2: 0.0 },
            Self::Trig { amplitude, duration } => {
                let rate = FRAC_PI_2 / duration;
                let (s, c) = (rate * t).sin_cos();
                Coupling { g1: amplitude * s, g2: -amplitude * c, dg1: amplitude * rate * c, dg2: amplitude * rate * s }
            }
            Self::TanhRamp { g_max, center, width, .. } => {
                let th = ((t - center) / width).tanh();
                let s = 0.5 * (1.0 + th);
                let ds = 0.5 * (1.0 - th * th) / width;
                Coupling { g1: g_max * s, g2: -g_max * (1.0 - s), dg1: g_max * ds, dg2: g_max * ds }
            }
            Self::PiecewiseLinear { breakpoints } => {
                // segment index k such that t in [t_k, t_{k+1}); last segment closes at T
                let k = match breakpoints.iter().rposition(|b| b.t <= t) {
                    Some(k) if k + 1 < breakpoints.len() => k,
                    _ => breakpoints.len() - 2,
                };
                let (a, b) = (breakpoints[k], breakpoints[k + 1]);
                let dt = b.t - a.t;
                let (dg1, dg2) = ((b.g1 - a.g1) / dt, (b.g2 - a.g2) / dt);
                Coupling { g1: a.g1 + dg1 * (t - a.t), g2: a.g2 + dg2 * (t - a.t), dg1, dg2 }
            }
        };
        Ok(c)
    }

    /// Largest coupling magnitude over the schedule (sampled for smooth variants).
    pub fn max_coupling(&self) -> f64 {
        match self {
            Self::Constant { g1, g2, .. } => g1.abs().max(g2.abs()),
            Self::Trig { amplitude, .. } => amplitude.abs(),
            Self::TanhRamp { g_max, .. } => g_max.abs(),
            Self::PiecewiseLinear { breakpoints } => {
                breakpoints.iter().map(|b| b.g1.abs().max(b.g2.abs())).fold(0.0, f64::max)
            }
        }
    }

    /// Uniform grid of `n` interior points of `(0, T)`.
    pub fn interior_grid(&self, n: usize) -> impl Iterator<Item = f64> {
        let duration = self.duration();
        (1..=n).map(move |k| duration * k as f64 / (n + 1) as f64)
    }
}

/// Maximum of `|dg/dt| / g0^2` over `n_samples` interior points, where
/// `|dg/dt|` is the Euclidean norm of `(dg1/dt, dg2/dt)`.
pub fn adiabaticity(schedule: &CouplingSchedule, n_samples: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for t in schedule.interior_grid(n_samples) {
        let c = schedule.coupling_at(t)?;
        let g0 = c.g0();
        if g0 == 0.0 {
            return Err(Error::VanishingCoupling { t });
        }
        worst = worst.max(c.speed() / (g0 * g0));
    }
    Ok(worst)
}

/// `M` evaluated at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicMatrix {
    pub entries: Mat3,
    pub time: f64,
}

impl DynamicMatrix {
    /// Builds `M` from the schedule at time `t`.
    pub fn at(params: &SystemParams, schedule: &CouplingSchedule, t: f64) -> Result<Self> {
        let c = schedule.coupling_at(t)?;
        let mut m = build_dynamic_matrix(params, c.g1, c.g2);
        m.time = t;
        Ok(m)
    }

    /// Frobenius norm, used as the scale for residual tolerances.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn g1(&self) -> f64 {
        self.entries[(0, 1)].re
    }

    pub fn g2(&self) -> f64 {
        self.entries[(1, 2)].re
    }
}

/// `M` for fixed couplings; `time` is tagged as zero.
pub fn build_dynamic_matrix(params: &SystemParams, g1: f64, g2: f64) -> DynamicMatrix {
    let [k1, gm, k2] = params.damping();
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    #[rustfmt::skip]
    let entries = Mat3::new(
        im(-k1 / 2.0), re(g1),       z,
        re(g1),        im(-gm / 2.0), re(g2),
        z,             re(g2),       im(-k2 / 2.0),
    );
    DynamicMatrix { entries, time: 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lossless_matrix_is_real_symmetric() {
        let m = build_dynamic_matrix(&SystemParams::lossless(), 3.0, 4.0).entries;
        for i in 0..3 {
            assert_eq!(m[(i, i)], C64::new(0.0, 0.0));
        }
        assert_eq!(m[(0, 1)], C64::new(3.0, 0.0));
        assert_eq!(m[(1, 0)], C64::new(3.0, 0.0));
        assert_eq!(m[(1, 2)], C64::new(4.0, 0.0));
        assert_eq!(m[(2, 1)], C64::new(4.0, 0.0));
    }

    #[test]
    fn fig2_damped_diagonal() {
        let p = SystemParams::new(0.096, 0.054, 0.0002, 0.0).unwrap();
        let m = build_dynamic_matrix(&p, 4.0, 3.0).entries;
        assert!(close(m[(0, 0)].im, -0.048, 1e-15));
        assert!(close(m[(1, 1)].im, -0.0001, 1e-15));
        assert!(close(m[(2, 2)].im, -0.027, 1e-15));
        assert_eq!(m[(0, 1)].re, 4.0);
        assert_eq!(m[(1, 2)].re, 3.0);
        assert_eq!(p.sqrt_damping()[0], 0.096_f64.sqrt());
    }

    #[test]
    fn trig_endpoints() {
        let s = CouplingSchedule::Trig { amplitude: 5.0, duration: PI / 2.0 };
        let c = s.coupling_at(0.0).unwrap();
        assert!(close(c.g1, 0.0, 1e-14) && close(c.g2, -5.0, 1e-14));
        assert!(close(c.dg1, 5.0, 1e-14) && close(c.dg2, 0.0, 1e-14));
        let c = s.coupling_at(PI / 2.0).unwrap();
        assert!(close(c.g1, 5.0, 1e-14) && close(c.g2, 0.0, 1e-14));
        assert!(close(c.dg1, 0.0, 1e-14) && close(c.dg2, 5.0, 1e-14));
    }

    #[test]
    fn constant_schedule_has_no_derivative() {
        let s = CouplingSchedule::Constant { g1: 4.0, g2: 3.0, duration: 10.0 };
        for t in [0.0, 2.5, 10.0] {
            assert_eq!(s.coupling_at(t).unwrap(), Coupling { g1: 4.0, g2: 3.0, dg1: 0.0, dg2: 0.0 });
        }
    }

    #[test]
    fn out_of_domain_time_is_rejected() {
        let s = CouplingSchedule::Trig { amplitude: 5.0, duration: 1.0 };
        assert!(matches!(s.coupling_at(1.1), Err(Error::Domain { .. })));
        assert!(matches!(s.coupling_at(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn piecewise_uses_one_sided_slope_at_breakpoints() {
        let s = CouplingSchedule::PiecewiseLinear {
            breakpoints: vec![
                Breakpoint { t: 0.0, g1: 0.0, g2: -2.0 },
                Breakpoint { t: 1.0, g1: 1.0, g2: -2.0 },
                Breakpoint { t: 3.0, g1: 1.0, g2: 0.0 },
            ],
        };
        s.validate().unwrap();
        let at = |t| s.coupling_at(t).unwrap();
        assert_eq!((at(0.5).g1, at(0.5).dg1), (0.5, 1.0));
        // breakpoint at t = 1 takes the right-hand segment
        assert_eq!((at(1.0).dg1, at(1.0).dg2), (0.0, 1.0));
        // the final time takes the left-hand segment
        assert_eq!((at(3.0).g2, at(3.0).dg2), (0.0, 1.0));
    }

    #[test]
    fn adiabaticity_examples() {
        let fig1 = CouplingSchedule::Trig { amplitude: 5.0, duration: PI / 2.0 };
        assert!(close(adiabaticity(&fig1, 101).unwrap(), 0.2, 1e-12));
        let strong = CouplingSchedule::Trig { amplitude: 50.0, duration: PI / 2.0 };
        assert!(close(adiabaticity(&strong, 101).unwrap(), 0.02, 1e-13));
        let constant = CouplingSchedule::Constant { g1: 4.0, g2: 3.0, duration: 1.0 };
        assert_eq!(adiabaticity(&constant, 101).unwrap(), 0.0);
    }

    #[test]
    fn adiabaticity_reports_vanishing_coupling() {
        let s = CouplingSchedule::PiecewiseLinear {
            breakpoints: vec![
                Breakpoint { t: 0.0, g1: 0.0, g2: -1.0 },
                Breakpoint { t: 1.0, g1: 0.0, g2: 0.0 },
                Breakpoint { t: 2.0, g1: 1.0, g2: 0.0 },
            ],
        };
        assert!(matches!(adiabaticity(&s, 3), Err(Error::VanishingCoupling { t }) if t == 1.0));
    }

    #[test]
    fn sideband_validation() {
        let p = SystemParams::new(0.1, 0.1, 0.01, 10.0).unwrap();
        assert!(p.with_sideband(10.0, Some(-10.0), Some(-10.0)).is_ok());
        assert!(p.with_sideband(0.05, None, None).is_err());
        let warned = p.with_sideband(0.5, None, None).unwrap().validate().unwrap();
        assert_eq!(warned.len(), 2);
        assert!(p.with_sideband(10.0, Some(-10.0), Some(-9.0)).is_err());
        assert!(p.with_sideband(10.0, Some(-10.0), None).is_err());
        assert!(SystemParams::new(-0.1, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(0.0, 0.0, 0.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn matrix_structure(k1 in 0.0..2.0f64, k2 in 0.0..2.0f64, gm in 0.0..2.0f64,
                            g1 in -10.0..10.0f64, g2 in -10.0..10.0f64) {
            let p = SystemParams::new(k1, k2, gm, 0.0).unwrap();
            let m = build_dynamic_matrix(&p, g1, g2).entries;
            prop_assert_eq!(m, m.transpose());
            prop_assert_eq!(m[(0, 2)], C64::new(0.0, 0.0));
            prop_assert_eq!(m[(2, 0)], C64::new(0.0, 0.0));
            let expected = [k1, gm, k2];
            for i in 0..3 {
                prop_assert_eq!(m[(i, i)].re, 0.0);
                prop_assert_eq!(m[(i, i)].im, -expected[i] / 2.0);
                for j in 0..3 {
                    if i != j {
                        prop_assert_eq!(m[(i, j)].im, 0.0);
                    }
                }
            }
        }

        #[test]
        fn smooth_derivatives_match_central_differences(
            t_frac in 0.01..0.99f64, amp in 0.5..20.0f64, dur in 0.5..20.0f64,
        ) {
            let h = 1e-6 * dur;
            for s in [
                CouplingSchedule::Trig { amplitude: amp, duration: dur },
                CouplingSchedule::TanhRamp { g_max: amp, center: dur / 2.0, width: dur / 6.0, duration: dur },
            ] {
                let t = t_frac * dur;
                let c = s.coupling_at(t).unwrap();
                let (lo, hi) = (s.coupling_at(t - h).unwrap(), s.coupling_at(t + h).unwrap());
                prop_assert!(((hi.g1 - lo.g1) / (2.0 * h) - c.dg1).abs() <= 1e-6 * amp);
                prop_assert!(((hi.g2 - lo.g2) / (2.0 * h) - c.dg2).abs() <= 1e-6 * amp);
            }
        }

        #[test]
        fn trig_adiabaticity_closed_form(amp in 0.5..50.0f64, dur in 0.2..20.0f64) {
            let s = CouplingSchedule::Trig { amplitude: amp, duration: dur };
            let expected = (FRAC_PI_2 / dur) / amp;
            let got = adiabaticity(&s, 257).unwrap();
            prop_assert!((got - expected).abs() <= 1e-12 * expected);
        }
    }
}
