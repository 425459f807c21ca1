//! Transmission from the input channel of `a1` to the output channel of
//! `a2` with constant couplings, and driven propagation of pulses.
//!
//! With fields `~ e^{-i w t}` the input-output relation gives
//!
//! ```text
//! T(w) = I - i sqrt(K) (w - M)^-1 sqrt(K)
//! ```
//!
//! and the transmitted amplitude is `a_out2(w) = T31(w) a_in1(w)`.

use rustfft::FftPlanner;

use crate::csv::{fmt_f64, Table};
use crate::model::{build_dynamic_matrix, CouplingSchedule, DynamicMatrix, SystemParams};
use crate::pulse::{pulse_fidelity, Pulse};
use crate::spectral::inverse;
use crate::{Error, Mat3, Result, Vec3, C64};

/// `T(w)` for constant couplings. Returns the identity when all dampings vanish.
pub fn transmission_matrix(params: &SystemParams, g1: f64, g2: f64, omega: f64) -> Result<Mat3> {
    if params.is_lossless() {
        return Ok(Mat3::identity());
    }
    let m = build_dynamic_matrix(params, g1, g2).entries;
    let resolvent = inverse(&(Mat3::identity() * C64::new(omega, 0.0) - m))
        .ok_or_else(|| Error::param("omega", format!("w - M is singular at w = {omega}")))?;
    let sk = Mat3::from_diagonal(&Vec3::from_iterator(params.sqrt_damping().map(|x| C64::new(x, 0.0))));
    Ok(Mat3::identity() - sk * resolvent * sk * C64::new(0.0, 1.0))
}

/// `T(w)` sampled on a sorted frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSpectrum {
    pub omegas: Vec<f64>,
    pub matrices: Vec<Mat3>,
}

impl TransmissionSpectrum {
    pub fn compute(params: &SystemParams, g1: f64, g2: f64, omegas: &[f64]) -> Result<Self> {
        if omegas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid("frequency grid must be strictly increasing".into()));
        }
        let matrices = omegas.iter().map(|&w| transmission_matrix(params, g1, g2, w)).collect::<Result<_>>()?;
        Ok(Self { omegas: omegas.to_vec(), matrices })
    }

    /// `n` evenly spaced points on `[lo, hi]`.
    pub fn uniform(params: &SystemParams, g1: f64, g2: f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Grid(format!("need n >= 2 and hi > lo, got n = {n}, [{lo}, {hi}]")));
        }
        let omegas: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
        Self::compute(params, g1, g2, &omegas)
    }

    pub fn t31_abs(&self) -> Vec<f64> {
        self.matrices.iter().map(|m| m[(2, 0)].norm()).collect()
    }

    /// Columns `omega`, `abs_T31`, then `re_Tjk, im_Tjk` for all nine
    /// entries (1-based).
    pub fn to_csv(&self) -> String {
        let mut header = vec!["omega".to_string(), "abs_T31".to_string()];
        for j in 1..=3 {
            for k in 1..=3 {
                header.push(format!("re_T{j}{k}"));
                header.push(format!("im_T{j}{k}"));
            }
        }
        let mut table = Table::new(header);
        for (w, m) in self.omegas.iter().zip(&self.matrices) {
            let mut row = vec![*w, m[(2, 0)].norm()];
            for j in 0..3 {
                for k in 0..3 {
                    row.extend([m[(j, k)].re, m[(j, k)].im]);
                }
            }
            table.push_values(row);
        }
        table.render()
    }
}

/// Closed-form `T31(0)` and whether `g1^2 k2 = g2^2 k1` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantTransmission {
    pub value: f64,
    pub optimal: bool,
}

/// `T31(0) = 8 g1 g2 sqrt(k1 k2) / (4 g1^2 k2 + 4 g2^2 k1 + gm k1 k2)`.
pub fn t31_resonant(params: &SystemParams, g1: f64, g2: f64) -> Result<ResonantTransmission> {
    let (k1, k2, gm) = (params.kappa1, params.kappa2, params.gamma_m);
    let denom = 4.0 * g1 * g1 * k2 + 4.0 * g2 * g2 * k1 + gm * k1 * k2;
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let (lhs, rhs) = (g1 * g1 * k2, g2 * g2 * k1);
    let optimal = (lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs());
    Ok(ResonantTransmission { value: 8.0 * g1 * g2 * (k1 * k2).sqrt() / denom, optimal })
}

/// Frequency offset where `|T31|` drops to half its resonant value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfWidth {
    /// `sqrt(3) (g1^2 k2 + g2^2 k1 + gm k1 k2 / 4) / (2 (g1^2 + g2^2))`.
    pub analytic: f64,
    /// Smallest crossing in `(0, g0/2]`, by bisection.
    pub numeric: f64,
}

pub fn half_width(params: &SystemParams, g1: f64, g2: f64) -> Result<HalfWidth> {
    let (k1, k2, gm) = (params.kappa1, params.kappa2, params.gamma_m);
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(Error::param("kappa", "half-width needs kappa1, kappa2 > 0"));
    }
    let g0sq = g1 * g1 + g2 * g2;
    if g0sq == 0.0 {
        return Err(Error::VanishingCoupling { t: f64::NAN });
    }
    let analytic = 3f64.sqrt() * (g1 * g1 * k2 + g2 * g2 * k1 + gm * k1 * k2 / 4.0) / (2.0 * g0sq);

    let t31 = |w: f64| transmission_matrix(params, g1, g2, w).map(|m| m[(2, 0)].norm());
    let target = t31(0.0)? / 2.0;
    let excess = |w: f64| t31(w).map(|v| v - target);
    let upper = 0.5 * g0sq.sqrt();
    let scan = 4000;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=scan {
        let w = upper * k as f64 / scan as f64;
        if excess(w)? <= 0.0 {
            hi = Some(w);
            break;
        }
        lo = w;
    }
    let mut hi = hi.ok_or(Error::NoCrossing { upper })?;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(HalfWidth { analytic, numeric: 0.5 * (lo + hi) })
}

/// Output pulse and `integral |out|^2 / integral |in|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTransmission {
    pub output: Pulse,
    pub energy_ratio: f64,
}

/// Filters `p_in` through `T31(w)` by FFT.
///
/// The input is zero-padded to the next power of two at least four times
/// its length; the output keeps the padded length so the delayed tail is
/// retained.
pub fn transmit_pulse_freq(p_in: &Pulse, params: &SystemParams, g1: f64, g2: f64) -> Result<PulseTransmission> {
    p_in.check_window()?;
    let n = (4 * p_in.len()).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    buf[..p_in.len()].copy_from_slice(&p_in.amplitudes);

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    // forward bin k carries e^{+i w_k t}, i.e. physical frequency -w_k
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * p_in.dt);
    for (k, z) in buf.iter_mut().enumerate() {
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        *z *= transmission_matrix(params, g1, g2, -signed * dw)?[(2, 0)];
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|z| *z *= scale);

    let output = Pulse::new(p_in.t0, p_in.dt, buf)?;
    let e_in = p_in.energy();
    let energy_ratio = if e_in > 0.0 { output.energy() / e_in } else { 0.0 };
    Ok(PulseTransmission { output, energy_ratio })
}

/// Drives the cavity means with `p_in` on the `a1` input channel under a
/// possibly time-dependent schedule and returns `<a_out2> = -sqrt(k2) <a2>`
/// on the input grid.
///
/// The schedule must span exactly the pulse window `[0, T]`.
pub fn transmit_pulse_time(p_in: &Pulse, params: &SystemParams, schedule: &CouplingSchedule) -> Result<Pulse> {
    let duration = schedule.duration();
    let tol = 1e-9 * duration.max(1.0);
    if p_in.t0.abs() > tol || (p_in.t_end() - duration).abs() > tol {
        return Err(Error::Grid(format!(
            "pulse spans [{}, {}] but the schedule spans [0, {}]",
            fmt_f64(p_in.t0),
            fmt_f64(p_in.t_end()),
            fmt_f64(duration)
        )));
    }
    let fastest = params.max_rate().max(schedule.max_coupling());
    let h_max = if fastest > 0.0 { 0.1 / fastest } else { p_in.dt };
    let sub = (p_in.dt / h_max).ceil().max(1.0) as usize;
    let h = p_in.dt / sub as f64;
    let sk = params.sqrt_damping();
    let i = C64::new(0.0, 1.0);

    let drive = |t: f64| Vec3::new(p_in.sample(t.min(p_in.t_end())) * sk[0], C64::default(), C64::default());
    let rhs = |m: &Mat3, t: f64, v: &Vec3| -(m * v) * i + drive(t);
    let at = |t: f64| DynamicMatrix::at(params, schedule, t.min(duration)).map(|m| m.entries);

    let mut v = Vec3::zeros();
    let mut out = Vec::with_capacity(p_in.len());
    out.push(-v[2] * sk[2]);
    let mut m_start = at(0.0)?;
    for k in 0..p_in.len() - 1 {
        for j in 0..sub {
            let t = p_in.time(k) + j as f64 * h;
            let m_mid = at(t + 0.5 * h)?;
            let m_end = at(t + h)?;
            let k1 = rhs(&m_start, t, &v);
            let k2 = rhs(&m_mid, t + 0.5 * h, &(v + k1 * C64::new(0.5 * h, 0.0)));
            let k3 = rhs(&m_mid, t + 0.5 * h, &(v + k2 * C64::new(0.5 * h, 0.0)));
            let k4 = rhs(&m_end, t + h, &(v + k3 * C64::new(h, 0.0)));
            v += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
            m_start = m_end;
        }
        out.push(-v[2] * sk[2]);
    }
    Pulse::new(p_in.t0, p_in.dt, out)
}

/// Key transmission figures for one parameter set and one gaussian input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionReport {
    pub t31_resonant: f64,
    pub half_width_analytic: f64,
    pub half_width_numeric: f64,
    pub pulse_fidelity: f64,
}

impl TransmissionReport {
    /// Evaluates all figures for a gaussian input of width `sigma_omega`
    /// sampled at `points` points.
    pub fn compute(params: &SystemParams, g1: f64, g2: f64, sigma_omega: f64, points: usize) -> Result<Self> {
        let hw = half_width(params, g1, g2)?;
        let p_in = Pulse::gaussian(sigma_omega, 1.0, points)?;
        let out = transmit_pulse_freq(&p_in, params, g1, g2)?;
        Ok(Self {
            t31_resonant: t31_resonant(params, g1, g2)?.value,
            half_width_analytic: hw.analytic,
            half_width_numeric: hw.numeric,
            pulse_fidelity: pulse_fidelity(&p_in, &out.output)?,
        })
    }
}

/// Relative L2 distance `|a - b| / |b|` on the grid of `b`.
pub fn relative_l2(a: &Pulse, b: &Pulse) -> f64 {
    let (mut diff, mut norm) = (0.0, 0.0);
    for (k, z) in b.amplitudes.iter().enumerate() {
        diff += (a.sample(b.time(k)) - z).norm_sqr();
        norm += z.norm_sqr();
    }
    if norm == 0.0 {
        return if diff == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (diff / norm).sqrt()
}
