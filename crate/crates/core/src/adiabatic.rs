//! Closed-form results for conversion through the dark mode in the
//! adiabatic limit, and a moment integrator that enforces that limit.
//!
//! Following the dark mode, the `a1` amplitude arrives in `a2` damped by
//! `exp(-f(0,T))` with
//!
//! ```text
//! f(t,T) = integral_t^T (k2 g1^2 + k1 g2^2) / (2 g0^2) dt'
//! ```
//!
//! To first order in `f` the conversion fidelity factorizes as `F = F1 F2`,
//!
//! ```text
//! F1 = 1 - f (cosh 2r - 1) - fs cosh 2r
//! F2 = 1 - f^2 y(alpha, r) / 2,        y(alpha, 0) = 2 |alpha|^2
//! fs = gm (2 n_th + 1) T ((k1 - k2) / 4 g0)^2
//! ```

use log::warn;

use crate::gaussian::{StepControl, ThreeModeGaussianState};
use crate::model::{CouplingSchedule, DynamicMatrix, SystemParams};
use crate::quad::adaptive_simpson;
use crate::spectral::{eigensystem, inverse, match_modes};
use crate::{Error, Mat3, Result, Vec3, C64};

const QUAD_TOL: f64 = 1e-10;
const FS_GRID: usize = 1001;

/// First-order fidelity estimate for one conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferReport {
    /// Decay exponent `f(0,T)`.
    pub f0t: f64,
    /// Mechanical noise estimate `fs`.
    pub fs: f64,
    pub f1: f64,
    pub f2: f64,
    /// `F = F1 F2`.
    pub fidelity: f64,
    /// `<a2(T)> / <a1(0)> = exp(-f(0,T))`.
    pub mean_ratio: C64,
    /// `F2` used `y(alpha, 0)` although `r != 0`.
    pub f2_approximate: bool,
}

fn check_window(schedule: &CouplingSchedule, t: f64, t_end: f64) -> Result<()> {
    let duration = schedule.duration();
    let slack = 1e-12 * duration.max(1.0);
    if !(t_end <= duration + slack) || !(t_end > 0.0) {
        return Err(Error::Domain { t: t_end, duration });
    }
    if !(t >= -slack && t <= t_end) {
        return Err(Error::Domain { t, duration: t_end });
    }
    Ok(())
}

/// `f(t, t_end)` by adaptive Simpson quadrature.
///
/// `g0` may vanish at the endpoints only; there the integrand is taken a
/// hair inside the interval.
pub fn f_integral(params: &SystemParams, schedule: &CouplingSchedule, t: f64, t_end: f64) -> Result<f64> {
    check_window(schedule, t, t_end)?;
    if t == t_end || (params.kappa1 == 0.0 && params.kappa2 == 0.0) {
        return Ok(0.0);
    }
    let (k1, k2) = (params.kappa1, params.kappa2);
    let nudge = 1e-9 * (t_end - t);
    let integrand = |s: f64| -> Result<f64> {
        let mut c = schedule.coupling_at(s)?;
        if c.g0() == 0.0 {
            let inside = if s <= t {
                s + nudge
            } else if s >= t_end {
                s - nudge
            } else {
                s
            };
            if inside == s {
                return Err(Error::VanishingCoupling { t: s });
            }
            c = schedule.coupling_at(inside)?;
            if c.g0() == 0.0 {
                return Err(Error::VanishingCoupling { t: s });
            }
        }
        let g0sq = c.g1 * c.g1 + c.g2 * c.g2;
        Ok((k2 * c.g1 * c.g1 + k1 * c.g2 * c.g2) / (2.0 * g0sq))
    };
    adaptive_simpson(integrand, t, t_end, QUAD_TOL)
}

/// `<a2(T)> = exp(-f(0,T)) <a1(0)>`.
pub fn mean_transfer_amplitude(
    alpha0: C64,
    params: &SystemParams,
    schedule: &CouplingSchedule,
    t_end: f64,
) -> Result<C64> {
    Ok(alpha0 * (-f_integral(params, schedule, 0.0, t_end)?).exp())
}

/// Upper estimate `gm (2 n_th + 1) T ((k1 - k2) / 4 g0_min)^2` of the
/// mechanical noise contribution, with `g0_min` taken over 1001 interior
/// points of `(0, T)`.
pub fn fs_bound(params: &SystemParams, schedule: &CouplingSchedule, t_end: f64) -> Result<f64> {
    check_window(schedule, 0.0, t_end)?;
    let mut g0_min = f64::INFINITY;
    let mut at = 0.0;
    for k in 1..=FS_GRID {
        let t = t_end * k as f64 / (FS_GRID + 1) as f64;
        let g0 = schedule.coupling_at(t)?.g0();
        if g0 < g0_min {
            (g0_min, at) = (g0, t);
        }
    }
    let dk = params.kappa1 - params.kappa2;
    let prefactor = params.gamma_m * (2.0 * params.n_th + 1.0) * t_end;
    if prefactor == 0.0 || dk == 0.0 {
        return Ok(0.0);
    }
    if g0_min == 0.0 {
        return Err(Error::VanishingCoupling { t: at });
    }
    Ok(prefactor * (dk / (4.0 * g0_min)).powi(2))
}

/// First-order fidelity for transferring the squeezed coherent state
/// `(alpha, r, phi)`; `phi` does not enter at this order.
///
/// For `r != 0` the exact `y(alpha, r)` is not available and `F2` falls back
/// to `y(alpha, 0)`, flagged in the report.
pub fn analytic_fidelity(
    alpha: C64,
    r: f64,
    _phi: f64,
    params: &SystemParams,
    schedule: &CouplingSchedule,
    t_end: f64,
) -> Result<TransferReport> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::param("r", format!("must be >= 0, got {r}")));
    }
    let f = f_integral(params, schedule, 0.0, t_end)?;
    if f >= 0.3 {
        return Err(Error::ExpansionBreakdown { reason: format!("f(0,T) = {f:.4} >= 0.3") });
    }
    if f > 0.1 {
        warn!("f(0,T) = {f:.4} > 0.1, first-order fidelity is unreliable");
    }
    let fs = fs_bound(params, schedule, t_end)?;
    let c2r = (2.0 * r).cosh();
    let f1 = 1.0 - f * (c2r - 1.0) - fs * c2r;
    let y = 2.0 * alpha.norm_sqr();
    let f2 = 1.0 - f * f * y / 2.0;
    for (name, v) in [("F1", f1), ("F2", f2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::ExpansionBreakdown { reason: format!("{name} = {v:.4} outside [0, 1]") });
        }
    }
    Ok(TransferReport {
        f0t: f,
        fs,
        f1,
        f2,
        fidelity: f1 * f2,
        mean_ratio: C64::new((-f).exp(), 0.0),
        f2_approximate: r != 0.0,
    })
}

/// Eigen-decomposition in the complex-orthogonal gauge `psi^T psi = 1`,
/// where `U^-1 = U^T` for the symmetric `M`.
#[derive(Debug, Clone, Copy)]
struct Frame {
    values: [C64; 3],
    u: Mat3,
    w: Mat3,
}

fn frame_at(params: &SystemParams, schedule: &CouplingSchedule, t: f64, prev: Option<&Frame>) -> Result<Frame> {
    if schedule.coupling_at(t)?.g0() == 0.0 {
        return Err(Error::VanishingCoupling { t });
    }
    let es = eigensystem(&DynamicMatrix::at(params, schedule, t)?)?;
    let es = match prev {
        None => es,
        Some(p) => {
            let previous = crate::spectral::Eigensystem { values: p.values, vectors: p.u, inverse: p.w };
            let (order, worst) = match_modes(&previous, &es);
            if worst < 0.5 {
                return Err(Error::Tracking { t, overlap: worst });
            }
            es.permuted(order)
        }
    };
    let mut cols = [Vec3::zeros(); 3];
    for (i, col) in cols.iter_mut().enumerate() {
        let v = es.vector(i);
        let c = (v.transpose() * v)[0];
        if c.norm() < 1e-8 {
            return Err(Error::Defective { residual: c.norm() });
        }
        let mut v = v / c.sqrt();
        let keep = match prev {
            Some(p) => p.u.column(i).dotc(&v).re >= 0.0,
            None => {
                let big = v.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).copied().unwrap_or_default();
                big.re >= 0.0
            }
        };
        if !keep {
            v = -v;
        }
        *col = v;
    }
    let u = Mat3::from_columns(&cols);
    let w = inverse(&u).ok_or(Error::Defective { residual: f64::INFINITY })?;
    Ok(Frame { values: es.values, u, w })
}

fn frame_rhs(frame: &Frame, diffusion: f64, s: &ThreeModeGaussianState) -> ThreeModeGaussianState {
    let i = C64::new(0.0, 1.0);
    let lam = frame.values;
    let mut noise = Mat3::zeros();
    noise[(1, 1)] = C64::new(diffusion, 0.0);
    let source = frame.w.conjugate() * noise * frame.w.transpose();
    ThreeModeGaussianState {
        mean: Vec3::from_fn(|j, _| -i * lam[j] * s.mean[j]),
        normal: Mat3::from_fn(|j, k| i * (lam[j].conj() - lam[k]) * s.normal[(j, k)] + source[(j, k)]),
        anomalous: Mat3::from_fn(|j, k| -i * (lam[j] + lam[k]) * s.anomalous[(j, k)]),
    }
}

fn step(s: &ThreeModeGaussianState, h: f64, d: &ThreeModeGaussianState) -> ThreeModeGaussianState {
    let h = C64::new(h, 0.0);
    ThreeModeGaussianState {
        mean: s.mean + d.mean * h,
        normal: s.normal + d.normal * h,
        anomalous: s.anomalous + d.anomalous * h,
    }
}

/// Evolves the moments with the non-adiabatic coupling `(dU^-1/dt) U`
/// dropped, so each instantaneous eigenmode evolves independently.
///
/// This is the dynamics the closed-form results describe; comparing it with
/// [`crate::gaussian::integrate`] isolates the non-adiabatic error.
pub fn adiabatic_limit_evolution(
    state0: &ThreeModeGaussianState,
    params: &SystemParams,
    schedule: &CouplingSchedule,
    t_final: f64,
    control: &StepControl,
) -> Result<ThreeModeGaussianState> {
    if !(t_final > 0.0) || t_final > schedule.duration() * (1.0 + 1e-12) {
        return Err(Error::Domain { t: t_final, duration: schedule.duration() });
    }
    let steps = control.steps(params, schedule, t_final);
    let h = t_final / steps as f64;
    let diffusion = params.gamma_m * params.n_th;

    let mut start = frame_at(params, schedule, 0.0, None)?;
    let w0 = start.w;
    let mut s = ThreeModeGaussianState {
        mean: w0 * state0.mean,
        normal: w0.conjugate() * state0.normal * w0.transpose(),
        anomalous: w0 * state0.anomalous * w0.transpose(),
    };
    for k in 0..steps {
        let t = k as f64 * h;
        let mid = frame_at(params, schedule, t + 0.5 * h, Some(&start))?;
        let end = frame_at(params, schedule, (t + h).min(t_final), Some(&mid))?;
        let k1 = frame_rhs(&start, diffusion, &s);
        let k2 = frame_rhs(&mid, diffusion, &step(&s, 0.5 * h, &k1));
        let k3 = frame_rhs(&mid, diffusion, &step(&s, 0.5 * h, &k2));
        let k4 = frame_rhs(&end, diffusion, &step(&s, h, &k3));
        s = step(&step(&step(&step(&s, h / 6.0, &k1), h / 3.0, &k2), h / 3.0, &k3), h / 6.0, &k4);
        start = end;
    }
    let u = start.u;
    let mut out = ThreeModeGaussianState {
        mean: u * s.mean,
        normal: u.conjugate() * s.normal * u.transpose(),
        anomalous: u * s.anomalous * u.transpose(),
    };
    out.symmetrize();
    out.check_physical(t_final)?;
    Ok(out)
}
