//! Mean-field pulses on a uniform time grid and their overlap fidelity.

use crate::csv::Table;
use crate::{Error, Result, C64};

/// Largest edge amplitude, relative to the peak, accepted for FFT use.
pub const EDGE_LIMIT: f64 = 1e-6;

/// Complex amplitude `<a(t)>` sampled at `t0 + k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub t0: f64,
    pub dt: f64,
    pub amplitudes: Vec<C64>,
}

impl Pulse {
    pub fn new(t0: f64, dt: f64, amplitudes: Vec<C64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::Grid(format!("need finite t0 and dt > 0, got t0 = {t0}, dt = {dt}")));
        }
        if amplitudes.len() < 2 {
            return Err(Error::Grid("a pulse needs at least two samples".into()));
        }
        Ok(Self { t0, dt, amplitudes })
    }

    /// `A exp(-sigma^2 (t - t_c)^2 / 2)` on `[0, 16/sigma]` with the peak at
    /// `t_c = 8/sigma`, sampled at `points` points.
    pub fn gaussian(sigma_omega: f64, amplitude: f64, points: usize) -> Result<Self> {
        if !(sigma_omega > 0.0) || !sigma_omega.is_finite() {
            return Err(Error::param("sigma_omega", format!("must be > 0, got {sigma_omega}")));
        }
        if points < 3 {
            return Err(Error::param("points", "need at least 3 samples"));
        }
        let center = 8.0 / sigma_omega;
        let dt = 2.0 * center / (points - 1) as f64;
        let amplitudes = (0..points)
            .map(|k| {
                let x = sigma_omega * (k as f64 * dt - center);
                C64::new(amplitude * (-0.5 * x * x).exp(), 0.0)
            })
            .collect();
        Self::new(0.0, dt, amplitudes)
    }

    /// Samples `f` on `points` points starting at `t0`.
    pub fn from_fn(t0: f64, dt: f64, points: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(t0, dt, (0..points).map(|k| f(t0 + k as f64 * dt)).collect())
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn duration(&self) -> f64 {
        self.t_end() - self.t0
    }

    pub fn peak(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Larger of the two end amplitudes relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.amplitudes[0].norm();
        let last = self.amplitudes[self.len() - 1].norm();
        first.max(last) / peak
    }

    /// Fails when the pulse has not decayed to `EDGE_LIMIT` of its peak at
    /// either end.
    pub fn check_window(&self) -> Result<()> {
        let edge = self.edge_ratio();
        if edge > EDGE_LIMIT {
            return Err(Error::Window { edge, limit: EDGE_LIMIT });
        }
        Ok(())
    }

    /// Linear interpolation; zero outside the grid.
    pub fn sample(&self, t: f64) -> C64 {
        let x = (t - self.t0) / self.dt;
        let last = (self.len() - 1) as f64;
        if !(x >= 0.0 && x <= last) {
            return C64::new(0.0, 0.0);
        }
        let k = (x.floor() as usize).min(self.len() - 2);
        let w = x - k as f64;
        self.amplitudes[k] * (1.0 - w) + self.amplitudes[k + 1] * w
    }

    /// This pulse on another uniform grid.
    pub fn resample(&self, t0: f64, dt: f64, points: usize) -> Result<Self> {
        Self::from_fn(t0, dt, points, |t| self.sample(t))
    }

    /// `integral |a|^2 dt` by the trapezoid rule.
    pub fn energy(&self) -> f64 {
        trapezoid(self.amplitudes.iter().map(|z| z.norm_sqr()), self.dt)
    }

    pub fn to_csv(&self) -> String {
        let mut table = Table::new(["t", "re", "im", "abs"]);
        for (k, z) in self.amplitudes.iter().enumerate() {
            table.push_values([self.time(k), z.re, z.im, z.norm()]);
        }
        table.render()
    }
}

fn trapezoid<T>(values: impl ExactSizeIterator<Item = T>, dt: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = values.len();
    let mut sum = T::default();
    for (k, v) in values.enumerate() {
        let w = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
        sum = sum + v * w;
    }
    sum * dt
}

/// Both pulses on a common grid covering both supports, with the finer step.
fn common_grid(a: &Pulse, b: &Pulse) -> Result<(Pulse, Pulse)> {
    let same = a.t0 == b.t0 && a.dt == b.dt;
    if same && a.len() == b.len() {
        return Ok((a.clone(), b.clone()));
    }
    let dt = a.dt.min(b.dt);
    let t0 = a.t0.min(b.t0);
    let t_end = a.t_end().max(b.t_end());
    let points = ((t_end - t0) / dt).round() as usize + 1;
    let on = |p: &Pulse| -> Result<Pulse> {
        if p.dt == dt && ((p.t0 - t0) / dt).fract() == 0.0 {
            // exact grid: pad with zeros instead of interpolating
            let offset = ((p.t0 - t0) / dt) as usize;
            let mut amps = vec![C64::new(0.0, 0.0); points];
            for (k, z) in p.amplitudes.iter().enumerate() {
                if let Some(slot) = amps.get_mut(offset + k) {
                    *slot = *z;
                }
            }
            Pulse::new(t0, dt, amps)
        } else {
            p.resample(t0, dt, points)
        }
    };
    Ok((on(a)?, on(b)?))
}

/// `|integral a_in* a_out dt|^2 / (integral |a_in|^2 dt integral |a_out|^2 dt)`.
///
/// Pulses on different grids are compared on a common one, by linear
/// interpolation where the grids do not coincide.
pub fn pulse_fidelity(p_in: &Pulse, p_out: &Pulse) -> Result<f64> {
    let (a, b) = common_grid(p_in, p_out)?;
    let (ea, eb) = (a.energy(), b.energy());
    if ea == 0.0 || eb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let overlap = trapezoid(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y), a.dt);
    let f = overlap.norm_sqr() / (ea * eb);
    Ok(if f > 1.0 + 1e-12 { 1.0 } else { f.clamp(0.0, 1.0) })
}
