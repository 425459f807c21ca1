//! Gaussian states of the three modes, their moment equations under the
//! Langevin dynamics, and single-mode Gaussian fidelity.
//!
//! States are stored as central, normal-ordered moments
//!
//! ```text
//! mean_j   = <v_j>
//! N[j][k]  = <v_j^+ v_k> - <v_j>* <v_k>
//! A[j][k]  = <v_j v_k>   - <v_j> <v_k>
//! ```
//!
//! with cavity baths at zero temperature and the mechanical bath at `n_th`:
//!
//! ```text
//! d<v>/dt = -i M <v>
//! dN/dt   = i M* N - i N M + diag(0, gm n_th, 0)
//! dA/dt   = -i (M A + A M)
//! ```
//!
//! Quadratures are `x = a + a^+`, `p = -i(a - a^+)`, so the vacuum
//! covariance is the identity.

mod fock;

pub use fock::{fock_oracle_fidelity, suggested_cutoff};

use nalgebra::{Matrix2, Matrix6, Vector2, Vector6};

use crate::csv::Table;
use crate::model::{CouplingSchedule, DynamicMatrix, SystemParams};
use crate::{Error, Mat3, Result, Vec3, C64};

/// Smallest eigenvalue of `sigma + i Omega` tolerated as physical.
pub const PHYSICALITY_TOL: f64 = 1e-8;

/// One mode: mean, central `<a^+ a>` and central `<a a>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeGaussian {
    pub mean: C64,
    pub n_ex: f64,
    pub m_an: C64,
}

impl SingleModeGaussian {
    pub fn vacuum() -> Self {
        Self { mean: C64::new(0.0, 0.0), n_ex: 0.0, m_an: C64::new(0.0, 0.0) }
    }

    pub fn coherent(alpha: C64) -> Self {
        Self { mean: alpha, ..Self::vacuum() }
    }

    pub fn thermal(n: f64) -> Self {
        Self { n_ex: n, ..Self::vacuum() }
    }

    /// Displaced squeezed thermal state `D(alpha) S(zeta) rho_th S^+ D^+`
    /// with `S(zeta) = exp((zeta* a^2 - zeta a^+2)/2)`, `zeta = r e^{2 i phi}`.
    pub fn squeezed_thermal(alpha: C64, r: f64, phi: f64, n_thermal: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::param("r", format!("must be >= 0, got {r}")));
        }
        if !(n_thermal >= 0.0) || !n_thermal.is_finite() {
            return Err(Error::param("n_thermal", format!("must be >= 0, got {n_thermal}")));
        }
        let half = n_thermal + 0.5;
        Ok(Self {
            mean: alpha,
            n_ex: half * (2.0 * r).cosh() - 0.5,
            m_an: -C64::from_polar(half * (2.0 * r).sinh(), 2.0 * phi),
        })
    }

    /// Inverse of [`Self::squeezed_thermal`]: `(n_thermal, r, theta)` with
    /// `m_an = -e^{i theta} |m_an|`.
    pub fn decompose(&self) -> (f64, f64, f64) {
        let half = ((self.n_ex + 0.5).powi(2) - self.m_an.norm_sqr()).max(0.25).sqrt();
        let r = 0.5 * (self.m_an.norm() / half).asinh();
        let theta = if self.m_an.norm() == 0.0 { 0.0 } else { (-self.m_an).arg() };
        ((half - 0.5).max(0.0), r, theta)
    }

    pub fn is_physical(&self) -> bool {
        self.n_ex >= -1e-12 && self.n_ex * (self.n_ex + 1.0) >= self.m_an.norm_sqr() - 1e-10
    }

    /// Symmetrized covariance of `(x, p)`.
    pub fn covariance(&self) -> Matrix2<f64> {
        let (n, m) = (self.n_ex, self.m_an);
        Matrix2::new(1.0 + 2.0 * n + 2.0 * m.re, 2.0 * m.im, 2.0 * m.im, 1.0 + 2.0 * n - 2.0 * m.re)
    }

    /// `(<x>, <p>)`.
    pub fn quadrature_mean(&self) -> Vector2<f64> {
        Vector2::new(2.0 * self.mean.re, 2.0 * self.mean.im)
    }
}

/// Squeezed coherent state `D(alpha) S(r e^{2 i phi}) |0>`.
pub fn make_squeezed_coherent(alpha: C64, r: f64, phi: f64) -> Result<SingleModeGaussian> {
    SingleModeGaussian::squeezed_thermal(alpha, r, phi, 0.0)
}

/// Uhlmann fidelity of two single-mode Gaussian states.
pub fn gaussian_fidelity(s1: &SingleModeGaussian, s2: &SingleModeGaussian) -> Result<f64> {
    let (c1, c2) = (s1.covariance(), s2.covariance());
    let sum = c1 + c2;
    let det_sum = sum.determinant();
    let inv = sum.try_inverse().filter(|_| det_sum > 0.0).ok_or(Error::SingularCovariance)?;
    let lambda = ((c1.determinant() - 1.0) * (c2.determinant() - 1.0)).max(0.0);
    let delta = s1.quadrature_mean() - s2.quadrature_mean();
    let exponent = -0.5 * delta.dot(&(inv * delta));
    let denom = (det_sum + lambda).sqrt() - lambda.sqrt();
    if !(denom > 0.0) {
        return Err(Error::SingularCovariance);
    }
    Ok((2.0 * exponent.exp() / denom).clamp(0.0, 1.0))
}

/// Joint Gaussian state of `(a1, b, a2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeModeGaussianState {
    pub mean: Vec3,
    pub normal: Mat3,
    pub anomalous: Mat3,
}

impl ThreeModeGaussianState {
    pub fn vacuum() -> Self {
        Self { mean: Vec3::zeros(), normal: Mat3::zeros(), anomalous: Mat3::zeros() }
    }

    /// Restores exact Hermiticity of `N` and symmetry of `A`.
    pub fn symmetrize(&mut self) {
        self.normal = (self.normal + self.normal.adjoint()) * C64::new(0.5, 0.0);
        self.anomalous = (self.anomalous + self.anomalous.transpose()) * C64::new(0.5, 0.0);
    }

    /// Largest of `|N - N^+|` and `|A - A^T|` entrywise.
    pub fn symmetry_defect(&self) -> f64 {
        let dn = (self.normal - self.normal.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let da = (self.anomalous - self.anomalous.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        dn.max(da)
    }

    pub fn total_excitation(&self) -> f64 {
        self.normal.trace().re
    }

    /// Symmetrized covariance of `(x1, p1, x2, p2, x3, p3)`.
    pub fn quadrature_covariance(&self) -> Matrix6<f64> {
        let i = C64::new(0.0, 1.0);
        // quadrature R = u . a + w . a^+
        let coeffs = |q: usize| -> (Vec3, Vec3) {
            let mut e = Vec3::zeros();
            e[q / 2] = C64::new(1.0, 0.0);
            if q.is_multiple_of(2) {
                (e, e)
            } else {
                (-e * i, e * i)
            }
        };
        let n_t_plus_1 = self.normal.transpose() + Mat3::identity();
        let a_conj = self.anomalous.conjugate();
        let moment = |(u, w): (Vec3, Vec3), (u2, w2): (Vec3, Vec3)| -> C64 {
            (u.transpose() * self.anomalous * u2)[0]
                + (u.transpose() * n_t_plus_1 * w2)[0]
                + (w.transpose() * self.normal * u2)[0]
                + (w.transpose() * a_conj * w2)[0]
        };
        Matrix6::from_fn(|r, c| {
            let (qr, qc) = (coeffs(r), coeffs(c));
            0.5 * (moment(qr, qc) + moment(qc, qr)).re
        })
    }

    /// Smallest eigenvalue of `sigma + i Omega`; negative means unphysical.
    pub fn min_physical_eigenvalue(&self) -> f64 {
        let sigma = self.quadrature_covariance().map(|x| C64::new(x, 0.0));
        let mut omega = Matrix6::<C64>::zeros();
        for k in 0..3 {
            omega[(2 * k, 2 * k + 1)] = C64::new(0.0, 1.0);
            omega[(2 * k + 1, 2 * k)] = C64::new(0.0, -1.0);
        }
        let eig: Vector6<f64> = (sigma + omega).symmetric_eigenvalues();
        eig.min()
    }

    pub fn check_physical(&self, t: f64) -> Result<()> {
        let min_eigenvalue = self.min_physical_eigenvalue();
        if min_eigenvalue < -PHYSICALITY_TOL || !min_eigenvalue.is_finite() {
            return Err(Error::Unphysical { t, min_eigenvalue });
        }
        Ok(())
    }

    fn axpy(&self, h: f64, d: &Self) -> Self {
        let h = C64::new(h, 0.0);
        Self {
            mean: self.mean + d.mean * h,
            normal: self.normal + d.normal * h,
            anomalous: self.anomalous + d.anomalous * h,
        }
    }
}

/// Puts `state1` in `a1`, a thermal state with `mech_occupation` in `b` and
/// vacuum in `a2`, all uncorrelated.
pub fn embed_initial(state1: &SingleModeGaussian, mech_occupation: f64) -> Result<ThreeModeGaussianState> {
    if !(mech_occupation >= 0.0) || !mech_occupation.is_finite() {
        return Err(Error::param("mech_occupation", format!("must be >= 0, got {mech_occupation}")));
    }
    let mut s = ThreeModeGaussianState::vacuum();
    s.mean[0] = state1.mean;
    s.normal[(0, 0)] = C64::new(state1.n_ex, 0.0);
    s.normal[(1, 1)] = C64::new(mech_occupation, 0.0);
    s.anomalous[(0, 0)] = state1.m_an;
    Ok(s)
}

/// Marginal of mode `index` (1 = a1, 2 = b, 3 = a2).
pub fn reduce_to_mode(state: &ThreeModeGaussianState, index: usize) -> Result<SingleModeGaussian> {
    if !(1..=3).contains(&index) {
        return Err(Error::param("index", format!("mode index must be 1, 2 or 3, got {index}")));
    }
    let i = index - 1;
    Ok(SingleModeGaussian { mean: state.mean[i], n_ex: state.normal[(i, i)].re, m_an: state.anomalous[(i, i)] })
}

fn rhs(m: &Mat3, diffusion: f64, s: &ThreeModeGaussianState) -> ThreeModeGaussianState {
    let i = C64::new(0.0, 1.0);
    let mut dn = m.conjugate() * s.normal * i - s.normal * m * i;
    dn[(1, 1)] += diffusion;
    ThreeModeGaussianState { mean: -(m * s.mean) * i, normal: dn, anomalous: -(m * s.anomalous + s.anomalous * m) * i }
}

/// Time derivative of the moments at `t`.
pub fn moment_rhs(
    t: f64,
    state: &ThreeModeGaussianState,
    params: &SystemParams,
    schedule: &CouplingSchedule,
) -> Result<ThreeModeGaussianState> {
    let m = DynamicMatrix::at(params, schedule, t)?;
    Ok(rhs(&m.entries, params.gamma_m * params.n_th, state))
}

/// Step-size and sampling control for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Reference rate; caps the step at `0.01 / g_ref`.
    pub g_ref: f64,
    /// Optional further cap on the step.
    pub max_step: Option<f64>,
    /// Number of recorded intervals; endpoints are always recorded.
    pub samples: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { g_ref: 1.0, max_step: None, samples: 200 }
    }
}

impl StepControl {
    /// Number of equal RK4 steps covering `[0, t_final]`.
    pub fn steps(&self, params: &SystemParams, schedule: &CouplingSchedule, t_final: f64) -> usize {
        let fastest = params.max_rate().max(schedule.max_coupling());
        let mut h = (t_final / 2000.0).min(0.01 / self.g_ref);
        if fastest > 0.0 {
            h = h.min(0.1 / fastest);
        }
        if let Some(cap) = self.max_step {
            h = h.min(cap);
        }
        let n = (t_final / h).ceil() as usize;
        // round up so recorded samples fall on step boundaries
        let samples = self.samples.max(1);
        n.div_ceil(samples) * samples
    }
}

/// Sampled solution of the moment equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ThreeModeGaussianState>,
}

impl Trajectory {
    pub fn last(&self) -> &ThreeModeGaussianState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn to_csv(&self) -> String {
        let mut table = Table::new([
            "t", "re_a1", "im_a1", "re_b", "im_b", "re_a2", "im_a2", "n_a1", "n_b", "n_a2", "re_m_a1", "im_m_a1",
            "re_m_b", "im_m_b", "re_m_a2", "im_m_a2",
        ]);
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = vec![*t];
            row.extend((0..3).flat_map(|k| [s.mean[k].re, s.mean[k].im]));
            row.extend((0..3).map(|k| s.normal[(k, k)].re));
            row.extend((0..3).flat_map(|k| [s.anomalous[(k, k)].re, s.anomalous[(k, k)].im]));
            table.push_values(row);
        }
        table.render()
    }
}

/// Fixed-step RK4 solution of the moment equations on `[0, t_final]`.
///
/// Moments are re-symmetrized after each step; physicality is checked at
/// every recorded sample.
pub fn integrate(
    state0: &ThreeModeGaussianState,
    params: &SystemParams,
    schedule: &CouplingSchedule,
    t_final: f64,
    control: &StepControl,
) -> Result<Trajectory> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::param("t_final", format!("must be > 0, got {t_final}")));
    }
    if t_final > schedule.duration() * (1.0 + 1e-12) {
        return Err(Error::Domain { t: t_final, duration: schedule.duration() });
    }
    let steps = control.steps(params, schedule, t_final);
    let stride = steps / control.samples.max(1);
    let h = t_final / steps as f64;
    let diffusion = params.gamma_m * params.n_th;
    let at = |t: f64| DynamicMatrix::at(params, schedule, t).map(|m| m.entries);

    state0.check_physical(0.0)?;
    let mut state = *state0;
    let mut traj = Trajectory { times: vec![0.0], states: vec![state] };
    let mut m_start = at(0.0)?;
    for k in 0..steps {
        let t = k as f64 * h;
        let m_mid = at(t + 0.5 * h)?;
        let m_end = at((k + 1) as f64 * h)?;
        let k1 = rhs(&m_start, diffusion, &state);
        let k2 = rhs(&m_mid, diffusion, &state.axpy(0.5 * h, &k1));
        let k3 = rhs(&m_mid, diffusion, &state.axpy(0.5 * h, &k2));
        let k4 = rhs(&m_end, diffusion, &state.axpy(h, &k3));
        state = state.axpy(h / 6.0, &k1).axpy(h / 3.0, &k2).axpy(h / 3.0, &k3).axpy(h / 6.0, &k4);
        state.symmetrize();
        m_start = m_end;

        if (k + 1) % stride == 0 {
            let t_next = if k + 1 == steps { t_final } else { (k + 1) as f64 * h };
            state.check_physical(t_next)?;
            traj.times.push(t_next);
            traj.states.push(state);
        }
    }
    Ok(traj)
}
