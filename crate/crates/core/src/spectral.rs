//! Eigen-analysis of the dynamic matrix: the full eigensystem, the
//! mechanical dark mode and the size of the non-adiabatic coupling
//! `(dU^-1/dt) U` that the adiabatic solution neglects.

use log::warn;

use crate::model::{CouplingSchedule, DynamicMatrix, SystemParams};
use crate::{Error, Mat3, Result, Vec3, C64};

/// Eigenvalues `lambda_i`, eigenvectors `psi_i` (columns of `U`) and `U^-1`.
///
/// Vectors have unit Euclidean norm with their largest-modulus component
/// real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub values: [C64; 3],
    pub vectors: Mat3,
    pub inverse: Mat3,
}

impl Eigensystem {
    pub fn vector(&self, i: usize) -> Vec3 {
        self.vectors.column(i).into_owned()
    }

    /// Reorders modes so that new mode `i` is old mode `order[i]`.
    pub fn permuted(&self, order: [usize; 3]) -> Self {
        let values = order.map(|k| self.values[k]);
        let vectors = Mat3::from_columns(&order.map(|k| self.vector(k)));
        let inverse = Mat3::from_rows(&order.map(|k| self.inverse.row(k).into_owned()));
        Self { values, vectors, inverse }
    }
}

/// Mechanical dark mode `psi_1` and its eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkMode {
    pub vector: Vec3,
    pub lambda: C64,
    /// `|psi_1[b]|^2` for the unit-norm vector.
    pub mechanical_weight: f64,
}

impl DarkMode {
    fn new(vector: Vec3, lambda: C64) -> Self {
        Self { vector, lambda, mechanical_weight: vector[1].norm_sqr() }
    }
}

/// `|<a, b>|` with the Hermitian inner product.
pub fn overlap(a: &Vec3, b: &Vec3) -> f64 {
    a.dotc(b).norm()
}

/// Phase-insensitive distance between unit vectors, `min_phi |a - e^{i phi} b|`.
pub fn ray_distance(a: &Vec3, b: &Vec3) -> f64 {
    (2.0 - 2.0 * overlap(a, b)).max(0.0).sqrt()
}

/// Roots of `det(lambda I - M) = 0` via Cardano, each polished by Newton steps.
pub fn characteristic_roots(m: &Mat3) -> [C64; 3] {
    // lambda^3 + c2 lambda^2 + c1 lambda + c0
    let c2 = -m.trace();
    let c1 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let c0 = -m.determinant();

    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let (plus, minus) = (-q / 2.0 + s, -q / 2.0 - s);
    let u3 = if plus.norm() >= minus.norm() { plus } else { minus };

    let shift = -c2 / 3.0;
    let mut roots = if u3.norm() == 0.0 {
        [shift; 3]
    } else {
        let u = u3.powf(1.0 / 3.0);
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut roots = [C64::new(0.0, 0.0); 3];
        let mut uk = u;
        for root in &mut roots {
            *root = uk - p / (3.0 * uk) + shift;
            uk *= omega;
        }
        roots
    };

    let poly = |x: C64| ((x + c2) * x + c1) * x + c0;
    let deriv = |x: C64| (3.0 * x + 2.0 * c2) * x + c1;
    for root in &mut roots {
        for _ in 0..3 {
            let d = deriv(*root);
            if d.norm() == 0.0 {
                break;
            }
            let next = *root - poly(*root) / d;
            if poly(next).norm() < poly(*root).norm() {
                *root = next;
            } else {
                break;
            }
        }
    }
    roots
}

/// Classical adjugate, `adj(M) M = det(M) I`.
pub fn adjugate(m: &Mat3) -> Mat3 {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
    #[rustfmt::skip]
    let adj = Mat3::new(
        c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2),
        -c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2),
        c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1),
    );
    adj
}

/// `M^-1 = adj(M) / det(M)`; `None` when the determinant vanishes.
pub fn inverse(m: &Mat3) -> Option<Mat3> {
    let det = m.determinant();
    if det.norm() == 0.0 || !det.is_finite() {
        return None;
    }
    Some(adjugate(m) / det)
}

/// Unit norm, largest-modulus component real and positive.
pub fn normalize_phase(v: Vec3) -> Vec3 {
    let v = v / C64::new(v.norm(), 0.0);
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-12)).copied().unwrap_or(C64::new(1.0, 0.0));
    v * (pivot.conj() / pivot.norm())
}

fn project_out(mut v: Vec3, basis: &[Vec3]) -> Vec3 {
    for b in basis {
        v -= b * b.dotc(&v);
    }
    v
}

/// Inverse iteration for the eigenvector near `shift`, orthogonal to the
/// already found vectors of a degenerate cluster. Returns the unit vector
/// and its Rayleigh quotient, which is accurate even where the cubic's roots
/// lose digits to near-multiplicity.
fn eigenpair(m: &Mat3, shift: C64, scale: f64, cluster: &[Vec3]) -> Result<(C64, Vec3)> {
    let mut basis: Vec<Vec3> = Vec::with_capacity(cluster.len());
    for c in cluster {
        let q = project_out(*c, &basis);
        if q.norm() > 1e-8 {
            basis.push(q / C64::new(q.norm(), 0.0));
        }
    }
    let cluster = basis.as_slice();
    let shifted = m - Mat3::identity() * shift;
    let eps = C64::new(1e-10 * scale, 0.0);
    let lu = (shifted - Mat3::identity() * eps).lu();

    let adj = adjugate(&shifted);
    let starts = (0..3).map(|j| adj.column(j).into_owned()).chain((0..3).map(|j| {
        let mut e = Vec3::zeros();
        e[j] = C64::new(1.0, 0.0);
        e
    }));

    let mut best: Option<(f64, Vec3)> = None;
    for start in starts {
        let norm0 = start.norm();
        if norm0 == 0.0 || !norm0.is_finite() {
            continue;
        }
        let mut x = project_out(start / C64::new(norm0, 0.0), cluster);
        if x.norm() < 1e-6 {
            continue;
        }
        x /= C64::new(x.norm(), 0.0);
        for _ in 0..3 {
            let Some(y) = lu.solve(&x) else { break };
            let y = project_out(y, cluster);
            let n = y.norm();
            if n == 0.0 || !n.is_finite() {
                break;
            }
            x = y / C64::new(n, 0.0);
        }
        // rank by distance to the requested shift so a start vector that
        // stayed on a neighbouring eigenvector is not picked
        let miss = (shifted * x).norm();
        if best.as_ref().is_none_or(|(r, _)| miss < *r) {
            best = Some((miss, x));
        }
        if miss <= 1e-13 * scale {
            break;
        }
    }

    let Some((_, x)) = best else {
        return Err(Error::Defective { residual: f64::INFINITY });
    };
    let lambda = x.dotc(&(m * x));
    let residual = (m * x - x * lambda).norm();
    if residual <= 1e-10 * scale {
        Ok((lambda, x))
    } else {
        Err(Error::Defective { residual })
    }
}

fn order_key(a: &C64, b: &C64, tol: f64) -> std::cmp::Ordering {
    if (a.re - b.re).abs() > tol {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

/// Eigensystem of `M`, sorted by real part ascending (ties by imaginary part).
pub fn eigensystem(m: &DynamicMatrix) -> Result<Eigensystem> {
    let entries = &m.entries;
    let scale = m.norm();
    if scale == 0.0 {
        let zero = C64::new(0.0, 0.0);
        return Ok(Eigensystem { values: [zero; 3], vectors: Mat3::identity(), inverse: Mat3::identity() });
    }
    let mut roots = characteristic_roots(entries);
    roots.sort_by(|a, b| order_key(a, b, 1e-12 * scale));

    let mut pairs: Vec<(C64, Vec3)> = Vec::with_capacity(3);
    for (i, &root) in roots.iter().enumerate() {
        // multiple roots come out of the cubic spread by ~eps^(1/3)
        let cluster: Vec<Vec3> =
            (0..i).filter(|&j| (roots[j] - root).norm() <= 1e-4 * scale).map(|j| pairs[j].1).collect();
        let (mut lambda, mut v) = eigenpair(entries, root, scale, &[])?;
        if cluster.iter().any(|c| overlap(c, &v) > 1.0 - 1e-8) {
            (lambda, v) = eigenpair(entries, root, scale, &cluster)?;
        }
        pairs.push((lambda, normalize_phase(v)));
    }
    pairs.sort_by(|a, b| order_key(&a.0, &b.0, 1e-12 * scale));

    let values = [pairs[0].0, pairs[1].0, pairs[2].0];
    let u = Mat3::from_columns(&[pairs[0].1, pairs[1].1, pairs[2].1]);
    let inverse = inverse(&u).ok_or(Error::Defective { residual: f64::INFINITY })?;
    Ok(Eigensystem { values, vectors: u, inverse })
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Ordering of `next` that best matches `prev` mode by mode, plus the
/// smallest matched overlap.
pub fn match_modes(prev: &Eigensystem, next: &Eigensystem) -> ([usize; 3], f64) {
    let mut best = ([0, 1, 2], f64::NEG_INFINITY, 0.0);
    for order in PERMUTATIONS {
        let overlaps = [0, 1, 2].map(|i| overlap(&prev.vector(i), &next.vector(order[i])));
        let total: f64 = overlaps.iter().sum();
        if total > best.1 {
            best = (order, total, overlaps.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    (best.0, best.2)
}

/// Keeps mode labels continuous across a sweep by maximum-overlap matching
/// with the previous step.
#[derive(Debug, Clone)]
pub struct EigenTracker {
    prev: Option<Eigensystem>,
    min_overlap: f64,
}

impl Default for EigenTracker {
    fn default() -> Self {
        Self::new(0.5)
    }
}

impl EigenTracker {
    /// Fails any step whose matched overlap drops below `min_overlap`.
    pub fn new(min_overlap: f64) -> Self {
        Self { prev: None, min_overlap }
    }

    pub fn next(&mut self, m: &DynamicMatrix) -> Result<Eigensystem> {
        let es = eigensystem(m)?;
        let es = match &self.prev {
            None => es,
            Some(prev) => {
                let (order, worst) = match_modes(prev, &es);
                if worst < self.min_overlap {
                    return Err(Error::Tracking { t: m.time, overlap: worst });
                }
                es.permuted(order)
            }
        };
        self.prev = Some(es);
        Ok(es)
    }
}

/// Picks the eigenmode of `M` closest to the ideal dark mode `[-g2, 0, g1]/g0`.
pub fn dark_mode_exact(m: &DynamicMatrix) -> Result<DarkMode> {
    let (g1, g2) = (m.g1(), m.g2());
    let g0 = g1.hypot(g2);
    if g0 == 0.0 {
        return Err(Error::VanishingCoupling { t: m.time });
    }
    let ideal = Vec3::new(C64::new(-g2 / g0, 0.0), C64::new(0.0, 0.0), C64::new(g1 / g0, 0.0));
    let es = eigensystem(m)?;
    let mut ranked: Vec<(usize, f64)> = (0..3).map(|i| (i, overlap(&ideal, &es.vector(i)))).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    if ranked[0].1 - ranked[1].1 <= 1e-6 {
        return Err(Error::AmbiguousDarkMode { first: ranked[0].1, second: ranked[1].1 });
    }
    let i = ranked[0].0;
    Ok(DarkMode::new(es.vector(i), es.values[i]))
}

/// First-order perturbative dark mode for dampings small against `g0`:
/// `psi_1 ~ [-g2/g0, -i (k1 - k2) g1 g2 / 2 g0^3, g1/g0]` and
/// `lambda_1 = -i (k2 g1^2 + k1 g2^2) / 2 g0^2`.
pub fn dark_mode_perturbative(params: &SystemParams, g1: f64, g2: f64) -> Result<DarkMode> {
    let g0 = g1.hypot(g2);
    if g0 == 0.0 {
        return Err(Error::VanishingCoupling { t: f64::NAN });
    }
    let ratio = params.max_rate() / g0;
    if ratio >= 1.0 {
        return Err(Error::param("damping", format!("max damping / g0 = {ratio} must be < 1")));
    }
    if ratio > 0.2 {
        warn!("perturbative dark mode outside its regime: max damping / g0 = {ratio:.3}");
    }
    let (k1, k2) = (params.kappa1, params.kappa2);
    let g03 = g0 * g0 * g0;
    let v =
        Vec3::new(C64::new(-g2 / g0, 0.0), C64::new(0.0, -(k1 - k2) * g1 * g2 / (2.0 * g03)), C64::new(g1 / g0, 0.0));
    let lambda = C64::new(0.0, -(k2 * g1 * g1 + k1 * g2 * g2) / (2.0 * g0 * g0));
    Ok(DarkMode::new(normalize_phase(v), lambda))
}

/// Largest entry of `(dU^-1/dt) U` at `t`, by central differences over
/// `h = 1e-5 T` (one-sided at the schedule ends) with eigenvectors matched
/// and phase-aligned to those at `t`.
pub fn adiabatic_correction_norm(schedule: &CouplingSchedule, params: &SystemParams, t: f64) -> Result<f64> {
    let duration = schedule.duration();
    let h = 1e-5 * duration;
    let (t_lo, t_hi) = ((t - h).max(0.0), (t + h).min(duration));
    if t_hi <= t_lo {
        return Err(Error::Domain { t, duration });
    }
    let center = eigensystem(&DynamicMatrix::at(params, schedule, t)?)?;
    let aligned = |tn: f64| -> Result<Mat3> {
        let es = eigensystem(&DynamicMatrix::at(params, schedule, tn)?)?;
        let (order, worst) = match_modes(&center, &es);
        if worst < 0.9 {
            return Err(Error::Tracking { t: tn, overlap: worst });
        }
        let es = es.permuted(order);
        let cols = [0, 1, 2].map(|i| {
            let v = es.vector(i);
            let phase = center.vector(i).dotc(&v);
            v * (phase.conj() / phase.norm())
        });
        inverse(&Mat3::from_columns(&cols)).ok_or(Error::Defective { residual: f64::INFINITY })
    };
    let derivative = (aligned(t_hi)? - aligned(t_lo)?) / C64::new(t_hi - t_lo, 0.0);
    let product = derivative * center.vectors;
    Ok(product.iter().map(|z| z.norm()).fold(0.0, f64::max))
}
