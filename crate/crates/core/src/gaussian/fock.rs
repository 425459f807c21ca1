//! Number-basis fidelity oracle, independent of the covariance formula.
//!
//! A displaced squeezed thermal state is `rho = sum_k p_k |phi_k><phi_k|`
//! with `p_k = n^k / (n+1)^{k+1}` and `phi_k = D S |k>`, each built by
//! Taylor series of the squeeze and displacement generators in a working
//! space twice the cutoff. With `rho_i = B_i B_i^+` (columns
//! `sqrt(p_k) phi_k`) the Uhlmann fidelity is the squared trace norm of
//! `B_1^+ B_2`.

use nalgebra::DMatrix;

use super::SingleModeGaussian;
use crate::{Error, Result, C64};

const MAX_CUTOFF: usize = 4096;
const TRACE_DEFICIT: f64 = 1e-10;

/// `exp(G) v` for sparse `G` given as a matrix-vector product, by `steps`
/// Taylor-summed substeps.
fn expm_apply(mut v: Vec<C64>, apply: impl Fn(&[C64]) -> Vec<C64>, norm_bound: f64) -> Vec<C64> {
    let steps = (norm_bound / 2.0).ceil().max(1.0) as usize;
    let scale = C64::new(1.0 / steps as f64, 0.0);
    for _ in 0..steps {
        let mut term = v.clone();
        let mut k = 1.0;
        loop {
            term = apply(&term).into_iter().map(|z| z * scale / k).collect();
            let size = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
            if size < 1e-18 || k > 200.0 {
                break;
            }
            k += 1.0;
        }
    }
    v
}

fn lower(v: &[C64]) -> Vec<C64> {
    let n = v.len();
    (0..n).map(|j| if j + 1 < n { v[j + 1] * ((j + 1) as f64).sqrt() } else { C64::new(0.0, 0.0) }).collect()
}

fn raise(v: &[C64]) -> Vec<C64> {
    (0..v.len()).map(|j| if j > 0 { v[j - 1] * (j as f64).sqrt() } else { C64::new(0.0, 0.0) }).collect()
}

/// Columns `sqrt(p_k) phi_k` truncated to `cutoff`, and the trace they hold.
fn factor(state: &SingleModeGaussian, cutoff: usize) -> (DMatrix<C64>, f64) {
    let (n_th, r, theta) = state.decompose();
    let alpha = state.mean;
    let work = 2 * cutoff;

    let zeta = C64::from_polar(r, theta);
    let squeeze = |v: &[C64]| -> Vec<C64> {
        let aa = lower(&lower(v));
        let cc = raise(&raise(v));
        aa.iter().zip(&cc).map(|(x, y)| (zeta.conj() * x - zeta * y) * 0.5).collect()
    };
    let displace = |v: &[C64]| -> Vec<C64> {
        let down = lower(v);
        let up = raise(v);
        up.iter().zip(&down).map(|(u, d)| alpha * u - alpha.conj() * d).collect()
    };
    let terms = if n_th <= 1e-300 {
        1
    } else {
        let ratio = n_th / (n_th + 1.0);
        ((1e-14f64.ln() / ratio.ln()).ceil() as usize).clamp(1, work)
    };

    let mut columns = Vec::with_capacity(terms);
    let mut captured = 0.0;
    for k in 0..terms {
        let mut basis = vec![C64::new(0.0, 0.0); work];
        basis[k] = C64::new(1.0, 0.0);
        let phi = expm_apply(basis, squeeze, r * work as f64);
        let phi = expm_apply(phi, displace, 2.0 * alpha.norm() * (work as f64).sqrt());
        let p = (n_th / (n_th + 1.0)).powi(k as i32) / (n_th + 1.0);
        let kept: Vec<C64> = phi[..cutoff].iter().map(|z| z * p.sqrt()).collect();
        captured += kept.iter().map(|z| z.norm_sqr()).sum::<f64>();
        columns.push(kept);
    }
    let b = DMatrix::from_fn(cutoff, terms, |i, k| columns[k][i]);
    (b, captured)
}

/// Uhlmann fidelity from truncated number-basis density matrices.
///
/// Starts from `cutoff` and doubles it until both states keep all but
/// `1e-10` of their trace.
pub fn fock_oracle_fidelity(s1: &SingleModeGaussian, s2: &SingleModeGaussian, cutoff: usize) -> Result<f64> {
    let mut cutoff = cutoff.max(2);
    loop {
        if cutoff > MAX_CUTOFF {
            return Err(Error::Cutoff { cutoff: MAX_CUTOFF });
        }
        let (b1, t1) = factor(s1, cutoff);
        let (b2, t2) = factor(s2, cutoff);
        if 1.0 - t1 < TRACE_DEFICIT && 1.0 - t2 < TRACE_DEFICIT {
            let c = b1.adjoint() * b2;
            let trace_norm: f64 = c.singular_values().iter().sum();
            return Ok((trace_norm * trace_norm).clamp(0.0, 1.0));
        }
        cutoff *= 2;
    }
}

/// Initial cutoff suggested for a state.
pub fn suggested_cutoff(s: &SingleModeGaussian) -> usize {
    let (_, r, _) = s.decompose();
    let a = s.mean.norm();
    (4.0 * (a * a + 10.0 * a + 20.0 * r.sinh().powi(2) + 10.0 * s.n_ex)).ceil().max(8.0) as usize
}

#[cfg(test)]
mod tests {
    use super::super::{gaussian_fidelity, make_squeezed_coherent};
    use super::*;
    use rand::{Rng, SeedableRng};

    fn oracle(a: &SingleModeGaussian, b: &SingleModeGaussian) -> f64 {
        fock_oracle_fidelity(a, b, suggested_cutoff(a).max(suggested_cutoff(b))).unwrap()
    }

    #[test]
    fn vacuum_and_coherent_overlaps() {
        let vac = SingleModeGaussian::vacuum();
        assert!((oracle(&vac, &vac) - 1.0).abs() < 1e-12);
        let a = SingleModeGaussian::coherent(C64::new(2.0, 0.0));
        let b = SingleModeGaussian::coherent(C64::new(0.0, 2.0));
        assert!((fock_oracle_fidelity(&a, &b, 64).unwrap() - (-8.0f64).exp()).abs() < 1e-12);
        let coh = SingleModeGaussian::coherent(C64::new(1.0, 0.0));
        assert!((oracle(&coh, &vac) - (-1.0f64).exp()).abs() < 1e-12);
        assert!((oracle(&vac, &SingleModeGaussian::thermal(1.0)) - 0.5).abs() < 1e-10);
    }

    /// The anomalous moment of the number-basis state fixes the sign
    /// convention of the squeezing parameter.
    #[test]
    fn squeezed_vacuum_moments_match() {
        let s = make_squeezed_coherent(C64::new(0.0, 0.0), 0.4, 0.3).unwrap();
        let (b, _) = factor(&s, 64);
        let psi: Vec<C64> = b.column(0).iter().copied().collect();
        let aa = lower(&lower(&psi));
        let m: C64 = psi.iter().zip(&aa).map(|(x, y)| x.conj() * y).sum();
        let a = lower(&psi);
        let n: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!((m - s.m_an).norm() < 1e-12, "{m} vs {}", s.m_an);
        assert!((n - s.n_ex).abs() < 1e-12);
    }

    #[test]
    fn matches_covariance_formula_on_random_states() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let pick = |rng: &mut rand::rngs::StdRng| {
                let alpha = C64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..6.3));
                let r: f64 = rng.gen_range(0.0..0.8);
                let phi = rng.gen_range(0.0..3.2);
                // keep total n_ex <= 3
                let n_max = ((3.5 / (2.0 * r).cosh()) - 0.5).max(0.0);
                let n_th = rng.gen_range(0.0..=n_max.min(1.5));
                SingleModeGaussian::squeezed_thermal(alpha, r, phi, n_th).unwrap()
            };
            let (a, b) = (pick(&mut rng), pick(&mut rng));
            assert!(a.n_ex <= 3.0 && b.n_ex <= 3.0);
            let exact = gaussian_fidelity(&a, &b).unwrap();
            let reference = oracle(&a, &b);
            assert!((exact - reference).abs() < 1e-6, "{a:?} {b:?}: {exact} vs {reference}");
        }
    }
}
