//! Adaptive Simpson quadrature.

use crate::{Error, Result};

const MAX_PANELS: usize = 1 << 20;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (fa, fm, fb) = (f(a)?, f(0.5 * (a + b))?, f(b)?);
    let whole = simpson(a, b, fa, fm, fb);
    let mut panels = 1;
    refine(&mut f, a, b, fa, fm, fb, whole, tol, 0, &mut panels)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    panels: &mut usize,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m))?, f(0.5 * (m + b))?);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth >= 50 {
        return Ok(left + right + delta / 15.0);
    }
    *panels += 1;
    if *panels > MAX_PANELS {
        return Err(Error::Quadrature { panels: MAX_PANELS });
    }
    let l = refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1, panels)?;
    let r = refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1, panels)?;
    Ok(l + r)
}
