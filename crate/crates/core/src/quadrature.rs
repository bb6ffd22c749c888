//! Adaptive Simpson quadrature for smooth complex-valued integrands.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Integrates f over [a, b] to the requested absolute tolerance.
///
/// Classic adaptive Simpson: an interval is accepted when the difference
/// between one and two panels is within 15x the local tolerance budget.
pub(crate) fn adaptive_simpson<T, F>(f: &F, a: T, b: T, tol: T) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    const MAX_DEPTH: u32 = 40;
    let half = lit::<T>(0.5);
    let m = (a + b) * half;
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson<T: Real>(a: T, b: T, fa: Complex<T>, fm: Complex<T>, fb: Complex<T>) -> Complex<T> {
    let sixth = (b - a) / lit::<T>(6.0);
    (fa + fm * lit::<T>(4.0) + fb) * sixth
}

#[allow(clippy::too_many_arguments)]
fn refine<T, F>(
    f: &F,
    a: T,
    b: T,
    fa: Complex<T>,
    fm: Complex<T>,
    fb: Complex<T>,
    whole: Complex<T>,
    tol: T,
    depth: u32,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    let half = lit::<T>(0.5);
    let m = (a + b) * half;
    let lm = (a + m) * half;
    let rm = (m + b) * half;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let fifteen = lit::<T>(15.0);
    if delta.norm() <= fifteen * tol {
        return Ok(left + right + delta / fifteen);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure {
            tolerance: tol.to_f64().unwrap_or(f64::NAN),
            residual: (delta.norm() / fifteen).to_f64().unwrap_or(f64::NAN),
        });
    }
    let l = refine(f, a, m, fa, flm, fm, left, tol * half, depth - 1)?;
    let r = refine(f, m, b, fm, frm, fb, right, tol * half, depth - 1)?;
    Ok(l + r)
}
