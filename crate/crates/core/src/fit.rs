//! Least squares line fits for convergence studies.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Result of an ordinary least squares fit y = slope * x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Coefficient of determination; 1 for a perfect fit, and by convention
    /// also 1 when the data has zero variance.
    pub r_squared: T,
}

/// Fits a straight line through (xs[i], ys[i]). Needs at least two points
/// with distinct x values.
pub fn line<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() {
        return Err(Error::VectorLength { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: xs.len() });
    }
    let n = T::from_usize(xs.len()).expect("sample count fits the scalar");
    let mean_x = xs.iter().copied().sum::<T>() / n;
    let mean_y = ys.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx.is_zero() {
        return Err(Error::TooFewSamples { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy.is_zero() { T::one() } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept, r_squared })
}
