//! Small-τ structure of the angle kernel: principal part, exponentially
//! small remainder, and the flat-Gaussian limit.
//!
//! The lattice sum splits by site. The n = 0 restriction (the principal
//! part) is even and analytic on |θ| < π and carries all of the kernel's
//! mass as τ → 0; the other sites sum to a remainder of size e^{−C/τ}.
//! Rescaling the principal part by the flat Gaussian (2πτ)^{−d/2} e^{−θ²/2τ}
//! leaves an analytic cofactor whose τ → 0 limit is (θ/sin θ)^{(d−1)/2},
//! the volume distortion of the sphere's exponential chart. The studies
//! here measure both effects on finite grids and report regression fits,
//! never asserted constants.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fit;
use crate::heatkernel::{check_dim, check_tau, EvalConfig, GaussianTermSum, HeatKernel};
use crate::scalar::{lit, Real};

/// Angle window on which the principal/remainder split is certified:
/// π/2 on the circle, then a factor 0.9 for each two-dimension step. The
/// shrink factor is a convention (any factor < 1 works) and is echoed into
/// study metadata by the command layer.
pub fn remainder_window<T: Real>(dim: u32) -> Result<T> {
    check_dim(dim)?;
    let mut w = T::FRAC_PI_2();
    let mut d = 1;
    while d + 2 <= dim {
        w = w * lit::<T>(0.9);
        d += 2;
    }
    Ok(w)
}

fn check_angle_finite<T: Real>(theta: Complex<T>) -> Result<()> {
    if theta.re.is_finite() && theta.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "theta", value: f64::NAN })
    }
}

fn check_angle_within<T: Real>(theta: Complex<T>, window: T) -> Result<()> {
    check_angle_finite(theta)?;
    let theta_abs = theta.norm();
    if theta_abs >= window {
        return Err(Error::OutsideAngleWindow {
            theta_abs: theta_abs.to_f64().unwrap_or(f64::NAN),
            window: window.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Central-site restriction of the lattice kernel: for d = 1 it is exactly
/// (2πτ)^{−1/2} e^{−θ²/2τ}, and each dimension step applies the same
/// recursion as the full kernel. Even in θ, analytic on |θ| < π (the
/// inverse-sine factors put poles at ±π), and within e^{−C/τ} of the full
/// kernel on the remainder window.
#[derive(Debug, Clone)]
pub struct PrincipalPart<T: Real> {
    sum: GaussianTermSum<T>,
    dim: u32,
    tau: T,
    config: EvalConfig<T>,
}

impl<T: Real> PrincipalPart<T> {
    pub fn new(dim: u32, tau: T) -> Result<Self> {
        Self::with_config(dim, tau, &EvalConfig::default())
    }

    pub fn with_config(dim: u32, tau: T, config: &EvalConfig<T>) -> Result<Self> {
        let kernel = HeatKernel::new(dim, tau, config)?;
        Ok(PrincipalPart {
            sum: kernel.term_sum().retain_lattice(|n| n == 0),
            dim,
            tau,
            config: config.clone(),
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Value at a complex angle, |θ| < π.
    pub fn eval(&self, theta: Complex<T>) -> Result<Complex<T>> {
        check_angle_within(theta, T::PI())?;
        Ok(self.sum.eval_path(theta, &self.config, 0, true))
    }

    /// Value divided by the central Gaussian e^{−θ²/2τ}. The division is
    /// symbolic (the factor is simply not applied), so the cofactor stays
    /// representable for τ far below the point where the Gaussian itself
    /// underflows; this is what makes the ratio study possible at τ = 1e−4.
    pub fn eval_cofactor(&self, theta: Complex<T>) -> Result<Complex<T>> {
        check_angle_within(theta, T::PI())?;
        Ok(self.sum.eval_path(theta, &self.config, 0, false))
    }
}

/// Builds the central-site part of the dimension-d kernel at diffusion
/// time τ.
pub fn principal_part<T: Real>(dim: u32, tau: T) -> Result<PrincipalPart<T>> {
    PrincipalPart::new(dim, tau)
}

/// Difference between the full kernel and its principal part at a complex
/// angle inside the remainder window.
///
/// Computed as the complementary lattice restriction (sites n ≠ 0), which
/// equals the subtraction term by term but keeps full relative accuracy:
/// near τ = 0 the remainder sits e^{−C/τ} below the kernel, far beneath
/// what an explicit difference of the two values could resolve.
pub fn remainder<T: Real>(dim: u32, tau: T, theta: Complex<T>) -> Result<Complex<T>> {
    let window = remainder_window::<T>(dim)?;
    check_tau(tau)?;
    check_angle_within(theta, window)?;
    let kernel = HeatKernel::new(dim, tau, &EvalConfig::default())?;
    let tail = kernel.term_sum().retain_lattice(|n| n != 0);
    Ok(tail.eval_path(theta, kernel.config(), 0, true))
}

/// Flat-space comparator (2πτ)^{−d/2} e^{−θ²/2τ} with the complex square
/// θ² continued off the real axis. Underflows to zero for τ ≪ |θ|²; the
/// ratio study therefore never divides by it.
pub fn flat_gaussian<T: Real>(dim: u32, tau: T, theta: Complex<T>) -> Result<Complex<T>> {
    check_dim(dim)?;
    check_tau(tau)?;
    check_angle_finite(theta)?;
    let scale = (T::PI() * lit::<T>(2.0) * tau).powf(lit::<T>(-0.5 * dim as f64));
    Ok((-theta * theta / (tau * lit::<T>(2.0))).exp() * scale)
}

/// Volume distortion (θ/sin θ)^{(d−1)/2} of the exponential chart at
/// geodesic angle θ. The exponent is an integer for odd d, so no branch
/// choices arise; the singularity at θ = 0 is removable with value 1, and
/// the sine zeros at ±π bound the domain.
pub fn jacobian_ratio<T: Real>(dim: u32, theta: Complex<T>) -> Result<Complex<T>> {
    check_dim(dim)?;
    check_angle_within(theta, T::PI())?;
    let base = if theta.norm_sqr() == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        // no cancellation: sin θ ≈ θ(1 − θ²/6) keeps the quotient stable
        // all the way down to the underflow threshold
        theta / theta.sin()
    };
    Ok(base.powu((dim - 1) / 2))
}

/// One row of the remainder decay study: the measured |R| at one τ and the
/// running fit |R| ≈ amplitude · e^{−decay_rate/τ} over the τ values seen
/// so far (ln |R| regressed on 1/τ). Fit fields are None until two τ
/// values are in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderDecayRow<T> {
    pub tau: T,
    pub abs_remainder: T,
    pub decay_rate: Option<T>,
    pub amplitude: Option<T>,
    pub r_squared: Option<T>,
}

/// Evaluates |remainder| along a τ list at a fixed angle and fits the
/// exponential decay law. The fitted constants are diagnostics: genuine
/// outputs of the regression, not asserted targets.
pub fn remainder_decay_study<T: Real>(
    dim: u32,
    theta: Complex<T>,
    taus: &[T],
) -> Result<Vec<RemainderDecayRow<T>>> {
    if taus.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: taus.len() });
    }
    let mut rows = Vec::with_capacity(taus.len());
    let mut inv_taus: Vec<T> = Vec::with_capacity(taus.len());
    let mut log_abs: Vec<T> = Vec::with_capacity(taus.len());
    for &tau in taus {
        let abs_remainder = remainder(dim, tau, theta)?.norm();
        if !abs_remainder.is_finite() || abs_remainder <= T::zero() {
            // τ so small the remainder fell out of double range; the fit
            // would be on ln 0
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau.to_f64().unwrap_or(f64::NAN),
            });
        }
        inv_taus.push(tau.recip());
        log_abs.push(abs_remainder.ln());
        let mut row = RemainderDecayRow {
            tau,
            abs_remainder,
            decay_rate: None,
            amplitude: None,
            r_squared: None,
        };
        if inv_taus.len() >= 2 {
            let f = fit::line(&inv_taus, &log_abs)?;
            row.decay_rate = Some(-f.slope);
            row.amplitude = Some(f.intercept.exp());
            row.r_squared = Some(f.r_squared);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// One row of the ratio limit study: the max-norm grid distance at one τ
/// between the Gaussian-rescaled principal part and its τ → 0 limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStudyRow<T> {
    pub tau: T,
    pub max_abs_err: T,
}

/// Default angle grid for the ratio study: Re θ in `re_steps + 1` even
/// steps across [0, re_max], Im θ in five levels across [−im_max, im_max],
/// keeping points with |θ| ≤ re_max. Deterministic ordering.
pub fn default_ratio_grid<T: Real>(re_max: T, im_max: T, re_steps: u32) -> Vec<Complex<T>> {
    let mut grid = Vec::new();
    let half = im_max * lit::<T>(0.5);
    let im_levels = [-im_max, -half, T::zero(), half, im_max];
    for i in 0..=re_steps {
        let re = re_max * T::from_u32(i).expect("step index fits the scalar")
            / T::from_u32(re_steps.max(1)).expect("step count fits the scalar");
        for &im in &im_levels {
            let theta = Complex::new(re, im);
            if theta.norm() <= re_max {
                grid.push(theta);
            }
        }
    }
    grid
}

/// For each τ, the max-norm distance over the grid between
/// P_d / [(2πτ)^{−d/2} e^{−θ²/2τ}] and (θ/sin θ)^{(d−1)/2}. The Gaussian
/// factors cancel symbolically: the ratio is the analytic cofactor times
/// (2πτ)^{d/2}, so the study runs at τ values where the Gaussians
/// themselves leave double range. The error is first order in τ, which a
/// decreasing τ sequence exhibits as a proportional error decrease.
pub fn principal_ratio_limit_study<T: Real>(
    dim: u32,
    theta_grid: &[Complex<T>],
    taus: &[T],
) -> Result<Vec<RatioStudyRow<T>>> {
    check_dim(dim)?;
    if theta_grid.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if taus.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let window = remainder_window::<T>(dim)?;
    let mut limits = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        check_angle_within(theta, window)?;
        limits.push(jacobian_ratio(dim, theta)?);
    }
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let part = principal_part(dim, tau)?;
        let scale = (T::PI() * lit::<T>(2.0) * tau).powf(lit::<T>(0.5 * dim as f64));
        let mut max_abs_err = T::zero();
        for (&theta, &limit) in theta_grid.iter().zip(&limits) {
            let ratio = part.eval_cofactor(theta)? * scale;
            let err = (ratio - limit).norm();
            if err > max_abs_err {
                max_abs_err = err;
            }
        }
        rows.push(RatioStudyRow { tau, max_abs_err });
    }
    Ok(rows)
}
