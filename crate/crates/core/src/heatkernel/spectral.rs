//! Spectral route to the sphere heat kernel.
//!
//! Sums the eigenfunction expansion of e^{τΔ/2} on S^d: eigenvalue l(l+d−1)/2
//! in degree l, Gegenbauer polynomials C_l^ν(cos θ) with ν = (d−1)/2 carrying
//! the angular dependence, and the eigenspace dimension over the sphere volume
//! as weight. Using dim_l / C_l^ν(1) = (2l+d−1)/(d−1) the kernel collapses to
//!
//!   ρ_τ^d(θ) = (1/A_d) Σ_l e^{−τ l(l+d−1)/2} ((2l+d−1)/(d−1)) C_l^ν(cos θ),
//!
//! with A_d the surface area of the unit S^d. For d = 1 the ν → 0 limit is the
//! plain Fourier series (1/2π)(1 + 2 Σ e^{−τ l²/2} cos lθ).
//!
//! This route shares no code with the Gaussian lattice representation, which
//! is exactly why it serves as the cross-check oracle for it.

use num_complex::Complex;

use super::{check_dim, check_tau, unit_sphere_area};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Hard cap on series length; reached only for tiny τ where the expansion
/// stops being a practical oracle.
const MAX_TERMS: u32 = 100_000;

/// Tail terms below this size relative to the l = 0 term are negligible.
const TAIL_CUTOFF: f64 = 1e-18;

/// Truncated eigenfunction expansion of the heat kernel on S^dim.
#[derive(Debug, Clone)]
pub struct SpectralSeries<T> {
    pub dim: u32,
    pub tau: T,
    /// Number of retained degrees; the bound certifying the tail is below
    /// `TAIL_CUTOFF` holds for |Im θ| up to `max_im`.
    pub l_max: u32,
    pub max_im: T,
}

impl<T: Real> SpectralSeries<T> {
    /// Plans a series for the given dimension and time, valid on the strip
    /// |Im θ| <= max_im.
    pub fn new(dim: u32, tau: T, max_im: T) -> Result<Self> {
        check_dim(dim)?;
        check_tau(tau)?;
        let tau_f = tau.to_f64().expect("tau is finite");
        let im = max_im.to_f64().expect("max_im is finite").abs();
        let d = dim as f64;
        // |C_l^nu(cos theta)| <= C_l^nu(1) e^{l |Im theta|} because the cosine
        // expansion of C_l^nu has nonnegative coefficients, so the term of
        // degree l is bounded relative to the l = 0 term by
        //   e^{-tau l(l+d-1)/2 + l im} * ((2l+d-1)/(d-1)) * binom(l+d-2, l).
        let mut binom = 1.0f64;
        let mut l = 1u32;
        loop {
            let lf = l as f64;
            if dim > 1 {
                binom *= (lf + d - 2.0) / lf;
            }
            let mult = if dim == 1 { 2.0 } else { (2.0 * lf + d - 1.0) / (d - 1.0) };
            let log_bound =
                -tau_f * lf * (lf + d - 1.0) / 2.0 + lf * im + mult.ln() + binom.ln();
            // past the exponent's peak the bound decays faster than
            // geometrically, so the full tail is of the same size
            let past_peak = tau_f * (lf + (d - 1.0) / 2.0) > im + 1.0;
            if past_peak && log_bound < TAIL_CUTOFF.ln() {
                return Ok(SpectralSeries { dim, tau, l_max: l, max_im });
            }
            l += 1;
            if l > MAX_TERMS {
                return Err(Error::OracleUnavailable {
                    tau: tau_f,
                    max_terms: MAX_TERMS,
                });
            }
        }
    }

    /// Evaluates the truncated expansion at a complex angle.
    pub fn eval(&self, theta: Complex<T>) -> Complex<T> {
        self.eval_detailed(theta).0
    }

    /// Evaluates the expansion and also reports its working scale: the sum of
    /// the absolute values of all terms.
    ///
    /// The series reaches the kernel only to within roundoff and truncation
    /// of terms of that size, so the scale times a few hundred machine
    /// epsilons is the resolution this route can certify. Where the kernel is
    /// exponentially smaller than the scale (large real θ at small τ) the
    /// terms cancel massively and no summation of double precision values
    /// can resolve the result relative to itself.
    pub fn eval_detailed(&self, theta: Complex<T>) -> (Complex<T>, T) {
        if self.dim == 1 {
            return self.eval_circle(theta);
        }
        let d = lit::<T>(self.dim as f64);
        let one = T::one();
        let two = lit::<T>(2.0);
        let nu = (d - one) / two;
        let x = theta.cos();
        // three-term recurrence (l+1) C_{l+1} = 2(l+nu) x C_l - (l+2nu-1) C_{l-1}
        let mut c_prev = Complex::new(one, T::zero()); // C_0
        let mut c_curr = x * (two * nu); // C_1
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut mass = T::zero();
        for l in 0..=self.l_max {
            let lf = lit::<T>(l as f64);
            let lam = lf * (lf + d - one) / two;
            let weight = (two * lf + d - one) / (d - one) * (-self.tau * lam).exp();
            let term = c_prev * weight;
            acc = acc + term;
            mass = mass + term.norm();
            // c_prev = C_l, c_curr = C_{l+1}; produce C_{l+2}
            let next = (x * (two * (lf + one + nu)) * c_curr - c_prev * (lf + two * nu))
                / (lf + two);
            c_prev = c_curr;
            c_curr = next;
        }
        let area = unit_sphere_area::<T>(self.dim);
        (acc / area, mass / area)
    }

    /// d = 1: Fourier cosine series on the circle.
    fn eval_circle(&self, theta: Complex<T>) -> (Complex<T>, T) {
        let two = lit::<T>(2.0);
        let mut acc = Complex::new(T::one(), T::zero());
        let mut mass = T::one();
        for l in 1..=self.l_max {
            let lf = lit::<T>(l as f64);
            let damp = (-self.tau * lf * lf / two).exp();
            let term = (theta * lf).cos() * (damp * two);
            acc = acc + term;
            mass = mass + term.norm();
        }
        let area = unit_sphere_area::<T>(1);
        (acc / area, mass / area)
    }
}

/// One-shot spectral evaluation with the default strip |Im θ| <= 1.
pub fn spectral_kernel<T: Real>(dim: u32, tau: T, theta: Complex<T>) -> Result<Complex<T>> {
    let series = SpectralSeries::new(dim, tau, T::one())?;
    Ok(series.eval(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    /// Circle heat kernel as a Gaussian lattice sum, written out longhand so
    /// this test shares nothing with production code.
    fn circle_lattice(tau: f64, theta: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for n in -30i32..=30 {
            let u = theta - 2.0 * PI * n as f64;
            acc += (-u * u / (2.0 * tau)).exp();
        }
        acc / (2.0 * PI * tau).sqrt()
    }

    /// S^3 kernel in its closed Fourier form, also written out longhand.
    fn sphere3_closed(tau: f64, theta: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for m in 1..=600 {
            let mf = m as f64;
            acc += (theta * mf).sin() * mf * (-tau * mf * mf / 2.0).exp();
        }
        acc * (tau / 2.0).exp() / (2.0 * PI * PI * theta.sin())
    }

    #[test]
    fn circle_series_matches_lattice_sum() {
        for &tau in &[0.1, 0.5, 1.0] {
            for &theta in &[
                C::new(0.0, 0.0),
                C::new(0.4, 0.0),
                C::new(2.9, 0.0),
                C::new(1.0, -0.6),
            ] {
                let series = SpectralSeries::new(1, tau, 1.0).unwrap();
                let (spectral, mass) = series.eval_detailed(theta);
                let lattice = circle_lattice(tau, theta);
                // deep in the Gaussian tail the series only resolves the
                // kernel down to roundoff on its own term mass
                let allow = (1e-12 * lattice.norm()).max(1e-13 * mass);
                assert!(
                    (spectral - lattice).norm() < allow,
                    "tau={tau} theta={theta}: {spectral} vs {lattice}"
                );
            }
        }
    }

    #[test]
    fn sphere3_series_matches_closed_form() {
        for &tau in &[0.1, 0.3, 1.0] {
            for &theta in &[C::new(0.7, 0.0), C::new(2.5, 0.0), C::new(0.9, 0.4)] {
                let series = SpectralSeries::new(3, tau, 1.0).unwrap();
                let (spectral, mass) = series.eval_detailed(theta);
                let closed = sphere3_closed(tau, theta);
                let allow = (1e-12 * closed.norm()).max(1e-13 * mass);
                assert!(
                    (spectral - closed).norm() < allow,
                    "tau={tau} theta={theta}: {spectral} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn kernel_is_positive_on_the_real_axis() {
        for &dim in &[1u32, 3, 5, 7] {
            for step in 0..=10 {
                let theta = C::new(PI * step as f64 / 10.0, 0.0);
                let v = spectral_kernel(dim, 0.4, theta).unwrap();
                assert!(v.re > 0.0, "dim={dim} theta={} value={v}", theta.re);
                assert!(v.im.abs() < 1e-14 * v.re.abs());
            }
        }
    }

    #[test]
    fn tiny_tau_is_rejected() {
        let err = SpectralSeries::<f64>::new(3, 1e-9, 1.0).unwrap_err();
        assert!(matches!(err, Error::OracleUnavailable { .. }));
    }

    #[test]
    fn even_dimension_is_rejected() {
        assert!(matches!(
            SpectralSeries::<f64>::new(2, 0.5, 1.0).unwrap_err(),
            Error::EvenDimension { dim: 2 }
        ));
    }
}
