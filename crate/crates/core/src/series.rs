//! Truncated power series in one complex variable.
//!
//! Support for the small-angle evaluation path of the kernel: every factor of
//! a lattice term that is analytic at theta = 0 gets expanded here, products
//! are formed by truncated convolution, and removable singularities are
//! cleared by shifting coefficients instead of dividing nearly equal numbers.

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// Dense truncated power series sum_{p <= order} c_p theta^p.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series<T> {
    /// Coefficient vector, index = power; length is order + 1.
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> Series<T> {
    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![Complex::new(T::zero(), T::zero()); order + 1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The polynomial (theta + shift)^j expanded by the binomial theorem.
    pub fn shifted_monomial(order: usize, shift: T, j: u32) -> Self {
        let mut s = Series::zero(order);
        // binom(j, p) * shift^(j - p) for p = 0..=min(j, order)
        let mut binom = T::one();
        for p in 0..=(j as usize).min(order) {
            let pow = j as usize - p;
            let c = binom * shift.powi(pow as i32);
            s.coeffs[p] = Complex::new(c, T::zero());
            let num = lit::<T>((j as usize - p) as f64);
            let den = lit::<T>((p + 1) as f64);
            binom = binom * num / den;
        }
        s
    }

    /// exp(a * theta) with real rate a.
    pub fn exp_linear(order: usize, a: T) -> Self {
        let mut s = Series::zero(order);
        let mut c = T::one();
        for p in 0..=order {
            s.coeffs[p] = Complex::new(c, T::zero());
            c = c * a / lit::<T>((p + 1) as f64);
        }
        s
    }

    /// sin(theta) / theta, an even entire function equal to 1 at 0.
    pub fn sinc(order: usize) -> Self {
        let mut s = Series::zero(order);
        let mut c = T::one();
        let mut p = 0usize;
        loop {
            s.coeffs[p] = Complex::new(c, T::zero());
            if p + 2 > order {
                break;
            }
            // next even coefficient: divide by -(2k+2)(2k+3) where p = 2k
            let a = lit::<T>((p + 2) as f64);
            let b = lit::<T>((p + 3) as f64);
            c = -c / (a * b);
            p += 2;
        }
        s
    }

    /// cos(theta).
    pub fn cos(order: usize) -> Self {
        let mut s = Series::zero(order);
        let mut c = T::one();
        let mut p = 0usize;
        loop {
            s.coeffs[p] = Complex::new(c, T::zero());
            if p + 2 > order {
                break;
            }
            let a = lit::<T>((p + 1) as f64);
            let b = lit::<T>((p + 2) as f64);
            c = -c / (a * b);
            p += 2;
        }
        s
    }

    pub fn add_assign_scaled(&mut self, other: &Series<T>, k: Complex<T>) {
        debug_assert_eq!(self.order(), other.order());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = *a + *b * k;
        }
    }

    /// Truncated product, same order as the inputs.
    pub fn mul(&self, other: &Series<T>) -> Series<T> {
        debug_assert_eq!(self.order(), other.order());
        let order = self.order();
        let mut out = Series::zero(order);
        for p in 0..=order {
            if self.coeffs[p].norm_sqr().is_zero() {
                continue;
            }
            for q in 0..=(order - p) {
                out.coeffs[p + q] = out.coeffs[p + q] + self.coeffs[p] * other.coeffs[q];
            }
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Series<T> {
        let order = self.order();
        let a0 = self.coeffs[0];
        debug_assert!(a0.norm_sqr() > T::zero());
        let inv0 = a0.finv();
        let mut out = Series::zero(order);
        out.coeffs[0] = inv0;
        for p in 1..=order {
            let mut acc = Complex::new(T::zero(), T::zero());
            for q in 1..=p {
                acc = acc + self.coeffs[q] * out.coeffs[p - q];
            }
            out.coeffs[p] = -inv0 * acc;
        }
        out
    }

    /// Multiply by theta^k: shift coefficients up, dropping overflow.
    pub fn shift_up(&self, k: usize) -> Series<T> {
        let order = self.order();
        let mut out = Series::zero(order);
        for p in 0..=order.saturating_sub(k) {
            out.coeffs[p + k] = self.coeffs[p];
        }
        out
    }

    /// Divide by theta^k, discarding the k lowest coefficients.
    ///
    /// Valid only when those coefficients vanish identically in exact
    /// arithmetic; callers invoke this to clear a removable singularity.
    pub fn shift_down(&self, k: usize) -> Series<T> {
        let order = self.order();
        let mut out = Series::zero(order);
        for p in k..=order {
            out.coeffs[p - k] = self.coeffs[p];
        }
        out
    }

    /// Zero every odd-power coefficient (for provably even functions).
    pub fn drop_odd_powers(&mut self) {
        for p in (1..=self.order()).step_by(2) {
            self.coeffs[p] = Complex::new(T::zero(), T::zero());
        }
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, theta: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * theta + c;
        }
        acc
    }
}
