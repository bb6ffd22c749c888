//! The complexifier map from cotangent-bundle points to complex sphere
//! labels, its inverse, and a finite-difference Poisson-bracket oracle that
//! validates the closed form against its defining series.
//!
//! The closed form is a(x, p) = cosh(j/mωr²)·x + i(r²/j)sinh(j/mωr²)·p with
//! j = r|p| the total angular momentum; cosh² − sinh² = 1 makes Σ a_k² = r²
//! an identity. The defining series applies nested Poisson brackets with j²
//! to each coordinate function, Σ_n (i/2mωr²)ⁿ (1/n!) {…{x_k, j²}…}; the
//! oracle evaluates a truncation of it with central-difference brackets on
//! the ambient T*R^{d+1}, sharing no algebra with the closed form.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{dot, ComplexSpherePoint, PhasePoint, PhysicalParams};
use crate::scalar::{lit, Real};

/// Below this value of j/(mωr²) the coefficient (r²/j)sinh(j/mωr²) switches
/// to its series around the removable singularity at p = 0.
const SMALL_ARGUMENT: f64 = 1e-4;

/// Truncation controls for [`bracket_series_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexifierSeriesTruncation<T> {
    pub order: u32,
    pub fd_step: T,
}

impl<T: Real> ComplexifierSeriesTruncation<T> {
    /// Validates order ≤ 4 and fd_step ∈ [1e−6, 1e−3]: beyond either the
    /// nested central differences lose all accuracy.
    pub fn new(order: u32, fd_step: T) -> Result<Self> {
        if order > 4 {
            return Err(Error::InvalidParameter { name: "order", value: order as f64 });
        }
        let lo = lit::<T>(1e-6);
        let hi = lit::<T>(1e-3);
        if !(fd_step >= lo && fd_step <= hi) {
            return Err(Error::InvalidParameter {
                name: "fd_step",
                value: fd_step.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(ComplexifierSeriesTruncation { order, fd_step })
    }
}

impl<T: Real> Default for ComplexifierSeriesTruncation<T> {
    fn default() -> Self {
        ComplexifierSeriesTruncation { order: 3, fd_step: lit(1e-4) }
    }
}

/// sinh(κ)/κ with the removable singularity handled by series.
fn sinhc<T: Real>(kappa: T) -> T {
    if kappa.abs() < lit::<T>(SMALL_ARGUMENT) {
        let k2 = kappa * kappa;
        // 1 + κ²/6 + κ⁴/120; the κ⁴ term is below 1e−17 here but free
        T::one() + k2 / lit::<T>(6.0) + k2 * k2 / lit::<T>(120.0)
    } else {
        kappa.sinh() / kappa
    }
}

/// The complexifier map a = cosh(j/mωr²)·x + i(r²/j)sinh(j/mωr²)·p.
///
/// j = r|p| (exact on the constraint set, where j² = x²p² − (x·p)² = r²p²);
/// p = 0 flows through the series branch and returns a = x.
pub fn classical_label<T: Real>(
    point: &PhasePoint<T>,
    params: &PhysicalParams<T>,
) -> Result<ComplexSpherePoint<T>> {
    let r = params.radius;
    let m_omega = params.mass * params.omega;
    let j = r * dot(&point.p, &point.p).sqrt();
    let kappa = j / (m_omega * r * r);
    let stretch = kappa.cosh();
    // (r²/j)sinh(κ) = sinhc(κ)/(mω)
    let boost = sinhc(kappa) / m_omega;
    let a = point
        .x
        .iter()
        .zip(&point.p)
        .map(|(&x, &p)| Complex::new(x * stretch, p * boost))
        .collect();
    ComplexSpherePoint::new(a, point.dim, params)
}

/// Inverts [`classical_label`]: cosh ρ = |Re a|/r fixes ρ ≥ 0, then
/// |p| = mωrρ, x = Re a / cosh ρ, p = Im a · |p|/(r sinh ρ), with ρ = 0
/// collapsing to (x, p) = (Re a, 0).
pub fn invert_label<T: Real>(
    a: &ComplexSpherePoint<T>,
    params: &PhysicalParams<T>,
) -> Result<PhasePoint<T>> {
    let r = params.radius;
    let re: Vec<T> = a.a.iter().map(|c| c.re).collect();
    let re_norm = crate::geometry::norm(&re);
    let ratio = re_norm / r;
    // rounding can push a zero-momentum label's ratio a few ulp below 1
    if ratio < T::one() - lit::<T>(1e-12) {
        return Err(Error::LabelNotInvertible {
            norm: re_norm.to_f64().unwrap_or(f64::NAN),
            radius: r.to_f64().unwrap_or(f64::NAN),
        });
    }
    let rho = if ratio <= T::one() { T::zero() } else { ratio.acosh() };
    let x: Vec<T> = re.iter().map(|&v| v / ratio).collect();
    let p = if rho == T::zero() {
        vec![T::zero(); x.len()]
    } else {
        let p_norm = params.mass * params.omega * r * rho;
        let scale = p_norm / (r * rho.sinh());
        a.a.iter().map(|c| c.im * scale).collect()
    };
    PhasePoint::new(x, p, a.dim, params)
}

/// j² = x²p² − (x·p)² on the ambient flat phase space; its restriction to
/// the bundle is the total angular momentum squared.
fn j_squared<T: Real>(y: &[T], q: &[T]) -> T {
    dot(y, y) * dot(q, q) - dot(y, q) * dot(y, q)
}

/// n-fold nested bracket {…{y_k, j²}…, j²} at (y, q), every derivative (of
/// the inner bracket and of j² alike) taken by second-order central
/// differences with the shared step h.
fn nested_bracket<T: Real>(n: u32, k: usize, y: &[T], q: &[T], h: T) -> T {
    if n == 0 {
        return y[k];
    }
    let two_h = h + h;
    let mut acc = T::zero();
    let mut yy = y.to_vec();
    let mut qq = q.to_vec();
    for l in 0..y.len() {
        // ∂(inner)/∂y_l and ∂j²/∂y_l
        yy[l] = y[l] + h;
        let b_plus = nested_bracket(n - 1, k, &yy, q, h);
        let j_plus = j_squared(&yy, q);
        yy[l] = y[l] - h;
        let b_minus = nested_bracket(n - 1, k, &yy, q, h);
        let j_minus = j_squared(&yy, q);
        yy[l] = y[l];
        let db_dy = (b_plus - b_minus) / two_h;
        let dj_dy = (j_plus - j_minus) / two_h;

        // ∂(inner)/∂q_l and ∂j²/∂q_l
        qq[l] = q[l] + h;
        let b_plus = nested_bracket(n - 1, k, y, &qq, h);
        let j_plus = j_squared(y, &qq);
        qq[l] = q[l] - h;
        let b_minus = nested_bracket(n - 1, k, y, &qq, h);
        let j_minus = j_squared(y, &qq);
        qq[l] = q[l];
        let db_dq = (b_plus - b_minus) / two_h;
        let dj_dq = (j_plus - j_minus) / two_h;

        acc = acc + db_dy * dj_dq - db_dq * dj_dy;
    }
    acc
}

/// Partial sum Σ_{n ≤ order} (i/2mωr²)ⁿ (1/n!) {…{x_k, j²}…} of the
/// complexifier series, nested brackets by central finite differences.
///
/// This is a verification oracle: the result is approximate by construction
/// (truncation plus O(h²) bias plus roundoff amplified by h^{−n}), so the
/// sphere constraint is not enforced on it.
pub fn bracket_series_oracle<T: Real>(
    point: &PhasePoint<T>,
    params: &PhysicalParams<T>,
    trunc: &ComplexifierSeriesTruncation<T>,
) -> ComplexSpherePoint<T> {
    let half_rate = (lit::<T>(2.0) * params.mass * params.omega * params.radius * params.radius)
        .recip();
    let ik = Complex::new(T::zero(), half_rate); // i/(2mωr²)
    let n_comp = point.x.len();
    let mut a = vec![Complex::new(T::zero(), T::zero()); n_comp];
    for k in 0..n_comp {
        let mut factor = Complex::new(T::one(), T::zero());
        for n in 0..=trunc.order {
            if n > 0 {
                factor = factor * ik / lit::<T>(n as f64);
            }
            let b = nested_bracket(n, k, &point.x, &point.p, trunc.fd_step);
            a[k] = a[k] + factor * b;
        }
    }
    ComplexSpherePoint::new_unchecked(a, point.dim)
}
