//! Points on the radius-r sphere, its cotangent bundle, and its
//! complexification, plus the embeddings that place flat R^d data near the
//! north pole.
//!
//! Everything is extrinsic: vectors live in the ambient R^{d+1} (or C^{d+1})
//! and constraints are checked there, no charts. The complex angle θ between
//! a complex label a and a real point x is fixed by cos θ = a·x/r², and the
//! small-angle decomposition splits θ² into the flat squared distance
//! (z−x)²/r² plus a defect that shrinks like r^{−4}.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::heatkernel::check_dim;
use crate::scalar::{lit, Real};

/// Relative tolerance for the constraint checks of the domain types.
const CONSTRAINT_TOL: f64 = 1e-12;

/// Unit conventions in one place: ħ, m, ω, the sphere radius r, and the
/// derived dimensionless time τ = ħ/(mωr²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub hbar: T,
    pub mass: T,
    pub omega: T,
    pub radius: T,
    /// τ = ħ/(mωr²), stored at construction.
    pub tau: T,
}

impl<T: Real> PhysicalParams<T> {
    pub fn new(hbar: T, mass: T, omega: T, radius: T) -> Result<Self> {
        for (name, value) in [
            ("hbar", hbar),
            ("mass", mass),
            ("omega", omega),
            ("radius", radius),
        ] {
            if !(value.is_finite() && value > T::zero()) {
                return Err(Error::InvalidParameter {
                    name,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let tau = hbar / (mass * omega * radius * radius);
        Ok(PhysicalParams { hbar, mass, omega, radius, tau })
    }

    /// Unit radius and ħ = m = ω = 1 except for the given radius.
    pub fn natural(radius: T) -> Result<Self> {
        PhysicalParams::new(T::one(), T::one(), T::one(), radius)
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// A cotangent-bundle point: x on the radius-r sphere, p tangent at x.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<T> {
    pub x: Vec<T>,
    pub p: Vec<T>,
    /// Sphere dimension d; the vectors have d + 1 components.
    pub dim: u32,
}

impl<T: Real> PhasePoint<T> {
    /// Validates |x|² = r² and x·p = 0 to relative tolerance 1e−12.
    pub fn new(x: Vec<T>, p: Vec<T>, dim: u32, params: &PhysicalParams<T>) -> Result<Self> {
        check_dim(dim)?;
        let n = dim as usize + 1;
        if x.len() != n {
            return Err(Error::VectorLength { expected: n, got: x.len() });
        }
        if p.len() != n {
            return Err(Error::VectorLength { expected: n, got: p.len() });
        }
        let tol = lit::<T>(CONSTRAINT_TOL);
        let r2 = params.radius * params.radius;
        let radial_defect = (dot(&x, &x) - r2).abs();
        if radial_defect > tol * r2 {
            return Err(Error::ChartDomain {
                norm: norm(&x).to_f64().unwrap_or(f64::NAN),
                radius: params.radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tangency = dot(&x, &p).abs();
        let scale = norm(&x) * norm(&p);
        if tangency > tol * scale {
            return Err(Error::InconsistentLabel {
                defect: tangency.to_f64().unwrap_or(f64::NAN),
                tolerance: (tol * scale).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(PhasePoint { x, p, dim })
    }
}

/// A coherent-state label: a ∈ C^{d+1} with Σ a_k² = r² (complex equality).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpherePoint<T> {
    pub a: Vec<Complex<T>>,
    pub dim: u32,
}

impl<T: Real> ComplexSpherePoint<T> {
    /// Validates the complex sphere constraint to 1e−12 · r².
    pub fn new(a: Vec<Complex<T>>, dim: u32, params: &PhysicalParams<T>) -> Result<Self> {
        check_dim(dim)?;
        let n = dim as usize + 1;
        if a.len() != n {
            return Err(Error::VectorLength { expected: n, got: a.len() });
        }
        let r2 = params.radius * params.radius;
        let sum: Complex<T> = a.iter().map(|c| c * c).fold(
            Complex::new(T::zero(), T::zero()),
            |acc, v| acc + v,
        );
        let defect = (sum - r2).norm();
        if defect > lit::<T>(CONSTRAINT_TOL) * r2 {
            return Err(Error::InconsistentLabel {
                defect: defect.to_f64().unwrap_or(f64::NAN),
                tolerance: (lit::<T>(CONSTRAINT_TOL) * r2).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(ComplexSpherePoint { a, dim })
    }

    /// Constructor for values that are approximations by design (truncated
    /// series); skips the constraint check.
    pub(crate) fn new_unchecked(a: Vec<Complex<T>>, dim: u32) -> Self {
        ComplexSpherePoint { a, dim }
    }
}

/// The complex separation angle between a label and a real sphere point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAngle<T> {
    pub theta: Complex<T>,
}

/// Places a flat point into the sphere: x̃ = (x0, √(r² − |x0|²)).
///
/// The boundary |x0| = r is allowed (the equator, last component 0).
pub fn embed_position<T: Real>(x0: &[T], params: &PhysicalParams<T>) -> Result<Vec<T>> {
    let r = params.radius;
    let n2 = dot(x0, x0);
    if n2 > r * r {
        return Err(Error::ChartDomain {
            norm: n2.sqrt().to_f64().unwrap_or(f64::NAN),
            radius: r.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut out = x0.to_vec();
    out.push((r * r - n2).max(T::zero()).sqrt());
    Ok(out)
}

/// Lifts a flat momentum to the tangent space at embed_position(x0):
/// p̃ = (p0, −p0·x0/√(r² − |x0|²)). Needs |x0| < r strictly.
pub fn embed_momentum<T: Real>(
    x0: &[T],
    p0: &[T],
    params: &PhysicalParams<T>,
) -> Result<Vec<T>> {
    if p0.len() != x0.len() {
        return Err(Error::VectorLength { expected: x0.len(), got: p0.len() });
    }
    let r = params.radius;
    let n2 = dot(x0, x0);
    if n2 >= r * r {
        return Err(Error::ChartDomain {
            norm: n2.sqrt().to_f64().unwrap_or(f64::NAN),
            radius: r.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut out = p0.to_vec();
    out.push(-dot(p0, x0) / (r * r - n2).sqrt());
    Ok(out)
}

/// The angle θ with cos θ = a·x/r², principal branch 0 ≤ Re θ ≤ π.
///
/// When Re θ = 0 exactly (purely imaginary angle) the sign of Im θ is not
/// determined by the branch; Im θ ≥ 0 is chosen. Downstream kernels are even
/// in θ, so the choice is invisible to them.
pub fn complex_angle<T: Real>(
    a: &ComplexSpherePoint<T>,
    x: &[T],
    params: &PhysicalParams<T>,
) -> Result<ComplexAngle<T>> {
    if x.len() != a.a.len() {
        return Err(Error::VectorLength { expected: a.a.len(), got: x.len() });
    }
    let r2 = params.radius * params.radius;
    let mut w = Complex::new(T::zero(), T::zero());
    for (c, &v) in a.a.iter().zip(x) {
        w = w + c * v;
    }
    w = w / r2;
    let mut theta = w.acos();
    if theta.re == T::zero() && theta.im < T::zero() {
        theta = -theta;
    }
    Ok(ComplexAngle { theta })
}

/// Output of [`small_angle_decomposition`]: θ, θ², the flat part (z−x)²/r²,
/// and the defect q = θ² − flat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallAngleParts<T> {
    pub theta: ComplexAngle<T>,
    pub theta_sq: Complex<T>,
    pub flat_part: Complex<T>,
    pub defect: Complex<T>,
}

/// Default window |θ| < π/2 for the small-angle decomposition.
pub fn default_angle_window<T: Real>() -> T {
    T::FRAC_PI_2()
}

/// Splits the squared complex angle between the label of (x0, p0) and the
/// embedded point x into the flat squared distance plus a defect:
/// θ² = (z−x)²/r² + q with z = x0 + i p0/(mω). The defect decays like r^{−4}
/// at fixed flat data.
///
/// The root of cos θ = a·x̃/r² nearest 0 is used (the two sign choices have
/// equal modulus and downstream use is even in θ); if its modulus is not
/// below `window` the decomposition is outside its regime.
pub fn small_angle_decomposition<T: Real>(
    x0: &[T],
    p0: &[T],
    x: &[T],
    params: &PhysicalParams<T>,
    window: T,
) -> Result<SmallAngleParts<T>> {
    if x.len() != x0.len() {
        return Err(Error::VectorLength { expected: x0.len(), got: x.len() });
    }
    let dim = x0.len() as u32;
    check_dim(dim)?;
    let x_amb = embed_position(x, params)?;
    let x0_amb = embed_position(x0, params)?;
    let p0_amb = embed_momentum(x0, p0, params)?;
    let point = PhasePoint::new(x0_amb, p0_amb, dim, params)?;
    let label = crate::phase_space::classical_label(&point, params)?;
    let angle = complex_angle(&label, &x_amb, params)?;
    let theta = angle.theta;
    if theta.norm() >= window {
        return Err(Error::OutsideAngleWindow {
            theta_abs: theta.norm().to_f64().unwrap_or(f64::NAN),
            window: window.to_f64().unwrap_or(f64::NAN),
        });
    }
    let inv_m_omega = (params.mass * params.omega).recip();
    let mut flat = Complex::new(T::zero(), T::zero());
    for k in 0..x0.len() {
        let z_k = Complex::new(x0[k], p0[k] * inv_m_omega);
        let d = z_k - x[k];
        flat = flat + d * d;
    }
    let r2 = params.radius * params.radius;
    let flat_part = flat / r2;
    let theta_sq = theta * theta;
    Ok(SmallAngleParts {
        theta: angle,
        theta_sq,
        flat_part,
        defect: theta_sq - flat_part,
    })
}
