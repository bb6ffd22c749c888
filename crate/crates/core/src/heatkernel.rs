//! Heat kernels on odd-dimensional spheres in their angle form.
//!
//! The kernel on S^1 is a lattice of Gaussians in the angle θ. Each step
//! S^d → S^{d+2} applies −e^{dτ/2} (2π sin θ)^{-1} d/dθ, which keeps the sum
//! inside a finite term algebra: every term is
//!
//!   coeff · (θ − 2πn)^j · (sin θ)^{-m} · (cos θ)^k · exp(−(θ − 2πn)²/2τ),
//!
//! so repeated differentiation is exact bookkeeping on (coeff, n, j, m, k).
//! Everything here continues analytically to complex θ. The normalization is
//! the kernel of e^{τΔ/2} on the unit sphere: it integrates to 1, and radius
//! enters downstream through τ and coordinate scaling only.
//!
//! Near θ = 0 the (sin θ)^{-m} factors make plain summation cancel
//! catastrophically, so evaluation switches to an even Maclaurin expansion in
//! which the Gaussian factor of each lattice site is kept in closed form and
//! only the analytic cofactor is expanded; see `eval_series` for why the
//! lattice-pair grouping makes that expansion regular.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::scalar::{lit, Real};
use crate::series::Series;

mod spectral;
pub use spectral::{spectral_kernel, SpectralSeries};

/// Largest supported sphere dimension; the term algebra stays small well
/// beyond this, the cap just keeps validation honest.
pub const MAX_DIM: u32 = 21;

pub(crate) fn check_dim(dim: u32) -> Result<()> {
    if dim % 2 == 0 {
        return Err(Error::EvenDimension { dim });
    }
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::DimensionRange { dim, max: MAX_DIM });
    }
    Ok(())
}

pub(crate) fn check_tau<T: Real>(tau: T) -> Result<()> {
    if !(tau.is_finite() && tau > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Surface area of the unit m-sphere: A_0 = 2, A_1 = 2π, A_m = 2π A_{m−2}/(m−1).
pub(crate) fn unit_sphere_area<T: Real>(m: u32) -> T {
    let two_pi = T::PI() * lit::<T>(2.0);
    let mut even = lit::<T>(2.0); // A_0
    let mut odd = two_pi; // A_1
    if m == 0 {
        return even;
    }
    for i in 2..=m {
        let next = two_pi / lit::<T>((i - 1) as f64) * if i % 2 == 0 { even } else { odd };
        if i % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
    }
    if m % 2 == 0 {
        even
    } else {
        odd
    }
}

/// Evaluation controls for the lattice representation.
#[derive(Debug, Clone)]
pub struct EvalConfig<T> {
    /// Initial lattice window N; the sum covers n in [−N, N].
    pub window: u32,
    /// Truncation tolerance the window certificate must reach.
    pub tolerance: T,
    /// |θ| below which the even-expansion path evaluates the sum.
    pub theta_switch: T,
    /// Truncation order of that expansion.
    pub series_order: usize,
    /// Largest |Im θ| the window certificate covers.
    pub max_im: T,
}

impl<T: Real> Default for EvalConfig<T> {
    fn default() -> Self {
        EvalConfig {
            window: 6,
            tolerance: lit(1e-12),
            theta_switch: lit(0.1),
            series_order: 12,
            max_im: lit(1.0),
        }
    }
}

/// One lattice term coeff · (θ−2πn)^j (sin θ)^{−m} (cos θ)^k e^{−(θ−2πn)²/2τ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<T> {
    pub coeff: T,
    pub lattice_n: i32,
    /// j: power of (θ − 2πn).
    pub poly_power: u32,
    /// m: power of 1/sin θ.
    pub inv_sin_power: u32,
    /// k: power of cos θ.
    pub cos_power: u32,
}

/// A lattice Gaussian sum: prefactor · Σ terms, closed under the dimension
/// recursion.
///
/// Constructors (`kernel_d1`, `recursion_step`, `retain_lattice` with a sign
/// symmetric predicate) keep the per-|n| term multisets mirror symmetric;
/// evaluation of the small-angle path relies on that symmetry.
#[derive(Debug, Clone)]
pub struct GaussianTermSum<T> {
    pub tau: T,
    pub prefactor: T,
    /// Lattice window N; terms carry n in [−N, N].
    pub window: u32,
    pub terms: Vec<Term<T>>,
}

/// The circle kernel (2πτ)^{−1/2} Σ_n e^{−(θ−2πn)²/2τ} over the given window.
pub fn kernel_d1<T: Real>(tau: T, window: u32) -> Result<GaussianTermSum<T>> {
    check_tau(tau)?;
    let n = window as i32;
    let terms = (-n..=n)
        .map(|lattice_n| Term {
            coeff: T::one(),
            lattice_n,
            poly_power: 0,
            inv_sin_power: 0,
            cos_power: 0,
        })
        .collect();
    let two_pi_tau = T::PI() * lit::<T>(2.0) * tau;
    Ok(GaussianTermSum { tau, prefactor: two_pi_tau.sqrt().recip(), window, terms })
}

/// Applies −e^{dτ/2} (2π sin θ)^{−1} d/dθ, taking the S^d kernel to S^{d+2}.
///
/// The derivative of each term splits into at most four terms of the same
/// shape; the trailing 1/sin θ raises every inverse-sine power by one. Like
/// terms are merged, and cos² = 1 − sin² is applied only when that makes the
/// term list strictly shorter.
pub fn recursion_step<T: Real>(sum: &GaussianTermSum<T>, d: u32) -> GaussianTermSum<T> {
    let inv_tau = sum.tau.recip();
    let mut out: Vec<Term<T>> = Vec::with_capacity(sum.terms.len() * 4);
    for t in &sum.terms {
        if t.poly_power > 0 {
            out.push(Term {
                coeff: t.coeff * lit::<T>(t.poly_power as f64),
                poly_power: t.poly_power - 1,
                inv_sin_power: t.inv_sin_power + 1,
                ..*t
            });
        }
        if t.inv_sin_power > 0 {
            out.push(Term {
                coeff: -t.coeff * lit::<T>(t.inv_sin_power as f64),
                inv_sin_power: t.inv_sin_power + 2,
                cos_power: t.cos_power + 1,
                ..*t
            });
        }
        if t.cos_power > 0 {
            out.push(Term {
                coeff: -t.coeff * lit::<T>(t.cos_power as f64),
                cos_power: t.cos_power - 1,
                ..*t
            });
        }
        out.push(Term {
            coeff: -t.coeff * inv_tau,
            poly_power: t.poly_power + 1,
            inv_sin_power: t.inv_sin_power + 1,
            ..*t
        });
    }
    let merged = merge_terms(out);
    let reduced = reduce_cos(&merged);
    let terms = if reduced.len() < merged.len() { reduced } else { merged };
    let half = lit::<T>(0.5);
    let scale = -(lit::<T>(d as f64) * sum.tau * half).exp() / (T::PI() * lit::<T>(2.0));
    GaussianTermSum { tau: sum.tau, prefactor: sum.prefactor * scale, window: sum.window, terms }
}

/// Sorts by (n, j, m, k), sums equal keys, drops exact zeros.
fn merge_terms<T: Real>(mut terms: Vec<Term<T>>) -> Vec<Term<T>> {
    terms.sort_by_key(|t| (t.lattice_n, t.poly_power, t.inv_sin_power, t.cos_power));
    let mut out: Vec<Term<T>> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(prev)
                if prev.lattice_n == t.lattice_n
                    && prev.poly_power == t.poly_power
                    && prev.inv_sin_power == t.inv_sin_power
                    && prev.cos_power == t.cos_power =>
            {
                prev.coeff = prev.coeff + t.coeff;
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff != T::zero());
    out
}

/// Rewrites cos² = 1 − sin² until every cos power is 0 or 1.
///
/// Each rewrite needs two spare inverse-sine powers; the recursion maintains
/// m >= k on every term, so that is always available.
fn reduce_cos<T: Real>(terms: &[Term<T>]) -> Vec<Term<T>> {
    let mut work: Vec<Term<T>> = terms.to_vec();
    let mut done: Vec<Term<T>> = Vec::with_capacity(work.len());
    while let Some(t) = work.pop() {
        if t.cos_power >= 2 && t.inv_sin_power >= 2 {
            work.push(Term { cos_power: t.cos_power - 2, ..t });
            work.push(Term {
                coeff: -t.coeff,
                cos_power: t.cos_power - 2,
                inv_sin_power: t.inv_sin_power - 2,
                ..t
            });
        } else {
            done.push(t);
        }
    }
    merge_terms(done)
}

impl<T: Real> GaussianTermSum<T> {
    /// Sub-sum over the lattice sites the predicate keeps. The predicate must
    /// be sign symmetric to preserve the evaluation invariant.
    pub(crate) fn retain_lattice(&self, keep: impl Fn(i32) -> bool) -> GaussianTermSum<T> {
        GaussianTermSum {
            tau: self.tau,
            prefactor: self.prefactor,
            window: self.window,
            terms: self.terms.iter().filter(|t| keep(t.lattice_n)).copied().collect(),
        }
    }

    /// Full evaluation driver: sign normalization (the sum is even), window
    /// recentering, then the direct or small-angle path.
    ///
    /// `sin_weight` multiplies the result by sin^w θ with the weight absorbed
    /// into each term, which is what keeps integrands finite at θ = π.
    /// `with_gaussian = false` evaluates only the analytic cofactor
    /// Σ c θ^j sin^{−m} cos^k (legal for the n = 0 sub-sum), which is the
    /// kernel-to-flat-Gaussian ratio up to scalars: the Gaussian factors
    /// cancel symbolically instead of over- or underflowing.
    pub(crate) fn eval_path(
        &self,
        theta: Complex<T>,
        cfg: &EvalConfig<T>,
        sin_weight: i32,
        with_gaussian: bool,
    ) -> Complex<T> {
        let mut th = theta;
        let mut negated = false;
        if th.re < T::zero() || (th.re == T::zero() && th.im < T::zero()) {
            th = -th;
            negated = true;
        }
        let two_pi = T::PI() * lit::<T>(2.0);
        let shift = (th.re / two_pi).round().to_i64().unwrap_or(0);
        let theta_loc = Complex::new(th.re - two_pi * lit::<T>(shift as f64), th.im);
        let mut out = if theta_loc.norm_sqr() < cfg.theta_switch * cfg.theta_switch {
            self.eval_series(theta_loc, shift, cfg, sin_weight, with_gaussian)
        } else {
            self.eval_direct(theta_loc, shift, sin_weight, with_gaussian)
        };
        if negated && sin_weight % 2 != 0 {
            out = -out;
        }
        out
    }

    /// Plain term-by-term summation; adequate whenever |θ| is not small.
    fn eval_direct(
        &self,
        theta_loc: Complex<T>,
        shift: i64,
        sin_weight: i32,
        with_gaussian: bool,
    ) -> Complex<T> {
        let two_pi = T::PI() * lit::<T>(2.0);
        let s = theta_loc.sin();
        let c = theta_loc.cos();
        let half_inv_tau = (lit::<T>(2.0) * self.tau).recip();
        let mut acc = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            let nn = t.lattice_n as i64 - shift;
            let u = theta_loc - two_pi * lit::<T>(nn as f64);
            let mut v = u.powu(t.poly_power) * t.coeff;
            let sin_exp = sin_weight - t.inv_sin_power as i32;
            if sin_exp != 0 {
                v = v * s.powi(sin_exp);
            }
            if t.cos_power > 0 {
                v = v * c.powu(t.cos_power);
            }
            if with_gaussian {
                v = v * (-u * u * half_inv_tau).exp();
            }
            acc = acc + v;
        }
        acc * self.prefactor
    }

    /// Small-angle path.
    ///
    /// Terms are grouped by |n|. The group sum at lattice distance a is
    /// e^{−θ²/2τ} e^{−(2πa)²/2τ} H_a(θ) with H_a analytic and even near 0:
    /// evenness pairs +n with −n, and regularity holds because the recursion
    /// operator maps even entire functions to even functions analytic on
    /// |θ| < π (the sine zero at 0 is always matched by a derivative zero).
    /// So H_a is expanded: polynomial and recentred-exponential factors times
    /// inverse powers of sin θ / θ, the removable θ^{−M} cleared by a
    /// coefficient shift, spurious odd powers dropped.
    fn eval_series(
        &self,
        theta_loc: Complex<T>,
        shift: i64,
        cfg: &EvalConfig<T>,
        sin_weight: i32,
        with_gaussian: bool,
    ) -> Complex<T> {
        let two_pi = T::PI() * lit::<T>(2.0);
        let half_inv_tau = (lit::<T>(2.0) * self.tau).recip();
        let n_eff = (self.window as i64 - shift.abs()).max(0);

        let mut groups: std::collections::BTreeMap<u32, Vec<(&Term<T>, i64)>> =
            std::collections::BTreeMap::new();
        for t in &self.terms {
            let nn = t.lattice_n as i64 - shift;
            if nn.abs() > n_eff {
                // outside the symmetric recentred window; within the
                // truncation certificate by construction
                continue;
            }
            groups.entry(nn.unsigned_abs() as u32).or_default().push((t, nn));
        }

        let mut total = Complex::new(T::zero(), T::zero());
        for (a, members) in &groups {
            let gauss_site = if *a == 0 {
                T::one()
            } else {
                let dist = two_pi * lit::<T>(*a as f64);
                (-dist * dist * half_inv_tau).exp()
            };
            if gauss_site == T::zero() {
                continue; // group underflows to an exact zero
            }
            let balanced = members.iter().filter(|(_, nn)| *nn > 0).count()
                == members.iter().filter(|(_, nn)| *nn < 0).count();
            if !balanced {
                // one-sided group (possible only for filtered sums evaluated
                // far outside their window); the even expansion does not
                // apply, but the site Gaussian is tiny there and direct
                // summation is safe
                for (t, nn) in members {
                    let u = theta_loc - two_pi * lit::<T>(*nn as f64);
                    let s = theta_loc.sin();
                    let c = theta_loc.cos();
                    let mut v = u.powu(t.poly_power) * t.coeff;
                    let sin_exp = -(t.inv_sin_power as i32);
                    if sin_exp != 0 {
                        v = v * s.powi(sin_exp);
                    }
                    if t.cos_power > 0 {
                        v = v * c.powu(t.cos_power);
                    }
                    if with_gaussian {
                        v = v * (-u * u * half_inv_tau).exp();
                    }
                    total = total + v;
                }
                continue;
            }

            let m_max = members.iter().map(|(t, _)| t.inv_sin_power).max().unwrap_or(0);
            let k_max = members.iter().map(|(t, _)| t.cos_power).max().unwrap_or(0);
            let order = cfg.series_order + m_max as usize;

            let sinv = Series::<T>::sinc(order).recip();
            let mut sinv_pows: Vec<Series<T>> = Vec::with_capacity(m_max as usize + 1);
            let mut cos_pows: Vec<Series<T>> = Vec::with_capacity(k_max as usize + 1);
            for m in 0..=m_max {
                sinv_pows.push(if m == 0 {
                    Series::shifted_monomial(order, T::zero(), 0)
                } else {
                    sinv_pows[m as usize - 1].mul(&sinv)
                });
            }
            let cos_series = Series::<T>::cos(order);
            for k in 0..=k_max {
                cos_pows.push(if k == 0 {
                    Series::shifted_monomial(order, T::zero(), 0)
                } else {
                    cos_pows[k as usize - 1].mul(&cos_series)
                });
            }

            let mut b = Series::<T>::zero(order);
            for (t, nn) in members {
                let site = two_pi * lit::<T>(*nn as f64);
                let mut fac = Series::shifted_monomial(order, -site, t.poly_power);
                if t.inv_sin_power > 0 {
                    fac = fac.mul(&sinv_pows[t.inv_sin_power as usize]);
                }
                if t.cos_power > 0 {
                    fac = fac.mul(&cos_pows[t.cos_power as usize]);
                }
                if *a != 0 {
                    // e^{−u²/2τ} = site gaussian · e^{(2πn/τ)θ} · e^{−θ²/2τ}
                    fac = fac.mul(&Series::exp_linear(order, site / self.tau));
                }
                let up = (m_max - t.inv_sin_power) as usize;
                b.add_assign_scaled(&fac.shift_up(up), Complex::new(t.coeff, T::zero()));
            }
            // clear the removable theta^{-m_max} and the odd powers both of
            // which vanish identically for a balanced group
            let mut q = b.shift_down(m_max as usize);
            q.drop_odd_powers();
            let mut val = q.eval(theta_loc);
            if with_gaussian {
                val = val * (-theta_loc * theta_loc * half_inv_tau).exp() * gauss_site;
            } else {
                debug_assert_eq!(*a, 0, "cofactor evaluation is defined for the n = 0 sum");
            }
            total = total + val;
        }

        let mut out = total * self.prefactor;
        if sin_weight != 0 {
            out = out * theta_loc.sin().powi(sin_weight);
        }
        out
    }

    /// Upper bound on everything outside the recentred window, valid for
    /// |Re θ| <= π after recentering and |Im θ| <= im.
    ///
    /// The first dropped site sits at |Re u| >= 2π(N+1) − π; its Gaussian
    /// bounds the whole tail up to a factor 2, and the term mass multiplies
    /// polynomial and trig factors at their worst. Near the zeros of sin the
    /// floor sin(θ_switch) stands in for |sin θ|: the dropped pair sums are
    /// regular there, and on |θ| <= θ_switch the maximum principle bounds
    /// them by their size on the circle |θ| = θ_switch.
    fn truncation_bound(&self, sin_abs: T, im: T, cfg: &EvalConfig<T>) -> T {
        let two_pi = T::PI() * lit::<T>(2.0);
        let gap = two_pi * lit::<T>((self.window + 1) as f64) - T::PI();
        let expo = -(gap * gap - im * im) / (lit::<T>(2.0) * self.tau);
        let site = expo.exp();
        if site == T::zero() {
            return T::zero();
        }
        let u_max = gap + two_pi;
        let sin_floor = sin_abs.max(cfg.theta_switch.sin());
        let cos_max = im.cosh();
        let mut mass = T::zero();
        for t in &self.terms {
            mass = mass
                + t.coeff.abs()
                    * u_max.powi(t.poly_power as i32)
                    * sin_floor.powi(-(t.inv_sin_power as i32))
                    * cos_max.powi(t.cos_power as i32);
        }
        self.prefactor.abs() * mass * site * lit::<T>(4.0)
    }
}

/// The S^dim heat kernel ready for repeated evaluation at one τ.
#[derive(Debug, Clone)]
pub struct HeatKernel<T> {
    sum: GaussianTermSum<T>,
    dim: u32,
    config: EvalConfig<T>,
}

impl<T: Real> HeatKernel<T> {
    /// Builds the angle form by repeated recursion from the circle kernel,
    /// growing the lattice window until the truncation certificate reaches
    /// the configured tolerance.
    pub fn new(dim: u32, tau: T, config: &EvalConfig<T>) -> Result<Self> {
        check_dim(dim)?;
        check_tau(tau)?;
        let mut window = config.window.max(1);
        loop {
            let mut sum = kernel_d1(tau, window)?;
            let mut d = 1;
            while d + 2 <= dim {
                sum = recursion_step(&sum, d);
                d += 2;
            }
            let bound = sum.truncation_bound(config.theta_switch.sin(), config.max_im, config);
            if bound <= config.tolerance {
                return Ok(HeatKernel { sum, dim, config: config.clone() });
            }
            window += 2;
            if window > 64 {
                return Err(Error::TruncationCertificate {
                    bound: bound.to_f64().unwrap_or(f64::NAN),
                    tolerance: config.tolerance.to_f64().unwrap_or(f64::NAN),
                    window,
                });
            }
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn tau(&self) -> T {
        self.sum.tau
    }

    /// Lattice window the certificate settled on.
    pub fn window(&self) -> u32 {
        self.sum.window
    }

    pub fn term_sum(&self) -> &GaussianTermSum<T> {
        &self.sum
    }

    fn check_theta(&self, theta: Complex<T>) -> Result<()> {
        if !(theta.re.is_finite() && theta.im.is_finite()) {
            return Err(Error::InvalidParameter { name: "theta", value: f64::NAN });
        }
        if theta.im.abs() > self.config.max_im {
            // outside the strip the window certificate covers
            return Err(Error::TruncationCertificate {
                bound: f64::INFINITY,
                tolerance: self.config.tolerance.to_f64().unwrap_or(f64::NAN),
                window: self.sum.window,
            });
        }
        Ok(())
    }

    /// Kernel value at a complex angle.
    pub fn eval(&self, theta: Complex<T>) -> Result<Complex<T>> {
        self.check_theta(theta)?;
        Ok(self.sum.eval_path(theta, &self.config, 0, true))
    }

    /// Kernel value together with the certified bound on the dropped lattice
    /// tail at this angle.
    pub fn eval_with_bound(&self, theta: Complex<T>) -> Result<(Complex<T>, T)> {
        self.check_theta(theta)?;
        let value = self.sum.eval_path(theta, &self.config, 0, true);
        let bound =
            self.sum.truncation_bound(theta.sin().norm(), theta.im.abs(), &self.config);
        Ok((value, bound))
    }

    /// Kernel times sin^w θ at a real angle, each term absorbing the weight;
    /// finite all the way to θ = π, where the bare terms would blow up.
    pub(crate) fn weighted_real(&self, theta: T, sin_weight: i32) -> T {
        self.sum
            .eval_path(Complex::new(theta, T::zero()), &self.config, sin_weight, true)
            .re
    }

    pub(crate) fn config(&self) -> &EvalConfig<T> {
        &self.config
    }
}

/// One-shot kernel evaluation.
pub fn eval_kernel<T: Real>(
    dim: u32,
    tau: T,
    theta: Complex<T>,
    config: &EvalConfig<T>,
) -> Result<Complex<T>> {
    HeatKernel::new(dim, tau, config)?.eval(theta)
}

/// Integrates the kernel over S^dim: the surface measure in the angle is
/// A_{dim−1} sin^{dim−1}θ dθ on [0, π]. Exact value is 1 for every τ.
pub fn normalization_integral<T: Real>(dim: u32, tau: T, quadrature_tol: T) -> Result<T> {
    if !(quadrature_tol.is_finite() && quadrature_tol > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "quadrature_tol",
            value: quadrature_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let kernel = HeatKernel::new(dim, tau, &EvalConfig::default())?;
    let area = unit_sphere_area::<T>(dim - 1);
    let weight = (dim - 1) as i32;
    let f = |theta: T| Complex::new(kernel.weighted_real(theta, weight), T::zero());
    let raw = adaptive_simpson(&f, T::zero(), T::PI(), quadrature_tol / area)?;
    Ok(raw.re * area)
}
