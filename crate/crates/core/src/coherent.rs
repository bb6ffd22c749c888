//! Coherent-state wavefunctions on the sphere and their large-radius
//! Gaussian limit.
//!
//! A flat label (x₀, p₀) is carried onto the sphere chart, complexified
//! into the label a, and the wavefunction at a chart point x is the
//! analytically continued kernel at the complex separation angle between
//! a and x. As the radius grows at fixed flat data, r^{−d} times that
//! value approaches the flat coherent state
//!
//!   (mω/2πħ)^{d/2} exp{−(z−x)²/(2ħ/mω)},   z = x₀ + i p₀/(mω),
//!
//! with (z−x)² the complex sum of squared components. The error is
//! second order in 1/r; the studies here measure it on fixed grids,
//! together with the spatial width of the state.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit;
use crate::geometry::{
    complex_angle, embed_momentum, embed_position, ComplexSpherePoint, PhasePoint,
    PhysicalParams,
};
use crate::heatkernel::{check_dim, EvalConfig, HeatKernel};
use crate::phase_space::classical_label;
use crate::scalar::{lit, Real};

/// Flat phase-space label (x₀, p₀) of a coherent state; the complex
/// combination z = x₀ + i p₀/(mω) is derived on demand, never stored, so
/// it recomputes exactly from the fields.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatLabel<T> {
    x0: Vec<T>,
    p0: Vec<T>,
}

impl<T: Real> FlatLabel<T> {
    pub fn new(x0: Vec<T>, p0: Vec<T>) -> Result<Self> {
        if p0.len() != x0.len() {
            return Err(Error::VectorLength { expected: x0.len(), got: p0.len() });
        }
        check_dim(x0.len() as u32)?;
        for &v in x0.iter().chain(&p0) {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "label",
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(FlatLabel { x0, p0 })
    }

    pub fn dim(&self) -> u32 {
        self.x0.len() as u32
    }

    pub fn x0(&self) -> &[T] {
        &self.x0
    }

    pub fn p0(&self) -> &[T] {
        &self.p0
    }

    /// z = x₀ + i p₀/(mω), componentwise.
    pub fn z(&self, params: &PhysicalParams<T>) -> Vec<Complex<T>> {
        let scale = (params.mass * params.omega).recip();
        self.x0
            .iter()
            .zip(&self.p0)
            .map(|(&x, &p)| Complex::new(x, p * scale))
            .collect()
    }
}

/// Label and kernel pinned to one radius so grid studies pay the setup
/// once per radius instead of once per point.
struct PreparedState<T: Real> {
    kernel: HeatKernel<T>,
    a: ComplexSpherePoint<T>,
}

impl<T: Real> PreparedState<T> {
    fn new(label: &FlatLabel<T>, params: &PhysicalParams<T>) -> Result<Self> {
        let kernel = HeatKernel::new(label.dim(), params.tau, &EvalConfig::default())?;
        let x0_amb = embed_position(label.x0(), params)?;
        let p0_amb = embed_momentum(label.x0(), label.p0(), params)?;
        let point = PhasePoint::new(x0_amb, p0_amb, label.dim(), params)?;
        let a = classical_label(&point, params)?;
        Ok(PreparedState { kernel, a })
    }

    fn eval(&self, x: &[T], params: &PhysicalParams<T>) -> Result<Complex<T>> {
        let x_amb = embed_position(x, params)?;
        let angle = complex_angle(&self.a, &x_amb, params)?;
        self.kernel.eval(angle.theta)
    }
}

/// Coherent-state wavefunction at chart point x: the kernel at the complex
/// separation angle between the complexified label and x. Real positive
/// whenever p₀ = 0 and x is real (the angle is then real).
pub fn coherent_state<T: Real>(
    label: &FlatLabel<T>,
    x: &[T],
    params: &PhysicalParams<T>,
) -> Result<Complex<T>> {
    PreparedState::new(label, params)?.eval(x, params)
}

/// Flat coherent state in the limit form
/// (mω/2πħ)^{d/2} exp{−(z−x)²/(2ħ/mω)} with the complex square
/// (z−x)² = Σ_k (z_k − x_k)².
pub fn gaussian_limit<T: Real>(
    label: &FlatLabel<T>,
    x: &[T],
    params: &PhysicalParams<T>,
) -> Result<Complex<T>> {
    if x.len() != label.x0.len() {
        return Err(Error::VectorLength { expected: label.x0.len(), got: x.len() });
    }
    let z = label.z(params);
    let mut sq = Complex::new(T::zero(), T::zero());
    for (zk, &xk) in z.iter().zip(x) {
        let d = zk - xk;
        sq = sq + d * d;
    }
    let m_omega = params.mass * params.omega;
    let scale = (m_omega / (T::PI() * lit::<T>(2.0) * params.hbar))
        .powf(lit::<T>(0.5 * label.dim() as f64));
    Ok((-sq * m_omega / (params.hbar * lit::<T>(2.0))).exp() * scale)
}

/// The same flat state written as a real Gaussian about x₀ times the plane
/// wave e^{i p₀·x/ħ} and the label constant
/// c_z = exp(−i p₀·x₀/ħ) exp(p₀²/(2ħmω)). Algebraically identical to
/// [`gaussian_limit`]; evaluated independently so the two can witness each
/// other.
pub fn gaussian_alt<T: Real>(
    label: &FlatLabel<T>,
    x: &[T],
    params: &PhysicalParams<T>,
) -> Result<Complex<T>> {
    if x.len() != label.x0.len() {
        return Err(Error::VectorLength { expected: label.x0.len(), got: x.len() });
    }
    let m_omega = params.mass * params.omega;
    let hbar = params.hbar;
    let mut dist_sq = T::zero();
    let mut p_dot_x = T::zero();
    let mut p_dot_x0 = T::zero();
    let mut p_sq = T::zero();
    for ((&xk, &x0k), &pk) in x.iter().zip(&label.x0).zip(&label.p0) {
        dist_sq = dist_sq + (xk - x0k) * (xk - x0k);
        p_dot_x = p_dot_x + pk * xk;
        p_dot_x0 = p_dot_x0 + pk * x0k;
        p_sq = p_sq + pk * pk;
    }
    let scale = (m_omega / (T::PI() * lit::<T>(2.0) * hbar))
        .powf(lit::<T>(0.5 * label.dim() as f64));
    let c_z = Complex::new(T::zero(), -p_dot_x0 / hbar).exp()
        * (p_sq / (lit::<T>(2.0) * hbar * m_omega)).exp();
    let envelope = (-dist_sq * m_omega / (lit::<T>(2.0) * hbar)).exp();
    let wave = Complex::new(T::zero(), p_dot_x / hbar).exp();
    Ok(c_z * wave * envelope * scale)
}

/// Centered cube grid: `points_per_axis` evenly spaced values per axis
/// across [x0_k − half_side, x0_k + half_side], in lexicographic order.
pub fn default_study_grid<T: Real>(
    x0: &[T],
    half_side: T,
    points_per_axis: u32,
) -> Vec<Vec<T>> {
    let n = points_per_axis.max(1);
    let step = if n > 1 {
        half_side * lit::<T>(2.0) / T::from_u32(n - 1).expect("grid count fits the scalar")
    } else {
        T::zero()
    };
    let mut grid = Vec::with_capacity((n as usize).pow(x0.len() as u32));
    let mut index = vec![0u32; x0.len()];
    loop {
        let point: Vec<T> = x0
            .iter()
            .zip(&index)
            .map(|(&c, &i)| c - half_side + step * T::from_u32(i).expect("fits"))
            .collect();
        grid.push(point);
        // odometer increment over the mixed-radix index vector
        let mut axis = x0.len();
        loop {
            if axis == 0 {
                return grid;
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < n {
                break;
            }
            index[axis] = 0;
        }
    }
}

/// One radius of the limit study: the dimensionless time, the max-norm
/// distance between r^{−d}·state and the flat Gaussian over the grid, and
/// the running log-log slope of that error against r (None until two radii
/// are in; the limit makes it approach −2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitStudyRow<T> {
    pub radius: T,
    pub tau: T,
    pub max_abs_err: T,
    pub fitted_slope: Option<T>,
}

/// Sweeps the radius at fixed flat data and measures the approach of
/// r^{−d}·coherent_state to gaussian_limit in max norm over the grid.
/// ħ, m, ω come from `base`; its radius is replaced by each entry of
/// `radii` in turn. Grid cells evaluate in parallel; the max reduction is
/// order-independent, so results are deterministic.
pub fn limit_error_study<T: Real>(
    label: &FlatLabel<T>,
    x_grid: &[Vec<T>],
    radii: &[T],
    base: &PhysicalParams<T>,
) -> Result<Vec<LimitStudyRow<T>>> {
    if x_grid.is_empty() || radii.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut rows = Vec::with_capacity(radii.len());
    let mut log_r: Vec<T> = Vec::with_capacity(radii.len());
    let mut log_err: Vec<T> = Vec::with_capacity(radii.len());
    for &r in radii {
        let params = PhysicalParams::new(base.hbar, base.mass, base.omega, r)?;
        let state = PreparedState::new(label, &params)?;
        let rescale = r.powi(-(label.dim() as i32));
        let errs: Vec<T> = x_grid
            .par_iter()
            .map(|x| -> Result<T> {
                let on_sphere = state.eval(x, &params)? * rescale;
                let flat = gaussian_limit(label, x, &params)?;
                Ok((on_sphere - flat).norm())
            })
            .collect::<Result<_>>()?;
        let max_abs_err =
            errs.into_iter().fold(T::zero(), |acc, e| if e > acc { e } else { acc });
        let mut row = LimitStudyRow { radius: r, tau: params.tau, max_abs_err, fitted_slope: None };
        if max_abs_err > T::zero() {
            log_r.push(r.ln());
            log_err.push(max_abs_err.ln());
            if log_r.len() >= 2 {
                row.fitted_slope = Some(fit::line(&log_r, &log_err)?.slope);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Spatial width measurement of the state density on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthReport<T> {
    /// Standard deviation of each coordinate under the grid-sampled
    /// density |r^{−d}·state|².
    pub widths: Vec<T>,
    /// widths / r, the angular footprint on the sphere.
    pub width_over_radius: Vec<T>,
    /// Set when the grid looks too coarse or too narrow to trust the
    /// reading; the measurement is still returned.
    pub grid_warning: Option<String>,
}

/// Samples |r^{−d}·coherent_state|² on the grid and reports the standard
/// deviation of each coordinate. With p₀ = 0 and r large the density is a
/// Gaussian of per-axis deviation √(ħ/2mω), so width/r approaches
/// √(τ/2).
pub fn measure_width<T: Real>(
    label: &FlatLabel<T>,
    params: &PhysicalParams<T>,
    x_grid: &[Vec<T>],
) -> Result<WidthReport<T>> {
    let dim = label.dim() as usize;
    if x_grid.is_empty() {
        return Err(Error::TooFewSamples { needed: 2, got: 0 });
    }
    let state = PreparedState::new(label, params)?;
    let rescale = params.radius.powi(-(label.dim() as i32));
    let weights: Vec<T> = x_grid
        .par_iter()
        .map(|x| -> Result<T> {
            if x.len() != dim {
                return Err(Error::VectorLength { expected: dim, got: x.len() });
            }
            Ok((state.eval(x, params)? * rescale).norm_sqr())
        })
        .collect::<Result<_>>()?;
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::QuadratureFailure {
            tolerance: 0.0,
            residual: total.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut widths = Vec::with_capacity(dim);
    let mut warnings: Vec<String> = Vec::new();
    for axis in 0..dim {
        let mean = x_grid
            .iter()
            .zip(&weights)
            .map(|(x, &w)| x[axis] * w)
            .sum::<T>()
            / total;
        let var = x_grid
            .iter()
            .zip(&weights)
            .map(|(x, &w)| (x[axis] - mean) * (x[axis] - mean) * w)
            .sum::<T>()
            / total;
        let width = var.sqrt();

        let mut lo = x_grid[0][axis];
        let mut hi = lo;
        let mut spacing = T::infinity();
        for x in x_grid {
            let v = x[axis];
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
            let gap = (v - mean).abs();
            // smallest nonzero distance from the mean bounds the grid pitch
            if gap > width * lit::<T>(1e-9) && gap < spacing {
                spacing = gap;
            }
        }
        if hi - lo < width * lit::<T>(4.0) {
            warnings.push(format!(
                "axis {axis}: grid span {} is under four measured widths",
                (hi - lo).to_f64().unwrap_or(f64::NAN)
            ));
        }
        if spacing > width {
            warnings.push(format!(
                "axis {axis}: grid pitch exceeds the measured width {}",
                width.to_f64().unwrap_or(f64::NAN)
            ));
        }
        widths.push(width);
    }
    let width_over_radius = widths.iter().map(|&w| w / params.radius).collect();
    Ok(WidthReport {
        widths,
        width_over_radius,
        grid_warning: if warnings.is_empty() { None } else { Some(warnings.join("; ")) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heatkernel::{eval_kernel, spectral_kernel};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn natural(r: f64) -> PhysicalParams<f64> {
        PhysicalParams::natural(r).unwrap()
    }

    #[test]
    fn label_z_recomputes_exactly() {
        let params = PhysicalParams::new(1.0, 2.0, 0.5, 10.0).unwrap();
        let label = FlatLabel::new(vec![0.3, -0.1, 0.7], vec![0.2, 0.4, -0.5]).unwrap();
        let z = label.z(&params);
        for k in 0..3 {
            assert_eq!(z[k].re, label.x0()[k]);
            assert_eq!(z[k].im, label.p0()[k] / (2.0 * 0.5));
        }
    }

    #[test]
    fn label_validation_rejects_bad_shapes() {
        assert!(FlatLabel::new(vec![0.1, 0.2], vec![0.0, 0.0]).is_err());
        assert!(FlatLabel::new(vec![0.1], vec![0.0, 0.0]).is_err());
        assert!(FlatLabel::new(vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn coincident_point_hits_the_kernel_peak() {
        let params = natural(12.0);
        let label = FlatLabel::new(vec![0.4, 0.0, -0.2], vec![0.0; 3]).unwrap();
        let value = coherent_state(&label, label.x0(), &params).unwrap();
        let peak = eval_kernel(
            3,
            params.tau,
            Complex::new(0.0, 0.0),
            &EvalConfig::default(),
        )
        .unwrap();
        assert_eq!(value.im, 0.0);
        assert!((value.re - peak.re).abs() <= 1e-12 * peak.re);
    }

    #[test]
    fn zero_momentum_states_are_real_and_positive() {
        let params = natural(9.0);
        let label = FlatLabel::new(vec![0.3], vec![0.0]).unwrap();
        for &x in &[-1.5, -0.4, 0.0, 0.3, 0.9, 2.0] {
            let v = coherent_state(&label, &[x], &params).unwrap();
            assert!(v.re > 0.0);
            assert!(v.im.abs() <= 1e-15 * v.re);
        }
    }

    #[test]
    fn spectral_oracle_confirms_a_moving_state() {
        // independent route: same angle, kernel summed by eigenfunctions
        let params = natural(50.0);
        let label = FlatLabel::new(vec![0.3, 0.0, 0.0], vec![0.0, 0.2, 0.0]).unwrap();
        let x = [0.1, 0.1, 0.0];
        let value = coherent_state(&label, &x, &params).unwrap();

        let x0_amb = embed_position(label.x0(), &params).unwrap();
        let p0_amb = embed_momentum(label.x0(), label.p0(), &params).unwrap();
        let point = PhasePoint::new(x0_amb, p0_amb, 3, &params).unwrap();
        let a = classical_label(&point, &params).unwrap();
        let x_amb = embed_position(&x, &params).unwrap();
        let theta = complex_angle(&a, &x_amb, &params).unwrap().theta;
        let oracle = spectral_kernel(3, params.tau, theta).unwrap();
        assert!((value - oracle).norm() <= 1e-9 * oracle.norm());
    }

    #[test]
    fn gaussian_limit_reference_values() {
        let params = natural(30.0);
        let resting = FlatLabel::new(vec![0.2, -0.1, 0.4], vec![0.0; 3]).unwrap();
        let at_center = gaussian_limit(&resting, resting.x0(), &params).unwrap();
        let scale = (2.0 * std::f64::consts::PI).powf(-1.5);
        assert!((at_center.re - scale).abs() <= 1e-15 * scale);
        assert_eq!(at_center.im, 0.0);

        // z² = −1 here, so the exponent is +1/2
        let moving = FlatLabel::new(vec![0.0; 3], vec![1.0, 0.0, 0.0]).unwrap();
        let at_origin = gaussian_limit(&moving, &[0.0; 3], &params).unwrap();
        let expect = scale * 0.5f64.exp();
        assert!((at_origin.re - expect).abs() <= 1e-14 * expect);
        assert!(at_origin.im.abs() <= 1e-16 * expect);
    }

    #[test]
    fn the_two_gaussian_forms_agree_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ec7);
        for _ in 0..1000 {
            let dim = if rng.gen::<bool>() { 1usize } else { 3 };
            let params = PhysicalParams::new(
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.5..2.0),
                rng.gen_range(5.0..50.0),
            )
            .unwrap();
            let x0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let label = FlatLabel::new(x0, p0).unwrap();
            let lim = gaussian_limit(&label, &x, &params).unwrap();
            let alt = gaussian_alt(&label, &x, &params).unwrap();
            assert!(
                (lim - alt).norm() <= 1e-12 * lim.norm(),
                "lim {lim} alt {alt}"
            );
        }
    }

    #[test]
    fn alt_form_peaks_at_the_label_position() {
        let params = natural(40.0);
        let label = FlatLabel::new(vec![0.5], vec![0.7]).unwrap();
        let grid = default_study_grid(label.x0(), 2.0, 17);
        let mut best = (f64::MIN, f64::NAN);
        for x in &grid {
            let v = gaussian_alt(&label, x, &params).unwrap().norm();
            if v > best.0 {
                best = (v, x[0]);
            }
        }
        assert_eq!(best.1, 0.5);
    }

    #[test]
    fn study_grid_is_a_lexicographic_cube() {
        let grid = default_study_grid(&[1.0, -1.0], 1.0, 3);
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[0], vec![0.0, -2.0]);
        assert_eq!(grid[1], vec![0.0, -1.0]);
        assert_eq!(grid[4], vec![1.0, -1.0]);
        assert_eq!(grid[8], vec![2.0, 0.0]);
    }

    #[test]
    fn limit_study_converges_at_second_order() {
        let label = FlatLabel::new(vec![0.3, 0.0, 0.0], vec![0.0, 0.2, 0.0]).unwrap();
        let grid = default_study_grid(label.x0(), 2.0, 5);
        let radii = [20.0, 40.0, 80.0, 160.0];
        let rows =
            limit_error_study(&label, &grid, &radii, &natural(20.0)).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].max_abs_err < pair[0].max_abs_err);
        }
        let slope = rows.last().unwrap().fitted_slope.unwrap();
        assert!((-2.3..=-1.7).contains(&slope), "slope {slope}");
        assert!(rows[0].fitted_slope.is_none());
    }

    #[test]
    fn circle_limit_study_also_converges() {
        let label = FlatLabel::new(vec![0.3], vec![0.2]).unwrap();
        let grid = default_study_grid(label.x0(), 2.0, 9);
        let rows = limit_error_study(&label, &grid, &[20.0, 40.0, 80.0, 160.0], &natural(20.0))
            .unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].max_abs_err < pair[0].max_abs_err);
        }
        let slope = rows.last().unwrap().fitted_slope.unwrap();
        assert!((-2.3..=-1.7).contains(&slope), "slope {slope}");
    }

    #[test]
    fn converged_phase_matches_the_plane_wave_form() {
        let label = FlatLabel::new(vec![0.3, 0.0, 0.0], vec![0.0, 0.2, 0.0]).unwrap();
        let params = natural(320.0);
        let rescale = 320.0f64.powi(-3);
        for x in [[0.3, 0.0, 0.0], [0.8, 0.5, -0.4], [-0.7, 1.0, 0.3]] {
            let scaled = coherent_state(&label, &x, &params).unwrap() * rescale;
            let alt = gaussian_alt(&label, &x, &params).unwrap();
            let phase_gap = (scaled / alt).arg().abs();
            assert!(phase_gap <= 1e-3, "phase gap {phase_gap}");
        }
    }

    #[test]
    fn width_matches_the_ground_state_gaussian() {
        let label = FlatLabel::new(vec![0.3, 0.0, 0.0], vec![0.0; 3]).unwrap();
        let params = natural(200.0);
        let grid = default_study_grid(label.x0(), 2.0, 9);
        let report = measure_width(&label, &params, &grid).unwrap();
        let target = 0.5f64.sqrt();
        let footprint_target = (params.tau / 2.0).sqrt();
        for axis in 0..3 {
            assert!(
                (report.widths[axis] - target).abs() <= 0.02 * target,
                "axis {axis}: width {}",
                report.widths[axis]
            );
            assert!(
                (report.width_over_radius[axis] - footprint_target).abs()
                    <= 0.02 * footprint_target
            );
        }
        assert!(report.grid_warning.is_none(), "{:?}", report.grid_warning);
    }

    #[test]
    fn width_is_translation_invariant() {
        let params = natural(200.0);
        let here = FlatLabel::new(vec![0.0], vec![0.0]).unwrap();
        let there = FlatLabel::new(vec![0.8], vec![0.0]).unwrap();
        let w_here = measure_width(&here, &params, &default_study_grid(&[0.0], 2.0, 9))
            .unwrap()
            .widths[0];
        let w_there = measure_width(&there, &params, &default_study_grid(&[0.8], 2.0, 9))
            .unwrap()
            .widths[0];
        assert!((w_here - w_there).abs() <= 1e-3 * w_here);
    }

    #[test]
    fn degenerate_grids_raise_the_warning_flag() {
        let label = FlatLabel::new(vec![0.0], vec![0.0]).unwrap();
        let params = natural(200.0);
        let narrow = measure_width(&label, &params, &default_study_grid(&[0.0], 0.5, 9))
            .unwrap();
        assert!(narrow.grid_warning.is_some());
        let coarse = measure_width(&label, &params, &default_study_grid(&[0.0], 2.0, 3))
            .unwrap();
        assert!(coarse.grid_warning.is_some());
    }
}
