//! Desk-scale check of the annihilation-operator construction on the
//! circle, in the Fourier basis truncated to modes |n| ≤ N.
//!
//! The multiplication operators X₁ = r cos φ, X₂ = r sin φ act on Fourier
//! modes as shifts n → n ± 1 with weights r/2 (∓i r/2 for X₂). Conjugating
//! by E = e^{τ diag(n²)/2} gives A_k = E^{−1} X_k E, entrywise
//! (A_k)_{m,n} = (X_k)_{m,n} e^{τ(n²−m²)/2}. In the full basis the A_k
//! commute, satisfy A₁² + A₂² = r² I, and have the coherent vectors
//! ψ̂_n = (1/2π) e^{−τn²/2} e^{−inα} as joint eigenvectors with eigenvalues
//! (r cos α, r sin α); truncation breaks all three near the cutoff, so the
//! checks here restrict to interior modes and report the edge effects
//! (dropped coupling mass, residuals) instead of hiding them.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::ComplexSpherePoint;
use crate::scalar::{lit, Real};

/// Relative coefficient mass allowed at the last kept mode before the
/// truncation is declared too small for the requested label.
pub const TAIL_TOL: f64 = 1e-12;

/// Fourier basis on the circle truncated to modes n = −N…N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedBasis<T> {
    n_max: u32,
    tau: T,
    radius: T,
}

impl<T: Real> TruncatedBasis<T> {
    /// N ≥ 8; τ ≥ 0 (τ = 0 degenerates to the bare multiplication
    /// operators, which is a useful check in itself); r > 0.
    pub fn new(n_max: u32, tau: T, radius: T) -> Result<Self> {
        if n_max < 8 {
            return Err(Error::BasisTooSmall { min: 8, got: n_max });
        }
        if !(tau.is_finite() && tau >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !(radius.is_finite() && radius > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(TruncatedBasis { n_max, tau, radius })
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Matrix size 2N + 1.
    pub fn modes(&self) -> usize {
        2 * self.n_max as usize + 1
    }

    /// Row/column index of mode n.
    pub fn index_of(&self, n: i64) -> usize {
        (n + self.n_max as i64) as usize
    }
}

/// Dense square complex matrix, row major. Sized for desks (≤ 121×121 in
/// every study here), so clarity beats sparsity.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    size: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(size: usize) -> Self {
        ComplexMatrix { size, data: vec![Complex::new(T::zero(), T::zero()); size * size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.size + col] = value;
    }

    pub fn mul(&self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.size, rhs.size);
        let mut out = ComplexMatrix::zeros(self.size);
        for i in 0..self.size {
            for k in 0..self.size {
                let lhs = self.get(i, k);
                if lhs.re.is_zero() && lhs.im.is_zero() {
                    continue;
                }
                for j in 0..self.size {
                    let v = out.get(i, j) + lhs * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.size, v.len());
        (0..self.size)
            .map(|i| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..self.size {
                    acc = acc + self.get(i, j) * v[j];
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.size, rhs.size);
        let mut out = ComplexMatrix::zeros(self.size);
        for (o, (&a, &b)) in out.data.iter_mut().zip(self.data.iter().zip(&rhs.data)) {
            *o = a - b;
        }
        out
    }

    pub fn conj_transpose(&self) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Square sub-block over rows and columns lo..=hi.
    pub fn sub_block(&self, lo: usize, hi: usize) -> ComplexMatrix<T> {
        assert!(lo <= hi && hi < self.size);
        let size = hi - lo + 1;
        let mut out = ComplexMatrix::zeros(size);
        for i in 0..size {
            for j in 0..size {
                out.set(i, j, self.get(lo + i, lo + j));
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }
}

/// The two conjugated shift operators, plus the Frobenius mass of the
/// couplings the cutoff discarded (outputs at modes ±(N+1)); dropping
/// them is what makes the finite matrices only approximately satisfy the
/// full-basis identities.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPair<T> {
    pub a1: ComplexMatrix<T>,
    pub a2: ComplexMatrix<T>,
    pub dropped_mass: T,
}

/// Builds A₁, A₂ on the truncated basis: for each column n, outputs at
/// m = n ± 1 weighted r/2 (X₁) and ∓i r/2 (X₂), times the conjugation
/// factor e^{τ(n²−m²)/2}.
pub fn build_annihilation<T: Real>(basis: &TruncatedBasis<T>) -> OperatorPair<T> {
    let size = basis.modes();
    let n_max = basis.n_max as i64;
    let half_r = basis.radius * lit::<T>(0.5);
    let half_tau = basis.tau * lit::<T>(0.5);
    let mut a1 = ComplexMatrix::zeros(size);
    let mut a2 = ComplexMatrix::zeros(size);
    let mut dropped = T::zero();
    for n in -n_max..=n_max {
        let col = basis.index_of(n);
        // e^{τ(n² − (n±1)²)/2}
        let up = (-half_tau * lit::<T>((2 * n + 1) as f64)).exp();
        let down = (half_tau * lit::<T>((2 * n - 1) as f64)).exp();
        let w_up = half_r * up;
        let w_down = half_r * down;
        if n + 1 <= n_max {
            let row = basis.index_of(n + 1);
            a1.set(row, col, Complex::new(w_up, T::zero()));
            a2.set(row, col, Complex::new(T::zero(), -w_up));
        } else {
            dropped = dropped + lit::<T>(2.0) * w_up * w_up;
        }
        if n - 1 >= -n_max {
            let row = basis.index_of(n - 1);
            a1.set(row, col, Complex::new(w_down, T::zero()));
            a2.set(row, col, Complex::new(T::zero(), w_down));
        } else {
            dropped = dropped + lit::<T>(2.0) * w_down * w_down;
        }
    }
    OperatorPair { a1, a2, dropped_mass: dropped.sqrt() }
}

/// Circle label a = (r cos α, r sin α) for a complex angle α; satisfies
/// the complex sphere constraint identically.
pub fn circle_label_from_angle<T: Real>(alpha: Complex<T>, radius: T) -> ComplexSpherePoint<T> {
    ComplexSpherePoint::new_unchecked(
        vec![alpha.cos() * radius, alpha.sin() * radius],
        1,
    )
}

/// Recovers the complex angle of a circle label from e^{iα} = (a₁ + i a₂)/r,
/// principal branch, and checks the label is on the complexified circle of
/// the basis radius.
fn label_angle<T: Real>(a: &ComplexSpherePoint<T>, basis: &TruncatedBasis<T>) -> Result<Complex<T>> {
    if a.dim != 1 {
        return Err(Error::DimensionRange { dim: a.dim, max: 1 });
    }
    let r = basis.radius;
    let r2 = r * r;
    let sum = a.a[0] * a.a[0] + a.a[1] * a.a[1];
    let defect = (sum - r2).norm();
    let tol = lit::<T>(1e-12) * r2;
    if defect > tol {
        return Err(Error::InconsistentLabel {
            defect: defect.to_f64().unwrap_or(f64::NAN),
            tolerance: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let i = Complex::new(T::zero(), T::one());
    let alpha = -i * ((a.a[0] + i * a.a[1]) / r).ln();
    Ok(alpha)
}

/// Fourier coefficients ψ̂_n = (1/2π) e^{−τn²/2} e^{−inα} of the coherent
/// vector for the circle label a, modes n = −N…N.
///
/// Errors when the relative coefficient mass still present at the last
/// kept mode, e^{−τN²/2} e^{|Im α| N}, exceeds 1e−12: the basis is too
/// small for this label and N must be raised.
pub fn coherent_coefficients<T: Real>(
    a: &ComplexSpherePoint<T>,
    basis: &TruncatedBasis<T>,
) -> Result<Vec<Complex<T>>> {
    let alpha = label_angle(a, basis)?;
    let n_max = basis.n_max as i64;
    let nf = lit::<T>(n_max as f64);
    let tail = (-basis.tau * nf * nf * lit::<T>(0.5) + alpha.im.abs() * nf).exp();
    if tail > lit::<T>(TAIL_TOL) {
        return Err(Error::CutoffTooSmall {
            mass: tail.to_f64().unwrap_or(f64::NAN),
            tolerance: TAIL_TOL,
        });
    }
    let norm = (T::PI() * lit::<T>(2.0)).recip();
    let half_tau = basis.tau * lit::<T>(0.5);
    Ok((-n_max..=n_max)
        .map(|n| {
            let nf = lit::<T>(n as f64);
            let gauss = (-half_tau * nf * nf).exp();
            // e^{−inα}
            let phase = (Complex::new(T::zero(), -nf) * alpha).exp();
            phase * (gauss * norm)
        })
        .collect())
}

fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// Relative eigenvector residuals ‖A_k ψ − a_k ψ‖ / ‖ψ‖ of the coherent
/// vector of the label a, with a_k the label components themselves.
pub fn eigen_residual<T: Real>(
    a: &ComplexSpherePoint<T>,
    basis: &TruncatedBasis<T>,
) -> Result<(T, T)> {
    let report = operator_report(a, basis)?;
    Ok((report.res1, report.res2))
}

/// Everything the operator desk check measures, in one record. The
/// extracted eigenvalues ⟨ψ, A_k ψ⟩/⟨ψ, ψ⟩ and the label components are
/// both reported, with their gap, rather than asserting they coincide:
/// near the cutoff they genuinely part ways.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorReport<T> {
    pub res1: T,
    pub res2: T,
    /// ‖(A₁² + A₂² − r²)ψ‖ / ‖ψ‖.
    pub sphere_residual: T,
    /// Frobenius norm of [A₁, A₂] restricted to modes |n| ≤ N/2.
    pub commutator_norm: T,
    pub dropped_mass: T,
    pub extracted_1: Complex<T>,
    pub extracted_2: Complex<T>,
    pub label_1: Complex<T>,
    pub label_2: Complex<T>,
    pub eigenvalue_gap_1: T,
    pub eigenvalue_gap_2: T,
}

/// Runs the full desk check for one circle label on one truncated basis.
pub fn operator_report<T: Real>(
    a: &ComplexSpherePoint<T>,
    basis: &TruncatedBasis<T>,
) -> Result<OperatorReport<T>> {
    let psi = coherent_coefficients(a, basis)?;
    let pair = build_annihilation(basis);
    let psi_norm = vec_norm(&psi);
    let label = [a.a[0], a.a[1]];

    let a1_psi = pair.a1.mul_vec(&psi);
    let a2_psi = pair.a2.mul_vec(&psi);

    let mut res = [T::zero(), T::zero()];
    let mut extracted = [Complex::new(T::zero(), T::zero()); 2];
    for (k, a_psi) in [&a1_psi, &a2_psi].into_iter().enumerate() {
        let defect: Vec<Complex<T>> = a_psi
            .iter()
            .zip(&psi)
            .map(|(&lhs, &c)| lhs - label[k] * c)
            .collect();
        res[k] = vec_norm(&defect) / psi_norm;
        let mut inner = Complex::new(T::zero(), T::zero());
        for (&lhs, &c) in a_psi.iter().zip(&psi) {
            inner = inner + c.conj() * lhs;
        }
        extracted[k] = inner / (psi_norm * psi_norm);
    }

    let r2 = basis.radius * basis.radius;
    let sphere_defect: Vec<Complex<T>> = pair
        .a1
        .mul_vec(&a1_psi)
        .iter()
        .zip(pair.a2.mul_vec(&a2_psi))
        .zip(&psi)
        .map(|((&u, v), &c)| u + v - c * r2)
        .collect();
    let sphere_residual = vec_norm(&sphere_defect) / psi_norm;

    let commutator = pair.a1.mul(&pair.a2).sub(&pair.a2.mul(&pair.a1));
    let half = (basis.n_max / 2) as i64;
    let commutator_norm = commutator
        .sub_block(basis.index_of(-half), basis.index_of(half))
        .frobenius_norm();

    Ok(OperatorReport {
        res1: res[0],
        res2: res[1],
        sphere_residual,
        commutator_norm,
        dropped_mass: pair.dropped_mass,
        extracted_1: extracted[0],
        extracted_2: extracted[1],
        label_1: label[0],
        label_2: label[1],
        eigenvalue_gap_1: (extracted[0] - label[0]).norm(),
        eigenvalue_gap_2: (extracted[1] - label[1]).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PhasePoint, PhysicalParams};
    use crate::heatkernel::{eval_kernel, EvalConfig};
    use crate::phase_space::classical_label;
    use proptest::prelude::*;

    type C = Complex<f64>;

    #[test]
    fn tau_zero_reduces_to_bare_multiplication() {
        let basis = TruncatedBasis::new(10, 0.0, 2.5).unwrap();
        let pair = build_annihilation(&basis);
        // self-adjoint multiplication operators: A_k equals its conjugate
        // transpose exactly when the conjugation weights are all 1
        assert_eq!(pair.a1, pair.a1.conj_transpose());
        assert_eq!(pair.a2, pair.a2.conj_transpose());
        let row = basis.index_of(4);
        let col = basis.index_of(3);
        assert_eq!(pair.a1.get(row, col), C::new(1.25, 0.0));
        assert_eq!(pair.a2.get(row, col), C::new(0.0, -1.25));
        assert_eq!(pair.a2.get(col, row), C::new(0.0, 1.25));
        assert_eq!(pair.dropped_mass, 2.5);
    }

    #[test]
    fn shift_entries_carry_the_conjugation_weights() {
        let tau = 0.5;
        let basis = TruncatedBasis::new(9, tau, 2.0).unwrap();
        let pair = build_annihilation(&basis);
        for n in [-3i64, 0, 4] {
            let up = pair.a1.get(basis.index_of(n + 1), basis.index_of(n));
            let expect = (-tau * (2 * n + 1) as f64 / 2.0).exp();
            assert!((up.re - expect).abs() <= 1e-15 * expect);
            assert_eq!(up.im, 0.0);
            let down = pair.a2.get(basis.index_of(n - 1), basis.index_of(n));
            let expect = (tau * (2 * n - 1) as f64 / 2.0).exp();
            assert!((down.im - expect).abs() <= 1e-15 * expect);
            assert_eq!(down.re, 0.0);
        }
    }

    #[test]
    fn interior_commutator_vanishes_while_edges_do_not() {
        let basis = TruncatedBasis::new(40, 0.5, 3.0).unwrap();
        let pair = build_annihilation(&basis);
        let commutator = pair.a1.mul(&pair.a2).sub(&pair.a2.mul(&pair.a1));
        let r_sq = 9.0;
        let interior = commutator
            .sub_block(basis.index_of(-20), basis.index_of(20))
            .frobenius_norm();
        assert!(interior <= 1e-10 * r_sq, "interior {interior:e}");
        // the identity genuinely fails at the cutoff rows, which is why the
        // restriction is part of the claim
        assert!(commutator.frobenius_norm() > 1e-3 * r_sq);
    }

    #[test]
    fn coefficients_rebuild_the_circle_kernel() {
        let tau = 0.7;
        let basis = TruncatedBasis::new(30, tau, 1.0).unwrap();
        for alpha in [C::new(0.4, 0.0), C::new(0.3, 0.2)] {
            let label = circle_label_from_angle(alpha, 1.0);
            let psi = coherent_coefficients(&label, &basis).unwrap();
            for &phi in &[0.0, 0.9, 2.0] {
                let mut rebuilt = C::new(0.0, 0.0);
                for (i, &c) in psi.iter().enumerate() {
                    let n = i as i64 - 30;
                    rebuilt = rebuilt + c * (C::new(0.0, n as f64 * phi)).exp();
                }
                let direct = eval_kernel(
                    1,
                    tau,
                    C::new(phi, 0.0) - alpha,
                    &EvalConfig::default(),
                )
                .unwrap();
                assert!(
                    (rebuilt - direct).norm() <= 1e-12 * direct.norm(),
                    "alpha {alpha} phi {phi}: {rebuilt} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn north_pole_coefficients_are_symmetric_gaussians() {
        let basis = TruncatedBasis::new(12, 1.0, 1.0).unwrap();
        let label = circle_label_from_angle(C::new(0.0, 0.0), 1.0);
        let psi = coherent_coefficients(&label, &basis).unwrap();
        let center = basis.index_of(0);
        for n in 1..=12usize {
            assert_eq!(psi[center + n], psi[center - n]);
            let ratio = psi[center + n].re / psi[center].re;
            let expect = (-0.5 * (n * n) as f64).exp();
            assert!((ratio - expect).abs() <= 1e-12 * expect);
            assert_eq!(psi[center + n].im, 0.0);
        }
    }

    #[test]
    fn growing_labels_overflow_the_cutoff_check() {
        let basis = TruncatedBasis::new(8, 0.05, 1.0).unwrap();
        let label = circle_label_from_angle(C::new(0.3, 2.0), 1.0);
        let err = coherent_coefficients(&label, &basis).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { .. }));
    }

    #[test]
    fn coherent_vectors_are_joint_eigenvectors() {
        let basis = TruncatedBasis::new(40, 0.5, 2.0).unwrap();
        let real_label = circle_label_from_angle(C::new(0.5, 0.0), 2.0);
        let (r1, r2) = eigen_residual(&real_label, &basis).unwrap();
        assert!(r1 <= 1e-10 && r2 <= 1e-10, "real residuals {r1:e} {r2:e}");

        let complex_label = circle_label_from_angle(C::new(0.5, 0.3), 2.0);
        let (c1, c2) = eigen_residual(&complex_label, &basis).unwrap();
        assert!(c1 <= 1e-8 && c2 <= 1e-8, "complex residuals {c1:e} {c2:e}");
    }

    #[test]
    fn residuals_shrink_as_the_basis_grows() {
        // temperature and label tuned so the N = 30 tail is just inside the
        // cutoff gate: the truncation error is then visible above roundoff
        let label = circle_label_from_angle(C::new(0.5, 0.33), 2.0);
        let coarse = TruncatedBasis::new(30, 0.085, 2.0).unwrap();
        let fine = TruncatedBasis::new(60, 0.085, 2.0).unwrap();
        let (coarse_res, _) = eigen_residual(&label, &coarse).unwrap();
        let (fine_res, _) = eigen_residual(&label, &fine).unwrap();
        assert!(
            fine_res < coarse_res,
            "fine {fine_res:e} not below coarse {coarse_res:e}"
        );
    }

    #[test]
    fn sphere_sum_collapses_to_the_squared_radius() {
        let basis = TruncatedBasis::new(40, 0.5, 2.0).unwrap();
        for alpha in [C::new(0.4, 0.0), C::new(0.5, 0.3)] {
            let label = circle_label_from_angle(alpha, 2.0);
            let report = operator_report(&label, &basis).unwrap();
            assert!(
                report.sphere_residual <= 1e-10,
                "alpha {alpha}: {:e}",
                report.sphere_residual
            );
        }
    }

    #[test]
    fn extracted_eigenvalues_match_the_classical_label() {
        let radius = 3.0;
        let params = PhysicalParams::natural(radius).unwrap();
        let basis = TruncatedBasis::new(40, 0.3, radius).unwrap();
        let alpha = C::new(0.5, 0.25);
        let report =
            operator_report(&circle_label_from_angle(alpha, radius), &basis).unwrap();

        // the same label from the classical side: base point at angle
        // Re α, momentum of magnitude mωr·Im α along the positive tangent
        let phi = 0.5f64;
        let p = 0.25 * radius;
        let point = PhasePoint::new(
            vec![radius * phi.cos(), radius * phi.sin()],
            vec![-p * phi.sin(), p * phi.cos()],
            1,
            &params,
        )
        .unwrap();
        let classical = classical_label(&point, &params).unwrap();
        assert!((report.extracted_1 - classical.a[0]).norm() <= 1e-8);
        assert!((report.extracted_2 - classical.a[1]).norm() <= 1e-8);
        assert!(report.eigenvalue_gap_1 <= 1e-8);
        assert!(report.eigenvalue_gap_2 <= 1e-8);
        assert!(report.dropped_mass > 0.0);
    }

    #[test]
    fn validation_rejects_bad_bases_and_labels() {
        assert!(TruncatedBasis::new(7, 0.5, 1.0).is_err());
        assert!(TruncatedBasis::new(10, -0.1, 1.0).is_err());
        assert!(TruncatedBasis::new(10, 0.5, 0.0).is_err());

        let basis = TruncatedBasis::new(10, 0.5, 3.0).unwrap();
        let off_circle = circle_label_from_angle(C::new(0.4, 0.0), 2.0);
        let err = coherent_coefficients(&off_circle, &basis).unwrap_err();
        assert!(matches!(err, Error::InconsistentLabel { .. }));
    }

    proptest! {
        #[test]
        fn real_labels_always_pass_the_desk_check(
            phi in -3.0f64..3.0,
            // τ floor keeps the n = ±20 tail below the cutoff gate
            tau in 0.2f64..1.0,
            radius in 0.5f64..4.0,
        ) {
            let basis = TruncatedBasis::new(20, tau, radius).unwrap();
            let label = circle_label_from_angle(C::new(phi, 0.0), radius);
            let report = operator_report(&label, &basis).unwrap();
            prop_assert!(report.res1 <= 1e-10);
            prop_assert!(report.res2 <= 1e-10);
            prop_assert!(report.sphere_residual <= 1e-10);
            prop_assert!(report.eigenvalue_gap_1 <= 1e-10 * radius);
            prop_assert!(report.eigenvalue_gap_2 <= 1e-10 * radius);
        }
    }
}
