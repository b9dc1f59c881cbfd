//! Complex Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Deterministic sweep order and plain f64 arithmetic keep results
//! bit-identical across runs and platforms. Intended dimensions are small
//! (at most a few hundred), where Jacobi is both robust and fast enough.

use num_complex::Complex64;

use super::complexmat::ComplexMatrix;
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Outcome of a positive-semidefiniteness check.
#[derive(Debug, Clone, Copy)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eig: f64,
}

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of the Hermitized input.
///
/// The matrix is symmetrized as (m + m^dagger)/2 first, so tiny asymmetries
/// from upstream floating-point products do not block the solve. Callers that
/// need to reject non-Hermitian input should check `hermiticity_defect`
/// themselves (as `validate_psd` does).
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eigen: square matrix required",
            got: m.cols(),
            expected: m.rows(),
        });
    }
    let n = m.rows();
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(n);

    if n <= 1 {
        let eigenvalues = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(HermitianEigen {
            eigenvalues,
            eigenvectors: v,
        });
    }

    let scale = a.max_abs_entry().max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, tol);
            }
        }
    }

    // Sort ascending by eigenvalue; stable order for reproducibility.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating entry (p, q).
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, tol: f64) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g <= tol * 1e-2 {
        return;
    }
    let phase = apq / g; // e^{i phi}
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let tau = (beta - alpha) / (2.0 * g);
    // Smaller-magnitude root of t^2 - 2 tau t - 1 = 0.
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    // Column update: col_p <- c col_p + s conj(phase) col_q;
    //                col_q <- -s phase col_p + c col_q.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * phase.conj() * s;
        a[(k, q)] = akp * (-s) * phase + akq * c;
    }
    // Row update with the adjoint rotation.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * phase * s;
        a[(q, k)] = apk * (-s) * phase.conj() + aqk * c;
    }
    // Restore exact symmetry on the pivot entries.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    a[(p, p)] = Complex64::new(app, 0.0);
    a[(q, q)] = Complex64::new(aqq, 0.0);

    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * phase.conj() * s;
        v[(k, q)] = vkp * (-s) * phase + vkq * c;
    }
}

impl HermitianEigen {
    /// Reconstructs V f(Lambda) V^dagger.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let fv = f(self.eigenvalues[k]);
            if fv == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = v[(r, k)];
                if vr == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += vr * v[(c, k)].conj() * fv;
                }
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Checks positive semidefiniteness of a matrix that must already be
/// Hermitian within `tol` entrywise; reports the smallest eigenvalue of the
/// Hermitized matrix. `is_psd` holds iff `min_eig >= -tol`.
pub fn validate_psd(m: &ComplexMatrix, tol: f64) -> Result<PsdReport> {
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(Error::NonHermitian {
            deviation: defect,
            tol,
        });
    }
    let eig = hermitian_eigen(m)?;
    let min_eig = eig.min_eigenvalue();
    Ok(PsdReport {
        is_psd: min_eig >= -tol,
        min_eig,
    })
}

/// Inverse square root on the eigenbasis, treating eigenvalues below
/// `cutoff` as zero (pseudo-inverse behaviour).
pub fn inverse_sqrt(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    Ok(eig.apply_fn(|x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 }))
}

/// Projector onto the span of eigenvectors with eigenvalue above `cutoff`.
pub fn support_projector(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    Ok(eig.apply_fn(|x| if x > cutoff { 1.0 } else { 0.0 }))
}

/// Largest generalized eigenvalue of `x` against positive `base`:
/// max over unit v in the support of base of <v|x|v> / <v|base|v>,
/// computed as the top eigenvalue of base^{-1/2} x base^{-1/2}.
///
/// Fails if `x` has weight outside the support of `base` beyond `leak_tol`.
pub fn generalized_max_eigenvalue(
    x: &ComplexMatrix,
    base: &ComplexMatrix,
    cutoff: f64,
    leak_tol: f64,
) -> Result<f64> {
    let inv_sqrt = inverse_sqrt(base, cutoff)?;
    let proj = support_projector(base, cutoff)?;
    // Leakage of x outside the support of base.
    let n = x.rows();
    let complement = ComplexMatrix::identity(n).sub(&proj)?;
    let leak = complement
        .matmul(x)?
        .matmul(&complement)?
        .max_abs_entry();
    if leak > leak_tol {
        return Err(Error::SupportMismatch(format!(
            "weight {leak:e} outside base support (tol {leak_tol:e})"
        )));
    }
    let middle = inv_sqrt.matmul(x)?.matmul(&inv_sqrt)?;
    let eig = hermitian_eigen(&middle)?;
    Ok(eig.max_eigenvalue())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::complexmat::tensor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_is_fixed_point() {
        let d = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c([2.0, -1.0, 0.5][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let eig = hermitian_eigen(&d).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 0.5, 2.0]);
    }

    #[test]
    fn two_by_two_complex_pauli_y() {
        // Pauli Y has eigenvalues -1 and 1.
        let y = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
            .unwrap();
        let eig = hermitian_eigen(&y).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut state = 0.123_f64;
        let mut rand = move || {
            state = (state * 877.31 + 0.3183).fract();
            state - 0.5
        };
        for n in [2usize, 3, 5, 8] {
            let raw = ComplexMatrix::from_fn(n, n, |_, _| c(rand(), rand()));
            let h = raw.hermitized();
            let eig = hermitian_eigen(&h).unwrap();
            let recon = eig.apply_fn(|x| x);
            assert!(recon.max_abs_diff(&h) < 1e-10, "n={n}");
            let v = &eig.eigenvectors;
            let gram = v.adjoint().matmul(v).unwrap();
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
            for k in 1..n {
                assert!(eig.eigenvalues[k - 1] <= eig.eigenvalues[k] + 1e-14);
            }
        }
    }

    #[test]
    fn validate_psd_identity() {
        let report = validate_psd(&ComplexMatrix::identity(2), 1e-10).unwrap();
        assert!(report.is_psd);
        assert!((report.min_eig - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validate_psd_indefinite_diagonal() {
        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -0.5]]);
        let report = validate_psd(&d, 1e-10).unwrap();
        assert!(!report.is_psd);
        assert!((report.min_eig + 0.5).abs() < 1e-12);
    }

    #[test]
    fn validate_psd_rank_one_projector() {
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let proj = ComplexMatrix::outer(&v, &v);
        let report = validate_psd(&proj, 1e-10).unwrap();
        assert!(report.is_psd);
        assert!(report.min_eig.abs() < 1e-12);
    }

    #[test]
    fn validate_psd_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            validate_psd(&m, 1e-10),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn inverse_sqrt_of_scaled_identity() {
        let m = ComplexMatrix::identity(4).scale_re(0.25);
        let inv = inverse_sqrt(&m, 1e-12).unwrap();
        assert!(inv.max_abs_diff(&ComplexMatrix::identity(4).scale_re(2.0)) < 1e-10);
    }

    #[test]
    fn generalized_max_eig_of_self_is_one() {
        let mut state = 0.77_f64;
        let mut rand = move || {
            state = (state * 613.17 + 0.577).fract();
            state - 0.5
        };
        let raw = ComplexMatrix::from_fn(4, 4, |_, _| c(rand(), rand()));
        let pd = raw.matmul(&raw.adjoint()).unwrap().add(&ComplexMatrix::identity(4).scale_re(0.1)).unwrap();
        let lam = generalized_max_eigenvalue(&pd, &pd, 1e-12, 1e-8).unwrap();
        assert!((lam - 1.0).abs() < 1e-8);
    }

    #[test]
    fn generalized_max_eig_detects_support_leak() {
        let proj0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let proj1 = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert!(generalized_max_eigenvalue(&proj1, &proj0, 1e-12, 1e-9).is_err());
    }

    #[test]
    fn jacobi_handles_tensor_structured_matrices() {
        let a = ComplexMatrix::from_real_rows(&[&[0.5, 0.25], &[0.25, 0.5]]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let t = tensor(&a, &b);
        let eig = hermitian_eigen(&t).unwrap();
        // Eigenvalues multiply: {0.25, 0.75} x {1, 2}.
        let expected = [0.25, 0.5, 0.75, 1.5];
        for (got, want) in eig.eigenvalues.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-10);
        }
    }
}
