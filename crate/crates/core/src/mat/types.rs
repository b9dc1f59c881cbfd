//! Validated quantum-state wrappers: semi-density matrices, pure states,
//! and unitary transforms.

use num_complex::Complex64;

use super::complexmat::{partial_trace, tensor, ComplexMatrix, TraceSide};
use super::eigen::validate_psd;
use super::{PSD_MIN_EIG_TOL, SEMI_DENSITY_HERMITIAN_TOL, TRACE_TOL};
use crate::error::{Error, Result};

/// Hermitian positive-semidefinite matrix with trace at most 1.
/// Trace-1 densities are the special case.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiDensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl SemiDensityMatrix {
    /// Validates Hermiticity (entrywise, 1e-12), positive semidefiniteness
    /// (min eigenvalue >= -1e-10) and trace in [0, 1 + 1e-10].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                context: "SemiDensityMatrix: square matrix required",
                got: matrix.cols(),
                expected: matrix.rows(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > SEMI_DENSITY_HERMITIAN_TOL {
            return Err(Error::NonHermitian {
                deviation: defect,
                tol: SEMI_DENSITY_HERMITIAN_TOL,
            });
        }
        let report = validate_psd(&matrix, PSD_MIN_EIG_TOL)?;
        if !report.is_psd {
            return Err(Error::NotPsd {
                min_eig: report.min_eig,
            });
        }
        let trace = matrix.trace().re;
        if !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&trace) {
            return Err(Error::TraceOutOfRange {
                trace,
                tol: TRACE_TOL,
            });
        }
        Ok(Self {
            dim: matrix.rows(),
            matrix,
        })
    }

    /// Hermitizes the input first; useful for matrices assembled from
    /// floating-point products that drift slightly off Hermitian.
    pub fn new_hermitized(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix.hermitized())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Projector onto a (possibly subnormalized) vector; trace is |v|^2.
    pub fn from_vector(v: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(v, v))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Tensor product of semi-densities is a semi-density.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            dim: self.dim * other.dim,
            matrix: tensor(&self.matrix, &other.matrix),
        }
    }

    /// Partial trace, which preserves the semi-density invariants.
    pub fn partial_trace(&self, keep: usize, traced: usize, side: TraceSide) -> Result<Self> {
        let reduced = partial_trace(&self.matrix, keep, traced, side)?;
        Ok(Self {
            dim: keep,
            matrix: reduced.hermitized(),
        })
    }

    /// Conjugation by a unitary.
    pub fn conjugate_by(&self, u: &UnitaryTransform) -> Result<Self> {
        let conj = self.matrix.conjugate_by(u.matrix())?;
        Ok(Self {
            dim: self.dim,
            matrix: conj.hermitized(),
        })
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(validate_psd(&self.matrix, 1e-9)?.min_eig)
    }
}

/// Unit vector in a 2^n-dimensional qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized {
                norm: norm_sq.sqrt(),
                tol: 1e-10,
            });
        }
        Ok(Self {
            dim: amplitudes.len(),
            amplitudes,
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                context: "PureState::basis index",
                got: index,
                limit: dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { dim, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> SemiDensityMatrix {
        SemiDensityMatrix {
            dim: self.dim,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = super::complexmat::tensor_vec(&self.amplitudes, &other.amplitudes);
        Self {
            dim: self.dim * other.dim,
            amplitudes,
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Unitary matrix with U U^dagger = I within 1e-10 entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryTransform {
    dim: usize,
    matrix: ComplexMatrix,
}

impl UnitaryTransform {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                context: "UnitaryTransform: square matrix required",
                got: matrix.cols(),
                expected: matrix.rows(),
            });
        }
        let product = matrix.matmul(&matrix.adjoint())?;
        let defect = product.max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if defect > 1e-10 {
            return Err(Error::NonUnitary {
                deviation: defect,
                tol: 1e-10,
            });
        }
        Ok(Self {
            dim: matrix.rows(),
            matrix,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            dim: self.dim * other.dim,
            matrix: tensor(&self.matrix, &other.matrix),
        }
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let amplitudes = self.matrix.apply(state.amplitudes())?;
        Ok(PureState {
            dim: self.dim,
            amplitudes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn semi_density_accepts_maximally_mixed() {
        let rho = SemiDensityMatrix::maximally_mixed(4);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(SemiDensityMatrix::new(rho.matrix().clone()).is_ok());
    }

    #[test]
    fn semi_density_rejects_trace_above_one() {
        let m = ComplexMatrix::identity(2).scale_re(0.7);
        assert!(matches!(
            SemiDensityMatrix::new(m),
            Err(Error::TraceOutOfRange { .. })
        ));
    }

    #[test]
    fn semi_density_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, -0.1]]);
        assert!(matches!(SemiDensityMatrix::new(m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn semi_density_accepts_subnormalized_projector() {
        let v = vec![c(0.5, 0.0), c(0.0, 0.5)];
        let rho = SemiDensityMatrix::from_vector(&v).unwrap();
        assert!((rho.trace() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tensor_of_semi_densities_is_semi_density() {
        let a = SemiDensityMatrix::maximally_mixed(2);
        let b = SemiDensityMatrix::from_vector(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let ab = a.tensor(&b);
        assert!(SemiDensityMatrix::new(ab.matrix().clone()).is_ok());
        assert!((ab.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_validates_norm() {
        assert!(PureState::new(vec![c(0.6, 0.0), c(0.8, 0.0)]).is_ok());
        assert!(PureState::new(vec![c(0.6, 0.0), c(0.6, 0.0)]).is_err());
    }

    #[test]
    fn unitary_validates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]);
        assert!(UnitaryTransform::new(had).is_ok());
        let bad = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!(UnitaryTransform::new(bad).is_err());
    }

    #[test]
    fn cyclic_trace_under_conjugation() {
        // Tr(U nu U^dagger rho) == Tr(nu U^dagger rho U) for random instances.
        let mut state = 0.41_f64;
        let mut rand = move || {
            state = (state * 739.91 + 0.2113).fract();
            state - 0.5
        };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = UnitaryTransform::new(ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]])).unwrap();
        for _ in 0..20 {
            let raw_nu = ComplexMatrix::from_fn(2, 2, |_, _| c(rand(), rand()));
            let raw_rho = ComplexMatrix::from_fn(2, 2, |_, _| c(rand(), rand()));
            let nu = raw_nu.hermitized();
            let rho = raw_rho.hermitized();
            let lhs = nu
                .conjugate_by(u.matrix())
                .unwrap()
                .trace_product(&rho)
                .unwrap();
            let rho_conj = rho.conjugate_by(&u.adjoint().matrix().clone()).unwrap();
            let rhs = nu.trace_product(&rho_conj).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
