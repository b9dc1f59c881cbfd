//! Row-major complex matrices with the tensor, partial-trace, block, and
//! block-trace-reduction operations used throughout the crate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSide {
    /// Trace out the left (first) factor of `H_trace (x) H_keep`.
    First,
    /// Trace out the right (second) factor of `H_keep (x) H_trace`.
    Second,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::new entry count",
                got: entries.len(),
                expected: rows * cols,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Other("non-finite matrix entry".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Real matrix literal, handy in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Outer product v w^dagger.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let entries = self.entries.iter().map(|z| z * s).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "ComplexMatrix::add")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "ComplexMatrix::sub")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Adds `s * other` in place; shapes must match.
    pub fn add_scaled_assign(&mut self, other: &Self, s: f64) {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::matmul inner dims",
                got: other.rows,
                expected: self.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::apply vector length",
                got: v.len(),
                expected: self.cols,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows.min(self.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc += self[(i, i)];
        }
        acc
    }

    /// Tr(self * other), accumulated without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::trace_product shapes",
                got: other.rows,
                expected: self.cols,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    /// <v| self |v> for a column vector v.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Result<Complex64> {
        let mv = self.apply(v)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in v.iter().zip(&mv) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Conjugation u * self * u^dagger.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Largest |a_ij - conj(a_ji)| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// (self + self^dagger) / 2.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of self - other.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context,
                got: other.rows * other.cols,
                expected: self.rows * self.cols,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.cols + c]
    }
}

/// Kronecker product a (x) b.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Partial trace over one tensor factor.
///
/// `m` must act on a space of dimension `keep_dims * trace_dims`, factored as
/// `H_keep (x) H_trace` when `side == Second` and `H_trace (x) H_keep` when
/// `side == First`. The result acts on the kept factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    keep_dims: usize,
    trace_dims: usize,
    side: TraceSide,
) -> Result<ComplexMatrix> {
    let dim = keep_dims * trace_dims;
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch {
            context: "partial_trace input dimension",
            got: m.rows(),
            expected: dim,
        });
    }
    let mut out = ComplexMatrix::zeros(keep_dims, keep_dims);
    match side {
        TraceSide::Second => {
            // index (i, t): i over kept, t over traced; row = i*trace_dims + t
            for i in 0..keep_dims {
                for j in 0..keep_dims {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..trace_dims {
                        acc += m[(i * trace_dims + t, j * trace_dims + t)];
                    }
                    out[(i, j)] = acc;
                }
            }
        }
        TraceSide::First => {
            // row = t*keep_dims + i
            for i in 0..keep_dims {
                for j in 0..keep_dims {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..trace_dims {
                        acc += m[(t * keep_dims + i, t * keep_dims + j)];
                    }
                    out[(i, j)] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// The n x n submatrix of the n^2 x n^2 matrix `a` with 1-based block
/// coordinates (i, j): entries start at row n(i-1), column n(j-1).
pub fn block(a: &ComplexMatrix, i: usize, j: usize, n: usize) -> Result<ComplexMatrix> {
    if a.rows() != n * n || a.cols() != n * n {
        return Err(Error::DimensionMismatch {
            context: "block: matrix must be n^2 x n^2",
            got: a.rows(),
            expected: n * n,
        });
    }
    if i < 1 || i > n {
        return Err(Error::IndexOutOfRange {
            context: "block row index (1-based)",
            got: i,
            limit: n,
        });
    }
    if j < 1 || j > n {
        return Err(Error::IndexOutOfRange {
            context: "block col index (1-based)",
            got: j,
            limit: n,
        });
    }
    let r0 = n * (i - 1);
    let c0 = n * (j - 1);
    Ok(ComplexMatrix::from_fn(n, n, |r, c| a[(r0 + r, c0 + c)]))
}

/// The n x n block-trace reduction: entry (i, j) is Tr(a[i,j] * b), so that
/// Tr(a (c (x) b)) = Tr(m_reduce(a, b) * c) for every n x n matrix c.
pub fn m_reduce(a: &ComplexMatrix, b: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    if a.rows() != n * n || a.cols() != n * n {
        return Err(Error::DimensionMismatch {
            context: "m_reduce: left matrix must be n^2 x n^2",
            got: a.rows(),
            expected: n * n,
        });
    }
    if b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "m_reduce: right matrix must be n x n",
            got: b.rows(),
            expected: n,
        });
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // Tr(A[i+1, j+1] B) without materializing the block.
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..n {
                for c in 0..n {
                    acc += a[(n * i + r, n * j + c)] * b[(c, r)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn counting_4x4() -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 4, |i, j| c((i * 4 + j + 1) as f64, 0.0))
    }

    #[test]
    fn tensor_basis_vectors() {
        let zero = ComplexMatrix::new(2, 1, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let one = ComplexMatrix::new(2, 1, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let v = tensor(&zero, &one);
        assert_eq!(v.rows(), 4);
        assert_eq!(v[(0, 0)], c(0.0, 0.0));
        assert_eq!(v[(1, 0)], c(1.0, 0.0));
        assert_eq!(v[(2, 0)], c(0.0, 0.0));
        assert_eq!(v[(3, 0)], c(0.0, 0.0));
    }

    #[test]
    fn tensor_identities() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = tensor(&i2, &i2);
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_trace_multiplicative() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(3.0, 0.25)])
            .unwrap();
        let b = ComplexMatrix::new(2, 2, vec![c(0.1, 0.0), c(2.0, 1.0), c(0.0, 0.0), c(-1.0, 0.5)])
            .unwrap();
        let lhs = tensor(&a, &b).trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let sigma = ComplexMatrix::new(2, 2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)])
            .unwrap();
        let rho = ComplexMatrix::new(2, 2, vec![c(0.4, 0.0), c(0.0, 0.1), c(0.0, -0.1), c(0.5, 0.0)])
            .unwrap();
        let joint = tensor(&sigma, &rho);
        let back = partial_trace(&joint, 2, 2, TraceSide::Second).unwrap();
        let expected = sigma.scale_re(rho.trace().re);
        assert!(back.max_abs_diff(&expected) < 1e-12);

        let back_first = partial_trace(&joint, 2, 2, TraceSide::First).unwrap();
        let expected_first = rho.scale_re(sigma.trace().re);
        assert!(back_first.max_abs_diff(&expected_first) < 1e-12);
    }

    #[test]
    fn partial_trace_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let proj = ComplexMatrix::outer(&bell, &bell);
        let reduced = partial_trace(&proj, 2, 2, TraceSide::Second).unwrap();
        let half_i = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(reduced.max_abs_diff(&half_i) < 1e-12);
    }

    #[test]
    fn partial_trace_identity() {
        let i4 = ComplexMatrix::identity(4);
        let reduced = partial_trace(&i4, 2, 2, TraceSide::Second).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(2).scale_re(2.0)) < 1e-15);
    }

    #[test]
    fn partial_trace_dim_mismatch() {
        let i4 = ComplexMatrix::identity(4);
        assert!(partial_trace(&i4, 3, 2, TraceSide::Second).is_err());
    }

    #[test]
    fn block_matches_worked_example() {
        let a = counting_4x4();
        let b12 = block(&a, 1, 2, 2).unwrap();
        assert_eq!(b12, ComplexMatrix::from_real_rows(&[&[3.0, 4.0], &[7.0, 8.0]]));
        let b21 = block(&a, 2, 1, 2).unwrap();
        assert_eq!(
            b21,
            ComplexMatrix::from_real_rows(&[&[9.0, 10.0], &[13.0, 14.0]])
        );
        let b11 = block(&a, 1, 1, 2).unwrap();
        assert_eq!(b11, ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[5.0, 6.0]]));
        let b22 = block(&a, 2, 2, 2).unwrap();
        assert_eq!(
            b22,
            ComplexMatrix::from_real_rows(&[&[11.0, 12.0], &[15.0, 16.0]])
        );
    }

    #[test]
    fn block_of_identity_off_diagonal_is_zero() {
        let i4 = ComplexMatrix::identity(4);
        let b = block(&i4, 1, 2, 2).unwrap();
        assert_eq!(b, ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn block_rejects_out_of_range() {
        let a = counting_4x4();
        assert!(block(&a, 0, 1, 2).is_err());
        assert!(block(&a, 1, 3, 2).is_err());
    }

    #[test]
    fn m_reduce_with_identity_takes_block_traces() {
        let a = counting_4x4();
        let m = m_reduce(&a, &ComplexMatrix::identity(2), 2).unwrap();
        // Block traces of the counting matrix: 1+6, 3+8, 9+14, 11+16.
        assert_eq!(m, ComplexMatrix::from_real_rows(&[&[7.0, 11.0], &[23.0, 27.0]]));
    }

    #[test]
    fn m_reduce_with_projector_takes_corner_entries() {
        let a = counting_4x4();
        let proj0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let m = m_reduce(&a, &proj0, 2).unwrap();
        assert_eq!(m, ComplexMatrix::from_real_rows(&[&[1.0, 3.0], &[9.0, 11.0]]));
    }

    #[test]
    fn m_reduce_identity_holds_on_random_instances() {
        let mut next = 0.37_f64;
        let mut rand = move || {
            // deterministic low-discrepancy sequence, good enough here
            next = (next * 997.13 + 0.7071).fract();
            next - 0.5
        };
        for n in [2usize, 3, 4] {
            for _ in 0..20 {
                let a = ComplexMatrix::from_fn(n * n, n * n, |_, _| c(rand(), rand()));
                let b = ComplexMatrix::from_fn(n, n, |_, _| c(rand(), rand()));
                let cmat = ComplexMatrix::from_fn(n, n, |_, _| c(rand(), rand()));
                let lhs = a.trace_product(&tensor(&cmat, &b)).unwrap();
                let m = m_reduce(&a, &b, n).unwrap();
                let rhs = m.trace_product(&cmat).unwrap();
                assert!((lhs - rhs).norm() < 1e-9, "n={n} residual {}", (lhs - rhs).norm());
            }
        }
    }

    #[test]
    fn m_reduce_trace_equals_lifted_identity_trace() {
        // Tr M_{AB} = Tr A (I (x) B), the C = I instance of the identity.
        let mut state = 0.91_f64;
        let mut rand = move || {
            state = (state * 487.19 + 0.123).fract();
            state - 0.5
        };
        for n in [2usize, 3] {
            let a = ComplexMatrix::from_fn(n * n, n * n, |_, _| c(rand(), rand()));
            let b = ComplexMatrix::from_fn(n, n, |_, _| c(rand(), rand()));
            let m = m_reduce(&a, &b, n).unwrap();
            let lifted = tensor(&ComplexMatrix::identity(n), &b);
            let rhs = a.trace_product(&lifted).unwrap();
            assert!((m.trace() - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = counting_4x4();
        let b = a.adjoint();
        let d1 = a.trace_product(&b).unwrap();
        let d2 = a.matmul(&b).unwrap().trace();
        assert!((d1 - d2).norm() < 1e-9);
    }
}
