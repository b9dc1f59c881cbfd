//! Exact Gaussian-rational arithmetic for elementary states and matrices.
//!
//! Elementary objects are those whose real and imaginary parts are rational;
//! they admit finite canonical encodings. `num_rational::BigRational` keeps
//! every reduction exact, so norm and unitarity checks on elementary data
//! never rely on floating point.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mat::ComplexMatrix;

/// A complex number with rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn from_i64_parts(num_re: i64, den_re: i64, num_im: i64, den_im: i64) -> Result<Self> {
        if den_re == 0 || den_im == 0 {
            return Err(Error::NonCanonical("zero denominator".into()));
        }
        Ok(Self {
            re: BigRational::new(BigInt::from(num_re), BigInt::from(den_re)),
            im: BigRational::new(BigInt::from(num_im), BigInt::from(den_im)),
        })
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Components as (num_re, den_re, num_im, den_im), failing when they do
    /// not fit in i64.
    pub fn to_i64_parts(&self) -> Result<(i64, i64, i64, i64)> {
        let conv = |x: &BigInt, what: &str| -> Result<i64> {
            x.to_i64()
                .ok_or_else(|| Error::Unencodable(format!("{what} does not fit in i64: {x}")))
        };
        Ok((
            conv(self.re.numer(), "re numerator")?,
            conv(self.re.denom(), "re denominator")?,
            conv(self.im.numer(), "im numerator")?,
            conv(self.im.denom(), "im denominator")?,
        ))
    }
}

/// Exact rational helper: p/q from i64s.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// A dense square matrix over Gaussian rationals on an n-qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryMatrix {
    qubits: u32,
    dim: usize,
    entries: Vec<GaussianRational>,
}

impl ElementaryMatrix {
    pub fn zeros(qubits: u32) -> Self {
        let dim = 1usize << qubits;
        Self {
            qubits,
            dim,
            entries: vec![GaussianRational::zero(); dim * dim],
        }
    }

    pub fn identity(qubits: u32) -> Self {
        let mut m = Self::zeros(qubits);
        for i in 0..m.dim {
            m.set(i, i, GaussianRational::one());
        }
        m
    }

    /// Maximally mixed state I / 2^n, exactly.
    pub fn maximally_mixed(qubits: u32) -> Self {
        let mut m = Self::zeros(qubits);
        let dim = m.dim;
        let w = BigRational::new(BigInt::one(), BigInt::from(dim as u64));
        for i in 0..dim {
            m.set(i, i, GaussianRational::new(w.clone(), BigRational::zero()));
        }
        m
    }

    pub fn from_sparse(qubits: u32, sparse: &[(u64, GaussianRational)]) -> Result<Self> {
        let mut m = Self::zeros(qubits);
        let total = (m.dim * m.dim) as u64;
        for (idx, v) in sparse {
            if *idx >= total {
                return Err(Error::IndexOutOfRange {
                    context: "ElementaryMatrix::from_sparse index",
                    got: *idx as usize,
                    limit: total as usize,
                });
            }
            m.entries[*idx as usize] = v.clone();
        }
        Ok(m)
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussianRational {
        &self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussianRational) {
        self.entries[r * self.dim + c] = v;
    }

    /// Nonzero entries in row-major order, as (flat index, value).
    pub fn sparse_entries(&self) -> Vec<(u64, GaussianRational)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u64, v.clone()))
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.qubits);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: "ElementaryMatrix::matmul",
                got: other.dim,
                expected: self.dim,
            });
        }
        let mut out = Self::zeros(self.qubits);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let q = self.qubits + other.qubits;
        let mut out = Self::zeros(q);
        let od = other.dim;
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..od {
                    for c2 in 0..od {
                        let b = other.get(r2, c2);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(r1 * od + r2, c1 * od + c2, a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = self.clone();
        for v in &mut out.entries {
            v.re = &v.re * s;
            v.im = &v.im * s;
        }
        out
    }

    /// Exact unitarity: M M^dagger == I.
    pub fn is_unitary(&self) -> bool {
        match self.matmul(&self.adjoint()) {
            Ok(p) => p == Self::identity(self.qubits),
            Err(_) => false,
        }
    }

    pub fn to_complex_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c).to_complex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_rational_arithmetic() {
        let a = GaussianRational::new(ratio(3, 5), ratio(4, 5));
        let n = a.norm_sqr();
        assert_eq!(n, ratio(1, 1));
        let b = a.mul(&a.conj());
        assert_eq!(b.re, ratio(1, 1));
        assert!(b.im.is_zero());
    }

    #[test]
    fn i64_round_trip() {
        let a = GaussianRational::from_i64_parts(-3, 7, 0, 1).unwrap();
        assert_eq!(a.to_i64_parts().unwrap(), (-3, 7, 0, 1));
        // Reduction happens on construction.
        let b = GaussianRational::from_i64_parts(2, 4, 0, 3).unwrap();
        assert_eq!(b.to_i64_parts().unwrap(), (1, 2, 0, 1));
    }

    #[test]
    fn rotation_matrix_is_exactly_unitary() {
        // [[3/5, 4/5], [-4/5, 3/5]] is an exact rational rotation.
        let mut r = ElementaryMatrix::zeros(1);
        r.set(0, 0, GaussianRational::new(ratio(3, 5), ratio(0, 1)));
        r.set(0, 1, GaussianRational::new(ratio(4, 5), ratio(0, 1)));
        r.set(1, 0, GaussianRational::new(ratio(-4, 5), ratio(0, 1)));
        r.set(1, 1, GaussianRational::new(ratio(3, 5), ratio(0, 1)));
        assert!(r.is_unitary());
    }

    #[test]
    fn tensor_and_sparse_round_trip() {
        let i1 = ElementaryMatrix::identity(1);
        let i2 = i1.tensor(&i1);
        assert_eq!(i2, ElementaryMatrix::identity(2));
        let sparse = i2.sparse_entries();
        assert_eq!(sparse.len(), 4);
        let back = ElementaryMatrix::from_sparse(2, &sparse).unwrap();
        assert_eq!(back, i2);
    }

    #[test]
    fn maximally_mixed_trace_is_one() {
        let m = ElementaryMatrix::maximally_mixed(2);
        let mut tr = BigRational::zero();
        for i in 0..4 {
            tr += m.get(i, i).re.clone();
        }
        assert_eq!(tr, ratio(1, 1));
    }
}
