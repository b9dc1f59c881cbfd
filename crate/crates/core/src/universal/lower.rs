//! Finite stand-in for lower-computable matrices: a monotone chain of
//! semi-density approximants together with its limit and a weight.

use crate::error::{Error, Result};
use crate::mat::{validate_psd, SemiDensityMatrix};

/// Monotone approximant chain. Each consecutive difference and the gap to
/// the limit must be PSD; the chain tolerance is 1e-12 on the smallest
/// eigenvalue.
#[derive(Debug, Clone)]
pub struct LowerComputableMatrix {
    approximants: Vec<SemiDensityMatrix>,
    limit: SemiDensityMatrix,
    weight: f64,
}

const CHAIN_TOL: f64 = 1e-12;

impl LowerComputableMatrix {
    pub fn new(
        approximants: Vec<SemiDensityMatrix>,
        limit: SemiDensityMatrix,
        weight: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::Other(format!("weight {weight} outside [0, 1]")));
        }
        for pair in approximants.windows(2) {
            check_dominates(&pair[1], &pair[0])?;
        }
        if let Some(last) = approximants.last() {
            check_dominates(&limit, last)?;
        }
        Ok(Self {
            approximants,
            limit,
            weight,
        })
    }

    /// Chain of ledger prefix sums converging to the universal matrix.
    pub fn from_ledger_prefixes(
        mu: &crate::universal::UniversalMatrix,
        steps: usize,
    ) -> Result<Self> {
        let dim = mu.dim();
        let total = mu.ledger().len();
        let steps = steps.max(1).min(total.max(1));
        let mut acc = crate::mat::ComplexMatrix::zeros(dim, dim);
        let mut approximants = Vec::with_capacity(steps);
        let chunk = total.div_ceil(steps).max(1);
        for (i, entry) in mu.ledger().iter().enumerate() {
            acc.add_scaled_assign(&entry.state.projector(), entry.weight);
            if (i + 1) % chunk == 0 || i + 1 == total {
                approximants.push(SemiDensityMatrix::new(acc.clone())?);
            }
        }
        Self::new(approximants, mu.matrix().clone(), mu.trace())
    }

    pub fn approximants(&self) -> &[SemiDensityMatrix] {
        &self.approximants
    }

    pub fn limit(&self) -> &SemiDensityMatrix {
        &self.limit
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

fn check_dominates(bigger: &SemiDensityMatrix, smaller: &SemiDensityMatrix) -> Result<()> {
    let diff = bigger.matrix().sub(smaller.matrix())?;
    let report = validate_psd(&diff, CHAIN_TOL)?;
    if !report.is_psd {
        return Err(Error::NotPsd {
            min_eig: report.min_eig,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::ComplexMatrix;

    #[test]
    fn accepts_monotone_chain() {
        let a = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.2)).unwrap();
        let b = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.4)).unwrap();
        let limit = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        assert!(LowerComputableMatrix::new(vec![a, b], limit, 0.5).is_ok());
    }

    #[test]
    fn rejects_non_monotone_chain() {
        let a = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.4)).unwrap();
        let b = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.2)).unwrap();
        let limit = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        assert!(LowerComputableMatrix::new(vec![a, b], limit, 0.5).is_err());
    }

    #[test]
    fn ledger_prefixes_form_a_chain() {
        let mu = crate::universal::UniversalMatrix::build(1, 20).unwrap();
        let chain = LowerComputableMatrix::from_ledger_prefixes(&mu, 4).unwrap();
        assert!(!chain.approximants().is_empty());
        assert!((chain.weight() - mu.trace()).abs() < 1e-12);
    }
}
