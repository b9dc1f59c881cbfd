//! Conditional-model registry.
//!
//! Keys are encoded objects; each key accumulates weighted semi-density
//! candidates. The conditional universal matrix for a key mixes the base
//! matrix and the registered candidates half-and-half, so both "the base
//! dominates" and "each candidate dominates at its weight" hold with exactly
//! one extra bit.

use std::collections::BTreeMap;

use crate::codec::{encode_object, EncodableObject};
use crate::error::{Error, Result};
use crate::mat::SemiDensityMatrix;
use crate::universal::UniversalMatrix;

#[derive(Debug, Default, Clone)]
pub struct ConditionRegistry {
    // Keyed by the hex form of the tagged code; values keep insertion order.
    slots: BTreeMap<String, Vec<(SemiDensityMatrix, f64)>>,
}

impl ConditionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    fn key_of(key: &EncodableObject) -> Result<String> {
        Ok(encode_object(key)?.to_hex())
    }

    /// Registers a candidate under a key. Per-key weights must stay at or
    /// below 1.
    pub fn register(
        &mut self,
        key: &EncodableObject,
        candidate: SemiDensityMatrix,
        weight: f64,
    ) -> Result<()> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::Registry(format!("weight {weight} outside (0, 1]")));
        }
        let slot = self.slots.entry(Self::key_of(key)?).or_default();
        let total: f64 = slot.iter().map(|(_, w)| w).sum();
        if total + weight > 1.0 + 1e-12 {
            return Err(Error::Registry(format!(
                "per-key weight sum {} would exceed 1",
                total + weight
            )));
        }
        slot.push((candidate, weight));
        Ok(())
    }

    pub fn candidates(&self, key: &EncodableObject) -> Result<&[(SemiDensityMatrix, f64)]> {
        let hex = Self::key_of(key)?;
        Ok(self.slots.get(&hex).map(Vec::as_slice).unwrap_or(&[]))
    }
}

/// The conditional universal matrix for a key: half the base plus half the
/// weighted candidates. An empty slot yields half the base, still a valid
/// semi-density.
pub fn conditional_mu(
    key: &EncodableObject,
    registry: &ConditionRegistry,
    base: &UniversalMatrix,
) -> Result<SemiDensityMatrix> {
    let mut acc = base.matrix().matrix().scale_re(0.5);
    for (candidate, weight) in registry.candidates(key)? {
        if candidate.dim() != base.dim() {
            return Err(Error::DimensionMismatch {
                context: "conditional_mu candidate dimension",
                got: candidate.dim(),
                expected: base.dim(),
            });
        }
        acc.add_scaled_assign(candidate.matrix(), 0.5 * weight);
    }
    SemiDensityMatrix::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::ComplexMatrix;

    fn key() -> EncodableObject {
        EncodableObject::Nat(7)
    }

    #[test]
    fn empty_registry_gives_half_base() {
        let base = UniversalMatrix::build(1, 20).unwrap();
        let registry = ConditionRegistry::new();
        let cond = conditional_mu(&key(), &registry, &base).unwrap();
        let expected = base.matrix().matrix().scale_re(0.5);
        assert!(cond.matrix().max_abs_diff(&expected) == 0.0);
    }

    #[test]
    fn registered_candidate_is_dominated_at_half_weight() {
        let base = UniversalMatrix::build(1, 20).unwrap();
        let mut registry = ConditionRegistry::new();
        let kappa = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        registry.register(&key(), kappa.clone(), 1.0).unwrap();
        let cond = conditional_mu(&key(), &registry, &base).unwrap();
        let diff = cond.matrix().sub(&kappa.matrix().scale_re(0.5)).unwrap();
        let report = crate::mat::validate_psd(&diff, 1e-10).unwrap();
        assert!(report.is_psd);
    }

    #[test]
    fn per_key_weight_budget_enforced() {
        let mut registry = ConditionRegistry::new();
        let kappa = SemiDensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.25)).unwrap();
        registry.register(&key(), kappa.clone(), 0.75).unwrap();
        assert!(registry.register(&key(), kappa, 0.5).is_err());
    }
}
