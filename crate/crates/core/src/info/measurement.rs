//! Two-measurement information bounds.
//!
//! For an elementary POVM E, the pair tests (2^{a_i} E_i, 2^{a_j} E_j) with
//! saturation exponents a_k against mu are admissible product tests. Adding
//! them to a product family makes the classical information carried by a
//! pair of measurement outcomes a lower bound on the quantum information
//! score, with a constant read off the pair weights.

use std::sync::Arc;

use super::product::{mutual_information, ProductPair, ProductTestFamily};
use super::transport::{ChargePolicy, TransportKind, TransportRecord};
use super::{classical_pair_information, saturation_exponent, TestMatrix};
use crate::codec::{len_int, len_nat};
use crate::error::{Error, Result};
use crate::mat::SemiDensityMatrix;
use crate::qops::{apply_povm, Povm};
use crate::universal::UniversalMatrix;

/// Weight exponent in bits for the (i, j) pair test: K(i) + K(j) + the POVM
/// description (per policy) + a 2-bit tag.
fn pair_weight_bits(i: u64, j: u64, povm_bits: f64, policy: ChargePolicy) -> f64 {
    len_nat(i) as f64 + len_nat(j) as f64 + policy.applied(povm_bits) + 2.0
}

/// Saturation exponents a_k with 2^{a_k} Tr(E_k mu) <= 1 for every outcome.
fn outcome_exponents(povm: &Povm, mu: &UniversalMatrix) -> Result<Vec<u32>> {
    let probs = apply_povm(povm, mu.matrix())?;
    Ok((0..povm.len())
        .map(|k| saturation_exponent(probs.prob(k)))
        .collect())
}

/// Extends a product family with all scaled outcome-pair tests of a POVM.
/// Returns the per-outcome exponents for downstream constants.
pub fn extend_family_with_povm_pairs(
    family: &mut ProductTestFamily,
    povm: &Povm,
    mu: &UniversalMatrix,
    policy: ChargePolicy,
) -> Result<Vec<u32>> {
    if povm.dim() != family.factor_dim() {
        return Err(Error::DimensionMismatch {
            context: "extend_family_with_povm_pairs",
            got: povm.dim(),
            expected: family.factor_dim(),
        });
    }
    let povm_bits = povm.description_len()? as f64;
    let exponents = outcome_exponents(povm, mu)?;
    let scaled: Vec<TestMatrix> = povm
        .outcomes()
        .iter()
        .zip(&exponents)
        .map(|(e, a)| TestMatrix::Dense {
            matrix: Arc::new(e.clone()),
            scale: (*a as f64).exp2(),
        })
        .collect();
    for i in 0..povm.len() {
        for j in i..povm.len() {
            let weight = (-pair_weight_bits(i as u64, j as u64, povm_bits, policy)).exp2();
            family.add_pair(
                ProductPair {
                    id: format!("povm-pair[{i},{j}]"),
                    left: scaled[i].clone(),
                    right: scaled[j].clone(),
                    weight,
                    provenance: vec![TransportRecord {
                        kind: TransportKind::Povm,
                        label: format!("outcome-pair[{i},{j}]"),
                        cost_bits: povm_bits,
                        charged_bits: policy.applied(povm_bits),
                    }],
                },
                mu,
            )?;
        }
    }
    Ok(exponents)
}

/// Both sides of the two-measurement bound for one outcome pair.
#[derive(Debug, Clone)]
pub struct MeasurementBound {
    /// I_cl(i:j) + log2(E sigma(i) E rho(j)) - K(I_cl(i:j)).
    pub lhs: f64,
    /// The quantum information score of (sigma, rho).
    pub info: f64,
    /// Declared constant from the pair-test ledger.
    pub declared_c: f64,
    pub classical_information: i64,
    pub holds: bool,
    pub slack: f64,
}

/// Evaluates the two-measurement bound at outcomes (i, j). The family must
/// already contain the POVM pair tests (see
/// [`extend_family_with_povm_pairs`]); `exponents` are the values that call
/// returned.
#[allow(clippy::too_many_arguments)]
pub fn measurement_info_bound(
    povm: &Povm,
    sigma: &SemiDensityMatrix,
    rho: &SemiDensityMatrix,
    i: usize,
    j: usize,
    family: &ProductTestFamily,
    exponents: &[u32],
    policy: ChargePolicy,
) -> Result<MeasurementBound> {
    if i >= povm.len() || j >= povm.len() {
        return Err(Error::IndexOutOfRange {
            context: "measurement_info_bound outcome",
            got: i.max(j),
            limit: povm.len(),
        });
    }
    let e_sigma = apply_povm(povm, sigma)?;
    let e_rho = apply_povm(povm, rho)?;
    let p = e_sigma.prob(i);
    let q = e_rho.prob(j);
    let info = mutual_information(sigma, rho, family)?.value_or_neg_inf();

    let i_cl = classical_pair_information(i as u64, j as u64)?;
    let k_of_icl = len_int(i_cl) as f64;

    let povm_bits = povm.description_len()? as f64;
    let w_bits = pair_weight_bits(i as u64, j as u64, povm_bits, policy);
    // From the pair test in the family:
    //   info >= -w_bits + a_i + a_j + log2(p q),
    // so the declared constant is everything that separates the two sides.
    let declared_c =
        i_cl as f64 - k_of_icl + w_bits - exponents[i] as f64 - exponents[j] as f64;

    if p <= 0.0 || q <= 0.0 {
        // A zero-probability outcome sends the left side to -infinity.
        return Ok(MeasurementBound {
            lhs: f64::NEG_INFINITY,
            info,
            declared_c,
            classical_information: i_cl,
            holds: true,
            slack: f64::INFINITY,
        });
    }

    let lhs = i_cl as f64 + (p * q).log2() - k_of_icl;
    let rhs = info + declared_c;
    let slack = rhs - lhs;
    Ok(MeasurementBound {
        lhs,
        info,
        declared_c,
        classical_information: i_cl,
        holds: slack >= -1e-6,
        slack,
    })
}

/// The summed form over all outcome pairs.
#[derive(Debug, Clone)]
pub struct CorollaryBound {
    /// log2 Σ_{ij} 2^{I_cl(i:j)} E sigma(i) E rho(j).
    pub lhs: f64,
    pub info: f64,
    pub declared_c: f64,
    pub holds: bool,
    pub slack: f64,
}

/// Evaluates log2 Σ_{ij} 2^{I_cl(i:j)} Eσ(i) Eρ(j) against the information
/// score plus a declared constant (the worst pair-ledger gap).
pub fn corollary_sum_bound(
    povm: &Povm,
    sigma: &SemiDensityMatrix,
    rho: &SemiDensityMatrix,
    family: &ProductTestFamily,
    exponents: &[u32],
    policy: ChargePolicy,
) -> Result<CorollaryBound> {
    let e_sigma = apply_povm(povm, sigma)?;
    let e_rho = apply_povm(povm, rho)?;
    let info = mutual_information(sigma, rho, family)?.value_or_neg_inf();
    let povm_bits = povm.description_len()? as f64;

    let mut sum = 0.0_f64;
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..povm.len() {
        for j in 0..povm.len() {
            let p = e_sigma.prob(i);
            let q = e_rho.prob(j);
            if p <= 0.0 || q <= 0.0 {
                continue;
            }
            let i_cl = classical_pair_information(i as u64, j as u64)? as f64;
            sum += i_cl.exp2() * p * q;
            let w_bits = pair_weight_bits(i as u64, j as u64, povm_bits, policy);
            let gap = i_cl + w_bits - exponents[i] as f64 - exponents[j] as f64;
            worst_gap = worst_gap.max(gap);
        }
    }
    // Σ_{ij} 2^{I_cl} p q <= 2^{worst_gap} Σ_{ij} w_ij a_i a_j p q
    //                     <= 2^{worst_gap} * aggregate, and the pair count
    // is absorbed because the aggregate sums the same (i, j) terms.
    let lhs = if sum > 0.0 {
        sum.log2()
    } else {
        f64::NEG_INFINITY
    };
    let declared_c = worst_gap;
    let slack = info + declared_c - lhs;
    Ok(CorollaryBound {
        lhs,
        info,
        declared_c,
        holds: lhs <= info + declared_c + 1e-6,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::product_test_family;
    use crate::qops::{computational_povm, random_density};
    use crate::universal::mu_cached;
    use rand::SeedableRng;

    #[test]
    fn pair_tests_are_admissible_and_bounds_hold() {
        let mu = mu_cached(1, 22).unwrap();
        let mut family = product_test_family(&mu).unwrap();
        let povm = computational_povm(1).unwrap();
        let policy = ChargePolicy::charged();
        let exps = extend_family_with_povm_pairs(&mut family, &povm, &mu, policy).unwrap();
        assert_eq!(exps.len(), 2);
        assert!(family.total_weight() <= 1.0 + 1e-9);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let sigma = random_density(2, &mut rng);
            let rho = random_density(2, &mut rng);
            for i in 0..2 {
                for j in 0..2 {
                    let bound = measurement_info_bound(
                        &povm, &sigma, &rho, i, j, &family, &exps, policy,
                    )
                    .unwrap();
                    assert!(bound.holds, "pair ({i},{j}) slack {}", bound.slack);
                }
            }
            let cor = corollary_sum_bound(&povm, &sigma, &rho, &family, &exps, policy).unwrap();
            assert!(cor.holds, "corollary slack {}", cor.slack);
        }
    }

    #[test]
    fn zero_probability_outcome_holds_trivially() {
        let mu = mu_cached(1, 22).unwrap();
        let mut family = product_test_family(&mu).unwrap();
        let povm = computational_povm(1).unwrap();
        let policy = ChargePolicy::charged();
        let exps = extend_family_with_povm_pairs(&mut family, &povm, &mu, policy).unwrap();
        let zero = SemiDensityMatrix::from_vector(&[
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        // E sigma(1) = 0 for sigma = |0><0|.
        let bound =
            measurement_info_bound(&povm, &zero, &zero, 1, 0, &family, &exps, policy).unwrap();
        assert!(bound.holds);
        assert!(bound.lhs.is_infinite() && bound.lhs < 0.0);
    }
}
