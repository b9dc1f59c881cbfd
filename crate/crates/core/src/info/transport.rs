//! Test transports: constructive maps that carry a test admissible for one
//! target into a test admissible for another, at an explicit bit cost.
//!
//! Description costs (the bits needed to name the unitary, the traced qubit
//! count, the POVM) are charged to the weight when the policy says so; the
//! default charges them. Admission scalings measured against the universal
//! matrix are structural and always apply, through the matrix scale rather
//! than the weight.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Factor, GridBlock, ProductPair, Test, TestMatrix};
use crate::codec::len_nat;
use crate::error::Result;
use crate::mat::{m_reduce, tensor, ComplexMatrix, SemiDensityMatrix, UnitaryTransform};
use crate::qops::{apply_povm, Povm};
use crate::universal::m_hat_nat;

/// Whether transport description costs are charged to weights. Measured
/// admission scalings are charged either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargePolicy {
    pub charge_descriptions: bool,
}

impl ChargePolicy {
    pub fn charged() -> Self {
        Self {
            charge_descriptions: true,
        }
    }

    pub fn free() -> Self {
        Self {
            charge_descriptions: false,
        }
    }

    /// The bits actually applied to a weight under this policy.
    pub fn applied(&self, bits: f64) -> f64 {
        if self.charge_descriptions {
            bits
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportKind {
    Conjugate,
    Extend,
    Povm,
    MReduce,
    Lift,
    Admission,
}

/// One step of a test's provenance chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportRecord {
    pub kind: TransportKind,
    pub label: String,
    /// Nominal description cost in bits.
    pub cost_bits: f64,
    /// Bits actually multiplied into the weight (0 when uncharged).
    pub charged_bits: f64,
}

/// Conjugation transport: a test for U rho U^dagger becomes U^dagger t U,
/// a test for rho, with Tr((U^dagger t U) rho) = Tr(t (U rho U^dagger))
/// exactly. The weight pays the description cost of U under the policy.
pub fn transport_conjugate(
    test: &Test,
    u: &UnitaryTransform,
    description_bits: u64,
    policy: ChargePolicy,
) -> Result<Test> {
    let conjugated = test
        .matrix
        .to_matrix()
        .conjugate_by(&u.adjoint().matrix().clone())?
        .hermitized();
    let charged = policy.applied(description_bits as f64);
    let mut provenance = test.provenance.clone();
    provenance.push(TransportRecord {
        kind: TransportKind::Conjugate,
        label: format!("conjugate[{description_bits}b]"),
        cost_bits: description_bits as f64,
        charged_bits: charged,
    });
    Ok(Test {
        id: format!("{}*U", test.id),
        matrix: TestMatrix::Dense {
            matrix: Arc::new(conjugated),
            scale: 1.0,
        },
        weight: test.weight * (-charged).exp2(),
        initial_weight: test.initial_weight,
        provenance,
    })
}

/// Extension transport: a test for the reduced state becomes t (x) I on the
/// larger space, with Tr((t (x) I) sigma) = Tr(t Tr_B sigma) exactly. The
/// description cost is the code length of the traced qubit count.
pub fn transport_extend(test: &Test, extra_qubits: u32, policy: ChargePolicy) -> Result<Test> {
    if extra_qubits == 0 {
        return Ok(test.clone());
    }
    let extended = tensor(
        &test.matrix.to_matrix(),
        &ComplexMatrix::identity(1usize << extra_qubits),
    );
    let cost = len_nat(extra_qubits as u64) as f64;
    let charged = policy.applied(cost);
    let mut provenance = test.provenance.clone();
    provenance.push(TransportRecord {
        kind: TransportKind::Extend,
        label: format!("extend[{extra_qubits}q]"),
        cost_bits: cost,
        charged_bits: charged,
    });
    Ok(Test {
        id: format!("{}(x)I{extra_qubits}", test.id),
        matrix: TestMatrix::Dense {
            matrix: Arc::new(extended),
            scale: 1.0,
        },
        weight: test.weight * (-charged).exp2(),
        initial_weight: test.initial_weight,
        provenance,
    })
}

/// POVM transport: the test Σ_k (m_hat(k) / Tr(E_k rho)) E_k, which scores
/// sigma at exactly the classical deficiency aggregate of the measured
/// outcome distributions. Outcomes with zero probability under rho are
/// dropped. The weight is 2^{-(2 + description length of E)}: a fixed 2-bit
/// family slot plus the POVM description under the policy.
pub fn transport_povm(povm: &Povm, rho: &SemiDensityMatrix, policy: ChargePolicy) -> Result<Test> {
    let probs = apply_povm(povm, rho)?;
    let dim = povm.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    let mut dropped = 0usize;
    for (k, outcome) in povm.outcomes().iter().enumerate() {
        let p = probs.prob(k);
        if p <= 0.0 {
            dropped += 1;
            continue;
        }
        acc.add_scaled_assign(outcome, m_hat_nat(k as u64) / p);
    }
    let cost = povm.description_len()? as f64;
    let charged = 2.0 + policy.applied(cost);
    Ok(Test {
        id: format!("povm[{}k,{dropped}dropped]", povm.len()),
        matrix: TestMatrix::Dense {
            matrix: Arc::new(acc.hermitized()),
            scale: 1.0,
        },
        weight: (-charged).exp2(),
        initial_weight: 1.0,
        provenance: vec![TransportRecord {
            kind: TransportKind::Povm,
            label: format!("povm[2+{cost}b]"),
            cost_bits: 2.0 + cost,
            charged_bits: charged,
        }],
    })
}

/// Block-reduction transport on a product pair: factors (E, F) over the
/// doubled space become (M_{E nu}, M_{F xi}) over the base space, so that
/// Tr(M_{E nu} sigma) = Tr(E (sigma (x) nu)) exactly. Admission scalings
/// (in bits) multiply the factor matrices; the weight pays the description
/// costs of nu and xi plus a fixed 2-bit tag under the policy.
#[allow(clippy::too_many_arguments)]
pub fn transport_m_reduce_pair(
    pair: &ProductPair,
    nu: &SemiDensityMatrix,
    xi: &SemiDensityMatrix,
    k_nu: u64,
    k_xi: u64,
    admission_bits_left: f64,
    admission_bits_right: f64,
    policy: ChargePolicy,
) -> Result<ProductPair> {
    let n = nu.dim();
    let left = m_reduce(&pair.left.to_matrix(), nu.matrix(), n)?.hermitized();
    let right = m_reduce(&pair.right.to_matrix(), xi.matrix(), n)?.hermitized();
    let cost = (k_nu + k_xi + 2) as f64;
    let charged = policy.applied(cost);
    let mut provenance = pair.provenance.clone();
    provenance.push(TransportRecord {
        kind: TransportKind::MReduce,
        label: format!("m-reduce[{k_nu}+{k_xi}+2b]"),
        cost_bits: cost,
        charged_bits: charged,
    });
    provenance.push(TransportRecord {
        kind: TransportKind::Admission,
        label: "m-reduce admission".into(),
        cost_bits: admission_bits_left + admission_bits_right,
        charged_bits: 0.0,
    });
    Ok(ProductPair {
        id: format!("M[{}]", pair.id),
        left: TestMatrix::Dense {
            matrix: Arc::new(left),
            scale: (-admission_bits_left).exp2(),
        },
        right: TestMatrix::Dense {
            matrix: Arc::new(right),
            scale: (-admission_bits_right).exp2(),
        },
        weight: pair.weight * (-charged).exp2(),
        provenance,
    })
}

/// Applies independent maps to the left and right factor lists of a block,
/// producing a transported block. Factor weights are preserved; description
/// charges go to the block penalties and admission scalings belong inside
/// the mapped matrices.
pub fn map_block_factors(
    block: &GridBlock,
    id: impl Into<String>,
    map_left: impl Fn(&Factor) -> Result<TestMatrix>,
    map_right: impl Fn(&Factor) -> Result<TestMatrix>,
    extra_penalty_bits: f64,
    record: TransportRecord,
) -> Result<GridBlock> {
    let mut left = Vec::with_capacity(block.left.len());
    for f in block.left.iter() {
        left.push(Factor {
            id: format!("{}|L", f.id),
            matrix: map_left(f)?,
            weight: f.weight,
        });
    }
    let mut right = Vec::with_capacity(block.right.len());
    for f in block.right.iter() {
        right.push(Factor {
            id: format!("{}|R", f.id),
            matrix: map_right(f)?,
            weight: f.weight,
        });
    }
    let mut provenance = block.provenance.clone();
    provenance.push(record);
    Ok(GridBlock {
        id: id.into(),
        left: Arc::new(left),
        right: Arc::new(right),
        grid_penalty_bits: block.grid_penalty_bits + extra_penalty_bits,
        diag_penalty_bits: block.diag_penalty_bits + extra_penalty_bits,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{default_test_family, deficiency};
    use crate::qops::{computational_povm, random_density};
    use crate::universal::mu_cached;
    use rand::SeedableRng;

    #[test]
    fn identity_conjugation_with_zero_cost_is_identity() {
        let test = Test::new(
            "t",
            TestMatrix::ScaledIdentity { dim: 2, scale: 0.5 },
            0.25,
        );
        let u = UnitaryTransform::identity(2);
        let moved = transport_conjugate(&test, &u, 0, ChargePolicy::charged()).unwrap();
        assert_eq!(moved.weight, test.weight);
        assert!(moved
            .matrix
            .to_matrix()
            .max_abs_diff(&test.matrix.to_matrix())
            < 1e-15);
        assert!(moved.weight_consistent());
    }

    #[test]
    fn conjugation_preserves_membership_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let u = UnitaryTransform::new(
            crate::qops::rational_rotation().to_complex_matrix(),
        )
        .unwrap();
        for _ in 0..10 {
            let rho = random_density(2, &mut rng);
            let rho_conj = rho.conjugate_by(&u).unwrap();
            let test = Test::new(
                "t",
                TestMatrix::Dense {
                    matrix: Arc::new(random_density(2, &mut rng).matrix().scale_re(0.9)),
                    scale: 1.0,
                },
                0.1,
            );
            let lhs = test.matrix.expectation(&rho_conj);
            let moved = transport_conjugate(&test, &u, 40, ChargePolicy::charged()).unwrap();
            let rhs = moved.matrix.expectation(&rho);
            assert!((lhs - rhs).abs() < 1e-10);
            assert!((moved.weight / test.weight - (0.5f64).powi(40)).abs() < 1e-18);
        }
    }

    #[test]
    fn extend_scores_partial_trace_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let sigma = random_density(4, &mut rng);
        let reduced = sigma
            .partial_trace(2, 2, crate::mat::TraceSide::Second)
            .unwrap();
        let test = Test::new(
            "t",
            TestMatrix::Dense {
                matrix: Arc::new(random_density(2, &mut rng).matrix().scale_re(0.8)),
                scale: 1.0,
            },
            0.5,
        );
        let extended = transport_extend(&test, 1, ChargePolicy::free()).unwrap();
        let lhs = extended.matrix.expectation(&sigma);
        let rhs = test.matrix.expectation(&reduced);
        assert!((lhs - rhs).abs() < 1e-10);
        // Free policy keeps the weight; the record still carries the cost.
        assert_eq!(extended.weight, test.weight);
        assert_eq!(extended.provenance.len(), 1);
        assert!(extended.provenance[0].cost_bits > 0.0);
        // Zero extension is a no-op.
        let same = transport_extend(&test, 0, ChargePolicy::charged()).unwrap();
        assert_eq!(same.provenance.len(), 0);
    }

    #[test]
    fn single_outcome_povm_reduces_to_point_case() {
        // {I} has one outcome; the transported test is m_hat(0) I / Tr(rho).
        let povm = Povm::from_exact(vec![crate::rational::ElementaryMatrix::identity(1)]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(2, &mut rng);
        let sigma = random_density(2, &mut rng);
        let nu = transport_povm(&povm, &rho, ChargePolicy::free()).unwrap();
        let expected = m_hat_nat(0) * sigma.trace() / rho.trace();
        assert!((nu.matrix.expectation(&sigma) - expected).abs() < 1e-12);
    }

    #[test]
    fn m_reduce_pair_transport_keeps_scores_and_psd() {
        use crate::mat::tensor;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let nu = SemiDensityMatrix::from_vector(&[
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        // Identity factors reduce to identity-like blocks.
        let pair = ProductPair {
            id: "id-pair".into(),
            left: TestMatrix::ScaledIdentity { dim: 4, scale: 1.0 },
            right: TestMatrix::ScaledIdentity { dim: 4, scale: 1.0 },
            weight: 0.25,
            provenance: Vec::new(),
        };
        let moved = transport_m_reduce_pair(
            &pair,
            &nu,
            &nu,
            13,
            13,
            0.0,
            0.0,
            ChargePolicy::charged(),
        )
        .unwrap();
        let identity2 = ComplexMatrix::identity(2);
        assert!(moved.left.to_matrix().max_abs_diff(&identity2) < 1e-12);
        assert!((moved.weight.log2() - (0.25f64.log2() - 28.0)).abs() < 1e-12);

        // Random PSD factors: score transfer Tr(M_{E nu} sigma) =
        // Tr(E (sigma (x) nu)) and PSD preservation.
        for _ in 0..5 {
            let e = crate::qops::random_psd(4, &mut rng).scale_re(0.2);
            let f = crate::qops::random_psd(4, &mut rng).scale_re(0.2);
            let pair = ProductPair {
                id: "rand".into(),
                left: TestMatrix::Dense {
                    matrix: Arc::new(e.clone()),
                    scale: 1.0,
                },
                right: TestMatrix::Dense {
                    matrix: Arc::new(f.clone()),
                    scale: 1.0,
                },
                weight: 0.1,
                provenance: Vec::new(),
            };
            let moved = transport_m_reduce_pair(
                &pair,
                &nu,
                &nu,
                13,
                13,
                1.0,
                2.0,
                ChargePolicy::free(),
            )
            .unwrap();
            let sigma = random_density(2, &mut rng);
            let direct = e
                .trace_product(&tensor(sigma.matrix(), nu.matrix()))
                .unwrap()
                .re;
            let via_reduction = moved.left.expectation(&sigma);
            // The admission scaling of 1 bit halves the left factor.
            assert!((via_reduction - 0.5 * direct).abs() < 1e-10);
            let psd = crate::mat::validate_psd(&moved.left.to_matrix(), 1e-9).unwrap();
            assert!(psd.is_psd);
            let direct_right = f
                .trace_product(&tensor(sigma.matrix(), nu.matrix()))
                .unwrap()
                .re;
            assert!((moved.right.expectation(&sigma) - 0.25 * direct_right).abs() < 1e-10);
        }
    }

    #[test]
    fn povm_transport_is_admissible_and_scores_classical_deficiency() {
        let mu = mu_cached(1, 22).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let povm = computational_povm(1).unwrap();
        for _ in 0..5 {
            let rho = random_density(2, &mut rng);
            let sigma = random_density(2, &mut rng);
            let nu = transport_povm(&povm, &rho, ChargePolicy::free()).unwrap();
            // Admissible: Tr(nu rho) = Σ m_hat(k) over supported outcomes.
            let against = nu.matrix.expectation(&rho);
            assert!(against <= 1.0 + 1e-10);
            // Scoring sigma reproduces the classical aggregate.
            let e_sigma = apply_povm(&povm, &sigma).unwrap();
            let e_rho = apply_povm(&povm, &rho).unwrap();
            let classical: f64 = (0..povm.len())
                .filter(|&k| e_rho.prob(k) > 0.0)
                .map(|k| m_hat_nat(k as u64) * e_sigma.prob(k) / e_rho.prob(k))
                .sum();
            assert!((nu.matrix.expectation(&sigma) - classical).abs() < 1e-10);
            // Adding the transported test to the family witnesses the
            // measurement bound.
            let mut family = default_test_family(&rho, None, &mu).unwrap();
            family.add_test(nu.clone(), &rho).unwrap();
            let d_quantum = deficiency(&sigma, &family).unwrap().value.unwrap();
            let d_classical = classical.log2();
            assert!(d_quantum >= d_classical + nu.weight.log2() - 1e-9);
        }
    }
}
