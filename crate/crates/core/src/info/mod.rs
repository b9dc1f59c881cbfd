//! Randomness-deficiency and mutual-information machinery.
//!
//! Scores are always relative to a finite, explicitly constructed test
//! family, so every score is a lower bound on its idealized counterpart and
//! every inequality carries a constant read off the family's weight ledger.
//! Tests move between families through the transports in [`transport`]; each
//! move multiplies the weight by an explicit power of two that the
//! inequality constants account for.

pub mod measurement;
mod product;
pub mod transport;

pub use measurement::{
    corollary_sum_bound, extend_family_with_povm_pairs, measurement_info_bound, CorollaryBound,
    MeasurementBound,
};
pub use product::{
    mutual_information, product_test_family, Factor, GridBlock, ProductPair, ProductTestFamily,
};
pub use transport::{
    map_block_factors, transport_conjugate, transport_extend, transport_m_reduce_pair,
    transport_povm, ChargePolicy, TransportKind, TransportRecord,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::{len_nat, EncodableObject};
use crate::error::{Error, Result};
use crate::mat::{inverse_sqrt, ComplexMatrix, SemiDensityMatrix};
use crate::rational::ElementaryMatrix;
use crate::universal::{k_hat_nat, m_hat_nat, UniversalMatrix};

/// Admissibility slack: Tr(test * target) may exceed 1 by at most this.
pub const ADMISSION_TOL: f64 = 1e-10;

/// A PSD test matrix in one of three shapes; the scale is always
/// non-negative, so positivity is structural for identity and projector
/// shapes and inherited for dense ones.
#[derive(Debug, Clone)]
pub enum TestMatrix {
    ScaledIdentity {
        dim: usize,
        scale: f64,
    },
    /// scale * |v><v| with a sparse (possibly subnormalized) vector v.
    ScaledProjector {
        dim: usize,
        amps: Arc<Vec<(usize, Complex64)>>,
        scale: f64,
    },
    Dense {
        matrix: Arc<ComplexMatrix>,
        scale: f64,
    },
}

impl TestMatrix {
    pub fn dim(&self) -> usize {
        match self {
            TestMatrix::ScaledIdentity { dim, .. } => *dim,
            TestMatrix::ScaledProjector { dim, .. } => *dim,
            TestMatrix::Dense { matrix, .. } => matrix.rows(),
        }
    }

    pub fn scale(&self) -> f64 {
        match self {
            TestMatrix::ScaledIdentity { scale, .. }
            | TestMatrix::ScaledProjector { scale, .. }
            | TestMatrix::Dense { scale, .. } => *scale,
        }
    }

    /// Tr(test * sigma).
    pub fn expectation(&self, sigma: &SemiDensityMatrix) -> f64 {
        self.expectation_raw(sigma.matrix())
    }

    pub fn expectation_raw(&self, m: &ComplexMatrix) -> f64 {
        match self {
            TestMatrix::ScaledIdentity { scale, .. } => scale * m.trace().re,
            TestMatrix::ScaledProjector { amps, scale, .. } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, a) in amps.iter() {
                    for (j, b) in amps.iter() {
                        acc += a.conj() * m[(*i, *j)] * b;
                    }
                }
                scale * acc.re
            }
            TestMatrix::Dense { matrix, scale } => {
                scale * matrix.trace_product(m).expect("dims checked").re
            }
        }
    }

    /// Tr(test * |psi><psi|) for a dense unit vector.
    pub fn pure_expectation(&self, psi: &[Complex64]) -> f64 {
        match self {
            TestMatrix::ScaledIdentity { scale, .. } => *scale,
            TestMatrix::ScaledProjector { amps, scale, .. } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, a) in amps.iter() {
                    acc += a.conj() * psi[*i];
                }
                scale * acc.norm_sqr()
            }
            TestMatrix::Dense { matrix, scale } => {
                scale * matrix.quadratic_form(psi).expect("dims checked").re
            }
        }
    }

    /// Dense materialization with the scale applied.
    pub fn to_matrix(&self) -> ComplexMatrix {
        match self {
            TestMatrix::ScaledIdentity { dim, scale } => {
                ComplexMatrix::identity(*dim).scale_re(*scale)
            }
            TestMatrix::ScaledProjector { dim, amps, scale } => {
                let mut v = vec![Complex64::new(0.0, 0.0); *dim];
                for (i, a) in amps.iter() {
                    v[*i] = *a;
                }
                ComplexMatrix::outer(&v, &v).scale_re(*scale)
            }
            TestMatrix::Dense { matrix, scale } => matrix.scale_re(*scale),
        }
    }

    /// Multiplies the scale; shape is preserved.
    pub fn rescaled(&self, factor: f64) -> TestMatrix {
        let mut out = self.clone();
        match &mut out {
            TestMatrix::ScaledIdentity { scale, .. }
            | TestMatrix::ScaledProjector { scale, .. }
            | TestMatrix::Dense { scale, .. } => *scale *= factor,
        }
        out
    }
}

/// A weighted test with its transport history.
#[derive(Debug, Clone)]
pub struct Test {
    pub id: String,
    pub matrix: TestMatrix,
    pub weight: f64,
    pub initial_weight: f64,
    pub provenance: Vec<TransportRecord>,
}

impl Test {
    pub fn new(id: impl Into<String>, matrix: TestMatrix, weight: f64) -> Self {
        Self {
            id: id.into(),
            matrix,
            weight,
            initial_weight: weight,
            provenance: Vec::new(),
        }
    }

    /// Weight accounting invariant: current weight equals the initial weight
    /// times the product of the charged transport discounts.
    pub fn weight_consistent(&self) -> bool {
        let mut expected = self.initial_weight;
        for record in &self.provenance {
            expected *= (-record.charged_bits).exp2();
        }
        if expected == 0.0 {
            return self.weight == 0.0;
        }
        (self.weight / expected - 1.0).abs() < 1e-12
    }
}

/// A plain test family against a fixed target.
#[derive(Debug, Clone)]
pub struct TestFamily {
    id: String,
    dim: usize,
    tests: Vec<Test>,
    weight_sum: f64,
}

impl TestFamily {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        Self {
            id: id.into(),
            dim,
            tests: Vec::new(),
            weight_sum: 0.0,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tests(&self) -> &[Test] {
        &self.tests
    }

    pub fn total_weight(&self) -> f64 {
        self.weight_sum
    }

    /// Adds a test after checking admissibility against the family target
    /// and the overall weight budget.
    pub fn add_test(&mut self, test: Test, target: &SemiDensityMatrix) -> Result<()> {
        if test.matrix.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "TestFamily::add_test",
                got: test.matrix.dim(),
                expected: self.dim,
            });
        }
        let against_target = test.matrix.expectation(target);
        if against_target > 1.0 + ADMISSION_TOL {
            return Err(Error::Other(format!(
                "test {} not admissible: Tr(nu rho) = {against_target}",
                test.id
            )));
        }
        if self.weight_sum + test.weight > 1.0 + 1e-9 {
            return Err(Error::Other(format!(
                "family weight budget exceeded adding {}",
                test.id
            )));
        }
        self.weight_sum += test.weight;
        self.tests.push(test);
        Ok(())
    }

    /// Σ weight * Tr(nu sigma), the linear aggregate behind the score.
    pub fn aggregate(&self, sigma: &SemiDensityMatrix) -> f64 {
        self.tests
            .iter()
            .map(|t| t.weight * t.matrix.expectation(sigma))
            .sum()
    }
}

/// A log2 score together with the ledger of named bit constants that went
/// into it. A `None` value is negative infinity (zero aggregate).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeficiencyScore {
    pub value: Option<f64>,
    pub aggregate: f64,
    pub family_id: String,
    pub constant_ledger: BTreeMap<String, f64>,
}

impl DeficiencyScore {
    pub fn from_aggregate(aggregate: f64, family_id: &str) -> Self {
        let value = if aggregate > 0.0 {
            Some(aggregate.log2())
        } else {
            None
        };
        Self {
            value,
            aggregate,
            family_id: family_id.to_string(),
            constant_ledger: BTreeMap::new(),
        }
    }

    /// The score as an f64 with -inf for empty aggregates.
    pub fn value_or_neg_inf(&self) -> f64 {
        self.value.unwrap_or(f64::NEG_INFINITY)
    }
}

/// Deficiency of sigma against the family's target: log2 of the weighted
/// aggregate. Monotone non-decreasing under family enlargement.
pub fn deficiency(sigma: &SemiDensityMatrix, family: &TestFamily) -> Result<DeficiencyScore> {
    if sigma.dim() != family.dim {
        return Err(Error::DimensionMismatch {
            context: "deficiency",
            got: sigma.dim(),
            expected: family.dim,
        });
    }
    Ok(DeficiencyScore::from_aggregate(
        family.aggregate(sigma),
        &family.id,
    ))
}

/// Largest k >= 0 with 2^k * x <= 1, capped at 64; x <= 0 maps to the cap.
pub fn saturation_exponent(x: f64) -> u32 {
    if x <= 0.0 {
        return 64;
    }
    let k = (-x.log2()).floor();
    if k <= 0.0 {
        0
    } else if k >= 64.0 {
        64
    } else {
        k as u32
    }
}

pub(crate) fn matrix_fingerprint(m: &ComplexMatrix) -> String {
    let mut hasher = Sha256::new();
    for z in m.entries() {
        hasher.update(z.re.to_bits().to_le_bytes());
        hasher.update(z.im.to_bits().to_le_bytes());
    }
    let digest = hasher.finalize();
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}

/// Description complexity of the identity matrix on n qubits.
pub fn identity_description_len(n_qubits: u32) -> Result<u64> {
    let object = EncodableObject::Matrix {
        qubits: n_qubits,
        entries: ElementaryMatrix::identity(n_qubits).sparse_entries(),
    };
    Ok(object.payload_len()? as u64)
}

/// The default test family for a target semi-density matrix.
///
/// Generators: the identity (weighted by its own description probability);
/// one saturation-scaled projector per universal ledger state; and, when the
/// target is elementary and invertible, the closed-form conjugate
/// rho^{-1/2} mu rho^{-1/2} at its registration weight. Every member
/// satisfies Tr(nu rho) <= 1.
pub fn default_test_family(
    rho: &SemiDensityMatrix,
    rho_exact: Option<&ElementaryMatrix>,
    mu: &UniversalMatrix,
) -> Result<TestFamily> {
    if rho.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            context: "default_test_family",
            got: rho.dim(),
            expected: mu.dim(),
        });
    }
    let dim = rho.dim();
    let family_id = format!(
        "d[rho={}|n={},B={}]",
        matrix_fingerprint(rho.matrix()),
        mu.n_qubits(),
        mu.budget()
    );
    let mut family = TestFamily::new(family_id, dim);

    let identity_len = identity_description_len(mu.n_qubits())?;
    family.add_test(
        Test::new(
            "identity",
            TestMatrix::ScaledIdentity { dim, scale: 1.0 },
            (-(identity_len as f64)).exp2(),
        ),
        rho,
    )?;

    for entry in mu.ledger() {
        let x = entry.state.quadratic_form(rho.matrix());
        let k = saturation_exponent(x);
        let scale = (k as f64).exp2();
        let weight = (-((entry.state.code_len() as f64) + len_nat(k as u64) as f64)).exp2();
        let test = Test::new(
            format!("proj:{}", entry.state.code().to_hex()),
            TestMatrix::ScaledProjector {
                dim,
                amps: Arc::new(entry.state.sparse_amplitudes().to_vec()),
                scale,
            },
            weight,
        );
        family.add_test(test, rho)?;
    }

    if let Some(exact) = rho_exact {
        if exact.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "default_test_family exact target",
                got: exact.dim(),
                expected: dim,
            });
        }
        let min_eig = rho.min_eigenvalue()?;
        if min_eig > 1e-10 {
            let inv_sqrt = inverse_sqrt(rho.matrix(), 1e-12)?;
            let conjugate = inv_sqrt
                .matmul(mu.matrix().matrix())?
                .matmul(&inv_sqrt)?
                .hermitized();
            let object = EncodableObject::Matrix {
                qubits: exact.qubits(),
                entries: exact.sparse_entries(),
            };
            let weight = (-((object.payload_len()? + 2) as f64)).exp2();
            family.add_test(
                Test::new(
                    "closed-form",
                    TestMatrix::Dense {
                        matrix: Arc::new(conjugate),
                        scale: 1.0,
                    },
                    weight,
                ),
                rho,
            )?;
        }
    }

    Ok(family)
}

/// Classical deficiency of a semimeasure against a probability measure with
/// finite support: log2 of Σ gamma(x) m_hat(x) / p(x).
///
/// Requires p(x) > 0 wherever gamma(x) > 0. A zero semimeasure scores
/// negative infinity.
pub fn classical_deficiency(gamma: &[(u64, f64)], p: &[(u64, f64)]) -> Result<f64> {
    let p_map: BTreeMap<u64, f64> = p.iter().copied().collect();
    let mut sum = 0.0_f64;
    for (x, g) in gamma {
        if *g < 0.0 {
            return Err(Error::Other(format!("semimeasure value {g} negative at {x}")));
        }
        if *g == 0.0 {
            continue;
        }
        let px = p_map.get(x).copied().unwrap_or(0.0);
        if px <= 0.0 {
            return Err(Error::SupportMismatch(format!(
                "gamma({x}) = {g} > 0 but P({x}) = 0"
            )));
        }
        sum += g * m_hat_nat(*x) / px;
    }
    Ok(if sum > 0.0 {
        sum.log2()
    } else {
        f64::NEG_INFINITY
    })
}

/// k_hat of the classical surrogate mutual information between two outcome
/// indices: K(i) + K(j) - K(pair(i, j)).
pub fn classical_pair_information(i: u64, j: u64) -> Result<i64> {
    let pair = EncodableObject::pair(EncodableObject::Nat(i), EncodableObject::Nat(j));
    Ok(k_hat_nat(i) as i64 + k_hat_nat(j) as i64 - pair.payload_len()? as i64)
}
