//! Product test families over a doubled space.
//!
//! A family is a list of grid blocks plus explicit pairs. A grid block holds
//! factor lists for the left and right slots; its tests are all ordered
//! factor pairs (weighted by the product of factor weights, discounted by
//! the grid penalty) together with the aligned diagonal pairs (weighted
//! linearly, discounted by the diagonal penalty). Diagonal pairs are what
//! let one description serve both slots, which is where self-information
//! comes from. Blocks whose left and right lists differ are scored
//! symmetrized, so factor-swap closure holds exactly and
//! I(sigma:rho) = I(rho:sigma) bit-for-bit.

use std::sync::Arc;

use super::{
    matrix_fingerprint, saturation_exponent, DeficiencyScore, TestMatrix, TransportRecord,
    ADMISSION_TOL,
};
use crate::codec::len_nat;
use crate::error::{Error, Result};
use crate::mat::{support_projector, tensor, ComplexMatrix, SemiDensityMatrix};
use crate::universal::UniversalMatrix;

/// One factor of a product test.
#[derive(Debug, Clone)]
pub struct Factor {
    pub id: String,
    pub matrix: TestMatrix,
    pub weight: f64,
}

/// Grid-plus-diagonal block over factor lists.
#[derive(Debug, Clone)]
pub struct GridBlock {
    pub id: String,
    pub left: Arc<Vec<Factor>>,
    pub right: Arc<Vec<Factor>>,
    /// Bits discounting every grid pair (left_r, right_s).
    pub grid_penalty_bits: f64,
    /// Bits discounting every diagonal pair (left_r, right_r).
    pub diag_penalty_bits: f64,
    pub provenance: Vec<TransportRecord>,
}

impl GridBlock {
    pub fn symmetric(&self) -> bool {
        Arc::ptr_eq(&self.left, &self.right)
    }

    fn factor_weight_sum(factors: &[Factor]) -> f64 {
        factors.iter().map(|f| f.weight).sum()
    }

    /// Total test weight carried by this block (both orders counted for
    /// asymmetric blocks, which are scored symmetrized).
    pub fn total_weight(&self) -> f64 {
        let wl = Self::factor_weight_sum(&self.left);
        let wr = Self::factor_weight_sum(&self.right);
        let grid = (-self.grid_penalty_bits).exp2() * wl * wr;
        let diag_w: f64 = self
            .left
            .iter()
            .zip(self.right.iter())
            .map(|(l, _)| l.weight)
            .sum();
        let diag = (-self.diag_penalty_bits).exp2() * diag_w;
        if self.symmetric() {
            grid + diag
        } else {
            2.0 * (grid + diag)
        }
    }
}

/// An explicit product pair, scored symmetrized.
#[derive(Debug, Clone)]
pub struct ProductPair {
    pub id: String,
    pub left: TestMatrix,
    pub right: TestMatrix,
    pub weight: f64,
    pub provenance: Vec<TransportRecord>,
}

/// A family of product tests against mu (x) mu.
#[derive(Debug, Clone)]
pub struct ProductTestFamily {
    id: String,
    factor_dim: usize,
    blocks: Vec<GridBlock>,
    pairs: Vec<ProductPair>,
    weight_sum: f64,
}

impl ProductTestFamily {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn factor_dim(&self) -> usize {
        self.factor_dim
    }

    pub fn blocks(&self) -> &[GridBlock] {
        &self.blocks
    }

    pub fn pairs(&self) -> &[ProductPair] {
        &self.pairs
    }

    pub fn base_factors(&self) -> &Arc<Vec<Factor>> {
        &self.blocks[0].left
    }

    pub fn total_weight(&self) -> f64 {
        self.weight_sum
    }

    /// Adds a block after verifying factor admissibility against mu and the
    /// family weight budget.
    pub fn add_block(&mut self, block: GridBlock, mu: &UniversalMatrix) -> Result<()> {
        for factor in block.left.iter().chain(block.right.iter()) {
            let t = factor.matrix.expectation(mu.matrix());
            if t > 1.0 + ADMISSION_TOL {
                return Err(Error::Other(format!(
                    "factor {} not admissible: Tr(A mu) = {t}",
                    factor.id
                )));
            }
        }
        let block_weight = block.total_weight();
        if self.weight_sum + block_weight > 1.0 + 1e-9 {
            return Err(Error::Other("product family weight budget exceeded".into()));
        }
        self.weight_sum += block_weight;
        self.blocks.push(block);
        Ok(())
    }

    /// Adds an explicit pair (and implicitly its swap twin through
    /// symmetrized scoring) after the product admissibility check.
    pub fn add_pair(&mut self, pair: ProductPair, mu: &UniversalMatrix) -> Result<()> {
        let ta = pair.left.expectation(mu.matrix());
        let tb = pair.right.expectation(mu.matrix());
        if ta * tb > 1.0 + ADMISSION_TOL {
            return Err(Error::Other(format!(
                "pair {} not admissible: Tr((A x B)(mu x mu)) = {}",
                pair.id,
                ta * tb
            )));
        }
        if self.weight_sum + 2.0 * pair.weight > 1.0 + 1e-9 {
            return Err(Error::Other("product family weight budget exceeded".into()));
        }
        self.weight_sum += 2.0 * pair.weight;
        self.pairs.push(pair);
        Ok(())
    }

    /// The weighted aggregate Σ w Tr(A sigma) Tr(B rho) over all tests.
    /// Exactly symmetric under swapping the arguments.
    pub fn aggregate(&self, sigma: &SemiDensityMatrix, rho: &SemiDensityMatrix) -> f64 {
        let mut total = 0.0_f64;
        for block in &self.blocks {
            let grid_scale = (-block.grid_penalty_bits).exp2();
            let diag_scale = (-block.diag_penalty_bits).exp2();
            if block.symmetric() {
                let mut s_sigma = 0.0_f64;
                let mut s_rho = 0.0_f64;
                let mut diag = 0.0_f64;
                for f in block.left.iter() {
                    let t_sigma = f.matrix.expectation(sigma);
                    let t_rho = f.matrix.expectation(rho);
                    s_sigma += f.weight * t_sigma;
                    s_rho += f.weight * t_rho;
                    diag += f.weight * (t_sigma * t_rho);
                }
                total += grid_scale * (s_sigma * s_rho) + diag_scale * diag;
            } else {
                let mut sl_sigma = 0.0_f64;
                let mut sl_rho = 0.0_f64;
                let mut sr_sigma = 0.0_f64;
                let mut sr_rho = 0.0_f64;
                let mut diag = 0.0_f64;
                for (l, r) in block.left.iter().zip(block.right.iter()) {
                    let tl_sigma = l.matrix.expectation(sigma);
                    let tl_rho = l.matrix.expectation(rho);
                    let tr_sigma = r.matrix.expectation(sigma);
                    let tr_rho = r.matrix.expectation(rho);
                    sl_sigma += l.weight * tl_sigma;
                    sl_rho += l.weight * tl_rho;
                    sr_sigma += r.weight * tr_sigma;
                    sr_rho += r.weight * tr_rho;
                    // Both orders inside one parenthesis keep the swap
                    // bit-identical.
                    diag += l.weight * (tl_sigma * tr_rho + tl_rho * tr_sigma);
                }
                total += grid_scale * (sl_sigma * sr_rho + sl_rho * sr_sigma) + diag_scale * diag;
            }
        }
        for pair in &self.pairs {
            let a_sigma = pair.left.expectation(sigma);
            let a_rho = pair.left.expectation(rho);
            let b_sigma = pair.right.expectation(sigma);
            let b_rho = pair.right.expectation(rho);
            total += pair.weight * (a_sigma * b_rho + a_rho * b_sigma);
        }
        total
    }

    /// The aggregate as a dense matrix C on the doubled space, satisfying
    /// Tr(C (sigma (x) rho)) == aggregate(sigma, rho) up to rounding.
    pub fn aggregate_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.factor_dim;
        let mut total = ComplexMatrix::zeros(d * d, d * d);
        for block in &self.blocks {
            let grid_scale = (-block.grid_penalty_bits).exp2();
            let diag_scale = (-block.diag_penalty_bits).exp2();
            let sum_of = |factors: &[Factor]| -> ComplexMatrix {
                let mut acc = ComplexMatrix::zeros(d, d);
                for f in factors {
                    acc.add_scaled_assign(&f.matrix.to_matrix(), f.weight);
                }
                acc
            };
            let wl = sum_of(&block.left);
            if block.symmetric() {
                total.add_scaled_assign(&tensor(&wl, &wl), grid_scale);
                for f in block.left.iter() {
                    let m = f.matrix.to_matrix();
                    total.add_scaled_assign(&tensor(&m, &m), diag_scale * f.weight);
                }
            } else {
                let wr = sum_of(&block.right);
                total.add_scaled_assign(&tensor(&wl, &wr), grid_scale);
                total.add_scaled_assign(&tensor(&wr, &wl), grid_scale);
                for (l, r) in block.left.iter().zip(block.right.iter()) {
                    let lm = l.matrix.to_matrix();
                    let rm = r.matrix.to_matrix();
                    total.add_scaled_assign(&tensor(&lm, &rm), diag_scale * l.weight);
                    total.add_scaled_assign(&tensor(&rm, &lm), diag_scale * l.weight);
                }
            }
        }
        for pair in &self.pairs {
            let lm = pair.left.to_matrix();
            let rm = pair.right.to_matrix();
            total.add_scaled_assign(&tensor(&lm, &rm), pair.weight);
            total.add_scaled_assign(&tensor(&rm, &lm), pair.weight);
        }
        Ok(total)
    }
}

/// Builds the base product family for mu (x) mu: identity, saturation-scaled
/// ledger projectors, and the support conjugate of mu, paired through one
/// symmetric grid block with 2-bit grid and diagonal tags.
pub fn product_test_family(mu: &UniversalMatrix) -> Result<ProductTestFamily> {
    let dim = mu.dim();
    let mut factors = Vec::with_capacity(mu.ledger().len() + 2);

    let identity_len = super::identity_description_len(mu.n_qubits())?;
    factors.push(Factor {
        id: "identity".into(),
        matrix: TestMatrix::ScaledIdentity { dim, scale: 1.0 },
        weight: (-(identity_len as f64)).exp2(),
    });

    for entry in mu.ledger() {
        let x = entry.state.quadratic_form(mu.matrix().matrix());
        let k = saturation_exponent(x);
        let scale = (k as f64).exp2();
        let weight = (-((entry.state.code_len() + len_nat(k as u64)) as f64)).exp2();
        factors.push(Factor {
            id: format!("proj:{}", entry.state.code().to_hex()),
            matrix: TestMatrix::ScaledProjector {
                dim,
                amps: Arc::new(entry.state.sparse_amplitudes().to_vec()),
                scale,
            },
            weight,
        });
    }

    // The mu-conjugate mu^{-1/2} mu mu^{-1/2}: the support projector.
    let projector = support_projector(mu.matrix().matrix(), 1e-12)?;
    let conj_weight_bits =
        len_nat(mu.n_qubits() as u64) as f64 + len_nat(mu.budget()) as f64 + 2.0;
    factors.push(Factor {
        id: "mu-conjugate".into(),
        matrix: TestMatrix::Dense {
            matrix: Arc::new(projector),
            scale: 1.0,
        },
        weight: (-conj_weight_bits).exp2(),
    });

    let shared = Arc::new(factors);
    let block = GridBlock {
        id: "base".into(),
        left: Arc::clone(&shared),
        right: shared,
        grid_penalty_bits: 2.0,
        diag_penalty_bits: 2.0,
        provenance: Vec::new(),
    };

    let mut family = ProductTestFamily {
        id: format!(
            "C[mu={}|n={},B={}]",
            matrix_fingerprint(mu.matrix().matrix()),
            mu.n_qubits(),
            mu.budget()
        ),
        factor_dim: dim,
        blocks: Vec::new(),
        pairs: Vec::new(),
        weight_sum: 0.0,
    };
    family.add_block(block, mu)?;
    Ok(family)
}

/// Mutual information: log2 of the product-family aggregate on
/// sigma (x) rho. Exactly symmetric in its arguments.
pub fn mutual_information(
    sigma: &SemiDensityMatrix,
    rho: &SemiDensityMatrix,
    family: &ProductTestFamily,
) -> Result<DeficiencyScore> {
    if sigma.dim() != family.factor_dim || rho.dim() != family.factor_dim {
        return Err(Error::DimensionMismatch {
            context: "mutual_information",
            got: sigma.dim(),
            expected: family.factor_dim,
        });
    }
    Ok(DeficiencyScore::from_aggregate(
        family.aggregate(sigma, rho),
        &family.id,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universal::mu_cached;
    use num_complex::Complex64;
    use rand::SeedableRng;

    const TEST_BUDGET: u64 = 22;

    #[test]
    fn base_family_weight_budget_and_admission() {
        let mu = mu_cached(1, TEST_BUDGET).unwrap();
        let family = product_test_family(&mu).unwrap();
        assert!(family.total_weight() <= 1.0 + 1e-12);
        for f in family.base_factors().iter() {
            assert!(f.matrix.expectation(mu.matrix()) <= 1.0 + ADMISSION_TOL);
        }
    }

    #[test]
    fn swap_symmetry_is_bit_identical() {
        let mu = mu_cached(1, TEST_BUDGET).unwrap();
        let mut family = product_test_family(&mu).unwrap();
        // Add an asymmetric pair to exercise the symmetrized path.
        family
            .add_pair(
                ProductPair {
                    id: "asym".into(),
                    left: TestMatrix::ScaledIdentity { dim: 2, scale: 0.5 },
                    right: TestMatrix::ScaledProjector {
                        dim: 2,
                        amps: Arc::new(vec![(0, Complex64::new(1.0, 0.0))]),
                        scale: 1.0,
                    },
                    weight: 1e-3,
                    provenance: Vec::new(),
                },
                &mu,
            )
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let sigma = crate::qops::random_density(2, &mut rng);
            let rho = crate::qops::random_density(2, &mut rng);
            let ab = mutual_information(&sigma, &rho, &family).unwrap();
            let ba = mutual_information(&rho, &sigma, &family).unwrap();
            assert_eq!(ab.aggregate.to_bits(), ba.aggregate.to_bits());
            assert_eq!(
                ab.value.unwrap().to_bits(),
                ba.value.unwrap().to_bits()
            );
        }
    }

    #[test]
    fn aggregate_matrix_matches_factorized_scoring() {
        let mu = mu_cached(1, TEST_BUDGET).unwrap();
        let family = product_test_family(&mu).unwrap();
        let agg_matrix = family.aggregate_matrix().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let sigma = crate::qops::random_density(2, &mut rng);
            let rho = crate::qops::random_density(2, &mut rng);
            let via_matrix = agg_matrix
                .trace_product(&tensor(sigma.matrix(), rho.matrix()))
                .unwrap()
                .re;
            let via_factors = family.aggregate(&sigma, &rho);
            assert!(
                (via_matrix - via_factors).abs() <= 1e-9 * via_factors.abs().max(1e-30),
                "matrix {via_matrix} factors {via_factors}"
            );
        }
    }

    #[test]
    fn diagonal_reuse_boosts_self_information() {
        // The diagonal pair for the |0> projector contributes weight ~ w
        // (not w^2), so I(|0><0| : |0><0|) sits well above the grid-only
        // level 2 log2 S.
        let mu = mu_cached(1, TEST_BUDGET).unwrap();
        let family = product_test_family(&mu).unwrap();
        let zero = SemiDensityMatrix::from_vector(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let self_info = mutual_information(&zero, &zero, &family)
            .unwrap()
            .value
            .unwrap();
        let mut s = 0.0;
        for f in family.base_factors().iter() {
            s += f.weight * f.matrix.expectation(&zero);
        }
        let grid_only = 2.0 * s.log2() - 2.0;
        assert!(self_info > grid_only + 1.0);
    }
}
