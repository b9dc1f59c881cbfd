//! No-cloning harness.
//!
//! Basis states clone their full description complexity: after the copy
//! permutation, I(|i><i| : |i><i|) >= K(i) - c with c read off the diagonal
//! pair weights. Haar states cannot: for every battery unitary C, the
//! information between the two halves of C(|psi>|0>) is bounded by the
//! self-information of |psi| plus the chain constant assembled from the
//! reduced-pair, conjugation, and factor transports.

use num_complex::Complex64;

use super::report::{fields, mean_with_error, ExperimentParams, ExperimentReport, FieldValue};
use super::{domination_bits, family_for, zero_projector_exact, LOG_SLACK_TOL};
use crate::codec::len_nat;
use crate::error::Result;
use crate::info::{
    map_block_factors, mutual_information, Factor, ProductTestFamily, TestMatrix, TransportKind,
    TransportRecord,
};
use crate::mat::{ComplexMatrix, PureState, TraceSide, UnitaryTransform};
use crate::qops::{
    clone_pipeline, copy_unitary_exact, matrix_description_len, scramble_unitary_exact,
    HaarSampler,
};
use crate::rational::ElementaryMatrix;
use crate::universal::{k_hat_nat, mu_cached, UniversalMatrix};

use std::sync::Arc;

/// Columns of C restricted to |i>|0> inputs, reshaped to dim x dim.
fn ancilla_columns(c: &ComplexMatrix, dim: usize) -> Vec<ComplexMatrix> {
    (0..dim)
        .map(|i| ComplexMatrix::from_fn(dim, dim, |a, b| c[(a * dim + b, i * dim)]))
        .collect()
}

/// The chain-transported factor for the left slot:
/// A -> M with M[i][j] = <i,0| C^dagger (A (x) I) C |j,0>, scaled.
fn chain_left(factor: &Factor, columns: &[ComplexMatrix], dim: usize, scale: f64) -> TestMatrix {
    match &factor.matrix {
        TestMatrix::ScaledProjector { amps, scale: c, .. } => {
            // h_i[b] = sum_a conj(v[a]) U_i[a][b]; M[i][j] = c <h_i, h_j>.
            let h: Vec<Vec<Complex64>> = columns
                .iter()
                .map(|u| {
                    (0..dim)
                        .map(|b| {
                            amps.iter()
                                .map(|(a, v)| v.conj() * u[(*a, b)])
                                .sum::<Complex64>()
                        })
                        .collect()
                })
                .collect();
            let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, y) in h[i].iter().zip(&h[j]) {
                    acc += x.conj() * y;
                }
                acc * *c
            });
            TestMatrix::Dense {
                matrix: Arc::new(m.hermitized()),
                scale,
            }
        }
        other => {
            let a = other.to_matrix();
            let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..dim {
                    for y in 0..dim {
                        for b in 0..dim {
                            acc += columns[i][(x, b)].conj() * a[(x, y)] * columns[j][(y, b)];
                        }
                    }
                }
                acc
            });
            TestMatrix::Dense {
                matrix: Arc::new(m.hermitized()),
                scale,
            }
        }
    }
}

/// The right-slot analogue: B acts on the second tensor slot.
fn chain_right(factor: &Factor, columns: &[ComplexMatrix], dim: usize, scale: f64) -> TestMatrix {
    match &factor.matrix {
        TestMatrix::ScaledProjector { amps, scale: c, .. } => {
            // p_i[a] = sum_b conj(v[b]) U_i[a][b]; M[i][j] = c <p_i, p_j>.
            let p: Vec<Vec<Complex64>> = columns
                .iter()
                .map(|u| {
                    (0..dim)
                        .map(|a| {
                            amps.iter()
                                .map(|(b, v)| v.conj() * u[(a, *b)])
                                .sum::<Complex64>()
                        })
                        .collect()
                })
                .collect();
            let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, y) in p[i].iter().zip(&p[j]) {
                    acc += x.conj() * y;
                }
                acc * *c
            });
            TestMatrix::Dense {
                matrix: Arc::new(m.hermitized()),
                scale,
            }
        }
        other => {
            let b_mat = other.to_matrix();
            let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..dim {
                    for x in 0..dim {
                        for y in 0..dim {
                            acc += columns[i][(a, x)].conj() * b_mat[(x, y)] * columns[j][(a, y)];
                        }
                    }
                }
                acc
            });
            TestMatrix::Dense {
                matrix: Arc::new(m.hermitized()),
                scale,
            }
        }
    }
}

struct ChainFamily {
    name: String,
    unitary: UnitaryTransform,
    family: ProductTestFamily,
    c_chain: f64,
    c_chain_uncharged: f64,
}

/// Builds the chain-extended family for one battery unitary.
#[allow(clippy::too_many_arguments)]
fn build_chain_family(
    name: &str,
    c_exact: &ElementaryMatrix,
    base: &ProductTestFamily,
    mu_n: &UniversalMatrix,
    mu_joint: &UniversalMatrix,
    n: u32,
    policy: crate::info::ChargePolicy,
) -> Result<ChainFamily> {
    let dim = 1usize << n;
    let unitary = UnitaryTransform::new(c_exact.to_complex_matrix())?;

    // Admission exponents for the three chain steps.
    let nu = super::exact_to_semi_density(&zero_projector_exact(n))?;
    let mu_with_ancilla = mu_n.matrix().tensor(&nu);
    let c1 = domination_bits(mu_with_ancilla.matrix(), mu_joint.matrix().matrix())?.max(0.0);
    let conj_mu = mu_joint.matrix().conjugate_by(&unitary)?;
    let c2 = domination_bits(conj_mu.matrix(), mu_joint.matrix().matrix())?.max(0.0);
    let reduced_second = mu_joint.matrix().partial_trace(dim, dim, TraceSide::Second)?;
    let reduced_first = mu_joint.matrix().partial_trace(dim, dim, TraceSide::First)?;
    let c3_left = domination_bits(reduced_second.matrix(), mu_n.matrix().matrix())?.max(0.0);
    let c3_right = domination_bits(reduced_first.matrix(), mu_n.matrix().matrix())?.max(0.0);
    let s_left = c1 + c2 + c3_left;
    let s_right = c1 + c2 + c3_right;

    let k_c = matrix_description_len(c_exact)?;
    let k_nu = matrix_description_len(&zero_projector_exact(n))?;
    let desc_bits = (k_c + 2 * k_nu + 2 + len_nat(n as u64) as u64) as f64;
    let extra = 2.0 + policy.applied(desc_bits);
    let c_chain = extra + s_left + s_right;
    let c_chain_uncharged = 2.0 + s_left + s_right;

    let columns = ancilla_columns(unitary.matrix(), dim);
    let scale_left = (-s_left).exp2();
    let scale_right = (-s_right).exp2();
    let block = map_block_factors(
        &base.blocks()[0],
        format!("chain[{name}]"),
        |f| Ok(chain_left(f, &columns, dim, scale_left)),
        |f| Ok(chain_right(f, &columns, dim, scale_right)),
        extra,
        TransportRecord {
            kind: TransportKind::MReduce,
            label: format!(
                "chain[{name}]: lift+conjugate+reduce, s_left={s_left}, s_right={s_right}"
            ),
            cost_bits: desc_bits + s_left + s_right,
            charged_bits: policy.applied(desc_bits),
        },
    )?;
    let mut family = base.clone();
    family.add_block(block, mu_n)?;
    Ok(ChainFamily {
        name: name.to_string(),
        unitary,
        family,
        c_chain,
        c_chain_uncharged,
    })
}

pub fn exp_nocloning(params: &ExperimentParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("no-cloning", *params);
    let n = params.qubits;
    let dim = 1usize << n;
    let mu_n = mu_cached(n, params.budget)?;
    let mu_joint = mu_cached(2 * n, params.budget)?;
    let base = family_for(&mu_n)?;
    let policy = params.policy();

    // (a) Basis states through the copy permutation clone K(i) bits.
    let copy_exact = copy_unitary_exact(n);
    let copy = UnitaryTransform::new(copy_exact.to_complex_matrix())?;
    let mut c_basis = f64::NEG_INFINITY;
    let mut basis_rows = Vec::new();
    for i in 0..dim {
        let x = mu_n.matrix().matrix()[(i, i)].re;
        let k_i = crate::info::saturation_exponent(x);
        let basis_state = crate::universal::ElementaryState::new(
            n,
            vec![(i as u64, crate::rational::GaussianRational::one())],
        )?;
        let lower_bound = 2.0 * k_i as f64
            - basis_state.code_len() as f64
            - len_nat(k_i as u64) as f64
            - 2.0;
        c_basis = c_basis.max(k_hat_nat(i as u64) as f64 - lower_bound);
        basis_rows.push((i, lower_bound));
    }
    for (i, lower_bound) in basis_rows {
        let psi = PureState::basis(dim, i)?;
        let (left, right, joint) = clone_pipeline(&psi, &copy)?;
        let expected = psi.density();
        let copies_ok = left.matrix().max_abs_diff(expected.matrix()) < 1e-10
            && right.matrix().max_abs_diff(expected.matrix()) < 1e-10
            && (joint.trace() - 1.0).abs() < 1e-10;
        let info = mutual_information(&left, &right, &base)?.value_or_neg_inf();
        let k_i = k_hat_nat(i as u64) as f64;
        report.check(
            format!("basis-copy-{i}"),
            copies_ok && info >= k_i - c_basis - LOG_SLACK_TOL,
            fields(vec![
                ("info", FieldValue::float(info)),
                ("k_i_bits", FieldValue::float(k_i)),
                ("diag_lower_bound", FieldValue::float(lower_bound)),
                ("c_basis", FieldValue::float(c_basis)),
            ]),
        );
    }
    report.constant("c_basis_bits", c_basis);

    // (b) Haar states: the chain inequality for every battery unitary.
    let battery: Vec<(String, ElementaryMatrix)> = vec![
        ("copy".to_string(), copy_exact.clone()),
        ("identity".to_string(), ElementaryMatrix::identity(2 * n)),
        ("scramble".to_string(), scramble_unitary_exact(n)?),
    ];
    let mut chains = Vec::new();
    for (name, exact) in &battery {
        chains.push(build_chain_family(
            name, exact, &base, &mu_n, &mu_joint, n, policy,
        )?);
    }
    for chain in &chains {
        report.constant(format!("c_chain_{}", chain.name), chain.c_chain);
        report.constant(
            format!("c_chain_uncharged_{}", chain.name),
            chain.c_chain_uncharged,
        );
    }

    let samples = params.samples.max(1);
    let mut self_info_values = Vec::with_capacity(samples as usize);
    let mut worst_excess = f64::NEG_INFINITY;
    for chain in &chains {
        let mut all_ok = true;
        let mut worst_sample = -1i64;
        for k in 0..samples {
            let psi = HaarSampler::sample_at(n, params.seed, k);
            let (left, right, _) = clone_pipeline(&psi, &chain.unitary)?;
            let info_halves = mutual_information(&left, &right, &base)?.value_or_neg_inf();
            let psi_density = psi.density();
            let info_self =
                mutual_information(&psi_density, &psi_density, &chain.family)?.value_or_neg_inf();
            if chain.name == "copy" {
                let base_self =
                    mutual_information(&psi_density, &psi_density, &base)?.value_or_neg_inf();
                self_info_values.push(base_self);
            }
            let excess = info_halves - info_self - chain.c_chain;
            worst_excess = worst_excess.max(excess);
            if excess > LOG_SLACK_TOL {
                all_ok = false;
                worst_sample = k as i64;
            }
        }
        report.check(
            format!("haar-chain-{}", chain.name),
            all_ok,
            fields(vec![
                ("samples", FieldValue::Int(samples as i64)),
                ("c_chain", FieldValue::float(chain.c_chain)),
                ("worst_sample", FieldValue::Int(worst_sample)),
            ]),
        );
    }
    report.constant("haar_chain_worst_excess", worst_excess);

    let spread = mean_with_error(&self_info_values);
    let min_self = self_info_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max_self = self_info_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    report.info(
        "haar-self-information-distribution",
        fields(vec![
            ("mean", FieldValue::float(spread.mean)),
            ("std_error", FieldValue::float(spread.std_error)),
            ("min", FieldValue::float(min_self)),
            ("max", FieldValue::float(max_self)),
        ]),
    );
    Ok(report)
}
