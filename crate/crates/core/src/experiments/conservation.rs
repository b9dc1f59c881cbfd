//! Conservation harnesses: randomness and information scores under unitary
//! conjugation and partial traces.
//!
//! Each theorem is witnessed constructively: the tests of one family are
//! transported into the other, and the score inequality is asserted at the
//! constant the transport ledger declares. Equalities appear as a pair of
//! one-sided bounds, with the left side always scored on an unextended
//! family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{fields, ExperimentParams, ExperimentReport, FieldValue};
use super::{domination_bits, family_for, unitary_battery, LOG_SLACK_TOL};
use crate::error::Result;
use crate::info::{
    deficiency, default_test_family, mutual_information, transport_conjugate, transport_extend,
    map_block_factors, ProductTestFamily, TestMatrix, TransportKind, TransportRecord,
};
use crate::mat::{tensor, ComplexMatrix, TraceSide, UnitaryTransform};
use crate::qops::{matrix_description_len, random_density};
use crate::universal::{mu_cached, UniversalMatrix};

use std::sync::Arc;

const INSTANCES: usize = 50;

pub fn exp_conservation(params: &ExperimentParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("conservation", *params);
    randomness_unitary(params, &mut report)?;
    randomness_partial_trace(params, &mut report)?;
    information_unitary(params, &mut report)?;
    information_partial_trace(params, &mut report)?;
    reduced_pair_corollary(params, &mut report)?;
    Ok(report)
}

/// d(U sigma U* | U rho U*) = d(sigma | rho) up to the description cost of
/// U, witnessed in both directions by conjugation transports.
fn randomness_unitary(params: &ExperimentParams, report: &mut ExperimentReport) -> Result<()> {
    let n = params.qubits;
    let dim = 1usize << n;
    let mu = mu_cached(n, params.budget)?;
    let policy = params.policy();
    let battery = unitary_battery(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xA1);
    let mut worst = f64::NEG_INFINITY;

    for i in 0..INSTANCES {
        let (u_name, u_exact) = &battery[i % battery.len()];
        let u = UnitaryTransform::new(u_exact.to_complex_matrix())?;
        let desc = matrix_description_len(u_exact)?;
        let c = policy.applied(desc as f64);
        let sigma = random_density(dim, &mut rng);
        let rho = random_density(dim, &mut rng);
        let sigma_c = sigma.conjugate_by(&u)?;
        let rho_c = rho.conjugate_by(&u)?;

        let family_conj = default_test_family(&rho_c, None, &mu)?;
        let family_base = default_test_family(&rho, None, &mu)?;

        // Direction 1: tests of the conjugated target move back to rho.
        let mut extended_base = family_base.clone();
        for test in family_conj.tests() {
            extended_base.add_test(transport_conjugate(test, &u, desc, policy)?, &rho)?;
        }
        let lhs1 = deficiency(&sigma_c, &family_conj)?.value_or_neg_inf();
        let rhs1 = deficiency(&sigma, &extended_base)?.value_or_neg_inf();

        // Direction 2: tests of rho move to the conjugated target.
        let u_adj = u.adjoint();
        let mut extended_conj = family_conj.clone();
        for test in family_base.tests() {
            extended_conj.add_test(transport_conjugate(test, &u_adj, desc, policy)?, &rho_c)?;
        }
        let lhs2 = deficiency(&sigma, &family_base)?.value_or_neg_inf();
        let rhs2 = deficiency(&sigma_c, &extended_conj)?.value_or_neg_inf();

        let ok = lhs1 <= rhs1 + c + LOG_SLACK_TOL && lhs2 <= rhs2 + c + LOG_SLACK_TOL;
        worst = worst.max(lhs1 - rhs1 - c).max(lhs2 - rhs2 - c);
        report.check(
            format!("rand-unitary-{i}-{u_name}"),
            ok,
            fields(vec![
                ("d_conjugated", FieldValue::float(lhs1)),
                ("d_base_extended", FieldValue::float(rhs1)),
                ("d_base", FieldValue::float(lhs2)),
                ("d_conjugated_extended", FieldValue::float(rhs2)),
                ("c_transport", FieldValue::float(c)),
            ]),
        );
    }
    report.constant("rand_unitary_worst_excess", worst);
    Ok(())
}

/// d(Tr_m sigma | Tr_m rho) <= d(sigma | rho) + c_ext, witnessed by the
/// extension transport nu -> nu (x) I.
fn randomness_partial_trace(
    params: &ExperimentParams,
    report: &mut ExperimentReport,
) -> Result<()> {
    let n = params.qubits;
    let joint_qubits = n + 1;
    let keep = 1usize << n;
    let traced = 2usize;
    let mu_reduced = mu_cached(n, params.budget)?;
    let policy = params.policy();
    let c = policy.applied(crate::codec::len_nat(1) as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xA2);
    let mut worst = f64::NEG_INFINITY;

    for i in 0..INSTANCES {
        let sigma = random_density(keep * traced, &mut rng);
        let rho = random_density(keep * traced, &mut rng);
        let sigma_r = sigma.partial_trace(keep, traced, TraceSide::Second)?;
        let rho_r = rho.partial_trace(keep, traced, TraceSide::Second)?;

        let family_reduced = default_test_family(&rho_r, None, &mu_reduced)?;
        let lhs = deficiency(&sigma_r, &family_reduced)?.value_or_neg_inf();

        // Joint family: the reduced tests extended by the identity. The
        // joint-space default family is admissible too, but the extension
        // alone already witnesses the bound.
        let mu_joint = mu_cached(joint_qubits, params.budget)?;
        let mut family_joint = default_test_family(&rho, None, &mu_joint)?;
        for test in family_reduced.tests() {
            family_joint.add_test(transport_extend(test, 1, policy)?, &rho)?;
        }
        let rhs = deficiency(&sigma, &family_joint)?.value_or_neg_inf();

        let ok = lhs <= rhs + c + LOG_SLACK_TOL;
        worst = worst.max(lhs - rhs - c);
        report.check(
            format!("rand-ptrace-{i}"),
            ok,
            fields(vec![
                ("d_reduced", FieldValue::float(lhs)),
                ("d_joint_extended", FieldValue::float(rhs)),
                ("c_ext", FieldValue::float(c)),
            ]),
        );
    }
    report.constant("rand_ptrace_worst_excess", worst);
    Ok(())
}

/// Conjugated-factor block: left factors move through A -> 2^{-dom} U* A U,
/// right factors stay. Used for one direction of information conservation.
fn conjugated_block(
    family: &ProductTestFamily,
    mu: &UniversalMatrix,
    u: &UnitaryTransform,
    desc_bits: u64,
    policy: &crate::info::ChargePolicy,
) -> Result<(crate::info::GridBlock, f64)> {
    let conj_mu = mu.matrix().conjugate_by(u)?;
    let dom = domination_bits(conj_mu.matrix(), mu.matrix().matrix())?.max(0.0);
    let scale = (-dom).exp2();
    let u_adj_matrix = u.adjoint().matrix().clone();
    let extra = 2.0 + policy.applied(desc_bits as f64);
    let block = map_block_factors(
        &family.blocks()[0],
        format!("conj[{}]", desc_bits),
        |f| {
            // to_matrix folds the factor's own scale; only the admission
            // discount rides on the transported copy.
            Ok(TestMatrix::Dense {
                matrix: Arc::new(
                    f.matrix
                        .to_matrix()
                        .conjugate_by(&u_adj_matrix)?
                        .hermitized(),
                ),
                scale,
            })
        },
        |f| Ok(f.matrix.clone()),
        extra,
        TransportRecord {
            kind: TransportKind::Conjugate,
            label: format!("conjugate[{desc_bits}b]+dom[{dom}b]"),
            cost_bits: desc_bits as f64 + dom,
            charged_bits: policy.applied(desc_bits as f64),
        },
    )?;
    Ok((block, extra + dom))
}

/// |I(U sigma U* : rho) - I(sigma : rho)| up to declared constants, as two
/// one-sided bounds with base-family left sides.
fn information_unitary(params: &ExperimentParams, report: &mut ExperimentReport) -> Result<()> {
    let n = params.qubits;
    let dim = 1usize << n;
    let mu = mu_cached(n, params.budget)?;
    let policy = params.policy();
    let base = family_for(&mu)?;
    let battery = unitary_battery(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xA3);
    let mut worst = f64::NEG_INFINITY;

    // Per-unitary extended families, built once.
    struct Prepared {
        name: String,
        u: UnitaryTransform,
        forward: ProductTestFamily,
        backward: ProductTestFamily,
        c_forward: f64,
        c_backward: f64,
    }
    let mut prepared = Vec::new();
    for (name, u_exact) in &battery {
        let u = UnitaryTransform::new(u_exact.to_complex_matrix())?;
        let desc = matrix_description_len(u_exact)?;
        let (block_fwd, c_fwd) = conjugated_block(&base, &mu, &u, desc, &policy)?;
        let mut forward = base.clone();
        forward.add_block(block_fwd, &mu)?;
        let u_adj = u.adjoint();
        let (block_bwd, c_bwd) = conjugated_block(&base, &mu, &u_adj, desc, &policy)?;
        let mut backward = base.clone();
        backward.add_block(block_bwd, &mu)?;
        prepared.push(Prepared {
            name: name.clone(),
            u,
            forward,
            backward,
            c_forward: c_fwd,
            c_backward: c_bwd,
        });
    }

    for i in 0..INSTANCES {
        let p = &prepared[i % prepared.len()];
        let sigma = random_density(dim, &mut rng);
        let rho = random_density(dim, &mut rng);
        let sigma_c = sigma.conjugate_by(&p.u)?;

        let info_conj_base = mutual_information(&sigma_c, &rho, &base)?.value_or_neg_inf();
        let info_base = mutual_information(&sigma, &rho, &base)?.value_or_neg_inf();
        let rhs_fwd = mutual_information(&sigma, &rho, &p.forward)?.value_or_neg_inf();
        let rhs_bwd = mutual_information(&sigma_c, &rho, &p.backward)?.value_or_neg_inf();

        let ok = info_conj_base <= rhs_fwd + p.c_forward + LOG_SLACK_TOL
            && info_base <= rhs_bwd + p.c_backward + LOG_SLACK_TOL;
        worst = worst
            .max(info_conj_base - rhs_fwd - p.c_forward)
            .max(info_base - rhs_bwd - p.c_backward);
        report.check(
            format!("info-unitary-{i}-{}", p.name),
            ok,
            fields(vec![
                ("info_conjugated", FieldValue::float(info_conj_base)),
                ("info_base", FieldValue::float(info_base)),
                ("rhs_forward", FieldValue::float(rhs_fwd)),
                ("rhs_backward", FieldValue::float(rhs_bwd)),
                ("c_forward", FieldValue::float(p.c_forward)),
                ("c_backward", FieldValue::float(p.c_backward)),
                (
                    "base_gap",
                    FieldValue::float((info_conj_base - info_base).abs()),
                ),
            ]),
        );
    }
    report.constant("info_unitary_worst_excess", worst);
    Ok(())
}

/// I(Tr_m sigma : Tr_m rho) <= I(sigma : rho) + c via lifted factor blocks.
fn information_partial_trace(
    params: &ExperimentParams,
    report: &mut ExperimentReport,
) -> Result<()> {
    let n = params.qubits;
    let keep = 1usize << n;
    let traced = 2usize;
    let mu_reduced = mu_cached(n, params.budget)?;
    let mu_joint = mu_cached(n + 1, params.budget)?;
    let policy = params.policy();
    let base_reduced = family_for(&mu_reduced)?;
    let base_joint = family_for(&mu_joint)?;

    // Admission: Tr_second of the joint universal matrix against the
    // reduced one.
    let reduced_of_joint = mu_joint
        .matrix()
        .partial_trace(keep, traced, TraceSide::Second)?;
    let cup = domination_bits(reduced_of_joint.matrix(), mu_reduced.matrix().matrix())?.max(0.0);
    let lift_scale = (-cup).exp2();
    let id_traced = ComplexMatrix::identity(traced);
    let desc = crate::codec::len_nat(1) as f64;
    let extra = 2.0 + policy.applied(desc);
    let lift = |f: &crate::info::Factor| -> Result<TestMatrix> {
        Ok(TestMatrix::Dense {
            matrix: Arc::new(tensor(&f.matrix.to_matrix(), &id_traced)),
            scale: lift_scale,
        })
    };
    let block = map_block_factors(
        &base_reduced.blocks()[0],
        "lift",
        lift,
        lift,
        extra,
        TransportRecord {
            kind: TransportKind::Lift,
            label: format!("lift[1q]+dom[{cup}b]x2"),
            cost_bits: desc + 2.0 * cup,
            charged_bits: policy.applied(desc),
        },
    )?;
    let mut joint_family = base_joint.clone();
    joint_family.add_block(block, &mu_joint)?;
    let c = extra + 2.0 * cup;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xA4);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..INSTANCES {
        let sigma = random_density(keep * traced, &mut rng);
        let rho = random_density(keep * traced, &mut rng);
        let sigma_r = sigma.partial_trace(keep, traced, TraceSide::Second)?;
        let rho_r = rho.partial_trace(keep, traced, TraceSide::Second)?;
        let lhs = mutual_information(&sigma_r, &rho_r, &base_reduced)?.value_or_neg_inf();
        let rhs = mutual_information(&sigma, &rho, &joint_family)?.value_or_neg_inf();
        let ok = lhs <= rhs + c + LOG_SLACK_TOL;
        worst = worst.max(lhs - rhs - c);
        report.check(
            format!("info-ptrace-{i}"),
            ok,
            fields(vec![
                ("info_reduced", FieldValue::float(lhs)),
                ("info_joint_extended", FieldValue::float(rhs)),
                ("c_lift", FieldValue::float(c)),
            ]),
        );
    }
    report.constant("info_ptrace_worst_excess", worst);
    report.constant("info_ptrace_cup_bits", cup);
    Ok(())
}

/// I(Tr_A sigma : Tr_B sigma) <= I(sigma : sigma) + c on the doubled space.
fn reduced_pair_corollary(
    params: &ExperimentParams,
    report: &mut ExperimentReport,
) -> Result<()> {
    let n = params.qubits;
    let dim = 1usize << n;
    let mu_half = mu_cached(n, params.budget)?;
    let mu_full = mu_cached(2 * n, params.budget)?;
    let base_half = family_for(&mu_half)?;
    let base_full = family_for(&mu_full)?;
    let policy = params.policy();

    let first_reduction = mu_full
        .matrix()
        .partial_trace(dim, dim, TraceSide::First)?;
    let second_reduction = mu_full
        .matrix()
        .partial_trace(dim, dim, TraceSide::Second)?;
    let cup_first = domination_bits(first_reduction.matrix(), mu_half.matrix().matrix())?.max(0.0);
    let cup_second =
        domination_bits(second_reduction.matrix(), mu_half.matrix().matrix())?.max(0.0);
    let id_half = ComplexMatrix::identity(dim);
    let desc = crate::codec::len_nat(n as u64) as f64;
    let extra = 2.0 + policy.applied(desc);
    let block = map_block_factors(
        &base_half.blocks()[0],
        "reduced-pair-lift",
        |f| {
            Ok(TestMatrix::Dense {
                matrix: Arc::new(tensor(&id_half, &f.matrix.to_matrix())),
                scale: (-cup_first).exp2(),
            })
        },
        |f| {
            Ok(TestMatrix::Dense {
                matrix: Arc::new(tensor(&f.matrix.to_matrix(), &id_half)),
                scale: (-cup_second).exp2(),
            })
        },
        extra,
        TransportRecord {
            kind: TransportKind::Lift,
            label: format!("two-sided lift[dom {cup_first}+{cup_second}b]"),
            cost_bits: desc + cup_first + cup_second,
            charged_bits: policy.applied(desc),
        },
    )?;
    let mut full_family = base_full.clone();
    full_family.add_block(block, &mu_full)?;
    let c = extra + cup_first + cup_second;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xA5);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..INSTANCES {
        let sigma = random_density(dim * dim, &mut rng);
        let left = sigma.partial_trace(dim, dim, TraceSide::First)?;
        let right = sigma.partial_trace(dim, dim, TraceSide::Second)?;
        let lhs = mutual_information(&left, &right, &base_half)?.value_or_neg_inf();
        let rhs = mutual_information(&sigma, &sigma, &full_family)?.value_or_neg_inf();
        let ok = lhs <= rhs + c + LOG_SLACK_TOL;
        worst = worst.max(lhs - rhs - c);
        report.check(
            format!("info-reduced-pair-{i}"),
            ok,
            fields(vec![
                ("info_reduced_pair", FieldValue::float(lhs)),
                ("info_self_extended", FieldValue::float(rhs)),
                ("c_two_sided", FieldValue::float(c)),
            ]),
        );
    }
    report.constant("reduced_pair_worst_excess", worst);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservation_holds_at_small_budget() {
        let params = ExperimentParams::new(1, 22).with_seed(3);
        let report = exp_conservation(&params).unwrap();
        assert!(report.verdict, "{}", report.to_csv());
    }

    #[test]
    fn conservation_holds_without_charging_descriptions() {
        let params = ExperimentParams::new(1, 22).with_seed(3).with_charge(false);
        let report = exp_conservation(&params).unwrap();
        assert!(report.verdict, "{}", report.to_csv());
    }
}
