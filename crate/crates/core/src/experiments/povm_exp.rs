//! POVM harness: measurements do not increase randomness deficiency, and
//! classical information between two measurement outcomes lower-bounds the
//! quantum information score.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{fields, ExperimentParams, ExperimentReport, FieldValue};
use super::{family_for, LOG_SLACK_TOL};
use crate::error::Result;
use crate::info::{
    classical_deficiency, corollary_sum_bound, deficiency, default_test_family,
    extend_family_with_povm_pairs, measurement_info_bound, transport_povm,
};
use crate::qops::{
    apply_povm, coarse_povm_2q, computational_povm, random_density, rational_rotation,
    rotated_povm, tensor_power, Povm,
};
use crate::universal::mu_cached;

fn povm_battery(n: u32) -> Result<Vec<(String, Povm)>> {
    let mut battery = vec![
        ("computational".to_string(), computational_povm(n)?),
        (
            "rotated".to_string(),
            rotated_povm(&tensor_power(&rational_rotation(), n))?,
        ),
    ];
    if n == 2 {
        battery.push(("coarse-3".to_string(), coarse_povm_2q()?));
    }
    Ok(battery)
}

pub fn exp_povm(params: &ExperimentParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("povm", *params);
    let n = params.qubits;
    let dim = 1usize << n;
    let mu = mu_cached(n, params.budget)?;
    let policy = params.policy();
    let battery = povm_battery(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xE0);
    let instances = 50usize;
    let mut worst_deficiency_excess = f64::NEG_INFINITY;

    // Product family with all battery pair tests, built once.
    let mut product_family = family_for(&mu)?;
    let mut exponents = Vec::new();
    for (_, povm) in &battery {
        exponents.push(extend_family_with_povm_pairs(
            &mut product_family,
            povm,
            &mu,
            policy,
        )?);
    }

    // Self-test: sigma = rho keeps both sides at or below zero.
    {
        let rho = random_density(dim, &mut rng);
        let (name, povm) = &battery[0];
        let e_rho = apply_povm(povm, &rho)?;
        let d_classical = classical_deficiency(&e_rho.support(), &e_rho.support())?;
        let family = default_test_family(&rho, None, &mu)?;
        let d_quantum = deficiency(&rho, &family)?.value_or_neg_inf();
        report.check(
            format!("self-{name}"),
            d_classical <= 0.0 + LOG_SLACK_TOL && d_quantum <= 0.0 + LOG_SLACK_TOL,
            fields(vec![
                ("d_classical", FieldValue::float(d_classical)),
                ("d_quantum", FieldValue::float(d_quantum)),
            ]),
        );
    }

    for i in 0..instances {
        let (povm_name, povm) = &battery[i % battery.len()];
        let exps = &exponents[i % battery.len()];
        let sigma = random_density(dim, &mut rng);
        let rho = random_density(dim, &mut rng);

        // Deficiency non-increase: the transported test witnesses the bound.
        let e_sigma = apply_povm(povm, &sigma)?;
        let e_rho = apply_povm(povm, &rho)?;
        let d_classical = classical_deficiency(&e_sigma.support(), &e_rho.support())?;
        let nu = transport_povm(povm, &rho, policy)?;
        let c_e = -(nu.weight.log2());
        let mut family = default_test_family(&rho, None, &mu)?;
        family.add_test(nu, &rho)?;
        let d_quantum = deficiency(&sigma, &family)?.value_or_neg_inf();
        let ok_deficiency = d_classical <= d_quantum + c_e + LOG_SLACK_TOL;
        worst_deficiency_excess = worst_deficiency_excess.max(d_classical - d_quantum - c_e);

        // Two-measurement bound over all outcome pairs, plus the summed
        // corollary form.
        let mut pair_ok = true;
        let mut worst_pair_slack = f64::INFINITY;
        for oi in 0..povm.len() {
            for oj in 0..povm.len() {
                let bound = measurement_info_bound(
                    povm,
                    &sigma,
                    &rho,
                    oi,
                    oj,
                    &product_family,
                    exps,
                    policy,
                )?;
                pair_ok &= bound.holds;
                if bound.slack.is_finite() {
                    worst_pair_slack = worst_pair_slack.min(bound.slack);
                }
            }
        }
        let corollary =
            corollary_sum_bound(povm, &sigma, &rho, &product_family, exps, policy)?;

        report.check(
            format!("povm-{i}-{povm_name}"),
            ok_deficiency && pair_ok && corollary.holds,
            fields(vec![
                ("d_classical", FieldValue::float(d_classical)),
                ("d_quantum", FieldValue::float(d_quantum)),
                ("c_e", FieldValue::float(c_e)),
                ("worst_pair_slack", FieldValue::float(worst_pair_slack)),
                ("corollary_lhs", FieldValue::float(corollary.lhs)),
                ("corollary_info", FieldValue::float(corollary.info)),
                ("corollary_c", FieldValue::float(corollary.declared_c)),
            ]),
        );
    }

    report.constant("worst_deficiency_excess", worst_deficiency_excess);
    Ok(report)
}
