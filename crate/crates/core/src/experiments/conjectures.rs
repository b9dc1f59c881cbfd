//! Exploratory data for the open questions: typicality of states against
//! the universal matrix, and whether self-information dominates cross
//! information. Emits data only; never a verdict.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{fields, ExperimentParams, ExperimentReport, FieldValue};
use super::{elementary_target_battery, exact_to_semi_density, family_for};
use crate::error::Result;
use crate::info::{deficiency, default_test_family, mutual_information};
use crate::qops::{random_density, HaarSampler};
use crate::universal::mu_cached;

pub fn explore_conjectures(params: &ExperimentParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("explore-conjectures", *params);
    let n = params.qubits;
    let dim = 1usize << n;
    let mu = mu_cached(n, params.budget)?;
    let family = family_for(&mu)?;
    let mu_family = default_test_family(mu.matrix(), None, &mu)?;
    let sqrt_2n = (2.0 * n as f64).sqrt();
    report.constant("sqrt_2n", sqrt_2n);

    // Battery: elementary targets, a few Haar states, a few random mixtures.
    let mut states = Vec::new();
    for (name, exact) in elementary_target_battery(n) {
        states.push((name, exact_to_semi_density(&exact)?));
    }
    for k in 0..params.samples.clamp(4, 16) {
        states.push((
            format!("haar-{k}"),
            HaarSampler::sample_at(n, params.seed, k).density(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xC0);
    for k in 0..3 {
        states.push((format!("random-mixed-{k}"), random_density(dim, &mut rng)));
    }

    for (name, rho) in &states {
        let d_mu = deficiency(rho, &mu_family)?.value_or_neg_inf();
        let self_info = mutual_information(rho, rho, &family)?.value_or_neg_inf();
        report.info(
            format!("state-{name}"),
            fields(vec![
                ("d_against_mu", FieldValue::float(d_mu)),
                ("self_information", FieldValue::float(self_info)),
            ]),
        );
    }

    // Cross-information table: does I(rho:rho) >= I(rho:sigma)?
    let mut dominated = 0usize;
    let mut total = 0usize;
    for (i, (name_a, a)) in states.iter().enumerate() {
        for (name_b, b) in states.iter().skip(i + 1) {
            let self_a = mutual_information(a, a, &family)?.value_or_neg_inf();
            let cross = mutual_information(a, b, &family)?.value_or_neg_inf();
            total += 1;
            if self_a >= cross {
                dominated += 1;
            }
            report.info(
                format!("cross-{name_a}-{name_b}"),
                fields(vec![
                    ("self_information_first", FieldValue::float(self_a)),
                    ("cross_information", FieldValue::float(cross)),
                    ("self_dominates", FieldValue::Bool(self_a >= cross)),
                ]),
            );
        }
    }
    report.constant("self_dominates_fraction", if total == 0 {
        1.0
    } else {
        dominated as f64 / total as f64
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjecture_exploration_emits_data_without_verdict_failures() {
        let params = ExperimentParams::new(1, 22).with_seed(23).with_samples(4);
        let report = explore_conjectures(&params).unwrap();
        assert!(report.verdict);
        assert!(report.records.iter().any(|r| r.id.starts_with("state-")));
        assert!(report.records.iter().any(|r| r.id.starts_with("cross-")));
    }
}
