//! Addition-inequality harness.
//!
//! For elementary targets rho, the scaled block reduction of the joint
//! universal matrix is registered as a conditional model under the key
//! (rho, H(rho)); conditional entropy against that model then satisfies
//! H(rho) + H(sigma | key) <= H(sigma (x) rho) + 2, the two bits being the
//! mixture cost and the registration shortfall. The block-trace identity
//! behind the construction is verified directly on random instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{fields, ExperimentParams, ExperimentReport, FieldValue};
use super::{elementary_target_battery, exact_to_semi_density};
use crate::codec::EncodableObject;
use crate::error::{Error, Result};
use crate::mat::{m_reduce, tensor, SemiDensityMatrix};
use crate::qops::random_density;
use crate::universal::{
    ceil_neg_log2, conditional_mu, entropy, entropy_of_trace, mu_cached, ConditionRegistry,
    Entropy,
};

pub fn exp_addition(params: &ExperimentParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("addition", *params);
    let n = params.qubits;
    let dim = 1usize << n;
    let mu_n = mu_cached(n, params.budget)?;
    let mu_joint = mu_cached(2 * n, params.budget)?;
    let mut registry = ConditionRegistry::new();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut max_slack = f64::NEG_INFINITY;
    let mut max_shortfall: i64 = 0;

    for (rho_name, rho_exact) in elementary_target_battery(n) {
        let rho = exact_to_semi_density(&rho_exact)?;
        let h_rho = match entropy(&rho, &mu_n)? {
            Entropy::Finite(h) => h,
            Entropy::Infinite => {
                return Err(Error::Other(format!(
                    "battery target {rho_name} orthogonal to the universal support"
                )))
            }
        };

        // The candidate 2^y M, with y capped so the trace stays at most 1.
        let m = m_reduce(mu_joint.matrix().matrix(), rho.matrix(), dim)?.hermitized();
        let trace_m = m.trace().re;
        let y = h_rho.min((-(trace_m.log2())).floor() as i64);
        let shortfall = h_rho - y;
        max_shortfall = max_shortfall.max(shortfall);
        let kappa = SemiDensityMatrix::new(m.scale_re((y as f64).exp2()))?;

        let key = EncodableObject::pair(
            EncodableObject::Matrix {
                qubits: rho_exact.qubits(),
                entries: rho_exact.sparse_entries(),
            },
            EncodableObject::Nat(h_rho.max(0) as u64),
        );
        registry.register(&key, kappa, 1.0)?;
        let cond = conditional_mu(&key, &registry, &mu_n)?;

        // Special-case check: for the maximally mixed target the reduction
        // trace collapses to 2^{-n} times the joint trace.
        if rho_name == "maximally-mixed" {
            let expected = (0.5f64).powi(n as i32) * mu_joint.trace();
            let residual = (trace_m - expected).abs();
            report.check(
                format!("n{n}-mixed-trace-collapse"),
                residual < 1e-10,
                fields(vec![
                    ("trace_m", FieldValue::float(trace_m)),
                    ("expected", FieldValue::float(expected)),
                    ("residual", FieldValue::float(residual)),
                ]),
            );
        }

        // Sigma battery: the target itself, the zero projector, and seeded
        // random densities.
        let mut sigmas: Vec<(String, SemiDensityMatrix)> = vec![
            ("self".to_string(), rho.clone()),
            (
                "proj-zero".to_string(),
                exact_to_semi_density(&super::zero_projector_exact(n))?,
            ),
        ];
        for i in 0..3 {
            sigmas.push((format!("random-{i}"), random_density(dim, &mut rng)));
        }

        for (sigma_name, sigma) in sigmas {
            let t_cond = cond.matrix().trace_product(sigma.matrix())?.re;
            let h_cond = match entropy_of_trace(t_cond)? {
                Entropy::Finite(h) => h,
                Entropy::Infinite => {
                    report.check(
                        format!("n{n}-{rho_name}-{sigma_name}"),
                        false,
                        fields(vec![("error", FieldValue::Text("infinite conditional entropy".into()))]),
                    );
                    continue;
                }
            };
            let joint_state = sigma.tensor(&rho);
            let h_joint = match entropy(&joint_state, &mu_joint)? {
                Entropy::Finite(h) => h,
                Entropy::Infinite => {
                    report.check(
                        format!("n{n}-{rho_name}-{sigma_name}"),
                        false,
                        fields(vec![("error", FieldValue::Text("infinite joint entropy".into()))]),
                    );
                    continue;
                }
            };
            let slack = (h_rho + h_cond) as f64 - h_joint as f64;
            max_slack = max_slack.max(slack);
            report.check(
                format!("n{n}-{rho_name}-{sigma_name}"),
                h_rho + h_cond <= h_joint + 2,
                fields(vec![
                    ("h_rho", FieldValue::Int(h_rho)),
                    ("h_cond", FieldValue::Int(h_cond)),
                    ("h_joint", FieldValue::Int(h_joint)),
                    ("slack_bits", FieldValue::float(slack)),
                    ("registration_shortfall", FieldValue::Int(shortfall)),
                ]),
            );
        }
    }

    // The trace identity Tr(M_{mu rho} sigma) = Tr(mu (sigma (x) rho)) on
    // random instances, including non-elementary targets.
    let mut worst_residual = 0.0_f64;
    for _ in 0..100 {
        let rho = random_density(dim, &mut rng);
        let sigma = random_density(dim, &mut rng);
        let m = m_reduce(mu_joint.matrix().matrix(), rho.matrix(), dim)?;
        let lhs = m.trace_product(sigma.matrix())?.re;
        let rhs = mu_joint
            .matrix()
            .matrix()
            .trace_product(&tensor(sigma.matrix(), rho.matrix()))?
            .re;
        worst_residual = worst_residual.max((lhs - rhs).abs());
    }
    report.check(
        format!("n{n}-trace-identity-100"),
        worst_residual < 1e-9,
        fields(vec![(
            "worst_residual",
            FieldValue::float(worst_residual),
        )]),
    );

    report.constant("max_slack_bits", max_slack);
    report.constant("max_registration_shortfall", max_shortfall as f64);
    report.constant("mixture_cost_bits", 1.0);
    report.constant("entropy_of_mixed_check", {
        // H(2^{-n} I) = n + ceil(-log2 Tr mu), recorded for context.
        let mixed = SemiDensityMatrix::maximally_mixed(dim);
        match entropy(&mixed, &mu_n)? {
            Entropy::Finite(h) => (h - n as i64 - ceil_neg_log2(mu_n.trace())) as f64,
            Entropy::Infinite => f64::INFINITY,
        }
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_holds_at_small_budget() {
        let params = ExperimentParams::new(1, 24).with_seed(5);
        let report = exp_addition(&params).unwrap();
        assert!(report.verdict, "{}", report.to_csv());
        assert!(report.measured_constants["max_slack_bits"] <= 2.0);
    }
}
