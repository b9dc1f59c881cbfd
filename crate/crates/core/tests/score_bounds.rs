//! Cross-module score bounds: the information upper bound for elementary
//! states, witnessed with measured domination exponents.

use qgacs_core::codec::EncodableObject;
use qgacs_core::experiments::{domination_bits, elementary_target_battery, exact_to_semi_density};
use qgacs_core::info::{mutual_information, product_test_family};
use qgacs_core::universal::mu_cached;

/// I(rho:sigma) <= K(rho) + K(sigma) + c_family, where c_family collects
/// the per-argument gaps between the measured domination exponent and the
/// description length, plus the family weight mass.
#[test]
fn information_upper_bound_for_elementary_pairs() {
    let budget = 24u64;
    for n in [1u32, 2] {
        let mu = mu_cached(n, budget).unwrap();
        let family = product_test_family(&mu).unwrap();
        let battery = elementary_target_battery(n);
        let log_weight = family.total_weight().log2();
        for (name_a, exact_a) in &battery {
            for (name_b, exact_b) in &battery {
                let a = exact_to_semi_density(exact_a).unwrap();
                let b = exact_to_semi_density(exact_b).unwrap();
                let k_a = EncodableObject::Matrix {
                    qubits: exact_a.qubits(),
                    entries: exact_a.sparse_entries(),
                }
                .payload_len()
                .unwrap() as f64;
                let k_b = EncodableObject::Matrix {
                    qubits: exact_b.qubits(),
                    entries: exact_b.sparse_entries(),
                }
                .payload_len()
                .unwrap() as f64;
                let dom_a = domination_bits(a.matrix(), mu.matrix().matrix()).unwrap();
                let dom_b = domination_bits(b.matrix(), mu.matrix().matrix()).unwrap();
                let c_family = (dom_a - k_a) + (dom_b - k_b) + log_weight;
                let info = mutual_information(&a, &b, &family)
                    .unwrap()
                    .value_or_neg_inf();
                assert!(
                    info <= k_a + k_b + c_family + 1e-6,
                    "n={n} pair ({name_a}, {name_b}): info {info} vs {} + c {c_family}",
                    k_a + k_b
                );
            }
        }
    }
}
