//! Property tests for the codec and matrix layers.

use num_complex::Complex64;
use proptest::prelude::*;

use qgacs_core::codec::{decode_object, encode_object, kraft_check, EncodableObject};
use qgacs_core::mat::{partial_trace, tensor, ComplexMatrix, TraceSide};
use qgacs_core::rational::GaussianRational;
use qgacs_core::universal::enumerate_states;

fn arb_rational() -> impl Strategy<Value = EncodableObject> {
    (-200i64..200, 1i64..200)
        .prop_map(|(p, q)| EncodableObject::rational_from_parts(p, q).unwrap())
}

fn arb_gaussian() -> impl Strategy<Value = GaussianRational> {
    (-20i64..20, 1i64..20, -20i64..20, 1i64..20)
        .prop_map(|(a, b, c, d)| GaussianRational::from_i64_parts(a, b, c, d).unwrap())
}

fn arb_state_vector() -> impl Strategy<Value = EncodableObject> {
    (1u32..4, proptest::collection::btree_map(0u64..8, arb_gaussian(), 1..4)).prop_filter_map(
        "entries must fit the dimension and be nonzero",
        |(qubits, map)| {
            let dim = 1u64 << qubits;
            let entries: Vec<(u64, GaussianRational)> = map
                .into_iter()
                .filter(|(i, v)| *i < dim && !v.is_zero())
                .collect();
            if entries.is_empty() {
                None
            } else {
                Some(EncodableObject::StateVector { qubits, entries })
            }
        },
    )
}

fn arb_scalar() -> impl Strategy<Value = EncodableObject> {
    prop_oneof![
        (0u64..100_000).prop_map(EncodableObject::Nat),
        (-50_000i64..50_000).prop_map(EncodableObject::Int),
        arb_rational(),
        arb_gaussian().prop_map(EncodableObject::Gaussian),
    ]
}

fn arb_object() -> impl Strategy<Value = EncodableObject> {
    let leaf = prop_oneof![arb_scalar(), arb_state_vector()];
    leaf.prop_recursive(3, 16, 4, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| EncodableObject::pair(a, b))
    })
}

proptest! {
    #[test]
    fn round_trip_over_canonical_objects(obj in arb_object()) {
        let code = encode_object(&obj).unwrap();
        prop_assert_eq!(code.len(), obj.tagged_len().unwrap());
        let back = decode_object(&code).unwrap();
        prop_assert_eq!(back, obj);
    }

    #[test]
    fn pair_cost_is_at_least_sum_of_parts(a in arb_scalar(), b in arb_scalar()) {
        let pair = EncodableObject::pair(a.clone(), b.clone());
        prop_assert!(
            pair.payload_len().unwrap() >= a.payload_len().unwrap() + b.payload_len().unwrap()
        );
    }

    #[test]
    fn kraft_holds_over_enumerated_state_codes(budget in 13u64..19) {
        let states = enumerate_states(1, budget).unwrap();
        let codes: Vec<_> = states.iter().map(|s| s.code().clone()).collect();
        if !codes.is_empty() {
            let sum = kraft_check(&codes).unwrap();
            prop_assert!(sum <= 1.0);
        }
    }

    #[test]
    fn tensor_trace_is_multiplicative(
        a in proptest::collection::vec(-1.0f64..1.0, 8),
        b in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let m1 = ComplexMatrix::from_fn(2, 2, |r, c| {
            Complex64::new(a[2 * r + c], a[4 + 2 * r + c])
        });
        let m2 = ComplexMatrix::from_fn(2, 2, |r, c| {
            Complex64::new(b[2 * r + c], b[4 + 2 * r + c])
        });
        let prod = tensor(&m1, &m2);
        let lhs = prod.trace();
        let rhs = m1.trace() * m2.trace();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_recovers_kept_factor(
        a in proptest::collection::vec(-1.0f64..1.0, 8),
        b in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let m1 = ComplexMatrix::from_fn(2, 2, |r, c| {
            Complex64::new(a[2 * r + c], a[4 + 2 * r + c])
        });
        let m2 = ComplexMatrix::from_fn(2, 2, |r, c| {
            Complex64::new(b[2 * r + c], b[4 + 2 * r + c])
        });
        let joint = tensor(&m1, &m2);
        let kept = partial_trace(&joint, 2, 2, TraceSide::Second).unwrap();
        let expected = m1.scale(m2.trace());
        prop_assert!(kept.max_abs_diff(&expected) < 1e-12);
    }
}
