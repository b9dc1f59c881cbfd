//! Self-information harness: entropy of the maximally mixed state, the
//! self-information of the maximally mixed state, and the two Haar-moment
//! identities behind "most pure states carry negligible self-information".

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::report::{fields, mean_with_error, ExperimentParams, ExperimentReport, FieldValue};
use super::{domination_bits, family_for, LOG_SLACK_TOL};
use crate::codec::EncodableObject;
use crate::error::{Error, Result};
use crate::mat::{tensor_vec, ComplexMatrix, SemiDensityMatrix, UnitaryTransform};
use crate::qops::{rational_rotation, tensor_power, HaarSampler};
use crate::rational::ElementaryMatrix;
use crate::universal::{ceil_neg_log2, entropy, mu_cached, Entropy};

/// The swap operator on the doubled space.
fn swap_operator(dim: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(dim * dim, dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            s[(j * dim + i, i * dim + j)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}

pub fn exp_selfinfo(params: &ExperimentParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("selfinfo", *params);
    let n = params.qubits;
    let dim = 1usize << n;
    let samples = params.samples.max(1000);
    let mu = mu_cached(n, params.budget)?;
    let family = family_for(&mu)?;

    // (1) Entropy of the maximally mixed state splits exactly.
    let mixed = SemiDensityMatrix::maximally_mixed(dim);
    let h_mixed = match entropy(&mixed, &mu)? {
        Entropy::Finite(h) => h,
        Entropy::Infinite => return Err(Error::Other("mixed state outside support".into())),
    };
    let expected = n as i64 + ceil_neg_log2(mu.trace());
    report.check(
        "mixed-entropy-split",
        h_mixed == expected,
        fields(vec![
            ("h_mixed", FieldValue::Int(h_mixed)),
            ("expected", FieldValue::Int(expected)),
        ]),
    );

    // (2) Self-information of the maximally mixed state against twice its
    // description complexity, with the constant from measured domination.
    let mixed_exact = ElementaryMatrix::maximally_mixed(n);
    let k_mixed = EncodableObject::Matrix {
        qubits: n,
        entries: mixed_exact.sparse_entries(),
    }
    .payload_len()? as f64;
    let k_dom = domination_bits(mixed.matrix(), mu.matrix().matrix())?;
    let total_weight = family.total_weight();
    let declared_c = 2.0 * (k_dom - k_mixed) + total_weight.log2();
    let info_mixed =
        crate::info::mutual_information(&mixed, &mixed, &family)?.value_or_neg_inf();
    report.check(
        "mixed-self-information-upper",
        info_mixed <= 2.0 * k_mixed + declared_c + LOG_SLACK_TOL,
        fields(vec![
            ("info_mixed", FieldValue::float(info_mixed)),
            ("k_mixed_bits", FieldValue::float(k_mixed)),
            ("k_dom_bits", FieldValue::float(k_dom)),
            ("declared_c", FieldValue::float(declared_c)),
        ]),
    );
    report.constant("k_dom_mixed_bits", k_dom);

    // Monte Carlo streams.
    let agg = family.aggregate_matrix()?;
    let mut first_moment = Vec::with_capacity(samples as usize);
    let mut self_info_linear = Vec::with_capacity(samples as usize);
    let mut rotated_moment = Vec::with_capacity(samples as usize);
    let rotation =
        UnitaryTransform::new(tensor_power(&rational_rotation(), n).to_complex_matrix())?;
    for k in 0..samples {
        let psi = HaarSampler::sample_at(n, params.seed, k);
        first_moment.push(mu.vector_expectation(psi.amplitudes())?);
        let doubled = tensor_vec(psi.amplitudes(), psi.amplitudes());
        self_info_linear.push(agg.quadratic_form(&doubled)?.re);
        let rotated = rotation.apply(&psi)?;
        rotated_moment.push(mu.vector_expectation(rotated.amplitudes())?);
    }

    // (3) First moment: mean Tr(mu |psi><psi|) = Tr(mu) / dim within 3 SE.
    let fm = mean_with_error(&first_moment);
    let fm_expected = mu.trace() / dim as f64;
    report.check(
        "haar-first-moment",
        (fm.mean - fm_expected).abs() <= 3.0 * fm.std_error + 1e-15,
        fields(vec![
            ("mean", FieldValue::float(fm.mean)),
            ("expected", FieldValue::float(fm_expected)),
            ("std_error", FieldValue::float(fm.std_error)),
            ("samples", FieldValue::Int(samples as i64)),
        ]),
    );

    // Unitary invariance of the sampler, statistically.
    let rm = mean_with_error(&rotated_moment);
    let combined_se = (fm.std_error * fm.std_error + rm.std_error * rm.std_error).sqrt();
    report.check(
        "haar-unitary-invariance",
        (fm.mean - rm.mean).abs() <= 3.0 * combined_se + 1e-15,
        fields(vec![
            ("mean", FieldValue::float(fm.mean)),
            ("rotated_mean", FieldValue::float(rm.mean)),
            ("combined_se", FieldValue::float(combined_se)),
        ]),
    );

    // (4) Mean of 2^{I(psi:psi)} against the exact symmetric-subspace value.
    let sym_dim = (dim * (dim + 1) / 2) as f64;
    let projector = ComplexMatrix::identity(dim * dim)
        .add(&swap_operator(dim))?
        .scale_re(0.5);
    let exact_second = agg.trace_product(&projector)?.re / sym_dim;
    let sm = mean_with_error(&self_info_linear);
    report.check(
        "haar-self-information-mean",
        sm.mean <= exact_second + 3.0 * sm.std_error + 1e-15
            && (sm.mean - exact_second).abs() <= 3.0 * sm.std_error + 1e-15,
        fields(vec![
            ("mean_2_pow_info", FieldValue::float(sm.mean)),
            ("exact_symmetric_value", FieldValue::float(exact_second)),
            ("std_error", FieldValue::float(sm.std_error)),
        ]),
    );
    report.constant("exact_symmetric_value_log2", exact_second.log2());

    // Second-moment spot checks: Tr(X |psi psi><psi psi|) against the
    // projector prediction for five fixed random Hermitian X.
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5EC0);
    for t in 0..5 {
        let raw = ComplexMatrix::from_fn(dim * dim, dim * dim, |_, _| {
            Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let x = Arc::new(raw.hermitized());
        let mut values = Vec::with_capacity(samples as usize);
        for k in 0..samples {
            let psi = HaarSampler::sample_at(n, params.seed.wrapping_add(1), k);
            let doubled = tensor_vec(psi.amplitudes(), psi.amplitudes());
            values.push(x.quadratic_form(&doubled)?.re);
        }
        let mv = mean_with_error(&values);
        let predicted = x.trace_product(&projector)?.re / sym_dim;
        report.check(
            format!("second-moment-x{t}"),
            (mv.mean - predicted).abs() <= 3.0 * mv.std_error + 1e-12,
            fields(vec![
                ("mean", FieldValue::float(mv.mean)),
                ("predicted", FieldValue::float(predicted)),
                ("std_error", FieldValue::float(mv.std_error)),
            ]),
        );
    }

    report.constant("mu_trace", mu.trace());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selfinfo_holds_at_small_budget() {
        let params = ExperimentParams::new(1, 22).with_seed(9).with_samples(2000);
        let report = exp_selfinfo(&params).unwrap();
        assert!(report.verdict, "{}", report.to_csv());
    }
}
