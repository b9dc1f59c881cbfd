//! POVM measurements, structured elementary unitaries, Haar sampling, and
//! the cloning pipeline.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codec::{len_nat, EncodableObject};
use crate::error::{Error, Result};
use crate::mat::{
    validate_psd, ComplexMatrix, PureState, SemiDensityMatrix, TraceSide, UnitaryTransform,
};
use crate::rational::{ratio, ElementaryMatrix, GaussianRational};

/// A finite POVM: positive outcomes summing to the identity. When built from
/// exact matrices the description length of the whole battery is
/// well-defined, which transport costs need.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    outcomes: Vec<ComplexMatrix>,
    exact: Option<Vec<ElementaryMatrix>>,
}

impl Povm {
    pub fn new(outcomes: Vec<ComplexMatrix>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidPovm("no outcomes".into()));
        }
        let dim = outcomes[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (k, e) in outcomes.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::InvalidPovm(format!("outcome {k} has wrong shape")));
            }
            let report = validate_psd(e, 1e-10)?;
            if !report.is_psd {
                return Err(Error::InvalidPovm(format!(
                    "outcome {k} not PSD (min eig {})",
                    report.min_eig
                )));
            }
            sum = sum.add(e)?;
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > 1e-10 {
            return Err(Error::InvalidPovm(format!(
                "outcomes sum to identity only within {defect:e}"
            )));
        }
        Ok(Self {
            dim,
            outcomes,
            exact: None,
        })
    }

    pub fn from_exact(exact: Vec<ElementaryMatrix>) -> Result<Self> {
        let outcomes = exact.iter().map(|m| m.to_complex_matrix()).collect();
        let mut povm = Self::new(outcomes)?;
        povm.exact = Some(exact);
        Ok(povm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[ComplexMatrix] {
        &self.outcomes
    }

    pub fn exact_outcomes(&self) -> Option<&[ElementaryMatrix]> {
        self.exact.as_deref()
    }

    /// Description length: outcome count followed by each exact matrix.
    pub fn description_len(&self) -> Result<u64> {
        let exact = self.exact.as_ref().ok_or_else(|| {
            Error::InvalidPovm("description length needs exact outcome matrices".into())
        })?;
        let mut total = len_nat(exact.len() as u64) as u64;
        for m in exact {
            let object = EncodableObject::Matrix {
                qubits: m.qubits(),
                entries: m.sparse_entries(),
            };
            total += object.payload_len()? as u64;
        }
        Ok(total)
    }
}

/// Outcome probabilities of a POVM on a semi-density matrix; they sum to the
/// trace of the state, so subnormalized states induce semimeasures.
#[derive(Debug, Clone)]
pub struct OutcomeSemimeasure {
    probs: Vec<f64>,
}

impl OutcomeSemimeasure {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Finite support as (outcome index, probability) pairs.
    pub fn support(&self) -> Vec<(u64, f64)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| (k as u64, *p))
            .collect()
    }
}

/// probs[k] = Tr(E_k sigma); tiny negative values from rounding clamp to 0.
pub fn apply_povm(povm: &Povm, sigma: &SemiDensityMatrix) -> Result<OutcomeSemimeasure> {
    if sigma.dim() != povm.dim {
        return Err(Error::DimensionMismatch {
            context: "apply_povm",
            got: sigma.dim(),
            expected: povm.dim,
        });
    }
    let probs = povm
        .outcomes
        .iter()
        .map(|e| e.trace_product(sigma.matrix()).map(|z| z.re.max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeSemimeasure { probs })
}

/// The computational-basis POVM on n qubits, with exact outcomes.
pub fn computational_povm(n_qubits: u32) -> Result<Povm> {
    let dim = 1usize << n_qubits;
    let mut exact = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut m = ElementaryMatrix::zeros(n_qubits);
        m.set(k, k, GaussianRational::one());
        exact.push(m);
    }
    Povm::from_exact(exact)
}

/// The exact rational rotation [[3/5, 4/5], [-4/5, 3/5]] on one qubit.
pub fn rational_rotation() -> ElementaryMatrix {
    let mut r = ElementaryMatrix::zeros(1);
    r.set(0, 0, GaussianRational::new(ratio(3, 5), ratio(0, 1)));
    r.set(0, 1, GaussianRational::new(ratio(4, 5), ratio(0, 1)));
    r.set(1, 0, GaussianRational::new(ratio(-4, 5), ratio(0, 1)));
    r.set(1, 1, GaussianRational::new(ratio(3, 5), ratio(0, 1)));
    r
}

/// diag(1, i), an exact elementary phase gate.
pub fn phase_gate() -> ElementaryMatrix {
    let mut p = ElementaryMatrix::zeros(1);
    p.set(0, 0, GaussianRational::one());
    p.set(1, 1, GaussianRational::new(ratio(0, 1), ratio(1, 1)));
    p
}

/// CNOT on two qubits (control on the first).
pub fn cnot() -> ElementaryMatrix {
    let mut m = ElementaryMatrix::zeros(2);
    m.set(0, 0, GaussianRational::one());
    m.set(1, 1, GaussianRational::one());
    m.set(2, 3, GaussianRational::one());
    m.set(3, 2, GaussianRational::one());
    m
}

/// The n-fold tensor power of a one-qubit exact matrix.
pub fn tensor_power(base: &ElementaryMatrix, n: u32) -> ElementaryMatrix {
    let mut out = base.clone();
    for _ in 1..n {
        out = out.tensor(base);
    }
    out
}

/// The POVM obtained by conjugating the computational basis with an exact
/// unitary: outcomes U |k><k| U^dagger.
pub fn rotated_povm(u: &ElementaryMatrix) -> Result<Povm> {
    if !u.is_unitary() {
        return Err(Error::InvalidPovm("rotation matrix is not unitary".into()));
    }
    let n = u.qubits();
    let dim = u.dim();
    let u_dag = u.adjoint();
    let mut exact = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut proj = ElementaryMatrix::zeros(n);
        proj.set(k, k, GaussianRational::one());
        exact.push(u.matmul(&proj)?.matmul(&u_dag)?);
    }
    Povm::from_exact(exact)
}

/// Three-outcome coarse-graining of the two-qubit computational basis:
/// {|0><0|, |1><1| + |2><2|, |3><3|}.
pub fn coarse_povm_2q() -> Result<Povm> {
    let mut e0 = ElementaryMatrix::zeros(2);
    e0.set(0, 0, GaussianRational::one());
    let mut e1 = ElementaryMatrix::zeros(2);
    e1.set(1, 1, GaussianRational::one());
    e1.set(2, 2, GaussianRational::one());
    let mut e2 = ElementaryMatrix::zeros(2);
    e2.set(3, 3, GaussianRational::one());
    Povm::from_exact(vec![e0, e1, e2])
}

/// The basis-copy permutation on 2n qubits: |i>|j> -> |i>|j xor i>.
pub fn copy_unitary_exact(n_qubits: u32) -> ElementaryMatrix {
    let dim = 1usize << n_qubits;
    let mut m = ElementaryMatrix::zeros(2 * n_qubits);
    for i in 0..dim {
        for j in 0..dim {
            let col = i * dim + j;
            let row = i * dim + (j ^ i);
            m.set(row, col, GaussianRational::one());
        }
    }
    m
}

/// Floating-point form of the basis-copy unitary.
pub fn copy_unitary(n_qubits: u32) -> Result<UnitaryTransform> {
    UnitaryTransform::new(copy_unitary_exact(n_qubits).to_complex_matrix())
}

/// An exact scrambling unitary on 2n qubits: rotations on every qubit
/// followed by the copy permutation and a phase layer.
pub fn scramble_unitary_exact(n_qubits: u32) -> Result<ElementaryMatrix> {
    let rot_layer = tensor_power(&rational_rotation(), 2 * n_qubits);
    let phase_layer = tensor_power(&phase_gate(), 2 * n_qubits);
    let copy = copy_unitary_exact(n_qubits);
    rot_layer.matmul(&copy)?.matmul(&phase_layer)
}

/// Description length of an exact matrix in the known-class context.
pub fn matrix_description_len(m: &ElementaryMatrix) -> Result<u64> {
    let object = EncodableObject::Matrix {
        qubits: m.qubits(),
        entries: m.sparse_entries(),
    };
    Ok(object.payload_len()? as u64)
}

/// Deterministic Haar sampler: sample k is a function of (seed, k) only, so
/// streams are reproducible and parallelizable.
#[derive(Debug, Clone)]
pub struct HaarSampler {
    n_qubits: u32,
    seed: u64,
    counter: u64,
}

impl HaarSampler {
    pub fn new(n_qubits: u32, seed: u64) -> Self {
        Self {
            n_qubits,
            seed,
            counter: 0,
        }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// The sample at a fixed index, independent of cursor state.
    pub fn sample_at(n_qubits: u32, seed: u64, index: u64) -> PureState {
        let dim = 1usize << n_qubits;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index.wrapping_add(1));
        let mut amps = Vec::with_capacity(dim);
        let mut norm_sqr: f64;
        loop {
            amps.clear();
            norm_sqr = 0.0;
            for _ in 0..dim {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                norm_sqr += re * re + im * im;
                amps.push(Complex64::new(re, im));
            }
            // A zero draw is essentially impossible; guard anyway.
            if norm_sqr > 1e-280 {
                break;
            }
        }
        let inv = 1.0 / norm_sqr.sqrt();
        let normalized: Vec<Complex64> = amps.iter().map(|z| z * inv).collect();
        PureState::new(normalized).expect("normalized Gaussian vector is a unit vector")
    }

    pub fn next_state(&mut self) -> PureState {
        let state = Self::sample_at(self.n_qubits, self.seed, self.counter);
        self.counter += 1;
        state
    }
}

/// Sends |psi> through C against a |0^n> ancilla: returns the two reduced
/// states and the joint output. When C does not produce a product state the
/// reduced states are mixed; all three are semi-densities.
pub fn clone_pipeline(
    psi: &PureState,
    c: &UnitaryTransform,
) -> Result<(SemiDensityMatrix, SemiDensityMatrix, SemiDensityMatrix)> {
    let n_dim = psi.dim();
    if c.dim() != n_dim * n_dim {
        return Err(Error::DimensionMismatch {
            context: "clone_pipeline: C must act on the doubled space",
            got: c.dim(),
            expected: n_dim * n_dim,
        });
    }
    let ancilla = PureState::basis(n_dim, 0)?;
    let input = psi.tensor(&ancilla);
    let output = c.apply(&input)?;
    let joint = output.density();
    let left = joint.partial_trace(n_dim, n_dim, TraceSide::Second)?;
    let right = joint.partial_trace(n_dim, n_dim, TraceSide::First)?;
    Ok((left, right, joint))
}

/// Deterministic random density matrix (trace exactly 1) from a seeded RNG.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> SemiDensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let gg = g
        .matmul(&g.adjoint())
        .expect("square product")
        .hermitized();
    let trace = gg.trace().re;
    SemiDensityMatrix::new(gg.scale_re(1.0 / trace)).expect("normalized Gram matrix is a density")
}

/// Random PSD matrix with entries of order 1 (not normalized).
pub fn random_psd(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    g.matmul(&g.adjoint())
        .expect("square product")
        .hermitized()
        .scale_re(1.0 / dim as f64)
}

/// Random Haar pure state as a density matrix.
pub fn random_pure_density(n_qubits: u32, seed: u64, index: u64) -> SemiDensityMatrix {
    HaarSampler::sample_at(n_qubits, seed, index).density()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computational_povm_on_basis_state() {
        let povm = computational_povm(1).unwrap();
        let zero = SemiDensityMatrix::from_vector(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let out = apply_povm(&povm, &zero).unwrap();
        assert!((out.prob(0) - 1.0).abs() < 1e-12);
        assert!(out.prob(1).abs() < 1e-12);
    }

    #[test]
    fn computational_povm_on_maximally_mixed_is_uniform() {
        for n in [1u32, 2] {
            let povm = computational_povm(n).unwrap();
            let mixed = SemiDensityMatrix::maximally_mixed(1 << n);
            let out = apply_povm(&povm, &mixed).unwrap();
            for p in out.probs() {
                assert!((p - (0.5f64).powi(n as i32)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn povm_completeness_gives_trace() {
        let povm = coarse_povm_2q().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let rho = random_density(4, &mut rng);
            let out = apply_povm(&povm, &rho).unwrap();
            assert!((out.total() - rho.trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn povm_validation_rejects_incomplete_sets() {
        let e0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(Povm::new(vec![e0]).is_err());
    }

    #[test]
    fn rotated_povm_is_valid_and_exact() {
        let r2 = rational_rotation().tensor(&rational_rotation());
        let povm = rotated_povm(&r2).unwrap();
        assert_eq!(povm.len(), 4);
        assert!(povm.description_len().unwrap() > 0);
    }

    #[test]
    fn copy_unitary_copies_basis_states() {
        for n in [1u32, 2] {
            let dim = 1usize << n;
            let c = copy_unitary(n).unwrap();
            for i in 0..dim {
                let input = PureState::basis(dim, i)
                    .unwrap()
                    .tensor(&PureState::basis(dim, 0).unwrap());
                let output = c.apply(&input).unwrap();
                let expected = PureState::basis(dim, i)
                    .unwrap()
                    .tensor(&PureState::basis(dim, i).unwrap());
                assert!((output.inner(&expected).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn copy_unitary_is_involution() {
        let c = copy_unitary_exact(1);
        let c2 = c.matmul(&c).unwrap();
        assert_eq!(c2, ElementaryMatrix::identity(2));
    }

    #[test]
    fn copy_of_plus_states_reduces_to_maximally_mixed() {
        let n = 1u32;
        let dim = 1usize << n;
        let s = 1.0 / (dim as f64).sqrt();
        let plus = PureState::new(vec![Complex64::new(s, 0.0); dim]).unwrap();
        let c = copy_unitary(n).unwrap();
        let (left, right, joint) = clone_pipeline(&plus, &c).unwrap();
        let mixed = SemiDensityMatrix::maximally_mixed(dim);
        assert!(left.matrix().max_abs_diff(mixed.matrix()) < 1e-10);
        assert!(right.matrix().max_abs_diff(mixed.matrix()) < 1e-10);
        assert!((joint.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_pipeline_keeps_input_and_ancilla() {
        let psi = PureState::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let c = UnitaryTransform::identity(4);
        let (left, right, _) = clone_pipeline(&psi, &c).unwrap();
        assert!(left.matrix().max_abs_diff(psi.density().matrix()) < 1e-12);
        let zero = SemiDensityMatrix::from_vector(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        assert!(right.matrix().max_abs_diff(zero.matrix()) < 1e-12);
    }

    #[test]
    fn scramble_unitary_is_exactly_unitary() {
        let s = scramble_unitary_exact(1).unwrap();
        assert!(s.is_unitary());
    }

    #[test]
    fn haar_sampler_is_deterministic_and_normalized() {
        let mut s1 = HaarSampler::new(2, 42);
        let mut s2 = HaarSampler::new(2, 42);
        for k in 0..5u64 {
            let a = s1.next_state();
            let b = s2.next_state();
            assert_eq!(a.amplitudes(), b.amplitudes());
            let direct = HaarSampler::sample_at(2, 42, k);
            assert_eq!(a.amplitudes()[0], direct.amplitudes()[0]);
            let norm: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        let other_seed = HaarSampler::sample_at(2, 43, 0);
        assert_ne!(other_seed.amplitudes(), HaarSampler::sample_at(2, 42, 0).amplitudes());
    }

    #[test]
    fn haar_first_moment_matches_uniform() {
        // Mean of |<0|psi>|^2 over the sphere is 1/dim, within 3 standard
        // errors at this sample size.
        let n = 2u32;
        let dim = 1usize << n;
        let samples = 4000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for k in 0..samples {
            let psi = HaarSampler::sample_at(n, 11, k);
            let p = psi.amplitudes()[0].norm_sqr();
            sum += p;
            sum_sq += p * p;
        }
        let mean = sum / samples as f64;
        let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
        let se = (var / samples as f64).sqrt();
        let expected = 1.0 / dim as f64;
        assert!(
            (mean - expected).abs() <= 3.0 * se + 1e-12,
            "mean {mean} expected {expected} se {se}"
        );
    }

    #[test]
    fn haar_second_moment_matches_symmetric_subspace() {
        // Mean of |<phi|psi>|^4 for fixed phi is 2 / (dim (dim + 1)).
        let n = 2u32;
        let dim = 1usize << n;
        let phi = HaarSampler::sample_at(n, 5, 0);
        let samples = 4000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for k in 0..samples {
            let psi = HaarSampler::sample_at(n, 17, k);
            let overlap: Complex64 = phi
                .amplitudes()
                .iter()
                .zip(psi.amplitudes())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let p = overlap.norm_sqr().powi(2);
            sum += p;
            sum_sq += p * p;
        }
        let mean = sum / samples as f64;
        let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
        let se = (var / samples as f64).sqrt();
        let expected = 2.0 / (dim as f64 * (dim as f64 + 1.0));
        assert!(
            (mean - expected).abs() <= 3.0 * se + 1e-12,
            "mean {mean} expected {expected} se {se}"
        );
    }
}
