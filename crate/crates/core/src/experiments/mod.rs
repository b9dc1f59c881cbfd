//! Theorem harnesses: one named experiment per conservation statement, each
//! emitting a deterministic machine-readable report with measured constants.
//!
//! Every inequality is asserted in the form
//! `surrogate-LHS <= surrogate-RHS + declared constant`, where the constant
//! is assembled from transport description costs and measured domination
//! exponents, never guessed. A harness fails only when an inequality fails
//! at its declared constant.

mod addition;
mod conjectures;
mod conservation;
mod nocloning;
mod povm_exp;
mod report;
mod selfinfo;

pub use addition::exp_addition;
pub use conjectures::explore_conjectures;
pub use conservation::exp_conservation;
pub use nocloning::exp_nocloning;
pub use povm_exp::exp_povm;
pub use report::{
    fields, mean_with_error, CheckRecord, ExperimentParams, ExperimentReport, FieldValue,
    MeanWithError,
};
pub use selfinfo::exp_selfinfo;

use crate::error::Result;
use crate::mat::{generalized_max_eigenvalue, ComplexMatrix, SemiDensityMatrix};
use crate::rational::{ratio, ElementaryMatrix, GaussianRational};
use crate::universal::UniversalMatrix;

/// Slack tolerance for inequality checks in the log2 domain, absorbing
/// floating-point noise from the two evaluation routes.
pub const LOG_SLACK_TOL: f64 = 1e-6;

/// Measured domination exponent: the least integer c with x <= 2^c * base
/// on the support of base. Errors if x leaks outside that support.
pub fn domination_bits(x: &ComplexMatrix, base: &ComplexMatrix) -> Result<f64> {
    let lam = generalized_max_eigenvalue(x, base, 1e-13, 1e-8)?;
    if lam <= 0.0 {
        return Ok(0.0);
    }
    Ok(lam.log2().ceil())
}

/// The exact projector |0...0><0...0| on n qubits.
pub fn zero_projector_exact(n_qubits: u32) -> ElementaryMatrix {
    let mut m = ElementaryMatrix::zeros(n_qubits);
    m.set(0, 0, GaussianRational::one());
    m
}

/// Deterministic elementary target battery: basis projectors, the maximally
/// mixed state, and an even mixture of the two.
pub fn elementary_target_battery(n_qubits: u32) -> Vec<(String, ElementaryMatrix)> {
    let dim = 1usize << n_qubits;
    let mut battery = Vec::new();
    battery.push(("proj-zero".to_string(), zero_projector_exact(n_qubits)));
    let mut last = ElementaryMatrix::zeros(n_qubits);
    last.set(dim - 1, dim - 1, GaussianRational::one());
    battery.push(("proj-last".to_string(), last));
    battery.push((
        "maximally-mixed".to_string(),
        ElementaryMatrix::maximally_mixed(n_qubits),
    ));
    let mixed = ElementaryMatrix::maximally_mixed(n_qubits)
        .scale(&ratio(1, 2));
    let mut blend = zero_projector_exact(n_qubits).scale(&ratio(1, 2));
    for r in 0..dim {
        for c in 0..dim {
            let sum = blend.get(r, c).add(mixed.get(r, c));
            blend.set(r, c, sum);
        }
    }
    battery.push(("half-zero-half-mixed".to_string(), blend));
    battery
}

/// Elementary unitary battery on n qubits: identity, a rational rotation
/// layer, a phase layer, and (for two or more qubits) a CNOT composition.
pub fn unitary_battery(n_qubits: u32) -> Result<Vec<(String, ElementaryMatrix)>> {
    use crate::qops::{cnot, phase_gate, rational_rotation, tensor_power};
    let mut battery = vec![
        (
            "identity".to_string(),
            ElementaryMatrix::identity(n_qubits),
        ),
        (
            "rotation-layer".to_string(),
            tensor_power(&rational_rotation(), n_qubits),
        ),
        (
            "phase-layer".to_string(),
            tensor_power(&phase_gate(), n_qubits),
        ),
    ];
    if n_qubits == 2 {
        battery.push(("cnot".to_string(), cnot()));
        let mixed = cnot().matmul(&tensor_power(&rational_rotation(), 2))?;
        battery.push(("cnot-rotation".to_string(), mixed));
    }
    Ok(battery)
}

/// The semi-density form of an exact elementary matrix.
pub fn exact_to_semi_density(m: &ElementaryMatrix) -> Result<SemiDensityMatrix> {
    SemiDensityMatrix::new(m.to_complex_matrix())
}

/// Shared product-family construction with its universal matrix.
pub(crate) fn family_for(
    mu: &UniversalMatrix,
) -> Result<crate::info::ProductTestFamily> {
    crate::info::product_test_family(mu)
}
