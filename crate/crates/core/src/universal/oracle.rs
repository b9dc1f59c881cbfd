//! Exhaustive-decoder reference enumeration.
//!
//! Walks every bit string up to a length bound, attempts to decode it as a
//! state-vector payload, and keeps the canonical in-range states. This is a
//! deliberately independent route from the bounded direct search in the
//! parent module: the search constructs objects and encodes them, the oracle
//! decodes raw strings. The two must agree code-for-code, which the
//! acceptance suite checks at small budgets. Cost grows as 2^budget, so keep
//! budgets at or below about 20 bits.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{state_from_payload, ElementaryState};
use crate::codec::Code;
use crate::error::Result;

/// Decodes every bit string of length 1..=budget and returns the states on
/// `n_qubits` qubits with exact norm in (0, 1], sorted by (length, bits).
pub fn exhaustive_states(n_qubits: u32, budget: u64) -> Result<Vec<ElementaryState>> {
    let budget = budget.min(26) as usize;
    let mut found = Vec::new();
    let one = BigRational::one();
    for len in 1..=budget {
        let mut bits = vec![false; len];
        loop {
            let code = Code::from_bits(bits.clone());
            if let Ok(state) = state_from_payload(&code) {
                if state.qubits() == n_qubits
                    && !state.norm_sqr().is_zero()
                    && state.norm_sqr() <= &one
                {
                    found.push(state);
                }
            }
            // Increment the bit string as a binary counter.
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if bits[i] {
                    bits[i] = false;
                } else {
                    bits[i] = true;
                    break;
                }
            }
            if bits.iter().all(|&b| !b) {
                break;
            }
        }
    }
    found.sort_by(|a, b| (a.code_len(), a.code().bits()).cmp(&(b.code_len(), b.code().bits())));
    Ok(found)
}
