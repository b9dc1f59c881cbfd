//! Process-wide cache of built universal matrices.
//!
//! Building a matrix is deterministic in (n, budget) but not free; the
//! experiment harnesses share instances through this cache.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use super::UniversalMatrix;
use crate::error::Result;

type MuCache = BTreeMap<(u32, u64), Arc<UniversalMatrix>>;

static CACHE: Lazy<Mutex<MuCache>> = Lazy::new(|| Mutex::new(BTreeMap::new()));

/// Returns the cached universal matrix for (n, budget), building on first use.
pub fn mu_cached(n_qubits: u32, budget: u64) -> Result<Arc<UniversalMatrix>> {
    {
        let cache = CACHE.lock().unwrap();
        if let Some(hit) = cache.get(&(n_qubits, budget)) {
            return Ok(Arc::clone(hit));
        }
    }
    // Build outside the lock; racing builders produce identical results.
    let built = Arc::new(UniversalMatrix::build(n_qubits, budget)?);
    let mut cache = CACHE.lock().unwrap();
    let entry = cache
        .entry((n_qubits, budget))
        .or_insert_with(|| Arc::clone(&built));
    Ok(Arc::clone(entry))
}
