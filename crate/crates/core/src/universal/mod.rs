//! Budgeted enumeration of elementary states and the universal semi-density
//! matrix built from them.
//!
//! A state "exists" at budget B when its canonical code is at most B bits
//! long; its weight in the universal mixture is 2^{-code length}. The
//! mixture therefore has trace at most 1 by the Kraft inequality, and it
//! dominates every enumerated projector by construction. All downstream
//! entropy and information scores are relative to this matrix and its
//! budget.

mod cache;
mod lower;
pub mod oracle;
mod registry;

pub use cache::mu_cached;
pub use lower::LowerComputableMatrix;
pub use registry::{conditional_mu, ConditionRegistry};

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::codec::{
    decode_state_payload, len_gaussian, len_nat, Code, EncodableObject,
};
use crate::error::{Error, Result};
use crate::mat::{validate_psd, ComplexMatrix, SemiDensityMatrix, PSD_MIN_EIG_TOL};
use crate::rational::GaussianRational;

/// An exact-rational state admitted to the enumeration, together with its
/// canonical code.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryState {
    qubits: u32,
    entries: Vec<(u64, GaussianRational)>,
    norm_sqr: BigRational,
    code: Code,
    sparse_amps: Vec<(usize, Complex64)>,
}

impl ElementaryState {
    /// Builds a state from sparse entries, checking canonicity and the exact
    /// norm bound 0 < |v|^2 <= 1; the code is the canonical payload code.
    pub fn new(qubits: u32, entries: Vec<(u64, GaussianRational)>) -> Result<Self> {
        let object = EncodableObject::StateVector {
            qubits,
            entries: entries.clone(),
        };
        object.check_canonical()?;
        let norm_sqr = entries
            .iter()
            .fold(BigRational::zero(), |acc, (_, v)| acc + v.norm_sqr());
        if norm_sqr.is_zero() || norm_sqr > BigRational::one() {
            return Err(Error::NonCanonical(format!(
                "state norm^2 {norm_sqr} outside (0, 1]"
            )));
        }
        let code = object.encode_payload()?;
        let sparse_amps = entries
            .iter()
            .map(|(i, v)| (*i as usize, v.to_complex()))
            .collect();
        Ok(Self {
            qubits,
            entries,
            norm_sqr,
            code,
            sparse_amps,
        })
    }

    pub fn from_object(object: &EncodableObject) -> Result<Self> {
        match object {
            EncodableObject::StateVector { qubits, entries } => {
                Self::new(*qubits, entries.clone())
            }
            _ => Err(Error::NonCanonical("not a state vector object".into())),
        }
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits
    }

    pub fn entries(&self) -> &[(u64, GaussianRational)] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> &BigRational {
        &self.norm_sqr
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn code_len(&self) -> usize {
        self.code.len()
    }

    /// 2^{-code length}.
    pub fn weight(&self) -> f64 {
        self.code.weight()
    }

    pub fn sparse_amplitudes(&self) -> &[(usize, Complex64)] {
        &self.sparse_amps
    }

    pub fn dense_amplitudes(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, a) in &self.sparse_amps {
            out[*i] = *a;
        }
        out
    }

    /// <phi| m |phi> for a dense matrix m; O(k^2) in the sparsity k.
    pub fn quadratic_form(&self, m: &ComplexMatrix) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in &self.sparse_amps {
            for (j, b) in &self.sparse_amps {
                acc += a.conj() * m[(*i, *j)] * b;
            }
        }
        acc.re
    }

    /// |<phi|psi>|^2 against a dense vector.
    pub fn overlap_sqr(&self, psi: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in &self.sparse_amps {
            acc += a.conj() * psi[*i];
        }
        acc.norm_sqr()
    }

    /// The (possibly subnormalized) projector |phi><phi|.
    pub fn projector(&self) -> ComplexMatrix {
        let v = self.dense_amplitudes();
        ComplexMatrix::outer(&v, &v)
    }

    /// The state extended by |0^m>: amplitudes move to indices i << m.
    pub fn extend_with_zeros(&self, extra_qubits: u32) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|(i, v)| (i << extra_qubits, v.clone()))
            .collect();
        Self::new(self.qubits + extra_qubits, entries)
    }

    pub fn to_object(&self) -> EncodableObject {
        EncodableObject::StateVector {
            qubits: self.qubits,
            entries: self.entries.clone(),
        }
    }
}

/// One ledger row of the universal matrix.
#[derive(Debug, Clone)]
pub struct LedgerEntry {
    pub state: ElementaryState,
    pub weight: f64,
}

/// The budgeted universal semi-density matrix: the weighted mixture of all
/// elementary states whose codes fit the budget.
#[derive(Debug, Clone)]
pub struct UniversalMatrix {
    n_qubits: u32,
    budget: u64,
    matrix: SemiDensityMatrix,
    ledger: Vec<LedgerEntry>,
}

impl UniversalMatrix {
    /// Deterministic function of (n, budget).
    pub fn build(n_qubits: u32, budget: u64) -> Result<Self> {
        let states = enumerate_states(n_qubits, budget)?;
        let dim = 1usize << n_qubits;
        let mut acc = ComplexMatrix::zeros(dim, dim);
        let mut ledger = Vec::with_capacity(states.len());
        for state in states {
            let w = state.weight();
            for (i, a) in state.sparse_amplitudes() {
                for (j, b) in state.sparse_amplitudes() {
                    acc[(*i, *j)] += a * b.conj() * w;
                }
            }
            ledger.push(LedgerEntry { state, weight: w });
        }
        let matrix = SemiDensityMatrix::new(acc)?;
        Ok(Self {
            n_qubits,
            budget,
            matrix,
            ledger,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn matrix(&self) -> &SemiDensityMatrix {
        &self.matrix
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Tr(mu sigma).
    pub fn expectation(&self, sigma: &SemiDensityMatrix) -> Result<f64> {
        if sigma.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "UniversalMatrix::expectation",
                got: sigma.dim(),
                expected: self.dim(),
            });
        }
        Ok(self
            .matrix
            .matrix()
            .trace_product(sigma.matrix())?
            .re)
    }

    /// <psi| mu |psi> for a dense state vector.
    pub fn vector_expectation(&self, psi: &[Complex64]) -> Result<f64> {
        Ok(self.matrix.matrix().quadratic_form(psi)?.re)
    }

    /// Verifies mu - w |phi><phi| is PSD for the given ledger row.
    pub fn dominates_entry(&self, entry: &LedgerEntry) -> Result<bool> {
        let diff = self
            .matrix
            .matrix()
            .sub(&entry.state.projector().scale_re(entry.weight))?;
        Ok(validate_psd(&diff, PSD_MIN_EIG_TOL)?.is_psd)
    }
}

/// Entropy against a universal matrix: either a finite bit count or the
/// distinguished infinite value for states orthogonal to the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entropy {
    Finite(i64),
    Infinite,
}

impl Entropy {
    pub fn as_finite(&self) -> Option<i64> {
        match self {
            Entropy::Finite(k) => Some(*k),
            Entropy::Infinite => None,
        }
    }
}

impl std::fmt::Display for Entropy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Entropy::Finite(k) => write!(f, "{k}"),
            Entropy::Infinite => write!(f, "inf"),
        }
    }
}

/// ceil(-log2 t) for t in (0, 1]; values above 1 give negative entropy.
pub fn ceil_neg_log2(t: f64) -> i64 {
    let x = -t.log2();
    x.ceil() as i64
}

/// Entropy of sigma against mu: ceil(-log2 Tr(mu sigma)).
pub fn entropy(sigma: &SemiDensityMatrix, mu: &UniversalMatrix) -> Result<Entropy> {
    let t = mu.expectation(sigma)?;
    entropy_of_trace(t)
}

/// Entropy from an already-computed trace value.
pub fn entropy_of_trace(t: f64) -> Result<Entropy> {
    if t < -1e-9 {
        return Err(Error::Other(format!(
            "trace inner product {t} is significantly negative"
        )));
    }
    if t <= 0.0 {
        return Ok(Entropy::Infinite);
    }
    Ok(Entropy::Finite(ceil_neg_log2(t)))
}

/// Surrogate description complexity of an object: its payload code length.
pub fn k_hat(x: &EncodableObject) -> Result<u64> {
    Ok(x.payload_len()? as u64)
}

/// Surrogate algorithmic probability 2^{-k_hat}; the coding-theorem constant
/// is zero by construction.
pub fn m_hat(x: &EncodableObject) -> Result<f64> {
    Ok((-(k_hat(x)? as f64)).exp2())
}

/// Complexity of a natural number in the known-class context.
pub fn k_hat_nat(k: u64) -> u64 {
    len_nat(k) as u64
}

/// 2^{-k_hat_nat(k)}.
pub fn m_hat_nat(k: u64) -> f64 {
    (-(k_hat_nat(k) as f64)).exp2()
}

// ---------------------------------------------------------------------------
// Enumeration by bounded direct search.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct ValueEntry {
    value: GaussianRational,
    len: usize,
    norm_sqr: BigRational,
}

/// Cache of canonical nonzero Gaussian rationals with |v|^2 <= 1, grouped by
/// payload length. Shared across enumerations.
static VALUE_TABLE: Lazy<Mutex<BTreeMap<usize, Arc<Vec<ValueEntry>>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

/// All canonical rationals p/q with |p| <= q and payload length <= max_len,
/// zero included, sorted by (length, p, q).
fn rationals_up_to(max_len: usize) -> Vec<(BigRational, usize)> {
    let mut out = Vec::new();
    // Integers by zigzag value; length grows with the zigzag index.
    let mut zz: u64 = 0;
    loop {
        let p_len = len_nat(zz);
        if p_len + 1 > max_len {
            break;
        }
        let p = crate::codec::unzigzag(zz);
        let mut q: u64 = 1;
        loop {
            let len = p_len + len_nat(q - 1);
            if len > max_len {
                break;
            }
            let canonical = if p == 0 {
                q == 1
            } else {
                p.unsigned_abs() <= q && gcd(p.unsigned_abs(), q) == 1
            };
            if canonical {
                out.push((
                    BigRational::new(BigInt::from(p), BigInt::from(q)),
                    len,
                ));
            }
            q += 1;
        }
        zz += 1;
    }
    out.sort_by_key(|a| (a.1, a.0.clone()));
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn values_up_to(max_len: usize) -> Arc<Vec<ValueEntry>> {
    let mut cache = VALUE_TABLE.lock().unwrap();
    if let Some(hit) = cache.get(&max_len) {
        return Arc::clone(hit);
    }
    let rationals = rationals_up_to(max_len.saturating_sub(2));
    let one = BigRational::one();
    let mut out = Vec::new();
    for (re, re_len) in &rationals {
        if re_len + 2 > max_len {
            break;
        }
        let re_norm = re * re;
        for (im, im_len) in &rationals {
            let len = re_len + im_len;
            if len > max_len {
                break;
            }
            if re.is_zero() && im.is_zero() {
                continue;
            }
            let norm_sqr = &re_norm + im * im;
            if norm_sqr > one {
                continue;
            }
            out.push(ValueEntry {
                value: GaussianRational::new(re.clone(), im.clone()),
                len,
                norm_sqr,
            });
        }
    }
    out.sort_by_key(|a| (a.len, a.value.clone()));
    let arc = Arc::new(out);
    cache.insert(max_len, Arc::clone(&arc));
    arc
}

/// Minimal payload length of a nonzero Gaussian rational (namely +-1, +-i).
const MIN_VALUE_LEN: usize = 6;

/// Enumerates exactly the canonical elementary states on `n_qubits` qubits
/// with code length at most `budget` and exact norm in (0, 1], by bounded
/// direct search over entry counts, indices, and values. Sorted by
/// (code length, code bits). A budget below the minimum code length yields
/// an empty list.
pub fn enumerate_states(n_qubits: u32, budget: u64) -> Result<Vec<ElementaryState>> {
    if n_qubits == 0 || n_qubits > crate::codec::MAX_QUBITS {
        return Err(Error::Other(format!(
            "qubit count {n_qubits} out of supported range"
        )));
    }
    let budget = budget as usize;
    let dim = 1u64 << n_qubits;
    let header = len_nat(n_qubits as u64);
    let mut states = Vec::new();
    if header >= budget {
        return Ok(states);
    }

    let max_value_budget = budget.saturating_sub(header + len_nat(1) + len_nat(0));
    if max_value_budget < MIN_VALUE_LEN {
        return Ok(states);
    }
    let values = values_up_to(max_value_budget);

    // Entry count k; each entry costs at least 1 (index 0) + MIN_VALUE_LEN.
    let mut k: u64 = 1;
    loop {
        let fixed = header + len_nat(k);
        if fixed + (k as usize) * (1 + MIN_VALUE_LEN) > budget || k > dim {
            break;
        }
        let remaining = budget - fixed;
        let mut chosen: Vec<(u64, &ValueEntry)> = Vec::with_capacity(k as usize);
        search_entries(
            dim,
            k as usize,
            0,
            remaining,
            &BigRational::zero(),
            &values,
            &mut chosen,
            &mut |entries| {
                let owned: Vec<(u64, GaussianRational)> = entries
                    .iter()
                    .map(|(i, v)| (*i, v.value.clone()))
                    .collect();
                let state = ElementaryState::new(n_qubits, owned)?;
                debug_assert!(state.code_len() <= budget);
                states.push(state);
                Ok(())
            },
        )?;
        k += 1;
    }

    states.sort_by(|a, b| {
        (a.code_len(), a.code().bits()).cmp(&(b.code_len(), b.code().bits()))
    });
    Ok(states)
}

type EmitFn<'c, 'v> = &'c mut dyn FnMut(&[(u64, &'v ValueEntry)]) -> Result<()>;

/// Recursive slot filler: picks the next index (strictly increasing) and a
/// value, pruning on the remaining bit budget and the exact norm bound.
#[allow(clippy::too_many_arguments)]
fn search_entries<'v>(
    dim: u64,
    slots_left: usize,
    min_index: u64,
    remaining: usize,
    norm_so_far: &BigRational,
    values: &'v [ValueEntry],
    chosen: &mut Vec<(u64, &'v ValueEntry)>,
    emit: EmitFn<'_, 'v>,
) -> Result<()> {
    if slots_left == 0 {
        if !norm_so_far.is_zero() {
            emit(chosen)?;
        }
        return Ok(());
    }
    let tail_min = (slots_left - 1) * (1 + MIN_VALUE_LEN);
    let one = BigRational::one();
    let mut idx = min_index;
    while idx < dim {
        let idx_cost = len_nat(idx);
        // Later indices are strictly larger, so their costs only grow;
        // still, gamma lengths are not monotone step-by-step, so iterate all.
        if idx_cost + MIN_VALUE_LEN + tail_min <= remaining {
            let value_budget = remaining - idx_cost - tail_min;
            for entry in values.iter() {
                if entry.len > value_budget {
                    break;
                }
                let norm = norm_so_far + &entry.norm_sqr;
                if norm > one {
                    continue;
                }
                chosen.push((idx, entry));
                search_entries(
                    dim,
                    slots_left - 1,
                    idx + 1,
                    remaining - idx_cost - entry.len,
                    &norm,
                    values,
                    chosen,
                    emit,
                )?;
                chosen.pop();
            }
        }
        idx += 1;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Subsystem consistency: the reduced joint matrix dominates the smaller one.
// ---------------------------------------------------------------------------

/// Result of the ledger-extension comparison between mu on n qubits and the
/// partial trace of mu on 2n qubits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsystemConsistency {
    pub n_qubits: u32,
    pub base_budget: u64,
    pub joint_budget: u64,
    /// Largest code-length overhead of appending |0^n> to a ledger state.
    pub c_ext: u64,
    /// Whether Tr_B mu_{2n} - 2^{-c_ext} mu_n is PSD.
    pub psd_ok: bool,
    pub min_eig: f64,
}

/// Measures c_ext by comparing ledgers and checks the domination
/// Tr_B mu_{2n} >= 2^{-c_ext} mu_n, where the joint matrix is built at
/// budget B + c_ext so every extended ledger state fits.
pub fn subsystem_consistency(n_qubits: u32, budget: u64) -> Result<SubsystemConsistency> {
    let base = UniversalMatrix::build(n_qubits, budget)?;
    let mut c_ext: u64 = 0;
    for entry in base.ledger() {
        let extended = entry.state.extend_with_zeros(n_qubits)?;
        let overhead = extended.code_len() as u64 - entry.state.code_len() as u64;
        c_ext = c_ext.max(overhead);
    }
    let joint_budget = budget + c_ext;
    let joint = UniversalMatrix::build(2 * n_qubits, joint_budget)?;
    let reduced = joint
        .matrix()
        .partial_trace(base.dim(), base.dim(), crate::mat::TraceSide::Second)?;
    let scaled = base
        .matrix()
        .matrix()
        .scale_re((-(c_ext as f64)).exp2());
    let diff = reduced.matrix().sub(&scaled)?;
    let report = validate_psd(&diff, PSD_MIN_EIG_TOL)?;
    Ok(SubsystemConsistency {
        n_qubits,
        base_budget: budget,
        joint_budget,
        c_ext,
        psd_ok: report.is_psd,
        min_eig: report.min_eig,
    })
}

// ---------------------------------------------------------------------------
// Serialization: the ledger with exact rationals plus the matrix, reloadable
// bit-exactly.
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct LedgerRow {
    code: Code,
    entries: Vec<(u64, [i64; 4])>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MuDocument {
    n_qubits: u32,
    budget: u64,
    trace: f64,
    ledger: Vec<LedgerRow>,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl UniversalMatrix {
    pub fn to_json(&self) -> Result<String> {
        let mut ledger = Vec::with_capacity(self.ledger.len());
        for entry in &self.ledger {
            let mut entries = Vec::with_capacity(entry.state.entries().len());
            for (i, v) in entry.state.entries() {
                let (a, b, c, d) = v.to_i64_parts()?;
                entries.push((*i, [a, b, c, d]));
            }
            ledger.push(LedgerRow {
                code: entry.state.code().clone(),
                entries,
            });
        }
        let dim = self.dim();
        let m = self.matrix.matrix();
        let matrix = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| {
                        let z = m[(r, c)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Ok(serde_json::to_string_pretty(&MuDocument {
            n_qubits: self.n_qubits,
            budget: self.budget,
            trace: self.trace(),
            ledger,
            matrix,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MuDocument = serde_json::from_str(text)?;
        let dim = 1usize << doc.n_qubits;
        if doc.matrix.len() != dim {
            return Err(Error::Decode("mu document matrix has wrong dimension".into()));
        }
        let matrix = ComplexMatrix::from_fn(dim, dim, |r, c| {
            let [re, im] = doc.matrix[r][c];
            Complex64::new(re, im)
        });
        let mut ledger = Vec::with_capacity(doc.ledger.len());
        for row in doc.ledger {
            let entries: Vec<(u64, GaussianRational)> = row
                .entries
                .iter()
                .map(|(i, [a, b, c, d])| {
                    GaussianRational::from_i64_parts(*a, *b, *c, *d).map(|v| (*i, v))
                })
                .collect::<Result<_>>()?;
            let state = ElementaryState::new(doc.n_qubits, entries)?;
            if state.code() != &row.code {
                return Err(Error::Decode(
                    "ledger row code does not match canonical encoding".into(),
                ));
            }
            let weight = state.weight();
            ledger.push(LedgerEntry { state, weight });
        }
        Ok(Self {
            n_qubits: doc.n_qubits,
            budget: doc.budget,
            matrix: SemiDensityMatrix::new(matrix)?,
            ledger,
        })
    }

    /// Bit-exact equality of parameters, ledger codes, and matrix entries.
    pub fn bit_identical(&self, other: &Self) -> bool {
        if self.n_qubits != other.n_qubits
            || self.budget != other.budget
            || self.ledger.len() != other.ledger.len()
        {
            return false;
        }
        for (a, b) in self.ledger.iter().zip(&other.ledger) {
            if a.state.code() != b.state.code() || a.weight.to_bits() != b.weight.to_bits() {
                return false;
            }
        }
        let (ma, mb) = (self.matrix.matrix(), other.matrix.matrix());
        ma.entries()
            .iter()
            .zip(mb.entries())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
    }
}

/// Decodes a state payload; exposed for the oracle module and tests.
pub fn state_from_payload(code: &Code) -> Result<ElementaryState> {
    let object = decode_state_payload(code)?;
    ElementaryState::from_object(&object)
}

/// Minimal code length of a basis-like state, used to pick sensible budgets.
pub fn min_state_code_len(n_qubits: u32) -> usize {
    len_nat(n_qubits as u64)
        + len_nat(1)
        + len_nat(0)
        + len_gaussian(&GaussianRational::one()).expect("one is encodable")
}
