//! Encodable objects and their canonical codes.
//!
//! Two encodings exist for each object. The payload code assumes the object
//! class is known from context and carries no tags; its length is the
//! description complexity used for weights. The tagged code prefixes 2-bit
//! class tags at each union node (a scalar carries a second 2-bit subclass
//! tag) so objects of different classes can share one prefix-free family,
//! which is what pairs and registry keys need.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{BitReader, BitWriter, Code};
use crate::error::{Error, Result};
use crate::rational::GaussianRational;

/// Tag bits at every union node of the tagged encoding.
pub const OBJECT_TAG_BITS: usize = 2;
/// Largest supported qubit count for sparse objects (dimensions to 2^20).
pub const MAX_QUBITS: u32 = 20;
/// Additional tag bits selecting the scalar subclass.
pub const SCALAR_TAG_BITS: usize = 2;

/// Canonical encodable values. Rationals are reduced with positive
/// denominator (guaranteed by `BigRational`); sparse entries are strictly
/// increasing by index with no zeros stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EncodableObject {
    Nat(u64),
    Int(i64),
    Rational(BigRational),
    Gaussian(GaussianRational),
    /// State vector on `qubits` qubits: entries (index, amplitude).
    StateVector {
        qubits: u32,
        entries: Vec<(u64, GaussianRational)>,
    },
    /// Square matrix on `qubits` qubits, row-major flat indices over dim^2.
    Matrix {
        qubits: u32,
        entries: Vec<(u64, GaussianRational)>,
    },
    Pair(Box<EncodableObject>, Box<EncodableObject>),
}

/// Length of the gamma code for natural k.
pub fn len_nat(k: u64) -> usize {
    let v = k + 1;
    let width = 64 - v.leading_zeros() as usize;
    2 * width - 1
}

/// Length of the zigzag-gamma code for integer i.
pub fn len_int(i: i64) -> usize {
    len_nat(super::zigzag(i))
}

fn rational_components(r: &BigRational) -> Result<(i64, u64)> {
    let numer = r
        .numer()
        .to_i64()
        .ok_or_else(|| Error::Unencodable(format!("numerator {} too large", r.numer())))?;
    let denom = r
        .denom()
        .to_u64()
        .ok_or_else(|| Error::Unencodable(format!("denominator {} too large", r.denom())))?;
    if denom == 0 {
        return Err(Error::NonCanonical("zero denominator".into()));
    }
    Ok((numer, denom))
}

/// Payload length of a rational: integer numerator plus natural (denom - 1).
pub fn len_rational(r: &BigRational) -> Result<usize> {
    let (numer, denom) = rational_components(r)?;
    Ok(len_int(numer) + len_nat(denom - 1))
}

/// Payload length of a Gaussian rational: two rationals.
pub fn len_gaussian(g: &GaussianRational) -> Result<usize> {
    Ok(len_rational(&g.re)? + len_rational(&g.im)?)
}

/// Payload length of a state vector without building the code.
pub fn len_state_payload(qubits: u32, entries: &[(u64, GaussianRational)]) -> Result<usize> {
    let mut total = len_nat(qubits as u64) + len_nat(entries.len() as u64);
    for (idx, v) in entries {
        total += len_nat(*idx) + len_gaussian(v)?;
    }
    Ok(total)
}

/// Payload length of a sparse matrix; same shape as a state vector but
/// indices range over dim^2.
pub fn len_matrix_payload(qubits: u32, entries: &[(u64, GaussianRational)]) -> Result<usize> {
    len_state_payload(qubits, entries)
}

/// Payload length of a pair: both components fully tagged.
pub fn len_pair_payload(a: &EncodableObject, b: &EncodableObject) -> Result<usize> {
    Ok(a.tagged_len()? + b.tagged_len()?)
}

impl EncodableObject {
    pub fn rational_from_parts(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::NonCanonical("zero denominator".into()));
        }
        Ok(Self::Rational(BigRational::new(
            BigInt::from(num),
            BigInt::from(den),
        )))
    }

    pub fn pair(a: EncodableObject, b: EncodableObject) -> Self {
        Self::Pair(Box::new(a), Box::new(b))
    }

    /// Checks the structural canonicity rules for this object.
    pub fn check_canonical(&self) -> Result<()> {
        match self {
            Self::Nat(_) | Self::Int(_) => Ok(()),
            Self::Rational(r) => {
                rational_components(r)?;
                Ok(())
            }
            Self::Gaussian(g) => {
                rational_components(&g.re)?;
                rational_components(&g.im)?;
                Ok(())
            }
            Self::StateVector { qubits, entries } => {
                check_qubits(*qubits)?;
                check_sparse(*qubits, entries, 1u64 << qubits)
            }
            Self::Matrix { qubits, entries } => {
                check_qubits(*qubits)?;
                let dim = 1u64 << qubits;
                check_sparse(*qubits, entries, dim * dim)
            }
            Self::Pair(a, b) => {
                a.check_canonical()?;
                b.check_canonical()
            }
        }
    }

    /// Class-contextual payload length; this is the description complexity
    /// of the object.
    pub fn payload_len(&self) -> Result<usize> {
        match self {
            Self::Nat(k) => Ok(len_nat(*k)),
            Self::Int(i) => Ok(len_int(*i)),
            Self::Rational(r) => len_rational(r),
            Self::Gaussian(g) => len_gaussian(g),
            Self::StateVector { qubits, entries } => len_state_payload(*qubits, entries),
            Self::Matrix { qubits, entries } => len_matrix_payload(*qubits, entries),
            Self::Pair(a, b) => len_pair_payload(a, b),
        }
    }

    /// Tagged length: payload plus 2-bit tags at each union node.
    pub fn tagged_len(&self) -> Result<usize> {
        let extra = match self {
            Self::Nat(_) | Self::Int(_) | Self::Rational(_) | Self::Gaussian(_) => {
                OBJECT_TAG_BITS + SCALAR_TAG_BITS
            }
            _ => OBJECT_TAG_BITS,
        };
        Ok(extra + self.payload_len()?)
    }

    /// Payload code, given the class is known from context.
    pub fn encode_payload(&self) -> Result<Code> {
        self.check_canonical()?;
        let mut w = BitWriter::new();
        self.write_payload(&mut w)?;
        Ok(w.finish())
    }

    fn write_payload(&self, w: &mut BitWriter) -> Result<()> {
        match self {
            Self::Nat(k) => w.push_nat(*k),
            Self::Int(i) => w.push_int(*i),
            Self::Rational(r) => write_rational(w, r),
            Self::Gaussian(g) => write_gaussian(w, g),
            Self::StateVector { qubits, entries } | Self::Matrix { qubits, entries } => {
                w.push_nat(*qubits as u64)?;
                w.push_nat(entries.len() as u64)?;
                for (idx, v) in entries {
                    w.push_nat(*idx)?;
                    write_gaussian(w, v)?;
                }
                Ok(())
            }
            Self::Pair(a, b) => {
                a.write_tagged(w)?;
                b.write_tagged(w)
            }
        }
    }

    fn write_tagged(&self, w: &mut BitWriter) -> Result<()> {
        match self {
            Self::Nat(_) | Self::Int(_) | Self::Rational(_) | Self::Gaussian(_) => {
                w.push_bits(0b00, 2);
                let sub = match self {
                    Self::Nat(_) => 0b00,
                    Self::Int(_) => 0b01,
                    Self::Rational(_) => 0b10,
                    _ => 0b11,
                };
                w.push_bits(sub, 2);
            }
            Self::StateVector { .. } => w.push_bits(0b01, 2),
            Self::Matrix { .. } => w.push_bits(0b10, 2),
            Self::Pair(_, _) => w.push_bits(0b11, 2),
        }
        self.write_payload(w)
    }
}

fn check_qubits(qubits: u32) -> Result<()> {
    if qubits == 0 || qubits > MAX_QUBITS {
        return Err(Error::NonCanonical(format!(
            "qubit count {qubits} out of range"
        )));
    }
    Ok(())
}

fn check_sparse(qubits: u32, entries: &[(u64, GaussianRational)], limit: u64) -> Result<()> {
    check_qubits(qubits)?;
    let mut prev: Option<u64> = None;
    for (idx, v) in entries {
        if *idx >= limit {
            return Err(Error::NonCanonical(format!(
                "entry index {idx} out of range (limit {limit})"
            )));
        }
        if let Some(p) = prev {
            if *idx <= p {
                return Err(Error::NonCanonical(
                    "entry indices must be strictly increasing".into(),
                ));
            }
        }
        if v.is_zero() {
            return Err(Error::NonCanonical("zero entries must not be stored".into()));
        }
        rational_components(&v.re)?;
        rational_components(&v.im)?;
        prev = Some(*idx);
    }
    Ok(())
}

fn write_rational(w: &mut BitWriter, r: &BigRational) -> Result<()> {
    let (numer, denom) = rational_components(r)?;
    w.push_int(numer)?;
    w.push_nat(denom - 1)
}

fn write_gaussian(w: &mut BitWriter, g: &GaussianRational) -> Result<()> {
    write_rational(w, &g.re)?;
    write_rational(w, &g.im)
}

/// Tagged encoding of an object; the union of all classes stays prefix-free.
pub fn encode_object(x: &EncodableObject) -> Result<Code> {
    x.check_canonical()?;
    let mut w = BitWriter::new();
    x.write_tagged(&mut w)?;
    Ok(w.finish())
}

/// Decodes a tagged object, requiring full consumption of the code.
pub fn decode_object(code: &Code) -> Result<EncodableObject> {
    let mut r = BitReader::new(code.bits());
    let obj = read_tagged(&mut r)?;
    if !r.fully_consumed() {
        return Err(Error::Decode(format!(
            "{} trailing bits after object",
            code.len() - r.consumed()
        )));
    }
    obj.check_canonical()?;
    Ok(obj)
}

fn read_tagged(r: &mut BitReader) -> Result<EncodableObject> {
    let t1 = r.read_bit()?;
    let t0 = r.read_bit()?;
    match (t1, t0) {
        (false, false) => {
            let s1 = r.read_bit()?;
            let s0 = r.read_bit()?;
            match (s1, s0) {
                (false, false) => Ok(EncodableObject::Nat(r.read_nat()?)),
                (false, true) => Ok(EncodableObject::Int(r.read_int()?)),
                (true, false) => Ok(EncodableObject::Rational(read_rational(r)?)),
                (true, true) => Ok(EncodableObject::Gaussian(read_gaussian(r)?)),
            }
        }
        (false, true) => read_sparse(r, false),
        (true, false) => read_sparse(r, true),
        (true, true) => {
            let a = read_tagged(r)?;
            let b = read_tagged(r)?;
            Ok(EncodableObject::pair(a, b))
        }
    }
}

fn read_sparse(r: &mut BitReader, matrix: bool) -> Result<EncodableObject> {
    let qubits_raw = r.read_nat()?;
    let qubits = u32::try_from(qubits_raw)
        .map_err(|_| Error::Decode("qubit count too large".into()))?;
    check_qubits(qubits)?;
    let count = r.read_nat()?;
    if count > 1 << 22 {
        return Err(Error::Decode("entry count too large".into()));
    }
    let mut entries = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let idx = r.read_nat()?;
        let v = read_gaussian(r)?;
        entries.push((idx, v));
    }
    Ok(if matrix {
        EncodableObject::Matrix { qubits, entries }
    } else {
        EncodableObject::StateVector { qubits, entries }
    })
}

fn read_rational(r: &mut BitReader) -> Result<BigRational> {
    let numer = r.read_int()?;
    let denom = r.read_nat()? + 1;
    let value = BigRational::new(BigInt::from(numer), BigInt::from(denom));
    // The wire form must already be reduced: re-encoding must reproduce it.
    if value.numer().to_i64() != Some(numer) || value.denom().to_u64() != Some(denom) {
        return Err(Error::NonCanonical(format!(
            "rational {numer}/{denom} is not reduced"
        )));
    }
    if numer == 0 && denom != 1 {
        return Err(Error::NonCanonical("zero must be encoded as 0/1".into()));
    }
    Ok(value)
}

fn read_gaussian(r: &mut BitReader) -> Result<GaussianRational> {
    let re = read_rational(r)?;
    let im = read_rational(r)?;
    Ok(GaussianRational::new(re, im))
}

/// Decodes a state-vector payload (class known from context), requiring
/// full consumption and canonicity. This is the decoder the exhaustive
/// enumeration oracle scans with.
pub fn decode_state_payload(code: &Code) -> Result<EncodableObject> {
    let mut r = BitReader::new(code.bits());
    let obj = read_sparse(&mut r, false)?;
    if !r.fully_consumed() {
        return Err(Error::Decode("trailing bits after state payload".into()));
    }
    obj.check_canonical()?;
    Ok(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn g(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> GaussianRational {
        GaussianRational::new(ratio(re_n, re_d), ratio(im_n, im_d))
    }

    #[test]
    fn nat_payload_lengths() {
        assert_eq!(len_nat(0), 1);
        assert_eq!(len_nat(3), 5);
        assert_eq!(len_nat(10), 7);
    }

    #[test]
    fn rational_one_over_one_payload() {
        let r = EncodableObject::rational_from_parts(1, 1).unwrap();
        assert_eq!(r.payload_len().unwrap(), len_int(1) + len_nat(0));
    }

    #[test]
    fn pair_adds_one_node_tag_to_tagged_lengths() {
        let a = EncodableObject::Nat(5);
        let b = EncodableObject::Int(-3);
        let p = EncodableObject::pair(a.clone(), b.clone());
        assert_eq!(
            p.payload_len().unwrap(),
            a.tagged_len().unwrap() + b.tagged_len().unwrap()
        );
        assert_eq!(
            p.tagged_len().unwrap(),
            a.tagged_len().unwrap() + b.tagged_len().unwrap() + OBJECT_TAG_BITS
        );
    }

    #[test]
    fn basis_state_code_grows_logarithmically_in_qubits() {
        // Description length of |0...0> depends on the qubit count only
        // through one gamma code.
        let len_at = |q: u32| {
            len_state_payload(q, &[(0, GaussianRational::one())]).unwrap()
        };
        assert_eq!(len_at(1), 3 + 3 + 1 + 6);
        for q in [2u32, 4, 8, 16, 32] {
            assert_eq!(len_at(q) - len_at(1), len_nat(q as u64) - len_nat(1));
        }
    }

    #[test]
    fn tagged_round_trip() {
        let objects = vec![
            EncodableObject::Nat(0),
            EncodableObject::Nat(41),
            EncodableObject::Int(-7),
            EncodableObject::rational_from_parts(-3, 7).unwrap(),
            EncodableObject::Gaussian(g(3, 5, 4, 5)),
            EncodableObject::StateVector {
                qubits: 2,
                entries: vec![(0, g(3, 5, 0, 1)), (3, g(0, 1, 4, 5))],
            },
            EncodableObject::Matrix {
                qubits: 1,
                entries: vec![(0, g(1, 2, 0, 1)), (3, g(1, 2, 0, 1))],
            },
            EncodableObject::pair(
                EncodableObject::Nat(2),
                EncodableObject::pair(EncodableObject::Int(-1), EncodableObject::Nat(9)),
            ),
        ];
        for obj in objects {
            let code = encode_object(&obj).unwrap();
            assert_eq!(code.len(), obj.tagged_len().unwrap());
            let back = decode_object(&code).unwrap();
            assert_eq!(back, obj);
        }
    }

    #[test]
    fn non_canonical_sparse_rejected() {
        let unsorted = EncodableObject::StateVector {
            qubits: 2,
            entries: vec![(3, g(1, 1, 0, 1)), (0, g(1, 1, 0, 1))],
        };
        assert!(encode_object(&unsorted).is_err());
        let zero_entry = EncodableObject::StateVector {
            qubits: 1,
            entries: vec![(0, g(0, 1, 0, 1))],
        };
        assert!(encode_object(&zero_entry).is_err());
        let out_of_range = EncodableObject::StateVector {
            qubits: 1,
            entries: vec![(2, g(1, 1, 0, 1))],
        };
        assert!(encode_object(&out_of_range).is_err());
    }

    #[test]
    fn decode_rejects_unreduced_rational() {
        // Payload for 2/4: int 2, nat 3. Build it by hand.
        let mut w = BitWriter::new();
        w.push_int(2).unwrap();
        w.push_nat(3).unwrap();
        let code = w.finish();
        let mut r = BitReader::new(code.bits());
        assert!(read_rational(&mut r).is_err());
    }

    #[test]
    fn payload_lengths_match_encoded_codes() {
        let objects = vec![
            EncodableObject::Nat(12),
            EncodableObject::Gaussian(g(-1, 2, 1, 3)),
            EncodableObject::StateVector {
                qubits: 3,
                entries: vec![(5, g(1, 1, 0, 1))],
            },
        ];
        for obj in objects {
            assert_eq!(obj.encode_payload().unwrap().len(), obj.payload_len().unwrap());
        }
    }
}
