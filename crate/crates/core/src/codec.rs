//! Byte streams hidden in semigroup gaps.
//!
//! Each byte becomes two integers. A nibble `v` is carried by a gap `x`
//! with `x ≡ v (mod 16)`, chosen uniformly among all gaps of that class.
//! Decoding reads only residues modulo 16; whether the received values are
//! gaps is a separate check ([`verify_stream`]) that only the key holder can
//! perform.
//!
//! Salting adds `k·L` with `L = lcm(a_i, a_j)` for a fixed generator pair.
//! The receiver removes it by reducing modulo `L`, which is why the encoder
//! requires every value to be below `L`. Note that adding `k·L` to a gap
//! does not in general keep it a gap (see
//! [`measure_salt_gap_preservation`]); the salted stream is not meant to be
//! verified before de-salting.

use num_integer::Integer;
use rand::Rng;
use thiserror::Error;

use crate::semigroup::{GeneratingSet, SemigroupTable};

/// Residue modulus used for nibble encoding.
pub const NIBBLE_MODULUS: u64 = 16;

/// Default upper bound for the salt multiplier.
pub const DEFAULT_K_MAX: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("no gap in residue class {0}")]
    EmptyClass(u64),
    #[error("value {value} is not below the encoding modulus {modulus}")]
    NibbleOutOfRange { value: u64, modulus: u64 },
    #[error("byte encoding needs modulus {NIBBLE_MODULUS}, got {0}")]
    UnsupportedModulus(u64),
    #[error("stream has odd length {0}")]
    OddLength(usize),
    #[error("value {value} is not below the salt period {period}")]
    ValueExceedsPeriod { value: u64, period: u64 },
    #[error("stream carries no salt period")]
    MissingSaltPeriod,
    #[error("stream is salted; de-salt it first")]
    SaltedStream,
    #[error("invalid salt pair ({i}, {j}) for a key with {len} generators")]
    InvalidSaltPair { i: usize, j: usize, len: usize },
    #[error("salt multiplier bound must be at least 1")]
    InvalidKMax,
    #[error("salted value overflows 64 bits")]
    Overflow,
}

/// Gaps of a semigroup partitioned by residue modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapIndex {
    modulus: u64,
    classes: Vec<Vec<u64>>,
    frobenius: u64,
}

impl GapIndex {
    /// Partitions the gaps without requiring every class to be populated.
    /// Panics if `modulus` is zero.
    pub fn partial(table: &SemigroupTable, modulus: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        let mut classes = vec![Vec::new(); modulus as usize];
        for x in table.gaps() {
            classes[(x % modulus) as usize].push(x);
        }
        GapIndex {
            modulus,
            classes,
            frobenius: table.frobenius(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn frobenius(&self) -> u64 {
        self.frobenius
    }

    pub fn class(&self, residue: u64) -> &[u64] {
        &self.classes[residue as usize]
    }

    pub fn classes(&self) -> &[Vec<u64>] {
        &self.classes
    }
}

/// Builds the index and fails on the first empty class.
pub fn build_gap_index(table: &SemigroupTable, modulus: u64) -> Result<GapIndex, CodecError> {
    let index = GapIndex::partial(table, modulus);
    match index.classes.iter().position(Vec::is_empty) {
        Some(c) => Err(CodecError::EmptyClass(c as u64)),
        None => Ok(index),
    }
}

/// Ordered integers on the wire, two per payload byte.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CipherStream {
    pub values: Vec<u64>,
    pub salt_period: Option<u64>,
}

impl CipherStream {
    pub fn unsalted(values: Vec<u64>) -> Self {
        CipherStream {
            values,
            salt_period: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_salted(&self) -> bool {
        self.salt_period.is_some()
    }
}

pub fn encode_nibble<R: Rng + ?Sized>(v: u64, index: &GapIndex, rng: &mut R) -> Result<u64, CodecError> {
    if v >= index.modulus {
        return Err(CodecError::NibbleOutOfRange {
            value: v,
            modulus: index.modulus,
        });
    }
    let class = &index.classes[v as usize];
    if class.is_empty() {
        return Err(CodecError::EmptyClass(v));
    }
    Ok(class[rng.random_range(0..class.len())])
}

/// Two gaps per byte, high nibble first.
pub fn encode_byte<R: Rng + ?Sized>(byte: u8, index: &GapIndex, rng: &mut R) -> Result<[u64; 2], CodecError> {
    if index.modulus != NIBBLE_MODULUS {
        return Err(CodecError::UnsupportedModulus(index.modulus));
    }
    let high = encode_nibble(u64::from(byte >> 4), index, rng)?;
    let low = encode_nibble(u64::from(byte & 0x0f), index, rng)?;
    Ok([high, low])
}

pub fn encode_message<R: Rng + ?Sized>(
    payload: &[u8],
    index: &GapIndex,
    rng: &mut R,
) -> Result<CipherStream, CodecError> {
    if index.modulus != NIBBLE_MODULUS {
        return Err(CodecError::UnsupportedModulus(index.modulus));
    }
    let mut values = Vec::with_capacity(payload.len() * 2);
    for &byte in payload {
        values.extend(encode_byte(byte, index, rng)?);
    }
    Ok(CipherStream::unsalted(values))
}

pub fn decode_byte(n1: u64, n2: u64) -> u8 {
    (((n1 % NIBBLE_MODULUS) << 4) | (n2 % NIBBLE_MODULUS)) as u8
}

/// Decodes pairs of values, de-salting first when the stream is salted.
pub fn decode_message(stream: &CipherStream) -> Result<Vec<u8>, CodecError> {
    if !stream.values.len().is_multiple_of(2) {
        return Err(CodecError::OddLength(stream.values.len()));
    }
    let plain;
    let values = match stream.salt_period {
        Some(_) => {
            plain = desalt_stream(stream)?;
            &plain.values
        }
        None => &stream.values,
    };
    Ok(values.chunks_exact(2).map(|p| decode_byte(p[0], p[1])).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Gap,
    Member,
}

pub fn verify_stream(stream: &CipherStream, table: &SemigroupTable) -> Result<Vec<Verdict>, CodecError> {
    if stream.is_salted() {
        return Err(CodecError::SaltedStream);
    }
    Ok(stream
        .values
        .iter()
        .map(|&x| if table.contains(x) { Verdict::Member } else { Verdict::Gap })
        .collect())
}

/// Salt parameters: `period = lcm(a_i, a_j)`, multipliers drawn from
/// `1..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaltSpec {
    pub i: usize,
    pub j: usize,
    pub period: u64,
    pub k_max: u64,
}

impl SaltSpec {
    pub fn new(gens: &GeneratingSet, i: usize, j: usize, k_max: u64) -> Result<Self, CodecError> {
        let elements = gens.elements();
        if i == j || i >= elements.len() || j >= elements.len() {
            return Err(CodecError::InvalidSaltPair {
                i,
                j,
                len: elements.len(),
            });
        }
        if k_max < 1 {
            return Err(CodecError::InvalidKMax);
        }
        Ok(SaltSpec {
            i,
            j,
            period: elements[i].lcm(&elements[j]),
            k_max,
        })
    }

    /// The pair with the largest lcm, ties broken by lowest indices. A
    /// single-generator set has no pair.
    pub fn widest(gens: &GeneratingSet, k_max: u64) -> Result<Self, CodecError> {
        let elements = gens.elements();
        let mut best: Option<(usize, usize, u64)> = None;
        for i in 0..elements.len() {
            for j in i + 1..elements.len() {
                let l = elements[i].lcm(&elements[j]);
                if best.is_none_or(|(_, _, b)| l > b) {
                    best = Some((i, j, l));
                }
            }
        }
        let (i, j, _) = best.ok_or(CodecError::InvalidSaltPair {
            i: 0,
            j: 1,
            len: elements.len(),
        })?;
        SaltSpec::new(gens, i, j, k_max)
    }
}

/// `x + k·period`, rejecting values that modular de-salting could not recover.
pub fn salt_value(x: u64, k: u64, period: u64) -> Result<u64, CodecError> {
    if x >= period {
        return Err(CodecError::ValueExceedsPeriod { value: x, period });
    }
    k.checked_mul(period)
        .and_then(|s| s.checked_add(x))
        .ok_or(CodecError::Overflow)
}

pub fn salt_stream<R: Rng + ?Sized>(
    stream: &CipherStream,
    spec: &SaltSpec,
    rng: &mut R,
) -> Result<CipherStream, CodecError> {
    if stream.is_salted() {
        return Err(CodecError::SaltedStream);
    }
    let values = stream
        .values
        .iter()
        .map(|&x| salt_value(x, rng.random_range(1..=spec.k_max), spec.period))
        .collect::<Result<_, _>>()?;
    Ok(CipherStream {
        values,
        salt_period: Some(spec.period),
    })
}

pub fn desalt_stream(stream: &CipherStream) -> Result<CipherStream, CodecError> {
    let period = stream.salt_period.ok_or(CodecError::MissingSaltPeriod)?;
    Ok(CipherStream::unsalted(stream.values.iter().map(|&x| x % period).collect()))
}

/// Fraction of sampled `(gap x, k)` pairs for which `x + k·period` is still a
/// gap. Returns 0 for an empty sample.
pub fn measure_salt_gap_preservation<R: Rng + ?Sized>(
    table: &SemigroupTable,
    spec: &SaltSpec,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let gaps = table.gaps();
    if samples == 0 || gaps.is_empty() {
        return 0.0;
    }
    let preserved = (0..samples)
        .filter(|_| {
            let x = gaps[rng.random_range(0..gaps.len())];
            let k = rng.random_range(1..=spec.k_max);
            !table.contains(x + k * spec.period)
        })
        .count();
    preserved as f64 / samples as f64
}
