//! Numerical semigroups generated by a finite set of coprime integers.
//!
//! A [`SemigroupTable`] stores, for every residue class modulo the
//! multiplicity `m`, the smallest element of the semigroup in that class
//! (the Apéry set with respect to `m`). The table is computed as
//! single-source shortest paths on the residue graph over `Z/m` whose edges
//! are `r -> (r + a) mod m` with weight `a` for every generator `a`. Once it
//! exists, membership is a single comparison: `x ∈ S ⇔ x ≥ min_rep[x mod m]`.
//!
//! [`brute_force_sieve`] decides membership by plain dynamic programming and
//! never touches the residue graph. It is the oracle the table is checked
//! against.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

/// Largest multiplicity for which a table is built (one `u64` per class).
pub const MAX_MULTIPLICITY: u64 = 10_000_000;

/// Largest accepted generator, leaving headroom for path sums in `u64`.
pub const MAX_GENERATOR: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("generating set is empty")]
    EmptySet,
    #[error("generator {0} is not positive")]
    NonPositiveElement(i64),
    #[error("generator 1 makes the semigroup all of N")]
    ElementOne,
    #[error("generators have common divisor {0}, expected 1")]
    GcdNotOne(u64),
    #[error("multiplicity {0} exceeds the table limit {MAX_MULTIPLICITY}")]
    MultiplicityTooLarge(u64),
    #[error("generator {0} exceeds the limit {MAX_GENERATOR}")]
    GeneratorTooLarge(u64),
    #[error("membership is undefined for negative integer {0}")]
    NegativeInput(i64),
}

/// A validated generating set: strictly increasing, every element at least
/// 2, overall gcd 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratingSet {
    elements: Vec<u64>,
}

impl GeneratingSet {
    /// Sorts, deduplicates and validates `raw`.
    pub fn new(raw: &[i64]) -> Result<Self, SemigroupError> {
        if raw.is_empty() {
            return Err(SemigroupError::EmptySet);
        }
        if let Some(&bad) = raw.iter().find(|&&x| x <= 0) {
            return Err(SemigroupError::NonPositiveElement(bad));
        }
        let unsigned: Vec<u64> = raw.iter().map(|&x| x as u64).collect();
        Self::from_unsigned(&unsigned)
    }

    /// Same as [`GeneratingSet::new`] for input that is already unsigned.
    pub fn from_unsigned(raw: &[u64]) -> Result<Self, SemigroupError> {
        if raw.is_empty() {
            return Err(SemigroupError::EmptySet);
        }
        if raw.contains(&0) {
            return Err(SemigroupError::NonPositiveElement(0));
        }
        let mut elements = raw.to_vec();
        elements.sort_unstable();
        elements.dedup();
        if elements[0] == 1 {
            return Err(SemigroupError::ElementOne);
        }
        let gcd = elements.iter().fold(0u64, |g, &a| g.gcd(&a));
        if gcd != 1 {
            return Err(SemigroupError::GcdNotOne(gcd));
        }
        Ok(GeneratingSet { elements })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false for a validated set; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The smallest generator, which is also the multiplicity of the semigroup.
    pub fn smallest(&self) -> u64 {
        self.elements[0]
    }

    pub fn largest(&self) -> u64 {
        *self.elements.last().expect("validated set is non-empty")
    }

    /// Telescopic test on the increasing order of the set.
    pub fn is_telescopic(&self) -> bool {
        is_telescopic(&self.elements)
    }
}

impl fmt::Display for GeneratingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, a) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(">")
    }
}

/// Validates a raw generating sequence. See [`GeneratingSet::new`].
pub fn validate_generators(raw: &[i64]) -> Result<GeneratingSet, SemigroupError> {
    GeneratingSet::new(raw)
}

/// Dijkstra over the residue graph modulo `modulus`. Classes that cannot be
/// reached keep the value `u64::MAX`.
///
/// Callers guarantee `modulus ≥ 1` and that path sums fit in `u64`.
fn residue_distances(elements: &[u64], modulus: u64) -> Vec<u64> {
    let m = modulus as usize;
    let mut dist = vec![u64::MAX; m];
    dist[0] = 0;
    // One edge per residue suffices: the cheapest generator in each class.
    let mut edges: Vec<(u64, usize)> = Vec::with_capacity(elements.len());
    for &a in elements {
        let step = (a % modulus) as usize;
        if step == 0 {
            continue;
        }
        match edges.iter_mut().find(|(_, s)| *s == step) {
            Some(edge) => edge.0 = edge.0.min(a),
            None => edges.push((a, step)),
        }
    }

    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0usize)));
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &(weight, step) in &edges {
            let next = d + weight;
            let mut class = r + step;
            if class >= m {
                class -= m;
            }
            if next < dist[class] {
                dist[class] = next;
                heap.push(Reverse((next, class)));
            }
        }
    }
    dist
}

/// Shortest-path table for the submonoid generated by an arbitrary positive
/// sequence, which need not have gcd 1 and may contain 1.
#[derive(Debug, Clone)]
pub(crate) struct MonoidTable {
    modulus: u64,
    dist: Vec<u64>,
}

impl MonoidTable {
    pub(crate) fn new(elements: &[u64]) -> Self {
        let modulus = elements.iter().copied().min().unwrap_or(1).max(1);
        MonoidTable {
            modulus,
            dist: residue_distances(elements, modulus),
        }
    }

    pub(crate) fn contains(&self, x: u64) -> bool {
        let d = self.dist[(x % self.modulus) as usize];
        d != u64::MAX && x >= d
    }
}

fn monoid_contains(elements: &[u64], x: u64) -> bool {
    match elements.iter().min() {
        None => x == 0,
        Some(&m) if x == 0 || m == 1 => true,
        Some(&m) if x < m => false,
        Some(_) => MonoidTable::new(elements).contains(x),
    }
}

/// Apéry data of a numerical semigroup with respect to its multiplicity.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupTable {
    generators: GeneratingSet,
    min_rep: Vec<u64>,
    frobenius: u64,
    genus: u64,
}

impl SemigroupTable {
    pub fn build(gens: &GeneratingSet) -> Result<Self, SemigroupError> {
        let m = gens.smallest();
        if m > MAX_MULTIPLICITY {
            return Err(SemigroupError::MultiplicityTooLarge(m));
        }
        if let Some(&big) = gens.elements().iter().find(|&&a| a > MAX_GENERATOR) {
            return Err(SemigroupError::GeneratorTooLarge(big));
        }
        let min_rep = residue_distances(gens.elements(), m);
        debug_assert!(min_rep.iter().all(|&d| d != u64::MAX), "gcd 1 reaches every class");
        let frobenius = min_rep.iter().copied().max().unwrap_or(0) - m;
        let genus = min_rep.iter().map(|&w| w / m).sum();
        Ok(SemigroupTable {
            generators: gens.clone(),
            min_rep,
            frobenius,
            genus,
        })
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.generators
    }

    pub fn multiplicity(&self) -> u64 {
        self.generators.smallest()
    }

    /// `min_rep[r]` is the smallest element congruent to `r` modulo the
    /// multiplicity.
    pub fn apery_set(&self) -> &[u64] {
        &self.min_rep
    }

    pub fn frobenius(&self) -> u64 {
        self.frobenius
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn conductor(&self) -> u64 {
        self.frobenius + 1
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x >= self.min_rep[(x % self.multiplicity()) as usize]
    }

    pub fn is_member(&self, x: i64) -> Result<bool, SemigroupError> {
        if x < 0 {
            return Err(SemigroupError::NegativeInput(x));
        }
        Ok(self.contains(x as u64))
    }

    /// All gaps in increasing order, enumerated class by class from the
    /// Apéry set.
    pub fn gaps(&self) -> Vec<u64> {
        let m = self.multiplicity();
        let mut out = Vec::with_capacity(self.genus as usize);
        for (r, &w) in self.min_rep.iter().enumerate() {
            out.extend((r as u64..w).step_by(m as usize));
        }
        out.sort_unstable();
        out
    }

    /// Checks `z ∈ S ⇔ F − z ∉ S` for every `z` in `[0, F]` directly.
    pub fn is_symmetric(&self) -> bool {
        let f = self.frobenius;
        (0..=f).all(|z| self.contains(z) != self.contains(f - z))
    }

    /// Generators that are not representable by the remaining ones.
    ///
    /// A generator `a` is redundant exactly when `a - b ∈ S` for some
    /// smaller generator `b`.
    pub fn minimal_generators(&self) -> GeneratingSet {
        let elements = self.generators.elements();
        let kept: Vec<u64> = elements
            .iter()
            .enumerate()
            .filter(|&(i, &a)| !elements[..i].iter().any(|&b| self.contains(a - b)))
            .map(|(_, &a)| a)
            .collect();
        GeneratingSet::from_unsigned(&kept).expect("a generating subset keeps gcd 1")
    }

    pub fn embedding_dimension(&self) -> usize {
        self.minimal_generators().len()
    }
}

pub fn build_table(gens: &GeneratingSet) -> Result<SemigroupTable, SemigroupError> {
    SemigroupTable::build(gens)
}

pub fn minimal_generators(gens: &GeneratingSet) -> Result<GeneratingSet, SemigroupError> {
    Ok(SemigroupTable::build(gens)?.minimal_generators())
}

/// Telescopic test for a sequence in its given order.
///
/// With `d_i = gcd(a_1, …, a_i)`, the sequence is telescopic when for every
/// `i > 1` the quotient `a_i / d_i` lies in the semigroup generated by the
/// scaled prefix `a_1 / d_{i-1}, …, a_{i-1} / d_{i-1}`, and `d_n = 1`.
pub fn is_telescopic(sequence: &[u64]) -> bool {
    if sequence.is_empty() || sequence.contains(&0) {
        return false;
    }
    let mut prefix_gcd = sequence[0];
    for i in 1..sequence.len() {
        let next_gcd = prefix_gcd.gcd(&sequence[i]);
        let scaled: Vec<u64> = sequence[..i].iter().map(|&a| a / prefix_gcd).collect();
        if !monoid_contains(&scaled, sequence[i] / next_gcd) {
            return false;
        }
        prefix_gcd = next_gcd;
    }
    prefix_gcd == 1
}

/// Representability table over `[0, bound]` computed by dynamic programming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipSieve {
    representable: Vec<bool>,
}

impl MembershipSieve {
    pub fn bound(&self) -> u64 {
        self.representable.len() as u64 - 1
    }

    /// `None` when `x` lies beyond the sieved range.
    pub fn contains(&self, x: u64) -> Option<bool> {
        self.representable.get(x as usize).copied()
    }

    pub fn representable(&self) -> &[bool] {
        &self.representable
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.representable
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(x, _)| x as u64)
    }
}

pub fn brute_force_sieve(gens: &GeneratingSet, bound: u64) -> MembershipSieve {
    let len = bound as usize + 1;
    let mut representable = vec![false; len];
    representable[0] = true;
    for x in 1..len {
        representable[x] = gens
            .elements()
            .iter()
            .any(|&a| (a as usize) <= x && representable[x - a as usize]);
    }
    MembershipSieve { representable }
}
