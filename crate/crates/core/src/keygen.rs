//! Private key generation.
//!
//! Two modes are provided:
//!
//! * [`KeygenMode::AppendixC`] reproduces the original prototype generator:
//!   a coprime pair `a < b` followed by extension terms `c₁·a + c₂·last` with
//!   `c₁, c₂ ∈ {1, 2, 3}`. Every extension term is already representable by
//!   the existing generators, so the semigroup is always `<a, b>` and
//!   [`minimal_generators`](crate::semigroup::minimal_generators) recovers
//!   exactly that pair.
//! * [`KeygenMode::Telescopic`] builds an increasing telescopic sequence,
//!   which makes the semigroup symmetric. The first generator is split along
//!   a divisor chain `d₁ > d₂ > … > dₙ = 1` and each later generator is
//!   `aᵢ = dᵢ·sᵢ` with `sᵢ` in the semigroup of the scaled prefix and
//!   coprime to `dᵢ₋₁/dᵢ`. Prime factors shared with the encoding modulus
//!   are all removed in the first chain step; keeping them in later
//!   divisors skews the gap counts per residue class. Generators stay within
//!   a factor [`MAX_GENERATOR_RATIO`] of the smallest one.
//!
//! Both modes are deterministic given the seed and only emit keys for which
//! every residue class modulo the requested modulus contains a gap.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::semigroup::{is_telescopic, GeneratingSet, MonoidTable, SemigroupTable, MAX_GENERATOR};

/// Attempts per phase before giving up.
pub const RETRY_BUDGET: usize = 10_000;

/// Bound on `max / min` for telescopic keys.
pub const MAX_GENERATOR_RATIO: u64 = 8;

/// Candidate draws for one telescopic term before the attempt is abandoned.
const TERM_DRAWS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeygenMode {
    AppendixC,
    Telescopic,
}

impl KeygenMode {
    pub fn tag(&self) -> &'static str {
        match self {
            KeygenMode::AppendixC => "appendix-c",
            KeygenMode::Telescopic => "telescopic",
        }
    }
}

impl fmt::Display for KeygenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for KeygenMode {
    type Err = KeygenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "appendix-c" => Ok(KeygenMode::AppendixC),
            "telescopic" => Ok(KeygenMode::Telescopic),
            other => Err(KeygenError::InvalidParams(format!("unknown keygen mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeygenParams {
    pub n_elements: usize,
    pub base_min: u64,
    pub base_max: u64,
    /// Upper bound on `b − a` in appendix-c mode. Telescopic mode ignores it.
    pub spread_max: u64,
    pub mode: KeygenMode,
    pub seed: u64,
    /// Viability is required for this modulus.
    pub modulus: u64,
}

impl Default for KeygenParams {
    fn default() -> Self {
        KeygenParams {
            n_elements: 5,
            base_min: 500,
            base_max: 1000,
            spread_max: 200,
            mode: KeygenMode::Telescopic,
            seed: 0,
            modulus: 16,
        }
    }
}

impl KeygenParams {
    pub fn validate(&self) -> Result<(), KeygenError> {
        if !(2..=16).contains(&self.n_elements) {
            return Err(KeygenError::InvalidParams(format!(
                "n_elements must be in 2..=16, got {}",
                self.n_elements
            )));
        }
        if self.base_min < 2 || self.base_min > self.base_max {
            return Err(KeygenError::InvalidParams(format!(
                "need 2 <= base_min <= base_max, got {}..={}",
                self.base_min, self.base_max
            )));
        }
        if self.base_max > MAX_GENERATOR {
            return Err(KeygenError::InvalidParams(format!("base_max exceeds {MAX_GENERATOR}")));
        }
        if self.spread_max < 1 {
            return Err(KeygenError::InvalidParams("spread_max must be at least 1".into()));
        }
        if self.modulus < 1 {
            return Err(KeygenError::InvalidParams("modulus must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeygenError {
    #[error("invalid keygen parameters: {0}")]
    InvalidParams(String),
    #[error("no viable key after {attempts} attempts{}", describe_class(*.empty_class))]
    ViabilityFailure { attempts: usize, empty_class: Option<u64> },
}

fn describe_class(class: Option<u64>) -> String {
    match class {
        Some(c) => format!(" (last candidate had no gap in residue class {c})"),
        None => " (no candidate could be constructed from the parameter ranges)".into(),
    }
}

/// Gap counts per residue class modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyViability {
    pub modulus: u64,
    pub per_class_gap_count: Vec<u64>,
    pub viable: bool,
}

impl KeyViability {
    pub fn first_empty_class(&self) -> Option<u64> {
        self.per_class_gap_count.iter().position(|&c| c == 0).map(|c| c as u64)
    }
}

/// Panics if `modulus` is zero.
pub fn check_viability(table: &SemigroupTable, modulus: u64) -> KeyViability {
    assert!(modulus > 0, "modulus must be positive");
    let mut counts = vec![0u64; modulus as usize];
    for x in table.gaps() {
        counts[(x % modulus) as usize] += 1;
    }
    KeyViability {
        modulus,
        viable: counts.iter().all(|&c| c >= 1),
        per_class_gap_count: counts,
    }
}

pub fn generate_key(params: &KeygenParams) -> Result<GeneratingSet, KeygenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut empty_class = None;
    for _ in 0..RETRY_BUDGET {
        let candidate = match params.mode {
            KeygenMode::AppendixC => draw_appendix_c(params, &mut rng),
            KeygenMode::Telescopic => draw_telescopic(params, &mut rng),
        };
        let Some(raw) = candidate else { continue };
        let Ok(gens) = GeneratingSet::from_unsigned(&raw) else { continue };
        let Ok(table) = SemigroupTable::build(&gens) else { continue };
        let viability = check_viability(&table, params.modulus);
        if viability.viable {
            return Ok(gens);
        }
        empty_class = viability.first_empty_class();
    }
    Err(KeygenError::ViabilityFailure {
        attempts: RETRY_BUDGET,
        empty_class,
    })
}

fn draw_appendix_c<R: Rng>(params: &KeygenParams, rng: &mut R) -> Option<Vec<u64>> {
    let (a, b) = (0..RETRY_BUDGET).find_map(|_| {
        let a = rng.random_range(params.base_min..=params.base_max);
        let b = a + rng.random_range(1..=params.spread_max);
        (a.gcd(&b) == 1).then_some((a, b))
    })?;
    let mut key = vec![a, b];
    for _ in 0..RETRY_BUDGET {
        if key.len() >= params.n_elements {
            break;
        }
        let last = *key.last().expect("key starts with two elements");
        let next = rng.random_range(1..=3u64) * a + rng.random_range(1..=3u64) * last;
        if next > MAX_GENERATOR {
            return None;
        }
        if !key.contains(&next) {
            key.push(next);
        }
    }
    (key.len() == params.n_elements).then_some(key)
}

fn draw_telescopic<R: Rng>(params: &KeygenParams, rng: &mut R) -> Option<Vec<u64>> {
    let n = params.n_elements;
    let first = rng.random_range(params.base_min..=params.base_max);
    let mut primes = prime_factors(first);
    if primes.len() < n - 1 {
        return None;
    }
    primes.shuffle(rng);
    // Primes shared with the modulus all go into the first chain step, so
    // that d_2 and every later divisor are coprime to the modulus.
    primes.sort_by_key(|&p| !params.modulus.is_multiple_of(p));
    let shared = primes.iter().take_while(|&&p| params.modulus.is_multiple_of(p)).count();

    // Cut the factor list into n - 1 non-empty groups; group i is the ratio
    // d_i / d_{i+1} of consecutive chain divisors.
    let mut cuts: Vec<usize> = (shared.max(1)..primes.len()).collect();
    if cuts.len() < n - 2 {
        return None;
    }
    cuts.shuffle(rng);
    let mut cuts = cuts[..n - 2].to_vec();
    cuts.sort_unstable();
    let mut chain = vec![first];
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(primes.len())) {
        let ratio: u64 = primes[start..end].iter().product();
        let prev = *chain.last().expect("chain starts with the first generator");
        chain.push(prev / ratio);
        start = end;
    }
    debug_assert_eq!(chain.last(), Some(&1));

    let ceiling = first.checked_mul(MAX_GENERATOR_RATIO)?.min(MAX_GENERATOR);
    let mut seq = vec![first];
    for i in 1..n {
        let (prev_d, d) = (chain[i - 1], chain[i]);
        let ratio = prev_d / d;
        let scaled: Vec<u64> = seq.iter().map(|&a| a / prev_d).collect();
        let prefix = MonoidTable::new(&scaled);
        let last = *seq.last().expect("sequence is non-empty");
        // leave room for the remaining terms below the ceiling
        let hi = last + (ceiling.saturating_sub(last)) / (n - i) as u64;
        let (lo_s, hi_s) = (last / d + 1, hi / d);
        if lo_s > hi_s {
            return None;
        }
        let s = (0..TERM_DRAWS).find_map(|_| {
            let s = rng.random_range(lo_s..=hi_s);
            (s.gcd(&ratio) == 1 && prefix.contains(s)).then_some(s)
        })?;
        seq.push(d * s);
    }
    is_telescopic(&seq).then_some(seq)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{build_table, minimal_generators};

    fn table(raw: &[i64]) -> SemigroupTable {
        build_table(&GeneratingSet::new(raw).unwrap()).unwrap()
    }

    #[test]
    fn viability_five_seven() {
        let v = check_viability(&table(&[5, 7]), 16);
        assert_eq!(v.per_class_gap_count[5], 0);
        assert!(!v.viable);
        assert_eq!(v.first_empty_class(), Some(5));

        let v = check_viability(&table(&[5, 7]), 4);
        assert_eq!(v.per_class_gap_count, vec![3, 3, 3, 3]);
        assert!(v.viable);

        let v = check_viability(&table(&[4, 6, 9]), 1);
        assert_eq!(v.per_class_gap_count, vec![6]);
        assert!(v.viable);
    }

    #[test]
    fn deterministic_under_seed() {
        for mode in [KeygenMode::AppendixC, KeygenMode::Telescopic] {
            let params = KeygenParams {
                mode,
                seed: 99,
                ..KeygenParams::default()
            };
            assert_eq!(generate_key(&params).unwrap(), generate_key(&params).unwrap());
        }
    }

    #[test]
    fn appendix_c_shape() {
        let params = KeygenParams {
            mode: KeygenMode::AppendixC,
            seed: 3,
            ..KeygenParams::default()
        };
        let key = generate_key(&params).unwrap();
        assert_eq!(key.len(), 5);
        assert!((500..=1000).contains(&key.smallest()));
        let second = key.elements()[1];
        assert!(second > key.smallest() && second - key.smallest() <= 200);
        let minimal = minimal_generators(&key).unwrap();
        assert_eq!(minimal.elements(), &key.elements()[..2]);
    }

    #[test]
    fn telescopic_small_bounds() {
        let params = KeygenParams {
            n_elements: 3,
            base_min: 4,
            base_max: 40,
            seed: 11,
            modulus: 4,
            ..KeygenParams::default()
        };
        let key = generate_key(&params).unwrap();
        assert_eq!(key.len(), 3);
        assert!(key.is_telescopic());
        assert!(build_table(&key).unwrap().is_symmetric());
        assert!(key.largest() <= MAX_GENERATOR_RATIO * key.smallest());
    }

    #[test]
    fn impossible_ranges_fail() {
        // 2..=3 has no factor chain for 16 generators
        let params = KeygenParams {
            n_elements: 16,
            base_min: 2,
            base_max: 3,
            ..KeygenParams::default()
        };
        let err = generate_key(&params).unwrap_err();
        assert_eq!(
            err,
            KeygenError::ViabilityFailure {
                attempts: RETRY_BUDGET,
                empty_class: None
            }
        );
    }

    #[test]
    fn tiny_semigroup_not_viable() {
        // <2, 3> has a single gap, so mod 16 most classes stay empty
        let params = KeygenParams {
            n_elements: 2,
            base_min: 2,
            base_max: 2,
            spread_max: 1,
            mode: KeygenMode::AppendixC,
            ..KeygenParams::default()
        };
        let err = generate_key(&params).unwrap_err();
        assert!(matches!(err, KeygenError::ViabilityFailure { empty_class: Some(0), .. }));
        assert!(err.to_string().contains("residue class 0"));
    }

    #[test]
    fn param_validation() {
        let bad = KeygenParams {
            n_elements: 1,
            ..KeygenParams::default()
        };
        assert!(matches!(generate_key(&bad), Err(KeygenError::InvalidParams(_))));
        let bad = KeygenParams {
            base_min: 600,
            base_max: 500,
            ..KeygenParams::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("telescopic".parse::<KeygenMode>(), Ok(KeygenMode::Telescopic));
        assert!("other".parse::<KeygenMode>().is_err());
    }

    #[test]
    fn factoring() {
        assert_eq!(prime_factors(504), vec![2, 2, 2, 3, 3, 7]);
        assert_eq!(prime_factors(997), vec![997]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
    }
}
