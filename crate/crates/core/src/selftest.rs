//! Reduced-scale versions of the property suites, runnable from the CLI.
//!
//! Output depends only on the seed. The [`Harness`] lets tests substitute
//! the membership routine to confirm that a faulty implementation is caught.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_forms::{
    davison_check, geometric_frobenius, progression_frobenius, sylvester, wilf_check, GeometricSpec,
    ProgressionSpec,
};
use crate::codec::{build_gap_index, decode_message, encode_message, salt_stream, SaltSpec, DEFAULT_K_MAX};
use crate::keygen::{generate_key, KeygenParams};
use crate::semigroup::{brute_force_sieve, GeneratingSet, SemigroupTable};
use crate::stats::gap_density;

/// Implementations under test.
#[derive(Clone, Copy)]
pub struct Harness {
    pub membership: fn(&SemigroupTable, u64) -> bool,
}

impl Default for Harness {
    fn default() -> Self {
        Harness {
            membership: |table, x| table.contains(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestReport {
    pub seed: u64,
    pub suites: Vec<SuiteOutcome>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let _ = write!(out, "suite {}: {}/{} passed", s.name, s.cases - s.failures, s.cases);
            if let Some(f) = &s.first_failure {
                let _ = write!(out, " (first failure: {f})");
            }
            out.push('\n');
        }
        if self.passed() {
            let _ = writeln!(out, "selftest: pass (seed {})", self.seed);
        } else {
            let failed: Vec<&str> = self.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect();
            let _ = writeln!(
                out,
                "selftest: FAIL in {} (reproduce with --seed {})",
                failed.join(", "),
                self.seed
            );
        }
        out
    }
}

pub fn run_selftest(seed: u64) -> SelfTestReport {
    run_selftest_with(seed, &Harness::default())
}

pub fn run_selftest_with(seed: u64, harness: &Harness) -> SelfTestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables = Vec::new();

    let mut oracle = SuiteOutcome::new("oracle-equivalence");
    for _ in 0..60 {
        let gens = random_generating_set(&mut rng, 200);
        let table = SemigroupTable::build(&gens).expect("small generators");
        let bound = table.frobenius() + 2 * table.multiplicity();
        let sieve = brute_force_sieve(&gens, bound);
        let mismatch = (0..=bound).find(|&x| (harness.membership)(&table, x) != sieve.contains(x).unwrap_or(false));
        oracle.record(mismatch.is_none(), || format!("{gens} disagrees at {}", mismatch.unwrap_or(0)));
        tables.push(table);
    }

    let mut sylvester_suite = SuiteOutcome::new("sylvester");
    for a in 2..=60u64 {
        for b in a + 1..=60 {
            if a.gcd(&b) != 1 {
                continue;
            }
            let table = table_of(&[a, b]);
            let ok = sylvester(a, b) == Ok(table.frobenius());
            sylvester_suite.record(ok, || format!("({a}, {b})"));
        }
    }

    let mut progression = SuiteOutcome::new("progression");
    for a in 2..=30u64 {
        for d in 1..=5u64 {
            if a.gcd(&d) != 1 {
                continue;
            }
            for w in 1..a {
                let spec = ProgressionSpec::new(a, d, w).expect("valid progression");
                let table = table_of(&spec.terms().expect("small terms"));
                let ok = progression_frobenius(&spec) == Ok(table.frobenius());
                progression.record(ok, || format!("(a={a}, d={d}, w={w})"));
                if w % 7 == 1 {
                    tables.push(table);
                }
            }
        }
    }

    let mut geometric = SuiteOutcome::new("geometric");
    for a in 2..=7u64 {
        for b in a + 1..=7 {
            if a.gcd(&b) != 1 {
                continue;
            }
            for k in 1..=3u32 {
                let spec = GeometricSpec::new(a, b, k).expect("valid geometric spec");
                let table = table_of(&spec.terms().expect("small terms"));
                let ok = geometric_frobenius(&spec) == Ok(table.frobenius());
                geometric.record(ok, || format!("(a={a}, b={b}, k={k})"));
                tables.push(table);
            }
        }
    }

    let mut telescopic = SuiteOutcome::new("telescopic-symmetric");
    let mut keys = Vec::new();
    for i in 0..20u64 {
        let params = KeygenParams {
            seed: seed.wrapping_add(i),
            n_elements: 2 + (i as usize % 4),
            base_min: 60,
            base_max: 240,
            ..KeygenParams::default()
        };
        match generate_key(&params) {
            Ok(key) => {
                let table = SemigroupTable::build(&key).expect("keygen emits buildable keys");
                let ok = key.is_telescopic() && table.is_symmetric();
                telescopic.record(ok, || format!("{key} (keygen seed {})", params.seed));
                keys.push(key);
                tables.push(table);
            }
            Err(e) => telescopic.record(false, || format!("keygen seed {}: {e}", params.seed)),
        }
    }

    let mut symmetry = SuiteOutcome::new("symmetry-identity");
    for table in &tables {
        let by_pairing = table.is_symmetric();
        let by_genus = 2 * table.genus() == table.frobenius() + 1;
        let by_density = gap_density(table) == Ratio::new(1, 2);
        symmetry.record(by_pairing == by_genus && by_genus == by_density, || {
            table.generators().to_string()
        });
    }

    let mut bounds = SuiteOutcome::new("bounds");
    for table in &tables {
        let minimal = table.minimal_generators();
        let wilf = wilf_check(minimal.len() as u64, table.frobenius(), table.genus());
        bounds.record(wilf.holds, || format!("wilf {} for {}", wilf, table.generators()));
        if let [a1, a2, a3] = *minimal.elements() {
            let davison = davison_check(a1, a2, a3, table.frobenius());
            let ok = davison.as_ref().is_ok_and(|r| r.holds);
            bounds.record(ok, || format!("davison {davison:?} for {minimal}"));
        }
    }

    let mut codec = SuiteOutcome::new("codec-roundtrip");
    for key in keys.iter().take(5) {
        let table = SemigroupTable::build(key).expect("keygen emits buildable keys");
        let index = build_gap_index(&table, 16).expect("keygen emits viable keys");
        let salt = SaltSpec::widest(key, DEFAULT_K_MAX).expect("keys have two generators");
        for _ in 0..4 {
            let len = rng.random_range(0..=256);
            let payload: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let stream = encode_message(&payload, &index, &mut rng).expect("viable index");
            let stealthy = stream
                .values
                .iter()
                .zip(payload.iter().flat_map(|b| [b >> 4, b & 15]))
                .all(|(&x, v)| !(harness.membership)(&table, x) && x % 16 == u64::from(v));
            let plain_ok = decode_message(&stream).as_deref() == Ok(&payload[..]);
            codec.record(stealthy && plain_ok, || format!("{key}, payload of {len} bytes"));
            if table.frobenius() < salt.period {
                let salted = salt_stream(&stream, &salt, &mut rng).expect("values below period");
                let salted_ok = decode_message(&salted).as_deref() == Ok(&payload[..]);
                codec.record(salted_ok, || format!("{key}, salted payload of {len} bytes"));
            }
        }
    }

    SelfTestReport {
        seed,
        suites: vec![
            oracle,
            sylvester_suite,
            progression,
            geometric,
            telescopic,
            symmetry,
            bounds,
            codec,
        ],
    }
}

fn table_of(elements: &[u64]) -> SemigroupTable {
    let gens = GeneratingSet::from_unsigned(elements).expect("coprime by construction");
    SemigroupTable::build(&gens).expect("small generators")
}

/// 2 to 6 generators drawn from `[2, max]`, redrawn until coprime.
pub fn random_generating_set<R: Rng + ?Sized>(rng: &mut R, max: u64) -> GeneratingSet {
    loop {
        let n = rng.random_range(2..=6);
        let raw: Vec<u64> = (0..n).map(|_| rng.random_range(2..=max)).collect();
        if let Ok(gens) = GeneratingSet::from_unsigned(&raw) {
            return gens;
        }
    }
}
