//! Acceptance criteria. Each test prints one `AC<n> PASS|FAIL` line; run
//! with `cargo test -p semistego --test acceptance -- --nocapture` to see
//! them.

use std::time::{Duration, Instant};

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semistego::closed_forms::{
    davison_check, geometric_frobenius, progression_frobenius, sigma, sylvester, wilf_check, GeometricSpec,
    ProgressionSpec,
};
use semistego::codec::{
    build_gap_index, decode_message, desalt_stream, encode_message, measure_salt_gap_preservation, salt_stream,
    verify_stream, CipherStream, SaltSpec, Verdict, DEFAULT_K_MAX,
};
use semistego::keygen::{generate_key, KeygenMode, KeygenParams};
use semistego::selftest::random_generating_set;
use semistego::semigroup::{brute_force_sieve, GeneratingSet, SemigroupTable};
use semistego::stats::{chi_square_uniformity, class_count_ratio, gap_density, residue_histogram};

fn report(id: &str, ok: bool, detail: String) {
    println!("{id} {}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} failed: {detail}");
}

fn table_of(elements: &[u64]) -> SemigroupTable {
    SemigroupTable::build(&GeneratingSet::from_unsigned(elements).unwrap()).unwrap()
}

fn suite1_sets() -> Vec<GeneratingSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac01);
    (0..500).map(|_| random_generating_set(&mut rng, 500)).collect()
}

fn coprime_pairs() -> impl Iterator<Item = (u64, u64)> {
    (2..=200u64).flat_map(|a| (a + 1..=200).map(move |b| (a, b))).filter(|&(a, b)| a.gcd(&b) == 1)
}

fn progression_specs() -> Vec<ProgressionSpec> {
    let mut out = Vec::new();
    for a in 2..=100u64 {
        for d in 1..=10u64 {
            if a.gcd(&d) != 1 {
                continue;
            }
            for w in 1..a {
                out.push(ProgressionSpec::new(a, d, w).unwrap());
            }
        }
    }
    out
}

fn geometric_specs() -> Vec<GeometricSpec> {
    let mut out = Vec::new();
    for a in 2..=7u64 {
        for b in a + 1..=7 {
            if a.gcd(&b) != 1 {
                continue;
            }
            for k in 1..=4u32 {
                let spec = GeometricSpec::new(a, b, k).unwrap();
                if spec.terms().is_ok() {
                    out.push(spec);
                }
            }
        }
    }
    out
}

fn telescopic_keys() -> Vec<GeneratingSet> {
    (0..200u64)
        .map(|seed| {
            generate_key(&KeygenParams {
                seed,
                ..KeygenParams::default()
            })
            .unwrap()
        })
        .collect()
}

/// Every semigroup built by criteria 1 to 6.
fn all_tested_tables() -> Vec<SemigroupTable> {
    let mut tables: Vec<SemigroupTable> = suite1_sets().iter().map(|g| SemigroupTable::build(g).unwrap()).collect();
    tables.extend(coprime_pairs().map(|(a, b)| table_of(&[a, b])));
    tables.extend(progression_specs().iter().map(|s| table_of(&s.terms().unwrap())));
    tables.extend(geometric_specs().iter().map(|s| table_of(&s.terms().unwrap())));
    tables.extend(telescopic_keys().iter().map(|k| SemigroupTable::build(k).unwrap()));
    tables
}

fn within(id: &str, elapsed: Duration, limit_secs: u64) {
    let ok = elapsed < Duration::from_secs(limit_secs);
    report(&format!("{id}-runtime"), ok, format!("{elapsed:.2?} (limit {limit_secs} s)"));
}

#[test]
fn ac01_oracle_equivalence() {
    let start = Instant::now();
    let mut checked = 0u64;
    let mut mismatch = None;
    for gens in suite1_sets() {
        let table = SemigroupTable::build(&gens).unwrap();
        let m = table.multiplicity();
        let sieve = brute_force_sieve(&gens, table.frobenius() + 3 * m);
        for x in 0..=table.frobenius() + 2 * m {
            checked += 1;
            if table.is_member(x as i64).unwrap() != sieve.contains(x).unwrap() {
                mismatch.get_or_insert((gens.clone(), x));
            }
        }
        // conductor: everything above F is a member
        if !(table.frobenius() + 1..=table.frobenius() + 3 * m).all(|x| table.contains(x)) {
            mismatch.get_or_insert((gens.clone(), table.frobenius()));
        }
        if table.apery_set().len() as u64 != m {
            mismatch.get_or_insert((gens.clone(), 0));
        }
    }
    report(
        "AC1",
        mismatch.is_none(),
        format!("500 random sets, {checked} points compared, first mismatch {mismatch:?}"),
    );
    within("AC1", start.elapsed(), 30);
}

#[test]
fn ac02_sylvester_cross_check() {
    let start = Instant::now();
    let mut pairs = 0;
    let bad: Vec<(u64, u64)> = coprime_pairs()
        .inspect(|_| pairs += 1)
        .filter(|&(a, b)| sylvester(a, b) != Ok(table_of(&[a, b]).frobenius()))
        .collect();
    report("AC2", bad.is_empty(), format!("{pairs} coprime pairs, mismatches {bad:?}"));
    within("AC2", start.elapsed(), 30);
}

#[test]
fn ac03_progression_cross_check() {
    let start = Instant::now();
    let specs = progression_specs();
    let bad: Vec<&ProgressionSpec> = specs
        .iter()
        .filter(|s| progression_frobenius(s) != Ok(table_of(&s.terms().unwrap()).frobenius()))
        .collect();
    report("AC3", bad.is_empty(), format!("{} progressions, mismatches {bad:?}", specs.len()));
    within("AC3", start.elapsed(), 60);
}

#[test]
fn ac04_geometric_cross_check() {
    let specs = geometric_specs();
    let bad: Vec<&GeometricSpec> = specs
        .iter()
        .filter(|s| geometric_frobenius(s) != Ok(table_of(&s.terms().unwrap()).frobenius()))
        .collect();
    report("AC4", bad.is_empty(), format!("{} geometric sets, mismatches {bad:?}", specs.len()));

    // the closed shortcut ab(a + b − 1) for k = 2 against the σ-form and the oracle
    let sigma_form = sigma(2, 3, 3).unwrap() - sigma(2, 3, 2).unwrap() - (8 + 27);
    let shortcut = 2 * 3 * (2 + 3 - 1);
    let sieve = brute_force_sieve(&GeneratingSet::new(&[4, 6, 9]).unwrap(), 40);
    let oracle = (0..=40u64).filter(|&x| sieve.contains(x) == Some(false)).max().unwrap();
    let ok = sigma_form == 11 && oracle == 11 && shortcut == 24;
    report(
        "AC4-erratum",
        ok,
        format!("(2,3,2): sigma-form {sigma_form}, brute force {oracle}, shortcut ab(a+b-1) {shortcut}"),
    );
}

#[test]
fn ac05_symmetry_identity() {
    let tables = all_tested_tables();
    let mut symmetric = 0;
    let bad: Vec<String> = tables
        .iter()
        .filter(|t| {
            let by_pairing = t.is_symmetric();
            symmetric += by_pairing as usize;
            let by_genus = 2 * t.genus() == t.frobenius() + 1;
            let by_density = gap_density(t) == Ratio::new(1, 2);
            !(by_pairing == by_genus && by_genus == by_density)
        })
        .map(|t| t.generators().to_string())
        .collect();
    report(
        "AC5",
        bad.is_empty(),
        format!("{} tables ({symmetric} symmetric), disagreements {bad:?}", tables.len()),
    );
}

#[test]
fn ac06_telescopic_implies_symmetric() {
    let keys = telescopic_keys();
    let bad: Vec<String> = keys
        .iter()
        .filter(|k| !(k.is_telescopic() && SemigroupTable::build(k).unwrap().is_symmetric()))
        .map(|k| k.to_string())
        .collect();
    report("AC6", bad.is_empty(), format!("{} telescopic keys, failures {bad:?}", keys.len()));
}

struct CodecRun {
    table: SemigroupTable,
    payload: Vec<u8>,
    stream: CipherStream,
    salted: CipherStream,
}

fn codec_runs() -> Vec<CodecRun> {
    let mut runs = Vec::new();
    for key_seed in 0..20u64 {
        let mode = if key_seed % 2 == 0 {
            KeygenMode::Telescopic
        } else {
            KeygenMode::AppendixC
        };
        let key = generate_key(&KeygenParams {
            mode,
            seed: key_seed,
            ..KeygenParams::default()
        })
        .unwrap();
        let table = SemigroupTable::build(&key).unwrap();
        let index = build_gap_index(&table, 16).unwrap();
        let salt = SaltSpec::widest(&key, DEFAULT_K_MAX).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xac07 + key_seed);
        for _ in 0..50 {
            let len = rng.random_range(0..=4096);
            let payload: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let stream = encode_message(&payload, &index, &mut rng).unwrap();
            let salted = salt_stream(&stream, &salt, &mut rng).unwrap();
            runs.push(CodecRun {
                table: table.clone(),
                payload,
                stream,
                salted,
            });
        }
    }
    runs
}

#[test]
fn ac07_ac08_codec() {
    let start = Instant::now();
    let runs = codec_runs();
    let plain_bad = runs
        .iter()
        .filter(|r| decode_message(&r.stream).as_deref() != Ok(&r.payload[..]))
        .count();
    let salted_bad = runs
        .iter()
        .filter(|r| decode_message(&r.salted).as_deref() != Ok(&r.payload[..]))
        .count();
    report(
        "AC7",
        plain_bad == 0 && salted_bad == 0 && runs.len() == 1000,
        format!("{} payloads over 20 keys, failures unsalted {plain_bad}, salted {salted_bad}", runs.len()),
    );
    within("AC7", start.elapsed(), 60);

    let mut values = 0usize;
    let stealth_bad = runs
        .iter()
        .filter(|r| {
            values += r.stream.len();
            let verdicts = verify_stream(&r.stream, &r.table).unwrap();
            let nibbles = r.payload.iter().flat_map(|b| [u64::from(b >> 4), u64::from(b & 15)]);
            !(verdicts.iter().all(|&v| v == Verdict::Gap)
                && r.stream.values.iter().zip(nibbles).all(|(&x, v)| x % 16 == v && x <= r.table.frobenius()))
        })
        .count();
    report(
        "AC8",
        stealth_bad == 0,
        format!("{values} emitted values, streams with a non-gap or wrong residue: {stealth_bad}"),
    );
}

#[test]
fn ac09_chi_square() {
    let mut accepted = 0;
    for run in 0..100u64 {
        let key = generate_key(&KeygenParams {
            seed: run,
            ..KeygenParams::default()
        })
        .unwrap();
        let index = build_gap_index(&SemigroupTable::build(&key).unwrap(), 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(run);
        let payload: Vec<u8> = (0..800).map(|_| rng.random()).collect();
        let stream = encode_message(&payload, &index, &mut rng).unwrap();
        let chi = chi_square_uniformity(&stream.values, 16).unwrap();
        accepted += !chi.reject as usize;
    }
    report("AC9", accepted >= 95, format!("{accepted}/100 runs fail to reject uniformity (need >= 95)"));

    let chi = chi_square_uniformity(&[7u64; 80], 16).unwrap();
    report(
        "AC9-synthetic",
        chi.statistic == 1200.0 && chi.reject,
        format!("all-one-class stream: statistic {}, reject {}", chi.statistic, chi.reject),
    );
}

#[test]
fn ac10_class_uniformity() {
    let mut ratios = Vec::new();
    let mut seed = 0u64;
    while ratios.len() < 100 {
        let key = generate_key(&KeygenParams {
            seed,
            ..KeygenParams::default()
        })
        .unwrap();
        seed += 1;
        let table = SemigroupTable::build(&key).unwrap();
        if table.frobenius() < 10_000 {
            continue;
        }
        ratios.push(class_count_ratio(&residue_histogram(&table, 16)).unwrap_or(f64::INFINITY));
    }
    let within_bar = ratios.iter().filter(|&&r| r <= 1.5).count();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    report(
        "AC10",
        within_bar >= 90,
        format!("{within_bar}/100 keys with max/min class count <= 1.5 (need >= 90), worst {worst:.3}"),
    );
}

#[test]
fn ac11_bound_checks() {
    let tables = all_tested_tables();
    let mut davison_cases = 0;
    let mut violations = Vec::new();
    for t in &tables {
        let minimal = t.minimal_generators();
        let wilf = wilf_check(minimal.len() as u64, t.frobenius(), t.genus());
        if !wilf.holds {
            violations.push(format!("wilf {wilf} for {}", t.generators()));
        }
        if let [a1, a2, a3] = *minimal.elements() {
            davison_cases += 1;
            match davison_check(a1, a2, a3, t.frobenius()) {
                Ok(r) if r.holds => {}
                other => violations.push(format!("davison {other:?} for {minimal}")),
            }
        }
    }
    report(
        "AC11",
        violations.is_empty(),
        format!(
            "wilf on {} semigroups, davison on {davison_cases} three-generator ones, violations {violations:?}",
            tables.len()
        ),
    );
}

#[test]
fn ac12_salting() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac12);
    let mut fractions = Vec::new();

    let small = table_of(&[5, 7]);
    let spec = SaltSpec::new(small.generators(), 0, 1, DEFAULT_K_MAX).unwrap();
    fractions.push(("<5, 7>".to_string(), measure_salt_gap_preservation(&small, &spec, 10_000, &mut rng)));

    // the narrowest pair gives a period below F, where gaps can survive salting
    for seed in 0..5u64 {
        let key = generate_key(&KeygenParams {
            seed,
            ..KeygenParams::default()
        })
        .unwrap();
        let table = SemigroupTable::build(&key).unwrap();
        let e = key.elements();
        let (i, j) = (0..e.len())
            .flat_map(|i| (i + 1..e.len()).map(move |j| (i, j)))
            .min_by_key(|&(i, j)| e[i].lcm(&e[j]))
            .unwrap();
        let spec = SaltSpec::new(&key, i, j, 4).unwrap();
        let f = measure_salt_gap_preservation(&table, &spec, 10_000, &mut rng);
        fractions.push((format!("{key} L={}", spec.period), f));
    }
    let below_one = fractions.iter().any(|(_, f)| *f < 1.0);
    report("AC12-audit", below_one, format!("gap-preservation fractions {fractions:?}"));

    let mut round_trips = 0;
    let mut broken = 0;
    for _ in 0..1000 {
        let period = rng.random_range(2..=1_000_000u64);
        let len = rng.random_range(0..=64);
        let stream = CipherStream::unsalted((0..len).map(|_| rng.random_range(0..period)).collect());
        let spec = SaltSpec {
            i: 0,
            j: 1,
            period,
            k_max: rng.random_range(1..=DEFAULT_K_MAX),
        };
        let salted = salt_stream(&stream, &spec, &mut rng).unwrap();
        round_trips += 1;
        broken += (desalt_stream(&salted).unwrap() != stream) as usize;
    }
    for run in codec_runs().iter().step_by(10) {
        round_trips += 1;
        broken += (desalt_stream(&run.salted).unwrap() != run.stream) as usize;
    }
    report(
        "AC12-reversibility",
        broken == 0,
        format!("{round_trips} salt/de-salt round trips, {broken} broken"),
    );
}
