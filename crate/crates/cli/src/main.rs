use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semistego::closed_forms::{davison_check, wilf_check};
use semistego::codec::{build_gap_index, decode_byte, encode_byte, salt_value, DEFAULT_K_MAX};
use semistego::formats::{parse_stream, StreamReader, StreamWriter};
use semistego::keygen::{generate_key, KeygenMode, KeygenParams};
use semistego::selftest::run_selftest;
use semistego::stats::{analyze, gap_density, residue_histogram, WindowConfig};
use semistego::{KeyFile, SaltSpec, SemigroupTable};

const APERY_PREVIEW: usize = 64;
const DEFAULT_SELFTEST_SEED: u64 = 0;

#[derive(Parser)]
#[command(name = "semistego", version, about = "Hide bytes among the gaps of a numerical semigroup")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key file.
    Keygen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..=16))]
        n_elements: u64,
        #[arg(long, default_value = "telescopic")]
        mode: KeygenMode,
        /// Drawn from OS entropy when omitted; always recorded in the key.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 16)]
        modulus: u64,
        #[arg(long)]
        base_min: Option<u64>,
        #[arg(long)]
        base_max: Option<u64>,
        #[arg(long)]
        spread_max: Option<u64>,
    },
    /// Print the invariants of a key.
    Inspect {
        #[arg(long)]
        key: PathBuf,
        /// Also print gap counts per residue class.
        #[arg(long)]
        modulus: Option<u64>,
    },
    /// Encode raw bytes as a stream of integers.
    Encode {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        salt: bool,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u64,
    },
    /// Decode a stream of integers back to bytes.
    Decode {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail if any de-salted value is a member of the semigroup.
        #[arg(long)]
        verify: bool,
    },
    /// Run the statistical checks on a stream.
    Analyze {
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        modulus: u64,
        /// Seeds the window sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in property suites at reduced scale.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SELFTEST_SEED)]
        seed: u64,
    },
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(e: impl Display) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("semistego: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Keygen {
            out,
            n_elements,
            mode,
            seed,
            modulus,
            base_min,
            base_max,
            spread_max,
        } => {
            let defaults = KeygenParams::default();
            let params = KeygenParams {
                n_elements: n_elements as usize,
                base_min: base_min.unwrap_or(defaults.base_min),
                base_max: base_max.unwrap_or(defaults.base_max),
                spread_max: spread_max.unwrap_or(defaults.spread_max),
                mode,
                seed: seed.unwrap_or_else(|| rand::rng().random()),
                modulus,
            };
            keygen(&out, &params)
        }
        Command::Inspect { key, modulus } => inspect(&key, modulus),
        Command::Encode {
            key,
            input,
            out,
            seed,
            salt,
            k_max,
        } => {
            let seed = seed.unwrap_or_else(|| rand::rng().random());
            encode(&key, input.as_deref(), out.as_deref(), seed, salt.then_some(k_max))
        }
        Command::Decode {
            key,
            input,
            out,
            verify,
        } => decode(&key, input.as_deref(), out.as_deref(), verify),
        Command::Analyze {
            key,
            input,
            modulus,
            seed,
        } => analyze_stream(key.as_deref(), input.as_deref(), modulus, seed),
        Command::Selftest { seed } => {
            let report = run_selftest(seed);
            print!("{}", report.render());
            if report.passed() {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    message: String::new(),
                })
            }
        }
    }
}

fn read_key(path: &Path) -> Result<(KeyFile, SemigroupTable), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let key = KeyFile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let table = SemigroupTable::build(&key.generators).map_err(Failure::input)?;
    Ok((key, table))
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(
            File::open(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdin().lock()),
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn keygen(out: &Path, params: &KeygenParams) -> Outcome {
    let gens = generate_key(params).map_err(Failure::input)?;
    let table = SemigroupTable::build(&gens).map_err(Failure::input)?;
    let salt = SaltSpec::widest(&gens, DEFAULT_K_MAX).map_err(Failure::input)?;
    let mut key = KeyFile::new(gens, params.mode, params.seed);
    key.salt_pair = Some((salt.i, salt.j));
    fs::write(out, key.serialize()).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    println!(
        "generators {} frobenius {} genus {} symmetric {} telescopic {} seed {}",
        key.generators,
        table.frobenius(),
        table.genus(),
        table.is_symmetric(),
        key.generators.is_telescopic(),
        params.seed
    );
    Ok(())
}

fn inspect(path: &Path, modulus: Option<u64>) -> Outcome {
    let (key, table) = read_key(path)?;
    let minimal = table.minimal_generators();
    let apery = table.apery_set();
    let mut apery_text = join(apery.iter().take(APERY_PREVIEW));
    if apery.len() > APERY_PREVIEW {
        apery_text.push_str(&format!(" ... ({} more)", apery.len() - APERY_PREVIEW));
    }

    println!("generators: {}", key.generators);
    println!("mode: {}", key.mode);
    println!("multiplicity: {}", table.multiplicity());
    println!("frobenius: {}", table.frobenius());
    println!("genus: {}", table.genus());
    println!("gap_density: {}", gap_density(&table));
    println!("symmetric: {}", table.is_symmetric());
    println!("telescopic: {}", key.generators.is_telescopic());
    println!("minimal_generators: {minimal}");
    println!("apery: {apery_text}");
    println!("wilf: {}", wilf_check(minimal.len() as u64, table.frobenius(), table.genus()));
    if let [a1, a2, a3] = *minimal.elements() {
        let davison = davison_check(a1, a2, a3, table.frobenius()).map_err(Failure::input)?;
        println!("davison: {davison}");
    }
    if let Some(m) = modulus {
        if m == 0 {
            return Err(Failure::input("modulus must be positive"));
        }
        let counts = residue_histogram(&table, m);
        println!("class_counts: {}", join(&counts));
        println!("viable: {}", counts.iter().all(|&c| c > 0));
    }
    Ok(())
}

fn encode(key: &Path, input: Option<&Path>, output: Option<&Path>, seed: u64, salt: Option<u64>) -> Outcome {
    let (key, table) = read_key(key)?;
    let index = build_gap_index(&table, 16).map_err(Failure::input)?;
    let salt = match salt {
        Some(k_max) => {
            let (i, j) = key.salt_pair.unwrap_or((0, 1));
            let spec = SaltSpec::new(&key.generators, i, j, k_max).map_err(Failure::input)?;
            // every emitted value is a gap, so F < L is enough for all of them
            if table.frobenius() >= spec.period {
                return Err(Failure::input(semistego::CodecError::ValueExceedsPeriod {
                    value: table.frobenius(),
                    period: spec.period,
                }));
            }
            Some(spec)
        }
        None => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = open_input(input)?;
    let mut writer = StreamWriter::new(open_output(output)?, salt.map(|s| s.period)).map_err(Failure::input)?;
    for byte in source.bytes() {
        let byte = byte.map_err(Failure::input)?;
        for x in encode_byte(byte, &index, &mut rng).map_err(Failure::input)? {
            let value = match salt {
                Some(s) => salt_value(x, rng.random_range(1..=s.k_max), s.period).map_err(Failure::input)?,
                None => x,
            };
            writer.push(value).map_err(Failure::input)?;
        }
    }
    writer.finish().map_err(Failure::input)?;
    Ok(())
}

fn decode(key: &Path, input: Option<&Path>, output: Option<&Path>, verify: bool) -> Outcome {
    let (_, table) = read_key(key)?;
    let reader = StreamReader::new(open_input(input)?).map_err(Failure::input)?;
    let period = reader.salt_period();
    let mut out = open_output(output)?;
    let mut pending = None;
    let mut count = 0usize;
    let mut offending = Vec::new();
    for value in reader {
        let value = value.map_err(Failure::input)?;
        let plain = period.map_or(value, |l| value % l);
        if verify && table.contains(plain) {
            offending.push(count);
        }
        count += 1;
        match pending.take() {
            None => pending = Some(plain),
            Some(high) => out.write_all(&[decode_byte(high, plain)]).map_err(Failure::input)?,
        }
    }
    out.flush().map_err(Failure::input)?;
    if pending.is_some() {
        return Err(Failure::input(semistego::CodecError::OddLength(count)));
    }
    if !offending.is_empty() {
        return Err(Failure {
            code: 3,
            message: format!(
                "verification failed: {} value(s) are members of the semigroup, at positions {}",
                offending.len(),
                join(&offending)
            ),
        });
    }
    Ok(())
}

fn analyze_stream(key: Option<&Path>, input: Option<&Path>, modulus: u64, seed: u64) -> Outcome {
    let table = key.map(read_key).transpose()?.map(|(_, t)| t);
    let mut text = String::new();
    open_input(input)?.read_to_string(&mut text).map_err(Failure::input)?;
    let stream = parse_stream(&text).map_err(Failure::input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = analyze(
        &stream.values,
        modulus,
        table.as_ref().map(|t| (t, WindowConfig::default())),
        &mut rng,
    )
    .map_err(Failure::input)?;
    print!("{}", report.render());
    Ok(())
}

fn join<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
