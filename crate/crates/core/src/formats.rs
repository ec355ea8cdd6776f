//! Text formats for keys and integer streams.
//!
//! Key file:
//!
//! ```text
//! frobkey/1
//! mode telescopic
//! seed 42
//! salt-pair 0 1      (optional)
//! 4
//! 6
//! 9
//! ```
//!
//! Stream file: an optional first line `salt <L>`, then one decimal integer
//! per line. Both formats end every line with `\n`.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::codec::CipherStream;
use crate::keygen::KeygenMode;
use crate::semigroup::{GeneratingSet, SemigroupError};

pub const KEY_FORMAT_VERSION: u32 = 1;
const KEY_MAGIC: &str = "frobkey/";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unsupported key format version {0}")]
    UnsupportedVersion(String),
    #[error("invalid generating set: {0}")]
    InvalidKey(#[from] SemigroupError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Strict decimal: ASCII digits only, no sign.
fn parse_decimal(token: &str, line: usize) -> Result<u64, FormatError> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("expected a decimal integer, found {token:?}")));
    }
    token
        .parse()
        .map_err(|_| syntax(line, format!("integer {token} exceeds 64 bits")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyFile {
    pub format_version: u32,
    pub generators: GeneratingSet,
    pub mode: KeygenMode,
    pub seed: u64,
    pub salt_pair: Option<(usize, usize)>,
}

impl KeyFile {
    pub fn new(generators: GeneratingSet, mode: KeygenMode, seed: u64) -> Self {
        KeyFile {
            format_version: KEY_FORMAT_VERSION,
            generators,
            mode,
            seed,
            salt_pair: None,
        }
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("{KEY_MAGIC}{}\nmode {}\nseed {}\n", self.format_version, self.mode, self.seed);
        if let Some((i, j)) = self.salt_pair {
            out.push_str(&format!("salt-pair {i} {j}\n"));
        }
        for a in self.generators.elements() {
            out.push_str(&format!("{a}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

        let (_, header) = lines.next().ok_or_else(|| syntax(1, "empty key file"))?;
        let version = header
            .strip_prefix(KEY_MAGIC)
            .ok_or_else(|| syntax(1, format!("expected {KEY_MAGIC}{KEY_FORMAT_VERSION} header")))?;
        if version != KEY_FORMAT_VERSION.to_string() {
            return Err(FormatError::UnsupportedVersion(version.to_string()));
        }

        let (n, line) = lines.next().ok_or_else(|| syntax(2, "missing mode line"))?;
        let mode = line
            .strip_prefix("mode ")
            .ok_or_else(|| syntax(n, "expected `mode <tag>`"))?
            .parse::<KeygenMode>()
            .map_err(|e| syntax(n, e.to_string()))?;

        let (n, line) = lines.next().ok_or_else(|| syntax(3, "missing seed line"))?;
        let seed = parse_decimal(
            line.strip_prefix("seed ").ok_or_else(|| syntax(n, "expected `seed <u64>`"))?,
            n,
        )?;

        let mut salt_pair = None;
        let mut raw = Vec::new();
        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("salt-pair ") {
                if salt_pair.is_some() || !raw.is_empty() || n != 4 {
                    return Err(syntax(n, "salt-pair must be the fourth line"));
                }
                let mut parts = rest.split(' ');
                let (Some(i), Some(j), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(syntax(n, "expected `salt-pair <i> <j>`"));
                };
                salt_pair = Some((parse_decimal(i, n)? as usize, parse_decimal(j, n)? as usize));
                continue;
            }
            raw.push(parse_decimal(line, n)?);
        }
        let generators = GeneratingSet::from_unsigned(&raw)?;
        if let Some((i, j)) = salt_pair {
            if i == j || i >= generators.len() || j >= generators.len() {
                return Err(syntax(4, format!("salt-pair ({i}, {j}) does not name two distinct generators")));
            }
        }
        Ok(KeyFile {
            format_version: KEY_FORMAT_VERSION,
            generators,
            mode,
            seed,
            salt_pair,
        })
    }
}

pub fn serialize_stream(stream: &CipherStream) -> String {
    let mut out = String::new();
    if let Some(l) = stream.salt_period {
        out.push_str(&format!("salt {l}\n"));
    }
    for v in &stream.values {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn parse_stream(text: &str) -> Result<CipherStream, FormatError> {
    let mut reader = StreamReader::new(text.as_bytes())?;
    let values = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok(CipherStream {
        values,
        salt_period: reader.salt_period(),
    })
}

/// Incremental stream parser; the salt header is read on construction.
pub struct StreamReader<R> {
    input: R,
    salt_period: Option<u64>,
    pending: Option<u64>,
    line: usize,
    buf: String,
}

impl<R: BufRead> StreamReader<R> {
    pub fn new(input: R) -> Result<Self, FormatError> {
        let mut reader = StreamReader {
            input,
            salt_period: None,
            pending: None,
            line: 0,
            buf: String::new(),
        };
        if let Some(first) = reader.next_line()? {
            let n = reader.line;
            match first.strip_prefix("salt ") {
                Some(period) => {
                    let period = parse_decimal(period, n)?;
                    if period == 0 {
                        return Err(syntax(n, "salt period must be positive"));
                    }
                    reader.salt_period = Some(period);
                }
                None => reader.pending = Some(parse_decimal(&first, n)?),
            }
        }
        Ok(reader)
    }

    pub fn salt_period(&self) -> Option<u64> {
        self.salt_period
    }

    fn next_line(&mut self) -> Result<Option<String>, FormatError> {
        self.buf.clear();
        if self.input.read_line(&mut self.buf)? == 0 {
            return Ok(None);
        }
        self.line += 1;
        Ok(Some(self.buf.trim_end_matches(['\n', '\r']).to_string()))
    }
}

impl<R: BufRead> Iterator for StreamReader<R> {
    type Item = Result<u64, FormatError>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(v) = self.pending.take() {
            return Some(Ok(v));
        }
        match self.next_line() {
            Ok(Some(line)) => Some(parse_decimal(&line, self.line)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        }
    }
}

/// Incremental stream serializer.
pub struct StreamWriter<W: Write> {
    output: W,
}

impl<W: Write> StreamWriter<W> {
    pub fn new(mut output: W, salt_period: Option<u64>) -> io::Result<Self> {
        if let Some(l) = salt_period {
            writeln!(output, "salt {l}")?;
        }
        Ok(StreamWriter { output })
    }

    pub fn push(&mut self, value: u64) -> io::Result<()> {
        writeln!(self.output, "{value}")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.output.flush()?;
        Ok(self.output)
    }
}
