//! Statistical checks on gap structure and emitted streams.
//!
//! The battery is deliberately small: exact gap density on `[0, F]`, gap
//! counts per residue class, gap fractions in random windows, and a
//! chi-square frequency test on stream residues at significance 0.05.

use num_rational::Ratio;
use rand::Rng;
use thiserror::Error;

use crate::semigroup::SemigroupTable;

/// Upper 5% points of the chi-square distribution for 1 to 127 degrees of
/// freedom.
const CHI_SQUARE_CRITICAL_005: [f64; 127] = [
    3.841, 5.991, 7.815, 9.488, 11.070, 12.592, 14.067, 15.507,
    16.919, 18.307, 19.675, 21.026, 22.362, 23.685, 24.996, 26.296,
    27.587, 28.869, 30.144, 31.410, 32.671, 33.924, 35.172, 36.415,
    37.652, 38.885, 40.113, 41.337, 42.557, 43.773, 44.985, 46.194,
    47.400, 48.602, 49.802, 50.998, 52.192, 53.384, 54.572, 55.758,
    56.942, 58.124, 59.304, 60.481, 61.656, 62.830, 64.001, 65.171,
    66.339, 67.505, 68.669, 69.832, 70.993, 72.153, 73.311, 74.468,
    75.624, 76.778, 77.931, 79.082, 80.232, 81.381, 82.529, 83.675,
    84.821, 85.965, 87.108, 88.250, 89.391, 90.531, 91.670, 92.808,
    93.945, 95.081, 96.217, 97.351, 98.484, 99.617, 100.749, 101.879,
    103.010, 104.139, 105.267, 106.395, 107.522, 108.648, 109.773, 110.898,
    112.022, 113.145, 114.268, 115.390, 116.511, 117.632, 118.752, 119.871,
    120.990, 122.108, 123.225, 124.342, 125.458, 126.574, 127.689, 128.804,
    129.918, 131.031, 132.144, 133.257, 134.369, 135.480, 136.591, 137.701,
    138.811, 139.921, 141.030, 142.138, 143.246, 144.354, 145.461, 146.567,
    147.674, 148.779, 149.885, 150.989, 152.094, 153.198, 154.302,
];

/// Largest modulus the chi-square test supports.
pub const MAX_CHI_SQUARE_MODULUS: u64 = CHI_SQUARE_CRITICAL_005.len() as u64 + 1;

/// Minimum expected count per cell.
pub const MIN_EXPECTED_PER_CLASS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("need at least {needed} samples for modulus {modulus}, got {got}")]
    InsufficientSamples { got: usize, needed: usize, modulus: u64 },
    #[error("chi-square test supports moduli 2..={MAX_CHI_SQUARE_MODULUS}, got {0}")]
    UnsupportedModulus(u64),
    #[error("window length {len} does not fit in [0, {frobenius}]")]
    WindowExceedsRange { len: u64, frobenius: u64 },
}

/// Chi-square critical value at α = 0.05, if tabulated.
pub fn critical_value(df: u64) -> Option<f64> {
    CHI_SQUARE_CRITICAL_005.get((df as usize).checked_sub(1)?).copied()
}

/// `genus / (F + 1)`.
pub fn gap_density(table: &SemigroupTable) -> Ratio<u64> {
    Ratio::new(table.genus(), table.frobenius() + 1)
}

/// Gap counts per residue class; panics if `modulus` is zero.
pub fn residue_histogram(table: &SemigroupTable, modulus: u64) -> Vec<u64> {
    assert!(modulus > 0, "modulus must be positive");
    let mut counts = vec![0u64; modulus as usize];
    for x in table.gaps() {
        counts[(x % modulus) as usize] += 1;
    }
    counts
}

/// `max / min` over the class counts, `None` when some class is empty.
pub fn class_count_ratio(counts: &[u64]) -> Option<f64> {
    let min = *counts.iter().min()?;
    let max = *counts.iter().max()?;
    (min > 0).then(|| max as f64 / min as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: u64,
    pub critical_value: f64,
    pub reject: bool,
    pub counts: Vec<u64>,
}

/// Frequency test of `values mod modulus` against the uniform distribution.
pub fn chi_square_uniformity(values: &[u64], modulus: u64) -> Result<ChiSquare, AnalysisError> {
    if !(2..=MAX_CHI_SQUARE_MODULUS).contains(&modulus) {
        return Err(AnalysisError::UnsupportedModulus(modulus));
    }
    let needed = MIN_EXPECTED_PER_CLASS * modulus as usize;
    if values.len() < needed {
        return Err(AnalysisError::InsufficientSamples {
            got: values.len(),
            needed,
            modulus,
        });
    }
    let mut counts = vec![0u64; modulus as usize];
    for &x in values {
        counts[(x % modulus) as usize] += 1;
    }
    // Σ (O − n/M)² / (n/M) = Σ (M·O − n)² / (n·M), accumulated in integers
    let n = values.len() as i128;
    let m = modulus as i128;
    let numerator: i128 = counts.iter().map(|&o| (m * o as i128 - n).pow(2)).sum();
    let statistic = numerator as f64 / (n * m) as f64;
    let df = modulus - 1;
    let critical = critical_value(df).expect("modulus range checked above");
    Ok(ChiSquare {
        statistic,
        df,
        critical_value: critical,
        reject: statistic > critical,
        counts,
    })
}

/// Fraction of gaps among `start, …, start + len − 1`.
pub fn window_gap_fraction(table: &SemigroupTable, start: u64, len: u64) -> Ratio<u64> {
    let gaps = (start..start + len).filter(|&x| !table.contains(x)).count() as u64;
    Ratio::new(gaps, len.max(1))
}

/// Gap fractions in `trials` windows of length `window_len` placed uniformly
/// inside `[0, F]`.
pub fn window_bernoulli<R: Rng + ?Sized>(
    table: &SemigroupTable,
    window_len: u64,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<Ratio<u64>>, AnalysisError> {
    let span = table.frobenius() + 1;
    if window_len == 0 || window_len > span {
        return Err(AnalysisError::WindowExceedsRange {
            len: window_len,
            frobenius: table.frobenius(),
        });
    }
    Ok((0..trials)
        .map(|_| {
            let start = rng.random_range(0..=span - window_len);
            window_gap_fraction(table, start, window_len)
        })
        .collect())
}

/// Window sampling used by [`analyze`] when a key is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    pub len: u64,
    pub trials: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { len: 256, trials: 64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub samples: usize,
    pub modulus: u64,
    pub class_histogram: Vec<u64>,
    pub chi_square: f64,
    pub df: u64,
    pub critical_value: f64,
    pub reject_uniformity: bool,
    pub gap_density: Option<Ratio<u64>>,
    pub window_fractions: Vec<Ratio<u64>>,
}

impl AnalysisReport {
    /// `key: value` lines with stable key names.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&v);
            out.push('\n');
        };
        line("samples", self.samples.to_string());
        line("modulus", self.modulus.to_string());
        line("class_counts", join(&self.class_histogram));
        line("chi_square", format!("{:.6}", self.chi_square));
        line("df", self.df.to_string());
        line("critical_value", format!("{:.3}", self.critical_value));
        line("reject_uniformity", self.reject_uniformity.to_string());
        if let Some(density) = self.gap_density {
            line("gap_density", density.to_string());
        }
        if !self.window_fractions.is_empty() {
            let as_f64: Vec<f64> = self
                .window_fractions
                .iter()
                .map(|r| *r.numer() as f64 / *r.denom() as f64)
                .collect();
            let mean = as_f64.iter().sum::<f64>() / as_f64.len() as f64;
            let min = as_f64.iter().copied().fold(f64::INFINITY, f64::min);
            let max = as_f64.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            line("window_trials", as_f64.len().to_string());
            line("window_fraction_mean", format!("{mean:.6}"));
            line("window_fraction_min", format!("{min:.6}"));
            line("window_fraction_max", format!("{max:.6}"));
        }
        out
    }
}

fn join(counts: &[u64]) -> String {
    counts.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

/// Runs the frequency test on `values` and, given a key, the gap-structure
/// checks. The window length is clipped to `F + 1`.
pub fn analyze<R: Rng + ?Sized>(
    values: &[u64],
    modulus: u64,
    key: Option<(&SemigroupTable, WindowConfig)>,
    rng: &mut R,
) -> Result<AnalysisReport, AnalysisError> {
    let chi = chi_square_uniformity(values, modulus)?;
    let (gap_density, window_fractions) = match key {
        Some((table, windows)) => {
            let len = windows.len.clamp(1, table.frobenius() + 1);
            (
                Some(gap_density(table)),
                window_bernoulli(table, len, windows.trials, rng)?,
            )
        }
        None => (None, Vec::new()),
    };
    Ok(AnalysisReport {
        samples: values.len(),
        modulus,
        class_histogram: chi.counts,
        chi_square: chi.statistic,
        df: chi.df,
        critical_value: chi.critical_value,
        reject_uniformity: chi.reject,
        gap_density,
        window_fractions,
    })
}
