//! Closed-form Frobenius numbers and classical bound checks.
//!
//! Every formula here has a counterpart computed by [`crate::semigroup`];
//! the test suites compare the two.
//!
//! Erratum for the geometric case: the σ-form
//! `σ_{k+1} − σ_k − (a^{k+1} + b^{k+1})` is what [`geometric_frobenius`]
//! evaluates. For `k = 2` it expands to `a²b + ab² − a² − ab − b²`; the
//! shortcut `ab(a + b − 1)` sometimes quoted for it is wrong (at `a = 2,
//! b = 3` it gives 24, while the semigroup `<4, 6, 9>` has Frobenius number
//! 11).

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::semigroup::{GeneratingSet, SemigroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("arguments are not coprime (gcd {0})")]
    NotCoprime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("progression with {w} steps exceeds a - 1 = {}", .a - 1)]
    DegenerateProgression { a: u64, w: u64 },
    #[error("arithmetic overflow in 64-bit range")]
    Overflow,
    #[error("Frobenius number {0} is even, so the semigroup cannot be symmetric")]
    EvenFrobenius(u64),
}

/// `F(a, b) = ab − a − b` for coprime `a, b ≥ 2`.
pub fn sylvester(a: u64, b: u64) -> Result<u64, FormulaError> {
    if a < 2 || b < 2 {
        return Err(FormulaError::InvalidArgument("generators must be at least 2"));
    }
    let g = a.gcd(&b);
    if g != 1 {
        return Err(FormulaError::NotCoprime(g));
    }
    a.checked_mul(b)
        .and_then(|p| p.checked_sub(a + b))
        .ok_or(FormulaError::Overflow)
}

/// The progression `a, a + d, …, a + wd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgressionSpec {
    a: u64,
    d: u64,
    w: u64,
}

impl ProgressionSpec {
    pub fn new(a: u64, d: u64, w: u64) -> Result<Self, FormulaError> {
        if a < 2 {
            return Err(FormulaError::InvalidArgument("first term must be at least 2"));
        }
        if d < 1 || w < 1 {
            return Err(FormulaError::InvalidArgument("difference and step count must be positive"));
        }
        let g = a.gcd(&d);
        if g != 1 {
            return Err(FormulaError::NotCoprime(g));
        }
        if w > a - 1 {
            return Err(FormulaError::DegenerateProgression { a, w });
        }
        Ok(ProgressionSpec { a, d, w })
    }

    pub fn first(&self) -> u64 {
        self.a
    }

    pub fn difference(&self) -> u64 {
        self.d
    }

    pub fn steps(&self) -> u64 {
        self.w
    }

    pub fn terms(&self) -> Result<Vec<u64>, FormulaError> {
        (0..=self.w)
            .map(|j| {
                j.checked_mul(self.d)
                    .and_then(|t| t.checked_add(self.a))
                    .ok_or(FormulaError::Overflow)
            })
            .collect()
    }

    pub fn generating_set(&self) -> Result<GeneratingSet, FormulaError> {
        GeneratingSet::from_unsigned(&self.terms()?).map_err(semigroup_to_formula)
    }
}

/// `⌊(a − 2)/w⌋·a + d·(a − 1)`.
pub fn progression_frobenius(spec: &ProgressionSpec) -> Result<u64, FormulaError> {
    let ProgressionSpec { a, d, w } = *spec;
    ((a - 2) / w)
        .checked_mul(a)
        .and_then(|head| d.checked_mul(a - 1).and_then(|tail| head.checked_add(tail)))
        .ok_or(FormulaError::Overflow)
}

/// `σ_r(a, b) = Σ_{i=0}^{r} a^{r−i} b^i`.
pub fn sigma(a: u64, b: u64, r: u32) -> Result<u64, FormulaError> {
    if a == 0 || b == 0 {
        return Err(FormulaError::InvalidArgument("sigma needs positive bases"));
    }
    let mut total: u64 = 0;
    for i in 0..=r {
        let term = a
            .checked_pow(r - i)
            .and_then(|x| b.checked_pow(i).and_then(|y| x.checked_mul(y)))
            .ok_or(FormulaError::Overflow)?;
        total = total.checked_add(term).ok_or(FormulaError::Overflow)?;
    }
    Ok(total)
}

/// The geometric set `a^k, a^{k−1}b, …, b^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeometricSpec {
    a: u64,
    b: u64,
    k: u32,
}

impl GeometricSpec {
    pub fn new(a: u64, b: u64, k: u32) -> Result<Self, FormulaError> {
        if a < 2 || b < 2 {
            return Err(FormulaError::InvalidArgument("bases must be at least 2"));
        }
        if a == b {
            return Err(FormulaError::InvalidArgument("bases must differ"));
        }
        if k < 1 {
            return Err(FormulaError::InvalidArgument("exponent must be at least 1"));
        }
        let g = a.gcd(&b);
        if g != 1 {
            return Err(FormulaError::NotCoprime(g));
        }
        Ok(GeometricSpec { a, b, k })
    }

    pub fn terms(&self) -> Result<Vec<u64>, FormulaError> {
        (0..=self.k)
            .map(|i| {
                self.a
                    .checked_pow(self.k - i)
                    .and_then(|x| self.b.checked_pow(i).and_then(|y| x.checked_mul(y)))
                    .ok_or(FormulaError::Overflow)
            })
            .collect()
    }

    pub fn generating_set(&self) -> Result<GeneratingSet, FormulaError> {
        GeneratingSet::from_unsigned(&self.terms()?).map_err(semigroup_to_formula)
    }
}

/// `σ_{k+1}(a, b) − σ_k(a, b) − (a^{k+1} + b^{k+1})`, evaluated as written.
pub fn geometric_frobenius(spec: &GeometricSpec) -> Result<u64, FormulaError> {
    let GeometricSpec { a, b, k } = *spec;
    let upper = sigma(a, b, k + 1)?;
    let lower = sigma(a, b, k)?;
    let ends = a
        .checked_pow(k + 1)
        .and_then(|x| b.checked_pow(k + 1).and_then(|y| x.checked_add(y)))
        .ok_or(FormulaError::Overflow)?;
    upper
        .checked_sub(lower)
        .and_then(|x| x.checked_sub(ends))
        .ok_or(FormulaError::Overflow)
}

/// Genus of a symmetric semigroup with Frobenius number `frobenius`.
pub fn symmetric_genus(frobenius: u64) -> Result<u64, FormulaError> {
    if frobenius.is_multiple_of(2) {
        return Err(FormulaError::EvenFrobenius(frobenius));
    }
    Ok(frobenius.div_ceil(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Davison,
    Wilf,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Davison => "davison",
            BoundKind::Wilf => "wilf",
        })
    }
}

/// Outcome of an inequality check. `lhs` and `rhs` are the integers actually
/// compared: squared for Davison, cross-multiplied for Wilf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundReport {
    pub subject: BoundKind,
    pub lhs: u128,
    pub rhs: u128,
    pub holds: bool,
}

impl BoundReport {
    fn new(subject: BoundKind, lhs: u128, rhs: u128) -> Self {
        BoundReport {
            subject,
            lhs,
            rhs,
            holds: lhs >= rhs,
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "holds" } else { "fails" };
        let op = if self.holds { ">=" } else { "<" };
        write!(f, "{verdict} ({} {op} {})", self.lhs, self.rhs)
    }
}

/// `(F + a₁ + a₂ + a₃)² ≥ 3·a₁·a₂·a₃`, in exact integers.
pub fn davison_check(a1: u64, a2: u64, a3: u64, frobenius: u64) -> Result<BoundReport, FormulaError> {
    let g = a1.gcd(&a2).gcd(&a3);
    if g != 1 {
        return Err(FormulaError::NotCoprime(g));
    }
    let modified = frobenius as u128 + a1 as u128 + a2 as u128 + a3 as u128;
    let product = 3 * a1 as u128 * a2 as u128 * a3 as u128;
    Ok(BoundReport::new(BoundKind::Davison, modified * modified, product))
}

/// `d·(F + 1 − g) ≥ F + 1`, where `d` is the embedding dimension.
pub fn wilf_check(embedding_dim: u64, frobenius: u64, genus: u64) -> BoundReport {
    debug_assert!(genus <= frobenius, "0 is a member, so at most F of [0, F] are gaps");
    let small_elements = (frobenius + 1).saturating_sub(genus) as u128;
    BoundReport::new(
        BoundKind::Wilf,
        embedding_dim as u128 * small_elements,
        frobenius as u128 + 1,
    )
}

fn semigroup_to_formula(err: SemigroupError) -> FormulaError {
    match err {
        SemigroupError::GcdNotOne(g) => FormulaError::NotCoprime(g),
        _ => FormulaError::InvalidArgument("terms do not form a generating set"),
    }
}
