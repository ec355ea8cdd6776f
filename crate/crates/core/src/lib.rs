//! Hiding byte streams in the gaps of secret symmetric numerical semigroups.
//!
//! A private key is a generating set `A`; the semigroup `S = <A>` is the set
//! of non-negative integer combinations of its elements. Integers outside
//! `S` are gaps. The encoder carries every payload nibble `v` on a gap `x`
//! with `x ≡ v (mod 16)`. Without `A`, the emitted integers look like
//! uniform residues; with `A`, the receiver can also confirm that every
//! value is a gap.
//!
//! Modules:
//!
//! * [`semigroup`]: generating sets, Apéry tables, membership, gaps,
//!   symmetry and telescopic tests, and a dynamic-programming oracle.
//! * [`closed_forms`]: Frobenius formulas and bound checks.
//! * [`keygen`]: seeded key generation.
//! * [`codec`]: the nibble codec and salting.
//! * [`stats`]: density, class uniformity and frequency tests.
//! * [`formats`]: key and stream text formats.
//! * [`selftest`]: reduced property suites for the command line.

pub mod closed_forms;
pub mod codec;
pub mod formats;
pub mod keygen;
pub mod selftest;
pub mod semigroup;
pub mod stats;

pub use codec::{CipherStream, CodecError, GapIndex, SaltSpec};
pub use formats::{FormatError, KeyFile};
pub use keygen::{KeygenError, KeygenMode, KeygenParams};
pub use semigroup::{GeneratingSet, SemigroupError, SemigroupTable};
