//! Exact power-partible reduction for holonomic sequences, specialized to
//! congruences of large and little Schröder polynomials.
//!
//! Layers, bottom up:
//!
//! - [`poly`], [`modular`], [`text`]: exact arithmetic in `Q[z][k]`, residues
//!   modulo odd primes, and the canonical text form of polynomials.
//! - [`shift`]: recurrence operators, adjoints, degree, degeneracy, reflection
//!   centers and telescoping certificates.
//! - [`basis`], [`reduction`], [`certificate`]: symmetric basis polynomials, the reduction
//!   of powers `(k - gamma)^m` into adjoint images plus a short residual, and
//!   its JSON form.
//! - [`sequences`]: Schröder and Delannoy generators.
//! - [`harness`]: grid verification of the congruences and the reports the
//!   CLI prints.

pub mod basis;
pub mod certificate;
pub mod error;
pub mod harness;
pub mod modular;
pub mod poly;
pub mod reduction;
pub mod sequences;
pub mod shift;
pub mod text;

pub use error::{Error, Result};
pub use modular::ModInt;
pub use poly::{KPoly, Rational, ZPoly};
pub use shift::{Epsilon, ShiftOp};
