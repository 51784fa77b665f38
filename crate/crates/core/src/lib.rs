//! Partition functions of the six-vertex model with domain-wall boundary
//! conditions (DWBC).
//!
//! The crate evaluates `Z_n` along several independent routes:
//!
//! * [`lattice`]: explicit enumeration of arrow configurations and a
//!   row transfer-matrix dynamic program, both exact over rationals;
//! * [`hankel`]: the Izergin–Korepin determinant of derivatives of
//!   `phi(t) = c / (ab)`, in verified multiprecision arithmetic;
//! * [`orthopoly`]: orthogonal-polynomial norms of the associated weights,
//!   including the two critical lines where only the limiting weights exist.
//!
//! [`asymptotics`] evaluates the large-`n` predictions for each phase and
//! fits free energies and exponents from computed sequences.
//!
//! Multiprecision arithmetic is provided by [`rug`] (MPFR/GMP). With the
//! default `parallel` feature, data-parallel inner loops run on rayon; see
//! [`exec::Execution`].

pub mod asymptotics;
pub mod error;
pub mod exec;
pub mod hankel;
pub mod lattice;
pub mod model;
pub mod orthopoly;
pub mod precision;
pub mod report;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{Phase, PhaseParams, Weights};
pub use precision::PrecisionContext;
