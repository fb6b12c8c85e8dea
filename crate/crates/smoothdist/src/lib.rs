//! Desk-scale toolkit for the distribution of y-smooth numbers in
//! arithmetic progressions.
//!
//! The crate computes every finite object of that theory directly — smooth
//! counts Ψ(x,y) and their progression/coprimality restrictions, Dirichlet
//! character sums over smooth numbers, saddle-point and Dickman estimates,
//! restricted Euler products L(s,χ;y), truncated-Perron reconstructions, and
//! the multiplicative large sieve — and packages the exact identities and
//! inequalities relating them into testable, reportable form. Asymptotic
//! bounds with inexplicit constants are never asserted; the experiment
//! harness fits and records the constants instead.
//!
//! Modules:
//!
//! - [`factor`]: segmented sieve of largest/smallest prime factors, the
//!   backbone of every exact count, with an on-disk cache format.
//! - [`smooth`]: Ψ(x,y) and friends, plus the head/cofactor factorization
//!   of smooth integers.
//! - [`saddle`]: the saddle point α(x,y), ζ(s,y), and the
//!   Hildebrand–Tenenbaum main term.
//! - [`dickman`]: the Dickman function ρ(u) by delay-ODE integration.
//! - [`characters`]: Dirichlet character groups, conductors, and all
//!   character-weighted smooth sums.
//! - [`large_sieve`]: Gallagher's multiplicative large sieve inequality and
//!   conductor-range bookkeeping.
//! - [`perron`]: vertical-segment contour quadrature for Ψ(x,y;χ) and
//!   indicator separation.
//! - [`theorems`]: assembled left-hand sides, right-hand shapes, and fitted
//!   constants for the averaged-error theorems.
//! - [`report`]: experiment grids and CSV/JSON reports.

pub mod arith;
pub mod characters;
pub mod dickman;
pub mod error;
pub mod factor;
pub mod large_sieve;
pub mod perron;
pub mod primes;
pub mod report;
pub mod saddle;
pub mod smooth;
pub mod theorems;

pub use error::{Error, Result};
pub use factor::FactorTable;

/// Complex scalar used for character values and contour integrands.
pub type Complex = num_complex::Complex64;
