//! qlab — an exact q-series laboratory.
//!
//! The crate expands eta-type infinite products as truncated integer power
//! series, computes regular-bipartition counting sequences, and mechanically
//! verifies congruence families, Hecke-eigenform relations, Newman coefficient
//! recurrences, and eta-quotient modularity data at configurable bounds.
//!
//! Module map:
//! - [`series`]: truncated power series over Z and Z/m (the universal carrier)
//! - [`number_theory`]: Legendre symbol, primality, primes in residue classes
//! - [`bipartitions`]: b_t(n) and B_{u,v}(n) plus an independent counting oracle
//! - [`eta`]: eta-quotient level/weight/character/cusp-order analyzer
//! - [`hecke`]: the T_p operator and numerical eigenform checks
//! - [`newman`]: Newman's 1959 and 1962 coefficient recurrences
//! - [`congruences`]: declarative congruence families, sweep engine, density
//! - [`report`]: shared verification report types

pub mod bipartitions;
pub mod congruences;
pub mod error;
pub mod eta;
pub mod hecke;
pub mod newman;
pub mod number_theory;
pub mod report;
pub mod series;

pub use error::{QlabError, Result};
