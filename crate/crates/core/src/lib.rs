//! Exact arithmetic and verification oracles for genuine representations of
//! the metaplectic double cover of `SL_2(Q_p)`, `p` odd.
//!
//! Modules, bottom up:
//! - [`padic`], [`cyc`]: residues, scaled p-adic numbers, Hilbert symbols, cyclotomic numbers
//! - [`characters`]: additive, unit and multiplicative characters
//! - [`gauss`], [`weil_index`]: the two Gauss-sum variants and the normalized Weil index
//! - [`metaplectic`], [`cosets`]: the Kubota cover, splittings, double cosets
//! - [`schroedinger`]: truncated Schrödinger model and the even-Weil oracle
//! - [`newform`], [`theta`]: closed dimension formulas, newforms, Whittaker data, theta lifts
//! - [`checks`]: verification suites producing [`report::Report`]s

pub mod characters;
pub mod checks;
pub mod cosets;
pub mod cyc;
pub mod error;
pub mod gauss;
pub mod metaplectic;
pub mod newform;
pub mod padic;
pub mod par;
pub mod report;
pub mod schroedinger;
pub mod theta;
pub mod weil_index;

pub use error::{Error, Result};
