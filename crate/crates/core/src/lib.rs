//! Randomized component-by-component construction of rank-1 lattice rules
//! and rank-1 polynomial lattice rules, with worst-case error criteria,
//! bound certificates, point-set randomizations and a variance-decay
//! experiment harness.

pub mod cbc;
pub mod cli;
pub mod document;
pub mod error;
pub mod experiment;
pub mod gfpoly;
pub mod korobov;
pub mod numtheory;
pub mod pointset;
pub mod sum;
pub mod walsh;

pub use error::{Result, RqmcError};
