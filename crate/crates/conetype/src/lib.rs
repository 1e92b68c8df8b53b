//! Cone types of surface groups.
//!
//! This crate computes Cannon cone types for the fundamental group of a
//! closed orientable surface of genus `g >= 2` with its one-relator
//! presentation. For genus 2 it builds the 48 cone-type representatives,
//! the successor automaton and its 48x48 transition matrix, certifies that
//! the matrix is primitive, computes its Perron eigendata, and evaluates
//! vector-valued elementary multiplicative functions by three provably
//! equivalent strategies.
//!
//! Everything word-combinatorial is backed by a brute-force oracle: a BFS
//! ball of the Cayley graph with the full geodesic DAG. The test suite
//! replays each combinatorial claim against the oracle.
//!
//! All public types are immutable after construction and every operation is
//! a pure function, so values can be shared freely across threads.

pub mod alphabet;
pub mod cone;
pub mod element;
pub mod error;
pub mod matrix;
pub mod mult;
pub mod oracle;
pub mod relator;
pub mod rng;
pub mod selfcheck;
pub mod word;

pub use alphabet::{Alphabet, Generator, Genus};
pub use cone::{ConeTypeId, ConeTypeTable, OracleClassifier};
pub use element::GroupElement;
pub use error::{Error, Result};
pub use matrix::{ConeMatrix, PrimitivityCertificate, SpectralResult};
pub use mult::{MatrixSystem, MultFunc};
pub use oracle::{Ball, BallConfig, Fingerprint};
pub use relator::RelatorTable;
pub use word::Word;
