//! A desk scale numerical laboratory for Weyl transforms on two concrete
//! groups: the Heisenberg motion group of the plane (one complex degree of
//! freedom, circle symmetry, unit central parameter) and the quaternion
//! Heisenberg group in its Fock realisation.
//!
//! The crate builds truncated operator pictures of the group Fourier
//! transform and checks the identities that make uncertainty arguments of
//! Benedicks and Amrein-Berthier type quantitative: the Plancherel and
//! inversion formulas, orthogonality of matrix coefficients, the
//! Hilbert-Schmidt size of a space cutoff composed with a frequency cutoff,
//! growth of finite unions of cells under translation, linear independence of
//! twisted translates, and explicit annihilation constants for pairs of
//! projections.
//!
//! Everything is driven by a single [`TruncationConfig`] so that a report can
//! be reproduced bit for bit from its configuration and seed.

pub mod config;
pub mod hmg;
pub mod matrix;
pub mod proj;
pub mod quad;
pub mod quat;
pub mod report;
pub mod sets;
pub mod suites;
pub mod sum;

pub use config::{ConfigError, LabConfig, TruncationConfig};
pub use matrix::{BasisTag, MatrixError, OperatorMatrix};
pub use proj::{
    independent_family, AnnihilationCertificate, Backend, HsNorms, IndependenceReport,
    IntersectionProfile, ProjectionLab,
};
pub use report::{relative_error, CaseReport, RunReport, SuiteReport};
pub use sets::{GridSet, SetError};
pub use suites::{SuiteError, SUITE_NAMES};
