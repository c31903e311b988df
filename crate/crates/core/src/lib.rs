//! Computational kernel for nonabelian exterior squares of finite groups.
//!
//! The crate builds finite groups from polycyclic presentations or from
//! class-2 commutator data, computes commuting probabilities and conjugacy
//! censuses, and determines the Schur multiplier `M(G)` and the Bogomolov
//! multiplier `B0(G)` as kernels of the commutator map on `G ∧ G` and
//! `G ⋏ G`. Two independent engines are provided for the wedge groups: a
//! coset enumeration over the defining presentation, and a linear engine
//! working in the relative covering group `F/[R,F]`.
//!
//! Module map:
//!
//! * [`presentations`]: pc presentations, collection, consistency.
//! * [`groupcore`]: table and class-2 backends, subgroups, quotients.
//! * [`analytics`]: centers, series, Frattini subgroup, census, `cp`.
//! * [`enumeration`]: coset enumeration, Smith normal form, `F_p` algebra.
//! * [`wedge`]: `G ∧ G`, `G ⋏ G`, `M(G)`, `B0(G)`.
//! * [`pairings`]: determinant B0-pairings and their verification.
//! * [`catalog`]: named groups with expected invariants.
//! * [`verdicts`]: threshold criteria, B0-minimality, reports.
//! * [`reproduce`]: the reproduction suites driven by the CLI and tests.

mod error;

pub mod analytics;
pub mod catalog;
pub mod enumeration;
pub mod groupcore;
pub mod pairings;
pub mod presentations;
pub mod reproduce;
pub mod verdicts;
pub mod wedge;

pub use error::{Error, Result};
