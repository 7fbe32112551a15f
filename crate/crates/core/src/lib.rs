//! Numerical laboratory for the spectral theory of uniform d-regular digraphs.
//!
//! The crate is organized around six pillars:
//!
//! - [`digraph`]: configuration-model sampling of d-regular digraphs,
//!   undirected balls, excess statistics, and the radius scales used by the
//!   local analysis.
//! - [`switching`]: boundary-edge switching data, validity indicators, and
//!   the measure-preserving involution on (graph, data) pairs.
//! - [`selfconsistent`]: the distinguished Herglotz solution of the
//!   directed-tree self-consistent cubic, its derived scalars, the unscaled
//!   system, and the oriented Kesten-McKay density.
//! - [`treegreen`]: oriented d-regular trees, boundary-weight extensions of
//!   their Hermitizations, and exact Green's-function recursions with dense
//!   oracles.
//! - [`resolvent`]: Hermitization of sampled digraphs, resolvent traces,
//!   edge-removal control parameters, singular-value profiles, and Ward
//!   identity checks.
//! - [`girko`]: empirical spectral distributions, radial Kolmogorov-Smirnov
//!   statistics, and a numerical verification of Girko's formula.

pub mod digraph;
pub mod error;
pub mod girko;
pub mod linalg;
pub mod quad;
pub mod resolvent;
pub mod selfconsistent;
pub mod switching;
pub mod treegreen;

pub use error::{Error, Result};
pub use linalg::C64;

/// Default scalar used by the concrete pipelines.
pub type Real = f64;
