//! Path-length realizability, configuration synthesis and inverse
//! characterization for programmable photonic meshes whose tunable basic
//! units (TBUs) are restricted to bar or cross state.
//!
//! A mesh is built from a [`MeshSpec`] into an immutable [`MeshGraph`];
//! configurations assign bar/cross to every TBU in canonical order and are
//! traced into undirected paths and closed loops. Closed-form predicates live
//! in [`theory`], explicit constructions in [`construct`], and exhaustive
//! ground truth for small meshes in [`oracle`].

pub mod advisor;
pub mod characterize;
pub mod config;
pub mod construct;
pub mod error;
pub mod mesh;
pub mod oracle;
pub mod response;
pub mod theory;
pub mod trace;

pub use config::{Configuration, EnumerationLimit, TbuState};
pub use error::*;
pub use mesh::{build_mesh, Cell, Family, MeshGraph, MeshSpec, NodeId, SideLabel, TbuId};
pub use trace::{trace, PathStats, PathType, Trace, TracedPath};
