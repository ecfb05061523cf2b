#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Discrete fundamental groups of finite metric spaces across scales.
//!
//! A θ-path is a sequence of points whose consecutive distances are at most θ.
//! Closed θ-paths up to θ-homotopy form the group π₁,θ(X, x₀). For a finite
//! space these are walks in the scale graph with edges `d(i,j) <= θ`, and the
//! group is presented by the non-tree edges of a spanning tree with one
//! relator per 3- and 4-cycle.
//!
//! The crate computes those presentations, their abelianizations, the maps
//! induced by increasing the scale, and bounded homotopy certificates.

pub mod decider;
pub mod error;
pub mod oracle;
pub mod paths;
pub mod presentation;
pub mod scale_maps;
pub mod spaces;
pub mod theta_graph;

pub use error::{Error, Result};
