//! Chart-based bi-form calculus on the Cartesian square of a manifold.
//!
//! Fields are lazy evaluators over truncated Taylor jets, so every derivative a
//! construction needs (up to third order) is exact to floating rounding. Central
//! differences are available as a fallback for black-box fields.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod biform;
pub mod corpus;
pub mod error;
pub mod field;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod manifold;
pub mod monotone;
pub mod potentials;
pub mod quantum;
pub mod teleparallel;

pub use biform::{BiForm, BlockAlternatingTensor};
pub use error::{Error, Result};
pub use field::{
    Connection, CovariantTensor3, DiffMode, JetConfig, MetricField, MixedTensor, MultiField, OneForm, ScalarField,
    TwoForm, VectorField,
};
pub use jet::Jet;
pub use manifold::{ChartManifold, Point};
