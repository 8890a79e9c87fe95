//! Simulation-in-the-loop evolutionary optimisation of attached breakwater
//! layouts.
//!
//! A layout is encoded as a flat genotype (Cartesian endpoints or relative
//! polar length/angle pairs), decoded into polylines, checked against
//! structural and navigational constraints, and scored by cost, distance to
//! the fairway and significant wave height at harbour control points. The
//! wave heights come from a pluggable [`wave_model::WaveModel`]; the shipped
//! model is a deterministic ray-shadowing scheme with a diffusion pass.
//!
//! Layouts are searched with SPEA2 (optionally with the greedy segment mask)
//! or a single-objective differential evolution baseline, and runs are
//! compared with exact hypervolume.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod objectives;
pub mod scenario;
pub mod wave_model;

pub use error::{Error, Result};
