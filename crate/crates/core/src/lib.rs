//! Frenet apparatus, normal/rectifying classification and curve synthesis for
//! admissible curves in pseudo-Galilean space.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod dsl;
pub mod error;
pub mod metric;
pub mod spline;
pub mod curve;
pub mod frenet;
pub mod synth;
pub mod classify;
pub mod report;
pub mod io;
pub mod verify;
