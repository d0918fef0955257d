//! Computational laboratory for the interplay between the growth of
//! Lipschitz norms of iterated bi-Lipschitz maps and their rate of mixing.
//!
//! The crate is organised by subject:
//!
//! * [`cfrac`] exact continued fractions, gauge functions and the coupled
//!   Liouville-type pair of rotation numbers;
//! * [`toruslab`] cocycle series over irrational rotations, their Birkhoff
//!   sums, certified sup-norms and oscillatory mixing integrals;
//! * [`subshift`] substitutions, the Rudin–Shapiro sequence and the
//!   metrized shift space built from it;
//! * [`metricspace`] finite metric spaces, nets, covering numbers, box
//!   dimension and the capacity functions derived from them;
//! * [`bounds`] adjoint sequences and the growth lower bounds;
//! * [`lab`] experiment orchestration behind the `mixgrowth` binary.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cfrac;
pub mod csv;
pub mod error;
pub mod lab;
pub mod logmag;
pub mod metricspace;
pub mod subshift;
pub mod toruslab;

pub use error::{Error, Result};
pub use logmag::LogMag;
