//! Scenario harness for the outlier-noise mitigation toolkit: file
//! formats, the scenario schema, experiment runners, and static SVG
//! plotting. The `onmt` binary wraps these; the acceptance suite calls
//! them directly.

// Parameter checks use `!(x > 0.0)` so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod formats;
pub mod runner;
pub mod scenario;
pub mod svg;
