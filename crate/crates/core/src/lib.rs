//! Streaming mitigation of outlier (impulsive, transient, burst) noise.
//!
//! The crate provides the building blocks for intermittently nonlinear
//! filtering of signals contaminated by outlier noise:
//!
//! * [`robust`] — quantile tracking filters (QTF), Tukey-fence range
//!   tracking, trimean mid-range, and the peakedness metric (dBG).
//! * [`adic`] — analog differential clippers: sample-by-sample filters
//!   that replace range-violating samples with a tracked mid-range level
//!   and pass everything else through unchanged.
//! * [`caf`] — complementary ADiC filters: band-split topologies that
//!   observe wideband outliers in the excess band, clip them there, and
//!   recombine with the untouched signal band.
//! * [`iir`] / [`fir`] — the supporting linear filters (Butterworth and
//!   Bessel biquad cascades, linear-phase FIR designs, complementary
//!   pairs, root-raised-cosine shaping).
//! * [`deltasigma`] — a 1-bit second-order delta-sigma front end with a
//!   wideband reconstruction filter, so the clippers can run in an
//!   "effectively analog" digital pipeline.
//! * [`metrics`] — baseband SNR, Shannon capacity, pileup threshold and
//!   Welch PSD estimation for quantifying what the nonlinear stages buy.
//! * [`chain`] — ready-made processing chains (linear reference, CAF,
//!   derivative CAF, bandstop-CAF, shared-band clipper) with paired
//!   evaluation against a delay-matched clean reference.
//!
//! All processing is deterministic: generators are pure functions of
//! their parameters and a 64-bit seed, and every filter state is explicit.
//! The crate is `no_std`-compatible (requires `alloc`); the companion
//! `onmt-harness` crate adds file formats, scenarios and a CLI.

#![cfg_attr(not(feature = "std"), no_std)]
// Parameter checks use `!(x > 0.0)` so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod adic;
pub mod caf;
pub mod chain;
pub mod deltasigma;
mod error;
pub mod fir;
pub mod iir;
mod math;
pub mod metrics;
pub mod noise;
pub mod rng;
pub mod robust;
pub mod signal;
pub mod waveform;

pub use error::{Error, Result};
pub use rng::RngSeed;
pub use signal::Signal;
