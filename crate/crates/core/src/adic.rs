//! Analog differential clippers — intermittently nonlinear filters that
//! pass in-range samples untouched and replace range violations with a
//! tracked mid-range level.
//!
//! Two variants:
//!
//! * [`BasicAdic`] establishes a robust range over the raw input and
//!   replaces fence violations with the trimean mid-range (DCL).
//! * [`FeedbackAdic`] keeps the DCL `chi` as the state of a gated
//!   first-order lowpass of the input and fences the *difference signal*
//!   `u = x - chi`. In-range samples pass through bit-exactly
//!   (`y = chi + u = x`); when `u` violates the fences the output is
//!   `chi` and `chi` is frozen for the duration of the outlier.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::robust::{FenceConfig, FenceTracker};
use crate::signal::Signal;

/// A blanking range `[lo, hi]` (both ends inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlankingRange {
    lo: f64,
    hi: f64,
}

impl BlankingRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::invalid(format_args!(
                "blanking range needs lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(BlankingRange { lo, hi })
    }

    /// The never-clipping range.
    pub fn infinite() -> Self {
        BlankingRange {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// The blanking function: `x` inside the range, `0` outside.
#[inline]
pub fn blank(x: f64, range: &BlankingRange) -> f64 {
    if range.contains(x) {
        x
    } else {
        0.0
    }
}

/// Where a clipper's fences come from.
#[derive(Debug, Clone)]
pub enum FenceSource {
    /// Quartiles tracked over the observed stream (the production path).
    SelfTracked(FenceConfig),
    /// Fixed fences supplied externally (unit tests, calibration).
    External(BlankingRange),
}

/// Feedback clipper parameters.
#[derive(Debug, Clone)]
pub struct AdicConfig {
    /// Time parameter of the DCL lowpass, in seconds. The in-range loop
    /// behaves as a first-order lowpass with corner `1/(2*pi*tau)`.
    pub tau: f64,
    pub fences: FenceSource,
}

impl AdicConfig {
    pub fn self_tracked(tau: f64, fences: FenceConfig) -> Self {
        AdicConfig {
            tau,
            fences: FenceSource::SelfTracked(fences),
        }
    }

    pub fn external(tau: f64, range: BlankingRange) -> Self {
        AdicConfig {
            tau,
            fences: FenceSource::External(range),
        }
    }
}

/// Snapshot of clipper internals for diagnostic traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdicProbe {
    pub chi: f64,
    pub fence_lo: f64,
    pub fence_hi: f64,
    pub warm: bool,
}

/// The feedback-based clipper.
#[derive(Debug, Clone)]
pub struct FeedbackAdic {
    alpha: f64, // dt / tau
    chi: f64,
    primed: bool,
    tracker: Option<FenceTracker>,
    external: BlankingRange,
    clips: usize,
    steps: usize,
}

impl FeedbackAdic {
    /// `tau` must cover at least two sample intervals for the forward-Euler
    /// discretization to be meaningful.
    pub fn new(config: &AdicConfig, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) {
            return Err(Error::invalid("sample rate must be positive"));
        }
        let dt = 1.0 / sample_rate;
        if !(config.tau >= 2.0 * dt) {
            return Err(Error::invalid(format_args!(
                "tau = {} s must be at least 2 sample intervals ({} s)",
                config.tau,
                2.0 * dt
            )));
        }
        let (tracker, external) = match &config.fences {
            FenceSource::SelfTracked(fc) => (Some(FenceTracker::new(*fc)?), BlankingRange::infinite()),
            FenceSource::External(r) => (None, *r),
        };
        Ok(FeedbackAdic {
            alpha: dt / config.tau,
            chi: 0.0,
            primed: false,
            tracker,
            external,
            clips: 0,
            steps: 0,
        })
    }

    /// Current fences (the external range until the tracker is warm).
    pub fn fences(&self) -> BlankingRange {
        match &self.tracker {
            Some(t) if t.is_warm() => {
                let (lo, hi) = t.fences();
                BlankingRange { lo, hi }
            }
            Some(_) => BlankingRange::infinite(),
            None => self.external,
        }
    }

    pub fn probe(&self) -> AdicProbe {
        let f = self.fences();
        AdicProbe {
            chi: self.chi,
            fence_lo: f.lo,
            fence_hi: f.hi,
            warm: self.is_warm(),
        }
    }

    pub fn is_warm(&self) -> bool {
        self.tracker.as_ref().is_none_or(FenceTracker::is_warm)
    }

    /// Fraction of processed samples that were clipped.
    pub fn clip_fraction(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.clips as f64 / self.steps as f64
        }
    }

    /// Process one sample. Returns the output and whether it was clipped.
    ///
    /// Update order per step: evaluate the difference signal, blank,
    /// output, integrate the DCL, then update the fence tracker on the
    /// raw difference signal (so fences widen during sustained outliers).
    pub fn step(&mut self, x: f64) -> (f64, bool) {
        if !self.primed {
            self.chi = x;
            self.primed = true;
        }
        let u = x - self.chi;
        let fences = self.fences();
        let (y, clipped) = if fences.contains(u) {
            self.chi += self.alpha * u;
            (x, false)
        } else {
            // DCL frozen for the duration of the outlier.
            (self.chi, true)
        };
        if let Some(t) = self.tracker.as_mut() {
            t.update(u);
        }
        self.steps += 1;
        if clipped {
            self.clips += 1;
        }
        (y, clipped)
    }

    pub fn process(&mut self, signal: &Signal) -> Signal {
        let out: Vec<f64> = signal.samples().iter().map(|&x| self.step(x).0).collect();
        Signal::from_parts(out, signal.sample_rate())
    }
}

/// The basic clipper: fences and mid-range tracked over the raw input;
/// fence violations are replaced by the DCL.
#[derive(Debug, Clone)]
pub struct BasicAdic {
    tracker: FenceTracker,
    clips: usize,
    steps: usize,
}

impl BasicAdic {
    pub fn new(fences: FenceConfig) -> Result<Self> {
        Ok(BasicAdic {
            tracker: FenceTracker::new(fences)?,
            clips: 0,
            steps: 0,
        })
    }

    pub fn tracker(&self) -> &FenceTracker {
        &self.tracker
    }

    pub fn clip_fraction(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.clips as f64 / self.steps as f64
        }
    }

    /// Process one sample: pass it if it sits within the current fences,
    /// otherwise emit the mid-range; the tracker then updates on the raw
    /// input either way. During warm-up everything passes through.
    pub fn step(&mut self, x: f64) -> (f64, bool) {
        let (y, clipped) = if self.tracker.is_warm() {
            let (lo, hi) = self.tracker.fences();
            if lo <= x && x <= hi {
                (x, false)
            } else {
                (self.tracker.dcl(), true)
            }
        } else {
            (x, false)
        };
        self.tracker.update(x);
        self.steps += 1;
        if clipped {
            self.clips += 1;
        }
        (y, clipped)
    }

    pub fn process(&mut self, signal: &Signal) -> Signal {
        let out: Vec<f64> = signal.samples().iter().map(|&x| self.step(x).0).collect();
        Signal::from_parts(out, signal.sample_rate())
    }
}
