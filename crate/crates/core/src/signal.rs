//! The sample container shared by every stage of the toolkit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A uniformly sampled real-valued signal.
///
/// Invariants enforced at construction: the sample rate is positive and
/// finite, and every sample is finite (no NaN/Inf). Values are immutable
/// after construction; processing stages produce new signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl Signal {
    /// Build a signal, validating the container invariants.
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::invalid(format_args!(
                "sample_rate must be positive and finite, got {sample_rate}"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format_args!(
                "sample {i} is not finite"
            )));
        }
        Ok(Signal {
            samples,
            sample_rate,
        })
    }

    /// Internal constructor for samples produced by already-validated
    /// arithmetic. Finiteness is only checked in debug builds.
    pub(crate) fn from_parts(samples: Vec<f64>, sample_rate: f64) -> Self {
        debug_assert!(samples.iter().all(|x| x.is_finite()));
        debug_assert!(sample_rate > 0.0);
        Signal {
            samples,
            sample_rate,
        }
    }

    pub fn zeros(len: usize, sample_rate: f64) -> Result<Self> {
        Signal::new(vec![0.0; len], sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Sample interval in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Mean-square amplitude over the whole signal.
    pub fn mean_square(&self) -> f64 {
        self.mean_square_from(0)
    }

    /// Mean-square amplitude, skipping the first `skip` samples
    /// (e.g. a filter warm-up window).
    pub fn mean_square_from(&self, skip: usize) -> f64 {
        let tail = &self.samples[skip.min(self.samples.len())..];
        if tail.is_empty() {
            return 0.0;
        }
        tail.iter().map(|x| x * x).sum::<f64>() / tail.len() as f64
    }

    /// New signal with every sample multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Signal {
        Signal::from_parts(
            self.samples.iter().map(|x| x * factor).collect(),
            self.sample_rate,
        )
    }

    /// Element-wise sum. Both signals must share rate and length.
    pub fn add(&self, other: &Signal) -> Result<Signal> {
        if self.sample_rate != other.sample_rate {
            return Err(Error::RateMismatch {
                expected: self.sample_rate,
                actual: other.sample_rate,
            });
        }
        if self.len() != other.len() {
            return Err(Error::invalid(format_args!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Signal::from_parts(samples, self.sample_rate))
    }

    /// The signal shifted right by `delay` samples (zero-filled at the
    /// start, truncated at the end; length is preserved).
    pub fn shifted(&self, delay: usize) -> Signal {
        let n = self.samples.len();
        let d = delay.min(n);
        let mut samples = vec![0.0; n];
        samples[d..].copy_from_slice(&self.samples[..n - d]);
        Signal::from_parts(samples, self.sample_rate)
    }
}
