//! Streaming robust statistics: quantile tracking filters, fence/mid-range
//! tracking, the peakedness metric, and a windowed Hampel filter kept as a
//! reference outlier remover for cross-validation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::signal::Signal;

// Test builds link std through dev-dependencies, whose inherent f64
// methods shadow this shim; real no_std consumers need it.
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::math::F64Ext as _;

#[inline]
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Quantile tracking filter.
///
/// Tracks the `q`-th quantile of its input stream with the sign-driven
/// update `Q += delta * (sgn(y - Q) + 2q - 1)`, where `delta` is the
/// per-sample step (the `A * dt / T` of the continuous-time form, exposed
/// directly since only the ratio matters after discretization).
///
/// The estimate starts at the first input sample. In steady state it
/// chatters within about `2 * delta` of the true quantile; every
/// per-sample move is bounded by `2 * delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct QtfState {
    q: f64,
    delta: f64,
    estimate: f64,
    primed: bool,
}

impl QtfState {
    pub fn new(q: f64, delta: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid("quantile must lie in (0, 1)"));
        }
        if !(delta > 0.0) {
            return Err(Error::invalid("delta must be positive"));
        }
        Ok(QtfState {
            q,
            delta,
            estimate: 0.0,
            primed: false,
        })
    }

    /// Start from an explicit initial estimate instead of the first sample.
    pub fn with_initial(q: f64, delta: f64, initial: f64) -> Result<Self> {
        let mut s = QtfState::new(q, delta)?;
        s.estimate = initial;
        s.primed = true;
        Ok(s)
    }

    pub fn step(&mut self, y: f64) -> f64 {
        if !self.primed {
            self.estimate = y;
            self.primed = true;
        } else {
            self.estimate += self.delta * (sgn(y - self.estimate) + 2.0 * self.q - 1.0);
        }
        self.estimate
    }

    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    pub fn quantile(&self) -> f64 {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn set_delta(&mut self, delta: f64) {
        debug_assert!(delta > 0.0);
        self.delta = delta;
    }

    pub(crate) fn set_estimate(&mut self, v: f64) {
        self.estimate = v;
        self.primed = true;
    }
}

/// How the tracking step `delta` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaMode {
    /// User-set absolute step.
    Fixed(f64),
    /// `fraction` of the input interquartile range, estimated over the
    /// warm-up window and frozen afterwards.
    AutoIqr { fraction: f64 },
}

/// Configuration for a [`FenceTracker`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FenceConfig {
    /// Tukey fence scale (fences at `Q1 - beta*IQR`, `Q3 + beta*IQR`).
    pub beta: f64,
    /// Weight of the median in the trimean mid-range
    /// `(Q1 + w*Q2 + Q3) / (w + 2)`; `w = 2` is Tukey's trimean.
    pub trimean_weight: f64,
    pub delta: DeltaMode,
    /// Samples before the tracker reports itself warm. In `AutoIqr` mode
    /// the warm-up samples are buffered; at the end of the window the
    /// quartile estimates are re-anchored to the exact sample quartiles
    /// and `delta` is frozen.
    pub warmup: usize,
}

impl Default for FenceConfig {
    fn default() -> Self {
        FenceConfig {
            beta: 1.5,
            trimean_weight: 2.0,
            delta: DeltaMode::AutoIqr { fraction: 0.01 },
            warmup: 1024,
        }
    }
}

impl FenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return Err(Error::invalid("beta must be >= 0"));
        }
        if !(self.trimean_weight >= 0.0) {
            return Err(Error::invalid("trimean weight must be >= 0"));
        }
        match self.delta {
            DeltaMode::Fixed(d) if !(d > 0.0) => {
                return Err(Error::invalid("fixed delta must be positive"))
            }
            DeltaMode::AutoIqr { fraction } if !(fraction > 0.0) => {
                return Err(Error::invalid("delta fraction must be positive"))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Tracks the three quartiles of a stream and derives Tukey's fences and
/// the trimean mid-range (the differential clipping level).
#[derive(Debug, Clone)]
pub struct FenceTracker {
    config: FenceConfig,
    q1: QtfState,
    q2: QtfState,
    q3: QtfState,
    seen: usize,
    warmup_buf: Vec<f64>,
    running_min: f64,
    running_max: f64,
}

impl FenceTracker {
    pub fn new(config: FenceConfig) -> Result<Self> {
        config.validate()?;
        let delta0 = match config.delta {
            DeltaMode::Fixed(d) => d,
            // Provisional step until the warm-up IQR is known.
            DeltaMode::AutoIqr { .. } => 1e-6,
        };
        Ok(FenceTracker {
            config,
            q1: QtfState::new(0.25, delta0)?,
            q2: QtfState::new(0.50, delta0)?,
            q3: QtfState::new(0.75, delta0)?,
            seen: 0,
            warmup_buf: Vec::new(),
            running_min: f64::INFINITY,
            running_max: f64::NEG_INFINITY,
        })
    }

    pub fn config(&self) -> &FenceConfig {
        &self.config
    }

    /// Feed one sample.
    pub fn update(&mut self, y: f64) {
        if let DeltaMode::AutoIqr { fraction } = self.config.delta {
            if self.seen < self.config.warmup {
                self.warmup_buf.push(y);
                self.running_min = self.running_min.min(y);
                self.running_max = self.running_max.max(y);
                let range = self.running_max - self.running_min;
                if range > 0.0 {
                    let d = fraction * range;
                    self.q1.set_delta(d);
                    self.q2.set_delta(d);
                    self.q3.set_delta(d);
                }
            }
        }
        self.q1.step(y);
        self.q2.step(y);
        self.q3.step(y);
        self.seen += 1;
        if self.seen == self.config.warmup {
            self.finish_warmup();
        }
    }

    fn finish_warmup(&mut self) {
        if let DeltaMode::AutoIqr { fraction } = self.config.delta {
            if !self.warmup_buf.is_empty() {
                let q1 = sample_quantile(&self.warmup_buf, 0.25);
                let q2 = sample_quantile(&self.warmup_buf, 0.50);
                let q3 = sample_quantile(&self.warmup_buf, 0.75);
                let iqr = q3 - q1;
                let range = self.running_max - self.running_min;
                let scale = if iqr > 0.0 {
                    iqr
                } else if range > 0.0 {
                    range
                } else {
                    1.0
                };
                let d = fraction * scale;
                self.q1.set_delta(d);
                self.q2.set_delta(d);
                self.q3.set_delta(d);
                self.q1.set_estimate(q1);
                self.q2.set_estimate(q2);
                self.q3.set_estimate(q3);
            }
            self.warmup_buf = Vec::new();
        }
    }

    /// True once the warm-up window has passed and at least one sample
    /// has been seen.
    pub fn is_warm(&self) -> bool {
        self.seen >= self.config.warmup.max(1)
    }

    pub fn samples_seen(&self) -> usize {
        self.seen
    }

    pub fn delta(&self) -> f64 {
        self.q2.delta()
    }

    /// Tracked (Q1, Q2, Q3).
    pub fn quartiles(&self) -> (f64, f64, f64) {
        (self.q1.estimate(), self.q2.estimate(), self.q3.estimate())
    }

    /// Tukey's fences. If the tracked quartiles have transiently crossed,
    /// the ordered pair is used, so the lower fence never exceeds the
    /// upper one.
    pub fn fences(&self) -> (f64, f64) {
        let (q1, _, q3) = self.quartiles();
        let (lo_q, hi_q) = if q1 <= q3 { (q1, q3) } else { (q3, q1) };
        let iqr = hi_q - lo_q;
        (lo_q - self.config.beta * iqr, hi_q + self.config.beta * iqr)
    }

    /// The trimean mid-range (differential clipping level), clamped into
    /// the tracked quartile interval.
    pub fn dcl(&self) -> f64 {
        let (q1, q2, q3) = self.quartiles();
        let w = self.config.trimean_weight;
        let raw = (q1 + w * q2 + q3) / (w + 2.0);
        let (lo, hi) = if q1 <= q3 { (q1, q3) } else { (q3, q1) };
        raw.clamp(lo, hi)
    }
}

/// Exact sample quantile (linear interpolation between order statistics),
/// used as the oracle for the tracking filters and to seed warm starts.
pub fn sample_quantile(data: &[f64], q: f64) -> f64 {
    debug_assert!(!data.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Peakedness of a signal in decibels relative to Gaussian:
/// `10*log10(<(x - <x>)^4> / (3 <(x - <x>)^2>^2))`.
///
/// Zero for Gaussian noise, negative for sub-Gaussian waveforms (square
/// ~ -4.77 dBG, triangle ~ -2.22, sine ~ -3.01), positive for signals
/// with amplitude outliers.
pub fn peakedness_dbg(samples: &[f64]) -> Result<f64> {
    if samples.len() < 100 {
        return Err(Error::invalid(format_args!(
            "peakedness needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if m2 <= 0.0 {
        return Err(Error::UndefinedStatistic("zero variance"));
    }
    Ok(10.0 * (m4 / (3.0 * m2 * m2)).log10())
}

/// Windowed Hampel filter: each sample farther than `scale * MAD` from
/// the windowed median is replaced by that median.
///
/// This is the reference outlier remover the streaming clippers are
/// cross-validated against; the sliding-window order statistics make it
/// too expensive for the production path.
pub fn hampel_filter(signal: &Signal, window: usize, scale: f64) -> Result<Signal> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::invalid("window must be odd and >= 3"));
    }
    if window > signal.len() {
        return Err(Error::invalid("window longer than signal"));
    }
    if !(scale >= 0.0) {
        return Err(Error::invalid("scale must be >= 0"));
    }
    let x = signal.samples();
    let half = window / 2;
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    let mut devs = Vec::with_capacity(window);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        let med = sample_quantile(&x[lo..hi], 0.5);
        devs.clear();
        devs.extend(x[lo..hi].iter().map(|v| (v - med).abs()));
        let mad = sample_quantile(&devs, 0.5);
        if (x[i] - med).abs() > scale * mad {
            out.push(med);
        } else {
            out.push(x[i]);
        }
    }
    Ok(Signal::from_parts(out, signal.sample_rate()))
}
