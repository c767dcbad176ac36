//! Linear-phase FIR design and streaming application.
//!
//! Designs use the windowed-sinc method with a Kaiser window (60 dB
//! stopband by default). All designs here are type-I (odd length,
//! symmetric), built by computing one half and mirroring, so the
//! symmetry is exact and the group delay is an integer number of
//! samples. That makes the spectral complement well defined:
//! `complement[n] = delta[n - D] - band[n]`, and the two filter outputs
//! sum back to the delayed input exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::Signal;

// Test builds link std through dev-dependencies, whose inherent f64
// methods shadow this shim; real no_std consumers need it.
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::math::F64Ext as _;

/// Default stopband attenuation for Kaiser designs, in dB.
pub const DEFAULT_STOPBAND_DB: f64 = 60.0;

const MAX_TAPS: usize = 1 << 20;

/// An FIR filter design bound to a sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct FirDesign {
    taps: Vec<f64>,
    sample_rate: f64,
}

impl FirDesign {
    /// Wrap raw taps. Rejects empty tap sets and non-finite coefficients.
    pub fn from_taps(taps: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("FIR needs at least one tap"));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::design("non-finite FIR tap"));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::invalid("sample rate must be positive"));
        }
        Ok(FirDesign { taps, sample_rate })
    }

    /// The single-tap identity filter.
    pub fn identity(sample_rate: f64) -> Self {
        FirDesign {
            taps: vec![1.0],
            sample_rate,
        }
    }

    /// A pure delay of `delay` samples.
    pub fn delay(delay: usize, sample_rate: f64) -> Self {
        let mut taps = vec![0.0; delay + 1];
        taps[delay] = 1.0;
        FirDesign { taps, sample_rate }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// True when the taps are symmetric (tolerance 1e-15 relative to the
    /// largest tap), i.e. the filter is linear-phase.
    pub fn is_linear_phase(&self) -> bool {
        let n = self.taps.len();
        let scale = self
            .taps
            .iter()
            .fold(0.0f64, |m, t| m.max(t.abs()))
            .max(1.0);
        (0..n / 2).all(|i| (self.taps[i] - self.taps[n - 1 - i]).abs() <= 1e-15 * scale)
    }

    /// Group delay in samples for odd-length linear-phase designs.
    pub fn group_delay(&self) -> Result<usize> {
        if self.taps.len().is_multiple_of(2) {
            return Err(Error::invalid(
                "even-length FIR has a half-sample group delay",
            ));
        }
        if !self.is_linear_phase() {
            return Err(Error::invalid("taps are not symmetric"));
        }
        Ok(self.taps.len() / 2)
    }

    /// Complex frequency response at `freq_hz`.
    pub fn response_at(&self, freq_hz: f64) -> Complex64 {
        let w = core::f64::consts::TAU * freq_hz / self.sample_rate;
        self.taps
            .iter()
            .enumerate()
            .map(|(n, &t)| t * Complex64::new(0.0, -w * n as f64).exp())
            .sum()
    }

    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        self.response_at(freq_hz).norm()
    }

    pub fn magnitude_db_at(&self, freq_hz: f64) -> f64 {
        20.0 * self.magnitude_at(freq_hz).log10()
    }

    /// Sum of squared taps (white-noise power gain).
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum()
    }
}

/// Streaming state for applying a [`FirDesign`].
///
/// One instance per stream: chunked processing continues exactly where
/// the previous chunk stopped, bit-for-bit identical to one-shot use.
#[derive(Debug, Clone)]
pub struct FirFilter {
    taps: Vec<f64>,
    buf: Vec<f64>,
    pos: usize,
    sample_rate: f64,
}

impl FirFilter {
    pub fn new(design: &FirDesign) -> Self {
        FirFilter {
            taps: design.taps.clone(),
            buf: vec![0.0; design.taps.len()],
            pos: 0,
            sample_rate: design.sample_rate,
        }
    }

    pub fn reset(&mut self) {
        self.buf.iter_mut().for_each(|x| *x = 0.0);
        self.pos = 0;
    }

    /// Push one sample, get one output sample.
    pub fn process(&mut self, x: f64) -> f64 {
        let n = self.taps.len();
        self.buf[self.pos] = x;
        // taps[k] pairs with buf[(pos - k) mod n]; the ring wraps once,
        // giving two contiguous runs. Fixed accumulation order keeps
        // chunked and one-shot runs bit-identical.
        let (head, tail) = self.taps.split_at(self.pos + 1);
        let mut acc = 0.0;
        for (t, b) in head.iter().zip(self.buf[..=self.pos].iter().rev()) {
            acc += t * b;
        }
        for (t, b) in tail.iter().zip(self.buf[self.pos + 1..].iter().rev()) {
            acc += t * b;
        }
        self.pos = (self.pos + 1) % n;
        acc
    }

    pub fn process_slice(&mut self, input: &[f64]) -> Vec<f64> {
        input.iter().map(|&x| self.process(x)).collect()
    }

    /// Filter a whole signal, retaining state for streaming continuation.
    pub fn apply(&mut self, signal: &Signal) -> Result<Signal> {
        if signal.sample_rate() != self.sample_rate {
            return Err(Error::RateMismatch {
                expected: self.sample_rate,
                actual: signal.sample_rate(),
            });
        }
        Ok(Signal::from_parts(
            self.process_slice(signal.samples()),
            self.sample_rate,
        ))
    }
}

/// One-shot convenience: filter `signal` through a fresh instance of
/// `design`.
pub fn apply(design: &FirDesign, signal: &Signal) -> Result<Signal> {
    FirFilter::new(design).apply(signal)
}

/// A band filter and its spectral complement.
///
/// Invariant: `band.taps + complement.taps` is a unit impulse at the
/// shared group delay, so the summed outputs reconstruct the delayed
/// input exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementaryPair {
    pub band: FirDesign,
    pub complement: FirDesign,
    pub group_delay: usize,
}

/// Build the spectral complement of a linear-phase band filter:
/// `complement[n] = delta[n - D] - band[n]`.
pub fn make_complement(band: &FirDesign) -> Result<ComplementaryPair> {
    let delay = band.group_delay().map_err(|_| {
        Error::invalid("complement requires an odd-length linear-phase filter")
    })?;
    let mut taps = band.taps.iter().map(|t| -t).collect::<Vec<_>>();
    taps[delay] += 1.0;
    Ok(ComplementaryPair {
        band: band.clone(),
        complement: FirDesign {
            taps,
            sample_rate: band.sample_rate,
        },
        group_delay: delay,
    })
}

// ── Kaiser windowed-sinc designs ───────────────────────────────────────

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

fn kaiser_beta(atten_db: f64) -> f64 {
    if atten_db > 50.0 {
        0.1102 * (atten_db - 8.7)
    } else if atten_db >= 21.0 {
        0.5842 * (atten_db - 21.0).powf(0.4) + 0.07886 * (atten_db - 21.0)
    } else {
        0.0
    }
}

/// Odd tap count for the requested attenuation and transition width.
fn kaiser_length(atten_db: f64, transition_hz: f64, rate: f64) -> Result<usize> {
    if !(transition_hz > 0.0) {
        return Err(Error::invalid("transition width must be positive"));
    }
    let dw = core::f64::consts::TAU * transition_hz / rate;
    let n = ((atten_db - 7.95) / (2.285 * dw)).ceil() as usize + 1;
    let n = if n.is_multiple_of(2) { n + 1 } else { n };
    let n = n.max(3);
    if n > MAX_TAPS {
        return Err(Error::design(format!(
            "Kaiser design needs {n} taps (transition {transition_hz} Hz too narrow at {rate} Hz)"
        )));
    }
    Ok(n)
}

/// Symmetric windowed-sinc kernel with DC gain normalized to exactly 1.
fn windowed_sinc(cutoff_hz: f64, n: usize, beta: f64, rate: f64) -> Vec<f64> {
    debug_assert!(!n.is_multiple_of(2));
    let half = n / 2;
    let wc = core::f64::consts::TAU * cutoff_hz / rate;
    let denom = bessel_i0(beta);
    let mut taps = vec![0.0; n];
    for k in 0..=half {
        let m = k as f64;
        let sinc = if k == 0 {
            wc / core::f64::consts::PI
        } else {
            (wc * m).sin() / (core::f64::consts::PI * m)
        };
        let frac = m / half.max(1) as f64;
        let window = bessel_i0(beta * (1.0 - frac * frac).sqrt()) / denom;
        let v = sinc * window;
        taps[half + k] = v;
        taps[half - k] = v;
    }
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

fn check_cutoff(cutoff_hz: f64, rate: f64) -> Result<()> {
    if !(cutoff_hz > 0.0 && cutoff_hz < rate / 2.0) {
        return Err(Error::invalid(format_args!(
            "cutoff {cutoff_hz} Hz must lie in (0, {}) Hz",
            rate / 2.0
        )));
    }
    Ok(())
}

/// Linear-phase lowpass. The transition band is centered on the cutoff.
pub fn design_lowpass(
    cutoff_hz: f64,
    transition_hz: f64,
    stopband_db: f64,
    rate: f64,
) -> Result<FirDesign> {
    check_cutoff(cutoff_hz, rate)?;
    let n = kaiser_length(stopband_db, transition_hz, rate)?;
    let beta = kaiser_beta(stopband_db);
    Ok(FirDesign {
        taps: windowed_sinc(cutoff_hz, n, beta, rate),
        sample_rate: rate,
    })
}

/// Linear-phase highpass, built as the spectral complement of the
/// corresponding lowpass.
pub fn design_highpass(
    cutoff_hz: f64,
    transition_hz: f64,
    stopband_db: f64,
    rate: f64,
) -> Result<FirDesign> {
    let lp = design_lowpass(cutoff_hz, transition_hz, stopband_db, rate)?;
    Ok(make_complement(&lp)?.complement)
}

/// Linear-phase bandpass over `[low_hz, high_hz]`.
pub fn design_bandpass(
    low_hz: f64,
    high_hz: f64,
    transition_hz: f64,
    stopband_db: f64,
    rate: f64,
) -> Result<FirDesign> {
    check_cutoff(low_hz, rate)?;
    check_cutoff(high_hz, rate)?;
    if low_hz >= high_hz {
        return Err(Error::invalid("bandpass needs low_hz < high_hz"));
    }
    let n = kaiser_length(stopband_db, transition_hz, rate)?;
    let beta = kaiser_beta(stopband_db);
    let hi = windowed_sinc(high_hz, n, beta, rate);
    let lo = windowed_sinc(low_hz, n, beta, rate);
    let taps = hi.iter().zip(&lo).map(|(a, b)| a - b).collect();
    Ok(FirDesign {
        taps,
        sample_rate: rate,
    })
}

/// Linear-phase bandstop: the spectral complement of the bandpass.
pub fn design_bandstop(
    low_hz: f64,
    high_hz: f64,
    transition_hz: f64,
    stopband_db: f64,
    rate: f64,
) -> Result<FirDesign> {
    let bp = design_bandpass(low_hz, high_hz, transition_hz, stopband_db, rate)?;
    Ok(make_complement(&bp)?.complement)
}

// ── Root-raised-cosine ─────────────────────────────────────────────────

/// Root-raised-cosine pulse-shaping filter with half-power bandwidth
/// `b0_hz` (the -3 dB point of an RRC sits at half the symbol rate for
/// any roll-off, so the symbol period is `1 / (2 * b0_hz)`).
///
/// `span_symbols` is the total tap span in symbol periods (at least 8).
/// Taps are normalized to unit energy, so the cascade of two of these
/// filters is a Nyquist (zero-ISI) raised-cosine response.
pub fn design_rrc(
    b0_hz: f64,
    rolloff: f64,
    span_symbols: usize,
    rate: f64,
) -> Result<FirDesign> {
    if !(b0_hz > 0.0 && b0_hz < rate / 2.0) {
        return Err(Error::invalid("bandwidth must lie in (0, rate/2)"));
    }
    if !(0.0..=1.0).contains(&rolloff) {
        return Err(Error::invalid("roll-off must lie in [0, 1]"));
    }
    if span_symbols < 8 {
        return Err(Error::invalid("RRC span must be at least 8 symbol periods"));
    }
    let sps = rate / (2.0 * b0_hz); // samples per symbol
    let half = ((span_symbols as f64 / 2.0) * sps).round() as usize;
    let n = 2 * half + 1;
    if n > MAX_TAPS {
        return Err(Error::design("RRC span too long for this rate"));
    }
    let mut taps = vec![0.0; n];
    for k in 0..=half {
        let t = k as f64 / sps; // symbol units
        let v = rrc_tap(t, rolloff);
        taps[half + k] = v;
        taps[half - k] = v;
    }
    let energy: f64 = taps.iter().map(|t| t * t).sum();
    let norm = energy.sqrt();
    taps.iter_mut().for_each(|t| *t /= norm);
    Ok(FirDesign {
        taps,
        sample_rate: rate,
    })
}

fn rrc_tap(t: f64, r: f64) -> f64 {
    use core::f64::consts::PI;
    if t == 0.0 {
        return 1.0 - r + 4.0 * r / PI;
    }
    if r > 0.0 {
        let x = 4.0 * r * t;
        if (x.abs() - 1.0).abs() < 1e-9 {
            let a = PI / (4.0 * r);
            return (r / core::f64::consts::SQRT_2)
                * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
        }
        (((PI * t * (1.0 - r)).sin()) + 4.0 * r * t * ((PI * t * (1.0 + r)).cos()))
            / (PI * t * (1.0 - x * x))
    } else {
        (PI * t).sin() / (PI * t)
    }
}

// ── Excess-band observation filter ─────────────────────────────────────

/// Filter that suppresses the signal band and passes the excess band
/// where wideband outlier noise remains observable.
///
/// For a baseband signal (`f_lo` at or near zero) this is a highpass;
/// for a passband signal it is a bandstop. Either is cascaded with a
/// lowpass limiting the view to `f_hi + excess_extent` (skipped when
/// that reaches Nyquist). Rejection over the signal band is >= 40 dB.
pub fn excess_band_filter(
    signal_band: (f64, f64),
    excess_extent: f64,
    rate: f64,
) -> Result<FirDesign> {
    let (f_lo, f_hi) = signal_band;
    if !(f_hi > f_lo && f_lo >= 0.0) {
        return Err(Error::invalid("signal band must satisfy 0 <= f_lo < f_hi"));
    }
    if excess_extent <= f_hi - f_lo {
        return Err(Error::invalid(
            "excess band must be wider than the signal band",
        ));
    }
    let width = f_hi - f_lo;
    let tw = 0.4 * width;
    let stop_db = 60.0;
    let reject = if f_lo < 0.01 * f_hi {
        design_highpass(f_hi + tw / 2.0, tw, stop_db, rate)?
    } else {
        let lo_edge = (f_lo - tw / 2.0).max(tw);
        design_bandstop(lo_edge, f_hi + tw / 2.0, tw, stop_db, rate)?
    };
    let top = f_hi + excess_extent;
    if top >= 0.45 * rate {
        return Ok(reject);
    }
    let tw_top = 0.2 * top;
    let limit = design_lowpass(top, tw_top, stop_db, rate)?;
    Ok(FirDesign {
        taps: convolve(reject.taps(), limit.taps()),
        sample_rate: rate,
    })
}

pub(crate) fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
