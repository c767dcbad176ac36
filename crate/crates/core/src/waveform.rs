//! Deterministic periodic test waveforms.
//!
//! All generators take the waveform period in seconds and require it to
//! span at least two samples. The `*_offset` variants evaluate the
//! waveform at `t + offset`, which is how the experiment scenarios set up
//! constructive vs. destructive interference phases.

use alloc::vec;

use crate::error::{Error, Result};
use crate::signal::Signal;

// Test builds link std through dev-dependencies, whose inherent f64
// methods shadow this shim; real no_std consumers need it.
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::math::F64Ext as _;

fn check_period(period: f64, rate: f64) -> Result<()> {
    if !(rate > 0.0) {
        return Err(Error::invalid("sample rate must be positive"));
    }
    if !(period * rate >= 2.0) {
        return Err(Error::invalid(format_args!(
            "period must span at least 2 samples ({period} s at {rate} Hz does not)"
        )));
    }
    Ok(())
}

fn sample_count(duration: f64, rate: f64) -> Result<usize> {
    if !(duration > 0.0) {
        return Err(Error::invalid("duration must be positive"));
    }
    Ok((duration * rate).round() as usize)
}

/// Cosine tone: `amplitude * cos(2*pi*(t + offset)/period)`.
pub fn generate_tone_offset(
    period: f64,
    amplitude: f64,
    offset: f64,
    rate: f64,
    duration: f64,
) -> Result<Signal> {
    check_period(period, rate)?;
    let n = sample_count(duration, rate)?;
    let w = core::f64::consts::TAU / period;
    let samples = (0..n)
        .map(|i| amplitude * (w * (i as f64 / rate + offset)).cos())
        .collect();
    Ok(Signal::from_parts(samples, rate))
}

pub fn generate_tone(period: f64, amplitude: f64, rate: f64, duration: f64) -> Result<Signal> {
    generate_tone_offset(period, amplitude, 0.0, rate, duration)
}

/// Square wave: `+amplitude` for the first half of each period, `-amplitude`
/// for the second half.
pub fn generate_square_offset(
    period: f64,
    amplitude: f64,
    offset: f64,
    rate: f64,
    duration: f64,
) -> Result<Signal> {
    check_period(period, rate)?;
    let n = sample_count(duration, rate)?;
    let samples = (0..n)
        .map(|i| {
            let phase = ((i as f64 / rate + offset) / period).rem_euclid(1.0);
            if phase < 0.5 {
                amplitude
            } else {
                -amplitude
            }
        })
        .collect();
    Ok(Signal::from_parts(samples, rate))
}

pub fn generate_square(period: f64, amplitude: f64, rate: f64, duration: f64) -> Result<Signal> {
    generate_square_offset(period, amplitude, 0.0, rate, duration)
}

/// Symmetric triangle wave spanning `[-amplitude, +amplitude]`, starting
/// at the minimum.
pub fn generate_triangle(period: f64, amplitude: f64, rate: f64, duration: f64) -> Result<Signal> {
    check_period(period, rate)?;
    let n = sample_count(duration, rate)?;
    let samples = (0..n)
        .map(|i| {
            let phase = (i as f64 / (rate * period)).rem_euclid(1.0);
            amplitude * (1.0 - 4.0 * (phase - 0.5).abs())
        })
        .collect();
    Ok(Signal::from_parts(samples, rate))
}

/// Periodic impulse train: one impulse per period.
///
/// `area` is the impulse strength in amplitude-seconds; the discrete
/// impulse is a single sample of value `area * rate`, so the response of
/// any downstream filter keeps its amplitude scaling across sample rates.
pub fn generate_impulse_train_offset(
    period: f64,
    area: f64,
    offset: f64,
    rate: f64,
    duration: f64,
) -> Result<Signal> {
    check_period(period, rate)?;
    let n = sample_count(duration, rate)?;
    let mut samples = vec![0.0; n];
    let height = area * rate;
    let mut k = if offset >= 0.0 {
        0i64
    } else {
        ((-offset) / period).ceil() as i64
    };
    loop {
        let t = offset + k as f64 * period;
        let idx = (t * rate).round() as i64;
        if idx >= n as i64 {
            break;
        }
        if idx >= 0 {
            samples[idx as usize] += height;
        }
        k += 1;
    }
    Ok(Signal::from_parts(samples, rate))
}

pub fn generate_impulse_train(
    period: f64,
    area: f64,
    rate: f64,
    duration: f64,
) -> Result<Signal> {
    generate_impulse_train_offset(period, area, 0.0, rate, duration)
}

/// All per-period waveform kinds under one roof, for scenario configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    Tone,
    Square,
    Triangle,
    ImpulseTrain,
}

impl Waveform {
    pub fn generate(
        self,
        period: f64,
        amplitude: f64,
        rate: f64,
        duration: f64,
    ) -> Result<Signal> {
        match self {
            Waveform::Tone => generate_tone(period, amplitude, rate, duration),
            Waveform::Square => generate_square(period, amplitude, rate, duration),
            Waveform::Triangle => generate_triangle(period, amplitude, rate, duration),
            Waveform::ImpulseTrain => generate_impulse_train(period, amplitude, rate, duration),
        }
    }
}
