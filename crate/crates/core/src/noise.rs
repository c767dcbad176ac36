//! Noise generators for the interference experiments: wideband thermal
//! noise, Poisson impulse trains with Gaussian amplitudes, periodic
//! Gaussian bursts, and band-limited Gaussian signals shaped by a
//! root-raised-cosine filter.
//!
//! Every generator is a pure function of its parameters and seed.

use alloc::vec;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::fir::{design_rrc, FirFilter};
use crate::rng::RngSeed;
use crate::signal::Signal;

// Test builds link std through dev-dependencies, whose inherent f64
// methods shadow this shim; real no_std consumers need it.
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::math::F64Ext as _;

/// Default root-raised-cosine roll-off used when none is specified.
pub const DEFAULT_RRC_ROLLOFF: f64 = 0.25;

/// Default RRC span in symbol periods on each side of the peak.
pub const DEFAULT_RRC_SPAN: usize = 16;

/// Declarative description of one noise component of a mixture.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    /// White Gaussian noise with the given mean-square power.
    ThermalGaussian { power: f64 },
    /// Poisson-arrival impulses with normally distributed amplitudes.
    PoissonImpulses { lambda_hz: f64, amp_std: f64 },
    /// Gaussian noise gated by a periodic on/off window.
    PeriodicGaussianBursts {
        burst_period: f64,
        duty_cycle: f64,
        power_in_burst: f64,
    },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::ThermalGaussian { power } => {
                if power < 0.0 {
                    return Err(Error::invalid("thermal power must be >= 0"));
                }
            }
            NoiseSpec::PoissonImpulses { lambda_hz, .. } => {
                if !(lambda_hz > 0.0) {
                    return Err(Error::invalid("poisson rate must be > 0"));
                }
            }
            NoiseSpec::PeriodicGaussianBursts {
                duty_cycle,
                power_in_burst,
                burst_period,
            } => {
                if !(duty_cycle > 0.0 && duty_cycle <= 1.0) {
                    return Err(Error::invalid("duty cycle must be in (0, 1]"));
                }
                if power_in_burst < 0.0 {
                    return Err(Error::invalid("burst power must be >= 0"));
                }
                if !(burst_period > 0.0) {
                    return Err(Error::invalid("burst period must be > 0"));
                }
            }
        }
        Ok(())
    }

    pub fn generate(&self, duration: f64, rate: f64, seed: RngSeed) -> Result<Signal> {
        self.validate()?;
        match *self {
            NoiseSpec::ThermalGaussian { power } => generate_thermal(duration, power, rate, seed),
            NoiseSpec::PoissonImpulses { lambda_hz, amp_std } => {
                generate_poisson_impulses(duration, lambda_hz, amp_std, rate, seed)
            }
            NoiseSpec::PeriodicGaussianBursts {
                burst_period,
                duty_cycle,
                power_in_burst,
            } => generate_bursts(duration, burst_period, duty_cycle, power_in_burst, rate, seed),
        }
    }
}

fn sample_count(duration: f64, rate: f64) -> Result<usize> {
    if !(duration > 0.0) {
        return Err(Error::invalid("duration must be positive"));
    }
    if !(rate > 0.0) {
        return Err(Error::invalid("sample rate must be positive"));
    }
    Ok((duration * rate).round() as usize)
}

/// White Gaussian noise: independent zero-mean samples with variance
/// `power`.
pub fn generate_thermal(duration: f64, power: f64, rate: f64, seed: RngSeed) -> Result<Signal> {
    let n = sample_count(duration, rate)?;
    if power < 0.0 {
        return Err(Error::invalid("power must be >= 0"));
    }
    let sigma = power.sqrt();
    let mut rng = seed.rng();
    let samples = (0..n)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(Signal::from_parts(samples, rate))
}

/// Poisson impulse train: zero everywhere except at Poisson-arrival sample
/// indices, which hold Gaussian amplitudes (std `amp_std`) scaled by the
/// sample rate (discrete Dirac convention, matching
/// [`crate::waveform::generate_impulse_train`]).
///
/// Arrivals are drawn as exponential inter-arrival gaps, so multiple
/// arrivals landing on one sample are merged by summation. That regime
/// (`lambda * dt >= 1`) is the intended pileup limit, not an error; use
/// [`poisson_pileup_expected`] to surface a diagnostic to users.
pub fn generate_poisson_impulses(
    duration: f64,
    lambda_hz: f64,
    amp_std: f64,
    rate: f64,
    seed: RngSeed,
) -> Result<Signal> {
    let n = sample_count(duration, rate)?;
    if !(lambda_hz > 0.0) {
        return Err(Error::invalid("lambda must be > 0"));
    }
    let mut rng = seed.rng();
    let gap = Exp::new(lambda_hz).map_err(|_| Error::invalid("lambda must be finite"))?;
    let mut samples = vec![0.0; n];
    let mut t = gap.sample(&mut rng);
    let height = amp_std * rate;
    while t * rate < n as f64 {
        let idx = (t * rate) as usize;
        if idx < n {
            let a: f64 = rng.sample(StandardNormal);
            samples[idx] += a * height;
        }
        t += gap.sample(&mut rng);
    }
    Ok(Signal::from_parts(samples, rate))
}

/// True when the Poisson rate is at or beyond one expected arrival per
/// sample, i.e. arrivals will routinely merge.
pub fn poisson_pileup_expected(lambda_hz: f64, rate: f64) -> bool {
    lambda_hz >= rate
}

/// Periodic Gaussian bursts: noise of mean-square `power_in_burst` inside
/// windows of width `duty_cycle * burst_period`, zero outside. The first
/// burst starts at t = 0.
pub fn generate_bursts(
    duration: f64,
    burst_period: f64,
    duty_cycle: f64,
    power_in_burst: f64,
    rate: f64,
    seed: RngSeed,
) -> Result<Signal> {
    generate_bursts_offset(
        duration,
        burst_period,
        duty_cycle,
        power_in_burst,
        0.0,
        rate,
        seed,
    )
}

/// [`generate_bursts`] with the burst pattern evaluated at `t + offset`.
pub fn generate_bursts_offset(
    duration: f64,
    burst_period: f64,
    duty_cycle: f64,
    power_in_burst: f64,
    offset: f64,
    rate: f64,
    seed: RngSeed,
) -> Result<Signal> {
    let n = sample_count(duration, rate)?;
    if !(duty_cycle > 0.0 && duty_cycle <= 1.0) {
        return Err(Error::invalid("duty cycle must be in (0, 1]"));
    }
    if !(burst_period * rate >= 2.0) {
        return Err(Error::invalid("burst period must span at least 2 samples"));
    }
    if power_in_burst < 0.0 {
        return Err(Error::invalid("power must be >= 0"));
    }
    let sigma = power_in_burst.sqrt();
    let mut rng = seed.rng();
    let samples = (0..n)
        .map(|i| {
            let phase = ((i as f64 / rate + offset) / burst_period).rem_euclid(1.0);
            // Draw unconditionally so the gating phase does not change the
            // sample stream consumed per output sample.
            let g: f64 = rng.sample(StandardNormal);
            if phase < duty_cycle {
                sigma * g
            } else {
                0.0
            }
        })
        .collect();
    Ok(Signal::from_parts(samples, rate))
}

/// Band-limited Gaussian signal: white noise shaped by a root-raised-cosine
/// filter of half-power bandwidth `b0_hz`, normalized to unit mean-square
/// in expectation (the shaping filter has unit energy).
pub fn generate_rrc_signal(b0_hz: f64, duration: f64, rate: f64, seed: RngSeed) -> Result<Signal> {
    generate_rrc_signal_with(
        b0_hz,
        DEFAULT_RRC_ROLLOFF,
        DEFAULT_RRC_SPAN,
        duration,
        rate,
        seed,
    )
}

/// [`generate_rrc_signal`] with explicit roll-off and filter span.
pub fn generate_rrc_signal_with(
    b0_hz: f64,
    rolloff: f64,
    span_symbols: usize,
    duration: f64,
    rate: f64,
    seed: RngSeed,
) -> Result<Signal> {
    if !(b0_hz > 0.0) {
        return Err(Error::invalid("bandwidth must be > 0"));
    }
    if b0_hz > 0.45 * rate {
        return Err(Error::invalid(format_args!(
            "bandwidth {b0_hz} Hz too close to Nyquist at rate {rate} Hz"
        )));
    }
    let white = generate_thermal(duration, 1.0, rate, seed)?;
    let rrc = design_rrc(b0_hz, rolloff, span_symbols, rate)?;
    let mut filter = FirFilter::new(&rrc);
    filter.apply(&white)
}
