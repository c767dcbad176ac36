//! Complementary ADiC filters: split the input into the signal band and
//! its spectral complement (the excess band), clip outliers in the excess
//! band, and recombine.
//!
//! Because an impulse splits coherently between the two paths, clipping
//! the spike in the excess band leaves behind the negative of its in-band
//! component, which cancels the in-band damage on recombination. That is
//! what lets a CAF remove in-band outlier energy it never observes
//! directly.
//!
//! Variants for complex interference: [`DerivativeCafChain`] (clip the
//! first difference, then re-integrate — turns sub-Gaussian square-wave
//! interference into a clippable impulse train) and [`BandstopCafChain`]
//! (suppress strong adjacent-channel interference so the impulses become
//! visible to the clipper again). The "shared band" case applies the
//! clipper directly with no band split.

use alloc::vec::Vec;

use crate::adic::{AdicConfig, FeedbackAdic};
use crate::error::{Error, Result};
use crate::fir::{design_lowpass, make_complement, ComplementaryPair, FirDesign, FirFilter};
use crate::robust::{DeltaMode, FenceConfig};
use crate::signal::Signal;

// Test builds link std through dev-dependencies, whose inherent f64
// methods shadow this shim; real no_std consumers need it.
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::math::F64Ext as _;

/// Default clipper time parameter for a CAF with the given signal-band
/// cutoff: the DCL loop corner sits at twice the band edge.
///
/// The corner must stay far below the excess-noise bandwidth (so the
/// clipper's intrinsic highpass does not eat the observable outliers),
/// but it must be fast enough for the DCL to follow each clipped spike's
/// smooth in-band compensation tail: replacing out-of-range samples with
/// a DCL that tracks the tail is what preserves the in-band cancellation
/// when strong impulses drive the tail itself outside the fences.
pub fn default_caf_tau(band_cutoff_hz: f64) -> f64 {
    1.0 / (core::f64::consts::TAU * 2.0 * band_cutoff_hz)
}

/// The frozen fence parameters used by all capacity sweeps.
///
/// `beta = 6` puts the fences far into the tail of a Gaussian difference
/// signal, so outlier-free mixtures are passed untouched (the no-harm
/// constraint) and the compensation tails of clipped impulses survive,
/// while outlier spikes, which protrude orders of magnitude beyond any
/// fence setting, are still clipped.
pub fn default_sweep_fences() -> FenceConfig {
    FenceConfig {
        beta: 6.0,
        trimean_weight: 2.0,
        delta: DeltaMode::AutoIqr { fraction: 0.01 },
        warmup: 4096,
    }
}

/// Complementary filter configuration: the band split, the clipper that
/// runs on the excess path, and an optional bypass that reduces the whole
/// structure to a pure delay.
#[derive(Debug, Clone)]
pub struct CafConfig {
    pub pair: ComplementaryPair,
    pub adic: AdicConfig,
    pub bypass_adic: bool,
}

impl CafConfig {
    pub fn new(pair: ComplementaryPair, adic: AdicConfig) -> Self {
        CafConfig {
            pair,
            adic,
            bypass_adic: false,
        }
    }

    /// Standard baseband setup: linear-phase lowpass at `1.2 * b0` and its
    /// complement, clipper time constant a decade below the band edge.
    pub fn baseband(b0_hz: f64, fences: FenceConfig, rate: f64) -> Result<Self> {
        let cutoff = 1.2 * b0_hz;
        let band = design_lowpass(cutoff, 0.4 * b0_hz, 60.0, rate)?;
        let pair = make_complement(&band)?;
        Ok(CafConfig::new(
            pair,
            AdicConfig::self_tracked(default_caf_tau(cutoff), fences),
        ))
    }

    pub fn bypassed(mut self) -> Self {
        self.bypass_adic = true;
        self
    }

    /// Group delay of the structure in samples.
    pub fn delay(&self) -> usize {
        self.pair.group_delay
    }
}

/// Per-stage tap points of one CAF run, for trace export.
#[derive(Debug, Clone)]
pub struct CafTrace {
    pub band: Signal,
    pub excess: Signal,
    pub adic_out: Signal,
    pub output: Signal,
}

/// Streaming CAF processor. One instance per stream.
#[derive(Debug, Clone)]
pub struct Caf {
    band: FirFilter,
    complement: FirFilter,
    adic: Option<FeedbackAdic>,
    delay: usize,
    sample_rate: f64,
}

impl Caf {
    pub fn new(config: &CafConfig) -> Result<Self> {
        let rate = config.pair.band.sample_rate();
        if config.pair.complement.sample_rate() != rate {
            return Err(Error::invalid("band/complement rate mismatch"));
        }
        let adic = if config.bypass_adic {
            None
        } else {
            Some(FeedbackAdic::new(&config.adic, rate)?)
        };
        Ok(Caf {
            band: FirFilter::new(&config.pair.band),
            complement: FirFilter::new(&config.pair.complement),
            adic,
            delay: config.pair.group_delay,
            sample_rate: rate,
        })
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn clip_fraction(&self) -> f64 {
        self.adic.as_ref().map_or(0.0, FeedbackAdic::clip_fraction)
    }

    /// Process one sample: band path plus (clipped) excess path.
    pub fn step(&mut self, x: f64) -> f64 {
        let b = self.band.process(x);
        let e = self.complement.process(x);
        let cleaned = match self.adic.as_mut() {
            Some(adic) => adic.step(e).0,
            None => e,
        };
        b + cleaned
    }

    pub fn process(&mut self, signal: &Signal) -> Result<Signal> {
        self.check_rate(signal)?;
        let out: Vec<f64> = signal.samples().iter().map(|&x| self.step(x)).collect();
        Ok(Signal::from_parts(out, self.sample_rate))
    }

    /// Process while recording every stage, for figure regeneration.
    pub fn process_traced(&mut self, signal: &Signal) -> Result<CafTrace> {
        self.check_rate(signal)?;
        let n = signal.len();
        let mut band = Vec::with_capacity(n);
        let mut excess = Vec::with_capacity(n);
        let mut adic_out = Vec::with_capacity(n);
        let mut output = Vec::with_capacity(n);
        for &x in signal.samples() {
            let b = self.band.process(x);
            let e = self.complement.process(x);
            let cleaned = match self.adic.as_mut() {
                Some(adic) => adic.step(e).0,
                None => e,
            };
            band.push(b);
            excess.push(e);
            adic_out.push(cleaned);
            output.push(b + cleaned);
        }
        let rate = self.sample_rate;
        Ok(CafTrace {
            band: Signal::from_parts(band, rate),
            excess: Signal::from_parts(excess, rate),
            adic_out: Signal::from_parts(adic_out, rate),
            output: Signal::from_parts(output, rate),
        })
    }

    fn check_rate(&self, signal: &Signal) -> Result<()> {
        if signal.sample_rate() != self.sample_rate {
            return Err(Error::RateMismatch {
                expected: self.sample_rate,
                actual: signal.sample_rate(),
            });
        }
        Ok(())
    }
}

/// One-shot CAF application.
pub fn caf_process(config: &CafConfig, signal: &Signal) -> Result<Signal> {
    Caf::new(config)?.process(signal)
}

/// One-shot shared-band clipping: the signal+noise mixture is treated as
/// noise with outliers and clipped directly, ahead of whatever baseband
/// filtering follows.
pub fn shared_band_process(adic: &AdicConfig, signal: &Signal) -> Result<Signal> {
    let mut clipper = FeedbackAdic::new(adic, signal.sample_rate())?;
    Ok(clipper.process(signal))
}

/// Derivative chain: clip the first difference with a CAF, leaky-integrate
/// the result, then bandpass. Gain-compensated so an in-band tone passes
/// at unit gain.
#[derive(Debug, Clone)]
pub struct DerivativeCafChain {
    prev: f64,
    primed: bool,
    caf: Caf,
    integ: f64,
    lambda: f64,
    bandpass: FirFilter,
    gain: f64,
    delay: usize,
    sample_rate: f64,
}

impl DerivativeCafChain {
    /// `leak_hz` sets the integrator leak corner (well below the band);
    /// `bandpass` is the final band filter of the chain.
    pub fn new(caf: &CafConfig, bandpass: &FirDesign, leak_hz: f64, rate: f64) -> Result<Self> {
        if bandpass.sample_rate() != rate || caf.pair.band.sample_rate() != rate {
            return Err(Error::invalid("all stages must share the sample rate"));
        }
        if !(leak_hz > 0.0) {
            return Err(Error::invalid("leak frequency must be positive"));
        }
        let lambda = 1.0 - core::f64::consts::TAU * leak_hz / rate;
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::invalid("leak frequency too high for this rate"));
        }
        // Compensate the differencer/leaky-integrator droop at the band
        // center so in-band tones pass at unit gain.
        let f0 = peak_frequency(bandpass);
        let w0 = core::f64::consts::TAU * f0 / rate;
        let num = (1.0 - lambda * w0.cos()).hypot(lambda * w0.sin());
        let den = (1.0 - w0.cos()).hypot(w0.sin());
        let gain = num / den;
        let delay = caf.delay() + bandpass.group_delay()?;
        Ok(DerivativeCafChain {
            prev: 0.0,
            primed: false,
            caf: Caf::new(caf)?,
            integ: 0.0,
            lambda,
            bandpass: FirFilter::new(bandpass),
            gain,
            delay,
            sample_rate: rate,
        })
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn clip_fraction(&self) -> f64 {
        self.caf.clip_fraction()
    }

    pub fn step(&mut self, x: f64) -> f64 {
        if !self.primed {
            // Start the differencer from the first sample so there is no
            // artificial step at t = 0.
            self.prev = x;
            self.primed = true;
        }
        let diff = x - self.prev;
        self.prev = x;
        let cleaned = self.caf.step(diff);
        self.integ = self.lambda * self.integ + cleaned;
        self.gain * self.bandpass.process(self.integ)
    }

    pub fn process(&mut self, signal: &Signal) -> Result<Signal> {
        if signal.sample_rate() != self.sample_rate {
            return Err(Error::RateMismatch {
                expected: self.sample_rate,
                actual: signal.sample_rate(),
            });
        }
        let out: Vec<f64> = signal.samples().iter().map(|&x| self.step(x)).collect();
        Ok(Signal::from_parts(out, self.sample_rate))
    }
}

/// One-shot derivative-chain application.
pub fn derivative_chain_process(
    caf: &CafConfig,
    bandpass: &FirDesign,
    leak_hz: f64,
    signal: &Signal,
) -> Result<Signal> {
    DerivativeCafChain::new(caf, bandpass, leak_hz, signal.sample_rate())?.process(signal)
}

/// Bandstop-then-CAF chain: a front bandstop removes strong non-outlier
/// interference (e.g. an adjacent channel), revealing the impulsive noise
/// to the CAF; the downstream baseband filter removes what the clipper
/// reshapes into the stopband (the "cockroach effect" residue).
#[derive(Debug, Clone)]
pub struct BandstopCafChain {
    bandstop: FirFilter,
    caf: Caf,
    delay: usize,
    sample_rate: f64,
}

impl BandstopCafChain {
    pub fn new(bandstop: &FirDesign, caf: &CafConfig) -> Result<Self> {
        let rate = caf.pair.band.sample_rate();
        if bandstop.sample_rate() != rate {
            return Err(Error::invalid("bandstop/CAF rate mismatch"));
        }
        let delay = bandstop.group_delay()? + caf.delay();
        Ok(BandstopCafChain {
            bandstop: FirFilter::new(bandstop),
            caf: Caf::new(caf)?,
            delay,
            sample_rate: rate,
        })
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn clip_fraction(&self) -> f64 {
        self.caf.clip_fraction()
    }

    pub fn step(&mut self, x: f64) -> f64 {
        let v = self.bandstop.process(x);
        self.caf.step(v)
    }

    pub fn process(&mut self, signal: &Signal) -> Result<Signal> {
        if signal.sample_rate() != self.sample_rate {
            return Err(Error::RateMismatch {
                expected: self.sample_rate,
                actual: signal.sample_rate(),
            });
        }
        let out: Vec<f64> = signal.samples().iter().map(|&x| self.step(x)).collect();
        Ok(Signal::from_parts(out, self.sample_rate))
    }
}

/// One-shot bandstop-then-CAF application.
pub fn bandstop_prefilter_process(
    bandstop: &FirDesign,
    caf: &CafConfig,
    signal: &Signal,
) -> Result<Signal> {
    BandstopCafChain::new(bandstop, caf)?.process(signal)
}

fn peak_frequency(design: &FirDesign) -> f64 {
    let fs = design.sample_rate();
    let mut best = (0.0, 0.0);
    for i in 0..512 {
        let f = fs / 2.0 * i as f64 / 512.0;
        let m = design.magnitude_at(f);
        if m > best.1 {
            best = (f, m);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adic::BasicAdic;
    use crate::fir::design_bandpass;
    use crate::noise::{generate_rrc_signal, generate_thermal};
    use crate::waveform::generate_tone;
    use crate::RngSeed;

    #[test]
    fn bypassed_caf_is_pure_delay() {
        let rate = 64_000.0;
        let cfg = CafConfig::baseband(1000.0, default_sweep_fences(), rate)
            .unwrap()
            .bypassed();
        let d = cfg.delay();
        let x = generate_thermal(0.5, 1.0, rate, RngSeed(41)).unwrap();
        let y = caf_process(&cfg, &x).unwrap();
        let want = x.shifted(d);
        for i in d..x.len() {
            assert!(
                (y.samples()[i] - want.samples()[i]).abs() < 1e-12,
                "sample {i}"
            );
        }
    }

    #[test]
    fn clean_signal_passes_with_default_fences() {
        let rate = 64_000.0;
        let b0 = 1000.0;
        let cfg = CafConfig::baseband(b0, default_sweep_fences(), rate).unwrap();
        let d = cfg.delay();
        let x = generate_rrc_signal(b0, 2.0, rate, RngSeed(43)).unwrap();
        let mut caf = Caf::new(&cfg).unwrap();
        let y = caf.process(&x).unwrap();
        let skip = 8192 + d;
        let mut err = 0.0;
        let mut pwr = 0.0;
        for i in skip..x.len() {
            let e = y.samples()[i] - x.samples()[i - d];
            err += e * e;
            pwr += x.samples()[i - d] * x.samples()[i - d];
        }
        let rel = (err / pwr).sqrt();
        assert!(rel <= 1e-9, "relative deviation {rel}");
        assert_eq!(caf.clip_fraction(), 0.0);
    }

    #[test]
    fn rate_mismatch_rejected() {
        let cfg = CafConfig::baseband(1000.0, default_sweep_fences(), 64_000.0).unwrap();
        let x = generate_thermal(0.1, 1.0, 32_000.0, RngSeed(1)).unwrap();
        assert!(caf_process(&cfg, &x).is_err());
    }

    #[test]
    fn derivative_chain_unit_gain_on_tone() {
        let rate = 51_200.0;
        let t = 256.0 / rate; // fundamental period
        let tone_period = t / 3.0;
        let f_tone = 1.0 / tone_period;
        let caf = CafConfig::baseband(4.5 / t, default_sweep_fences(), rate).unwrap();
        let bandpass =
            design_bandpass(0.5 * f_tone, 1.5 * f_tone, 0.3 * f_tone, 60.0, rate).unwrap();
        let leak = (1.0 / t) / 100.0;
        let mut chain = DerivativeCafChain::new(&caf, &bandpass, leak, rate).unwrap();
        let x = generate_tone(tone_period, 1.0, rate, 1.0).unwrap();
        let y = chain.process(&x).unwrap();
        // Compare RMS amplitude over the settled tail.
        let skip = y.len() / 2;
        let rms_in = x.mean_square_from(skip).sqrt();
        let rms_out = y.mean_square_from(skip).sqrt();
        let gain_db = 20.0 * (rms_out / rms_in).log10();
        assert!(gain_db.abs() < 0.1, "tone gain {gain_db} dB");
    }

    #[test]
    fn spectral_inversion_by_clipping() {
        // Clipping the outlier spike of a highpass impulse response leaves
        // (minus) the complementary lowpass; their magnitude responses
        // should correlate strongly. The tracking step is chosen fast
        // enough that the fences follow the smooth main lobe and only the
        // one-sample spike violates them.
        let rate = 64_000.0;
        let lp = design_lowpass(1200.0, 480.0, 60.0, rate).unwrap();
        let pair = make_complement(&lp).unwrap();
        let hp = &pair.complement;
        let n = hp.len();
        let mut adic = BasicAdic::new(FenceConfig {
            beta: 2.0,
            trimean_weight: 2.0,
            delta: DeltaMode::Fixed(4e-3),
            warmup: n,
        })
        .unwrap();
        // One warm-up pass over the response, then the measured pass.
        for &t in hp.taps() {
            adic.step(t);
        }
        let mut out = Vec::with_capacity(n);
        for &t in hp.taps() {
            out.push(adic.step(t).0);
        }
        let clipped = FirDesign::from_taps(out, rate).unwrap();
        let grid: Vec<f64> = (0..128).map(|i| rate / 2.0 * i as f64 / 128.0).collect();
        let a: Vec<f64> = grid.iter().map(|&f| clipped.magnitude_at(f)).collect();
        let b: Vec<f64> = grid.iter().map(|&f| lp.magnitude_at(f)).collect();
        let corr = pearson(&a, &b);
        assert!(corr >= 0.9, "magnitude correlation {corr}");
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut num = 0.0;
        let mut da = 0.0;
        let mut db = 0.0;
        for (x, y) in a.iter().zip(b) {
            num += (x - ma) * (y - mb);
            da += (x - ma) * (x - ma);
            db += (y - mb) * (y - mb);
        }
        num / (da * db).sqrt()
    }
}
