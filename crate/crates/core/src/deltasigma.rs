//! "Effectively analog" digital front end: input clipper, 1-bit
//! second-order delta-sigma modulator, wideband reconstruction filter,
//! CAF, and decimation.
//!
//! The oversampled 1-bit stream has no usable amplitude resolution for a
//! clipper, so a wideband IIR lowpass (co-designed so that, cascaded with
//! the analog anti-aliasing section, the combined response is a 4th-order
//! Bessel-Thomson) reconstructs a wideband waveform first; the CAF then
//! removes outliers while the excess band is still available, and the
//! decimation filter reduces the rate to the output band.

use alloc::vec::Vec;

use crate::caf::{Caf, CafConfig};
use crate::error::{Error, Result};
use crate::fir::{design_lowpass, FirDesign};
use crate::iir::{design_iir, IirDesign, IirFamily, IirFilter, IirResponse};
use crate::robust::FenceConfig;
use crate::signal::Signal;

/// Second-order single-bit delta-sigma modulator (Boser-Wooley structure,
/// feedback coefficients 1 and 2, NTF `(1 - z^-1)^2`), with an input
/// clipper that keeps excessively strong outliers from saturating it.
#[derive(Debug, Clone, PartialEq)]
pub struct DsmState {
    i1: f64,
    i2: f64,
    clip_level: f64,
}

impl DsmState {
    pub fn new(clip_level: f64) -> Result<Self> {
        if !(clip_level > 0.0) {
            return Err(Error::invalid("clip level must be positive"));
        }
        Ok(DsmState {
            i1: 0.0,
            i2: 0.0,
            clip_level,
        })
    }

    pub fn clip_level(&self) -> f64 {
        self.clip_level
    }

    pub fn integrators(&self) -> (f64, f64) {
        (self.i1, self.i2)
    }

    /// One modulator clock: clip the input, integrate the error twice,
    /// quantize by sign. Output is always -1.0 or +1.0.
    #[inline]
    pub fn step(&mut self, x: f64) -> f64 {
        let xc = x.clamp(-self.clip_level, self.clip_level);
        let v = if self.i2 >= 0.0 { 1.0 } else { -1.0 };
        let i1_prev = self.i1;
        self.i1 += xc - v;
        self.i2 += i1_prev - 2.0 * v;
        v
    }

    pub fn modulate(&mut self, signal: &Signal) -> Signal {
        let bits: Vec<f64> = signal.samples().iter().map(|&x| self.step(x)).collect();
        Signal::from_parts(bits, signal.sample_rate())
    }
}

/// Pack a +/-1 bitstream into bytes, LSB-first (+1 -> 1, -1 -> 0).
pub fn pack_bits(bits: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bits.len().div_ceil(8));
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b > 0.0 {
                byte |= 1 << i;
            }
        }
        out.push(byte);
    }
    out
}

/// Co-design the 2nd-order anti-aliasing and 2nd-order digital sections
/// so their cascade is the 4th-order Bessel-Thomson lowpass at
/// `cutoff_hz`: the target design is factored into its two quadratic
/// sections.
pub fn codesign_frontend(cutoff_hz: f64, sample_rate: f64) -> Result<(IirDesign, IirDesign)> {
    if !(cutoff_hz > 0.0 && cutoff_hz <= sample_rate / 20.0) {
        return Err(Error::invalid(
            "co-design cutoff must sit below a tenth of the modulator Nyquist",
        ));
    }
    let full = design_iir(
        IirFamily::Bessel,
        IirResponse::Lowpass { cutoff_hz },
        4,
        sample_rate,
    )?;
    let sections = full.sections();
    debug_assert_eq!(sections.len(), 2);
    let response = IirResponse::Lowpass { cutoff_hz };
    let first = IirDesign::from_sections(
        IirFamily::Bessel,
        response,
        2,
        sample_rate,
        alloc::vec![sections[0]],
    )?;
    let second = IirDesign::from_sections(
        IirFamily::Bessel,
        response,
        2,
        sample_rate,
        alloc::vec![sections[1]],
    )?;
    Ok((first, second))
}

/// Pipeline parameters. The decimation factor ties the modulator rate to
/// the output rate exactly (`output_rate = modulator_rate / decimation`).
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub modulator_rate: f64,
    pub decimation: usize,
    /// Modulator input clip level (0.8 of full scale by default).
    pub clip_level: f64,
    /// Cutoff of the wideband reconstruction filter ahead of the CAF.
    pub wideband_cutoff_hz: f64,
    /// Signal-band edge the CAF protects (at or above the output band).
    pub caf_band_hz: f64,
    pub fences: FenceConfig,
    pub bypass_caf: bool,
}

impl PipelineConfig {
    /// Desk-scale rate set: a 20 MHz clock / 100 kS/s output pipeline
    /// scaled by 10 (2 MHz clock, 10 kS/s output, 50 kHz wideband
    /// filter), preserving all the rate ratios.
    pub fn desk_scale(fences: FenceConfig) -> Self {
        PipelineConfig {
            modulator_rate: 2_000_000.0,
            decimation: 200,
            clip_level: 0.8,
            wideband_cutoff_hz: 50_000.0,
            caf_band_hz: 5_000.0,
            fences,
            bypass_caf: false,
        }
    }

    pub fn output_rate(&self) -> f64 {
        self.modulator_rate / self.decimation as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.decimation < 2 {
            return Err(Error::invalid("decimation factor must be at least 2"));
        }
        if !(self.modulator_rate > 0.0) {
            return Err(Error::invalid("modulator rate must be positive"));
        }
        if !(self.clip_level > 0.0) {
            return Err(Error::invalid("clip level must be positive"));
        }
        let out_nyq = self.output_rate() / 2.0;
        if !(self.wideband_cutoff_hz > out_nyq) {
            return Err(Error::invalid(
                "wideband filter must be wider than the output band",
            ));
        }
        if !(self.caf_band_hz >= 0.8 * out_nyq && self.caf_band_hz < self.wideband_cutoff_hz) {
            return Err(Error::invalid(
                "CAF band edge must cover the output band and sit below the wideband cutoff",
            ));
        }
        Ok(())
    }
}

/// Run the full pipeline: clip + modulate, reconstruct wideband, clip
/// outliers (unless bypassed), anti-alias and decimate.
///
/// The input must be at the modulator rate. Output length is
/// `floor(len / decimation)`; the trailing remainder of the input is
/// absorbed by the decimator and produces no output sample.
pub fn pipeline_process(config: &PipelineConfig, input: &Signal) -> Result<Signal> {
    config.validate()?;
    if input.sample_rate() != config.modulator_rate {
        return Err(Error::RateMismatch {
            expected: config.modulator_rate,
            actual: input.sample_rate(),
        });
    }
    let rate = config.modulator_rate;

    let mut dsm = DsmState::new(config.clip_level)?;
    let (analog_half, digital_half) = codesign_frontend(config.wideband_cutoff_hz, rate)?;
    let mut wideband1 = IirFilter::new(&analog_half);
    let mut wideband2 = IirFilter::new(&digital_half);

    let caf_cfg = CafConfig::baseband(config.caf_band_hz / 1.2, config.fences, rate)?;
    let mut caf = if config.bypass_caf {
        None
    } else {
        Some(Caf::new(&caf_cfg)?)
    };

    let decim_filter = decimation_filter(config)?;
    let taps = decim_filter.taps();
    let ntaps = taps.len();
    let mut ring = alloc::vec![0.0f64; ntaps];
    let mut pos = 0usize;

    let r = config.decimation;
    let mut out = Vec::with_capacity(input.len() / r);
    for (i, &x) in input.samples().iter().enumerate() {
        let bit = dsm.step(x);
        let wide = wideband2.process(wideband1.process(bit));
        let cleaned = match caf.as_mut() {
            Some(c) => c.step(wide),
            None => wide,
        };
        ring[pos] = cleaned;
        // Polyphase-style evaluation: the anti-alias dot product only runs
        // at output instants.
        if (i + 1) % r == 0 {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                acc += t * ring[(pos + ntaps - k) % ntaps];
            }
            out.push(acc);
        }
        pos = (pos + 1) % ntaps;
    }
    Ok(Signal::from_parts(out, config.output_rate()))
}

fn decimation_filter(config: &PipelineConfig) -> Result<FirDesign> {
    let out_nyq = config.output_rate() / 2.0;
    design_lowpass(0.8 * out_nyq, 0.4 * out_nyq, 60.0, config.modulator_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caf::default_sweep_fences;
    use crate::noise::generate_bursts;
    use crate::robust::peakedness_dbg;
    use crate::waveform::generate_tone;
    use rand::Rng;

    #[test]
    fn output_is_binary() {
        let mut dsm = DsmState::new(0.8).unwrap();
        let mut rng = crate::RngSeed(2).rng();
        for _ in 0..10_000 {
            let x: f64 = rng.random_range(-0.64..0.64);
            let v = dsm.step(x);
            assert!(v == 1.0 || v == -1.0);
        }
    }

    #[test]
    fn dc_zero_tracks() {
        let mut dsm = DsmState::new(0.8).unwrap();
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| dsm.step(0.0)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
    }

    #[test]
    fn dc_half_tracks() {
        let mut dsm = DsmState::new(0.8).unwrap();
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| dsm.step(0.5)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn input_beyond_clip_level_saturates_to_clip() {
        let mut a = DsmState::new(0.8).unwrap();
        let mut b = DsmState::new(0.8).unwrap();
        for _ in 0..1000 {
            assert_eq!(a.step(5.0), b.step(0.8));
        }
        assert_eq!(a.integrators(), b.integrators());
    }

    #[test]
    fn integrators_bounded_in_stability_envelope() {
        let mut dsm = DsmState::new(0.8).unwrap();
        let mut rng = crate::RngSeed(7).rng();
        let mut max1 = 0.0f64;
        let mut max2 = 0.0f64;
        for _ in 0..200_000 {
            let x: f64 = rng.random_range(-0.64..0.64); // 0.8 * clip level
            dsm.step(x);
            let (i1, i2) = dsm.integrators();
            max1 = max1.max(i1.abs());
            max2 = max2.max(i2.abs());
        }
        assert!(max1 < 10.0, "i1 reached {max1}");
        assert!(max2 < 20.0, "i2 reached {max2}");
    }

    #[test]
    fn pack_bits_lsb_first() {
        let bits = [1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0];
        assert_eq!(pack_bits(&bits), alloc::vec![0b0000_1101, 0b0000_0001]);
    }

    #[test]
    fn codesign_product_matches_direct_design() {
        let fs = 2_000_000.0;
        let fc = 50_000.0;
        let (a, b) = codesign_frontend(fc, fs).unwrap();
        let direct = design_iir(
            IirFamily::Bessel,
            IirResponse::Lowpass { cutoff_hz: fc },
            4,
            fs,
        )
        .unwrap();
        assert!(a.is_stable() && b.is_stable());
        for i in 1..=20 {
            let f = fc * i as f64 / 20.0;
            let cascade = (a.response_at(f) * b.response_at(f)).norm();
            let want = direct.magnitude_at(f);
            let diff_db = 20.0 * (cascade / want).log10();
            assert!(diff_db.abs() < 0.5, "at {f} Hz: {diff_db} dB");
        }
    }

    #[test]
    fn codesign_rejects_high_cutoff() {
        assert!(codesign_frontend(300_000.0, 2_000_000.0).is_err());
    }

    #[test]
    fn codesign_group_delay_flatter_than_butterworth() {
        let fs = 2_000_000.0;
        let fc = 50_000.0;
        let (a, b) = codesign_frontend(fc, fs).unwrap();
        let butter = design_iir(
            IirFamily::Butterworth,
            IirResponse::Lowpass { cutoff_hz: fc },
            4,
            fs,
        )
        .unwrap();
        let spread = |gd: &dyn Fn(f64) -> f64| {
            let v: Vec<f64> = (1..=16).map(|i| gd(fc * i as f64 / 16.0)).collect();
            v.iter().cloned().fold(f64::MIN, f64::max)
                - v.iter().cloned().fold(f64::MAX, f64::min)
        };
        let bessel_spread = spread(&|f| a.group_delay_at(f) + b.group_delay_at(f));
        let butter_spread = spread(&|f| butter.group_delay_at(f));
        assert!(
            bessel_spread < butter_spread,
            "{bessel_spread} vs {butter_spread}"
        );
    }

    fn quick_config(bypass: bool) -> PipelineConfig {
        PipelineConfig {
            modulator_rate: 1_000_000.0,
            decimation: 100,
            clip_level: 0.8,
            wideband_cutoff_hz: 25_000.0,
            caf_band_hz: 6_000.0,
            fences: default_sweep_fences(),
            bypass_caf: bypass,
        }
    }

    #[test]
    fn pipeline_rate_bookkeeping() {
        let cfg = quick_config(true);
        let x = generate_tone(1.0 / 500.0, 0.4, cfg.modulator_rate, 0.0501).unwrap();
        let y = pipeline_process(&cfg, &x).unwrap();
        assert_eq!(y.len(), x.len() / cfg.decimation);
        assert_eq!(y.sample_rate(), cfg.output_rate());
    }

    #[test]
    fn pipeline_sine_sinad() {
        let cfg = quick_config(true);
        let f0 = 500.0;
        let x = generate_tone(1.0 / f0, 0.4, cfg.modulator_rate, 0.4).unwrap();
        let y = pipeline_process(&cfg, &x).unwrap();
        let sinad = crate::metrics::sine_fit_sinad(&y, f0, y.len() / 2).unwrap();
        assert!(sinad >= 60.0, "SINAD {sinad} dB");
    }

    #[test]
    fn bursty_input_gaussianizes_through_pipeline_filters() {
        // Reference-rate illustration: modulator at 1000*f0, first lowpass
        // at 25*f0, second at f0. The 1-bit stream is sub-Gaussian, the
        // wideband stage shows super-Gaussian bursts, the narrow stage is
        // effectively Gaussian again.
        let f0 = 1_000.0;
        let rate = 1000.0 * f0;
        // Burst repetition well above f0, so the narrow filter smears the
        // bursts together while the wideband stage still resolves them.
        let bursts = generate_bursts(0.2, 0.0003, 0.25, 0.04, rate, crate::RngSeed(51)).unwrap();
        let mut dsm = DsmState::new(0.8).unwrap();
        let bits = dsm.modulate(&bursts);
        let p_bits = peakedness_dbg(bits.samples()).unwrap();
        assert!(p_bits < -3.0, "1-bit stream dBG {p_bits}");

        let wide = design_iir(
            IirFamily::Bessel,
            IirResponse::Lowpass { cutoff_hz: 25.0 * f0 },
            2,
            rate,
        )
        .unwrap();
        let stage1 = crate::iir::apply(&wide, &bits).unwrap();
        let p1 = peakedness_dbg(&stage1.samples()[20_000..]).unwrap();
        assert!(p1 > 3.0, "wideband stage dBG {p1}");

        let narrow = design_iir(
            IirFamily::Bessel,
            IirResponse::Lowpass { cutoff_hz: f0 },
            2,
            rate,
        )
        .unwrap();
        let stage2 = crate::iir::apply(&narrow, &stage1).unwrap();
        let p2 = peakedness_dbg(&stage2.samples()[40_000..]).unwrap();
        assert!(p2.abs() < 1.5, "narrow stage dBG {p2}");
    }
}
