//! Quantitative evaluation: Welch PSD estimation, baseband SNR against a
//! delay-matched clean reference, Shannon capacity, and the pileup
//! threshold rate of a front-end filter.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fir::FirDesign;
use crate::iir::{IirDesign, IirResponse};
use crate::signal::Signal;

// Test builds link std through dev-dependencies, whose inherent f64
// methods shadow this shim; real no_std consumers need it.
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::math::F64Ext as _;

// ── FFT (radix-2, in-place) ────────────────────────────────────────────

fn fft_in_place(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    debug_assert_eq!(n, im.len());
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
    let mut len = 2;
    while len <= n {
        let ang = -core::f64::consts::TAU / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let (mut cr, mut ci) = (1.0f64, 0.0f64);
            for k in 0..len / 2 {
                let a = start + k;
                let b = a + len / 2;
                let tr = cr * re[b] - ci * im[b];
                let ti = cr * im[b] + ci * re[b];
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
        len <<= 1;
    }
}

// ── Power spectral density ─────────────────────────────────────────────

/// One-sided Welch PSD estimate (Hann window, 50% overlap).
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    freqs: Vec<f64>,
    density: Vec<f64>,
    df: f64,
}

impl Psd {
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    /// Integral of the density over all frequencies; equals the signal
    /// mean-square to within estimation error (Parseval).
    pub fn total_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.df
    }

    /// Mean density over `[f_lo, f_hi]`.
    pub fn mean_density_in(&self, f_lo: f64, f_hi: f64) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (f, d) in self.freqs.iter().zip(&self.density) {
            if *f >= f_lo && *f <= f_hi {
                sum += d;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    /// Index of the bin with the largest density.
    pub fn peak_bin(&self) -> usize {
        let mut best = 0;
        for (i, d) in self.density.iter().enumerate() {
            if *d > self.density[best] {
                best = i;
            }
        }
        best
    }
}

/// Averaged-periodogram PSD with Hann-windowed segments of
/// `segment_length` samples (a power of two) and 50% overlap.
pub fn psd(signal: &Signal, segment_length: usize) -> Result<Psd> {
    let n = signal.len();
    if segment_length > n {
        return Err(Error::invalid(format_args!(
            "segment length {segment_length} exceeds signal length {n}"
        )));
    }
    if !segment_length.is_power_of_two() || segment_length < 8 {
        return Err(Error::invalid(
            "segment length must be a power of two, at least 8",
        ));
    }
    let fs = signal.sample_rate();
    let l = segment_length;
    let window: Vec<f64> = (0..l)
        .map(|i| 0.5 * (1.0 - (core::f64::consts::TAU * i as f64 / l as f64).cos()))
        .collect();
    let u: f64 = window.iter().map(|w| w * w).sum();
    let hop = l / 2;
    let x = signal.samples();
    let mut acc = vec![0.0f64; l / 2 + 1];
    let mut segments = 0usize;
    let mut re = vec![0.0f64; l];
    let mut im = vec![0.0f64; l];
    let mut start = 0;
    while start + l <= n {
        for i in 0..l {
            re[i] = x[start + i] * window[i];
            im[i] = 0.0;
        }
        fft_in_place(&mut re, &mut im);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += re[k] * re[k] + im[k] * im[k];
        }
        segments += 1;
        start += hop;
    }
    debug_assert!(segments >= 1);
    let df = fs / l as f64;
    let mut density = Vec::with_capacity(l / 2 + 1);
    for (k, a) in acc.iter().enumerate() {
        let onesided = if k == 0 || k == l / 2 { 1.0 } else { 2.0 };
        density.push(onesided * a / (segments as f64 * fs * u));
    }
    let freqs = (0..=l / 2).map(|k| k as f64 * df).collect();
    Ok(Psd { freqs, density, df })
}

// ── SNR and capacity ───────────────────────────────────────────────────

/// SNR measurement against a clean reference. `capped` marks the
/// zero-error-power case where the ratio is reported as 100 dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrReport {
    pub snr_db: f64,
    pub capped: bool,
}

pub const SNR_CAP_DB: f64 = 100.0;

/// Baseband SNR: reference power over the power of `output - reference`,
/// both taken after `skip` warm-up samples. The caller is responsible for
/// delay-aligning the two signals (see [`crate::chain`]).
pub fn baseband_snr_db(output: &Signal, reference: &Signal, skip: usize) -> Result<SnrReport> {
    if output.len() != reference.len() {
        return Err(Error::invalid(format_args!(
            "length mismatch: output {} vs reference {}",
            output.len(),
            reference.len()
        )));
    }
    if skip >= output.len() {
        return Err(Error::invalid("warm-up skip covers the whole signal"));
    }
    let y = &output.samples()[skip..];
    let r = &reference.samples()[skip..];
    let p_ref: f64 = r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64;
    if p_ref <= 0.0 {
        return Err(Error::UndefinedStatistic("zero reference power"));
    }
    let p_err: f64 = y
        .iter()
        .zip(r)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / r.len() as f64;
    if p_err == 0.0 {
        return Ok(SnrReport {
            snr_db: SNR_CAP_DB,
            capped: true,
        });
    }
    Ok(SnrReport {
        snr_db: 10.0 * (p_ref / p_err).log10(),
        capped: false,
    })
}

/// Shannon capacity per unit bandwidth: `log2(1 + SNR)`.
pub fn capacity_bits_per_hz(snr_db: f64) -> f64 {
    (1.0 + 10f64.powf(snr_db / 10.0)).log2()
}

/// Evaluation bundle for one chain on one scenario grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub baseband_snr_db: f64,
    pub snr_capped: bool,
    pub peakedness_dbg: f64,
    pub capacity_bits_per_hz: f64,
    pub clip_fraction: f64,
}

impl MetricsReport {
    /// Capacity is derived from the SNR, keeping the two consistent by
    /// construction.
    pub fn new(snr: SnrReport, peakedness_dbg: f64, clip_fraction: f64) -> Self {
        MetricsReport {
            baseband_snr_db: snr.snr_db,
            snr_capped: snr.capped,
            peakedness_dbg,
            capacity_bits_per_hz: capacity_bits_per_hz(snr.snr_db),
            clip_fraction,
        }
    }
}

// ── Pileup threshold ───────────────────────────────────────────────────

/// Full width at half maximum of the power envelope `h^2`, in samples.
fn fwhm_samples(h: &[f64]) -> Result<f64> {
    let power: Vec<f64> = h.iter().map(|v| v * v).collect();
    let (peak_idx, peak) = power
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    if peak <= 0.0 {
        return Err(Error::UndefinedStatistic("zero impulse response"));
    }
    let half = peak / 2.0;
    // Walk outward from the peak to the half-power crossings.
    let mut left = 0.0;
    for i in (0..peak_idx).rev() {
        if power[i] <= half {
            let frac = (half - power[i]) / (power[i + 1] - power[i]);
            left = i as f64 + frac;
            break;
        }
    }
    let mut right = (power.len() - 1) as f64;
    for i in peak_idx + 1..power.len() {
        if power[i] <= half {
            let frac = (power[i - 1] - half) / (power[i - 1] - power[i]);
            right = (i - 1) as f64 + frac;
            break;
        }
    }
    Ok(right - left)
}

fn half_power_freq(magnitude: impl Fn(f64) -> f64, f_max: f64) -> f64 {
    let peak = magnitude(0.0);
    let target = peak / core::f64::consts::SQRT_2;
    let (mut lo, mut hi) = (0.0, f_max);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if magnitude(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Time-bandwidth product of an impulse response: FWHM of the power
/// envelope times the two-sided half-power bandwidth. A Gaussian filter
/// measures `2 ln(2) / pi ~ 0.441` under this convention, and a lowpass
/// Bessel is close to that.
pub fn time_bandwidth_product(h: &[f64], sample_rate: f64, f3db_hz: f64) -> Result<f64> {
    let width_s = fwhm_samples(h)? / sample_rate;
    Ok(width_s * 2.0 * f3db_hz)
}

/// Time-bandwidth product of a linear-phase FIR design.
pub fn fir_time_bandwidth_product(design: &FirDesign) -> Result<f64> {
    let f3 = half_power_freq(|f| design.magnitude_at(f), design.sample_rate() / 2.0);
    time_bandwidth_product(design.taps(), design.sample_rate(), f3)
}

/// Pileup threshold rate of a lowpass front-end filter: the event rate
/// above which filtered pulses overlap into an effectively Gaussian
/// background. Computed as `f3dB / TBP`, i.e. the filter bandwidth over
/// its measured time-bandwidth product.
pub fn pileup_threshold(frontend: &IirDesign) -> Result<f64> {
    match frontend.response {
        IirResponse::Lowpass { .. } => {}
        _ => {
            return Err(Error::invalid(
                "pileup threshold is defined for lowpass front ends",
            ))
        }
    }
    let fs = frontend.sample_rate();
    let f3 = half_power_freq(|f| frontend.magnitude_at(f), fs / 2.0);
    if !(f3 > 0.0) {
        return Err(Error::UndefinedStatistic("no half-power frequency"));
    }
    // Capture the impulse response until it has decayed.
    let n = ((fs / f3) * 50.0).ceil() as usize;
    let h = frontend.impulse_response(n.min(1 << 22));
    let tbp = time_bandwidth_product(&h, fs, f3)?;
    Ok(f3 / tbp)
}

/// Least-squares SINAD of a sinusoid at `f0_hz`: power of the fitted
/// `a*cos + b*sin + dc` over the residual power, in dB.
pub fn sine_fit_sinad(signal: &Signal, f0_hz: f64, skip: usize) -> Result<f64> {
    if skip + 100 > signal.len() {
        return Err(Error::invalid("too few samples after warm-up"));
    }
    let fs = signal.sample_rate();
    let x = &signal.samples()[skip..];
    let n = x.len() as f64;
    let w = core::f64::consts::TAU * f0_hz / fs;
    let (mut sc, mut ss, mut sx) = (0.0, 0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let ph = w * (skip + i) as f64;
        sc += v * ph.cos();
        ss += v * ph.sin();
        sx += v;
    }
    let a = 2.0 * sc / n;
    let b = 2.0 * ss / n;
    let dc = sx / n;
    let p_sig = (a * a + b * b) / 2.0;
    let mut p_res = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let ph = w * (skip + i) as f64;
        let fit = a * ph.cos() + b * ph.sin() + dc;
        p_res += (v - fit) * (v - fit);
    }
    p_res /= n;
    if p_res <= 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok(10.0 * (p_sig / p_res).log10())
}
