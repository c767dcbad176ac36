//! IIR filter design (Butterworth, Bessel) and streaming application.
//!
//! Designs are realized as cascades of second-order sections (one
//! first-order section for odd orders) obtained by the bilinear transform
//! with cutoff pre-warping. Bessel prototypes are computed from the
//! roots of the reverse Bessel polynomial and normalized to a -3 dB
//! cutoff of 1 rad/s, so the 4th-order design factors exactly into its
//! two quadratic sections (used by the delta-sigma front-end co-design).

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

/// Analog prototype family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IirFamily {
    Butterworth,
    Bessel,
}

/// Response kind with its cutoff(s) in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IirResponse {
    Lowpass { cutoff_hz: f64 },
    Highpass { cutoff_hz: f64 },
    Bandpass { low_hz: f64, high_hz: f64 },
    Bandstop { low_hz: f64, high_hz: f64 },
}

/// One biquad: `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sos {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Sos {
    /// Poles strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        self.a[1].abs() < 1.0 && self.a[0].abs() < 1.0 + self.a[1]
    }

    pub fn response_at(&self, z_inv: Complex64) -> Complex64 {
        let num = self.b[0] + self.b[1] * z_inv + self.b[2] * z_inv * z_inv;
        let den = 1.0 + self.a[0] * z_inv + self.a[1] * z_inv * z_inv;
        num / den
    }
}

/// A designed IIR filter: section cascade plus its design parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct IirDesign {
    pub family: IirFamily,
    pub response: IirResponse,
    pub order: usize,
    sample_rate: f64,
    sections: Vec<Sos>,
}

impl IirDesign {
    /// Assemble a design from explicit sections (stability-checked).
    pub fn from_sections(
        family: IirFamily,
        response: IirResponse,
        order: usize,
        sample_rate: f64,
        sections: Vec<Sos>,
    ) -> Result<Self> {
        let d = IirDesign {
            family,
            response,
            order,
            sample_rate,
            sections,
        };
        if !d.is_stable() {
            return Err(Error::design("section cascade is unstable"));
        }
        Ok(d)
    }

    pub fn sections(&self) -> &[Sos] {
        &self.sections
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(Sos::is_stable)
    }

    pub fn response_at(&self, freq_hz: f64) -> Complex64 {
        let w = core::f64::consts::TAU * freq_hz / self.sample_rate;
        let z_inv = Complex64::new(0.0, -w).exp();
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response_at(z_inv))
    }

    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        self.response_at(freq_hz).norm()
    }

    pub fn magnitude_db_at(&self, freq_hz: f64) -> f64 {
        20.0 * self.magnitude_at(freq_hz).log10()
    }

    /// Group delay in samples, by numeric differentiation of the phase.
    pub fn group_delay_at(&self, freq_hz: f64) -> f64 {
        let df = self.sample_rate * 1e-6;
        let p1 = self.response_at((freq_hz - df).max(0.0)).arg();
        let p2 = self.response_at(freq_hz + df).arg();
        let mut dp = p2 - p1;
        while dp > core::f64::consts::PI {
            dp -= core::f64::consts::TAU;
        }
        while dp < -core::f64::consts::PI {
            dp += core::f64::consts::TAU;
        }
        let dw = core::f64::consts::TAU * 2.0 * df / self.sample_rate;
        -dp / dw
    }

    /// First `n` samples of the impulse response.
    pub fn impulse_response(&self, n: usize) -> Vec<f64> {
        let mut filter = IirFilter::new(self);
        (0..n)
            .map(|i| filter.process(if i == 0 { 1.0 } else { 0.0 }))
            .collect()
    }
}

/// Streaming state for an [`IirDesign`] (direct form II transposed per
/// section). One instance per stream.
#[derive(Debug, Clone)]
pub struct IirFilter {
    sections: Vec<Sos>,
    state: Vec<[f64; 2]>,
    sample_rate: f64,
}

impl IirFilter {
    pub fn new(design: &IirDesign) -> Self {
        IirFilter {
            sections: design.sections.clone(),
            state: vec![[0.0; 2]; design.sections.len()],
            sample_rate: design.sample_rate,
        }
    }

    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|s| *s = [0.0; 2]);
    }

    pub fn process(&mut self, x: f64) -> f64 {
        let mut v = x;
        for (sos, st) in self.sections.iter().zip(self.state.iter_mut()) {
            let y = sos.b[0] * v + st[0];
            st[0] = sos.b[1] * v - sos.a[0] * y + st[1];
            st[1] = sos.b[2] * v - sos.a[1] * y;
            v = y;
        }
        v
    }

    pub fn process_slice(&mut self, input: &[f64]) -> Vec<f64> {
        input.iter().map(|&x| self.process(x)).collect()
    }

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
pub fn apply(design: &IirDesign, signal: &Signal) -> Result<Signal> {
    IirFilter::new(design).apply(signal)
}

/// Design an IIR filter.
pub fn design_iir(
    family: IirFamily,
    response: IirResponse,
    order: usize,
    sample_rate: f64,
) -> Result<IirDesign> {
    if !(1..=8).contains(&order) {
        return Err(Error::invalid(format_args!(
            "order must lie in [1, 8], got {order}"
        )));
    }
    if !(sample_rate > 0.0) {
        return Err(Error::invalid("sample rate must be positive"));
    }
    let nyquist = sample_rate / 2.0;
    let check = |f: f64| -> Result<()> {
        if !(f > 0.0 && f < nyquist) {
            return Err(Error::invalid(format_args!(
                "cutoff {f} Hz must lie in (0, {nyquist}) Hz"
            )));
        }
        Ok(())
    };

    let prototype = match family {
        IirFamily::Butterworth => butterworth_poles(order),
        IirFamily::Bessel => bessel_poles(order)?,
    };

    let prewarp = |f: f64| 2.0 * sample_rate * (core::f64::consts::PI * f / sample_rate).tan();
    let k = 2.0 * sample_rate;

    let analog_sections = match response {
        IirResponse::Lowpass { cutoff_hz } => {
            check(cutoff_hz)?;
            lowpass_sections(&prototype, prewarp(cutoff_hz))
        }
        IirResponse::Highpass { cutoff_hz } => {
            check(cutoff_hz)?;
            highpass_sections(&prototype, prewarp(cutoff_hz))
        }
        IirResponse::Bandpass { low_hz, high_hz } | IirResponse::Bandstop { low_hz, high_hz } => {
            check(low_hz)?;
            check(high_hz)?;
            if low_hz >= high_hz {
                return Err(Error::invalid("band edges must satisfy low < high"));
            }
            let (w1, w2) = (prewarp(low_hz), prewarp(high_hz));
            let bandpass = matches!(response, IirResponse::Bandpass { .. });
            band_sections(&prototype, w1, w2, bandpass)
        }
    };

    let mut sections: Vec<Sos> = analog_sections
        .iter()
        .map(|qs| bilinear(qs, k))
        .collect::<Result<_>>()?;

    // Pin the reference gain of every section to exactly 1.
    let z_ref = match response {
        IirResponse::Lowpass { .. } | IirResponse::Bandstop { .. } => Complex64::new(1.0, 0.0),
        IirResponse::Highpass { .. } => Complex64::new(-1.0, 0.0),
        IirResponse::Bandpass { low_hz, high_hz } => {
            let w0 = (prewarp(low_hz) * prewarp(high_hz)).sqrt();
            let w_dig = 2.0 * (w0 / k).atan2(1.0);
            Complex64::new(0.0, -w_dig).exp().conj()
        }
    };
    for s in &mut sections {
        let g = s.response_at(1.0 / z_ref).norm();
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::design("degenerate section gain"));
        }
        s.b.iter_mut().for_each(|b| *b /= g);
    }

    for s in &sections {
        if !s.is_stable() {
            return Err(Error::design(format!(
                "unstable section a = {:?} (cutoff too close to Nyquist?)",
                s.a
            )));
        }
    }

    Ok(IirDesign {
        family,
        response,
        order,
        sample_rate,
        sections,
    })
}

// ── Analog prototypes ──────────────────────────────────────────────────

/// Butterworth prototype poles (unit -3 dB cutoff), upper-half-plane and
/// real poles only; conjugates are implied.
fn butterworth_poles(order: usize) -> Vec<Complex64> {
    let n = order as f64;
    let mut poles = Vec::new();
    for k in 0..order {
        let theta = core::f64::consts::PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n);
        let p = Complex64::new(theta.cos(), theta.sin());
        if p.im > 1e-12 {
            poles.push(p);
        } else if p.im.abs() <= 1e-12 {
            poles.push(Complex64::new(p.re, 0.0));
        }
    }
    poles
}

/// Bessel prototype poles normalized to a -3 dB cutoff of 1 rad/s.
///
/// Computed as the roots of the reverse Bessel polynomial (Durand-Kerner
/// iteration; the polynomial is monic with exactly representable integer
/// coefficients for orders up to 8).
fn bessel_poles(order: usize) -> Result<Vec<Complex64>> {
    let coeffs = reverse_bessel_coeffs(order);
    let roots = polynomial_roots(&coeffs)?;

    // Keep one representative per conjugate pair, force exact symmetry.
    let mut poles: Vec<Complex64> = Vec::new();
    for r in &roots {
        if r.im > 1e-9 {
            poles.push(*r);
        } else if r.im.abs() <= 1e-9 {
            poles.push(Complex64::new(r.re, 0.0));
        }
    }

    // -3 dB frequency of the all-pole prototype, by bisection.
    let gain_sq = |w: f64| -> f64 {
        let jw = Complex64::new(0.0, w);
        let mut g: f64 = 1.0;
        for p in &poles {
            let m = p.norm_sqr() / (jw - p).norm_sqr();
            g *= if p.im > 0.0 {
                m * p.norm_sqr() / (jw - p.conj()).norm_sqr()
            } else {
                m
            };
        }
        g
    };
    let mut hi = 1.0;
    while gain_sq(hi) > 0.5 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::design("failed to normalize Bessel prototype"));
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gain_sq(mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w3 = 0.5 * (lo + hi);
    Ok(poles.iter().map(|p| p / w3).collect())
}

/// Coefficients of the reverse Bessel polynomial, ascending powers.
fn reverse_bessel_coeffs(n: usize) -> Vec<f64> {
    let factorial = |m: usize| -> f64 { (1..=m).map(|v| v as f64).product::<f64>().max(1.0) };
    (0..=n)
        .map(|k| {
            factorial(2 * n - k)
                / (2f64.powi((n - k) as i32) * factorial(k) * factorial(n - k))
        })
        .collect()
}

/// Durand-Kerner root finder for a monic polynomial with real
/// coefficients (ascending powers, leading coefficient 1).
fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let eval = |z: Complex64| -> Complex64 {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .fold(0.0f64, |m, &c| m.max(c.abs()))
            .powf(1.0 / n as f64);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|i| {
            let angle = core::f64::consts::TAU * i as f64 / n as f64 + 0.4;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if max_step < 1e-10 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::design("polynomial root iteration did not converge"));
    }
    // Newton polish to machine precision.
    let deriv = |z: Complex64| -> Complex64 {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| {
                acc * z + c * k as f64
            })
    };
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let d = deriv(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval(*r) / d;
            *r -= step;
            if step.norm() < 1e-15 * (1.0 + r.norm()) {
                break;
            }
        }
    }
    Ok(roots)
}

// ── Prototype-to-analog-section transforms ─────────────────────────────

/// Analog quadratic section: (b2 s^2 + b1 s + b0) / (a2 s^2 + a1 s + a0).
#[derive(Debug, Clone, Copy)]
struct AnalogSection {
    b: [f64; 3], // ascending powers: [b0, b1, b2]
    a: [f64; 3],
}

fn pair_section(p: Complex64, b: [f64; 3]) -> AnalogSection {
    AnalogSection {
        b,
        a: [p.norm_sqr(), -2.0 * p.re, 1.0],
    }
}

fn real_section(p: f64, b: [f64; 3]) -> AnalogSection {
    AnalogSection {
        b,
        a: [-p, 1.0, 0.0],
    }
}

fn lowpass_sections(prototype: &[Complex64], wc: f64) -> Vec<AnalogSection> {
    prototype
        .iter()
        .map(|&p| {
            let q = p * wc;
            if p.im > 0.0 {
                pair_section(q, [q.norm_sqr(), 0.0, 0.0])
            } else {
                real_section(q.re, [-q.re, 0.0, 0.0])
            }
        })
        .collect()
}

fn highpass_sections(prototype: &[Complex64], wc: f64) -> Vec<AnalogSection> {
    prototype
        .iter()
        .map(|&p| {
            let q = wc / p;
            if p.im > 0.0 {
                pair_section(q, [0.0, 0.0, 1.0])
            } else {
                real_section(q.re, [0.0, 1.0, 0.0])
            }
        })
        .collect()
}

/// LP -> BP / BS transform. Each prototype pole contributes two analog
/// poles; conjugate-pair prototypes give two sections, real prototypes
/// give one (their two transformed poles share real quadratic
/// coefficients).
fn band_sections(prototype: &[Complex64], w1: f64, w2: f64, bandpass: bool) -> Vec<AnalogSection> {
    let w0_sq = w1 * w2;
    let dw = w2 - w1;
    let numerator = |_: ()| -> [f64; 3] {
        if bandpass {
            [0.0, 1.0, 0.0]
        } else {
            [w0_sq, 0.0, 1.0]
        }
    };
    let mut sections = Vec::new();
    for &p in prototype {
        // Transformed poles are the roots of q^2 - c*q + w0^2 = 0.
        let c = if bandpass {
            Complex64::new(dw, 0.0) * p
        } else {
            Complex64::new(dw, 0.0) / p
        };
        if p.im > 0.0 {
            let half = c / 2.0;
            let disc = (half * half - w0_sq).sqrt();
            for q in [half + disc, half - disc] {
                sections.push(pair_section(q, numerator(())));
            }
        } else {
            // Real prototype pole: sum and product of the two roots are
            // real, giving one real-coefficient section.
            sections.push(AnalogSection {
                b: numerator(()),
                a: [w0_sq, -c.re, 1.0],
            });
        }
    }
    sections
}

/// Bilinear transform of one analog section with s = k (1 - z^-1)/(1 + z^-1).
/// First-order sections (no s^2 terms) map to first-order digital
/// sections, avoiding a spurious cancelling pole at z = -1.
fn bilinear(s: &AnalogSection, k: f64) -> Result<Sos> {
    if s.a[2] == 0.0 && s.b[2] == 0.0 {
        let a0 = s.a[1] * k + s.a[0];
        if a0 == 0.0 || !a0.is_finite() {
            return Err(Error::design("singular bilinear transform"));
        }
        return Ok(Sos {
            b: [
                (s.b[1] * k + s.b[0]) / a0,
                (s.b[0] - s.b[1] * k) / a0,
                0.0,
            ],
            a: [(s.a[0] - s.a[1] * k) / a0, 0.0],
        });
    }
    let k2 = k * k;
    let b0 = s.b[2] * k2 + s.b[1] * k + s.b[0];
    let b1 = 2.0 * s.b[0] - 2.0 * s.b[2] * k2;
    let b2 = s.b[2] * k2 - s.b[1] * k + s.b[0];
    let a0 = s.a[2] * k2 + s.a[1] * k + s.a[0];
    let a1 = 2.0 * s.a[0] - 2.0 * s.a[2] * k2;
    let a2 = s.a[2] * k2 - s.a[1] * k + s.a[0];
    if a0 == 0.0 || !a0.is_finite() {
        return Err(Error::design("singular bilinear transform"));
    }
    Ok(Sos {
        b: [b0 / a0, b1 / a0, b2 / a0],
        a: [a1 / a0, a2 / a0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(family: IirFamily, order: usize, fc: f64, fs: f64) -> IirDesign {
        design_iir(family, IirResponse::Lowpass { cutoff_hz: fc }, order, fs).unwrap()
    }

    #[test]
    fn order_zero_rejected() {
        let r = design_iir(
            IirFamily::Butterworth,
            IirResponse::Lowpass { cutoff_hz: 100.0 },
            0,
            1000.0,
        );
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn butterworth_cutoff_is_3db() {
        for order in [1, 2, 4, 6, 8] {
            let d = lp(IirFamily::Butterworth, order, 1000.0, 8000.0);
            let g = d.magnitude_db_at(1000.0);
            assert!((g + 3.0103).abs() < 0.1, "order {order}: {g} dB");
        }
    }

    #[test]
    fn bessel_cutoff_is_3db() {
        for order in [1, 2, 3, 4, 5, 8] {
            let d = lp(IirFamily::Bessel, order, 1000.0, 16000.0);
            let g = d.magnitude_db_at(1000.0);
            assert!((g + 3.0103).abs() < 0.1, "order {order}: {g} dB");
        }
    }

    #[test]
    fn bessel_order2_monotonic_magnitude() {
        let d = lp(IirFamily::Bessel, 2, 1000.0, 64000.0);
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let f = 10.0 + i as f64 * 150.0;
            let m = d.magnitude_at(f);
            assert!(m <= prev + 1e-12, "ripple at {f} Hz");
            prev = m;
        }
    }

    #[test]
    fn lowpass_dc_gain_exact() {
        for family in [IirFamily::Butterworth, IirFamily::Bessel] {
            for order in 1..=8 {
                let d = lp(family, order, 500.0, 8000.0);
                assert!(
                    (d.magnitude_at(0.0) - 1.0).abs() < 1e-9,
                    "{family:?} order {order}"
                );
                assert!(d.is_stable());
            }
        }
    }

    #[test]
    fn highpass_nyquist_gain_exact() {
        for order in 1..=8 {
            let d = design_iir(
                IirFamily::Butterworth,
                IirResponse::Highpass { cutoff_hz: 1000.0 },
                order,
                8000.0,
            )
            .unwrap();
            assert!((d.magnitude_at(4000.0) - 1.0).abs() < 1e-9, "order {order}");
            assert!(d.is_stable());
        }
    }

    #[test]
    fn bandpass_center_gain_and_stability() {
        let d = design_iir(
            IirFamily::Butterworth,
            IirResponse::Bandpass {
                low_hz: 500.0,
                high_hz: 1500.0,
            },
            3,
            8000.0,
        )
        .unwrap();
        assert!(d.is_stable());
        let f0 = (500.0f64 * 1500.0).sqrt();
        assert!((d.magnitude_db_at(f0)).abs() < 0.2);
        assert!(d.magnitude_db_at(50.0) < -30.0);
        assert!(d.magnitude_db_at(3500.0) < -30.0);
    }

    #[test]
    fn bandstop_notch_and_unit_skirts() {
        let d = design_iir(
            IirFamily::Butterworth,
            IirResponse::Bandstop {
                low_hz: 900.0,
                high_hz: 1100.0,
            },
            2,
            8000.0,
        )
        .unwrap();
        assert!(d.is_stable());
        assert!((d.magnitude_at(0.0) - 1.0).abs() < 1e-9);
        assert!(d.magnitude_db_at(1000.0) < -40.0);
        assert!(d.magnitude_db_at(3000.0) > -1.0);
    }

    #[test]
    fn bessel_flatter_group_delay_than_butterworth() {
        let fs = 64000.0;
        let bes = lp(IirFamily::Bessel, 4, 2000.0, fs);
        let but = lp(IirFamily::Butterworth, 4, 2000.0, fs);
        let spread = |d: &IirDesign| {
            let gds: Vec<f64> = (1..=20)
                .map(|i| d.group_delay_at(i as f64 * 100.0))
                .collect();
            let max = gds.iter().cloned().fold(f64::MIN, f64::max);
            let min = gds.iter().cloned().fold(f64::MAX, f64::min);
            max - min
        };
        assert!(spread(&bes) < spread(&but));
    }

    #[test]
    fn dc_blocked_by_highpass() {
        let d = design_iir(
            IirFamily::Butterworth,
            IirResponse::Highpass { cutoff_hz: 1000.0 },
            2,
            8000.0,
        )
        .unwrap();
        let mut f = IirFilter::new(&d);
        let mut y = 0.0;
        for _ in 0..2000 {
            y = f.process(1.0);
        }
        assert!(y.abs() < 1e-6);
    }

    #[test]
    fn streaming_matches_oneshot() {
        let d = lp(IirFamily::Butterworth, 4, 1000.0, 8000.0);
        let x: Vec<f64> = (0..256).map(|i| ((i * 37) % 17) as f64 - 8.0).collect();
        let mut one = IirFilter::new(&d);
        let full = one.process_slice(&x);
        let mut chunked = IirFilter::new(&d);
        let mut out = Vec::new();
        for chunk in x.chunks(7) {
            out.extend(chunked.process_slice(chunk));
        }
        assert_eq!(full, out);
    }

    #[test]
    fn reverse_bessel_poly_order2() {
        // theta_2(s) = s^2 + 3s + 3
        assert_eq!(reverse_bessel_coeffs(2), vec![3.0, 3.0, 1.0]);
    }

    #[test]
    fn bessel_prototype_roots_match_closed_form() {
        // Order 2: poles (-3 +/- j*sqrt(3))/2 scaled by the -3 dB frequency
        // sqrt((sqrt(45) - 3)/2).
        let poles = bessel_poles(2).unwrap();
        assert_eq!(poles.len(), 1);
        let w3 = ((45.0f64.sqrt() - 3.0) / 2.0).sqrt();
        let expected = Complex64::new(-1.5 / w3, 3.0f64.sqrt() / 2.0 / w3);
        assert!((poles[0] - expected).norm() < 1e-9, "{:?}", poles[0]);
    }
}
