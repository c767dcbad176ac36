//! Cross-validation of the streaming estimators against independent
//! references: exact sample quantiles, analytic waveform peakedness,
//! windowed Hampel filtering, and direct spectral measurements.

use onmt_core::adic::BasicAdic;
use onmt_core::fir;
use onmt_core::iir::{design_iir, IirFamily, IirResponse};
use onmt_core::metrics::psd;
use onmt_core::noise::{
    generate_poisson_impulses, generate_rrc_signal, generate_thermal,
};
use onmt_core::robust::{
    hampel_filter, peakedness_dbg, sample_quantile, DeltaMode, FenceConfig, FenceTracker,
    QtfState,
};
use onmt_core::waveform::{generate_square, generate_tone, generate_triangle};
use onmt_core::{RngSeed, Signal};

const SEED: RngSeed = RngSeed(0x0C0FFEE);

#[test]
fn qtf_tracks_exact_gaussian_quantiles() {
    let n = 400_000;
    let sig = generate_thermal(n as f64 / 64_000.0, 1.0, 64_000.0, SEED).unwrap();
    let x = sig.samples();
    let delta = 0.01;
    for (q, expect) in [(0.25, -0.6745), (0.5, 0.0), (0.75, 0.6745)] {
        let mut tracker = QtfState::new(q, delta).unwrap();
        // Time-average the estimate over the settled second half.
        let mut sum = 0.0;
        let mut count = 0usize;
        for (i, &v) in x.iter().enumerate() {
            let e = tracker.step(v);
            if i >= n / 2 {
                sum += e;
                count += 1;
            }
        }
        let avg = sum / count as f64;
        let oracle = sample_quantile(x, q);
        assert!(
            (avg - oracle).abs() < 0.05,
            "q={q}: tracked {avg} vs sorted-sample {oracle}"
        );
        assert!(
            (avg - expect).abs() < 0.05,
            "q={q}: tracked {avg} vs Gaussian {expect}"
        );
    }
}

#[test]
fn qtf_forgets_initial_conditions_on_chirp() {
    // Chirp-like input sweeping through frequencies; two trackers started
    // far apart must converge to within 4 * delta of each other.
    let n = 60_000;
    let delta = 0.01;
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            (2.0 * core::f64::consts::PI * (5.0 + 40.0 * t) * t * 50.0).sin()
        })
        .collect();
    for q in [0.25, 0.5, 0.75] {
        let mut a = QtfState::with_initial(q, delta, -5.0).unwrap();
        let mut b = QtfState::with_initial(q, delta, 5.0).unwrap();
        let mut last = (0.0, 0.0);
        for &v in &x {
            last = (a.step(v), b.step(v));
        }
        assert!(
            (last.0 - last.1).abs() <= 4.0 * delta,
            "q={q}: {} vs {}",
            last.0,
            last.1
        );
    }
}

#[test]
fn trimean_dcl_finds_distribution_center() {
    let center = 2.5;
    let sig = generate_thermal(4.0, 1.0, 64_000.0, SEED.substream(1)).unwrap();
    let delta = 0.01;
    let mut tracker = FenceTracker::new(FenceConfig {
        beta: 1.5,
        trimean_weight: 2.0,
        delta: DeltaMode::Fixed(delta),
        warmup: 0,
    })
    .unwrap();
    let n = sig.len();
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, &v) in sig.samples().iter().enumerate() {
        tracker.update(v + center);
        if i >= n / 2 {
            sum += tracker.dcl();
            count += 1;
        }
    }
    let avg = sum / count as f64;
    assert!(
        (avg - center).abs() <= 2.0 * delta,
        "DCL {avg} vs center {center}"
    );
}

#[test]
fn waveform_peakedness_constants() {
    let rate = 64_000.0;
    let square = generate_square(0.01, 1.0, rate, 1.0).unwrap();
    let triangle = generate_triangle(0.01, 1.0, rate, 1.0).unwrap();
    let sine = generate_tone(0.01, 1.0, rate, 1.0).unwrap();
    let gauss = generate_thermal(16.0, 1.0, rate, SEED.substream(2)).unwrap();

    let p_sq = peakedness_dbg(square.samples()).unwrap();
    let p_tr = peakedness_dbg(triangle.samples()).unwrap();
    let p_si = peakedness_dbg(sine.samples()).unwrap();
    let p_ga = peakedness_dbg(gauss.samples()).unwrap();

    assert!((p_sq + 4.77).abs() < 0.05, "square {p_sq}");
    assert!((p_tr + 2.22).abs() < 0.05, "triangle {p_tr}");
    assert!((p_si + 3.01).abs() < 0.05, "sine {p_si}");
    assert!(p_ga.abs() < 0.1, "gaussian {p_ga}");
}

#[test]
fn mixture_peakedness_between_components() {
    let rate = 64_000.0;
    let square = generate_square(0.01, 1.0, rate, 4.0).unwrap();
    let noise = generate_thermal(4.0, 0.05, rate, SEED.substream(3)).unwrap();
    let mix = square.add(&noise).unwrap();
    let p = peakedness_dbg(mix.samples()).unwrap();
    assert!(p > -4.77 && p < 0.0, "mixture {p}");
}

#[test]
fn sparse_poisson_train_is_super_gaussian() {
    let rate = 64_000.0;
    let train = generate_poisson_impulses(4.0, 64.0, 1.0, rate, SEED.substream(4)).unwrap();
    let p = peakedness_dbg(train.samples()).unwrap();
    assert!(p > 10.0, "sparse train {p} dBG");
}

#[test]
fn rrc_signal_spectrum_confined() {
    let rate = 64_000.0;
    let b0 = 1000.0;
    let sig = generate_rrc_signal(b0, 8.0, rate, SEED.substream(5)).unwrap();
    let spectrum = psd(&sig, 2048).unwrap();
    let inband = spectrum.mean_density_in(0.0, 0.7 * b0);
    let outband = spectrum.mean_density_in(1.2 * b0, rate / 2.0);
    let rejection_db = 10.0 * (inband / outband).log10();
    assert!(rejection_db >= 40.0, "out-of-band rejection {rejection_db} dB");
}

#[test]
fn single_impulse_reproduces_frontend_response() {
    // A lone impulse through the front-end filter is the filter's scaled
    // impulse response.
    let rate = 64_000.0;
    let frontend = design_iir(
        IirFamily::Bessel,
        IirResponse::Lowpass { cutoff_hz: 10_000.0 },
        2,
        rate,
    )
    .unwrap();
    let mut x = vec![0.0; 4096];
    x[100] = 3.0;
    let sig = Signal::new(x, rate).unwrap();
    let y = onmt_core::iir::apply(&frontend, &sig).unwrap();
    let h = frontend.impulse_response(1024);
    for (k, &hk) in h.iter().enumerate() {
        assert!((y.samples()[100 + k] - 3.0 * hk).abs() < 1e-12);
    }
}

#[test]
fn noise_std_scales_as_sqrt_bandwidth() {
    let rate = 64_000.0;
    let noise = generate_thermal(16.0, 1.0, rate, SEED.substream(6)).unwrap();
    let wide = fir::design_lowpass(8000.0, 2000.0, 60.0, rate).unwrap();
    let narrow = fir::design_lowpass(2000.0, 500.0, 60.0, rate).unwrap();
    let skip = 4096;
    let s_wide = fir::apply(&wide, &noise).unwrap().mean_square_from(skip).sqrt();
    let s_narrow = fir::apply(&narrow, &noise)
        .unwrap()
        .mean_square_from(skip)
        .sqrt();
    let ratio = s_wide / s_narrow;
    assert!((ratio - 2.0).abs() < 0.1, "sigma ratio {ratio} (expected 2)");
}

#[test]
fn filter_energy_predicts_output_variance() {
    let rate = 64_000.0;
    let n_sec = 16.0; // about 1e6 samples
    let noise = generate_thermal(n_sec, 1.0, rate, SEED.substream(7)).unwrap();
    let skip = 8192;

    let lp = fir::design_lowpass(5000.0, 2500.0, 60.0, rate).unwrap();
    let got = fir::apply(&lp, &noise).unwrap().mean_square_from(skip);
    let want = lp.energy();
    assert!((got / want - 1.0).abs() < 0.02, "FIR: {got} vs {want}");

    let iir = design_iir(
        IirFamily::Butterworth,
        IirResponse::Lowpass { cutoff_hz: 5000.0 },
        4,
        rate,
    )
    .unwrap();
    let h = iir.impulse_response(8192);
    let want: f64 = h.iter().map(|v| v * v).sum();
    let got = onmt_core::iir::apply(&iir, &noise)
        .unwrap()
        .mean_square_from(skip);
    assert!((got / want - 1.0).abs() < 0.02, "IIR: {got} vs {want}");
}

#[test]
fn matched_psd_different_time_structure() {
    // Same spectra, very different peakedness: hidden vs apparent outlier
    // noise.
    let rate = 64_000.0;
    let shaper = fir::design_lowpass(8000.0, 2000.0, 60.0, rate).unwrap();
    let gauss = fir::apply(
        &shaper,
        &generate_thermal(8.0, 1.0, rate, SEED.substream(8)).unwrap(),
    )
    .unwrap();
    let train = fir::apply(
        &shaper,
        &generate_poisson_impulses(8.0, 500.0, 1.0, rate, SEED.substream(9)).unwrap(),
    )
    .unwrap();
    // Match powers.
    let train = train.scaled((gauss.mean_square() / train.mean_square()).sqrt());

    let pa = psd(&gauss, 1024).unwrap();
    let pb = psd(&train, 1024).unwrap();
    for (lo, hi) in [(500.0, 3000.0), (3000.0, 6000.0), (6000.0, 7500.0)] {
        let ra = pa.mean_density_in(lo, hi);
        let rb = pb.mean_density_in(lo, hi);
        assert!(
            (ra / rb - 1.0).abs() < 0.2,
            "PSD mismatch in [{lo}, {hi}]: {ra} vs {rb}"
        );
    }
    let ka = peakedness_dbg(gauss.samples()).unwrap();
    let kb = peakedness_dbg(train.samples()).unwrap();
    assert!(kb - ka > 3.0, "peakedness gap {} vs {}", kb, ka);
}

#[test]
fn basic_adic_agrees_with_hampel_oracle() {
    // Poisson impulses on a smooth baseband signal in thermal noise,
    // observed through the excess-band filter: the streaming clipper and
    // the windowed Hampel filter must agree on what to remove. Impulses
    // sit ~14 sigma above the excess-band background and both thresholds
    // are matched at ~6 sigma (Tukey fences at beta = 4 ~ 9 MAD). The
    // Hampel window is wider than the excess filter's ringing, so its MAD
    // stays calibrated next to a spike; the residual difference is the
    // replacement values themselves.
    let rate = 64_000.0;
    let b0 = 1000.0;
    let clean = generate_rrc_signal(b0, 4.0, rate, SEED.substream(10)).unwrap();
    let thermal = generate_thermal(4.0, 0.01, rate, SEED.substream(13)).unwrap();
    let impulses =
        generate_poisson_impulses(4.0, 20.0, 3.75e-5, rate, SEED.substream(11)).unwrap();
    let mix = clean.add(&thermal).unwrap().add(&impulses).unwrap();
    let excess = fir::excess_band_filter((0.0, 1.25 * b0), 20_000.0, rate).unwrap();
    let observed = fir::apply(&excess, &mix).unwrap();

    let mut adic = BasicAdic::new(FenceConfig {
        beta: 4.0,
        trimean_weight: 2.0,
        delta: DeltaMode::AutoIqr { fraction: 0.01 },
        warmup: 2048,
    })
    .unwrap();
    let streaming = adic.process(&observed);
    let oracle = hampel_filter(&observed, 201, 9.0).unwrap();

    let skip = 4096;
    let mut diff = 0.0;
    let mut pwr = 0.0;
    for i in skip..observed.len() {
        let d = streaming.samples()[i] - oracle.samples()[i];
        diff += d * d;
        pwr += observed.samples()[i] * observed.samples()[i];
    }
    let rel = (diff / pwr).sqrt();
    assert!(rel <= 0.10, "clipper vs Hampel relative RMS {rel}");
}

#[test]
fn feedback_adic_idempotent_on_clean_input() {
    use onmt_core::adic::{AdicConfig, FeedbackAdic};
    let rate = 64_000.0;
    let clean = generate_rrc_signal(2000.0, 1.0, rate, SEED.substream(12)).unwrap();
    let cfg = AdicConfig::self_tracked(
        0.002,
        FenceConfig {
            beta: 4.0,
            ..FenceConfig::default()
        },
    );
    let mut pass1 = FeedbackAdic::new(&cfg, rate).unwrap();
    let once = pass1.process(&clean);
    assert_eq!(pass1.clip_fraction(), 0.0, "pass 1 clipped a clean signal");
    let mut pass2 = FeedbackAdic::new(&cfg, rate).unwrap();
    let twice = pass2.process(&once);
    assert_eq!(pass2.clip_fraction(), 0.0, "pass 2 found new violations");
    assert_eq!(once.samples(), twice.samples());
}
