//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with its runtime. Tolerances are pinned in the
//! assertions; run with `cargo test -p onmt-harness --test acceptance`
//! (add `-- --nocapture` to see the lines for passing criteria too).

use std::time::Instant;

use onmt_core::adic::{AdicConfig, FeedbackAdic};
use onmt_core::caf::default_sweep_fences;
use onmt_core::chain::SweepSetup;
use onmt_core::deltasigma::{pipeline_process, DsmState, PipelineConfig};
use onmt_core::fir;
use onmt_core::iir::{design_iir, IirFamily, IirResponse};
use onmt_core::metrics::{pileup_threshold, sine_fit_sinad};
use onmt_core::noise::{generate_poisson_impulses, generate_rrc_signal, generate_thermal};
use onmt_core::robust::{peakedness_dbg, sample_quantile, QtfState};
use onmt_core::waveform::{generate_square, generate_tone, generate_triangle};
use onmt_core::RngSeed;
use onmt_harness::runner::{
    adjacent_case, deltasigma_case, no_harm_point, poisson_point, run, shared_band_point,
    toy1_case, toy2_case, RunOptions,
};
use onmt_harness::scenario::{
    self, AdjacentChannelParams, ClipperOverrides, DeltaSigmaParams, SharedBandParams,
    Toy1Params, Toy2Params, LAMBDA_C_OVER_B0,
};

const SEED: RngSeed = RngSeed(0x4ACCE57);

struct Criterion {
    id: u32,
    title: &'static str,
    budget_s: f64,
    start: Instant,
}

impl Criterion {
    fn begin(id: u32, title: &'static str, budget_s: f64) -> Self {
        Criterion {
            id,
            title,
            budget_s,
            start: Instant::now(),
        }
    }

    fn pass(self) {
        let elapsed = self.start.elapsed().as_secs_f64();
        println!(
            "criterion {:02} ({}): PASS in {elapsed:.2}s (budget {}s)",
            self.id, self.title, self.budget_s
        );
        assert!(
            elapsed <= self.budget_s,
            "criterion {:02} ({}) exceeded its runtime budget: {elapsed:.2}s > {}s",
            self.id,
            self.title,
            self.budget_s
        );
    }
}

#[test]
fn criterion_01_peakedness_constants() {
    let c = Criterion::begin(1, "peakedness constants", 1.0);
    let rate = 64_000.0;
    let square = generate_square(0.01, 1.0, rate, 1.0).unwrap();
    let triangle = generate_triangle(0.01, 1.0, rate, 1.0).unwrap();
    let sine = generate_tone(0.01, 1.0, rate, 1.0).unwrap();
    let gauss = generate_thermal(1_000_000.0 / rate, 1.0, rate, SEED).unwrap();

    let k_sq = peakedness_dbg(square.samples()).unwrap();
    let k_tr = peakedness_dbg(triangle.samples()).unwrap();
    let k_si = peakedness_dbg(sine.samples()).unwrap();
    let k_ga = peakedness_dbg(gauss.samples()).unwrap();
    assert!((k_sq + 4.77).abs() <= 0.05, "square {k_sq} dBG");
    assert!((k_tr + 2.22).abs() <= 0.05, "triangle {k_tr} dBG");
    assert!((k_si + 3.01).abs() <= 0.05, "sine {k_si} dBG");
    assert!(k_ga.abs() <= 0.1, "gaussian {k_ga} dBG");
    c.pass();
}

#[test]
fn criterion_02_qtf_gaussian_quartiles() {
    let c = Criterion::begin(2, "QTF quartile tracking", 5.0);
    let n = 1_000_000usize;
    let rate = 64_000.0;
    let sig = generate_thermal(n as f64 / rate, 1.0, rate, SEED.substream(2)).unwrap();
    let x = sig.samples();
    for (q, expect) in [(0.25, -0.6745), (0.5, 0.0), (0.75, 0.6745)] {
        let mut tracker = QtfState::new(q, 0.01).unwrap();
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
            (avg - expect).abs() <= 0.05,
            "q{q}: tracked {avg} vs Gaussian {expect}"
        );
        assert!(
            (avg - oracle).abs() <= 0.05,
            "q{q}: tracked {avg} vs exact sample quantile {oracle}"
        );
    }
    c.pass();
}

#[test]
fn criterion_03_adic_exact_intermittency() {
    let c = Criterion::begin(3, "ADiC exact intermittency", 1.0);
    let rate = 64_000.0;
    let n = 100_000usize;
    let duration = n as f64 / rate;
    // Mixed input: band-limited signal, thermal noise, sparse strong
    // impulses.
    let mix = generate_rrc_signal(1000.0, duration, rate, SEED.substream(30))
        .unwrap()
        .add(&generate_thermal(duration, 0.01, rate, SEED.substream(31)).unwrap())
        .unwrap()
        .add(
            &generate_poisson_impulses(duration, 50.0, 1e-4, rate, SEED.substream(32)).unwrap(),
        )
        .unwrap();
    let cfg = AdicConfig::self_tracked(0.001, default_sweep_fences());
    let mut adic = FeedbackAdic::new(&cfg, rate).unwrap();
    let mut clipped_count = 0usize;
    for (i, &x) in mix.samples().iter().enumerate() {
        let probe = adic.probe();
        let chi = if i == 0 { x } else { probe.chi };
        let u = x - chi;
        let violates = probe.warm && !(probe.fence_lo <= u && u <= probe.fence_hi);
        let (y, clipped) = adic.step(x);
        assert_eq!(
            clipped, violates,
            "sample {i}: clip flag disagrees with fence check"
        );
        if clipped {
            assert_eq!(y, chi, "sample {i}: clipped output must be the DCL");
            clipped_count += 1;
        } else {
            assert_eq!(y, x, "sample {i}: in-range output must pass bit-exactly");
        }
    }
    assert!(clipped_count > 0, "test input never engaged the clipper");
    c.pass();
}

#[test]
fn criterion_04_complement_identity() {
    let c = Criterion::begin(4, "complement identity", 1.0);
    let rate = 64_000.0;
    let x = generate_thermal(1.5, 1.0, rate, SEED.substream(4)).unwrap();
    let band = fir::design_bandpass(2000.0, 6000.0, 800.0, 60.0, rate).unwrap();
    let pair = fir::make_complement(&band).unwrap();
    let yb = fir::apply(&pair.band, &x).unwrap();
    let yc = fir::apply(&pair.complement, &x).unwrap();
    let d = pair.group_delay;
    let mut max_err = 0.0f64;
    for i in d..x.len() {
        let err = (yb.samples()[i] + yc.samples()[i] - x.samples()[i - d]).abs();
        max_err = max_err.max(err);
    }
    assert!(max_err < 1e-12, "max reconstruction error {max_err}");
    c.pass();
}

#[test]
fn criterion_05_toy_example_1() {
    let c = Criterion::begin(5, "toy example 1 (impulse train)", 5.0);
    let params = Toy1Params::default();
    for destructive in [true, false] {
        let case = toy1_case(&params, destructive, SEED).unwrap();
        assert!(
            case.error_ratio <= 0.2,
            "{}: error ratio {} (linear rms {}, nonlinear rms {})",
            case.label,
            case.error_ratio,
            case.rms_linear,
            case.rms_nonlinear
        );
    }
    c.pass();
}

#[test]
fn criterion_06_toy_example_2() {
    let c = Criterion::begin(6, "toy example 2 (derivative chain)", 5.0);
    let params = Toy2Params {
        periods: 48,
        ..Toy2Params::default()
    };
    for destructive in [true, false] {
        let case = toy2_case(&params, destructive, SEED).unwrap();
        assert!(
            case.error_ratio <= 0.2,
            "{}: error ratio {} (linear rms {}, nonlinear rms {})",
            case.label,
            case.error_ratio,
            case.rms_linear,
            case.rms_nonlinear
        );
    }
    c.pass();
}

#[test]
fn criterion_07_no_harm_suite() {
    let c = Criterion::begin(7, "no-harm on Gaussian noise", 30.0);
    let setup = SweepSetup::new(1000.0, 64_000.0).unwrap();
    let defaults = ClipperOverrides::default();
    for (i, snr) in [0.0, 10.0, 20.0, 30.0].into_iter().enumerate() {
        let m = no_harm_point(&setup, &defaults, 4.0, snr, SEED.substream(70 + i as u64)).unwrap();
        assert!(
            m.capacity_nonlinear >= m.capacity_linear - 0.05,
            "snr {snr} dB: capacity {} vs linear {}",
            m.capacity_nonlinear,
            m.capacity_linear
        );
    }
    c.pass();
}

#[test]
fn criterion_08_pileup_trend() {
    let c = Criterion::begin(8, "pileup trend over event rate", 300.0);
    let b0 = 1000.0;
    let setup = SweepSetup::new(b0, 64_000.0).unwrap();
    let lambda_c = LAMBDA_C_OVER_B0 * b0;
    let defaults = ClipperOverrides::default();
    let mut gains = Vec::new();
    for (i, lf) in [0.01, 0.1, 1.0, 3.0].into_iter().enumerate() {
        let m = poisson_point(
            &setup,
            &defaults,
            4.0,
            lf * lambda_c,
            20.0,
            30.0,
            SEED.substream(80 + i as u64),
        )
        .unwrap();
        gains.push((lf, m.gain_db));
    }
    println!("criterion 08 gains: {gains:?}");
    for w in gains.windows(2) {
        assert!(
            w[1].1 <= w[0].1 + 0.1,
            "gain not nonincreasing: {:?} -> {:?}",
            w[0],
            w[1]
        );
    }
    assert!(
        gains[0].1 >= 10.0,
        "gain at lambda_c/100 is {} dB (need >= 10)",
        gains[0].1
    );
    assert!(
        gains[3].1 <= 1.0,
        "gain at 3 lambda_c is {} dB (need <= 1)",
        gains[3].1
    );
    c.pass();
}

#[test]
fn criterion_09_pileup_threshold_calibration() {
    let c = Criterion::begin(9, "pileup threshold calibration", 1.0);
    let b0 = 1000.0;
    // Measured well oversampled, where the bilinear design matches the
    // analog Bessel prototype.
    let frontend = design_iir(
        IirFamily::Bessel,
        IirResponse::Lowpass { cutoff_hz: 10.0 * b0 },
        2,
        256_000.0,
    )
    .unwrap();
    let lc = pileup_threshold(&frontend).unwrap();
    assert!(
        (lc - 22.7 * b0).abs() <= 0.1 * 22.7 * b0,
        "lambda_c = {lc} Hz (expected 22.7 * B0 = {} +- 10%)",
        22.7 * b0
    );
    c.pass();
}

#[test]
fn criterion_10_adjacent_channel() {
    let c = Criterion::begin(10, "adjacent-channel scenario", 120.0);
    let params = AdjacentChannelParams::default();
    let (o, _) = adjacent_case(&params, SEED.substream(100)).unwrap();
    assert!(
        o.bandstop_caf.gain_db > o.plain_caf.gain_db,
        "bandstop+CAF gain {} dB must exceed plain CAF gain {} dB",
        o.bandstop_caf.gain_db,
        o.plain_caf.gain_db
    );
    assert!(
        o.no_impulse.capacity_nonlinear >= o.no_impulse.capacity_linear - 0.05,
        "no-harm without impulses: {} vs {}",
        o.no_impulse.capacity_nonlinear,
        o.no_impulse.capacity_linear
    );
    // The clipper reshapes outlier energy into the stopped band without
    // hurting the baseband (the spectral "cockroach effect").
    assert!(
        o.stopband_density_on > o.stopband_density_off,
        "stopband PSD should rise with the clipper on: {} vs {}",
        o.stopband_density_on,
        o.stopband_density_off
    );
    c.pass();
}

#[test]
fn criterion_11_shared_band() {
    let c = Criterion::begin(11, "shared-band scenario", 120.0);
    let params = SharedBandParams::default();
    let point = shared_band_point(&params, 20.0, SEED.substream(110)).unwrap();
    assert!(
        point.shared.gain_db >= 0.5,
        "shared-band clipper gain {} dB (need a measurable improvement)",
        point.shared.gain_db
    );
    assert!(
        point.shared.gain_db < point.wideband.gain_db,
        "shared-band gain {} dB must stay below the wideband CAF gain {} dB",
        point.shared.gain_db,
        point.wideband.gain_db
    );
    c.pass();
}

#[test]
fn criterion_12_deltasigma_pipeline() {
    let c = Criterion::begin(12, "delta-sigma pipeline", 60.0);
    // Bitstream binary-valued.
    let mut dsm = DsmState::new(0.8).unwrap();
    let probe = generate_thermal(0.02, 0.04, 1_000_000.0, SEED.substream(120)).unwrap();
    let bits = dsm.modulate(&probe);
    assert!(bits.samples().iter().all(|&b| b == 1.0 || b == -1.0));

    // DC tracking within +-0.01.
    for dc in [0.0, 0.25, -0.5] {
        let mut dsm = DsmState::new(0.8).unwrap();
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| dsm.step(dc)).sum::<f64>() / n as f64;
        assert!((mean - dc).abs() <= 0.01, "dc {dc}: mean {mean}");
    }

    // CAF-bypassed pipeline superposition within the quantization floor.
    let params = DeltaSigmaParams::default();
    let cfg = PipelineConfig {
        modulator_rate: params.modulator_rate_hz,
        decimation: params.decimation,
        clip_level: params.clip_level,
        wideband_cutoff_hz: params.wideband_cutoff_hz,
        caf_band_hz: params.caf_band_hz,
        fences: default_sweep_fences(),
        bypass_caf: true,
    };
    let rate = params.modulator_rate_hz;
    let x1 = generate_tone(1.0 / 400.0, 0.2, rate, 0.2).unwrap();
    let x2 = generate_tone(1.0 / 1100.0, 0.2, rate, 0.2).unwrap();
    let y1 = pipeline_process(&cfg, &x1).unwrap();
    let y2 = pipeline_process(&cfg, &x2).unwrap();
    let y12 = pipeline_process(&cfg, &x1.add(&x2).unwrap()).unwrap();
    let skip = y12.len() / 2;
    // Quantization floor from the single-tone run.
    let sinad = sine_fit_sinad(&y1, 400.0, skip).unwrap();
    let floor = (0.2f64 * 0.2 / 2.0) * 10f64.powf(-sinad / 10.0);
    let mut resid = 0.0;
    for i in skip..y12.len() {
        let d = y12.samples()[i] - y1.samples()[i] - y2.samples()[i];
        resid += d * d;
    }
    resid /= (y12.len() - skip) as f64;
    assert!(
        resid <= 9.0 * floor,
        "superposition residual {resid} vs quantization floor {floor}"
    );

    // Impulse energy reduction with the CAF enabled, and no harm to a
    // clean tone from having the CAF in the chain.
    let o = deltasigma_case(&params, SEED.substream(121)).unwrap();
    assert!(
        o.impulse_reduction_db >= 10.0,
        "impulse energy reduction {} dB",
        o.impulse_reduction_db
    );
    assert!(
        (o.sinad_caf_db - o.sinad_bypass_db).abs() <= 0.5,
        "pipeline SINAD moved with the CAF: {} vs {}",
        o.sinad_caf_db,
        o.sinad_bypass_db
    );
    c.pass();
}

#[test]
fn criterion_13_scenario_determinism() {
    let c = Criterion::begin(13, "bundled scenario determinism", 1800.0);
    let tmp = tempfile::tempdir().unwrap();
    for (name, src, _) in scenario::BUNDLED {
        let sc = scenario::Scenario::from_toml(src).unwrap();
        let mut digests = Vec::new();
        for pass in 0..2 {
            let dir = tmp.path().join(format!("{name}-{pass}"));
            let opts = RunOptions {
                out_dir: Some(dir.clone()),
                seed_override: None,
                emit_traces: true,
            };
            run(&sc, &opts).unwrap_or_else(|e| panic!("{name}: {e}"));
            let mut files: Vec<_> = walk_csv(&dir.join(name));
            files.sort();
            let digest: Vec<(String, Vec<u8>)> = files
                .iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().to_string(),
                        std::fs::read(p).unwrap(),
                    )
                })
                .collect();
            digests.push(digest);
        }
        assert_eq!(
            digests[0].len(),
            digests[1].len(),
            "{name}: file sets differ"
        );
        assert!(!digests[0].is_empty(), "{name}: produced no CSV outputs");
        for (a, b) in digests[0].iter().zip(&digests[1]) {
            assert_eq!(a.0, b.0, "{name}: file names differ");
            assert_eq!(
                a.1, b.1,
                "{name}: {} differs between identical runs",
                a.0
            );
        }
    }
    c.pass();
}

fn walk_csv(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = std::fs::read_dir(dir) {
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_dir() {
                out.extend(walk_csv(&path));
            } else if path.extension().is_some_and(|e| e == "csv" || e == "bin") {
                out.push(path);
            }
        }
    }
    out
}
