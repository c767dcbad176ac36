//! Declarative experiment descriptions: the scenario file schema, its
//! validation, and the bundled scenario set.
//!
//! A scenario is one TOML document: common header (`schema`, `name`,
//! `seed`) plus exactly one kind-specific table (e.g. `[poisson-sweep]`).
//! Re-running a scenario file with the same seed reproduces its outputs
//! byte for byte.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use onmt_core::robust::{DeltaMode, FenceConfig};

/// Schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Nominal pileup threshold of the standard front end (2nd-order Bessel
/// at `10 * B0`), in units of `B0`. Sweep grids are expressed relative
/// to this rate.
pub const LAMBDA_C_OVER_B0: f64 = 22.7;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    pub seed: u64,
    #[serde(flatten)]
    pub kind: ScenarioKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Two equal tones plus a periodic impulse train interfering
    /// destructively with one of them; clipper ahead of the bandpass.
    Toy1(Toy1Params),
    /// Sine plus square-wave interference; derivative chain.
    Toy2(Toy2Params),
    /// Poisson outliers: SNR/capacity vs outlier-to-thermal power and
    /// event rate.
    PoissonSweep(PoissonSweepParams),
    /// Periodic Gaussian bursts: grid over burst rates and duty cycles.
    BurstSweep(BurstSweepParams),
    /// Gaussian-only noise: the no-harm check across baseband SNRs.
    NoHarm(NoHarmParams),
    /// Strong adjacent-channel interference, with and without the
    /// front-end bandstop ahead of the CAF.
    AdjacentChannel(AdjacentChannelParams),
    /// Narrowband outliers confined to the signal band; clipper directly
    /// ahead of the baseband filter.
    SharedBand(SharedBandParams),
    /// The 1-bit delta-sigma front end with CAF between reconstruction
    /// and decimation.
    DeltaSigma(DeltaSigmaParams),
    /// Peakedness of excess-band-filtered noise vs rate and power.
    PeakednessCurves(PeakednessCurvesParams),
}

/// Optional overrides of the frozen clipper defaults, per scenario.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClipperOverrides {
    pub beta: Option<f64>,
    pub tau_s: Option<f64>,
    pub delta_fraction: Option<f64>,
    pub warmup_samples: Option<usize>,
    pub trimean_weight: Option<f64>,
}

impl ClipperOverrides {
    /// Apply the overrides onto a base fence configuration.
    pub fn fences(&self, base: FenceConfig) -> FenceConfig {
        let mut fc = base;
        if let Some(b) = self.beta {
            fc.beta = b;
        }
        if let Some(w) = self.trimean_weight {
            fc.trimean_weight = w;
        }
        if let Some(f) = self.delta_fraction {
            fc.delta = DeltaMode::AutoIqr { fraction: f };
        }
        if let Some(w) = self.warmup_samples {
            fc.warmup = w;
        }
        fc
    }

    fn validate(&self, at: &str) -> Result<()> {
        if let Some(b) = self.beta {
            if !(b >= 0.0) {
                bail!("{at}.beta: must be >= 0");
            }
        }
        if let Some(t) = self.tau_s {
            if !(t > 0.0) {
                bail!("{at}.tau_s: must be > 0");
            }
        }
        if let Some(f) = self.delta_fraction {
            if !(f > 0.0) {
                bail!("{at}.delta_fraction: must be > 0");
            }
        }
        if let Some(w) = self.trimean_weight {
            if !(w >= 0.0) {
                bail!("{at}.trimean_weight: must be >= 0");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Toy1Params {
    pub sample_rate_hz: f64,
    /// Impulse-train period in samples; the tones sit at 1/T and 3/T.
    pub period_samples: usize,
    /// Measured periods (after warm-up).
    pub periods: usize,
    pub clipper: ClipperOverrides,
}

impl Default for Toy1Params {
    fn default() -> Self {
        Toy1Params {
            sample_rate_hz: 51_200.0,
            period_samples: 256,
            periods: 96,
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Toy2Params {
    pub sample_rate_hz: f64,
    /// Square-wave period in samples; the sine sits at 3/T.
    pub period_samples: usize,
    pub periods: usize,
    /// Leaky-integrator corner as a fraction of the sine frequency.
    pub leak_fraction: f64,
    pub clipper: ClipperOverrides,
}

impl Default for Toy2Params {
    fn default() -> Self {
        Toy2Params {
            sample_rate_hz: 51_200.0,
            period_samples: 512,
            periods: 120,
            leak_fraction: 0.01,
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonSweepParams {
    pub b0_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// Event rates as fractions of the pileup threshold rate.
    pub lambda_factors: Vec<f64>,
    /// Baseband outlier-to-thermal power ratios, in dB.
    pub outlier_to_thermal_db: Vec<f64>,
    pub thermal_snr_db: Vec<f64>,
    pub clipper: ClipperOverrides,
}

impl Default for PoissonSweepParams {
    fn default() -> Self {
        PoissonSweepParams {
            b0_hz: 1000.0,
            sample_rate_hz: 64_000.0,
            duration_s: 4.0,
            lambda_factors: vec![0.01, 0.1, 1.0, 3.0],
            outlier_to_thermal_db: vec![-10.0, 0.0, 10.0, 20.0, 30.0],
            thermal_snr_db: vec![10.0, 30.0],
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurstSweepParams {
    pub b0_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// Burst repetition rates as fractions of the pileup threshold.
    pub lambda_factors: Vec<f64>,
    pub duty_cycles: Vec<f64>,
    pub outlier_to_thermal_db: Vec<f64>,
    pub thermal_snr_db: Vec<f64>,
    pub clipper: ClipperOverrides,
}

impl Default for BurstSweepParams {
    fn default() -> Self {
        BurstSweepParams {
            b0_hz: 1000.0,
            sample_rate_hz: 64_000.0,
            duration_s: 4.0,
            lambda_factors: vec![0.1],
            duty_cycles: vec![0.1],
            outlier_to_thermal_db: vec![-10.0, 0.0, 10.0, 20.0, 30.0],
            thermal_snr_db: vec![10.0, 30.0],
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoHarmParams {
    pub b0_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub snr_db: Vec<f64>,
    pub clipper: ClipperOverrides,
}

impl Default for NoHarmParams {
    fn default() -> Self {
        NoHarmParams {
            b0_hz: 1000.0,
            sample_rate_hz: 64_000.0,
            duration_s: 4.0,
            snr_db: vec![0.0, 10.0, 20.0, 30.0],
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdjacentChannelParams {
    pub b0_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// Adjacent-channel band edges in units of B0.
    pub adjacent_band_b0: (f64, f64),
    /// Adjacent-channel PSD over the signal's in-band PSD, in dB.
    pub adjacent_psd_db: f64,
    pub lambda_factor: f64,
    pub outlier_to_thermal_db: f64,
    pub thermal_snr_db: f64,
    pub clipper: ClipperOverrides,
}

impl Default for AdjacentChannelParams {
    fn default() -> Self {
        AdjacentChannelParams {
            b0_hz: 1000.0,
            sample_rate_hz: 64_000.0,
            duration_s: 4.0,
            adjacent_band_b0: (2.0, 4.0),
            adjacent_psd_db: 30.0,
            lambda_factor: 0.01,
            outlier_to_thermal_db: 20.0,
            thermal_snr_db: 30.0,
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharedBandParams {
    pub b0_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// Narrowband event rate as a fraction of the pileup threshold.
    pub lambda_factor: f64,
    /// Interference-to-signal baseband power ratios, in dB.
    pub interference_to_signal_db: Vec<f64>,
    /// Thermal noise is negligible by construction; this sets how far
    /// below the signal it sits.
    pub thermal_snr_db: f64,
    pub clipper: ClipperOverrides,
}

impl Default for SharedBandParams {
    fn default() -> Self {
        SharedBandParams {
            b0_hz: 1000.0,
            sample_rate_hz: 64_000.0,
            duration_s: 4.0,
            lambda_factor: 0.1,
            interference_to_signal_db: vec![0.0, 10.0, 20.0],
            thermal_snr_db: 60.0,
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaSigmaParams {
    pub modulator_rate_hz: f64,
    pub decimation: usize,
    pub clip_level: f64,
    pub wideband_cutoff_hz: f64,
    pub caf_band_hz: f64,
    pub tone_hz: f64,
    pub tone_amplitude: f64,
    pub impulse_amplitude: f64,
    /// Injected pulse width in periods of the wideband cutoff.
    pub impulse_pulse_cycles: f64,
    pub duration_s: f64,
    pub clipper: ClipperOverrides,
}

impl Default for DeltaSigmaParams {
    fn default() -> Self {
        DeltaSigmaParams {
            modulator_rate_hz: 1_000_000.0,
            decimation: 100,
            clip_level: 0.8,
            wideband_cutoff_hz: 25_000.0,
            caf_band_hz: 5_000.0,
            tone_hz: 500.0,
            tone_amplitude: 0.4,
            impulse_amplitude: 0.6,
            impulse_pulse_cycles: 0.8,
            duration_s: 0.4,
            clipper: ClipperOverrides::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakednessCurvesParams {
    pub b0_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// Excess-band extents in units of B0.
    pub excess_extents_b0: Vec<f64>,
    pub lambda_factors: Vec<f64>,
    pub impulsive_to_thermal_db: Vec<f64>,
}

impl Default for PeakednessCurvesParams {
    fn default() -> Self {
        PeakednessCurvesParams {
            b0_hz: 1000.0,
            sample_rate_hz: 64_000.0,
            duration_s: 4.0,
            excess_extents_b0: vec![2.0, 5.0, 10.0],
            lambda_factors: vec![0.01, 0.03, 0.1, 0.3, 1.0, 3.0],
            impulsive_to_thermal_db: vec![0.0, 10.0, 20.0, 30.0],
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let sc: Scenario = toml::from_str(text).context("failed to parse scenario")?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Check every invariant without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            bail!(
                "schema: version {} not supported (this build reads {SCHEMA_VERSION})",
                self.schema
            );
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            bail!("name: must be non-empty and use only [A-Za-z0-9-_]");
        }
        let positive = |v: f64, at: &str| -> Result<()> {
            if !(v > 0.0) {
                bail!("{at}: must be > 0, got {v}");
            }
            Ok(())
        };
        let rate_band = |rate: f64, b0: f64, at: &str| -> Result<()> {
            positive(rate, &format!("{at}.sample_rate_hz"))?;
            positive(b0, &format!("{at}.b0_hz"))?;
            if b0 > 0.45 * rate {
                bail!("{at}.b0_hz: too close to Nyquist");
            }
            Ok(())
        };
        let lambda_list = |vals: &[f64], at: &str| -> Result<()> {
            if vals.is_empty() {
                bail!("{at}: must not be empty");
            }
            for v in vals {
                if !(*v > 0.0) {
                    bail!("{at}: rates must be > 0, got {v}");
                }
            }
            Ok(())
        };
        match &self.kind {
            ScenarioKind::Toy1(p) => {
                positive(p.sample_rate_hz, "toy1.sample_rate_hz")?;
                if p.period_samples < 8 {
                    bail!("toy1.period_samples: must be at least 8");
                }
                if p.periods < 8 {
                    bail!("toy1.periods: must be at least 8");
                }
                p.clipper.validate("toy1.clipper")?;
            }
            ScenarioKind::Toy2(p) => {
                positive(p.sample_rate_hz, "toy2.sample_rate_hz")?;
                if p.period_samples < 24 {
                    bail!("toy2.period_samples: must be at least 24");
                }
                if p.periods < 8 {
                    bail!("toy2.periods: must be at least 8");
                }
                positive(p.leak_fraction, "toy2.leak_fraction")?;
                p.clipper.validate("toy2.clipper")?;
            }
            ScenarioKind::PoissonSweep(p) => {
                rate_band(p.sample_rate_hz, p.b0_hz, "poisson-sweep")?;
                positive(p.duration_s, "poisson-sweep.duration_s")?;
                lambda_list(&p.lambda_factors, "poisson-sweep.lambda_factors")?;
                if p.outlier_to_thermal_db.is_empty() {
                    bail!("poisson-sweep.outlier_to_thermal_db: must not be empty");
                }
                if p.thermal_snr_db.is_empty() {
                    bail!("poisson-sweep.thermal_snr_db: must not be empty");
                }
                p.clipper.validate("poisson-sweep.clipper")?;
            }
            ScenarioKind::BurstSweep(p) => {
                rate_band(p.sample_rate_hz, p.b0_hz, "burst-sweep")?;
                positive(p.duration_s, "burst-sweep.duration_s")?;
                lambda_list(&p.lambda_factors, "burst-sweep.lambda_factors")?;
                for d in &p.duty_cycles {
                    if !(*d > 0.0 && *d <= 1.0) {
                        bail!("burst-sweep.duty_cycles: must lie in (0, 1], got {d}");
                    }
                }
                p.clipper.validate("burst-sweep.clipper")?;
            }
            ScenarioKind::NoHarm(p) => {
                rate_band(p.sample_rate_hz, p.b0_hz, "no-harm")?;
                positive(p.duration_s, "no-harm.duration_s")?;
                if p.snr_db.is_empty() {
                    bail!("no-harm.snr_db: must not be empty");
                }
                p.clipper.validate("no-harm.clipper")?;
            }
            ScenarioKind::AdjacentChannel(p) => {
                rate_band(p.sample_rate_hz, p.b0_hz, "adjacent-channel")?;
                positive(p.duration_s, "adjacent-channel.duration_s")?;
                positive(p.lambda_factor, "adjacent-channel.lambda_factor")?;
                let (lo, hi) = p.adjacent_band_b0;
                if !(lo > 1.0 && hi > lo) {
                    bail!("adjacent-channel.adjacent_band_b0: need 1 < lo < hi");
                }
                if hi * p.b0_hz > 0.45 * p.sample_rate_hz {
                    bail!("adjacent-channel.adjacent_band_b0: upper edge too close to Nyquist");
                }
                p.clipper.validate("adjacent-channel.clipper")?;
            }
            ScenarioKind::SharedBand(p) => {
                rate_band(p.sample_rate_hz, p.b0_hz, "shared-band")?;
                positive(p.duration_s, "shared-band.duration_s")?;
                positive(p.lambda_factor, "shared-band.lambda_factor")?;
                if p.interference_to_signal_db.is_empty() {
                    bail!("shared-band.interference_to_signal_db: must not be empty");
                }
                p.clipper.validate("shared-band.clipper")?;
            }
            ScenarioKind::DeltaSigma(p) => {
                positive(p.modulator_rate_hz, "delta-sigma.modulator_rate_hz")?;
                if p.decimation < 2 {
                    bail!("delta-sigma.decimation: must be at least 2");
                }
                positive(p.clip_level, "delta-sigma.clip_level")?;
                positive(p.duration_s, "delta-sigma.duration_s")?;
                let out_nyq = p.modulator_rate_hz / p.decimation as f64 / 2.0;
                if !(p.tone_hz > 0.0 && p.tone_hz < out_nyq) {
                    bail!("delta-sigma.tone_hz: must lie inside the decimated band");
                }
                p.clipper.validate("delta-sigma.clipper")?;
            }
            ScenarioKind::PeakednessCurves(p) => {
                rate_band(p.sample_rate_hz, p.b0_hz, "peakedness-curves")?;
                positive(p.duration_s, "peakedness-curves.duration_s")?;
                lambda_list(&p.lambda_factors, "peakedness-curves.lambda_factors")?;
                for e in &p.excess_extents_b0 {
                    if !(*e > 1.0) {
                        bail!("peakedness-curves.excess_extents_b0: must be > 1, got {e}");
                    }
                }
            }
        }
        Ok(())
    }

    /// Kind tag as it appears in scenario files.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ScenarioKind::Toy1(_) => "toy1",
            ScenarioKind::Toy2(_) => "toy2",
            ScenarioKind::PoissonSweep(_) => "poisson-sweep",
            ScenarioKind::BurstSweep(_) => "burst-sweep",
            ScenarioKind::NoHarm(_) => "no-harm",
            ScenarioKind::AdjacentChannel(_) => "adjacent-channel",
            ScenarioKind::SharedBand(_) => "shared-band",
            ScenarioKind::DeltaSigma(_) => "delta-sigma",
            ScenarioKind::PeakednessCurves(_) => "peakedness-curves",
        }
    }
}

/// The scenarios shipped with the binary.
pub const BUNDLED: &[(&str, &str, &str)] = &[
    (
        "toy1",
        include_str!("../scenarios/toy1.toml"),
        "two tones + impulse train, clipper ahead of the bandpass",
    ),
    (
        "toy2",
        include_str!("../scenarios/toy2.toml"),
        "sine + square-wave interference, derivative chain",
    ),
    (
        "poisson-sweep",
        include_str!("../scenarios/poisson-sweep.toml"),
        "SNR/capacity vs Poisson outlier power and rate",
    ),
    (
        "burst-rates",
        include_str!("../scenarios/burst-rates.toml"),
        "Gaussian bursts at 10% duty across repetition rates",
    ),
    (
        "burst-duties",
        include_str!("../scenarios/burst-duties.toml"),
        "Gaussian bursts at lambda_c/10 across duty cycles",
    ),
    (
        "no-harm",
        include_str!("../scenarios/no-harm.toml"),
        "Gaussian-only noise: nonlinear chain must not lose capacity",
    ),
    (
        "adjacent-channel",
        include_str!("../scenarios/adjacent-channel.toml"),
        "strong adjacent-channel interference, bandstop + CAF",
    ),
    (
        "shared-band",
        include_str!("../scenarios/shared-band.toml"),
        "narrowband outliers in the signal band, clipper before baseband",
    ),
    (
        "deltasigma",
        include_str!("../scenarios/deltasigma.toml"),
        "1-bit delta-sigma pipeline with CAF before decimation",
    ),
    (
        "peakedness-curves",
        include_str!("../scenarios/peakedness-curves.toml"),
        "excess-band peakedness vs outlier rate and power",
    ),
];

pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, src, _)| *src)
}

/// Load a scenario from a bundled name or a file path.
pub fn load(name_or_path: &str) -> Result<Scenario> {
    if let Some(src) = bundled_source(name_or_path) {
        return Scenario::from_toml(src);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        return Scenario::from_toml(&text);
    }
    bail!(
        "no bundled scenario or file named {name_or_path:?} (try `onmt list`)"
    )
}
