//! File formats: signal CSV and binary containers, filter-design JSON,
//! and the sweep-result / trace CSV tables.
//!
//! All writers are deterministic (no timestamps, fixed field order,
//! shortest-roundtrip float formatting), so re-running a scenario with
//! the same seed reproduces every output byte for byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use onmt_core::fir::FirDesign;
use onmt_core::iir::{IirDesign, IirFamily, IirResponse, Sos};
use onmt_core::Signal;

/// Magic prefix of the binary signal container.
pub const SIGNAL_MAGIC: &[u8; 8] = b"ONMT0001";

/// Output container selection for signal files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFormat {
    Csv,
    Bin,
}

impl SignalFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SignalFormat::Csv => "csv",
            SignalFormat::Bin => "bin",
        }
    }
}

impl std::str::FromStr for SignalFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SignalFormat::Csv),
            "bin" => Ok(SignalFormat::Bin),
            other => bail!("unknown format {other:?} (expected csv or bin)"),
        }
    }
}

/// Write a signal as `t,amplitude` CSV.
pub fn write_signal_csv(path: &Path, signal: &Signal) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    writeln!(w, "t,amplitude")?;
    let rate = signal.sample_rate();
    for (i, x) in signal.samples().iter().enumerate() {
        writeln!(w, "{},{}", i as f64 / rate, x)?;
    }
    Ok(())
}

/// Read a `t,amplitude` CSV back into a signal. The sample rate is
/// recovered from the first time step.
pub fn read_signal_csv(path: &Path) -> Result<Signal> {
    let r = BufReader::new(File::open(path).with_context(|| path.display().to_string())?);
    let mut lines = r.lines();
    let header = lines.next().context("empty signal file")??;
    if header.trim() != "t,amplitude" {
        bail!("expected header 't,amplitude', got {header:?}");
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (t, a) = line
            .split_once(',')
            .with_context(|| format!("line {}: expected 't,amplitude'", lineno + 2))?;
        times.push(t.trim().parse::<f64>()?);
        samples.push(a.trim().parse::<f64>()?);
    }
    if samples.len() < 2 {
        bail!("signal file needs at least 2 samples");
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        bail!("non-increasing time column");
    }
    Ok(Signal::new(samples, 1.0 / dt)?)
}

/// Write the binary container: 8-byte magic, little-endian f64 sample
/// rate, then little-endian f64 samples.
pub fn write_signal_bin(path: &Path, signal: &Signal) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    w.write_all(SIGNAL_MAGIC)?;
    w.write_all(&signal.sample_rate().to_le_bytes())?;
    for x in signal.samples() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_signal_bin(path: &Path) -> Result<Signal> {
    let mut r = BufReader::new(File::open(path).with_context(|| path.display().to_string())?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SIGNAL_MAGIC {
        bail!("bad magic: not an ONMT signal file");
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)?;
    let rate = f64::from_le_bytes(buf8);
    let mut samples = Vec::new();
    loop {
        match r.read_exact(&mut buf8) {
            Ok(()) => samples.push(f64::from_le_bytes(buf8)),
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Signal::new(samples, rate)?)
}

pub fn write_signal(path: &Path, signal: &Signal, format: SignalFormat) -> Result<()> {
    match format {
        SignalFormat::Csv => write_signal_csv(path, signal),
        SignalFormat::Bin => write_signal_bin(path, signal),
    }
}

/// Read a signal file, dispatching on the magic/extension.
pub fn read_signal(path: &Path) -> Result<Signal> {
    let mut head = [0u8; 8];
    {
        let mut f = File::open(path).with_context(|| path.display().to_string())?;
        let n = f.read(&mut head)?;
        if n >= 8 && &head == SIGNAL_MAGIC {
            return read_signal_bin(path);
        }
    }
    read_signal_csv(path)
}

// ── Filter design JSON ─────────────────────────────────────────────────

/// Serializable image of a filter design (parameters and realized
/// coefficients), for scenario reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DesignJson {
    Iir {
        family: String,
        kind: String,
        order: usize,
        cutoffs_hz: Vec<f64>,
        sample_rate_hz: f64,
        /// One `[b0, b1, b2, a1, a2]` row per second-order section.
        sections: Vec<[f64; 5]>,
    },
    Fir {
        sample_rate_hz: f64,
        taps: Vec<f64>,
    },
}

pub fn iir_to_json(design: &IirDesign) -> DesignJson {
    let (kind, cutoffs) = match design.response {
        IirResponse::Lowpass { cutoff_hz } => ("lowpass", vec![cutoff_hz]),
        IirResponse::Highpass { cutoff_hz } => ("highpass", vec![cutoff_hz]),
        IirResponse::Bandpass { low_hz, high_hz } => ("bandpass", vec![low_hz, high_hz]),
        IirResponse::Bandstop { low_hz, high_hz } => ("bandstop", vec![low_hz, high_hz]),
    };
    DesignJson::Iir {
        family: match design.family {
            IirFamily::Butterworth => "butterworth".into(),
            IirFamily::Bessel => "bessel".into(),
        },
        kind: kind.into(),
        order: design.order,
        cutoffs_hz: cutoffs,
        sample_rate_hz: design.sample_rate(),
        sections: design
            .sections()
            .iter()
            .map(|s| [s.b[0], s.b[1], s.b[2], s.a[0], s.a[1]])
            .collect(),
    }
}

pub fn fir_to_json(design: &FirDesign) -> DesignJson {
    DesignJson::Fir {
        sample_rate_hz: design.sample_rate(),
        taps: design.taps().to_vec(),
    }
}

/// Rebuild a runnable design from its JSON image (coefficients are taken
/// as stored; parameters are metadata).
pub fn design_from_json(json: &DesignJson) -> Result<FilterKind> {
    match json {
        DesignJson::Iir {
            family,
            kind,
            order,
            cutoffs_hz,
            sample_rate_hz,
            sections,
        } => {
            let family = match family.as_str() {
                "butterworth" => IirFamily::Butterworth,
                "bessel" => IirFamily::Bessel,
                other => bail!("unknown IIR family {other:?}"),
            };
            let response = match (kind.as_str(), cutoffs_hz.as_slice()) {
                ("lowpass", [c]) => IirResponse::Lowpass { cutoff_hz: *c },
                ("highpass", [c]) => IirResponse::Highpass { cutoff_hz: *c },
                ("bandpass", [lo, hi]) => IirResponse::Bandpass {
                    low_hz: *lo,
                    high_hz: *hi,
                },
                ("bandstop", [lo, hi]) => IirResponse::Bandstop {
                    low_hz: *lo,
                    high_hz: *hi,
                },
                (k, c) => bail!("bad IIR kind/cutoffs: {k:?} with {} cutoffs", c.len()),
            };
            let sections = sections
                .iter()
                .map(|s| Sos {
                    b: [s[0], s[1], s[2]],
                    a: [s[3], s[4]],
                })
                .collect();
            Ok(FilterKind::Iir(IirDesign::from_sections(
                family,
                response,
                *order,
                *sample_rate_hz,
                sections,
            )?))
        }
        DesignJson::Fir {
            sample_rate_hz,
            taps,
        } => Ok(FilterKind::Fir(FirDesign::from_taps(
            taps.clone(),
            *sample_rate_hz,
        )?)),
    }
}

/// A loaded filter of either kind.
#[derive(Debug, Clone)]
pub enum FilterKind {
    Iir(IirDesign),
    Fir(FirDesign),
}

impl FilterKind {
    pub fn apply(&self, signal: &Signal) -> Result<Signal> {
        Ok(match self {
            FilterKind::Iir(d) => onmt_core::iir::apply(d, signal)?,
            FilterKind::Fir(d) => onmt_core::fir::apply(d, signal)?,
        })
    }
}

// ── Tabular outputs ────────────────────────────────────────────────────

/// One row of a sweep-result table: the grid-point parameters plus the
/// paired linear/nonlinear measurements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario: String,
    pub point: String,
    pub variant: String,
    pub lambda_hz: Option<f64>,
    pub lambda_over_lambda_c: Option<f64>,
    pub duty_cycle: Option<f64>,
    pub thermal_snr_db: Option<f64>,
    pub outlier_to_thermal_db: Option<f64>,
    pub snr_linear_db: f64,
    pub capacity_linear: f64,
    pub snr_nonlinear_db: f64,
    pub capacity_nonlinear: f64,
    pub gain_db: f64,
    pub capacity_gain: f64,
    pub frontend_peakedness_dbg: Option<f64>,
    pub clip_fraction: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_rows(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    writeln!(
        w,
        "scenario,point,variant,lambda_hz,lambda_over_lambda_c,duty_cycle,\
         thermal_snr_db,outlier_to_thermal_db,snr_linear_db,capacity_linear,\
         snr_nonlinear_db,capacity_nonlinear,gain_db,capacity_gain,\
         frontend_peakedness_dbg,clip_fraction"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.point,
            r.variant,
            opt(r.lambda_hz),
            opt(r.lambda_over_lambda_c),
            opt(r.duty_cycle),
            opt(r.thermal_snr_db),
            opt(r.outlier_to_thermal_db),
            r.snr_linear_db,
            r.capacity_linear,
            r.snr_nonlinear_db,
            r.capacity_nonlinear,
            r.gain_db,
            r.capacity_gain,
            opt(r.frontend_peakedness_dbg),
            r.clip_fraction,
        )?;
    }
    Ok(())
}

/// Write aligned columns (e.g. trace panels) with a shared time axis.
pub fn write_columns_csv(
    path: &Path,
    sample_rate: f64,
    headers: &[&str],
    columns: &[&[f64]],
) -> Result<()> {
    assert_eq!(headers.len(), columns.len());
    let n = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    write!(w, "t")?;
    for h in headers {
        write!(w, ",{h}")?;
    }
    writeln!(w)?;
    for i in 0..n {
        write!(w, "{}", i as f64 / sample_rate)?;
        for c in columns {
            write!(w, ",{}", c[i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Write a PSD as `freq_hz,density` CSV.
pub fn write_psd_csv(path: &Path, psd: &onmt_core::metrics::Psd) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    writeln!(w, "freq_hz,density")?;
    for (f, d) in psd.freqs().iter().zip(psd.density()) {
        writeln!(w, "{f},{d}")?;
    }
    Ok(())
}

/// Write packed delta-sigma bits (LSB-first) to a file.
pub fn write_bitstream(path: &Path, bits: &[f64]) -> Result<()> {
    let packed = onmt_core::deltasigma::pack_bits(bits);
    std::fs::write(path, packed).with_context(|| path.display().to_string())?;
    Ok(())
}

// ── Diagnostic traces ──────────────────────────────────────────────────

/// Run a fence tracker over a signal and write its per-sample trace
/// (Q1, Q2, Q3, fences, DCL) for figure regeneration.
pub fn write_tracker_trace(
    path: &Path,
    config: onmt_core::robust::FenceConfig,
    signal: &Signal,
) -> Result<()> {
    let mut tracker = onmt_core::robust::FenceTracker::new(config)?;
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    writeln!(w, "t,input,q1,q2,q3,fence_lo,fence_hi,dcl")?;
    let rate = signal.sample_rate();
    for (i, &x) in signal.samples().iter().enumerate() {
        tracker.update(x);
        let (q1, q2, q3) = tracker.quartiles();
        let (lo, hi) = tracker.fences();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            i as f64 / rate,
            x,
            q1,
            q2,
            q3,
            lo,
            hi,
            tracker.dcl()
        )?;
    }
    Ok(())
}

/// Run a feedback clipper over a signal and write its per-sample trace
/// (input, difference signal, fences, DCL, clip flag).
pub fn write_adic_trace(
    path: &Path,
    config: &onmt_core::adic::AdicConfig,
    signal: &Signal,
) -> Result<()> {
    let mut adic = onmt_core::adic::FeedbackAdic::new(config, signal.sample_rate())?;
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    writeln!(w, "t,input,u,fence_lo,fence_hi,chi,clipped")?;
    let rate = signal.sample_rate();
    for (i, &x) in signal.samples().iter().enumerate() {
        let probe = adic.probe();
        let chi = if i == 0 { x } else { probe.chi };
        let (y, clipped) = adic.step(x);
        let _ = y;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            i as f64 / rate,
            x,
            x - chi,
            probe.fence_lo,
            probe.fence_hi,
            chi,
            clipped as u8
        )?;
    }
    Ok(())
}

/// Write the per-stage tap points of one CAF run (band path, excess
/// path, clipped excess, recombined output).
pub fn write_caf_trace(path: &Path, trace: &onmt_core::caf::CafTrace) -> Result<()> {
    write_columns_csv(
        path,
        trace.output.sample_rate(),
        &["band", "excess", "adic_out", "output"],
        &[
            trace.band.samples(),
            trace.excess.samples(),
            trace.adic_out.samples(),
            trace.output.samples(),
        ],
    )
}

/// Write sweep rows as JSON (the same records as the CSV table).
pub fn write_sweep_rows_json(path: &Path, rows: &[SweepRow]) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(rows)?)
        .with_context(|| path.display().to_string())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use onmt_core::noise::generate_thermal;
    use onmt_core::RngSeed;

    #[test]
    fn signal_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        let s = generate_thermal(0.01, 1.0, 8000.0, RngSeed(1)).unwrap();
        write_signal_csv(&path, &s).unwrap();
        let back = read_signal_csv(&path).unwrap();
        assert_eq!(back.samples(), s.samples());
        assert!((back.sample_rate() - 8000.0).abs() < 1e-6);
    }

    #[test]
    fn signal_bin_roundtrip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.bin");
        let s = generate_thermal(0.01, 1.0, 48000.0, RngSeed(2)).unwrap();
        write_signal_bin(&path, &s).unwrap();
        let back = read_signal_bin(&path).unwrap();
        assert_eq!(back.samples(), s.samples());
        assert_eq!(back.sample_rate(), 48000.0);
    }

    #[test]
    fn bin_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"NOTMAGIC00000000").unwrap();
        assert!(read_signal_bin(&path).is_err());
    }

    #[test]
    fn design_json_roundtrip() {
        let d = onmt_core::iir::design_iir(
            IirFamily::Bessel,
            IirResponse::Lowpass { cutoff_hz: 1000.0 },
            2,
            64000.0,
        )
        .unwrap();
        let json = serde_json::to_string(&iir_to_json(&d)).unwrap();
        let parsed: DesignJson = serde_json::from_str(&json).unwrap();
        match design_from_json(&parsed).unwrap() {
            FilterKind::Iir(back) => {
                assert_eq!(back.sections(), d.sections());
                assert_eq!(back.order, 2);
            }
            _ => panic!("expected IIR"),
        }
    }
}
