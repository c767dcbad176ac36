//! Ready-made processing chains for the quantitative experiments, with
//! delay bookkeeping and paired evaluation against a clean reference.
//!
//! The standard sweep topology: a 2nd-order Bessel front end at ten times
//! the signal bandwidth, an optional nonlinear stage (CAF, bandstop+CAF,
//! or shared-band clipper), and the matched root-raised-cosine baseband
//! filter followed by a sharp cleanup lowpass. The linear reference chain
//! is the same topology with no nonlinear stage, so SNR comparisons
//! isolate exactly what the clipper buys.

use alloc::vec;
use alloc::vec::Vec;

use crate::adic::{AdicConfig, FeedbackAdic};
use crate::caf::{BandstopCafChain, Caf, CafConfig};
use crate::error::{Error, Result};
use crate::fir::{design_lowpass, FirDesign, FirFilter};
use crate::iir::{design_iir, IirDesign, IirFamily, IirFilter, IirResponse};
use crate::metrics::{baseband_snr_db, SnrReport};
use crate::robust::FenceConfig;
use crate::signal::Signal;

/// The nonlinear stage of an experiment chain.
#[derive(Debug, Clone)]
pub enum Stage {
    /// No nonlinear processing (the linear reference).
    None,
    Caf(CafConfig),
    BandstopCaf {
        bandstop: FirDesign,
        caf: CafConfig,
    },
    SharedBand(AdicConfig),
}

/// Output of one chain run.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub signal: Signal,
    /// Clip fraction of the nonlinear stage (0 for the linear chain).
    pub clip_fraction: f64,
}

/// A full front-end-to-baseband chain. Processing is stateless from the
/// caller's perspective: every run builds fresh filter state.
#[derive(Debug, Clone)]
pub struct ExperimentChain {
    frontend: Option<IirDesign>,
    stage: Stage,
    baseband: Vec<FirDesign>,
}

impl ExperimentChain {
    pub fn new(frontend: Option<IirDesign>, stage: Stage, baseband: Vec<FirDesign>) -> Self {
        ExperimentChain {
            frontend,
            stage,
            baseband,
        }
    }

    /// Group delay in samples relative to the chain input, counting the
    /// linear-phase FIR stages (IIR front-end phase is common to every
    /// chain built from the same front end, and the feedback clipper is
    /// instantaneous).
    pub fn delay(&self) -> usize {
        let stage = match &self.stage {
            Stage::None | Stage::SharedBand(_) => 0,
            Stage::Caf(cfg) => cfg.delay(),
            Stage::BandstopCaf { bandstop, caf } => {
                bandstop.len() / 2 + caf.delay()
            }
        };
        let baseband: usize = self.baseband.iter().map(|d| d.len() / 2).sum();
        stage + baseband
    }

    pub fn process(&self, input: &Signal) -> Result<ChainOutput> {
        let mut current = match &self.frontend {
            Some(fe) => IirFilter::new(fe).apply(input)?,
            None => input.clone(),
        };
        let mut clip_fraction = 0.0;
        match &self.stage {
            Stage::None => {}
            Stage::Caf(cfg) => {
                let mut caf = Caf::new(cfg)?;
                current = caf.process(&current)?;
                clip_fraction = caf.clip_fraction();
            }
            Stage::BandstopCaf { bandstop, caf } => {
                let mut chain = BandstopCafChain::new(bandstop, caf)?;
                current = chain.process(&current)?;
                clip_fraction = chain.clip_fraction();
            }
            Stage::SharedBand(cfg) => {
                let mut adic = FeedbackAdic::new(cfg, current.sample_rate())?;
                current = adic.process(&current);
                clip_fraction = adic.clip_fraction();
            }
        }
        for design in &self.baseband {
            current = FirFilter::new(design).apply(&current)?;
        }
        Ok(ChainOutput {
            signal: current,
            clip_fraction,
        })
    }

    /// The front-end output alone (where peakedness is assessed).
    pub fn frontend_output(&self, input: &Signal) -> Result<Signal> {
        match &self.frontend {
            Some(fe) => IirFilter::new(fe).apply(input),
            None => Ok(input.clone()),
        }
    }
}

/// Shared pieces of one sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepSetup {
    pub rate: f64,
    pub b0_hz: f64,
    pub frontend: IirDesign,
    rrc: FirDesign,
    cleanup: FirDesign,
}

impl SweepSetup {
    /// Front end: 2nd-order Bessel lowpass at `10 * b0`. Baseband: the
    /// matched RRC plus a sharp cleanup lowpass at `1.3 * b0` (80 dB) so
    /// out-of-band residue cannot masquerade as baseband noise.
    pub fn new(b0_hz: f64, rate: f64) -> Result<Self> {
        let frontend = design_iir(
            IirFamily::Bessel,
            IirResponse::Lowpass {
                cutoff_hz: 10.0 * b0_hz,
            },
            2,
            rate,
        )?;
        let rrc = crate::fir::design_rrc(b0_hz, crate::noise::DEFAULT_RRC_ROLLOFF, 16, rate)?;
        let cleanup = design_lowpass(1.3 * b0_hz, 0.4 * b0_hz, 80.0, rate)?;
        Ok(SweepSetup {
            rate,
            b0_hz,
            frontend,
            rrc,
            cleanup,
        })
    }

    fn baseband(&self) -> Vec<FirDesign> {
        vec![self.rrc.clone(), self.cleanup.clone()]
    }

    /// The matched root-raised-cosine baseband filter.
    pub fn rrc(&self) -> &FirDesign {
        &self.rrc
    }

    /// The sharp cleanup lowpass cascaded after the RRC.
    pub fn cleanup(&self) -> &FirDesign {
        &self.cleanup
    }

    pub fn linear_chain(&self) -> ExperimentChain {
        ExperimentChain::new(Some(self.frontend.clone()), Stage::None, self.baseband())
    }

    pub fn caf_chain(&self, fences: FenceConfig, tau: Option<f64>) -> Result<ExperimentChain> {
        let mut cfg = CafConfig::baseband(self.b0_hz, fences, self.rate)?;
        if let Some(tau) = tau {
            cfg.adic.tau = tau;
        }
        Ok(ExperimentChain::new(
            Some(self.frontend.clone()),
            Stage::Caf(cfg),
            self.baseband(),
        ))
    }

    pub fn bandstop_caf_chain(
        &self,
        stop_band: (f64, f64),
        fences: FenceConfig,
    ) -> Result<ExperimentChain> {
        let width = stop_band.1 - stop_band.0;
        let bandstop = crate::fir::design_bandstop(
            stop_band.0,
            stop_band.1,
            0.2 * width,
            60.0,
            self.rate,
        )?;
        let caf = CafConfig::baseband(self.b0_hz, fences, self.rate)?;
        Ok(ExperimentChain::new(
            Some(self.frontend.clone()),
            Stage::BandstopCaf { bandstop, caf },
            self.baseband(),
        ))
    }

    /// Clipper directly ahead of the baseband filter (no band split), for
    /// interference confined to the signal's own band. The DCL corner
    /// defaults to `0.1 * b0`: the loop holds a slowly adaptive
    /// mid-range, so in-band outlier pulses protrude fully from the
    /// difference signal.
    pub fn shared_band_chain(
        &self,
        fences: FenceConfig,
        tau: Option<f64>,
    ) -> Result<ExperimentChain> {
        let tau = tau.unwrap_or(1.0 / (core::f64::consts::TAU * 0.1 * self.b0_hz));
        Ok(ExperimentChain::new(
            Some(self.frontend.clone()),
            Stage::SharedBand(AdicConfig::self_tracked(tau, fences)),
            self.baseband(),
        ))
    }

    /// Pileup threshold rate of this setup's front end.
    pub fn pileup_threshold(&self) -> Result<f64> {
        crate::metrics::pileup_threshold(&self.frontend)
    }
}

/// Delay-aligned SNR: compares `output` (group delay `out_delay`) against
/// `reference` (group delay `ref_delay`), skipping `skip` samples of
/// settled signal before measuring.
pub fn aligned_snr(
    output: &Signal,
    out_delay: usize,
    reference: &Signal,
    ref_delay: usize,
    skip: usize,
) -> Result<SnrReport> {
    if output.sample_rate() != reference.sample_rate() {
        return Err(Error::RateMismatch {
            expected: reference.sample_rate(),
            actual: output.sample_rate(),
        });
    }
    let n = output.len().min(reference.len());
    let max_delay = out_delay.max(ref_delay);
    if n <= max_delay + skip {
        return Err(Error::invalid("signals too short for aligned comparison"));
    }
    let len = n - max_delay;
    let y = Signal::from_parts(
        output.samples()[out_delay..out_delay + len].to_vec(),
        output.sample_rate(),
    );
    let r = Signal::from_parts(
        reference.samples()[ref_delay..ref_delay + len].to_vec(),
        reference.sample_rate(),
    );
    baseband_snr_db(&y, &r, skip)
}

/// Mean power of a chain's output over the settled window.
pub fn chain_output_power(chain: &ExperimentChain, input: &Signal, skip: usize) -> Result<f64> {
    let out = chain.process(input)?;
    Ok(out.signal.mean_square_from(chain.delay() + skip))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caf::default_sweep_fences;
    use crate::noise::{generate_rrc_signal, generate_thermal};
    use crate::RngSeed;

    #[test]
    fn linear_and_caf_chains_align() {
        let rate = 64_000.0;
        let setup = SweepSetup::new(1000.0, rate).unwrap();
        let clean = generate_rrc_signal(1000.0, 2.0, rate, RngSeed(61)).unwrap();
        let linear = setup.linear_chain();
        let caf = setup.caf_chain(default_sweep_fences(), None).unwrap();
        let ref_out = linear.process(&clean).unwrap();
        let caf_out = caf.process(&clean).unwrap();
        let snr = aligned_snr(
            &caf_out.signal,
            caf.delay(),
            &ref_out.signal,
            linear.delay(),
            16_384,
        )
        .unwrap();
        // Clean input: the nonlinear chain must reproduce the linear
        // reference almost exactly.
        assert!(snr.snr_db > 60.0, "clean-input SNR {} dB", snr.snr_db);
    }

    #[test]
    fn chain_delay_counts_fir_stages() {
        let setup = SweepSetup::new(1000.0, 64_000.0).unwrap();
        let linear = setup.linear_chain();
        let caf = setup.caf_chain(default_sweep_fences(), None).unwrap();
        assert!(caf.delay() > linear.delay());
    }

    #[test]
    fn single_wideband_impulse_attenuated() {
        // One strong impulse on a band-limited signal in mild thermal
        // noise: the CAF chain must cut the impulse's baseband energy by
        // at least 10 dB relative to the linear chain. The impulse is
        // sized so its spike violates the fences while its in-band
        // compensation tail stays inside them.
        let rate = 64_000.0;
        let b0 = 1000.0;
        let setup = SweepSetup::new(b0, rate).unwrap();
        let clean = generate_rrc_signal(b0, 2.0, rate, RngSeed(67)).unwrap();
        let mut noise = generate_thermal(2.0, 1e-4, rate, RngSeed(68))
            .unwrap()
            .into_samples();
        let at = 3 * noise.len() / 4;
        noise[at] += 3.0;
        let noise = Signal::new(noise, rate).unwrap();
        let mixture = clean.add(&noise).unwrap();

        let linear = setup.linear_chain();
        let caf = setup.caf_chain(default_sweep_fences(), None).unwrap();
        let s_ref = linear.process(&clean).unwrap().signal;
        let y_lin = linear.process(&mixture).unwrap().signal;
        let y_caf = caf.process(&mixture).unwrap().signal;

        // Error energy in a window straddling the impulse.
        let energy = |out: &Signal, delay: usize| -> f64 {
            let mut e = 0.0;
            for k in at.saturating_sub(500)..(at + 2500) {
                let d = out.samples()[k + delay] - s_ref.samples()[k + linear.delay()];
                e += d * d;
            }
            e
        };
        let e_lin = energy(&y_lin, linear.delay());
        let e_caf = energy(&y_caf, caf.delay());
        let gain_db = 10.0 * (e_lin / e_caf).log10();
        assert!(gain_db >= 10.0, "impulse energy reduction {gain_db} dB");
    }
}
