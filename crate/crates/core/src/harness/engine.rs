use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    reliable_count, reserved_count, stream_seed, BerRecord, Metric, Receiver, ScenarioConfig,
    ScenarioOutput, SuccessRecord,
};
use crate::error::{Error, Result};
use crate::linalg::{complex_normal, C64, ZERO};
use crate::nbi::{calibrate_sir, synthesize_nbi, NbiSource, OffsetMode};
use crate::pipeline::{
    build_augmented_system, build_reserved_system, choose_reserved, equalized_noise_var,
    mrc_combine, multi_antenna_nbi, rank_reliability, recover_and_subtract, residual_variances,
    solver_noise_var, zf_noise_cancellation, SensingSystem, ToneSets,
};
use crate::qam::{bit_distance, Constellation};
use crate::sabmp::{default_t_max, SabmpParams};
use crate::scfdma::{
    build_equalizer, receive_with_noise, ChannelRealization, EqualizerKind, QamFrame, SystemConfig,
};
use crate::sparsify::{Sparsifier, SparsifierKind};

/// `|{i in R : decision_i = truth_i}| / |R|`.
pub fn success_rate(reliable: &[usize], decisions: &[usize], truth: &[usize]) -> Result<f64> {
    if reliable.is_empty() {
        return Err(Error::Empty("reliable set"));
    }
    let mut correct = 0usize;
    for &i in reliable {
        let (Some(d), Some(t)) = (decisions.get(i), truth.get(i)) else {
            return Err(Error::OutOfRange {
                what: "reliable index",
                index: i,
                limit: decisions.len().min(truth.len()),
            });
        };
        correct += usize::from(d == t);
    }
    Ok(correct as f64 / reliable.len() as f64)
}

/// Significant solve-domain coefficients per interferer when not configured.
fn default_coeffs(kind: SparsifierKind, offset: OffsetMode) -> f64 {
    match (kind, offset) {
        (SparsifierKind::None, OffsetMode::OnGrid) => 1.0,
        (SparsifierKind::None, OffsetMode::IndependentOffsets) => 3.0,
        (SparsifierKind::Window, _) => 4.0,
        (SparsifierKind::Haar, _) => 6.0,
    }
}

/// Expected number of enhanced-noise bins per block for ZF noise cancellation.
const NC_WEAK_BINS: f64 = 2.0;

struct ResolvedCurve {
    label: String,
    receiver: Receiver,
    reserved: Vec<usize>,
    data: Vec<usize>,
    reliable: usize,
    sparsifier: Sparsifier,
    equalizer: EqualizerKind,
    /// Prior activation probability handed to the solver (scaled by the
    /// multiplier).
    lambda: f64,
    /// Unscaled rate; sizes the support bound.
    design_lambda: f64,
}

#[derive(Clone, Copy, Default)]
struct Tally {
    bit_errors: u64,
    correct: u64,
    selected: u64,
}

struct Draw {
    channels: Vec<ChannelRealization>,
    symbols: Vec<usize>,
    /// Frequency-domain interference per antenna.
    nbi: Vec<Vec<C64>>,
    /// Unit-variance noise per antenna.
    noise: Vec<Vec<C64>>,
}

struct Runner<'a> {
    cfg: &'a ScenarioConfig,
    constellation: Constellation,
    curves: Vec<ResolvedCurve>,
    fixed_sources: Option<Vec<NbiSource>>,
}

fn clamp_lambda(l: f64) -> f64 {
    l.clamp(1e-6, 0.95)
}

/// The support bound follows the design rate so that a mis-specified prior
/// only changes the prior.
fn curve_params(curve: &ResolvedCurve, noise_var: f64, n: usize, m: usize) -> SabmpParams {
    SabmpParams::uniform(curve.lambda, noise_var, default_t_max(n, curve.design_lambda, m))
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let sys = &cfg.system;
        let n = sys.n_subcarriers;
        let p = sys.per_user();
        let curves = cfg
            .curves
            .iter()
            .map(|c| {
                let frac = c.reserved_fraction.unwrap_or(cfg.reserved_fraction);
                let reserved = if c.receiver.needs_reserved() {
                    let t = reserved_count(frac, p);
                    choose_reserved(p, t, stream_seed(cfg.seed, &cfg.name, u64::MAX - 1, t as u64))?
                } else {
                    Vec::new()
                };
                let data = (0..p).filter(|i| reserved.binary_search(i).is_err()).collect();
                let reliable = reliable_count(c.reliable_ratio.unwrap_or(cfg.reliable_ratio), reserved.len());
                let kind = c.sparsifier.unwrap_or(cfg.sparsifier);
                let mult = c.multiplier.unwrap_or(cfg.multiplier);
                let design = if c.receiver == Receiver::ZfNoiseCancel {
                    cfg.coeffs_per_source.unwrap_or(NC_WEAK_BINS) / p as f64
                } else {
                    let coeffs = cfg
                        .coeffs_per_source
                        .unwrap_or_else(|| default_coeffs(kind, cfg.nbi.offset_mode));
                    cfg.nbi.mean_active() * coeffs / n as f64
                };
                let equalizer = match c.receiver {
                    Receiver::ZfNoiseCancel => EqualizerKind::Zf,
                    _ => c.equalizer.unwrap_or(cfg.equalizer),
                };
                Ok(ResolvedCurve {
                    label: format!("{}/{}", cfg.name, c.name),
                    receiver: c.receiver,
                    reserved,
                    data,
                    reliable,
                    sparsifier: Sparsifier::of_kind(kind, n)?,
                    equalizer,
                    lambda: clamp_lambda(mult * design),
                    design_lambda: clamp_lambda(design),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let fixed_sources = if cfg.nbi.per_symbol_refresh || cfg.nbi.max_sources == 0 {
            None
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, &cfg.name, u64::MAX, 0));
            Some(Self::calibrated(cfg, &mut rng)?)
        };
        Ok(Self {
            cfg,
            constellation: sys.constellation()?,
            curves,
            fixed_sources,
        })
    }

    fn calibrated(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<NbiSource>> {
        let n = cfg.system.n_subcarriers;
        let src = cfg.nbi.draw(rng, n);
        // expected received data energy of all users: unit-energy channels
        // and a unitary precoder give N sigma_x^2
        calibrate_sir(&src, n, n as f64 * cfg.system.symbol_var, cfg.nbi.sir_db)
    }

    fn draw(&self, seed: u64) -> Result<Draw> {
        let cfg = self.cfg;
        let n = cfg.system.n_subcarriers;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels = (0..cfg.antennas)
            .map(|_| ChannelRealization::random(&mut rng, cfg.system.channel_len, n))
            .collect::<Result<Vec<_>>>()?;
        let q = self.constellation.order();
        let symbols = (0..cfg.system.per_user()).map(|_| rng.random_range(0..q)).collect();
        let sources = match (&self.fixed_sources, cfg.nbi.max_sources) {
            (_, 0) => Vec::new(),
            (Some(s), _) => s.clone(),
            (None, _) => Self::calibrated(cfg, &mut rng)?,
        };
        // antenna 0 sees the calibrated sources; further antennas see each
        // source through an independent CN(0, 1) gain
        let mut nbi = Vec::with_capacity(cfg.antennas);
        for a in 0..cfg.antennas {
            let src: Vec<NbiSource> = if a == 0 {
                sources.clone()
            } else {
                sources
                    .iter()
                    .map(|s| NbiSource::new(s.frequency, s.amplitude * complex_normal(&mut rng, 1.0)))
                    .collect()
            };
            nbi.push(synthesize_nbi(&src, n)?);
        }
        let noise = (0..cfg.antennas)
            .map(|_| (0..n).map(|_| complex_normal(&mut rng, 1.0)).collect())
            .collect();
        Ok(Draw {
            channels,
            symbols,
            nbi,
            noise,
        })
    }

    fn frame(&self, sys: &SystemConfig, curve: &ResolvedCurve, symbols: &[usize]) -> Result<QamFrame> {
        let mut bits = Vec::with_capacity(curve.data.len() * self.constellation.bits_per_symbol());
        for &i in &curve.data {
            self.constellation.symbol_bits(symbols[i], &mut bits);
        }
        QamFrame::new(sys, &self.constellation, 0, bits, &curve.reserved)
    }

    fn params(&self, curve: &ResolvedCurve, base_noise: f64, sys: &SensingSystem) -> SabmpParams {
        curve_params(curve, solver_noise_var(base_noise, &sys.measurements), sys.n_unknowns(), sys.measurements.len())
    }

    fn count_errors(&self, curve: &ResolvedCurve, x: &[C64], symbols: &[usize]) -> u64 {
        curve
            .data
            .iter()
            .map(|&i| bit_distance(self.constellation.decide(x[i]), symbols[i]) as u64)
            .sum()
    }

    fn trial(&self, sys: &SystemConfig, draw: &Draw) -> Result<Vec<Tally>> {
        let n = sys.n_subcarriers;
        let sigma = sys.noise_var.sqrt();
        let zero_nbi = vec![ZERO; n];
        let noise: Vec<Vec<C64>> = draw
            .noise
            .iter()
            .map(|z| z.iter().map(|v| v * sigma).collect())
            .collect();
        self.curves
            .iter()
            .map(|curve| {
                let frame = self.frame(sys, curve, &draw.symbols)?;
                let mut tally = Tally::default();
                if matches!(curve.receiver, Receiver::MmvMrc | Receiver::SmvMrc) {
                    let cleaned = self.multi_antenna(sys, curve, &frame, draw, &noise)?;
                    tally.bit_errors = self.count_errors(curve, &cleaned, &draw.symbols);
                    return Ok(tally);
                }
                let ch = &draw.channels[0];
                let nbi = if curve.receiver.uses_nbi() { &draw.nbi[0] } else { &zero_nbi };
                let y = receive_with_noise(sys, std::slice::from_ref(&frame), std::slice::from_ref(ch), nbi, &noise[0])?;
                let eq = build_equalizer(curve.equalizer, ch, sys, 0)?;
                let x = eq.apply(&y)?;
                let base_noise = equalized_noise_var(&eq, ch, sys);
                let cleaned = match curve.receiver {
                    Receiver::NbiFree | Receiver::Impaired => x,
                    Receiver::Proposed => {
                        let s = build_reserved_system(&x, &eq, &curve.reserved, &curve.sparsifier)?;
                        let p = self.params(curve, base_noise, &s);
                        recover_and_subtract(&s, &p, &eq, &x)?.cleaned
                    }
                    Receiver::Augmented => {
                        let s1 = build_reserved_system(&x, &eq, &curve.reserved, &curve.sparsifier)?;
                        let p1 = self.params(curve, base_noise, &s1);
                        let r1 = recover_and_subtract(&s1, &p1, &eq, &x)?;
                        let var = residual_variances(&r1.estimate, &eq, &s1)?;
                        let table = rank_reliability(
                            &r1.cleaned,
                            var,
                            base_noise,
                            &curve.reserved,
                            curve.reliable,
                            self.cfg.reliability,
                            &self.constellation,
                        );
                        tally.selected = table.reliable.len() as u64;
                        tally.correct = table
                            .reliable
                            .iter()
                            .filter(|&&i| self.constellation.decide(r1.cleaned[i]) == draw.symbols[i])
                            .count() as u64;
                        let tones = ToneSets {
                            reserved: curve.reserved.clone(),
                            reliable: table.reliable,
                        };
                        let s2 = build_augmented_system(&x, &r1.cleaned, &eq, &tones, &curve.sparsifier, &self.constellation)?;
                        let p2 = self.params(curve, base_noise, &s2);
                        recover_and_subtract(&s2, &p2, &eq, &x)?.cleaned
                    }
                    Receiver::ZfNoiseCancel => {
                        let mut g2: Vec<f64> = eq.gains.iter().map(|g| g.norm_sqr()).collect();
                        g2.sort_by(|a, b| a.total_cmp(b));
                        let median = g2[g2.len() / 2];
                        let meas: Vec<C64> = curve.reserved.iter().map(|&i| x[i]).collect();
                        let m = meas.len();
                        let p = curve_params(curve, solver_noise_var(sys.noise_var * median, &meas), sys.per_user(), m);
                        zf_noise_cancellation(&x, &eq, &curve.reserved, &p)?
                    }
                    Receiver::MmvMrc | Receiver::SmvMrc => unreachable!(),
                };
                tally.bit_errors = self.count_errors(curve, &cleaned, &draw.symbols);
                Ok(tally)
            })
            .collect()
    }

    fn multi_antenna(
        &self,
        sys: &SystemConfig,
        curve: &ResolvedCurve,
        frame: &QamFrame,
        draw: &Draw,
        noise: &[Vec<C64>],
    ) -> Result<Vec<C64>> {
        let n = sys.n_subcarriers;
        let p = sys.per_user();
        let mut ys = Vec::with_capacity(self.cfg.antennas);
        let mut xs = Vec::with_capacity(self.cfg.antennas);
        let mut eqs = Vec::with_capacity(self.cfg.antennas);
        let mut params = Vec::with_capacity(self.cfg.antennas);
        let unknowns = if curve.sparsifier.kind() == SparsifierKind::None { p } else { n };
        for (a, ch) in draw.channels.iter().enumerate() {
            let y = receive_with_noise(sys, std::slice::from_ref(frame), std::slice::from_ref(ch), &draw.nbi[a], &noise[a])?;
            let eq = build_equalizer(curve.equalizer, ch, sys, 0)?;
            let x = eq.apply(&y)?;
            let meas: Vec<C64> = curve.reserved.iter().map(|&i| x[i]).collect();
            params.push(curve_params(
                curve,
                solver_noise_var(equalized_noise_var(&eq, ch, sys), &meas),
                unknowns,
                meas.len(),
            ));
            ys.push(y);
            xs.push(x);
            eqs.push(eq);
        }
        let joint = curve.receiver == Receiver::MmvMrc;
        let est = multi_antenna_nbi(&xs, &eqs, &curve.reserved, &curve.sparsifier, &params, joint)?;
        let cleaned: Vec<Vec<C64>> = ys
            .iter()
            .zip(&est)
            .map(|(y, e)| y.iter().zip(e).map(|(a, b)| a - b).collect())
            .collect();
        mrc_combine(&cleaned, &draw.channels, sys, 0)
    }
}

/// Run every curve of `cfg` over its Eb/N0 grid. Each trial draws channels,
/// data, interference and noise from its own counter-derived stream, shared by
/// all curves, so results do not depend on thread count.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let runner = Runner::new(cfg)?;
    let bps = runner.constellation.bits_per_symbol() as u64;
    let mut out = ScenarioOutput::default();
    for (gi, &ebn0) in cfg.ebn0_db.iter().enumerate() {
        let start = Instant::now();
        let sys = cfg.system.clone().with_noise_var(cfg.system.noise_var_for_ebn0(ebn0));
        let zero = vec![Tally::default(); runner.curves.len()];
        let totals = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let draw = runner.draw(stream_seed(cfg.seed, &cfg.name, gi as u64, t))?;
                runner.trial(&sys, &draw)
            })
            .try_reduce(
                || zero.clone(),
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x.bit_errors += y.bit_errors;
                        x.correct += y.correct;
                        x.selected += y.selected;
                    }
                    Ok(a)
                },
            )?;
        let ms = start.elapsed().as_millis() as u64;
        let trials = cfg.trials as u64;
        for (curve, tally) in runner.curves.iter().zip(totals) {
            match cfg.metric {
                Metric::Ber => {
                    let total_bits = trials * curve.data.len() as u64 * bps;
                    out.records.push(BerRecord {
                        scenario: curve.label.clone(),
                        ebn0_db: ebn0,
                        trials,
                        bit_errors: tally.bit_errors,
                        total_bits,
                        ber: tally.bit_errors as f64 / total_bits as f64,
                        wall_time_ms: ms,
                        seed: cfg.seed,
                    });
                }
                Metric::SuccessRate => out.success.push(SuccessRecord {
                    scenario: curve.label.clone(),
                    ebn0_db: ebn0,
                    trials,
                    correct: tally.correct,
                    selected: tally.selected,
                    success_rate: if tally.selected == 0 {
                        0.0
                    } else {
                        tally.correct as f64 / tally.selected as f64
                    },
                    wall_time_ms: ms,
                }),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Curve, ScenarioConfig};

    #[test]
    fn success_rate_counts() {
        assert_eq!(success_rate(&[0, 1, 2], &[4, 5, 6], &[4, 5, 6]).unwrap(), 1.0);
        assert_eq!(success_rate(&[0, 1, 2, 3], &[1, 1, 1, 0], &[1, 1, 1, 1]).unwrap(), 0.75);
        assert!(success_rate(&[], &[1], &[1]).is_err());
    }

    #[test]
    fn noiseless_zf_without_interference_is_error_free() {
        let mut cfg = ScenarioConfig::base("clean", 32);
        cfg.nbi.max_sources = 0;
        cfg.trials = 1;
        cfg.ebn0_db = vec![300.0];
        cfg.curves = vec![Curve::of(Receiver::NbiFree).equalizer(EqualizerKind::Zf)];
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.records[0].bit_errors, 0);
        assert_eq!(out.records[0].total_bits, 16 * 4);
    }
}
