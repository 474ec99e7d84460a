//! Narrowband interference with independent per-source grid offsets.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{complex_normal, fft_unitary, norm_sqr, C64, ZERO};

/// A single interferer. `frequency` is in cycles per frame; integer values sit
/// on the DFT grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbiSource {
    pub frequency: f64,
    pub amplitude: C64,
}

impl NbiSource {
    pub fn new(frequency: f64, amplitude: C64) -> Self {
        Self { frequency, amplitude }
    }

    pub fn is_on_grid(&self) -> bool {
        self.frequency.fract() == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetMode {
    OnGrid,
    IndependentOffsets,
}

impl std::str::FromStr for OffsetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "on_grid" | "ongrid" | "none" => Ok(Self::OnGrid),
            "independent_offsets" | "offset" | "off_grid" => Ok(Self::IndependentOffsets),
            other => Err(Error::config("offset", format!("unknown offset mode '{other}'"))),
        }
    }
}

/// Statistical description of the interference environment.
#[derive(Debug, Clone, PartialEq)]
pub struct NbiScenario {
    pub max_sources: usize,
    pub sir_db: f64,
    pub offset_mode: OffsetMode,
    pub per_symbol_refresh: bool,
}

impl NbiScenario {
    pub fn mean_active(&self) -> f64 {
        if self.max_sources == 0 {
            0.0
        } else {
            (self.max_sources as f64 + 1.0) / 2.0
        }
    }

    /// Draw the active sources for one symbol: count uniform on
    /// `1..=max_sources`, distinct integer bins, and for off-grid mode an
    /// independent offset uniform on `[-1/2, 1/2]` per source. Amplitudes are
    /// CN(0, 1) before SIR calibration.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<NbiSource> {
        if self.max_sources == 0 {
            return Vec::new();
        }
        let count = rng.random_range(1..=self.max_sources.min(n));
        sample(rng, n, count)
            .into_iter()
            .map(|bin| {
                let f = match self.offset_mode {
                    OffsetMode::OnGrid => bin as f64,
                    OffsetMode::IndependentOffsets => {
                        let delta: f64 = rng.random_range(-0.5..=0.5);
                        let f = (bin as f64 + delta).rem_euclid(n as f64);
                        if f >= n as f64 {
                            0.0
                        } else {
                            f
                        }
                    }
                };
                NbiSource::new(f, complex_normal(rng, 1.0))
            })
            .collect()
    }
}

/// `I = F_N Fbar_con^H I_L`: each source contributes the DFT of a unit-norm
/// complex exponential at its (possibly fractional) frequency.
pub fn synthesize_nbi(sources: &[NbiSource], n: usize) -> Result<Vec<C64>> {
    let mut out = vec![ZERO; n];
    let mut time = vec![ZERO; n];
    let mut any_off_grid = false;
    let scale = 1.0 / (n as f64).sqrt();
    for s in sources {
        if !(s.frequency >= 0.0 && s.frequency < n as f64) {
            return Err(Error::FrequencyOutOfRange {
                frequency: s.frequency,
                n,
            });
        }
        if s.is_on_grid() {
            out[s.frequency as usize] += s.amplitude;
        } else {
            any_off_grid = true;
            for (k, t) in time.iter_mut().enumerate() {
                let phase = 2.0 * std::f64::consts::PI * s.frequency * k as f64 / n as f64;
                *t += s.amplitude * C64::from_polar(scale, phase);
            }
        }
    }
    if any_off_grid {
        fft_unitary(&mut time);
        out.iter_mut().zip(&time).for_each(|(o, t)| *o += t);
    }
    Ok(out)
}

/// Rescale amplitudes so that `||I||^2 / data_power = 10^(-sir_db/10)`.
pub fn calibrate_sir(
    sources: &[NbiSource],
    n: usize,
    data_power: f64,
    sir_db: f64,
) -> Result<Vec<NbiSource>> {
    if sources.is_empty() {
        return Err(Error::Empty("NBI source list"));
    }
    if !(data_power > 0.0) {
        return Err(Error::config("data_power", "must be positive"));
    }
    let measured = norm_sqr(&synthesize_nbi(sources, n)?);
    if measured == 0.0 {
        return Err(Error::ZeroVector);
    }
    let target = data_power * 10f64.powf(-sir_db / 10.0);
    let g = (target / measured).sqrt();
    Ok(sources
        .iter()
        .map(|s| NbiSource::new(s.frequency, s.amplitude * g))
        .collect())
}
