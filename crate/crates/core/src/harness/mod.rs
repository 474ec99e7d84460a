//! Seeded Monte-Carlo BER experiments.

mod config;
mod engine;
mod gini;
mod presets;
mod report;

pub use config::{parse_config, parse_ebn0_grid};
pub use engine::{run_scenario, success_rate};
pub use gini::{gini_experiment, GiniRecord};
pub use presets::{preset, PRESET_NAMES};
pub use report::{
    emit_csv, emit_gini_csv, emit_success_csv, emit_summary, format_ber, parse_csv, write_csv,
    CSV_HEADER,
};

use crate::error::{Error, Result};
use crate::nbi::{NbiScenario, OffsetMode};
use crate::pipeline::ReliabilityKind;
use crate::scfdma::{EqualizerKind, SystemConfig};
use crate::sparsify::SparsifierKind;

/// Receiver chain evaluated by one curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    /// Interference switched off, plain equalization.
    NbiFree,
    /// Interference present, no mitigation.
    Impaired,
    /// Reserved-tone recovery and subtraction.
    Proposed,
    /// Reserved tones plus reliable carriers, re-solved.
    Augmented,
    /// ZF equalization with sparse recovery of the enhanced noise.
    ZfNoiseCancel,
    /// Per-antenna recovery with a joint support, then MRC.
    MmvMrc,
    /// Independent per-antenna recovery, then MRC.
    SmvMrc,
}

impl Receiver {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NbiFree => "nbi_free",
            Self::Impaired => "impaired",
            Self::Proposed => "proposed",
            Self::Augmented => "augmented",
            Self::ZfNoiseCancel => "zf_nc",
            Self::MmvMrc => "mmv",
            Self::SmvMrc => "smv",
        }
    }

    fn uses_nbi(&self) -> bool {
        !matches!(self, Self::NbiFree | Self::ZfNoiseCancel)
    }

    fn needs_reserved(&self) -> bool {
        !matches!(self, Self::NbiFree | Self::Impaired)
    }
}

impl std::str::FromStr for Receiver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "nbi_free" | "free" => Self::NbiFree,
            "impaired" => Self::Impaired,
            "proposed" | "reserved_only" => Self::Proposed,
            "augmented" | "data_aided" => Self::Augmented,
            "zf_nc" => Self::ZfNoiseCancel,
            "mmv" => Self::MmvMrc,
            "smv" => Self::SmvMrc,
            other => return Err(Error::config("curves", format!("unknown receiver '{other}'"))),
        })
    }
}

/// One curve of a scenario: a receiver plus overrides of the scenario
/// defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub receiver: Receiver,
    pub reserved_fraction: Option<f64>,
    pub reliable_ratio: Option<f64>,
    pub sparsifier: Option<SparsifierKind>,
    pub equalizer: Option<EqualizerKind>,
    pub multiplier: Option<f64>,
}

impl Curve {
    pub fn new(name: impl Into<String>, receiver: Receiver) -> Self {
        Self {
            name: name.into(),
            receiver,
            reserved_fraction: None,
            reliable_ratio: None,
            sparsifier: None,
            equalizer: None,
            multiplier: None,
        }
    }

    pub fn of(receiver: Receiver) -> Self {
        Self::new(receiver.name(), receiver)
    }

    pub fn reserved(mut self, fraction: f64) -> Self {
        self.reserved_fraction = Some(fraction);
        self
    }

    pub fn reliable(mut self, ratio: f64) -> Self {
        self.reliable_ratio = Some(ratio);
        self
    }

    pub fn sparsifier(mut self, kind: SparsifierKind) -> Self {
        self.sparsifier = Some(kind);
        self
    }

    pub fn equalizer(mut self, kind: EqualizerKind) -> Self {
        self.equalizer = Some(kind);
        self
    }

    pub fn multiplier(mut self, m: f64) -> Self {
        self.multiplier = Some(m);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Ber,
    /// Fraction of correct hard decisions inside the reliable set.
    SuccessRate,
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Noise variance is overwritten per Eb/N0 point.
    pub system: SystemConfig,
    pub nbi: NbiScenario,
    /// `|T| / P`.
    pub reserved_fraction: f64,
    /// `|R| / |T|`.
    pub reliable_ratio: f64,
    pub sparsifier: SparsifierKind,
    pub equalizer: EqualizerKind,
    pub antennas: usize,
    pub ebn0_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Scales the sparsity-rate estimate handed to the solver.
    pub multiplier: f64,
    /// Expected significant coefficients per source in the solve domain;
    /// `None` picks a default for the sparsifier and offset mode.
    pub coeffs_per_source: Option<f64>,
    pub reliability: ReliabilityKind,
    pub metric: Metric,
    pub curves: Vec<Curve>,
}

impl ScenarioConfig {
    /// A single-antenna on-grid baseline at desk scale.
    pub fn base(name: impl Into<String>, n: usize) -> Self {
        Self {
            name: name.into(),
            system: SystemConfig::new(n, 2, 16, n / 4),
            nbi: NbiScenario {
                max_sources: 4,
                sir_db: -10.0,
                offset_mode: OffsetMode::OnGrid,
                per_symbol_refresh: true,
            },
            reserved_fraction: 0.25,
            reliable_ratio: 1.0,
            sparsifier: SparsifierKind::None,
            equalizer: EqualizerKind::Mmse,
            antennas: 1,
            ebn0_db: (0..=8).map(|k| k as f64 * 2.5).collect(),
            trials: 2000,
            seed: 1,
            multiplier: 1.0,
            coeffs_per_source: None,
            reliability: ReliabilityKind::Probabilistic,
            metric: Metric::Ber,
            curves: Vec::new(),
        }
    }

    /// Change `N`, keeping the channel at a quarter of the block.
    pub fn with_n(mut self, n: usize) -> Self {
        self.system.n_subcarriers = n;
        self.system.channel_len = (n / 4).max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.ebn0_db.is_empty() {
            return Err(Error::config("ebn0", "grid must not be empty"));
        }
        if let Some(v) = self.ebn0_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::config("ebn0", format!("{v} is not finite")));
        }
        if self.antennas == 0 {
            return Err(Error::config("antennas", "must be at least 1"));
        }
        if self.curves.is_empty() {
            return Err(Error::config("curves", "at least one curve is required"));
        }
        let n = self.system.n_subcarriers;
        let p = self.system.per_user();
        for c in &self.curves {
            let frac = c.reserved_fraction.unwrap_or(self.reserved_fraction);
            if c.receiver.needs_reserved() {
                let t = reserved_count(frac, p);
                if t == 0 || t >= p {
                    return Err(Error::config(
                        "reserved",
                        format!("curve '{}': {t} reserved tones out of {p}", c.name),
                    ));
                }
                let r = reliable_count(c.reliable_ratio.unwrap_or(self.reliable_ratio), t);
                if c.receiver == Receiver::Augmented && t + r > p {
                    return Err(Error::config(
                        "reliable",
                        format!("curve '{}': |T| + |R| = {} exceeds {p}", c.name, t + r),
                    ));
                }
            }
            let m = c.multiplier.unwrap_or(self.multiplier);
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::config("multiplier", format!("{m} must be positive")));
            }
            let sp = c.sparsifier.unwrap_or(self.sparsifier);
            if sp == SparsifierKind::Haar && !n.is_power_of_two() {
                return Err(Error::config("n", format!("Haar sparsifier needs a power of two, got {n}")));
            }
        }
        if let Some(c) = self.coeffs_per_source {
            if !(c > 0.0) {
                return Err(Error::config("coeffs_per_source", "must be positive"));
            }
        }
        Ok(())
    }
}

pub(crate) fn reserved_count(fraction: f64, p: usize) -> usize {
    (fraction * p as f64).round() as usize
}

pub(crate) fn reliable_count(ratio: f64, reserved: usize) -> usize {
    (ratio * reserved as f64).round() as usize
}

/// Accumulated bit errors at one Eb/N0 point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub scenario: String,
    pub ebn0_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub total_bits: u64,
    pub ber: f64,
    pub wall_time_ms: u64,
    pub seed: u64,
}

impl BerRecord {
    /// Binomial standard error of the BER estimate.
    pub fn std_error(&self) -> f64 {
        let p = self.ber;
        (p * (1.0 - p) / self.total_bits.max(1) as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessRecord {
    pub scenario: String,
    pub ebn0_db: f64,
    pub trials: u64,
    pub correct: u64,
    pub selected: u64,
    pub success_rate: f64,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioOutput {
    pub records: Vec<BerRecord>,
    pub success: Vec<SuccessRecord>,
}

impl ScenarioOutput {
    /// Records of one curve, in grid order.
    pub fn curve(&self, curve: &str) -> Vec<&BerRecord> {
        self.records
            .iter()
            .filter(|r| r.scenario.rsplit('/').next() == Some(curve))
            .collect()
    }

    pub fn success_curve(&self, curve: &str) -> Vec<&SuccessRecord> {
        self.success
            .iter()
            .filter(|r| r.scenario.rsplit('/').next() == Some(curve))
            .collect()
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Counter-based stream seed: independent of scheduling.
pub(crate) fn stream_seed(base: u64, name: &str, a: u64, b: u64) -> u64 {
    splitmix(splitmix(splitmix(base ^ fnv1a(name)) ^ a) ^ b)
}
