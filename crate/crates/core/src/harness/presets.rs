use super::{Curve, Metric, Receiver, ScenarioConfig};
use crate::error::{Error, Result};
use crate::nbi::OffsetMode;
use crate::scfdma::EqualizerKind;
use crate::sparsify::SparsifierKind;

/// Preset names with a one-line description each.
pub const PRESET_NAMES: &[(&str, &str)] = &[
    ("fig2", "on-grid NBI, reserved-tone recovery vs NBI-free and unmitigated"),
    ("fig3", "robustness to the sparsity-rate estimate (x0.2, x1, x1.8)"),
    ("gini", "Gini index of off-grid NBI: raw, windowed, Haar"),
    ("fig5", "off-grid NBI: Haar vs window vs no sparsifier over Eb/N0"),
    ("fig6", "off-grid NBI: sparsifiers vs reserved-tone fraction"),
    ("fig7", "ZF with sparse noise cancellation vs ZF and MMSE, no NBI"),
    ("fig8", "off-grid NBI: data-aided augmentation vs reserved-only"),
    ("fig9", "on-grid NBI: data-aided augmentation vs reserved-only"),
    ("fig10", "reliable-carrier success rate vs reserved fraction"),
    ("fig11", "two antennas: joint-support MMV vs per-antenna SMV, MRC"),
];

fn label(prefix: &str, v: f64) -> String {
    format!("{prefix}{v}")
}

/// Build a preset at `n` subcarriers. `gini` is not a BER scenario and is
/// rejected here.
pub fn preset(name: &str, n: usize) -> Result<ScenarioConfig> {
    let mut c = ScenarioConfig::base(name, 128).with_n(n);
    match name {
        "fig2" => {
            c.curves = vec![
                Curve::of(Receiver::NbiFree),
                Curve::of(Receiver::Impaired),
                Curve::of(Receiver::Proposed),
            ];
        }
        "fig3" => {
            c.ebn0_db = vec![17.5];
            c.curves = [0.2, 1.0, 1.8]
                .iter()
                .map(|&m| Curve::new(label("x", m), Receiver::Proposed).multiplier(m))
                .collect();
        }
        "fig5" => {
            c.nbi.offset_mode = OffsetMode::IndependentOffsets;
            c.curves = vec![
                Curve::of(Receiver::NbiFree),
                Curve::of(Receiver::Impaired),
                Curve::new("haar", Receiver::Proposed).sparsifier(SparsifierKind::Haar),
                Curve::new("window", Receiver::Proposed).sparsifier(SparsifierKind::Window),
                Curve::new("spread", Receiver::Proposed).sparsifier(SparsifierKind::None),
            ];
        }
        "fig6" => {
            c.nbi.offset_mode = OffsetMode::IndependentOffsets;
            c.ebn0_db = vec![22.5];
            c.curves = [0.125, 0.25, 0.375]
                .iter()
                .flat_map(|&t| {
                    [
                        ("haar", SparsifierKind::Haar),
                        ("window", SparsifierKind::Window),
                        ("spread", SparsifierKind::None),
                    ]
                    .map(|(n, k)| {
                        Curve::new(format!("{n}_t{}", t * 100.0), Receiver::Proposed)
                            .sparsifier(k)
                            .reserved(t)
                    })
                })
                .collect();
        }
        "fig7" => {
            c.nbi.max_sources = 0;
            c.curves = vec![
                Curve::new("zf", Receiver::NbiFree).equalizer(EqualizerKind::Zf),
                Curve::of(Receiver::ZfNoiseCancel),
                Curve::new("mmse", Receiver::NbiFree).equalizer(EqualizerKind::Mmse),
            ];
        }
        "fig8" | "fig9" => {
            if name == "fig8" {
                c.nbi.offset_mode = OffsetMode::IndependentOffsets;
                c.sparsifier = SparsifierKind::Haar;
            }
            c.reserved_fraction = 0.125;
            c.reliable_ratio = 1.0;
            c.curves = vec![
                Curve::of(Receiver::NbiFree),
                Curve::of(Receiver::Augmented),
                Curve::new("reserved_only", Receiver::Proposed),
                Curve::new("reserved_25", Receiver::Proposed).reserved(0.25),
            ];
        }
        "fig10" => {
            c.nbi.offset_mode = OffsetMode::IndependentOffsets;
            c.sparsifier = SparsifierKind::Haar;
            c.metric = Metric::SuccessRate;
            c.curves = [0.25, 0.125]
                .iter()
                .flat_map(|&t| {
                    [0.5, 1.0].map(|r| {
                        Curve::new(format!("t{}_r{r}", t * 100.0), Receiver::Augmented)
                            .reserved(t)
                            .reliable(r)
                    })
                })
                .collect();
        }
        "fig11" => {
            c.nbi.offset_mode = OffsetMode::IndependentOffsets;
            c.sparsifier = SparsifierKind::Haar;
            c.antennas = 2;
            c.reserved_fraction = 0.125;
            c.curves = vec![Curve::of(Receiver::MmvMrc), Curve::of(Receiver::SmvMrc)];
        }
        "gini" => {
            return Err(Error::config(
                "scenario",
                "gini is a compressibility experiment; use the gini subcommand",
            ))
        }
        other => {
            return Err(Error::config("scenario", format!("unknown preset '{other}'")));
        }
    }
    Ok(c)
}
