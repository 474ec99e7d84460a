use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::stream_seed;
use crate::error::{Error, Result};
use crate::gini::gini_index;
use crate::linalg::complex_normal;
use crate::nbi::{synthesize_nbi, NbiSource};
use crate::sparsify::{Sparsifier, SparsifierKind};

/// Mean Gini index of off-grid interference, raw and after each sparsifier,
/// for a fixed number of sources.
#[derive(Debug, Clone, PartialEq)]
pub struct GiniRecord {
    pub sources: usize,
    pub runs: usize,
    pub mean_raw: f64,
    pub mean_window: f64,
    pub mean_haar: f64,
    pub se_raw: f64,
    pub se_window: f64,
    pub se_haar: f64,
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// For each count in `sources`, draw `runs` interference vectors of exactly
/// that many sources at independent uniform off-grid frequencies and measure
/// their compressibility.
pub fn gini_experiment(n: usize, sources: &[usize], runs: usize, seed: u64) -> Result<Vec<GiniRecord>> {
    if runs == 0 {
        return Err(Error::config("runs", "must be at least 1"));
    }
    if let Some(&bad) = sources.iter().find(|&&l| l == 0 || l > n) {
        return Err(Error::config("sources", format!("{bad} outside 1..={n}")));
    }
    let window = Sparsifier::of_kind(SparsifierKind::Window, n)?;
    let haar = Sparsifier::of_kind(SparsifierKind::Haar, n)?;
    sources
        .iter()
        .map(|&l| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, "gini", l as u64, 0));
            let mut raw = Vec::with_capacity(runs);
            let mut win = Vec::with_capacity(runs);
            let mut hr = Vec::with_capacity(runs);
            for _ in 0..runs {
                let src: Vec<NbiSource> = (0..l)
                    .map(|_| {
                        let f = rand::Rng::random_range(&mut rng, 0.0..n as f64);
                        NbiSource::new(f, complex_normal(&mut rng, 1.0))
                    })
                    .collect();
                let i = synthesize_nbi(&src, n)?;
                raw.push(gini_index(&i)?);
                let mut w = i.clone();
                window.forward(&mut w);
                win.push(gini_index(&w)?);
                let mut h = i;
                haar.forward(&mut h);
                hr.push(gini_index(&h)?);
            }
            let (mean_raw, se_raw) = mean_se(&raw);
            let (mean_window, se_window) = mean_se(&win);
            let (mean_haar, se_haar) = mean_se(&hr);
            Ok(GiniRecord {
                sources: l,
                runs,
                mean_raw,
                mean_window,
                mean_haar,
                se_raw,
                se_window,
                se_haar,
            })
        })
        .collect()
}
