//! Gini index: a scale-invariant compressibility measure in [0, 1].

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Gini index of the magnitudes of `v`.
///
/// Magnitudes are sorted ascending and weighted by `(N - k - 1/2) / N`, so an
/// equal-energy vector scores 0 and a single spike scores `1 - 1/N`.
pub fn gini_index(v: &[C64]) -> Result<f64> {
    let mut mags: Vec<f64> = v.iter().map(|c| c.norm()).collect();
    gini_of_magnitudes(&mut mags)
}

pub fn gini_of_magnitudes(mags: &mut [f64]) -> Result<f64> {
    let l1: f64 = mags.iter().sum();
    if !(l1 > 0.0) {
        return Err(Error::ZeroVector);
    }
    mags.sort_by(|a, b| a.total_cmp(b));
    let n = mags.len() as f64;
    let weighted: f64 = mags
        .iter()
        .enumerate()
        .map(|(k, m)| m / l1 * ((n - k as f64 - 0.5) / n))
        .sum();
    Ok(1.0 - 2.0 * weighted)
}
