//! Receiver-side NBI recovery: reserved-tone sensing systems, subtraction,
//! data-aided augmentation with reliable carriers, ZF noise cancellation and
//! multi-antenna combining.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{ifft_unitary, norm_sqr, CMat, C64, ZERO};
use crate::qam::Constellation;
use crate::sabmp::{greedy_search, mmv_greedy_search, SabmpParams, SparseEstimate};
use crate::scfdma::{ChannelRealization, EqualizerKind, EqualizerMatrix, SystemConfig};
use crate::sparsify::{Sparsifier, SparsifierKind};

/// `count` distinct data positions out of `p`, uniform without replacement,
/// returned sorted.
pub fn choose_reserved(p: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 || count >= p {
        return Err(Error::OutOfRange {
            what: "reserved tone count",
            index: count,
            limit: p,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = sample(&mut rng, p, count).into_vec();
    t.sort_unstable();
    Ok(t)
}

/// Reserved tones `T` and, after stage one, reliable carriers `R`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ToneSets {
    pub reserved: Vec<usize>,
    pub reliable: Vec<usize>,
}

impl ToneSets {
    pub fn new(reserved: Vec<usize>, reliable: Vec<usize>, p: usize) -> Result<Self> {
        check_disjoint(&reserved, &reliable)?;
        for &i in reserved.iter().chain(&reliable) {
            if i >= p {
                return Err(Error::OutOfRange {
                    what: "tone",
                    index: i,
                    limit: p,
                });
            }
        }
        Ok(Self { reserved, reliable })
    }
}

fn check_disjoint(reserved: &[usize], reliable: &[usize]) -> Result<()> {
    match reliable.iter().find(|i| reserved.contains(i)) {
        Some(&index) => Err(Error::ToneOverlap { index }),
        None => Ok(()),
    }
}

/// A compressed-sensing problem `x' = Psi I'` built from selected rows of the
/// equalized block.
#[derive(Debug, Clone)]
pub struct SensingSystem {
    pub measurements: Vec<C64>,
    pub sensing: CMat,
    pub sparsifier: Sparsifier,
    /// Frequency bin of each retained unknown (identity unless reduced).
    pub column_map: Vec<usize>,
    /// Equalized positions the rows were taken from.
    pub rows: Vec<usize>,
}

impl SensingSystem {
    fn assemble(
        measurements: Vec<C64>,
        rows: Vec<usize>,
        eq: &EqualizerMatrix,
        sparsifier: &Sparsifier,
    ) -> Result<Self> {
        if sparsifier.n() != eq.n() {
            return Err(Error::Dimension {
                context: "sparsifier size",
                expected: eq.n(),
                actual: sparsifier.n(),
            });
        }
        let psi = eq.rows(&rows);
        let (sensing, column_map) = match sparsifier.kind() {
            // columns off the victim's comb are identically zero
            SparsifierKind::None => {
                let comb: Vec<usize> = (0..eq.per_user()).map(|l| eq.comb_bin(l)).collect();
                (psi.select_columns(&comb), comb)
            }
            _ => (sparsifier.compose_inverse(&psi), (0..eq.n()).collect()),
        };
        Ok(Self {
            measurements,
            sensing,
            sparsifier: sparsifier.clone(),
            column_map,
            rows,
        })
    }

    pub fn n_unknowns(&self) -> usize {
        self.sensing.ncols()
    }

    /// Map a solution in the solve domain back to a frequency-domain NBI
    /// estimate of length `N`.
    pub fn to_frequency(&self, solution: &[C64]) -> Vec<C64> {
        let n = self.sparsifier.n();
        let mut out = vec![ZERO; n];
        match self.sparsifier.kind() {
            SparsifierKind::None => {
                for (&bin, v) in self.column_map.iter().zip(solution) {
                    out[bin] = *v;
                }
            }
            _ => {
                out.copy_from_slice(solution);
                self.sparsifier.inverse(&mut out);
            }
        }
        out
    }

    /// `E_u H^{-1} e_j` for solve-domain index `j`, the footprint of one
    /// unknown on the equalized block.
    pub fn footprint(&self, eq: &EqualizerMatrix, j: usize) -> Result<Vec<C64>> {
        let mut unit = vec![ZERO; self.n_unknowns()];
        unit[j] = C64::new(1.0, 0.0);
        eq.apply(&self.to_frequency(&unit))
    }
}

fn check_rows(rows: &[usize], p: usize) -> Result<()> {
    match rows.iter().find(|&&i| i >= p) {
        Some(&index) => Err(Error::OutOfRange {
            what: "tone",
            index,
            limit: p,
        }),
        None => Ok(()),
    }
}

/// Stage-one system from the reserved tones.
pub fn build_reserved_system(
    x_hat: &[C64],
    eq: &EqualizerMatrix,
    reserved: &[usize],
    sparsifier: &Sparsifier,
) -> Result<SensingSystem> {
    if x_hat.len() != eq.per_user() {
        return Err(Error::Dimension {
            context: "equalized block length",
            expected: eq.per_user(),
            actual: x_hat.len(),
        });
    }
    if reserved.is_empty() {
        return Err(Error::Empty("reserved tone set"));
    }
    check_rows(reserved, eq.per_user())?;
    let meas = reserved.iter().map(|&i| x_hat[i]).collect();
    SensingSystem::assemble(meas, reserved.to_vec(), eq, sparsifier)
}

/// Stage-two system: reserved rows as in stage one, followed by reliable rows
/// whose data are replaced by hard decisions on the stage-one cleaned block.
/// Measurements come from the original equalized block so both row groups
/// share the same unknown.
pub fn build_augmented_system(
    x_original: &[C64],
    x_cleaned: &[C64],
    eq: &EqualizerMatrix,
    tones: &ToneSets,
    sparsifier: &Sparsifier,
    constellation: &Constellation,
) -> Result<SensingSystem> {
    check_disjoint(&tones.reserved, &tones.reliable)?;
    if x_cleaned.len() != x_original.len() {
        return Err(Error::Dimension {
            context: "cleaned block length",
            expected: x_original.len(),
            actual: x_cleaned.len(),
        });
    }
    let sys = build_reserved_system(x_original, eq, &tones.reserved, sparsifier)?;
    if tones.reliable.is_empty() {
        return Ok(sys);
    }
    check_rows(&tones.reliable, eq.per_user())?;
    let mut rows = sys.rows;
    rows.extend_from_slice(&tones.reliable);
    let mut meas = sys.measurements;
    for &i in &tones.reliable {
        let decided = constellation.point(constellation.decide(x_cleaned[i]));
        meas.push(x_original[i] - decided);
    }
    SensingSystem::assemble(meas, rows, eq, sparsifier)
}

/// Result of solving a sensing system and subtracting the estimate.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub cleaned: Vec<C64>,
    /// Frequency-domain NBI estimate, length `N`.
    pub nbi: Vec<C64>,
    pub estimate: SparseEstimate,
}

/// Solve `system`, map the estimate back to frequency and remove
/// `E_u I'_hat` from `x_hat`.
pub fn recover_and_subtract(
    system: &SensingSystem,
    params: &SabmpParams,
    eq: &EqualizerMatrix,
    x_hat: &[C64],
) -> Result<Recovery> {
    let estimate = greedy_search(&system.measurements, &system.sensing, params)?;
    subtract_estimate(system, estimate, eq, x_hat)
}

fn subtract_estimate(
    system: &SensingSystem,
    estimate: SparseEstimate,
    eq: &EqualizerMatrix,
    x_hat: &[C64],
) -> Result<Recovery> {
    let nbi = system.to_frequency(&estimate.estimate);
    let leak = eq.apply(&nbi)?;
    let cleaned = x_hat.iter().zip(&leak).map(|(x, l)| x - l).collect();
    Ok(Recovery {
        cleaned,
        nbi,
        estimate,
    })
}

/// Per-carrier variance of the residual NBI, `diag(E_u Rt E_u^H)` where `Rt`
/// is the solver's error covariance carried back through the sparsifier.
pub fn residual_variances(
    estimate: &SparseEstimate,
    eq: &EqualizerMatrix,
    system: &SensingSystem,
) -> Result<Vec<f64>> {
    let cov = &estimate.covariance;
    let k = cov.indices.len();
    let p = eq.per_user();
    let foot = cov
        .indices
        .iter()
        .map(|&j| system.footprint(eq, j))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..p)
        .map(|i| {
            let mut acc = ZERO;
            for a in 0..k {
                for b in 0..k {
                    acc += foot[a][i] * cov.block[(a, b)] * foot[b][i].conj();
                }
            }
            acc.re.max(0.0)
        })
        .collect())
}

const VAR_FLOOR: f64 = 1e-12;
const RELIABILITY_CAP: f64 = 1e3;

/// Natural log of the Gaussian decision-reliability ratio: the likelihood of
/// the nearest point over the summed likelihood of every other point.
pub fn log_reliability(x: C64, residual_var: f64, constellation: &Constellation) -> f64 {
    let var = residual_var.max(VAR_FLOOR);
    let nearest = constellation.decide(x);
    let e0 = -(x - constellation.point(nearest)).norm_sqr() / var;
    let others: Vec<f64> = constellation
        .points()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != nearest)
        .map(|(_, p)| -(x - p).norm_sqr() / var)
        .collect();
    let m = others.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + others.iter().map(|e| (e - m).exp()).sum::<f64>().ln();
    e0 - lse
}

/// Gaussian decision reliability, always positive.
pub fn reliability_metric(x: C64, residual_var: f64, constellation: &Constellation) -> f64 {
    log_reliability(x, residual_var, constellation).exp()
}

/// `-ln(|x - nearest| / |x - next nearest|)`, capped at `1e3`.
pub fn distance_reliability(x: C64, constellation: &Constellation) -> f64 {
    let (a, b) = constellation.two_nearest(x);
    let d1 = (x - constellation.point(a)).norm();
    let d2 = (x - constellation.point(b)).norm();
    if d1 == 0.0 {
        return RELIABILITY_CAP;
    }
    (-(d1 / d2).ln()).clamp(0.0, RELIABILITY_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReliabilityKind {
    Probabilistic,
    Distance,
}

impl std::str::FromStr for ReliabilityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "probabilistic" | "gaussian" => Ok(Self::Probabilistic),
            "distance" => Ok(Self::Distance),
            other => Err(Error::config("reliability", format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityTable {
    /// Score per data position; reserved positions hold `-inf`.
    pub reliability: Vec<f64>,
    pub residual_var: Vec<f64>,
    /// Chosen reliable set, ascending.
    pub reliable: Vec<usize>,
}

/// Indices of the `count` largest scores outside `reserved`, ties to the
/// lowest index, returned ascending.
pub fn select_reliable(scores: &[f64], reserved: &[usize], count: usize) -> Vec<usize> {
    let mut cand: Vec<usize> = (0..scores.len()).filter(|i| !reserved.contains(i)).collect();
    cand.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    cand.truncate(count);
    cand.sort_unstable();
    cand
}

/// Score every data carrier and pick the reliable set. `noise_floor` adds the
/// equalized noise variance to the residual-NBI variance for the Gaussian
/// metric.
pub fn rank_reliability(
    x_cleaned: &[C64],
    residual_var: Vec<f64>,
    noise_floor: f64,
    reserved: &[usize],
    count: usize,
    kind: ReliabilityKind,
    constellation: &Constellation,
) -> ReliabilityTable {
    let reliability = x_cleaned
        .iter()
        .zip(&residual_var)
        .enumerate()
        .map(|(i, (&x, &v))| {
            if reserved.contains(&i) {
                f64::NEG_INFINITY
            } else {
                match kind {
                    ReliabilityKind::Probabilistic => log_reliability(x, v + noise_floor, constellation),
                    ReliabilityKind::Distance => distance_reliability(x, constellation),
                }
            }
        })
        .collect::<Vec<_>>();
    let reliable = select_reliable(&reliability, reserved, count);
    ReliabilityTable {
        reliability,
        residual_var,
        reliable,
    }
}

/// Outcome of the two-stage data-aided receiver.
#[derive(Debug, Clone)]
pub struct DataAided {
    pub stage1: Recovery,
    pub table: ReliabilityTable,
    pub stage2: Recovery,
}

/// Reserved-tone recovery followed by a cold re-solve on the system augmented
/// with the `reliable_count` most reliable carriers.
#[allow(clippy::too_many_arguments)]
pub fn data_aided_recovery(
    x_hat: &[C64],
    eq: &EqualizerMatrix,
    reserved: &[usize],
    reliable_count: usize,
    sparsifier: &Sparsifier,
    params: &SabmpParams,
    augmented_params: &SabmpParams,
    noise_floor: f64,
    kind: ReliabilityKind,
    constellation: &Constellation,
) -> Result<DataAided> {
    let sys1 = build_reserved_system(x_hat, eq, reserved, sparsifier)?;
    let stage1 = recover_and_subtract(&sys1, params, eq, x_hat)?;
    let var = residual_variances(&stage1.estimate, eq, &sys1)?;
    let table = rank_reliability(
        &stage1.cleaned,
        var,
        noise_floor,
        reserved,
        reliable_count,
        kind,
        constellation,
    );
    let tones = ToneSets {
        reserved: reserved.to_vec(),
        reliable: table.reliable.clone(),
    };
    let sys2 = build_augmented_system(x_hat, &stage1.cleaned, eq, &tones, sparsifier, constellation)?;
    let stage2 = recover_and_subtract(&sys2, augmented_params, eq, x_hat)?;
    Ok(DataAided {
        stage1,
        table,
        stage2,
    })
}

/// Effective per-carrier disturbance variance after equalization, excluding
/// NBI: the filtered noise plus, for MMSE, the residual inter-symbol leakage.
pub fn equalized_noise_var(
    eq: &EqualizerMatrix,
    channel: &ChannelRealization,
    config: &SystemConfig,
) -> f64 {
    let p = eq.per_user() as f64;
    let noise = config.noise_var * eq.mean_row_energy();
    let leak = match eq.kind {
        EqualizerKind::Zf => 0.0,
        EqualizerKind::Mmse => {
            eq.gains
                .iter()
                .enumerate()
                .map(|(l, g)| (g * channel.freq_response[eq.comb_bin(l)] - 1.0).norm_sqr())
                .sum::<f64>()
                / p
        }
    };
    noise + config.symbol_var * leak
}

/// Solver noise variance for a system, floored relative to the measurement
/// energy so noiseless runs stay well posed.
pub fn solver_noise_var(base: f64, measurements: &[C64]) -> f64 {
    let m = measurements.len().max(1) as f64;
    base.max(1e-12 * (norm_sqr(measurements) / m).max(1e-30))
}

/// Sparse recovery of the enhanced noise on a ZF-equalized block: the
/// reserved tones observe `E_u Z`, whose energy concentrates on weak channel
/// bins.
pub fn zf_noise_cancellation(
    x_zf: &[C64],
    eq: &EqualizerMatrix,
    reserved: &[usize],
    params: &SabmpParams,
) -> Result<Vec<C64>> {
    let sys = build_reserved_system(x_zf, eq, reserved, &Sparsifier::none(eq.n()))?;
    if sys.measurements.iter().all(|m| *m == ZERO) {
        return Ok(x_zf.to_vec());
    }
    Ok(recover_and_subtract(&sys, params, eq, x_zf)?.cleaned)
}

/// Maximal-ratio combining over antennas on the user's comb, followed by
/// Fourier de-precoding.
pub fn mrc_combine(
    ys: &[Vec<C64>],
    channels: &[ChannelRealization],
    config: &SystemConfig,
    user: usize,
) -> Result<Vec<C64>> {
    if ys.is_empty() {
        return Err(Error::Empty("antenna list"));
    }
    if ys.len() != channels.len() {
        return Err(Error::Dimension {
            context: "antennas vs channels",
            expected: ys.len(),
            actual: channels.len(),
        });
    }
    if user >= config.n_users {
        return Err(Error::OutOfRange {
            what: "user",
            index: user,
            limit: config.n_users,
        });
    }
    let n = config.n_subcarriers;
    for (y, ch) in ys.iter().zip(channels) {
        if y.len() != n || ch.n() != n {
            return Err(Error::Dimension {
                context: "antenna vector length",
                expected: n,
                actual: y.len().min(ch.n()),
            });
        }
    }
    let mut out = config
        .comb(user)
        .map(|k| {
            let mut num = ZERO;
            let mut den = 0.0;
            for (y, ch) in ys.iter().zip(channels) {
                let h = ch.freq_response[k];
                num += h.conj() * y[k];
                den += h.norm_sqr();
            }
            if den == 0.0 {
                Err(Error::SingularChannel { bin: k })
            } else {
                Ok(num / den)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ifft_unitary(&mut out);
    Ok(out)
}

/// Per-antenna NBI estimates, either with a joint support (`joint`) or by
/// independent solves. Returns frequency-domain estimates of length `N`.
pub fn multi_antenna_nbi(
    x_hats: &[Vec<C64>],
    eqs: &[EqualizerMatrix],
    reserved: &[usize],
    sparsifier: &Sparsifier,
    params: &[SabmpParams],
    joint: bool,
) -> Result<Vec<Vec<C64>>> {
    if x_hats.len() != eqs.len() || x_hats.len() != params.len() {
        return Err(Error::Dimension {
            context: "antenna count",
            expected: x_hats.len(),
            actual: eqs.len().min(params.len()),
        });
    }
    let systems = x_hats
        .iter()
        .zip(eqs)
        .map(|(x, eq)| build_reserved_system(x, eq, reserved, sparsifier))
        .collect::<Result<Vec<_>>>()?;
    if joint {
        let pairs: Vec<(Vec<C64>, CMat)> = systems
            .iter()
            .map(|s| (s.measurements.clone(), s.sensing.clone()))
            .collect();
        // one noise level for the shared metric
        let mut p = params[0].clone();
        p.noise_var = params.iter().map(|q| q.noise_var).sum::<f64>() / params.len() as f64;
        let ests = mmv_greedy_search(&pairs, &p)?;
        Ok(systems
            .iter()
            .zip(ests)
            .map(|(s, e)| s.to_frequency(&e.estimate))
            .collect())
    } else {
        systems
            .iter()
            .zip(params)
            .map(|(s, p)| Ok(s.to_frequency(&greedy_search(&s.measurements, &s.sensing, p)?.estimate)))
            .collect()
    }
}
