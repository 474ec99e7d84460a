#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scfdma_nbi::gini::gini_index;
use scfdma_nbi::harness::{run_scenario, Curve, Receiver, ScenarioConfig};
use scfdma_nbi::linalg::{complex_normal, dft_matrix, fft_unitary, norm_sqr, unitarity_error, CMat, C64, ZERO};
use scfdma_nbi::nbi::{synthesize_nbi, NbiSource, OffsetMode};
use scfdma_nbi::pipeline::{
    build_augmented_system, build_reserved_system, choose_reserved, recover_and_subtract, select_reliable,
    ToneSets,
};
use scfdma_nbi::qam::Constellation;
use scfdma_nbi::sabmp::{greedy_search, nu_metric, SabmpParams};
use scfdma_nbi::scfdma::{
    allocation_matrix, build_equalizer, receive_with_noise, ChannelRealization, EqualizerKind, QamFrame,
    SystemConfig,
};
use scfdma_nbi::sparsify::{haar_matrix, Sparsifier, SparsifierKind};

pub type Check = fn(u64, usize) -> Result<(), String>;

pub struct Property {
    pub name: &'static str,
    pub sizes: RangeInclusive<usize>,
    pub check: Check,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_normal(r, 1.0)).collect()
}

fn random_matrix(r: &mut ChaCha8Rng, m: usize, n: usize) -> CMat {
    CMat::from_fn(m, n, |_, _| complex_normal(r, 1.0 / m as f64))
}

/// Random channel with no bin weaker than `floor`.
fn channel_without_nulls(r: &mut ChaCha8Rng, taps: usize, n: usize, floor: f64) -> ChannelRealization {
    loop {
        let ch = ChannelRealization::random(r, taps, n).expect("valid channel size");
        if ch.freq_response.iter().all(|h| h.norm() > floor) {
            return ch;
        }
    }
}

fn random_bits(r: &mut ChaCha8Rng, count: usize) -> Vec<u8> {
    (0..count).map(|_| r.random_range(0..2u8)).collect()
}

pub fn dft_unitary(_seed: u64, n: usize) -> Result<(), String> {
    let e = unitarity_error(&dft_matrix(n));
    ensure!(e < 1e-10, "n={n}: |W W^H - I|max = {e:e}");
    Ok(())
}

pub fn haar_unitary(_seed: u64, k: usize) -> Result<(), String> {
    let n = 1 << k;
    let h = haar_matrix(n).map_err(|e| e.to_string())?;
    let e = (&h * h.transpose() - DMatrix::<f64>::identity(n, n)).amax();
    ensure!(e < 1e-10, "n={n}: |H H^T - I|max = {e:e}");
    Ok(())
}

pub fn parseval(seed: u64, n: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let x = random_vec(&mut r, n);
    let mut y = x.clone();
    fft_unitary(&mut y);
    let (a, b) = (norm_sqr(&x).sqrt(), norm_sqr(&y).sqrt());
    ensure!((a - b).abs() <= 1e-10 * a, "n={n}: {a} vs {b}");
    Ok(())
}

pub fn comb_orthogonality(seed: u64, users: usize) -> Result<(), String> {
    let p = 1 + (seed % 8) as usize;
    let cfg = SystemConfig::new(p * users, users, 4, 1);
    let m: Vec<CMat> = (0..users).map(|u| allocation_matrix(&cfg, u)).collect();
    for i in 0..users {
        for j in 0..users {
            let g = m[i].adjoint() * &m[j];
            let expect = if i == j { CMat::identity(p, p) } else { CMat::zeros(p, p) };
            ensure!(g == expect, "M_{i}^H M_{j} wrong for U={users}, P={p}");
        }
    }
    Ok(())
}

pub fn zf_chain_identity(seed: u64, k: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let n = 16 << k;
    let cfg = SystemConfig::new(n, 2, 16, n / 4).with_noise_var(0.0);
    let c = cfg.constellation().map_err(|e| e.to_string())?;
    let ch = channel_without_nulls(&mut r, n / 4, n, 1e-3);
    let bits = random_bits(&mut r, cfg.per_user() * 4);
    let frame = QamFrame::new(&cfg, &c, 1, bits.clone(), &[]).map_err(|e| e.to_string())?;
    let zeros = vec![ZERO; n];
    let y = receive_with_noise(&cfg, std::slice::from_ref(&frame), std::slice::from_ref(&ch), &zeros, &zeros)
        .map_err(|e| e.to_string())?;
    let eq = build_equalizer(EqualizerKind::Zf, &ch, &cfg, 1).map_err(|e| e.to_string())?;
    let (_, decided) = c.demodulate_hard(&eq.apply(&y).map_err(|e| e.to_string())?);
    ensure!(decided == bits, "ZF chain changed bits (N={n})");
    Ok(())
}

pub fn mmse_to_zf(seed: u64, k: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let n = 16 << k;
    let cfg = SystemConfig::new(n, 2, 16, n / 4).with_noise_var(1e-12);
    let ch = channel_without_nulls(&mut r, n / 4, n, 1e-3);
    let y = random_vec(&mut r, n);
    let zf = build_equalizer(EqualizerKind::Zf, &ch, &cfg, 0).map_err(|e| e.to_string())?;
    let mmse = build_equalizer(EqualizerKind::Mmse, &ch, &cfg, 0).map_err(|e| e.to_string())?;
    let a = zf.apply(&y).map_err(|e| e.to_string())?;
    let b = mmse.apply(&y).map_err(|e| e.to_string())?;
    let diff: Vec<C64> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
    let rel = (norm_sqr(&diff) / norm_sqr(&a)).sqrt();
    ensure!(rel < 1e-4, "relative MMSE-ZF gap {rel:e}");
    Ok(())
}

pub fn gini_invariance(seed: u64, n: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let v = random_vec(&mut r, n);
    let g = gini_index(&v).map_err(|e| e.to_string())?;
    let c = complex_normal(&mut r, 1.0) + C64::new(1e-3, 0.0);
    let scaled: Vec<C64> = v.iter().map(|x| x * c).collect();
    let mut shuffled = v.clone();
    shuffled.shuffle(&mut r);
    let gs = gini_index(&scaled).map_err(|e| e.to_string())?;
    let gp = gini_index(&shuffled).map_err(|e| e.to_string())?;
    ensure!((g - gs).abs() < 1e-12, "scaling moved Gini {g} -> {gs}");
    ensure!((g - gp).abs() < 1e-12, "permutation moved Gini {g} -> {gp}");
    ensure!((0.0..=1.0).contains(&g), "Gini {g} outside [0, 1]");
    Ok(())
}

pub fn gini_closed_forms(seed: u64, n: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let a = complex_normal(&mut r, 1.0) + C64::new(0.1, 0.0);
    let mut spike = vec![ZERO; n];
    spike[r.random_range(0..n)] = a;
    let flat = vec![a; n];
    let gs = gini_index(&spike).map_err(|e| e.to_string())?;
    let gf = gini_index(&flat).map_err(|e| e.to_string())?;
    let expect = 1.0 - 1.0 / n as f64;
    ensure!((gs - expect).abs() < 1e-12, "one-hot: {gs} vs {expect}");
    ensure!(gf.abs() < 1e-12, "flat: {gf}");
    Ok(())
}

pub fn on_grid_support_count(seed: u64, count: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let n = 64;
    let bins: Vec<usize> = (0..count).map(|_| r.random_range(0..n)).collect();
    let sources: Vec<NbiSource> = bins
        .iter()
        .map(|&b| NbiSource::new(b as f64, C64::new(1.0 + r.random::<f64>(), 0.0)))
        .collect();
    let i = synthesize_nbi(&sources, n).map_err(|e| e.to_string())?;
    let mut distinct = bins.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let l0 = i.iter().filter(|v| **v != ZERO).count();
    ensure!(l0 == distinct.len(), "l0 {l0} vs {} distinct bins", distinct.len());
    Ok(())
}

pub fn sparsifier_round_trip(seed: u64, k: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let n = 1 << k;
    let v = random_vec(&mut r, n);
    let e = norm_sqr(&v);
    for kind in [SparsifierKind::Haar, SparsifierKind::Window] {
        let s = Sparsifier::of_kind(kind, n).map_err(|e| e.to_string())?;
        let mut w = v.clone();
        s.forward(&mut w);
        if kind == SparsifierKind::Haar {
            let ew = norm_sqr(&w);
            ensure!((ew - e).abs() <= 1e-10 * e, "Haar changed energy {e} -> {ew}");
        }
        s.inverse(&mut w);
        let err = v.iter().zip(&w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        ensure!(err < 1e-10, "{kind:?} round trip error {err:e}");
    }
    Ok(())
}

struct Instance {
    x: Vec<C64>,
    psi: CMat,
    noise_var: f64,
}

/// Planted sparse system at roughly 25 dB SNR.
fn planted(r: &mut ChaCha8Rng, n: usize, m: usize, active: usize) -> Instance {
    let psi = random_matrix(r, m, n);
    let mut truth = vec![ZERO; n];
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(r);
    for &i in idx.iter().take(active) {
        truth[i] = complex_normal(r, 1.0);
    }
    let clean: Vec<C64> = (0..m).map(|row| (0..n).map(|j| psi[(row, j)] * truth[j]).sum()).collect();
    let noise_var = (norm_sqr(&clean) / m as f64).max(1e-6) * 10f64.powf(-2.5);
    let x = clean.iter().map(|v| v + complex_normal(r, noise_var)).collect();
    Instance { x, psi, noise_var }
}

pub fn support_chain(seed: u64, n: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let m = n / 2 + 2;
    let inst = planted(&mut r, n, m, 1 + (seed % 3) as usize);
    let params = SabmpParams::uniform(r.random_range(0.02..0.4), inst.noise_var, r.random_range(1..m));
    let est = greedy_search(&inst.x, &inst.psi, &params).map_err(|e| e.to_string())?;
    for (k, d) in est.dominant.iter().enumerate() {
        ensure!(d.support.len() == k + 1, "|S_{}| = {}", k + 1, d.support.len());
        if k > 0 {
            let prev = &est.dominant[k - 1].support;
            ensure!(d.support[..k] == prev[..], "S_{k} not a prefix of S_{}", k + 1);
        }
        let mut u = d.support.clone();
        u.sort_unstable();
        u.dedup();
        ensure!(u.len() == d.support.len() && u.iter().all(|&i| i < n), "invalid support {:?}", d.support);
    }
    ensure!(est.dominant.len() <= params.t_max, "chain longer than T_max");
    let total: f64 = est.dominant.iter().map(|d| d.weight).sum();
    ensure!((total - 1.0).abs() <= 1e-12, "weights sum to {total}");
    ensure!(est.dominant.iter().all(|d| d.weight >= 0.0), "negative weight");
    Ok(())
}

pub fn covariance_psd(seed: u64, n: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let m = n / 2 + 2;
    let inst = planted(&mut r, n, m, 2);
    let params = SabmpParams::uniform(0.2, inst.noise_var, (m - 1).min(4));
    let est = greedy_search(&inst.x, &inst.psi, &params).map_err(|e| e.to_string())?;
    let b = &est.covariance.block;
    let herm = (b - b.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let trace = est.covariance.trace();
    ensure!(herm <= 1e-10 * trace.max(1e-300), "covariance not Hermitian ({herm:e})");
    let eig = b.clone().symmetric_eigenvalues();
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure!(min >= -1e-10 * trace, "min eigenvalue {min:e} vs trace {trace:e}");
    Ok(())
}

pub fn argmax_scale_invariance(seed: u64, n: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let m = n / 2 + 2;
    let inst = planted(&mut r, n, m, 1);
    let c = complex_normal(&mut r, 4.0) + C64::new(0.05, 0.0);
    let params = SabmpParams::uniform(0.1, inst.noise_var, 1);
    let scaled_params = SabmpParams::uniform(0.1, inst.noise_var * c.norm_sqr(), 1);
    let xs: Vec<C64> = inst.x.iter().map(|v| v * c).collect();
    let argmax = |x: &[C64], p: &SabmpParams| -> Result<usize, String> {
        let mut best = (f64::NEG_INFINITY, 0);
        for j in 0..n {
            let v = nu_metric(&[j], x, &inst.psi, p).map_err(|e| e.to_string())?;
            if v > best.0 {
                best = (v, j);
            }
        }
        Ok(best.1)
    };
    let a = argmax(&inst.x, &params)?;
    let b = argmax(&xs, &scaled_params)?;
    ensure!(a == b, "argmax moved {a} -> {b} under scaling by {c}");
    let g = greedy_search(&xs, &inst.psi, &scaled_params).map_err(|e| e.to_string())?;
    ensure!(g.support_chain() == [a], "greedy {:?} vs exhaustive {a}", g.support_chain());
    Ok(())
}

pub fn greedy_first_index_is_exhaustive(seed: u64, n: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let m = n / 2 + 2;
    let inst = planted(&mut r, n, m, 1 + (seed % 2) as usize);
    let lambda: Vec<f64> = (0..n).map(|_| r.random_range(0.05..0.5)).collect();
    let params = SabmpParams {
        lambda,
        noise_var: inst.noise_var,
        t_max: 1,
        normalize_posteriors: true,
    };
    let mut best = (f64::NEG_INFINITY, 0);
    for j in 0..n {
        let v = nu_metric(&[j], &inst.x, &inst.psi, &params).map_err(|e| e.to_string())?;
        if v > best.0 {
            best = (v, j);
        }
    }
    let g = greedy_search(&inst.x, &inst.psi, &params).map_err(|e| e.to_string())?;
    ensure!(g.support_chain() == [best.1], "greedy {:?} vs exhaustive {}", g.support_chain(), best.1);
    Ok(())
}

fn offgrid_link(r: &mut ChaCha8Rng, n: usize) -> (SystemConfig, ChannelRealization, Vec<C64>, Vec<C64>) {
    let cfg = SystemConfig::new(n, 2, 16, n / 4).with_noise_var(0.01);
    let ch = channel_without_nulls(r, n / 4, n, 1e-2);
    let sources: Vec<NbiSource> = (0..r.random_range(1..4))
        .map(|_| NbiSource::new(r.random_range(0.0..n as f64), complex_normal(r, 4.0)))
        .collect();
    let nbi = synthesize_nbi(&sources, n).expect("in-band sources");
    let noise = (0..n).map(|_| complex_normal(r, cfg.noise_var)).collect();
    (cfg, ch, nbi, noise)
}

pub fn stage_one_reassembly(seed: u64, k: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let n = 32 << k;
    let (cfg, ch, nbi, noise) = offgrid_link(&mut r, n);
    let c = cfg.constellation().map_err(|e| e.to_string())?;
    let p = cfg.per_user();
    let reserved = choose_reserved(p, p / 4, seed).map_err(|e| e.to_string())?;
    let bits = random_bits(&mut r, (p - reserved.len()) * 4);
    let frame = QamFrame::new(&cfg, &c, 0, bits, &reserved).map_err(|e| e.to_string())?;
    let y = receive_with_noise(&cfg, std::slice::from_ref(&frame), std::slice::from_ref(&ch), &nbi, &noise)
        .map_err(|e| e.to_string())?;
    let eq = build_equalizer(EqualizerKind::Zf, &ch, &cfg, 0).map_err(|e| e.to_string())?;
    let x = eq.apply(&y).map_err(|e| e.to_string())?;
    let ez = eq.apply(&noise).map_err(|e| e.to_string())?;
    for kind in [SparsifierKind::None, SparsifierKind::Haar, SparsifierKind::Window] {
        let sp = Sparsifier::of_kind(kind, n).map_err(|e| e.to_string())?;
        let sys = build_reserved_system(&x, &eq, &reserved, &sp).map_err(|e| e.to_string())?;
        let unknown: Vec<C64> = match kind {
            SparsifierKind::None => sys.column_map.iter().map(|&b| nbi[b]).collect(),
            _ => {
                let mut u = nbi.clone();
                sp.forward(&mut u);
                u
            }
        };
        ensure!(sys.sensing.nrows() == sys.measurements.len(), "row count mismatch");
        let scale = norm_sqr(&sys.measurements).sqrt();
        for (row, &t) in sys.rows.iter().enumerate() {
            let model: C64 = (0..sys.n_unknowns()).map(|j| sys.sensing[(row, j)] * unknown[j]).sum::<C64>() + ez[t];
            let err = (model - sys.measurements[row]).norm();
            ensure!(err <= 1e-9 * scale, "{kind:?} row {row}: error {err:e}");
        }
    }
    Ok(())
}

pub fn augmentation_without_reliable_is_stage_one(seed: u64, k: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let n = 32 << k;
    let (cfg, ch, nbi, noise) = offgrid_link(&mut r, n);
    let c = cfg.constellation().map_err(|e| e.to_string())?;
    let p = cfg.per_user();
    let reserved = choose_reserved(p, p / 4, seed).map_err(|e| e.to_string())?;
    let bits = random_bits(&mut r, (p - reserved.len()) * 4);
    let frame = QamFrame::new(&cfg, &c, 0, bits, &reserved).map_err(|e| e.to_string())?;
    let y = receive_with_noise(&cfg, std::slice::from_ref(&frame), std::slice::from_ref(&ch), &nbi, &noise)
        .map_err(|e| e.to_string())?;
    let eq = build_equalizer(EqualizerKind::Mmse, &ch, &cfg, 0).map_err(|e| e.to_string())?;
    let x = eq.apply(&y).map_err(|e| e.to_string())?;
    let sp = Sparsifier::of_kind(SparsifierKind::Haar, n).map_err(|e| e.to_string())?;
    let s1 = build_reserved_system(&x, &eq, &reserved, &sp).map_err(|e| e.to_string())?;
    let params = SabmpParams::with_default_t_max(0.05, cfg.noise_var, n, reserved.len());
    let r1 = recover_and_subtract(&s1, &params, &eq, &x).map_err(|e| e.to_string())?;
    let tones = ToneSets::new(reserved.clone(), Vec::new(), p).map_err(|e| e.to_string())?;
    let s2 = build_augmented_system(&x, &r1.cleaned, &eq, &tones, &sp, &c).map_err(|e| e.to_string())?;
    let r2 = recover_and_subtract(&s2, &params, &eq, &x).map_err(|e| e.to_string())?;
    ensure!(r1.cleaned == r2.cleaned, "empty reliable set changed the estimate");
    Ok(())
}

pub fn reliable_selection(seed: u64, p: usize) -> Result<(), String> {
    let mut r = rng(seed);
    let t = r.random_range(1..p);
    let reserved = choose_reserved(p, t, seed).map_err(|e| e.to_string())?;
    // coarse scores so ties occur
    let scores: Vec<f64> = (0..p).map(|_| r.random_range(0..4) as f64).collect();
    let count = r.random_range(0..=p);
    let got = select_reliable(&scores, &reserved, count);
    let mut order: Vec<usize> = (0..p).filter(|i| !reserved.contains(i)).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(count);
    let mut got_sorted = got.clone();
    got_sorted.sort_unstable();
    order.sort_unstable();
    ensure!(got_sorted == order, "selected {got:?}, oracle {order:?}");
    Ok(())
}

pub fn reserved_choice(seed: u64, p: usize) -> Result<(), String> {
    let count = 1 + (seed as usize % (p - 1));
    let a = choose_reserved(p, count, seed).map_err(|e| e.to_string())?;
    let b = choose_reserved(p, count, seed).map_err(|e| e.to_string())?;
    ensure!(a == b, "same seed gave different sets");
    ensure!(a.len() == count, "size {} vs {count}", a.len());
    ensure!(a.windows(2).all(|w| w[0] < w[1]) && a.iter().all(|&i| i < p), "not sorted unique in range: {a:?}");
    Ok(())
}

fn tiny_scenario(seed: u64, variant: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::base("prop", 32);
    c.trials = 3;
    c.seed = seed;
    c.ebn0_db = vec![5.0, 15.0];
    if variant % 2 == 1 {
        c.nbi.offset_mode = OffsetMode::IndependentOffsets;
        c.sparsifier = SparsifierKind::Haar;
    }
    c.curves = vec![
        Curve::of(Receiver::NbiFree),
        Curve::of(Receiver::Proposed),
        Curve::of(Receiver::Augmented),
    ];
    c
}

pub fn scenario_determinism(seed: u64, variant: usize) -> Result<(), String> {
    let cfg = tiny_scenario(seed, variant);
    let strip = |mut o: scfdma_nbi::harness::ScenarioOutput| {
        o.records.iter_mut().for_each(|r| r.wall_time_ms = 0);
        o
    };
    let a = strip(run_scenario(&cfg).map_err(|e| e.to_string())?);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .map_err(|e| e.to_string())?;
    let b = strip(pool.install(|| run_scenario(&cfg)).map_err(|e| e.to_string())?);
    ensure!(a == b, "records differ between runs");
    Ok(())
}

pub fn ber_records_consistent(seed: u64, variant: usize) -> Result<(), String> {
    let cfg = tiny_scenario(seed, variant);
    let out = run_scenario(&cfg).map_err(|e| e.to_string())?;
    let p = cfg.system.per_user() as u64;
    let reserved = (cfg.reserved_fraction * p as f64).round() as u64;
    for r in &out.records {
        ensure!(r.ber == r.bit_errors as f64 / r.total_bits as f64, "{}: ber mismatch", r.scenario);
        let data = if r.scenario.ends_with("nbi_free") { p } else { p - reserved };
        ensure!(r.total_bits == r.trials * data * 4, "{}: {} bits", r.scenario, r.total_bits);
    }
    Ok(())
}

pub fn qam_power(seed: u64, q_index: usize) -> Result<(), String> {
    let q = [4, 16, 64][q_index];
    let var = 0.5 + (seed % 7) as f64;
    let c = Constellation::new(q, var).map_err(|e| e.to_string())?;
    let mean = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / q as f64;
    ensure!((mean - var).abs() < 1e-12 * var, "Q={q}: mean power {mean} vs {var}");
    Ok(())
}

pub const PROPERTIES: &[Property] = &[
    Property { name: "dft_unitary", sizes: 1..=48, check: dft_unitary },
    Property { name: "haar_unitary", sizes: 0..=7, check: haar_unitary },
    Property { name: "parseval", sizes: 1..=512, check: parseval },
    Property { name: "comb_orthogonality", sizes: 1..=4, check: comb_orthogonality },
    Property { name: "zf_chain_identity", sizes: 0..=3, check: zf_chain_identity },
    Property { name: "mmse_to_zf", sizes: 0..=3, check: mmse_to_zf },
    Property { name: "qam_power", sizes: 0..=2, check: qam_power },
    Property { name: "gini_invariance", sizes: 2..=128, check: gini_invariance },
    Property { name: "gini_closed_forms", sizes: 1..=512, check: gini_closed_forms },
    Property { name: "on_grid_support_count", sizes: 1..=8, check: on_grid_support_count },
    Property { name: "sparsifier_round_trip", sizes: 1..=9, check: sparsifier_round_trip },
    Property { name: "support_chain", sizes: 6..=48, check: support_chain },
    Property { name: "covariance_psd", sizes: 6..=48, check: covariance_psd },
    Property { name: "argmax_scale_invariance", sizes: 6..=24, check: argmax_scale_invariance },
    Property { name: "greedy_first_index_is_exhaustive", sizes: 4..=12, check: greedy_first_index_is_exhaustive },
    Property { name: "stage_one_reassembly", sizes: 0..=2, check: stage_one_reassembly },
    Property {
        name: "augmentation_without_reliable_is_stage_one",
        sizes: 0..=2,
        check: augmentation_without_reliable_is_stage_one,
    },
    Property { name: "reliable_selection", sizes: 2..=64, check: reliable_selection },
    Property { name: "reserved_choice", sizes: 2..=256, check: reserved_choice },
    Property { name: "scenario_determinism", sizes: 0..=1, check: scenario_determinism },
    Property { name: "ber_records_consistent", sizes: 0..=1, check: ber_records_consistent },
];

/// Run one named property for `cases` generated inputs with a fixed runner
/// seed.
pub fn run_property(name: &str, cases: u32) -> Result<(), String> {
    let prop = PROPERTIES
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| format!("no property named {name}"))?;
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner
        .run(&(any::<u64>(), prop.sizes.clone()), |(seed, size)| {
            (prop.check)(seed, size).map_err(TestCaseError::fail)
        })
        .map_err(|e| format!("{name}: {e}"))
}
