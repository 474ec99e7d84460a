//! Support-agnostic Bayesian matching pursuit.
//!
//! The greedy search grows a chain of nested supports `S_1 ⊂ S_2 ⊂ ...`, each
//! step adding the single index that maximises the log posterior
//!
//! ```text
//! nu(S) = -||P_S^perp x||^2 / (2 sigma^2) + sum_{i in S} ln(lambda_i) + sum_{j not in S} ln(1 - lambda_j)
//! ```
//!
//! The projector is updated incrementally by Gram-Schmidt, so one step costs
//! `O(M N)` per measurement vector. The same engine serves several measurement
//! vectors that share a support: their likelihood terms add and the prior is
//! counted once.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{dot_h, norm_sqr, CMat, C64, ZERO};

/// Solver hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SabmpParams {
    /// Activation probabilities, one per unknown or a single broadcast value.
    pub lambda: Vec<f64>,
    pub noise_var: f64,
    pub t_max: usize,
    pub normalize_posteriors: bool,
}

/// `ceil(n lambda + 2 sqrt(n lambda (1 - lambda)))` clamped to `[1, m - 1]`.
pub fn default_t_max(n: usize, mean_lambda: f64, m: usize) -> usize {
    let nl = n as f64 * mean_lambda;
    let t = (nl + 2.0 * (nl * (1.0 - mean_lambda)).max(0.0).sqrt()).ceil() as usize;
    t.min(m.saturating_sub(1)).max(1)
}

impl SabmpParams {
    pub fn uniform(lambda: f64, noise_var: f64, t_max: usize) -> Self {
        Self {
            lambda: vec![lambda],
            noise_var,
            t_max,
            normalize_posteriors: true,
        }
    }

    /// Uniform prior with the two-sigma default support bound for an `m x n`
    /// system.
    pub fn with_default_t_max(lambda: f64, noise_var: f64, n: usize, m: usize) -> Self {
        Self::uniform(lambda, noise_var, default_t_max(n, lambda, m))
    }

    pub fn lambda_at(&self, i: usize) -> f64 {
        if self.lambda.len() == 1 {
            self.lambda[0]
        } else {
            self.lambda[i]
        }
    }

    pub fn mean_lambda(&self, n: usize) -> f64 {
        (0..n).map(|i| self.lambda_at(i)).sum::<f64>() / n.max(1) as f64
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.lambda.len() != 1 && self.lambda.len() != n {
            return Err(Error::Dimension {
                context: "lambda length",
                expected: n,
                actual: self.lambda.len(),
            });
        }
        if let Some(l) = self.lambda.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(Error::config("lambda", format!("{l} outside (0, 1)")));
        }
        if !(self.noise_var > 0.0) || !self.noise_var.is_finite() {
            return Err(Error::config("noise_var", "must be positive and finite"));
        }
        if self.t_max == 0 || self.t_max > m {
            return Err(Error::config(
                "t_max",
                format!("{} outside [1, {m}] for {m} measurements", self.t_max),
            ));
        }
        Ok(())
    }

    fn log_prior_empty(&self, n: usize) -> f64 {
        (0..n).map(|i| (1.0 - self.lambda_at(i)).ln()).sum()
    }

    fn logit(&self, i: usize) -> f64 {
        let l = self.lambda_at(i);
        (l / (1.0 - l)).ln()
    }

    fn log_prior(&self, support: &[usize], n: usize) -> f64 {
        self.log_prior_empty(n) + support.iter().map(|&i| self.logit(i)).sum::<f64>()
    }
}

/// One member of the dominant support chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantSupport {
    pub support: Vec<usize>,
    pub nu: f64,
    pub weight: f64,
    /// BLUE coefficients aligned with `support`.
    pub blue: Vec<C64>,
}

/// Error covariance restricted to the largest support; zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCovariance {
    pub indices: Vec<usize>,
    pub block: CMat,
}

impl ErrorCovariance {
    pub fn to_dense(&self, n: usize) -> CMat {
        let mut out = CMat::zeros(n, n);
        for (a, &i) in self.indices.iter().enumerate() {
            for (b, &j) in self.indices.iter().enumerate() {
                out[(i, j)] = self.block[(a, b)];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.block.nrows()).map(|k| self.block[(k, k)].re).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseEstimate {
    /// `x_AMMSE`, length `N`.
    pub estimate: Vec<C64>,
    pub dominant: Vec<DominantSupport>,
    pub covariance: ErrorCovariance,
}

impl SparseEstimate {
    pub fn n(&self) -> usize {
        self.estimate.len()
    }

    /// Indices in the order they joined the chain.
    pub fn support_chain(&self) -> &[usize] {
        self.dominant.last().map(|d| d.support.as_slice()).unwrap_or(&[])
    }
}

/// Per-measurement-vector state of the incremental projector.
struct Chain<'a> {
    m: usize,
    psi: &'a CMat,
    /// `P_S^perp psi_j`, column-major `M x N`.
    q: Vec<C64>,
    q_energy: Vec<f64>,
    col_energy: Vec<f64>,
    basis: Vec<Vec<C64>>,
    /// Row `k` holds `u_k^H psi_j` for every column.
    coef: Vec<Vec<C64>>,
    z: Vec<C64>,
    r: Vec<C64>,
}

impl<'a> Chain<'a> {
    fn new(x: &[C64], psi: &'a CMat) -> Self {
        let m = psi.nrows();
        let q: Vec<C64> = psi.as_slice().to_vec();
        let col_energy: Vec<f64> = q.chunks(m.max(1)).map(norm_sqr).collect();
        Self {
            m,
            psi,
            q_energy: col_energy.clone(),
            col_energy,
            q,
            basis: Vec::new(),
            coef: Vec::new(),
            z: Vec::new(),
            r: x.to_vec(),
        }
    }

    fn column(&self, j: usize) -> &[C64] {
        &self.q[j * self.m..(j + 1) * self.m]
    }

    fn admissible(&self, j: usize) -> bool {
        self.col_energy[j] > 0.0 && self.q_energy[j] > 1e-12 * self.col_energy[j]
    }

    /// Drop in `||r||^2` from adding column `j`.
    fn gain(&self, j: usize) -> f64 {
        dot_h(self.column(j), &self.r).norm_sqr() / self.q_energy[j]
    }

    fn extend(&mut self, j: usize) {
        let scale = 1.0 / self.q_energy[j].sqrt();
        let mut u: Vec<C64> = self.column(j).iter().map(|c| c * scale).collect();
        for b in &self.basis {
            let p = dot_h(b, &u);
            u.iter_mut().zip(b).for_each(|(ui, bi)| *ui -= bi * p);
        }
        let s = 1.0 / norm_sqr(&u).sqrt();
        u.iter_mut().for_each(|ui| *ui *= s);

        let n = self.col_energy.len();
        let mut row = vec![ZERO; n];
        for (c, coef) in row.iter_mut().enumerate() {
            let col = &mut self.q[c * self.m..(c + 1) * self.m];
            let proj = dot_h(&u, col);
            col.iter_mut().zip(&u).for_each(|(qi, ui)| *qi -= ui * proj);
            self.q_energy[c] = norm_sqr(col);
            *coef = proj;
        }
        // the chosen column is now in span(basis); its coefficient on u is
        // taken against the original column for an exact triangular factor
        row[j] = dot_h(&u, &self.psi.as_slice()[j * self.m..(j + 1) * self.m]);
        self.q_energy[j] = 0.0;

        let zk = dot_h(&u, &self.r);
        self.r.iter_mut().zip(&u).for_each(|(ri, ui)| *ri -= ui * zk);
        self.z.push(zk);
        self.coef.push(row);
        self.basis.push(u);
    }

    /// Upper-triangular `R` with `Psi_S = U R` and its inverse.
    fn triangular_inverse(&self, support: &[usize]) -> Result<CMat> {
        let k = support.len();
        let r = CMat::from_fn(k, k, |i, c| {
            if i <= c {
                self.coef[i][support[c]]
            } else {
                ZERO
            }
        });
        r.solve_upper_triangular(&CMat::identity(k, k))
            .ok_or_else(|| Error::RankDeficient {
                support: support.to_vec(),
            })
    }
}

fn validate_system(x: &[C64], psi: &CMat) -> Result<()> {
    if psi.nrows() == 0 {
        return Err(Error::Empty("measurement vector"));
    }
    if x.len() != psi.nrows() {
        return Err(Error::Dimension {
            context: "measurements vs sensing rows",
            expected: psi.nrows(),
            actual: x.len(),
        });
    }
    Ok(())
}

/// Posterior weights from chain metrics: a softmax when `normalize`, else
/// `exp(nu - max nu)`.
pub fn posterior_weights(nus: &[f64], normalize: bool) -> Vec<f64> {
    let max = nus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = nus.iter().map(|v| (v - max).exp()).collect();
    if normalize {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    } else {
        w
    }
}

fn run_chains(systems: &[(&[C64], &CMat)], params: &SabmpParams) -> Result<Vec<SparseEstimate>> {
    let (_, psi0) = systems.first().ok_or(Error::Empty("measurement systems"))?;
    let n = psi0.ncols();
    let m = psi0.nrows();
    for (x, psi) in systems {
        validate_system(x, psi)?;
        if psi.ncols() != n {
            return Err(Error::Dimension {
                context: "unknown dimension across systems",
                expected: n,
                actual: psi.ncols(),
            });
        }
        if psi.nrows() != m {
            return Err(Error::Dimension {
                context: "measurement count across systems",
                expected: m,
                actual: psi.nrows(),
            });
        }
    }
    params.validate(n, m)?;

    let two_s2 = 2.0 * params.noise_var;
    let mut chains: Vec<Chain> = systems.iter().map(|(x, psi)| Chain::new(x, psi)).collect();
    let mut in_support = vec![false; n];
    let mut support = Vec::with_capacity(params.t_max);
    let mut nus = Vec::with_capacity(params.t_max);
    let base_prior = params.log_prior_empty(n);
    let mut prior = base_prior;

    for _ in 0..params.t_max.min(n) {
        let mut best: Option<(usize, f64)> = None;
        for (j, &taken) in in_support.iter().enumerate() {
            if taken || !chains.iter().all(|c| c.admissible(j)) {
                continue;
            }
            let score = chains.iter().map(|c| c.gain(j)).sum::<f64>() / two_s2 + params.logit(j);
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        let Some((j, _)) = best else { break };
        for c in chains.iter_mut() {
            c.extend(j);
        }
        in_support[j] = true;
        support.push(j);
        prior += params.logit(j);
        let misfit: f64 = chains.iter().map(|c| norm_sqr(&c.r)).sum();
        nus.push(-misfit / two_s2 + prior);
    }

    let k = support.len();
    let weights = posterior_weights(&nus, true);
    let reported = posterior_weights(&nus, params.normalize_posteriors);
    // c_i = total weight of the supports that contain the i-th chain index
    let mut tail = vec![0.0; k];
    let mut acc = 0.0;
    for i in (0..k).rev() {
        acc += weights[i];
        tail[i] = acc;
    }

    chains
        .iter()
        .map(|chain| {
            let rinv = chain.triangular_inverse(&support)?;
            let dominant = (0..k)
                .map(|s| {
                    let blue = (0..=s)
                        .map(|i| (i..=s).map(|c| rinv[(i, c)] * chain.z[c]).sum())
                        .collect();
                    DominantSupport {
                        support: support[..=s].to_vec(),
                        nu: nus[s],
                        weight: reported[s],
                        blue,
                    }
                })
                .collect();
            let cz = DVector::from_iterator(k, (0..k).map(|i| chain.z[i] * tail[i]));
            let coeffs = &rinv * cz;
            let mut estimate = vec![ZERO; n];
            for (i, &idx) in support.iter().enumerate() {
                estimate[idx] = coeffs[i];
            }
            let d = CMat::from_diagonal(&DVector::from_iterator(
                k,
                tail.iter().map(|t| C64::new(t * params.noise_var, 0.0)),
            ));
            let block = &rinv * d * rinv.adjoint();
            Ok(SparseEstimate {
                estimate,
                dominant,
                covariance: ErrorCovariance {
                    indices: support.clone(),
                    block,
                },
            })
        })
        .collect()
}

/// Single-vector SABMP.
pub fn greedy_search(x: &[C64], psi: &CMat, params: &SabmpParams) -> Result<SparseEstimate> {
    Ok(run_chains(&[(x, psi)], params)?.remove(0))
}

/// Joint-support SABMP over several measurement vectors. Each returned
/// estimate shares the support chain and posterior weights; amplitudes and
/// covariances are per vector.
pub fn mmv_greedy_search(
    systems: &[(Vec<C64>, CMat)],
    params: &SabmpParams,
) -> Result<Vec<SparseEstimate>> {
    let refs: Vec<(&[C64], &CMat)> = systems.iter().map(|(x, p)| (x.as_slice(), p)).collect();
    run_chains(&refs, params)
}

fn submatrix(psi: &CMat, support: &[usize]) -> Result<CMat> {
    if let Some(&bad) = support.iter().find(|&&i| i >= psi.ncols()) {
        return Err(Error::OutOfRange {
            what: "support index",
            index: bad,
            limit: psi.ncols(),
        });
    }
    Ok(psi.select_columns(support))
}

fn singular_range(a: &CMat) -> (f64, f64) {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, max)
}

/// Direct evaluation of the support metric through an SVD of `Psi_S`.
pub fn nu_metric(support: &[usize], x: &[C64], psi: &CMat, params: &SabmpParams) -> Result<f64> {
    validate_system(x, psi)?;
    params.validate(psi.ncols(), psi.nrows().max(1))?;
    let n = psi.ncols();
    let prior = params.log_prior(support, n);
    let misfit = if support.is_empty() {
        norm_sqr(x)
    } else {
        let ps = submatrix(psi, support)?;
        let (min, max) = singular_range(&ps);
        if support.len() > psi.nrows() || !(min > 1e-12 * max) {
            return Err(Error::RankDeficient {
                support: support.to_vec(),
            });
        }
        let xv = DVector::from_column_slice(x);
        let coef = ps
            .clone()
            .svd(true, true)
            .solve(&xv, 0.0)
            .map_err(|_| Error::RankDeficient {
                support: support.to_vec(),
            })?;
        (xv - ps * coef).norm_squared()
    };
    Ok(-misfit / (2.0 * params.noise_var) + prior)
}

/// `(Psi_S^H Psi_S)^{-1} Psi_S^H x`.
pub fn blue_estimate(support: &[usize], x: &[C64], psi: &CMat) -> Result<Vec<C64>> {
    validate_system(x, psi)?;
    if support.is_empty() {
        return Ok(Vec::new());
    }
    let ps = submatrix(psi, support)?;
    let (min, max) = singular_range(&ps);
    let condition = if min > 0.0 { (max / min).powi(2) } else { f64::INFINITY };
    if support.len() > psi.nrows() || !(condition <= 1e12) {
        return Err(Error::Degenerate {
            support: support.to_vec(),
            condition,
        });
    }
    let gram = ps.adjoint() * &ps;
    let rhs = ps.adjoint() * DVector::from_column_slice(x);
    let sol = gram
        .cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::Degenerate {
            support: support.to_vec(),
            condition,
        })?;
    Ok(sol.iter().cloned().collect())
}

fn check_dominant(dominant: &[DominantSupport], n: usize) -> Result<()> {
    if dominant.is_empty() {
        return Err(Error::Empty("dominant support list"));
    }
    for d in dominant {
        if d.blue.len() != d.support.len() {
            return Err(Error::Dimension {
                context: "BLUE length vs support size",
                expected: d.support.len(),
                actual: d.blue.len(),
            });
        }
        if let Some(&bad) = d.support.iter().find(|&&i| i >= n) {
            return Err(Error::OutOfRange {
                what: "support index",
                index: bad,
                limit: n,
            });
        }
    }
    Ok(())
}

/// Posterior-weighted sum of embedded BLUE vectors, weights re-derived from
/// the stored metrics.
pub fn ammse_combine(dominant: &[DominantSupport], n: usize) -> Result<Vec<C64>> {
    check_dominant(dominant, n)?;
    let nus: Vec<f64> = dominant.iter().map(|d| d.nu).collect();
    let w = posterior_weights(&nus, true);
    let mut out = vec![ZERO; n];
    for (d, w) in dominant.iter().zip(w) {
        for (&i, b) in d.support.iter().zip(&d.blue) {
            out[i] += b * w;
        }
    }
    Ok(out)
}

/// `sigma^2 sum_S w_S (Psi_S^H Psi_S)^{-1}` embedded on each support, using
/// the stored weights.
pub fn error_covariance(dominant: &[DominantSupport], psi: &CMat, noise_var: f64) -> Result<CMat> {
    let n = psi.ncols();
    check_dominant(dominant, n)?;
    let mut out = CMat::zeros(n, n);
    for d in dominant {
        let ps = submatrix(psi, &d.support)?;
        let inv = (ps.adjoint() * &ps)
            .try_inverse()
            .ok_or_else(|| Error::RankDeficient {
                support: d.support.clone(),
            })?;
        for (a, &i) in d.support.iter().enumerate() {
            for (b, &j) in d.support.iter().enumerate() {
                out[(i, j)] += inv[(a, b)] * (noise_var * d.weight);
            }
        }
    }
    Ok(out)
}
