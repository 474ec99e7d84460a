//! Interleaved SC-FDMA uplink: DFT precoding, comb mapping, circulant
//! channels and the ZF/MMSE frequency-domain equalizers.
//!
//! Users are indexed `0..U` and user `u` occupies subcarriers `u + U*l`.
//! Every equalizer has the structure `E_u = F_P^H diag(g) M_u^H`, so it is
//! stored as the `P` per-bin gains and applied with an FFT; [`EqualizerMatrix::matrix`]
//! materialises the dense `P x N` operator when one is needed.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{complex_normal, fft_unitary, ifft_unitary, CMat, C64, ZERO};
use crate::qam::Constellation;

/// Dimensions and noise levels of the link.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub n_subcarriers: usize,
    pub n_users: usize,
    pub qam_order: usize,
    pub channel_len: usize,
    pub noise_var: f64,
    pub symbol_var: f64,
}

impl SystemConfig {
    pub fn new(n_subcarriers: usize, n_users: usize, qam_order: usize, channel_len: usize) -> Self {
        Self {
            n_subcarriers,
            n_users,
            qam_order,
            channel_len,
            noise_var: 0.0,
            symbol_var: 1.0,
        }
    }

    pub fn per_user(&self) -> usize {
        self.n_subcarriers / self.n_users
    }

    pub fn with_noise_var(mut self, noise_var: f64) -> Self {
        self.noise_var = noise_var;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers == 0 {
            return Err(Error::config("n_subcarriers", "must be positive"));
        }
        if self.n_users == 0 || !self.n_subcarriers.is_multiple_of(self.n_users) {
            return Err(Error::config(
                "n_users",
                format!("{} does not divide N = {}", self.n_users, self.n_subcarriers),
            ));
        }
        if self.channel_len == 0 || self.channel_len > self.n_subcarriers {
            return Err(Error::config("channel_len", "must lie in [1, N]"));
        }
        if !(self.noise_var >= 0.0) {
            return Err(Error::config("noise_var", "must be non-negative"));
        }
        if !(self.symbol_var > 0.0) {
            return Err(Error::config("symbol_var", "must be positive"));
        }
        Constellation::new(self.qam_order, self.symbol_var)?;
        Ok(())
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::new(self.qam_order, self.symbol_var)
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.qam_order.trailing_zeros() as usize
    }

    /// Subcarrier indices of user `u`.
    pub fn comb(&self, user: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.per_user()).map(move |l| user + self.n_users * l)
    }

    /// Noise variance for a given Eb/N0, accounting for the N-point IDFT
    /// normalisation: `sigma_z^2 = sigma_x^2 * P / (N * log2(Q) * Eb/N0)`.
    pub fn noise_var_for_ebn0(&self, ebn0_db: f64) -> f64 {
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        self.symbol_var * self.per_user() as f64
            / (self.n_subcarriers as f64 * self.bits_per_symbol() as f64 * ebn0)
    }
}

/// One user's multipath channel: time taps and the N-point frequency response.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<C64>,
    pub freq_response: Vec<C64>,
}

impl ChannelRealization {
    /// Frequency response is the (unnormalised) N-point DFT of the zero-padded
    /// taps, i.e. the eigenvalues of the circulant channel matrix.
    pub fn from_taps(taps: Vec<C64>, n: usize) -> Result<Self> {
        if taps.is_empty() || taps.len() > n {
            return Err(Error::Dimension {
                context: "channel taps",
                expected: n,
                actual: taps.len(),
            });
        }
        let mut freq = vec![ZERO; n];
        freq[..taps.len()].copy_from_slice(&taps);
        fft_unitary(&mut freq);
        let s = (n as f64).sqrt();
        freq.iter_mut().for_each(|v| *v *= s);
        Ok(Self {
            taps,
            freq_response: freq,
        })
    }

    /// Taps i.i.d. CN(0, 1/Nc): unit expected total power.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, channel_len: usize, n: usize) -> Result<Self> {
        let var = 1.0 / channel_len as f64;
        let taps = (0..channel_len).map(|_| complex_normal(rng, var)).collect();
        Self::from_taps(taps, n)
    }

    /// Flat unit channel.
    pub fn identity(n: usize) -> Self {
        let mut taps = vec![ZERO; 1];
        taps[0] = C64::new(1.0, 0.0);
        Self::from_taps(taps, n).expect("n >= 1")
    }

    pub fn n(&self) -> usize {
        self.freq_response.len()
    }
}

/// Place `P` precoded values on user `u`'s comb of an `N`-length vector.
pub fn map_user(config: &SystemConfig, user: usize, precoded: &[C64]) -> Result<Vec<C64>> {
    if user >= config.n_users {
        return Err(Error::OutOfRange {
            what: "user",
            index: user,
            limit: config.n_users,
        });
    }
    if precoded.len() != config.per_user() {
        return Err(Error::Dimension {
            context: "map_user precoded length",
            expected: config.per_user(),
            actual: precoded.len(),
        });
    }
    let mut out = vec![ZERO; config.n_subcarriers];
    for (k, v) in config.comb(user).zip(precoded) {
        out[k] = *v;
    }
    Ok(out)
}

/// Dense `N x P` resource-allocation matrix `M_u`.
pub fn allocation_matrix(config: &SystemConfig, user: usize) -> CMat {
    let mut m = CMat::zeros(config.n_subcarriers, config.per_user());
    for (l, k) in config.comb(user).enumerate() {
        m[(k, l)] = C64::new(1.0, 0.0);
    }
    m
}

/// A user's transmitted SC-FDMA block.
#[derive(Debug, Clone)]
pub struct QamFrame {
    pub user: usize,
    pub bits: Vec<u8>,
    /// `x_u`, zero at reserved positions.
    pub symbols: Vec<C64>,
    /// Symbol index per position (`None` where reserved).
    pub symbol_indices: Vec<Option<usize>>,
    /// `X_u = M_u F_P x_u`.
    pub mapped: Vec<C64>,
}

impl QamFrame {
    /// Build a frame with data on every position except `reserved`; `bits`
    /// must cover exactly the `P - |reserved|` data positions.
    pub fn new(
        config: &SystemConfig,
        constellation: &Constellation,
        user: usize,
        bits: Vec<u8>,
        reserved: &[usize],
    ) -> Result<Self> {
        let p = config.per_user();
        let b = constellation.bits_per_symbol();
        let mut is_reserved = vec![false; p];
        for &t in reserved {
            if t >= p {
                return Err(Error::OutOfRange {
                    what: "reserved tone",
                    index: t,
                    limit: p,
                });
            }
            is_reserved[t] = true;
        }
        let n_data = is_reserved.iter().filter(|r| !**r).count();
        if bits.len() != n_data * b {
            return Err(Error::BitLength {
                bits: bits.len(),
                bits_per_symbol: b,
            });
        }
        let mut symbols = vec![ZERO; p];
        let mut symbol_indices = vec![None; p];
        let mut chunks = bits.chunks(b);
        for i in 0..p {
            if is_reserved[i] {
                continue;
            }
            let chunk = chunks.next().expect("bit count checked");
            let s = chunk.iter().fold(0usize, |acc, &bit| (acc << 1) | (bit & 1) as usize);
            symbols[i] = constellation.point(s);
            symbol_indices[i] = Some(s);
        }
        let mut pre = symbols.clone();
        fft_unitary(&mut pre);
        let mapped = map_user(config, user, &pre)?;
        Ok(Self {
            user,
            bits,
            symbols,
            symbol_indices,
            mapped,
        })
    }
}

/// `Y = sum_u Lambda_u X_u + I + Z` for an explicit noise vector.
pub fn receive_with_noise(
    config: &SystemConfig,
    frames: &[QamFrame],
    channels: &[ChannelRealization],
    nbi: &[C64],
    noise: &[C64],
) -> Result<Vec<C64>> {
    let n = config.n_subcarriers;
    if frames.len() != channels.len() {
        return Err(Error::Dimension {
            context: "frames vs channels",
            expected: frames.len(),
            actual: channels.len(),
        });
    }
    for (ctx, len) in [("nbi length", nbi.len()), ("noise length", noise.len())] {
        if len != n {
            return Err(Error::Dimension {
                context: ctx,
                expected: n,
                actual: len,
            });
        }
    }
    let mut y: Vec<C64> = nbi.iter().zip(noise).map(|(i, z)| i + z).collect();
    for (frame, ch) in frames.iter().zip(channels) {
        if frame.mapped.len() != n || ch.n() != n {
            return Err(Error::Dimension {
                context: "frame/channel length",
                expected: n,
                actual: frame.mapped.len().min(ch.n()),
            });
        }
        for k in config.comb(frame.user) {
            y[k] += ch.freq_response[k] * frame.mapped[k];
        }
    }
    Ok(y)
}

/// Received frequency-domain vector with AWGN of variance `noise_var` drawn
/// from `noise_seed`.
pub fn transmit_receive(
    config: &SystemConfig,
    frames: &[QamFrame],
    channels: &[ChannelRealization],
    nbi: &[C64],
    noise_seed: u64,
) -> Result<Vec<C64>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(noise_seed);
    let noise: Vec<C64> = (0..config.n_subcarriers)
        .map(|_| complex_normal(&mut rng, config.noise_var))
        .collect();
    receive_with_noise(config, frames, channels, nbi, &noise)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqualizerKind {
    Zf,
    Mmse,
}

impl std::str::FromStr for EqualizerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zf" => Ok(Self::Zf),
            "mmse" => Ok(Self::Mmse),
            other => Err(Error::config("equalizer", format!("unknown kind '{other}'"))),
        }
    }
}

/// `E_u = F_P^H diag(gains) M_u^H`.
#[derive(Debug, Clone)]
pub struct EqualizerMatrix {
    pub kind: EqualizerKind,
    pub user: usize,
    pub n_users: usize,
    pub gains: Vec<C64>,
}

pub fn build_equalizer(
    kind: EqualizerKind,
    channel: &ChannelRealization,
    config: &SystemConfig,
    user: usize,
) -> Result<EqualizerMatrix> {
    if user >= config.n_users {
        return Err(Error::OutOfRange {
            what: "user",
            index: user,
            limit: config.n_users,
        });
    }
    if channel.n() != config.n_subcarriers {
        return Err(Error::Dimension {
            context: "channel response length",
            expected: config.n_subcarriers,
            actual: channel.n(),
        });
    }
    let sx = config.symbol_var;
    let sz = config.noise_var;
    let gains = config
        .comb(user)
        .map(|k| {
            let h = channel.freq_response[k];
            match kind {
                EqualizerKind::Zf => {
                    if h == ZERO {
                        Err(Error::SingularChannel { bin: k })
                    } else {
                        Ok(h.inv())
                    }
                }
                EqualizerKind::Mmse => {
                    let den = sx * h.norm_sqr() + sz;
                    if den == 0.0 {
                        Err(Error::SingularChannel { bin: k })
                    } else {
                        Ok(h.conj() * (sx / den))
                    }
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EqualizerMatrix {
        kind,
        user,
        n_users: config.n_users,
        gains,
    })
}

impl EqualizerMatrix {
    pub fn per_user(&self) -> usize {
        self.gains.len()
    }

    pub fn n(&self) -> usize {
        self.gains.len() * self.n_users
    }

    pub fn comb_bin(&self, l: usize) -> usize {
        self.user + self.n_users * l
    }

    /// Dense `P x N` matrix.
    pub fn matrix(&self) -> CMat {
        let p = self.per_user();
        let n = self.n();
        let scale = 1.0 / (p as f64).sqrt();
        let mut e = CMat::zeros(p, n);
        for i in 0..p {
            for l in 0..p {
                let phase = 2.0 * std::f64::consts::PI * ((i * l) % p) as f64 / p as f64;
                e[(i, self.comb_bin(l))] = C64::from_polar(scale, phase) * self.gains[l];
            }
        }
        e
    }

    /// Rows `rows` of the dense matrix, as a `|rows| x N` matrix.
    pub fn rows(&self, rows: &[usize]) -> CMat {
        let p = self.per_user();
        let scale = 1.0 / (p as f64).sqrt();
        let mut e = CMat::zeros(rows.len(), self.n());
        for (r, &i) in rows.iter().enumerate() {
            for l in 0..p {
                let phase = 2.0 * std::f64::consts::PI * ((i * l) % p) as f64 / p as f64;
                e[(r, self.comb_bin(l))] = C64::from_polar(scale, phase) * self.gains[l];
            }
        }
        e
    }

    /// `E_u y` for an `N`-length frequency-domain vector.
    pub fn apply(&self, y: &[C64]) -> Result<Vec<C64>> {
        if y.len() != self.n() {
            return Err(Error::Dimension {
                context: "equalizer input",
                expected: self.n(),
                actual: y.len(),
            });
        }
        let mut buf: Vec<C64> = self
            .gains
            .iter()
            .enumerate()
            .map(|(l, g)| g * y[self.comb_bin(l)])
            .collect();
        ifft_unitary(&mut buf);
        Ok(buf)
    }

    /// Mean squared row norm, `tr(E E^H) / P`.
    pub fn mean_row_energy(&self) -> f64 {
        self.gains.iter().map(|g| g.norm_sqr()).sum::<f64>() / self.per_user() as f64
    }
}

/// `x_hat = E_u Y`.
pub fn equalize(eq: &EqualizerMatrix, y: &[C64]) -> Result<Vec<C64>> {
    eq.apply(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_normal, dft_matrix, mat_vec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::new(16, 2, 16, 4)
    }

    fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn map_user_places_on_comb() {
        let c = SystemConfig::new(4, 2, 4, 1);
        let a = C64::new(1.0, 2.0);
        let b = C64::new(-3.0, 0.5);
        assert_eq!(map_user(&c, 0, &[a, b]).unwrap(), vec![a, ZERO, b, ZERO]);
        assert!(matches!(map_user(&c, 2, &[a, b]), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn allocation_matrices_are_orthonormal() {
        let c = SystemConfig::new(16, 4, 4, 1);
        for i in 0..4 {
            for j in 0..4 {
                let g = allocation_matrix(&c, i).adjoint() * allocation_matrix(&c, j);
                for r in 0..4 {
                    for s in 0..4 {
                        let want = if i == j && r == s { 1.0 } else { 0.0 };
                        assert_eq!(g[(r, s)], C64::new(want, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn allocations_partition_identity() {
        let c = SystemConfig::new(16, 4, 4, 1);
        let mut acc = CMat::zeros(16, 16);
        for u in 0..4 {
            let m = allocation_matrix(&c, u);
            acc += &m * m.adjoint();
        }
        assert_eq!(acc, CMat::identity(16, 16));
    }

    #[test]
    fn channel_response_is_dft_of_taps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = ChannelRealization::random(&mut rng, 4, 16).unwrap();
        let f = dft_matrix(16);
        let mut padded = vec![ZERO; 16];
        padded[..4].copy_from_slice(&ch.taps);
        let want = mat_vec(&f, &padded);
        for (a, b) in ch.freq_response.iter().zip(want) {
            assert!((a - b * 4.0).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_channel_single_user_receives_mapped() {
        let c = SystemConfig::new(8, 1, 4, 1);
        let con = c.constellation().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let frame = QamFrame::new(&c, &con, 0, random_bits(&mut rng, 16), &[]).unwrap();
        let y = receive_with_noise(&c, std::slice::from_ref(&frame), &[ChannelRealization::identity(8)], &[ZERO; 8], &[ZERO; 8]).unwrap();
        for (a, b) in y.iter().zip(&frame.mapped) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn nbi_passes_straight_through() {
        let c = cfg();
        let mut e = vec![ZERO; 16];
        e[5] = C64::new(1.0, 0.0);
        let y = receive_with_noise(&c, &[], &[], &e, &[ZERO; 16]).unwrap();
        assert_eq!(y, e);
    }

    #[test]
    fn received_signal_reassembles_from_components() {
        let c = cfg();
        let con = c.constellation().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let frames: Vec<_> = (0..2)
            .map(|u| QamFrame::new(&c, &con, u, random_bits(&mut rng, 32), &[]).unwrap())
            .collect();
        let chans: Vec<_> = (0..2).map(|_| ChannelRealization::random(&mut rng, 4, 16).unwrap()).collect();
        let nbi: Vec<C64> = (0..16).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let noise: Vec<C64> = (0..16).map(|_| complex_normal(&mut rng, 0.1)).collect();
        let y = receive_with_noise(&c, &frames, &chans, &nbi, &noise).unwrap();
        // Sum_u Lambda_u M_u F_P x_u with dense matrices
        let fp = dft_matrix(8);
        let mut want: Vec<C64> = nbi.iter().zip(&noise).map(|(a, b)| a + b).collect();
        for (f, ch) in frames.iter().zip(&chans) {
            let xu = mat_vec(&(allocation_matrix(&c, f.user) * &fp), &f.symbols);
            for k in 0..16 {
                want[k] += ch.freq_response[k] * xu[k];
            }
        }
        let err: f64 = y.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10);
    }

    #[test]
    fn zf_recovers_data_exactly_without_noise() {
        let c = cfg();
        let con = c.constellation().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let frames: Vec<_> = (0..2)
                .map(|u| QamFrame::new(&c, &con, u, random_bits(&mut rng, 32), &[]).unwrap())
                .collect();
            let chans: Vec<_> = (0..2).map(|_| ChannelRealization::random(&mut rng, 4, 16).unwrap()).collect();
            let y = receive_with_noise(&c, &frames, &chans, &[ZERO; 16], &[ZERO; 16]).unwrap();
            for u in 0..2 {
                let eq = build_equalizer(EqualizerKind::Zf, &chans[u], &c, u).unwrap();
                let xh = equalize(&eq, &y).unwrap();
                let (_, bits) = con.demodulate_hard(&xh);
                assert_eq!(bits, frames[u].bits);
            }
        }
    }

    #[test]
    fn flat_zf_is_precoder_inverse() {
        let c = SystemConfig::new(8, 2, 4, 1);
        let eq = build_equalizer(EqualizerKind::Zf, &ChannelRealization::identity(8), &c, 1).unwrap();
        let want = dft_matrix(4).adjoint() * allocation_matrix(&c, 1).adjoint();
        assert!((eq.matrix() - want).camax() < 1e-14);
    }

    #[test]
    fn zf_matches_closed_form() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = ChannelRealization::random(&mut rng, 4, 16).unwrap();
        let eq = build_equalizer(EqualizerKind::Zf, &ch, &c, 0).unwrap();
        let lam_inv = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            16,
            ch.freq_response.iter().map(|h| h.inv()),
        ));
        let want = dft_matrix(8).adjoint() * allocation_matrix(&c, 0).adjoint() * lam_inv;
        assert!((eq.matrix() - want).camax() < 1e-12);
    }

    #[test]
    fn mmse_matches_generic_inverse_oracle() {
        let mut c = cfg();
        c.noise_var = 0.3;
        c.symbol_var = 1.7;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = ChannelRealization::random(&mut rng, 4, 16).unwrap();
        let u = 1;
        let eq = build_equalizer(EqualizerKind::Mmse, &ch, &c, u).unwrap();
        let lam = CMat::from_diagonal(&nalgebra::DVector::from_vec(ch.freq_response.clone()));
        let m = allocation_matrix(&c, u);
        let a = m.adjoint() * &lam * &m * dft_matrix(8);
        let inner = (&a * a.adjoint()) * C64::new(c.symbol_var, 0.0) + CMat::identity(8, 8) * C64::new(c.noise_var, 0.0);
        let inv = inner.try_inverse().unwrap();
        let want = a.adjoint() * inv * m.adjoint() * C64::new(c.symbol_var, 0.0);
        assert!((eq.matrix() - want).camax() < 1e-12);
    }

    #[test]
    fn mmse_converges_to_zf_at_vanishing_noise() {
        let c = cfg();
        let con = c.constellation().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let frames: Vec<_> = (0..2)
            .map(|u| QamFrame::new(&c, &con, u, random_bits(&mut rng, 32), &[]).unwrap())
            .collect();
        let chans: Vec<_> = (0..2).map(|_| ChannelRealization::random(&mut rng, 4, 16).unwrap()).collect();
        let y = receive_with_noise(&c, &frames, &chans, &[ZERO; 16], &[ZERO; 16]).unwrap();
        let zf = equalize(&build_equalizer(EqualizerKind::Zf, &chans[0], &c, 0).unwrap(), &y).unwrap();
        let c2 = c.clone().with_noise_var(1e-12);
        let mm = equalize(&build_equalizer(EqualizerKind::Mmse, &chans[0], &c2, 0).unwrap(), &y).unwrap();
        let num: f64 = zf.iter().zip(&mm).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = zf.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(num / den < 1e-6);
    }

    #[test]
    fn zf_rejects_exact_null() {
        let c = SystemConfig::new(4, 1, 4, 1);
        let ch = ChannelRealization {
            taps: vec![C64::new(1.0, 0.0)],
            freq_response: vec![C64::new(1.0, 0.0), ZERO, C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        };
        assert_eq!(
            build_equalizer(EqualizerKind::Zf, &ch, &c, 0).unwrap_err(),
            Error::SingularChannel { bin: 1 }
        );
    }

    #[test]
    fn equalize_matches_dense_multiply() {
        let mut c = cfg();
        c.noise_var = 0.05;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ch = ChannelRealization::random(&mut rng, 4, 16).unwrap();
        let eq = build_equalizer(EqualizerKind::Mmse, &ch, &c, 1).unwrap();
        let y: Vec<C64> = (0..16).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let fast = equalize(&eq, &y).unwrap();
        let dense = eq.matrix();
        for i in 0..8 {
            let mut acc = ZERO;
            for k in 0..16 {
                acc += dense[(i, k)] * y[k];
            }
            assert!((acc - fast[i]).norm() < 1e-12);
        }
        assert!(equalize(&eq, &y[..8]).is_err());
    }

    #[test]
    fn flat_identity_equalizer_extracts_comb() {
        // single user: E = F_P^H, applying to F_P x gives x
        let c = SystemConfig::new(4, 1, 4, 1);
        let eq = build_equalizer(EqualizerKind::Zf, &ChannelRealization::identity(4), &c, 0).unwrap();
        let x = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(2.0, 0.0)];
        let y = mat_vec(&dft_matrix(4), &x);
        let xh = equalize(&eq, &y).unwrap();
        for (a, b) in xh.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(16, 3, 16, 4).validate().is_err());
        assert!(SystemConfig::new(16, 2, 16, 17).validate().is_err());
        assert!(SystemConfig::new(16, 2, 8, 4).validate().is_err());
        assert!(SystemConfig::new(16, 2, 16, 4).validate().is_ok());
    }
}
