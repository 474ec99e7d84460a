//! Sparsifying transforms for spread interference: time-domain windowing and
//! the orthonormal Haar wavelet basis.

use crate::error::{Error, Result};
use crate::linalg::{dft_matrix, fft_unitary, ifft_unitary, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SparsifierKind {
    None,
    Window,
    Haar,
}

impl SparsifierKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Window => "window",
            Self::Haar => "haar",
        }
    }
}

impl std::str::FromStr for SparsifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "spread" => Ok(Self::None),
            "window" | "hamming" => Ok(Self::Window),
            "haar" => Ok(Self::Haar),
            other => Err(Error::config("sparsifier", format!("unknown kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Rectangular,
    Hamming,
}

pub fn window_samples(n: usize, kind: WindowKind) -> Vec<f64> {
    match kind {
        WindowKind::Rectangular => vec![1.0; n],
        WindowKind::Hamming if n == 1 => vec![1.0],
        WindowKind::Hamming => (0..n)
            .map(|i| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
            .collect(),
    }
}

/// Orthonormal Haar basis, dyadic ordering: row 0 is the scaling function,
/// rows `2^j .. 2^{j+1}` are the level-`j` wavelets with support `N / 2^j`.
pub fn haar_matrix(n: usize) -> Result<nalgebra::DMatrix<f64>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::config("N", format!("{n} is not a power of two")));
    }
    let mut h = nalgebra::DMatrix::<f64>::zeros(n, n);
    let s0 = 1.0 / (n as f64).sqrt();
    for c in 0..n {
        h[(0, c)] = s0;
    }
    let mut row = 1;
    let mut blocks = 1;
    while blocks < n {
        let len = n / blocks;
        let s = 1.0 / (len as f64).sqrt();
        for k in 0..blocks {
            for c in 0..len / 2 {
                h[(row, k * len + c)] = s;
                h[(row, k * len + len / 2 + c)] = -s;
            }
            row += 1;
        }
        blocks *= 2;
    }
    Ok(h)
}

/// In-place `H v` with the same row ordering as [`haar_matrix`].
pub fn haar_forward(v: &mut [C64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut tmp = v.to_vec();
    let mut len = n;
    while len > 1 {
        let half = len / 2;
        for k in 0..half {
            let a = v[2 * k];
            let b = v[2 * k + 1];
            tmp[k] = (a + b) * r;
            tmp[half + k] = (a - b) * r;
        }
        v[..len].copy_from_slice(&tmp[..len]);
        len = half;
    }
}

/// In-place `H^T v`, the inverse of [`haar_forward`].
pub fn haar_inverse(v: &mut [C64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut tmp = v.to_vec();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for k in 0..half {
            let s = v[k];
            let d = v[half + k];
            tmp[2 * k] = (s + d) * r;
            tmp[2 * k + 1] = (s - d) * r;
        }
        v[..len].copy_from_slice(&tmp[..len]);
        len *= 2;
    }
}

/// A sparsifying operator `H` acting on N-length frequency-domain vectors.
///
/// The window operator is `F_N diag(w) F_N^H`; the Haar operator is the real
/// orthonormal basis above.
#[derive(Debug, Clone)]
pub struct Sparsifier {
    kind: SparsifierKind,
    n: usize,
    window: Vec<f64>,
}

impl Sparsifier {
    pub fn none(n: usize) -> Self {
        Self {
            kind: SparsifierKind::None,
            n,
            window: Vec::new(),
        }
    }

    pub fn haar(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::config("N", format!("{n} is not a power of two")));
        }
        Ok(Self {
            kind: SparsifierKind::Haar,
            n,
            window: Vec::new(),
        })
    }

    pub fn window(n: usize, kind: WindowKind) -> Result<Self> {
        Self::from_window(window_samples(n, kind))
    }

    pub fn from_window(window: Vec<f64>) -> Result<Self> {
        if let Some(index) = window.iter().position(|w| *w == 0.0) {
            return Err(Error::SingularWindow { index });
        }
        Ok(Self {
            kind: SparsifierKind::Window,
            n: window.len(),
            window,
        })
    }

    /// Build the default operator for a kind: Hamming for the window.
    pub fn of_kind(kind: SparsifierKind, n: usize) -> Result<Self> {
        match kind {
            SparsifierKind::None => Ok(Self::none(n)),
            SparsifierKind::Haar => Self::haar(n),
            SparsifierKind::Window => Self::window(n, WindowKind::Hamming),
        }
    }

    pub fn kind(&self) -> SparsifierKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn scale_time(&self, v: &mut [C64], inverse: bool) {
        ifft_unitary(v);
        for (x, w) in v.iter_mut().zip(&self.window) {
            if inverse {
                *x /= *w;
            } else {
                *x *= *w;
            }
        }
        fft_unitary(v);
    }

    /// `H v`
    pub fn forward(&self, v: &mut [C64]) {
        assert_eq!(v.len(), self.n);
        match self.kind {
            SparsifierKind::None => {}
            SparsifierKind::Haar => haar_forward(v),
            SparsifierKind::Window => self.scale_time(v, false),
        }
    }

    /// `H^{-1} v`
    pub fn inverse(&self, v: &mut [C64]) {
        assert_eq!(v.len(), self.n);
        match self.kind {
            SparsifierKind::None => {}
            SparsifierKind::Haar => haar_inverse(v),
            SparsifierKind::Window => self.scale_time(v, true),
        }
    }

    /// Right-multiply every row of `psi` by `H^{-1}`: the sensing matrix for
    /// the sparsified unknown `H I'`.
    pub fn compose_inverse(&self, psi: &CMat) -> CMat {
        assert_eq!(psi.ncols(), self.n);
        if self.kind == SparsifierKind::None {
            return psi.clone();
        }
        let mut out = CMat::zeros(psi.nrows(), self.n);
        let mut row = vec![C64::new(0.0, 0.0); self.n];
        for r in 0..psi.nrows() {
            // (r H^{-1})^T = H^{-T} r^T
            for c in 0..self.n {
                row[c] = psi[(r, c)];
            }
            match self.kind {
                SparsifierKind::Haar => haar_forward(&mut row),
                SparsifierKind::Window => {
                    // H^{-1} = F D^{-1} F^H and F is symmetric, so
                    // H^{-T} = F^H D^{-1} F
                    fft_unitary(&mut row);
                    for (x, w) in row.iter_mut().zip(&self.window) {
                        *x /= *w;
                    }
                    ifft_unitary(&mut row);
                }
                SparsifierKind::None => unreachable!(),
            }
            for c in 0..self.n {
                out[(r, c)] = row[c];
            }
        }
        out
    }

    /// Dense operator matrix.
    pub fn operator(&self) -> CMat {
        match self.kind {
            SparsifierKind::None => CMat::identity(self.n, self.n),
            SparsifierKind::Haar => haar_matrix(self.n)
                .expect("validated at construction")
                .map(|x| C64::new(x, 0.0)),
            SparsifierKind::Window => {
                let f = dft_matrix(self.n);
                let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                    self.n,
                    self.window.iter().map(|w| C64::new(*w, 0.0)),
                ));
                &f * d * f.adjoint()
            }
        }
    }

    /// Dense inverse operator.
    pub fn inverse_operator(&self) -> CMat {
        match self.kind {
            SparsifierKind::None => CMat::identity(self.n, self.n),
            SparsifierKind::Haar => self.operator().adjoint(),
            SparsifierKind::Window => {
                let f = dft_matrix(self.n);
                let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                    self.n,
                    self.window.iter().map(|w| C64::new(1.0 / *w, 0.0)),
                ));
                &f * d * f.adjoint()
            }
        }
    }
}
