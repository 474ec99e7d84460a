//! Complex linear-algebra helpers shared by the link model and the solver.

use std::cell::RefCell;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Unitary DFT matrix with entries `n^{-1/2} exp(-j 2 pi k l / n)`.
pub fn dft_matrix(n: usize) -> CMat {
    assert!(n >= 1, "dft size must be positive");
    let scale = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |k, l| {
        // reduce k*l mod n before scaling to keep the phase exact for large n
        let phase = -2.0 * PI * ((k * l) % n) as f64 / n as f64;
        C64::from_polar(scale, phase)
    })
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unitary forward DFT (`F_n v`).
pub fn fft_unitary(buf: &mut [C64]) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(buf);
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// In-place unitary inverse DFT (`F_n^H v`).
pub fn ifft_unitary(buf: &mut [C64]) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(buf);
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// Circularly-symmetric complex Gaussian sample with the given variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `a^H b`
pub fn dot_h(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

/// Largest absolute entry of `a a^H - I`.
pub fn unitarity_error(a: &CMat) -> f64 {
    let g = a * a.adjoint();
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn mat_vec(a: &CMat, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.ncols(), x.len());
    (0..a.nrows())
        .map(|i| (0..a.ncols()).fold(ZERO, |acc, j| acc + a[(i, j)] * x[j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_dft(x: &[C64]) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = ZERO;
                for (l, v) in x.iter().enumerate() {
                    let ang = -2.0 * PI * (k as f64) * (l as f64) / n as f64;
                    acc += v * C64::new(ang.cos(), ang.sin());
                }
                acc / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn dft_of_constant_is_dc() {
        let w = dft_matrix(2);
        let y = mat_vec(&w, &[ONE, ONE]);
        assert!((y[0] - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(y[1].norm() < 1e-15);
    }

    #[test]
    fn dft_is_unitary() {
        for n in [1, 2, 4, 7, 16] {
            assert!(unitarity_error(&dft_matrix(n)) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn dft_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<C64> = (0..8).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let fast = mat_vec(&dft_matrix(8), &x);
        let slow = naive_dft(&x);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10);
        }
        let mut buf = x.clone();
        fft_unitary(&mut buf);
        for (a, b) in buf.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10);
        }
        ifft_unitary(&mut buf);
        for (a, b) in buf.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
