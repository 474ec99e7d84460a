//! Gray-coded square QAM.

use crate::error::{Error, Result};
use crate::linalg::C64;

/// A square Q-ary QAM alphabet scaled to a target average power.
///
/// Symbol index `s` carries `log2(Q)` bits, most significant first; the upper
/// half of the bits select the in-phase level and the lower half the
/// quadrature level, each through a binary-reflected Gray code.
#[derive(Debug, Clone)]
pub struct Constellation {
    order: usize,
    side: usize,
    bits_per_axis: usize,
    scale: f64,
    points: Vec<C64>,
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

impl Constellation {
    pub fn new(order: usize, symbol_var: f64) -> Result<Self> {
        let side = (order as f64).sqrt().round() as usize;
        if order < 4 || side * side != order || !side.is_power_of_two() {
            return Err(Error::config(
                "qam_order",
                format!("{order} is not a square power-of-two QAM order >= 4"),
            ));
        }
        if !(symbol_var > 0.0) {
            return Err(Error::config("symbol_var", "must be positive"));
        }
        let bits_per_axis = side.trailing_zeros() as usize;
        let raw_power = 2.0 * ((side * side) as f64 - 1.0) / 3.0;
        let scale = (symbol_var / raw_power).sqrt();
        let level = |code: usize| {
            let idx = gray_decode(code);
            ((side as f64 - 1.0) - 2.0 * idx as f64) * scale
        };
        let points = (0..order)
            .map(|s| {
                let i_code = s >> bits_per_axis;
                let q_code = s & (side - 1);
                C64::new(level(i_code), level(q_code))
            })
            .collect();
        Ok(Self {
            order,
            side,
            bits_per_axis,
            scale,
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> C64 {
        self.points[index]
    }

    fn axis_index(&self, v: f64) -> usize {
        let idx = (((self.side as f64 - 1.0) - v / self.scale) / 2.0).round();
        idx.clamp(0.0, (self.side - 1) as f64) as usize
    }

    /// Index of the nearest constellation point (the hard decision).
    pub fn decide(&self, x: C64) -> usize {
        let i = self.axis_index(x.re);
        let q = self.axis_index(x.im);
        // level index -> gray code
        ((i ^ (i >> 1)) << self.bits_per_axis) | (q ^ (q >> 1))
    }

    /// Nearest point and next-nearest point indices by brute force.
    pub fn two_nearest(&self, x: C64) -> (usize, usize) {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut second = (usize::MAX, f64::INFINITY);
        for (k, p) in self.points.iter().enumerate() {
            let d = (x - p).norm_sqr();
            if d < best.1 {
                second = best;
                best = (k, d);
            } else if d < second.1 {
                second = (k, d);
            }
        }
        (best.0, second.0)
    }

    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<C64>> {
        let b = self.bits_per_symbol();
        if !bits.len().is_multiple_of(b) {
            return Err(Error::BitLength {
                bits: bits.len(),
                bits_per_symbol: b,
            });
        }
        Ok(bits
            .chunks(b)
            .map(|chunk| {
                let s = chunk.iter().fold(0usize, |acc, &bit| (acc << 1) | (bit & 1) as usize);
                self.points[s]
            })
            .collect())
    }

    pub fn symbol_bits(&self, index: usize, out: &mut Vec<u8>) {
        let b = self.bits_per_symbol();
        for k in (0..b).rev() {
            out.push(((index >> k) & 1) as u8);
        }
    }

    /// Hard decisions: the nearest constellation points and their bits.
    pub fn demodulate_hard(&self, symbols: &[C64]) -> (Vec<C64>, Vec<u8>) {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        let decided = symbols
            .iter()
            .map(|&x| {
                let s = self.decide(x);
                self.symbol_bits(s, &mut bits);
                self.points[s]
            })
            .collect();
        (decided, bits)
    }
}

/// Number of differing bits between two symbol indices.
pub fn bit_distance(a: usize, b: usize) -> u32 {
    (a ^ b).count_ones()
}
