//! Counter-based complex Gaussians keyed by `(seed, lattice point)`.

use num_complex::Complex;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lattice::{shell_index, shell_point, Lattice};
use crate::scalar::Real;

/// Each lattice point owns four 32-bit words of the keystream.
const WORDS_PER_POINT: u128 = 4;

#[inline]
fn unit_open_closed(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard complex Gaussian (real and imaginary parts `N(0, 1/2)`) from two words.
#[inline]
fn box_muller(a: u64, b: u64) -> Complex<f64> {
    let r = (-unit_open_closed(a).ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * unit_open_closed(b)).sin_cos();
    Complex::new(r * c, r * s)
}

/// The Gaussian `g_n` attached to `(seed, n)`.
pub fn gaussian_at(seed: u64, n: [i32; 2]) -> Complex<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(WORDS_PER_POINT * shell_index(n) as u128);
    let a = rng.next_u64();
    let b = rng.next_u64();
    box_muller(a, b)
}

/// Calls `sink(index, g_n)` for every point of `lattice`.
pub(crate) fn fill_gaussians(seed: u64, lattice: &Lattice, mut sink: impl FnMut(usize, Complex<f64>)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = lattice.cutoff() as i32;
    let n2 = (n as i64) * (n as i64);
    for r in 0..=n {
        let count = if r == 0 { 1 } else { 8 * r };
        for p in 0..count {
            let a = rng.next_u64();
            let b = rng.next_u64();
            let pt = shell_point(r, p);
            let q = (pt[0] as i64).pow(2) + (pt[1] as i64).pow(2);
            if q <= n2 {
                let idx = lattice.index(pt).expect("point inside ball");
                sink(idx, box_muller(a, b));
            }
        }
    }
}

/// Seed of the `index`-th member of a batch drawn from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(0x5eed);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

/// Standard complex Gaussians `g_n` on the ball `|n| ≤ cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseVector<T> {
    seed: u64,
    cutoff: u32,
    gaussians: Vec<Complex<T>>,
}

impl<T: Real> NoiseVector<T> {
    pub fn generate(seed: u64, cutoff: u32) -> Self {
        let lattice = Lattice::new(cutoff);
        let mut gaussians = vec![Complex::new(T::zero(), T::zero()); lattice.len()];
        fill_gaussians(seed, &lattice, |i, g| {
            gaussians[i] = Complex::new(T::of(g.re), T::of(g.im));
        });
        Self {
            seed,
            cutoff,
            gaussians,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Gaussians in lattice order.
    pub fn gaussians(&self) -> &[Complex<T>] {
        &self.gaussians
    }

    pub fn get(&self, n: [i32; 2]) -> Option<Complex<T>> {
        Lattice::new(self.cutoff).index(n).map(|i| self.gaussians[i])
    }
}
