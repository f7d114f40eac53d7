//! The square `[0, π]²` with Dirichlet boundary conditions.
//!
//! Eigenfunctions `φ_{jk}(x, y) = (2/π) sin(jx) sin(ky)` with `λ² = j² + k²`, orthonormal
//! under the (unnormalized) Lebesgue measure. Integrals use the interior trapezoid rule
//! on `x_i = πi/G`, `i = 1..G−1`, which integrates a product of `p` sines of frequency
//! at most `K` per axis exactly when `G > pK/2`.

mod kernel;
mod model;

pub use kernel::{
    f_coeff_l2_table_domain, f_distance_surrogate_domain, g_l2_distance_exact_domain,
    gamma_lp_distance,
};
pub use model::{g_functional_domain, DirichletModel, DomainField};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::torus_field::isqrt;

/// Basis name written into reports.
pub const BASIS_NAME: &str = "dirichlet-square";

/// `#{(j, k) : j, k ≥ 1, j² + k² ≤ N²}`.
pub fn weyl_count(cutoff: u32) -> usize {
    let nn = (cutoff as i64).pow(2);
    (1..=cutoff as i64)
        .map(|j| {
            let rest = nn - j * j;
            if rest < 1 {
                0
            } else {
                isqrt(rest) as usize
            }
        })
        .sum()
}

/// Smallest grid integrating `p` sine factors of frequency `≤ K` per axis exactly.
pub fn quadrature_size(factors: usize, max_freq: u32) -> usize {
    factors * max_freq as usize / 2 + 1
}

/// Modes `(j, k)` with `λ ≤ N`, sorted by `λ²` and then lexicographically.
///
/// Modes with `λ ≤ N'` for `N' < N` form a prefix of length `weyl_count(N')`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBasis {
    cutoff: u32,
    modes: Vec<[i32; 2]>,
}

impl DomainBasis {
    pub fn new(cutoff: u32) -> Self {
        let nn = (cutoff as i64).pow(2);
        let mut modes = Vec::new();
        for j in 1..=cutoff as i32 {
            for k in 1..=cutoff as i32 {
                if (j as i64).pow(2) + (k as i64).pow(2) <= nn {
                    modes.push([j, k]);
                }
            }
        }
        modes.sort_by_key(|&[j, k]| ((j as i64).pow(2) + (k as i64).pow(2), j, k));
        Self { cutoff, modes }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[[i32; 2]] {
        &self.modes
    }

    /// `λ² = j² + k²` per mode.
    pub fn eigenvalues<T: Real>(&self) -> Vec<T> {
        self.modes
            .iter()
            .map(|&[j, k]| T::count((j * j + k * k) as usize))
            .collect()
    }

    pub fn index(&self, mode: [i32; 2]) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// `φ_{jk}(x, y)`.
    pub fn eval<T: Real>(mode: [i32; 2], x: [T; 2]) -> T {
        let two_over_pi = T::of(2.0) / T::PI();
        two_over_pi * (T::of(mode[0] as f64) * x[0]).sin() * (T::of(mode[1] as f64) * x[1]).sin()
    }

    /// Largest entry of `|Gram − I|` under the exact quadrature of size `N + 1`.
    pub fn gram_deviation(&self) -> f64 {
        let g = quadrature_size(2, self.cutoff).max(2);
        let s = sine_table::<f64>(g, self.cutoff);
        let w = std::f64::consts::PI / g as f64;
        let n = self.cutoff as usize;
        // One-dimensional Gram (2/π) Σ_i w sin(j x_i) sin(j' x_i).
        let one = s.t().dot(&s) * (2.0 / std::f64::consts::PI * w);
        let mut dev: f64 = 0.0;
        for (a, &[ja, ka]) in self.modes.iter().enumerate() {
            for (b, &[jb, kb]) in self.modes.iter().enumerate() {
                let (ja, ka, jb, kb) = (ja as usize - 1, ka as usize - 1, jb as usize - 1, kb as usize - 1);
                debug_assert!(ja < n && kb < n);
                let v = one[[ja, jb]] * one[[ka, kb]];
                let target = if a == b { 1.0 } else { 0.0 };
                dev = dev.max((v - target).abs());
            }
        }
        dev
    }
}

/// `sin(j x_i)` for `i = 1..G−1` (rows) and `j = 1..K` (columns).
pub(crate) fn sine_table<T: Real>(grid: usize, max_freq: u32) -> Array2<T> {
    let step = std::f64::consts::PI / grid as f64;
    Array2::from_shape_fn((grid - 1, max_freq as usize), |(i, j)| {
        T::of(((j + 1) as f64 * (i + 1) as f64 * step).sin())
    })
}

/// Dense `K × K` matrix of per-mode values, zero off the ball.
pub(crate) fn mode_matrix<T: Real>(
    cutoff: u32,
    modes: &[[i32; 2]],
    value: impl Fn(usize) -> T,
) -> Array2<T> {
    let n = cutoff as usize;
    let mut c = Array2::zeros((n, n));
    for (i, &[j, k]) in modes.iter().enumerate() {
        c[[j as usize - 1, k as usize - 1]] = value(i);
    }
    c
}

/// `σ_N(x) = Σ_{λ ≤ N} φ_n(x)² / (1 + λ²)` on the interior quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceField<T> {
    cutoff: u32,
    grid: usize,
    values: Array2<T>,
}

impl<T: Real> VarianceField<T> {
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// `G`; the nodes are `πi/G` for `i = 1..G−1`.
    pub fn grid_size(&self) -> usize {
        self.grid
    }

    /// Values at `(x_i, y_l)`, indexed `[i − 1, l − 1]`.
    pub fn values(&self) -> &Array2<T> {
        &self.values
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    /// Quadrature of `∫ σ_N^m`, exact when `G > mN`.
    pub fn moment(&self, m: usize) -> T {
        let w = T::PI() / T::count(self.grid);
        let terms: Vec<T> = self.values.iter().map(|&s| s.powi(m as i32)).collect();
        crate::scalar::pairwise_sum(&terms) * w * w
    }
}

/// `σ_N` on a grid of size `4N`.
pub fn sigma_field<T: Real>(cutoff: u32) -> Result<VarianceField<T>> {
    sigma_field_on_grid(cutoff, 4 * cutoff as usize)
}

/// `σ_N` on the interior nodes of a grid of size `G`.
pub fn sigma_field_on_grid<T: Real>(cutoff: u32, grid: usize) -> Result<VarianceField<T>> {
    if cutoff < 2 {
        return domain(format!("σ_N needs N ≥ 2, got {cutoff}"));
    }
    if grid < 2 {
        return domain("quadrature grid needs at least one interior node");
    }
    let basis = DomainBasis::new(cutoff);
    let lam = basis.eigenvalues::<T>();
    let scale = T::of(4.0) / (T::PI() * T::PI());
    let c = mode_matrix(cutoff, basis.modes(), |i| scale / (T::one() + lam[i]));
    let mut sq = sine_table::<T>(grid, cutoff);
    sq.mapv_inplace(|v| v * v);
    let values = sq.dot(&c).dot(&sq.t());
    Ok(VarianceField {
        cutoff,
        grid,
        values,
    })
}

/// `σ_N(x)` at one point.
pub fn sigma_at<T: Real>(cutoff: u32, x: [T; 2]) -> T {
    gamma_s_domain(T::of(2.0), cutoff, x, x)
}

/// Spectral band kernel `π_j(x, y) = Σ_{λ_n ∈ (j−1, j]} φ_n(x) φ_n(y)`.
pub fn spectral_band<T: Real>(j: u32, x: [T; 2], y: [T; 2]) -> T {
    if j == 0 {
        return T::zero();
    }
    let lo = (j as i64 - 1).pow(2);
    let hi = (j as i64).pow(2);
    let mut acc = T::zero();
    for a in 1..=j as i32 {
        for b in 1..=j as i32 {
            let q = (a as i64).pow(2) + (b as i64).pow(2);
            if q > lo && q <= hi {
                acc += DomainBasis::eval([a, b], x) * DomainBasis::eval([a, b], y);
            }
        }
    }
    acc
}

/// `max |π_j(x, y)| / (j + 1)` over `samples` uniform pairs of points.
pub fn spectral_band_ratio(j: u32, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = std::f64::consts::PI;
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let x = [rng.gen::<f64>() * pi, rng.gen::<f64>() * pi];
        let y = [rng.gen::<f64>() * pi, rng.gen::<f64>() * pi];
        best = best.max(spectral_band(j, x, y).abs());
    }
    best / (j as f64 + 1.0)
}

/// `γ_{s,N}(x, y) = Σ_{λ ≤ N} φ_n(x) φ_n(y) / (1 + λ²)^{s/2}`.
pub fn gamma_s_domain<T: Real>(s: T, cutoff: u32, x: [T; 2], y: [T; 2]) -> T {
    let basis = DomainBasis::new(cutoff);
    let half = s / T::of(2.0);
    let mut acc = T::zero();
    for (&mode, lam) in basis.modes().iter().zip(basis.eigenvalues::<T>()) {
        acc += DomainBasis::eval(mode, x) * DomainBasis::eval(mode, y) * (T::one() + lam).powf(-half);
    }
    acc
}
