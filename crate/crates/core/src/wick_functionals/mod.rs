//! Renormalized energy `G_N`, Wick nonlinearity `F_N`, and their exact `L²(μ)` norms.

mod appendix;
mod convolution;

pub use appendix::{appendix_decomposition_m3, AppendixTerms};
pub use convolution::{
    convolution_table, convolution_table_of_order, f_coeff_l2_exact, f_coeff_l2_table,
    f_distance_surrogate,
    g_l2_distance_exact, kernel_power_coeffs, ConvolutionTable, TableKind,
};

use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::scalar::{pairwise_map_sum, Real};
use crate::model::WickModel;
use crate::torus_field::{fast_grid_size, norm_sq, sample_gff, sigma_n, FourierGrid, SpectralField};
use crate::wickpoly::{scaled_generalized_laguerre, WickContext};

pub(crate) fn factorial_f64(k: usize) -> f64 {
    (2..=k).map(|j| j as f64).product()
}

/// Pointwise Wick power `(−1)^m m! L_m(r; σ)`.
#[inline]
pub(crate) fn wick_density<T: Real>(m: usize, r2: T, sigma: T, fact: T) -> T {
    let v = fact * scaled_generalized_laguerre(m, 0, &r2, &sigma);
    if m.is_multiple_of(2) {
        v
    } else {
        -v
    }
}

/// Pointwise nonlinearity factor `(−1)^{m+1}(m−1)! σ^{m−1} L^{(1)}_{m−1}(r/σ)`.
#[inline]
pub(crate) fn nonlinearity_factor<T: Real>(m: usize, r2: T, sigma: T, fact: T) -> T {
    let v = fact * scaled_generalized_laguerre(m - 1, 1, &r2, &sigma);
    if m % 2 == 1 {
        v
    } else {
        -v
    }
}

/// Coefficients in `r = |z|²` of `:|z|^{2m}:` at variance `σ`:
/// `d_k = (−1)^{m−k} (m!)² σ^{m−k} / ((k!)² (m−k)!)`.
pub(crate) fn wick_density_coeffs<T: Real>(m: usize, sigma: T) -> Vec<T> {
    (0..=m)
        .map(|k| {
            let c = factorial_f64(m).powi(2)
                / (factorial_f64(k).powi(2) * factorial_f64(m - k));
            let v = T::of(c) * sigma.powi((m - k) as i32);
            if (m - k).is_multiple_of(2) {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Coefficients of the nonlinearity factor, `(1/m) d/dr :|z|^{2m}:`.
pub(crate) fn nonlinearity_coeffs<T: Real>(m: usize, sigma: T) -> Vec<T> {
    let d = wick_density_coeffs(m, sigma);
    (1..=m)
        .map(|k| d[k] * T::count(k) / T::count(m))
        .collect()
}

#[inline]
pub(crate) fn horner<T: Real>(coeffs: &[T], r: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * r + c)
}

/// Grid size at which Wick integrands of order `m` on `|n| ≤ N` are integrated exactly.
pub fn exact_grid_size(m: usize, cutoff: u32) -> usize {
    2 * m * cutoff as usize + 1
}

/// Cached evaluator of `G_N` and `F_N` for one `(m, N)`.
#[derive(Debug, Clone)]
pub struct WickEvaluator<T: Real> {
    order: usize,
    cutoff: u32,
    sigma: T,
    grid: FourierGrid<T>,
    eigenvalues: Vec<T>,
}

impl<T: Real> WickEvaluator<T> {
    /// Evaluator with `σ = σ_N` on the smallest fast exact grid.
    pub fn new(m: usize, cutoff: u32) -> Result<Self> {
        let g = fast_grid_size(exact_grid_size(m, cutoff));
        Self::with_grid(m, cutoff, sigma_n(cutoff), g)
    }

    /// Evaluator with an explicit variance and grid size.
    pub fn with_grid(m: usize, cutoff: u32, sigma: T, grid_size: usize) -> Result<Self> {
        if m == 0 {
            return domain("Wick order must be at least 1");
        }
        if !(sigma > T::zero()) {
            return domain("variance must be strictly positive");
        }
        let required = exact_grid_size(m, cutoff);
        if grid_size < required {
            return Err(Error::Aliasing {
                grid: grid_size,
                required,
            });
        }
        let grid = FourierGrid::new(cutoff, grid_size)?;
        let eigenvalues = grid
            .lattice()
            .points()
            .iter()
            .map(|&p| T::of(norm_sq(p) as f64))
            .collect();
        Ok(Self {
            order: m,
            cutoff,
            sigma,
            grid,
            eigenvalues,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn grid_size(&self) -> usize {
        self.grid.size()
    }

    /// Grid values of `u_N` (transposed layout) from low-mode coefficients.
    pub fn synthesize(&self, low: &[Complex<T>]) -> Vec<Complex<T>> {
        self.grid.synthesize(low)
    }

    /// `G_N` from low-mode coefficients in lattice order.
    pub fn energy(&self, low: &[Complex<T>]) -> T {
        let coeffs = wick_density_coeffs(self.order, self.sigma);
        let u = self.grid.synthesize(low);
        pairwise_map_sum(&u, &|z: Complex<T>| horner(&coeffs, z.norm_sqr()))
            / (T::count(u.len()) * T::count(2 * self.order))
    }

    /// `G_N` for several orders from one synthesis; every order must satisfy
    /// `2·order·N < G`.
    pub fn energies(&self, low: &[Complex<T>], orders: &[usize]) -> Result<Vec<T>> {
        for &m in orders {
            let required = exact_grid_size(m, self.cutoff);
            if self.grid.size() < required || m == 0 {
                return Err(Error::Aliasing {
                    grid: self.grid.size(),
                    required,
                });
            }
        }
        let r: Vec<T> = self.grid.synthesize(low).iter().map(|z| z.norm_sqr()).collect();
        Ok(orders
            .iter()
            .map(|&m| {
                let coeffs = wick_density_coeffs(m, self.sigma);
                pairwise_map_sum(&r, &|x| horner(&coeffs, x)) / (T::count(r.len()) * T::count(2 * m))
            })
            .collect())
    }

    /// `F_N` coefficients on `|n| ≤ N` from low-mode coefficients.
    pub fn nonlinearity(&self, low: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.order;
        let coeffs = nonlinearity_coeffs(m, self.sigma);
        let mut u = self.grid.synthesize(low);
        for z in u.iter_mut() {
            *z *= horner(&coeffs, z.norm_sqr());
        }
        self.grid.analyze(&mut u)
    }

    /// `G_N` of a field with cutoff `≥ N`.
    pub fn energy_of(&self, field: &SpectralField<T>) -> Result<T> {
        let low = field.restrict(self.cutoff)?;
        Ok(self.energy(low.coeffs()))
    }
}

impl<T: Real> WickModel<T> for WickEvaluator<T> {
    fn order(&self) -> usize {
        self.order
    }

    fn len(&self) -> usize {
        self.grid.lattice().len()
    }

    fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    fn labels(&self) -> &[[i32; 2]] {
        self.grid.lattice().points()
    }

    fn index_of(&self, label: [i32; 2]) -> Option<usize> {
        self.grid.lattice().index(label)
    }

    fn energy(&self, low: &[Complex<T>]) -> T {
        WickEvaluator::energy(self, low)
    }

    fn nonlinearity(&self, low: &[Complex<T>]) -> Vec<Complex<T>> {
        WickEvaluator::nonlinearity(self, low)
    }

    fn sample(&self, seed: u64) -> Vec<Complex<T>> {
        sample_gff::<T>(seed, self.cutoff).into_coeffs()
    }

    fn variance_moment(&self, m: usize) -> T {
        self.sigma.powi(m as i32)
    }

    fn basis_name(&self) -> &'static str {
        "torus"
    }
}

fn check_context<T: Real>(ctx: &WickContext<T>, cutoff: u32) -> Result<()> {
    let s = sigma_n::<T>(cutoff);
    let v = *ctx.variance();
    if (v - s).abs() > T::of(1e-9) * s {
        return domain(format!(
            "context variance {v} differs from σ_N = {s} for N = {cutoff}"
        ));
    }
    Ok(())
}

/// `G_N(u) = (1/2m) ∫ :|P_N u|^{2m}: dx` on the smallest exact grid.
pub fn g_functional<T: Real>(
    field: &SpectralField<T>,
    cutoff: u32,
    ctx: &WickContext<T>,
) -> Result<T> {
    let g = fast_grid_size(exact_grid_size(ctx.order(), cutoff));
    g_functional_on_grid(field, cutoff, ctx, g)
}

/// [`g_functional`] on an explicit grid; grids below `2mN + 1` are rejected.
pub fn g_functional_on_grid<T: Real>(
    field: &SpectralField<T>,
    cutoff: u32,
    ctx: &WickContext<T>,
    grid_size: usize,
) -> Result<T> {
    field.check_cutoff(cutoff)?;
    check_context(ctx, cutoff)?;
    let ev = WickEvaluator::with_grid(ctx.order(), cutoff, *ctx.variance(), grid_size)?;
    ev.energy_of(field)
}

/// `F_N(u) = (−1)^{m+1}(m−1)! σ_N^{m−1} P_N[L^{(1)}_{m−1}(|u_N|²/σ_N) u_N]`, returned
/// with cutoff `N`.
pub fn f_functional<T: Real>(
    field: &SpectralField<T>,
    cutoff: u32,
    ctx: &WickContext<T>,
) -> Result<SpectralField<T>> {
    let g = fast_grid_size(exact_grid_size(ctx.order(), cutoff));
    f_functional_on_grid(field, cutoff, ctx, g)
}

/// [`f_functional`] on an explicit grid; grids below `2mN + 1` are rejected since the
/// projected coefficients would pick up aliased frequencies.
pub fn f_functional_on_grid<T: Real>(
    field: &SpectralField<T>,
    cutoff: u32,
    ctx: &WickContext<T>,
    grid_size: usize,
) -> Result<SpectralField<T>> {
    field.check_cutoff(cutoff)?;
    check_context(ctx, cutoff)?;
    let ev = WickEvaluator::with_grid(ctx.order(), cutoff, *ctx.variance(), grid_size)?;
    let low = field.restrict(cutoff)?;
    SpectralField::from_coeffs(cutoff, ev.nonlinearity(low.coeffs()))
}
