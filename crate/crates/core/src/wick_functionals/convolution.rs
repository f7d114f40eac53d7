//! Fourier coefficients of powers of the covariance kernel `γ_N`.

use num_complex::Complex;

use super::factorial_f64;
use crate::error::{domain, Error, Result};
use crate::scalar::{pairwise_sum, Real};
use crate::torus_field::{
    fast_grid_size, gamma_kernel, norm_sq, FourierGrid, Lattice, MAX_GRID,
};

fn checked_grid(min: usize) -> Result<usize> {
    let g = fast_grid_size(min);
    if g > MAX_GRID {
        return Err(Error::Resource(format!(
            "exact grid {g} exceeds the limit {MAX_GRID}"
        )));
    }
    Ok(g)
}

/// Grid values of `γ_{2,N}` (transposed layout) on a `size × size` grid.
fn gamma_on_grid<T: Real>(cutoff: u32, size: usize) -> Result<Vec<Complex<T>>> {
    let kernel = gamma_kernel::<T>(T::of(2.0), cutoff);
    let grid = FourierGrid::new(cutoff, size)?;
    Ok(grid.synthesize(kernel.as_field().coeffs()))
}

/// Coefficients of `γ_N^k` on `|n| ≤ out_cutoff`, exact for every requested frequency.
pub fn kernel_power_coeffs<T: Real>(cutoff: u32, k: usize, out_cutoff: u32) -> Result<Vec<T>> {
    let support = k * cutoff as usize;
    let g = checked_grid(
        (support + out_cutoff as usize + 1)
            .max(2 * out_cutoff as usize + 1)
            .max(2 * cutoff as usize + 1),
    )?;
    let mut vals = gamma_on_grid::<T>(cutoff, g)?;
    for z in vals.iter_mut() {
        *z = Complex::new(z.re.powi(k as i32), T::zero());
    }
    let out = FourierGrid::<T>::new(out_cutoff, g)?;
    Ok(out.analyze(&mut vals).into_iter().map(|c| c.re).collect())
}

/// Even tables hold the coefficients of `γ^{2m}`, odd ones those of `|γ|^{2m−2}γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Even,
    Odd,
}

/// The `k`-fold autocorrelation of the coefficient array `1/(1 + |n|²)` on `|n| ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionTable<T> {
    order: usize,
    cutoff: u32,
    lattice: Lattice,
    values: Vec<T>,
}

impl<T: Real> ConvolutionTable<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Half width `kN` of the support.
    pub fn support(&self) -> u32 {
        self.lattice.cutoff()
    }

    /// Value at `n`; zero outside the support.
    pub fn value(&self, n: [i32; 2]) -> T {
        self.lattice
            .index(n)
            .map(|i| self.values[i])
            .unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ([i32; 2], T)> + '_ {
        self.lattice
            .points()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }
}

/// Table of order `2m` (even) or `2m − 1` (odd) over its full support.
pub fn convolution_table<T: Real>(m: usize, cutoff: u32, kind: TableKind) -> Result<ConvolutionTable<T>> {
    if m == 0 {
        return domain("Wick order must be at least 1");
    }
    let k = match kind {
        TableKind::Even => 2 * m,
        TableKind::Odd => 2 * m - 1,
    };
    convolution_table_of_order(k, cutoff)
}

/// Table of arbitrary order `k ≥ 1`.
pub fn convolution_table_of_order<T: Real>(k: usize, cutoff: u32) -> Result<ConvolutionTable<T>> {
    if k == 0 {
        return domain("table order must be at least 1");
    }
    let support = (k * cutoff as usize) as u32;
    let values = kernel_power_coeffs::<T>(cutoff, k, support)?;
    Ok(ConvolutionTable {
        order: k,
        cutoff,
        lattice: Lattice::new(support),
        values,
    })
}

/// `‖G_M − G_N‖_{L²(μ)} = (m!/2m) (∫ γ_M^{2m} − γ_N^{2m})^{1/2}`.
pub fn g_l2_distance_exact<T: Real>(m: usize, n: u32, big_m: u32) -> Result<T> {
    if m < 1 {
        return domain("Wick order must be at least 1");
    }
    if big_m < n {
        return domain(format!("need M ≥ N, got N = {n}, M = {big_m}"));
    }
    if big_m == n {
        return Ok(T::zero());
    }
    let g = checked_grid(2 * m * big_m as usize + 1)?;
    let gm = gamma_on_grid::<T>(big_m, g)?;
    let gn = gamma_on_grid::<T>(n, g)?;
    let diffs: Vec<T> = gm
        .iter()
        .zip(&gn)
        .map(|(a, b)| a.re.powi(2 * m as i32) - b.re.powi(2 * m as i32))
        .collect();
    let c = pairwise_sum(&diffs) / T::count(diffs.len());
    let scale = T::of(factorial_f64(m) / (2 * m) as f64);
    Ok(scale * c.max(T::zero()).sqrt())
}

fn coefficient_constant<T: Real>(m: usize) -> T {
    T::of(factorial_f64(m) * factorial_f64(m - 1))
}

/// `E|⟨F_N(u), e_n⟩|² = m!(m−1)! F[|γ_N|^{2m−2}γ_N](n)`; zero for `|n| > N`.
pub fn f_coeff_l2_exact<T: Real>(m: usize, cutoff: u32, n: [i32; 2]) -> Result<T> {
    if m < 1 {
        return domain("Wick order must be at least 1");
    }
    if norm_sq(n) > (cutoff as i64) * (cutoff as i64) {
        return Ok(T::zero());
    }
    let table = f_coeff_l2_table::<T>(m, cutoff)?;
    let lattice = Lattice::new(cutoff);
    Ok(table[lattice.index(n).expect("inside ball")])
}

/// [`f_coeff_l2_exact`] for every `|n| ≤ N`, in lattice order.
pub fn f_coeff_l2_table<T: Real>(m: usize, cutoff: u32) -> Result<Vec<T>> {
    if m < 1 {
        return domain("Wick order must be at least 1");
    }
    let c = coefficient_constant::<T>(m);
    Ok(kernel_power_coeffs::<T>(cutoff, 2 * m - 1, cutoff)?
        .into_iter()
        .map(|v| c * v)
        .collect())
}

/// `E‖F_M − F_N‖²_{H^s} = Σ_n (1 + |n|²)^s E|⟨F_M − F_N, e_n⟩|²`.
pub fn f_distance_surrogate<T: Real>(m: usize, n: u32, big_m: u32, s: T) -> Result<T> {
    if big_m < n {
        return domain(format!("need M ≥ N, got N = {n}, M = {big_m}"));
    }
    let tm = f_coeff_l2_table::<T>(m, big_m)?;
    let tn = f_coeff_l2_table::<T>(m, n)?;
    let lm = Lattice::new(big_m);
    let ln = Lattice::new(n);
    let terms: Vec<T> = lm
        .points()
        .iter()
        .zip(&tm)
        .map(|(&p, &vm)| {
            let w = (T::one() + T::of(norm_sq(p) as f64)).powf(s);
            let vn = ln.index(p).map(|i| tn[i]).unwrap_or_else(T::zero);
            w * (vm - vn)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

