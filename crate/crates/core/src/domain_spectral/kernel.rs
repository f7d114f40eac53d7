//! Double integrals over `[0, π]² × [0, π]²` of powers of kernels
//! `K(x, y) = Σ_n c_n φ_n(x) φ_n(y)`.

use ndarray::{s, Array2, Axis};
use rayon::prelude::*;

use super::{quadrature_size, sine_table, weyl_count, DomainBasis};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::wick_functionals::factorial_f64;

const BLOCK: usize = 512;
/// Cap on `pairs² · K` multiply-adds per kernel product.
const WORK_LIMIT: f64 = 5.0e11;

/// Kernels `K(x, y) = Σ_{jk} C[j, k] s_j(x₁) s_j(y₁) s_k(x₂) s_k(y₂)` written as
/// `E C Eᵀ` over node pairs `P = (x₁, y₁)`, `Q = (x₂, y₂)` with
/// `E[P, j] = s_j(x₁) s_j(y₁)`. Every integrand here is symmetric under
/// `x₁ ↔ y₁` and `x₂ ↔ y₂`, so only pairs `x₁ ≤ y₁` are kept, with doubled weights.
struct PairQuadrature<T> {
    cutoff: u32,
    /// `E`, pairs × K.
    e: Array2<T>,
    /// Quadrature weight of each pair.
    w: Vec<T>,
}

impl<T: Real> PairQuadrature<T> {
    fn new(cutoff: u32, grid: usize) -> Result<Self> {
        let g1 = grid - 1;
        let pairs = g1 * (g1 + 1) / 2;
        let work = (pairs as f64).powi(2) * cutoff.max(1) as f64;
        if work > WORK_LIMIT {
            return Err(Error::Resource(format!(
                "double quadrature on a grid of {grid} at cutoff {cutoff} needs {work:.1e} operations"
            )));
        }
        let sines = sine_table::<T>(grid, cutoff);
        let h = T::PI() / T::count(grid);
        let mut e = Array2::zeros((pairs, cutoff as usize));
        let mut w = Vec::with_capacity(pairs);
        let mut p = 0;
        for a in 0..g1 {
            for b in a..g1 {
                for j in 0..cutoff as usize {
                    e[[p, j]] = sines[[a, j]] * sines[[b, j]];
                }
                w.push(if a == b { h * h } else { T::of(2.0) * h * h });
                p += 1;
            }
        }
        Ok(Self { cutoff, e, w })
    }

    /// `C[j, k] = (2/π)² c_{jk}` on the modes of `DomainBasis(cutoff)`, zero elsewhere.
    fn coefficient_matrix(&self, coef: &[T]) -> Array2<T> {
        let basis = DomainBasis::new(self.cutoff);
        let scale = T::of(4.0) / (T::PI() * T::PI());
        let n = self.cutoff as usize;
        let mut c = Array2::zeros((n, n));
        for (&[j, k], &v) in basis.modes().iter().zip(coef) {
            c[[j as usize - 1, k as usize - 1]] = v * scale;
        }
        c
    }

    /// Folds `visit(first row, kernel row blocks)` over row blocks of the kernels with
    /// coefficient matrices `cs`, combining in block order.
    fn reduce<R: Send>(
        &self,
        cs: &[Array2<T>],
        visit: impl Fn(usize, &[Array2<T>]) -> R + Sync,
        combine: impl Fn(R, R) -> R,
        zero: impl Fn() -> R,
    ) -> R {
        let pairs = self.e.nrows();
        let ec: Vec<Array2<T>> = cs.iter().map(|c| self.e.dot(c)).collect();
        let starts: Vec<usize> = (0..pairs).step_by(BLOCK).collect();
        starts
            .into_par_iter()
            .map(|r0| {
                let r1 = (r0 + BLOCK).min(pairs);
                let blocks: Vec<Array2<T>> = ec
                    .iter()
                    .map(|b| b.slice(s![r0..r1, ..]).dot(&self.e.t()))
                    .collect();
                visit(r0, &blocks)
            })
            .collect::<Vec<R>>()
            .into_iter()
            .fold(zero(), combine)
    }

    /// `Σ_{P,Q} w_P w_Q f(K[P, Q])` for a row block starting at `r0`.
    fn weighted_sum(&self, r0: usize, block: &Array2<T>, f: impl Fn(T) -> T) -> T {
        let mut acc = T::zero();
        for (r, row) in block.axis_iter(Axis(0)).enumerate() {
            let inner: T = row.iter().zip(&self.w).map(|(&v, &wq)| f(v) * wq).sum();
            acc += inner * self.w[r0 + r];
        }
        acc
    }
}

fn kernel_coeffs<T: Real>(cutoff: u32, exponent: T) -> Vec<T> {
    DomainBasis::new(cutoff)
        .eigenvalues::<T>()
        .into_iter()
        .map(|l| (T::one() + l).powf(-exponent))
        .collect()
}

/// Exact `‖G_M − G_N‖_{L²(μ)} = (m!/2m) (∫∫ γ_M^{2m} − γ_N^{2m})^{1/2}` with
/// `γ_N = γ_{2,N}`.
pub fn g_l2_distance_exact_domain<T: Real>(m: usize, n: u32, big_m: u32) -> Result<T> {
    if m == 0 {
        return domain("Wick order must be at least 1");
    }
    if n > big_m {
        return domain(format!("need N ≤ M, got N = {n}, M = {big_m}"));
    }
    if n == big_m {
        return Ok(T::zero());
    }
    let q = PairQuadrature::<T>::new(big_m, quadrature_size(2 * m, big_m))?;
    let coef = kernel_coeffs::<T>(big_m, T::one());
    let low = weyl_count(n);
    let masked: Vec<T> = coef
        .iter()
        .enumerate()
        .map(|(i, &c)| if i < low { c } else { T::zero() })
        .collect();
    let p = 2 * m as i32;
    let cs = [q.coefficient_matrix(&coef), q.coefficient_matrix(&masked)];
    let sum = q.reduce(
        &cs,
        |r0, b| {
            let diff = &b[0].mapv(|v| v.powi(p)) - &b[1].mapv(|v| v.powi(p));
            q.weighted_sum(r0, &diff, |v| v)
        },
        |a, b| a + b,
        T::zero,
    );
    let f = T::of(factorial_f64(m) / (2 * m) as f64);
    Ok(f * sum.max(T::zero()).sqrt())
}

/// `J_{N,n} = m!(m−1)! ∫∫ γ_N^{2m−1} φ_n(x) φ_n(y)` for every mode `λ_n ≤ N`, on a grid
/// exact for cutoff `K ≥ N`.
fn j_table<T: Real>(m: usize, n: u32) -> Result<Vec<T>> {
    let q = PairQuadrature::<T>::new(n, quadrature_size(2 * m, n))?;
    let coef = kernel_coeffs::<T>(n, T::one());
    let p = (2 * m - 1) as i32;
    let k = n as usize;
    let we = {
        let mut we = q.e.clone();
        for (mut row, &w) in we.axis_iter_mut(Axis(0)).zip(&q.w) {
            row.mapv_inplace(|v| v * w);
        }
        we
    };
    // Σ_{P,Q} w_P w_Q K^{2m−1}[P, Q] E[P, j] E[Q, k] = (Eᵀ W K^{2m−1} W E)[j, k].
    let acc = q.reduce(
        &[q.coefficient_matrix(&coef)],
        |r0, b| {
            let r1 = r0 + b[0].nrows();
            let right = b[0].mapv(|v| v.powi(p)).dot(&we);
            we.slice(s![r0..r1, ..]).t().dot(&right)
        },
        |a, b| a + b,
        || Array2::zeros((k, k)),
    );
    let f = T::of(factorial_f64(m) * factorial_f64(m - 1)) * T::of(4.0) / (T::PI() * T::PI());
    Ok(DomainBasis::new(n)
        .modes()
        .iter()
        .map(|&[j, l]| acc[[j as usize - 1, l as usize - 1]] * f)
        .collect())
}

/// Exact `E|⟨F_N, φ_n⟩|²` for every mode `λ_n ≤ N`, in [`DomainBasis`] order.
pub fn f_coeff_l2_table_domain<T: Real>(m: usize, n: u32) -> Result<Vec<T>> {
    if m == 0 {
        return domain("Wick order must be at least 1");
    }
    j_table(m, n)
}

/// `Σ_n (1 + λ_n²)^{−ε} E|⟨F_M − F_N, φ_n⟩|²`
/// `= Σ_{λ ≤ M} (1+λ²)^{−ε} J_{M,n} − Σ_{λ ≤ N} (1+λ²)^{−ε} J_{N,n}`.
pub fn f_distance_surrogate_domain<T: Real>(m: usize, n: u32, big_m: u32, eps: T) -> Result<T> {
    if m == 0 {
        return domain("Wick order must be at least 1");
    }
    if n > big_m {
        return domain(format!("need N ≤ M, got N = {n}, M = {big_m}"));
    }
    let weights = kernel_coeffs::<T>(big_m, eps);
    let jm = j_table::<T>(m, big_m)?;
    let jn = j_table::<T>(m, n)?;
    let a: T = jm.iter().zip(&weights).map(|(&j, &w)| j * w).sum();
    let b: T = jn.iter().zip(&weights).map(|(&j, &w)| j * w).sum();
    Ok(a - b)
}

/// `‖γ_{s,M} − γ_{s,N}‖_{L^p(M²)}` for even integer `p` in the admissible range
/// `2 ≤ p < 2/(2 − s)` (`s < 2`) or `p ≥ 2` (`s ≥ 2`).
pub fn gamma_lp_distance<T: Real>(s: T, p: T, n: u32, big_m: u32) -> Result<T> {
    let two = T::of(2.0);
    if !(p >= two) || p.fract() != T::zero() || (p / two).fract() != T::zero() {
        return domain(format!("p = {p} must be an even integer ≥ 2"));
    }
    if s < two && !(p < two / (two - s)) {
        return domain(format!("p = {p} lies outside [2, 2/(2 − s)) for s = {s}"));
    }
    if n > big_m {
        return domain(format!("need N ≤ M, got N = {n}, M = {big_m}"));
    }
    if n == big_m {
        return Ok(T::zero());
    }
    let coef = kernel_coeffs::<T>(big_m, s / two);
    let lo = weyl_count(n);
    if p == two {
        // Orthonormality: ‖Σ c_n φ_n ⊗ φ_n‖² = Σ c_n².
        let sum: T = coef[lo..].iter().map(|&c| c * c).sum();
        return Ok(sum.sqrt());
    }
    let pi = p.to_usize().expect("small even integer");
    let q = PairQuadrature::<T>::new(big_m, quadrature_size(pi, big_m))?;
    let mut tail = coef;
    for c in tail[..lo].iter_mut() {
        *c = T::zero();
    }
    let sum = q.reduce(
        &[q.coefficient_matrix(&tail)],
        |r0, b| q.weighted_sum(r0, &b[0], |v| v.powi(pi as i32)),
        |a, b| a + b,
        T::zero,
    );
    Ok(sum.powf(T::one() / p))
}
