//! Common interface of the truncated Wick models on the torus and on the Dirichlet
//! square, consumed by the samplers and the flow.

use num_complex::Complex;

use crate::scalar::Real;

/// A finite set of low modes with eigenvalues `λ_n²`, the renormalized energy `G_N`
/// and the nonlinearity `F_N` acting on coefficient vectors in a fixed mode order.
pub trait WickModel<T: Real>: Send + Sync {
    /// Wick order `m`.
    fn order(&self) -> usize;

    /// Number of low modes.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `λ_n²` per mode.
    fn eigenvalues(&self) -> &[T];

    /// Integer label of each mode (`n` on the torus, `(j, k)` on the square).
    fn labels(&self) -> &[[i32; 2]];

    fn index_of(&self, label: [i32; 2]) -> Option<usize> {
        self.labels().iter().position(|&l| l == label)
    }

    /// `G_N`.
    fn energy(&self, low: &[Complex<T>]) -> T;

    /// `F_N` in the same mode order.
    fn nonlinearity(&self, low: &[Complex<T>]) -> Vec<Complex<T>>;

    /// A draw of the low modes from the Gaussian free field, keyed by `seed`.
    fn sample(&self, seed: u64) -> Vec<Complex<T>>;

    /// `∫ σ_N(x)^m dx` in the model's measure.
    fn variance_moment(&self, m: usize) -> T;

    /// Short name used in reports.
    fn basis_name(&self) -> &'static str;
}

/// `Σ |c_n|²`.
pub fn mass<T: Real>(low: &[Complex<T>]) -> T {
    let v: Vec<T> = low.iter().map(|c| c.norm_sqr()).collect();
    crate::scalar::pairwise_sum(&v)
}

/// `½ Σ λ_n² |c_n|²`.
pub fn kinetic<T: Real, M: WickModel<T> + ?Sized>(model: &M, low: &[Complex<T>]) -> T {
    let v: Vec<T> = low
        .iter()
        .zip(model.eigenvalues())
        .map(|(c, &l)| l * c.norm_sqr())
        .collect();
    crate::scalar::pairwise_sum(&v) / T::of(2.0)
}

/// `½ Σ λ_n² |c_n|² + G_N`.
pub fn hamiltonian<T: Real, M: WickModel<T> + ?Sized>(model: &M, low: &[Complex<T>]) -> T {
    kinetic(model, low) + model.energy(low)
}
