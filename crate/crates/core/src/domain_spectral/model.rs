use ndarray::Array2;
use num_complex::Complex;

use super::{mode_matrix, quadrature_size, sigma_field_on_grid, sine_table, DomainBasis, BASIS_NAME};
use crate::error::{domain, Error, Result};
use crate::model::WickModel;
use crate::scalar::{pairwise_sum, Real};
use crate::torus_field::{fill_gaussians, Lattice};
use crate::wick_functionals::{factorial_f64, nonlinearity_factor, wick_density};

/// Coefficients on the Dirichlet modes `λ ≤ N`, in [`DomainBasis`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainField<T> {
    cutoff: u32,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> DomainField<T> {
    pub fn zeros(cutoff: u32) -> Self {
        Self {
            cutoff,
            coeffs: vec![Complex::new(T::zero(), T::zero()); super::weyl_count(cutoff)],
        }
    }

    pub fn from_coeffs(cutoff: u32, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let len = super::weyl_count(cutoff);
        if coeffs.len() != len {
            return Err(Error::Range(format!(
                "expected {len} coefficients for cutoff {cutoff}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { cutoff, coeffs })
    }

    /// Free-field draw `Σ g_n φ_n / √(1 + λ²)`.
    ///
    /// `g_{(j,k)}` is the torus Gaussian at lattice point `(j, k)`, so draws at
    /// different cutoffs with one seed are nested.
    pub fn sample(seed: u64, cutoff: u32) -> Self {
        let basis = DomainBasis::new(cutoff);
        let lattice = Lattice::new(cutoff);
        let pts = lattice.points();
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); basis.len()];
        let nn = (cutoff as i64).pow(2);
        fill_gaussians(seed, &lattice, |i, g| {
            let [j, k] = pts[i];
            let q = (j as i64).pow(2) + (k as i64).pow(2);
            if j >= 1 && k >= 1 && q <= nn {
                let idx = basis.index([j, k]).expect("mode in basis");
                let s = 1.0 / (1.0 + q as f64).sqrt();
                coeffs[idx] = Complex::new(T::of(g.re * s), T::of(g.im * s));
            }
        });
        Self { cutoff, coeffs }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn get(&self, mode: [i32; 2]) -> Complex<T> {
        DomainBasis::new(self.cutoff)
            .index(mode)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex::new(T::zero(), T::zero()))
    }

    /// Modes `λ ≤ N` as a field of cutoff `N`.
    pub fn restrict(&self, n: u32) -> Result<Self> {
        if n > self.cutoff {
            return Err(Error::Range(format!(
                "cutoff {n} exceeds the field cutoff {}",
                self.cutoff
            )));
        }
        Ok(Self {
            cutoff: n,
            coeffs: self.coeffs[..super::weyl_count(n)].to_vec(),
        })
    }

    /// `u(x)` at one point.
    pub fn eval(&self, x: [T; 2]) -> Complex<T> {
        let basis = DomainBasis::new(self.cutoff);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&mode, &c) in basis.modes().iter().zip(&self.coeffs) {
            acc += c * DomainBasis::eval(mode, x);
        }
        acc
    }
}

/// `G_N` and `F_N` on the Dirichlet square with the variance field `σ_N(x)`.
#[derive(Debug, Clone)]
pub struct DirichletModel<T> {
    order: usize,
    cutoff: u32,
    grid: usize,
    basis: DomainBasis,
    eigenvalues: Vec<T>,
    sines: Array2<T>,
    sigma: Array2<T>,
}

impl<T: Real> DirichletModel<T> {
    /// Model on the smallest exact grid `G = mN + 1`.
    pub fn new(m: usize, cutoff: u32) -> Result<Self> {
        Self::with_grid(m, cutoff, quadrature_size(2 * m, cutoff))
    }

    pub fn with_grid(m: usize, cutoff: u32, grid: usize) -> Result<Self> {
        if m == 0 {
            return domain("Wick order must be at least 1");
        }
        if cutoff < 2 {
            return domain(format!("the Dirichlet model needs N ≥ 2, got {cutoff}"));
        }
        let required = quadrature_size(2 * m, cutoff);
        if grid < required {
            return Err(Error::Aliasing { grid, required });
        }
        let basis = DomainBasis::new(cutoff);
        let sigma = sigma_field_on_grid::<T>(cutoff, grid)?.values().clone();
        Ok(Self {
            order: m,
            cutoff,
            grid,
            eigenvalues: basis.eigenvalues(),
            basis,
            sines: sine_table(grid, cutoff),
            sigma,
        })
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn grid_size(&self) -> usize {
        self.grid
    }

    pub fn basis(&self) -> &DomainBasis {
        &self.basis
    }

    /// `σ_N` on the interior nodes.
    pub fn variance(&self) -> &Array2<T> {
        &self.sigma
    }

    fn weight(&self) -> T {
        T::PI() / T::count(self.grid)
    }

    /// Values of `u_N` at the interior nodes, indexed `[i − 1, l − 1]`.
    pub fn synthesize(&self, low: &[Complex<T>]) -> Array2<Complex<T>> {
        let scale = T::of(2.0) / T::PI();
        let modes = self.basis.modes();
        let re = mode_matrix(self.cutoff, modes, |i| low[i].re * scale);
        let im = mode_matrix(self.cutoff, modes, |i| low[i].im * scale);
        let s = &self.sines;
        let ur = s.dot(&re).dot(&s.t());
        let ui = s.dot(&im).dot(&s.t());
        ndarray::Zip::from(&ur)
            .and(&ui)
            .map_collect(|&a, &b| Complex::new(a, b))
    }

    /// `⟨f, φ_n⟩` for grid values `f`, exact when `f φ_n` has at most `2mN` sine
    /// factors per axis.
    fn analyze(&self, values: &Array2<Complex<T>>) -> Vec<Complex<T>> {
        let w = self.weight();
        let scale = T::of(2.0) / T::PI() * w * w;
        let s = &self.sines;
        let re = s.t().dot(&values.mapv(|z| z.re)).dot(s);
        let im = s.t().dot(&values.mapv(|z| z.im)).dot(s);
        self.basis
            .modes()
            .iter()
            .map(|&[j, k]| {
                let (a, b) = (j as usize - 1, k as usize - 1);
                Complex::new(re[[a, b]] * scale, im[[a, b]] * scale)
            })
            .collect()
    }

    fn energy_for_order(&self, u: &Array2<Complex<T>>, m: usize) -> T {
        let fact = T::of(factorial_f64(m));
        let w = self.weight();
        let dens: Vec<T> = ndarray::Zip::from(u)
            .and(&self.sigma)
            .map_collect(|z, &s| wick_density(m, z.norm_sqr(), s, fact))
            .into_iter()
            .collect();
        pairwise_sum(&dens) * w * w / T::count(2 * m)
    }

    /// `G_N` for several orders from one synthesis.
    pub fn energies(&self, low: &[Complex<T>], orders: &[usize]) -> Result<Vec<T>> {
        for &m in orders {
            let required = quadrature_size(2 * m, self.cutoff);
            if m == 0 || self.grid < required {
                return Err(Error::Aliasing {
                    grid: self.grid,
                    required,
                });
            }
        }
        let u = self.synthesize(low);
        Ok(orders.iter().map(|&m| self.energy_for_order(&u, m)).collect())
    }

    pub fn energy_of(&self, field: &DomainField<T>) -> Result<T> {
        let low = field.restrict(self.cutoff)?;
        Ok(WickModel::energy(self, low.coeffs()))
    }
}

impl<T: Real> WickModel<T> for DirichletModel<T> {
    fn order(&self) -> usize {
        self.order
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    fn labels(&self) -> &[[i32; 2]] {
        self.basis.modes()
    }

    fn energy(&self, low: &[Complex<T>]) -> T {
        let u = self.synthesize(low);
        self.energy_for_order(&u, self.order)
    }

    fn nonlinearity(&self, low: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.order;
        let fact = T::of(factorial_f64(m - 1));
        let mut u = self.synthesize(low);
        ndarray::Zip::from(&mut u)
            .and(&self.sigma)
            .for_each(|z, &s| *z *= nonlinearity_factor(m, z.norm_sqr(), s, fact));
        self.analyze(&u)
    }

    fn sample(&self, seed: u64) -> Vec<Complex<T>> {
        DomainField::<T>::sample(seed, self.cutoff).into_coeffs()
    }

    fn variance_moment(&self, m: usize) -> T {
        let w = self.weight();
        let terms: Vec<T> = self.sigma.iter().map(|&s| s.powi(m as i32)).collect();
        pairwise_sum(&terms) * w * w
    }

    fn basis_name(&self) -> &'static str {
        BASIS_NAME
    }
}

/// `G_N(u) = (1/2m) ∫ (−1)^m m! L_m(|u_N(x)|²; σ_N(x)) dx`.
pub fn g_functional_domain<T: Real>(field: &DomainField<T>, cutoff: u32, m: usize) -> Result<T> {
    DirichletModel::<T>::new(m, cutoff)?.energy_of(field)
}
