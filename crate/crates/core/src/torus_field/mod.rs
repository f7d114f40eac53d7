//! Truncated Gaussian free field on the torus `T² = (R/2πZ)²`.
//!
//! Integrals use the normalized Haar measure, so `e_n(x) = e^{in·x}` is orthonormal and
//! `⟨f, h⟩ = Σ f̂(n) conj(ĥ(n))`.

mod io;
mod lattice;
mod noise;
mod transform;

pub use io::{field_from_json, field_to_json, read_wgf1, write_wgf1};
pub use lattice::{norm_sq, Lattice};
pub use noise::{derive_seed, gaussian_at, NoiseVector};
pub use transform::{default_grid_size, fast_grid_size, FourierGrid, MAX_GRID};

pub(crate) use lattice::isqrt;
pub(crate) use noise::fill_gaussians;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Real};

/// Complex amplitudes `û(n)` on the ball `|n| ≤ cutoff`, stored in [`Lattice`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    cutoff: u32,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(cutoff: u32) -> Self {
        let len = Lattice::new(cutoff).len();
        Self {
            cutoff,
            coeffs: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    pub fn from_fn(cutoff: u32, mut f: impl FnMut([i32; 2]) -> Complex<T>) -> Self {
        let lattice = Lattice::new(cutoff);
        let coeffs = lattice.points().iter().map(|&n| f(n)).collect();
        Self { cutoff, coeffs }
    }

    /// Wraps a coefficient vector already in lattice order.
    pub fn from_coeffs(cutoff: u32, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let len = Lattice::new(cutoff).len();
        if coeffs.len() != len {
            return Err(Error::Range(format!(
                "expected {len} coefficients for cutoff {cutoff}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { cutoff, coeffs })
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.cutoff)
    }

    /// `û(n)`, zero outside the ball.
    pub fn get(&self, n: [i32; 2]) -> Complex<T> {
        match self.lattice().index(n) {
            Some(i) => self.coeffs[i],
            None => Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn set(&mut self, n: [i32; 2], value: Complex<T>) -> Result<()> {
        let i = self
            .lattice()
            .index(n)
            .ok_or_else(|| Error::Range(format!("{n:?} lies outside |n| ≤ {}", self.cutoff)))?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = ([i32; 2], Complex<T>)> + '_ {
        let lattice = self.lattice();
        let pts: Vec<[i32; 2]> = lattice.points().to_vec();
        pts.into_iter().zip(self.coeffs.iter().copied())
    }

    /// `Σ |û(n)|²`.
    pub fn mass(&self) -> T {
        let terms: Vec<T> = self.coeffs.iter().map(|c| c.norm_sqr()).collect();
        pairwise_sum(&terms)
    }

    /// `P_N`: zero outside `|n| ≤ N`, same cutoff.
    pub fn project(&self, n: u32) -> Result<Self> {
        self.check_cutoff(n)?;
        let nn = (n as i64) * (n as i64);
        let lattice = self.lattice();
        let coeffs = lattice
            .points()
            .iter()
            .zip(&self.coeffs)
            .map(|(&p, &c)| {
                if norm_sq(p) <= nn {
                    c
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Ok(Self {
            cutoff: self.cutoff,
            coeffs,
        })
    }

    /// The coefficients on `|n| ≤ N` as a field of cutoff `N`.
    pub fn restrict(&self, n: u32) -> Result<Self> {
        self.check_cutoff(n)?;
        if n == self.cutoff {
            return Ok(self.clone());
        }
        let src = self.lattice();
        let dst = Lattice::new(n);
        let coeffs = dst
            .points()
            .iter()
            .map(|&p| self.coeffs[src.index(p).expect("nested balls")])
            .collect();
        Ok(Self { cutoff: n, coeffs })
    }

    /// Zero-padding to a larger cutoff.
    pub fn extend(&self, n: u32) -> Result<Self> {
        if n < self.cutoff {
            return Err(Error::Range(format!(
                "cannot extend cutoff {} down to {n}",
                self.cutoff
            )));
        }
        let src = self.lattice();
        let coeffs = Lattice::new(n)
            .points()
            .iter()
            .map(|&p| match src.index(p) {
                Some(i) => self.coeffs[i],
                None => Complex::new(T::zero(), T::zero()),
            })
            .collect();
        Ok(Self { cutoff: n, coeffs })
    }

    pub(crate) fn check_cutoff(&self, n: u32) -> Result<()> {
        if n > self.cutoff {
            Err(Error::Range(format!(
                "cutoff {n} exceeds the field cutoff {}",
                self.cutoff
            )))
        } else {
            Ok(())
        }
    }

    /// `⟨self, other⟩ = Σ û(n) conj(v̂(n))` over the common ball.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let (small, large, swap) = if self.cutoff <= other.cutoff {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let big = large.lattice();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (p, c) in small.iter() {
            let d = large.coeffs[big.index(p).expect("nested balls")];
            acc += if swap { d * c.conj() } else { c * d.conj() };
        }
        acc
    }
}

/// `û(n) = g_n / √(1 + |n|²)` for `|n| ≤ cutoff`.
pub fn sample_gff<T: Real>(seed: u64, cutoff: u32) -> SpectralField<T> {
    let lattice = Lattice::new(cutoff);
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); lattice.len()];
    let pts = lattice.points();
    fill_gaussians(seed, &lattice, |i, g| {
        let s = 1.0 / (1.0 + norm_sq(pts[i]) as f64).sqrt();
        coeffs[i] = Complex::new(T::of(g.re * s), T::of(g.im * s));
    });
    SpectralField { cutoff, coeffs }
}

/// `P_N` as a free function.
pub fn project<T: Real>(field: &SpectralField<T>, n: u32) -> Result<SpectralField<T>> {
    field.project(n)
}

/// `σ_N = Σ_{|n| ≤ N} 1/(1 + |n|²)`.
pub fn sigma_n<T: Real>(cutoff: u32) -> T {
    let lattice = Lattice::new(cutoff);
    let terms: Vec<T> = lattice
        .points()
        .iter()
        .map(|&p| T::one() / (T::one() + T::of(norm_sq(p) as f64)))
        .collect();
    pairwise_sum(&terms)
}

/// Coefficients `(1 + |n|²)^{−s/2}` on `|n| ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceKernel<T> {
    exponent: T,
    cutoff: u32,
    coeffs: Vec<T>,
}

impl<T: Real> CovarianceKernel<T> {
    pub fn exponent(&self) -> T {
        self.exponent
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn as_field(&self) -> SpectralField<T> {
        SpectralField {
            cutoff: self.cutoff,
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| Complex::new(c, T::zero()))
                .collect(),
        }
    }
}

/// The truncated covariance kernel `γ_{s,N}`.
pub fn gamma_kernel<T: Real>(s: T, cutoff: u32) -> CovarianceKernel<T> {
    let lattice = Lattice::new(cutoff);
    let half = s / T::of(2.0);
    let coeffs = lattice
        .points()
        .iter()
        .map(|&p| (T::one() + T::of(norm_sq(p) as f64)).powf(-half))
        .collect();
    CovarianceKernel {
        exponent: s,
        cutoff,
        coeffs,
    }
}

/// `γ_{s,N}(x) = Σ (1 + |n|²)^{−s/2} e^{in·x}`.
pub fn gamma_eval<T: Real>(kernel: &CovarianceKernel<T>, x: [T; 2]) -> Complex<T> {
    let lattice = Lattice::new(kernel.cutoff);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (&p, &c) in lattice.points().iter().zip(&kernel.coeffs) {
        let phase = T::of(p[0] as f64) * x[0] + T::of(p[1] as f64) * x[1];
        acc += Complex::from_polar(c, phase);
    }
    acc
}

/// `W_f = Σ f̂(n) conj(g_n)`.
pub fn white_noise_functional<T: Real>(
    f: &SpectralField<T>,
    noise: &NoiseVector<T>,
) -> Result<Complex<T>> {
    if f.cutoff() > noise.cutoff() {
        return Err(Error::Range(format!(
            "test function cutoff {} exceeds the noise cutoff {}",
            f.cutoff(),
            noise.cutoff()
        )));
    }
    let lattice = Lattice::new(noise.cutoff());
    let g = noise.gaussians();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (p, c) in f.iter() {
        acc += c * g[lattice.index(p).expect("nested balls")].conj();
    }
    Ok(acc)
}

/// Coefficients of `η_N(x) = σ_N^{−1/2} Σ conj(e_n(x)) e_n / √(1 + |n|²)`.
pub fn eta_n<T: Real>(x: [T; 2], cutoff: u32) -> SpectralField<T> {
    let s = sigma_n::<T>(cutoff).sqrt();
    SpectralField::from_fn(cutoff, |p| {
        let phase = T::of(p[0] as f64) * x[0] + T::of(p[1] as f64) * x[1];
        let w = (T::one() + T::of(norm_sq(p) as f64)).sqrt() * s;
        Complex::from_polar(T::one() / w, -phase)
    })
}

/// Grid values `u(2πj1/G, 2πj2/G)`, row-major in `(j1, j2)`.
pub fn to_physical<T: Real>(field: &SpectralField<T>, grid_size: usize) -> Result<Vec<Complex<T>>> {
    let grid = FourierGrid::new(field.cutoff(), grid_size)?;
    let t = grid.synthesize(field.coeffs());
    Ok(transpose(&t, grid_size))
}

/// Inverse of [`to_physical`] for a band-limited field of cutoff `N`.
pub fn to_spectral<T: Real>(values: &[Complex<T>], cutoff: u32) -> Result<SpectralField<T>> {
    let g = isqrt(values.len() as i64) as usize;
    if g * g != values.len() {
        return Err(Error::Domain(format!(
            "{} grid values do not form a square grid",
            values.len()
        )));
    }
    let grid = FourierGrid::new(cutoff, g)?;
    let mut t = transpose(values, g);
    let coeffs = grid.analyze(&mut t);
    Ok(SpectralField { cutoff, coeffs })
}

fn transpose<T: Copy>(v: &[T], g: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len());
    for i in 0..g {
        for j in 0..g {
            out.push(v[j * g + i]);
        }
    }
    out
}
