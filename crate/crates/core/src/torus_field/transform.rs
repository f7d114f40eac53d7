//! Discrete synthesis/analysis between ball-truncated coefficients and a uniform grid.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest grid side accepted by the transforms.
pub const MAX_GRID: usize = 8192;

/// Smallest power of two `≥ 2N + 2`.
pub fn default_grid_size(cutoff: u32) -> usize {
    (2 * cutoff as usize + 2).next_power_of_two()
}

/// Smallest `2^a 3^b ≥ min`.
pub fn fast_grid_size(min: usize) -> usize {
    let mut g = min.max(1);
    loop {
        let mut r = g;
        for p in [2, 3] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return g;
        }
        g += 1;
    }
}

/// Cached 2-d transform for one `(cutoff, grid size)` pair.
///
/// Grid values are stored transposed, `values[j2 * G + j1] = u(2πj1/G, 2πj2/G)`; the
/// public conversions in the parent module undo this.
#[derive(Clone)]
pub struct FourierGrid<T: Real> {
    size: usize,
    lattice: Lattice,
    inverse: Arc<dyn Fft<T>>,
    forward: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for FourierGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierGrid")
            .field("size", &self.size)
            .field("cutoff", &self.lattice.cutoff())
            .finish()
    }
}

impl<T: Real> FourierGrid<T> {
    /// Transform for coefficients on `|n| ≤ cutoff` and a `size × size` grid.
    pub fn new(cutoff: u32, size: usize) -> Result<Self> {
        let required = 2 * cutoff as usize + 1;
        if size < required {
            return Err(Error::Aliasing {
                grid: size,
                required,
            });
        }
        if size > MAX_GRID {
            return Err(Error::Resource(format!(
                "grid size {size} exceeds the limit {MAX_GRID}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            size,
            lattice: Lattice::new(cutoff),
            inverse: planner.plan_fft_inverse(size),
            forward: planner.plan_fft_forward(size),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    #[inline]
    fn wrap(&self, k: i32) -> usize {
        k.rem_euclid(self.size as i32) as usize
    }

    /// Evaluates `Σ c_n e^{in·x}` on the grid (transposed layout).
    pub fn synthesize(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(coeffs.len(), self.lattice.len());
        let g = self.size;
        let n = self.lattice.cutoff() as i32;
        let rows = 2 * n as usize + 1;
        let zero = Complex::new(T::zero(), T::zero());
        let mut scratch = vec![zero; self.inverse.get_inplace_scratch_len()];

        let mut a = vec![zero; rows * g];
        for (&p, &c) in self.lattice.points().iter().zip(coeffs) {
            let r = (p[0] + n) as usize;
            a[r * g + self.wrap(p[1])] = c;
        }
        self.inverse.process_with_scratch(&mut a, &mut scratch);

        let mut b = vec![zero; g * g];
        for r in 0..rows {
            let col = self.wrap(r as i32 - n);
            let src = &a[r * g..(r + 1) * g];
            for (j2, &v) in src.iter().enumerate() {
                b[j2 * g + col] = v;
            }
        }
        self.inverse.process_with_scratch(&mut b, &mut scratch);
        b
    }

    /// Fourier coefficients `mean_x u(x) e^{−in·x}` for `|n| ≤ cutoff` from grid values
    /// in transposed layout. The buffer is overwritten.
    pub fn analyze(&self, values: &mut [Complex<T>]) -> Vec<Complex<T>> {
        let g = self.size;
        assert_eq!(values.len(), g * g);
        let n = self.lattice.cutoff() as i32;
        let rows = 2 * n as usize + 1;
        let zero = Complex::new(T::zero(), T::zero());
        let mut scratch = vec![zero; self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(values, &mut scratch);

        let mut a = vec![zero; rows * g];
        for r in 0..rows {
            let col = self.wrap(r as i32 - n);
            for j2 in 0..g {
                a[r * g + j2] = values[j2 * g + col];
            }
        }
        self.forward.process_with_scratch(&mut a, &mut scratch);

        let scale = T::one() / T::count(g * g);
        self.lattice
            .points()
            .iter()
            .map(|&p| {
                let r = (p[0] + n) as usize;
                a[r * g + self.wrap(p[1])] * scale
            })
            .collect()
    }
}
