//! Brute-force Fourier-side decomposition of `6·G_N` for `m = 3`.
//!
//! With `v_n = û(n)`, `S_k = Σ |v_n|^{2k}` and `σ = σ_N`,
//! `6 G_N = I + II + III + IV` where `I = Σ_{Γ_6(0)} v_1 v̄_2 v_3 v̄_4 v_5 v̄_6`,
//! `II = −9σ Σ_{Γ_4(0)} v_1 v̄_2 v_3 v̄_4`, `III = 18σ² S_1`, `IV = −6σ³`.
//! Tuples of `I` are split by how their odd-position frequencies match the
//! even-position ones: no match, a partial match, or a full matching.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::torus_field::{sigma_n, Lattice, SpectralField};

/// Every labelled term of the decomposition, evaluated for one field.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AppendixTerms {
    pub cutoff: u32,
    pub sigma: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub i: f64,
    pub ii: f64,
    pub iii: f64,
    pub iv: f64,
    /// Tuples without any odd/even coincidence.
    pub i_1: f64,
    /// Tuples with a coincidence but no full matching.
    pub i_2: f64,
    /// Full matchings: one, two or three distinct frequencies.
    pub i_31: f64,
    pub i_32: f64,
    pub i_33: f64,
    /// `Σ_{Γ_4(0), n_1 ≠ n_2, n_1 ≠ n_4} v_1 v̄_2 v_3 v̄_4`.
    pub q: f64,
    /// The factored form `9 S_1 Q` of the partial-match class.
    pub i_2_factored: f64,
    pub ii_1: f64,
    pub ii_2: f64,
    pub ii_3: f64,
    pub i_321: f64,
    pub i_331: f64,
    pub i_332: f64,
    /// `(I + II + III + IV)/6`.
    pub combined: f64,
}

impl AppendixTerms {
    /// Pairs `(lhs, rhs)` of every identity the terms satisfy exactly.
    pub fn identities(&self) -> Vec<(&'static str, f64, f64)> {
        let s1 = self.s1;
        let s2 = self.s2;
        let s3 = self.s3;
        let sig = self.sigma;
        vec![
            ("partition", self.i_1 + self.i_2 + self.i_31 + self.i_32 + self.i_33, self.i),
            ("single_frequency", self.i_31, s3),
            ("two_frequencies", self.i_32, 9.0 * (s1 * s2 - s3)),
            ("three_frequencies", self.i_33, 6.0 * (s1 * s1 * s1 - 3.0 * s1 * s2 + 2.0 * s3)),
            (
                "quartic_split",
                self.i_2_factored + self.ii,
                self.ii_1 + self.ii_2 + self.ii_3,
            ),
            (
                "cubic_regrouping",
                self.iii + self.iv + self.ii_2 + self.i_331,
                6.0 * (s1 - sig).powi(3),
            ),
            (
                "quadratic_regrouping",
                self.ii_3 + self.i_321 + self.i_332,
                9.0 * (sig - s1) * s2,
            ),
        ]
    }

    /// `|lhs − rhs| / max(|lhs|, |rhs|, scale)` per identity, with `scale = σ³` the
    /// natural size of the sextic terms.
    pub fn relative_residuals(&self) -> Vec<(&'static str, f64)> {
        let scale = self.sigma.powi(3);
        self.identities()
            .into_iter()
            .map(|(name, a, b)| (name, (a - b).abs() / a.abs().max(b.abs()).max(scale)))
            .collect()
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.relative_residuals()
            .iter()
            .map(|r| r.1)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
struct C {
    re: f64,
    im: f64,
}

impl C {
    #[inline]
    fn mul(self, o: C) -> C {
        C {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
    #[inline]
    fn conj(self) -> C {
        C {
            re: self.re,
            im: -self.im,
        }
    }
}

/// Decomposes `6·G_N` of `field` for `m = 3` by direct enumeration of `Γ_6(0)`.
pub fn appendix_decomposition_m3(field: &SpectralField<f64>, cutoff: u32) -> Result<AppendixTerms> {
    if cutoff > 2 {
        return Err(Error::Resource(format!(
            "brute-force enumeration is limited to N ≤ 2, got {cutoff}"
        )));
    }
    let low = field.restrict(cutoff)?;
    let lattice = Lattice::new(cutoff);
    let pts = lattice.points();
    let v: Vec<C> = low
        .coeffs()
        .iter()
        .map(|z| C { re: z.re, im: z.im })
        .collect();
    let k = pts.len();
    let sigma = sigma_n::<f64>(cutoff);

    let a2: Vec<f64> = v.iter().map(|z| z.re * z.re + z.im * z.im).collect();
    let s1: f64 = a2.iter().sum();
    let s2: f64 = a2.iter().map(|x| x * x).sum();
    let s3: f64 = a2.iter().map(|x| x * x * x).sum();

    let idx = |p: [i32; 2]| lattice.index(p);
    let sub = |a: [i32; 2], b: [i32; 2]| [a[0] - b[0], a[1] - b[1]];
    let add = |a: [i32; 2], b: [i32; 2]| [a[0] + b[0], a[1] + b[1]];

    // Γ_4(0): n_4 = n_1 − n_2 + n_3.
    let mut quartic = 0.0;
    let mut q = 0.0;
    for i1 in 0..k {
        for i2 in 0..k {
            let p12 = v[i1].mul(v[i2].conj());
            for i3 in 0..k {
                let Some(i4) = idx(add(sub(pts[i1], pts[i2]), pts[i3])) else {
                    continue;
                };
                let t = p12.mul(v[i3]).mul(v[i4].conj()).re;
                quartic += t;
                if i1 != i2 && i1 != i4 {
                    q += t;
                }
            }
        }
    }

    // Γ_6(0): n_6 = n_1 − n_2 + n_3 − n_4 + n_5.
    let (mut i_1, mut i_2, mut i_31, mut i_32, mut i_33, mut sextic) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i1 in 0..k {
        for i2 in 0..k {
            let p12 = v[i1].mul(v[i2].conj());
            let d12 = sub(pts[i1], pts[i2]);
            for i3 in 0..k {
                let p123 = p12.mul(v[i3]);
                let d123 = add(d12, pts[i3]);
                for i4 in 0..k {
                    let p1234 = p123.mul(v[i4].conj());
                    let d1234 = sub(d123, pts[i4]);
                    for i5 in 0..k {
                        let Some(i6) = idx(add(d1234, pts[i5])) else {
                            continue;
                        };
                        let t = p1234.mul(v[i5]).mul(v[i6].conj()).re;
                        sextic += t;
                        let mut odd = [i1, i3, i5];
                        let mut even = [i2, i4, i6];
                        let any = odd.iter().any(|o| even.contains(o));
                        if !any {
                            i_1 += t;
                            continue;
                        }
                        odd.sort_unstable();
                        even.sort_unstable();
                        if odd != even {
                            i_2 += t;
                            continue;
                        }
                        let distinct = 1 + (odd[1] != odd[0]) as usize + (odd[2] != odd[1]) as usize;
                        match distinct {
                            1 => i_31 += t,
                            2 => i_32 += t,
                            _ => i_33 += t,
                        }
                    }
                }
            }
        }
    }

    let i = sextic;
    let ii = -9.0 * sigma * quartic;
    let iii = 18.0 * sigma * sigma * s1;
    let iv = -6.0 * sigma.powi(3);
    Ok(AppendixTerms {
        cutoff,
        sigma,
        s1,
        s2,
        s3,
        i,
        ii,
        iii,
        iv,
        i_1,
        i_2,
        i_31,
        i_32,
        i_33,
        q,
        i_2_factored: 9.0 * s1 * q,
        ii_1: 9.0 * (s1 - sigma) * q,
        ii_2: -18.0 * sigma * s1 * s1,
        ii_3: 9.0 * sigma * s2,
        i_321: 9.0 * s2 * s1,
        i_331: 6.0 * s1.powi(3),
        i_332: -18.0 * s1 * s2,
        combined: (i + ii + iii + iv) / 6.0,
    })
}
