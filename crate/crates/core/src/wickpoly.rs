//! Hermite and Laguerre polynomials with a variance parameter, and Wick powers of
//! complex Gaussians.
//!
//! Everything here is generic over [`PolyScalar`], which covers `f32`, `f64` and exact
//! rationals.

use num_complex::Complex;
use num_traits::{FromPrimitive, Num};

use crate::error::{domain, Result};

/// Scalars the polynomial recurrences can run on.
pub trait PolyScalar: Clone + Num + FromPrimitive + PartialOrd {}

impl<T> PolyScalar for T where T: Clone + Num + FromPrimitive + PartialOrd {}

#[inline]
fn int<P: PolyScalar>(k: usize) -> P {
    P::from_usize(k).expect("integer representable")
}

/// Order and variance of a Wick-ordered evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct WickContext<P> {
    order: usize,
    variance: P,
}

impl<P: PolyScalar> WickContext<P> {
    pub fn new(order: usize, variance: P) -> Result<Self> {
        if order == 0 {
            return domain("Wick order must be at least 1");
        }
        if !(variance > P::zero()) {
            return domain("variance must be strictly positive");
        }
        Ok(Self { order, variance })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn variance(&self) -> &P {
        &self.variance
    }
}

fn check_sigma<P: PolyScalar>(sigma: &P) -> Result<()> {
    if *sigma > P::zero() {
        Ok(())
    } else {
        domain("variance must be strictly positive")
    }
}

/// Hermite polynomial `H_k(x; σ)` with generating function `exp(tx − σt²/2)`.
pub fn hermite<P: PolyScalar>(k: usize, x: P, sigma: P) -> Result<P> {
    check_sigma(&sigma)?;
    Ok(hermite_unchecked(k, &x, &sigma))
}

pub(crate) fn hermite_unchecked<P: PolyScalar>(k: usize, x: &P, sigma: &P) -> P {
    let mut prev = P::one();
    if k == 0 {
        return prev;
    }
    let mut cur = x.clone();
    for j in 1..k {
        let next = x.clone() * cur.clone() - int::<P>(j) * sigma.clone() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre polynomial `L_m(x)`.
pub fn laguerre<P: PolyScalar>(m: usize, x: P) -> P {
    generalized_laguerre(m, 0, x)
}

/// Generalized Laguerre polynomial `L_m^{(α)}(x)` for integer `α ≥ 0`.
pub fn generalized_laguerre<P: PolyScalar>(m: usize, alpha: usize, x: P) -> P {
    let mut prev = P::one();
    if m == 0 {
        return prev;
    }
    let a = int::<P>(alpha);
    let mut cur = P::one() + a.clone() - x.clone();
    for k in 1..m {
        let next = ((int::<P>(2 * k + 1) + a.clone() - x.clone()) * cur.clone()
            - (int::<P>(k) + a.clone()) * prev)
            / int::<P>(k + 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Variance-scaled Laguerre polynomial `L_m(x; σ) = σ^m L_m(x/σ)`.
pub fn scaled_laguerre<P: PolyScalar>(m: usize, x: P, sigma: P) -> Result<P> {
    check_sigma(&sigma)?;
    Ok(scaled_generalized_laguerre(m, 0, &x, &sigma))
}

/// `σ^m L_m^{(α)}(x/σ)` for `σ > 0` (unchecked).
pub(crate) fn scaled_generalized_laguerre<P: PolyScalar>(
    m: usize,
    alpha: usize,
    x: &P,
    sigma: &P,
) -> P {
    let l = generalized_laguerre(m, alpha, x.clone() / sigma.clone());
    pow(sigma, m) * l
}

fn pow<P: PolyScalar>(x: &P, k: usize) -> P {
    let mut r = P::one();
    for _ in 0..k {
        r = r * x.clone();
    }
    r
}

fn factorial<P: PolyScalar>(k: usize) -> P {
    let mut r = P::one();
    for j in 2..=k {
        r = r * int::<P>(j);
    }
    r
}

fn binomial<P: PolyScalar>(n: usize, k: usize) -> P {
    let mut r = P::one();
    for j in 0..k {
        r = r * int::<P>(n - j) / int::<P>(j + 1);
    }
    r
}

fn double_factorial_odd<P: PolyScalar>(j: usize) -> P {
    // (2j − 1)!!
    let mut r = P::one();
    for i in 1..=j {
        r = r * int::<P>(2 * i - 1);
    }
    r
}

/// Wick power `:|z|^{2m}: = (−1)^m m! σ^m L_m(|z|²/σ)`.
pub fn wick_abs_power<P: PolyScalar>(z: &Complex<P>, ctx: &WickContext<P>) -> P {
    wick_abs_power_from_modulus(z.norm_sqr(), ctx)
}

/// Wick power as a function of `|z|²`.
pub fn wick_abs_power_from_modulus<P: PolyScalar>(r2: P, ctx: &WickContext<P>) -> P {
    let m = ctx.order;
    let v = factorial::<P>(m) * scaled_generalized_laguerre(m, 0, &r2, &ctx.variance);
    if m.is_multiple_of(2) {
        v
    } else {
        P::zero() - v
    }
}

/// Wick power assembled from real Hermite polynomials of the real and imaginary parts,
/// `Σ_l C(m,l) H_{2l}(Re z; σ/2) H_{2m−2l}(Im z; σ/2)`.
pub fn wick_hermite_split<P: PolyScalar>(z: &Complex<P>, ctx: &WickContext<P>) -> P {
    let m = ctx.order;
    let half = ctx.variance.clone() / int::<P>(2);
    let mut acc = P::zero();
    for l in 0..=m {
        let hr = hermite_unchecked(2 * l, &z.re, &half);
        let hi = hermite_unchecked(2 * m - 2 * l, &z.im, &half);
        acc = acc + binomial::<P>(m, l) * hr * hi;
    }
    acc
}

/// Right-hand side of the monomial expansion
/// `x^k = Σ_j C(k, 2j) (2j − 1)!! σ^j H_{k−2j}(x; σ)`.
pub fn monomial_to_hermite<P: PolyScalar>(k: usize, x: P, sigma: P) -> Result<P> {
    check_sigma(&sigma)?;
    let mut acc = P::zero();
    for j in 0..=k / 2 {
        let c = binomial::<P>(k, 2 * j) * double_factorial_odd::<P>(j) * pow(&sigma, j);
        acc = acc + c * hermite_unchecked(k - 2 * j, &x, &sigma);
    }
    Ok(acc)
}

/// Coefficients `c_l` of `:|z|^{2m}: = Σ_l c_l σ^{m−l} |z|^{2l}`.
pub fn wick_power_coefficients<P: PolyScalar>(m: usize) -> Vec<P> {
    // (−1)^m m! L_m(t) = (−1)^m m! Σ_l C(m,l) (−1)^l t^l / l!
    (0..=m)
        .map(|l| {
            let c = factorial::<P>(m) * binomial::<P>(m, l) / factorial::<P>(l);
            if (m + l).is_multiple_of(2) {
                c
            } else {
                P::zero() - c
            }
        })
        .collect()
}
