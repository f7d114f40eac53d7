//! Dormand–Prince 8(5,3) in a rotating frame that absorbs the linear part exactly.
//!
//! Over a step of length `h` from `t0` the unknown is `w(s) = e^{iΛs} û(t0 + s)` with
//! `Λ = λ + shift`, which solves `w' = −i e^{iΛs} F̂(e^{−iΛs} w) − i(2c − shift) w`.
//! `shift` is the mean nonlinear rotation rate at `t0`; the frame is re-based after
//! every accepted step so phases stay bounded.
#![allow(clippy::excessive_precision)]

use num_complex::Complex;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::WickModel;
use crate::scalar::Real;

/// Tolerances and step limits of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    /// Steps shorter than this abort with a stiffness error.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            abs_tol: 2e-12,
            rel_tol: 2e-11,
            max_step: 0.1,
            min_step: 1e-13,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return domain("tolerances must be positive");
        }
        if !(self.max_step > 0.0) || !(self.min_step > 0.0) {
            return domain("step limits must be positive");
        }
        Ok(())
    }
}

/// Counters of one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const STAGES: usize = 12;

const C: [f64; STAGES] = [
    0.0,
    0.526001519587677318785587544488e-1,
    0.789002279381515978178381316732e-1,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    1.0 / 3.0,
    0.25,
    4.0 / 13.0,
    127.0 / 195.0,
    0.6,
    6.0 / 7.0,
    1.0,
];

const A: [[f64; STAGES]; STAGES] = {
    let mut a = [[0.0; STAGES]; STAGES];
    a[1][0] = 5.26001519587677318785587544488e-2;
    a[2][0] = 1.97250569845378994544595329183e-2;
    a[2][1] = 5.91751709536136983633785987549e-2;
    a[3][0] = 2.95875854768068491816892993775e-2;
    a[3][2] = 8.87627564304205475450678981324e-2;
    a[4][0] = 2.41365134159266685502369798665e-1;
    a[4][2] = -8.84549479328286085344864962717e-1;
    a[4][3] = 9.24834003261792003115737966543e-1;
    a[5][0] = 3.7037037037037037037037037037e-2;
    a[5][3] = 1.70828608729473871279604482173e-1;
    a[5][4] = 1.25467687566822425016691814123e-1;
    a[6][0] = 3.7109375e-2;
    a[6][3] = 1.70252211019544039314978060272e-1;
    a[6][4] = 6.02165389804559606850219397283e-2;
    a[6][5] = -1.7578125e-2;
    a[7][0] = 3.70920001185047927108779319836e-2;
    a[7][3] = 1.70383925712239993810214054705e-1;
    a[7][4] = 1.07262030446373284651809199168e-1;
    a[7][5] = -1.53194377486244017527936158236e-2;
    a[7][6] = 8.27378916381402288758473766002e-3;
    a[8][0] = 6.24110958716075717114429577812e-1;
    a[8][3] = -3.36089262944694129406857109825;
    a[8][4] = -8.68219346841726006818189891453e-1;
    a[8][5] = 2.75920996994467083049415600797e1;
    a[8][6] = 2.01540675504778934086186788979e1;
    a[8][7] = -4.34898841810699588477366255144e1;
    a[9][0] = 4.77662536438264365890433908527e-1;
    a[9][3] = -2.48811461997166764192642586468;
    a[9][4] = -5.90290826836842996371446475743e-1;
    a[9][5] = 2.12300514481811942347288949897e1;
    a[9][6] = 1.52792336328824235832596922938e1;
    a[9][7] = -3.32882109689848629194453265587e1;
    a[9][8] = -2.03312017085086261358222928593e-2;
    a[10][0] = -9.3714243008598732571704021658e-1;
    a[10][3] = 5.18637242884406370830023853209;
    a[10][4] = 1.09143734899672957818500254654;
    a[10][5] = -8.14978701074692612513997267357;
    a[10][6] = -1.85200656599969598641566180701e1;
    a[10][7] = 2.27394870993505042818970056734e1;
    a[10][8] = 2.49360555267965238987089396762;
    a[10][9] = -3.0467644718982195003823669022;
    a[11][0] = 2.27331014751653820792359768449;
    a[11][3] = -1.05344954667372501984066689879e1;
    a[11][4] = -2.00087205822486249909675718444;
    a[11][5] = -1.79589318631187989172765950534e1;
    a[11][6] = 2.79488845294199600508499808837e1;
    a[11][7] = -2.85899827713502369474065508674;
    a[11][8] = -8.87285693353062954433549289258;
    a[11][9] = 1.23605671757943030647266201528e1;
    a[11][10] = 6.43392746015763530355970484046e-1;
    a
};

/// Eighth-order weights.
const B: [f64; STAGES] = [
    5.42937341165687622380535766363e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566,
    1.89151789931450038304281599044,
    -5.8012039600105847814672114227,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
];

/// Eighth minus fifth order weights.
const ER: [f64; STAGES] = [
    0.1312004499419488073250102996e-1,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e1,
    -0.4957589496572501915214079952,
    0.1664377182454986536961530415e1,
    -0.3503288487499736816886487290,
    0.3341791187130174790297318841,
    0.8192320648511571246570742613e-1,
    -0.2235530786388629525884427845e-1,
];

/// Third-order weights on stages 1, 9 and 12.
const BHH: [f64; 3] = [
    0.244094488188976377952755905512,
    0.733846688281611857341361741547,
    0.220588235294117647058823529412e-1,
];

/// Low-mode flow `i ∂_t û = λ û + F̂(u) + 2c û`; `c = 0` is the Wick NLS.
pub struct LowModeFlow<'a, T: Real, M: WickModel<T> + ?Sized> {
    model: &'a M,
    gauge: T,
    lambda: Vec<T>,
}

impl<'a, T: Real, M: WickModel<T> + ?Sized> LowModeFlow<'a, T, M> {
    pub fn new(model: &'a M) -> Self {
        Self::with_gauge(model, T::zero())
    }

    /// Adds the linear term `2c·u` to the nonlinearity.
    pub fn with_gauge(model: &'a M, c: T) -> Self {
        Self {
            model,
            gauge: c,
            lambda: model.eigenvalues().to_vec(),
        }
    }

    /// `dw/ds` at frame time `s` in the frame `u = e^{−i(λ + shift)s} w`.
    fn rhs(&self, s: T, shift: T, w: &[Complex<T>], out: &mut Vec<Complex<T>>) {
        let phase: Vec<Complex<T>> = self
            .lambda
            .iter()
            .map(|&l| Complex::from_polar(T::one(), (l + shift) * s))
            .collect();
        let u: Vec<Complex<T>> = w.iter().zip(&phase).map(|(&x, p)| x * p.conj()).collect();
        let f = self.model.nonlinearity(&u);
        let linear = self.gauge + self.gauge - shift;
        out.clear();
        out.extend(f.iter().zip(w).zip(&phase).map(|((&fv, &x), &p)| {
            let v = fv * p + x * linear;
            Complex::new(v.im, -v.re)
        }));
    }

    /// `Re⟨F(y), y⟩ / ‖y‖²`, the mean rotation rate the nonlinearity imposes on `y`.
    fn rotation_rate(y: &[Complex<T>], f: &[Complex<T>]) -> T {
        let mut num = T::zero();
        let mut den = T::zero();
        for (a, b) in y.iter().zip(f) {
            num += (a.conj() * b).re;
            den += a.norm_sqr();
        }
        if den > T::zero() {
            num / den
        } else {
            T::zero()
        }
    }

    /// `k₁ = −i(F(y) + (2c − shift) y)`.
    fn first_stage(&self, y: &[Complex<T>], f: &[Complex<T>], shift: T, out: &mut Vec<Complex<T>>) {
        let linear = self.gauge + self.gauge - shift;
        out.clear();
        out.extend(y.iter().zip(f).map(|(&x, &fv)| {
            let v = fv + x * linear;
            Complex::new(v.im, -v.re)
        }));
    }

    /// Integrates from `0` to `t_final` (either sign), calling `observe(t, state)` at
    /// the start and after every accepted step.
    pub fn integrate(
        &self,
        low: &[Complex<T>],
        t_final: f64,
        config: &IntegratorConfig,
        mut observe: impl FnMut(f64, &[Complex<T>]),
    ) -> Result<(Vec<Complex<T>>, StepStats)> {
        config.validate()?;
        let mut stats = StepStats::default();
        let mut y = low.to_vec();
        observe(0.0, &y);
        if t_final == 0.0 || y.is_empty() {
            return Ok((y, stats));
        }
        let dir = t_final.signum();
        let span = t_final.abs();
        let n = y.len();
        let zero = Complex::new(T::zero(), T::zero());

        let mut k: Vec<Vec<Complex<T>>> = (0..STAGES).map(|_| Vec::with_capacity(n)).collect();
        // Each step runs in a frame rotating at `λ + shift`, with `shift` the current
        // mean nonlinear rotation; a constant gauge within the step.
        let mut f0 = self.model.nonlinearity(&y);
        stats.evaluations += 1;
        let mut shift = Self::rotation_rate(&y, &f0);
        let mut k1 = Vec::with_capacity(n);
        self.first_stage(&y, &f0, shift, &mut k1);

        let scale0: f64 = y
            .iter()
            .map(|c| c.norm().to_f64_lossy())
            .fold(0.0, f64::max)
            .max(1e-300);
        let d1: f64 = k1
            .iter()
            .map(|c| c.norm().to_f64_lossy())
            .fold(0.0, f64::max);
        let mut h = if d1 > 0.0 { 0.01 * scale0 / d1 } else { config.max_step };
        h = h.clamp(config.min_step, config.max_step).min(span);

        let mut t = 0.0f64;
        let mut stage = vec![zero; n];
        let mut y_new = vec![zero; n];
        while t < span {
            if stats.accepted + stats.rejected >= config.max_steps {
                return Err(Error::Resource(format!(
                    "step budget {} exhausted at t = {}",
                    config.max_steps,
                    dir * t
                )));
            }
            let last = t + h >= span * (1.0 - 1e-14);
            let hh = if last { span - t } else { h };
            let hs = T::of(dir * hh);

            k[0].clear();
            k[0].extend_from_slice(&k1);
            for i in 1..STAGES {
                for j in 0..n {
                    let mut acc = zero;
                    for (l, kl) in k.iter().enumerate().take(i) {
                        let a = A[i][l];
                        if a != 0.0 {
                            acc += kl[j] * T::of(a);
                        }
                    }
                    stage[j] = y[j] + acc * hs;
                }
                let mut out = std::mem::take(&mut k[i]);
                self.rhs(hs * T::of(C[i]), shift, &stage, &mut out);
                k[i] = out;
                stats.evaluations += 1;
            }

            // Error norm of the 8(5,3) pair: err₅² / sqrt(err₅² + 0.01 err₃²).
            let (mut err5, mut err3) = (0.0, 0.0);
            for j in 0..n {
                let mut high = zero;
                let mut e5 = zero;
                for (l, kl) in k.iter().enumerate() {
                    if B[l] != 0.0 {
                        high += kl[j] * T::of(B[l]);
                    }
                    if ER[l] != 0.0 {
                        e5 += kl[j] * T::of(ER[l]);
                    }
                }
                let e3 = high
                    - k[0][j] * T::of(BHH[0])
                    - k[8][j] * T::of(BHH[1])
                    - k[11][j] * T::of(BHH[2]);
                y_new[j] = y[j] + high * hs;
                let sc = config.abs_tol
                    + config.rel_tol
                        * y[j].norm().to_f64_lossy().max(y_new[j].norm().to_f64_lossy());
                err5 += (e5.norm().to_f64_lossy() / sc).powi(2);
                err3 += (e3.norm().to_f64_lossy() / sc).powi(2);
            }
            let deno = err5 + 0.01 * err3;
            let deno = if deno > 0.0 { deno } else { 1.0 };
            let err = hh * err5 * (1.0 / (n as f64 * deno)).sqrt();
            // Overflowing norms give inf·0; treat them as a failed step.
            let err = if err.is_nan() { f64::INFINITY } else { err };

            if err <= 1.0 {
                t = if last { span } else { t + hh };
                for (yv, (yn, &l)) in y.iter_mut().zip(y_new.iter().zip(&self.lambda)) {
                    *yv = *yn * Complex::from_polar(T::one(), -(l + shift) * hs);
                }
                f0 = self.model.nonlinearity(&y);
                stats.evaluations += 1;
                shift = Self::rotation_rate(&y, &f0);
                self.first_stage(&y, &f0, shift, &mut k1);
                stats.accepted += 1;
                observe(dir * t, &y);
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 {
                6.0
            } else {
                (0.9 * err.powf(-0.125)).clamp(1.0 / 3.0, 6.0)
            };
            h = (hh * factor).min(config.max_step);
            if h < config.min_step && t < span {
                return Err(Error::Stiffness { t: dir * t, h });
            }
        }
        Ok((y, stats))
    }
}
