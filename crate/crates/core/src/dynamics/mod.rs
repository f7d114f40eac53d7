//! Truncated Wick NLS: the low modes `|n| ≤ N` follow
//! `i ∂_t û(n) = |n|² û(n) + F̂_N(u)(n)`, higher modes rotate freely,
//! `û(n, t) = e^{−i|n|²t} û(n, 0)`.

mod integrator;
mod invariance;

pub use integrator::{IntegratorConfig, LowModeFlow, StepStats};
pub use invariance::{
    invariance_experiment, ks_permutation_test, weighted_ks_distance, InvarianceReport,
    ObservableComparison,
};

use num_complex::Complex;

use crate::error::Result;
use crate::model::{hamiltonian, mass, WickModel};
use crate::scalar::Real;
use crate::torus_field::{norm_sq, SpectralField};
use crate::wick_functionals::WickEvaluator;

/// Time-stamped states of a torus trajectory with conserved-quantity monitors.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField<T>>,
    /// `Σ_{|n| ≤ N} |û(n)|²`.
    pub mass: Vec<f64>,
    /// `½ Σ |n|² |û(n)|² + G_N`.
    pub hamiltonian: Vec<f64>,
    /// Labels of the modes `|n| > N`.
    pub high_modes: Vec<[i32; 2]>,
    /// `|û(n, t)|` for every high mode, per time.
    pub high_magnitudes: Vec<Vec<f64>>,
    pub stats: StepStats,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &SpectralField<T> {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// CSV with columns `t, mass_low, hamiltonian` and `|û(n)|` for each listed mode.
    pub fn to_csv(&self, modes: &[[i32; 2]]) -> String {
        let mut s = String::from("t,mass_low,hamiltonian");
        for n in modes {
            s.push_str(&format!(",abs_{}_{}", n[0], n[1]));
        }
        s.push('\n');
        for (i, &t) in self.times.iter().enumerate() {
            s.push_str(&format!("{t},{},{}", self.mass[i], self.hamiltonian[i]));
            for &n in modes {
                s.push_str(&format!(",{}", self.states[i].get(n).norm().to_f64_lossy()));
            }
            s.push('\n');
        }
        s
    }

    /// Largest `|X(t) − X(0)| / |X(0)|` of a monitor.
    pub fn relative_drift(monitor: &[f64]) -> f64 {
        let x0 = monitor[0];
        let scale = x0.abs().max(f64::MIN_POSITIVE);
        monitor
            .iter()
            .map(|x| (x - x0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Exact free rotation of the modes `|n| > N`.
fn rotate_high<T: Real>(field: &SpectralField<T>, cutoff: u32, t: f64, out: &mut SpectralField<T>) {
    let nn = (cutoff as i64) * (cutoff as i64);
    let lattice = field.lattice();
    for (i, &p) in lattice.points().iter().enumerate() {
        let q = norm_sq(p);
        if q > nn {
            let phase = -(q as f64) * t;
            out.coeffs_mut()[i] = field.coeffs()[i] * Complex::from_polar(T::one(), T::of(phase));
        }
    }
}

fn merge_low<T: Real>(full: &mut SpectralField<T>, low_lattice_points: &[[i32; 2]], low: &[Complex<T>]) {
    let lattice = full.lattice();
    for (&p, &c) in low_lattice_points.iter().zip(low) {
        let i = lattice.index(p).expect("nested balls");
        full.coeffs_mut()[i] = c;
    }
}

/// Evolves `field` to `t_final` recording every accepted step.
pub fn evolve<T: Real>(
    field: &SpectralField<T>,
    cutoff: u32,
    m: usize,
    t_final: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory<T>> {
    let ev = WickEvaluator::<T>::new(m, cutoff)?;
    evolve_with(&ev, field, t_final, config, T::zero())
}

/// [`evolve`] with an explicit evaluator and gauge term `2c·u`.
pub fn evolve_with<T: Real>(
    ev: &WickEvaluator<T>,
    field: &SpectralField<T>,
    t_final: f64,
    config: &IntegratorConfig,
    gauge: T,
) -> Result<Trajectory<T>> {
    let cutoff = ev.cutoff();
    let low = field.restrict(cutoff)?;
    let labels = ev.labels().to_vec();
    let nn = (cutoff as i64) * (cutoff as i64);
    let high_modes: Vec<[i32; 2]> = field
        .lattice()
        .points()
        .iter()
        .copied()
        .filter(|&p| norm_sq(p) > nn)
        .collect();

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        mass: Vec::new(),
        hamiltonian: Vec::new(),
        high_modes,
        high_magnitudes: Vec::new(),
        stats: StepStats::default(),
    };
    let flow = LowModeFlow::with_gauge(ev, gauge);
    let (_, stats) = flow.integrate(low.coeffs(), t_final, config, |t, y| {
        let mut state = field.clone();
        rotate_high(field, cutoff, t, &mut state);
        merge_low(&mut state, &labels, y);
        traj.times.push(t);
        traj.mass.push(mass(y).to_f64_lossy());
        traj.hamiltonian.push(hamiltonian(ev, y).to_f64_lossy());
        traj.high_magnitudes.push(
            traj.high_modes
                .iter()
                .map(|&n| state.get(n).norm().to_f64_lossy())
                .collect(),
        );
        traj.states.push(state);
    })?;
    traj.stats = stats;
    Ok(traj)
}

/// Final state of the flow at `t_final`, without recording.
pub fn flow_to<T: Real>(
    ev: &WickEvaluator<T>,
    field: &SpectralField<T>,
    t_final: f64,
    config: &IntegratorConfig,
) -> Result<SpectralField<T>> {
    let cutoff = ev.cutoff();
    let low = field.restrict(cutoff)?;
    let (y, _) = LowModeFlow::new(ev).integrate(low.coeffs(), t_final, config, |_, _| {})?;
    let mut state = field.clone();
    rotate_high(field, cutoff, t_final, &mut state);
    merge_low(&mut state, ev.labels(), &y);
    Ok(state)
}

/// Final low-mode state of a generic model.
pub fn flow_low<T: Real, M: WickModel<T> + ?Sized>(
    model: &M,
    low: &[Complex<T>],
    t_final: f64,
    config: &IntegratorConfig,
) -> Result<Vec<Complex<T>>> {
    Ok(LowModeFlow::new(model)
        .integrate(low, t_final, config, |_, _| {})?
        .0)
}

/// `Σ_{|n| ≤ N} |û(n)|²`.
pub fn mass_low<T: Real>(field: &SpectralField<T>, cutoff: u32) -> Result<T> {
    Ok(field.restrict(cutoff)?.mass())
}

/// `½ Σ_{|n| ≤ N} |n|² |û(n)|² + G_N(u)`.
pub fn hamiltonian_wick<T: Real>(field: &SpectralField<T>, cutoff: u32, m: usize) -> Result<T> {
    let ev = WickEvaluator::<T>::new(m, cutoff)?;
    let low = field.restrict(cutoff)?;
    Ok(hamiltonian(&ev, low.coeffs()))
}
