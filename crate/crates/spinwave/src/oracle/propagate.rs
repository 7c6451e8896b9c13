//! Strang split-operator propagation of the pair |ψ_g(t)⟩, U_r(t)R†|ψ_g(0)⟩
//! and the overlaps Q(t), M(t) built from them.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{Grid1D, GridState};
use crate::constants::HBAR;
use crate::{Error, Result};

/// Potential energy in J as a function of x.
#[derive(Clone)]
pub enum Potential {
    Zero,
    /// c0 + c1·x + c2·x²
    Polynomial { c0: f64, c1: f64, c2: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Polynomial { c0, c1, c2 } => write!(f, "Polynomial({c0}, {c1}, {c2})"),
            Potential::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Potential {
    /// ½κ(x − x0)².
    pub fn harmonic(kappa: f64, x0: f64) -> Self {
        Potential::Polynomial {
            c0: 0.5 * kappa * x0 * x0,
            c1: -kappa * x0,
            c2: 0.5 * kappa,
        }
    }

    /// −F·x, the potential of a uniform force F.
    pub fn linear(force: f64) -> Self {
        Potential::Polynomial {
            c0: 0.0,
            c1: -force,
            c2: 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Polynomial { c0, c1, c2 } => c0 + x * (c1 + x * c2),
            Potential::Custom(f) => f(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero)
    }
}

/// R† multiplies by f(x) = √L·v(x)·e^{ik_R x}, with v the normalized
/// Gaussian mode of the given waist, or by e^{ik_R x} for a plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageOperator {
    pub k_r: f64,
    pub waist: Option<f64>,
    pub center: f64,
}

impl StorageOperator {
    pub fn plane_wave(k_r: f64) -> Self {
        StorageOperator {
            k_r,
            waist: None,
            center: 0.0,
        }
    }

    pub fn gaussian(k_r: f64, waist: f64) -> Self {
        StorageOperator {
            k_r,
            waist: Some(waist),
            center: 0.0,
        }
    }

    pub fn identity() -> Self {
        Self::plane_wave(0.0)
    }

    pub fn validate(&self, grid: &Grid1D) -> Result<()> {
        if !self.k_r.is_finite() || !self.center.is_finite() {
            return Err(Error::invalid("storage operator parameters must be finite"));
        }
        if let Some(w) = self.waist {
            if !(w > 0.0) {
                return Err(Error::invalid("mode waist must be positive"));
            }
        }
        if self.k_r.abs() >= grid.k_nyquist() {
            return Err(Error::invalid("k_R exceeds the grid bandwidth"));
        }
        Ok(())
    }

    /// The multiplier f(x) on `grid`.
    pub fn factor(&self, grid: &Grid1D) -> Vec<Complex64> {
        let l = grid.length();
        grid.xs()
            .into_iter()
            .map(|x| {
                let amp = match self.waist {
                    None => 1.0,
                    Some(w) => {
                        let d = x - self.center;
                        (l * (2.0 / (PI * w * w)).sqrt()).sqrt() * (-d * d / (w * w)).exp()
                    }
                };
                Complex64::from_polar(amp, self.k_r * x)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Largest phase advance per step from either the potential or the
    /// kinetic term, in rad.
    pub max_phase: f64,
    /// Relative norm drift that aborts the run.
    pub norm_limit: f64,
    /// Optional cap on the step, in s.
    pub max_dt: Option<f64>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            max_phase: 0.1,
            norm_limit: 1e-6,
            max_dt: None,
        }
    }
}

/// Q(t), M(t) and M(0) for one initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlaps {
    pub times: Vec<f64>,
    pub q: Vec<Complex64>,
    pub m_t: Vec<f64>,
    pub m0: f64,
    /// Total number of split steps taken.
    pub steps: usize,
}

/// Reusable propagator for a grid and particle mass. FFT plans are shared
/// between threads.
#[derive(Clone)]
pub struct Propagator {
    pub grid: Grid1D,
    pub mass: f64,
    pub opts: PropagationOptions,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    ks: Vec<f64>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("grid", &self.grid)
            .field("mass", &self.mass)
            .field("opts", &self.opts)
            .finish()
    }
}

/// Precomputed phase factors for one step size.
struct StepFactors {
    kinetic: Vec<Complex64>,
    half_v: Option<Vec<Complex64>>,
    full_v: Option<Vec<Complex64>>,
}

impl Propagator {
    pub fn new(grid: Grid1D, mass: f64, opts: PropagationOptions) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::invalid("mass must be positive"));
        }
        if !(opts.max_phase > 0.0) || !(opts.norm_limit > 0.0) {
            return Err(Error::invalid("propagation options must be positive"));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.points);
        let inv = planner.plan_fft_inverse(grid.points);
        let ks = grid.ks();
        Ok(Propagator {
            grid,
            mass,
            opts,
            fwd,
            inv,
            ks,
        })
    }

    fn factors(&self, v: &[f64], dt: f64) -> StepFactors {
        let c = -HBAR * dt / (2.0 * self.mass);
        let kinetic = self.ks.iter().map(|k| Complex64::from_polar(1.0, c * k * k)).collect();
        let (half_v, full_v) = if v.iter().all(|x| *x == 0.0) {
            (None, None)
        } else {
            (
                Some(v.iter().map(|x| Complex64::from_polar(1.0, -x * dt / (2.0 * HBAR))).collect()),
                Some(v.iter().map(|x| Complex64::from_polar(1.0, -x * dt / HBAR)).collect()),
            )
        };
        StepFactors {
            kinetic,
            half_v,
            full_v,
        }
    }

    fn kinetic(&self, psi: &mut [Complex64], k: &[Complex64], scratch: &mut [Complex64]) {
        let n = psi.len() as f64;
        self.fwd.process_with_scratch(psi, scratch);
        for (p, f) in psi.iter_mut().zip(k) {
            *p *= f / n;
        }
        self.inv.process_with_scratch(psi, scratch);
    }

    /// Advances `psi` by `steps` Strang steps with the given factors.
    fn advance(&self, psi: &mut [Complex64], f: &StepFactors, steps: usize, scratch: &mut [Complex64]) {
        let mul = |psi: &mut [Complex64], v: &[Complex64]| {
            for (p, m) in psi.iter_mut().zip(v) {
                *p *= m;
            }
        };
        if let Some(h) = &f.half_v {
            mul(psi, h);
        }
        for s in 0..steps {
            self.kinetic(psi, &f.kinetic, scratch);
            match (&f.full_v, &f.half_v) {
                (Some(full), _) if s + 1 < steps => mul(psi, full),
                (_, Some(half)) => mul(psi, half),
                _ => {}
            }
        }
    }

    /// Largest wave number carrying more than 10⁻¹² of the state's weight.
    fn occupied_k(&self, psi: &[Complex64]) -> f64 {
        let mut buf = psi.to_vec();
        self.fwd.process(&mut buf);
        let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
        let mut order: Vec<(f64, f64)> = buf.iter().zip(&self.ks).map(|(c, k)| (k.abs(), c.norm_sqr())).collect();
        order.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut tail = 0.0;
        for (k, w) in order {
            tail += w;
            if tail > 1e-12 * total {
                return k;
            }
        }
        0.0
    }

    /// Step bound from the phase-advance rule for the given potentials.
    fn max_step(&self, vg: &[f64], vr: &[f64], states: &[&[Complex64]]) -> f64 {
        let vmax = vg.iter().chain(vr).fold(0.0f64, |m, v| m.max(v.abs()));
        let kocc = states.iter().map(|s| self.occupied_k(s)).fold(0.0f64, f64::max);
        // kinetic phase of the whole grid bandwidth would be far too strict;
        // the occupied band is what the splitting error depends on
        let kin = if kocc > 0.0 {
            self.opts.max_phase * 2.0 * self.mass / (HBAR * kocc * kocc)
        } else {
            f64::INFINITY
        };
        let pot = if vmax > 0.0 {
            self.opts.max_phase * HBAR / vmax
        } else {
            f64::INFINITY
        };
        let mut dt = kin.min(pot);
        if let Some(cap) = self.opts.max_dt {
            dt = dt.min(cap);
        }
        dt
    }

    /// Q(t) = ⟨ψ_g(t)|R U_r(t) R†|ψ_g(0)⟩ and M(t) = ⟨ψ_g(t)|R R†|ψ_g(t)⟩ at
    /// the requested times, which must be sorted and ≥ 0.
    pub fn overlaps(
        &self,
        initial: &GridState,
        r: &StorageOperator,
        v_g: &Potential,
        v_r: &Potential,
        times: &[f64],
    ) -> Result<Overlaps> {
        if initial.grid != self.grid {
            return Err(Error::invalid("initial state lives on a different grid"));
        }
        r.validate(&self.grid)?;
        if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::invalid("times must be finite and >= 0"));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("times must be sorted"));
        }
        let xs = self.grid.xs();
        let dx = self.grid.dx;
        let vg: Vec<f64> = xs.iter().map(|&x| v_g.eval(x)).collect();
        let vr: Vec<f64> = xs.iter().map(|&x| v_r.eval(x)).collect();
        if vg.iter().chain(&vr).any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential is not finite on the grid"));
        }
        let f = r.factor(&self.grid);
        let mut psi_g = initial.psi.clone();
        let mut psi_r: Vec<Complex64> = f.iter().zip(&psi_g).map(|(a, b)| a * b).collect();
        let norm_g0 = initial.norm_sqr();
        let norm_r0: f64 = psi_r.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
        if !(norm_g0 > 0.0) {
            return Err(Error::invalid("initial state is zero"));
        }
        let m0 = norm_r0;

        let g_free = vg.iter().all(|v| *v == 0.0);
        let r_free = vr.iter().all(|v| *v == 0.0);
        let free = g_free && r_free;
        let dt_max = if free {
            f64::INFINITY
        } else {
            self.max_step(&vg, &vr, &[&psi_g, &psi_r])
        };
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())];

        let mut out = Overlaps {
            times: times.to_vec(),
            q: Vec::with_capacity(times.len()),
            m_t: Vec::with_capacity(times.len()),
            m0,
            steps: 0,
        };
        let mut now = 0.0;
        for &t in times {
            let span = t - now;
            if span > 0.0 {
                let steps = if free { 1 } else { ((span / dt_max).ceil() as usize).max(1) };
                let dt = span / steps as f64;
                // a free evolution is exact in one kinetic step
                if g_free {
                    self.advance(&mut psi_g, &self.factors(&vg, span), 1, &mut scratch);
                } else {
                    self.advance(&mut psi_g, &self.factors(&vg, dt), steps, &mut scratch);
                }
                if r_free {
                    self.advance(&mut psi_r, &self.factors(&vr, span), 1, &mut scratch);
                } else {
                    self.advance(&mut psi_r, &self.factors(&vr, dt), steps, &mut scratch);
                }
                out.steps += steps;
                now = t;
                let ng: f64 = psi_g.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
                let nr: f64 = psi_r.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
                let drift = ((ng - norm_g0) / norm_g0).abs().max(if norm_r0 > 0.0 {
                    ((nr - norm_r0) / norm_r0).abs()
                } else {
                    0.0
                });
                if drift > self.opts.norm_limit {
                    return Err(Error::NormDrift {
                        drift,
                        steps: out.steps,
                        limit: self.opts.norm_limit,
                    });
                }
            }
            let mut q = Complex64::new(0.0, 0.0);
            let mut m = 0.0;
            for ((fv, g), rr) in f.iter().zip(&psi_g).zip(&psi_r) {
                let rg = fv * g;
                q += rg.conj() * rr;
                m += rg.norm_sqr();
            }
            out.q.push(q * dx);
            out.m_t.push(m * dx);
        }
        Ok(out)
    }
}
