//! Closed-form Q_n(t), M_n(t), M_n(0) for oscillator eigenstates released
//! into free space and probed by a Gaussian mode, in the Hermite basis.
//!
//! The double sums over Hermite coefficients cancel heavily for large n, so
//! everything is evaluated in double-double arithmetic and each result carries
//! an estimate of its own rounding error.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use twofloat::TwoFloat;

use super::propagate::Overlaps;
use super::thermal::{thermal_efficiency, ThermalSpec};
use crate::constants::HBAR;
use crate::{CoherenceSeries, DecayCurve, Error, Result};

type Dd = TwoFloat;
type Cd = Complex<Dd>;

/// Largest n accepted before the coefficients leave the f64 exponent range.
pub const N_LIMIT: usize = 100;
/// Default bound on the relative rounding estimate.
pub const DEFAULT_ERROR_LIMIT: f64 = 1e-9;
// unit roundoff of double-double, with headroom for the recurrences
const DD_EPS: f64 = 1e-30;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

fn cd(re: Dd, im: Dd) -> Cd {
    Complex::new(re, im)
}

fn to_c64(z: Cd) -> Complex64 {
    Complex64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}

fn cnorm(z: &Cd) -> Dd {
    (z.re * z.re + z.im * z.im).sqrt()
}

// TwoFloat's `/` is only accurate to f64 precision, so division goes through
// a Newton-refined reciprocal.
fn recip(y: Dd) -> Dd {
    let one = dd(1.0);
    let r0 = dd(1.0 / y.hi());
    let r1 = r0 + r0 * (one - y * r0);
    r1 + r1 * (one - y * r1)
}

fn ddiv(x: Dd, y: Dd) -> Dd {
    let r = recip(y);
    let q = x * r;
    q + r * (x - y * q)
}

fn cdiv(a: Cd, b: Cd) -> Cd {
    let inv = recip(b.re * b.re + b.im * b.im);
    let num = a * b.conj();
    cd(num.re * inv, num.im * inv)
}

fn cinv(b: Cd) -> Cd {
    cdiv(cd(dd(1.0), dd(0.0)), b)
}

/// Principal square root without trigonometric functions.
fn csqrt(z: Cd) -> Cd {
    let zero = dd(0.0);
    if z.re == zero && z.im == zero {
        return z;
    }
    let r = cnorm(&z);
    let half = dd(0.5);
    if z.re >= zero {
        let s = ((r + z.re) * half).sqrt();
        cd(s, ddiv(z.im * half, s))
    } else {
        let s = ((r - z.re) * half).sqrt();
        let re = ddiv(z.im.abs() * half, s);
        cd(re, if z.im < zero { -s } else { s })
    }
}

/// Normalized Hermite coefficients c_r = d_{n,r}/√(2ⁿn!), where
/// H_n(x) = Σ d_{n,r} x^r. Only r ≡ n (mod 2) are nonzero.
fn hermite_coefficients(n: usize) -> Vec<Dd> {
    let mut c = vec![dd(0.0); n + 1];
    let mut lead = dd(1.0);
    for k in 1..=n {
        lead = ddiv(lead * dd(2.0), dd(k as f64));
    }
    c[n] = lead.sqrt();
    let mut m = 0;
    while n >= 2 * m + 2 {
        let r = n - 2 * m;
        let ratio = -ddiv(dd((r * (r - 1)) as f64), dd(4.0 * (m + 1) as f64));
        c[r - 2] = c[r] * ratio;
        m += 1;
    }
    c
}

/// e_h = (2h)!/(h!·4^h) = ∫ x^{2h} e^{−x²} dx/√π.
fn gauss_moments(h_max: usize) -> Vec<Dd> {
    let mut e = vec![dd(1.0); h_max + 1];
    for h in 0..h_max {
        e[h + 1] = e[h] * dd((2 * h + 1) as f64) * dd(0.5);
    }
    e
}

/// Σ_{r,s} c_r c_s e_h a^r b^{−h}, h = (r+s)/2, returning the sum and
/// Σ|terms|.
fn double_sum(c: &[Dd], e: &[Dd], a: Cd, b_inv: Cd) -> (Cd, f64) {
    let n = c.len() - 1;
    let mut a_pow = vec![cd(dd(1.0), dd(0.0)); n + 1];
    for r in 1..=n {
        a_pow[r] = a_pow[r - 1] * a;
    }
    let mut b_pow = vec![cd(dd(1.0), dd(0.0)); n + 1];
    for h in 1..=n {
        b_pow[h] = b_pow[h - 1] * b_inv;
    }
    let mut sum = cd(dd(0.0), dd(0.0));
    let mut abs = 0.0;
    for r in (n % 2..=n).step_by(2) {
        for s in (n % 2..=n).step_by(2) {
            let h = (r + s) / 2;
            let coef = c[r] * c[s] * e[h];
            let term = a_pow[r] * b_pow[h] * coef;
            abs += to_c64(term).norm();
            sum = sum + term;
        }
    }
    (sum, abs)
}

/// Result of one closed-form evaluation, per unit quantization length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseOverlap {
    pub q: Complex64,
    pub m_t: f64,
    pub m0: f64,
    /// Relative rounding estimate of the worst of the three sums.
    pub error_estimate: f64,
}

/// Q_n(t), M_n(t), M_n(0) for oscillator state n of length a₀ evolving
/// freely after release, with a Gaussian mode of waist w and no recoil.
/// Values are per unit quantization length; the η ratio does not depend on it.
pub fn hermite_release_closedform(n: usize, t: f64, a0: f64, w: f64, mass: f64) -> Result<ReleaseOverlap> {
    hermite_release_closedform_with_limit(n, t, a0, w, mass, DEFAULT_ERROR_LIMIT)
}

pub fn hermite_release_closedform_with_limit(
    n: usize,
    t: f64,
    a0: f64,
    w: f64,
    mass: f64,
    error_limit: f64,
) -> Result<ReleaseOverlap> {
    if !(a0 > 0.0) || !(w > 0.0) || !(mass > 0.0) || !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("closed form needs a₀, w, m > 0 and finite t >= 0"));
    }
    if n > N_LIMIT {
        return Err(Error::Unstable {
            n,
            estimate: f64::INFINITY,
            limit: error_limit,
        });
    }
    let c = hermite_coefficients(n);
    let e = gauss_moments(n);
    let one = cd(dd(1.0), dd(0.0));
    let v0_sq = dd((2.0 / (PI * w * w)).sqrt());
    let (a0d, wd) = (dd(a0), dd(w));
    let ratio_sq = ddiv(a0d * a0d, wd * wd);

    // M_n(0)
    let xi6 = cd(dd(1.0) + dd(2.0) * ratio_sq, dd(0.0));
    let (s0, abs0) = double_sum(&c, &e, one, cinv(xi6));
    let m0 = to_c64(cdiv(s0 * v0_sq, csqrt(xi6))).re;
    let mut estimate = DD_EPS * abs0 / to_c64(s0).norm();
    if t == 0.0 {
        return finish(
            ReleaseOverlap {
                q: Complex64::new(m0, 0.0),
                m_t: m0,
                m0,
                error_estimate: estimate,
            },
            n,
            error_limit,
        );
    }

    // A = ħt/m carries the dispersion
    let a = ddiv(dd(HBAR) * dd(t), dd(mass));
    let eval = |p: Dd, with_mode_term: bool| -> (Cd, f64) {
        let p2 = p * p;
        let xi1 = cd(dd(0.5) + p2, ddiv(a0d * a0d, dd(2.0) * a));
        let xi3 = csqrt(one - cinv(xi1));
        let xi4 = cdiv(cd(p2, dd(0.0)), xi1 * xi3);
        // ξ₁* − ξ₂ with ξ₂ = p⁴/ξ₁ equals (|ξ₁|² − p⁴)/ξ₁, and
        // |ξ₁|² − p⁴ = p² + ¼ + Im(ξ₁)² has no cancellation at small t
        let mut xi5 = cdiv(cd(p2 + dd(0.25) + xi1.im * xi1.im, dd(0.0)), xi1);
        if with_mode_term {
            xi5 = xi5 + cd(ratio_sq, dd(0.0));
        }
        let (s, abs) = double_sum(&c, &e, xi4, cinv(xi5));
        let mut xi3n = one;
        for _ in 0..n {
            xi3n = xi3n * xi3;
        }
        let pre = cdiv(cd(v0_sq * p, dd(0.0)), csqrt(xi1) * csqrt(xi5)) * xi3n;
        (pre * s, DD_EPS * abs / to_c64(s).norm())
    };
    let (q, eq) = eval(ddiv(a0d * wd, dd(2.0) * a), true);
    let (m, em) = eval(ddiv(a0d * wd, dd(8.0).sqrt() * a), false);
    estimate = estimate.max(eq).max(em);
    finish(
        ReleaseOverlap {
            q: to_c64(q),
            m_t: to_c64(m).re,
            m0,
            error_estimate: estimate,
        },
        n,
        error_limit,
    )
}

fn finish(r: ReleaseOverlap, n: usize, limit: f64) -> Result<ReleaseOverlap> {
    if !(r.error_estimate <= limit) || !r.q.re.is_finite() || !r.m_t.is_finite() {
        return Err(Error::Unstable {
            n,
            estimate: r.error_estimate,
            limit,
        });
    }
    Ok(r)
}

/// Per-state overlaps on a time grid from the closed form.
pub fn hermite_release_overlaps(n: usize, times: &[f64], a0: f64, w: f64, mass: f64) -> Result<Overlaps> {
    let mut o = Overlaps {
        times: times.to_vec(),
        q: Vec::with_capacity(times.len()),
        m_t: Vec::with_capacity(times.len()),
        m0: 0.0,
        steps: 0,
    };
    for &t in times {
        let r = hermite_release_closedform(n, t, a0, w, mass)?;
        o.q.push(r.q);
        o.m_t.push(r.m_t);
        o.m0 = r.m0;
    }
    if times.is_empty() {
        o.m0 = hermite_release_closedform(n, 0.0, a0, w, mass)?.m0;
    }
    Ok(o)
}

/// Thermal release efficiency in 1D from the closed form, states 0..=n_max
/// evaluated in parallel.
pub fn hermite_release_thermal(
    spec: &ThermalSpec,
    times: &[f64],
    a0: f64,
    w: f64,
    mass: f64,
) -> Result<(DecayCurve, CoherenceSeries)> {
    spec.validate()?;
    let per_state = (0..=spec.n_max)
        .into_par_iter()
        .map(|n| hermite_release_overlaps(n, times, a0, w, mass))
        .collect::<Result<Vec<_>>>()?;
    thermal_efficiency(&per_state, spec)
}
