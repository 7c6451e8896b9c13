//! Combining sampled curves: products of independent factors and weighted
//! mixtures over uncorrelated initial states.

use super::DecayCurve;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Composition {
    /// Pointwise product of η/η₀ factors.
    CartesianProduct,
    /// Σ P_n η_n with weights summing to one.
    MixtureAverage(Vec<f64>),
}

pub fn compose(curves: &[DecayCurve], mode: &Composition) -> Result<DecayCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::invalid("nothing to compose"))?;
    for c in &curves[1..] {
        if c.times != first.times {
            return Err(Error::invalid("curves are sampled on different time grids"));
        }
    }
    let n = first.len();
    let eta = match mode {
        Composition::CartesianProduct => (0..n)
            .map(|i| curves.iter().map(|c| c.eta[i]).product())
            .collect(),
        Composition::MixtureAverage(w) => {
            if w.len() != curves.len() {
                return Err(Error::invalid("one weight per curve is required"));
            }
            if w.iter().any(|p| !(*p >= 0.0)) {
                return Err(Error::invalid("mixture weights must be >= 0"));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
            }
            (0..n)
                .map(|i| curves.iter().zip(w).map(|(c, p)| p * c.eta[i]).sum())
                .collect()
        }
    };
    let mut out = DecayCurve::new(first.times.clone(), eta)?;
    out.warnings = curves.iter().flat_map(|c| c.warnings.clone()).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(v: &[f64]) -> DecayCurve {
        DecayCurve::new((0..v.len()).map(|i| i as f64).collect(), v.to_vec()).unwrap()
    }

    #[test]
    fn product_and_mixture() {
        let a = curve(&[1.0, 0.5, 0.25]);
        let b = curve(&[1.0, 0.8, 0.1]);
        let p = compose(&[a.clone(), b.clone()], &Composition::CartesianProduct).unwrap();
        assert_eq!(p.eta, vec![1.0, 0.4, 0.025]);
        let m = compose(&[a.clone(), b], &Composition::MixtureAverage(vec![1.0, 0.0])).unwrap();
        assert_eq!(m.eta, a.eta);
    }

    #[test]
    fn rejects_bad_input() {
        let a = curve(&[1.0, 0.5]);
        let b = DecayCurve::new(vec![0.0, 2.0], vec![1.0, 0.5]).unwrap();
        assert!(compose(&[a.clone(), b], &Composition::CartesianProduct).is_err());
        assert!(compose(&[a.clone(), a.clone()], &Composition::MixtureAverage(vec![0.5, 0.6])).is_err());
        assert!(compose(&[], &Composition::CartesianProduct).is_err());
    }
}
