use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fit_line;

/// Least-squares line through `(log ε, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    /// Some value was zero or negative, so no fit was made.
    pub degenerate: bool,
    /// Every value was exactly zero.
    pub exact_zero: bool,
}

/// Fit `log value = slope · log ε + intercept` over every pair.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::Config(format!(
            "rate fit needs at least 3 pairs, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|(e, _)| !(*e > 0.0)) {
        return Err(Error::Config("rate fit needs positive eps".into()));
    }
    if pairs.iter().any(|(_, v)| !(*v > 0.0)) {
        return Ok(RateFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            residual: f64::NAN,
            degenerate: true,
            exact_zero: pairs.iter().all(|(_, v)| *v == 0.0),
        });
    }
    let x: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, residual) = fit_line(&x, &y);
    Ok(RateFit {
        slope,
        intercept,
        residual,
        degenerate: false,
        exact_zero: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SWEEP: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

    #[test]
    fn exact_powers() {
        let half: Vec<(f64, f64)> = SWEEP.iter().map(|e| (*e, e.sqrt())).collect();
        let f = fit_rate(&half).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12 && f.residual < 1e-12);
        let sq: Vec<(f64, f64)> = SWEEP.iter().map(|e| (*e, 3.0 * e * e)).collect();
        let f = fit_rate(&sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_values_are_flagged() {
        let z: Vec<(f64, f64)> = SWEEP.iter().map(|e| (*e, 0.0)).collect();
        let f = fit_rate(&z).unwrap();
        assert!(f.degenerate && f.exact_zero && f.slope.is_nan());
        let mut mixed = z.clone();
        mixed[0].1 = 1.0;
        let f = fit_rate(&mixed).unwrap();
        assert!(f.degenerate && !f.exact_zero);
    }

    #[test]
    fn too_few_pairs() {
        assert!(fit_rate(&[(0.1, 1.0), (0.05, 0.5)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_slope_and_intercept(p in -3.0f64..3.0, c in 0.01f64..100.0) {
            let pairs: Vec<(f64, f64)> = SWEEP.iter().map(|e| (*e, c * e.powf(p))).collect();
            let f = fit_rate(&pairs).unwrap();
            prop_assert!((f.slope - p).abs() < 1e-10);
            prop_assert!((f.intercept - c.ln()).abs() < 1e-9);
        }

        #[test]
        fn scaling_values_keeps_slope(p in -2.0f64..2.0, s in 0.1f64..10.0, noise in prop::collection::vec(0.9f64..1.1, 5)) {
            let a: Vec<(f64, f64)> = SWEEP.iter().zip(&noise).map(|(e, n)| (*e, n * e.powf(p))).collect();
            let b: Vec<(f64, f64)> = a.iter().map(|(e, v)| (*e, s * v)).collect();
            let (fa, fb) = (fit_rate(&a).unwrap(), fit_rate(&b).unwrap());
            prop_assert!((fa.slope - fb.slope).abs() < 1e-10);
            prop_assert!((fa.residual - fb.residual).abs() < 1e-10);
        }
    }
}
