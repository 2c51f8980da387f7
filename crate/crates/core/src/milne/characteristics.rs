use serde::{Deserialize, Serialize};

/// Why a traced path stopped before the requested time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathExit {
    /// Reached `η = 0`.
    Boundary,
    /// Left the strip where the chart is valid (`εη ≥ 1` on a convex face).
    ChartEdge,
    /// Passed the requested height cap.
    Escaped,
}

/// Sampled characteristic of the curvature-corrected half-space operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacteristicPath {
    pub eps: f64,
    /// +1 for a convex face, −1 for a non-convex one.
    pub convexity: f64,
    pub t: Vec<f64>,
    pub eta: Vec<f64>,
    pub phi: Vec<f64>,
    pub invariant: Vec<f64>,
    pub exit: Option<PathExit>,
}

/// `(1 − κεη) cos φ`, constant along characteristics.
pub fn conserved_quantity(eps: f64, convexity: f64, eta: f64, phi: f64) -> f64 {
    (1.0 - convexity * eps * eta) * phi.cos()
}

fn rhs(eps: f64, k: f64, eta: f64, phi: f64) -> (f64, f64) {
    (phi.sin(), -eps * k * phi.cos() / (1.0 - k * eps * eta))
}

fn rk4(eps: f64, k: f64, eta: f64, phi: f64, h: f64) -> (f64, f64) {
    let (a1, b1) = rhs(eps, k, eta, phi);
    let (a2, b2) = rhs(eps, k, eta + 0.5 * h * a1, phi + 0.5 * h * b1);
    let (a3, b3) = rhs(eps, k, eta + 0.5 * h * a2, phi + 0.5 * h * b2);
    let (a4, b4) = rhs(eps, k, eta + h * a3, phi + h * b3);
    (
        eta + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        phi + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
    )
}

/// Integrate `dη/dt = sin φ`, `dφ/dt = −κε cos φ/(1 − κεη)` for time
/// `t_span` (negative for backward tracing) with classical RK4.
pub fn trace_characteristic(eps: f64, convexity: f64, start: (f64, f64), t_span: f64, step: f64) -> CharacteristicPath {
    trace_characteristic_capped(eps, convexity, start, t_span, step, f64::INFINITY)
}

/// As [`trace_characteristic`], also stopping once `η > eta_cap`.
pub fn trace_characteristic_capped(
    eps: f64,
    convexity: f64,
    start: (f64, f64),
    t_span: f64,
    step: f64,
    eta_cap: f64,
) -> CharacteristicPath {
    let k = convexity.signum();
    let n = (t_span.abs() / step).ceil().max(1.0) as usize;
    let h = t_span / n as f64;
    let (mut eta, mut phi) = start;
    let mut path = CharacteristicPath {
        eps,
        convexity: k,
        t: vec![0.0],
        eta: vec![eta],
        phi: vec![phi],
        invariant: vec![conserved_quantity(eps, k, eta, phi)],
        exit: None,
    };
    let edge = if k > 0.0 { 1.0 / eps } else { f64::INFINITY };
    for i in 1..=n {
        let (ne, np) = rk4(eps, k, eta, phi, h);
        let t = i as f64 * h;
        if ne < 0.0 {
            // secant on the step fraction so the last sample sits on η = 0
            let (mut f0, mut e0) = (0.0, eta);
            let (mut f1, mut e1) = (1.0, ne);
            for _ in 0..30 {
                if (e1 - e0).abs() < 1e-300 || e1.abs() < 1e-15 {
                    break;
                }
                let f2 = f1 - e1 * (f1 - f0) / (e1 - e0);
                (f0, e0) = (f1, e1);
                f1 = f2;
                e1 = rk4(eps, k, eta, phi, f1 * h).0;
            }
            let (pe, pp) = rk4(eps, k, eta, phi, f1 * h);
            path.push(t - h + f1 * h, pe, pp);
            path.exit = Some(PathExit::Boundary);
            return path;
        }
        if k > 0.0 && ne >= edge * (1.0 - 1e-9) {
            path.exit = Some(PathExit::ChartEdge);
            return path;
        }
        eta = ne;
        phi = np;
        path.push(t, eta, phi);
        if eta > eta_cap {
            path.exit = Some(PathExit::Escaped);
            return path;
        }
    }
    path
}

impl CharacteristicPath {
    fn push(&mut self, t: f64, eta: f64, phi: f64) {
        self.t.push(t);
        self.eta.push(eta);
        self.phi.push(phi);
        self.invariant
            .push(conserved_quantity(self.eps, self.convexity, eta, phi));
    }

    pub fn reached_boundary(&self) -> bool {
        self.exit == Some(PathExit::Boundary)
    }

    /// Largest deviation of the conserved quantity from its initial value.
    pub fn invariant_drift(&self) -> f64 {
        let e0 = self.invariant[0];
        self.invariant.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

/// Mask of points whose characteristic orbit never touches `η = 0`.
///
/// Indexed `[eta][phi]`. On a convex face every orbit inside the chart
/// reaches the boundary; on a non-convex face the orbit misses it exactly
/// when the conserved quantity exceeds its largest boundary value,
/// `(1 + εη) cos φ > 1`.
pub fn classify_hollow(eps: f64, convexity: f64, etas: &[f64], phis: &[f64]) -> Vec<Vec<bool>> {
    etas.iter()
        .map(|&eta| {
            phis.iter()
                .map(|&phi| convexity < 0.0 && conserved_quantity(eps, convexity, eta, phi) > 1.0)
                .collect()
        })
        .collect()
}

/// Direct check by integration: does the orbit through `(eta, phi)` hit
/// `η = 0` forward or backward before rising above `eta_cap`?
pub fn orbit_touches_boundary(eps: f64, convexity: f64, eta: f64, phi: f64, eta_cap: f64, step: f64) -> bool {
    let span = 4.0 * (eta_cap + 2.0 / eps);
    [span, -span]
        .iter()
        .any(|&t| trace_characteristic_capped(eps, convexity, (eta, phi), t, step, eta_cap).reached_boundary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn normal_directions_move_straight() {
        for k in [1.0, -1.0] {
            let p = trace_characteristic(0.1, k, (1.0, FRAC_PI_2), 2.0, 0.01);
            assert!(p.phi.iter().all(|v| (v - FRAC_PI_2).abs() < 1e-14));
            assert!((p.eta.last().unwrap() - 3.0).abs() < 1e-12);
            let q = trace_characteristic(0.1, k, (1.0, -FRAC_PI_2), 0.5, 0.01);
            assert!((q.eta.last().unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_is_small_and_agrees_with_half_step() {
        for (k, start) in [(1.0, (2.0, 0.3)), (-1.0, (1.0, -0.2)), (-1.0, (4.0, 0.05))] {
            let a = trace_characteristic(0.1, k, start, 3.0, 0.01);
            let b = trace_characteristic(0.1, k, start, 3.0, 0.005);
            assert!(a.invariant_drift() < 3e-8, "drift {}", a.invariant_drift());
            assert!((a.eta.last().unwrap() - b.eta.last().unwrap()).abs() < 1e-8);
            assert!((a.phi.last().unwrap() - b.phi.last().unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn convex_mask_is_empty() {
        let etas: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
        let phis: Vec<f64> = (0..=40)
            .map(|j| -FRAC_PI_2 + std::f64::consts::PI * j as f64 / 40.0)
            .collect();
        let m = classify_hollow(0.1, 1.0, &etas, &phis);
        assert!(m.iter().flatten().all(|v| !v));
        let n = classify_hollow(0.1, -1.0, &etas, &phis);
        assert!(n.iter().flatten().any(|v| *v));
        assert!(!n[0].iter().any(|v| *v));
    }

    #[test]
    fn convex_backward_paths_reach_boundary() {
        for eta0 in [0.5, 3.0, 8.0] {
            for phi0 in [-1.2, -0.3, 0.0, 0.4, 1.3] {
                assert!(orbit_touches_boundary(0.1, 1.0, eta0, phi0, 50.0, 0.01));
            }
        }
    }

    #[test]
    fn mask_matches_integration_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eps = 0.1;
        let mut checked = 0;
        while checked < 500 {
            let eta: f64 = rng.random_range(0.0..20.0);
            let phi: f64 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
            let e = conserved_quantity(eps, -1.0, eta, phi);
            if (e - 1.0).abs() < 1e-3 {
                continue;
            }
            let hollow = classify_hollow(eps, -1.0, &[eta], &[phi])[0][0];
            let touches = orbit_touches_boundary(eps, -1.0, eta, phi, 60.0, 0.02);
            assert_eq!(hollow, !touches, "eta={eta} phi={phi} E={e}");
            checked += 1;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn invariant_conserved(k in prop::sample::select(vec![1.0, -1.0]), eta in 0.5f64..6.0, phi in -1.5f64..1.5) {
            let p = trace_characteristic(0.1, k, (eta, phi), 2.0, 0.01);
            prop_assert!(p.invariant_drift() < 1e-8 * 2.0 + 1e-12);
        }
    }
}
