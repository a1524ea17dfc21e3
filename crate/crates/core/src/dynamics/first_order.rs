//! Order-one algebras: the dynamical map is affine, s(x) = A x + (α, 0) with
//! A = [[2p̂, q̂ − p̂²], [1, 0]], so γ₁ = 2p̂ and β₁ = q̂ − p̂².
//!
//! When A has eigenvalues e^{±2iθ} with θ = kπ/n, gcd(k, n) = 1, the map is
//! conjugate to a rotation of order n about its fixed point, every other
//! point has minimal period n, and sᴺ is the identity whenever n | N.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::map::{step, PlanePoint};
use super::orbits::PeriodicOrbit;
use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};

const UNIT_CIRCLE_TOL: f64 = 1e-12;
const ROTATION_TOL: f64 = 1e-9;
/// Radii (relative to the fixed point) at which sample orbits are drawn.
const SAMPLE_RADII: [f64; 4] = [0.1, 0.2, 0.3, 0.45];

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Order-one algebra with p̂ = cos 2θ, q̂ = −sin² 2θ for θ = kπ/n,
/// i.e. γ₁ = 2 cos(2πk/n) and β₁ = −1.
pub fn theta_params(n: u64, k: u64, alpha: f64) -> Result<AlgebraParams> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("n and k must be positive".into()));
    }
    if gcd(n, k) != 1 {
        return Err(Error::NonPrimitive { n, k });
    }
    if 2 * k >= n {
        return Err(Error::InvalidParameter(format!("need 0 < k/n < 1/2, got {k}/{n}")));
    }
    let two_theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    AlgebraParams::new(alpha, vec![-1.0], vec![2.0 * two_theta.cos()])
}

/// Classification of an order-one algebra's dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderClassification {
    pub p_hat: f64,
    pub q_hat: f64,
    /// Unique fixed point, when 1 − β₁ − γ₁ ≠ 0.
    pub fixed_point: Option<PlanePoint>,
    /// The eigenvalues p̂ ± √q̂ of the linear part.
    pub eigenvalues: [(f64, f64); 2],
    pub on_unit_circle: bool,
    /// (k, n) with θ = kπ/n in lowest terms, if n ≤ the requested bound.
    pub rotation: Option<(u64, u64)>,
    /// Minimal period shared by every non-fixed point.
    pub nonfixed_period: Option<usize>,
    /// Sample orbits inside the open quadrant (only when α > 0).
    pub sample_orbits: Vec<PeriodicOrbit>,
}

impl FirstOrderClassification {
    pub fn has_loop_representations(&self) -> bool {
        !self.sample_orbits.is_empty()
    }
}

pub fn first_order_analytic(p: &AlgebraParams, n_max: u64) -> Result<FirstOrderClassification> {
    if p.order() != 1 {
        return Err(Error::WrongOrder(p.order()));
    }
    let (beta, gamma, alpha) = (p.beta()[0], p.gamma()[0], p.alpha());
    let p_hat = gamma / 2.0;
    let q_hat = beta + p_hat * p_hat;
    let root = Complex64::new(q_hat, 0.0).sqrt();
    let lambda = Complex64::new(p_hat, 0.0) + root;
    let mu = Complex64::new(p_hat, 0.0) - root;

    let denom = 1.0 - beta - gamma;
    let fixed_point = (denom != 0.0).then(|| {
        let x = alpha / denom;
        PlanePoint::new(x, x)
    });

    let on_unit_circle = q_hat < 0.0 && (lambda.norm() - 1.0).abs() < UNIT_CIRCLE_TOL;
    let mut rotation = None;
    if on_unit_circle {
        // λ = e^{2iθ}; look for 2θ = 2πk/n
        let turns = lambda.arg() / (2.0 * std::f64::consts::PI);
        rotation = (1..=n_max).find_map(|n| {
            let k = (turns * n as f64).round();
            ((turns * n as f64 - k).abs() < ROTATION_TOL && k > 0.0).then_some((k as u64, n))
        });
    }
    let nonfixed_period = rotation.map(|(_, n)| n as usize);

    let mut sample_orbits = Vec::new();
    if let (Some(period), Some(fp)) = (nonfixed_period, fixed_point) {
        if alpha > 0.0 {
            for rho in SAMPLE_RADII {
                let start = PlanePoint::new(fp.d * (1.0 + rho), fp.dt);
                let mut pts = Vec::with_capacity(period);
                let mut x = start;
                for _ in 0..period {
                    pts.push(x);
                    x = step(p, x);
                }
                if let Ok(o) = PeriodicOrbit::new(p, pts) {
                    sample_orbits.push(o);
                }
            }
        }
    }

    Ok(FirstOrderClassification {
        p_hat,
        q_hat,
        fixed_point,
        eigenvalues: [(lambda.re, lambda.im), (mu.re, mu.im)],
        on_unit_circle,
        rotation,
        nonfixed_period,
        sample_orbits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::map::apply_n;
    use crate::dynamics::orbits::{minimal_period, TOL_ORBIT};

    #[test]
    fn theta_examples() {
        let p = theta_params(3, 1, 1.0).unwrap();
        assert_eq!(p.beta(), &[-1.0]);
        assert!((p.gamma()[0] + 1.0).abs() < 1e-15);
        let p = theta_params(4, 1, 1.0).unwrap();
        assert!(p.gamma()[0].abs() < 1e-15);
        assert!(matches!(theta_params(4, 2, 1.0), Err(Error::NonPrimitive { n: 4, k: 2 })));
        assert!(theta_params(5, 3, 1.0).is_err());
    }

    #[test]
    fn period_three_classification() {
        let p = theta_params(3, 1, 1.0).unwrap();
        let c = first_order_analytic(&p, 12).unwrap();
        let fp = c.fixed_point.unwrap();
        assert!((fp.d - 1.0 / 3.0).abs() < 1e-15 && (fp.dt - 1.0 / 3.0).abs() < 1e-15);
        assert!(c.on_unit_circle);
        assert_eq!(c.rotation, Some((1, 3)));
        assert_eq!(c.nonfixed_period, Some(3));
        assert!(!c.sample_orbits.is_empty());
        for o in &c.sample_orbits {
            assert_eq!(o.period(), 3);
            assert!(o.defect(&p) < TOL_ORBIT);
        }
        let x = PlanePoint::new(0.4, 0.3);
        assert_eq!(minimal_period(&p, x, 3, 1e-12).unwrap(), 3);
        assert!(PeriodicOrbit::new(&p, vec![x, PlanePoint::new(0.3, 0.4), PlanePoint::new(0.3, 0.3)]).is_ok());
    }

    #[test]
    fn quarter_turn() {
        let p = theta_params(4, 1, 1.0).unwrap();
        let c = first_order_analytic(&p, 12).unwrap();
        assert!(c.p_hat.abs() < 1e-15);
        assert!((c.q_hat + 1.0).abs() < 1e-15);
        assert_eq!(c.nonfixed_period, Some(4));
        let x = PlanePoint::new(0.9, 0.2);
        assert!(apply_n(&p, x, 4).unwrap().dist(&x) < 1e-14);
    }

    #[test]
    fn off_circle_has_no_loops() {
        // p̂ = 2, q̂ = −1: γ₁ = 4, β₁ = −5, |λ| = √5
        let p = AlgebraParams::new(1.0, vec![-5.0], vec![4.0]).unwrap();
        let c = first_order_analytic(&p, 20).unwrap();
        assert!((c.p_hat - 2.0).abs() < 1e-15 && (c.q_hat + 1.0).abs() < 1e-15);
        assert!(!c.on_unit_circle);
        assert!(c.rotation.is_none());
        assert!(!c.has_loop_representations());
        let (re, im) = c.eigenvalues[0];
        assert!((re.hypot(im) - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_alpha_gives_no_samples() {
        let p = theta_params(5, 2, -1.0).unwrap();
        let c = first_order_analytic(&p, 10).unwrap();
        assert_eq!(c.nonfixed_period, Some(5));
        assert!(c.sample_orbits.is_empty());
    }

    #[test]
    fn wrong_order_rejected() {
        let p = crate::algebra::henon_preset(5.0, 0.3, 3.0);
        assert!(matches!(first_order_analytic(&p, 5), Err(Error::WrongOrder(2))));
    }

    #[test]
    fn rotation_beyond_bound_not_reported() {
        let p = theta_params(7, 2, 1.0).unwrap();
        assert!(first_order_analytic(&p, 6).unwrap().rotation.is_none());
        assert_eq!(first_order_analytic(&p, 7).unwrap().rotation, Some((2, 7)));
    }
}
