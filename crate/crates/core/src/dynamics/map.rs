use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};

/// Iterates whose coordinates exceed this magnitude are treated as escaped.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// An eigenvalue pair (d, d̃) of (WW†, W†W) attached to a digraph vertex.
/// Serialized as the two-element array `[d, dt]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PlanePoint {
    pub d: f64,
    pub dt: f64,
}

impl From<[f64; 2]> for PlanePoint {
    fn from([d, dt]: [f64; 2]) -> Self {
        Self { d, dt }
    }
}

impl From<PlanePoint> for [f64; 2] {
    fn from(x: PlanePoint) -> Self {
        [x.d, x.dt]
    }
}

impl PlanePoint {
    pub const fn new(d: f64, dt: f64) -> Self {
        Self { d, dt }
    }

    pub fn dist(&self, other: &PlanePoint) -> f64 {
        (self.d - other.d).hypot(self.dt - other.dt)
    }

    /// Sup-norm distance.
    pub fn sup_dist(&self, other: &PlanePoint) -> f64 {
        (self.d - other.d).abs().max((self.dt - other.dt).abs())
    }

    pub fn norm(&self) -> f64 {
        self.d.hypot(self.dt)
    }

    pub fn is_finite(&self) -> bool {
        self.d.is_finite() && self.dt.is_finite()
    }

    /// Strictly inside the open quadrant, with a margin.
    pub fn in_open_quadrant(&self, margin: f64) -> bool {
        self.d > margin && self.dt > margin
    }

    pub(crate) fn escaped(&self) -> bool {
        !(self.d.abs() <= DIVERGENCE_BOUND && self.dt.abs() <= DIVERGENCE_BOUND)
    }

    /// Lexicographic order on (d, dt).
    pub fn lex_cmp(&self, other: &PlanePoint) -> std::cmp::Ordering {
        self.d.total_cmp(&other.d).then(self.dt.total_cmp(&other.dt))
    }
}

/// One step of the dynamical map without the divergence check.
#[inline]
pub(crate) fn step(p: &AlgebraParams, x: PlanePoint) -> PlanePoint {
    PlanePoint::new(p.alpha() + p.q(x.dt) + p.p(x.d), x.d)
}

/// s(d, d̃) = (α + Σ βₖ d̃ᵏ + Σ γₖ dᵏ, d).
pub fn apply(p: &AlgebraParams, x: PlanePoint) -> Result<PlanePoint> {
    let y = step(p, x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::Divergence { x: (x.d, x.dt) })
    }
}

/// `n`-fold iterate, failing once an iterate leaves the divergence bound.
pub fn apply_n(p: &AlgebraParams, x: PlanePoint, n: usize) -> Result<PlanePoint> {
    let mut y = x;
    for _ in 0..n {
        y = step(p, y);
        if y.escaped() {
            return Err(Error::Divergence { x: (y.d, y.dt) });
        }
    }
    Ok(y)
}

pub fn jacobian(p: &AlgebraParams, x: PlanePoint) -> Matrix2<f64> {
    Matrix2::new(p.dp(x.d), p.dq(x.dt), 1.0, 0.0)
}

/// `s^n(x)` together with its Jacobian, accumulated by the chain rule.
pub fn apply_n_with_jacobian(
    p: &AlgebraParams,
    x: PlanePoint,
    n: usize,
) -> Result<(PlanePoint, Matrix2<f64>)> {
    let mut y = x;
    let mut jac = Matrix2::identity();
    for _ in 0..n {
        jac = jacobian(p, y) * jac;
        y = step(p, y);
        if y.escaped() || !jac.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { x: (y.d, y.dt) });
        }
    }
    Ok((y, jac))
}

/// Inverse of the dynamical map when β = (b, 0, …, 0) with b ≠ 0, which
/// covers every Hénon algebra with β₁ ≠ 0.
pub fn inverse(p: &AlgebraParams, y: PlanePoint) -> Result<PlanePoint> {
    if p.beta()[1..].iter().any(|&b| b != 0.0) {
        return Err(Error::NotInvertible("beta has nonzero higher coefficients".into()));
    }
    let b = p.beta()[0];
    if b == 0.0 {
        return Err(Error::NotInvertible("beta_1 = 0".into()));
    }
    Ok(PlanePoint::new(y.dt, (y.d - p.alpha() - p.p(y.dt)) / b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::henon_preset;
    use proptest::prelude::*;

    fn affine3() -> AlgebraParams {
        AlgebraParams::new(1.0, vec![-1.0], vec![-1.0]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let y = apply(&affine3(), PlanePoint::new(0.4, 0.3)).unwrap();
        assert!((y.d - 0.3).abs() < 1e-15 && y.dt == 0.4);

        let p = AlgebraParams::new(0.0, vec![2.0, -1.0], vec![0.5, 3.0]).unwrap();
        assert_eq!(apply(&p, PlanePoint::new(0.0, 0.0)).unwrap(), PlanePoint::new(0.0, 0.0));

        let y = apply(&henon_preset(5.0, 0.3, 3.0), PlanePoint::new(1.0, 1.0)).unwrap();
        assert!((y.d - 4.6).abs() < 1e-14 && y.dt == 1.0);
    }

    #[test]
    fn apply_reports_overflow() {
        let p = AlgebraParams::new(0.0, vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(apply(&p, PlanePoint::new(1e200, 0.0)), Err(Error::Divergence { .. })));
        assert!(apply_n(&henon_preset(5.0, 0.3, 3.0), PlanePoint::new(40.0, 0.0), 20).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let j = jacobian(&affine3(), PlanePoint::new(7.0, -2.0));
        assert_eq!(j, Matrix2::new(-1.0, -1.0, 1.0, 0.0));
        let swap = AlgebraParams::new(0.0, vec![1.0], vec![0.0]).unwrap();
        assert_eq!(jacobian(&swap, PlanePoint::new(0.3, 0.9)), Matrix2::new(0.0, 1.0, 1.0, 0.0));
        let j = jacobian(&henon_preset(5.0, 0.3, 3.0), PlanePoint::new(1.0, 5.0));
        assert_eq!(j, Matrix2::new(4.0, -0.3, 1.0, 0.0));
    }

    #[test]
    fn inverse_examples() {
        let p = henon_preset(5.0, 0.3, 3.0);
        let x = inverse(&p, PlanePoint::new(4.6, 1.0)).unwrap();
        assert!((x.d - 1.0).abs() < 1e-14 && (x.dt - 1.0).abs() < 1e-13);

        let swap = AlgebraParams::new(0.0, vec![1.0], vec![0.0]).unwrap();
        assert_eq!(inverse(&swap, PlanePoint::new(0.25, 0.75)).unwrap(), PlanePoint::new(0.75, 0.25));

        let non_henon = AlgebraParams::new(0.0, vec![1.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(inverse(&non_henon, PlanePoint::new(1.0, 1.0)), Err(Error::NotInvertible(_))));
        let b_zero = henon_preset(5.0, 0.0, 3.0);
        assert!(matches!(inverse(&b_zero, PlanePoint::new(1.0, 1.0)), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn chain_rule_jacobian_matches_composition() {
        let p = henon_preset(5.0, 0.3, 3.0);
        let x = PlanePoint::new(2.9, 3.1);
        let (y, j) = apply_n_with_jacobian(&p, x, 3).unwrap();
        let x1 = step(&p, x);
        let x2 = step(&p, x1);
        assert_eq!(y, step(&p, x2));
        let expect = jacobian(&p, x2) * jacobian(&p, x1) * jacobian(&p, x);
        assert!((j - expect).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn henon_inverse_round_trips(d in -10.0f64..10.0, dt in -10.0f64..10.0) {
            let p = henon_preset(5.0, 0.3, 3.0);
            let x = PlanePoint::new(d, dt);
            let y = apply(&p, inverse(&p, x).unwrap()).unwrap();
            prop_assert!(y.dist(&x) < 1e-12 * (1.0 + x.norm()));
            let z = inverse(&p, apply(&p, x).unwrap()).unwrap();
            prop_assert!(z.dist(&x) < 1e-12 * (1.0 + x.norm() * x.norm()));
        }

        #[test]
        fn jacobian_matches_central_differences(
            alpha in -3.0f64..3.0,
            beta in proptest::collection::vec(-2.0f64..2.0, 3),
            gamma in proptest::collection::vec(-2.0f64..2.0, 3),
            d in -10.0f64..10.0,
            dt in -10.0f64..10.0,
        ) {
            let p = AlgebraParams::new(alpha, beta, gamma).unwrap();
            let x = PlanePoint::new(d, dt);
            let j = jacobian(&p, x);
            let h = 1e-6;
            let fd_d = (step(&p, PlanePoint::new(d + h, dt)).d - step(&p, PlanePoint::new(d - h, dt)).d) / (2.0 * h);
            let fd_dt = (step(&p, PlanePoint::new(d, dt + h)).d - step(&p, PlanePoint::new(d, dt - h)).d) / (2.0 * h);
            prop_assert!((j[(0, 0)] - fd_d).abs() <= 1e-5 * (1.0 + j[(0, 0)].abs()));
            prop_assert!((j[(0, 1)] - fd_dt).abs() <= 1e-5 * (1.0 + j[(0, 1)].abs()));
        }
    }
}
