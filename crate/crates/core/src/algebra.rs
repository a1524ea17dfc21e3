//! Algebra parameters, conversions from surface and Hénon data, and numerical
//! residuals of the two defining relations
//!
//! ```text
//! W²V = αW + Σₖ βₖ (VW)ᵏ W + Σₖ γₖ (WV)ᵏ W
//! WV² = αV + Σₖ βₖ V(VW)ᵏ + Σₖ γₖ V(WV)ᵏ
//! ```
//!
//! Coefficient vectors are stored in increasing power: `beta()[0]` is β₁.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMatrix};

/// Parameters (n, α, β, γ) of an order-n algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebra", into = "RawAlgebra")]
pub struct AlgebraParams {
    alpha: f64,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawAlgebra {
    order: usize,
    alpha: f64,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl TryFrom<RawAlgebra> for AlgebraParams {
    type Error = Error;

    fn try_from(raw: RawAlgebra) -> Result<Self> {
        if raw.beta.len() != raw.order || raw.gamma.len() != raw.order {
            return Err(Error::InvalidAlgebra(format!(
                "order {} but beta has {} and gamma has {} coefficients",
                raw.order,
                raw.beta.len(),
                raw.gamma.len()
            )));
        }
        AlgebraParams::new(raw.alpha, raw.beta, raw.gamma)
    }
}

impl From<AlgebraParams> for RawAlgebra {
    fn from(p: AlgebraParams) -> Self {
        RawAlgebra { order: p.order(), alpha: p.alpha, beta: p.beta, gamma: p.gamma }
    }
}

impl AlgebraParams {
    /// Checks that β and γ have the same nonzero length, that all values are
    /// finite, and that (βₙ, γₙ) ≠ (0, 0).
    pub fn new(alpha: f64, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if beta.is_empty() || beta.len() != gamma.len() {
            return Err(Error::InvalidAlgebra(format!(
                "beta and gamma must have equal positive length (got {} and {})",
                beta.len(),
                gamma.len()
            )));
        }
        if !alpha.is_finite() || beta.iter().chain(&gamma).any(|v| !v.is_finite()) {
            return Err(Error::InvalidAlgebra("non-finite coefficient".into()));
        }
        let n = beta.len();
        if beta[n - 1] == 0.0 && gamma[n - 1] == 0.0 {
            return Err(Error::InvalidAlgebra(format!(
                "degree condition violated: beta_{n} = gamma_{n} = 0"
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn order(&self) -> usize {
        self.beta.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// β = (b, 0, …, 0) and γₙ ≠ 0.
    pub fn is_henon(&self) -> bool {
        self.beta[1..].iter().all(|&b| b == 0.0) && *self.gamma.last().unwrap() != 0.0
    }

    /// Evaluates p(x) = Σₖ γₖ xᵏ.
    pub fn p(&self, x: f64) -> f64 {
        eval_poly(&self.gamma, x)
    }

    /// Evaluates q(y) = Σₖ βₖ yᵏ.
    pub fn q(&self, y: f64) -> f64 {
        eval_poly(&self.beta, y)
    }

    pub fn dp(&self, x: f64) -> f64 {
        eval_poly_derivative(&self.gamma, x)
    }

    pub fn dq(&self, y: f64) -> f64 {
        eval_poly_derivative(&self.beta, y)
    }
}

/// Σₖ cₖ xᵏ for k = 1..=n (no constant term), Horner form.
fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| (acc + c) * x)
}

fn eval_poly_derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, &c)| acc * x + (i as f64 + 1.0) * c)
}

/// Surface data (ħ, α₀, β̃, γ̃) with β̃ₖ + γ̃ₖ = αₖ chosen by the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub hbar: f64,
    pub alpha0: f64,
    pub beta_tilde: Vec<f64>,
    pub gamma_tilde: Vec<f64>,
}

/// Converts surface coefficients into algebra coefficients:
/// α = −2ħ²α₀, β₁ = −2ħ²β̃₁ − 1, γ₁ = −2ħ²γ̃₁ + 2, and βₖ = −2ħ²β̃ₖ,
/// γₖ = −2ħ²γ̃ₖ for k ≥ 2.
pub fn from_surface(s: &SurfaceParams) -> Result<AlgebraParams> {
    if !(s.hbar > 0.0 && s.hbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", s.hbar)));
    }
    if s.beta_tilde.len() != s.gamma_tilde.len() || s.beta_tilde.is_empty() {
        return Err(Error::InvalidParameter(
            "beta_tilde and gamma_tilde must have equal positive length".into(),
        ));
    }
    let scale = -2.0 * s.hbar * s.hbar;
    // + 0.0 turns the -0.0 produced by zero coefficients into 0.0
    let mut beta: Vec<f64> = s.beta_tilde.iter().map(|b| scale * b + 0.0).collect();
    let mut gamma: Vec<f64> = s.gamma_tilde.iter().map(|g| scale * g + 0.0).collect();
    beta[0] -= 1.0;
    gamma[0] += 2.0;
    AlgebraParams::new(scale * s.alpha0 + 0.0, beta, gamma)
}

/// Second-order Hénon algebra whose dynamical map is the Hénon map
/// `(a − by − x², x)` conjugated by the translation `x ↦ x + (r, r)`.
pub fn henon_preset(a: f64, b: f64, r: f64) -> AlgebraParams {
    AlgebraParams::new(a + r + b * r - r * r, vec![-b, 0.0], vec![2.0 * r, -1.0])
        .expect("gamma_2 = -1 satisfies the degree condition")
}

/// Frobenius norms of the defects in the two defining relations (with V = W†)
/// and of the commutator [WV, VW].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub primary_norm: f64,
    pub conjugate_norm: f64,
    pub commutator_norm: f64,
}

impl RelationResidual {
    pub fn max(&self) -> f64 {
        self.primary_norm.max(self.conjugate_norm).max(self.commutator_norm)
    }

    /// True when every norm is below `tol · (1 + ‖W‖_F³)`.
    pub fn within(&self, tol: f64, w_norm: f64) -> bool {
        self.max() < tol * (1.0 + w_norm.powi(3))
    }
}

pub fn relation_residual(p: &AlgebraParams, w: &CMatrix) -> Result<RelationResidual> {
    if w.nrows() != w.ncols() {
        return Err(Error::Shape {
            expected: "square matrix".into(),
            got: format!("{}x{}", w.nrows(), w.ncols()),
        });
    }
    let v = w.adjoint();
    let wv = w * &v;
    let vw = &v * w;

    let alpha = Complex64::from(p.alpha());
    let mut primary = w * w * &v - w * alpha;
    let mut conjugate = w * &v * &v - &v * alpha;
    let mut vw_k = vw.clone();
    let mut wv_k = wv.clone();
    for (k, (&b, &g)) in p.beta().iter().zip(p.gamma()).enumerate() {
        if k > 0 {
            vw_k = &vw_k * &vw;
            wv_k = &wv_k * &wv;
        }
        let (b, g) = (Complex64::from(b), Complex64::from(g));
        primary -= (&vw_k * w) * b + (&wv_k * w) * g;
        conjugate -= (&v * &vw_k) * b + (&v * &wv_k) * g;
    }
    let comm = &wv * &vw - &vw * &wv;

    Ok(RelationResidual {
        primary_norm: frobenius(&primary),
        conjugate_norm: frobenius(&conjugate),
        commutator_norm: frobenius(&comm),
    })
}
