//! Explicit matrices of irreducible loop and string representations, their
//! spectra, and the equivalence test for irreducibles.
//!
//! A loop representation built from a periodic orbit x₁, …, x_N (xₖ = (dₖ, d̃ₖ))
//! has `W[k][k+1] = √dₖ` and `W[N][1] = e^{iγ}√d_N`; a string representation
//! built from an N-string has only the superdiagonal `W[k][k+1] = √dₖ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraParams;
use crate::dynamics::{step, NString, PeriodicOrbit, PlanePoint};
use crate::error::{Error, Result};
use crate::linalg::{determinant, direct_sum, CMatrix};
use crate::specgraph::{classify, decompose, digraph_of, simultaneous_diagonalize, ComponentKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Loop,
    String,
    General,
}

impl std::fmt::Display for RepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RepKind::Loop => "loop",
            RepKind::String => "string",
            RepKind::General => "general",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepSource {
    Orbit(PeriodicOrbit),
    String(NString),
}

/// An N-dimensional hermitian representation, given by the matrix of W.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    w: CMatrix,
    kind: RepKind,
    phase: Option<f64>,
    source: Option<RepSource>,
}

impl Representation {
    /// Wraps an arbitrary square matrix.
    pub fn general(w: CMatrix) -> Result<Self> {
        if w.nrows() != w.ncols() || w.nrows() == 0 {
            return Err(Error::Shape {
                expected: "nonempty square matrix".into(),
                got: format!("{}x{}", w.nrows(), w.ncols()),
            });
        }
        Ok(Self { w, kind: RepKind::General, phase: None, source: None })
    }

    /// Reassembles a representation read from a file. Loop and string kinds
    /// are checked against the digraph of the matrix.
    pub fn from_parts(w: CMatrix, kind: RepKind, phase: Option<f64>) -> Result<Self> {
        let mut rep = Self::general(w)?;
        if kind != RepKind::General {
            let g = digraph_of(&rep.w, default_edge_threshold(&rep.w));
            let expect = if kind == RepKind::Loop { ComponentKind::Loop } else { ComponentKind::String };
            if classify(&g) != vec![expect] {
                return Err(Error::NotARepresentation(format!("matrix is not in canonical {kind} form")));
            }
        }
        rep.kind = kind;
        rep.phase = if kind == RepKind::Loop { phase.map(canonical_phase) } else { None };
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn phase(&self) -> Option<f64> {
        self.phase
    }

    pub fn source(&self) -> Option<&RepSource> {
        self.source.as_ref()
    }

    /// det W. Strings are exactly zero.
    pub fn determinant(&self) -> Complex64 {
        match self.kind {
            RepKind::String => Complex64::new(0.0, 0.0),
            _ => determinant(&self.w),
        }
    }

    /// Block-diagonal direct sum; the result has kind `General`.
    pub fn direct_sum(reps: &[&Representation]) -> Result<Self> {
        let blocks: Vec<&CMatrix> = reps.iter().map(|r| &r.w).collect();
        Self::general(direct_sum(&blocks))
    }

    /// Q W Q† for a unitary Q; the result has kind `General`.
    pub fn conjugated(&self, q: &CMatrix) -> Result<Self> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::Shape {
                expected: format!("{0}x{0} unitary", self.dim()),
                got: format!("{}x{}", q.nrows(), q.ncols()),
            });
        }
        Self::general(q * &self.w * q.adjoint())
    }
}

pub(crate) fn canonical_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

pub(crate) fn default_edge_threshold(w: &CMatrix) -> f64 {
    1e-8 * crate::linalg::frobenius(w)
}

/// Grouping tolerance for spectrum points: 1e-8 · (1 + largest coordinate).
pub fn spec_tol(points: &[PlanePoint]) -> f64 {
    1e-8 * (1.0 + points.iter().map(|x| x.d.abs().max(x.dt.abs())).fold(0.0, f64::max))
}

pub fn build_loop_rep(p: &AlgebraParams, orbit: &PeriodicOrbit, phase: f64) -> Result<Representation> {
    orbit.validate(p)?;
    let pts = orbit.points();
    let n = pts.len();
    let phase = canonical_phase(phase);
    let mut w = CMatrix::zeros(n, n);
    for k in 0..n - 1 {
        w[(k, k + 1)] = Complex64::new(pts[k].d.sqrt(), 0.0);
    }
    w[(n - 1, 0)] = Complex64::from_polar(pts[n - 1].d.sqrt(), phase);
    Ok(Representation {
        w,
        kind: RepKind::Loop,
        phase: Some(phase),
        source: Some(RepSource::Orbit(orbit.clone())),
    })
}

pub fn build_string_rep(p: &AlgebraParams, string: &NString) -> Result<Representation> {
    string.validate(p)?;
    let pts = string.points();
    let n = pts.len();
    let mut w = CMatrix::zeros(n, n);
    for k in 0..n - 1 {
        w[(k, k + 1)] = Complex64::new(pts[k].d.sqrt(), 0.0);
    }
    Ok(Representation {
        w,
        kind: RepKind::String,
        phase: None,
        source: Some(RepSource::String(string.clone())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub point: PlanePoint,
    pub multiplicity: usize,
}

/// Groups points closer than `tol` (sup norm) and returns them
/// lexicographically sorted with multiplicities.
pub fn group_points(points: &[PlanePoint], tol: f64) -> Vec<SpectrumPoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(PlanePoint::lex_cmp);
    let mut groups: Vec<(PlanePoint, Vec<PlanePoint>)> = Vec::new();
    for x in sorted {
        match groups.iter_mut().find(|(rep, _)| rep.sup_dist(&x) < tol) {
            Some((_, members)) => members.push(x),
            None => groups.push((x, vec![x])),
        }
    }
    let mut out: Vec<SpectrumPoint> = groups
        .into_iter()
        .map(|(_, members)| {
            let m = members.len() as f64;
            let d = members.iter().map(|x| x.d).sum::<f64>() / m;
            let dt = members.iter().map(|x| x.dt).sum::<f64>() / m;
            SpectrumPoint { point: PlanePoint::new(d, dt), multiplicity: members.len() }
        })
        .collect();
    out.sort_by(|a, b| a.point.lex_cmp(&b.point));
    out
}

/// Paired eigenvalues (d, d̃) of WW† and W†W, one per basis vector.
pub fn spectrum_pairs(rep: &Representation) -> Result<Vec<PlanePoint>> {
    match rep.kind {
        RepKind::Loop | RepKind::String => {
            match &rep.source {
                Some(RepSource::Orbit(o)) => return Ok(o.points().to_vec()),
                Some(RepSource::String(s)) => return Ok(s.points().to_vec()),
                None => {}
            }
            // canonical forms: WW† and W†W are already diagonal
            let w = &rep.w;
            Ok((0..rep.dim())
                .map(|i| {
                    let d = w.row(i).iter().map(|z| z.norm_sqr()).sum();
                    let dt = w.column(i).iter().map(|z| z.norm_sqr()).sum();
                    PlanePoint::new(d, dt)
                })
                .collect())
        }
        RepKind::General => {
            let (_, d, dt) = simultaneous_diagonalize(&rep.w, crate::specgraph::COMMUTATOR_TOL).map_err(|e| match e {
                Error::NotSimultaneouslyDiagonalizable(c) => {
                    Error::NotARepresentation(format!("WW^dagger and W^daggerW do not commute ({c:e})"))
                }
                other => other,
            })?;
            Ok(d.iter().zip(&dt).map(|(&a, &b)| PlanePoint::new(a, b)).collect())
        }
    }
}

/// The spectrum with multiplicities, grouped at [`spec_tol`].
pub fn spectrum(rep: &Representation) -> Result<Vec<SpectrumPoint>> {
    let pairs = spectrum_pairs(rep)?;
    Ok(group_points(&pairs, spec_tol(&pairs)))
}

/// Whether s is injective on the distinct points of `points`.
pub fn locally_injective_points(p: &AlgebraParams, points: &[PlanePoint]) -> bool {
    let tol = spec_tol(points);
    let distinct: Vec<PlanePoint> = group_points(points, tol).into_iter().map(|s| s.point).collect();
    let images: Vec<PlanePoint> = distinct.iter().map(|&x| step(p, x)).collect();
    let img_tol = spec_tol(&images);
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i].sup_dist(&images[j]) <= img_tol {
                return false;
            }
        }
    }
    true
}

pub fn locally_injective(rep: &Representation, p: &AlgebraParams) -> Result<bool> {
    Ok(locally_injective_points(p, &spectrum_pairs(rep)?))
}

fn require_irreducible(rep: &Representation, p: &AlgebraParams) -> Result<()> {
    let irreducible = match rep.kind {
        RepKind::Loop | RepKind::String => {
            classify(&digraph_of(&rep.w, default_edge_threshold(&rep.w))).len() == 1
        }
        RepKind::General => decompose(rep, p, crate::specgraph::DEFAULT_DECOMPOSE_TOL)?.blocks.len() == 1,
    };
    if irreducible {
        Ok(())
    } else {
        Err(Error::Precondition("equivalence is decided for irreducible representations only".into()))
    }
}

/// Two irreducibles are equivalent iff their spectra agree as multisets and
/// their determinants coincide.
pub fn equivalent(a: &Representation, b: &Representation, p: &AlgebraParams) -> Result<bool> {
    if a.dim() != b.dim() {
        return Ok(false);
    }
    require_irreducible(a, p)?;
    require_irreducible(b, p)?;
    let sa = spectrum_pairs(a)?;
    let sb = spectrum_pairs(b)?;
    let all: Vec<PlanePoint> = sa.iter().chain(&sb).copied().collect();
    let tol = spec_tol(&all);

    let mut unmatched = sb.clone();
    for x in &sa {
        match unmatched.iter().position(|y| y.sup_dist(x) < tol) {
            Some(i) => {
                unmatched.swap_remove(i);
            }
            None => return Ok(false),
        }
    }
    Ok((a.determinant() - b.determinant()).norm() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::relation_residual;
    use crate::linalg::{frobenius, haar_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn affine3() -> AlgebraParams {
        AlgebraParams::new(1.0, vec![-1.0], vec![-1.0]).unwrap()
    }

    fn orbit3() -> PeriodicOrbit {
        PeriodicOrbit::new(
            &affine3(),
            vec![PlanePoint::new(0.4, 0.3), PlanePoint::new(0.3, 0.4), PlanePoint::new(0.3, 0.3)],
        )
        .unwrap()
    }

    #[test]
    fn loop_rep_entries_and_residual() {
        let p = affine3();
        let rep = build_loop_rep(&p, &orbit3(), 0.0).unwrap();
        let w = rep.w();
        assert_eq!(w[(0, 1)].re, 0.4f64.sqrt());
        assert_eq!(w[(1, 2)].re, 0.3f64.sqrt());
        assert_eq!(w[(2, 0)], Complex64::new(0.3f64.sqrt(), 0.0));
        let r = relation_residual(&p, w).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
    }

    #[test]
    fn one_dimensional_loop() {
        let p = affine3();
        let fixed = PeriodicOrbit::new(&p, vec![PlanePoint::new(1.0 / 3.0, 1.0 / 3.0)]).unwrap();
        let rep = build_loop_rep(&p, &fixed, 1.2).unwrap();
        assert_eq!(rep.dim(), 1);
        assert!((rep.w()[(0, 0)] - Complex64::from_polar((1.0f64 / 3.0).sqrt(), 1.2)).norm() < 1e-15);
        assert!(relation_residual(&p, rep.w()).unwrap().max() < 1e-15);
    }

    #[test]
    fn loop_rep_rejects_nonpositive_points() {
        let p = AlgebraParams::new(-1.0, vec![-1.0], vec![-1.0]).unwrap();
        let bad = PeriodicOrbit::new_unchecked(vec![PlanePoint::new(-1.0 / 3.0, -1.0 / 3.0)]);
        assert!(matches!(build_loop_rep(&p, &bad, 0.0), Err(Error::InvalidOrbit(_))));
    }

    #[test]
    fn string_reps() {
        let p = affine3();
        let s = NString::new(&p, vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 1.0)]).unwrap();
        let rep = build_string_rep(&p, &s).unwrap();
        assert_eq!(rep.w()[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(relation_residual(&p, rep.w()).unwrap().max(), 0.0);
        assert_eq!(rep.determinant(), Complex64::new(0.0, 0.0));
        assert_eq!(determinant(rep.w()), Complex64::new(0.0, 0.0));

        let zero = build_string_rep(&p, &NString::trivial()).unwrap();
        assert_eq!(zero.w(), &CMatrix::zeros(1, 1));

        let p2 = AlgebraParams::new(2.0, vec![-1.0], vec![-1.0]).unwrap();
        let s2 = NString::new(&p2, vec![PlanePoint::new(2.0, 0.0), PlanePoint::new(0.0, 2.0)]).unwrap();
        assert_eq!(build_string_rep(&p2, &s2).unwrap().w()[(0, 1)].re, 2f64.sqrt());

        let bad = NString::new_unchecked(vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(-1.0, 1.0), PlanePoint::new(0.0, -1.0)]);
        assert!(matches!(build_string_rep(&p, &bad), Err(Error::InvalidString(_))));
    }

    #[test]
    fn loop_spectrum_is_the_orbit() {
        let rep = build_loop_rep(&affine3(), &orbit3(), 0.7).unwrap();
        let spec = spectrum(&rep).unwrap();
        assert_eq!(spec.len(), 3);
        let mut expect = orbit3().points().to_vec();
        expect.sort_by(PlanePoint::lex_cmp);
        for (s, x) in spec.iter().zip(&expect) {
            assert_eq!(s.multiplicity, 1);
            assert!(s.point.sup_dist(x) < 1e-15);
        }
    }

    #[test]
    fn zero_spectrum() {
        let rep = build_string_rep(&affine3(), &NString::trivial()).unwrap();
        assert_eq!(
            spectrum(&rep).unwrap(),
            vec![SpectrumPoint { point: PlanePoint::new(0.0, 0.0), multiplicity: 1 }]
        );
    }

    #[test]
    fn doubled_loop_has_multiplicity_two() {
        let rep = build_loop_rep(&affine3(), &orbit3(), 0.0).unwrap();
        let sum = Representation::direct_sum(&[&rep, &rep]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rotated = sum.conjugated(&haar_unitary(6, &mut rng)).unwrap();
        let spec = spectrum(&rotated).unwrap();
        assert_eq!(spec.len(), 3);
        assert!(spec.iter().all(|s| s.multiplicity == 2));
    }

    #[test]
    fn determinant_of_loop() {
        let rep = build_loop_rep(&affine3(), &orbit3(), 1.0).unwrap();
        let det = rep.determinant();
        assert!((det.norm() - (0.4f64 * 0.3 * 0.3).sqrt()).abs() < 1e-15);
        // cyclic permutation of odd length has sign +1
        assert!((det.arg() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn determinant_sign_of_even_loop() {
        // (0.3, 0.7) -> (0.7, 0.3) -> (0.3, 0.7) under s(x, y) = (1 - x, x)
        let p = AlgebraParams::new(1.0, vec![0.0], vec![-1.0]).unwrap();
        let orbit = PeriodicOrbit::new(&p, vec![PlanePoint::new(0.3, 0.7), PlanePoint::new(0.7, 0.3)]).unwrap();
        let det = build_loop_rep(&p, &orbit, 0.4).unwrap().determinant();
        // a transposition contributes a sign: det = -e^{i·phase}·√(d₁d₂)
        let expect = -Complex64::from_polar((0.3f64 * 0.7).sqrt(), 0.4);
        assert!((det - expect).norm() < 1e-15);
    }

    #[test]
    fn equivalence_examples() {
        let p = affine3();
        let a = build_loop_rep(&p, &orbit3(), 0.0).unwrap();
        let b = build_loop_rep(&p, &orbit3(), PI).unwrap();
        assert!(!equivalent(&a, &b, &p).unwrap());
        let c = build_loop_rep(&p, &orbit3().rotated(1), 0.0).unwrap();
        assert!(equivalent(&a, &c, &p).unwrap());
        let s = build_string_rep(&p, &NString::new(&p, vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 1.0)]).unwrap()).unwrap();
        assert!(equivalent(&s, &s, &p).unwrap());
        assert!(!equivalent(&s, &a, &p).unwrap());
    }

    #[test]
    fn equivalence_refuses_reducible() {
        let p = affine3();
        let a = build_loop_rep(&p, &orbit3(), 0.0).unwrap();
        let sum = Representation::direct_sum(&[&a, &a]).unwrap();
        assert!(matches!(equivalent(&sum, &sum, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn conjugated_irreducible_is_equivalent() {
        let p = affine3();
        let a = build_loop_rep(&p, &orbit3(), 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = a.conjugated(&haar_unitary(3, &mut rng)).unwrap();
        assert!(equivalent(&a, &b, &p).unwrap());
        assert!(frobenius(&(b.w() - a.w())) > 1e-3);
    }

    #[test]
    fn local_injectivity() {
        let p = affine3();
        assert!(locally_injective(&build_loop_rep(&p, &orbit3(), 0.0).unwrap(), &p).unwrap());
        // q ≡ 0: s(x, y) = (α + p(x), x) ignores y
        let flat = AlgebraParams::new(1.0, vec![0.0], vec![1.0]).unwrap();
        assert!(!locally_injective_points(&flat, &[PlanePoint::new(1.0, 2.0), PlanePoint::new(1.0, 5.0)]));
        assert!(locally_injective_points(&p, &[PlanePoint::new(1.0, 2.0), PlanePoint::new(1.0, 5.0)]));
    }

    #[test]
    fn phases_are_canonical() {
        let rep = build_loop_rep(&affine3(), &orbit3(), -PI / 2.0).unwrap();
        assert!((rep.phase().unwrap() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(canonical_phase(TAU), 0.0);
    }

    #[test]
    fn from_parts_checks_structure() {
        let rep = build_loop_rep(&affine3(), &orbit3(), 0.0).unwrap();
        assert!(Representation::from_parts(rep.w().clone(), RepKind::Loop, Some(0.0)).is_ok());
        assert!(Representation::from_parts(rep.w().clone(), RepKind::String, None).is_err());
        assert!(Representation::general(CMatrix::zeros(2, 3)).is_err());
    }
}
