//! Splitting a hermitian representation into irreducible loop and string
//! blocks.
//!
//! In a joint eigenbasis of WW† and W†W, W only connects the eigenspace of a
//! spectrum point x to the eigenspace of s(x), and on each such pair it is
//! √d times a unitary. Chaining these unitaries along paths and cycles of s,
//! then diagonalizing the product around each cycle (the holonomy), leaves a
//! direct sum of canonical loops and strings.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::simdiag::{joint_diagonalize, simultaneous_diagonalize};
use crate::algebra::{relation_residual, AlgebraParams, RelationResidual};
use crate::dynamics::PlanePoint;
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, frobenius, CMatrix};
use crate::repbuild::{
    canonical_phase, group_points, locally_injective_points, spec_tol, RepKind, Representation, SpectrumPoint,
};

/// Default relative tolerance for [`decompose`].
pub const DEFAULT_DECOMPOSE_TOL: f64 = 1e-8;

/// Tolerance of the commutator precondition for joint diagonalization.
pub const COMMUTATOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub rep: Representation,
    /// Spectrum points in basis order; point k+1 is s(point k).
    pub points: Vec<PlanePoint>,
    pub residual: RelationResidual,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn kind(&self) -> RepKind {
        self.rep.kind()
    }

    pub fn spectrum(&self) -> Vec<SpectrumPoint> {
        group_points(&self.points, spec_tol(&self.points))
    }

    fn smallest_point(&self) -> PlanePoint {
        *self.points.iter().min_by(|a, b| a.lex_cmp(b)).expect("blocks are nonempty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub blocks: Vec<Block>,
    /// Unitary T with T·W·T† equal to the direct sum of the blocks, up to
    /// `offdiag_leakage`.
    pub transform: CMatrix,
    pub offdiag_leakage: f64,
}

impl DecompositionReport {
    pub fn kinds(&self) -> Vec<RepKind> {
        self.blocks.iter().map(Block::kind).collect()
    }

    /// T†·(⊕ blocks)·T, which should reproduce the input matrix.
    pub fn reconstruct(&self) -> CMatrix {
        let ws: Vec<&CMatrix> = self.blocks.iter().map(|b| b.rep.w()).collect();
        self.transform.adjoint() * direct_sum(&ws) * &self.transform
    }

    /// Union of block spectra with multiplicities.
    pub fn spectrum(&self) -> Vec<SpectrumPoint> {
        let all: Vec<PlanePoint> = self.blocks.iter().flat_map(|b| b.points.iter().copied()).collect();
        group_points(&all, spec_tol(&all))
    }
}

#[derive(Serialize)]
struct BlockJson<'a> {
    dim: usize,
    kind: RepKind,
    spectrum: &'a [PlanePoint],
    phase: Option<f64>,
    residual: f64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    blocks: Vec<BlockJson<'a>>,
    leakage: f64,
}

impl Serialize for DecompositionReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockJson {
                    dim: b.dim(),
                    kind: b.kind(),
                    spectrum: &b.points,
                    phase: b.rep.phase(),
                    residual: b.residual.max(),
                })
                .collect(),
            leakage: self.offdiag_leakage,
        }
        .serialize(s)
    }
}

/// A maximal chain of spectrum clusters linked by W.
struct Chain {
    clusters: Vec<usize>,
    cyclic: bool,
}

fn cluster(pairs: &[PlanePoint], tol: f64) -> (Vec<PlanePoint>, Vec<Vec<usize>>) {
    let mut reps: Vec<PlanePoint> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, x) in pairs.iter().enumerate() {
        match reps.iter().position(|r| r.sup_dist(x) < tol) {
            Some(c) => members[c].push(i),
            None => {
                reps.push(*x);
                members.push(vec![i]);
            }
        }
    }
    let centers: Vec<PlanePoint> = members
        .iter()
        .map(|m| {
            let k = m.len() as f64;
            // rounding leaves ±1e-17 where a transmitter or receiver has an exact zero
            let snap = |v: f64| if v.abs() < tol { 0.0 } else { v };
            PlanePoint::new(
                snap(m.iter().map(|&i| pairs[i].d).sum::<f64>() / k),
                snap(m.iter().map(|&i| pairs[i].dt).sum::<f64>() / k),
            )
        })
        .collect();
    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&a, &b| centers[a].lex_cmp(&centers[b]));
    (order.iter().map(|&c| centers[c]).collect(), order.iter().map(|&c| members[c].clone()).collect())
}

fn sub_block(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Unitary factor of the polar decomposition.
fn polar_unitary(b: &CMatrix) -> CMatrix {
    let svd = b.clone().svd(true, true);
    svd.u.expect("requested u") * svd.v_t.expect("requested v_t")
}

/// Eigenbasis Y of a unitary H (H = Y·Λ·Y†), using the commuting Hermitian
/// parts (H + H†)/2 and (H − H†)/2i.
fn unitary_eigenbasis(h: &CMatrix) -> Result<CMatrix> {
    let re = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let im = (h - h.adjoint()) * Complex64::new(0.0, -0.5);
    Ok(joint_diagonalize(&re, &im)?.0)
}

fn chains(succ: &[Option<usize>], pred: &[Option<usize>]) -> Result<Vec<Chain>> {
    let n = succ.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in (0..n).filter(|&c| pred[c].is_none()) {
        let mut clusters = vec![start];
        seen[start] = true;
        let mut cur = start;
        while let Some(next) = succ[cur] {
            if seen[next] {
                return Err(Error::DecompositionFailed("string runs into a visited vertex".into()));
            }
            seen[next] = true;
            clusters.push(next);
            cur = next;
        }
        out.push(Chain { clusters, cyclic: false });
    }
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut clusters = vec![start];
        seen[start] = true;
        let mut cur = start;
        loop {
            match succ[cur] {
                Some(next) if next == start => break,
                Some(next) if !seen[next] => {
                    seen[next] = true;
                    clusters.push(next);
                    cur = next;
                }
                _ => return Err(Error::DecompositionFailed("broken cycle in the spectrum digraph".into())),
            }
        }
        out.push(Chain { clusters, cyclic: true });
    }
    Ok(out)
}

/// Decomposes a locally injective hermitian representation into irreducible
/// loop and string blocks.
///
/// `tol` bounds the relation residual (relative to 1 + ‖W‖_F³) on input and
/// the off-pattern leakage (relative to ‖W‖_F) on output.
pub fn decompose(rep: &Representation, p: &AlgebraParams, tol: f64) -> Result<DecompositionReport> {
    let w = rep.w();
    let n = rep.dim();
    let wn = frobenius(w);
    let residual = relation_residual(p, w)?;
    if !residual.within(tol, wn) {
        return Err(Error::NotARepresentation(format!("relation residual {:e}", residual.max())));
    }

    let (u, dv, dtv) = simultaneous_diagonalize(w, COMMUTATOR_TOL)?;
    let pairs: Vec<PlanePoint> = dv.iter().zip(&dtv).map(|(&d, &dt)| PlanePoint::new(d, dt)).collect();
    if !locally_injective_points(p, &pairs) {
        return Err(Error::NotLocallyInjective);
    }
    let (centers, members) = cluster(&pairs, spec_tol(&pairs));
    let k = centers.len();

    // W in the joint eigenbasis; only cluster blocks along s survive
    let wp = &u * w * u.adjoint();
    let edge_tol = 1e-8 * wn;
    let mut succ: Vec<Option<usize>> = vec![None; k];
    let mut pred: Vec<Option<usize>> = vec![None; k];
    for a in 0..k {
        for b in 0..k {
            if frobenius(&sub_block(&wp, &members[a], &members[b])) > edge_tol {
                if succ[a].is_some() || pred[b].is_some() {
                    return Err(Error::DecompositionFailed("spectrum vertex with two successors or predecessors".into()));
                }
                succ[a] = Some(b);
                pred[b] = Some(a);
            }
        }
    }

    let mut blocks: Vec<(Block, Vec<CMatrix>)> = Vec::new();
    let mut rows_of = |chain: &Chain| -> Result<()> {
        let cs = &chain.clusters;
        let m = members[cs[0]].len();
        if cs.iter().any(|&c| members[c].len() != m) {
            return Err(Error::DecompositionFailed("multiplicities change along a chain".into()));
        }
        let links = if chain.cyclic { cs.len() } else { cs.len() - 1 };
        let unitaries: Vec<CMatrix> = (0..links)
            .map(|i| polar_unitary(&sub_block(&wp, &members[cs[i]], &members[cs[(i + 1) % cs.len()]])))
            .collect();

        // T_{i+1} = T_i·U_i turns every link into a multiple of the identity;
        // on a cycle T_0 diagonalizes the holonomy U_0⋯U_{k-1}.
        let mut t0 = CMatrix::identity(m, m);
        if chain.cyclic {
            let h = unitaries.iter().fold(CMatrix::identity(m, m), |acc, ui| acc * ui);
            t0 = unitary_eigenbasis(&h)?.adjoint();
        }
        let mut ts = vec![t0];
        for ui in unitaries.iter().take(cs.len() - 1) {
            let next = ts.last().unwrap() * ui;
            ts.push(next);
        }

        for j in 0..m {
            // rows of the final transform for this block, in the eigenbasis
            let basis: Vec<CMatrix> = cs
                .iter()
                .zip(&ts)
                .map(|(&c, t)| {
                    let mut row = CMatrix::zeros(1, n);
                    for (l, &idx) in members[c].iter().enumerate() {
                        row[(0, idx)] = t[(j, l)];
                    }
                    row * &u
                })
                .collect();
            let dim = cs.len();
            let points: Vec<PlanePoint> = cs.iter().map(|&c| centers[c]).collect();
            let mut bw = CMatrix::zeros(dim, dim);
            for i in 0..dim - 1 {
                bw[(i, i + 1)] = Complex64::new(points[i].d.max(0.0).sqrt(), 0.0);
            }
            let (kind, phase) = if chain.cyclic {
                let last = dim - 1;
                let corner = (&basis[last] * w * basis[0].adjoint())[(0, 0)];
                let phase = canonical_phase(corner.arg());
                bw[(last, 0)] = Complex64::from_polar(points[last].d.max(0.0).sqrt(), phase);
                (RepKind::Loop, Some(phase))
            } else {
                (RepKind::String, None)
            };
            let block_rep = Representation::from_parts(bw, kind, phase)?;
            let residual = relation_residual(p, block_rep.w())?;
            blocks.push((Block { rep: block_rep, points, residual }, basis));
        }
        Ok(())
    };
    for chain in chains(&succ, &pred)? {
        rows_of(&chain)?;
    }

    blocks.sort_by(|(a, _), (b, _)| {
        a.dim()
            .cmp(&b.dim())
            .then_with(|| a.smallest_point().lex_cmp(&b.smallest_point()))
            .then_with(|| a.rep.phase().partial_cmp(&b.rep.phase()).unwrap_or(Ordering::Equal))
    });

    let mut transform = CMatrix::zeros(n, n);
    let mut pattern = DMatrix::from_element(n, n, false);
    let mut off = 0;
    for (b, basis) in &blocks {
        for (i, row) in basis.iter().enumerate() {
            transform.set_row(off + i, &row.row(0));
        }
        let dim = b.dim();
        for i in 0..dim - 1 {
            pattern[(off + i, off + i + 1)] = true;
        }
        if b.kind() == RepKind::Loop {
            pattern[(off + dim - 1, off)] = true;
        }
        off += dim;
    }
    let wf = &transform * w * transform.adjoint();
    let leakage = wf
        .iter()
        .zip(pattern.iter())
        .filter(|(_, &allowed)| !allowed)
        .map(|(z, _)| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if leakage > tol * wn.max(f64::MIN_POSITIVE) && leakage > 0.0 {
        return Err(Error::DecompositionFailed(format!("off-block leakage {leakage:e}")));
    }

    Ok(DecompositionReport {
        blocks: blocks.into_iter().map(|(b, _)| b).collect(),
        transform,
        offdiag_leakage: leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::henon_preset;
    use crate::dynamics::{find_periodic_orbits, NString, PeriodicOrbit, SearchBox};
    use crate::linalg::{haar_unitary, unitarity_defect};
    use crate::repbuild::{build_loop_rep, build_string_rep, spectrum};
    use crate::specgraph::{digraph_of, transmitters_receivers};
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

    fn string2() -> NString {
        NString::new(&affine3(), vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 1.0)]).unwrap()
    }

    fn assert_reconstructs(report: &DecompositionReport, w: &CMatrix) {
        assert!(unitarity_defect(&report.transform) < 1e-10);
        assert!(frobenius(&(report.reconstruct() - w)) < 1e-8 * frobenius(w));
    }

    #[test]
    fn loop_plus_string_under_random_unitary() {
        let p = affine3();
        let l = build_loop_rep(&p, &orbit3(), 0.9).unwrap();
        let s = build_string_rep(&p, &string2()).unwrap();
        let sum = Representation::direct_sum(&[&l, &s]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rep = sum.conjugated(&haar_unitary(5, &mut rng)).unwrap();
        let report = decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL).unwrap();
        assert_eq!(report.kinds(), vec![RepKind::String, RepKind::Loop]);
        assert_eq!(report.blocks[1].spectrum().len(), 3);
        assert!((report.blocks[1].rep.phase().unwrap() - 0.9).abs() < 1e-9);
        for (a, b) in report.spectrum().iter().zip(spectrum(&sum).unwrap().iter()) {
            assert_eq!(a.multiplicity, b.multiplicity);
            assert!(a.point.sup_dist(&b.point) < 1e-8);
        }
        assert!(report.offdiag_leakage < 1e-8 * frobenius(rep.w()));
        assert_reconstructs(&report, rep.w());
    }

    #[test]
    fn irreducible_loop_is_one_block() {
        let p = affine3();
        let l = build_loop_rep(&p, &orbit3(), 2.0).unwrap();
        let report = decompose(&l, &p, DEFAULT_DECOMPOSE_TOL).unwrap();
        assert_eq!(report.blocks.len(), 1);
        let b = &report.blocks[0];
        assert_eq!(b.kind(), RepKind::Loop);
        assert!((b.rep.phase().unwrap() - 2.0).abs() < 1e-12);
        assert_reconstructs(&report, l.w());
        // the block is the same matrix up to a permutation
        let perm_abs: Vec<f64> = report.transform.iter().map(|z| z.norm()).collect();
        assert!(perm_abs.iter().all(|&x| x < 1e-12 || (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn holonomy_separates_phases() {
        let p = affine3();
        let a = build_loop_rep(&p, &orbit3(), 0.5).unwrap();
        let b = build_loop_rep(&p, &orbit3(), 2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rep = Representation::direct_sum(&[&a, &b]).unwrap().conjugated(&haar_unitary(6, &mut rng)).unwrap();
        let report = decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL).unwrap();
        let phases: Vec<f64> = report.blocks.iter().map(|b| b.rep.phase().unwrap()).collect();
        assert_eq!(phases.len(), 2);
        assert!((phases[0] - 0.5).abs() < 1e-9 && (phases[1] - 2.5).abs() < 1e-9, "{phases:?}");
        assert_reconstructs(&report, rep.w());
    }

    #[test]
    fn equal_phases_stay_two_blocks() {
        let p = affine3();
        let a = build_loop_rep(&p, &orbit3(), PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rep = Representation::direct_sum(&[&a, &a]).unwrap().conjugated(&haar_unitary(6, &mut rng)).unwrap();
        let report = decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL).unwrap();
        assert_eq!(report.blocks.len(), 2);
        assert_reconstructs(&report, rep.w());
    }

    #[test]
    fn zero_and_fixed_point_blocks() {
        let p = affine3();
        let fixed = PeriodicOrbit::new(&p, vec![PlanePoint::new(1.0 / 3.0, 1.0 / 3.0)]).unwrap();
        let f = build_loop_rep(&p, &fixed, 1.0).unwrap();
        let z = build_string_rep(&p, &NString::trivial()).unwrap();
        let s = build_string_rep(&p, &string2()).unwrap();
        let sum = Representation::direct_sum(&[&s, &f, &z, &z]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rep = sum.conjugated(&haar_unitary(5, &mut rng)).unwrap();
        let report = decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL).unwrap();
        assert_eq!(report.kinds(), vec![RepKind::String, RepKind::String, RepKind::Loop, RepKind::String]);
        assert_reconstructs(&report, rep.w());
    }

    #[test]
    fn transmitters_match_zero_coordinates() {
        let p = affine3();
        let l = build_loop_rep(&p, &orbit3(), 0.0).unwrap();
        let s = build_string_rep(&p, &string2()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rep = Representation::direct_sum(&[&s, &l]).unwrap().conjugated(&haar_unitary(5, &mut rng)).unwrap();
        for b in decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL).unwrap().blocks {
            let (tx, rx) = transmitters_receivers(&digraph_of(b.rep.w(), 1e-8 * frobenius(b.rep.w())));
            let zero_dt: Vec<usize> = (0..b.dim()).filter(|&i| b.points[i].dt.abs() < 1e-8).collect();
            let zero_d: Vec<usize> = (0..b.dim()).filter(|&i| b.points[i].d.abs() < 1e-8).collect();
            assert_eq!(tx.into_iter().collect::<Vec<_>>(), zero_dt);
            assert_eq!(rx.into_iter().collect::<Vec<_>>(), zero_d);
        }
    }

    #[test]
    fn henon_orbits_decompose() {
        let p = henon_preset(5.0, 0.3, 3.0);
        let found = find_periodic_orbits(&p, 4, &SearchBox::square(0.0, 6.0), 2048, 0).unwrap();
        let reps: Vec<Representation> =
            found.orbits.iter().take(3).map(|o| build_loop_rep(&p, o, 1.0).unwrap()).collect();
        let refs: Vec<&Representation> = reps.iter().collect();
        let sum = Representation::direct_sum(&refs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rep = sum.conjugated(&haar_unitary(sum.dim(), &mut rng)).unwrap();
        let report = decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL).unwrap();
        assert_eq!(report.blocks.len(), 3);
        assert_reconstructs(&report, rep.w());
    }

    #[test]
    fn rejects_non_representations() {
        let p = affine3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = Representation::general(haar_unitary(3, &mut rng)).unwrap();
        assert!(matches!(decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL), Err(Error::NotARepresentation(_))));
    }

    #[test]
    fn rejects_non_injective() {
        // q ≡ 0 and f(d) = (d - 1)(d - 2): both strings end on receivers
        // (0, 1) and (0, 2), which s sends to the same point
        let p = AlgebraParams::new(2.0, vec![0.0, 0.0], vec![-3.0, 1.0]).unwrap();
        let s1 = NString::new(&p, vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 1.0)]).unwrap();
        let s2 = NString::new(&p, vec![PlanePoint::new(2.0, 0.0), PlanePoint::new(0.0, 2.0)]).unwrap();
        let a = build_string_rep(&p, &s1).unwrap();
        let b = build_string_rep(&p, &s2).unwrap();
        let rep = Representation::direct_sum(&[&a, &b]).unwrap();
        assert!(matches!(decompose(&rep, &p, DEFAULT_DECOMPOSE_TOL), Err(Error::NotLocallyInjective)));
    }

    #[test]
    fn report_json_shape() {
        let p = affine3();
        let l = build_loop_rep(&p, &orbit3(), 0.0).unwrap();
        let v = serde_json::to_value(decompose(&l, &p, DEFAULT_DECOMPOSE_TOL).unwrap()).unwrap();
        assert_eq!(v["blocks"][0]["dim"], 3);
        assert_eq!(v["blocks"][0]["kind"], "loop");
        assert_eq!(v["blocks"][0]["spectrum"].as_array().unwrap().len(), 3);
        assert!(v["leakage"].as_f64().unwrap() < 1e-12);
    }
}
