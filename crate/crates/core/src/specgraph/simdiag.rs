use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{commutator, frobenius, max_offdiag, CMatrix};

/// Seed of the mixing coefficient t in A + tB.
const MIX_SEED: u64 = 0x5eed;

/// Allowed off-diagonal residue after joint diagonalization, relative to the
/// norms of the inputs.
const DIAG_TOL: f64 = 1e-9;

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn diagonal_re(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

fn offdiag_ok(e: &CMatrix, a: &CMatrix, b: &CMatrix, bound: f64) -> bool {
    max_offdiag(&(e.adjoint() * a * e)) <= bound && max_offdiag(&(e.adjoint() * b * e)) <= bound
}

/// Diagonalize A, then B inside each numerically degenerate eigenspace of A.
fn refine(a: &CMatrix, b: &CMatrix, group_tol: f64) -> CMatrix {
    let n = a.nrows();
    let (vals, vecs) = eigh(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let mut out = CMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[order[end]] - vals[order[end - 1]] <= group_tol {
            end += 1;
        }
        let k = end - start;
        let mut q = CMatrix::zeros(n, k);
        for (c, &idx) in order[start..end].iter().enumerate() {
            q.set_column(c, &vecs.column(idx));
        }
        let (_, inner) = eigh(&(q.adjoint() * b * &q));
        out.columns_mut(start, k).copy_from(&(q * inner));
        start = end;
    }
    out
}

/// Common eigenbasis of two commuting Hermitian matrices. Returns the
/// eigenvector matrix E (columns) and the paired eigenvalues, with columns
/// sorted lexicographically by (a, b).
pub fn joint_diagonalize(a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, Vec<f64>, Vec<f64>)> {
    let n = a.nrows();
    let scale = 1.0 + frobenius(a) + frobenius(b);
    let bound = DIAG_TOL * scale;
    let t: f64 = ChaCha8Rng::seed_from_u64(MIX_SEED).random_range(1.0..2.0);

    let (_, mut e) = eigh(&(a + b * Complex64::new(t, 0.0)));
    if !offdiag_ok(&e, a, b, bound) {
        e = refine(a, b, 1e-8 * scale);
        if !offdiag_ok(&e, a, b, bound) {
            let worst = max_offdiag(&(e.adjoint() * a * &e)).max(max_offdiag(&(e.adjoint() * b * &e)));
            return Err(Error::NotSimultaneouslyDiagonalizable(worst));
        }
    }
    let da = diagonal_re(&(e.adjoint() * a * &e));
    let db = diagonal_re(&(e.adjoint() * b * &e));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| da[i].total_cmp(&da[j]).then(db[i].total_cmp(&db[j])));
    let mut sorted = CMatrix::zeros(n, n);
    for (c, &idx) in order.iter().enumerate() {
        sorted.set_column(c, &e.column(idx));
    }
    Ok((sorted, order.iter().map(|&i| da[i]).collect(), order.iter().map(|&i| db[i]).collect()))
}

/// Unitary U with U·WW†·U† = diag(D) and U·W†W·U† = diag(D̃).
///
/// Fails when ‖[WW†, W†W]‖_F ≥ tol·(1 + ‖W‖_F²)².
pub fn simultaneous_diagonalize(w: &CMatrix, tol: f64) -> Result<(CMatrix, Vec<f64>, Vec<f64>)> {
    let d = w * w.adjoint();
    let dt = w.adjoint() * w;
    let c = frobenius(&commutator(&d, &dt));
    let wn = frobenius(w);
    if !(c < tol * (1.0 + wn * wn).powi(2)) {
        return Err(Error::NotSimultaneouslyDiagonalizable(c));
    }
    let (e, dv, dtv) = joint_diagonalize(&d, &dt)?;
    Ok((e.adjoint(), dv, dtv))
}
