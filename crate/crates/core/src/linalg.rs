//! Small dense complex-matrix helpers shared by the representation modules.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest modulus of an off-diagonal entry.
pub fn max_offdiag(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for ((i, j), z) in m.iter().enumerate().map(|(k, z)| ((k % m.nrows(), k / m.nrows()), z)) {
        if i != j {
            worst = worst.max(z.norm());
        }
    }
    worst
}

/// Frobenius distance of `m` from the identity.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    frobenius(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[&CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(*b);
        off += k;
    }
    out
}

/// Haar-distributed random unitary (QR of a complex Ginibre matrix with the
/// phases of R's diagonal divided out).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Determinant by LU with partial pivoting. A matrix with an all-zero pivot
/// column returns exactly zero.
pub fn determinant(m: &CMatrix) -> Complex64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (piv, pmag) = (col..n)
            .map(|r| (r, a[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            a.swap_rows(piv, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for r in col + 1..n {
            let f = a[(r, col)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[(col, c)];
                a[(r, c)] -= f * v;
            }
        }
    }
    det
}
