//! Equivalence of irreducibles: same spectrum and same determinant.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rep_lab::algebra::AlgebraParams;
use rep_lab::dynamics::{NString, PeriodicOrbit, PlanePoint};
use rep_lab::linalg::haar_unitary;
use rep_lab::repbuild::{build_loop_rep, build_string_rep, equivalent, spectrum};

fn main() -> rep_lab::error::Result<()> {
    let p = AlgebraParams::new(1.0, vec![-1.0], vec![-1.0])?;
    let orbit = PeriodicOrbit::new(
        &p,
        vec![PlanePoint::new(0.4, 0.3), PlanePoint::new(0.3, 0.4), PlanePoint::new(0.3, 0.3)],
    )?;
    let base = build_loop_rep(&p, &orbit, 0.0)?;
    let flipped = build_loop_rep(&p, &orbit, PI)?;
    let relabelled = build_loop_rep(&p, &orbit.rotated(2), 0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rotated = base.conjugated(&haar_unitary(3, &mut rng))?;

    for sp in spectrum(&base)? {
        println!("spectrum point ({}, {}) x{}", sp.point.d, sp.point.dt, sp.multiplicity);
    }
    println!("det(phase 0) = {:.6}, det(phase pi) = {:.6}", base.determinant(), flipped.determinant());
    println!("phase 0 vs phase pi:      {}", equivalent(&base, &flipped, &p)?);
    println!("cyclic relabelling:       {}", equivalent(&base, &relabelled, &p)?);
    println!("random unitary conjugate: {}", equivalent(&base, &rotated, &p)?);

    let s = build_string_rep(&p, &NString::new(&p, vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 1.0)])?)?;
    println!("string det = {}, string vs itself: {}", s.determinant(), equivalent(&s, &s, &p)?);
    Ok(())
}
