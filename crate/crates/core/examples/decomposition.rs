//! Hides a loop ⊕ loop ⊕ string representation behind a random unitary change
//! of basis and recovers the irreducible blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rep_lab::algebra::AlgebraParams;
use rep_lab::dynamics::{NString, PeriodicOrbit, PlanePoint};
use rep_lab::io::to_canonical_json;
use rep_lab::linalg::{frobenius, haar_unitary};
use rep_lab::repbuild::{build_loop_rep, build_string_rep, Representation};
use rep_lab::specgraph::{decompose, DEFAULT_DECOMPOSE_TOL};

fn main() -> rep_lab::error::Result<()> {
    let p = AlgebraParams::new(1.0, vec![-1.0], vec![-1.0])?;
    let orbit = PeriodicOrbit::new(
        &p,
        vec![PlanePoint::new(0.4, 0.3), PlanePoint::new(0.3, 0.4), PlanePoint::new(0.3, 0.3)],
    )?;
    let string = NString::new(&p, vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 1.0)])?;
    let a = build_loop_rep(&p, &orbit, 0.5)?;
    let b = build_loop_rep(&p, &orbit, 2.0)?;
    let s = build_string_rep(&p, &string)?;
    let sum = Representation::direct_sum(&[&a, &b, &s])?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let hidden = sum.conjugated(&haar_unitary(sum.dim(), &mut rng))?;
    let report = decompose(&hidden, &p, DEFAULT_DECOMPOSE_TOL)?;

    print!("{}", to_canonical_json(&report)?);
    println!(
        "reconstruction error {:.1e}",
        frobenius(&(report.reconstruct() - hidden.w())) / frobenius(hidden.w())
    );
    Ok(())
}
