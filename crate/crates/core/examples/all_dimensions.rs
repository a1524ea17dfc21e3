//! Irreducible loop representations of every dimension 1..=10 for a Hénon
//! algebra, each checked against the defining relations.

use rep_lab::algebra::{henon_preset, relation_residual};
use rep_lab::dynamics::henon_orbit_census;
use rep_lab::linalg::frobenius;
use rep_lab::repbuild::build_loop_rep;

fn main() -> rep_lab::error::Result<()> {
    let (a, b, r) = (5.0, 0.3, 3.0);
    let p = henon_preset(a, b, r);
    let census = henon_orbit_census(a, b, r, 10)?;
    println!("{:>3} {:>6} {:>12} {:>12} {:>12}", "dim", "orbits", "max resid", "bound", "|det W|");
    for dim in 1..=10 {
        let orbits: Vec<_> = census.orbits.iter().filter(|o| o.period() == dim).collect();
        let Some(first) = orbits.first() else {
            println!("{dim:>3} {:>6}", 0);
            continue;
        };
        let rep = build_loop_rep(&p, first, 0.0)?;
        let wn = frobenius(rep.w());
        let res = relation_residual(&p, rep.w())?;
        println!(
            "{dim:>3} {:>6} {:>12.3e} {:>12.3e} {:>12.6}",
            orbits.len(),
            res.max(),
            1e-9 * (1.0 + wn.powi(3)),
            rep.determinant().norm()
        );
    }
    Ok(())
}
