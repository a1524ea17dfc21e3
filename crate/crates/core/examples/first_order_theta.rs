//! Order-one algebras tuned to θ = kπ/n: the dynamical map is a rotation of
//! order n, every non-fixed orbit has period n, and the numerical orbit search
//! reports the degenerate case instead of returning a continuum of roots.

use rep_lab::algebra::relation_residual;
use rep_lab::dynamics::{apply_n, find_periodic_orbits, first_order_analytic, theta_params, PlanePoint, SearchBox};
use rep_lab::error::Error;
use rep_lab::repbuild::build_loop_rep;

fn main() -> rep_lab::error::Result<()> {
    for (n, k) in [(3, 1), (4, 1), (5, 2), (6, 1)] {
        let p = theta_params(n, k, 1.0)?;
        let c = first_order_analytic(&p, 100)?;
        let x = PlanePoint::new(0.7, 0.2);
        let back = apply_n(&p, x, n as usize)?;
        println!(
            "theta = {k}pi/{n}: gamma_1 = {:+.6}, fixed point {:?}, |s^{n}(x) - x| = {:.1e}",
            p.gamma()[0],
            c.fixed_point.map(|f| (f.d, f.dt)),
            back.dist(&x)
        );
        for orbit in &c.sample_orbits {
            let rep = build_loop_rep(&p, orbit, 0.0)?;
            println!("  {}-dim loop, residual {:.1e}", rep.dim(), relation_residual(&p, rep.w())?.max());
        }
        match find_periodic_orbits(&p, n as usize, &SearchBox::square(0.0, 2.0), 256, 0) {
            Err(Error::DegenerateMap { period }) => println!("  orbit search at period {period}: degenerate map"),
            other => println!("  orbit search at period {n}: {other:?}"),
        }
    }
    Ok(())
}
