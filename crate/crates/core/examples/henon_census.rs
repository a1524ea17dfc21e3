//! Periodic-orbit census of the translated Hénon map at a = 5, b = 0.3,
//! r = 3, compared with the period-n point counts of the full two-shift.

use rep_lab::dynamics::{henon_orbit_census, OrbitCensus};

fn main() -> rep_lab::error::Result<()> {
    let max_period = 8;
    let census = henon_orbit_census(5.0, 0.3, 3.0, max_period)?;
    println!("{:>6} {:>8} {:>6} {:>8} {:>8}", "period", "points", "2^n", "orbits", "shift");
    for row in &census.rows {
        println!(
            "{:>6} {:>8} {:>6} {:>8} {:>8}",
            row.period,
            row.points_found,
            OrbitCensus::shift_points(row.period),
            row.minimal_orbits,
            OrbitCensus::shift_minimal_orbits(row.period),
        );
    }
    let longest = census.orbits.last().expect("census is nonempty");
    println!("\nan orbit of period {}:", longest.period());
    for x in longest.points() {
        println!("  ({:.12}, {:.12})", x.d, x.dt);
    }
    Ok(())
}
