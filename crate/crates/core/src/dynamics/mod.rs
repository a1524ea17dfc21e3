//! The dynamical map s of an algebra, its derivative and inverse, and the
//! searches for periodic orbits and N-strings.

mod first_order;
mod henon;
mod map;
mod orbits;
mod strings;

pub use first_order::{first_order_analytic, theta_params, FirstOrderClassification};
pub use henon::{
    henon_orbit_census, henon_orbit_census_with, raw_henon, shift_conjugation_residual, CensusRow,
    OrbitCensus, CENSUS_RNG_SEED, CENSUS_SEEDS,
};
pub use map::{apply, apply_n, apply_n_with_jacobian, inverse, jacobian, PlanePoint, DIVERGENCE_BOUND};
pub use orbits::{
    find_periodic_orbits, halton_seeds, minimal_period, thread_cap, OrbitSearch, PeriodicOrbit,
    SearchBox, COND_LIMIT, DEDUP_TOL, TOL_ORBIT,
};
pub use strings::{find_strings, NString, DEFAULT_STRING_GRID};

pub(crate) use map::step;
