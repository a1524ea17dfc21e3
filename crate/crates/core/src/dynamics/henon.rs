//! Hénon-specific tooling: periodic-orbit census of the translated map and
//! the conjugacy residual between the raw and translated maps.

use serde::{Deserialize, Serialize};

use super::map::{step, PlanePoint};
use super::orbits::{find_periodic_orbits, PeriodicOrbit, SearchBox, DEDUP_TOL};
use crate::algebra::henon_preset;
use crate::error::{Error, Result};

/// Newton seeds per period used by the census.
pub const CENSUS_SEEDS: usize = 32_768;
pub const CENSUS_RNG_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub period: usize,
    /// Points x with sⁿ(x) = x among the orbits found.
    pub points_found: usize,
    /// Distinct orbits of minimal period n found.
    pub minimal_orbits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitCensus {
    pub rows: Vec<CensusRow>,
    /// Every distinct orbit found, sorted by period.
    pub orbits: Vec<PeriodicOrbit>,
}

impl OrbitCensus {
    pub fn row(&self, period: usize) -> Option<&CensusRow> {
        self.rows.iter().find(|r| r.period == period)
    }

    /// Number of period-n points of the full two-shift, 2ⁿ.
    pub fn shift_points(period: usize) -> usize {
        1usize << period
    }

    /// Number of minimal-period-n orbits of the full two-shift, from the
    /// divisor sums Σ_{m|n} m·O(m) = 2ⁿ.
    pub fn shift_minimal_orbits(period: usize) -> usize {
        let mut orbits = vec![0usize; period + 1];
        for n in 1..=period {
            let lower: usize = (1..n).filter(|m| n % m == 0).map(|m| m * orbits[m]).sum();
            orbits[n] = (Self::shift_points(n) - lower) / n;
        }
        orbits[period]
    }
}

/// Runs the orbit search for every period up to `max_period` on the
/// translated Hénon map over [0, 2r]² and tabulates the distinct orbits.
pub fn henon_orbit_census(a: f64, b: f64, r: f64, max_period: usize) -> Result<OrbitCensus> {
    henon_orbit_census_with(a, b, r, max_period, CENSUS_SEEDS, CENSUS_RNG_SEED)
}

pub fn henon_orbit_census_with(
    a: f64,
    b: f64,
    r: f64,
    max_period: usize,
    seeds: usize,
    rng_seed: u64,
) -> Result<OrbitCensus> {
    if max_period == 0 {
        return Err(Error::InvalidParameter("max_period must be at least 1".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("shift r must be positive, got {r}")));
    }
    let p = henon_preset(a, b, r);
    let search_box = SearchBox::square(0.0, 2.0 * r);
    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    for n in 1..=max_period {
        let found = find_periodic_orbits(&p, n, &search_box, seeds, rng_seed)?;
        for o in found.orbits {
            if !orbits.iter().any(|x| x.same_orbit(&o, DEDUP_TOL)) {
                orbits.push(o);
            }
        }
    }
    orbits.sort_by(|x, y| x.period().cmp(&y.period()).then(x.points()[0].lex_cmp(&y.points()[0])));
    let rows = (1..=max_period)
        .map(|n| CensusRow {
            period: n,
            points_found: orbits.iter().filter(|o| n % o.period() == 0).map(PeriodicOrbit::period).sum(),
            minimal_orbits: orbits.iter().filter(|o| o.period() == n).count(),
        })
        .collect();
    Ok(OrbitCensus { rows, orbits })
}

/// The raw Hénon map (x, y) ↦ (a − by − x², x).
pub fn raw_henon(a: f64, b: f64, x: PlanePoint) -> PlanePoint {
    PlanePoint::new(a - b * x.dt - x.d * x.d, x.d)
}

/// |fⁿ(x) + (r, r) − sⁿ(x + (r, r))| for the raw map f and the translated
/// algebra map s.
pub fn shift_conjugation_residual(a: f64, b: f64, r: f64, x: PlanePoint, n: usize) -> f64 {
    let p = henon_preset(a, b, r);
    let mut raw = x;
    let mut shifted = PlanePoint::new(x.d + r, x.dt + r);
    for _ in 0..n {
        raw = raw_henon(a, b, raw);
        shifted = step(&p, shifted);
    }
    PlanePoint::new(raw.d + r, raw.dt + r).dist(&shifted)
}
