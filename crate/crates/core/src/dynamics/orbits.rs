//! Periodic orbits of the dynamical map in the open positive quadrant.
//!
//! The search is a damped Newton iteration on F(x) = sᴺ(x) − x with the
//! Jacobian of sᴺ accumulated by the chain rule, started from a shifted
//! Halton point set over a search box. Converged roots are polished by a
//! multiple-shooting Newton step on the whole orbit (which stays well
//! conditioned where sᴺ is strongly expanding), reduced to their minimal
//! period, validated, and deduplicated up to cyclic rotation.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::map::{apply_n, apply_n_with_jacobian, jacobian, step, PlanePoint};
use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};

/// Validation tolerance for orbit and string relations.
pub const TOL_ORBIT: f64 = 1e-9;
/// Sup-norm tolerance for identifying two orbits.
pub const DEDUP_TOL: f64 = 1e-6;
/// Roots whose F-Jacobian has a larger condition estimate are rejected.
pub const COND_LIMIT: f64 = 1e10;

const MAX_NEWTON_ITERS: usize = 60;
const NEWTON_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 20;
/// Newton end states with a larger relative defect are discarded unpolished.
const POLISH_ENTRY: f64 = 1e-6;
const MAX_POLISH_ITERS: usize = 12;

/// A periodic orbit of the dynamical map, listed in iteration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    points: Vec<PlanePoint>,
}

impl PeriodicOrbit {
    /// Validates the orbit relation (to `TOL_ORBIT` relative to the point
    /// scale), minimality of the period, and that every point lies in the
    /// open positive quadrant.
    pub fn new(p: &AlgebraParams, points: Vec<PlanePoint>) -> Result<Self> {
        let orbit = Self { points };
        orbit.validate(p)?;
        Ok(orbit)
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(points: Vec<PlanePoint>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// max |s(xᵢ) − x_{i+1 mod N}|.
    pub fn defect(&self, p: &AlgebraParams) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| step(p, self.points[i]).dist(&self.points[(i + 1) % n]))
            .fold(0.0, f64::max)
    }

    pub fn validate(&self, p: &AlgebraParams) -> Result<()> {
        let n = self.points.len();
        if n == 0 {
            return Err(Error::InvalidOrbit("empty orbit".into()));
        }
        let scale = 1.0 + self.points.iter().map(PlanePoint::norm).fold(0.0, f64::max);
        let defect = self.defect(p);
        if !(defect < TOL_ORBIT * scale) {
            return Err(Error::InvalidOrbit(format!("orbit relation defect {defect:e}")));
        }
        if let Some(x) = self.points.iter().find(|x| !x.in_open_quadrant(TOL_ORBIT)) {
            return Err(Error::InvalidOrbit(format!("point ({}, {}) not in the open quadrant", x.d, x.dt)));
        }
        if let Some(m) = (1..n).find(|&m| n.is_multiple_of(m) && self.points[m].sup_dist(&self.points[0]) < DEDUP_TOL) {
            return Err(Error::InvalidOrbit(format!("period {n} is not minimal (repeats after {m})")));
        }
        Ok(())
    }

    /// The same orbit listed from another starting point.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut points = self.points.clone();
        let len = points.len().max(1);
        points.rotate_left(shift % len);
        Self { points }
    }

    /// Rotation starting at the lexicographically smallest point.
    pub fn canonical(&self) -> Self {
        let start = (0..self.points.len())
            .min_by(|&a, &b| self.points[a].lex_cmp(&self.points[b]))
            .unwrap_or(0);
        self.rotated(start)
    }

    /// Same point set up to cyclic rotation, within `tol` in the sup norm.
    pub fn same_orbit(&self, other: &PeriodicOrbit, tol: f64) -> bool {
        let n = self.points.len();
        if n != other.points.len() {
            return false;
        }
        (0..n).any(|r| {
            other.points[r].sup_dist(&self.points[0]) < tol
                && (0..n).all(|i| other.points[(i + r) % n].sup_dist(&self.points[i]) < tol)
        })
    }

    pub fn min_distance_to(&self, other: &PeriodicOrbit) -> f64 {
        self.points
            .iter()
            .flat_map(|a| other.points.iter().map(move |b| a.sup_dist(b)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Axis-aligned rectangle [d_min, d_max] × [dt_min, dt_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub d_min: f64,
    pub d_max: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl SearchBox {
    pub fn new(d_min: f64, d_max: f64, dt_min: f64, dt_max: f64) -> Result<Self> {
        let b = Self { d_min, d_max, dt_min, dt_max };
        if !(d_min < d_max && dt_min < dt_max) || ![d_min, d_max, dt_min, dt_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!("empty or non-finite box {b:?}")));
        }
        Ok(b)
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self { d_min: lo, d_max: hi, dt_min: lo, dt_max: hi }
    }

    pub fn contains(&self, x: &PlanePoint) -> bool {
        x.d >= self.d_min && x.d <= self.d_max && x.dt >= self.dt_min && x.dt <= self.dt_max
    }

    fn at(&self, u: f64, v: f64) -> PlanePoint {
        PlanePoint::new(
            self.d_min + u * (self.d_max - self.d_min),
            self.dt_min + v * (self.dt_max - self.dt_min),
        )
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// `count` points of the base-(2, 3) Halton sequence over the box, shifted
/// modulo 1 by a rotation drawn from `rng_seed`.
pub fn halton_seeds(b: &SearchBox, count: usize, rng_seed: u64) -> Vec<PlanePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (su, sv): (f64, f64) = (rng.random(), rng.random());
    (0..count as u64)
        .map(|i| {
            let u = (radical_inverse(i + 1, 2) + su).fract();
            let v = (radical_inverse(i + 1, 3) + sv).fract();
            b.at(u, v)
        })
        .collect()
}

/// Result of [`find_periodic_orbits`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OrbitSearch {
    /// Validated orbits whose minimal period divides the requested period,
    /// sorted by period and then by their canonical first point.
    pub orbits: Vec<PeriodicOrbit>,
    /// Roots at which the Jacobian of sᴺ − id is numerically singular.
    pub singular_roots: Vec<PlanePoint>,
}

impl OrbitSearch {
    pub fn with_period(&self, period: usize) -> impl Iterator<Item = &PeriodicOrbit> {
        self.orbits.iter().filter(move |o| o.period() == period)
    }
}

enum SeedOutcome {
    Root(PlanePoint),
    Singular(PlanePoint),
    Lost,
}

fn cond2(m: &Matrix2<f64>) -> f64 {
    let sv = m.singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn residual(p: &AlgebraParams, x: PlanePoint, period: usize) -> Option<(Vector2<f64>, Matrix2<f64>)> {
    let (y, j) = apply_n_with_jacobian(p, x, period).ok()?;
    Some((Vector2::new(y.d - x.d, y.dt - x.dt), j - Matrix2::identity()))
}

fn newton_from(p: &AlgebraParams, period: usize, seed: PlanePoint) -> SeedOutcome {
    let mut x = seed;
    let Some((mut f, mut jf)) = residual(p, x, period) else {
        return SeedOutcome::Lost;
    };
    for _ in 0..MAX_NEWTON_ITERS {
        let scale = 1.0 + x.norm();
        if f.norm() <= NEWTON_TOL * scale {
            break;
        }
        let Some(delta) = jf.lu().solve(&(-f)) else { break };
        if !delta.iter().all(|v| v.is_finite()) {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = PlanePoint::new(x.d + lambda * delta[0], x.dt + lambda * delta[1]);
            if let Some((ft, jt)) = residual(p, trial, period) {
                if ft.norm() < f.norm() {
                    accepted = Some((trial, ft, jt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((xn, fnew, jnew)) = accepted else { break };
        let moved = (lambda * delta).norm();
        x = xn;
        f = fnew;
        jf = jnew;
        if moved <= NEWTON_TOL * scale {
            break;
        }
    }
    if !(f.norm() <= POLISH_ENTRY * (1.0 + x.norm())) {
        return SeedOutcome::Lost;
    }
    if cond2(&jf) > COND_LIMIT {
        SeedOutcome::Singular(x)
    } else {
        SeedOutcome::Root(x)
    }
}

/// Multiple-shooting Newton on G_i = s(x_i) − x_{i+1 mod N}.
pub(crate) fn polish_cycle(p: &AlgebraParams, mut pts: Vec<PlanePoint>) -> Option<Vec<PlanePoint>> {
    let n = pts.len();
    let defect_of = |pts: &[PlanePoint]| -> DVector<f64> {
        DVector::from_iterator(
            2 * n,
            (0..n).flat_map(|i| {
                let y = step(p, pts[i]);
                let nx = pts[(i + 1) % n];
                [y.d - nx.d, y.dt - nx.dt]
            }),
        )
    };
    let mut g = defect_of(&pts);
    for _ in 0..MAX_POLISH_ITERS {
        let scale = 1.0 + pts.iter().map(PlanePoint::norm).fold(0.0, f64::max);
        if g.amax() <= 1e-15 * scale {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            let j = jacobian(p, pts[i]);
            let k = (i + 1) % n;
            for r in 0..2 {
                for c in 0..2 {
                    jac[(2 * i + r, 2 * i + c)] += j[(r, c)];
                }
                jac[(2 * i + r, 2 * k + r)] -= 1.0;
            }
        }
        let delta = jac.lu().solve(&(-&g))?;
        let trial: Vec<PlanePoint> = pts
            .iter()
            .enumerate()
            .map(|(i, x)| PlanePoint::new(x.d + delta[2 * i], x.dt + delta[2 * i + 1]))
            .collect();
        let gt = defect_of(&trial);
        if !(gt.amax() < g.amax()) {
            break;
        }
        pts = trial;
        g = gt;
    }
    pts.iter().all(PlanePoint::is_finite).then_some(pts)
}

/// Turns a root of sᴺ − id into a validated orbit of its minimal period.
fn orbit_from_root(p: &AlgebraParams, root: PlanePoint, period: usize) -> Option<PeriodicOrbit> {
    let mut pts = Vec::with_capacity(period);
    let mut y = root;
    for _ in 0..period {
        pts.push(y);
        y = step(p, y);
    }
    let minimal = (1..=period)
        .find(|&m| period.is_multiple_of(m) && (m == period || pts[m].sup_dist(&pts[0]) < DEDUP_TOL))
        .unwrap_or(period);
    pts.truncate(minimal);
    let pts = polish_cycle(p, pts)?;
    let orbit = PeriodicOrbit::new(p, pts).ok()?;
    Some(orbit.canonical())
}

/// Thread cap for seed-parallel searches, from `REP_LAB_THREADS`.
pub fn thread_cap() -> Option<usize> {
    std::env::var("REP_LAB_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

pub(crate) fn with_search_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match thread_cap().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Whether sᴺ acts as the identity on a sample of the box.
fn is_identity_on_box(p: &AlgebraParams, period: usize, b: &SearchBox) -> bool {
    halton_seeds(b, 8, 0x5eed).into_iter().all(|x| match apply_n_with_jacobian(p, x, period) {
        Ok((y, j)) => {
            y.dist(&x) <= 1e-10 * (1.0 + x.norm()) && (j - Matrix2::identity()).amax() <= 1e-10
        }
        Err(_) => false,
    })
}

/// Finds periodic orbits whose minimal period divides `period` and which
/// meet the search box, starting damped Newton from `seeds` Halton points.
///
/// Orbits are kept only when every point lies in the open positive quadrant.
/// Returns [`Error::DegenerateMap`] when sᴺ is the identity on the box.
pub fn find_periodic_orbits(
    p: &AlgebraParams,
    period: usize,
    search_box: &SearchBox,
    seeds: usize,
    rng_seed: u64,
) -> Result<OrbitSearch> {
    if period == 0 || seeds == 0 {
        return Err(Error::InvalidParameter("period and seed count must be positive".into()));
    }
    if is_identity_on_box(p, period, search_box) {
        return Err(Error::DegenerateMap { period });
    }
    let starts = halton_seeds(search_box, seeds, rng_seed);
    let outcomes: Vec<SeedOutcome> =
        with_search_pool(|| starts.par_iter().map(|&x| newton_from(p, period, x)).collect());

    let mut search = OrbitSearch::default();
    for outcome in outcomes {
        match outcome {
            SeedOutcome::Root(root) => {
                let Some(orbit) = orbit_from_root(p, root, period) else { continue };
                if !orbit.points().iter().any(|x| search_box.contains(x)) {
                    continue;
                }
                if !search.orbits.iter().any(|o| o.same_orbit(&orbit, DEDUP_TOL)) {
                    search.orbits.push(orbit);
                }
            }
            SeedOutcome::Singular(x) => {
                if search_box.contains(&x) && !search.singular_roots.iter().any(|y| y.sup_dist(&x) < DEDUP_TOL) {
                    search.singular_roots.push(x);
                }
            }
            SeedOutcome::Lost => {}
        }
    }
    search
        .orbits
        .sort_by(|a, b| a.period().cmp(&b.period()).then(a.points()[0].lex_cmp(&b.points()[0])));
    Ok(search)
}

/// Smallest divisor m of `period` with |sᵐ(x) − x| ≤ tol.
pub fn minimal_period(p: &AlgebraParams, x: PlanePoint, period: usize, tol: f64) -> Result<usize> {
    if period == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let defect = apply_n(p, x, period).map(|y| y.dist(&x)).unwrap_or(f64::INFINITY);
    if !(defect <= tol) {
        return Err(Error::NotPeriodic { period, defect });
    }
    let mut y = x;
    for m in 1..=period {
        y = step(p, y);
        if period.is_multiple_of(m) && y.dist(&x) <= tol {
            return Ok(m);
        }
    }
    Ok(period)
}
