//! N-strings: trajectories (a, 0) → … → (0, b) through the open quadrant.

use serde::{Deserialize, Serialize};

use super::map::{step, PlanePoint};
use super::orbits::{DEDUP_TOL, TOL_ORBIT};
use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};

pub const DEFAULT_STRING_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NString {
    points: Vec<PlanePoint>,
}

impl NString {
    /// The one-point string {(0, 0)}, i.e. the zero representation.
    pub fn trivial() -> Self {
        Self { points: vec![PlanePoint::new(0.0, 0.0)] }
    }

    pub fn new(p: &AlgebraParams, points: Vec<PlanePoint>) -> Result<Self> {
        let s = Self { points };
        s.validate(p)?;
        Ok(s)
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(points: Vec<PlanePoint>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self, p: &AlgebraParams) -> Result<()> {
        let n = self.points.len();
        match n {
            0 => return Err(Error::InvalidString("empty string".into())),
            1 => {
                return if self.points[0] == PlanePoint::new(0.0, 0.0) {
                    Ok(())
                } else {
                    Err(Error::InvalidString("a one-point string must be (0, 0)".into()))
                }
            }
            _ => {}
        }
        let first = self.points[0];
        let last = self.points[n - 1];
        if !(first.dt == 0.0 && first.d > 0.0) {
            return Err(Error::InvalidString(format!("first point ({}, {}) is not (a, 0), a > 0", first.d, first.dt)));
        }
        if !(last.d == 0.0 && last.dt > 0.0) {
            return Err(Error::InvalidString(format!("last point ({}, {}) is not (0, b), b > 0", last.d, last.dt)));
        }
        if let Some(x) = self.points[1..n - 1].iter().find(|x| !x.in_open_quadrant(TOL_ORBIT)) {
            return Err(Error::InvalidString(format!("interior point ({}, {}) not in the open quadrant", x.d, x.dt)));
        }
        let scale = 1.0 + self.points.iter().map(PlanePoint::norm).fold(0.0, f64::max);
        for w in self.points.windows(2) {
            let defect = step(p, w[0]).dist(&w[1]);
            if !(defect < TOL_ORBIT * scale) {
                return Err(Error::InvalidString(format!("string relation defect {defect:e}")));
            }
        }
        Ok(())
    }
}

/// First coordinate of s^{N−1}((a, 0)), or `None` once an iterate escapes.
fn endpoint(p: &AlgebraParams, a: f64, length: usize) -> Option<f64> {
    let mut x = PlanePoint::new(a, 0.0);
    for _ in 1..length {
        x = step(p, x);
        if x.escaped() {
            return None;
        }
    }
    Some(x.d)
}

/// Bisects a bracketed root of `g` down to adjacent floating-point values.
fn bisect(g: impl Fn(f64) -> Option<f64>, mut lo: f64, mut hi: f64, mut g_lo: f64) -> Option<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Some(mid);
        }
        if (gm < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    let g_hi = g(hi)?;
    Some(if g_lo.abs() <= g_hi.abs() { lo } else { hi })
}

fn string_from(p: &AlgebraParams, a: f64, length: usize) -> Option<NString> {
    let mut pts = Vec::with_capacity(length);
    let mut x = PlanePoint::new(a, 0.0);
    pts.push(x);
    for _ in 1..length {
        x = step(p, x);
        pts.push(x);
    }
    let last = pts.last_mut()?;
    let scale = 1.0 + last.norm();
    if last.d.abs() >= TOL_ORBIT * scale {
        return None;
    }
    last.d = 0.0;
    NString::new(p, pts).ok()
}

/// Scans g(a) = first coordinate of s^{N−1}((a, 0)) on `grid` points of
/// (0, a_max], bisects each sign change, and keeps the roots whose
/// trajectories are valid N-strings. Length 1 yields the trivial string.
pub fn find_strings(p: &AlgebraParams, length: usize, a_max: f64, grid: usize) -> Result<Vec<NString>> {
    if length == 0 {
        return Err(Error::InvalidParameter("string length must be positive".into()));
    }
    if length == 1 {
        return Ok(vec![NString::trivial()]);
    }
    if !(a_max > 0.0 && a_max.is_finite()) || grid == 0 {
        return Err(Error::InvalidParameter("a_max must be positive and grid nonempty".into()));
    }
    let g = |a: f64| endpoint(p, a, length);
    let mut roots: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for j in 1..=grid {
        let a = a_max * j as f64 / grid as f64;
        let ga = g(a);
        if ga == Some(0.0) {
            roots.push(a);
        }
        if let (Some((a0, g0)), Some(g1)) = (prev, ga) {
            if g0 * g1 < 0.0 {
                if let Some(r) = bisect(g, a0, a, g0) {
                    roots.push(r);
                }
            }
        }
        prev = ga.map(|v| (a, v));
    }
    let mut strings: Vec<NString> = Vec::new();
    for a in roots {
        let Some(s) = string_from(p, a, length) else { continue };
        if !strings.iter().any(|t| (t.points[0].d - a).abs() < DEDUP_TOL) {
            strings.push(s);
        }
    }
    strings.sort_by(|x, y| x.points[0].d.total_cmp(&y.points[0].d));
    Ok(strings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::henon_preset;

    #[test]
    fn two_strings_from_linear_endpoint() {
        let p = AlgebraParams::new(1.0, vec![-1.0], vec![-1.0]).unwrap();
        let s = find_strings(&p, 2, 10.0, DEFAULT_STRING_GRID).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].points(), &[PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 1.0)]);

        let p = AlgebraParams::new(2.0, vec![-1.0], vec![-1.0]).unwrap();
        let s = find_strings(&p, 2, 10.0, 997).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].points()[0].d - 2.0).abs() < 1e-14);
        assert_eq!(s[0].points()[1].d, 0.0);
    }

    #[test]
    fn root_beyond_range_gives_nothing() {
        let p = AlgebraParams::new(1.0, vec![-1.0], vec![-1.0]).unwrap();
        assert!(find_strings(&p, 2, 0.5, 1000).unwrap().is_empty());
    }

    #[test]
    fn three_strings_of_resonant_map() {
        // (a,0) -> (1-a, a) -> (0, 1-a) for every a in (0, 1)
        let p = AlgebraParams::new(1.0, vec![-1.0], vec![-1.0]).unwrap();
        let s = NString::new(&p, vec![PlanePoint::new(0.25, 0.0), PlanePoint::new(0.75, 0.25), PlanePoint::new(0.0, 0.75)]);
        assert!(s.is_ok());
    }

    #[test]
    fn length_one_is_trivial() {
        let p = henon_preset(5.0, 0.3, 3.0);
        assert_eq!(find_strings(&p, 1, 1.0, 10).unwrap(), vec![NString::trivial()]);
        assert!(find_strings(&p, 0, 1.0, 10).is_err());
    }

    #[test]
    fn henon_strings_validate() {
        let p = henon_preset(5.0, 0.3, 3.0);
        for n in 2..=6 {
            for s in find_strings(&p, n, 8.0, DEFAULT_STRING_GRID).unwrap() {
                assert_eq!(s.len(), n);
                s.validate(&p).unwrap();
            }
        }
    }

    #[test]
    fn invalid_strings_rejected() {
        let p = AlgebraParams::new(1.0, vec![-1.0], vec![-1.0]).unwrap();
        assert!(NString::new(&p, vec![PlanePoint::new(1.0, 0.0), PlanePoint::new(0.0, 2.0)]).is_err());
        assert!(NString::new(&p, vec![PlanePoint::new(0.5, 0.0)]).is_err());
        assert!(NString::new(&p, vec![PlanePoint::new(0.0, 0.0)]).is_ok());
    }
}
