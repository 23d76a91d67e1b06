//! Grids, domains, and the regularized distance function shared by all
//! modules. Dimensions 1 and 2 only.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of R^1 or R^2. One-dimensional points keep the second coordinate
/// at zero so inner loops stay allocation-free.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: [f64; 2],
    pub dim: usize,
}

impl Point {
    pub fn d1(x: f64) -> Self {
        Point { coords: [x, 0.0], dim: 1 }
    }

    pub fn d2(x: f64, y: f64) -> Self {
        Point { coords: [x, y], dim: 2 }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        match v.len() {
            1 => Point::d1(v[0]),
            2 => Point::d2(v[0], v[1]),
            d => panic!("only dimensions 1 and 2 are supported, got {d}"),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Point { coords: [0.0, 0.0], dim }
    }

    #[inline]
    pub fn dot(&self, other: &Point) -> f64 {
        self.coords[0] * other.coords[0] + self.coords[1] * other.coords[1]
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn add_scaled(&self, t: f64, dir: &Point) -> Point {
        Point {
            coords: [self.coords[0] + t * dir.coords[0], self.coords[1] + t * dir.coords[1]],
            dim: self.dim,
        }
    }

    #[inline]
    pub fn sub(&self, other: &Point) -> Point {
        Point {
            coords: [self.coords[0] - other.coords[0], self.coords[1] - other.coords[1]],
            dim: self.dim,
        }
    }

    pub fn normalized(&self) -> Point {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Point { coords: [self.coords[0] / n, self.coords[1] / n], dim: self.dim }
    }

    /// Unit vector at angle `t` (dim 2).
    pub fn on_circle(t: f64) -> Point {
        Point::d2(t.cos(), t.sin())
    }
}

/// Domain kinds supported by the lab.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DomainKind {
    /// (center - radius, center + radius) in dimension 1.
    Interval,
    /// Axis-aligned box with half-widths equal to `radius` per axis.
    Box,
    /// Euclidean ball.
    Ball,
    /// Upper half space {x_n > 0} truncated to the bounding box; the
    /// analysis window must sit strictly inside the truncation.
    HalfSpaceTruncation,
}

/// A domain with its regularized interior distance.
///
/// `boundary_band` is the width of the collar where `distance` returns the
/// exact distance to the complement; further inside, the distance is capped
/// by a fixed C^2 profile so the extension is twice differentiable across
/// the medial axis.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub center: Point,
    pub radius: f64,
    pub boundary_band: f64,
}

impl Domain {
    pub fn new(kind: DomainKind, center: Point, radius: f64, boundary_band: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::invalid(format!("domain radius must be positive, got {radius}")));
        }
        if boundary_band >= radius || boundary_band <= 0.0 {
            return Err(Error::invalid(format!(
                "boundary band must lie in (0, radius), got {boundary_band} with radius {radius}"
            )));
        }
        Ok(Domain { kind, center, radius, boundary_band })
    }

    /// Default band of radius/4.
    pub fn with_default_band(kind: DomainKind, center: Point, radius: f64) -> Result<Self> {
        Self::new(kind, center, radius, radius / 4.0)
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::with_default_band(DomainKind::Interval, Point::d1(0.5 * (a + b)), 0.5 * (b - a))
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::with_default_band(DomainKind::Ball, center, radius)
    }

    pub fn half_space_2d(radius: f64) -> Result<Self> {
        Self::with_default_band(DomainKind::HalfSpaceTruncation, Point::d2(0.0, 0.0), radius)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            DomainKind::Interval => 1,
            _ => self.center.dim.max(2),
        }
    }

    /// Raw (signed-truncated) distance to the complement; 0 outside.
    pub fn raw_distance(&self, x: &Point) -> f64 {
        let d = match self.kind {
            DomainKind::Interval => self.radius - (x.coords[0] - self.center.coords[0]).abs(),
            DomainKind::Box => {
                let dx = self.radius - (x.coords[0] - self.center.coords[0]).abs();
                let dy = self.radius - (x.coords[1] - self.center.coords[1]).abs();
                dx.min(dy)
            }
            DomainKind::Ball => self.radius - x.sub(&self.center).norm(),
            DomainKind::HalfSpaceTruncation => x.coords[self.dim() - 1],
        };
        d.max(0.0)
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.raw_distance(x) > 0.0
    }

    /// C^2 interior extension of the distance: exact inside the boundary
    /// band, leveled off to a constant by a quintic profile further inside
    /// (so dist^s stays twice differentiable across ridge points of the raw
    /// distance).
    pub fn distance(&self, x: &Point) -> f64 {
        level_profile(self.raw_distance(x), self.boundary_band)
    }
}

/// Quintic leveling g(t): g = t on [0, b], constant 1.5 b beyond 2b, C^2
/// everywhere, nondecreasing.
pub(crate) fn level_profile(t: f64, b: f64) -> f64 {
    if t <= b {
        return t;
    }
    if t >= 2.0 * b {
        return 1.5 * b;
    }
    // Hermite quintic on [b, 2b] with value/slope/curvature (b, 1, 0) at b
    // and (1.5 b, 0, 0) at 2b.
    let u = (t - b) / b;
    let h = u * u * u * (6.0 * u * u - 15.0 * u + 10.0); // smoothstep quintic, h(0)=0,h(1)=1
    // integral-style blend: value = b + b * int_0^u (1 - h) du'
    // use closed form: int (1 - 6u^5+15u^4-10u^3) = u - u^6 + 3 u^5 - 2.5 u^4
    let _ = h;
    let int_part = u - u.powi(6) + 3.0 * u.powi(5) - 2.5 * u.powi(4);
    b + b * int_part
}

/// Uniform grid over an axis-aligned box; spacing identical per axis and
/// nodes include the corners.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub lo: Point,
    pub hi: Point,
    pub h: f64,
    pub n_per_axis: [usize; 2],
}

impl Grid {
    pub fn new(lo: Point, hi: Point, h: f64) -> Result<Self> {
        if h <= 0.0 {
            return Err(Error::invalid(format!("grid spacing must be positive, got {h}")));
        }
        let dim = lo.dim;
        if hi.dim != dim {
            return Err(Error::invalid("grid corners disagree on dimension".to_string()));
        }
        let mut n_per_axis = [1usize; 2];
        for a in 0..dim {
            let len = hi.coords[a] - lo.coords[a];
            if len <= 0.0 {
                return Err(Error::invalid("grid box has nonpositive extent".to_string()));
            }
            let steps = len / h;
            let rounded = steps.round();
            if (steps - rounded).abs() > 1e-9 * steps.max(1.0) {
                return Err(Error::invalid(format!(
                    "spacing {h} does not divide the box extent {len} on axis {a}"
                )));
            }
            let n = rounded as usize + 1;
            if n < 8 {
                return Err(Error::invalid(format!(
                    "grid needs at least 8 nodes per axis, axis {a} has {n}"
                )));
            }
            n_per_axis[a] = n;
        }
        Ok(Grid { dim, lo, hi, h, n_per_axis })
    }

    pub fn node_count(&self) -> usize {
        self.n_per_axis[..self.dim].iter().product()
    }

    pub fn node(&self, idx: usize) -> Point {
        match self.dim {
            1 => Point::d1(self.lo.coords[0] + self.h * idx as f64),
            _ => {
                let nx = self.n_per_axis[0];
                let (i, j) = (idx % nx, idx / nx);
                Point::d2(
                    self.lo.coords[0] + self.h * i as f64,
                    self.lo.coords[1] + self.h * j as f64,
                )
            }
        }
    }

    pub fn index_of(&self, multi: [usize; 2]) -> usize {
        match self.dim {
            1 => multi[0],
            _ => multi[1] * self.n_per_axis[0] + multi[0],
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, Point)> + '_ {
        (0..self.node_count()).map(move |i| (i, self.node(i)))
    }

    /// Multi-index of the node at or below `x` (clamped to valid range).
    pub fn cell_of(&self, x: &Point) -> [usize; 2] {
        let mut m = [0usize; 2];
        for a in 0..self.dim {
            let t = (x.coords[a] - self.lo.coords[a]) / self.h;
            let i = t.floor().max(0.0) as usize;
            m[a] = i.min(self.n_per_axis[a] - 2);
        }
        m
    }

    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim).all(|a| x.coords[a] >= self.lo.coords[a] && x.coords[a] <= self.hi.coords[a])
    }

    /// Largest distance from `x` to a corner of the box: beyond this radius
    /// every ray from `x` has left the box.
    pub fn circumradius_from(&self, x: &Point) -> f64 {
        let mut r: f64 = 0.0;
        let corners = match self.dim {
            1 => vec![Point::d1(self.lo.coords[0]), Point::d1(self.hi.coords[0])],
            _ => vec![
                Point::d2(self.lo.coords[0], self.lo.coords[1]),
                Point::d2(self.hi.coords[0], self.lo.coords[1]),
                Point::d2(self.lo.coords[0], self.hi.coords[1]),
                Point::d2(self.hi.coords[0], self.hi.coords[1]),
            ],
        };
        for c in corners {
            r = r.max(c.sub(x).norm());
        }
        r
    }
}

/// Exact distance function of the spec's `distance_function` operation.
pub fn distance_function(domain: &Domain, x: &Point) -> f64 {
    domain.distance(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_distance_in_band() {
        let d = Domain::ball(Point::d2(0.0, 0.0), 1.0).unwrap();
        let x = Point::d2(0.95, 0.0);
        assert_relative_eq!(d.distance(&x), 0.05, max_relative = 1e-14);
    }

    #[test]
    fn interval_interior_extension_positive() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let v = d.distance(&Point::d1(0.5));
        assert!(v > 0.0 && v <= 1.5 * d.boundary_band + 1e-15);
        // in-band exactness
        assert_relative_eq!(d.distance(&Point::d1(0.9)), 0.1, max_relative = 1e-14);
    }

    #[test]
    fn half_space_coordinate_distance() {
        let d = Domain::half_space_2d(2.0).unwrap();
        assert_relative_eq!(d.distance(&Point::d2(3.0, 0.3)), 0.3, max_relative = 1e-14);
    }

    #[test]
    fn distance_zero_outside() {
        let d = Domain::ball(Point::d2(0.0, 0.0), 1.0).unwrap();
        assert_eq!(d.distance(&Point::d2(1.5, 0.2)), 0.0);
        assert_eq!(d.distance(&Point::d2(1.0, 0.0)), 0.0);
    }

    #[test]
    fn level_profile_is_c1_at_junctions() {
        let b = 0.25;
        let eps = 1e-6;
        let slope_in = (level_profile(b, b) - level_profile(b - eps, b)) / eps;
        let slope_out = (level_profile(b + eps, b) - level_profile(b, b)) / eps;
        assert_relative_eq!(slope_in, slope_out, epsilon = 1e-4);
        let s2 = (level_profile(2.0 * b + eps, b) - level_profile(2.0 * b - eps, b)) / (2.0 * eps);
        assert!(s2.abs() < 1e-4);
        assert_relative_eq!(level_profile(3.0 * b, b), 1.5 * b, max_relative = 1e-14);
    }

    #[test]
    fn grid_invariants() {
        let g = Grid::new(Point::d1(-1.0), Point::d1(1.0), 0.25).unwrap();
        assert_eq!(g.node_count(), 9);
        assert_relative_eq!(g.node(0).coords[0], -1.0);
        assert_relative_eq!(g.node(8).coords[0], 1.0);
        assert!(Grid::new(Point::d1(-1.0), Point::d1(1.0), 0.3).is_err());
        assert!(Grid::new(Point::d1(-1.0), Point::d1(1.0), 0.5).is_err()); // only 5 nodes
    }

    #[test]
    fn grid_2d_indexing_roundtrip() {
        let g = Grid::new(Point::d2(0.0, 0.0), Point::d2(1.0, 2.0), 0.125).unwrap();
        for (i, p) in g.nodes() {
            let m = g.cell_of(&p);
            let _ = m;
            assert!(g.contains(&p));
            if i == 0 {
                assert_eq!(p, Point::d2(0.0, 0.0));
            }
        }
        assert_eq!(g.node_count(), 9 * 17);
    }
}
