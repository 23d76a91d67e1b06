//! Boundary-behavior measurement: the quotient u / d^s, dyadic oscillation
//! decay with best-fit polynomials, Holder-exponent regression, and the
//! L(d^s) regularity check.

use crate::error::{Error, Result};
use crate::function::{Evaluable, FarFieldModel, GridFunction};
use crate::geometry::{Domain, Point};
use crate::operators::{eval_directional, EvalContext, KernelSpec};
use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;

/// Nodewise u / d^s with the near-boundary band masked out.
#[derive(Clone, Debug)]
pub struct QuotientField {
    pub grid: crate::geometry::Grid,
    /// Quotient values; NaN on masked nodes.
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    /// Width of the excluded band (one grid cell).
    pub excluded_band: f64,
}

/// Divides by the regularized distance power, masking nodes with d <= h.
pub fn quotient(u: &GridFunction, domain: &Domain, s: f64) -> QuotientField {
    let h = u.grid.h;
    let mut values = Vec::with_capacity(u.values.len());
    let mut mask = Vec::with_capacity(u.values.len());
    for (i, p) in u.grid.nodes() {
        let d = domain.distance(&p);
        if d > h {
            values.push(u.values[i] / d.powf(s));
            mask.push(true);
        } else {
            values.push(f64::NAN);
            mask.push(false);
        }
    }
    QuotientField { grid: u.grid.clone(), values, mask, excluded_band: h }
}

/// Exponent estimate: `Exact` flags a fit whose residuals vanish to grid
/// accuracy (never serialized as a numeric infinity).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentEstimate {
    Exact,
    Fitted { alpha: f64, r_squared: f64 },
}

impl ExponentEstimate {
    pub fn alpha_or(&self, exact_value: f64) -> f64 {
        match self {
            ExponentEstimate::Exact => exact_value,
            ExponentEstimate::Fitted { alpha, .. } => *alpha,
        }
    }
}

/// Dyadic oscillation-decay fit at a boundary anchor.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    pub anchor: Point,
    pub degree: usize,
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares polynomial coefficients per radius (constant; or
    /// constant + gradient).
    pub polys: Vec<Vec<f64>>,
    pub alpha: ExponentEstimate,
    /// Number of radii dropped because the smallest balls held fewer than
    /// 10 unmasked nodes.
    pub k_reduced_by: usize,
}

/// Least-squares fit of a degree-0 or degree-1 polynomial over the given
/// points; returns (coefficients, rms residual).
fn poly_fit(pts: &[(Point, f64)], degree: usize, center: &Point) -> (Vec<f64>, f64) {
    let n = pts.len() as f64;
    if degree == 0 {
        let mean = pts.iter().map(|(_, v)| v).sum::<f64>() / n;
        let ss = pts.iter().map(|(_, v)| (v - mean) * (v - mean)).sum::<f64>() / n;
        return (vec![mean], ss.sqrt());
    }
    // normal equations for [1, x-cx, y-cy]
    let dim = center.dim;
    let cols = 1 + dim;
    let mut ata = vec![0.0; cols * cols];
    let mut atb = vec![0.0; cols];
    for (p, v) in pts {
        let mut row = [0.0; 3];
        row[0] = 1.0;
        for a in 0..dim {
            row[1 + a] = p.coords[a] - center.coords[a];
        }
        for i in 0..cols {
            for j in 0..cols {
                ata[i * cols + j] += row[i] * row[j];
            }
            atb[i] += row[i] * v;
        }
    }
    // tiny dense solve
    let mut m = ata.clone();
    let mut b = atb.clone();
    for c in 0..cols {
        let mut piv = c;
        for r in c + 1..cols {
            if m[r * cols + c].abs() > m[piv * cols + c].abs() {
                piv = r;
            }
        }
        if m[piv * cols + c].abs() < 1e-300 {
            // degenerate geometry: fall back to the mean
            let mean = pts.iter().map(|(_, v)| v).sum::<f64>() / n;
            let ss = pts.iter().map(|(_, v)| (v - mean) * (v - mean)).sum::<f64>() / n;
            return (vec![mean], ss.sqrt());
        }
        for k in 0..cols {
            m.swap(c * cols + k, piv * cols + k);
        }
        b.swap(c, piv);
        for r in c + 1..cols {
            let f = m[r * cols + c] / m[c * cols + c];
            for k in c..cols {
                m[r * cols + k] -= f * m[c * cols + k];
            }
            b[r] -= f * b[c];
        }
    }
    for r in (0..cols).rev() {
        for k in r + 1..cols {
            b[r] -= m[r * cols + k] * b[k];
        }
        b[r] /= m[r * cols + r];
    }
    let mut ss = 0.0;
    for (p, v) in pts {
        let mut fit = b[0];
        for a in 0..dim {
            fit += b[1 + a] * (p.coords[a] - center.coords[a]);
        }
        ss += (v - fit) * (v - fit);
    }
    (b, (ss / n).sqrt())
}

/// Ordinary least squares of y against x; returns (slope, intercept, r^2).
pub fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// For each dyadic radius `r_k = 4^{-k}` computes the best-fit polynomial
/// of the quotient over the half ball `B_{r_k}(z)` (unmasked nodes) and the
/// rms residual, then regresses log residual against log radius.
///
/// K shrinks until the smallest ball holds at least 10 unmasked nodes. The
/// largest ball is dropped from the regression when at least 3 radii
/// remain; otherwise all radii enter.
pub fn oscillation_decay(
    q: &QuotientField,
    z: &Point,
    k_max: usize,
    degree: usize,
) -> Result<ExponentFit> {
    if degree > 1 {
        return Err(Error::invalid("fit degree must be 0 or 1"));
    }
    let mut radii = Vec::new();
    let mut residuals = Vec::new();
    let mut polys = Vec::new();
    let mut k_reduced_by = 0usize;
    for k in 1..=k_max {
        let r = 4f64.powi(-(k as i32));
        if r < 4.0 * q.grid.h {
            k_reduced_by = k_max - (k - 1);
            break;
        }
        let pts: Vec<(Point, f64)> = q
            .grid
            .nodes()
            .filter(|(i, p)| q.mask[*i] && p.sub(z).norm() < r)
            .map(|(i, p)| (p, q.values[i]))
            .collect();
        if pts.len() < 10 {
            k_reduced_by = k_max - (k - 1);
            break;
        }
        let (coefs, rms) = poly_fit(&pts, degree, z);
        radii.push(r);
        residuals.push(rms);
        polys.push(coefs);
    }
    if radii.len() < 2 {
        return Err(Error::Diagnostic(format!(
            "oscillation decay needs at least 2 usable radii at anchor {:?}",
            z.coords
        )));
    }
    let scale = residuals.iter().fold(0.0f64, |m, &v| m.max(v));
    let alpha = if scale < 1e-12 {
        ExponentEstimate::Exact
    } else {
        // drop the largest ball to limit far-field contamination when
        // enough radii remain
        let skip = if radii.len() >= 3 { 1 } else { 0 };
        let xs: Vec<f64> = radii[skip..].iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = residuals[skip..].iter().map(|v| v.max(1e-300).ln()).collect();
        let (slope, _, r2) = linear_regression(&xs, &ys);
        ExponentEstimate::Fitted { alpha: slope, r_squared: r2 }
    };
    Ok(ExponentFit { anchor: *z, degree, radii, residuals, polys, alpha, k_reduced_by })
}

/// Holder exponent of a sampled field as the log-log slope of the binned
/// maximum difference against distance. Needs at least 100 pairs; constant
/// fields report `Exact`.
pub fn holder_fit(points: &[Point], values: &[f64]) -> Result<ExponentEstimate> {
    let n = points.len();
    if n * (n - 1) / 2 < 100 {
        return Err(Error::invalid(format!("holder fit needs >= 100 pairs, got {}", n * (n - 1) / 2)));
    }
    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = points[i].sub(&points[j]).norm();
            if d > 0.0 {
                dmin = dmin.min(d);
                dmax = dmax.max(d);
            }
        }
    }
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 1e-13 {
        return Ok(ExponentEstimate::Exact);
    }
    let bins = 12usize;
    let log_lo = dmin.ln();
    let log_hi = dmax.ln();
    let mut max_diff = vec![0.0f64; bins];
    let mut seen = vec![false; bins];
    for i in 0..n {
        for j in i + 1..n {
            let d = points[i].sub(&points[j]).norm();
            if d <= 0.0 {
                continue;
            }
            let t = ((d.ln() - log_lo) / (log_hi - log_lo) * bins as f64).floor();
            let b = (t as usize).min(bins - 1);
            let diff = (values[i] - values[j]).abs();
            if diff > max_diff[b] {
                max_diff[b] = diff;
            }
            seen[b] = true;
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for b in 0..bins {
        if seen[b] && max_diff[b] > 0.0 {
            let mid = log_lo + (b as f64 + 0.5) / bins as f64 * (log_hi - log_lo);
            xs.push(mid);
            ys.push(max_diff[b].ln());
        }
    }
    if xs.len() < 3 {
        return Ok(ExponentEstimate::Exact);
    }
    let (slope, _, r2) = linear_regression(&xs, &ys);
    Ok(ExponentEstimate::Fitted { alpha: slope, r_squared: r2 })
}

/// Report of the L(d^s) boundary regularity check.
#[derive(Clone, Debug, Serialize)]
pub struct LdsReport {
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    pub sup_norm: f64,
    pub holder: ExponentEstimate,
}

/// The regularized distance power d^s of a domain as an integrable function.
pub struct DistPower {
    pub domain: Domain,
    pub s: f64,
}

impl Evaluable for DistPower {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn eval(&self, x: &Point) -> f64 {
        self.domain.distance(x).powf(self.s)
    }

    fn far_field(&self) -> FarFieldModel {
        match self.domain.kind {
            crate::geometry::DomainKind::HalfSpaceTruncation => FarFieldModel::PowerProfile {
                direction: if self.dim() == 1 { Point::d1(1.0) } else { Point::d2(0.0, 1.0) },
                exponent: self.s,
                coefficient: 1.0,
            },
            _ => FarFieldModel::Zero,
        }
    }

    fn far_radius(&self, x: &Point) -> f64 {
        match self.domain.kind {
            crate::geometry::DomainKind::HalfSpaceTruncation => f64::INFINITY,
            _ => x.sub(&self.domain.center).norm() + self.domain.radius + 0.1,
        }
    }

    fn breakpoints(&self, x: &Point, theta: &Point) -> Vec<f64> {
        let mut out = Vec::new();
        match self.domain.kind {
            crate::geometry::DomainKind::Ball => {
                let c = self.domain.center;
                let rel = x.sub(&c);
                let e = rel.dot(theta);
                let m = rel.dot(&rel);
                // boundary, band edge, and leveling-edge crossings
                let band = self.domain.boundary_band;
                for rho in [
                    self.domain.radius,
                    self.domain.radius - band,
                    self.domain.radius - 2.0 * band,
                ] {
                    if rho <= 0.0 {
                        continue;
                    }
                    let disc = e * e + rho * rho - m;
                    if disc >= 0.0 {
                        let sq = disc.sqrt();
                        for t in [-e + sq, -e - sq] {
                            if t.abs() > 1e-12 {
                                out.push(t.abs());
                            }
                        }
                    }
                }
                if e.abs() > 1e-12 {
                    out.push(e.abs());
                }
            }
            crate::geometry::DomainKind::HalfSpaceTruncation => {
                let a = self.dim() - 1;
                if theta.coords[a].abs() > 1e-13 {
                    out.push((x.coords[a] / theta.coords[a]).abs());
                    let band = self.domain.boundary_band;
                    out.push(((x.coords[a] - band) / theta.coords[a]).abs());
                    out.push(((x.coords[a] - 2.0 * band) / theta.coords[a]).abs());
                }
            }
            _ => {}
        }
        out
    }
}

/// Evaluates L(d^s) on an interior dyadic sample approaching the boundary
/// of a ball, reporting the sup norm and the fitted Holder exponent of the
/// sampled field. The measure must be of the smoothed (C^{1,gamma}) kind or
/// constant.
pub fn lds_regularity_check(kern: &KernelSpec, domain: &Domain, ctx: &EvalContext) -> Result<LdsReport> {
    let s = kern.order();
    match kern {
        KernelSpec::Star { mu, .. } => match mu.kind {
            crate::spectral::MeasureKind::Constant { .. }
            | crate::spectral::MeasureKind::SmoothedIndicator { .. } => {}
            _ => {
                return Err(Error::invalid(
                    "the regularity check expects a constant or smoothed (C^{1,gamma}) measure",
                ))
            }
        },
        _ => return Err(Error::invalid("the regularity check expects a star kernel")),
    }
    let dist_pow = DistPower { domain: *domain, s };
    let r = domain.radius;
    // dyadic distances 0.1, 0.05, 0.025 plus a log-spaced fill for the fit
    let mut distances = vec![0.1, 0.05, 0.025];
    for k in 0..18 {
        distances.push(0.3 * (0.22f64 / 0.3).powf(k as f64 / 17.0) * 0.9f64.powi(k));
    }
    let mut distances: Vec<f64> = distances.into_iter().filter(|&d| d < 0.8 * r).collect();
    distances.sort_by(|a, b| b.partial_cmp(a).unwrap());
    distances.dedup();
    let dir = Point::d2(1.0, 0.0);
    let mut points = Vec::new();
    let mut values = Vec::new();
    for &d in &distances {
        let x = domain.center.add_scaled(r - d, &dir);
        let v = eval_directional(kern, &dist_pow, &x, ctx)?;
        points.push(x);
        values.push(v.value);
    }
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let holder = holder_fit(&points, &values)?;
    Ok(LdsReport { distances, values, sup_norm: sup, holder })
}

/// Seeded quasi-uniform interior sample (used by experiments).
pub fn random_interior_points(domain: &Domain, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let c = domain.center;
    let r = domain.radius;
    while out.len() < count {
        let p = match domain.dim() {
            1 => Point::d1(c.coords[0] + r * (2.0 * rng.gen::<f64>() - 1.0)),
            _ => Point::d2(
                c.coords[0] + r * (2.0 * rng.gen::<f64>() - 1.0),
                c.coords[1] + r * (2.0 * rng.gen::<f64>() - 1.0),
            ),
        };
        if domain.raw_distance(&p) > 0.05 * r {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::GridFunction;
    use crate::geometry::Grid;
    use approx::assert_relative_eq;

    fn interval_quotient(f: impl Fn(f64) -> f64, h: f64) -> (QuotientField, Domain) {
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let grid = Grid::new(Point::d1(-1.0), Point::d1(1.0), h).unwrap();
        let u = GridFunction::from_fn(grid, |p| f(p.coords[0]), FarFieldModel::Zero).unwrap();
        (quotient(&u, &domain, 0.5), domain)
    }

    #[test]
    fn quotient_of_pure_distance_power_is_one() {
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let s = 0.5;
        let grid = Grid::new(Point::d1(-1.0), Point::d1(1.0), 1.0 / 64.0).unwrap();
        let u = GridFunction::from_fn(
            grid,
            |p| domain.distance(p).powf(s),
            FarFieldModel::Zero,
        )
        .unwrap();
        let q = quotient(&u, &domain, s);
        for (i, ok) in q.mask.iter().enumerate() {
            if *ok {
                assert_relative_eq!(q.values[i], 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn quotient_of_higher_power_vanishes_at_boundary() {
        let (q, domain) = interval_quotient(|x| {
            let d = (1.0 - x.abs()).max(0.0);
            d.powf(0.8)
        }, 1.0 / 64.0);
        // d^{0.8}/g(d)^{0.5} -> 0 as d -> 0 (g = d in the band)
        let near: Vec<f64> = q
            .grid
            .nodes()
            .filter(|(i, p)| q.mask[*i] && domain.distance(p) < 0.1)
            .map(|(i, _)| q.values[i].abs())
            .collect();
        let far: Vec<f64> = q
            .grid
            .nodes()
            .filter(|(i, p)| q.mask[*i] && domain.distance(p) > 0.3)
            .map(|(i, _)| q.values[i].abs())
            .collect();
        let near_max = near.iter().cloned().fold(0.0f64, f64::max);
        let far_min = far.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(near_max < far_min, "near {near_max} far {far_min}");
    }

    #[test]
    fn constant_quotient_flags_exact() {
        let (q, _) = interval_quotient(|x| (1.0 - x.abs()).max(0.0).sqrt(), 1.0 / 128.0);
        // u = d^s near the boundary: quotient == 1 in the band
        let fit = oscillation_decay(&q, &Point::d1(1.0), 3, 0).unwrap();
        match fit.alpha {
            ExponentEstimate::Exact => {}
            ExponentEstimate::Fitted { alpha, .. } => {
                assert!(alpha > 0.0, "expected exact or positive decay, got {alpha}");
            }
        }
    }

    #[test]
    fn degree_one_beats_degree_zero() {
        // quotient linear in x: degree-1 residuals vanish
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let s = 0.5;
        let grid = Grid::new(Point::d1(-1.0), Point::d1(1.0), 1.0 / 128.0).unwrap();
        let u = GridFunction::from_fn(
            grid,
            |p| domain.distance(p).powf(s) * (0.3 + 0.9 * p.coords[0]),
            FarFieldModel::Zero,
        )
        .unwrap();
        let q = quotient(&u, &domain, s);
        let z = Point::d1(1.0);
        let f0 = oscillation_decay(&q, &z, 3, 0).unwrap();
        let f1 = oscillation_decay(&q, &z, 3, 1).unwrap();
        for (a, b) in f1.residuals.iter().zip(&f0.residuals) {
            assert!(a <= b, "degree-1 residual {a} should not exceed degree-0 {b}");
        }
        // affine quotient: the degree-1 fit is exact to grid accuracy
        assert_eq!(f1.alpha, ExponentEstimate::Exact);
    }

    #[test]
    fn residual_orthogonal_to_basis() {
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let grid = Grid::new(Point::d1(-1.0), Point::d1(1.0), 1.0 / 128.0).unwrap();
        let u = GridFunction::from_fn(grid, |p| (1.4 * p.coords[0]).sin(), FarFieldModel::Zero).unwrap();
        let q = quotient(&u, &domain, 0.5);
        let z = Point::d1(1.0);
        let fit = oscillation_decay(&q, &z, 2, 1).unwrap();
        // optimality: residual integrates to ~0 against 1 and (x - z)
        let r = fit.radii[0];
        let coefs = &fit.polys[0];
        let pts: Vec<(Point, f64)> = q
            .grid
            .nodes()
            .filter(|(i, p)| q.mask[*i] && p.sub(&z).norm() < r)
            .map(|(i, p)| (p, q.values[i]))
            .collect();
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for (p, v) in &pts {
            let fitv = coefs[0] + coefs[1] * (p.coords[0] - z.coords[0]);
            m0 += v - fitv;
            m1 += (v - fitv) * (p.coords[0] - z.coords[0]);
        }
        assert!(m0.abs() / (pts.len() as f64) < 1e-10);
        assert!(m1.abs() / (pts.len() as f64) < 1e-10);
    }

    #[test]
    fn rescaling_leaves_alpha_unchanged() {
        let domain = Domain::interval(-1.0, 1.0).unwrap();
        let grid = Grid::new(Point::d1(-1.0), Point::d1(1.0), 1.0 / 128.0).unwrap();
        let mk = |scale: f64| {
            let u = GridFunction::from_fn(
                grid.clone(),
                |p| scale * (2.0 * p.coords[0]).cos(),
                FarFieldModel::Zero,
            )
            .unwrap();
            let q = quotient(&u, &domain, 0.5);
            oscillation_decay(&q, &Point::d1(1.0), 2, 0).unwrap()
        };
        let f1 = mk(1.0);
        let f2 = mk(7.5);
        for (a, b) in f1.residuals.iter().zip(&f2.residuals) {
            assert_relative_eq!(7.5 * a, *b, max_relative = 1e-12);
        }
        match (f1.alpha, f2.alpha) {
            (
                ExponentEstimate::Fitted { alpha: a1, .. },
                ExponentEstimate::Fitted { alpha: a2, .. },
            ) => assert_relative_eq!(a1, a2, epsilon = 1e-12),
            _ => panic!("expected fitted exponents"),
        }
    }

    #[test]
    fn holder_fit_recovers_sqrt() {
        let pts: Vec<Point> = (0..60).map(|i| Point::d1(i as f64 / 59.0)).collect();
        let vals: Vec<f64> = pts.iter().map(|p| p.coords[0].powf(0.5)).collect();
        match holder_fit(&pts, &vals).unwrap() {
            ExponentEstimate::Fitted { alpha, .. } => {
                assert!((alpha - 0.5).abs() < 0.05, "alpha = {alpha}");
            }
            ExponentEstimate::Exact => panic!("sqrt is not constant"),
        }
    }

    #[test]
    fn holder_fit_linear_is_one() {
        let pts: Vec<Point> = (0..60).map(|i| Point::d1(i as f64 / 59.0)).collect();
        let vals: Vec<f64> = pts.iter().map(|p| 2.0 * p.coords[0] + 0.3).collect();
        match holder_fit(&pts, &vals).unwrap() {
            ExponentEstimate::Fitted { alpha, .. } => assert!(alpha >= 0.95, "alpha = {alpha}"),
            ExponentEstimate::Exact => panic!("linear is not constant"),
        }
    }

    #[test]
    fn holder_fit_constant_is_exact() {
        let pts: Vec<Point> = (0..40).map(|i| Point::d1(i as f64 / 39.0)).collect();
        let vals = vec![1.25; 40];
        assert_eq!(holder_fit(&pts, &vals).unwrap(), ExponentEstimate::Exact);
    }

    #[test]
    fn lds_check_half_space_vanishes() {
        // flat case: L((x_n)_+^s) is identically zero
        let s = 0.5;
        let ctx = EvalContext::new(2);
        let p = crate::function::PowerProfile::new(Point::d2(0.0, 1.0), s).unwrap();
        let kern = KernelSpec::Star {
            s,
            mu: crate::spectral::SpectralMeasure::smoothed_indicator(1.2, 0.6, 0.9, 0.5, 0.3, 1.0, 2.0)
                .unwrap(),
        };
        for d in [0.1, 0.05, 0.025] {
            let v = eval_directional(&kern, &p, &Point::d2(0.3, d), &ctx).unwrap();
            assert!(v.value.abs() < 1e-6, "L(phi^s) at d={d}: {}", v.value);
        }
    }

    #[test]
    fn lds_check_ball_no_blowup() {
        let s = 0.5;
        let ctx = EvalContext::new(2);
        let kern = KernelSpec::Star {
            s,
            mu: crate::spectral::SpectralMeasure::constant(1.0, 1.0, 1.0, 2).unwrap(),
        };
        let domain = Domain::ball(Point::d2(0.0, 0.0), 1.0).unwrap();
        let rep = lds_regularity_check(&kern, &domain, &ctx).unwrap();
        assert!(rep.sup_norm.is_finite());
        // no blow-up trend along the dyadic distances 0.1, 0.05, 0.025
        let v: Vec<f64> = rep.values[..3].to_vec();
        assert!(v[2].abs() < 10.0 * v[0].abs().max(0.5), "values {v:?}");
    }
}
