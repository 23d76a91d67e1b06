//! Spectral measures on the unit sphere and direction quadrature.
//!
//! Evenness mu(theta) = mu(-theta) is enforced structurally: evaluation
//! first maps theta to a canonical representative of the antipodal pair, so
//! mu at theta and -theta is the same floating-point computation bit for
//! bit. Measures live on S^0 = {+1,-1} (dimension 1) or S^1 (dimension 2).

use crate::error::{Error, Result};
use crate::geometry::Point;
use serde::{Deserialize, Serialize};

/// Density kinds. All are even by construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MeasureKind {
    Constant { value: f64 },
    /// mean + sum of a_k cos(2 k t) + b_k sin(2 k t); even harmonics only,
    /// which is exactly antipodal evenness on S^1.
    TrigPolynomial { mean: f64, cos_coefs: Vec<f64>, sin_coefs: Vec<f64> },
    /// base + amplitude * quintic cap bump of half-width `width` centered at
    /// angle `center` (and its antipode). C^2 on the circle, hence C^{1,gamma}.
    SmoothedIndicator { base: f64, amplitude: f64, center: f64, width: f64, gamma: f64 },
    /// Linear periodic interpolation of a symmetrized angle table on [0, pi).
    Tabulated { angles: Vec<f64>, values: Vec<f64> },
}

/// An even density on the sphere with ellipticity bounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub kind: MeasureKind,
    pub lambda: f64,
    pub big_lambda: f64,
    pub dim: usize,
}

/// Canonical representative of the antipodal pair in angle form: t mod pi,
/// computed from coordinates made sign-canonical first.
fn canonical_angle(theta: &Point) -> f64 {
    let (mut x, mut y) = (theta.coords[0], theta.coords[1]);
    if y < 0.0 || (y == 0.0 && x < 0.0) {
        x = -x;
        y = -y;
    }
    y.atan2(x) // in [0, pi]
}

impl SpectralMeasure {
    pub fn constant(value: f64, lambda: f64, big_lambda: f64, dim: usize) -> Result<Self> {
        SpectralMeasure { kind: MeasureKind::Constant { value }, lambda, big_lambda, dim }.validated()
    }

    pub fn trig(mean: f64, cos_coefs: Vec<f64>, sin_coefs: Vec<f64>, lambda: f64, big_lambda: f64) -> Result<Self> {
        SpectralMeasure { kind: MeasureKind::TrigPolynomial { mean, cos_coefs, sin_coefs }, lambda, big_lambda, dim: 2 }
            .validated()
    }

    pub fn smoothed_indicator(base: f64, amplitude: f64, center: f64, width: f64, gamma: f64, lambda: f64, big_lambda: f64) -> Result<Self> {
        SpectralMeasure {
            kind: MeasureKind::SmoothedIndicator { base, amplitude, center, width, gamma },
            lambda,
            big_lambda,
            dim: 2,
        }
        .validated()
    }

    /// Builds the tabulated kind from raw (angle, value) pairs covering any
    /// angles; the table is folded onto [0, pi) by antipodal averaging.
    pub fn tabulated(pairs: &[(f64, f64)], lambda: f64, big_lambda: f64) -> Result<Self> {
        if pairs.len() < 4 {
            return Err(Error::invalid("tabulated measure needs at least 4 samples"));
        }
        let pi = std::f64::consts::PI;
        let m = 2 * pairs.len();
        let mut angles = Vec::with_capacity(m);
        let mut values = Vec::with_capacity(m);
        for i in 0..m {
            angles.push(pi * i as f64 / m as f64);
        }
        // fold: average the two nearest raw samples of each antipodal copy
        let interp_raw = |t: f64| -> f64 {
            let tau = t.rem_euclid(2.0 * pi);
            let mut best = (f64::INFINITY, 0.0);
            let mut second = (f64::INFINITY, 0.0);
            for &(a, v) in pairs {
                let d = (a.rem_euclid(2.0 * pi) - tau).abs();
                let d = d.min(2.0 * pi - d);
                if d < best.0 {
                    second = best;
                    best = (d, v);
                } else if d < second.0 {
                    second = (d, v);
                }
            }
            let denom = best.0 + second.0;
            if denom < 1e-15 {
                best.1
            } else {
                (best.1 * second.0 + second.1 * best.0) / denom
            }
        };
        for &t in &angles {
            values.push(0.5 * (interp_raw(t) + interp_raw(t + pi)));
        }
        SpectralMeasure { kind: MeasureKind::Tabulated { angles, values }, lambda, big_lambda, dim: 2 }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.lambda > 0.0 && self.lambda <= self.big_lambda) {
            return Err(Error::invalid(format!(
                "ellipticity bounds need 0 < lambda <= Lambda, got ({}, {})",
                self.lambda, self.big_lambda
            )));
        }
        if self.dim == 1 {
            let v = self.eval(&Point::d1(1.0));
            if v < self.lambda - 1e-12 || v > self.big_lambda + 1e-12 {
                return Err(Error::invalid(format!("measure value {v} violates [lambda, Lambda]")));
            }
            return Ok(self);
        }
        for k in 0..1024 {
            let t = std::f64::consts::PI * k as f64 / 1024.0;
            let v = self.eval(&Point::on_circle(t));
            if !(v >= self.lambda - 1e-12 && v <= self.big_lambda + 1e-12) {
                return Err(Error::invalid(format!(
                    "measure value {v} at angle {t} violates [{}, {}]",
                    self.lambda, self.big_lambda
                )));
            }
        }
        Ok(self)
    }

    /// Density at a unit direction.
    pub fn eval(&self, theta: &Point) -> f64 {
        if self.dim == 1 {
            return match &self.kind {
                MeasureKind::Constant { value } => *value,
                _ => unreachable!("dimension 1 supports the constant kind only"),
            };
        }
        let t = canonical_angle(theta);
        self.eval_angle(t)
    }

    /// Density at canonical angle t in [0, pi].
    pub fn eval_angle(&self, t: f64) -> f64 {
        match &self.kind {
            MeasureKind::Constant { value } => *value,
            MeasureKind::TrigPolynomial { mean, cos_coefs, sin_coefs } => {
                let mut v = *mean;
                for (k, c) in cos_coefs.iter().enumerate() {
                    v += c * ((2 * (k + 1)) as f64 * t).cos();
                }
                for (k, c) in sin_coefs.iter().enumerate() {
                    v += c * ((2 * (k + 1)) as f64 * t).sin();
                }
                v
            }
            MeasureKind::SmoothedIndicator { base, amplitude, center, width, .. } => {
                let pi = std::f64::consts::PI;
                // distance on the projective circle
                let e = (t - center).rem_euclid(pi);
                let d = e.min(pi - e);
                base + amplitude * cap_bump(d / width)
            }
            MeasureKind::Tabulated { angles, values } => {
                let pi = std::f64::consts::PI;
                let tau = t.rem_euclid(pi);
                let m = angles.len();
                let step = pi / m as f64;
                let i = ((tau / step).floor() as usize).min(m - 1);
                let j = (i + 1) % m;
                let t0 = angles[i];
                let frac = ((tau - t0) / step).clamp(0.0, 1.0);
                values[i] * (1.0 - frac) + values[j] * frac
            }
        }
    }
}

/// C^2 bump: 1 at u = 0, 0 for |u| >= 1, quintic blend between.
fn cap_bump(u: f64) -> f64 {
    let a = u.abs();
    if a >= 1.0 {
        return 0.0;
    }
    let v = a * a * a * (6.0 * a * a - 15.0 * a + 10.0);
    1.0 - v
}

/// Quadrature rule over the unit sphere (S^0 or S^1); node set exactly
/// symmetric under the antipodal map.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub dim: usize,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

/// Builds the rule: the exact two-point rule in dimension 1, the
/// equiangular trapezoid rule with `order` nodes in dimension 2.
pub fn sphere_rule(dim: usize, order: usize) -> Result<SphereRule> {
    match dim {
        1 => Ok(SphereRule {
            dim,
            nodes: vec![Point::d1(1.0), Point::d1(-1.0)],
            weights: vec![1.0, 1.0],
        }),
        2 => {
            if order < 8 || order % 2 != 0 {
                return Err(Error::invalid(format!(
                    "sphere rule order must be even and >= 8, got {order}"
                )));
            }
            let mut nodes = Vec::with_capacity(order);
            let mut weights = vec![2.0 * std::f64::consts::PI / order as f64; order];
            for i in 0..order / 2 {
                let t = 2.0 * std::f64::consts::PI * i as f64 / order as f64;
                nodes.push(Point::on_circle(t));
            }
            for i in 0..order / 2 {
                let p = nodes[i];
                nodes.push(Point::d2(-p.coords[0], -p.coords[1]));
            }
            weights.truncate(order);
            Ok(SphereRule { dim: 2, nodes, weights })
        }
        d => Err(Error::invalid(format!("sphere rules exist for dimensions 1 and 2, got {d}"))),
    }
}

impl SphereRule {
    /// Default rule used by operator evaluations: 128 directions in 2D.
    pub fn default_for(dim: usize) -> SphereRule {
        sphere_rule(dim, 128).expect("default rule parameters are valid")
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(n, w)| w * f(n)).sum()
    }

    /// A coarser companion rule (half the nodes) for error estimation.
    pub fn coarser(&self) -> Option<SphereRule> {
        if self.dim != 2 || self.nodes.len() < 16 {
            return None;
        }
        sphere_rule(2, self.nodes.len() / 2).ok()
    }
}

/// Quadrature value of `int_{S^{n-1}} |theta_n|^{2s} mu(theta) dtheta`.
pub fn directional_weight(mu: &SpectralMeasure, s: f64) -> f64 {
    directional_weight_with(mu, s, &SphereRule::default_for(mu.dim))
}

pub fn directional_weight_with(mu: &SpectralMeasure, s: f64, rule: &SphereRule) -> f64 {
    assert!(s > 0.0 && s < 1.0);
    let n_axis = mu.dim - 1;
    rule.integrate(|th| th.coords[n_axis].abs().powf(2.0 * s) * mu.eval(th))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_rule_weight() {
        let mu = SpectralMeasure::constant(1.0, 1.0, 1.0, 1).unwrap();
        assert_relative_eq!(directional_weight(&mu, 0.37), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn circle_weight_closed_form_half() {
        // int_0^{2pi} |sin t| dt = 4 at s = 1/2
        let mu = SpectralMeasure::constant(1.0, 1.0, 1.0, 2).unwrap();
        let v = directional_weight(&mu, 0.5);
        // the default 128-node rule meets the |sin|^{2s} kink at O(N^-2)
        assert_relative_eq!(v, 4.0, max_relative = 1e-3);
        // general closed form 2 sqrt(pi) Gamma(s+1/2) / Gamma(s+1)
        for s in [0.3, 0.6, 0.85] {
            let exact = 2.0 * crate::special::slab_mass_2d(s);
            let v = directional_weight_with(&mu, s, &sphere_rule(2, 4096).unwrap());
            // the |theta_n|^{2s} kink limits the trapezoid to O(N^{-1-2s})
            assert_relative_eq!(v, exact, max_relative = 1e-4);
        }
    }

    #[test]
    fn weight_linear_in_constant() {
        let mu1 = SpectralMeasure::constant(1.0, 0.5, 3.0, 2).unwrap();
        let muc = SpectralMeasure::constant(2.5, 0.5, 3.0, 2).unwrap();
        assert_relative_eq!(
            directional_weight(&muc, 0.7),
            2.5 * directional_weight(&mu1, 0.7),
            max_relative = 1e-14
        );
    }

    #[test]
    fn trapezoid_rule_cos_squared() {
        let rule = sphere_rule(2, 64).unwrap();
        let v = rule.integrate(|th| th.coords[0] * th.coords[0]);
        assert_relative_eq!(v, std::f64::consts::PI, epsilon = 1e-13);
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn odd_order_rejected() {
        assert!(sphere_rule(2, 63).is_err());
        assert!(sphere_rule(2, 6).is_err());
    }

    #[test]
    fn rule_is_antipodally_symmetric() {
        let rule = sphere_rule(2, 32).unwrap();
        let n = rule.nodes.len();
        for i in 0..n / 2 {
            let a = rule.nodes[i];
            let b = rule.nodes[i + n / 2];
            assert_eq!(a.coords[0], -b.coords[0]);
            assert_eq!(a.coords[1], -b.coords[1]);
        }
    }

    #[test]
    fn evenness_bit_for_bit() {
        let mus = vec![
            SpectralMeasure::trig(1.5, vec![0.3], vec![0.1], 1.0, 2.0).unwrap(),
            SpectralMeasure::smoothed_indicator(1.0, 0.8, 0.6, 0.4, 0.3, 1.0, 2.0).unwrap(),
            SpectralMeasure::tabulated(
                &[(0.0, 1.2), (1.0, 1.7), (2.0, 1.4), (3.0, 1.1), (4.0, 1.9), (5.0, 1.3)],
                1.0,
                2.0,
            )
            .unwrap(),
        ];
        for mu in &mus {
            for k in 0..57 {
                let t = 0.11 * k as f64;
                let th = Point::on_circle(t);
                let neg = Point::d2(-th.coords[0], -th.coords[1]);
                assert_eq!(mu.eval(&th).to_bits(), mu.eval(&neg).to_bits());
            }
        }
    }

    #[test]
    fn bounds_violation_rejected() {
        assert!(SpectralMeasure::trig(1.0, vec![1.5], vec![], 1.0, 2.0).is_err());
        assert!(SpectralMeasure::constant(0.5, 1.0, 2.0, 2).is_err());
    }

    #[test]
    fn monotone_bracketing() {
        let mu = SpectralMeasure::trig(1.5, vec![0.4], vec![0.2], 1.0, 2.0).unwrap();
        let lo = SpectralMeasure::constant(1.0, 1.0, 2.0, 2).unwrap();
        let hi = SpectralMeasure::constant(2.0, 1.0, 2.0, 2).unwrap();
        for s in [0.3, 0.5, 0.8] {
            let w = directional_weight(&mu, s);
            assert!(directional_weight(&lo, s) <= w + 1e-12);
            assert!(w <= directional_weight(&hi, s) + 1e-12);
        }
    }
}
