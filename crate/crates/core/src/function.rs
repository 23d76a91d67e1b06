//! Functions that nonlocal operators can integrate: analytic power profiles,
//! grid functions with explicit far-field models, and smooth test bumps.

use crate::error::{Error, Result};
use crate::geometry::{Grid, Point};
use crate::quad::tails;
use serde::{Deserialize, Serialize};

/// Behavior of a function beyond its sampled box. The model must be exact
/// (to machine precision) outside the radius reported by
/// [`Evaluable::far_radius`]; tails of PV integrals are evaluated from it in
/// closed form.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FarFieldModel {
    Zero,
    BoundedConstant { value: f64 },
    PowerProfile { direction: Point, exponent: f64, coefficient: f64 },
}

impl FarFieldModel {
    /// Smallest operator order this model is integrable against; pairing
    /// with s <= this bound is rejected.
    pub fn min_order(&self) -> f64 {
        match self {
            FarFieldModel::Zero | FarFieldModel::BoundedConstant { .. } => 0.0,
            FarFieldModel::PowerProfile { exponent, .. } => exponent / 2.0,
        }
    }

    pub fn admissible_for(&self, s: f64) -> bool {
        s > self.min_order()
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            FarFieldModel::Zero => 0.0,
            FarFieldModel::BoundedConstant { value } => *value,
            FarFieldModel::PowerProfile { direction, exponent, coefficient } => {
                coefficient * x.dot(direction).max(0.0).powf(*exponent)
            }
        }
    }
}

/// The profile `phi_nu^beta(x) = coefficient * (x . nu)_+^beta`.
#[derive(Clone, Copy, Debug)]
pub struct PowerProfile {
    pub direction: Point,
    pub exponent: f64,
    pub coefficient: f64,
}

impl PowerProfile {
    pub fn new(direction: Point, exponent: f64) -> Result<Self> {
        Self::with_coefficient(direction, exponent, 1.0)
    }

    pub fn with_coefficient(direction: Point, exponent: f64, coefficient: f64) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > 1e-14 {
            return Err(Error::invalid(format!(
                "profile direction must be unit length within 1e-14, |nu| = {}",
                direction.norm()
            )));
        }
        if exponent <= 0.0 {
            return Err(Error::invalid(format!("profile exponent must be positive, got {exponent}")));
        }
        Ok(PowerProfile { direction, exponent, coefficient })
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.coefficient * x.dot(&self.direction).max(0.0).powf(self.exponent)
    }
}

/// Evaluates `phi_nu^beta` at `x`; exactly zero on `{x . nu <= 0}`.
pub fn eval_profile(p: &PowerProfile, x: &Point) -> f64 {
    p.eval(x)
}

/// A function on R^n integrable against the kernels of the lab.
///
/// `breakpoints` reports radii r > 0 at which `t -> eval(x + t theta)`
/// (either sign of t) loses smoothness; the PV integrator splits panels
/// there. `directional_tail` returns the closed-form contribution of
/// `(r > R)` to `int [ (u(x+r th)+u(x-r th))/2 - u(x) ] r^{-1-2s} dr`
/// with its error bound; the default derives it from the far-field model.
pub trait Evaluable: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &Point) -> f64;

    fn far_field(&self) -> FarFieldModel;

    /// Radius from `x` beyond which the far-field model is exact.
    fn far_radius(&self, x: &Point) -> f64;

    fn breakpoints(&self, _x: &Point, _theta: &Point) -> Vec<f64> {
        Vec::new()
    }

    fn directional_tail(&self, x: &Point, theta: &Point, s: f64, big_r: f64, u_x: f64) -> (f64, f64) {
        match self.far_field() {
            m @ (FarFieldModel::Zero | FarFieldModel::BoundedConstant { .. }) => {
                model_directional_tail(&m, x, theta, s, big_r, u_x)
            }
            _ => crate::quad::numeric_tail(
                |r| 0.5 * (self.eval(&x.add_scaled(r, theta)) + self.eval(&x.add_scaled(-r, theta))) - u_x,
                s,
                big_r,
                1e-12,
            ),
        }
    }
}

/// Tail of the symmetrized PV integrand from a far-field model.
pub fn model_directional_tail(
    model: &FarFieldModel,
    x: &Point,
    theta: &Point,
    s: f64,
    big_r: f64,
    u_x: f64,
) -> (f64, f64) {
    let sub_ux = -tails::const_tail(u_x, big_r, s);
    match model {
        FarFieldModel::Zero => (sub_ux, 0.0),
        FarFieldModel::BoundedConstant { value } => (sub_ux + tails::const_tail(*value, big_r, s), 0.0),
        FarFieldModel::PowerProfile { direction, exponent, coefficient } => {
            let c0 = x.dot(direction);
            let beta = *exponent;
            let mut value = sub_ux;
            let mut err = 0.0;
            for sign in [1.0f64, -1.0] {
                let gamma = sign * theta.dot(direction);
                if gamma.abs() < 1e-13 {
                    // constant along the ray
                    value += 0.5 * tails::const_tail(coefficient * c0.max(0.0).powf(beta), big_r, s);
                } else if gamma > 0.0 {
                    // (gamma r + c0)^beta = gamma^beta (r - d)^beta, d = -c0/gamma
                    let d = -c0 / gamma;
                    debug_assert!(big_r > 2.0 * d.abs(), "tail radius must clear the kink");
                    let (v, e) = tails::shifted_power_tail(d, beta, big_r, s);
                    value += 0.5 * coefficient * gamma.powf(beta) * v;
                    err += 0.5 * coefficient.abs() * gamma.powf(beta) * e;
                } else {
                    // gamma < 0: positive part vanishes beyond r = c0/(-gamma) <= big_r
                    debug_assert!(big_r >= c0 / (-gamma) - 1e-12);
                }
            }
            (value, err)
        }
    }
}

impl Evaluable for PowerProfile {
    fn dim(&self) -> usize {
        self.direction.dim
    }

    fn eval(&self, x: &Point) -> f64 {
        PowerProfile::eval(self, x)
    }

    fn far_field(&self) -> FarFieldModel {
        FarFieldModel::PowerProfile {
            direction: self.direction,
            exponent: self.exponent,
            coefficient: self.coefficient,
        }
    }

    fn far_radius(&self, _x: &Point) -> f64 {
        0.0 // the model is the function
    }

    fn breakpoints(&self, x: &Point, theta: &Point) -> Vec<f64> {
        let gamma = theta.dot(&self.direction);
        if gamma.abs() < 1e-13 {
            return Vec::new();
        }
        vec![(x.dot(&self.direction) / gamma).abs()]
    }

    fn directional_tail(&self, x: &Point, theta: &Point, s: f64, big_r: f64, u_x: f64) -> (f64, f64) {
        model_directional_tail(&self.far_field(), x, theta, s, big_r, u_x)
    }
}

/// Values on a uniform grid plus a far-field model.
///
/// Evaluation represents the function as `model + w`, where `w` is the
/// interpolated node residual `values - model(nodes)` inside the box and
/// zero outside. Pure model instances (profiles sampled on their own grid)
/// therefore evaluate exactly; solved fields carry the usual interpolation
/// error, which stays local to the box.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub far_field: FarFieldModel,
    residual: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, far_field: FarFieldModel) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::invalid(format!(
                "value count {} does not match grid nodes {}",
                values.len(),
                grid.node_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        let residual = grid
            .nodes()
            .map(|(i, p)| values[i] - far_field.eval(&p))
            .collect();
        Ok(GridFunction { grid, values, far_field, residual })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&Point) -> f64, far_field: FarFieldModel) -> Result<Self> {
        let values = grid.nodes().map(|(_, p)| f(&p)).collect();
        Self::new(grid, values, far_field)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        let n = grid.node_count();
        Self::new(grid, vec![c; n], FarFieldModel::BoundedConstant { value: c })
    }

    fn interp_residual_1d(&self, x: f64) -> f64 {
        // C^1 cubic Hermite on the bracketing cell with 5-point
        // fourth-order tangent estimates: O(h^4) accurate and free of
        // slope jumps at the knots (a C^0 kink at the evaluation point
        // would make PV integrals of order s > 1/2 diverge).
        let g = &self.grid;
        let n = g.n_per_axis[0];
        let t = (x - g.lo.coords[0]) / g.h;
        let i0 = (t.floor() as isize).clamp(0, n as isize - 2) as usize;
        let u = t - i0 as f64;
        let v = |j: isize| -> f64 {
            let k = (i0 as isize + j).clamp(0, n as isize - 1) as usize;
            self.residual[k]
        };
        let slope = |c: isize| -> f64 {
            // (-f_{+2} + 8 f_{+1} - 8 f_{-1} + f_{-2}) / 12 in cell units
            (-v(c + 2) + 8.0 * v(c + 1) - 8.0 * v(c - 1) + v(c - 2)) / 12.0
        };
        let (f0, f1) = (v(0), v(1));
        let (m0, m1) = (slope(0), slope(1));
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * f0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * f1
            + (u3 - u2) * m1
    }

    fn interp_residual_2d(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let (nx, ny) = (g.n_per_axis[0], g.n_per_axis[1]);
        let tx = (x - g.lo.coords[0]) / g.h;
        let ty = (y - g.lo.coords[1]) / g.h;
        let bx = (tx.floor() as isize - 1).clamp(0, nx as isize - 4) as usize;
        let by = (ty.floor() as isize - 1).clamp(0, ny as isize - 4) as usize;
        let wx = lagrange4(tx - bx as f64);
        let wy = lagrange4(ty - by as f64);
        let mut acc = 0.0;
        for (j, wyj) in wy.into_iter().enumerate() {
            let row = (by + j) * nx + bx;
            let mut line = 0.0;
            for (i, wxi) in wx.iter().enumerate() {
                line += wxi * self.residual[row + i];
            }
            acc += wyj * line;
        }
        acc
    }
}

/// Cubic Lagrange weights through 4 consecutive nodes at local coordinate u
/// measured from the first node (interpolation point normally in [1, 2]).
fn lagrange4(u: f64) -> [f64; 4] {
    let (u0, u1, u2, u3) = (u, u - 1.0, u - 2.0, u - 3.0);
    [
        -u1 * u2 * u3 / 6.0,
        u0 * u2 * u3 / 2.0,
        -u0 * u1 * u3 / 2.0,
        u0 * u1 * u2 / 6.0,
    ]
}

impl Evaluable for GridFunction {
    fn dim(&self) -> usize {
        self.grid.dim
    }

    fn eval(&self, x: &Point) -> f64 {
        let model = self.far_field.eval(x);
        if !self.grid.contains(x) {
            return model;
        }
        let w = match self.grid.dim {
            1 => self.interp_residual_1d(x.coords[0]),
            _ => self.interp_residual_2d(x.coords[0], x.coords[1]),
        };
        model + w
    }

    fn far_field(&self) -> FarFieldModel {
        self.far_field
    }

    fn far_radius(&self, x: &Point) -> f64 {
        self.grid.circumradius_from(x)
    }

    fn breakpoints(&self, x: &Point, theta: &Point) -> Vec<f64> {
        let mut out = Vec::new();
        // box-exit radii along +-theta
        for sign in [1.0, -1.0] {
            let mut t_exit = f64::INFINITY;
            for a in 0..self.grid.dim {
                let d = sign * theta.coords[a];
                if d.abs() > 1e-14 {
                    let t1 = (self.grid.hi.coords[a] - x.coords[a]) / d;
                    let t2 = (self.grid.lo.coords[a] - x.coords[a]) / d;
                    let t_pos = t1.max(t2);
                    if t_pos > 0.0 {
                        t_exit = t_exit.min(t_pos);
                    }
                }
            }
            if t_exit.is_finite() {
                out.push(t_exit);
            }
        }
        // far-field kink (power-profile models keep a kink inside the box)
        if let FarFieldModel::PowerProfile { direction, .. } = &self.far_field {
            let gamma = theta.dot(direction);
            if gamma.abs() > 1e-13 {
                out.push((x.dot(direction) / gamma).abs());
            }
        }
        out
    }
}

/// Smooth Gaussian bump, used as the generic smooth test function.
#[derive(Clone, Copy, Debug)]
pub struct GaussianBump {
    pub center: Point,
    pub width: f64,
    pub amplitude: f64,
}

impl GaussianBump {
    pub fn new(center: Point, width: f64, amplitude: f64) -> Self {
        GaussianBump { center, width, amplitude }
    }
}

impl Evaluable for GaussianBump {
    fn dim(&self) -> usize {
        self.center.dim
    }

    fn eval(&self, x: &Point) -> f64 {
        let d = x.sub(&self.center);
        self.amplitude * (-d.dot(&d) / (2.0 * self.width * self.width)).exp()
    }

    fn far_field(&self) -> FarFieldModel {
        FarFieldModel::Zero
    }

    fn far_radius(&self, x: &Point) -> f64 {
        // below 2^-53 * amplitude beyond ~8.6 sigma
        x.sub(&self.center).norm() + 9.0 * self.width
    }
}

/// Weighted L^1 norm against `omega_s(x) = (1-s)(1+|x|)^{-n-2s}`: grid
/// trapezoid sum plus the far-field tail over the box complement.
pub fn weighted_l1_norm(u: &GridFunction, s: f64) -> Result<f64> {
    if !u.far_field.admissible_for(s) {
        return Err(Error::InadmissibleFarField(format!(
            "far-field model requires s > {}, got {s}",
            u.far_field.min_order()
        )));
    }
    let g = &u.grid;
    let n = g.dim;
    let omega = |x: &Point| (1.0 - s) * (1.0 + x.norm()).powf(-(n as f64) - 2.0 * s);
    let mut acc = 0.0;
    for (i, p) in g.nodes() {
        let mut w = g.h.powi(n as i32);
        for a in 0..n {
            let m = match a {
                0 => i % g.n_per_axis[0],
                _ => i / g.n_per_axis[0],
            };
            if m == 0 || m == g.n_per_axis[a] - 1 {
                w *= 0.5;
            }
        }
        acc += w * u.values[i].abs() * omega(&p);
    }
    acc += tail_against_weight(&u.far_field, g, s)?;
    Ok(acc)
}

/// Integral of |far model| * omega_s over the complement of the grid box.
fn tail_against_weight(model: &FarFieldModel, g: &Grid, s: f64) -> Result<f64> {
    let n = g.dim;
    let one_minus_s = 1.0 - s;
    match n {
        1 => {
            let (lo, hi) = (g.lo.coords[0], g.hi.coords[0]);
            let piece = |from: f64, sign: f64| -> f64 {
                // int over the half line starting at `from` going to sign*inf
                match model {
                    FarFieldModel::Zero => 0.0,
                    FarFieldModel::BoundedConstant { value } => {
                        value.abs() * one_minus_s * (1.0 + from.abs()).powf(-2.0 * s) / (2.0 * s)
                    }
                    FarFieldModel::PowerProfile { direction, exponent, coefficient } => {
                        // numeric on the transformed variable t = 1/(x - from + 1)
                        let f = |t: f64| {
                            if t <= 0.0 {
                                return 0.0;
                            }
                            let x = from + sign * (1.0 / t - 1.0);
                            let p = Point::d1(x);
                            let v = coefficient.abs()
                                * p.dot(direction).max(0.0).powf(*exponent);
                            v * one_minus_s * (1.0 + x.abs()).powf(-1.0 - 2.0 * s) / (t * t)
                        };
                        crate::quad::adaptive(&f, 1e-9, 1.0, 1e-11, 40).value
                    }
                }
            };
            Ok(piece(hi, 1.0) + piece(lo, -1.0))
        }
        _ => {
            // polar integral over the box complement, per-angle radial pieces
            let n_ang = 512;
            let mut acc = 0.0;
            for k in 0..n_ang {
                let phi = (k as f64 + 0.5) * 2.0 * std::f64::consts::PI / n_ang as f64;
                let th = Point::on_circle(phi);
                // exit radius of the box along th from the box center
                let c = Point::d2(
                    0.5 * (g.lo.coords[0] + g.hi.coords[0]),
                    0.5 * (g.lo.coords[1] + g.hi.coords[1]),
                );
                let mut rho = f64::INFINITY;
                for a in 0..2 {
                    if th.coords[a].abs() > 1e-14 {
                        let half = 0.5 * (g.hi.coords[a] - g.lo.coords[a]);
                        rho = rho.min(half / th.coords[a].abs());
                    }
                }
                let f = |t: f64| {
                    if t <= 0.0 {
                        return 0.0;
                    }
                    let r = rho + 1.0 / t - 1.0;
                    let x = c.add_scaled(r, &th);
                    let v = model.eval(&x).abs();
                    v * one_minus_s * (1.0 + x.norm()).powf(-2.0 - 2.0 * s) * r / (t * t)
                };
                acc += crate::quad::adaptive(&f, 1e-9, 1.0, 1e-11, 40).value
                    * (2.0 * std::f64::consts::PI / n_ang as f64);
            }
            Ok(acc)
        }
    }
}
