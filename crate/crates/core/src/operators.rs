//! Linear operators of the stable (`star`) and rough classes, their Pucci
//! extremal operators, profile constants, and finite inf-sup operators.
//!
//! Conventions. A star kernel with spectral measure mu acts by
//!
//! ```text
//! L u(x) = (1-s) int_{R^n} [ (u(x+y)+u(x-y))/2 - u(x) ] mu(y/|y|) |y|^{-n-2s} dy
//!        = (1-s) int_{S^{n-1}} mu(th) [ int_0^inf g_th(r) r^{-1-2s} dr ] dth,
//! ```
//!
//! with `g_th` the symmetrized difference along `th`. The extremal (Pucci)
//! operators over the star class follow from the direction-wise closed
//! formula: with `rad(th) = int_0^inf g_th r^{-1-2s} dr`,
//!
//! ```text
//! M+ u = (1-s) int { Lam rad(th)^+ - lam rad(th)^- } dth,
//! M- u = (1-s) int { lam rad(th)^+ - Lam rad(th)^- } dth.
//! ```
//!
//! The rough class replaces the directional density by any even b(y) in
//! [lam, Lam]; its extremum is the pointwise sign split of the symmetrized
//! integrand.

use crate::error::{Error, Result};
use crate::frac1d::{directional_pv, Frac1dConfig};
use crate::function::Evaluable;
use crate::geometry::Point;
use crate::quad::{numeric_tail, radial_pv, QuadResult};
use crate::spectral::{SphereRule, SpectralMeasure};
use rayon::prelude::*;
use std::sync::Arc;

/// Ellipticity data of a kernel class.
#[derive(Clone, Copy, Debug)]
pub struct EllipticityBounds {
    pub lambda: f64,
    pub big_lambda: f64,
    pub s: f64,
}

impl EllipticityBounds {
    pub fn new(lambda: f64, big_lambda: f64, s: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= big_lambda) {
            return Err(Error::invalid(format!(
                "need 0 < lambda <= Lambda, got ({lambda}, {big_lambda})"
            )));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid(format!("order s must lie in (0,1), got {s}")));
        }
        Ok(EllipticityBounds { lambda, big_lambda, s })
    }
}

/// Even bounded density of a rough kernel. Evenness is structural: radial
/// profiles are even automatically and custom densities are evaluated at a
/// sign-canonical representative.
#[derive(Clone)]
pub enum RoughDensity {
    Constant(f64),
    /// `outside + (inside - outside) chi_{|y| < radius}`.
    BallIndicator { radius: f64, inside: f64, outside: f64 },
    Custom {
        f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
        /// radii where the density jumps (quadrature split hints)
        radial_breaks: Vec<f64>,
        outer_value: f64,
    },
}

impl std::fmt::Debug for RoughDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RoughDensity::Constant(c) => write!(f, "Constant({c})"),
            RoughDensity::BallIndicator { radius, inside, outside } => {
                write!(f, "BallIndicator(r={radius}, in={inside}, out={outside})")
            }
            RoughDensity::Custom { radial_breaks, outer_value, .. } => {
                write!(f, "Custom(breaks={radial_breaks:?}, outer={outer_value})")
            }
        }
    }
}

impl RoughDensity {
    pub fn eval(&self, y: &Point) -> f64 {
        match self {
            RoughDensity::Constant(c) => *c,
            RoughDensity::BallIndicator { radius, inside, outside } => {
                if y.norm() < *radius {
                    *inside
                } else {
                    *outside
                }
            }
            RoughDensity::Custom { f, .. } => {
                // canonical representative of {y, -y}
                let (a, b) = (y.coords[0], y.coords[1]);
                let flip = b < 0.0 || (b == 0.0 && a < 0.0);
                let p = if flip { Point { coords: [-a, -b], dim: y.dim } } else { *y };
                f(&p)
            }
        }
    }

    pub fn radial_breaks(&self) -> Vec<f64> {
        match self {
            RoughDensity::Constant(_) => Vec::new(),
            RoughDensity::BallIndicator { radius, .. } => vec![*radius],
            RoughDensity::Custom { radial_breaks, .. } => radial_breaks.clone(),
        }
    }

    pub fn outer_value(&self) -> f64 {
        match self {
            RoughDensity::Constant(c) => *c,
            RoughDensity::BallIndicator { outside, .. } => *outside,
            RoughDensity::Custom { outer_value, .. } => *outer_value,
        }
    }
}

/// A member of the star class (order s, spectral measure) or of the rough
/// class (order s, even bounded density).
#[derive(Clone, Debug)]
pub enum KernelSpec {
    Star { s: f64, mu: SpectralMeasure },
    Rough { s: f64, b: RoughDensity, dim: usize },
}

impl KernelSpec {
    pub fn order(&self) -> f64 {
        match self {
            KernelSpec::Star { s, .. } | KernelSpec::Rough { s, .. } => *s,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Star { mu, .. } => mu.dim,
            KernelSpec::Rough { dim, .. } => *dim,
        }
    }

    pub fn frac_laplacian(s: f64, dim: usize) -> Result<Self> {
        Ok(KernelSpec::Star { s, mu: SpectralMeasure::constant(1.0, 1.0, 1.0, dim)? })
    }
}

/// Evaluation context: angular rule, radial quadrature parameters.
#[derive(Clone, Debug)]
pub struct EvalContext {
    pub rule: SphereRule,
    pub cfg: Frac1dConfig,
    /// Angular panels per quadrant for the direct volumetric route.
    pub angular_panels: usize,
}

impl EvalContext {
    pub fn new(dim: usize) -> Self {
        EvalContext { rule: SphereRule::default_for(dim), cfg: Frac1dConfig::default(), angular_panels: 16 }
    }

    pub fn with_rule_order(dim: usize, order: usize) -> Result<Self> {
        Ok(EvalContext {
            rule: crate::spectral::sphere_rule(dim, order)?,
            cfg: Frac1dConfig::default(),
            angular_panels: 16,
        })
    }

    /// Cheaper settings for sampled inequality verification (gates at
    /// 1e-6): 64 directions, radial tolerance 3e-9, tail handoff at 1e3.
    pub fn verification(dim: usize) -> Self {
        EvalContext {
            rule: crate::spectral::sphere_rule(dim, 64).expect("valid order"),
            cfg: Frac1dConfig { delta: 1e-3, rmax: 1e3, tol: 3e-9 },
            angular_panels: 8,
        }
    }
}

/// Both extremal operators from one set of directional radial integrals.
pub fn pucci_star_both(
    u: &dyn Evaluable,
    x: &Point,
    bounds: &EllipticityBounds,
    ctx: &EvalContext,
) -> Result<(QuadResult, QuadResult)> {
    let s = bounds.s;
    admissible(u, s)?;
    let rads = directional_radials(u, x, s, ctx);
    let mut plus = Vec::with_capacity(rads.len());
    let mut minus = Vec::with_capacity(rads.len());
    for r in &rads {
        plus.push(QuadResult::new(
            bounds.big_lambda * r.value.max(0.0) + bounds.lambda * r.value.min(0.0),
            bounds.big_lambda * r.err,
        ));
        minus.push(QuadResult::new(
            bounds.lambda * r.value.max(0.0) + bounds.big_lambda * r.value.min(0.0),
            bounds.big_lambda * r.err,
        ));
    }
    let p = angular_combine(&ctx.rule, &plus, |v| v) * (1.0 - s);
    let m = angular_combine(&ctx.rule, &minus, |v| v) * (1.0 - s);
    Ok((p, m))
}

fn admissible(u: &dyn Evaluable, s: f64) -> Result<()> {
    if !u.far_field().admissible_for(s) {
        return Err(Error::InadmissibleFarField(format!(
            "far field requires s > {}, operator has s = {s}",
            u.far_field().min_order()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Linear evaluation: direct volumetric route
// ---------------------------------------------------------------------------

/// PV value of `L u (x)` by direct quadrature of the volume integral:
/// composite Gauss-Legendre panels in angle (split at far-field kink
/// angles) times the adaptive radial PV rule. Independent discretization
/// family from [`eval_directional`], which uses the equiangular sphere rule.
pub fn eval_linear(kern: &KernelSpec, u: &dyn Evaluable, x: &Point, ctx: &EvalContext) -> Result<QuadResult> {
    let s = kern.order();
    admissible(u, s)?;
    match kern {
        KernelSpec::Star { mu, .. } => match mu.dim {
            1 => {
                let th = Point::d1(1.0);
                let rad = directional_pv(u, x, &th, s, &ctx.cfg);
                Ok(rad * (2.0 * (1.0 - s) * mu.eval(&th)))
            }
            _ => Ok(volumetric_2d(u, x, s, &ctx.cfg, ctx.angular_panels, &|th, _r| mu.eval(th), &[])),
        },
        KernelSpec::Rough { b, dim, .. } => match dim {
            1 => {
                let th = Point::d1(1.0);
                let breaks = b.radial_breaks();
                let rad = rough_radial(u, x, &th, s, &ctx.cfg, b, &breaks);
                Ok(rad * (2.0 * (1.0 - s)))
            }
            _ => Ok(volumetric_2d(
                u,
                x,
                s,
                &ctx.cfg,
                ctx.angular_panels,
                &|th, r| b.eval(&Point::zero(2).add_scaled(r, th)),
                &b.radial_breaks(),
            )),
        },
    }
}

/// Direct 2D volumetric quadrature: angle panels (GL-8 with an embedded
/// GL-4 error estimate) x radial PV per angle, density(theta, r) inside.
fn volumetric_2d(
    u: &dyn Evaluable,
    x: &Point,
    s: f64,
    cfg: &Frac1dConfig,
    panels_per_quadrant: usize,
    density: &(dyn Fn(&Point, f64) -> f64 + Sync),
    radial_breaks: &[f64],
) -> QuadResult {
    // panel edges over [0, pi): half circle suffices by evenness of the
    // symmetrized integrand times an even density; factor 2 at the end ...
    // but densities are even too, so integrate [0, pi) and double.
    let pi = std::f64::consts::PI;
    let mut edges: Vec<f64> = (0..=2 * panels_per_quadrant)
        .map(|i| pi * i as f64 / (2 * panels_per_quadrant) as f64)
        .collect();
    // split at far-field kink angles (profile models): theta . nu = 0
    if let crate::function::FarFieldModel::PowerProfile { direction, .. } = u.far_field() {
        let phi = direction.coords[1].atan2(direction.coords[0]);
        for kink in [phi + 0.5 * pi, phi - 0.5 * pi, phi, phi + pi] {
            let k = kink.rem_euclid(pi);
            if k > 1e-12 && k < pi - 1e-12 {
                edges.push(k);
            }
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    }

    let u_x = u.eval(x);
    let radial_at = |t: f64| -> QuadResult {
        let th = Point::on_circle(t);
        let g = |r: f64| {
            let d = 0.5 * (u.eval(&x.add_scaled(r, &th)) + u.eval(&x.add_scaled(-r, &th))) - u_x;
            d * density(&th, r)
        };
        let mut breaks = u.breakpoints(x, &th);
        breaks.extend_from_slice(radial_breaks);
        let far = u.far_radius(x);
        if far > 0.0 && far.is_finite() {
            breaks.push(far);
        }
        let outer = density(&th, f64::MAX);
        radial_pv(g, s, &cfg.pv(), &breaks, |big_r| {
            let (v, e) = u.directional_tail(x, &th, s, big_r, u_x);
            (v * outer, e * outer.abs())
        })
    };

    // angular points: fine GL-8 plus embedded coarse GL-4 per panel
    let rule8 = crate::quad::gl_rule(8);
    let rule4 = crate::quad::gl_rule(4);
    let mut pts: Vec<(f64, f64, bool)> = Vec::new(); // (angle, weight, is_fine)
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (&t, &wt) in rule8.0.iter().zip(rule8.1.iter()) {
            pts.push((c + h * t, wt * h, true));
        }
        for (&t, &wt) in rule4.0.iter().zip(rule4.1.iter()) {
            pts.push((c + h * t, wt * h, false));
        }
    }
    let evals: Vec<(f64, bool, QuadResult)> =
        pts.into_par_iter().map(|(t, w, fine)| (w, fine, radial_at(t))).collect();
    let mut value = 0.0;
    let mut err_radial = 0.0;
    let mut coarse = 0.0;
    for (w, fine, r) in &evals {
        if *fine {
            value += w * r.value;
            err_radial += w * r.err;
        } else {
            coarse += w * r.value;
        }
    }
    let err_angular = (value - coarse).abs();
    QuadResult::new(2.0 * (1.0 - s) * value, 2.0 * (1.0 - s) * (err_radial + err_angular))
}

/// Radial PV integral with a rough density riding along.
fn rough_radial(
    u: &dyn Evaluable,
    x: &Point,
    th: &Point,
    s: f64,
    cfg: &Frac1dConfig,
    b: &RoughDensity,
    b_breaks: &[f64],
) -> QuadResult {
    let u_x = u.eval(x);
    let g = |r: f64| {
        let d = 0.5 * (u.eval(&x.add_scaled(r, th)) + u.eval(&x.add_scaled(-r, th))) - u_x;
        d * b.eval(&Point::zero(x.dim).add_scaled(r, th))
    };
    let mut breaks = u.breakpoints(x, th);
    breaks.extend_from_slice(b_breaks);
    let far = u.far_radius(x);
    if far > 0.0 && far.is_finite() {
        breaks.push(far);
    }
    let outer = b.outer_value();
    radial_pv(g, s, &cfg.pv(), &breaks, |big_r| {
        let (v, e) = u.directional_tail(x, th, s, big_r, u_x);
        (v * outer, e * outer)
    })
}

// ---------------------------------------------------------------------------
// Directional route and Pucci extremal operators
// ---------------------------------------------------------------------------

/// Per-direction radial PV values over the sphere rule, with an angular
/// error estimate from the half-order subset of the equiangular rule.
fn directional_radials(
    u: &dyn Evaluable,
    x: &Point,
    s: f64,
    ctx: &EvalContext,
) -> Vec<QuadResult> {
    ctx.rule
        .nodes
        .par_iter()
        .map(|th| directional_pv(u, x, th, s, &ctx.cfg))
        .collect()
}

/// Combines per-direction values f(rad_i) with the rule weights and
/// estimates the angular error by comparing with the even-index half rule.
fn angular_combine(rule: &SphereRule, rads: &[QuadResult], f: impl Fn(f64) -> f64) -> QuadResult {
    let mut full = 0.0;
    let mut err = 0.0;
    let mut half = 0.0;
    for (i, (r, w)) in rads.iter().zip(&rule.weights).enumerate() {
        let v = f(r.value);
        full += w * v;
        // |f| is 1-Lipschitz in all uses here (positive/negative parts and
        // linear weights bounded by the measure bounds handled by caller)
        err += w * r.err;
        if rule.dim == 2 && i % 2 == 0 {
            half += 2.0 * w * v;
        }
    }
    let ang_err = if rule.dim == 2 { (full - half).abs() } else { 0.0 };
    QuadResult::new(full, err + ang_err)
}

/// Directional (sphere rule x 1D PV) evaluation of a star-class operator:
///
/// ```text
/// L u(x) = -(1-s)/(2 c_{1,s}) sum_i w_i mu(th_i) (-d_thth)^s u(x),
/// ```
///
/// realized as `(1-s) sum_i w_i mu(th_i) rad_i`.
pub fn eval_directional(kern: &KernelSpec, u: &dyn Evaluable, x: &Point, ctx: &EvalContext) -> Result<QuadResult> {
    let (s, mu) = match kern {
        KernelSpec::Star { s, mu } => (*s, mu),
        KernelSpec::Rough { .. } => {
            return Err(Error::invalid("the directional route requires a star kernel"))
        }
    };
    admissible(u, s)?;
    let rads = directional_radials(u, x, s, ctx);
    let mut scaled = Vec::with_capacity(rads.len());
    for (r, th) in rads.iter().zip(&ctx.rule.nodes) {
        let m = mu.eval(th);
        scaled.push(QuadResult::new(r.value * m, r.err * m));
    }
    let combined = angular_combine(&ctx.rule, &scaled, |v| v);
    Ok(combined * (1.0 - s))
}

/// Sign of the extremal operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalSign {
    Plus,
    Minus,
}

/// Pucci extremal operator over the star class, from the direction-wise
/// closed formula (exact extremum over all admissible measures at the
/// quadrature level; no sampling of measures).
pub fn pucci_star(
    u: &dyn Evaluable,
    x: &Point,
    bounds: &EllipticityBounds,
    sign: ExtremalSign,
    ctx: &EvalContext,
) -> Result<QuadResult> {
    let s = bounds.s;
    admissible(u, s)?;
    let rads = directional_radials(u, x, s, ctx);
    let (up, dn) = match sign {
        ExtremalSign::Plus => (bounds.big_lambda, bounds.lambda),
        ExtremalSign::Minus => (bounds.lambda, bounds.big_lambda),
    };
    let mut scaled = Vec::with_capacity(rads.len());
    for r in &rads {
        let v = up * r.value.max(0.0) + dn * r.value.min(0.0);
        scaled.push(QuadResult::new(v, bounds.big_lambda * r.err));
    }
    let combined = angular_combine(&ctx.rule, &scaled, |v| v);
    Ok(combined * (1.0 - s))
}

/// Pucci extremal operator over the rough class: pointwise sign split of
/// the symmetrized integrand (the exact extremum, since the class contains
/// every even measurable density between the bounds).
pub fn pucci_rough(
    u: &dyn Evaluable,
    x: &Point,
    bounds: &EllipticityBounds,
    sign: ExtremalSign,
    ctx: &EvalContext,
) -> Result<QuadResult> {
    let s = bounds.s;
    admissible(u, s)?;
    let (up, dn) = match sign {
        ExtremalSign::Plus => (bounds.big_lambda, bounds.lambda),
        ExtremalSign::Minus => (bounds.lambda, bounds.big_lambda),
    };
    let u_x = u.eval(x);
    let split = |d: f64| up * d.max(0.0) + dn * d.min(0.0);
    let per_dir: Vec<QuadResult> = ctx
        .rule
        .nodes
        .par_iter()
        .map(|th| {
            let g = |r: f64| {
                let d = 0.5 * (u.eval(&x.add_scaled(r, th)) + u.eval(&x.add_scaled(-r, th))) - u_x;
                split(d)
            };
            let mut breaks = u.breakpoints(x, th);
            let far = u.far_radius(x);
            if far > 0.0 && far.is_finite() {
                breaks.push(far);
            }
            radial_pv(g, s, &ctx.cfg.pv(), &breaks, |big_r| {
                numeric_tail(&g, s, big_r, 1e-12)
            })
        })
        .collect();
    let combined = angular_combine(&ctx.rule, &per_dir, |v| v);
    Ok(combined * (1.0 - s))
}

/// Kernel class selector for profile constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelClass {
    Star,
    Rough,
}

/// Evaluates the extremal operators on `phi_{e_n}^beta` at `x = e_n`:
/// returns `(cbar, cunder) = (M+ value, M- value)`. By scale invariance
/// these are the homogeneity constants of the profile.
pub fn power_constants(
    s: f64,
    beta: f64,
    bounds: &EllipticityBounds,
    class: KernelClass,
    ctx: &EvalContext,
) -> Result<(QuadResult, QuadResult)> {
    if !(beta > 0.0 && beta < 2.0 * s) {
        return Err(Error::invalid(format!(
            "profile exponent must lie in (0, 2s) = (0, {}), got {beta}",
            2.0 * s
        )));
    }
    let dim = ctx.rule.dim;
    let nu = if dim == 1 { Point::d1(1.0) } else { Point::d2(0.0, 1.0) };
    let profile = crate::function::PowerProfile::new(nu, beta)?;
    let x = nu;
    let b = EllipticityBounds { s, ..*bounds };
    let (plus, minus) = match class {
        KernelClass::Star => (
            pucci_star(&profile, &x, &b, ExtremalSign::Plus, ctx)?,
            pucci_star(&profile, &x, &b, ExtremalSign::Minus, ctx)?,
        ),
        KernelClass::Rough => (
            pucci_rough(&profile, &x, &b, ExtremalSign::Plus, ctx)?,
            pucci_rough(&profile, &x, &b, ExtremalSign::Minus, ctx)?,
        ),
    };
    Ok((plus, minus))
}

/// Bisection roots `beta_1` of `cbar` and `beta_2` of `cunder` in (0, 2s).
/// Root tolerance 1e-6 in beta (spec gate is 1e-4).
pub fn find_beta_roots(
    s: f64,
    bounds: &EllipticityBounds,
    class: KernelClass,
    ctx: &EvalContext,
) -> Result<(f64, f64)> {
    let lo = 0.02;
    let hi = 2.0 * s - 0.02;
    let eval = |beta: f64, plus: bool| -> Result<f64> {
        let (p, m) = power_constants(s, beta, bounds, class, ctx)?;
        Ok(if plus { p.value } else { m.value })
    };
    let mut roots = [0.0; 2];
    for (slot, plus) in [(0usize, true), (1usize, false)] {
        let (mut a, mut b) = (lo, hi);
        let (fa, fb) = (eval(a, plus)?, eval(b, plus)?);
        if !(fa < 0.0 && fb > 0.0) {
            return Err(Error::Diagnostic(format!(
                "no sign change for {} constant on ({a}, {b}): endpoints ({fa:.3e}, {fb:.3e})",
                if plus { "cbar" } else { "cunder" }
            )));
        }
        for _ in 0..40 {
            let m = 0.5 * (a + b);
            if b - a < 1e-6 {
                break;
            }
            let fm = eval(m, plus)?;
            if fm < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        roots[slot] = 0.5 * (a + b);
    }
    Ok((roots[0], roots[1]))
}

// ---------------------------------------------------------------------------
// Finite inf-sup (Isaacs / Bellman) operators
// ---------------------------------------------------------------------------

/// Cost field of one (a, b) pair.
#[derive(Clone)]
pub enum CostField {
    Zero,
    Constant(f64),
    Fn(Arc<dyn Fn(&Point) -> f64 + Send + Sync>),
}

impl CostField {
    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            CostField::Zero => 0.0,
            CostField::Constant(c) => *c,
            CostField::Fn(f) => f(x),
        }
    }
}

impl std::fmt::Debug for CostField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostField::Zero => write!(f, "Zero"),
            CostField::Constant(c) => write!(f, "Constant({c})"),
            CostField::Fn(_) => write!(f, "Fn(..)"),
        }
    }
}

/// Finite doubly-indexed family `{(L_ab, c_ab)}` evaluated as
/// `inf_b sup_a (L_ab u + c_ab)`. A Bellman operator is the single-b case.
#[derive(Clone, Debug)]
pub struct IsaacsOperator {
    pub n_a: usize,
    pub n_b: usize,
    kernels: Vec<KernelSpec>,
    costs: Vec<CostField>,
}

impl IsaacsOperator {
    pub fn new(n_a: usize, n_b: usize, kernels: Vec<KernelSpec>, costs: Vec<CostField>) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::invalid("index sets must be nonempty"));
        }
        if kernels.len() != n_a * n_b || costs.len() != n_a * n_b {
            return Err(Error::invalid(format!(
                "expected {} kernel/cost entries, got {}/{}",
                n_a * n_b,
                kernels.len(),
                costs.len()
            )));
        }
        let s0 = kernels[0].order();
        if kernels.iter().any(|k| (k.order() - s0).abs() > 1e-15) {
            return Err(Error::invalid("all kernels of an inf-sup family must share the order s"));
        }
        Ok(IsaacsOperator { n_a, n_b, kernels, costs })
    }

    /// Bellman operator: sup over a single family.
    pub fn bellman(kernels: Vec<KernelSpec>, costs: Vec<CostField>) -> Result<Self> {
        let n_a = kernels.len();
        Self::new(n_a, 1, kernels, costs)
    }

    pub fn order(&self) -> f64 {
        self.kernels[0].order()
    }

    pub fn kernel(&self, a: usize, b: usize) -> &KernelSpec {
        &self.kernels[b * self.n_a + a]
    }

    pub fn cost(&self, a: usize, b: usize) -> &CostField {
        &self.costs[b * self.n_a + a]
    }
}

/// Exact finite inf over b of sup over a of `L_ab u(x) + c_ab(x)`; ties
/// broken toward the lowest index. Returns the value and the argmin/argmax
/// policy pair.
pub fn isaacs_eval(
    op: &IsaacsOperator,
    u: &dyn Evaluable,
    x: &Point,
    ctx: &EvalContext,
) -> Result<(QuadResult, (usize, usize))> {
    let mut best_b: Option<(f64, QuadResult, usize, usize)> = None;
    for b in 0..op.n_b {
        let mut best_a: Option<(f64, QuadResult, usize)> = None;
        for a in 0..op.n_a {
            let lin = eval_linear(op.kernel(a, b), u, x, ctx)?;
            let v = lin.value + op.cost(a, b).eval(x);
            let q = QuadResult::new(v, lin.err);
            match &best_a {
                Some((bv, _, _)) if v <= *bv => {}
                _ => best_a = Some((v, q, a)),
            }
        }
        let (av, aq, ai) = best_a.expect("n_a > 0");
        match &best_b {
            Some((bv, _, _, _)) if av >= *bv => {}
            _ => best_b = Some((av, aq, ai, b)),
        }
    }
    let (_, q, a, b) = best_b.expect("n_b > 0");
    Ok((q, (a, b)))
}
