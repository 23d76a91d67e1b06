//! Eigenfunctions of the weighted half-plane extension problem
//! `div(|y|^{1-2s} grad q) = 0`: angular modes
//!
//! ```text
//! Theta_nu(theta) = C |cos(theta/2)|^{2s} 2F1(-nu, nu+1; 1-s; (1-cos theta)/2),
//! ```
//!
//! normalized so `int_0^pi Theta^2 (sin theta)^{1-2s} dtheta = 1`. The
//! hypergeometric series terminates at degree nu (a = -nu), so evaluation
//! is a plain polynomial with exact integer numerators.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;

/// One angular mode of the extension problem.
#[derive(Clone, Debug)]
pub struct ExtensionMode {
    pub nu: u32,
    pub s: f64,
    /// L^2 normalization against the weight (sin theta)^{1-2s} on (0, pi).
    pub normalization: f64,
    /// Polynomial coefficients in z = (1 - cos theta)/2, degree nu.
    coefs: Vec<f64>,
}

/// Coefficients of the terminating series: c_k = (-nu)_k (nu+1)_k / ((1-s)_k k!).
/// The numerator (-nu)_k (nu+1)_k / k! is the exact integer
/// (-1)^k C(nu, k) (nu+1)(nu+2)...(nu+k); it is accumulated in i128.
fn series_coefs(nu: u32, s: f64) -> Vec<f64> {
    let n = nu as i128;
    let mut coefs = Vec::with_capacity(nu as usize + 1);
    let mut numer: i128 = 1; // (-nu)_k (nu+1)_k / k!
    let mut denom = 1.0; // (1-s)_k
    coefs.push(1.0);
    for k in 0..nu as i128 {
        // (-nu + k) and (nu + 1 + k), divided by (k+1)
        numer = numer * (-n + k) * (n + 1 + k) / (k + 1);
        denom *= 1.0 - s + k as f64;
        coefs.push(numer as f64 / denom);
    }
    coefs
}

impl ExtensionMode {
    pub fn new(nu: u32, s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid(format!("order s must lie in (0,1), got {s}")));
        }
        let coefs = series_coefs(nu, s);
        let mut mode = ExtensionMode { nu, s, normalization: 1.0, coefs };
        let norm2 = tanh_sinh(
            &|t: f64| {
                let v = mode.eval_unnormalized(t);
                v * v * t.sin().powf(1.0 - 2.0 * s)
            },
            0.0,
            std::f64::consts::PI,
            1e-13,
        );
        if !(norm2.value > 0.0) {
            return Err(Error::Diagnostic(format!("mode ({nu}, {s}) has nonpositive norm")));
        }
        mode.normalization = 1.0 / norm2.value.sqrt();
        Ok(mode)
    }

    fn eval_unnormalized(&self, theta: f64) -> f64 {
        let z = 0.5 * (1.0 - theta.cos());
        let mut poly = 0.0;
        for &c in self.coefs.iter().rev() {
            poly = poly * z + c;
        }
        (0.5 * theta).cos().abs().powf(2.0 * self.s) * poly
    }

    /// Polynomial degree of the hypergeometric factor (== nu).
    pub fn degree(&self) -> usize {
        self.coefs.len() - 1
    }

    /// The full separated solution `r^{s+nu} Theta_nu(theta)` in polar form.
    pub fn solution(&self, r: f64, theta: f64) -> f64 {
        r.powf(self.s + self.nu as f64) * theta_value(self, theta)
    }

    /// Cartesian form q(x, y) with x = r cos theta, y = r sin theta.
    pub fn solution_xy(&self, x: f64, y: f64) -> f64 {
        let r = (x * x + y * y).sqrt();
        let theta = y.atan2(x);
        self.solution(r, theta)
    }
}

/// Normalized angular eigenfunction value; even in theta, zero at +-pi.
pub fn theta_value(mode: &ExtensionMode, theta: f64) -> f64 {
    mode.normalization * mode.eval_unnormalized(theta.abs())
}

/// Weighted Gram entry of the modes: the inner product over (-pi, pi)
/// against |sin theta|^{1-2s}, scaled to the (0, pi) normalization (the
/// integrand is even, so this is exactly the (0, pi) integral). Reference 0
/// off the diagonal, 1 on it.
pub fn orthogonality(j: u32, k: u32, s: f64) -> Result<f64> {
    let mj = ExtensionMode::new(j, s)?;
    let mk = ExtensionMode::new(k, s)?;
    let q = tanh_sinh(
        &|t: f64| theta_value(&mj, t) * theta_value(&mk, t) * t.sin().powf(1.0 - 2.0 * s),
        0.0,
        std::f64::consts::PI,
        1e-13,
    );
    Ok(q.value)
}

/// Max finite-difference residual of `q_xx + q_yy + (a/y) q_y`, a = 1-2s,
/// over the sample; the exact solution satisfies it identically, so the
/// residual is pure truncation, O(step^2).
pub fn extension_residual(mode: &ExtensionMode, sample: &[(f64, f64)], step: f64) -> Result<f64> {
    let a = 1.0 - 2.0 * mode.s;
    let mut worst: f64 = 0.0;
    for &(r, theta) in sample {
        if theta.sin().abs() <= 0.05 {
            return Err(Error::OutOfDomain(format!(
                "sample at theta = {theta} too close to the degeneracy line"
            )));
        }
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let q = |dx: f64, dy: f64| mode.solution_xy(x + dx, y + dy);
        let h = step;
        let qxx = (q(h, 0.0) - 2.0 * q(0.0, 0.0) + q(-h, 0.0)) / (h * h);
        let qyy = (q(0.0, h) - 2.0 * q(0.0, 0.0) + q(0.0, -h)) / (h * h);
        let qy = (q(0.0, h) - q(0.0, -h)) / (2.0 * h);
        let res = qxx + qyy + a / y * qy;
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

/// Weighted Neumann trace `y^{1-2s} dq/dy` at height y over x > 0; tends to
/// zero as y does.
pub fn neumann_trace(mode: &ExtensionMode, x: f64, y: f64, step: f64) -> f64 {
    let dq = (mode.solution_xy(x, y + step) - mode.solution_xy(x, y - step)) / (2.0 * step);
    y.powf(1.0 - 2.0 * mode.s) * dq
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Frozen 30-digit references: normalization constants and
    // point values Theta_nu(1.0).
    const THETA_REFS: &[(f64, u32, f64, f64)] = &[
        // (s, nu, C, Theta(1.0))
        (0.25, 0, 0.797884560802865, 0.747453283345794),
        (0.25, 1, 1.07047446969166, 0.388158882229718),
        (0.25, 2, 1.21878879857191, -0.406200739191794),
        (0.25, 3, 1.32653019006716, -0.827863932216661),
        (0.5, 0, 0.797884560802865, 0.700209576962153),
        (0.5, 1, 0.797884560802865, 0.0564401210850589),
        (0.5, 2, 0.797884560802865, -0.639220121830685),
        (0.5, 3, 0.797884560802865, -0.747184332649923),
        (0.75, 0, 0.65147001587056, 0.535582538546711),
        (0.75, 1, 0.426487237245846, -0.294097723620775),
        (0.75, 2, 0.371209492773892, -0.759181843911073),
        (0.75, 3, 0.340219119864505, -0.548685300193522),
    ];

    #[test]
    fn normalization_and_point_values_match_references() {
        for &(s, nu, c_ref, v_ref) in THETA_REFS {
            let m = ExtensionMode::new(nu, s).unwrap();
            assert_relative_eq!(m.normalization, c_ref, max_relative = 1e-9);
            assert_relative_eq!(theta_value(&m, 1.0), v_ref, max_relative = 1e-9);
        }
    }

    #[test]
    fn mode_zero_is_pure_power_of_cosine() {
        let s = 0.6;
        let m = ExtensionMode::new(0, s).unwrap();
        assert_eq!(m.degree(), 0);
        for t in [0.3f64, 1.0, 2.4] {
            let expect = m.normalization * (0.5 * t).cos().powf(2.0 * s);
            assert_relative_eq!(theta_value(&m, t), expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn vanishes_at_pi_and_even() {
        for s in [0.25, 0.5, 0.75] {
            for nu in 0..6 {
                let m = ExtensionMode::new(nu, s).unwrap();
                assert!(theta_value(&m, std::f64::consts::PI).abs() < 1e-12);
                for t in [0.2, 1.1, 2.9] {
                    assert_eq!(theta_value(&m, t).to_bits(), theta_value(&m, -t).to_bits());
                }
            }
        }
    }

    #[test]
    fn orthogonality_within_tolerance() {
        assert!(orthogonality(0, 1, 0.5).unwrap().abs() < 1e-8);
        assert!(orthogonality(2, 5, 0.75).unwrap().abs() < 1e-8);
        assert_relative_eq!(orthogonality(3, 3, 0.5).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn series_terminates_exactly_at_degree_nu() {
        // coefficient nu+1 onward of the hypergeometric series vanish; the
        // stored polynomial has exactly nu+1 entries and the (nu+1)-th
        // Pochhammer numerator is zero
        for nu in 0..8u32 {
            let c = series_coefs(nu, 0.35);
            assert_eq!(c.len() as u32, nu + 1);
            if nu > 0 {
                assert!(c[nu as usize] != 0.0);
            }
        }
    }

    #[test]
    fn pde_residual_small() {
        let mut rng_state = 1u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for s in [0.25, 0.5, 0.75] {
            for nu in 0..=2u32 {
                let m = ExtensionMode::new(nu, s).unwrap();
                let sample: Vec<(f64, f64)> = (0..50)
                    .map(|_| {
                        let r = 0.9 + 0.2 * next();
                        let t = 0.4 + 2.3 * next();
                        (r, t)
                    })
                    .collect();
                let res = extension_residual(&m, &sample, 1e-3).unwrap();
                assert!(res < 1e-4, "residual {res} for nu={nu}, s={s}");
            }
        }
    }

    #[test]
    fn neumann_trace_decays() {
        for s in [0.3, 0.6] {
            let m = ExtensionMode::new(1, s).unwrap();
            let t1 = neumann_trace(&m, 0.7, 1e-2, 1e-4).abs();
            let t2 = neumann_trace(&m, 0.7, 1e-3, 1e-5).abs();
            assert!(t2 < t1, "trace should decay toward 0: {t1} -> {t2}");
        }
    }

    #[test]
    fn trace_recovers_power_profile() {
        // r^s Theta_0 restricted to theta -> 0+ is a positive multiple of x_+^s
        let s = 0.45;
        let m = ExtensionMode::new(0, s).unwrap();
        let k = theta_value(&m, 0.0);
        assert!(k > 0.0);
        for x in [0.3, 1.0, 2.5] {
            assert_relative_eq!(m.solution_xy(x, 0.0), k * x.powf(s), max_relative = 1e-12);
        }
        // and vanishes on the negative axis boundary (theta = pi)
        assert!(m.solution_xy(-1.0, 0.0).abs() < 1e-12);
    }

    #[test]
    fn parseval_ring_identity() {
        // v = sum a_nu r^{s+nu} Theta_nu: the weighted ring norm reproduces
        // sum |a_nu|^2 R^{2s+2nu+1+a}
        let s = 0.5;
        let a = 1.0 - 2.0 * s;
        let coefs = [0.8, -0.5, 0.3];
        let modes: Vec<ExtensionMode> =
            (0..3).map(|nu| ExtensionMode::new(nu, s).unwrap()).collect();
        for big_r in [0.7, 1.3] {
            let integrand = |t: f64| {
                let v: f64 = coefs
                    .iter()
                    .zip(&modes)
                    .map(|(c, m)| c * m.solution(big_r, t))
                    .sum();
                // weight y^a on the ring, arc measure R dtheta
                v * v * (big_r * t.sin()).powf(a) * big_r
            };
            let lhs = tanh_sinh(&integrand, 0.0, std::f64::consts::PI, 1e-12).value;
            let rhs: f64 = coefs
                .iter()
                .enumerate()
                .map(|(nu, c)| c * c * big_r.powf(2.0 * s + 2.0 * nu as f64 + 1.0 + a))
                .sum();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-7);
        }
    }
}
