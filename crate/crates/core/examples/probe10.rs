use nonlocal_lab::*;
use nonlocal_lab::barriers::*;
use nonlocal_lab::function::Evaluable;
use nonlocal_lab::quad::integrate_gl;
fn main() {
    let s = 0.5f64;
    let b = BarrierProfile { kind: BarrierKind::SupersolutionPhi1, s, dim: 2, eps: 0.0, amp: 1.0, low: 0.0, n_rescale: 0 };
    let sample = dyadic_sample(1.0, 1.25, 12, 2, 41);
    let x = sample.iter().find(|p| (p.norm() - 1.0) < 4.2e-4).copied().unwrap();
    let th = Point::d2(1.0, 0.0);
    let u_x = b.eval(&x);
    let g = |r: f64| 0.5 * (b.eval(&x.add_scaled(r, &th)) + b.eval(&x.add_scaled(-r, &th))) - u_x;
    let f = |r: f64| g(r) * r.powf(-2.0);
    for r in [2.2e-5, 3e-5, 4e-5, 5e-5, 6e-5, 8e-5] {
        eprintln!("g({r:.2e}) = {:+.6e}   f = {:+.6e}", g(r), f(r));
    }
    let lo = integrate_gl(&f, 2.100680e-5, 8.402719e-5, 8);
    let hi = integrate_gl(&f, 2.100680e-5, 8.402719e-5, 16);
    eprintln!("GL8 = {lo:.10e}  GL16 = {hi:.10e}  diff = {:.2e}", (hi-lo).abs());
}
