use nonlocal_lab::*;
use nonlocal_lab::barriers::*;
use nonlocal_lab::frac1d::{directional_pv, Frac1dConfig};
use nonlocal_lab::function::Evaluable;
use std::time::Instant;
use std::cell::Cell;

struct Counting<'a> { inner: &'a BarrierProfile, n: Cell<u64> }
impl<'a> Evaluable for Counting<'a> {
    fn dim(&self) -> usize { self.inner.dim() }
    fn eval(&self, x: &Point) -> f64 { self.n.set(self.n.get()+1); self.inner.eval(x) }
    fn far_field(&self) -> FarFieldModel { Evaluable::far_field(self.inner) }
    fn far_radius(&self, x: &Point) -> f64 { self.inner.far_radius(x) }
    fn breakpoints(&self, x: &Point, th: &Point) -> Vec<f64> { self.inner.breakpoints(x, th) }
}
unsafe impl<'a> Sync for Counting<'a> {}

fn main() {
    let s = 0.5;
    let cfg = Frac1dConfig { delta: 1e-3, rmax: 1e3, tol: 3e-9 };
    let b = BarrierProfile { kind: BarrierKind::SupersolutionPhi1, s, dim: 2, eps: 0.0, amp: 1.0, low: 0.0, n_rescale: 0 };
    for rho in [1.0006f64, 1.01, 1.3] {
        let x = Point::d2(rho, 0.0);
        for ang in [0.01f64, 0.7, 1.57] {
            let th = Point::on_circle(ang);
            let c = Counting { inner: &b, n: Cell::new(0) };
            let t0 = Instant::now();
            let r = directional_pv(&c, &x, &th, s, &cfg);
            eprintln!("rho {rho} ang {ang}: {:?} evals {} val {:.4e} err {:.1e} breaks {:?}",
                t0.elapsed(), c.n.get(), r.value, r.err, b.breakpoints(&x, &th).len());
        }
    }
}
