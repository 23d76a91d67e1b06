use nonlocal_lab::*;
use nonlocal_lab::barriers::*;
use nonlocal_lab::frac1d::{directional_pv, Frac1dConfig};
use nonlocal_lab::function::Evaluable;
use std::time::Instant;
fn main() {
    let s = 0.5;
    let cfg = Frac1dConfig { delta: 1e-3, rmax: 1e3, tol: 3e-9 };
    let b = BarrierProfile { kind: BarrierKind::SupersolutionPhi1, s, dim: 2, eps: 0.0, amp: 1.0, low: 0.0, n_rescale: 0 };
    // replicate the hanging sample point: |x| ~ 1.00031 from seed 41 round 2
    let sample = dyadic_sample(1.0, 1.25, 12, 2, 41);
    let x = sample.iter().find(|p| (p.norm() - 1.0) < 4.2e-4).copied().unwrap();
    eprintln!("x = {:?} |x| = {:.9}", x.coords, x.norm());
    let rule = spectral::sphere_rule(2, 64).unwrap();
    for (i, th) in rule.nodes.iter().enumerate() {
        let t0 = Instant::now();
        let r = directional_pv(&b, &x, th, s, &cfg);
        let dt = t0.elapsed();
        if dt.as_millis() > 50 {
            eprintln!("dir {i} ({:.4},{:.4}): {:?} val {:.4e} err {:.1e} breaks {:?}",
                th.coords[0], th.coords[1], dt, r.value, r.err, b.breakpoints(&x, th));
        }
    }
    eprintln!("done");
}
