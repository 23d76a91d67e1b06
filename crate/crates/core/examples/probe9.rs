use nonlocal_lab::*;
use nonlocal_lab::barriers::*;
use nonlocal_lab::function::Evaluable;
use nonlocal_lab::quad::{adaptive, PvConfig};
use std::cell::Cell;
use std::time::Instant;
fn main() {
    let s = 0.5f64;
    let b = BarrierProfile { kind: BarrierKind::SupersolutionPhi1, s, dim: 2, eps: 0.0, amp: 1.0, low: 0.0, n_rescale: 0 };
    let sample = dyadic_sample(1.0, 1.25, 12, 2, 41);
    let x = sample.iter().find(|p| (p.norm() - 1.0) < 4.2e-4).copied().unwrap();
    let th = Point::d2(1.0, 0.0);
    let u_x = b.eval(&x);
    let count = Cell::new(0u64);
    let g = |r: f64| { count.set(count.get()+1);
        0.5 * (b.eval(&x.add_scaled(r, &th)) + b.eval(&x.add_scaled(-r, &th))) - u_x };
    let mut breaks = b.breakpoints(&x, &th);
    breaks.sort_by(|a,c| a.partial_cmp(c).unwrap());
    eprintln!("breaks: {breaks:?}");
    let cfg = PvConfig { delta: 1e-3, rmax: 1e3, tol: 3e-9, max_depth: 26 };
    // replicate radial_pv edge construction
    let delta = (breaks[0]/16.0).min(cfg.delta).max(1e-9);
    let big_r = 1e3f64.max(2.0*breaks.last().unwrap());
    let mut edges = vec![delta];
    let mut r = delta;
    while r < big_r { r *= 4.0; edges.push(r.min(big_r)); }
    for (i, &bk) in breaks.iter().enumerate() {
        if bk <= delta || bk >= big_r { continue; }
        edges.push(bk);
        let prev = if i == 0 { delta } else { breaks[i-1].max(delta) };
        let next = if i+1 < breaks.len() { breaks[i+1].min(big_r) } else { big_r };
        let (mut wl, mut wh) = (0.5*(bk-prev), 0.5*(next-bk));
        for _ in 0..12 {
            if wl > 1e-14*bk { edges.push(bk-wl); }
            if wh > 1e-14*bk { edges.push(bk+wh); }
            wl *= 0.25; wh *= 0.25;
        }
    }
    edges.retain(|&e| e >= delta && e <= big_r);
    edges.sort_by(|a,c| a.partial_cmp(c).unwrap());
    edges.dedup_by(|a, c| (*a - *c).abs() < 1e-14 * a.abs().max(1e-300));
    eprintln!("{} panels", edges.len()-1);
    let integrand = |r: f64| g(r) * r.powf(-1.0 - 2.0*s);
    let n_seg = edges.len()-1;
    for w in edges.windows(2) {
        count.set(0);
        let t0 = Instant::now();
        let q = adaptive(&integrand, w[0], w[1], cfg.tol / n_seg as f64, cfg.max_depth);
        if t0.elapsed().as_millis() > 20 {
            eprintln!("panel ({:.6e},{:.6e}): {:?} evals {} val {:.3e} err {:.1e}",
                w[0], w[1], t0.elapsed(), count.get(), q.value, q.err);
        }
    }
    eprintln!("done");
}
