use nonlocal_lab::*;
use nonlocal_lab::barriers::*;
use nonlocal_lab::operators::*;
use nonlocal_lab::frac1d::directional_pv;
use std::time::Instant;
fn main() {
    let s = 0.5;
    let b = BarrierProfile::plain(BarrierKind::Phi1DistPowSOut, s, 2);
    let bounds = EllipticityBounds::new(1.0, 2.0, s).unwrap();
    let ctx = EvalContext::new(2);
    let x = Point::d2(1.3, 0.0);
    let th = Point::on_circle(0.7);
    let cfg = frac1d::Frac1dConfig::default();

    let t0 = Instant::now();
    let n = 200;
    let mut acc = 0.0;
    for i in 0..n { acc += b.eval(&x.add_scaled(0.001*i as f64, &th)); }
    eprintln!("barrier eval: {:?}/call (acc {acc:.3})", t0.elapsed()/n);

    let t0 = Instant::now();
    let r = directional_pv(&b, &x, &th, s, &cfg);
    eprintln!("directional_pv: {:?}  value {:.6e} err {:.1e}", t0.elapsed(), r.value, r.err);

    use nonlocal_lab::function::Evaluable;
    let t0 = Instant::now();
    let tail = b.directional_tail(&x, &th, s, 1e4, b.eval(&x));
    eprintln!("numeric tail: {:?}  value {:.3e}", t0.elapsed(), tail.0);

    let t0 = Instant::now();
    let v = pucci_star(&b, &x, &bounds, ExtremalSign::Minus, &ctx).unwrap();
    eprintln!("pucci_star: {:?}  value {:.6} err {:.1e}", t0.elapsed(), v.value, v.err);
}
