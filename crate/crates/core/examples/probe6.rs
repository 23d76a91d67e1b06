use nonlocal_lab::*;
use nonlocal_lab::barriers::*;
use nonlocal_lab::operators::*;
use std::time::Instant;
fn main() {
    let s = 0.5;
    let bounds = EllipticityBounds::new(1.0, 2.0, s).unwrap();
    let ctx = EvalContext::verification(2);
    let proto = BarrierProfile::plain(BarrierKind::SupersolutionPhi1, s, 2);
    let mut eps = 0.5f64;
    for _ in 0..6 {
        let sample = dyadic_sample(1.0, 1.0 + eps, 12, 2, 41);
        let t0 = Instant::now();
        let mut worst = f64::NEG_INFINITY;
        for x in &sample {
            let t1 = Instant::now();
            let v = pucci_star(&proto, x, &bounds, ExtremalSign::Plus, &ctx).unwrap();
            eprintln!("  point |x|={:.8}: {:.4} err {:.1e} [{:?}]", x.norm(), v.value, v.err, t1.elapsed());
            worst = worst.max(v.value + v.err);
        }
        eprintln!("eps {eps:.4}: worst M+psi = {worst:.4} [{:?}]", t0.elapsed());
        if worst <= -1.0 { eprintln!("accepted"); break; }
        eps *= 0.5;
    }
}
