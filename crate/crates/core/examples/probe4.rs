use nonlocal_lab::*;
use nonlocal_lab::function::Evaluable;
use std::time::Instant;
fn main() {
    let s = 0.5;
    let grid = Grid::new(Point::d1(-4.0), Point::d1(4.0), 1.0/64.0).unwrap();
    let model = FarFieldModel::PowerProfile { direction: Point::d1(1.0), exponent: s, coefficient: 1.0 };
    let u = GridFunction::from_fn(grid, |p| p.coords[0].max(0.0).powf(s), model).unwrap();
    let x = Point::d1(0.5);
    let e = Point::d1(1.0);
    let u_x = u.eval(&x);
    eprintln!("u(x) = {u_x}");
    let breaks = u.breakpoints(&x, &e);
    eprintln!("breaks: {breaks:?}, far_radius: {}", u.far_radius(&x));
    let t0 = Instant::now();
    let tail = u.directional_tail(&x, &e, s, 1e4, u_x);
    eprintln!("tail = {:?} [{:?}]", tail, t0.elapsed());
    let g = |r: f64| 0.5 * (u.eval(&x.add_scaled(r, &e)) + u.eval(&x.add_scaled(-r, &e))) - u_x;
    for (a, b) in [(1e-3, 0.5), (0.5, 4.5), (4.5, 8.5), (8.5, 100.0), (100.0, 1e4)] {
        let t0 = Instant::now();
        let q = quad::adaptive(&|r: f64| g(r) * r.powf(-1.0 - 2.0*s), a, b, 1e-11, 38);
        eprintln!("panel ({a},{b}): {:.6e} err {:.1e} [{:?}]", q.value, q.err, t0.elapsed());
    }
}
