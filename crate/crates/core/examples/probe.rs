use nonlocal_lab::*;
use std::time::Instant;
fn main() {
    // pv identity values
    for s in [0.3, 0.5, 0.9] {
        let t0 = Instant::now();
        let v = frac1d::pv_zero_identity(s).unwrap();
        eprintln!("pv_zero({s}) = {:.3e} (err {:.1e})  [{:?}]", v.value, v.err, t0.elapsed());
    }
    // reference table probe
    for (s, b) in [(0.75, 1.2), (0.5, 0.8), (0.5, 0.05)] {
        let t0 = Instant::now();
        let v = frac1d::frac_lap_power(s, b, 1.0).unwrap();
        eprintln!("FL({s},{b}) = {:.12} (err {:.1e}) [{:?}]", v.value, v.err, t0.elapsed());
    }
    // grid harmonic probe with timing
    let s = 0.5;
    let grid = Grid::new(Point::d1(-4.0), Point::d1(4.0), 1.0/64.0).unwrap();
    let model = FarFieldModel::PowerProfile { direction: Point::d1(1.0), exponent: s, coefficient: 1.0 };
    let u = GridFunction::from_fn(grid, |p| p.coords[0].max(0.0).powf(s), model).unwrap();
    let t0 = Instant::now();
    let v = frac1d::frac_lap_grid(s, &u, 0.5, &frac1d::Frac1dConfig::default()).unwrap();
    eprintln!("grid harmonic = {:.3e} (err {:.1e}) [{:?}]", v.value, v.err, t0.elapsed());
}
