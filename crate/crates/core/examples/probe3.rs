use nonlocal_lab::quad::tanh_sinh;
fn main() {
    let r = tanh_sinh(&|x: f64| (1.0 - x).powf(-0.7), 0.0, 1.0, 1e-13);
    eprintln!("right-sing: {:.14} want {:.14} (err est {:.1e})", r.value, 1.0/0.3, r.err);
    let l = tanh_sinh(&|x: f64| x.powf(-0.7), 0.0, 1.0, 1e-13);
    eprintln!("left-sing : {:.14} want {:.14} (err est {:.1e})", l.value, 1.0/0.3, l.err);
    let m = tanh_sinh(&|x: f64| x.powf(0.4), 0.0, 1.0, 1e-13);
    eprintln!("mild      : {:.14} want {:.14} (err est {:.1e})", m.value, 1.0/1.4, m.err);
}
