use nonlocal_lab::quad::{adaptive, tanh_sinh};

fn main() {
    let s = 0.3f64;
    let paired = |t: f64| -> f64 {
        let diff = if t < 1e-4 {
            let mut acc = 0.0;
            let mut coef = 1.0;
            for k in 1..=5u32 {
                coef *= (s - 1.0 - (k as f64 - 1.0)) / k as f64;
                if k % 2 == 1 {
                    acc += 2.0 * coef * t.powi(k as i32);
                }
            }
            acc
        } else {
            (1.0 + t).powf(s - 1.0) - (1.0 - t).powf(s - 1.0)
        };
        diff * t.powf(-2.0 * s)
    };
    let a = tanh_sinh(&paired, 0.0, 1.0, 1e-13);
    eprintln!("A      = {:.14}  (err est {:.2e})   [mp: -2.9573028097639]", a.value, a.err);
    let b = adaptive(&|t: f64| (1.0 + t).powf(s - 1.0) * t.powf(-2.0 * s), 1.0, 50.0, 1e-13, 42);
    eprintln!("B_in   = {:.14}  (err est {:.2e})   [mp: 1.9297699351491]", b.value, b.err);
    let mut tail = 0.0; let mut coef = 1.0;
    for k in 0..40u32 {
        if k > 0 { coef *= (s - 1.0 - (k as f64 - 1.0)) / k as f64; }
        tail += coef * 50f64.powf(-s - k as f64) / (s + k as f64);
    }
    eprintln!("B_tail = {:.14}                      [mp: 1.0275328746148]", tail);
}
