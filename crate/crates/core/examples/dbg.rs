fn main() {
    // replicate the march with prints
    let (dl, k, e2) = (0.0f64, 1.0f64, std::f64::consts::PI);
    let h = |x: f64, p: f64| -> f64 {
        let r2 = x * x + p * p;
        -0.5 * dl * r2 - 0.25 * k * r2 * r2 + e2 * (x * x - p * p)
    };
    let grad = |x: f64, p: f64| -> (f64, f64) {
        let r2 = x * x + p * p;
        (-dl * x - k * r2 * x + 2.0 * e2 * x, -dl * p - k * r2 * p - 2.0 * e2 * p)
    };
    let sigma = ((e2 - dl / 2.0) / (e2 + dl / 2.0)).sqrt();
    let loop_extent = ((4.0 * e2 - 2.0 * dl) / k).sqrt();
    let s0 = 1e-7 * loop_extent;
    let dirn = (1.0 + sigma * sigma).sqrt();
    let (mut x, mut p) = (s0 / dirn, s0 * sigma / dirn);
    let project = |x: &mut f64, p: &mut f64| {
        for _ in 0..6 {
            let f = h(*x, *p);
            let (gx, gp) = grad(*x, *p);
            let g2 = gx * gx + gp * gp;
            if g2 < 1e-30 { break; }
            let st = f / g2;
            *x -= st * gx;
            *p -= st * gp;
        }
    };
    project(&mut x, &mut p);
    let n_steps = 60000usize;
    let step = 1.05 * std::f64::consts::PI * loop_extent / n_steps as f64;
    let mut area = 0.0;
    let mut left_origin = false;
    for i in 0..n_steps * 2 {
        let (gx, gp) = grad(x, p);
        let gn = (gx * gx + gp * gp).sqrt();
        if gn < 1e-30 { println!("grad vanished at step {i}, ({x},{p})"); break; }
        let (mut tx, mut tp) = (gp / gn, -gx / gn);
        if !left_origin && (tx * x + tp * p) < 0.0 { tx = -tx; tp = -tp; }
        let (mut xn, mut pn) = (x + tx * step, p + tp * step);
        project(&mut xn, &mut pn);
        area += 0.5 * (x * pn - xn * p);
        let r = (xn * xn + pn * pn).sqrt();
        if !left_origin && r > 20.0 * s0 + 4.0 * step { left_origin = true; }
        x = xn; p = pn;
        if i % 20000 == 0 || i < 3 { println!("step {i}: ({x:.4}, {p:.4}) r={r:.4} area={area:.6}"); }
        if left_origin && r < 2.0 * step && p < 0.0 { println!("closed at step {i}, area={area}"); break; }
    }
    println!("final area/2pi = {}", area.abs() / (2.0 * std::f64::consts::PI));
}
