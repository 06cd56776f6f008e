//! Explicit integrators for complex-valued ODE systems.
//!
//! [`integrate_dp54`] is the workhorse: an adaptive embedded Dormand–Prince
//! 5(4) pair over flat complex state vectors (kets or flattened density
//! matrices). [`propagate_rk4`] is a fixed-step classical RK4 for unitary
//! propagators where deterministic step counts matter (Floquet monodromy).

use crate::error::{KerrError, Result};
use crate::C64;
use faer::Mat;

/// Butcher tableau of Dormand–Prince 5(4).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integration controls. Defaults match the open-system engine: rel 1e-8,
/// abs 1e-10.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_steps: 200_000_000, initial_step: None }
    }
}

/// Integrate y' = f(t, y) from `t0` to `t1` in place.
///
/// `f(t, y, dy)` writes the derivative into `dy`. Step control is the
/// standard PI-free controller with safety 0.9 and growth clamped to
/// [0.2, 5].
pub fn integrate_dp54<F>(
    f: &mut F,
    y: &mut Vec<C64>,
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
) -> Result<()>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if t1 <= t0 {
        return Ok(());
    }
    let n = y.len();
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); n]).collect();
    let mut ytmp = vec![C64::new(0.0, 0.0); n];
    let mut y5 = vec![C64::new(0.0, 0.0); n];
    let mut t = t0;

    // conservative first step from the derivative magnitude
    f(t, y, &mut k[0]);
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let ynorm = y.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1e-12);
        let fnorm = k[0].iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1e-12);
        (0.01 * ynorm / fnorm).min(t1 - t0)
    });

    let mut first_same = true; // k[0] already holds f(t, y)
    for _step in 0..opts.max_steps {
        if t >= t1 {
            return Ok(());
        }
        h = h.min(t1 - t);
        if !first_same {
            f(t, y, &mut k[0]);
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * C64::new(a, 0.0);
                    }
                }
                ytmp[i] = y[i] + acc * C64::new(h, 0.0);
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(t + C[s] * h, &ytmp, &mut tail[0]);
        }
        let mut err_sq = 0.0f64;
        for i in 0..n {
            let mut acc5 = C64::new(0.0, 0.0);
            let mut acc4 = C64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    acc5 += kj[i] * C64::new(B5[j], 0.0);
                }
                if B4[j] != 0.0 {
                    acc4 += kj[i] * C64::new(B4[j], 0.0);
                }
            }
            let ynew = y[i] + acc5 * C64::new(h, 0.0);
            let e = (acc5 - acc4) * C64::new(h, 0.0);
            let scale = opts.atol + opts.rtol * y[i].norm().max(ynew.norm());
            let r = e.norm() / scale;
            err_sq += r * r;
            y5[i] = ynew;
        }
        let err = (err_sq / n as f64).sqrt();
        if err <= 1.0 {
            t += h;
            std::mem::swap(y, &mut y5);
            // FSAL: k[6] = f(t+h, y_new) by tableau construction
            k.swap(0, 6);
            first_same = true;
        } else {
            first_same = false;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * (t1 - t0) {
            return Err(KerrError::Convergence(format!(
                "step size collapsed at t = {t:.6e}"
            )));
        }
    }
    Err(KerrError::Convergence("max step count exceeded".into()))
}

/// Fixed-step RK4 for the matrix equation U' = f(t) U over [t0, t1] with
/// `steps` steps, starting from the identity. `gen(t)` must return the
/// generator matrix (already including any -i factors).
pub fn propagate_rk4<G>(gen: &mut G, dim: usize, t0: f64, t1: f64, steps: usize) -> Mat<C64>
where
    G: FnMut(f64) -> Mat<C64>,
{
    let mut u = Mat::<C64>::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let h = (t1 - t0) / steps as f64;
    let scale = |m: &Mat<C64>, s: f64| -> Mat<C64> {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * C64::new(s, 0.0))
    };
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let g1 = gen(t);
        let g2 = gen(t + h / 2.0);
        let g4 = gen(t + h);
        let k1 = &g1 * &u;
        let k2 = &g2 * &(&u + &scale(&k1, h / 2.0));
        let k3 = &g2 * &(&u + &scale(&k2, h / 2.0));
        let k4 = &g4 * &(&u + &scale(&k3, h));
        let incr = &(&k1 + &scale(&k2, 2.0)) + &(&scale(&k3, 2.0) + &k4);
        u = &u + &scale(&incr, h / 6.0);
    }
    u
}
