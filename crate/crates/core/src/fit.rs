//! Nonlinear least-squares fits used by the lifetime and Rabi analyses:
//! single exponentials and damped cosines.

use crate::error::{KerrError, Result};
use rustfft::{num_complex::Complex, FftPlanner};

/// A·e^{−t/T} + C fit result.
#[derive(Debug, Clone, Copy)]
pub struct ExpFit {
    pub amplitude: f64,
    pub tau: f64,
    pub offset: f64,
    /// RMS residual over the fitted window.
    pub residual: f64,
}

/// A·e^{−t/T}·cos(Ωt + φ) + C fit result.
#[derive(Debug, Clone, Copy)]
pub struct DampedCosineFit {
    pub amplitude: f64,
    pub tau: f64,
    pub omega: f64,
    pub phase: f64,
    pub offset: f64,
    pub residual: f64,
}

fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Levenberg-damped Gauss–Newton over a generic residual model.
///
/// `model(t, p)` returns (value, gradient w.r.t. p).
fn gauss_newton<M>(
    times: &[f64],
    values: &[f64],
    p0: Vec<f64>,
    model: M,
    max_iter: usize,
) -> Option<(Vec<f64>, f64)>
where
    M: Fn(f64, &[f64]) -> (f64, Vec<f64>),
{
    let n = p0.len();
    let ssr = |p: &[f64]| -> f64 {
        times
            .iter()
            .zip(values)
            .map(|(&t, &v)| {
                let (m, _) = model(t, p);
                (m - v) * (m - v)
            })
            .sum()
    };
    let mut p = p0;
    let mut s = ssr(&p);
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for (&t, &v) in times.iter().zip(values) {
            let (m, g) = model(t, &p);
            let r = v - m;
            for i in 0..n {
                jtr[i] += g[i] * r;
                for j in 0..n {
                    jtj[i][j] += g[i] * g[j];
                }
            }
        }
        let mut improved = false;
        for _ in 0..25 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[i][i] *= 1.0 + lambda;
            }
            let mut b = jtr.clone();
            let Some(step) = solve_small(&mut a, &mut b) else {
                lambda *= 10.0;
                continue;
            };
            let cand: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a + b).collect();
            let sc = ssr(&cand);
            if sc.is_finite() && sc < s {
                let rel: f64 = step
                    .iter()
                    .zip(&p)
                    .map(|(d, q)| (d / q.abs().max(1e-30)).abs())
                    .fold(0.0, f64::max);
                p = cand;
                s = sc;
                lambda = (lambda * 0.3).max(1e-14);
                improved = true;
                if rel < 1e-12 {
                    return Some((p, s));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            return Some((p, s));
        }
    }
    Some((p, s))
}

/// Fit A·e^{−t/T} + C by log-linear initialization followed by damped
/// Gauss–Newton refinement.
///
/// Requires at least 8 points; rejects constant series and vanishing
/// amplitudes with [`KerrError::Fit`].
pub fn fit_exponential(times: &[f64], values: &[f64]) -> Result<ExpFit> {
    if times.len() < 8 || times.len() != values.len() {
        return Err(KerrError::Fit(format!("need >= 8 points, got {}", times.len())));
    }
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = vmax - vmin;
    let scale = vmax.abs().max(vmin.abs()).max(1e-300);
    if spread < 1e-10 * scale {
        return Err(KerrError::Fit("constant series: decay time unidentifiable".into()));
    }

    let span = times[times.len() - 1] - times[0];
    let mut best: Option<(Vec<f64>, f64)> = None;
    // try a few offset hypotheses; log-linear init for (A, T) on each
    let tail = values[values.len().saturating_sub(values.len() / 10 + 1)..]
        .iter()
        .sum::<f64>()
        / (values.len() / 10 + 1) as f64;
    for c0 in [0.0, tail, vmin - 1e-3 * spread] {
        let pts: Vec<(f64, f64)> = times
            .iter()
            .zip(values)
            .filter_map(|(&t, &v)| {
                let d = v - c0;
                (d.abs() > 1e-12 * scale).then(|| (t, d.abs().ln()))
            })
            .collect();
        if pts.len() < 4 {
            continue;
        }
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = m * sxx - sx * sx;
        if denom.abs() < 1e-300 {
            continue;
        }
        let slope = (m * sxy - sx * sy) / denom;
        let inter = (sy - slope * sx) / m;
        let t0 = if slope < -1e-300 { -1.0 / slope } else { span };
        let sign = if values[0] - c0 >= 0.0 { 1.0 } else { -1.0 };
        let a0 = sign * inter.exp();
        let p0 = vec![a0, t0, c0];
        let model = |t: f64, p: &[f64]| -> (f64, Vec<f64>) {
            let e = (-t / p[1]).exp();
            (p[0] * e + p[2], vec![e, p[0] * t / (p[1] * p[1]) * e, 1.0])
        };
        if let Some((p, ssr)) = gauss_newton(times, values, p0, model, 200) {
            if p[1].is_finite() && p[1] > 0.0 && best.as_ref().map_or(true, |b| ssr < b.1) {
                best = Some((p, ssr));
            }
        }
    }
    let (p, ssr) = best.ok_or_else(|| KerrError::Fit("no decaying fit converged".into()))?;
    let residual = (ssr / times.len() as f64).sqrt();
    if p[0].abs() < 1e-10 * scale {
        return Err(KerrError::Fit("amplitude ~ 0: decay time unidentifiable".into()));
    }
    Ok(ExpFit { amplitude: p[0], tau: p[1], offset: p[2], residual })
}

/// Fit A·e^{−t/T}·cos(Ωt + φ) + C. Ω is initialized from the discrete
/// Fourier peak of the detrended signal; the π phase ambiguity is resolved
/// by the sign of the first extremum.
pub fn fit_damped_cosine(times: &[f64], values: &[f64]) -> Result<DampedCosineFit> {
    if times.len() < 16 || times.len() != values.len() {
        return Err(KerrError::Fit(format!("need >= 16 points, got {}", times.len())));
    }
    let n = times.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let detrended: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let amp0 = detrended.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amp0 < 1e-12 {
        return Err(KerrError::Fit("no oscillation: flat signal".into()));
    }

    // FFT peak initializer for Ω (uniform grid assumed for the initializer
    // only; the refinement uses the true time stamps)
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    let mut buf: Vec<Complex<f64>> =
        detrended.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let (kpeak, peak_mag) = (1..half)
        .map(|k| (k, buf[k].norm()))
        .fold((0usize, 0.0f64), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    if kpeak == 0 {
        return Err(KerrError::Fit("no oscillation: spectrum peaked at DC".into()));
    }
    let dc_mag = buf[0].norm();
    if peak_mag < 0.05 * dc_mag.max(1e-300) && peak_mag < 1e-9 {
        return Err(KerrError::Fit("no oscillation detected".into()));
    }
    // parabolic refinement of the peak bin
    let shift = if kpeak > 1 && kpeak + 1 < half {
        let (ym, y0, yp) = (buf[kpeak - 1].norm(), peak_mag, buf[kpeak + 1].norm());
        let d = ym - 2.0 * y0 + yp;
        if d.abs() > 1e-300 {
            (0.5 * (ym - yp) / d).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let omega0 = 2.0 * std::f64::consts::PI * (kpeak as f64 + shift) / (n as f64 * dt);

    // envelope decay initializer from half-window RMS
    let hrms = |s: &[f64]| (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt();
    let r1 = hrms(&detrended[..n / 2]).max(1e-300);
    let r2 = hrms(&detrended[n / 2..]).max(1e-300);
    let span = times[n - 1] - times[0];
    let tau0 = if r2 < r1 { (span / 2.0) / (r1 / r2).ln() } else { 10.0 * span };

    // phase from the first point, sign disambiguated by the initial slope
    let c0 = (detrended[0] / amp0).clamp(-1.0, 1.0);
    let mut phi0 = c0.acos();
    if detrended[1] > detrended[0] {
        phi0 = -phi0;
    }

    let p0 = vec![amp0, tau0.max(dt), omega0, phi0, mean];
    let model = |t: f64, p: &[f64]| -> (f64, Vec<f64>) {
        let e = (-t / p[1]).exp();
        let (s, c) = (p[2] * t + p[3]).sin_cos();
        (
            p[0] * e * c + p[4],
            vec![e * c, p[0] * t / (p[1] * p[1]) * e * c, -p[0] * e * s * t, -p[0] * e * s, 1.0],
        )
    };
    let (p, ssr) = gauss_newton(times, values, p0, model, 300)
        .ok_or_else(|| KerrError::Fit("damped-cosine refinement failed".into()))?;
    if !(p[1].is_finite() && p[1] > 0.0) || !p[2].is_finite() {
        return Err(KerrError::Fit("damped-cosine fit diverged".into()));
    }
    Ok(DampedCosineFit {
        amplitude: p[0],
        tau: p[1],
        omega: p[2].abs(),
        phase: p[3],
        offset: p[4],
        residual: (ssr / n as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exponential_with_noise_recovers_tau() {
        // synthetic 5 e^{-t/7} with 1% noise
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let times: Vec<f64> = (0..120).map(|i| i as f64 * 0.25).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|&t| 5.0 * (-t / 7.0).exp() * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)))
            .collect();
        let fit = fit_exponential(&times, &values).unwrap();
        assert!((fit.tau - 7.0).abs() / 7.0 < 0.03, "tau = {}", fit.tau);
        assert!((fit.amplitude - 5.0).abs() / 5.0 < 0.05);
    }

    #[test]
    fn exponential_constant_series_rejected() {
        let times: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let values = vec![1.25; 20];
        assert!(matches!(fit_exponential(&times, &values), Err(KerrError::Fit(_))));
    }

    #[test]
    fn exponential_zero_amplitude_rejected() {
        let times: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let values = vec![0.0; 20];
        assert!(matches!(fit_exponential(&times, &values), Err(KerrError::Fit(_))));
    }

    #[test]
    fn exponential_with_offset() {
        let times: Vec<f64> = (0..80).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = times.iter().map(|&t| -2.0 * (-t / 1.7).exp() + 0.4).collect();
        let fit = fit_exponential(&times, &values).unwrap();
        assert!((fit.tau - 1.7).abs() < 1e-6);
        assert!((fit.offset - 0.4).abs() < 1e-7);
        assert!((fit.amplitude + 2.0).abs() < 1e-6);
    }

    #[test]
    fn damped_cosine_recovery() {
        let times: Vec<f64> = (0..400).map(|i| i as f64 * 0.05).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|&t| 1.8 * (-t / 6.0).exp() * (3.1 * t + 0.4).cos() - 0.1)
            .collect();
        let fit = fit_damped_cosine(&times, &values).unwrap();
        assert!((fit.omega - 3.1).abs() < 1e-6, "omega = {}", fit.omega);
        assert!((fit.tau - 6.0).abs() / 6.0 < 1e-5, "tau = {}", fit.tau);
        assert!((fit.offset + 0.1).abs() < 1e-6);
    }

    #[test]
    fn damped_cosine_flat_rejected() {
        let times: Vec<f64> = (0..64).map(|i| i as f64 * 0.05).collect();
        let values = vec![0.3; 64];
        assert!(matches!(fit_damped_cosine(&times, &values), Err(KerrError::Fit(_))));
    }
}
