//! Parity-resolved spectra of the squeezed Kerr Hamiltonian: tunnel
//! splittings, excitation gaps, spectral-kissing detection, semiclassical
//! action quantization, and the dissipative (no-jump) well geometry.

use crate::error::{KerrError, Result};
use crate::fock::{annihilation, number, HilbertSpace, Ket, Operator, Parity};
use crate::numerics;
use crate::C64;
use faer::Mat;
use std::f64::consts::PI;

/// Parameters of H/ħ = −Δ a†a − K a†²a² + ε₂ (a†² + a²), with optional
/// higher-order terms −λ a†³a³ + ε₄ a†⁴ + ε₄* a⁴ + ε₂′ a†³a + ε₂′* a†a³.
///
/// The canonical gauge has ε₂ real ≥ 0; arbitrary squeezing phases are
/// handled by rotating a → a e^{i arg(ε₂)/2} before construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SKParams {
    pub delta: f64,
    pub kerr: f64,
    pub eps2: f64,
    pub lambda: Option<f64>,
    pub eps4: Option<C64>,
    pub eps2_prime: Option<C64>,
}

impl SKParams {
    pub fn new(delta: f64, kerr: f64, eps2: f64) -> Result<Self> {
        if kerr <= 0.0 {
            return Err(KerrError::Config(format!("kerr must be > 0, got {kerr}")));
        }
        if eps2 < 0.0 {
            return Err(KerrError::Config(format!(
                "eps2 must be >= 0 in the canonical gauge, got {eps2}"
            )));
        }
        Ok(Self { delta, kerr, eps2, lambda: None, eps4: None, eps2_prime: None })
    }

    /// Mean photon number of the Hamiltonian wells, |α|² = ε₂/K.
    pub fn alpha2(&self) -> f64 {
        self.eps2 / self.kerr
    }
}

/// One eigenlevel in excitation order.
#[derive(Debug, Clone, Copy)]
pub struct Level {
    /// Raw eigenvalue of H (rad/s). Within the double well these decrease
    /// with excitation index: the cat manifold sits at the top.
    pub energy: f64,
    pub parity: Parity,
    /// Excitation index inside the parity sector (0 = cat-manifold member).
    pub index_in_parity: usize,
}

/// Even/odd pair with its tunnel splitting δ_n = ω_n⁺ − ω_n⁻.
#[derive(Debug, Clone, Copy)]
pub struct PairSplitting {
    pub n: usize,
    pub e_plus: f64,
    pub e_minus: f64,
    pub delta_n: f64,
}

/// Result of a parity-resolved diagonalization.
///
/// Levels and pairs are listed in excitation order counted from the cat
/// manifold: the n-th entry of each parity sector is the n-th eigenvalue in
/// descending order (the Kerr term −K a†²a² makes excited well states sink
/// below the ground pair). δ_n is reported with sign.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub params: SKParams,
    pub levels: Vec<Level>,
    pub pairs: Vec<PairSplitting>,
    pub eigenkets_plus: Vec<Ket>,
    pub eigenkets_minus: Vec<Ket>,
}

impl SpectrumResult {
    pub fn delta_n(&self, n: usize) -> Option<f64> {
        self.pairs.get(n).map(|p| p.delta_n)
    }
}

/// Assemble H on the truncated space. The result commutes exactly with
/// parity (all terms are even in the ladder operators).
pub fn build_hamiltonian(params: &SKParams, space: HilbertSpace) -> Result<Operator> {
    let d = space.dim();
    if (params.alpha2() * 4.0).ceil() as usize > d {
        return Err(KerrError::Truncation(format!(
            "dim {} too small for eps2/kerr = {:.2} (need >= {})",
            d,
            params.alpha2(),
            (params.alpha2() * 4.0).ceil() as usize
        )));
    }
    let a = annihilation(space);
    let ad = a.dagger();
    let a2 = a.mul(&a);
    let ad2 = a2.dagger();
    let n = number(space);

    let re = |x: f64| C64::new(x, 0.0);
    // −Δ n − K a†²a² + ε₂(a†² + a²)
    let mut h = n
        .scale(re(-params.delta))
        .add(&ad2.mul(&a2).scale(re(-params.kerr)))
        .add(&ad2.add(&a2).scale(re(params.eps2)));
    if let Some(lambda) = params.lambda {
        let a3 = a2.mul(&a);
        let ad3 = a3.dagger();
        h = h.add(&ad3.mul(&a3).scale(re(-lambda)));
    }
    if let Some(eps4) = params.eps4 {
        let a4 = a2.mul(&a2);
        let ad4 = a4.dagger();
        h = h.add(&ad4.scale(eps4)).add(&a4.scale(eps4.conj()));
    }
    if let Some(ep) = params.eps2_prime {
        let a3 = a2.mul(&a);
        let ad3 = a3.dagger();
        // ε₂′ a†³a + ε₂′* a†a³
        h = h.add(&ad3.mul(&a).scale(ep)).add(&ad.mul(&a3).scale(ep.conj()));
    }
    Ok(h)
}

/// Diagonalize per parity sector and pair the n-th even level with the n-th
/// odd level (excitation order from the cat manifold). Eigenkets are
/// phase-fixed so the largest-magnitude Fock coefficient is real positive,
/// which makes every coefficient real for real (Δ, K, ε₂).
pub fn diagonalize(params: &SKParams, space: HilbertSpace) -> Result<SpectrumResult> {
    let h = build_hamiltonian(params, space)?;
    let d = space.dim();
    let sector = |offset: usize| -> Result<(Vec<f64>, Vec<Ket>)> {
        let idx: Vec<usize> = (offset..d).step_by(2).collect();
        let k = idx.len();
        let block = Mat::<C64>::from_fn(k, k, |i, j| h.get(idx[i], idx[j]));
        let (vals, vecs) = numerics::hermitian_eigen(&block)?;
        // excitation order: descending eigenvalue
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
        let mut energies = Vec::with_capacity(k);
        let mut kets = Vec::with_capacity(k);
        for &col in &order {
            energies.push(vals[col]);
            let mut amps = vec![C64::new(0.0, 0.0); d];
            for (row, &fock) in idx.iter().enumerate() {
                amps[fock] = vecs[(row, col)];
            }
            // phase fix
            let mut imax = 0;
            let mut best = 0.0;
            for (i, c) in amps.iter().enumerate() {
                if c.norm() > best {
                    best = c.norm();
                    imax = i;
                }
            }
            let phase = amps[imax] / C64::new(amps[imax].norm(), 0.0);
            let fixed: Vec<C64> = amps.iter().map(|c| c * phase.conj()).collect();
            kets.push(Ket::from_amplitudes(space, fixed)?);
        }
        Ok((energies, kets))
    };
    let (ep, kp) = sector(0)?;
    let (em, km) = sector(1)?;

    let n_pairs = ep.len().min(em.len());
    let pairs: Vec<PairSplitting> = (0..n_pairs)
        .map(|n| PairSplitting { n, e_plus: ep[n], e_minus: em[n], delta_n: ep[n] - em[n] })
        .collect();

    let mut levels: Vec<Level> = Vec::with_capacity(d);
    for (i, &e) in ep.iter().enumerate() {
        levels.push(Level { energy: e, parity: Parity::Even, index_in_parity: i });
    }
    for (i, &e) in em.iter().enumerate() {
        levels.push(Level { energy: e, parity: Parity::Odd, index_in_parity: i });
    }
    levels.sort_by(|a, b| b.energy.partial_cmp(&a.energy).unwrap());

    Ok(SpectrumResult { params: *params, levels, pairs, eigenkets_plus: kp, eigenkets_minus: km })
}

/// Excitation gap between the cat manifold and the first excited pair.
#[derive(Debug, Clone, Copy)]
pub struct GapResult {
    /// Mean of the two parity-sector gaps E₀ − E₁ (positive).
    pub gap: f64,
    /// (even-sector gap, odd-sector gap).
    pub per_parity: (f64, f64),
    /// Asymptotic estimate 4K|α|².
    pub asymptotic: f64,
}

pub fn excitation_gap(params: &SKParams, space: HilbertSpace) -> Result<GapResult> {
    let spec = diagonalize(params, space)?;
    if spec.eigenkets_plus.len() < 2 || spec.eigenkets_minus.len() < 2 {
        return Err(KerrError::Dimension(space.dim()));
    }
    let ge = spec.pairs[0].e_plus - spec.pairs[1].e_plus;
    let go = spec.pairs[0].e_minus - spec.pairs[1].e_minus;
    Ok(GapResult {
        gap: 0.5 * (ge + go),
        per_parity: (ge, go),
        asymptotic: 4.0 * params.kerr * params.alpha2(),
    })
}

/// Semiclassical bound-state count N = ε₂/(πK) − Δ/(8K).
pub fn bohr_count(params: &SKParams) -> f64 {
    params.eps2 / (PI * params.kerr) - params.delta / (8.0 * params.kerr)
}

/// Area (in units of 2πħ) of the tear-drop separatrix loop of the classical
/// Hamiltonian H_cl = −(Δ/2)(x²+p²) − (K/4)(x²+p²)² + ε₂(x²−p²).
///
/// The E = 0 contour is traced from the saddle at the origin by
/// predictor-corrector marching (tangent step + Newton projection back onto
/// the level set); the enclosed area follows from Green's theorem. Errors
/// with [`KerrError::NoWell`] outside the double-well regime (requires
/// ε₂ > |Δ|/2 so the origin is a saddle).
pub fn lemniscate_area(params: &SKParams) -> Result<f64> {
    let (dl, k, e2) = (params.delta, params.kerr, params.eps2);
    if e2 <= 0.0 || e2 <= dl / 2.0 || e2 <= -dl / 2.0 {
        return Err(KerrError::NoWell(format!(
            "eps2 = {e2}, delta = {dl}: origin is not a saddle of the metapotential"
        )));
    }
    let h = |x: f64, p: f64| -> f64 {
        let r2 = x * x + p * p;
        -0.5 * dl * r2 - 0.25 * k * r2 * r2 + e2 * (x * x - p * p)
    };
    let grad = |x: f64, p: f64| -> (f64, f64) {
        let r2 = x * x + p * p;
        (-dl * x - k * r2 * x + 2.0 * e2 * x, -dl * p - k * r2 * p - 2.0 * e2 * p)
    };

    // separatrix branch slope at the origin: p = ±σ x
    let sigma = ((e2 - dl / 2.0) / (e2 + dl / 2.0)).sqrt();
    let loop_extent = ((4.0 * e2 - 2.0 * dl) / k).sqrt();
    let s0 = 1e-7 * loop_extent;
    let dir = {
        let norm = (1.0 + sigma * sigma).sqrt();
        (1.0 / norm, sigma / norm)
    };
    let (mut x, mut p) = (s0 * dir.0, s0 * dir.1);

    // Newton projection onto H = 0 along the gradient
    let project = |x: &mut f64, p: &mut f64| {
        for _ in 0..6 {
            let f = h(*x, *p);
            let (gx, gp) = grad(*x, *p);
            let g2 = gx * gx + gp * gp;
            if g2 < 1e-30 {
                break;
            }
            let step = f / g2;
            *x -= step * gx;
            *p -= step * gp;
            if f.abs() < 1e-14 * (e2 * loop_extent * loop_extent) {
                break;
            }
        }
    };
    project(&mut x, &mut p);

    let n_steps = 80_000usize;
    let step = 1.2 * PI * loop_extent / n_steps as f64; // generous perimeter bound
    let mut area = 0.0; // Green's theorem: A = ½ ∮ (x dp − p dx)
    let mut left_origin = false;
    // march with tangent continuity; start pointing away from the saddle
    let (mut tx_prev, mut tp_prev) = dir;
    for _ in 0..n_steps * 2 {
        let (gx, gp) = grad(x, p);
        let gn = (gx * gx + gp * gp).sqrt();
        if gn < 1e-30 {
            break;
        }
        let (mut tx, mut tp) = (gp / gn, -gx / gn);
        if tx * tx_prev + tp * tp_prev < 0.0 {
            tx = -tx;
            tp = -tp;
        }
        let (mut xn, mut pn) = (x + tx * step, p + tp * step);
        project(&mut xn, &mut pn);
        area += 0.5 * (x * pn - xn * p);
        let r = (xn * xn + pn * pn).sqrt();
        if !left_origin && r > 20.0 * s0 + 4.0 * step {
            left_origin = true;
        }
        x = xn;
        p = pn;
        tx_prev = tx;
        tp_prev = tp;
        if left_origin && r < 2.0 * step && p < 0.0 {
            break;
        }
    }
    // closing legs through the saddle contribute nothing to ∮(x dp − p dx)
    Ok(area.abs() / (2.0 * PI))
}

/// Spectral-kissing points located from a sweep of splittings.
///
/// For kiss index n (1-based) the locator finds the inflection — the zero of
/// the discrete second derivative, the point of maximal rate of approach —
/// of the splitting curve that collapses as the wells grow to hold n+1
/// states, i.e. the kiss of index n sits at the semiclassical capture value
/// ε₂/K ≈ π(n+1). Returns (n, ε₂/K at kiss).
pub fn kissing_points(
    sweep: &[f64],
    template: &SKParams,
    n_pairs: usize,
    space: HilbertSpace,
) -> Result<Vec<(usize, f64)>> {
    if sweep.len() < 2 {
        return Err(KerrError::Config("kissing sweep needs >= 2 points".into()));
    }
    let span = sweep[sweep.len() - 1] - sweep[0];
    if span <= 0.0 || (sweep.len() as f64 - 1.0) / span < 8.0 {
        return Err(KerrError::Config(
            "kissing sweep must be monotone with >= 8 points per unit eps2/K".into(),
        ));
    }
    // splitting curves δ_m(ε₂) for m = 2..n_pairs+1
    let mut curves: Vec<Vec<f64>> = vec![Vec::with_capacity(sweep.len()); n_pairs];
    for &e2k in sweep {
        let p = SKParams { eps2: e2k * template.kerr, ..*template };
        let spec = diagonalize(&p, space)?;
        for n in 1..=n_pairs {
            let m = n + 1;
            let d = spec
                .delta_n(m)
                .ok_or_else(|| KerrError::Dimension(space.dim()))?;
            curves[n - 1].push(d.abs());
        }
    }
    let mut out = Vec::with_capacity(n_pairs);
    for (i, curve) in curves.iter().enumerate() {
        let n = i + 1;
        let kiss = inflection_point(sweep, curve).ok_or_else(|| {
            KerrError::NotFound(format!(
                "no second-derivative sign change for kiss {n} in sweep range"
            ))
        })?;
        out.push((n, kiss));
    }
    Ok(out)
}

/// Zero of the discrete second derivative (− → + crossing while the curve
/// falls), refined by linear interpolation between the bracketing nodes.
fn inflection_point(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let m = xs.len();
    if m < 5 {
        return None;
    }
    let d2: Vec<f64> = (1..m - 1)
        .map(|i| {
            let hl = xs[i] - xs[i - 1];
            let hr = xs[i + 1] - xs[i];
            2.0 * (hl * ys[i + 1] - (hl + hr) * ys[i] + hr * ys[i - 1]) / (hl * hr * (hl + hr))
        })
        .collect();
    for i in 1..d2.len() {
        let falling = ys[i + 1] < ys[i.saturating_sub(1)];
        if falling && d2[i - 1] < 0.0 && d2[i] >= 0.0 {
            let frac = d2[i - 1] / (d2[i - 1] - d2[i]);
            return Some(xs[i] + frac * (xs[i + 1] - xs[i]));
        }
    }
    None
}

/// Centers of the dissipative (no-jump) eigenstates: returns (|α̃|², sin 2φ̃)
/// for generalized detuning Δ̃ = Δ + iκ₁/2 and Kerr K̃ = K + iκ₂/2, taking
/// the + branch.
pub fn nojump_wells(params: &SKParams, kappa1: f64, kappa2: f64) -> Result<(f64, f64)> {
    let (dl, k, e2) = (params.delta, params.kerr, params.eps2);
    if e2 * e2 < (dl * dl + kappa1 * kappa1 / 4.0) / 4.0 {
        return Err(KerrError::BelowThreshold);
    }
    let ktilde_sq = k * k + kappa2 * kappa2 / 4.0;
    let arg = e2 * e2 / ktilde_sq
        - ((k * kappa1 - dl * kappa2) / (4.0 * ktilde_sq)).powi(2);
    if arg < 0.0 {
        return Err(KerrError::BelowThreshold);
    }
    let alpha2 = (-dl * k + kappa1 * kappa2 / 4.0) / (2.0 * ktilde_sq) + arg.sqrt();
    let sin_2phi = if e2 > 0.0 {
        (k * kappa1 - dl * kappa2) / (4.0 * e2 * ktilde_sq.sqrt())
    } else {
        0.0
    };
    Ok((alpha2, sin_2phi))
}
