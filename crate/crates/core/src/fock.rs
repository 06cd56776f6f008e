//! Truncated Fock-space linear algebra: operators, states, cat-qubit algebra,
//! and Wigner transforms.
//!
//! Conventions. The bosonic mode is truncated to `dim` Fock levels. The
//! quadratures are x = (a + a†)/√2, p = i(a† − a)/√2, so [x, p] = i and a
//! coherent state |α⟩ sits at (x, p) = √2 (Re α, Im α). Wigner functions are
//! normalized as ∬ W dx dp = 1, which bounds |W| ≤ 1/π. Literature working in
//! the α-plane convention (∬ W d²α = 1, bound 2/π) differs by a factor of 2
//! in magnitude and √2 in coordinates; see [`wigner_of`].

use crate::error::{KerrError, Result};
use crate::numerics;
use crate::C64;
use faer::Mat;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Truncated Fock space holding `dim` levels |0⟩..|dim-1⟩.
///
/// Every operator and state carries its space; arithmetic between objects on
/// different spaces panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    dim: usize,
}

impl HilbertSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(KerrError::Dimension(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Photon-number parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(&self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Dense complex operator on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct Operator {
    space: HilbertSpace,
    m: Mat<C64>,
}

impl Operator {
    pub fn from_matrix(space: HilbertSpace, m: Mat<C64>) -> Self {
        assert_eq!(m.nrows(), space.dim(), "operator rows must match dim");
        assert_eq!(m.ncols(), space.dim(), "operator cols must match dim");
        Self { space, m }
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        Self { space, m: Mat::zeros(space.dim(), space.dim()) }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self { space, m: Mat::from_fn(d, d, |i, j| if i == j { ONE } else { ZERO }) }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.m
    }

    pub fn matrix_mut(&mut self) -> &mut Mat<C64> {
        &mut self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn dagger(&self) -> Operator {
        let d = self.space.dim();
        Operator { space: self.space, m: Mat::from_fn(d, d, |i, j| self.m[(j, i)].conj()) }
    }

    pub fn mul(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator product across spaces");
        Operator { space: self.space, m: &self.m * &rhs.m }
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator sum across spaces");
        Operator { space: self.space, m: &self.m + &rhs.m }
    }

    pub fn sub(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator difference across spaces");
        Operator { space: self.space, m: &self.m - &rhs.m }
    }

    pub fn scale(&self, s: C64) -> Operator {
        let d = self.space.dim();
        Operator { space: self.space, m: Mat::from_fn(d, d, |i, j| self.m[(i, j)] * s) }
    }

    pub fn commutator(&self, rhs: &Operator) -> Operator {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Apply to a ket.
    pub fn apply(&self, ket: &Ket) -> Ket {
        assert_eq!(self.space, ket.space, "operator applied across spaces");
        let d = self.space.dim();
        let mut amps = vec![ZERO; d];
        for i in 0..d {
            let mut s = ZERO;
            for j in 0..d {
                s += self.m[(i, j)] * ket.amps[j];
            }
            amps[i] = s;
        }
        Ket { space: self.space, amps }
    }

    pub fn trace(&self) -> C64 {
        (0..self.space.dim()).map(|i| self.m[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        let d = self.space.dim();
        let mut m = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                m = m.max(self.m[(i, j)].norm());
            }
        }
        m
    }

    /// Max |M - M†| against `tol * max|M|`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let d = self.space.dim();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        worst < rel_tol * scale
    }
}

/// Annihilation operator: (a)_{n-1,n} = √n.
pub fn annihilation(space: HilbertSpace) -> Operator {
    let d = space.dim();
    let mut m = Mat::<C64>::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator { space, m }
}

/// Creation operator a†.
pub fn creation(space: HilbertSpace) -> Operator {
    annihilation(space).dagger()
}

/// Number operator a†a (diagonal 0..dim-1, exact).
pub fn number(space: HilbertSpace) -> Operator {
    let d = space.dim();
    let mut m = Mat::<C64>::zeros(d, d);
    for n in 0..d {
        m[(n, n)] = C64::new(n as f64, 0.0);
    }
    Operator { space, m }
}

/// Photon-number parity P = (−1)^{a†a}.
pub fn parity_op(space: HilbertSpace) -> Operator {
    let d = space.dim();
    let mut m = Mat::<C64>::zeros(d, d);
    for n in 0..d {
        m[(n, n)] = C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Operator { space, m }
}

/// Pure state on a truncated Fock space; normalized on construction.
#[derive(Debug, Clone)]
pub struct Ket {
    space: HilbertSpace,
    amps: Vec<C64>,
}

impl Ket {
    /// Normalize and wrap raw amplitudes.
    pub fn from_amplitudes(space: HilbertSpace, amps: Vec<C64>) -> Result<Self> {
        assert_eq!(amps.len(), space.dim(), "amplitude count must match dim");
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(KerrError::Shape("cannot normalize zero vector".into()));
        }
        let amps = amps.into_iter().map(|c| c / norm).collect();
        Ok(Self { space, amps })
    }

    pub fn fock(space: HilbertSpace, n: usize) -> Ket {
        assert!(n < space.dim(), "fock index beyond truncation");
        let mut amps = vec![ZERO; space.dim()];
        amps[n] = ONE;
        Ket { space, amps }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.space, other.space, "inner product across spaces");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn expectation(&self, op: &Operator) -> C64 {
        self.inner(&op.apply(self))
    }

    /// Dyad |self⟩⟨other|.
    pub fn outer(&self, other: &Ket) -> Operator {
        assert_eq!(self.space, other.space, "outer product across spaces");
        let d = self.space.dim();
        Operator {
            space: self.space,
            m: Mat::from_fn(d, d, |i, j| self.amps[i] * other.amps[j].conj()),
        }
    }
}

/// Coherent state |α⟩, amplitudes ∝ αⁿ/√n!.
///
/// Guard: requires |α|² ≤ dim/4 so the Poisson tail beyond the truncation is
/// at least a few standard deviations out.
pub fn coherent(space: HilbertSpace, alpha: C64) -> Result<Ket> {
    let d = space.dim();
    if alpha.norm_sqr() > d as f64 / 4.0 {
        return Err(KerrError::Truncation(format!(
            "|alpha|^2 = {:.3} exceeds dim/4 = {:.3}",
            alpha.norm_sqr(),
            d as f64 / 4.0
        )));
    }
    let mut amps = vec![ZERO; d];
    amps[0] = ONE;
    for n in 1..d {
        amps[n] = amps[n - 1] * alpha / C64::new((n as f64).sqrt(), 0.0);
    }
    Ket::from_amplitudes(space, amps)
}

/// Cat state N±(|α⟩ ± |−α⟩), built directly from the even/odd amplitude mask
/// so parity purity is exact.
pub fn cat(space: HilbertSpace, alpha: C64, parity: Parity) -> Result<Ket> {
    let base = coherent(space, alpha)?;
    let keep = match parity {
        Parity::Even => 0usize,
        Parity::Odd => 1usize,
    };
    let mut amps = vec![ZERO; space.dim()];
    for (n, amp) in base.amps.iter().enumerate() {
        if n % 2 == keep {
            amps[n] = *amp;
        }
    }
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(KerrError::DegenerateCat(alpha.norm()));
    }
    Ket::from_amplitudes(space, amps)
}

/// Even/odd normalization constants N±² = 1/(2(1 ± e^{−2|α|²})) and their
/// ratio r = N+/N−.
pub fn cat_norms(alpha: C64) -> (f64, f64, f64) {
    let q = (-2.0 * alpha.norm_sqr()).exp();
    let np = 1.0 / (2.0 * (1.0 + q)).sqrt();
    let nm = 1.0 / (2.0 * (1.0 - q)).sqrt();
    (np, nm, np / nm)
}

/// The six cardinal states of the Kerr-cat Bloch sphere.
///
/// |±Z⟩ = N±(|α⟩ ± |−α⟩), |±X⟩ = (|+Z⟩ ± |−Z⟩)/√2, |±Y⟩ = (|+Z⟩ ± i|−Z⟩)/√2.
#[derive(Debug, Clone)]
pub struct CatQubitBasis {
    pub alpha: C64,
    pub plus_z: Ket,
    pub minus_z: Ket,
    pub plus_x: Ket,
    pub minus_x: Ket,
    pub plus_y: Ket,
    pub minus_y: Ket,
    /// Even-cat normalization N+.
    pub norm_plus: f64,
    /// Odd-cat normalization N−.
    pub norm_minus: f64,
    /// r = N+/N− = √((1 − e^{−2|α|²})/(1 + e^{−2|α|²})).
    pub ratio: f64,
}

impl CatQubitBasis {
    pub fn new(space: HilbertSpace, alpha: C64) -> Result<Self> {
        let cp = cat(space, alpha, Parity::Even)?;
        let cm = cat(space, alpha, Parity::Odd)?;
        let (np, nm, r) = cat_norms(alpha);
        let mix = |a: C64, b: C64| -> Result<Ket> {
            let amps = cp
                .amplitudes()
                .iter()
                .zip(cm.amplitudes())
                .map(|(x, y)| a * x + b * y)
                .collect();
            Ket::from_amplitudes(space, amps)
        };
        let inv_sqrt2 = C64::new(1.0 / 2f64.sqrt(), 0.0);
        Ok(Self {
            alpha,
            plus_x: mix(inv_sqrt2, inv_sqrt2)?,
            minus_x: mix(inv_sqrt2, -inv_sqrt2)?,
            plus_y: mix(inv_sqrt2, C64::new(0.0, 1.0) * inv_sqrt2)?,
            minus_y: mix(inv_sqrt2, C64::new(0.0, -1.0) * inv_sqrt2)?,
            plus_z: cp,
            minus_z: cm,
            norm_plus: np,
            norm_minus: nm,
            ratio: r,
        })
    }
}

/// Cat-qubit Pauli operators built from the cat dyads:
/// X = |C+⟩⟨C−| + |C−⟩⟨C+|, Y = −i|C+⟩⟨C−| + i|C−⟩⟨C+|,
/// Z = |C+⟩⟨C+| − |C−⟩⟨C−|.
pub fn cat_pauli(space: HilbertSpace, alpha: C64) -> Result<(Operator, Operator, Operator)> {
    let cp = cat(space, alpha, Parity::Even)?;
    let cm = cat(space, alpha, Parity::Odd)?;
    let pm = cp.outer(&cm);
    let mp = cm.outer(&cp);
    let x = pm.add(&mp);
    let y = pm.scale(C64::new(0.0, -1.0)).add(&mp.scale(C64::new(0.0, 1.0)));
    let z = cp.outer(&cp).sub(&cm.outer(&cm));
    Ok((x, y, z))
}

/// Density matrix with validated Hermiticity, unit trace and positivity.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: HilbertSpace,
    m: Mat<C64>,
}

impl DensityMatrix {
    /// Validates: Hermitian within 1e-10 (relative), trace 1 within 1e-8,
    /// smallest eigenvalue ≥ −1e-8.
    pub fn from_matrix(space: HilbertSpace, m: Mat<C64>) -> Result<Self> {
        assert_eq!(m.nrows(), space.dim(), "density-matrix rows must match dim");
        assert_eq!(m.ncols(), space.dim(), "density-matrix cols must match dim");
        let op = Operator { space, m };
        if !op.is_hermitian(1e-10) {
            return Err(KerrError::Shape("density matrix not Hermitian within 1e-10".into()));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > 1e-8 {
            return Err(KerrError::Shape(format!("trace = {} not 1 within 1e-8", tr)));
        }
        let evals = numerics::hermitian_eigenvalues(&op.m)?;
        if let Some(min) = evals.first() {
            if *min < -1e-8 {
                return Err(KerrError::Shape(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { space: op.space, m: op.m })
    }

    /// |ψ⟩⟨ψ| without re-validation (pure states satisfy the invariants by
    /// construction).
    pub fn pure(ket: &Ket) -> Self {
        let op = ket.outer(ket);
        Self { space: op.space, m: op.m }
    }

    /// Thermal state with mean occupation `n_th` (diagonal geometric
    /// distribution, renormalized on the truncated space).
    pub fn thermal(space: HilbertSpace, n_th: f64) -> Self {
        let d = space.dim();
        let mut m = Mat::<C64>::zeros(d, d);
        if n_th <= 0.0 {
            m[(0, 0)] = ONE;
        } else {
            let ratio = n_th / (1.0 + n_th);
            let mut w = 1.0;
            let mut total = 0.0;
            for n in 0..d {
                m[(n, n)] = C64::new(w, 0.0);
                total += w;
                w *= ratio;
            }
            for n in 0..d {
                m[(n, n)] /= C64::new(total, 0.0);
            }
        }
        Self { space, m }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.m
    }

    pub fn trace(&self) -> C64 {
        (0..self.space.dim()).map(|i| self.m[(i, i)]).sum()
    }

    pub fn purity(&self) -> f64 {
        let d = self.space.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (self.m[(i, j)] * self.m[(j, i)]).re;
            }
        }
        s
    }

    pub fn expectation(&self, op: &Operator) -> C64 {
        assert_eq!(self.space, op.space, "expectation across spaces");
        let d = self.space.dim();
        let mut s = ZERO;
        for i in 0..d {
            for j in 0..d {
                s += op.m[(i, j)] * self.m[(j, i)];
            }
        }
        s
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.space.dim()).map(|n| n as f64 * self.m[(n, n)].re).sum()
    }
}

/// Rectangular phase-space grid with Wigner values W(x, p).
///
/// `values[ip][ix]` corresponds to (xs[ix], ps[ip]).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    /// Uniform square grid over [-extent, extent]² with n points per axis.
    pub fn axes(extent: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        assert!(n >= 2, "grid needs at least two points per axis");
        let step = 2.0 * extent / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| -extent + i as f64 * step).collect();
        (xs.clone(), xs)
    }

    /// Trapezoid ∬ W dx dp.
    pub fn integral(&self) -> f64 {
        numerics::trapezoid_2d(&self.xs, &self.ps, &self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Matrix elements ⟨m|D(λ)|n⟩ of the displacement operator on the truncated
/// space, evaluated from the exact infinite-space expressions (associated
/// Laguerre recurrence, log-scaled seeds). Exact for traces against operators
/// supported on the truncation.
pub fn displacement_elements(dim: usize, lambda: C64) -> Mat<C64> {
    let mut d = Mat::<C64>::zeros(dim, dim);
    if lambda.norm() == 0.0 {
        for i in 0..dim {
            d[(i, i)] = ONE;
        }
        return d;
    }
    let lnfact = numerics::ln_factorial_table(dim);
    fill_lower_displacement(&mut d, dim, lambda, &lnfact);
    // upper triangle from <m|D(λ)|n> = conj(<n|D(−λ)|m>)
    let mut dm = Mat::<C64>::zeros(dim, dim);
    fill_lower_displacement(&mut dm, dim, -lambda, &lnfact);
    for m in 0..dim {
        for n in (m + 1)..dim {
            d[(m, n)] = dm[(n, m)].conj();
        }
    }
    d
}

fn fill_lower_displacement(d: &mut Mat<C64>, dim: usize, lambda: C64, lnfact: &[f64]) {
    let z = lambda.norm_sqr();
    let phase = lambda / C64::new(lambda.norm(), 0.0);
    for k in 0..dim {
        // seed u_0 = <k|D|0> = λ^k/√(k!) e^{−z/2}, kept in log form to avoid
        // overflow at large |λ|
        let ln_mag = k as f64 * lambda.norm().ln() - 0.5 * lnfact[k] - z / 2.0;
        let mut u_prev = phase.powu(k as u32) * C64::new(ln_mag.exp(), 0.0);
        d[(k, 0)] = u_prev;
        let mut u_pprev = ZERO;
        for n in 0..dim.saturating_sub(k + 1) {
            let nf = n as f64;
            let kf = k as f64;
            let c1 = ((nf + 1.0) / (nf + kf + 1.0)).sqrt() * (2.0 * nf + 1.0 + kf - z)
                / (nf + 1.0);
            let c2 = if n > 0 {
                ((nf + 1.0) * nf / ((nf + kf + 1.0) * (nf + kf))).sqrt() * (nf + kf)
                    / (nf + 1.0)
            } else {
                0.0
            };
            let u_next = u_prev * C64::new(c1, 0.0) - u_pprev * C64::new(c2, 0.0);
            d[(n + 1 + k, n + 1)] = u_next;
            u_pprev = u_prev;
            u_prev = u_next;
        }
    }
}

/// Wigner function of `state` on `grid` points via displaced-parity
/// evaluation: W(x, p) = (1/π) Tr[ρ D(β) P D†(β)] with β = (x + ip)/√2,
/// computed through the identity D(β)PD†(β) = D(2β)P.
///
/// Normalization ∬ W dx dp = 1 and |W| ≤ 1/π. Multiply by 2 (and rescale
/// coordinates by 1/√2) to convert to the α-plane convention with bound 2/π.
///
/// Errors with [`KerrError::Grid`] when the grid spacing cannot resolve the
/// fastest interference fringes of the state (period π/√(2 n̄) along a
/// quadrature for mean photon number n̄).
pub fn wigner_of(state: &DensityMatrix, xs: &[f64], ps: &[f64]) -> Result<WignerGrid> {
    let dim = state.space.dim();
    let nbar = state.mean_photon_number().max(0.0);
    let fringe = std::f64::consts::PI / (2.0 * nbar + 2.0).sqrt();
    let max_step = |v: &[f64]| -> f64 {
        v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0f64, f64::max)
    };
    let step = max_step(xs).max(max_step(ps));
    if step > fringe / 2.0 {
        return Err(KerrError::Grid(format!(
            "spacing {step:.3} exceeds half the fringe period {fringe:.3}"
        )));
    }
    let signs: Vec<f64> = (0..dim).map(|m| if m % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let inv_pi = 1.0 / std::f64::consts::PI;
    let mut values = vec![vec![0.0; xs.len()]; ps.len()];
    for (ip, &p) in ps.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            let lambda = C64::new(x, p) * C64::new(2f64.sqrt(), 0.0);
            let d = displacement_elements(dim, lambda);
            let mut w = 0.0;
            for m in 0..dim {
                for n in 0..dim {
                    w += (state.m[(m, n)] * d[(n, m)]).re * signs[m];
                }
            }
            values[ip][ix] = w * inv_pi;
        }
    }
    Ok(WignerGrid { xs: xs.to_vec(), ps: ps.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(d: usize) -> HilbertSpace {
        HilbertSpace::new(d).unwrap()
    }

    #[test]
    fn annihilation_small_dims() {
        let a2 = annihilation(space(2));
        assert_eq!(a2.get(0, 1), ONE);
        assert_eq!(a2.get(0, 0), ZERO);
        assert_eq!(a2.get(1, 0), ZERO);
        assert_eq!(a2.get(1, 1), ZERO);
        let a3 = annihilation(space(3));
        assert_eq!(a3.get(0, 1), ONE);
        assert!((a3.get(1, 2) - C64::new(2f64.sqrt(), 0.0)).norm() == 0.0);
    }

    #[test]
    fn ladder_commutator_truncation_corner() {
        // direct matrix-multiplication oracle for [a, a†]
        let s = space(7);
        let a = annihilation(s);
        let comm = a.commutator(&a.dagger());
        for i in 0..6 {
            assert!((comm.get(i, i) - ONE).norm() < 1e-14);
        }
        assert!((comm.get(6, 6) - C64::new(-6.0, 0.0)).norm() < 1e-12);
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    assert_eq!(comm.get(i, j), ZERO);
                }
            }
        }
    }

    #[test]
    fn number_operator_diagonal_exact() {
        let s = space(9);
        let n = number(s);
        let built = annihilation(s).dagger().mul(&annihilation(s));
        for i in 0..9 {
            for j in 0..9 {
                assert!((n.get(i, j) - built.get(i, j)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn parity_commutes_with_quadratic_ops_exactly() {
        let s = space(14);
        let p = parity_op(s);
        let a = annihilation(s);
        let a2 = a.mul(&a);
        let ad2 = a2.dagger();
        let n = number(s);
        for op in [&a2, &ad2, &n] {
            let c = p.commutator(op);
            assert_eq!(c.max_abs(), 0.0, "parity must commute exactly");
        }
    }

    #[test]
    fn coherent_vacuum_and_mean_photon() {
        let s = space(40);
        let v = coherent(s, ZERO).unwrap();
        assert!((v.amplitudes()[0] - ONE).norm() < 1e-15);
        let c = coherent(s, C64::new(2.0, 0.0)).unwrap();
        let nbar = c.expectation(&number(s)).re;
        assert!((nbar - 4.0).abs() < 1e-6, "nbar = {nbar}");
    }

    #[test]
    fn coherent_overlap_analytic() {
        let s = space(60);
        let al = C64::new(1.5, 0.0);
        let plus = coherent(s, al).unwrap();
        let minus = coherent(s, -al).unwrap();
        let overlap = minus.inner(&plus).re;
        let expected = (-2.0 * al.norm_sqr()).exp();
        assert!((overlap - expected).abs() < 1e-8);
    }

    #[test]
    fn coherent_truncation_guard() {
        let s = space(8);
        assert!(matches!(coherent(s, C64::new(1.5, 0.0)), Err(KerrError::Truncation(_))));
    }

    #[test]
    fn cat_limits_and_parity() {
        let s = space(30);
        let even0 = cat(s, ZERO, Parity::Even).unwrap();
        assert!((even0.amplitudes()[0] - ONE).norm() < 1e-14);
        assert!(matches!(cat(s, ZERO, Parity::Odd), Err(KerrError::DegenerateCat(_))));

        let al = C64::new(2.0, 0.0);
        let p = parity_op(s);
        let even = cat(s, al, Parity::Even).unwrap();
        let odd = cat(s, al, Parity::Odd).unwrap();
        assert!((even.expectation(&p).re - 1.0).abs() < 1e-10);
        assert!((odd.expectation(&p).re + 1.0).abs() < 1e-10);
        assert!(even.inner(&odd).norm() < 1e-12);

        // n̄_+ = r² |α|²
        let (_, _, r) = cat_norms(al);
        let nbar = even.expectation(&number(s)).re;
        assert!((nbar - r * r * al.norm_sqr()).abs() < 1e-9);
    }

    #[test]
    fn cat_norm_ratio_formula() {
        let al = C64::new(1.3, 0.4);
        let (_, _, r) = cat_norms(al);
        let q = (-2.0 * al.norm_sqr()).exp();
        assert!((r - ((1.0 - q) / (1.0 + q)).sqrt()).abs() < 1e-12);
    }

    /// Extract the qubit-block coefficient c = Tr[P O P basis_op†]/2 of an
    /// operator projected onto span{|C+>, |C->}.
    fn pauli_coefficient(op: &Operator, basis_op: &Operator, cp: &Ket, cm: &Ket) -> C64 {
        // both operators sandwiched in the 2-dim cat basis
        let block = |o: &Operator| -> [[C64; 2]; 2] {
            [
                [cp.inner(&o.apply(cp)), cp.inner(&o.apply(cm))],
                [cm.inner(&o.apply(cp)), cm.inner(&o.apply(cm))],
            ]
        };
        let ob = block(op);
        let bb = block(basis_op);
        let mut s = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                s += bb[j][i].conj() * ob[j][i];
            }
        }
        s / C64::new(2.0, 0.0)
    }

    #[test]
    fn cat_pauli_algebra_on_subspace() {
        let s = space(40);
        let al = C64::new(1.7, 0.0);
        let (x, y, z) = cat_pauli(s, al).unwrap();
        let cp = cat(s, al, Parity::Even).unwrap();
        let cm = cat(s, al, Parity::Odd).unwrap();
        let idc = Operator::identity(s);
        for (sq, name) in [(&x, "X"), (&y, "Y"), (&z, "Z")] {
            let c = pauli_coefficient(&sq.mul(sq), &idc, &cp, &cm);
            assert!((c - ONE).norm() < 1e-10, "{name}^2 != I on subspace: {c}");
        }
        // XY = iZ on the subspace
        let xy = x.mul(&y);
        let c = pauli_coefficient(&xy, &z, &cp, &cm);
        assert!((c - C64::new(0.0, 1.0)).norm() < 1e-10, "XY != iZ: {c}");
    }

    #[test]
    fn annihilation_projection_coefficients() {
        let s = space(40);
        let al = C64::new(2.0, 0.0);
        let (x, _, z) = cat_pauli(s, al).unwrap();
        let cp = cat(s, al, Parity::Even).unwrap();
        let cm = cat(s, al, Parity::Odd).unwrap();
        let (_, _, r) = cat_norms(al);
        let a = annihilation(s);

        let cx = pauli_coefficient(&a, &x, &cp, &cm);
        let expected = al * C64::new((r + 1.0 / r) / 2.0, 0.0);
        assert!((cx - expected).norm() < 1e-9, "c_X = {cx}, expected {expected}");

        // a†a projects with identity coefficient |α|²(r² + r⁻²)/2
        let n = number(s);
        let idc = Operator::identity(s);
        let ci = pauli_coefficient(&n, &idc, &cp, &cm);
        let expect_i = al.norm_sqr() * (r * r + 1.0 / (r * r)) / 2.0;
        assert!((ci.re - expect_i).abs() < 1e-9);
        let cz = pauli_coefficient(&n, &z, &cp, &cm);
        let expect_z = al.norm_sqr() * (r * r - 1.0 / (r * r)) / 2.0;
        assert!((cz.re - expect_z).abs() < 1e-9);
    }

    #[test]
    fn annihilation_projects_to_sigma_minus_at_small_alpha() {
        let s = space(20);
        let al = C64::new(1e-3, 0.0);
        let a = annihilation(s);
        let (x, y, _) = cat_pauli(s, al).unwrap();
        let cp = cat(s, al, Parity::Even).unwrap();
        let cm = cat(s, al, Parity::Odd).unwrap();
        let cx = pauli_coefficient(&a, &x, &cp, &cm);
        let cy = pauli_coefficient(&a, &y, &cp, &cm);
        assert!((cx - C64::new(0.5, 0.0)).norm() < 1e-4, "c_X -> 1/2, got {cx}");
        assert!((cy - C64::new(0.0, 0.5)).norm() < 1e-4, "c_Y -> i/2, got {cy}");
    }

    #[test]
    fn density_matrix_validation() {
        let s = space(12);
        let th = DensityMatrix::thermal(s, 0.3);
        assert!((th.trace() - ONE).norm() < 1e-12);
        assert!(DensityMatrix::from_matrix(s, th.matrix().clone()).is_ok());

        // trace-one Hermitian but indefinite
        let mut bad = Mat::<C64>::zeros(12, 12);
        bad[(0, 0)] = C64::new(1.5, 0.0);
        bad[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::from_matrix(s, bad).is_err());
    }

    #[test]
    fn wigner_vacuum_peak_and_normalization() {
        let s = space(20);
        let rho = DensityMatrix::pure(&Ket::fock(s, 0));
        let (xs, ps) = WignerGrid::axes(5.0, 101);
        let w = wigner_of(&rho, &xs, &ps).unwrap();
        let w00 = w.values[50][50];
        assert!((w00 - 1.0 / std::f64::consts::PI).abs() < 1e-6);
        assert!((w.integral() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn wigner_cat_fringe_period() {
        let s = space(64);
        let al = C64::new(2.0 * 2f64.sqrt(), 0.0);
        let rho = DensityMatrix::pure(&cat(s, al, Parity::Even).unwrap());
        let nbar = rho.mean_photon_number();
        // sample along p at x = 0 and measure the zero-crossing spacing
        let ps: Vec<f64> = (0..601).map(|i| -1.5 + i as f64 * 0.005).collect();
        let w = wigner_of(&rho, &[0.0], &ps).unwrap();
        let mut crossings = Vec::new();
        for i in 1..ps.len() {
            let (a, b) = (w.values[i - 1][0], w.values[i][0]);
            if a.signum() != b.signum() {
                crossings.push(ps[i - 1] + 0.005 * a.abs() / (a - b).abs());
            }
        }
        let periods: Vec<f64> = crossings.windows(2).map(|c| 2.0 * (c[1] - c[0])).collect();
        let mean: f64 = periods.iter().sum::<f64>() / periods.len() as f64;
        // π/(2√n̄) in the α-plane convention; our (x,p) axes are √2 larger
        let alpha_plane = mean / 2f64.sqrt();
        let expected = std::f64::consts::PI / (2.0 * nbar.sqrt());
        assert!(
            (alpha_plane - expected).abs() / expected < 0.05,
            "period {alpha_plane} vs {expected}"
        );
    }

    #[test]
    fn wigner_cat_normalization() {
        let s = space(50);
        let rho =
            DensityMatrix::pure(&cat(s, C64::new(2.0, 0.0), Parity::Even).unwrap());
        let (xs, ps) = WignerGrid::axes(6.0, 241);
        let w = wigner_of(&rho, &xs, &ps).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-4, "integral = {}", w.integral());
    }

    #[test]
    fn wigner_grid_coarse_rejected() {
        let s = space(60);
        let rho =
            DensityMatrix::pure(&cat(s, C64::new(3.0, 0.0), Parity::Even).unwrap());
        let (xs, ps) = WignerGrid::axes(6.0, 12);
        assert!(matches!(wigner_of(&rho, &xs, &ps), Err(KerrError::Grid(_))));
    }

    #[test]
    #[should_panic(expected = "across spaces")]
    fn mixed_dim_arithmetic_rejected() {
        let a = annihilation(space(4));
        let b = annihilation(space(5));
        let _ = a.mul(&b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        /// |W| ≤ 1/π (+ slack) for arbitrary valid density matrices.
        #[test]
        fn wigner_bound_random_states(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let d = 8usize;
            let s = HilbertSpace::new(d).unwrap();
            // random PSD: G G† normalized
            let g = Mat::<C64>::from_fn(d, d, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let gd = Mat::<C64>::from_fn(d, d, |i, j| g[(j, i)].conj());
            let prod = &g * &gd;
            let tr: C64 = (0..d).map(|i| prod[(i, i)]).sum();
            let rho_m = Mat::<C64>::from_fn(d, d, |i, j| prod[(i, j)] / tr);
            let rho = DensityMatrix::from_matrix(s, rho_m).unwrap();
            let (xs, ps) = WignerGrid::axes(4.0, 41);
            let w = wigner_of(&rho, &xs, &ps).unwrap();
            prop_assert!(w.max_abs() <= 1.0 / std::f64::consts::PI + 1e-6);
        }

        /// Cat states stay parity-pure and mutually orthogonal.
        #[test]
        fn cat_orthogonality(a_re in 0.3f64..2.2, a_im in -1.0f64..1.0) {
            let s = HilbertSpace::new(48).unwrap();
            let al = C64::new(a_re, a_im);
            let even = cat(s, al, Parity::Even).unwrap();
            let odd = cat(s, al, Parity::Odd).unwrap();
            prop_assert!(even.inner(&odd).norm() < 1e-10);
            let p = parity_op(s);
            prop_assert!((even.expectation(&p).re - 1.0).abs() < 1e-10);
            prop_assert!((odd.expectation(&p).re + 1.0).abs() < 1e-10);
        }
    }
}
