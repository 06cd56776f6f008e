//! Numerical toolkit for the squeezed Kerr oscillator and the Kerr-cat qubit.
//!
//! The crate is organized around the static effective Hamiltonian
//!
//! ```text
//! H/ħ = -Δ a†a - K a†²a² + ε₂ (a†² + a²)
//! ```
//!
//! on a truncated Fock space, together with its open-system extensions.
//! Modules:
//!
//! - [`fock`] — truncated Fock-space linear algebra: operators, kets, density
//!   matrices, cat-qubit basis, Wigner transforms.
//! - [`effham`] — circuit/drive parameters to effective-Hamiltonian
//!   coefficients, plus a brute-force Floquet oracle.
//! - [`spectrum`] — parity-resolved diagonalization, tunnel splittings,
//!   spectral kissing, semiclassical action quantization, dissipative wells.
//! - [`lindblad`] — master-equation evolution, Lindbladian spectra, the
//!   truncated effective Lindbladian, and lifetime extraction.
//! - [`phasespace`] — metapotential surfaces, classical Liouville ensembles,
//!   and Wigner-flow cross-checks.
//! - [`protocols`] — cat Rabi, free-Kerr gate, readout SNR and measurement
//!   statistics, coherence summaries.
//! - [`cli`] — config-driven command-line front end with CSV/JSON output.
//!
//! All rates are angular frequencies; ħ = 1 throughout. The natural unit
//! system is "Kerr units" (K = 1, times in 1/K), which is also the CLI
//! default.

pub mod cli;
pub mod effham;
pub mod error;
pub mod fit;
pub mod fock;
pub mod lindblad;
pub mod numerics;
pub mod ode;
pub mod phasespace;
pub mod protocols;
pub mod spectrum;

pub use error::{KerrError, Result};
pub use fock::{CatQubitBasis, DensityMatrix, HilbertSpace, Ket, Operator, Parity};

/// Crate version string embedded in every CLI output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Hilbert-space truncation heuristic: enough levels for states with mean
/// photon number up to `nbar_max`, with a wide safety margin so that
/// eigenkets and coherent amplitudes are converged to well below 1e-8.
pub fn auto_dim(nbar_max: f64) -> usize {
    let n = nbar_max.max(0.0);
    (n + 12.0 * (n + 1.0).sqrt() + 15.0).ceil() as usize
}
