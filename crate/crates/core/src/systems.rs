//! Bundled example systems.

use crate::linalg::real;
use crate::magnus::QuantumSystem;
use crate::poly::CMatrix;

/// Transition energy of the middle level of the three-level transmon model.
pub const MIDDLE_LEVEL: f64 = 0.515916;
/// Ground-to-first-excited coupling of the control Hamiltonian.
#[allow(clippy::approx_constant)]
pub const COUPLING_01: f64 = 0.707107;
/// First-to-second-excited coupling of the control Hamiltonian.
pub const COUPLING_12: f64 = 1.0;

/// Drift `diag(0, 0.515916, 1)` of the scaled three-level transmon.
pub fn transmon_drift() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        real(0.0),
        real(MIDDLE_LEVEL),
        real(1.0),
    ]))
}

/// Tridiagonal control coupling with the given off-diagonal strengths.
pub fn tridiagonal_coupling(z01: f64, z12: f64) -> CMatrix {
    let mut v = CMatrix::zeros(3, 3);
    v[(0, 1)] = real(z01);
    v[(1, 0)] = real(z01);
    v[(1, 2)] = real(z12);
    v[(2, 1)] = real(z12);
    v
}

/// Three-level transmon with the scaled IBM-style drift and coupling.
pub fn transmon_three_level() -> QuantumSystem {
    QuantumSystem::new(transmon_drift(), tridiagonal_coupling(COUPLING_01, COUPLING_12))
        .expect("bundled system is Hermitian")
}
