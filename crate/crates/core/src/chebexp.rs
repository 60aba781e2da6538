//! Chebyshev-Bessel approximation of `exp(+-Omega/2)` for anti-Hermitian
//! matrix polynomials.
//!
//! With `T_0 = 1`, `T_1 = Omega` and `T_(k+1) = 2 Omega T_k + T_(k-1)`,
//!
//! ```text
//! exp_p(Omega/2) = J_0(1/2) 1 + 2 sum_{k=1}^p J_k(1/2) T_k.
//! ```
//!
//! For `Omega = iH` with Hermitian `H` the plus-sign recurrence gives
//! `T_k(iH) = i^k C_k(H)` where `C_k` is the ordinary Chebyshev polynomial,
//! so the sum is the Jacobi-Anger expansion of `exp(iH/2)`. Every eigenvalue
//! of `H` in `[-1, 1]` then has truncation error at most
//! `2 sum_{k>p} J_k(1/2)` (about `6.9e-7` for `p = 5`).

use crate::error::Result;
use crate::linalg::{self, real};
use crate::poly::{CMatrix, MatrixPoly};

/// Truncation order used unless configured otherwise.
pub const DEFAULT_ORDER: usize = 5;

/// Bessel function of the first kind `J_k(z)` from its ascending series.
pub fn bessel_j(k: usize, z: f64) -> f64 {
    let half = 0.5 * z;
    // (z/2)^k / k!
    let mut term = 1.0;
    for j in 1..=k {
        term *= half / j as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for s in 1..200 {
        term *= q / (s as f64 * (k + s) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Sign of the exponent: `exp(+Omega/2)` or `exp(-Omega/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpSign {
    Plus,
    Minus,
}

impl ExpSign {
    pub fn factor(self) -> f64 {
        match self {
            ExpSign::Plus => 1.0,
            ExpSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChebExpansion {
    pub order: usize,
    pub sign: ExpSign,
    pub result: MatrixPoly,
}

/// `exp_p(sign * Omega / 2)` as a matrix polynomial.
pub fn cheb_exp(omega: &MatrixPoly, order: usize, sign: ExpSign) -> Result<ChebExpansion> {
    let (n, _) = omega.shape();
    let vars = omega.vars().clone();
    let arg = omega.scale(sign.factor());

    let identity = MatrixPoly::identity(&vars, n);
    let mut result = identity.scale(bessel_j(0, 0.5));
    let mut prev = identity;
    let mut current = arg.clone();
    for k in 1..=order {
        result = result.add(&current.scale(2.0 * bessel_j(k, 0.5)))?;
        if k < order {
            let next = arg.mul(&current)?.scale(2.0).add(&prev)?;
            prev = std::mem::replace(&mut current, next);
        }
    }
    Ok(ChebExpansion {
        order,
        sign,
        result,
    })
}

/// `exp_p(omega/2)` for a numeric matrix, by the same recurrence.
pub fn cheb_exp_matrix(omega: &CMatrix, order: usize) -> CMatrix {
    let n = omega.nrows();
    let identity = CMatrix::identity(n, n);
    let mut result = &identity * real(bessel_j(0, 0.5));
    let mut prev = identity;
    let mut current = omega.clone();
    for k in 1..=order {
        result += &current * real(2.0 * bessel_j(k, 0.5));
        let next = omega * &current * real(2.0) + &prev;
        prev = std::mem::replace(&mut current, next);
    }
    result
}

/// Outcome of comparing the truncated expansion against the exact
/// exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpValidation {
    /// `||exp_p(Omega/2) - expm(Omega/2)||_F`.
    pub error: f64,
    pub spectral_radius: f64,
    /// Set when the spectral radius exceeds one and the expansion is outside
    /// its convergence domain.
    pub radius_warning: bool,
}

/// Measures the truncation error of `exp_p(Omega/2)` against the
/// eigendecomposition exponential.
pub fn validate_exp(omega: &CMatrix, order: usize) -> ExpValidation {
    let approx = cheb_exp_matrix(omega, order);
    let exact = linalg::expm_anti_hermitian(&(omega * real(0.5)));
    let spectral_radius = linalg::normal_spectral_radius(omega);
    ExpValidation {
        error: (approx - exact).norm(),
        spectral_radius,
        radius_warning: spectral_radius > 1.0,
    }
}

/// Worst-case per-eigenvalue truncation error `2 sum_{k>p} J_k(1/2)`.
pub fn truncation_bound(order: usize) -> f64 {
    (order + 1..order + 40).map(|k| 2.0 * bessel_j(k, 0.5)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gauss_legendre, I};
    use crate::poly::{Monomial, Vars};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `J_k(z) = (1/pi) int_0^pi cos(k tau - z sin tau) dtau`.
    fn bessel_by_quadrature(k: usize, z: f64) -> f64 {
        let (x, w) = gauss_legendre(40);
        let pi = std::f64::consts::PI;
        x.iter()
            .zip(&w)
            .map(|(x, w)| {
                let tau = 0.5 * pi * (x + 1.0);
                0.5 * pi * w * (k as f64 * tau - z * tau.sin()).cos()
            })
            .sum::<f64>()
            / pi
    }

    pub(crate) fn random_anti_hermitian(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = (&a + a.adjoint()) * real(0.5);
        let r = linalg::normal_spectral_radius(&h);
        h * (I * (radius / r))
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(3, 0.0), 0.0);
        for k in 0..8 {
            let oracle = bessel_by_quadrature(k, 0.5);
            assert!((bessel_j(k, 0.5) - oracle).abs() < 1e-14, "J_{k}");
        }
        assert!((bessel_j(0, 0.5) - 0.938469807240813).abs() < 1e-12);
        assert!((bessel_j(1, 0.5) - 0.2422684576748739).abs() < 1e-12);
    }

    #[test]
    fn zero_argument_reproduces_even_tail() {
        // T_k(0) = 1, 0, 1, 0, ... so exp_5(0) = J0 + 2 J2 + 2 J4, which
        // differs from 1 by exactly -2 (J6 + J8 + ...).
        let vars = Vars::numbered("x", 1).unwrap();
        let zero = MatrixPoly::zero(&vars, 3, 3);
        let e = cheb_exp(&zero, 5, ExpSign::Plus).unwrap().result;
        let value = e.evaluate(&[0.3]).unwrap();
        let tail: f64 = (3..8).map(|j| 2.0 * bessel_by_quadrature(2 * j, 0.5)).sum();
        let identity = CMatrix::identity(3, 3);
        assert!(((&value - &identity) + &identity * real(tail)).camax() < 1e-15);
        assert!((value - identity).camax() < truncation_bound(5));
    }

    #[test]
    fn scalar_phase_within_truncation_bound() {
        let vars = Vars::numbered("x", 1).unwrap();
        let omega = MatrixPoly::constant(&vars, CMatrix::from_element(1, 1, I));
        let e = cheb_exp(&omega, 5, ExpSign::Plus).unwrap().result;
        let got = e.evaluate(&[0.0]).unwrap()[(0, 0)];
        let exact = Complex64::new(0.5f64.cos(), 0.5f64.sin());
        assert!((exact.re - 0.8775826).abs() < 1e-7 && (exact.im - 0.4794255).abs() < 1e-7);
        assert!((got - exact).norm() <= truncation_bound(5));
    }

    #[test]
    fn plus_sign_recurrence_second_term() {
        let vars = Vars::numbered("x", 1).unwrap();
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![I, -I]));
        let omega = MatrixPoly::constant(&vars, diag.clone());
        // S_2 = 2 Omega T_1 + T_0
        let s2 = omega.mul(&omega).unwrap().scale(2.0).add(&MatrixPoly::identity(&vars, 2)).unwrap();
        assert_eq!(s2.evaluate(&[0.0]).unwrap(), -CMatrix::identity(2, 2));
    }

    #[test]
    fn polynomial_and_numeric_recurrences_agree() {
        let vars = Vars::numbered("x", 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_anti_hermitian(&mut rng, 3, 0.6);
        let b = random_anti_hermitian(&mut rng, 3, 0.3);
        let omega = MatrixPoly::from_terms(&vars, 3, 3, [(Monomial::ONE, a.clone()), (Monomial::var(0), b.clone())]).unwrap();
        let plus = cheb_exp(&omega, 5, ExpSign::Plus).unwrap().result;
        let minus = cheb_exp(&omega, 5, ExpSign::Minus).unwrap().result;
        assert!(plus.degree() <= 5);
        for x in [-1.0, 0.2, 0.9] {
            let om = &a + &b * real(x);
            assert!((plus.evaluate(&[x]).unwrap() - cheb_exp_matrix(&om, 5)).camax() < 1e-14);
            assert!((minus.evaluate(&[x]).unwrap() - cheb_exp_matrix(&-om, 5)).camax() < 1e-14);
        }
        // sign = -1 is the substitution Omega -> -Omega
        let via_negation = cheb_exp(&omega.neg(), 5, ExpSign::Plus).unwrap().result;
        assert_eq!(via_negation, minus);
    }

    #[test]
    fn validation_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let bound = truncation_bound(5);
        let mut p5_better = 0;
        for _ in 0..100 {
            let radius = rng.random_range(0.05..1.0);
            let omega = random_anti_hermitian(&mut rng, 3, radius);
            let v3 = validate_exp(&omega, 3);
            let v5 = validate_exp(&omega, 5);
            assert!(!v5.radius_warning);
            // three eigenvalues, each off by at most the scalar bound
            assert!(v5.error <= 3f64.sqrt() * bound + 1e-14);
            if v5.error < v3.error {
                p5_better += 1;
            }
            let mut last = f64::INFINITY;
            for p in 1..=8 {
                let e = validate_exp(&omega, p).error;
                assert!(e <= last + 1e-12, "order {p}");
                last = e;
            }
            let u = cheb_exp_matrix(&omega, 5);
            let defect = (&u * u.adjoint() - CMatrix::identity(3, 3)).camax();
            assert!(defect < 3.0 * bound);
        }
        assert!(p5_better >= 99);
    }

    #[test]
    fn radius_warning_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let omega = random_anti_hermitian(&mut rng, 3, 1.5);
        assert!(validate_exp(&omega, 5).radius_warning);
        let zero = CMatrix::zeros(3, 3);
        assert!(validate_exp(&zero, 5).error < 3f64.sqrt() * truncation_bound(5));
    }
}
