//! Small dense helpers on complex matrices: Hermitian eigensolves,
//! exponentials of anti-Hermitian matrices, norms, and quadrature nodes.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::poly::CMatrix;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn real(value: f64) -> Complex64 {
    Complex64::new(value, 0.0)
}

/// `max |H - H^dagger|` entrywise.
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A + A^dagger|` entrywise.
pub fn anti_hermiticity_defect(a: &CMatrix) -> f64 {
    (a + a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |U^dagger U - 1|` entrywise.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Eigen-decomposition of the Hermitian part of `h`.
pub fn hermitian_eigen(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let sym = (h + h.adjoint()) * real(0.5);
    let eig = SymmetricEigen::new(sym);
    (eig.eigenvalues, eig.eigenvectors)
}

/// `exp(a)` for anti-Hermitian `a`, via the unitary diagonalization of the
/// Hermitian matrix `i a`.
pub fn expm_anti_hermitian(a: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(&(a * I));
    // a = -i * (i a) so exp(a) = Q diag(exp(-i lambda)) Q^dagger
    let phases = values.map(|l| Complex64::from_polar(1.0, -l));
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * vectors.adjoint()
}

/// Spectral radius of a normal matrix, which equals its spectral norm.
pub fn normal_spectral_radius(a: &CMatrix) -> f64 {
    spectral_norm(a)
}

/// Largest singular value of an arbitrary square matrix.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    let gram = a.adjoint() * a;
    let (values, _) = hermitian_eigen(&gram);
    values.iter().copied().fold(0.0, f64::max).max(0.0).sqrt()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule for `f` over `[a, b]`.
pub fn composite_gauss_legendre<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = crate::poly::NeumaierSum::new();
    for p in 0..panels {
        let left = a + p as f64 * h;
        let mid = left + 0.5 * h;
        for (x, w) in nodes.iter().zip(&weights) {
            total.add(0.5 * h * w * f(mid + 0.5 * h * x));
        }
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 30 is exact for 16 nodes
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((integral - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_on_smooth_function() {
        let v = composite_gauss_legendre(f64::sin, 0.0, std::f64::consts::PI, 16, 32);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn expm_of_diagonal_phase() {
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(0.0, 0.3),
            Complex64::new(0.0, -1.1),
        ]));
        let u = expm_anti_hermitian(&a);
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, 0.3)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, -1.1)).norm() < 1e-15);
        assert!(u[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn expm_matches_power_series() {
        let h = CMatrix::from_fn(3, 3, |i, j| {
            Complex64::new((i + 2 * j) as f64 * 0.1, if i == j { 0.0 } else { (i as f64 - j as f64) * 0.2 })
        });
        let h = (&h + h.adjoint()) * real(0.5);
        let a = &h * (-I);
        let mut series = CMatrix::identity(3, 3);
        let mut term = CMatrix::identity(3, 3);
        for k in 1..40 {
            term = &term * &a * real(1.0 / k as f64);
            series += &term;
        }
        assert!((expm_anti_hermitian(&a) - series).norm() < 1e-13);
        assert!((normal_spectral_radius(&a) - normal_spectral_radius(&h)).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_of_rank_one() {
        let a = CMatrix::from_fn(2, 2, |i, j| real(((i + 1) * (j + 1)) as f64));
        // outer product of (1,2) with itself
        assert!((spectral_norm(&a) - 5.0).abs() < 1e-12);
    }
}
