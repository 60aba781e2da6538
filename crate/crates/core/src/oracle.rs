//! Reference Schrödinger propagation by midpoint exponential stepping.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, real};
use crate::magnus::{ControlAnsatz, QuantumSystem};
use crate::poly::{CMatrix, NeumaierSum};

/// Step count used when none is configured.
pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub u: CMatrix,
    pub steps: usize,
    pub unitarity_defect: f64,
}

/// `U(T) = prod_j expm(dt * A(t_j + dt/2))`, later factors on the left.
pub fn propagate(
    sys: &QuantumSystem,
    ansatz: &ControlAnsatz,
    x: &[f64],
    steps: usize,
) -> Result<PropagationResult> {
    let t_end = ansatz.fixed_time().ok_or_else(|| {
        Error::InvalidArgument("propagation needs a fixed terminal time".into())
    })?;
    if x.len() != ansatz.m() {
        return Err(Error::LengthMismatch {
            expected: ansatz.m(),
            got: x.len(),
        });
    }
    propagate_field(sys, |t| ansatz.field(x, t), t_end, steps)
}

/// Propagation under an arbitrary scalar field `E(t)` on `[0, t_end]`.
pub fn propagate_field<F: Fn(f64) -> f64>(
    sys: &QuantumSystem,
    field: F,
    t_end: f64,
    steps: usize,
) -> Result<PropagationResult> {
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    let n = sys.dim();
    let dt = t_end / steps as f64;
    let mut u = CMatrix::identity(n, n);
    for j in 0..steps {
        let mid = (j as f64 + 0.5) * dt;
        let step = linalg::expm_anti_hermitian(&(sys.generator_at(field(mid)) * real(dt)));
        u = step * u;
    }
    let unitarity_defect = linalg::unitarity_defect(&u);
    Ok(PropagationResult {
        u,
        steps,
        unitarity_defect,
    })
}

fn check_shape(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch { left: a, right: b });
    }
    Ok(())
}

/// `||U - U*||_F^2`.
pub fn frob_distance_sq(u: &CMatrix, target: &CMatrix) -> Result<f64> {
    check_shape(u.shape(), target.shape())?;
    Ok(u.iter()
        .zip(target.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .collect::<NeumaierSum>()
        .value())
}

/// `||U psi0 - psi*||^2`.
pub fn state_distance_sq(u: &CMatrix, psi0: &[Complex64], psi_star: &[Complex64]) -> Result<f64> {
    check_shape((u.ncols(), 1), (psi0.len(), 1))?;
    check_shape((u.nrows(), 1), (psi_star.len(), 1))?;
    let mut sum = NeumaierSum::new();
    for (r, target) in psi_star.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, amp) in psi0.iter().enumerate() {
            acc += u[(r, c)] * amp;
        }
        sum.add((acc - target).norm_sqr());
    }
    Ok(sum.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;
    use crate::systems::transmon_three_level;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_control_is_free_evolution() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let exact = linalg::expm_anti_hermitian(&(sys.h0() * (-I * 0.5)));
        for steps in [1, 7, 200] {
            let r = propagate(&sys, &ansatz, &[0.0; 3], steps).unwrap();
            assert!((r.u - &exact).camax() < 1e-12);
            assert!(r.unitarity_defect < 1e-12);
        }
    }

    #[test]
    fn self_convergence_under_step_doubling() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = propagate(&sys, &ansatz, &x, 2000).unwrap();
            let b = propagate(&sys, &ansatz, &x, 4000).unwrap();
            // second-order stepping leaves a few 1e-9 here, not less
            assert!((&a.u - &b.u).norm() < 1e-8);
            assert!(a.unitarity_defect < 1e-12 && b.unitarity_defect < 1e-12);
        }
    }

    #[test]
    fn second_order_step_refinement() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let x = [0.9, -0.8, 0.7];
        let reference = propagate(&sys, &ansatz, &x, 20_000).unwrap().u;
        let e1 = (propagate(&sys, &ansatz, &x, 50).unwrap().u - &reference).norm();
        let e2 = (propagate(&sys, &ansatz, &x, 100).unwrap().u - &reference).norm();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn frobenius_distance_examples() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let u = propagate(&sys, &ansatz, &[0.3, 0.1, -0.4], 100).unwrap().u;
        assert_eq!(frob_distance_sq(&u, &u).unwrap(), 0.0);
        assert!((frob_distance_sq(&u, &-&u).unwrap() - 12.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = CMatrix::from_fn(3, 3, |_, _| Complex64::new(rng.random(), rng.random()));
        let b = CMatrix::from_fn(3, 3, |_, _| Complex64::new(rng.random(), rng.random()));
        let mut oracle = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                let d = a[(r, c)] - b[(r, c)];
                oracle += d.re * d.re + d.im * d.im;
            }
        }
        assert!((frob_distance_sq(&a, &b).unwrap() - oracle).abs() < 1e-14);
        assert!(frob_distance_sq(&a, &CMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn state_distance_examples() {
        let u = CMatrix::identity(3, 3);
        let e0 = [real(1.0), real(0.0), real(0.0)];
        let e1 = [real(0.0), real(1.0), real(0.0)];
        assert_eq!(state_distance_sq(&u, &e0, &e0).unwrap(), 0.0);
        assert!((state_distance_sq(&u, &e0, &e1).unwrap() - 2.0).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = CMatrix::from_fn(3, 3, |_, _| Complex64::new(rng.random(), rng.random()));
        let p: Vec<Complex64> = (0..3).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let q: Vec<Complex64> = (0..3).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let mut oracle = 0.0;
        for r in 0..3 {
            let mut z = Complex64::new(0.0, 0.0);
            for c in 0..3 {
                z += m[(r, c)] * p[c];
            }
            oracle += (z - q[r]).norm_sqr();
        }
        assert!((state_distance_sq(&m, &p, &q).unwrap() - oracle).abs() < 1e-13);
        assert!(state_distance_sq(&m, &p[..2], &q).is_err());
    }
}
