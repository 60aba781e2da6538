//! Local minimization: line-searched Newton steps on a finite-difference
//! Hessian of the exact gradient, with an augmented Lagrangian wrapper for
//! inequality constraints.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::PopProblem;
use crate::poly::RealPoly;

pub const GRADIENT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;
/// Constraint violation accepted as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Infinity norm of the objective gradient (of the augmented Lagrangian
    /// for constrained programs).
    pub grad_norm: f64,
    /// Largest constraint violation (0 when unconstrained).
    pub violation: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// A function with an exact gradient.
pub trait Smooth {
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Polynomial with precomputed partial derivatives.
#[derive(Debug, Clone)]
pub struct PolyFunction {
    f: RealPoly,
    grad: Vec<RealPoly>,
}

impl PolyFunction {
    pub fn new(f: &RealPoly) -> Self {
        Self {
            grad: f.gradient(),
            f: f.clone(),
        }
    }
}

impl Smooth for PolyFunction {
    fn value(&self, x: &[f64]) -> Result<f64> {
        self.f.evaluate(x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.grad.iter().map(|g| g.evaluate(x)).collect()
    }
}

fn finite(what: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} at {values:?}")))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn hessian<F: Smooth>(f: &F, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    for k in 0..n {
        let step = 1e-6 * x[k].abs().max(1.0);
        probe[k] = x[k] + step;
        let gp = f.gradient(&probe)?;
        probe[k] = x[k] - step;
        let gm = f.gradient(&probe)?;
        probe[k] = x[k];
        for i in 0..n {
            h[(i, k)] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(x, d)| x + a * d).collect()
}

/// Unconstrained minimization from `x0`. The objective never increases.
pub fn minimize<F: Smooth>(f: &F, x0: &[f64], max_iter: usize, grad_tol: f64) -> Result<RefineResult> {
    let mut x = x0.to_vec();
    finite("start point", &x)?;
    let mut fx = f.value(&x)?;
    finite("objective", &[fx])?;
    let mut g = f.gradient(&x)?;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        finite("gradient", &g)?;
        let gnorm = inf_norm(&g);
        let h = hessian(f, &x)?;
        finite("hessian", h.as_slice())?;
        let eig = SymmetricEigen::new(h);
        let scale = eig.eigenvalues.amax().max(1.0);
        let (min_index, min_eig) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });

        if gnorm < grad_tol {
            if min_eig >= -1e-8 * scale {
                converged = true;
                break;
            }
            // saddle or maximum: follow the most negative curvature
            let d: Vec<f64> = eig.eigenvectors.column(min_index).iter().copied().collect();
            let mut step = 1.0;
            let mut moved = false;
            for _ in 0..MAX_HALVINGS {
                for sign in [1.0, -1.0] {
                    let trial = axpy(&x, sign * step, &d);
                    let ft = f.value(&trial)?;
                    if ft < fx {
                        x = trial;
                        fx = ft;
                        moved = true;
                        break;
                    }
                }
                if moved {
                    break;
                }
                step *= 0.5;
            }
            iterations += 1;
            if !moved {
                break;
            }
            g = f.gradient(&x)?;
            continue;
        }

        // Newton step on |H| with small eigenvalues floored; plain Newton
        // when H is positive definite, a descent direction otherwise.
        let floor = 1e-10 * scale;
        let gv = DVector::from_column_slice(&g);
        let coords = eig.eigenvectors.transpose() * &gv;
        let scaled = DVector::from_iterator(
            coords.len(),
            coords.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| -c / l.abs().max(floor)),
        );
        let mut d: Vec<f64> = (&eig.eigenvectors * scaled).iter().copied().collect();
        let mut slope: f64 = d.iter().zip(&g).map(|(d, g)| d * g).sum();
        if slope.is_nan() || slope >= 0.0 {
            d = g.iter().map(|v| -v).collect();
            slope = -g.iter().map(|v| v * v).sum::<f64>();
        }

        let noise = 1e-13 * fx.abs().max(1.0);
        let mut accepted = None;
        if -slope < noise {
            // The predicted decrease is below the rounding floor of f, so
            // the line search is blind; take the full step if it shrinks the
            // gradient without a visible increase.
            let trial = axpy(&x, 1.0, &d);
            let ft = f.value(&trial)?;
            if ft <= fx + noise && inf_norm(&f.gradient(&trial)?) < gnorm {
                accepted = Some((trial, ft));
            }
        } else {
            let mut step = 1.0;
            for _ in 0..MAX_HALVINGS {
                let trial = axpy(&x, step, &d);
                let ft = f.value(&trial)?;
                if ft.is_finite() && ft <= fx + ARMIJO_C * step * slope {
                    accepted = Some((trial, ft));
                    break;
                }
                step *= 0.5;
            }
        }
        iterations += 1;
        match accepted {
            Some((trial, ft)) => {
                let stalled = ft == fx && trial == x;
                x = trial;
                fx = ft;
                g = f.gradient(&x)?;
                if stalled {
                    break;
                }
            }
            None => break,
        }
    }

    if !converged {
        converged = inf_norm(&g) < grad_tol;
    }
    Ok(RefineResult {
        grad_norm: inf_norm(&g),
        x,
        value: fx,
        violation: 0.0,
        iterations,
        converged,
    })
}

/// `f(x) + sum_j (max(0, lambda_j - rho g_j)^2 - lambda_j^2) / (2 rho)`.
struct AugmentedLagrangian<'a> {
    f: &'a PolyFunction,
    g: &'a [PolyFunction],
    lambda: Vec<f64>,
    rho: f64,
}

impl Smooth for AugmentedLagrangian<'_> {
    fn value(&self, x: &[f64]) -> Result<f64> {
        let mut v = self.f.value(x)?;
        for (gj, lj) in self.g.iter().zip(&self.lambda) {
            let s = (lj - self.rho * gj.value(x)?).max(0.0);
            v += (s * s - lj * lj) / (2.0 * self.rho);
        }
        Ok(v)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut grad = self.f.gradient(x)?;
        for (gj, lj) in self.g.iter().zip(&self.lambda) {
            let s = (lj - self.rho * gj.value(x)?).max(0.0);
            if s > 0.0 {
                for (a, b) in grad.iter_mut().zip(gj.gradient(x)?) {
                    *a -= s * b;
                }
            }
        }
        Ok(grad)
    }
}

fn violation(g: &[PolyFunction], x: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for gj in g {
        worst = worst.max(-gj.value(x)?);
    }
    Ok(worst)
}

/// Local refinement of a program from `x0`.
pub fn local_refine(prob: &PopProblem, x0: &[f64], max_iter: usize) -> Result<RefineResult> {
    if x0.len() != prob.nvars() {
        return Err(Error::LengthMismatch {
            expected: prob.nvars(),
            got: x0.len(),
        });
    }
    let f = PolyFunction::new(prob.objective());
    if !prob.is_constrained() {
        return minimize(&f, x0, max_iter, GRADIENT_TOL);
    }
    let g: Vec<PolyFunction> = prob.constraints().iter().map(PolyFunction::new).collect();
    let mut al = AugmentedLagrangian {
        f: &f,
        g: &g,
        lambda: vec![0.0; g.len()],
        rho: 10.0,
    };
    let mut x = x0.to_vec();
    let mut iterations = 0;
    let mut last_violation = f64::INFINITY;
    let mut inner = None;
    for _ in 0..40 {
        let r = minimize(&al, &x, max_iter, 1e-9)?;
        iterations += r.iterations;
        x = r.x.clone();
        let viol = violation(&g, &x)?;
        let mut complementarity: f64 = 0.0;
        for (gj, lj) in g.iter().zip(al.lambda.iter_mut()) {
            let gx = gj.value(&x)?;
            *lj = (*lj - al.rho * gx).max(0.0);
            complementarity = complementarity.max((*lj * gx).abs());
        }
        inner = Some(r);
        if viol < FEASIBILITY_TOL && complementarity < 1e-8 {
            break;
        }
        if viol > 0.25 * last_violation {
            al.rho = (al.rho * 10.0).min(1e10);
        }
        last_violation = viol;
    }
    let inner = inner.expect("at least one outer iteration");
    let violation = violation(&g, &x)?;
    Ok(RefineResult {
        value: f.value(&x)?,
        converged: inner.converged && violation < FEASIBILITY_TOL,
        grad_norm: inner.grad_norm,
        x,
        violation,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Monomial, Vars};

    fn bowl() -> PopProblem {
        let vars = Vars::numbered("x", 2).unwrap();
        PopProblem::unconstrained(RealPoly::from_terms(
            &vars,
            [(Monomial::var_pow(0, 2), 1.0), (Monomial::var_pow(1, 2), 2.0)],
        ))
    }

    fn double_well() -> PopProblem {
        let vars = Vars::numbered("x", 1).unwrap();
        PopProblem::unconstrained(RealPoly::from_terms(
            &vars,
            [
                (Monomial::ONE, 1.0),
                (Monomial::var_pow(0, 2), -2.0),
                (Monomial::var_pow(0, 4), 1.0),
            ],
        ))
    }

    #[test]
    fn quadratic_bowl() {
        let r = local_refine(&bowl(), &[1.0, 1.0], 100).unwrap();
        assert!(r.converged);
        assert!(r.x.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn escapes_the_double_well_saddle() {
        let r = local_refine(&double_well(), &[0.0], 100).unwrap();
        assert!(r.converged);
        assert!((r.x[0].abs() - 1.0).abs() < 1e-6, "x = {}", r.x[0]);
        for start in [-1.7, -0.2, 0.4, 1.3] {
            let r = local_refine(&double_well(), &[start], 100).unwrap();
            assert!((r.x[0] - start.signum()).abs() < 1e-6);
        }
    }

    #[test]
    fn never_increases_the_objective() {
        let vars = Vars::numbered("x", 2).unwrap();
        // Rosenbrock
        let x = RealPoly::var_index(&vars, 0);
        let y = RealPoly::var_index(&vars, 1);
        let a = RealPoly::constant(&vars, 1.0).sub(&x).unwrap();
        let b = y.sub(&x.mul(&x).unwrap()).unwrap();
        let f = a.mul(&a).unwrap().add(&b.mul(&b).unwrap().scale(100.0)).unwrap();
        let prob = PopProblem::unconstrained(f);
        for start in [[-1.2, 1.0], [2.0, -1.0], [0.0, 0.0]] {
            let f0 = prob.value(&start).unwrap();
            for iters in [1, 2, 5, 200] {
                let r = local_refine(&prob, &start, iters).unwrap();
                assert!(r.value <= f0);
            }
            let r = local_refine(&prob, &start, 500).unwrap();
            assert!(r.converged && (r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn non_finite_start_is_an_error() {
        assert!(matches!(
            local_refine(&bowl(), &[f64::NAN, 0.0], 10),
            Err(Error::NonFinite(_))
        ));
        assert!(local_refine(&bowl(), &[0.0], 10).is_err());
    }

    #[test]
    fn constrained_minimum_on_the_boundary() {
        // min x + y on x^2 + y^2 <= 1: (-1/sqrt2, -1/sqrt2)
        let vars = Vars::numbered("x", 2).unwrap();
        let f = RealPoly::from_terms(&vars, [(Monomial::var(0), 1.0), (Monomial::var(1), 1.0)]);
        let g = RealPoly::from_terms(
            &vars,
            [
                (Monomial::ONE, 1.0),
                (Monomial::var_pow(0, 2), -1.0),
                (Monomial::var_pow(1, 2), -1.0),
            ],
        );
        let prob = PopProblem::new(f, vec![g]).unwrap();
        let r = local_refine(&prob, &[0.3, 0.1], 200).unwrap();
        let s = -std::f64::consts::FRAC_1_SQRT_2;
        assert!(r.converged);
        assert!((r.x[0] - s).abs() < 1e-6 && (r.x[1] - s).abs() < 1e-6, "{:?}", r.x);
        assert!(r.violation < FEASIBILITY_TOL);
    }

    #[test]
    fn inactive_constraint_is_ignored() {
        let vars = Vars::numbered("x", 2).unwrap();
        let g = RealPoly::from_terms(&vars, [(Monomial::ONE, 4.0), (Monomial::var_pow(0, 2), -1.0)]);
        let prob = bowl().with_constraints(vec![g]).unwrap();
        let r = local_refine(&prob, &[1.0, -1.0], 100).unwrap();
        assert!(r.converged && r.x.iter().all(|v| v.abs() < 1e-8));
    }
}
