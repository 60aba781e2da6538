//! Truncated Magnus expansion of the propagator generated by
//! `A(t) = -i (H0 + E(t) V)` with a polynomial control field.
//!
//! The generator is built as a matrix polynomial in the auxiliary time
//! variable `t` and the problem variables. Nested commutators are expanded
//! symbolically and every `t`-monomial is then replaced by its integral over
//! the ordered simplex `0 <= t_q <= ... <= t_1 <= T`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, composite_gauss_legendre, hermiticity_defect, I};
use crate::poly::{CMatrix, MatrixPoly, Monomial, RealPoly, Vars};

/// Name of the auxiliary time variable in generator polynomials.
pub const TIME_VAR: &str = "t";
/// Name of the horizon variable in time-optimal problems.
pub const HORIZON_VAR: &str = "T";

const HERMITIAN_TOL: f64 = 1e-12;

/// Gauss-Legendre nodes per panel for the convergence functional.
pub const CONVERGENCE_NODES: usize = 16;
/// Panels for the convergence functional.
pub const CONVERGENCE_PANELS: usize = 32;

/// Drift and control Hamiltonians of a single-control system (hbar = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSystem {
    h0: CMatrix,
    v: CMatrix,
}

impl QuantumSystem {
    pub fn new(h0: CMatrix, v: CMatrix) -> Result<Self> {
        if !h0.is_square() || h0.shape() != v.shape() {
            return Err(Error::ShapeMismatch {
                left: h0.shape(),
                right: v.shape(),
            });
        }
        if hermiticity_defect(&h0) >= HERMITIAN_TOL {
            return Err(Error::NotHermitian("H0"));
        }
        if hermiticity_defect(&v) >= HERMITIAN_TOL {
            return Err(Error::NotHermitian("V"));
        }
        Ok(Self { h0, v })
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn h0(&self) -> &CMatrix {
        &self.h0
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// `A = -i (H0 + e V)` for a control amplitude `e`.
    pub fn generator_at(&self, e: f64) -> CMatrix {
        (&self.h0 + &self.v * linalg::real(e)) * (-I)
    }
}

/// Terminal time: a fixed value, or a polynomial variable `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Horizon {
    Fixed(f64),
    Symbolic,
}

/// Polynomial control `E(t) = sum_k x_k t^(k-1)` with `m` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlAnsatz {
    m: usize,
    horizon: Horizon,
}

impl ControlAnsatz {
    pub fn new(m: usize, horizon: Horizon) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "control ansatz needs at least one coefficient".into(),
            ));
        }
        if let Horizon::Fixed(t) = horizon {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "terminal time must be positive, got {t}"
                )));
            }
        }
        Ok(Self { m, horizon })
    }

    pub fn fixed(m: usize, t: f64) -> Result<Self> {
        Self::new(m, Horizon::Fixed(t))
    }

    pub fn symbolic(m: usize) -> Result<Self> {
        Self::new(m, Horizon::Symbolic)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn fixed_time(&self) -> Option<f64> {
        match self.horizon {
            Horizon::Fixed(t) => Some(t),
            Horizon::Symbolic => None,
        }
    }

    /// Problem variables `x1..xm`, followed by `T` when symbolic.
    pub fn vars(&self) -> Vars {
        let xs = Vars::numbered("x", self.m).expect("bounded variable count");
        match self.horizon {
            Horizon::Fixed(_) => xs,
            Horizon::Symbolic => xs.append(HORIZON_VAR).expect("distinct names"),
        }
    }

    /// `E(t)` for coefficients `x` (only the first `m` entries are read).
    pub fn field(&self, x: &[f64], t: f64) -> f64 {
        x.iter().take(self.m).rev().fold(0.0, |acc, &xk| acc * t + xk)
    }
}

/// Truncated Magnus exponent `Omega^(n)` as a polynomial in the problem
/// variables.
#[derive(Debug, Clone)]
pub struct MagnusResult {
    pub omega: MatrixPoly,
    pub order: usize,
}

/// One term `t^p * [v] * H` of a generator, before the `-i` factor.
#[derive(Debug, Clone)]
pub(crate) struct GeneratorTerm {
    pub t_power: u32,
    pub variable: Option<usize>,
    pub hamiltonian: CMatrix,
}

/// Assembles `-i * sum(terms)` as a matrix polynomial in `(t, vars)`.
pub(crate) fn assemble_generator(vars: &Vars, dim: usize, terms: &[GeneratorTerm]) -> Result<MatrixPoly> {
    let full = vars.prepend(TIME_VAR)?;
    let pieces = terms.iter().map(|term| {
        let mut exps = vec![0u32; full.len()];
        exps[0] = term.t_power;
        if let Some(v) = term.variable {
            exps[v + 1] += 1;
        }
        let mono = Monomial::from_exponents(&exps).expect("small exponents");
        (mono, &term.hamiltonian * (-I))
    });
    MatrixPoly::from_terms(&full, dim, dim, pieces)
}

/// `A(t; x) = -i (H0 + E(t) V)` in the variables `(t, x1..xm[, T])`.
pub fn generator_poly(sys: &QuantumSystem, ansatz: &ControlAnsatz) -> Result<MatrixPoly> {
    let vars = ansatz.vars();
    let mut terms = vec![GeneratorTerm {
        t_power: 0,
        variable: None,
        hamiltonian: sys.h0.clone(),
    }];
    for k in 0..ansatz.m {
        terms.push(GeneratorTerm {
            t_power: k as u32,
            variable: Some(k),
            hamiltonian: sys.v.clone(),
        });
    }
    assemble_generator(&vars, sys.dim(), &terms)
}

/// Closed-form nested simplex integral of `t_1^a_1 ... t_q^a_q`, returned
/// as `(coefficient, power)` meaning `coefficient * T^power`.
pub fn simplex_integral_coefficient(exponents: &[u32]) -> Result<(f64, u32)> {
    if !(1..=3).contains(&exponents.len()) {
        return Err(Error::InvalidArgument(format!(
            "simplex integrals are defined for 1 to 3 nested variables, got {}",
            exponents.len()
        )));
    }
    // innermost variable first: integrate t_q from 0 to t_(q-1), and so on
    let mut power = 0u32;
    let mut coefficient = 1.0;
    for &a in exponents.iter().rev() {
        power += a + 1;
        coefficient /= power as f64;
    }
    Ok((coefficient, power))
}

/// `int_0^T dt_1 int_0^t_1 dt_2 ... t_1^a_1 ... t_q^a_q` for a fixed `T`.
pub fn simplex_monomial_integral(exponents: &[u32], t: f64) -> Result<f64> {
    let (c, p) = simplex_integral_coefficient(exponents)?;
    Ok(c * t.powi(p as i32))
}

/// Same integral with `T` left as the variable `horizon_index` of `vars`.
pub fn simplex_monomial_integral_symbolic(
    exponents: &[u32],
    vars: &Vars,
    horizon_index: usize,
) -> Result<RealPoly> {
    let (c, p) = simplex_integral_coefficient(exponents)?;
    if p > 255 {
        return Err(Error::ExponentOverflow(p));
    }
    Ok(RealPoly::from_terms(vars, [(Monomial::var_pow(horizon_index, p), c)]))
}

/// Magnus exponent `Omega^(n)` for the control problem `(sys, ansatz)`.
pub fn magnus_omega(sys: &QuantumSystem, ansatz: &ControlAnsatz, n: usize) -> Result<MagnusResult> {
    let generator = generator_poly(sys, ansatz)?;
    magnus_from_generator(&generator, ansatz.horizon, n)
}

/// Magnus exponent for any generator polynomial whose first variable is the
/// time variable `t`. With a symbolic horizon the remaining variables must
/// contain `T`.
pub fn magnus_from_generator(generator: &MatrixPoly, horizon: Horizon, n: usize) -> Result<MagnusResult> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "Magnus order must be 1, 2 or 3, got {n}"
        )));
    }
    let names = generator.vars().names();
    if names.first().map(String::as_str) != Some(TIME_VAR) {
        return Err(Error::UnknownVariable(TIME_VAR.into()));
    }
    let rest = Vars::new(names[1..].iter().cloned())?;
    let (rows, cols) = generator.shape();

    let integral = |exps: &[u32]| -> Result<RealPoly> {
        match horizon {
            Horizon::Fixed(t) => Ok(RealPoly::constant(&rest, simplex_monomial_integral(exps, t)?)),
            Horizon::Symbolic => {
                let idx = rest
                    .index_of(HORIZON_VAR)
                    .ok_or_else(|| Error::UnknownVariable(HORIZON_VAR.into()))?;
                simplex_monomial_integral_symbolic(exps, &rest, idx)
            }
        }
    };

    let pieces = generator.split_variable(0, &rest);
    let mut omega = MatrixPoly::zero(&rest, rows, cols);

    for (a, b) in &pieces {
        omega = omega.add(&b.mul_scalar_poly(&integral(&[*a])?)?)?;
    }

    if n >= 2 {
        let k = pieces.len();
        let mut comm = vec![vec![MatrixPoly::zero(&rest, rows, cols); k]; k];
        for i in 0..k {
            for j in (i + 1)..k {
                let c = pieces[i].1.commutator(&pieces[j].1)?;
                comm[j][i] = c.neg();
                comm[i][j] = c;
            }
        }

        if n >= 2 {
            let mut omega2 = MatrixPoly::zero(&rest, rows, cols);
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    let w = integral(&[pieces[i].0, pieces[j].0])?;
                    omega2 = omega2.add(&comm[i][j].mul_scalar_poly(&w)?)?;
                }
            }
            omega = omega.add(&omega2.scale(0.5))?;
        }

        if n >= 3 {
            let mut omega3 = MatrixPoly::zero(&rest, rows, cols);
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        // [B_i, [B_j, B_l]] + [[B_i, B_j], B_l]
                        let nested = pieces[i]
                            .1
                            .commutator(&comm[j][l])?
                            .add(&comm[i][j].commutator(&pieces[l].1)?)?;
                        if nested.is_zero() {
                            continue;
                        }
                        let w = integral(&[pieces[i].0, pieces[j].0, pieces[l].0])?;
                        omega3 = omega3.add(&nested.mul_scalar_poly(&w)?)?;
                    }
                }
            }
            omega = omega.add(&omega3.scale(1.0 / 6.0))?;
        }
    }

    Ok(MagnusResult { omega, order: n })
}

/// `int_0^T ||A(t)||_2 dt` by composite Gauss-Legendre quadrature; the
/// Magnus series is guaranteed to converge when this is below pi.
pub fn convergence_functional(sys: &QuantumSystem, ansatz: &ControlAnsatz, x: &[f64]) -> Result<f64> {
    let t_end = ansatz.fixed_time().ok_or_else(|| {
        Error::InvalidArgument("convergence functional needs a fixed terminal time".into())
    })?;
    if x.len() != ansatz.m {
        return Err(Error::LengthMismatch {
            expected: ansatz.m,
            got: x.len(),
        });
    }
    Ok(composite_gauss_legendre(
        |t| linalg::normal_spectral_radius(&sys.generator_at(ansatz.field(x, t))),
        0.0,
        t_end,
        CONVERGENCE_NODES,
        CONVERGENCE_PANELS,
    ))
}

/// Convenience: `-i (H0 + E(t) V)` evaluated numerically.
pub fn generator_matrix(sys: &QuantumSystem, ansatz: &ControlAnsatz, x: &[f64], t: f64) -> CMatrix {
    sys.generator_at(ansatz.field(x, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_anti_hermitian, gauss_legendre, real};
    use crate::systems::transmon_three_level;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Tensor Gauss-Legendre over the triangle `0 <= t2 <= t1 <= T`.
    fn triangle_quadrature<F: FnMut(f64, f64) -> CMatrix>(t_end: f64, dim: usize, mut f: F) -> CMatrix {
        let (x, w) = gauss_legendre(24);
        let mut acc = CMatrix::zeros(dim, dim);
        for (xi, wi) in x.iter().zip(&w) {
            let t1 = 0.5 * t_end * (xi + 1.0);
            for (xj, wj) in x.iter().zip(&w) {
                let t2 = 0.5 * t1 * (xj + 1.0);
                acc += f(t1, t2) * real(0.25 * t_end * t1 * wi * wj);
            }
        }
        acc
    }

    #[test]
    fn simplex_integral_examples() {
        assert!((simplex_monomial_integral(&[0, 0], 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((simplex_monomial_integral(&[0, 0, 0], 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let exact = simplex_monomial_integral(&[0, 1], 1.0).unwrap();
        assert!((exact - 1.0 / 6.0).abs() < 1e-15);
        let quad = triangle_quadrature(1.0, 1, |_t1, t2| CMatrix::from_element(1, 1, real(t2)));
        assert!((quad[(0, 0)].re - exact).abs() < 1e-10);
        assert!(simplex_monomial_integral(&[0, 0, 0, 0], 1.0).is_err());
        assert!(simplex_monomial_integral(&[], 1.0).is_err());
    }

    #[test]
    fn triple_simplex_closed_form() {
        for (a1, a2, a3) in [(0, 0, 0), (1, 2, 0), (2, 1, 3)] {
            let t: f64 = 0.7;
            let expected = t.powi(a1 + a2 + a3 + 3)
                / (((a3 + 1) * (a2 + a3 + 2) * (a1 + a2 + a3 + 3)) as f64);
            let got = simplex_monomial_integral(&[a1 as u32, a2 as u32, a3 as u32], t).unwrap();
            assert!((got - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn symbolic_integral_is_monomial_in_horizon() {
        let vars = Vars::new(["x1", "T"]).unwrap();
        let p = simplex_monomial_integral_symbolic(&[1, 0], &vars, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.evaluate(&[0.0, 2.0]).unwrap() - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn generator_slices() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let a = generator_poly(&sys, &ansatz).unwrap();
        let at_zero = a.evaluate(&[0.37, 0.0, 0.0, 0.0]).unwrap();
        assert!((at_zero - sys.h0() * (-I)).norm() < 1e-15);

        let single = ControlAnsatz::fixed(1, 0.5).unwrap();
        let a1 = generator_poly(&sys, &single).unwrap();
        let v = a1.evaluate(&[0.2, 0.8]).unwrap();
        assert!((v - (sys.h0() + sys.v() * real(0.8)) * (-I)).norm() < 1e-15);
    }

    #[test]
    fn generator_matches_direct_construction() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let a = generator_poly(&sys, &ansatz).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let t = rng.random_range(0.0..0.5);
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let e = x[0] + x[1] * t + x[2] * t * t;
            let direct = (sys.h0() + sys.v() * real(e)) * (-I);
            let point = [t, x[0], x[1], x[2]];
            let err = (a.evaluate(&point).unwrap() - direct).camax();
            assert!(err < 1e-13);
        }
    }

    #[test]
    fn first_order_at_zero_control() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let om = magnus_omega(&sys, &ansatz, 1).unwrap().omega;
        let v = om.evaluate(&[0.0, 0.0, 0.0]).unwrap();
        assert!((v - sys.h0() * (-I * 0.5)).norm() < 1e-15);
    }

    #[test]
    fn second_order_vanishes_for_constant_control() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(1, 0.5).unwrap();
        let o1 = magnus_omega(&sys, &ansatz, 1).unwrap().omega;
        let o2 = magnus_omega(&sys, &ansatz, 2).unwrap().omega;
        assert_eq!(o1, o2);
    }

    #[test]
    fn second_order_linear_coefficient_matches_quadrature() {
        let sys = transmon_three_level();
        let t_end = 0.5;
        let ansatz = ControlAnsatz::fixed(2, t_end).unwrap();
        let o1 = magnus_omega(&sys, &ansatz, 1).unwrap().omega;
        let o2 = magnus_omega(&sys, &ansatz, 2).unwrap().omega;
        let omega2 = o2.sub(&o1).unwrap();
        let coef = omega2.poly().coefficient(&Monomial::var(1)).unwrap().clone();

        let comm = sys.h0() * sys.v() - sys.v() * sys.h0();
        assert!((&coef - &comm * real(t_end.powi(3) / 12.0)).camax() < 1e-15);

        // unit x2, zero x1: 1/2 int int [A(t1), A(t2)]
        let quad = triangle_quadrature(t_end, 3, |t1, t2| {
            let a1 = sys.generator_at(t1);
            let a2 = sys.generator_at(t2);
            (&a1 * &a2 - &a2 * &a1) * real(0.5)
        });
        assert!((coef - quad).camax() < 1e-9);
    }

    #[test]
    fn degree_structure_and_anti_hermiticity() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let o1 = magnus_omega(&sys, &ansatz, 1).unwrap().omega;
        let o2 = magnus_omega(&sys, &ansatz, 2).unwrap().omega;
        let o3 = magnus_omega(&sys, &ansatz, 3).unwrap().omega;
        assert_eq!(o1.degree(), 1);
        let omega2 = o2.sub(&o1).unwrap();
        assert!(omega2.terms().all(|(m, _)| m.degree() == 1));
        let omega3 = o3.sub(&o2).unwrap();
        assert!(omega3.terms().all(|(m, _)| (1..=2).contains(&m.degree())));
        assert_eq!(o3.degree(), 2);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            for om in [&o1, &o2, &o3] {
                let v = om.evaluate(&x).unwrap();
                assert!(linalg::anti_hermiticity_defect(&v) < 1e-10);
                let u = expm_anti_hermitian(&v);
                assert!(linalg::unitarity_defect(&u) < 1e-9);
            }
        }
    }

    #[test]
    fn symbolic_horizon_agrees_with_fixed() {
        let sys = transmon_three_level();
        let fixed = magnus_omega(&sys, &ControlAnsatz::fixed(2, 0.4).unwrap(), 3).unwrap();
        let symbolic = magnus_omega(&sys, &ControlAnsatz::symbolic(2).unwrap(), 3).unwrap();
        assert_eq!(symbolic.omega.vars().names(), &["x1", "x2", "T"]);
        let x = [0.3, -0.7];
        let a = fixed.omega.evaluate(&x).unwrap();
        let b = symbolic.omega.evaluate(&[x[0], x[1], 0.4]).unwrap();
        assert!((a - b).camax() < 1e-14);
    }

    #[test]
    fn invalid_order_rejected() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(1, 0.5).unwrap();
        assert!(magnus_omega(&sys, &ansatz, 0).is_err());
        assert!(magnus_omega(&sys, &ansatz, 4).is_err());
    }

    #[test]
    fn convergence_functional_examples() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let at_zero = convergence_functional(&sys, &ansatz, &[0.0; 3]).unwrap();
        assert!((at_zero - 0.5 * 1.0).abs() < 1e-14);

        let drift_free = QuantumSystem::new(CMatrix::zeros(3, 3), sys.v().clone()).unwrap();
        let single = ControlAnsatz::fixed(1, 0.5).unwrap();
        let v_norm = linalg::spectral_norm(sys.v());
        let got = convergence_functional(&drift_free, &single, &[-0.8]).unwrap();
        assert!((got - 0.8 * 0.5 * v_norm).abs() < 1e-13);

        let symbolic = ControlAnsatz::symbolic(1).unwrap();
        assert!(convergence_functional(&sys, &symbolic, &[0.0]).is_err());
    }

    #[test]
    fn convergence_functional_matches_dense_trapezoid() {
        let sys = transmon_three_level();
        let ansatz = ControlAnsatz::fixed(3, 0.5).unwrap();
        let x = [1.0, 1.0, 1.0];
        let got = convergence_functional(&sys, &ansatz, &x).unwrap();
        let panels = 10_000;
        let h = 0.5 / panels as f64;
        let f = |t: f64| linalg::spectral_norm(&generator_matrix(&sys, &ansatz, &x, t));
        let mut trap = 0.5 * (f(0.0) + f(0.5));
        for k in 1..panels {
            trap += f(k as f64 * h);
        }
        trap *= h;
        assert!((got - trap).abs() < 1e-8, "{got} vs {trap}");
    }
}
