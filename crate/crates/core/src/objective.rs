//! Assembly of the polynomial programs: gate synthesis, state transfer,
//! their time-optimal variants, and Hamiltonian identification.
//!
//! All four share one residual: with `E+ = exp_p(Omega/2)` and
//! `E- = exp_p(-Omega/2)`, unitary invariance of the Frobenius norm turns
//! `||U(T) - U*||_F^2` into `||E+ - E- U*||_F^2`, a real polynomial in the
//! variables of `Omega`.

use num_complex::Complex64;

use crate::chebexp::{cheb_exp, ExpSign};
use crate::error::{Error, Result};
use crate::linalg::{self, hermiticity_defect, unitarity_defect};
use crate::magnus::{
    assemble_generator, magnus_from_generator, magnus_omega, ControlAnsatz, GeneratorTerm,
    Horizon, QuantumSystem, HORIZON_VAR,
};
use crate::poly::{CMatrix, MatrixPoly, Monomial, RealPoly, Vars};

/// Half-width of the sampling box when a problem does not set one.
pub const DEFAULT_BOX_RADIUS: f64 = 2.0;
/// Target accuracy for time-optimal programs when none is given.
pub const DEFAULT_EPS: f64 = 0.1;

const UNITARY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// Target unitary of a gate-synthesis problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GateTarget(CMatrix);

impl GateTarget {
    pub fn new(u: CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::ShapeMismatch {
                left: u.shape(),
                right: (u.nrows(), u.nrows()),
            });
        }
        let defect = unitarity_defect(&u);
        if defect >= UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(u))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Initial and desired final state of a state-transfer problem.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    psi0: Vec<Complex64>,
    psi_star: Vec<Complex64>,
}

impl StatePair {
    pub fn new(psi0: Vec<Complex64>, psi_star: Vec<Complex64>) -> Result<Self> {
        if psi0.len() != psi_star.len() {
            return Err(Error::ShapeMismatch {
                left: (psi0.len(), 1),
                right: (psi_star.len(), 1),
            });
        }
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm(&psi0) - 1.0).abs() >= NORM_TOL {
            return Err(Error::NotNormalized("psi0"));
        }
        if (norm(&psi_star) - 1.0).abs() >= NORM_TOL {
            return Err(Error::NotNormalized("psi_star"));
        }
        Ok(Self { psi0, psi_star })
    }

    pub fn psi0(&self) -> &[Complex64] {
        &self.psi0
    }

    pub fn psi_star(&self) -> &[Complex64] {
        &self.psi_star
    }

    fn column(v: &[Complex64]) -> CMatrix {
        CMatrix::from_column_slice(v.len(), 1, v)
    }
}

/// Control coupling `V(z) = V_fixed + sum_q z_q (E_rc + E_cr)` with real
/// unknowns placed symmetrically at `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingPattern {
    unknowns: Vec<(usize, usize)>,
    fixed: CMatrix,
}

impl CouplingPattern {
    pub fn new(dim: usize, unknowns: Vec<(usize, usize)>, fixed: Option<CMatrix>) -> Result<Self> {
        let fixed = fixed.unwrap_or_else(|| CMatrix::zeros(dim, dim));
        if fixed.shape() != (dim, dim) {
            return Err(Error::ShapeMismatch {
                left: (dim, dim),
                right: fixed.shape(),
            });
        }
        if hermiticity_defect(&fixed) >= 1e-12 {
            return Err(Error::NotHermitian("fixed coupling"));
        }
        if unknowns.is_empty() {
            return Err(Error::InvalidArgument("pattern has no unknown couplings".into()));
        }
        for (i, &(r, c)) in unknowns.iter().enumerate() {
            if r >= dim || c >= dim {
                return Err(Error::InvalidArgument(format!(
                    "coupling position ({r}, {c}) outside a {dim}x{dim} matrix"
                )));
            }
            let clash = unknowns[..i]
                .iter()
                .any(|&(r2, c2)| (r2, c2) == (r, c) || (r2, c2) == (c, r));
            if clash {
                return Err(Error::InvalidArgument(format!(
                    "coupling position ({r}, {c}) listed twice"
                )));
            }
        }
        Ok(Self { unknowns, fixed })
    }

    pub fn dim(&self) -> usize {
        self.fixed.nrows()
    }

    pub fn count(&self) -> usize {
        self.unknowns.len()
    }

    pub fn unknowns(&self) -> &[(usize, usize)] {
        &self.unknowns
    }

    /// Symmetric unit matrix for unknown `q`.
    pub fn basis_matrix(&self, q: usize) -> CMatrix {
        let (r, c) = self.unknowns[q];
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        m[(r, c)] = linalg::real(1.0);
        m[(c, r)] = linalg::real(1.0);
        m
    }

    /// `V(z)`.
    pub fn matrix(&self, z: &[f64]) -> Result<CMatrix> {
        if z.len() != self.count() {
            return Err(Error::LengthMismatch {
                expected: self.count(),
                got: z.len(),
            });
        }
        let mut v = self.fixed.clone();
        for (q, &zq) in z.iter().enumerate() {
            v += self.basis_matrix(q) * linalg::real(zq);
        }
        Ok(v)
    }

    /// Variables `z1..zq`.
    pub fn vars(&self) -> Vars {
        Vars::numbered("z", self.count()).expect("bounded variable count")
    }
}

/// A polynomial program: minimize `objective` subject to `g_j >= 0`.
#[derive(Debug, Clone)]
pub struct PopProblem {
    vars: Vars,
    objective: RealPoly,
    constraints: Vec<RealPoly>,
    box_radius: f64,
}

impl PopProblem {
    pub fn new(objective: RealPoly, constraints: Vec<RealPoly>) -> Result<Self> {
        let vars = objective.vars().clone();
        for g in &constraints {
            if g.vars() != &vars {
                return Err(Error::VariableMismatch {
                    left: vars.names().to_vec(),
                    right: g.vars().names().to_vec(),
                });
            }
        }
        Ok(Self {
            vars,
            objective,
            constraints,
            box_radius: DEFAULT_BOX_RADIUS,
        })
    }

    pub fn unconstrained(objective: RealPoly) -> Self {
        Self::new(objective, Vec::new()).expect("no constraints to mismatch")
    }

    /// Half-width of the box `[-R, R]^n` used to draw multistart points.
    pub fn with_box_radius(mut self, radius: f64) -> Self {
        self.box_radius = radius;
        self
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn objective(&self) -> &RealPoly {
        &self.objective
    }

    pub fn constraints(&self) -> &[RealPoly] {
        &self.constraints
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    pub fn is_constrained(&self) -> bool {
        !self.constraints.is_empty()
    }

    /// Largest degree among the objective and constraints.
    pub fn max_degree(&self) -> u32 {
        self.constraints
            .iter()
            .map(RealPoly::degree)
            .chain(std::iter::once(self.objective.degree()))
            .max()
            .unwrap_or(0)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.objective.evaluate(x)
    }

    /// Most negative constraint value, clipped at zero (0 when feasible).
    pub fn violation(&self, x: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for g in &self.constraints {
            worst = worst.max(-g.evaluate(x)?);
        }
        Ok(worst)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.violation(x)? <= tol)
    }

    /// Returns a copy with extra constraints appended.
    pub fn with_constraints(&self, extra: Vec<RealPoly>) -> Result<Self> {
        let mut all = self.constraints.clone();
        all.extend(extra);
        Ok(Self::new(self.objective.clone(), all)?.with_box_radius(self.box_radius))
    }
}

/// Partial derivatives of the objective.
pub fn gradient(problem: &PopProblem) -> Vec<RealPoly> {
    problem.objective.gradient()
}

/// `exp_p(+Omega/2)` and `exp_p(-Omega/2)` for one Magnus exponent. Building
/// this once lets many targets share the expensive expansion.
#[derive(Debug, Clone)]
pub struct ExpPair {
    pub plus: MatrixPoly,
    pub minus: MatrixPoly,
    pub order: usize,
}

impl ExpPair {
    pub fn new(omega: &MatrixPoly, order: usize) -> Result<Self> {
        Ok(Self {
            plus: cheb_exp(omega, order, ExpSign::Plus)?.result,
            minus: cheb_exp(omega, order, ExpSign::Minus)?.result,
            order,
        })
    }

    pub fn vars(&self) -> &Vars {
        self.plus.vars()
    }

    /// `||E+ - E- U*||_F^2`.
    pub fn gate_residual(&self, target: &GateTarget) -> Result<RealPoly> {
        self.plus
            .sub(&self.minus.right_mul_matrix(target.matrix())?)?
            .frobenius_square()
    }

    /// `||E+ psi0 - E- psi*||^2`.
    pub fn state_residual(&self, pair: &StatePair) -> Result<RealPoly> {
        let psi0 = StatePair::column(&pair.psi0);
        let psi_star = StatePair::column(&pair.psi_star);
        self.plus
            .right_mul_matrix(&psi0)?
            .sub(&self.minus.right_mul_matrix(&psi_star)?)?
            .frobenius_square()
    }
}

fn exp_pair(sys: &QuantumSystem, ansatz: &ControlAnsatz, n: usize, p: usize) -> Result<ExpPair> {
    let omega = magnus_omega(sys, ansatz, n)?.omega;
    ExpPair::new(&omega, p)
}

fn require_fixed(ansatz: &ControlAnsatz) -> Result<()> {
    match ansatz.horizon() {
        Horizon::Fixed(_) => Ok(()),
        Horizon::Symbolic => Err(Error::InvalidArgument(
            "this program needs a fixed terminal time".into(),
        )),
    }
}

fn require_symbolic(ansatz: &ControlAnsatz) -> Result<()> {
    match ansatz.horizon() {
        Horizon::Symbolic => Ok(()),
        Horizon::Fixed(_) => Err(Error::InvalidArgument(
            "time-optimal programs need a symbolic terminal time".into(),
        )),
    }
}

fn check_dim(sys_dim: usize, other: usize) -> Result<()> {
    if sys_dim != other {
        return Err(Error::ShapeMismatch {
            left: (sys_dim, sys_dim),
            right: (other, other),
        });
    }
    Ok(())
}

/// Unconstrained gate-synthesis program in the control coefficients.
pub fn gate_objective(
    sys: &QuantumSystem,
    ansatz: &ControlAnsatz,
    target: &GateTarget,
    n: usize,
    p: usize,
) -> Result<PopProblem> {
    require_fixed(ansatz)?;
    check_dim(sys.dim(), target.matrix().nrows())?;
    let f = exp_pair(sys, ansatz, n, p)?.gate_residual(target)?;
    Ok(PopProblem::unconstrained(f))
}

/// Unconstrained state-transfer program.
pub fn state_objective(
    sys: &QuantumSystem,
    ansatz: &ControlAnsatz,
    pair: &StatePair,
    n: usize,
    p: usize,
) -> Result<PopProblem> {
    require_fixed(ansatz)?;
    check_dim(sys.dim(), pair.psi0.len())?;
    let f = exp_pair(sys, ansatz, n, p)?.state_residual(pair)?;
    Ok(PopProblem::unconstrained(f))
}

/// Options of the time-optimal programs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinTimeOptions {
    /// Required accuracy: the residual must not exceed `eps^2`.
    pub eps: f64,
    /// Ball and horizon bounds that make the feasible set compact.
    pub bounds: Option<CompactBounds>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactBounds {
    /// `sum x_k^2 <= radius^2`.
    pub radius: f64,
    /// `T <= t_max`.
    pub t_max: f64,
}

impl CompactBounds {
    /// `radius = 2`, `t_max = 4 * t_guess`.
    pub fn from_guess(t_guess: f64) -> Self {
        Self {
            radius: DEFAULT_BOX_RADIUS,
            t_max: 4.0 * t_guess,
        }
    }
}

impl Default for MinTimeOptions {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            bounds: Some(CompactBounds::from_guess(0.5)),
        }
    }
}

fn min_time_program(vars: &Vars, residual: RealPoly, opts: &MinTimeOptions) -> Result<PopProblem> {
    let t_index = vars
        .index_of(HORIZON_VAR)
        .ok_or_else(|| Error::UnknownVariable(HORIZON_VAR.into()))?;
    let horizon = RealPoly::var_index(vars, t_index);
    let mut constraints = vec![
        horizon.clone(),
        RealPoly::constant(vars, opts.eps * opts.eps).sub(&residual)?,
    ];
    let mut radius = DEFAULT_BOX_RADIUS;
    if let Some(b) = opts.bounds {
        let mut ball = RealPoly::constant(vars, b.radius * b.radius);
        for k in (0..vars.len()).filter(|&k| k != t_index) {
            let xk = RealPoly::var_index(vars, k);
            ball = ball.sub(&xk.mul(&xk)?)?;
        }
        constraints.push(ball);
        constraints.push(RealPoly::constant(vars, b.t_max).sub(&horizon)?);
        radius = b.radius.max(b.t_max);
    }
    Ok(PopProblem::new(horizon, constraints)?.with_box_radius(radius))
}

/// Minimize `T` subject to the gate residual staying below `eps^2`.
pub fn min_time_gate(
    sys: &QuantumSystem,
    ansatz: &ControlAnsatz,
    target: &GateTarget,
    n: usize,
    p: usize,
    opts: &MinTimeOptions,
) -> Result<PopProblem> {
    require_symbolic(ansatz)?;
    check_dim(sys.dim(), target.matrix().nrows())?;
    let residual = exp_pair(sys, ansatz, n, p)?.gate_residual(target)?;
    min_time_program(&ansatz.vars(), residual, opts)
}

/// Minimize `T` subject to the state residual staying below `eps^2`.
pub fn min_time_state(
    sys: &QuantumSystem,
    ansatz: &ControlAnsatz,
    pair: &StatePair,
    n: usize,
    p: usize,
    opts: &MinTimeOptions,
) -> Result<PopProblem> {
    require_symbolic(ansatz)?;
    check_dim(sys.dim(), pair.psi0.len())?;
    let residual = exp_pair(sys, ansatz, n, p)?.state_residual(pair)?;
    min_time_program(&ansatz.vars(), residual, opts)
}

/// Magnus exponent of `A(t) = -i (H0 + E(t) V(z))` for a known control
/// `known_x`, as a polynomial in the couplings `z`.
pub fn identification_omega(
    h0: &CMatrix,
    pattern: &CouplingPattern,
    known_x: &[f64],
    ansatz: &ControlAnsatz,
    n: usize,
) -> Result<MatrixPoly> {
    require_fixed(ansatz)?;
    check_dim(h0.nrows(), pattern.dim())?;
    if hermiticity_defect(h0) >= 1e-12 {
        return Err(Error::NotHermitian("H0"));
    }
    if known_x.len() != ansatz.m() {
        return Err(Error::LengthMismatch {
            expected: ansatz.m(),
            got: known_x.len(),
        });
    }
    let mut terms = vec![GeneratorTerm {
        t_power: 0,
        variable: None,
        hamiltonian: h0.clone(),
    }];
    for (k, &xk) in known_x.iter().enumerate() {
        if xk == 0.0 {
            continue;
        }
        terms.push(GeneratorTerm {
            t_power: k as u32,
            variable: None,
            hamiltonian: &pattern.fixed * linalg::real(xk),
        });
        for q in 0..pattern.count() {
            terms.push(GeneratorTerm {
                t_power: k as u32,
                variable: Some(q),
                hamiltonian: pattern.basis_matrix(q) * linalg::real(xk),
            });
        }
    }
    let generator = assemble_generator(&pattern.vars(), pattern.dim(), &terms)?;
    Ok(magnus_from_generator(&generator, ansatz.horizon(), n)?.omega)
}

/// Unconstrained identification program in the unknown couplings `z`.
pub fn identification_objective(
    h0: &CMatrix,
    pattern: &CouplingPattern,
    known_x: &[f64],
    ansatz: &ControlAnsatz,
    target: &GateTarget,
    n: usize,
    p: usize,
) -> Result<PopProblem> {
    check_dim(h0.nrows(), target.matrix().nrows())?;
    let omega = identification_omega(h0, pattern, known_x, ansatz, n)?;
    let f = ExpPair::new(&omega, p)?.gate_residual(target)?;
    Ok(PopProblem::unconstrained(f))
}

/// Sign flips `z -> s * z` (`s_q = +-1`, not all `+1`) that leave the
/// polynomial unchanged up to `tol` in every coefficient.
pub fn sign_symmetries(f: &RealPoly, tol: f64) -> Vec<Vec<f64>> {
    let n = f.nvars();
    let mut found = Vec::new();
    for mask in 1u32..(1 << n) {
        let invariant = f.terms().all(|(m, c)| {
            let odd = (0..n).filter(|&q| mask & (1 << q) != 0).map(|q| m.exponent(q)).sum::<u32>() % 2 == 1;
            !odd || c.abs() <= tol
        });
        if invariant {
            found.push((0..n).map(|q| if mask & (1 << q) != 0 { -1.0 } else { 1.0 }).collect());
        }
    }
    found
}

/// Index of the horizon variable, when present.
pub fn horizon_index(vars: &Vars) -> Option<usize> {
    vars.index_of(HORIZON_VAR)
}

/// The monomial `x_k^2` summed over the given indices, as used by ball
/// constraints.
pub fn squared_norm(vars: &Vars, indices: &[usize]) -> RealPoly {
    RealPoly::from_terms(vars, indices.iter().map(|&k| (Monomial::var_pow(k, 2), 1.0)))
}
