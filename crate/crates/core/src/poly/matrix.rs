use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Coefficient, ComplexPoly, Monomial, NeumaierSumComplex, Poly, RealPoly, Vars};
use crate::error::{Error, Result};

/// Dense complex matrix used as a polynomial coefficient.
pub type CMatrix = DMatrix<Complex64>;

/// Largest imaginary residue tolerated when a quantity must be real.
const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-10;

impl Coefficient for CMatrix {
    fn magnitude(&self) -> f64 {
        self.iter()
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0, f64::max)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, factor: f64) -> Self {
        self * Complex64::new(factor, 0.0)
    }
}

/// Polynomial in real variables whose coefficients are `rows x cols`
/// complex matrices. Variables commute; coefficients do not.
#[derive(Clone, PartialEq)]
pub struct MatrixPoly {
    rows: usize,
    cols: usize,
    poly: Poly<CMatrix>,
}

impl std::fmt::Debug for MatrixPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MatrixPoly[{}x{}] ", self.rows, self.cols)?;
        self.poly.fmt(f)
    }
}

impl MatrixPoly {
    pub fn zero(vars: &Vars, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            poly: Poly::zero(vars),
        }
    }

    pub fn constant(vars: &Vars, matrix: CMatrix) -> Self {
        Self {
            rows: matrix.nrows(),
            cols: matrix.ncols(),
            poly: Poly::from_terms(vars, [(Monomial::ONE, matrix)]),
        }
    }

    pub fn identity(vars: &Vars, dim: usize) -> Self {
        Self::constant(vars, CMatrix::identity(dim, dim))
    }

    pub fn from_terms<I>(vars: &Vars, rows: usize, cols: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, CMatrix)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        for (_, m) in &terms {
            if m.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch {
                    left: (rows, cols),
                    right: m.shape(),
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            poly: Poly::from_terms(vars, terms),
        })
    }

    pub(crate) fn from_poly(rows: usize, cols: usize, poly: Poly<CMatrix>) -> Self {
        Self { rows, cols, poly }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn vars(&self) -> &Vars {
        self.poly.vars()
    }

    pub fn poly(&self) -> &Poly<CMatrix> {
        &self.poly
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CMatrix)> {
        self.poly.terms()
    }

    pub fn len(&self) -> usize {
        self.poly.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn degree_in_set(&self, indices: &[usize]) -> u32 {
        self.poly.degree_in_set(indices)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_poly(self.rows, self.cols, self.poly.add(&other.poly)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_poly(self.rows, self.cols, self.poly.sub(&other.poly)?))
    }

    pub fn neg(&self) -> Self {
        Self::from_poly(self.rows, self.cols, self.poly.neg())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_poly(self.rows, self.cols, self.poly.scale(factor))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self::from_poly(
            self.rows,
            self.cols,
            self.poly.map_coefficients(|m| m * factor),
        )
    }

    /// Matrix product `self * other` with the coefficient order preserved.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self::from_poly(self.rows, other.cols, self.poly.mul(&other.poly)?))
    }

    /// Product with a scalar real polynomial.
    pub fn mul_scalar_poly(&self, scalar: &RealPoly) -> Result<Self> {
        self.vars().check_same(scalar.vars())?;
        Ok(Self::from_poly(
            self.rows,
            self.cols,
            self.poly
                .mul_with(scalar, |m, &s| m * Complex64::new(s, 0.0)),
        ))
    }

    /// `matrix * self`.
    pub fn left_mul_matrix(&self, matrix: &CMatrix) -> Result<Self> {
        if matrix.ncols() != self.rows {
            return Err(Error::ShapeMismatch {
                left: matrix.shape(),
                right: self.shape(),
            });
        }
        Ok(Self::from_poly(
            matrix.nrows(),
            self.cols,
            self.poly.map_coefficients(|c| matrix * c),
        ))
    }

    /// `self * matrix`.
    pub fn right_mul_matrix(&self, matrix: &CMatrix) -> Result<Self> {
        if self.cols != matrix.nrows() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: matrix.shape(),
            });
        }
        Ok(Self::from_poly(
            self.rows,
            matrix.ncols(),
            self.poly.map_coefficients(|c| c * matrix),
        ))
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Coefficient-wise conjugate transpose; variables are real so the
    /// monomials are unchanged.
    pub fn conj_transpose(&self) -> Self {
        Self::from_poly(
            self.cols,
            self.rows,
            self.poly.map_coefficients(|m| m.adjoint()),
        )
    }

    /// Scalar polynomial held in entry `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> ComplexPoly {
        self.poly.map_coefficients(|m| m[(row, col)])
    }

    /// `||P(x)||_F^2 = Tr(P^dagger P)` as a real polynomial.
    ///
    /// The trace is formed from the conjugate transpose, so a nonzero
    /// imaginary part exposes an inconsistent conjugation.
    pub fn frobenius_square(&self) -> Result<RealPoly> {
        let adjoint = self.conj_transpose();
        let mut acc: HashMap<Monomial, Complex64> = HashMap::new();
        for k in 0..self.cols {
            for j in 0..self.rows {
                let left = adjoint.entry(k, j);
                let right = self.entry(j, k);
                for (ma, ca) in left.terms() {
                    for (mb, cb) in right.terms() {
                        *acc.entry(ma.mul(*mb)).or_default() += ca * cb;
                    }
                }
            }
        }
        let scale = acc.values().map(|c| c.re.abs()).fold(1.0, f64::max);
        let residue = acc.values().map(|c| c.im.abs()).fold(0.0, f64::max);
        if residue > IMAGINARY_RESIDUE_LIMIT * scale {
            return Err(Error::ImaginaryResidue(residue));
        }
        Ok(RealPoly::from_terms(
            self.vars(),
            acc.into_iter().map(|(m, c)| (m, c.re)),
        ))
    }

    /// Evaluates every entry with compensated summation.
    pub fn evaluate(&self, point: &[f64]) -> Result<CMatrix> {
        let powers = self.poly.power_table(point)?;
        let mut sums = vec![NeumaierSumComplex::default(); self.rows * self.cols];
        for (m, c) in self.poly.terms() {
            let v = m.eval_with(&powers);
            for (slot, z) in sums.iter_mut().zip(c.iter()) {
                slot.add(z * v);
            }
        }
        Ok(CMatrix::from_iterator(
            self.rows,
            self.cols,
            sums.iter().map(NeumaierSumComplex::value),
        ))
    }

    /// See [`Poly::split_variable`].
    pub fn split_variable(&self, index: usize, rest: &Vars) -> Vec<(u32, MatrixPoly)> {
        self.poly
            .split_variable(index, rest)
            .into_iter()
            .map(|(e, p)| (e, Self::from_poly(self.rows, self.cols, p)))
            .collect()
    }
}
