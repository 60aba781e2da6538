use super::{Monomial, NeumaierSum, Poly, Vars};
use crate::error::{Error, Result};

/// Real polynomial: objectives and constraints of a polynomial program.
pub type RealPoly = Poly<f64>;

impl Poly<f64> {
    pub fn constant(vars: &Vars, value: f64) -> Self {
        Self::from_terms(vars, [(Monomial::ONE, value)])
    }

    /// The polynomial `name` (a single variable).
    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let index = vars
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Self::var_index(vars, index))
    }

    pub fn var_index(vars: &Vars, index: usize) -> Self {
        Self::from_terms(vars, [(Monomial::var(index), 1.0)])
    }

    /// Constant term, zero if absent.
    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Monomial::ONE).copied().unwrap_or(0.0)
    }

    /// Direct monomial evaluation with compensated summation.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        let powers = self.power_table(point)?;
        Ok(self.evaluate_with(&powers))
    }

    pub(crate) fn evaluate_with(&self, powers: &[Vec<f64>]) -> f64 {
        let mut sum = NeumaierSum::new();
        for (m, c) in self.terms() {
            sum.add(c * m.eval_with(powers));
        }
        sum.value()
    }

    /// Formal partial derivative with respect to `name`.
    pub fn differentiate(&self, name: &str) -> Result<Self> {
        let index = self
            .vars()
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.differentiate_index(index))
    }

    pub fn differentiate_index(&self, index: usize) -> Self {
        let terms = self.terms().filter_map(|(m, c)| {
            let e = m.exponent(index);
            m.div_var(index).map(|reduced| (reduced, c * e as f64))
        });
        Self::from_terms(self.vars(), terms)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars()).map(|i| self.differentiate_index(i)).collect()
    }
}
