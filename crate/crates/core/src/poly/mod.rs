//! Multivariate polynomials with real, complex, or complex-matrix
//! coefficients over a shared set of real variables.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], so iteration is in
//! graded-lex order. Every arithmetic operation drops coefficients whose
//! magnitude (max-abs entry for matrices) falls below [`PRUNE_THRESHOLD`].

mod matrix;
mod monomial;
mod real;
mod sum;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use matrix::{CMatrix, MatrixPoly};
pub use monomial::{monomials_up_to, Monomial, MAX_VARS};
pub use real::RealPoly;
pub use sum::{NeumaierSum, NeumaierSumComplex};

/// Coefficients below this magnitude are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Ordered list of variable names shared by a family of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_VARS {
            return Err(Error::TooManyVariables(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Self(names.into()))
    }

    /// `prefix1, prefix2, ..., prefixN`.
    pub fn numbered(prefix: &str, count: usize) -> Result<Self> {
        Self::new((1..=count).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// New variable set with `name` inserted in front.
    pub fn prepend(&self, name: &str) -> Result<Self> {
        Self::new(std::iter::once(name.to_string()).chain(self.0.iter().cloned()))
    }

    /// New variable set with `name` appended.
    pub fn append(&self, name: &str) -> Result<Self> {
        Self::new(self.0.iter().cloned().chain(std::iter::once(name.to_string())))
    }

    pub(crate) fn check_same(&self, other: &Vars) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VariableMismatch {
                left: self.0.to_vec(),
                right: other.0.to_vec(),
            })
        }
    }
}

impl fmt::Debug for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Coefficient ring operations needed by [`Poly`].
pub trait Coefficient: Clone + fmt::Debug + Send + Sync {
    /// Max-abs magnitude used by the prune rule.
    fn magnitude(&self) -> f64;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, factor: f64) -> Self;

    fn is_negligible(&self) -> bool {
        self.magnitude() < PRUNE_THRESHOLD
    }
}

impl Coefficient for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
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
        self * factor
    }
}

impl Coefficient for Complex64 {
    fn magnitude(&self) -> f64 {
        self.re.abs().max(self.im.abs())
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
        self * factor
    }
}

/// Sparse polynomial in commuting real variables with coefficients `C`.
#[derive(Clone, PartialEq)]
pub struct Poly<C> {
    vars: Vars,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Poly<C> {
    pub fn zero(vars: &Vars) -> Self {
        Self {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, merging
    /// duplicates and pruning.
    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut acc: HashMap<Monomial, C> = HashMap::new();
        for (m, c) in terms {
            accumulate(&mut acc, m, c);
        }
        Self::from_map(vars, acc)
    }

    fn from_map(vars: &Vars, acc: HashMap<Monomial, C>) -> Self {
        Self {
            vars: vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_negligible()).collect(),
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the empty polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Highest exponent of variable `index` over all terms.
    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(index)).max().unwrap_or(0)
    }

    /// Total degree restricted to the given variable indices.
    pub fn degree_in_set(&self, indices: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| indices.iter().map(|&i| m.exponent(i)).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        let mut acc: HashMap<Monomial, C> = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        for (m, c) in &other.terms {
            accumulate(&mut acc, *m, c.clone());
        }
        Ok(Self::from_map(&self.vars, acc))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, c.scale(factor)))
                .filter(|(_, c)| !c.is_negligible())
                .collect(),
        }
    }

    /// Product with the coefficient order preserved (`self` on the left).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        Ok(self.mul_with(other, |a, b| a.mul(b)))
    }

    pub(crate) fn mul_with<D, F>(&self, other: &Poly<D>, product: F) -> Self
    where
        D: Coefficient,
        F: Fn(&C, &D) -> C,
    {
        let mut acc: HashMap<Monomial, C> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut acc, ma.mul(*mb), product(ca, cb));
            }
        }
        Self::from_map(&self.vars, acc)
    }

    /// Coefficient-wise map, pruning the result.
    pub fn map_coefficients<D: Coefficient, F: Fn(&C) -> D>(&self, f: F) -> Poly<D> {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, f(c)))
                .filter(|(_, c)| !c.is_negligible())
                .collect(),
        }
    }

    /// Splits off variable `index`: returns `(exponent, coefficient poly)`
    /// pairs where the coefficient polynomial lives in the remaining
    /// variables `rest`.
    pub fn split_variable(&self, index: usize, rest: &Vars) -> Vec<(u32, Poly<C>)> {
        let mut groups: BTreeMap<u32, Vec<(Monomial, C)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, reduced) = m.split_var(index);
            groups.entry(e).or_default().push((reduced, c.clone()));
        }
        groups
            .into_iter()
            .map(|(e, terms)| (e, Poly::from_terms(rest, terms)))
            .collect()
    }

    /// Max coefficient magnitude; zero for the empty polynomial.
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(C::magnitude).fold(0.0, f64::max)
    }

    /// Table `powers[v][e] = point[v]^e` up to the degree needed.
    pub(crate) fn power_table(&self, point: &[f64]) -> Result<Vec<Vec<f64>>> {
        if point.len() != self.nvars() {
            return Err(Error::LengthMismatch {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        Ok(power_table(point, |v| self.degree_in(v)))
    }
}

pub(crate) fn power_table(point: &[f64], degree_of: impl Fn(usize) -> u32) -> Vec<Vec<f64>> {
    point
        .iter()
        .enumerate()
        .map(|(v, &x)| {
            let d = degree_of(v) as usize;
            let mut row = Vec::with_capacity(d + 1);
            row.push(1.0);
            for e in 1..=d {
                row.push(row[e - 1] * x);
            }
            row
        })
        .collect()
}

#[inline]
fn accumulate<C: Coefficient>(acc: &mut HashMap<Monomial, C>, m: Monomial, c: C) {
    match acc.get_mut(&m) {
        Some(existing) => existing.add_assign(&c),
        None => {
            acc.insert(m, c);
        }
    }
}

impl<C: Coefficient> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (m, c) in &self.terms {
            map.entry(&m.display(self.vars.names()), c);
        }
        map.finish()
    }
}

pub type ComplexPoly = Poly<Complex64>;
