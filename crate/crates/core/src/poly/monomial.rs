use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Maximum number of variables a monomial can carry.
pub const MAX_VARS: usize = 8;

/// Exponent vector packed one byte per variable.
///
/// Ordering is graded lexicographic with the first variable leading: lower
/// total degree first, and within a degree `x1` sorts before `x2`. The
/// ascending order therefore reads `1, x1, x2, x1^2, x1 x2, x2^2, ...`, which
/// is the canonical order of the moment-matrix basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    packed: u64,
    degree: u16,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { packed: 0, degree: 0 };

    pub fn from_exponents(exponents: &[u32]) -> Result<Self> {
        if exponents.len() > MAX_VARS {
            return Err(Error::TooManyVariables(exponents.len()));
        }
        let mut packed = 0u64;
        let mut degree = 0u16;
        for (i, &e) in exponents.iter().enumerate() {
            if e > 255 {
                return Err(Error::ExponentOverflow(e));
            }
            packed |= (e as u64) << (8 * i);
            degree += e as u16;
        }
        Ok(Self { packed, degree })
    }

    /// `x_index^power`.
    pub fn var_pow(index: usize, power: u32) -> Self {
        assert!(index < MAX_VARS && power <= 255);
        Self {
            packed: (power as u64) << (8 * index),
            degree: power as u16,
        }
    }

    pub fn var(index: usize) -> Self {
        Self::var_pow(index, 1)
    }

    #[inline]
    pub fn exponent(&self, index: usize) -> u32 {
        ((self.packed >> (8 * index)) & 0xff) as u32
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree as u32
    }

    pub fn is_one(&self) -> bool {
        self.packed == 0
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    /// Product of two monomials. Panics if an exponent would exceed 255.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Monomial) -> Monomial {
        let degree = self.degree + other.degree;
        if degree > 255 {
            for i in 0..MAX_VARS {
                assert!(
                    self.exponent(i) + other.exponent(i) <= 255,
                    "monomial exponent overflow"
                );
            }
        }
        Monomial {
            packed: self.packed + other.packed,
            degree,
        }
    }

    /// Lowers the exponent of `index` by one, if it is positive.
    pub fn div_var(self, index: usize) -> Option<Monomial> {
        if self.exponent(index) == 0 {
            return None;
        }
        Some(Monomial {
            packed: self.packed - (1u64 << (8 * index)),
            degree: self.degree - 1,
        })
    }

    /// Removes variable `index`, shifting the following variables down.
    /// Returns the removed exponent alongside the reduced monomial.
    pub fn split_var(self, index: usize) -> (u32, Monomial) {
        let e = self.exponent(index);
        let low_mask = if index == 0 { 0 } else { u64::MAX >> (64 - 8 * index) };
        let low = self.packed & low_mask;
        let high = if index + 1 >= MAX_VARS {
            0
        } else {
            (self.packed >> (8 * (index + 1))) << (8 * index)
        };
        (
            e,
            Monomial {
                packed: low | high,
                degree: self.degree - e as u16,
            },
        )
    }

    /// Evaluates the monomial given a table `powers[v][e] = point[v]^e`.
    #[inline]
    pub fn eval_with(&self, powers: &[Vec<f64>]) -> f64 {
        let mut acc = 1.0;
        for (v, table) in powers.iter().enumerate() {
            let e = self.exponent(v) as usize;
            if e > 0 {
                acc *= table[e];
            }
        }
        acc
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, name) in names.iter().enumerate() {
            match self.exponent(i) {
                0 => {}
                1 => parts.push(name.clone()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for i in 0..MAX_VARS {
                match other.exponent(i).cmp(&self.exponent(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<u32> = (0..MAX_VARS).map(|i| self.exponent(i)).collect();
        let last = exps.iter().rposition(|&e| e > 0).map_or(0, |p| p + 1);
        write!(f, "x{:?}", &exps[..last])
    }
}

/// All monomials in `nvars` variables of total degree at most `max_degree`,
/// in ascending graded-lex order.
pub fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    for deg in 0..=max_degree {
        let mut level = Vec::new();
        fill_degree(&mut exps, 0, deg, &mut level);
        level.sort();
        out.extend(level);
    }
    out
}

fn fill_degree(exps: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == exps.len() {
        exps[pos] = remaining;
        out.push(Monomial::from_exponents(exps).expect("bounded exponents"));
        exps[pos] = 0;
        return;
    }
    if exps.is_empty() {
        if remaining == 0 {
            out.push(Monomial::ONE);
        }
        return;
    }
    for e in (0..=remaining).rev() {
        exps[pos] = e;
        fill_degree(exps, pos + 1, remaining - e, out);
    }
    exps[pos] = 0;
}
