//! Dense moment relaxation of a polynomial program.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::sdp::{solve_sdp, SdpProblem, SdpSolution};
use crate::error::{Error, Result};
use crate::objective::PopProblem;
use crate::poly::{monomials_up_to, Monomial, RealPoly};

/// Localizing block of one constraint.
#[derive(Debug, Clone)]
pub struct LocalizingBlock {
    pub constraint: usize,
    pub basis: Vec<Monomial>,
}

#[derive(Debug, Clone)]
pub struct MomentRelaxation {
    order: u32,
    nvars: usize,
    basis: Vec<Monomial>,
    /// Monomials of degree `<= 2d`; position 0 is the constant monomial.
    moments: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    localizing: Vec<LocalizingBlock>,
    offset: f64,
    sdp: SdpProblem,
}

/// Builds the order-`d` relaxation. Every monomial up to degree `2d` gets a
/// pseudo-moment `y_alpha`; `y_0 = 1` is folded into the constant matrix.
pub fn build_relaxation(prob: &PopProblem, order: u32) -> Result<MomentRelaxation> {
    let degree = prob.max_degree();
    if 2 * order < degree {
        return Err(Error::RelaxationOrderTooSmall { order, degree });
    }
    let n = prob.nvars();
    let basis = monomials_up_to(n, order);
    let moments = monomials_up_to(n, 2 * order);
    let index: HashMap<Monomial, usize> = moments.iter().enumerate().map(|(i, m)| (*m, i)).collect();

    let localizing: Vec<LocalizingBlock> = prob
        .constraints()
        .iter()
        .enumerate()
        .map(|(j, g)| LocalizingBlock {
            constraint: j,
            basis: monomials_up_to(n, order - g.degree().div_ceil(2)),
        })
        .collect();

    let mut cost = vec![0.0; moments.len() - 1];
    for (m, c) in prob.objective().terms() {
        if !m.is_one() {
            cost[index[m] - 1] += c;
        }
    }
    let offset = prob.objective().constant_term();

    let mut sizes = vec![basis.len()];
    sizes.extend(localizing.iter().map(|b| b.basis.len()));
    let mut sdp = SdpProblem::new(sizes, cost);

    let place = |sdp: &mut SdpProblem, block: usize, r: usize, c: usize, m: Monomial, v: f64| {
        let i = index[&m];
        if i == 0 {
            sdp.add_constant(block, r, c, v)
        } else {
            sdp.add_coefficient(i - 1, block, r, c, v)
        }
    };
    for r in 0..basis.len() {
        for c in r..basis.len() {
            place(&mut sdp, 0, r, c, basis[r].mul(basis[c]), 1.0)?;
        }
    }
    for (k, block) in localizing.iter().enumerate() {
        let g = &prob.constraints()[block.constraint];
        for r in 0..block.basis.len() {
            for c in r..block.basis.len() {
                let base = block.basis[r].mul(block.basis[c]);
                for (m, v) in g.terms() {
                    place(&mut sdp, k + 1, r, c, base.mul(*m), *v)?;
                }
            }
        }
    }

    Ok(MomentRelaxation {
        order,
        nvars: n,
        basis,
        moments,
        index,
        localizing,
        offset,
        sdp,
    })
}

impl MomentRelaxation {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn moments(&self) -> &[Monomial] {
        &self.moments
    }

    pub fn localizing(&self) -> &[LocalizingBlock] {
        &self.localizing
    }

    pub fn sdp(&self) -> &SdpProblem {
        &self.sdp
    }

    /// Constant term of the objective, not carried by the SDP cost.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Position of a monomial in the full moment vector.
    pub fn moment_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Full moment vector `(1, y_1, ...)` from an SDP solution.
    pub fn full_moments(&self, sol: &SdpSolution) -> Vec<f64> {
        std::iter::once(1.0).chain(sol.y.iter().copied()).collect()
    }

    /// `M_d(y)` for a full moment vector.
    pub fn moment_matrix(&self, moments: &[f64]) -> DMatrix<f64> {
        let n = self.basis.len();
        DMatrix::from_fn(n, n, |r, c| moments[self.index[&self.basis[r].mul(self.basis[c])]])
    }

    /// Riesz functional `L_y(p) = sum p_alpha y_alpha`.
    pub fn riesz(&self, p: &RealPoly, moments: &[f64]) -> Result<f64> {
        p.terms()
            .map(|(m, c)| {
                self.index
                    .get(m)
                    .map(|&i| c * moments[i])
                    .ok_or(Error::RelaxationOrderTooSmall {
                        order: self.order,
                        degree: m.degree(),
                    })
            })
            .sum()
    }

    pub fn solve(&self) -> Result<RelaxationSolution> {
        let sdp = solve_sdp(&self.sdp)?;
        let moments = self.full_moments(&sdp);
        Ok(RelaxationSolution {
            // The dual objective certifies the bound whenever X is feasible;
            // the moment value agrees with it up to the duality gap.
            lower_bound: sdp.dual_objective.min(sdp.primal_objective) + self.offset,
            moment_value: sdp.primal_objective + self.offset,
            moments,
            sdp,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationSolution {
    /// Certified lower bound `f_d*` on the program's minimum.
    pub lower_bound: f64,
    /// `L_y(f)` at the returned moments.
    pub moment_value: f64,
    pub moments: Vec<f64>,
    pub sdp: SdpSolution,
}
