//! Global and local solvers for polynomial programs.
//!
//! The moment relaxation gives a lower bound and, through its first-order
//! moments, a candidate point; local refinement polishes that candidate and a
//! seeded multistart provides an independent cross-check.

pub mod extraction;
pub mod multistart;
pub mod refine;
pub mod relaxation;
pub mod sdp;

use serde::{Deserialize, Serialize};

pub use extraction::{extract_minimizer, Extraction, RANK_ONE_RATIO};
pub use multistart::{multistart, starting_points, MultistartReport};
pub use refine::{local_refine, minimize, PolyFunction, RefineResult, Smooth, DEFAULT_MAX_ITER};
pub use relaxation::{build_relaxation, LocalizingBlock, MomentRelaxation, RelaxationSolution};
pub use sdp::{solve_sdp, Entry, SdpProblem, SdpSolution, SdpStatus};

use crate::error::{Error, Result};
use crate::objective::PopProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relaxation order `d`; `None` skips the relaxation.
    pub relaxation_order: Option<u32>,
    /// Number of random starts; 0 skips the multistart.
    pub multistart: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            relaxation_order: Some(4),
            multistart: 16,
            seed: 0,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationReport {
    pub order: u32,
    /// `f_d*` of the relaxed program.
    pub lower_bound: f64,
    pub status: SdpStatus,
    pub gap: f64,
    pub iterations: usize,
    /// Set when the relaxation was built on a different (cheaper) program
    /// than the one refined, so the bound does not certify it.
    pub surrogate: bool,
    pub extraction: Extraction,
    /// Objective of the solved program at the extracted point.
    pub extracted_value: f64,
    /// Objective of the relaxed program at the extracted point.
    pub relaxed_value: f64,
    /// Refinement started at the extracted point.
    pub refined: RefineResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub relaxation: Option<RelaxationReport>,
    pub multistart_best: Option<RefineResult>,
    pub multistart_runs: usize,
    /// Best point over all refinements.
    pub best: RefineResult,
}

impl SolveReport {
    pub fn lower_bound(&self) -> Option<f64> {
        self.relaxation.as_ref().map(|r| r.lower_bound)
    }
}

/// Solves `prob`. When `relaxed` is given the moment relaxation is built on
/// it instead of `prob` (it must share the variables); refinement and
/// multistart always work on `prob`.
pub fn solve(prob: &PopProblem, relaxed: Option<&PopProblem>, opts: &SolveOptions) -> Result<SolveReport> {
    if opts.relaxation_order.is_none() && opts.multistart == 0 {
        return Err(Error::InvalidArgument(
            "enable the relaxation or the multistart".into(),
        ));
    }
    let mut candidates = Vec::new();

    let relaxation = match opts.relaxation_order {
        Some(order) => {
            let target = relaxed.unwrap_or(prob);
            if target.vars() != prob.vars() {
                return Err(Error::VariableMismatch {
                    left: prob.vars().names().to_vec(),
                    right: target.vars().names().to_vec(),
                });
            }
            let rel = build_relaxation(target, order)?;
            let sol = rel.solve()?;
            let extraction = extract_minimizer(&rel, &sol);
            let refined = local_refine(prob, &extraction.point, opts.max_iter)?;
            candidates.push(refined.clone());
            Some(RelaxationReport {
                order,
                lower_bound: sol.lower_bound,
                status: sol.sdp.status,
                gap: sol.sdp.gap,
                iterations: sol.sdp.iterations,
                surrogate: relaxed.is_some(),
                extracted_value: prob.value(&extraction.point)?,
                relaxed_value: target.value(&extraction.point)?,
                extraction,
                refined,
            })
        }
        None => None,
    };

    let multistart_best = if opts.multistart > 0 {
        let rep = multistart(prob, opts.multistart, opts.seed, opts.max_iter)?;
        let best = rep.best().clone();
        candidates.push(best.clone());
        Some(best)
    } else {
        None
    };

    let mut best = candidates[0].clone();
    for c in &candidates[1..] {
        if multistart::better(c, &best) {
            best = c.clone();
        }
    }
    Ok(SolveReport {
        relaxation,
        multistart_best,
        multistart_runs: opts.multistart,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Monomial, RealPoly, Vars};

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
    fn relaxation_then_refinement() {
        let opts = SolveOptions {
            relaxation_order: Some(2),
            multistart: 0,
            ..SolveOptions::default()
        };
        let rep = solve(&double_well(), None, &opts).unwrap();
        let rel = rep.relaxation.as_ref().unwrap();
        assert!(rel.lower_bound.abs() < 1e-6);
        assert!(!rel.extraction.rank_one);
        assert!((rep.best.x[0].abs() - 1.0).abs() < 1e-6);
        assert!(rel.lower_bound <= rep.best.value + 1e-6);
        assert!(rep.multistart_best.is_none());
    }

    #[test]
    fn solve_is_deterministic_and_serializable() {
        let opts = SolveOptions {
            relaxation_order: Some(2),
            multistart: 4,
            seed: 3,
            ..SolveOptions::default()
        };
        let a = solve(&double_well(), None, &opts).unwrap();
        let b = solve(&double_well(), None, &opts).unwrap();
        assert_eq!(a, b);
        let none = SolveOptions {
            relaxation_order: None,
            multistart: 0,
            ..opts
        };
        assert!(solve(&double_well(), None, &none).is_err());
    }
}
