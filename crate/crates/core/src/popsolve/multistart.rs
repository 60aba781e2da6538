//! Seeded multistart local refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::refine::{local_refine, RefineResult, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::objective::PopProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartReport {
    pub starts: Vec<Vec<f64>>,
    pub runs: Vec<RefineResult>,
    pub best: usize,
}

impl MultistartReport {
    pub fn best(&self) -> &RefineResult {
        &self.runs[self.best]
    }
}

/// Feasible runs beat infeasible ones, then lower objective wins; ties go to
/// the earlier run.
pub(crate) fn better(a: &RefineResult, b: &RefineResult) -> bool {
    let fa = a.violation <= FEASIBILITY_TOL;
    let fb = b.violation <= FEASIBILITY_TOL;
    match (fa, fb) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.value < b.value,
        (false, false) => a.violation < b.violation,
    }
}

/// Uniform starting points in `[-R, R]^n`.
pub fn starting_points(nvars: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..nvars).map(|_| rng.random_range(-radius..=radius)).collect())
        .collect()
}

/// `count` refinements from random starts in the problem's box. Runs are
/// independent and gathered in start order, so the report depends only on
/// the seed.
pub fn multistart(prob: &PopProblem, count: usize, seed: u64, max_iter: usize) -> Result<MultistartReport> {
    if count == 0 {
        return Err(Error::InvalidArgument("multistart needs at least one start".into()));
    }
    let starts = starting_points(prob.nvars(), prob.box_radius(), count, seed);
    let runs = starts
        .par_iter()
        .map(|x0| local_refine(prob, x0, max_iter))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        if better(r, &runs[best]) {
            best = i;
        }
    }
    Ok(MultistartReport { starts, runs, best })
}
