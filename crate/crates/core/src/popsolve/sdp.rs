//! Dense primal-dual interior-point solver for block-diagonal SDPs in the
//! form
//!
//! ```text
//! minimize    c^T y
//! subject to  Z = A_0 + sum_i y_i A_i  is PSD (per block)
//! ```
//!
//! with dual `maximize -<A_0, X>` subject to `<A_i, X> = c_i`, `X` PSD.
//! Search directions use Nesterov-Todd scaling with a Mehrotra
//! predictor-corrector. The best iterate seen is returned.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GAP_TARGET: f64 = 1e-8;
const FEAS_TARGET: f64 = 1e-8;
const OPTIMAL_GAP: f64 = 1e-7;
const MAX_ITER: usize = 200;
/// Iterations without a better iterate before giving up.
const STALL_ITERS: usize = 25;
const STEP_FRACTION: f64 = 0.95;

/// One nonzero of a symmetric coefficient matrix. Off-diagonal entries stand
/// for both `(row, col)` and `(col, row)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    block_sizes: Vec<usize>,
    constant: Vec<DMatrix<f64>>,
    /// Coefficient matrix of each free variable, as symmetric entries.
    coefficients: Vec<Vec<Entry>>,
    cost: Vec<f64>,
}

/// Expanded nonzero `(var, row, col, value)`; both triangles present.
#[derive(Debug, Clone, Copy)]
struct Nz {
    var: usize,
    row: usize,
    col: usize,
    value: f64,
}

impl SdpProblem {
    pub fn new(block_sizes: Vec<usize>, cost: Vec<f64>) -> Self {
        let constant = block_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        Self {
            coefficients: vec![Vec::new(); cost.len()],
            block_sizes,
            constant,
            cost,
        }
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    /// Adds `value` to entry `(row, col)` and `(col, row)` of `A_0`.
    pub fn add_constant(&mut self, block: usize, row: usize, col: usize, value: f64) -> Result<()> {
        self.check_entry(block, row, col)?;
        let m = &mut self.constant[block];
        m[(row, col)] += value;
        if row != col {
            m[(col, row)] += value;
        }
        Ok(())
    }

    /// Adds `value` to entry `(row, col)` and `(col, row)` of `A_var`.
    pub fn add_coefficient(
        &mut self,
        var: usize,
        block: usize,
        row: usize,
        col: usize,
        value: f64,
    ) -> Result<()> {
        self.check_entry(block, row, col)?;
        if var >= self.num_vars() {
            return Err(Error::InvalidArgument(format!("variable {var} out of range")));
        }
        let (row, col) = (row.min(col), row.max(col));
        self.coefficients[var].push(Entry {
            block,
            row,
            col,
            value,
        });
        Ok(())
    }

    fn check_entry(&self, block: usize, row: usize, col: usize) -> Result<()> {
        match self.block_sizes.get(block) {
            Some(&n) if row < n && col < n => Ok(()),
            _ => Err(Error::InvalidArgument(format!(
                "entry ({row}, {col}) of block {block} out of range"
            ))),
        }
    }

    /// `A_0 + sum_i y_i A_i`, block by block.
    pub fn slack(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut z = self.constant.clone();
        for (i, entries) in self.coefficients.iter().enumerate() {
            for e in entries {
                let m = &mut z[e.block];
                m[(e.row, e.col)] += y[i] * e.value;
                if e.row != e.col {
                    m[(e.col, e.row)] += y[i] * e.value;
                }
            }
        }
        z
    }

    fn expanded(&self) -> Vec<Vec<Nz>> {
        let mut per_block = vec![Vec::new(); self.block_sizes.len()];
        for (var, entries) in self.coefficients.iter().enumerate() {
            for e in entries {
                per_block[e.block].push(Nz {
                    var,
                    row: e.row,
                    col: e.col,
                    value: e.value,
                });
                if e.row != e.col {
                    per_block[e.block].push(Nz {
                        var,
                        row: e.col,
                        col: e.row,
                        value: e.value,
                    });
                }
            }
        }
        per_block
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    /// Stopped at the iteration limit or a stalled step before reaching the
    /// optimality tolerances; the iterate is still returned.
    Inaccurate,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub y: Vec<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub z: Vec<DMatrix<f64>>,
    /// `c^T y`.
    pub primal_objective: f64,
    /// `-<A_0, X>`.
    pub dual_objective: f64,
    /// `|primal - dual| / (1 + |primal| + |dual|)`.
    pub gap: f64,
    /// Relative residual of `Z = A_0 + sum y_i A_i`.
    pub slack_residual: f64,
    /// Relative residual of `<A_i, X> = c_i`.
    pub equality_residual: f64,
    pub iterations: usize,
    pub status: SdpStatus,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

fn frob_inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a.dot(b)).sum()
}

fn frob_norm(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// `<A_i, M>` for every variable.
fn apply_adjoint(nz: &[Vec<Nz>], m: &[DMatrix<f64>], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (b, entries) in nz.iter().enumerate() {
        for e in entries {
            out[e.var] += e.value * m[b][(e.col, e.row)];
        }
    }
}

/// `sum_i d_i A_i`.
fn apply(nz: &[Vec<Nz>], sizes: &[usize], d: &[f64]) -> Vec<DMatrix<f64>> {
    let mut out: Vec<DMatrix<f64>> = sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    for (b, entries) in nz.iter().enumerate() {
        for e in entries {
            out[b][(e.row, e.col)] += d[e.var] * e.value;
        }
    }
    out
}

/// Largest step in `(0, 1]` keeping `M + a D` positive definite, damped.
fn max_step(chol_lower: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let l_inv = chol_lower
        .clone()
        .solve_lower_triangular(&DMatrix::identity(d.nrows(), d.nrows()))
        .expect("triangular factor is nonsingular");
    let scaled = sym(&l_inv * d * l_inv.transpose());
    let min_eig = SymmetricEigen::new(scaled)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig >= 0.0 {
        1.0
    } else {
        (-STEP_FRACTION / min_eig).min(1.0)
    }
}

/// `M + a D` for the largest `a` among `a0, a0/2, ...` that keeps every
/// block Cholesky-factorizable.
fn backtrack(m: &[DMatrix<f64>], d: &[DMatrix<f64>], a0: f64) -> Option<(Vec<DMatrix<f64>>, f64)> {
    let mut a = a0;
    while a >= 1e-12 {
        let next: Vec<DMatrix<f64>> = m.iter().zip(d).map(|(m, d)| sym(m + d * a)).collect();
        if next.iter().all(|b| Cholesky::new(b.clone()).is_some()) {
            return Some((next, a));
        }
        a *= 0.5;
    }
    None
}

/// Nesterov-Todd scaling point `W` with `W Z W = X`, from `X = L L^T`.
fn nt_scaling(x_lower: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    let m = sym(x_lower.transpose() * z * x_lower);
    let eig = SymmetricEigen::new(m);
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt()));
    let g = x_lower * &eig.eigenvectors;
    sym(&g * inv_sqrt * g.transpose())
}

/// Cholesky factor of the Gram matrix `<A_i, A_j>`, if it is nonsingular.
fn gram_factor(nz: &[Vec<Nz>], nvars: usize) -> Option<Cholesky<f64, Dyn>> {
    let mut gram = DMatrix::<f64>::zeros(nvars, nvars);
    for entries in nz {
        let mut by_pos: HashMap<(usize, usize), Vec<(usize, f64)>> = HashMap::new();
        for e in entries {
            by_pos.entry((e.row, e.col)).or_default().push((e.var, e.value));
        }
        for list in by_pos.values() {
            for &(i, a) in list {
                for &(j, b) in list {
                    gram[(i, j)] += a * b;
                }
            }
        }
    }
    Cholesky::new(gram)
}

/// Best iterate so far, by the larger of the gap and residuals relative to
/// their optimality thresholds.
struct Iterate {
    y: Vec<f64>,
    x: Vec<DMatrix<f64>>,
    z: Vec<DMatrix<f64>>,
    merit: f64,
    iteration: usize,
}

struct Factor {
    lower: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

fn factor(m: &DMatrix<f64>) -> Option<Factor> {
    let chol = Cholesky::new(m.clone())?;
    Some(Factor {
        lower: chol.l(),
        inverse: chol.inverse(),
    })
}

/// Solves the SDP. Never fails silently: an unfinished solve comes back with
/// a non-optimal status and its last residuals.
pub fn solve_sdp(problem: &SdpProblem) -> Result<SdpSolution> {
    let sizes = problem.block_sizes.clone();
    let nvars = problem.num_vars();
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument("SDP has no matrix blocks".into()));
    }
    let nz = problem.expanded();
    let gram = gram_factor(&nz, nvars);
    let c = DVector::from_column_slice(&problem.cost);
    let c_norm = c.norm();
    let a0_norm = frob_norm(&problem.constant);

    let scale = 1f64
        .max(c.amax())
        .max(problem.constant.iter().map(|m| m.amax()).fold(0.0, f64::max))
        .sqrt()
        * 10.0;
    let mut y = vec![0.0; nvars];
    let mut x: Vec<DMatrix<f64>> = sizes.iter().map(|&n| DMatrix::identity(n, n) * scale).collect();
    let mut z = x.clone();
    let mut status = SdpStatus::Inaccurate;
    let mut iterations = 0;
    let mut scratch = vec![0.0; nvars];
    let mut best: Option<Iterate> = None;

    let measure = |y: &[f64], x: &[DMatrix<f64>], z: &[DMatrix<f64>], scratch: &mut [f64]| {
        let slack = problem.slack(y);
        let rd: Vec<DMatrix<f64>> = slack.iter().zip(z).map(|(s, z)| s - z).collect();
        apply_adjoint(&nz, x, scratch);
        let rp: Vec<f64> = problem.cost.iter().zip(scratch.iter()).map(|(c, ax)| c - ax).collect();
        let pobj: f64 = problem.cost.iter().zip(y).map(|(c, y)| c * y).sum();
        let dobj = -frob_inner(&problem.constant, x);
        (rd, rp, pobj, dobj)
    };

    loop {
        let (rd, rp, pobj, dobj) = measure(&y, &x, &z, &mut scratch);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let slack_res = frob_norm(&rd) / (1.0 + a0_norm);
        let eq_res = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + c_norm);
        if !(gap.is_finite() && slack_res.is_finite() && eq_res.is_finite()) {
            if best.is_none() {
                status = SdpStatus::NumericalFailure;
            }
            break;
        }
        let merit = (gap / OPTIMAL_GAP).max(slack_res.max(eq_res) / FEAS_TARGET);
        if best.as_ref().is_none_or(|b| merit < b.merit) {
            best = Some(Iterate {
                y: y.clone(),
                x: x.clone(),
                z: z.clone(),
                merit,
                iteration: iterations,
            });
        }
        if gap < GAP_TARGET && slack_res < FEAS_TARGET && eq_res < FEAS_TARGET {
            break;
        }
        if iterations >= MAX_ITER || best.as_ref().is_some_and(|b| iterations - b.iteration >= STALL_ITERS) {
            break;
        }
        iterations += 1;

        let mu = frob_inner(&x, &z) / total as f64;
        let Some(z_factors) = z.iter().map(factor).collect::<Option<Vec<_>>>() else {
            break;
        };
        let Some(x_factors) = x.iter().map(factor).collect::<Option<Vec<_>>>() else {
            break;
        };
        let zinv: Vec<DMatrix<f64>> = z_factors.iter().map(|f| f.inverse.clone()).collect();
        let w: Vec<DMatrix<f64>> = x_factors.iter().zip(&z).map(|(f, zb)| nt_scaling(&f.lower, zb)).collect();

        // Schur complement S_ij = <A_i W A_j W>
        let mut schur = DMatrix::<f64>::zeros(nvars, nvars);
        for (b, entries) in nz.iter().enumerate() {
            let wb = &w[b];
            for e in entries {
                for f in entries {
                    if f.var < e.var {
                        continue;
                    }
                    schur[(e.var, f.var)] += e.value * f.value * wb[(e.col, f.row)] * wb[(f.col, e.row)];
                }
            }
        }
        for i in 0..nvars {
            for j in 0..i {
                schur[(i, j)] = schur[(j, i)];
            }
        }
        let schur_chol = Cholesky::new(schur.clone()).or_else(|| {
            let base = schur.diagonal().amax().max(1e-300);
            [1e-14, 1e-12, 1e-10].iter().find_map(|rel| {
                let mut s = schur.clone();
                for i in 0..nvars {
                    s[(i, i)] += rel * base;
                }
                Cholesky::new(s)
            })
        });
        let Some(schur_chol) = schur_chol else {
            break;
        };

        let direction = |sigma_mu: f64, corr: Option<&[DMatrix<f64>]>, scratch: &mut [f64]| {
            // rhs_i = sigma mu <A_i, Z^-1> - c_i - <A_i, X Rd Z^-1> - <A_i, Rc>
            let mut m: Vec<DMatrix<f64>> = (0..sizes.len())
                .map(|b| &zinv[b] * sigma_mu - &w[b] * &rd[b] * &w[b])
                .collect();
            if let Some(rc) = corr {
                for (mb, rb) in m.iter_mut().zip(rc) {
                    *mb -= rb;
                }
            }
            apply_adjoint(&nz, &m, scratch);
            let rhs = DVector::from_iterator(
                nvars,
                scratch.iter().zip(&problem.cost).map(|(v, c)| v - c),
            );
            let mut dy = schur_chol.solve(&rhs);
            for _ in 0..2 {
                let r = &rhs - &schur * &dy;
                dy += schur_chol.solve(&r);
            }
            let dy: Vec<f64> = dy.iter().copied().collect();
            let adz = apply(&nz, &sizes, &dy);
            let dz: Vec<DMatrix<f64>> = adz.iter().zip(&rd).map(|(a, r)| a + r).collect();
            let dx: Vec<DMatrix<f64>> = (0..sizes.len())
                .map(|b| {
                    let mut d = &zinv[b] * sigma_mu - &x[b] - &w[b] * &dz[b] * &w[b];
                    if let Some(rc) = corr {
                        d -= &rc[b];
                    }
                    sym(d)
                })
                .collect();
            // restore A(dx) = rp, which the scaled solve meets only to rounding
            let dx = match &gram {
                Some(g) => {
                    apply_adjoint(&nz, &dx, scratch);
                    let miss = DVector::from_iterator(nvars, rp.iter().zip(scratch.iter()).map(|(r, a)| r - a));
                    let w: Vec<f64> = g.solve(&miss).iter().copied().collect();
                    dx.iter().zip(apply(&nz, &sizes, &w)).map(|(d, c)| d + c).collect()
                }
                None => dx,
            };
            (dy, dx, dz)
        };
        let steps = |dx: &[DMatrix<f64>], dz: &[DMatrix<f64>]| {
            let ap = x_factors
                .iter()
                .zip(dx)
                .map(|(f, d)| max_step(&f.lower, d))
                .fold(1.0, f64::min);
            let ad = z_factors
                .iter()
                .zip(dz)
                .map(|(f, d)| max_step(&f.lower, d))
                .fold(1.0, f64::min);
            (ap, ad)
        };

        // predictor
        let (_, dxa, dza) = direction(0.0, None, &mut scratch);
        let (ap, ad) = steps(&dxa, &dza);
        let x_aff: Vec<DMatrix<f64>> = x.iter().zip(&dxa).map(|(x, d)| x + d * ap).collect();
        let z_aff: Vec<DMatrix<f64>> = z.iter().zip(&dza).map(|(z, d)| z + d * ad).collect();
        let mu_aff = frob_inner(&x_aff, &z_aff) / total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let rc: Vec<DMatrix<f64>> = (0..sizes.len()).map(|b| sym(&dxa[b] * &dza[b] * &zinv[b])).collect();
        let (dy, dx, dz) = direction(sigma * mu, Some(&rc), &mut scratch);
        let (ap, ad) = steps(&dx, &dz);
        // rounding can leave the damped step on the boundary; back off
        let Some((x_new, _)) = backtrack(&x, &dx, ap) else {
            break;
        };
        let Some((z_new, ad)) = backtrack(&z, &dz, ad) else {
            break;
        };
        x = x_new;
        z = z_new;
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
    }

    if let Some(b) = best {
        (y, x, z) = (b.y, b.x, b.z);
    }
    let (rd, rp, pobj, dobj) = measure(&y, &x, &z, &mut scratch);
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    let slack_residual = frob_norm(&rd) / (1.0 + a0_norm);
    let equality_residual = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + c_norm);
    if status != SdpStatus::NumericalFailure
        && gap < OPTIMAL_GAP
        && slack_residual < FEAS_TARGET
        && equality_residual < FEAS_TARGET
    {
        status = SdpStatus::Optimal;
    } else if status != SdpStatus::NumericalFailure {
        status = SdpStatus::Inaccurate;
    }
    Ok(SdpSolution {
        y,
        x,
        z,
        primal_objective: pobj,
        dual_objective: dobj,
        gap,
        slack_residual,
        equality_residual,
        iterations,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_by_two_psd_boundary() {
        // min y  s.t. [[1, y], [y, 1]] PSD
        let mut p = SdpProblem::new(vec![2], vec![1.0]);
        p.add_constant(0, 0, 0, 1.0).unwrap();
        p.add_constant(0, 1, 1, 1.0).unwrap();
        p.add_coefficient(0, 0, 0, 1, 1.0).unwrap();
        let s = solve_sdp(&p).unwrap();
        assert!(s.is_optimal(), "{:?}", s.status);
        assert!((s.y[0] + 1.0).abs() < 1e-7, "y = {}", s.y[0]);
        assert!((s.dual_objective + 1.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_out_of_range_entries() {
        let mut p = SdpProblem::new(vec![2], vec![1.0]);
        assert!(p.add_constant(0, 2, 0, 1.0).is_err());
        assert!(p.add_coefficient(1, 0, 0, 0, 1.0).is_err());
        assert!(p.add_coefficient(0, 1, 0, 0, 1.0).is_err());
    }

    /// `min c^T y  s.t.  b_k + a_k^T y >= 0` by enumerating vertices of the
    /// feasible polyhedron (two variables).
    fn lp_by_vertices(a: &[[f64; 2]], b: &[f64], c: [f64; 2]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let det = a[i][0] * a[j][1] - a[i][1] * a[j][0];
                if det.abs() < 1e-12 {
                    continue;
                }
                // a_i^T y = -b_i, a_j^T y = -b_j
                let y0 = (-b[i] * a[j][1] + b[j] * a[i][1]) / det;
                let y1 = (-a[i][0] * b[j] + a[j][0] * b[i]) / det;
                let feasible = (0..a.len()).all(|k| b[k] + a[k][0] * y0 + a[k][1] * y1 >= -1e-9);
                if feasible {
                    best = best.min(c[0] * y0 + c[1] * y1);
                }
            }
        }
        best
    }

    #[test]
    fn diagonal_sdps_match_linear_programs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut solved = 0;
        while solved < 10 {
            let k = 6;
            // bounded polytope: a box plus random cuts, all containing 0
            let mut a: Vec<[f64; 2]> = vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
            let mut b = vec![1.0; 4];
            for _ in 4..k {
                a.push([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
                b.push(rng.random_range(0.2..1.0));
            }
            let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let mut p = SdpProblem::new(vec![1; k], c.to_vec());
            for (blk, (row, bk)) in a.iter().zip(&b).enumerate() {
                p.add_constant(blk, 0, 0, *bk).unwrap();
                p.add_coefficient(0, blk, 0, 0, row[0]).unwrap();
                p.add_coefficient(1, blk, 0, 0, row[1]).unwrap();
            }
            let oracle = lp_by_vertices(&a, &b, c);
            let s = solve_sdp(&p).unwrap();
            assert!(s.is_optimal());
            assert!((s.primal_objective - oracle).abs() < 1e-7, "{} vs {oracle}", s.primal_objective);
            solved += 1;
        }
    }

    #[test]
    fn mixed_blocks_with_dual_certificate() {
        // min y1 + y2  s.t. [[y1, 1], [1, y2]] PSD, y1 >= 0: optimum 2 at y = (1, 1)
        let mut p = SdpProblem::new(vec![2, 1], vec![1.0, 1.0]);
        p.add_constant(0, 0, 1, 1.0).unwrap();
        p.add_coefficient(0, 0, 0, 0, 1.0).unwrap();
        p.add_coefficient(1, 0, 1, 1, 1.0).unwrap();
        p.add_coefficient(0, 1, 0, 0, 1.0).unwrap();
        let s = solve_sdp(&p).unwrap();
        assert!(s.is_optimal());
        assert!((s.primal_objective - 2.0).abs() < 1e-7);
        assert!((s.y[0] - 1.0).abs() < 1e-4 && (s.y[1] - 1.0).abs() < 1e-4);
        for xb in &s.x {
            let e = SymmetricEigen::new(xb.clone()).eigenvalues;
            assert!(e.min() > -1e-10);
        }
    }

    #[test]
    fn infeasible_problem_is_not_reported_optimal() {
        // y PSD and -1 - y PSD has no solution
        let mut p = SdpProblem::new(vec![1, 1], vec![1.0]);
        p.add_coefficient(0, 0, 0, 0, 1.0).unwrap();
        p.add_constant(1, 0, 0, -1.0).unwrap();
        p.add_coefficient(0, 1, 0, 0, -1.0).unwrap();
        let s = solve_sdp(&p).unwrap();
        assert!(!s.is_optimal());
    }
}
