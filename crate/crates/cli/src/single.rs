//! Single-problem runs.

use serde::{Deserialize, Serialize};

use qcpop::magnus::{magnus_omega, ControlAnsatz};
use qcpop::objective::{
    identification_omega, horizon_index, min_time_gate, min_time_state, CompactBounds, ExpPair,
    MinTimeOptions, PopProblem, DEFAULT_EPS,
};
use qcpop::oracle::{frob_distance_sq, propagate, state_distance_sq};
use qcpop::poly::CMatrix;
use qcpop::popsolve::{solve, SolveOptions, SolveReport};

use crate::bench::{in_ball, relaxation_chebyshev, DEFAULT_BENCH_ORDER};
use crate::config::{Mode, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleReport {
    pub mode: Mode,
    pub variables: Vec<String>,
    pub objective_degree: u32,
    pub constraints: usize,
    pub report: SolveReport,
    /// Distance of the propagated solution from the target (Frobenius for
    /// gates, vector norm for states).
    pub true_distance: Option<f64>,
    /// Terminal time found by the time-optimal modes.
    pub horizon: Option<f64>,
}

fn options(cfg: &RunConfig, order: Option<u32>) -> SolveOptions {
    SolveOptions {
        relaxation_order: order,
        multistart: cfg.solver.multistart,
        seed: cfg.solver.seed,
        max_iter: cfg.solver.max_iter,
    }
}

/// Order of the relaxation in fixed-horizon modes, `None` when disabled.
fn fixed_order(cfg: &RunConfig) -> Option<u32> {
    match cfg.solver.relaxation_order {
        Some(0) => None,
        Some(d) => Some(d),
        None => Some(DEFAULT_BENCH_ORDER),
    }
}

/// Solves the single problem described by `cfg`.
pub fn run_single(cfg: &RunConfig) -> CliResult<SingleReport> {
    let n = cfg.truncation.magnus;
    let p = cfg.truncation.chebyshev;
    let radius = cfg.solver.ball_radius;
    let steps = cfg.experiment.oracle_steps;
    match cfg.mode {
        Mode::Gate | Mode::State => {
            let sys = cfg.system()?;
            let ansatz = cfg.fixed_ansatz()?;
            let omega = magnus_omega(&sys, &ansatz, n)?.omega;
            let full = ExpPair::new(&omega, p)?;
            let order = fixed_order(cfg);
            let relaxed_pair = match order {
                Some(d) => Some(ExpPair::new(&omega, relaxation_chebyshev(cfg, &omega, d)?)?),
                None => None,
            };
            let (prob, relaxed) = if cfg.mode == Mode::Gate {
                let target = cfg.gate_target(None)?;
                let relaxed = relaxed_pair
                    .map(|r| in_ball(r.gate_residual(&target)?, radius))
                    .transpose()?;
                (in_ball(full.gate_residual(&target)?, radius)?, relaxed)
            } else {
                let pair = cfg.state_pair(None)?;
                let relaxed = relaxed_pair
                    .map(|r| in_ball(r.state_residual(&pair)?, radius))
                    .transpose()?;
                (in_ball(full.state_residual(&pair)?, radius)?, relaxed)
            };
            let report = solve(&prob, relaxed.as_ref(), &options(cfg, order))?;
            let u_hat = propagate(&sys, &ansatz, &report.best.x, steps)?.u;
            let true_distance = if cfg.mode == Mode::Gate {
                frob_distance_sq(&u_hat, cfg.gate_target(None)?.matrix())?.sqrt()
            } else {
                let pair = cfg.state_pair(None)?;
                state_distance_sq(&u_hat, pair.psi0(), pair.psi_star())?.sqrt()
            };
            Ok(finish(cfg.mode, &prob, report, Some(true_distance), None))
        }
        Mode::Identify => {
            let ansatz = cfg.fixed_ansatz()?;
            let pattern = cfg.pattern()?;
            let h0 = cfg.h0()?;
            let known = cfg.known_controls()?;
            let target = cfg.identify_target(&known)?;
            let omega = identification_omega(&h0, &pattern, &known, &ansatz, n)?;
            let prob = in_ball(ExpPair::new(&omega, p)?.gate_residual(&target)?, radius)?;
            let order = fixed_order(cfg);
            let relaxed = match order {
                Some(d) => {
                    let pair = ExpPair::new(&omega, relaxation_chebyshev(cfg, &omega, d)?)?;
                    Some(in_ball(pair.gate_residual(&target)?, radius)?)
                }
                None => None,
            };
            let report = solve(&prob, relaxed.as_ref(), &options(cfg, order))?;
            let sys_hat = qcpop::magnus::QuantumSystem::new(h0, pattern.matrix(&report.best.x)?)?;
            let u_hat = propagate(&sys_hat, &ansatz, &known, steps)?.u;
            let d = frob_distance_sq(&u_hat, target.matrix())?.sqrt();
            Ok(finish(cfg.mode, &prob, report, Some(d), None))
        }
        Mode::MinTimeGate | Mode::MinTimeState => {
            let sys = cfg.system()?;
            let ansatz = ControlAnsatz::symbolic(cfg.ansatz.m)?;
            let t_guess = cfg.target.t_guess.unwrap_or(cfg.ansatz.t);
            let opts = MinTimeOptions {
                eps: cfg.target.eps.unwrap_or(DEFAULT_EPS),
                bounds: cfg.target.bounded.then_some(CompactBounds {
                    radius,
                    t_max: 4.0 * t_guess,
                }),
            };
            let prob = if cfg.mode == Mode::MinTimeGate {
                min_time_gate(&sys, &ansatz, &cfg.gate_target(None)?, n, p, &opts)?
            } else {
                min_time_state(&sys, &ansatz, &cfg.state_pair(None)?, n, p, &opts)?
            };
            let order = match cfg.solver.relaxation_order {
                Some(0) => None,
                Some(d) => Some(d),
                None => Some(prob.max_degree().div_ceil(2)),
            };
            let report = solve(&prob, None, &options(cfg, order))?;
            let t_index = horizon_index(prob.vars())
                .ok_or_else(|| CliError::Config("time-optimal program lost its horizon".into()))?;
            let t_hat = report.best.x[t_index];
            let x_hat: Vec<f64> = report.best.x[..t_index].to_vec();
            let u_hat = if t_hat > 0.0 {
                propagate(&sys, &ControlAnsatz::fixed(cfg.ansatz.m, t_hat)?, &x_hat, steps)?.u
            } else {
                CMatrix::identity(sys.dim(), sys.dim())
            };
            let d = if cfg.mode == Mode::MinTimeGate {
                frob_distance_sq(&u_hat, cfg.gate_target(None)?.matrix())?.sqrt()
            } else {
                let pair = cfg.state_pair(None)?;
                state_distance_sq(&u_hat, pair.psi0(), pair.psi_star())?.sqrt()
            };
            Ok(finish(cfg.mode, &prob, report, Some(d), Some(t_hat)))
        }
        Mode::BenchCoherent | Mode::BenchIdentify => Err(CliError::Config(
            "bench modes run through the bench-coherent and bench-identify commands".into(),
        )),
    }
}

fn finish(
    mode: Mode,
    prob: &PopProblem,
    report: SolveReport,
    true_distance: Option<f64>,
    horizon: Option<f64>,
) -> SingleReport {
    SingleReport {
        mode,
        variables: prob.vars().names().to_vec(),
        objective_degree: prob.objective().degree(),
        constraints: prob.constraints().len(),
        report,
        true_distance,
        horizon,
    }
}
