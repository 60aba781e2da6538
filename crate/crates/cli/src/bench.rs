//! Sample studies: gate synthesis on random targets and Hamiltonian
//! identification from single control/target pairs.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qcpop::magnus::{convergence_functional, magnus_omega, ControlAnsatz, QuantumSystem};
use qcpop::objective::{identification_omega, sign_symmetries, squared_norm, ExpPair, GateTarget, PopProblem};
use qcpop::oracle::{frob_distance_sq, propagate};
use qcpop::poly::{MatrixPoly, RealPoly};
use qcpop::popsolve::{solve, SolveOptions, SolveReport};

use crate::config::{Mode, RunConfig};
use crate::error::{CliError, CliResult};

/// Relaxation order used by the benches when none is configured.
pub const DEFAULT_BENCH_ORDER: u32 = 4;
/// Slack allowed in the lower-bound checks.
pub const SOUNDNESS_TOL: f64 = 1e-6;
const PI: f64 = std::f64::consts::PI;

/// Independent generator for sample `id` under `seed`.
pub fn sample_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

/// Multistart seed of sample `id`, distinct from the sampling stream.
fn solver_seed(seed: u64, id: usize) -> u64 {
    sample_rng(seed ^ 0x5eed_5eed_5eed_5eed, id).random()
}

pub(crate) fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}

/// Options shared by both benches after applying overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchSettings {
    pub samples: usize,
    pub seed: u64,
    /// 0 disables the relaxation.
    pub relaxation_order: u32,
    pub multistart: usize,
}

impl BenchSettings {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            samples: cfg.experiment.samples,
            seed: cfg.solver.seed,
            relaxation_order: cfg.solver.relaxation_order.unwrap_or(DEFAULT_BENCH_ORDER),
            multistart: cfg.solver.multistart,
        }
    }

    fn solve_options(&self, cfg: &RunConfig, id: usize) -> SolveOptions {
        SolveOptions {
            relaxation_order: (self.relaxation_order > 0).then_some(self.relaxation_order),
            multistart: self.multistart,
            seed: solver_seed(self.seed, id),
            max_iter: cfg.solver.max_iter,
        }
    }
}

/// Chebyshev order of the relaxed program: the configured value, or the
/// largest order whose residual degree `2 p deg(Omega)` fits `2 d`.
pub fn relaxation_chebyshev(cfg: &RunConfig, omega: &MatrixPoly, order: u32) -> CliResult<usize> {
    if let Some(p) = cfg.truncation.relaxation_chebyshev {
        return Ok(p.min(cfg.truncation.chebyshev));
    }
    let deg = omega.degree().max(1) as usize;
    let p = (order as usize / deg).min(cfg.truncation.chebyshev);
    if p == 0 {
        return Err(CliError::Config(format!(
            "relaxation order {order} is too small for a degree-{deg} Magnus exponent"
        )));
    }
    Ok(p)
}

/// `R^2 - |x|^2 >= 0` over all variables of `f`.
pub fn ball_constraint(f: &RealPoly, radius: f64) -> CliResult<RealPoly> {
    let vars = f.vars();
    let all: Vec<usize> = (0..vars.len()).collect();
    Ok(RealPoly::constant(vars, radius * radius).sub(&squared_norm(vars, &all))?)
}

/// `f` restricted to the ball of the given radius. Truncated residuals are
/// not bounded below far from the origin, so every program is solved there.
pub fn in_ball(f: RealPoly, radius: f64) -> CliResult<PopProblem> {
    let ball = ball_constraint(&f, radius)?;
    Ok(PopProblem::new(f, vec![ball])?.with_box_radius(radius))
}

/// Program the relaxation is built on: the residual at a lower Chebyshev
/// order, restricted to the ball.
pub fn relaxed_program(relaxed: &ExpPair, target: &GateTarget, radius: f64) -> CliResult<PopProblem> {
    in_ball(relaxed.gate_residual(target)?, radius)
}

fn inside_ball(x: &[f64], radius: f64) -> bool {
    x.iter().map(|v| v * v).sum::<f64>() <= radius * radius
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentRecord {
    pub sample_id: usize,
    pub x_star: String,
    /// Convergence functional at the sampled control.
    pub conv_x_star: f64,
    pub conv_violation_x_star: bool,
    pub x_hat: Option<String>,
    pub conv_x_hat: Option<f64>,
    pub conv_violation_x_hat: Option<bool>,
    /// Relaxation bound on the relaxed program.
    pub lower_bound: Option<f64>,
    pub relaxation_status: Option<String>,
    pub rank_one: Option<bool>,
    /// Relaxed program at the sampled control and at the solution.
    pub relaxed_at_x_star: Option<f64>,
    pub relaxed_at_x_hat: Option<f64>,
    /// Lower bound minus relaxed value at `x*`; at most `1e-6` when sound.
    pub bound_excess_x_star: Option<f64>,
    /// Same at `x_hat`, when it lies in the relaxation's ball.
    pub bound_excess_x_hat: Option<f64>,
    /// Full-order objective at `x*` and at `x_hat`.
    pub objective_at_x_star: f64,
    pub objective_at_x_hat: Option<f64>,
    /// `sqrt` of the objective at `x_hat`: the surrogate distance.
    pub surrogate_distance: Option<f64>,
    /// `||U(x_hat) - U*||_F` from the reference propagator.
    pub true_distance: Option<f64>,
    pub refine_converged: Option<bool>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifyRecord {
    pub sample_id: usize,
    pub known_x: String,
    pub conv_known_x: f64,
    pub z_true: String,
    pub z_hat: Option<String>,
    /// Per-component `|z_hat - z|`, minimized over sign symmetries.
    pub z_error: Option<String>,
    pub max_error: Option<f64>,
    pub symmetry_orbit: usize,
    pub lower_bound: Option<f64>,
    pub relaxation_status: Option<String>,
    pub bound_excess_truth: Option<f64>,
    pub objective_at_truth: f64,
    pub objective_at_z_hat: Option<f64>,
    pub true_distance: Option<f64>,
    pub refine_converged: Option<bool>,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub sample_id: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOutput<R> {
    pub records: Vec<R>,
    pub timings: Vec<Timing>,
}

fn status_name(r: &SolveReport) -> Option<String> {
    r.relaxation.as_ref().map(|rel| {
        serde_json::to_value(rel.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    })
}

struct CoherentContext {
    sys: QuantumSystem,
    ansatz: ControlAnsatz,
    full: ExpPair,
    relaxed: Option<ExpPair>,
    m: usize,
}

fn coherent_context(cfg: &RunConfig, settings: &BenchSettings) -> CliResult<CoherentContext> {
    let sys = cfg.system()?;
    let ansatz = cfg.fixed_ansatz()?;
    let omega = magnus_omega(&sys, &ansatz, cfg.truncation.magnus)?.omega;
    let full = ExpPair::new(&omega, cfg.truncation.chebyshev)?;
    let relaxed = if settings.relaxation_order > 0 {
        let p = relaxation_chebyshev(cfg, &omega, settings.relaxation_order)?;
        Some(if p == cfg.truncation.chebyshev { full.clone() } else { ExpPair::new(&omega, p)? })
    } else {
        None
    };
    Ok(CoherentContext {
        m: ansatz.m(),
        sys,
        ansatz,
        full,
        relaxed,
    })
}

fn coherent_sample(cfg: &RunConfig, settings: &BenchSettings, ctx: &CoherentContext, id: usize) -> CoherentRecord {
    let mut rng = sample_rng(settings.seed, id);
    let half = cfg.experiment.sampling_box;
    let x_star: Vec<f64> = (0..ctx.m).map(|_| rng.random_range(-half..=half)).collect();
    let conv_x_star = convergence_functional(&ctx.sys, &ctx.ansatz, &x_star).unwrap_or(f64::NAN);
    let mut rec = CoherentRecord {
        sample_id: id,
        x_star: join(&x_star),
        conv_x_star,
        conv_violation_x_star: !(conv_x_star < PI),
        x_hat: None,
        conv_x_hat: None,
        conv_violation_x_hat: None,
        lower_bound: None,
        relaxation_status: None,
        rank_one: None,
        relaxed_at_x_star: None,
        relaxed_at_x_hat: None,
        bound_excess_x_star: None,
        bound_excess_x_hat: None,
        objective_at_x_star: f64::NAN,
        objective_at_x_hat: None,
        surrogate_distance: None,
        true_distance: None,
        refine_converged: None,
        error: String::new(),
    };
    if let Err(e) = coherent_solve(cfg, settings, ctx, id, &x_star, &mut rec) {
        rec.error = e.to_string();
    }
    rec
}

fn coherent_solve(
    cfg: &RunConfig,
    settings: &BenchSettings,
    ctx: &CoherentContext,
    id: usize,
    x_star: &[f64],
    rec: &mut CoherentRecord,
) -> CliResult<()> {
    let steps = cfg.experiment.oracle_steps;
    let u_star = propagate(&ctx.sys, &ctx.ansatz, x_star, steps)?.u;
    let target = GateTarget::new(u_star.clone())?;
    let prob = in_ball(ctx.full.gate_residual(&target)?, cfg.solver.ball_radius)?;
    rec.objective_at_x_star = prob.value(x_star)?;
    let relaxed = ctx
        .relaxed
        .as_ref()
        .map(|pair| relaxed_program(pair, &target, cfg.solver.ball_radius))
        .transpose()?;
    let report = solve(&prob, relaxed.as_ref(), &settings.solve_options(cfg, id))?;

    let x_hat = report.best.x.clone();
    if let (Some(rel), Some(rp)) = (&report.relaxation, &relaxed) {
        rec.lower_bound = Some(rel.lower_bound);
        rec.relaxation_status = status_name(&report);
        rec.rank_one = Some(rel.extraction.rank_one);
        let at_star = rp.value(x_star)?;
        let at_hat = rp.value(&x_hat)?;
        rec.relaxed_at_x_star = Some(at_star);
        rec.relaxed_at_x_hat = Some(at_hat);
        if inside_ball(x_star, cfg.solver.ball_radius) {
            rec.bound_excess_x_star = Some(rel.lower_bound - at_star);
        }
        if inside_ball(&x_hat, cfg.solver.ball_radius) {
            rec.bound_excess_x_hat = Some(rel.lower_bound - at_hat);
        }
    }
    let conv_hat = convergence_functional(&ctx.sys, &ctx.ansatz, &x_hat)?;
    rec.conv_x_hat = Some(conv_hat);
    rec.conv_violation_x_hat = Some(!(conv_hat < PI));
    rec.objective_at_x_hat = Some(report.best.value);
    rec.surrogate_distance = Some(report.best.value.max(0.0).sqrt());
    let u_hat = propagate(&ctx.sys, &ctx.ansatz, &x_hat, steps)?.u;
    rec.true_distance = Some(frob_distance_sq(&u_hat, &u_star)?.sqrt());
    rec.refine_converged = Some(report.best.converged);
    rec.x_hat = Some(join(&x_hat));
    Ok(())
}

fn timed<R: Send, F: Fn(usize) -> R + Sync>(samples: usize, f: F) -> BenchOutput<R> {
    let results: Vec<(R, Timing)> = (0..samples)
        .into_par_iter()
        .map(|id| {
            let start = Instant::now();
            let r = f(id);
            let seconds = start.elapsed().as_secs_f64();
            (r, Timing { sample_id: id, seconds })
        })
        .collect();
    let (records, timings) = results.into_iter().unzip();
    BenchOutput { records, timings }
}

/// Gate-synthesis study over random controls drawn from the sampling box.
pub fn run_bench_coherent(cfg: &RunConfig, settings: &BenchSettings) -> CliResult<BenchOutput<CoherentRecord>> {
    let ctx = coherent_context(cfg, settings)?;
    Ok(timed(settings.samples, |id| coherent_sample(cfg, settings, &ctx, id)))
}

struct IdentifyContext {
    sys: QuantumSystem,
    ansatz: ControlAnsatz,
    h0: qcpop::poly::CMatrix,
    pattern: qcpop::objective::CouplingPattern,
    truth: Vec<f64>,
}

fn identify_sample(cfg: &RunConfig, settings: &BenchSettings, ctx: &IdentifyContext, id: usize) -> IdentifyRecord {
    let mut rng = sample_rng(settings.seed, id);
    let half = cfg.experiment.sampling_box;
    let known: Vec<f64> = (0..ctx.ansatz.m()).map(|_| rng.random_range(-half..=half)).collect();
    let mut rec = IdentifyRecord {
        sample_id: id,
        known_x: join(&known),
        conv_known_x: convergence_functional(&ctx.sys, &ctx.ansatz, &known).unwrap_or(f64::NAN),
        z_true: join(&ctx.truth),
        z_hat: None,
        z_error: None,
        max_error: None,
        symmetry_orbit: 1,
        lower_bound: None,
        relaxation_status: None,
        bound_excess_truth: None,
        objective_at_truth: f64::NAN,
        objective_at_z_hat: None,
        true_distance: None,
        refine_converged: None,
        error: String::new(),
    };
    if let Err(e) = identify_solve(cfg, settings, ctx, id, &known, &mut rec) {
        rec.error = e.to_string();
    }
    rec
}

/// Smallest per-component error over the sign-symmetry orbit of `z_hat`.
pub fn orbit_error(z_hat: &[f64], truth: &[f64], flips: &[Vec<f64>]) -> Vec<f64> {
    let identity = vec![1.0; z_hat.len()];
    std::iter::once(&identity)
        .chain(flips)
        .map(|s| {
            z_hat
                .iter()
                .zip(s)
                .zip(truth)
                .map(|((z, s), t)| (s * z - t).abs())
                .collect::<Vec<f64>>()
        })
        .min_by(|a, b| {
            let ma = a.iter().copied().fold(0.0, f64::max);
            let mb = b.iter().copied().fold(0.0, f64::max);
            ma.total_cmp(&mb)
        })
        .expect("orbit contains the identity")
}

fn identify_solve(
    cfg: &RunConfig,
    settings: &BenchSettings,
    ctx: &IdentifyContext,
    id: usize,
    known: &[f64],
    rec: &mut IdentifyRecord,
) -> CliResult<()> {
    let steps = cfg.experiment.oracle_steps;
    let u_star = propagate(&ctx.sys, &ctx.ansatz, known, steps)?.u;
    let target = GateTarget::new(u_star.clone())?;
    let omega = identification_omega(&ctx.h0, &ctx.pattern, known, &ctx.ansatz, cfg.truncation.magnus)?;
    let full = ExpPair::new(&omega, cfg.truncation.chebyshev)?;
    let f = full.gate_residual(&target)?;
    let prob = in_ball(f, cfg.solver.ball_radius)?;
    rec.objective_at_truth = prob.value(&ctx.truth)?;

    let relaxed = if settings.relaxation_order > 0 {
        let p = relaxation_chebyshev(cfg, &omega, settings.relaxation_order)?;
        let pair = if p == cfg.truncation.chebyshev { full.clone() } else { ExpPair::new(&omega, p)? };
        Some(relaxed_program(&pair, &target, cfg.solver.ball_radius)?)
    } else {
        None
    };
    let report = solve(&prob, relaxed.as_ref(), &settings.solve_options(cfg, id))?;
    if let (Some(rel), Some(rp)) = (&report.relaxation, &relaxed) {
        rec.lower_bound = Some(rel.lower_bound);
        rec.relaxation_status = status_name(&report);
        if inside_ball(&ctx.truth, cfg.solver.ball_radius) {
            rec.bound_excess_truth = Some(rel.lower_bound - rp.value(&ctx.truth)?);
        }
    }

    let z_hat = report.best.x.clone();
    let scale = prob.objective().max_coefficient().max(1.0);
    let flips = sign_symmetries(prob.objective(), 1e-12 * scale);
    rec.symmetry_orbit = flips.len() + 1;
    let err = orbit_error(&z_hat, &ctx.truth, &flips);
    rec.max_error = Some(err.iter().copied().fold(0.0, f64::max));
    rec.z_error = Some(join(&err));
    rec.z_hat = Some(join(&z_hat));
    rec.objective_at_z_hat = Some(report.best.value);
    rec.refine_converged = Some(report.best.converged);

    let v_hat = ctx.pattern.matrix(&z_hat)?;
    let sys_hat = QuantumSystem::new(ctx.h0.clone(), v_hat)?;
    let u_hat = propagate(&sys_hat, &ctx.ansatz, known, steps)?.u;
    rec.true_distance = Some(frob_distance_sq(&u_hat, &u_star)?.sqrt());
    Ok(())
}

/// Identification study: one random known control per sample, target made
/// with the true couplings, couplings recovered from that single pair.
pub fn run_bench_identify(cfg: &RunConfig, settings: &BenchSettings) -> CliResult<BenchOutput<IdentifyRecord>> {
    if cfg.system.pattern.is_none() {
        return Err(CliError::Config("identification needs system.pattern".into()));
    }
    let truth = cfg.system.pattern.as_ref().map(|p| p.truth.clone()).unwrap_or_default();
    let ctx = IdentifyContext {
        sys: cfg.system()?,
        ansatz: cfg.fixed_ansatz()?,
        h0: cfg.h0()?,
        pattern: cfg.pattern()?,
        truth,
    };
    Ok(timed(settings.samples, |id| identify_sample(cfg, settings, &ctx, id)))
}

/// Checks that a config is usable for the given bench.
pub fn expect_mode(cfg: &RunConfig, mode: Mode) -> CliResult<()> {
    if cfg.mode != mode {
        return Err(CliError::Config(format!(
            "config mode is {:?}, expected {:?}",
            cfg.mode, mode
        )));
    }
    Ok(())
}
