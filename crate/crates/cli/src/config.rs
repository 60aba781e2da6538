//! Run configuration, read from TOML.
//!
//! Matrices are written as flat row-major lists of `[re, im]` pairs and
//! vectors as lists of `[re, im]` pairs. A minimal gate benchmark looks like
//!
//! ```toml
//! mode = "bench-coherent"
//!
//! [system]
//! dim = 3
//! h0 = [[0, 0], [0, 0], [0, 0],  [0, 0], [0.515916, 0], [0, 0],  [0, 0], [0, 0], [1, 0]]
//! v  = [[0, 0], [0.707107, 0], [0, 0],  [0.707107, 0], [0, 0], [1, 0],  [0, 0], [1, 0], [0, 0]]
//!
//! [ansatz]
//! m = 3
//! t = 0.5
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qcpop::magnus::{ControlAnsatz, QuantumSystem};
use qcpop::objective::{CouplingPattern, GateTarget, StatePair};
use qcpop::poly::CMatrix;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Gate,
    State,
    MinTimeGate,
    MinTimeState,
    Identify,
    BenchCoherent,
    BenchIdentify,
}

impl Mode {
    pub fn is_bench(self) -> bool {
        matches!(self, Mode::BenchCoherent | Mode::BenchIdentify)
    }
}

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    /// Positions `(row, col)` of the real unknown couplings, mirrored.
    pub unknowns: Vec<[usize; 2]>,
    /// Couplings used to manufacture targets.
    pub truth: Vec<f64>,
    /// Known part of the coupling, default zero.
    pub fixed: Option<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub dim: usize,
    pub h0: Vec<Pair>,
    /// Control coupling; required unless a pattern gives it.
    pub v: Option<Vec<Pair>>,
    pub pattern: Option<PatternSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub m: usize,
    /// Terminal time; ignored by the time-optimal modes.
    #[serde(default = "default_t")]
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    #[serde(default = "default_magnus")]
    pub magnus: usize,
    #[serde(default = "default_chebyshev")]
    pub chebyshev: usize,
    /// Chebyshev order of the cheaper program the relaxation is built on;
    /// by default the largest order whose degree fits the relaxation.
    pub relaxation_chebyshev: Option<usize>,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            magnus: default_magnus(),
            chebyshev: default_chebyshev(),
            relaxation_chebyshev: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    /// Relaxation order `d`; 0 disables the relaxation. In single-problem
    /// modes a missing value means the smallest admissible order.
    pub relaxation_order: Option<u32>,
    #[serde(default = "default_multistart")]
    pub multistart: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Radius of the ball constraint added to relaxed programs.
    #[serde(default = "default_radius")]
    pub ball_radius: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            relaxation_order: None,
            multistart: default_multistart(),
            seed: 0,
            max_iter: default_max_iter(),
            ball_radius: default_radius(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Half-width of the box the control coefficients are drawn from.
    #[serde(default = "default_box")]
    pub sampling_box: f64,
    /// Steps of the reference propagator that manufactures targets.
    #[serde(default = "default_steps")]
    pub oracle_steps: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            sampling_box: default_box(),
            oracle_steps: default_steps(),
        }
    }
}

/// Target of a single-problem run: given directly or manufactured from
/// control coefficients by the reference propagator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub unitary: Option<Vec<Pair>>,
    pub controls: Option<Vec<f64>>,
    pub psi0: Option<Vec<Pair>>,
    pub psi_star: Option<Vec<Pair>>,
    /// Known control of an identification run.
    pub known_controls: Option<Vec<f64>>,
    /// Accuracy of the time-optimal modes.
    pub eps: Option<f64>,
    /// Horizon scale used for the `T <= 4 t_guess` bound.
    pub t_guess: Option<f64>,
    /// Adds the ball and horizon bounds to time-optimal programs.
    #[serde(default = "default_true")]
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub system: SystemSpec,
    pub ansatz: AnsatzSpec,
    #[serde(default)]
    pub truncation: TruncationSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub target: TargetSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_t() -> f64 {
    0.5
}
fn default_magnus() -> usize {
    3
}
fn default_chebyshev() -> usize {
    5
}
fn default_multistart() -> usize {
    16
}
fn default_max_iter() -> usize {
    qcpop::popsolve::DEFAULT_MAX_ITER
}
fn default_radius() -> f64 {
    qcpop::objective::DEFAULT_BOX_RADIUS
}
fn default_samples() -> usize {
    100
}
fn default_box() -> f64 {
    1.0
}
fn default_steps() -> usize {
    qcpop::oracle::DEFAULT_STEPS
}
fn default_true() -> bool {
    true
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn matrix_from_pairs(name: &str, dim: usize, pairs: &[Pair]) -> CliResult<CMatrix> {
    if pairs.len() != dim * dim {
        return Err(invalid(format!(
            "{name}: expected {} [re, im] pairs for a {dim}x{dim} matrix, got {}",
            dim * dim,
            pairs.len()
        )));
    }
    check_finite(name, pairs)?;
    Ok(CMatrix::from_row_iterator(
        dim,
        dim,
        pairs.iter().map(|[re, im]| Complex64::new(*re, *im)),
    ))
}

pub fn vector_from_pairs(name: &str, dim: usize, pairs: &[Pair]) -> CliResult<Vec<Complex64>> {
    if pairs.len() != dim {
        return Err(invalid(format!(
            "{name}: expected {dim} [re, im] pairs, got {}",
            pairs.len()
        )));
    }
    check_finite(name, pairs)?;
    Ok(pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
}

fn check_finite(name: &str, pairs: &[Pair]) -> CliResult<()> {
    if pairs.iter().flatten().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid(format!("{name}: non-finite entry")))
    }
}

/// Matrix as flat row-major `[re, im]` pairs.
pub fn pairs_from_matrix(m: &CMatrix) -> Vec<Pair> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    out
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked before solving.
    pub fn validate(&self) -> CliResult<()> {
        if self.system.dim == 0 {
            return Err(invalid("system.dim must be positive"));
        }
        self.system()?;
        if let Some(p) = &self.system.pattern {
            let pattern = self.pattern()?;
            if p.truth.len() != pattern.count() {
                return Err(invalid(format!(
                    "pattern.truth has {} entries for {} unknowns",
                    p.truth.len(),
                    pattern.count()
                )));
            }
        }
        match self.mode {
            Mode::MinTimeGate | Mode::MinTimeState => {
                ControlAnsatz::symbolic(self.ansatz.m).map_err(|e| invalid(e.to_string()))?;
            }
            _ => {
                self.fixed_ansatz()?;
            }
        }
        if self.truncation.magnus == 0 || self.truncation.magnus > 3 {
            return Err(invalid("truncation.magnus must be 1, 2 or 3"));
        }
        if self.truncation.chebyshev == 0 {
            return Err(invalid("truncation.chebyshev must be positive"));
        }
        if matches!(self.truncation.relaxation_chebyshev, Some(0)) {
            return Err(invalid("truncation.relaxation_chebyshev must be positive"));
        }
        if !(self.solver.ball_radius > 0.0) {
            return Err(invalid("solver.ball_radius must be positive"));
        }
        if self.solver.multistart == 0 && self.solver.relaxation_order == Some(0) {
            return Err(invalid("both the relaxation and the multistart are disabled"));
        }
        if !(self.experiment.sampling_box > 0.0) {
            return Err(invalid("experiment.sampling_box must be positive"));
        }
        if self.experiment.oracle_steps == 0 {
            return Err(invalid("experiment.oracle_steps must be positive"));
        }
        if let Some(eps) = self.target.eps {
            if !(eps > 0.0) {
                return Err(invalid("target.eps must be positive"));
            }
        }
        match self.mode {
            Mode::BenchIdentify | Mode::Identify if self.system.pattern.is_none() => {
                Err(invalid("identification needs system.pattern"))
            }
            Mode::Gate | Mode::MinTimeGate => self.gate_target(None).map(|_| ()),
            Mode::State | Mode::MinTimeState => self.state_pair(None).map(|_| ()),
            Mode::Identify => {
                let known = self.known_controls()?;
                self.identify_target(&known).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// `V`, taken from `system.v` or built from the pattern's true couplings.
    pub fn coupling(&self) -> CliResult<CMatrix> {
        match (&self.system.v, &self.system.pattern) {
            (Some(v), _) => matrix_from_pairs("system.v", self.system.dim, v),
            (None, Some(p)) => self
                .pattern()?
                .matrix(&p.truth)
                .map_err(|e| invalid(format!("system.pattern: {e}"))),
            (None, None) => Err(invalid("system.v or system.pattern is required")),
        }
    }

    pub fn h0(&self) -> CliResult<CMatrix> {
        matrix_from_pairs("system.h0", self.system.dim, &self.system.h0)
    }

    pub fn system(&self) -> CliResult<QuantumSystem> {
        QuantumSystem::new(self.h0()?, self.coupling()?).map_err(|e| invalid(format!("system: {e}")))
    }

    pub fn pattern(&self) -> CliResult<CouplingPattern> {
        let p = self
            .system
            .pattern
            .as_ref()
            .ok_or_else(|| invalid("system.pattern is required"))?;
        let fixed = p
            .fixed
            .as_ref()
            .map(|f| matrix_from_pairs("pattern.fixed", self.system.dim, f))
            .transpose()?;
        let unknowns = p.unknowns.iter().map(|[r, c]| (*r, *c)).collect();
        CouplingPattern::new(self.system.dim, unknowns, fixed)
            .map_err(|e| invalid(format!("system.pattern: {e}")))
    }

    pub fn fixed_ansatz(&self) -> CliResult<ControlAnsatz> {
        ControlAnsatz::fixed(self.ansatz.m, self.ansatz.t).map_err(|e| invalid(format!("ansatz: {e}")))
    }

    fn controls_checked(&self, name: &str, x: &[f64]) -> CliResult<()> {
        if x.len() != self.ansatz.m || !x.iter().all(|v| v.is_finite()) {
            return Err(invalid(format!("{name} must hold {} finite values", self.ansatz.m)));
        }
        Ok(())
    }

    /// Target unitary, given directly or propagated from `target.controls`.
    pub fn gate_target(&self, steps: Option<usize>) -> CliResult<GateTarget> {
        let u = match (&self.target.unitary, &self.target.controls) {
            (Some(u), _) => matrix_from_pairs("target.unitary", self.system.dim, u)?,
            (None, Some(x)) => {
                self.controls_checked("target.controls", x)?;
                self.propagate(x, steps)?
            }
            (None, None) => return Err(invalid("target.unitary or target.controls is required")),
        };
        GateTarget::new(u).map_err(|e| invalid(format!("target: {e}")))
    }

    /// Initial and final state; `psi_star` defaults to the propagated
    /// `psi0` under `target.controls`.
    pub fn state_pair(&self, steps: Option<usize>) -> CliResult<StatePair> {
        let dim = self.system.dim;
        let psi0 = vector_from_pairs(
            "target.psi0",
            dim,
            self.target.psi0.as_ref().ok_or_else(|| invalid("target.psi0 is required"))?,
        )?;
        let psi_star = match (&self.target.psi_star, &self.target.controls) {
            (Some(p), _) => vector_from_pairs("target.psi_star", dim, p)?,
            (None, Some(x)) => {
                self.controls_checked("target.controls", x)?;
                let u = self.propagate(x, steps)?;
                (0..dim)
                    .map(|r| (0..dim).map(|c| u[(r, c)] * psi0[c]).sum())
                    .collect()
            }
            (None, None) => return Err(invalid("target.psi_star or target.controls is required")),
        };
        StatePair::new(psi0, psi_star).map_err(|e| invalid(format!("target: {e}")))
    }

    pub fn known_controls(&self) -> CliResult<Vec<f64>> {
        let x = self
            .target
            .known_controls
            .clone()
            .ok_or_else(|| invalid("target.known_controls is required"))?;
        self.controls_checked("target.known_controls", &x)?;
        Ok(x)
    }

    /// Identification target: given, or propagated with the true couplings.
    pub fn identify_target(&self, known: &[f64]) -> CliResult<GateTarget> {
        let u = match &self.target.unitary {
            Some(u) => matrix_from_pairs("target.unitary", self.system.dim, u)?,
            None => self.propagate(known, None)?,
        };
        GateTarget::new(u).map_err(|e| invalid(format!("target: {e}")))
    }

    fn propagate(&self, x: &[f64], steps: Option<usize>) -> CliResult<CMatrix> {
        let sys = self.system()?;
        let t = self.target.t_guess.unwrap_or(self.ansatz.t);
        let ansatz = ControlAnsatz::fixed(self.ansatz.m, t).map_err(|e| invalid(e.to_string()))?;
        let steps = steps.unwrap_or(self.experiment.oracle_steps);
        Ok(qcpop::oracle::propagate(&sys, &ansatz, x, steps)?.u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TRANSMON: &str = r#"
mode = "bench-coherent"
[system]
dim = 3
h0 = [[0, 0], [0, 0], [0, 0], [0, 0], [0.515916, 0], [0, 0], [0, 0], [0, 0], [1, 0]]
v = [[0, 0], [0.707107, 0], [0, 0], [0.707107, 0], [0, 0], [1, 0], [0, 0], [1, 0], [0, 0]]
[ansatz]
m = 3
t = 0.5
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_toml(TRANSMON).unwrap();
        assert_eq!(cfg.mode, Mode::BenchCoherent);
        assert_eq!(cfg.truncation.chebyshev, 5);
        assert_eq!(cfg.experiment.samples, 100);
        let sys = cfg.system().unwrap();
        assert_eq!(sys.v(), qcpop::systems::transmon_three_level().v());
        assert_eq!(sys.h0(), qcpop::systems::transmon_three_level().h0());
    }

    #[test]
    fn rejects_bad_configs() {
        let non_hermitian = TRANSMON.replace("[0.707107, 0], [0, 0], [1, 0]", "[0.5, 0], [0, 0], [1, 0]");
        assert_ne!(non_hermitian, TRANSMON);
        assert!(matches!(RunConfig::from_toml(&non_hermitian), Err(CliError::Config(_))));
        let negative_t = TRANSMON.replace("t = 0.5", "t = -0.5");
        assert!(RunConfig::from_toml(&negative_t).is_err());
        let short = TRANSMON.replace("[0, 0], [0, 0], [1, 0]]\nv", "[0, 0], [1, 0]]\nv");
        assert!(RunConfig::from_toml(&short).is_err());
        let unknown = format!("{TRANSMON}\n[solver]\nfoo = 1\n");
        assert!(RunConfig::from_toml(&unknown).is_err());
        let gate = TRANSMON.replace("bench-coherent", "gate");
        assert!(RunConfig::from_toml(&gate).is_err());
        let non_unitary = format!(
            "{}\n[target]\nunitary = [[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[2,0]]\n",
            gate
        );
        assert!(RunConfig::from_toml(&non_unitary).is_err());
    }

    #[test]
    fn matrix_pairs_round_trip() {
        let sys = qcpop::systems::transmon_three_level();
        let pairs = pairs_from_matrix(sys.v());
        assert_eq!(&matrix_from_pairs("v", 3, &pairs).unwrap(), sys.v());
    }

    #[test]
    fn pattern_supplies_the_coupling() {
        let text = r#"
mode = "bench-identify"
[system]
dim = 3
h0 = [[0, 0], [0, 0], [0, 0], [0, 0], [0.515916, 0], [0, 0], [0, 0], [0, 0], [1, 0]]
[system.pattern]
unknowns = [[0, 1], [1, 2]]
truth = [0.707107, 1.0]
[ansatz]
m = 3
"#;
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.coupling().unwrap(), *qcpop::systems::transmon_three_level().v());
        let bad = text.replace("truth = [0.707107, 1.0]", "truth = [0.707107]");
        assert!(RunConfig::from_toml(&bad).is_err());
    }
}
