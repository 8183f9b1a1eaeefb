//! Run specification shared by flags and JSON config files.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use ifipm_core::drivers::{run_if, run_ii, IfConfig, IiConfig, RunTrace};
use ifipm_core::instances::{
    gen_qubo_sdo, gen_random_feasible, gen_random_lo, qubo_start, random_qubo_matrix,
    rho_from_optimum,
};
use ifipm_core::model::{Iterate, SdoProblem};
use ifipm_core::scaling::ScalingChoice;
use ifipm_core::solvers::{InnerSolver, SolverChoice, TomographyConfig};
use ifipm_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Random,
    Qubo,
    Lo,
    Sdpa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    If,
    Ii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Aho,
    Hkm,
    Nt,
}

impl From<Scaling> for ScalingChoice {
    fn from(s: Scaling) -> Self {
        match s {
            Scaling::Aho => ScalingChoice::Aho,
            Scaling::Hkm => ScalingChoice::Hkm,
            Scaling::Nt => ScalingChoice::Nt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Exact,
    Cg,
    Chebyshev,
    SimTomography,
}

/// Every field is optional so that a JSON config and command-line flags can
/// be layered; flags win.
#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// JSON file with the same field names in lower_snake_case.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceKind>,
    /// Path of the SDPA file for `--instance sdpa`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sdpa: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Scaling>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<Solver>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta2: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Record `κ(M)` by SVD at every iteration.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track_condition: Option<bool>,
}

impl RunSpec {
    /// Layers `self` over the config file named by `--config`, if any.
    pub fn resolve(self) -> Result<RunSpec> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)?;
        let mut base: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let over = serde_json::to_value(&self).map_err(|e| Error::Config(e.to_string()))?;
        if let (Some(b), serde_json::Value::Object(o)) = (base.as_object_mut(), over) {
            b.extend(o);
        } else {
            return Err(Error::Config(format!("{}: expected a JSON object", path.display())));
        }
        let mut spec: RunSpec =
            serde_json::from_value(base).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        spec.config = Some(path);
        Ok(spec)
    }

    pub fn instance(&self) -> InstanceKind {
        self.instance.unwrap_or(InstanceKind::Random)
    }
    pub fn n(&self) -> usize {
        self.n.unwrap_or(10)
    }
    pub fn m(&self) -> usize {
        self.m.unwrap_or(match self.instance() {
            InstanceKind::Lo => self.n() / 2,
            _ => 2 * self.n(),
        })
    }
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm.unwrap_or(Algorithm::If)
    }

    pub fn solver_choice(&self) -> SolverChoice {
        match self.solver.unwrap_or(Solver::Exact) {
            Solver::Exact => SolverChoice::Exact,
            Solver::Cg => SolverChoice::CgNormal,
            Solver::Chebyshev => SolverChoice::Chebyshev,
            Solver::SimTomography => SolverChoice::SimTomography(TomographyConfig::new(InnerSolver::Exact, self.seed())),
        }
    }

    pub fn if_config(&self) -> IfConfig {
        let d = IfConfig::default();
        IfConfig {
            epsilon: self.eps.unwrap_or(d.epsilon),
            gamma: self.gamma.unwrap_or(d.gamma),
            delta: self.delta.unwrap_or(d.delta),
            beta: self.beta.unwrap_or(d.beta),
            scaling: self.scaling.map(Into::into).unwrap_or(d.scaling),
            solver: self.solver_choice(),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            track_condition: self.track_condition.unwrap_or(d.track_condition),
            ..d
        }
    }

    /// `rho` must be known; see [`rho_recipe`].
    pub fn ii_config(&self, rho: f64) -> IiConfig {
        let d = IiConfig::default();
        IiConfig {
            epsilon: self.eps.unwrap_or(d.epsilon),
            eta1: self.eta1.unwrap_or(d.eta1),
            eta2: self.eta2.unwrap_or(d.eta2),
            gamma1: self.gamma1.unwrap_or(d.gamma1),
            gamma2: self.gamma2.unwrap_or(d.gamma2),
            rho,
            solver: self.solver_choice(),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            seed: self.seed(),
            ..d
        }
    }
}

/// A problem with an optional strictly feasible start.
pub struct Instance {
    pub problem: SdoProblem,
    pub start: Option<Iterate>,
}

pub fn build_instance(spec: &RunSpec) -> Result<Instance> {
    let (n, seed) = (spec.n(), spec.seed());
    match spec.instance() {
        InstanceKind::Random => {
            let (problem, start) = gen_random_feasible(n, spec.m(), seed)?;
            Ok(Instance { problem, start: Some(start) })
        }
        InstanceKind::Qubo => {
            let problem = gen_qubo_sdo(&random_qubo_matrix(n, seed))?;
            let start = qubo_start(&problem, spec.if_config().gamma)?;
            Ok(Instance { problem, start: Some(start) })
        }
        InstanceKind::Lo => {
            let lo = gen_random_lo(n, spec.m(), seed)?;
            Ok(Instance { problem: lo.problem, start: Some(lo.start) })
        }
        InstanceKind::Sdpa => {
            let path = spec
                .sdpa
                .as_ref()
                .ok_or_else(|| Error::Config("--instance sdpa needs --sdpa <path>".into()))?;
            Ok(Instance { problem: ifipm_core::sdpa::read_sdpa(path)?, start: None })
        }
    }
}

/// Picks `ρ` for the infeasible method from an exact feasible pre-solve.
pub fn rho_recipe(inst: &Instance, gamma1: f64) -> Result<f64> {
    let start = inst
        .start
        .as_ref()
        .ok_or_else(|| Error::Config("--rho is required when the instance has no feasible start".into()))?;
    let pre = run_if(&inst.problem, start, &IfConfig { epsilon: 1e-8, ..IfConfig::default() })?;
    if !pre.converged() {
        return Err(Error::NonConvergence("feasible pre-solve for rho".into()));
    }
    rho_from_optimum(&pre.iterate.x, &pre.iterate.s, gamma1, 1.1)
}

pub struct Outcome {
    pub trace: RunTrace,
    pub rho: Option<f64>,
}

pub fn execute(spec: &RunSpec, inst: &Instance) -> Result<Outcome> {
    match spec.algorithm() {
        Algorithm::If => {
            let start = inst.start.as_ref().ok_or_else(|| {
                Error::Config("the feasible method needs a strictly feasible start; use --algorithm ii".into())
            })?;
            let trace = run_if(&inst.problem, start, &spec.if_config())?;
            Ok(Outcome { trace, rho: None })
        }
        Algorithm::Ii => {
            let gamma1 = spec.gamma1.unwrap_or(IiConfig::default().gamma1);
            let rho = match spec.rho {
                Some(r) => r,
                None => rho_recipe(inst, gamma1)?,
            };
            let trace = run_ii(&inst.problem, &spec.ii_config(rho))?;
            Ok(Outcome { trace, rho: Some(rho) })
        }
    }
}
