//! Path-following loops: the inexact feasible method (short step in the
//! Frobenius neighborhood, nullspace Newton system) and the inexact
//! infeasible method (HKM direction, residual injection, backtracking in
//! the infeasible neighborhood).

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    centrality, in_frobenius_neighborhood_tol, in_infeasible_neighborhood, measure_infeasible, CentralityNorm,
    InfeasibleParams, InfeasibleState, Iterate, Membership, SdoProblem, FEAS_TOL,
};
use crate::newton::{assemble_if, assemble_ii, directions_from_solution, Directions, Injection};
use crate::scaling::{build_scaling, h_p, ScalingChoice, ScalingData};
use crate::solvers::{adaptive_kappa_solve_with, solve_exact, AdaptiveOptions, SolveReport, SolverChoice};
use crate::tensor::{cond_2, frob_inner, mat_inv_sqrt, mat_sqrt, svec, sym_eigen, symmetrize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IfConfig {
    pub epsilon: f64,
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
    pub scaling: ScalingChoice,
    pub solver: SolverChoice,
    pub max_iter: usize,
    /// Compute `κ(M)` by SVD every iteration (always done for inexact solvers).
    pub track_condition: bool,
    /// Stop with a failure when an iterate leaves `𝒩_F(γ)`.
    pub check_neighborhood: bool,
    /// Remove the trace of `R^r` with one extra exact solve.
    pub traceless_residual: bool,
}

impl Default for IfConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            gamma: 0.05,
            delta: 0.05,
            beta: 0.25,
            scaling: ScalingChoice::Nt,
            solver: SolverChoice::Exact,
            max_iter: 100_000,
            track_condition: false,
            check_neighborhood: true,
            traceless_residual: false,
        }
    }
}

impl IfConfig {
    pub fn sigma(&self, n: usize) -> f64 {
        1.0 - self.delta / (n as f64).sqrt()
    }

    /// Parameter conditions the convergence analysis needs for dimension `n`.
    /// The bound on `β` is only checked for inexact solvers.
    pub fn validate(&self, n: usize) -> Result<()> {
        let (g, d, b) = (self.gamma, self.delta, self.beta);
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if !(g > 0.0 && g < 1.0) || !(d > 0.0) || !(b >= 0.0 && b < 1.0) {
            return Err(Error::Config("need 0 < gamma < 1, delta > 0, 0 <= beta < 1".into()));
        }
        let rn = (n as f64).sqrt();
        if d >= rn {
            return Err(Error::Config(format!("delta/sqrt(n) = {:.4} must be below 1", d / rn)));
        }
        let lhs = 2.0 * 2f64.sqrt() * g / (1.0 - g);
        if lhs > 1.0 {
            return Err(Error::Config(format!(
                "violated: 2*sqrt(2)*gamma/(1-gamma) <= 1 (lhs = {lhs:.6})"
            )));
        }
        if self.solver != SolverChoice::Exact {
            let bound = beta_bound(g, d, n);
            if b > bound {
                return Err(Error::Config(format!(
                    "violated: beta <= 1 - gamma/sqrt(n) - 21.7(gamma^2+delta^2)/((2+sqrt 2)(1-delta/sqrt n)gamma(1-gamma)) \
                     (beta = {b}, bound = {bound:.6} for n = {n})"
                )));
            }
        }
        Ok(())
    }
}

/// Largest admissible inexactness `β` for `(γ, δ, n)`.
pub fn beta_bound(gamma: f64, delta: f64, n: usize) -> f64 {
    let rn = (n as f64).sqrt();
    1.0 - gamma / rn
        - 21.7 * (gamma * gamma + delta * delta)
            / ((2.0 + 2f64.sqrt()) * (1.0 - delta / rn) * gamma * (1.0 - gamma))
}

/// Solver tolerance `ξ_k = (β/ϱ) max{‖R^c‖_F, ε/25}`.
pub fn xi_schedule_if(beta: f64, varrho: f64, rc_norm: f64, epsilon: f64) -> f64 {
    beta / varrho * rc_norm.max(epsilon / 25.0)
}

fn log2_terms(n: usize, epsilon: f64) -> (f64, f64) {
    ((n as f64).log2(), (1.0 / epsilon).log2())
}

/// Residual schedule `ϑ_k` of the infeasible method.
pub fn vartheta(k: usize, n: usize, epsilon: f64) -> f64 {
    let (ln, le) = log2_terms(n, epsilon);
    let big_n = ln * (n * n) as f64 * le.floor();
    if (k as f64) < big_n {
        (1.0 / (ln * le)).min(1.0)
    } else {
        1.0 / (k as f64 + 1.0 - big_n).powf(1.1)
    }
}

/// `ϑ̄ = Σ_k ϑ_k`: the constant head summed exactly, the tail by direct
/// summation of 10⁴ terms plus an Euler-Maclaurin remainder.
pub fn vartheta_sum(n: usize, epsilon: f64) -> f64 {
    let (ln, le) = log2_terms(n, epsilon);
    let big_n = ln * (n * n) as f64 * le.floor();
    let head_count = if big_n > 0.0 { big_n.ceil() } else { 0.0 };
    let head = if head_count > 0.0 { head_count * (1.0 / (ln * le)).min(1.0) } else { 0.0 };
    let first = head_count + 1.0 - big_n;
    let terms = 10_000;
    let mut tail = 0.0;
    for j in 0..terms {
        tail += (first + j as f64).powf(-1.1);
    }
    let a = first + terms as f64;
    // Σ_{x≥a} x^{-p} ≈ a^{1-p}/(p-1) + a^{-p}/2 + p a^{-p-1}/12.
    tail += a.powf(-0.1) / 0.1 + 0.5 * a.powf(-1.1) + 1.1 * a.powf(-2.1) / 12.0;
    head + tail
}

/// One row of a run trace. Row `k` describes the iterate after step `k`;
/// row 0 is the start.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub nu: f64,
    pub theta: Option<f64>,
    pub tau: Option<f64>,
    pub centrality: f64,
    pub rp_norm: f64,
    pub rd_norm: f64,
    pub kappa_newton: Option<f64>,
    pub alpha: f64,
    pub solver_residual: f64,
    pub xi_k: f64,
    pub wall_ms: f64,
    /// `‖R^c‖_F` of the system solved in this step.
    pub rc_norm: f64,
    /// `‖R^r‖_F` left by the solver.
    pub rr_norm: f64,
    pub rr_trace: f64,
    pub dx_ds: f64,
    pub dx_norm: f64,
    pub ds_norm: f64,
    pub doublings: usize,
    /// Scaled residual ratio `‖X̃^{-1/2}R^rX̃^{1/2}‖_F / ‖X̃^{-1/2}R^cX̃^{1/2}‖_F`.
    pub scaled_residual_ratio: Option<f64>,
    /// `‖H_P(ΔXΔS)‖ / (n²θμ₀)`.
    pub second_order_ratio: Option<f64>,
    /// `τ tr(X) / (θρn)`.
    pub trace_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
    Failed { reason: String },
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub iterate: Iterate,
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    /// Final `τ`, `θ` and `ρ` for infeasible runs.
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    pub rho: Option<f64>,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn start_record(p: &SdoProblem, it: &Iterate) -> Result<IterationRecord> {
    Ok(IterationRecord {
        k: 0,
        nu: it.nu(),
        centrality: centrality(&it.x, &it.s)?,
        rp_norm: p.primal_residual(&it.x).norm(),
        rd_norm: p.dual_residual(&it.y, &it.s).norm(),
        ..IterationRecord::default()
    })
}

fn scaled_residual_ratio(sd: &ScalingData, rr: &DMatrix<f64>, rc: &DMatrix<f64>) -> Option<f64> {
    let xt = symmetrize(&(&sd.px * sd.p.transpose()));
    let half = mat_sqrt(&xt).ok()?;
    let ihalf = mat_inv_sqrt(&xt).ok()?;
    let den = (&ihalf * rc * &half).norm();
    if den == 0.0 {
        return None;
    }
    Some((&ihalf * rr * &half).norm() / den)
}

/// Feasible-method iterate whose `X` and `S` carry low-order parts, so the
/// represented point is `hi + lo` entrywise. The Newton system is formed
/// from the high parts; `X • S` and the steps use both.
#[derive(Debug, Clone)]
pub struct IfPoint {
    pub it: Iterate,
    pub x_lo: DMatrix<f64>,
    pub s_lo: DMatrix<f64>,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn add_extended(hi: &DMatrix<f64>, lo: &DMatrix<f64>, d: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut h = hi.clone();
    let mut l = lo.clone();
    for ((hv, lv), dv) in h.iter_mut().zip(l.iter_mut()).zip(d.iter()) {
        let (s, e) = two_sum(*hv, *dv);
        let (s2, e2) = two_sum(s, *lv + e);
        *hv = s2;
        *lv = e2;
    }
    (h, l)
}

impl IfPoint {
    pub fn new(it: Iterate) -> Self {
        let n = it.n();
        Self {
            it,
            x_lo: DMatrix::zeros(n, n),
            s_lo: DMatrix::zeros(n, n),
        }
    }

    /// `X • S` including the low-order parts.
    pub fn gap(&self) -> f64 {
        let (x, s) = (&self.it.x, &self.it.s);
        let a: Vec<f64> = [x.as_slice(), x.as_slice(), self.x_lo.as_slice(), self.x_lo.as_slice()].concat();
        let b: Vec<f64> = [s.as_slice(), self.s_lo.as_slice(), s.as_slice(), self.s_lo.as_slice()].concat();
        crate::tensor::dot2(&a, &b)
    }

    pub fn nu(&self) -> f64 {
        self.gap() / self.it.n() as f64
    }

    fn advance(&self, dirs: &Directions) -> Self {
        let (x, x_lo) = add_extended(&self.it.x, &self.x_lo, &dirs.dx);
        let (s, s_lo) = add_extended(&self.it.s, &self.s_lo, &dirs.ds);
        Self {
            it: Iterate::new(x, &self.it.y + &dirs.dy, s),
            x_lo,
            s_lo,
        }
    }
}

/// One short step of the feasible method from `pt`, which is assumed to be
/// in `𝒩_F(γ)`. Returns the new point and its trace row.
pub fn if_step(p: &SdoProblem, pt: &IfPoint, cfg: &IfConfig, k: usize) -> Result<(IfPoint, IterationRecord)> {
    let t0 = Instant::now();
    let n = p.n;
    let it = &pt.it;
    let gap = pt.gap();
    let nu = gap / n as f64;
    let sigma = cfg.sigma(n);
    let sd = build_scaling(cfg.scaling, &it.x, &it.s, sigma, nu)?;
    let mut sys = assemble_if(&sd, &p.basis, &p.a_s)?;
    // Make tr R^c equal (σ−1) X•S for the accurate X•S rather than for the
    // rounded H_P(XS); the difference is at rounding level.
    let diag: Vec<usize> = (0..n).map(|i| crate::tensor::svec_index(n, i, i)).collect();
    let rc_trace: f64 = diag.iter().map(|&d| sys.rhs[d]).sum();
    let shift = (rc_trace + cfg.delta / (n as f64).sqrt() * gap) / n as f64;
    for &d in &diag {
        sys.rhs[d] -= shift;
    }
    let rc_norm = sys.rhs.norm();

    let inexact = cfg.solver != SolverChoice::Exact;
    let cond = if inexact || cfg.track_condition { Some(cond_2(&sys.m)) } else { None };
    let (sol, xi_k): (SolveReport, f64) = match cond {
        Some(c) if inexact => {
            if c.singular {
                return Err(Error::Singular);
            }
            let varrho = 1.0 / c.sigma_min;
            let xi_k = xi_schedule_if(cfg.beta, varrho, rc_norm, cfg.epsilon);
            let opts = AdaptiveOptions {
                norm: Some(c.sigma_max),
                stream: k as u64,
                ..AdaptiveOptions::default()
            };
            (adaptive_kappa_solve_with(&sys.m, &sys.rhs, varrho, xi_k, &cfg.solver, &opts)?, xi_k)
        }
        _ => (solve_exact(&sys.m, &sys.rhs)?, 0.0),
    };
    let mut u = sol.solution.clone();
    if cfg.traceless_residual {
        let rr = sys.residual_matrix(&u)?;
        let shift = rr.trace() / n as f64;
        if shift != 0.0 {
            let w = solve_exact(&sys.m, &svec(&(DMatrix::identity(n, n) * shift))?)?;
            u -= w.solution;
        }
    }
    let rr = sys.residual_matrix(&u)?;
    let dirs = directions_from_solution(&sys, &p.basis, &p.a_s, &u)?;

    let next_pt = pt.advance(&dirs);
    let next = &next_pt.it;
    let rc = crate::tensor::smat(&sys.rhs)?;
    let rec = IterationRecord {
        k,
        nu: next_pt.nu(),
        theta: None,
        tau: None,
        centrality: centrality(&next.x, &next.s).unwrap_or(f64::NAN),
        rp_norm: p.primal_residual(&next.x).norm(),
        rd_norm: p.dual_residual(&next.y, &next.s).norm(),
        kappa_newton: cond.map(|c| c.value),
        alpha: 1.0,
        solver_residual: crate::solvers::residual(&sys.m, &u, &sys.rhs).norm(),
        xi_k,
        wall_ms: elapsed_ms(t0),
        rc_norm,
        rr_norm: rr.norm(),
        rr_trace: rr.trace(),
        dx_ds: frob_inner(&dirs.dx, &dirs.ds),
        dx_norm: dirs.dx.norm(),
        ds_norm: dirs.ds.norm(),
        doublings: sol.doublings,
        scaled_residual_ratio: if inexact { scaled_residual_ratio(&sd, &rr, &rc) } else { None },
        second_order_ratio: None,
        trace_ratio: None,
    };
    Ok((next_pt, rec))
}

/// Runs the feasible method from a start in `𝒩_F(γ)` until `ν ≤ ε`.
pub fn run_if(p: &SdoProblem, start: &Iterate, cfg: &IfConfig) -> Result<RunTrace> {
    run_if_with(p, start, cfg, |_, _| {})
}

/// [`run_if`] calling `observe` with every accepted point and its row.
pub fn run_if_with<F>(p: &SdoProblem, start: &Iterate, cfg: &IfConfig, mut observe: F) -> Result<RunTrace>
where
    F: FnMut(&IfPoint, &IterationRecord),
{
    cfg.validate(p.n)?;
    if let Membership::Outside(v) = in_frobenius_neighborhood_tol(p, start, cfg.gamma, FEAS_TOL) {
        return Err(Error::Neighborhood {
            k: 0,
            reason: format!("start: {v}"),
        });
    }
    let mut pt = IfPoint::new(start.clone());
    let mut records = vec![start_record(p, start)?];
    let mut termination = Termination::Converged;
    let mut k = 0;
    while pt.nu() > cfg.epsilon {
        if k >= cfg.max_iter {
            termination = Termination::MaxIter;
            break;
        }
        k += 1;
        let (next, rec) = match if_step(p, &pt, cfg, k) {
            Ok(v) => v,
            Err(e) => {
                termination = Termination::Failed { reason: e.to_string() };
                break;
            }
        };
        observe(&next, &rec);
        records.push(rec);
        if cfg.check_neighborhood {
            if let Membership::Outside(v) = in_frobenius_neighborhood_tol(p, &next.it, cfg.gamma, FEAS_TOL) {
                pt = next;
                termination = Termination::Failed {
                    reason: format!("iterate {k} left the neighborhood: {v}"),
                };
                break;
            }
        }
        pt = next;
    }
    Ok(RunTrace {
        iterate: pt.it,
        records,
        termination,
        tau: None,
        theta: None,
        rho: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IiStop {
    /// `τ ≤ ε`.
    #[default]
    Tau,
    /// `θ ≤ ε`.
    Theta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IiConfig {
    pub epsilon: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub rho: f64,
    /// Lower bound on `σ_min(𝒜)`; `None` uses the computed value.
    pub vartheta_hat: Option<f64>,
    pub solver: SolverChoice,
    pub max_iter: usize,
    /// Number of backtracking points `α_max·0.9^j`.
    pub grid: usize,
    pub backtrack: f64,
    /// Injected residuals as a fraction of their caps.
    pub injection: f64,
    pub seed: u64,
    pub norm: CentralityNorm,
    pub stop: IiStop,
}

impl Default for IiConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            eta1: 0.9,
            eta2: 0.5,
            gamma1: 0.3,
            gamma2: 0.3,
            rho: 1.0,
            vartheta_hat: None,
            solver: SolverChoice::Exact,
            max_iter: 5000,
            grid: 64,
            backtrack: 0.9,
            injection: 0.5,
            seed: 0,
            norm: CentralityNorm::Operator,
            stop: IiStop::Tau,
        }
    }
}

impl IiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta1 > 0.0 && self.eta1 <= 1.0) {
            return Err(Error::Config("eta1 must lie in (0, 1]".into()));
        }
        for (name, v) in [("eta2", self.eta2), ("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1)")));
            }
        }
        if self.eta1 < self.eta2 {
            return Err(Error::Config(format!(
                "violated: eta1 >= eta2 (eta1 = {}, eta2 = {})",
                self.eta1, self.eta2
            )));
        }
        if !(self.rho > 0.0) || !(self.epsilon > 0.0) {
            return Err(Error::Config("rho and epsilon must be positive".into()));
        }
        if !(self.injection >= 0.0 && self.injection <= 1.0) {
            return Err(Error::Config("injection fraction must lie in [0, 1]".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Config("backtracking factor must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> InfeasibleParams {
        InfeasibleParams {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            mu0: self.rho * self.rho,
            norm: self.norm,
        }
    }
}

/// Largest step `α_max·b^j`, `j < grid`, whose state stays in `𝒩_I`;
/// 0 when none does.
pub fn ii_linesearch(
    p: &SdoProblem,
    state: &InfeasibleState,
    dirs: &Directions,
    cfg: &IiConfig,
    alpha_max: f64,
) -> f64 {
    let params = cfg.params();
    let mut alpha = alpha_max;
    for _ in 0..cfg.grid {
        let cand = step_state(state, dirs, alpha, cfg);
        if in_infeasible_neighborhood(&cand, p, &params, None).is_inside() {
            return alpha;
        }
        alpha *= cfg.backtrack;
    }
    0.0
}

/// The state after a step of length `α`: `τ ← (1−αη₁)τ`, `θ ← (1−αη₂)θ`.
pub fn step_state(state: &InfeasibleState, dirs: &Directions, alpha: f64, cfg: &IiConfig) -> InfeasibleState {
    let it = &state.iterate;
    InfeasibleState {
        tau: (1.0 - alpha * cfg.eta1) * state.tau,
        theta: (1.0 - alpha * cfg.eta2) * state.theta,
        iterate: Iterate::new(&it.x + &dirs.dx * alpha, &it.y + &dirs.dy * alpha, &it.s + &dirs.ds * alpha),
        r0p: state.r0p.clone(),
        r0d: state.r0d.clone(),
        rho: state.rho,
    }
}

fn random_unit(len: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let v = DVector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal));
    let nv = v.norm();
    if nv == 0.0 {
        v
    } else {
        v / nv
    }
}

fn random_symmetric_unit(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let s = symmetrize(&g);
    let ns = s.norm();
    if ns == 0.0 {
        s
    } else {
        s / ns
    }
}

fn spectral_or_frobenius(m: &DMatrix<f64>, norm: CentralityNorm) -> Result<f64> {
    match norm {
        CentralityNorm::Frobenius => Ok(m.norm()),
        CentralityNorm::Operator => {
            let (vals, _) = sym_eigen(&symmetrize(m))?;
            Ok(vals.iter().fold(0.0f64, |a, v| a.max(v.abs())))
        }
    }
}

/// Runs the infeasible method from `X₀ = S₀ = ρI`, `y₀ = 0`.
pub fn run_ii(p: &SdoProblem, cfg: &IiConfig) -> Result<RunTrace> {
    run_ii_with(p, cfg, |_, _| {})
}

/// [`run_ii`] calling `observe` on every accepted state and its record.
pub fn run_ii_with<F>(p: &SdoProblem, cfg: &IiConfig, mut observe: F) -> Result<RunTrace>
where
    F: FnMut(&InfeasibleState, &IterationRecord),
{
    cfg.validate()?;
    let n = p.n;
    let params = cfg.params();
    let rho = cfg.rho;
    let theta_hat = cfg.vartheta_hat.unwrap_or_else(|| p.basis.sigma_min());
    let vbar = vartheta_sum(n, cfg.epsilon);
    let alpha_max = (1.0 / (cfg.eta1 * (1.0 + vbar))).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut state = InfeasibleState::start(p, rho);
    if let Membership::Outside(v) = in_infeasible_neighborhood(&state, p, &params, None) {
        return Err(Error::Neighborhood {
            k: 0,
            reason: format!("start: {v}"),
        });
    }
    let meas0 = measure_infeasible(&state, p, &params, None)?;
    let mut records = vec![IterationRecord {
        k: 0,
        nu: state.iterate.nu(),
        theta: Some(1.0),
        tau: Some(1.0),
        centrality: meas0.centrality,
        rp_norm: state.r0p.norm(),
        rd_norm: state.r0d.norm(),
        trace_ratio: Some(state.iterate.x.trace() / (rho * n as f64)),
        ..IterationRecord::default()
    }];
    let mut termination = Termination::Converged;
    let mut k = 0;
    loop {
        let gauge = match cfg.stop {
            IiStop::Tau => state.tau,
            IiStop::Theta => state.theta,
        };
        if gauge <= cfg.epsilon {
            break;
        }
        if k >= cfg.max_iter {
            termination = Termination::MaxIter;
            break;
        }
        let t0 = Instant::now();
        let vk = vartheta(k, n, cfg.epsilon);
        k += 1;
        match ii_iteration(p, &state, cfg, &mut rng, theta_hat, vk, alpha_max, k) {
            Ok((next, mut rec)) => {
                rec.wall_ms = elapsed_ms(t0);
                observe(&next, &rec);
                state = next;
                records.push(rec);
            }
            Err(e) => {
                termination = Termination::Failed { reason: e.to_string() };
                break;
            }
        }
    }
    Ok(RunTrace {
        tau: Some(state.tau),
        theta: Some(state.theta),
        rho: Some(rho),
        iterate: state.iterate,
        records,
        termination,
    })
}

#[allow(clippy::too_many_arguments)]
fn ii_iteration(
    p: &SdoProblem,
    state: &InfeasibleState,
    cfg: &IiConfig,
    rng: &mut ChaCha8Rng,
    theta_hat: f64,
    vk: f64,
    alpha_max: f64,
    k: usize,
) -> Result<(InfeasibleState, IterationRecord)> {
    let n = p.n;
    let params = cfg.params();
    let mu0 = params.mu0;
    let it = &state.iterate;
    let nu = it.nu();
    let target = (1.0 - cfg.eta2) * state.theta * mu0;
    let sd = build_scaling(ScalingChoice::Hkm, &it.x, &it.s, target / nu, nu)?;
    let rd = p.dual_residual(&it.y, &it.s);
    let rp = p.primal_residual(&it.x);

    let cap_p = theta_hat * cfg.gamma1 * state.rho * state.tau * vk;
    let cap_d = cfg.gamma1 * state.rho * state.tau * vk;
    let cap_c = 0.5 * (1.0 - cfg.eta2) * cfg.gamma2 * state.theta * mu0;
    let inj = Injection {
        rp: random_unit(p.m, rng) * (cfg.injection * cap_p),
        rd: random_unit(rd.len(), rng) * (cfg.injection * cap_d),
        rc: random_symmetric_unit(n, rng) * (cfg.injection * cap_c),
    };
    let sys = assemble_ii(&sd, &p.a_s, &rd, &rp, cfg.eta1, &inj)?;
    let sol = match cfg.solver {
        SolverChoice::Exact => solve_exact(&sys.m, &sys.rhs)?,
        ref choice => {
            // The solve residual adds to the injected residuals; keep it
            // below the smallest remaining slack.
            let slack = (1.0 - cfg.injection) * cap_p.min(cap_d).min(cap_c);
            let opts = AdaptiveOptions {
                stream: k as u64,
                ..AdaptiveOptions::default()
            };
            adaptive_kappa_solve_with(&sys.m, &sys.rhs, 1.0, slack, choice, &opts)?
        }
    };
    let dirs = sys.split(&sol.solution)?;
    let alpha = ii_linesearch(p, state, &dirs, cfg, alpha_max);
    if alpha == 0.0 {
        return Err(Error::LineSearchStall { k });
    }
    let next = step_state(state, &dirs, alpha, cfg);
    let meas = measure_infeasible(&next, p, &params, None)?;
    let p_scale = mat_sqrt(&it.s)?;
    let hp = h_p(&(&dirs.dx * &dirs.ds), &p_scale)?;
    let second = spectral_or_frobenius(&hp, cfg.norm)? / ((n * n) as f64 * state.theta * mu0);
    let nx = &next.iterate;
    let rec = IterationRecord {
        k,
        nu: nx.nu(),
        theta: Some(next.theta),
        tau: Some(next.tau),
        centrality: meas.centrality,
        rp_norm: p.primal_residual(&nx.x).norm(),
        rd_norm: p.dual_residual(&nx.y, &nx.s).norm(),
        kappa_newton: None,
        alpha,
        solver_residual: sol.residual_norm,
        xi_k: vk,
        wall_ms: 0.0,
        rc_norm: sd.rcs.norm(),
        rr_norm: inj.rc.norm(),
        rr_trace: inj.rc.trace(),
        dx_ds: frob_inner(&dirs.dx, &dirs.ds),
        dx_norm: dirs.dx.norm(),
        ds_norm: dirs.ds.norm(),
        doublings: sol.doublings,
        scaled_residual_ratio: None,
        second_order_ratio: Some(second),
        trace_ratio: Some(next.tau * nx.x.trace() / (next.theta * state.rho * n as f64)),
    };
    Ok((next, rec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_schedule_branches() {
        assert_eq!(xi_schedule_if(0.25, 1.0, 1.0, 0.01), 0.25);
        assert!((xi_schedule_if(0.25, 2.0, 1e-9, 0.01) - 5e-5).abs() < 1e-18);
        assert_eq!(xi_schedule_if(0.0, 1.0, 1.0, 0.01), 0.0);
    }

    #[test]
    fn vartheta_examples() {
        assert_eq!(vartheta(0, 2, 0.5), 1.0);
        assert_eq!(vartheta(3, 2, 0.5), 1.0);
        assert!((vartheta(0, 16, 2f64.powi(-10)) - 0.025).abs() < 1e-15);
        // N = 4 for n = 2, ε = 1/2.
        assert_eq!(vartheta(4, 2, 0.5), 1.0);
        assert!((vartheta(5, 2, 0.5) - 2f64.powf(-1.1)).abs() < 1e-15);
    }

    #[test]
    fn vartheta_sum_tail_is_zeta() {
        // n = 1: log n = 0, so N = 0 and the sum is ζ(1.1).
        assert!((vartheta_sum(1, 0.01) - 10.584_448_464_950_81).abs() < 1e-6);
        // N = 4 for n = 2, ε = 1/2.
        assert!((vartheta_sum(2, 0.5) - (4.0 + 10.584_448_464_950_81)).abs() < 1e-6);
    }

    #[test]
    fn default_parameters_satisfy_conditions() {
        let cfg = IfConfig {
            solver: SolverChoice::CgNormal,
            ..IfConfig::default()
        };
        for n in 2..40 {
            cfg.validate(n).unwrap();
        }
        let bad = IfConfig {
            gamma: 0.3,
            ..IfConfig::default()
        };
        assert!(bad.validate(10).is_err());
    }

    #[test]
    fn ii_config_order() {
        let cfg = IiConfig {
            eta1: 0.4,
            eta2: 0.5,
            ..IiConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
