//! Linear solvers for the Newton systems.
//!
//! `Exact` is dense LU with one refinement step. `CgNormal` runs CG on
//! `MᵀMu = Mᵀv` through products with `M` and `Mᵀ` (CGLS). `Chebyshev`
//! applies a Chebyshev polynomial in `MᵀM` on the interval `[1/κ̃², 1]` after
//! rescaling `M` to unit spectral norm; it is the classical stand-in for a
//! QLSA that needs a condition-number bound. `SimTomography` perturbs the
//! output of an inner solver by a random vector of bounded norm, the way
//! reading out a quantum state with finite precision would.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::dot2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerSolver {
    Exact,
    CgNormal,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Radius uniform in `[0, ξ]`, direction uniform on the sphere.
    #[default]
    Uniform,
    /// Radius exactly `ξ`, direction uniform on the sphere.
    WorstCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomographyConfig {
    pub inner: InnerSolver,
    pub seed: u64,
    pub mode: NoiseMode,
    /// Probability that a readout misses its error bound (radius ×10).
    pub failure_rate: f64,
}

impl TomographyConfig {
    pub fn new(inner: InnerSolver, seed: u64) -> Self {
        Self {
            inner,
            seed,
            mode: NoiseMode::Uniform,
            failure_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Exact,
    CgNormal,
    Chebyshev,
    SimTomography(TomographyConfig),
}

impl SolverChoice {
    pub fn inner(&self) -> InnerSolver {
        match self {
            SolverChoice::Exact => InnerSolver::Exact,
            SolverChoice::CgNormal => InnerSolver::CgNormal,
            SolverChoice::Chebyshev => InnerSolver::Chebyshev,
            SolverChoice::SimTomography(t) => t.inner,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolverChoice::Exact => "exact",
            SolverChoice::CgNormal => "cg",
            SolverChoice::Chebyshev => "chebyshev",
            SolverChoice::SimTomography(_) => "sim-tomography",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: DVector<f64>,
    /// `‖M u − rhs‖₂` for the returned `u`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub kappa_used: f64,
    pub accepted: bool,
    pub doublings: usize,
}

/// `M u − rhs` with each entry accumulated in doubled precision.
pub fn residual(m: &DMatrix<f64>, u: &DVector<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(m.nrows());
    let mut row = vec![0.0; m.ncols() + 1];
    let mut ext = vec![0.0; m.ncols() + 1];
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            row[j] = m[(i, j)];
            ext[j] = u[j];
        }
        row[m.ncols()] = -1.0;
        ext[m.ncols()] = rhs[i];
        out[i] = dot2(&row, &ext);
    }
    out
}

fn report(m: &DMatrix<f64>, rhs: &DVector<f64>, u: DVector<f64>, iterations: usize, kappa: f64, accepted: bool) -> SolveReport {
    let residual_norm = residual(m, &u, rhs).norm();
    SolveReport {
        solution: u,
        residual_norm,
        iterations,
        kappa_used: kappa,
        accepted,
        doublings: 0,
    }
}

/// Dense LU with partial pivoting followed by one step of iterative
/// refinement with a doubled-precision residual.
pub fn solve_exact(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<SolveReport> {
    if !m.is_square() || m.nrows() != rhs.len() {
        return Err(Error::Dimension("exact solve needs a square system".into()));
    }
    if m.nrows() == 0 {
        return Ok(report(m, rhs, DVector::zeros(0), 0, 1.0, true));
    }
    let lu = m.clone().lu();
    let mut u = lu.solve(rhs).ok_or(Error::Singular)?;
    if !u.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular);
    }
    let r = residual(m, &u, rhs);
    if let Some(corr) = lu.solve(&r) {
        if corr.iter().all(|v| v.is_finite()) {
            u -= corr;
        }
    }
    Ok(report(m, rhs, u, 1, 1.0, true))
}

/// CGLS: conjugate gradients on the normal equations without forming
/// `MᵀM`. Stops once `‖M u − rhs‖₂ ≤ xi`.
pub fn solve_cg_normal(m: &DMatrix<f64>, rhs: &DVector<f64>, xi: f64, max_iter: usize) -> SolveReport {
    let ncols = m.ncols();
    let mut u = DVector::zeros(ncols);
    let mut r = rhs.clone();
    let mut iterations = 0;
    let mut converged = r.norm() <= xi;
    while !converged && iterations < max_iter {
        // Restart from the true residual so rounding drift cannot stall.
        let mut s = m.tr_mul(&r);
        let mut p = s.clone();
        let mut gamma = s.norm_squared();
        let restart_len = 2 * ncols.max(1) + 10;
        for _ in 0..restart_len {
            if iterations >= max_iter || gamma == 0.0 {
                break;
            }
            let q = m * &p;
            let qq = q.norm_squared();
            if qq == 0.0 {
                break;
            }
            let alpha = gamma / qq;
            u.axpy(alpha, &p, 1.0);
            r.axpy(-alpha, &q, 1.0);
            iterations += 1;
            if r.norm() <= xi {
                break;
            }
            s = m.tr_mul(&r);
            let gamma_new = s.norm_squared();
            let beta = gamma_new / gamma;
            gamma = gamma_new;
            p = &s + p * beta;
        }
        r = -residual(m, &u, rhs);
        converged = r.norm() <= xi;
        if gamma == 0.0 && !converged {
            break;
        }
    }
    let rep = report(m, rhs, u, iterations, 1.0, false);
    let accepted = rep.residual_norm <= xi;
    SolveReport { accepted, ..rep }
}

/// Power-iteration estimate of `‖M‖₂` (from below, converging).
pub fn spectral_norm_estimate(m: &DMatrix<f64>, max_iter: usize) -> f64 {
    let ncols = m.ncols();
    if ncols == 0 || m.nrows() == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(ncols, 1.0 / (ncols as f64).sqrt());
    // A fixed but not too symmetric start avoids orthogonality to the top
    // singular vector on structured matrices.
    for (i, x) in v.iter_mut().enumerate() {
        *x *= 1.0 + 0.1 * ((i * 7919 % 13) as f64) / 13.0;
    }
    v /= v.norm();
    let mut est = 0.0;
    for _ in 0..max_iter {
        let w = m.tr_mul(&(m * &v));
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let new_est = nw.sqrt();
        v = w / nw;
        if (new_est - est).abs() <= 1e-12 * new_est {
            est = new_est;
            break;
        }
        est = new_est;
    }
    est
}

/// Chebyshev degree `ceil(c_deg · κ̃ · ln(1/ξ))`, at least 1.
pub fn chebyshev_degree(kappa_bound: f64, xi: f64, c_deg: f64) -> usize {
    let xi = xi.clamp(f64::MIN_POSITIVE, 0.5);
    ((c_deg * kappa_bound * (1.0 / xi).ln()).ceil() as usize).max(1)
}

/// Safety factor applied to the power-iteration norm estimate.
const NORM_SAFETY: f64 = 1.01;

/// `q(M̂ᵀM̂) M̂ᵀ v` for `M̂ = M / ‖M‖₂` with `q` the degree-`d` Chebyshev
/// approximation of `1/x` on `[1/κ̃², 1]`, undone for the scale. Returns
/// the vector and the number of matrix-vector products used.
fn chebyshev_apply(m: &DMatrix<f64>, rhs: &DVector<f64>, scale: f64, kappa: f64, degree: usize) -> (DVector<f64>, usize) {
    let a = 1.0 / (kappa * kappa);
    let b = 1.0;
    let theta = 0.5 * (b + a);
    let delta = 0.5 * (b - a);
    let apply = |v: &DVector<f64>| -> DVector<f64> { m.tr_mul(&(m * v)) / (scale * scale) };
    // Normal equations for M̂ u = rhs/scale: M̂ᵀM̂ u = M̂ᵀ rhs / scale.
    let f = m.tr_mul(rhs) / (scale * scale);
    let mut products = 1;
    let mut x = DVector::zeros(m.ncols());
    if delta <= 0.0 {
        // κ̃ = 1: the interval is the single point 1.
        return (f, products);
    }
    let sigma1 = theta / delta;
    let mut rho = 1.0 / sigma1;
    let mut r = f.clone();
    let mut d = &r / theta;
    for _ in 0..degree {
        x += &d;
        r -= apply(&d);
        products += 2;
        let rho_new = 1.0 / (2.0 * sigma1 - rho);
        d = d * (rho_new * rho) + &r * (2.0 * rho_new / delta);
        rho = rho_new;
    }
    (x, products)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevOptions {
    pub c_deg: f64,
    pub power_iters: usize,
    /// Known `‖M‖₂`, skipping the power iteration.
    pub norm: Option<f64>,
}

impl Default for ChebyshevOptions {
    fn default() -> Self {
        Self {
            c_deg: 1.0,
            power_iters: 200,
            norm: None,
        }
    }
}

/// Chebyshev solve accepted when `‖M u − rhs‖ ≤ xi ‖rhs‖`; retries once at
/// twice the degree before giving up.
pub fn solve_chebyshev(m: &DMatrix<f64>, rhs: &DVector<f64>, xi: f64, kappa_bound: f64) -> SolveReport {
    solve_chebyshev_with(m, rhs, xi, kappa_bound, &ChebyshevOptions::default())
}

pub fn solve_chebyshev_with(
    m: &DMatrix<f64>,
    rhs: &DVector<f64>,
    xi: f64,
    kappa_bound: f64,
    opts: &ChebyshevOptions,
) -> SolveReport {
    let kappa = kappa_bound.max(1.0);
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 || m.ncols() == 0 {
        return report(m, rhs, DVector::zeros(m.ncols()), 0, kappa, true);
    }
    let scale = NORM_SAFETY * opts.norm.unwrap_or_else(|| spectral_norm_estimate(m, opts.power_iters));
    let degree = chebyshev_degree(kappa, xi, opts.c_deg);
    let mut products = 0;
    let mut last = None;
    for d in [degree, 2 * degree] {
        let (u, used) = chebyshev_apply(m, rhs, scale, kappa, d);
        products += used;
        let rep = report(m, rhs, u, products, kappa, false);
        if rep.residual_norm <= xi * rhs_norm {
            return SolveReport { accepted: true, ..rep };
        }
        last = Some(rep);
    }
    last.expect("two attempts made")
}

/// Output of a tomography readout with error at most `xi` in the 2-norm.
pub fn simulate_tomography(u: &DVector<f64>, xi: f64, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb(u, xi, NoiseMode::Uniform, &mut rng)
}

pub fn simulate_tomography_mode(u: &DVector<f64>, xi: f64, seed: u64, mode: NoiseMode) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb(u, xi, mode, &mut rng)
}

fn perturb(u: &DVector<f64>, xi: f64, mode: NoiseMode, rng: &mut ChaCha8Rng) -> DVector<f64> {
    if xi <= 0.0 || u.is_empty() {
        return u.clone();
    }
    let mut dir = DVector::from_fn(u.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let nrm = dir.norm();
    if nrm == 0.0 {
        return u.clone();
    }
    let radius = match mode {
        NoiseMode::Uniform => xi * rng.random::<f64>(),
        NoiseMode::WorstCase => xi,
    };
    dir *= radius / nrm;
    // Guard the bound against the last rounding in the scaling above.
    let dn = dir.norm();
    if dn > xi {
        dir *= xi / dn;
    }
    u + dir
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub doubling_cap: usize,
    /// `‖M‖₂` if already known.
    pub norm: Option<f64>,
    /// Distinguishes calls that share a tomography seed (e.g. iteration index).
    pub stream: u64,
    pub c_deg: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            doubling_cap: 60,
            norm: None,
            stream: 0,
            c_deg: 1.0,
        }
    }
}

pub fn adaptive_kappa_solve(
    m: &DMatrix<f64>,
    rhs: &DVector<f64>,
    varrho: f64,
    xi_k: f64,
    choice: &SolverChoice,
) -> Result<SolveReport> {
    adaptive_kappa_solve_with(m, rhs, varrho, xi_k, choice, &AdaptiveOptions::default())
}

fn mix_seed(seed: u64, stream: u64, attempt: u64) -> u64 {
    // SplitMix64 finalizer over the combined words.
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Starting from `κ̃ = 1`, solve and double `κ̃` until the residual
/// `‖M u − rhs‖₂` is at most `varrho · xi_k`.
pub fn adaptive_kappa_solve_with(
    m: &DMatrix<f64>,
    rhs: &DVector<f64>,
    varrho: f64,
    xi_k: f64,
    choice: &SolverChoice,
    opts: &AdaptiveOptions,
) -> Result<SolveReport> {
    let threshold = varrho * xi_k;
    let rhs_norm = rhs.norm();
    let needs_norm = matches!(choice, SolverChoice::SimTomography(_) | SolverChoice::Chebyshev);
    let m_norm = if needs_norm {
        Some(opts.norm.unwrap_or_else(|| spectral_norm_estimate(m, 200)))
    } else {
        opts.norm
    };
    let mut kappa = 1.0f64;
    let mut total_iters = 0;
    for doubling in 0..=opts.doubling_cap {
        let inner = match choice.inner() {
            InnerSolver::Exact => solve_exact(m, rhs)?,
            InnerSolver::CgNormal => {
                let budget = chebyshev_degree(kappa, (threshold / rhs_norm.max(f64::MIN_POSITIVE)).min(0.5), 1.0) + 1;
                let tol = if matches!(choice, SolverChoice::SimTomography(_)) { 0.5 * threshold } else { threshold };
                solve_cg_normal(m, rhs, tol, budget)
            }
            InnerSolver::Chebyshev => {
                let share = if matches!(choice, SolverChoice::SimTomography(_)) { 0.5 } else { 1.0 };
                let rel = if rhs_norm > 0.0 { share * threshold / rhs_norm } else { 0.5 };
                let copts = ChebyshevOptions {
                    c_deg: opts.c_deg,
                    norm: m_norm,
                    ..ChebyshevOptions::default()
                };
                solve_chebyshev_with(m, rhs, rel.min(0.5), kappa, &copts)
            }
        };
        total_iters += inner.iterations;
        let mut u = inner.solution;
        if let SolverChoice::SimTomography(cfg) = choice {
            let budget = (threshold - inner.residual_norm).max(0.0);
            let mut radius = match m_norm {
                Some(nm) if nm > 0.0 => budget / nm,
                _ => 0.0,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, opts.stream, doubling as u64));
            if cfg.failure_rate > 0.0 && rng.random::<f64>() < cfg.failure_rate {
                radius *= 10.0;
            }
            u = perturb(&u, radius, cfg.mode, &mut rng);
        }
        let res = residual(m, &u, rhs).norm();
        if res <= threshold {
            return Ok(SolveReport {
                solution: u,
                residual_norm: res,
                iterations: total_iters,
                kappa_used: kappa,
                accepted: true,
                doublings: doubling,
            });
        }
        kappa *= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "adaptive condition-number loop ({} doublings)",
        opts.doubling_cap
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_identity_and_diag() {
        let rhs = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let r = solve_exact(&DMatrix::identity(3, 3), &rhs).unwrap();
        assert_eq!(r.solution, rhs);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0]));
        let r = solve_exact(&m, &DVector::from_vec(vec![2.0, 4.0])).unwrap();
        assert!((r.solution - DVector::from_vec(vec![1.0, 1.0])).norm() < 1e-15);
        assert!(solve_exact(&DMatrix::zeros(2, 2), &DVector::zeros(2)).is_err());
    }

    #[test]
    fn cg_identity_one_step() {
        let rhs = DVector::from_vec(vec![1.0, 2.0]);
        let r = solve_cg_normal(&DMatrix::identity(2, 2), &rhs, 1e-12, 10);
        assert!(r.accepted);
        assert!(r.iterations <= 1);
    }

    #[test]
    fn chebyshev_diag_example() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5]));
        let rhs = DVector::from_vec(vec![1.0, 1.0]);
        let r = solve_chebyshev(&m, &rhs, 1e-6, 2.0);
        assert!(r.accepted);
        assert!((r.solution - DVector::from_vec(vec![1.0, 2.0])).norm() < 1e-6);
    }

    #[test]
    fn degree_is_linear_in_kappa() {
        let d1 = chebyshev_degree(10.0, 1e-3, 1.0) as i64;
        let d2 = chebyshev_degree(20.0, 1e-3, 1.0) as i64;
        assert!((d2 - 2 * d1).abs() <= 1);
    }

    #[test]
    fn tomography_zero_radius() {
        let u = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(simulate_tomography(&u, 0.0, 3), u);
        assert_eq!(simulate_tomography(&u, 0.1, 3), simulate_tomography(&u, 0.1, 3));
    }
}
