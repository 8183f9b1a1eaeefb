//! Problem data, iterates, residuals and central-path neighborhoods.
//!
//! Primal: `min C • X  s.t.  A⁽ⁱ⁾ • X = bᵢ, X ⪰ 0`.
//! Dual:   `max bᵀy    s.t.  Σ yᵢA⁽ⁱ⁾ + S = C, S ⪰ 0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::newton::{nullspace_basis, NullspaceBasis};
use crate::scaling::h_p;
use crate::tensor::{frob_inner, mat_sqrt, svec, svec_len, sym_eigen, symmetrize, symmetry_defect};

/// Relative tolerance for the feasibility of IF iterates.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SdoProblem {
    pub n: usize,
    pub m: usize,
    pub a: Vec<DMatrix<f64>>,
    pub b: DVector<f64>,
    pub c: DMatrix<f64>,
    /// Rows are `svec(A⁽ⁱ⁾)`.
    pub a_s: DMatrix<f64>,
    pub basis: NullspaceBasis,
}

impl SdoProblem {
    pub fn new(a: Vec<DMatrix<f64>>, b: DVector<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = c.nrows();
        if c.ncols() != n {
            return Err(Error::Dimension("C must be square".into()));
        }
        let m = a.len();
        if b.len() != m {
            return Err(Error::Dimension(format!("b has length {} but there are {m} constraints", b.len())));
        }
        let width = svec_len(n);
        let mut a_s = DMatrix::zeros(m, width);
        for (i, ai) in a.iter().enumerate() {
            if ai.shape() != (n, n) {
                return Err(Error::Dimension(format!("A({i}) is not {n}x{n}")));
            }
            a_s.row_mut(i).copy_from(&svec(ai)?.transpose());
        }
        svec(&c)?;
        let basis = nullspace_basis(&a_s)?;
        Ok(Self {
            n,
            m,
            a,
            b,
            c,
            a_s,
            basis,
        })
    }

    pub fn primal_objective(&self, x: &DMatrix<f64>) -> f64 {
        frob_inner(&self.c, x)
    }

    pub fn dual_objective(&self, y: &DVector<f64>) -> f64 {
        self.b.dot(y)
    }

    /// `𝒜_s svec(X) − b`.
    pub fn primal_residual(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.m, (0..self.m).map(|i| frob_inner(&self.a[i], x) - self.b[i]))
    }

    /// `svec(Σ yᵢA⁽ⁱ⁾ + S − C)`.
    pub fn dual_residual(&self, y: &DVector<f64>, s: &DMatrix<f64>) -> DVector<f64> {
        let mut r = s - &self.c;
        for (yi, ai) in y.iter().zip(&self.a) {
            r += ai * *yi;
        }
        svec(&symmetrize(&r)).expect("square by construction")
    }

    pub fn b_norm(&self) -> f64 {
        self.b.norm()
    }

    pub fn c_norm(&self) -> f64 {
        self.c.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub s: DMatrix<f64>,
}

impl Iterate {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, s: DMatrix<f64>) -> Self {
        Self { x, y, s }
    }

    /// `ν = X • S / n`.
    pub fn nu(&self) -> f64 {
        duality_gap_normalized(self)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}

pub fn duality_gap_normalized(it: &Iterate) -> f64 {
    frob_inner(&it.x, &it.s) / it.x.nrows() as f64
}

/// Eigenvalues (descending) of `X^{1/2} S X^{1/2}`, i.e. of `XS`.
pub fn xs_eigenvalues(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DVector<f64>> {
    let xh = mat_sqrt(x)?;
    Ok(sym_eigen(&symmetrize(&(&xh * s * &xh)))?.0)
}

/// Centrality `d(X,S) = ‖X^{1/2} S X^{1/2} − νI‖_F`.
pub fn centrality(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<f64> {
    let n = x.nrows() as f64;
    let nu = frob_inner(x, s) / n;
    let lam = xs_eigenvalues(x, s)?;
    Ok(lam.iter().map(|l| (l - nu) * (l - nu)).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub rp: Vec<f64>,
    pub rd: Vec<f64>,
    pub rp_norm: f64,
    pub rd_norm: f64,
    pub gap: f64,
    pub centrality: f64,
}

pub fn residuals(p: &SdoProblem, it: &Iterate) -> Result<ResidualReport> {
    let rp = p.primal_residual(&it.x);
    let rd = p.dual_residual(&it.y, &it.s);
    Ok(ResidualReport {
        rp_norm: rp.norm(),
        rd_norm: rd.norm(),
        rp: rp.iter().copied().collect(),
        rd: rd.iter().copied().collect(),
        gap: frob_inner(&it.x, &it.s),
        centrality: centrality(&it.x, &it.s)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    NotSymmetric,
    PrimalInfeasible,
    DualInfeasible,
    NotPositiveDefinite,
    Centrality,
    TauAboveTheta,
    DualResidual,
    PrimalResidual,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Violation::NotSymmetric => "iterate is not symmetric",
            Violation::PrimalInfeasible => "primal residual above tolerance",
            Violation::DualInfeasible => "dual residual above tolerance",
            Violation::NotPositiveDefinite => "X or S not positive definite",
            Violation::Centrality => "centrality bound violated",
            Violation::TauAboveTheta => "tau exceeds theta",
            Violation::DualResidual => "dual residual deviation above gamma1*rho",
            Violation::PrimalResidual => "primal residual deviation above gamma1*rho",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside(Violation),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }
}

fn is_pd(g: &DMatrix<f64>) -> bool {
    g.iter().all(|v| v.is_finite()) && g.clone().cholesky().is_some()
}

fn feasibility(p: &SdoProblem, it: &Iterate, tol: f64) -> Option<Violation> {
    if symmetry_defect(&it.x) != 0.0 || symmetry_defect(&it.s) != 0.0 {
        return Some(Violation::NotSymmetric);
    }
    if p.primal_residual(&it.x).norm() > tol * (1.0 + p.b_norm()) {
        return Some(Violation::PrimalInfeasible);
    }
    if p.dual_residual(&it.y, &it.s).norm() > tol * (1.0 + p.c_norm()) {
        return Some(Violation::DualInfeasible);
    }
    if !is_pd(&it.x) || !is_pd(&it.s) {
        return Some(Violation::NotPositiveDefinite);
    }
    None
}

/// `𝒩_F(γ)`: feasible, positive definite and `d(X,S) ≤ γν`.
pub fn in_frobenius_neighborhood(p: &SdoProblem, it: &Iterate, gamma: f64) -> Membership {
    in_frobenius_neighborhood_tol(p, it, gamma, FEAS_TOL)
}

pub fn in_frobenius_neighborhood_tol(p: &SdoProblem, it: &Iterate, gamma: f64, tol: f64) -> Membership {
    if let Some(v) = feasibility(p, it, tol) {
        return Membership::Outside(v);
    }
    match centrality(&it.x, &it.s) {
        Ok(d) if d <= gamma * it.nu() => Membership::Inside,
        Ok(_) => Membership::Outside(Violation::Centrality),
        Err(_) => Membership::Outside(Violation::NotPositiveDefinite),
    }
}

/// `𝒩_∞⁻(γ)`: feasible, positive definite and `λ_min(XS) ≥ γν`.
pub fn in_minus_infinity_neighborhood(p: &SdoProblem, it: &Iterate, gamma: f64) -> Membership {
    if let Some(v) = feasibility(p, it, FEAS_TOL) {
        return Membership::Outside(v);
    }
    match xs_eigenvalues(&it.x, &it.s) {
        Ok(lam) if lam[lam.len() - 1] >= gamma * it.nu() => Membership::Inside,
        Ok(_) => Membership::Outside(Violation::Centrality),
        Err(_) => Membership::Outside(Violation::NotPositiveDefinite),
    }
}

/// Norm applied to `H_P(XS) − θμ₀I` in the infeasible neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CentralityNorm {
    #[default]
    Operator,
    Frobenius,
}

#[derive(Debug, Clone)]
pub struct InfeasibleState {
    pub tau: f64,
    pub theta: f64,
    pub iterate: Iterate,
    pub r0p: DVector<f64>,
    pub r0d: DVector<f64>,
    pub rho: f64,
}

impl InfeasibleState {
    /// `X₀ = S₀ = ρI`, `y₀ = 0`, `τ = θ = 1`.
    pub fn start(p: &SdoProblem, rho: f64) -> Self {
        let x = DMatrix::identity(p.n, p.n) * rho;
        let y = DVector::zeros(p.m);
        let s = x.clone();
        let r0p = p.primal_residual(&x);
        let r0d = p.dual_residual(&y, &s);
        Self {
            tau: 1.0,
            theta: 1.0,
            iterate: Iterate::new(x, y, s),
            r0p,
            r0d,
            rho,
        }
    }

    pub fn mu0(&self) -> f64 {
        self.rho * self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfeasibleParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub mu0: f64,
    pub norm: CentralityNorm,
}

/// The quantities tested by the infeasible neighborhood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfeasibleMeasure {
    /// `‖ζᵈ‖` with `ζᵈ = r_d/τ − R₀ᵈ`.
    pub zeta_d: f64,
    /// `‖𝒜⁺ζᵖ‖` with `ζᵖ = r_p/τ − R₀ᵖ`.
    pub zeta_p: f64,
    /// `‖H_P(XS) − θμ₀I‖`.
    pub centrality: f64,
}

/// Measures the conditions of `𝒩_I`. `scale` is the Monteiro-Zhang `P`;
/// `None` selects `S^{1/2}` of the point being tested.
pub fn measure_infeasible(
    state: &InfeasibleState,
    p: &SdoProblem,
    params: &InfeasibleParams,
    scale: Option<&DMatrix<f64>>,
) -> Result<InfeasibleMeasure> {
    let it = &state.iterate;
    let rd = p.dual_residual(&it.y, &it.s);
    let rp = p.primal_residual(&it.x);
    let zeta_d = (rd / state.tau - &state.r0d).norm();
    let zeta_p = p.basis.pinv_norm(&(rp / state.tau - &state.r0p));
    let h = match scale {
        Some(pm) => h_p(&(&it.x * &it.s), pm)?,
        None => {
            let sh = mat_sqrt(&it.s)?;
            symmetrize(&(&sh * &it.x * &sh))
        }
    };
    let mut dev = h;
    for i in 0..p.n {
        dev[(i, i)] -= state.theta * params.mu0;
    }
    let centrality = match params.norm {
        CentralityNorm::Frobenius => dev.norm(),
        CentralityNorm::Operator => {
            let (vals, _) = sym_eigen(&dev)?;
            vals.iter().fold(0.0f64, |a, v| a.max(v.abs()))
        }
    };
    Ok(InfeasibleMeasure {
        zeta_d,
        zeta_p,
        centrality,
    })
}

pub fn in_infeasible_neighborhood(
    state: &InfeasibleState,
    p: &SdoProblem,
    params: &InfeasibleParams,
    scale: Option<&DMatrix<f64>>,
) -> Membership {
    if state.tau > state.theta {
        return Membership::Outside(Violation::TauAboveTheta);
    }
    let it = &state.iterate;
    if symmetry_defect(&it.x) != 0.0 || symmetry_defect(&it.s) != 0.0 {
        return Membership::Outside(Violation::NotSymmetric);
    }
    if !is_pd(&it.x) || !is_pd(&it.s) {
        return Membership::Outside(Violation::NotPositiveDefinite);
    }
    let meas = match measure_infeasible(state, p, params, scale) {
        Ok(m) => m,
        Err(_) => return Membership::Outside(Violation::NotPositiveDefinite),
    };
    let bound = params.gamma1 * state.rho;
    if meas.zeta_d > bound {
        return Membership::Outside(Violation::DualResidual);
    }
    if meas.zeta_p > bound {
        return Membership::Outside(Violation::PrimalResidual);
    }
    if meas.centrality > params.gamma2 * state.theta * params.mu0 {
        return Membership::Outside(Violation::Centrality);
    }
    Membership::Inside
}
