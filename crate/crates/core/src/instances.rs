//! Instance generators with known strictly feasible, well-centered starts.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{Iterate, SdoProblem};
use crate::tensor::{frob_inner, sym_eigen};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample::<f64, _>(StandardNormal)
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = normal(rng);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Random problem built around the interior point `X₀ = S₀ = I`: the
/// constraint matrices are symmetric with standard normal entries,
/// `bᵢ = A⁽ⁱ⁾ • I` and `C = Σ y₀ᵢA⁽ⁱ⁾ + I` for a random `y₀`. The returned
/// start has `ν₀ = 1` and `d(X₀, S₀) = 0`.
pub fn gen_random_feasible(n: usize, m: usize, seed: u64) -> Result<(SdoProblem, Iterate)> {
    let width = n * (n + 1) / 2;
    if n == 0 || m == 0 || m > width {
        return Err(Error::Config(format!("need 1 <= m <= n(n+1)/2, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 {
        let a: Vec<DMatrix<f64>> = (0..m).map(|_| random_symmetric(n, &mut rng)).collect();
        let y0 = DVector::from_fn(m, |_, _| normal(&mut rng));
        let id = DMatrix::<f64>::identity(n, n);
        let b = DVector::from_iterator(m, a.iter().map(|ai| ai.trace()));
        let mut c = id.clone();
        for (ai, yi) in a.iter().zip(y0.iter()) {
            c += ai * *yi;
        }
        match SdoProblem::new(a, b, c) {
            Ok(p) => return Ok((p, Iterate::new(id.clone(), y0, id))),
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Config("could not draw linearly independent constraints in 10 attempts".into()))
}

/// Relaxation `max C • X  s.t.  diag(X) = e, X ⪰ 0`, stored in minimization
/// form with cost `−C`.
pub fn gen_qubo_sdo(c: &DMatrix<f64>) -> Result<SdoProblem> {
    let n = c.nrows();
    let a = (0..n)
        .map(|i| {
            let mut e = DMatrix::zeros(n, n);
            e[(i, i)] = 1.0;
            e
        })
        .collect();
    SdoProblem::new(a, DVector::from_element(n, 1.0), -c)
}

/// Symmetric cost matrix with standard normal entries and zero diagonal.
pub fn random_qubo_matrix(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = random_symmetric(n, &mut rng);
    c.fill_diagonal(0.0);
    c
}

/// Start for [`gen_qubo_sdo`]: `X₀ = I` and `y₀ = −t·e`, so `S₀ = tI − C`.
/// `d(I, tI − C) = ‖C − (tr C/n) I‖_F` does not depend on `t`, so `t` is
/// raised until both `S₀ ⪰ I` and `d ≤ γν/2` hold.
pub fn qubo_start(p: &SdoProblem, gamma: f64) -> Result<Iterate> {
    let n = p.n;
    let c = -&p.c;
    let (vals, _) = sym_eigen(&c)?;
    let mean = c.trace() / n as f64;
    let mut dev = c.clone();
    for i in 0..n {
        dev[(i, i)] -= mean;
    }
    let t_pd = vals[0] + 1.0;
    let t_center = mean + 2.0 * dev.norm() / gamma;
    let t = t_pd.max(t_center);
    let y = DVector::from_element(n, -t);
    let mut s = -c;
    for i in 0..n {
        s[(i, i)] += t;
    }
    Ok(Iterate::new(DMatrix::identity(n, n), y, s))
}

/// Linear program `min cᵀx s.t. Ax = b, x ≥ 0` embedded with diagonal
/// matrices.
pub fn gen_lo_as_sdo(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Result<SdoProblem> {
    let (m, n) = a.shape();
    if b.len() != m || c.len() != n {
        return Err(Error::Dimension("LO data sizes disagree".into()));
    }
    let mats = (0..m)
        .map(|i| DMatrix::from_diagonal(&a.row(i).transpose()))
        .collect();
    SdoProblem::new(mats, b.clone(), DMatrix::from_diagonal(c))
}

/// Linear program data together with its SDO embedding.
#[derive(Debug, Clone)]
pub struct LoInstance {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub problem: SdoProblem,
    pub start: Iterate,
}

/// Random LO with interior point `x₀ = s₀ = e`: `b = A e`, `c = Aᵀy₀ + e`.
pub fn gen_random_lo(n: usize, m: usize, seed: u64) -> Result<LoInstance> {
    if m == 0 || m > n {
        return Err(Error::Config(format!("need 1 <= m <= n for LO, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 {
        let a = DMatrix::from_fn(m, n, |_, _| normal(&mut rng));
        let y0 = DVector::from_fn(m, |_, _| normal(&mut rng));
        let ones = DVector::from_element(n, 1.0);
        let b = &a * &ones;
        let c = a.transpose() * &y0 + &ones;
        match gen_lo_as_sdo(&a, &b, &c) {
            Ok(problem) => {
                let id = DMatrix::identity(n, n);
                let start = Iterate::new(id.clone(), y0, id);
                return Ok(LoInstance { a, b, c, problem, start });
            }
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Config("could not draw a full-rank LO matrix in 10 attempts".into()))
}

/// Random primal-degenerate LO with a strictly complementary optimal pair:
/// `x*` has `k < m` positive entries, `s*` is positive on the rest, and the
/// start is still `x₀ = s₀ = e`. Returns the instance and `cᵀx*`.
///
/// With `v = e − x*` and `w = e − s*` chosen orthogonal, the first row of
/// `A` is `w` and the others are random rows orthogonal to `v`, so
/// `A x* = A e` and `c − Aᵀ(y* − e₁) = e`.
pub fn gen_degenerate_lo(n: usize, m: usize, k: usize, seed: u64) -> Result<(LoInstance, f64)> {
    if k == 0 || k >= m || m >= n {
        return Err(Error::Config(format!("need 1 <= k < m < n, got n={n}, m={m}, k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 {
        let mut x_star = DVector::zeros(n);
        let mut s_star = DVector::zeros(n);
        for i in k..n {
            s_star[i] = rng.random_range(0.2..0.8);
        }
        let excess: f64 = (k..n).map(|i| 1.0 - s_star[i]).sum();
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
        let total: f64 = weights.iter().sum();
        for i in 0..k {
            x_star[i] = (k as f64 + excess) * weights[i] / total;
        }
        let ones = DVector::from_element(n, 1.0);
        let v = &ones - &x_star;
        let w = &ones - &s_star;
        let mut a = DMatrix::zeros(m, n);
        a.set_row(0, &w.transpose());
        for r in 1..m {
            let mut row = DVector::from_fn(n, |_, _| normal(&mut rng));
            let c = row.dot(&v) / v.dot(&v);
            row -= &v * c;
            a.set_row(r, &row.transpose());
        }
        let y_star = DVector::from_fn(m, |_, _| normal(&mut rng));
        let b = &a * &ones;
        let c = a.transpose() * &y_star + &s_star;
        let mut y0 = y_star.clone();
        y0[0] -= 1.0;
        match gen_lo_as_sdo(&a, &b, &c) {
            Ok(problem) => {
                let id = DMatrix::identity(n, n);
                let start = Iterate::new(id.clone(), y0, id);
                let opt = c.dot(&x_star);
                return Ok((LoInstance { a, b, c, problem, start }, opt));
            }
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Config("could not draw a full-rank degenerate LO in 10 attempts".into()))
}

/// Optimal value of `min cᵀx, Ax = b, x ≥ 0` by enumerating basic
/// solutions. Only sensible for small `n`.
pub fn lo_vertex_optimum(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Option<f64> {
    let (m, n) = a.shape();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let ab = DMatrix::from_fn(m, m, |i, j| a[(i, idx[j])]);
        if let Some(xb) = ab.clone().lu().solve(b) {
            let ok = xb.iter().all(|v| v.is_finite() && *v >= -1e-10);
            if ok && (&ab * &xb - b).norm() <= 1e-9 * (1.0 + b.norm()) {
                let val: f64 = idx.iter().zip(xb.iter()).map(|(&j, x)| c[j] * x).sum();
                best = Some(best.map_or(val, |v: f64| v.min(val)));
            }
        }
        // Next m-combination of 0..n in lexicographic order.
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < n - m + i {
                idx[i] += 1;
                for j in (i + 1)..m {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `ρ` satisfying `(1−γ₁)ρI ⪰ X*`, `(1−γ₁)ρI ⪰ S*` and
/// `ρ ≥ (tr X* + tr S*)/n`, enlarged by `margin`.
pub fn rho_from_optimum(x_star: &DMatrix<f64>, s_star: &DMatrix<f64>, gamma1: f64, margin: f64) -> Result<f64> {
    let n = x_star.nrows() as f64;
    let lx = sym_eigen(x_star)?.0[0];
    let ls = sym_eigen(s_star)?.0[0];
    let need = (lx / (1.0 - gamma1))
        .max(ls / (1.0 - gamma1))
        .max((x_star.trace() + s_star.trace()) / n);
    Ok(margin * need)
}

/// Objective gap `C•X − bᵀy` normalized by `1 + |C•X|`.
pub fn normalized_objective_gap(p: &SdoProblem, it: &Iterate) -> f64 {
    let primal = frob_inner(&p.c, &it.x);
    let dual = p.b.dot(&it.y);
    (primal - dual).abs() / (1.0 + primal.abs())
}
