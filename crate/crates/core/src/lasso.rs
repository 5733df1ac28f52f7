//! l1-penalized regression for multiway-clustered designs, with a
//! bootstrap-calibrated penalty.
//!
//! The solver minimizes (1/N) sum_i (Y_i - X_i'beta)^2 + lambda ||beta||_1
//! by cyclic coordinate descent with soft-thresholding, alternating full
//! sweeps with active-set sweeps and stopping on the KKT certificate
//!
//!   |(2/N) x_j'(Y - X beta)| <= lambda + tol        for beta_j = 0,
//!    (2/N) x_j'(Y - X beta)  = lambda sign(beta_j)  (within tol) else.
//!
//! The penalty is tuned by fitting a preliminary Lasso at
//! lambda0 = log(n) sqrt(log(p)/n), bootstrapping the sup norm of the
//! multiplier-weighted leave-one-index means of the score array
//! eps_tilde_i X_i through the separable engine, and setting
//! lambda = 2c * (1 - eta)-quantile of those sup norms.

use serde::{Deserialize, Serialize};

use crate::array::MultiwayArray;
use crate::band::Mode;
use crate::error::{Error, Result};
use crate::separable::{self, SepBootstrapConfig};

/// Outcomes and technical controls over the same cluster grid.
#[derive(Debug, Clone)]
pub struct ClusteredRegression {
    pub y: MultiwayArray,
    pub x: MultiwayArray,
}

impl ClusteredRegression {
    pub fn new(y: MultiwayArray, x: MultiwayArray) -> Result<Self> {
        if y.p() != 1 {
            return Err(Error::InvalidParam("outcomes must be scalar (p = 1)".into()));
        }
        if y.dims() != x.dims() {
            return Err(Error::InvalidParam(format!(
                "outcome dims {:?} != regressor dims {:?}",
                y.dims(),
                x.dims()
            )));
        }
        Ok(Self { y, x })
    }

    pub fn num_rows(&self) -> usize {
        self.y.num_cells()
    }

    pub fn num_regressors(&self) -> usize {
        self.x.p()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LassoFit {
    pub beta: Vec<f64>,
    pub lambda: f64,
    pub active_set: Vec<usize>,
    /// final objective value
    pub objective: f64,
    /// objective after every full sweep
    pub objective_path: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_violation: f64,
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Column-major copy of the design for cache-friendly coordinate sweeps.
struct FlatProblem {
    rows: usize,
    p: usize,
    cols: Vec<f64>, // p columns of length rows
    y: Vec<f64>,
}

impl FlatProblem {
    fn new(problem: &ClusteredRegression) -> Self {
        let rows = problem.num_rows();
        let p = problem.num_regressors();
        let xv = problem.x.values();
        let mut cols = vec![0.0; rows * p];
        for r in 0..rows {
            for j in 0..p {
                cols[j * rows + r] = xv[r * p + j];
            }
        }
        Self {
            rows,
            p,
            cols,
            y: problem.y.values().to_vec(),
        }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.rows..(j + 1) * self.rows]
    }
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100_000;

pub fn lasso_solve(
    problem: &ClusteredRegression,
    lambda: f64,
    tol: f64,
    max_iter: usize,
    warm_start: Option<&[f64]>,
) -> Result<LassoFit> {
    if lambda < 0.0 {
        return Err(Error::InvalidParam(format!("lambda must be >= 0, got {lambda}")));
    }
    if problem.y.values().iter().chain(problem.x.values()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParam("non-finite data".into()));
    }
    let flat = FlatProblem::new(problem);
    solve_flat(&flat, lambda, tol, max_iter, warm_start)
}

fn solve_flat(
    flat: &FlatProblem,
    lambda: f64,
    tol: f64,
    max_iter: usize,
    warm_start: Option<&[f64]>,
) -> Result<LassoFit> {
    let (rows, p) = (flat.rows, flat.p);
    let inv2n = 2.0 / rows as f64;
    let gamma: Vec<f64> = (0..p)
        .map(|j| inv2n * flat.col(j).iter().map(|x| x * x).sum::<f64>())
        .collect();

    let mut beta = match warm_start {
        Some(b) if b.len() == p => b.to_vec(),
        _ => vec![0.0; p],
    };
    let mut residual = flat.y.clone();
    for j in 0..p {
        if beta[j] != 0.0 {
            let bj = beta[j];
            for (r, x) in residual.iter_mut().zip(flat.col(j)) {
                *r -= bj * x;
            }
        }
    }

    let objective = |residual: &[f64], beta: &[f64]| {
        residual.iter().map(|r| r * r).sum::<f64>() / rows as f64
            + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
    };

    let sweep = |beta: &mut [f64], residual: &mut [f64], active_only: bool| -> f64 {
        let mut max_delta = 0.0f64;
        for j in 0..p {
            if active_only && beta[j] == 0.0 {
                continue;
            }
            if gamma[j] == 0.0 {
                continue; // all-zero column stays at zero
            }
            let col = flat.col(j);
            let grad: f64 = inv2n * col.iter().zip(residual.iter()).map(|(x, r)| x * r).sum::<f64>();
            let rho = grad + gamma[j] * beta[j];
            let new = soft_threshold(rho, lambda) / gamma[j];
            let delta = new - beta[j];
            if delta != 0.0 {
                for (r, x) in residual.iter_mut().zip(col) {
                    *r -= delta * x;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    };

    let kkt = |beta: &[f64], residual: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for j in 0..p {
            let g: f64 = inv2n
                * flat
                    .col(j)
                    .iter()
                    .zip(residual.iter())
                    .map(|(x, r)| x * r)
                    .sum::<f64>();
            let viol = if beta[j] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g - lambda * beta[j].signum()).abs()
            };
            worst = worst.max(viol);
        }
        worst
    };

    let mut iterations = 0usize;
    let mut objective_path = Vec::new();
    let mut kkt_violation = f64::INFINITY;
    let mut converged = false;
    while iterations < max_iter {
        sweep(&mut beta, &mut residual, false);
        iterations += 1;
        objective_path.push(objective(&residual, &beta));
        kkt_violation = kkt(&beta, &residual);
        if kkt_violation <= tol {
            converged = true;
            break;
        }
        // polish the current active set before the next full sweep
        let mut inner = 0;
        while inner < 50 && iterations < max_iter {
            let delta = sweep(&mut beta, &mut residual, true);
            iterations += 1;
            inner += 1;
            if delta <= tol * 1e-2 {
                break;
            }
        }
    }

    let active_set: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
    let obj = objective(&residual, &beta);
    Ok(LassoFit {
        beta,
        lambda,
        active_set,
        objective: obj,
        objective_path,
        iterations,
        converged,
        kkt_violation,
    })
}

/// Preliminary penalty lambda0 = log(n) sqrt(log(p)/n), with n the minimum
/// cluster size.
pub fn preliminary_penalty(n: usize, p: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("need n >= 2, got {n}")));
    }
    if p < 2 {
        return Err(Error::InvalidParam(
            "need p >= 2 (log p = 0 makes the preliminary penalty degenerate)".into(),
        ));
    }
    Ok(lambda0_f(n as f64, p as f64))
}

fn lambda0_f(n: f64, p: f64) -> f64 {
    n.ln() * (p.ln() / n).sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PenaltyChoice {
    pub lambda0: f64,
    pub lambda: f64,
    pub eta: f64,
    pub c: f64,
    /// bootstrap sup-norm values Lambda_N^xi
    pub lambda_draws: Vec<f64>,
}

/// Bootstrap-calibrated penalty: preliminary residuals feed the separable
/// multiplier bootstrap on the score array, and lambda is 2c times the
/// (1 - eta)-quantile of the resulting sup norms.
pub fn tuned_penalty(
    problem: &ClusteredRegression,
    eta: f64,
    c: f64,
    b: usize,
    seed: u64,
) -> Result<(PenaltyChoice, LassoFit)> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParam(format!("need 0 < eta < 1, got {eta}")));
    }
    if c <= 1.0 {
        return Err(Error::InvalidParam(format!("need c > 1, got {c}")));
    }
    let n_min = problem.y.min_dim();
    let p = problem.num_regressors();
    let lambda0 = preliminary_penalty(n_min, p)?;
    let prelim = lasso_solve(problem, lambda0, DEFAULT_TOL, DEFAULT_MAX_ITER, None)?;

    // score array eps_tilde_i X_i over the same cluster grid
    let rows = problem.num_rows();
    let xv = problem.x.values();
    let yv = problem.y.values();
    let mut score = vec![0.0; rows * p];
    for r in 0..rows {
        let fitted: f64 = (0..p).map(|j| xv[r * p + j] * prelim.beta[j]).sum();
        let eps = yv[r] - fitted;
        for j in 0..p {
            score[r * p + j] = eps * xv[r * p + j];
        }
    }
    let score_array = MultiwayArray::new(problem.y.dims().to_vec(), p, score)?;
    let boot = separable::bootstrap(
        &score_array,
        &SepBootstrapConfig {
            b,
            alpha: eta,
            mode: Mode::Raw,
            seed,
            ..Default::default()
        },
    )?;
    // the engine reports ||sqrt(n) S^MB||_inf; Lambda^xi drops the sqrt(n)
    let sqrt_n = (n_min as f64).sqrt();
    let lambda_draws: Vec<f64> = boot.sup_draws.iter().map(|s| s / sqrt_n).collect();
    let lambda = 2.0 * c * boot.cv / sqrt_n;
    Ok((
        PenaltyChoice {
            lambda0,
            lambda,
            eta,
            c,
            lambda_draws,
        },
        prelim,
    ))
}

/// Full pipeline: tune the penalty, refit at the tuned lambda, and report
/// the prediction norm ||X (beta_hat - beta_ref)||_{N,2} when a reference
/// coefficient vector is supplied.
pub fn fit(
    problem: &ClusteredRegression,
    eta: f64,
    c: f64,
    b: usize,
    seed: u64,
    beta_ref: Option<&[f64]>,
) -> Result<(LassoFit, PenaltyChoice, Option<f64>)> {
    let (choice, prelim) = tuned_penalty(problem, eta, c, b, seed)?;
    let final_fit = lasso_solve(
        problem,
        choice.lambda,
        DEFAULT_TOL,
        DEFAULT_MAX_ITER,
        Some(&prelim.beta),
    )?;
    let pred = beta_ref.map(|bref| prediction_norm(problem, &final_fit.beta, bref));
    Ok((final_fit, choice, pred))
}

/// ||X (beta - beta_ref)||_{N,2}.
pub fn prediction_norm(problem: &ClusteredRegression, beta: &[f64], beta_ref: &[f64]) -> f64 {
    let rows = problem.num_rows();
    let p = problem.num_regressors();
    let xv = problem.x.values();
    let mut acc = 0.0;
    for r in 0..rows {
        let d: f64 = (0..p)
            .map(|j| xv[r * p + j] * (beta[j] - beta_ref[j]))
            .sum();
        acc += d * d;
    }
    (acc / rows as f64).sqrt()
}

/// Monte Carlo lower estimate of the restricted eigenvalue kappa(s, c0):
/// random supports and cone directions, reporting the smallest ratio seen.
/// A diagnostic, not part of the fit contract.
pub fn re_diagnostic(
    problem: &ClusteredRegression,
    s: usize,
    c0: f64,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let p = problem.num_regressors();
    if s == 0 || s > p {
        return Err(Error::InvalidParam(format!("need 1 <= s <= p, got s = {s}")));
    }
    let rows = problem.num_rows();
    let xv = problem.x.values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut indices: Vec<usize> = (0..p).collect();
    for _ in 0..draws {
        indices.shuffle(&mut rng);
        let support = &indices[..s];
        let mut theta = vec![0.0; p];
        for &j in support {
            theta[j] = rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let l1_on: f64 = support.iter().map(|&j| theta[j].abs()).sum();
        // off-support mass anywhere inside the cone
        let frac: f64 = rng.gen_range(0.0..1.0);
        let budget = c0 * l1_on * frac;
        if p > s {
            let mut off = vec![0.0; p - s];
            for o in &mut off {
                *o = rng.sample::<f64, _>(rand_distr::StandardNormal);
            }
            let l1_off: f64 = off.iter().map(|o| o.abs()).sum();
            if l1_off > 0.0 {
                for (slot, &j) in indices[s..].iter().enumerate() {
                    theta[j] = off[slot] * budget / l1_off;
                }
            }
        }
        let mut quad = 0.0;
        for r in 0..rows {
            let v: f64 = (0..p).map(|j| xv[r * p + j] * theta[j]).sum();
            quad += v * v;
        }
        let ratio = (s as f64 * quad / rows as f64).sqrt() / l1_on;
        min_ratio = min_ratio.min(ratio);
    }
    Ok(min_ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem_from(rows_dims: Vec<usize>, y: Vec<f64>, x: Vec<f64>, p: usize) -> ClusteredRegression {
        ClusteredRegression::new(
            MultiwayArray::new(rows_dims.clone(), 1, y).unwrap(),
            MultiwayArray::new(rows_dims, p, x).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn lambda0_direct_evaluation() {
        // n = e^2, p = e gives 2 sqrt(1/e^2) = 2/e
        let v = lambda0_f(std::f64::consts::E.powi(2), std::f64::consts::E);
        assert!((v - 2.0 / std::f64::consts::E).abs() <= 1e-14);
        assert!((2.0 / std::f64::consts::E - 0.7357588823428847).abs() <= 1e-15);
        assert!(preliminary_penalty(2, 1).is_err());
        // decreasing in n for fixed p past small n
        let a = preliminary_penalty(100, 50).unwrap();
        let b = preliminary_penalty(400, 50).unwrap();
        assert!(b < a);
    }

    #[test]
    fn scalar_closed_form() {
        // single regressor: beta = soft((2/N) x'y, lambda) / ((2/N) x'x)
        let y = vec![1.0, -0.5, 2.0, 0.25];
        let x = vec![0.5, 1.0, -1.5, 2.0];
        let prob = problem_from(vec![4], y.clone(), x.clone(), 1);
        for &lambda in &[0.0, 0.05, 0.2, 1.0, 5.0] {
            let fit = lasso_solve(&prob, lambda, 1e-12, 10_000, None).unwrap();
            let n = 4.0;
            let rho: f64 = (2.0 / n) * x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
            let gam: f64 = (2.0 / n) * x.iter().map(|a| a * a).sum::<f64>();
            let expect = soft_threshold(rho, lambda) / gam;
            assert!(
                (fit.beta[0] - expect).abs() <= 1e-12,
                "lambda {lambda}: {} vs {expect}",
                fit.beta[0]
            );
        }
    }

    #[test]
    fn zero_penalty_orthonormal_is_ols() {
        // X with orthonormal columns (X'X = I): OLS beta = X'y
        let x = vec![
            0.5, 0.5, //
            0.5, -0.5, //
            0.5, 0.5, //
            0.5, -0.5, //
            0.5, 0.5, //
            0.5, -0.5, //
            0.5, 0.5, //
            0.5, -0.5,
        ];
        // columns have squared norm 8 * 0.25 = 2, rescale to norm 1
        let x: Vec<f64> = x.iter().map(|v| v / (2f64).sqrt()).collect();
        let y: Vec<f64> = (0..8).map(|i| (i as f64 * 1.3).sin()).collect();
        let prob = problem_from(vec![8], y.clone(), x.clone(), 2);
        let fit = lasso_solve(&prob, 0.0, 1e-12, 10_000, None).unwrap();
        for j in 0..2 {
            let ols: f64 = (0..8).map(|r| x[r * 2 + j] * y[r]).sum();
            assert!((fit.beta[j] - ols).abs() <= 1e-10);
        }
    }

    #[test]
    fn full_shrinkage_threshold() {
        let y = vec![1.0, 2.0, -1.0, 0.5, 1.5, -2.0];
        let x: Vec<f64> = (0..12).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
        let prob = problem_from(vec![6], y.clone(), x.clone(), 2);
        let n = 6.0;
        let max_corr = (0..2)
            .map(|j| {
                ((2.0 / n)
                    * (0..6).map(|r| x[r * 2 + j] * y[r]).sum::<f64>())
                .abs()
            })
            .fold(0.0f64, f64::max);
        let fit = lasso_solve(&prob, max_corr + 1e-12, 1e-10, 10_000, None).unwrap();
        assert!(fit.beta.iter().all(|&b| b == 0.0));
        assert!(fit.active_set.is_empty());
    }

    #[test]
    fn objective_never_increases() {
        let rows = 64;
        let p = 10;
        let x: Vec<f64> = (0..rows * p)
            .map(|i| ((i * 2654435761) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let y: Vec<f64> = (0..rows).map(|i| (i as f64 * 0.11).cos() * 2.0).collect();
        let prob = problem_from(vec![8, 8], y, x, p);
        let fit = lasso_solve(&prob, 0.1, 1e-10, 10_000, None).unwrap();
        assert!(fit.converged);
        for w in fit.objective_path.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
        assert!(fit.kkt_violation <= 1e-10);
    }

    #[test]
    fn degenerate_outcome_gives_zero_penalty() {
        let rows = 16;
        let p = 4;
        let x: Vec<f64> = (0..rows * p).map(|i| ((i % 7) as f64 - 3.0) / 2.0).collect();
        let prob = problem_from(vec![4, 4], vec![0.0; rows], x, p);
        let (choice, _) = tuned_penalty(&prob, 0.1, 1.1, 200, 3).unwrap();
        assert_eq!(choice.lambda, 0.0);
        assert!(choice.lambda_draws.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn lambda_scales_linearly_in_c() {
        let rows_dims = vec![5, 5];
        let p = 6;
        let x: Vec<f64> = (0..25 * p)
            .map(|i| ((i * 13 + 5) % 11) as f64 / 5.0 - 1.0)
            .collect();
        let y: Vec<f64> = (0..25).map(|i| (i as f64 * 0.37).sin()).collect();
        let prob = problem_from(rows_dims, y, x, p);
        let (c1, _) = tuned_penalty(&prob, 0.1, 1.1, 200, 9).unwrap();
        let (c2, _) = tuned_penalty(&prob, 0.1, 2.2, 200, 9).unwrap();
        assert!((c2.lambda - 2.0 * c1.lambda).abs() <= 1e-12 * c1.lambda.max(1.0));
        for (a, b) in c1.lambda_draws.iter().zip(&c2.lambda_draws) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn noiseless_recovery_with_tiny_penalty() {
        // well-conditioned design, exact sparse truth, lambda ~ 0
        let rows = 100;
        let p = 5;
        let mut x = vec![0.0; rows * p];
        let mut state = 12345u64;
        let mut unif = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for v in &mut x {
            *v = unif();
        }
        let beta0 = [1.5, 0.0, -2.0, 0.0, 0.5];
        let y: Vec<f64> = (0..rows)
            .map(|r| (0..p).map(|j| x[r * p + j] * beta0[j]).sum())
            .collect();
        let prob = problem_from(vec![10, 10], y, x, p);
        let fit = lasso_solve(&prob, 1e-10, 1e-12, 100_000, None).unwrap();
        let pn = prediction_norm(&prob, &fit.beta, &beta0);
        assert!(pn <= 1e-6, "prediction norm {pn}");
    }

    #[test]
    fn pure_noise_strong_penalty_kills_everything() {
        let rows = 36;
        let p = 8;
        let x: Vec<f64> = (0..rows * p).map(|i| ((i * 29 + 1) % 13) as f64 / 6.0 - 1.0).collect();
        let y: Vec<f64> = (0..rows).map(|i| ((i * 17 + 5) % 7) as f64 / 3.0 - 1.0).collect();
        let prob = problem_from(vec![6, 6], y, x, p);
        let fit = lasso_solve(&prob, 1e3, 1e-10, 10_000, None).unwrap();
        assert!(fit.beta.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn tuned_penalty_deterministic_parts_are_label_invariant() {
        let p = 3;
        let dims = vec![4, 4];
        let x: Vec<f64> = (0..16 * p).map(|i| ((i * 11 + 2) % 9) as f64 / 4.0 - 1.0).collect();
        let y: Vec<f64> = (0..16).map(|i| (i as f64 * 0.71).sin()).collect();
        let ya = MultiwayArray::new(dims.clone(), 1, y).unwrap();
        let xa = MultiwayArray::new(dims, p, x).unwrap();
        let perm = [2usize, 0, 3, 1];
        let prob = ClusteredRegression::new(ya.clone(), xa.clone()).unwrap();
        let prob_perm = ClusteredRegression::new(
            ya.permute_axis(0, &perm).unwrap(),
            xa.permute_axis(0, &perm).unwrap(),
        )
        .unwrap();
        // the preliminary fit and the score-array summaries are
        // label-invariant: compare S_tilde and the sorted leave-one rows
        let score = |prob: &ClusteredRegression| {
            let prelim = lasso_solve(
                prob,
                preliminary_penalty(4, p).unwrap(),
                1e-10,
                10_000,
                None,
            )
            .unwrap();
            let rows = prob.num_rows();
            let mut sc = vec![0.0; rows * p];
            for r in 0..rows {
                let fitted: f64 = (0..p)
                    .map(|j| prob.x.values()[r * p + j] * prelim.beta[j])
                    .sum();
                let eps = prob.y.values()[r] - fitted;
                for j in 0..p {
                    sc[r * p + j] = eps * prob.x.values()[r * p + j];
                }
            }
            MultiwayArray::new(prob.y.dims().to_vec(), p, sc).unwrap()
        };
        let (s1, s2) = (score(&prob), score(&prob_perm));
        let m1 = separable::sample_mean(&s1);
        let m2 = separable::sample_mean(&s2);
        for j in 0..p {
            assert!((m1[j] - m2[j]).abs() <= 1e-10);
        }
        // the leave-one rows form the same multiset up to summation-order
        // rounding (permuting labels reorders the inner sums)
        let l1 = separable::leave_one_index_means(&s1);
        let l2 = separable::leave_one_index_means(&s2);
        for axis in 0..2 {
            let key = |row: &[f64]| (row[0] * 1e6).round() as i64;
            let mut rows1: Vec<Vec<f64>> = (0..4).map(|i| l1.row(axis, i).to_vec()).collect();
            let mut rows2: Vec<Vec<f64>> = (0..4).map(|i| l2.row(axis, i).to_vec()).collect();
            rows1.sort_by_key(|r| key(r));
            rows2.sort_by_key(|r| key(r));
            for (r1, r2) in rows1.iter().zip(&rows2) {
                for (a, b) in r1.iter().zip(r2) {
                    assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn re_diagnostic_positive_on_well_conditioned_design() {
        let rows = 64;
        let p = 8;
        let mut state = 99u64;
        let mut unif = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let x: Vec<f64> = (0..rows * p).map(|_| unif()).collect();
        let prob = problem_from(vec![8, 8], vec![0.0; rows], x, p);
        let kappa = re_diagnostic(&prob, 3, 1.0, 100, 4).unwrap();
        assert!(kappa > 0.0);
    }
}
