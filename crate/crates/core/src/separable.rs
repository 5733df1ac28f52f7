//! Multiplier bootstrap for separately exchangeable (multiway-clustered)
//! arrays.
//!
//! The sample mean S_N is approximated conditionally on the data by
//!
//!   S_N^MB = sum_k N_k^{-1} sum_{i_k} xi_{k,i_k} (Xbar_{k,i_k} - S_N),
//!
//! where Xbar_{k,i_k} is the mean over all indices but i_k and the
//! multipliers xi are independent standard normals. Critical values are
//! upper order statistics of the sup-norm draws; variance estimates come in
//! a plain and a Bessel-corrected flavor, the latter being the default for
//! studentization.

use rayon::prelude::*;

use crate::array::MultiwayArray;
use crate::band::{BandResult, Mode};
use crate::error::{Error, Result};
use crate::rng::{multiplier, StreamDomain};
use crate::stats::critical_value;

/// Coordinatewise mean over all cells.
pub fn sample_mean(a: &MultiwayArray) -> Vec<f64> {
    let p = a.p();
    let cells = a.num_cells();
    let mut mean = vec![0.0; p];
    for cell in 0..cells {
        let v = &a.values()[cell * p..(cell + 1) * p];
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    let inv = 1.0 / cells as f64;
    for m in &mut mean {
        *m *= inv;
    }
    mean
}

/// Leave-one-index means: for each axis k, the N_k x p matrix whose row i_k
/// is the mean of all cells with k-th index fixed at i_k.
#[derive(Debug, Clone)]
pub struct LeaveOneIndexMeans {
    dims: Vec<usize>,
    p: usize,
    per_axis: Vec<Vec<f64>>, // axis k: N_k x p row-major
}

impl LeaveOneIndexMeans {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Row Xbar_{k,i_k} (0-based axis and index).
    pub fn row(&self, axis: usize, index: usize) -> &[f64] {
        &self.per_axis[axis][index * self.p..(index + 1) * self.p]
    }
}

pub fn leave_one_index_means(a: &MultiwayArray) -> LeaveOneIndexMeans {
    let k = a.k();
    let p = a.p();
    let dims = a.dims().to_vec();
    let cells = a.num_cells();
    let mut per_axis: Vec<Vec<f64>> = dims.iter().map(|&n| vec![0.0; n * p]).collect();
    let values = a.values();
    let mut index = vec![0usize; k];
    for cell in 0..cells {
        let mut rem = cell;
        for axis in (0..k).rev() {
            index[axis] = rem % dims[axis];
            rem /= dims[axis];
        }
        let v = &values[cell * p..(cell + 1) * p];
        for axis in 0..k {
            let row = &mut per_axis[axis][index[axis] * p..(index[axis] + 1) * p];
            for (r, x) in row.iter_mut().zip(v) {
                *r += x;
            }
        }
    }
    for (axis, acc) in per_axis.iter_mut().enumerate() {
        // each row of axis k averages the cells of all other axes
        let others = (cells / dims[axis]) as f64;
        for x in acc.iter_mut() {
            *x /= others;
        }
    }
    LeaveOneIndexMeans { dims, p, per_axis }
}

#[derive(Debug, Clone)]
pub struct SepBootstrapConfig {
    pub b: usize,
    pub alpha: f64,
    pub mode: Mode,
    pub seed: u64,
    /// keep the B bootstrap mean vectors (B x p memory)
    pub keep_draws: bool,
    /// materialize the p x p conditional covariance (diagnostics only)
    pub materialize_sigma: bool,
    /// studentize with the Bessel-corrected variance (default) rather than
    /// the plain one
    pub use_bessel: bool,
}

impl Default for SepBootstrapConfig {
    fn default() -> Self {
        Self {
            b: 500,
            alpha: 0.05,
            mode: Mode::Studentized,
            seed: 0,
            keep_draws: false,
            materialize_sigma: false,
            use_bessel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SepBootstrapResult {
    pub dims: Vec<usize>,
    pub p: usize,
    pub b: usize,
    pub alpha: f64,
    pub mode: Mode,
    pub seed: u64,
    pub use_bessel: bool,
    /// sample mean S_N
    pub mean: Vec<f64>,
    /// plain variance estimates sigma_hat_j^2 of sqrt(n) S_N coordinates
    pub sigma_hat: Vec<f64>,
    /// Bessel-corrected variance estimates sigma_tilde_j^2
    pub sigma_tilde: Vec<f64>,
    /// B sup-norm draws (raw or studentized per `mode`)
    pub sup_draws: Vec<f64>,
    /// critical value at `alpha`
    pub cv: f64,
    /// optional B x p bootstrap mean draws S_N^MB
    pub draws: Option<Vec<Vec<f64>>>,
    /// optional p x p conditional covariance of sqrt(n) S_N^MB, row-major
    pub sigma_matrix: Option<Vec<f64>>,
}

fn validate_common(b: usize, alpha: f64) -> Result<()> {
    if b < 100 {
        return Err(Error::InvalidParam(format!("need B >= 100, got {b}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParam(format!("need 0 < alpha < 1, got {alpha}")));
    }
    Ok(())
}

/// Variance estimates of the coordinates of sqrt(n) S_N:
/// plain uses 1/N_k^2 per axis, Bessel uses 1/(N_k (N_k - 1)).
fn variance_estimates(
    means: &LeaveOneIndexMeans,
    s_n: &[f64],
    n_min: usize,
) -> (Vec<f64>, Vec<f64>) {
    let p = means.p();
    let mut plain = vec![0.0; p];
    let mut bessel = vec![0.0; p];
    for (axis, &nk) in means.dims().iter().enumerate() {
        let mut ss = vec![0.0; p];
        for i in 0..nk {
            let row = means.row(axis, i);
            for j in 0..p {
                let d = row[j] - s_n[j];
                ss[j] += d * d;
            }
        }
        let nkf = nk as f64;
        let wp = n_min as f64 / (nkf * nkf);
        let wb = n_min as f64 / (nkf * (nkf - 1.0));
        for j in 0..p {
            plain[j] += wp * ss[j];
            bessel[j] += wb * ss[j];
        }
    }
    (plain, bessel)
}

/// Closed-form conditional covariance of sqrt(n) S_N^MB given the data:
/// Sigma_hat = sum_k (n / N_k^2) sum_{i_k} (Xbar - S)(Xbar - S)^T.
pub fn conditional_covariance(means: &LeaveOneIndexMeans, s_n: &[f64], n_min: usize) -> Vec<f64> {
    let p = means.p();
    let mut out = vec![0.0; p * p];
    let mut d = vec![0.0; p];
    for (axis, &nk) in means.dims().iter().enumerate() {
        let w = n_min as f64 / (nk as f64 * nk as f64);
        for i in 0..nk {
            let row = means.row(axis, i);
            for j in 0..p {
                d[j] = row[j] - s_n[j];
            }
            for r in 0..p {
                let dr = w * d[r];
                for c in 0..p {
                    out[r * p + c] += dr * d[c];
                }
            }
        }
    }
    out
}

/// One multiplier-bootstrap draw S_N^MB for the given draw index.
fn draw_mb(
    means: &LeaveOneIndexMeans,
    s_n: &[f64],
    seed: u64,
    draw: usize,
    out: &mut [f64],
) {
    let p = means.p();
    out.fill(0.0);
    for (axis, &nk) in means.dims().iter().enumerate() {
        let inv = 1.0 / nk as f64;
        for i in 0..nk {
            let xi = multiplier(seed, StreamDomain::Separable, draw, axis, i) * inv;
            let row = means.row(axis, i);
            for j in 0..p {
                out[j] += xi * (row[j] - s_n[j]);
            }
        }
    }
}

/// Run the multiplier bootstrap on a separately exchangeable array.
///
/// Replications are data-parallel; results are identical for any worker
/// count because every multiplier is a counter-derived pure function of
/// (seed, draw, axis, index).
pub fn bootstrap(a: &MultiwayArray, cfg: &SepBootstrapConfig) -> Result<SepBootstrapResult> {
    a.require_min_dims(2)?;
    validate_common(cfg.b, cfg.alpha)?;
    let p = a.p();
    let n_min = a.min_dim();
    let s_n = sample_mean(a);
    let means = leave_one_index_means(a);
    let (sigma_hat, sigma_tilde) = variance_estimates(&means, &s_n, n_min);

    let stud_scale: Option<Vec<f64>> = match cfg.mode {
        Mode::Raw => None,
        Mode::Studentized => {
            let var = if cfg.use_bessel { &sigma_tilde } else { &sigma_hat };
            if let Some(coord) = var.iter().position(|&v| v <= 0.0) {
                return Err(Error::DegenerateScale { coord });
            }
            Some(var.iter().map(|v| v.sqrt()).collect())
        }
    };

    let sqrt_n = (n_min as f64).sqrt();
    let results: Vec<(f64, Option<Vec<f64>>)> = (0..cfg.b)
        .into_par_iter()
        .map(|bi| {
            let mut d = vec![0.0; p];
            draw_mb(&means, &s_n, cfg.seed, bi, &mut d);
            let sup = match &stud_scale {
                None => d.iter().fold(0.0f64, |m, x| m.max((sqrt_n * x).abs())),
                Some(sc) => d
                    .iter()
                    .zip(sc)
                    .fold(0.0f64, |m, (x, s)| m.max((sqrt_n * x / s).abs())),
            };
            (sup, cfg.keep_draws.then_some(d))
        })
        .collect();

    let sup_draws: Vec<f64> = results.iter().map(|(s, _)| *s).collect();
    let draws = cfg
        .keep_draws
        .then(|| results.into_iter().map(|(_, d)| d.unwrap()).collect());
    let cv = critical_value(&sup_draws, cfg.alpha);
    let sigma_matrix = cfg
        .materialize_sigma
        .then(|| conditional_covariance(&means, &s_n, n_min));

    Ok(SepBootstrapResult {
        dims: a.dims().to_vec(),
        p,
        b: cfg.b,
        alpha: cfg.alpha,
        mode: cfg.mode,
        seed: cfg.seed,
        use_bessel: cfg.use_bessel,
        mean: s_n,
        sigma_hat,
        sigma_tilde,
        sup_draws,
        cv,
        draws,
        sigma_matrix,
    })
}

/// Uniform confidence band from a bootstrap result.
///
/// The requested style must match the mode the sup draws were computed in:
/// `Raw` yields the constant half-width cv/sqrt(n), `Studentized` yields
/// sigma_j cv/sqrt(n).
pub fn confidence_band(
    result: &SepBootstrapResult,
    alpha: f64,
    style: Mode,
) -> Result<BandResult> {
    if style != result.mode {
        return Err(Error::ModeMismatch {
            requested: style.as_str(),
            actual: result.mode.as_str(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParam(format!("need 0 < alpha < 1, got {alpha}")));
    }
    let cv = critical_value(&result.sup_draws, alpha);
    let n_min = *result.dims.iter().min().expect("K >= 1");
    let sqrt_n = (n_min as f64).sqrt();
    let var = if result.use_bessel {
        &result.sigma_tilde
    } else {
        &result.sigma_hat
    };
    let scale: Vec<f64> = var.iter().map(|v| v.sqrt()).collect();
    let half_width: Vec<f64> = match style {
        Mode::Raw => vec![cv / sqrt_n; result.p],
        Mode::Studentized => scale.iter().map(|s| s * cv / sqrt_n).collect(),
    };
    Ok(BandResult {
        estimate: result.mean.clone(),
        half_width,
        scale,
        alpha,
        cv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_2x2() -> MultiwayArray {
        MultiwayArray::new(vec![2, 2], 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn mean_of_constant_array_is_the_constant() {
        let a = MultiwayArray::constant(vec![3, 4], 2, 7.25).unwrap();
        assert_eq!(sample_mean(&a), vec![7.25, 7.25]);
    }

    #[test]
    fn mean_of_2x2_hand_case() {
        assert_eq!(sample_mean(&grid_2x2()), vec![2.5]);
    }

    #[test]
    fn mean_matches_naive_triple_loop_oracle() {
        // K=3, 2x2x2 pseudo-random cells
        let vals: Vec<f64> = (0..8).map(|i| ((i * 2654435761u64) % 1000) as f64 / 97.0).collect();
        let a = MultiwayArray::new(vec![2, 2, 2], 1, vals.clone()).unwrap();
        let mut acc = 0.0;
        for i1 in 0..2 {
            for i2 in 0..2 {
                for i3 in 0..2 {
                    acc += a.cell(&[i1, i2, i3])[0];
                }
            }
        }
        let oracle = acc / 8.0;
        assert!((sample_mean(&a)[0] - oracle).abs() <= 1e-12);
    }

    #[test]
    fn leave_one_index_means_hand_case() {
        let m = leave_one_index_means(&grid_2x2());
        assert_eq!(m.row(0, 0), &[1.5]);
        assert_eq!(m.row(0, 1), &[3.5]);
        assert_eq!(m.row(1, 0), &[2.0]);
        assert_eq!(m.row(1, 1), &[3.0]);
    }

    #[test]
    fn k1_leave_one_means_are_the_observations() {
        let a = MultiwayArray::new(vec![4], 1, vec![1.0, 4.0, 9.0, 16.0]).unwrap();
        let m = leave_one_index_means(&a);
        for i in 0..4 {
            assert_eq!(m.row(0, i), a.cell(&[i]));
        }
    }

    #[test]
    fn rows_average_back_to_the_sample_mean() {
        let vals: Vec<f64> = (0..3 * 4 * 2).map(|i| (i as f64).sin()).collect();
        let a = MultiwayArray::new(vec![3, 4], 2, vals).unwrap();
        let s = sample_mean(&a);
        let m = leave_one_index_means(&a);
        for axis in 0..2 {
            let nk = a.dims()[axis];
            for j in 0..2 {
                let avg: f64 = (0..nk).map(|i| m.row(axis, i)[j]).sum::<f64>() / nk as f64;
                assert!((avg - s[j]).abs() <= 1e-12 * s[j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn zero_data_gives_zero_cv_in_raw_mode() {
        let a = MultiwayArray::constant(vec![3, 3], 2, 0.0).unwrap();
        let cfg = SepBootstrapConfig {
            mode: Mode::Raw,
            b: 100,
            ..Default::default()
        };
        let res = bootstrap(&a, &cfg).unwrap();
        assert_eq!(res.cv, 0.0);
        assert!(res.sup_draws.iter().all(|&s| s == 0.0));
        let band = confidence_band(&res, 0.1, Mode::Raw).unwrap();
        assert!(band.half_width.iter().all(|&h| h == 0.0));
        assert!(band.covers(&[0.0, 0.0]));
    }

    #[test]
    fn zero_data_is_degenerate_in_studentized_mode() {
        let a = MultiwayArray::constant(vec![3, 3], 2, 0.0).unwrap();
        let cfg = SepBootstrapConfig {
            b: 100,
            ..Default::default()
        };
        assert!(matches!(
            bootstrap(&a, &cfg).unwrap_err(),
            Error::DegenerateScale { coord: 0 }
        ));
    }

    #[test]
    fn bessel_variance_dominates_plain() {
        let vals: Vec<f64> = (0..5 * 4 * 3).map(|i| ((i * 31 + 7) % 17) as f64).collect();
        let a = MultiwayArray::new(vec![5, 4], 3, vals).unwrap();
        let res = bootstrap(
            &a,
            &SepBootstrapConfig {
                mode: Mode::Raw,
                b: 100,
                ..Default::default()
            },
        )
        .unwrap();
        for j in 0..3 {
            assert!(res.sigma_tilde[j] >= res.sigma_hat[j]);
            assert!(res.sigma_hat[j] >= 0.0);
        }
    }

    #[test]
    fn wider_level_contains_narrower_level() {
        let vals: Vec<f64> = (0..6 * 6).map(|i| (i as f64 * 0.7).cos()).collect();
        let a = MultiwayArray::new(vec![6, 6], 1, vals).unwrap();
        let res = bootstrap(
            &a,
            &SepBootstrapConfig {
                b: 400,
                ..Default::default()
            },
        )
        .unwrap();
        let b95 = confidence_band(&res, 0.05, Mode::Studentized).unwrap();
        let b90 = confidence_band(&res, 0.10, Mode::Studentized).unwrap();
        assert!(b95.contains_band(&b90));
    }

    #[test]
    fn band_style_must_match_mode() {
        let a = grid_2x2();
        let res = bootstrap(
            &a,
            &SepBootstrapConfig {
                mode: Mode::Raw,
                b: 100,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            confidence_band(&res, 0.1, Mode::Studentized).unwrap_err(),
            Error::ModeMismatch { .. }
        ));
    }

    #[test]
    fn axis_relabeling_leaves_summaries_invariant() {
        let vals: Vec<f64> = (0..4 * 3 * 2).map(|i| ((i * 53 + 11) % 29) as f64 / 7.0).collect();
        let a = MultiwayArray::new(vec![4, 3], 2, vals).unwrap();
        let b = a.permute_axis(0, &[2, 0, 3, 1]).unwrap();
        let (sa, sb) = (sample_mean(&a), sample_mean(&b));
        for j in 0..2 {
            assert!((sa[j] - sb[j]).abs() <= 1e-12);
        }
        let (ma, mb) = (leave_one_index_means(&a), leave_one_index_means(&b));
        // per-row assignment permutes: row i of b's axis 0 equals row perm[i] of a's
        for (i, &pi) in [2usize, 0, 3, 1].iter().enumerate() {
            assert_eq!(mb.row(0, i), ma.row(0, pi));
        }
        // conditional covariance invariant
        let ca = conditional_covariance(&ma, &sa, 3);
        let cb = conditional_covariance(&mb, &sb, 3);
        for (x, y) in ca.iter().zip(&cb) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_deterministic_across_thread_counts() {
        let vals: Vec<f64> = (0..5 * 5 * 2).map(|i| (i as f64).sqrt().sin()).collect();
        let a = MultiwayArray::new(vec![5, 5], 2, vals).unwrap();
        let cfg = SepBootstrapConfig {
            b: 200,
            seed: 99,
            keep_draws: true,
            ..Default::default()
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool8 = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let r1 = pool1.install(|| bootstrap(&a, &cfg)).unwrap();
        let r8 = pool8.install(|| bootstrap(&a, &cfg)).unwrap();
        assert_eq!(r1.cv.to_bits(), r8.cv.to_bits());
        for (a, b) in r1.sup_draws.iter().zip(&r8.sup_draws) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (da, db) in r1.draws.unwrap().iter().zip(r8.draws.unwrap().iter()) {
            for (a, b) in da.iter().zip(db) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn draw_moments_match_conditional_gaussian_law() {
        // fixed data; draws are conditionally Gaussian with covariance
        // Sigma_hat: check variance and skewness of a coordinate
        let vals: Vec<f64> = (0..8 * 7).map(|i| ((i * 97 + 13) % 41) as f64 / 11.0).collect();
        let a = MultiwayArray::new(vec![8, 7], 1, vals).unwrap();
        let cfg = SepBootstrapConfig {
            b: 40_000,
            mode: Mode::Raw,
            seed: 5,
            keep_draws: true,
            materialize_sigma: true,
            ..Default::default()
        };
        let res = bootstrap(&a, &cfg).unwrap();
        let sigma = res.sigma_matrix.unwrap()[0];
        let n = a.min_dim() as f64;
        let draws = res.draws.unwrap();
        let b = draws.len() as f64;
        let (mut m2, mut m3) = (0.0, 0.0);
        for d in &draws {
            let z = n.sqrt() * d[0];
            m2 += z * z;
            m3 += z * z * z;
        }
        m2 /= b;
        m3 /= b;
        // Var(z^2) = 2 sigma^2, Var(z^3) = 15 sigma^3
        assert!((m2 - sigma).abs() <= 4.0 * (2.0 * sigma * sigma / b).sqrt());
        assert!(m3.abs() <= 4.0 * (15.0 * sigma.powi(3) / b).sqrt());
    }
}
