//! Multiplier bootstrap for jointly exchangeable (dyadic/polyadic) arrays.
//!
//! The polyadic sample mean S_n averages all ordered K-tuples of distinct
//! units; each unit's Hajek-projection estimate is
//!
//!   What_j = ((n-K)!/(n-1)!) sum_k sum_{tuples with i_k = j} X_i,
//!
//! and the bootstrap statistic is S_n^MB = n^{-1} sum_j xi_j (What_j - K S_n)
//! with independent standard normal multipliers. The dyadic case K = 2 is
//! the production path; a generic polyadic container exercises K = 3 in
//! tests.

use rayon::prelude::*;

use crate::array::DyadicArray;
use crate::band::{BandResult, Mode};
use crate::error::{Error, Result};
use crate::rng::{multiplier, StreamDomain};
use crate::stats::critical_value;

/// Polyadic sample mean and per-unit projection estimates.
#[derive(Debug, Clone)]
pub struct PolyadicMeans {
    pub k: usize,
    pub n: usize,
    pub p: usize,
    /// sample mean over ordered distinct tuples
    pub s_n: Vec<f64>,
    /// n x p row-major matrix of What_j
    pub w_hat: Vec<f64>,
}

impl PolyadicMeans {
    pub fn w_row(&self, j: usize) -> &[f64] {
        &self.w_hat[j * self.p..(j + 1) * self.p]
    }
}

/// Dyadic (K = 2) sample mean and What in one pass: every ordered pair
/// accumulates into both of its endpoints.
pub fn polyadic_means(a: &DyadicArray) -> Result<PolyadicMeans> {
    let (n, p) = (a.n(), a.p());
    if n < 3 {
        return Err(Error::TooFewUnits { need: 3, have: n });
    }
    let mut s_n = vec![0.0; p];
    let mut w_hat = vec![0.0; n * p];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let x = a.pair(i, j);
            for (c, v) in x.iter().enumerate() {
                s_n[c] += v;
                w_hat[i * p + c] += v;
                w_hat[j * p + c] += v;
            }
        }
    }
    let tuples = (n * (n - 1)) as f64;
    for v in &mut s_n {
        *v /= tuples;
    }
    let scale = 1.0 / (n - 1) as f64; // (n-2)!/(n-1)!
    for v in &mut w_hat {
        *v *= scale;
    }
    Ok(PolyadicMeans {
        k: 2,
        n,
        p,
        s_n,
        w_hat,
    })
}

/// Symmetrized array: both ordered slots hold the average of the pair.
/// Leaves the sample mean unchanged.
pub fn symmetrize(a: &DyadicArray) -> DyadicArray {
    DyadicArray::from_fn(a.n(), a.p(), true, |i, j, out| {
        for (c, o) in out.iter_mut().enumerate() {
            *o = 0.5 * (a.pair(i, j)[c] + a.pair(j, i)[c]);
        }
    })
    .expect("symmetric by construction")
}

#[derive(Debug, Clone)]
pub struct JointBootstrapConfig {
    pub b: usize,
    pub alpha: f64,
    pub mode: Mode,
    pub seed: u64,
    pub keep_draws: bool,
    pub materialize_sigma: bool,
    pub use_bessel: bool,
}

impl Default for JointBootstrapConfig {
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
pub struct JointBootstrapResult {
    pub n: usize,
    pub p: usize,
    pub b: usize,
    pub alpha: f64,
    pub mode: Mode,
    pub seed: u64,
    pub use_bessel: bool,
    /// polyadic sample mean S_n
    pub mean: Vec<f64>,
    /// plain variance estimates (1/n denominator)
    pub sigma_hat: Vec<f64>,
    /// Bessel-corrected variance estimates (1/(n-1) denominator)
    pub sigma_tilde: Vec<f64>,
    pub sup_draws: Vec<f64>,
    pub cv: f64,
    pub draws: Option<Vec<Vec<f64>>>,
    /// optional p x p conditional covariance of sqrt(n) S_n^MB
    pub sigma_matrix: Option<Vec<f64>>,
}

/// Sigma_hat = n^{-1} sum_j (What_j - K S_n)(What_j - K S_n)^T.
pub fn conditional_covariance(means: &PolyadicMeans) -> Vec<f64> {
    let (n, p, kf) = (means.n, means.p, means.k as f64);
    let mut out = vec![0.0; p * p];
    let mut d = vec![0.0; p];
    for j in 0..n {
        let row = means.w_row(j);
        for c in 0..p {
            d[c] = row[c] - kf * means.s_n[c];
        }
        for r in 0..p {
            let dr = d[r] / n as f64;
            for c in 0..p {
                out[r * p + c] += dr * d[c];
            }
        }
    }
    out
}

pub fn bootstrap(a: &DyadicArray, cfg: &JointBootstrapConfig) -> Result<JointBootstrapResult> {
    let means = polyadic_means(a)?;
    bootstrap_from_means(&means, cfg)
}

/// Bootstrap from precomputed projections (also used by the K = 3 tests
/// through the generic container below).
pub fn bootstrap_from_means(
    means: &PolyadicMeans,
    cfg: &JointBootstrapConfig,
) -> Result<JointBootstrapResult> {
    if cfg.b < 100 {
        return Err(Error::InvalidParam(format!("need B >= 100, got {}", cfg.b)));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidParam(format!(
            "need 0 < alpha < 1, got {}",
            cfg.alpha
        )));
    }
    let (n, p, kf) = (means.n, means.p, means.k as f64);
    let mut sigma_hat = vec![0.0; p];
    for j in 0..n {
        let row = means.w_row(j);
        for c in 0..p {
            let d = row[c] - kf * means.s_n[c];
            sigma_hat[c] += d * d;
        }
    }
    let sigma_tilde: Vec<f64> = sigma_hat.iter().map(|s| s / (n - 1) as f64).collect();
    for s in &mut sigma_hat {
        *s /= n as f64;
    }

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

    let sqrt_n = (n as f64).sqrt();
    let results: Vec<(f64, Option<Vec<f64>>)> = (0..cfg.b)
        .into_par_iter()
        .map(|bi| {
            let mut d = vec![0.0; p];
            for j in 0..n {
                let xi = multiplier(cfg.seed, StreamDomain::Joint, bi, 0, j) / n as f64;
                let row = means.w_row(j);
                for c in 0..p {
                    d[c] += xi * (row[c] - kf * means.s_n[c]);
                }
            }
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
    let sigma_matrix = cfg.materialize_sigma.then(|| conditional_covariance(means));

    Ok(JointBootstrapResult {
        n,
        p,
        b: cfg.b,
        alpha: cfg.alpha,
        mode: cfg.mode,
        seed: cfg.seed,
        use_bessel: cfg.use_bessel,
        mean: means.s_n.clone(),
        sigma_hat,
        sigma_tilde,
        sup_draws,
        cv,
        draws,
        sigma_matrix,
    })
}

pub fn confidence_band(
    result: &JointBootstrapResult,
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
    let sqrt_n = (result.n as f64).sqrt();
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

/// Dense array over ordered K-tuples of distinct units; correctness path
/// for general K (the dyadic storage above fixes K = 2).
#[derive(Debug, Clone)]
pub struct PolyadicArray {
    n: usize,
    k: usize,
    p: usize,
    // full n^K cube; tuples with repeated units are unused
    values: Vec<f64>,
}

impl PolyadicArray {
    pub fn from_fn(
        n: usize,
        k: usize,
        p: usize,
        mut fill: impl FnMut(&[usize], &mut [f64]),
    ) -> Result<Self> {
        if n < k + 1 {
            return Err(Error::TooFewUnits { need: k + 1, have: n });
        }
        let cube = n.pow(k as u32);
        let mut values = vec![0.0; cube * p];
        let mut tuple = vec![0usize; k];
        for cell in 0..cube {
            let mut rem = cell;
            for axis in (0..k).rev() {
                tuple[axis] = rem % n;
                rem /= n;
            }
            if has_repeat(&tuple) {
                continue;
            }
            fill(&tuple, &mut values[cell * p..(cell + 1) * p]);
        }
        Ok(Self { n, k, p, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tuple(&self, tuple: &[usize]) -> &[f64] {
        debug_assert!(!has_repeat(tuple));
        let mut off = 0usize;
        for &i in tuple {
            off = off * self.n + i;
        }
        &self.values[off * self.p..(off + 1) * self.p]
    }
}

fn has_repeat(tuple: &[usize]) -> bool {
    for a in 0..tuple.len() {
        for b in (a + 1)..tuple.len() {
            if tuple[a] == tuple[b] {
                return true;
            }
        }
    }
    false
}

/// General-K polyadic means by direct tuple iteration.
pub fn polyadic_means_general(a: &PolyadicArray) -> PolyadicMeans {
    let (n, k, p) = (a.n, a.k, a.p);
    let mut s_n = vec![0.0; p];
    let mut w_hat = vec![0.0; n * p];
    let mut tuple = vec![0usize; k];
    let cube = n.pow(k as u32);
    let mut count = 0usize;
    for cell in 0..cube {
        let mut rem = cell;
        for axis in (0..k).rev() {
            tuple[axis] = rem % n;
            rem /= n;
        }
        if has_repeat(&tuple) {
            continue;
        }
        count += 1;
        let x = a.tuple(&tuple);
        for (c, v) in x.iter().enumerate() {
            s_n[c] += v;
            for &j in &tuple {
                w_hat[j * p + c] += v;
            }
        }
    }
    for v in &mut s_n {
        *v /= count as f64;
    }
    // (n-K)!/(n-1)! = 1 / ((n-1)(n-2)...(n-K+1))
    let mut denom = 1.0;
    for d in 1..k {
        denom *= (n - d) as f64;
    }
    for v in &mut w_hat {
        *v /= denom;
    }
    PolyadicMeans { k, n, p, s_n, w_hat }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyad(n: usize, f: impl Fn(usize, usize) -> f64) -> DyadicArray {
        DyadicArray::from_fn(n, 1, false, |i, j, out| out[0] = f(i, j)).unwrap()
    }

    #[test]
    fn hand_case_n3() {
        // X_ij = 10(i+1) + (j+1), 1-based display values
        let a = dyad(3, |i, j| (10 * (i + 1) + (j + 1)) as f64);
        let m = polyadic_means(&a).unwrap();
        let s = (12.0 + 13.0 + 21.0 + 23.0 + 31.0 + 32.0) / 6.0;
        assert!((m.s_n[0] - s).abs() <= 1e-12);
        // What_1 = (X_12 + X_13 + X_21 + X_31) / 2
        let w1 = (12.0 + 13.0 + 21.0 + 31.0) / 2.0;
        assert!((m.w_row(0)[0] - w1).abs() <= 1e-12);
    }

    #[test]
    fn constant_symmetric_array() {
        let a = DyadicArray::from_fn(5, 2, true, |_, _, out| {
            out[0] = 3.0;
            out[1] = -1.0;
        })
        .unwrap();
        let m = polyadic_means(&a).unwrap();
        assert_eq!(m.s_n, vec![3.0, -1.0]);
        for j in 0..5 {
            assert_eq!(m.w_row(j), &[6.0, -2.0]);
        }
    }

    #[test]
    fn counting_identity_mean_w_is_k_times_mean() {
        let a = dyad(6, |i, j| ((i * 7 + j * 13 + 3) % 11) as f64 / 3.0);
        let m = polyadic_means(&a).unwrap();
        let avg: f64 = (0..6).map(|j| m.w_row(j)[0]).sum::<f64>() / 6.0;
        assert!((avg - 2.0 * m.s_n[0]).abs() <= 1e-12 * m.s_n[0].abs().max(1.0));
    }

    #[test]
    fn symmetrize_averages_and_preserves_mean() {
        let a = dyad(4, |i, j| (i * 4 + j) as f64);
        let s = symmetrize(&a);
        assert!(s.is_symmetric());
        assert_eq!(s.pair(0, 1)[0], 0.5 * (1.0 + 4.0));
        let (ma, ms) = (polyadic_means(&a).unwrap(), polyadic_means(&s).unwrap());
        assert!((ma.s_n[0] - ms.s_n[0]).abs() <= 1e-12);
        // already symmetric input is a fixed point
        let s2 = symmetrize(&s);
        assert_eq!(s.pair(2, 3), s2.pair(2, 3));
    }

    #[test]
    fn hand_symmetrize_two_slots() {
        let mut a = DyadicArray::zeros(2, 1, false).unwrap();
        a.pair_mut(0, 1)[0] = 1.0;
        a.pair_mut(1, 0)[0] = 3.0;
        let s = symmetrize(&a);
        assert_eq!(s.pair(0, 1), &[2.0]);
        assert_eq!(s.pair(1, 0), &[2.0]);
    }

    #[test]
    fn symmetric_w_hat_matches_single_sum_form() {
        // for symmetric arrays What_j = (2/(n-1)) sum_{i != j} X_ij
        let base = dyad(5, |i, j| ((i + 1) * (j + 1)) as f64);
        let a = symmetrize(&base);
        let m = polyadic_means(&a).unwrap();
        for j in 0..5 {
            let direct: f64 = (0..5)
                .filter(|&i| i != j)
                .map(|i| 2.0 * a.pair(j, i)[0])
                .sum::<f64>()
                / 4.0;
            assert!((m.w_row(j)[0] - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_array_zero_cv() {
        let a = DyadicArray::zeros(5, 2, true).unwrap();
        let res = bootstrap(
            &a,
            &JointBootstrapConfig {
                mode: Mode::Raw,
                b: 100,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(res.cv, 0.0);
    }

    #[test]
    fn too_few_units_rejected() {
        let a = DyadicArray::zeros(2, 1, true).unwrap();
        assert!(matches!(
            polyadic_means(&a).unwrap_err(),
            Error::TooFewUnits { need: 3, have: 2 }
        ));
    }

    #[test]
    fn unit_relabeling_equivariance() {
        let a = dyad(5, |i, j| ((i * 11 + j * 5 + 1) % 13) as f64);
        let perm = [3usize, 1, 4, 0, 2];
        let b = a.permute_units(&perm).unwrap();
        let (ma, mb) = (polyadic_means(&a).unwrap(), polyadic_means(&b).unwrap());
        assert!((ma.s_n[0] - mb.s_n[0]).abs() <= 1e-12);
        for j in 0..5 {
            assert!((mb.w_row(j)[0] - ma.w_row(perm[j])[0]).abs() <= 1e-12);
        }
        // variance estimates are label-free
        let cfg = JointBootstrapConfig {
            mode: Mode::Raw,
            b: 100,
            ..Default::default()
        };
        let (ra, rb) = (bootstrap(&a, &cfg).unwrap(), bootstrap(&b, &cfg).unwrap());
        assert!((ra.sigma_tilde[0] - rb.sigma_tilde[0]).abs() <= 1e-12);
    }

    #[test]
    fn general_k2_container_agrees_with_dyadic_path() {
        let a = dyad(5, |i, j| ((i * 3 + j * 7) % 10) as f64 - 4.5);
        let g = PolyadicArray::from_fn(5, 2, 1, |t, out| {
            out[0] = a.pair(t[0], t[1])[0];
        })
        .unwrap();
        let (m1, m2) = (polyadic_means(&a).unwrap(), polyadic_means_general(&g));
        assert!((m1.s_n[0] - m2.s_n[0]).abs() <= 1e-12);
        for j in 0..5 {
            assert!((m1.w_row(j)[0] - m2.w_row(j)[0]).abs() <= 1e-12);
        }
    }

    #[test]
    fn general_k3_counting_identity() {
        let g = PolyadicArray::from_fn(5, 3, 2, |t, out| {
            out[0] = (t[0] * 25 + t[1] * 5 + t[2]) as f64 / 7.0;
            out[1] = ((t[0] + 2 * t[1] + 3 * t[2]) % 4) as f64;
        })
        .unwrap();
        let m = polyadic_means_general(&g);
        for c in 0..2 {
            let avg: f64 = (0..5).map(|j| m.w_row(j)[c]).sum::<f64>() / 5.0;
            assert!((avg - 3.0 * m.s_n[c]).abs() <= 1e-12 * m.s_n[c].abs().max(1.0));
        }
    }
}
