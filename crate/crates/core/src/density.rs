//! Dyadic kernel density estimation with a point mass at zero, and
//! multiplier-bootstrap uniform confidence bands.
//!
//! The model splits Y into a mass at zero, P(Y != 0) = a, and a continuous
//! part with density f, so b(y) = a f(y). Estimates are
//!
//!   a_hat = C(n,2)^{-1} sum_{i<j} 1(Y_ij != 0),
//!   b_hat(y) = C(n,2)^{-1} sum_{i<j} K_h(y - Y_ij) 1(Y_ij != 0),
//!
//! and f_hat = b_hat / a_hat. Bands come in a constant-width flavor and a
//! studentized flavor, both driven by the jointly exchangeable multiplier
//! bootstrap applied to the influence terms of f_hat.

use rayon::prelude::*;

use crate::array::DyadicArray;
use crate::band::Mode;
use crate::error::{Error, Result};
use crate::rng::{multiplier, StreamDomain};
use crate::stats::{critical_value, interquartile_range, sample_std};

/// Kernel shape; `order` is the kernel's order r >= 2 (moments 1..r-1
/// vanish).
#[derive(Debug, Clone)]
pub enum Kernel {
    Epanechnikov,
    Gaussian,
    /// tabulated kernel, linearly interpolated between nodes and zero
    /// outside; nodes must be strictly increasing in x
    Table { xs: Vec<f64>, ys: Vec<f64>, order: usize },
}

impl Kernel {
    pub fn order(&self) -> usize {
        match self {
            Kernel::Epanechnikov | Kernel::Gaussian => 2,
            Kernel::Table { order, .. } => *order,
        }
    }

    /// Support radius: evaluations vanish outside [-c, c]. Infinite for the
    /// Gaussian.
    pub fn support_radius(&self) -> f64 {
        match self {
            Kernel::Epanechnikov => 1.0,
            Kernel::Gaussian => f64::INFINITY,
            Kernel::Table { xs, .. } => xs
                .first()
                .map(|lo| lo.abs().max(xs.last().unwrap().abs()))
                .unwrap_or(0.0),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Kernel::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            Kernel::Gaussian => (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            Kernel::Table { xs, ys, .. } => {
                if xs.is_empty() || u < xs[0] || u > *xs.last().unwrap() {
                    return 0.0;
                }
                let hi = xs.partition_point(|&x| x < u).min(xs.len() - 1).max(1);
                let (x0, x1) = (xs[hi - 1], xs[hi]);
                let t = if x1 > x0 { (u - x0) / (x1 - x0) } else { 0.0 };
                ys[hi - 1] + t * (ys[hi] - ys[hi - 1])
            }
        }
    }

    /// Check that the kernel integrates to one (within 1e-8) and that its
    /// moments 1..order-1 vanish (within 1e-6), by quadrature.
    pub fn validate(&self) -> Result<()> {
        if self.order() < 2 {
            return Err(Error::InvalidKernel("kernel order must be >= 2".into()));
        }
        if let Kernel::Table { xs, ys, .. } = self {
            if xs.len() < 2 || xs.len() != ys.len() {
                return Err(Error::InvalidKernel("table needs >= 2 matching nodes".into()));
            }
            if xs.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidKernel("table nodes must be increasing".into()));
            }
        }
        let radius = match self {
            Kernel::Gaussian => 10.0,
            _ => self.support_radius(),
        };
        for t in 0..self.order() {
            let m = self.moment_quadrature(t, radius);
            if t == 0 {
                if (m - 1.0).abs() > 1e-8 {
                    return Err(Error::InvalidKernel(format!(
                        "kernel integrates to {m:.12}, not 1"
                    )));
                }
            } else if m.abs() > 1e-6 {
                return Err(Error::InvalidKernel(format!(
                    "kernel moment {t} is {m:.3e}, not 0"
                )));
            }
        }
        Ok(())
    }

    /// Integral of u^t K(u) over [-radius, radius]: 5-point Gauss-Legendre
    /// on panels aligned with the table nodes (or a fine uniform split).
    fn moment_quadrature(&self, t: usize, radius: f64) -> f64 {
        // 5-point Gauss-Legendre nodes/weights on [-1, 1]
        const GX: [f64; 5] = [
            -0.906179845938664,
            -0.5384693101056831,
            0.0,
            0.5384693101056831,
            0.906179845938664,
        ];
        const GW: [f64; 5] = [
            0.23692688505618908,
            0.47862867049936647,
            0.5688888888888889,
            0.47862867049936647,
            0.23692688505618908,
        ];
        let panels: Vec<(f64, f64)> = match self {
            Kernel::Table { xs, .. } => xs.windows(2).map(|w| (w[0], w[1])).collect(),
            _ => {
                let m = 4000;
                (0..m)
                    .map(|i| {
                        let a = -radius + 2.0 * radius * i as f64 / m as f64;
                        (a, a + 2.0 * radius / m as f64)
                    })
                    .collect()
            }
        };
        let mut acc = 0.0;
        for (a, b) in panels {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in GX.iter().zip(GW) {
                let u = mid + half * x;
                acc += w * half * u.powi(t as i32) * self.eval(u);
            }
        }
        acc
    }
}

/// Silverman plug-in bandwidth rules. Both are undersmoothed by an extra
/// n^{-shift} relative to the n^{-1/5} rate; the default shift 1/5 gives
/// the n^{-2/5} rules
///   (a) h = 1.06 sigma n^{-2/5},
///   (b) h = 0.9 min(sigma, IQR/1.34) n^{-2/5},
/// with sigma and IQR taken over the nonzero pair values and n the number
/// of units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthRule {
    SilvermanA,
    SilvermanB,
}

pub const DEFAULT_UNDERSMOOTH_SHIFT: f64 = 0.2;

pub fn bandwidth(data: &DyadicArray, rule: BandwidthRule, undersmooth_shift: f64) -> Result<f64> {
    if data.p() != 1 {
        return Err(Error::InvalidParam("bandwidth needs a scalar dyadic array".into()));
    }
    let nonzero: Vec<f64> = data
        .iter_unordered()
        .map(|(_, _, v)| v[0])
        .filter(|&v| v != 0.0)
        .collect();
    let distinct = {
        let mut s = nonzero.clone();
        s.sort_by(|a, b| a.total_cmp(b));
        s.dedup();
        s.len()
    };
    if distinct < 2 {
        return Err(Error::DegenerateData(
            "need at least 2 distinct nonzero values".into(),
        ));
    }
    let sigma = sample_std(&nonzero);
    if sigma == 0.0 {
        return Err(Error::DegenerateData("zero sample standard deviation".into()));
    }
    let n = data.n() as f64;
    let rate = n.powf(-(0.2 + undersmooth_shift));
    let h = match rule {
        BandwidthRule::SilvermanA => 1.06 * sigma * rate,
        BandwidthRule::SilvermanB => {
            0.9 * sigma.min(interquartile_range(&nonzero) / 1.34) * rate
        }
    };
    Ok(h)
}

/// Point estimates of the zero-mass complement, the scaled density, and
/// the density itself.
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    /// empirical share of nonzero pairs
    pub a_emp: f64,
    /// the value used in the formulas: a_emp, or 1 under `a_known_one`
    pub a_used: f64,
    pub b_hat: Vec<f64>,
    pub f_hat: Vec<f64>,
}

fn validate_grid(data: &DyadicArray, grid: &[f64], h: f64, a_emp: f64) -> Result<()> {
    if !data.is_symmetric() {
        return Err(Error::InvalidParam(
            "density estimation requires a symmetric dyadic array".into(),
        ));
    }
    if data.p() != 1 {
        return Err(Error::InvalidParam("density estimation needs p = 1".into()));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParam(format!("bandwidth must be positive, got {h}")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParam("empty design grid".into()));
    }
    // With a point mass present, the zero design point confounds the mass
    // and the continuous part; reject it only in that case so the standard
    // [-2,2] x 201 grid still serves continuous data.
    if a_emp < 1.0 {
        if let Some(l) = grid.iter().position(|&y| y == 0.0) {
            return Err(Error::InvalidParam(format!(
                "design point {l} is exactly zero while the data has a mass at zero"
            )));
        }
    }
    Ok(())
}

pub fn density_estimate(
    data: &DyadicArray,
    grid: &[f64],
    kernel: &Kernel,
    h: f64,
    a_known_one: bool,
) -> Result<DensityEstimate> {
    let stats = pair_kernel_sums(data, grid, kernel, h, a_known_one)?;
    Ok(stats.estimate)
}

/// Per-unit kernel accumulations shared by the estimator and the band:
/// row i holds A_i(y_l) = sum_{j != i} K_h(y_l - Y_ij) 1(Y_ij != 0).
struct PairSums {
    estimate: DensityEstimate,
    /// n x p row-major A_i
    unit_sums: Vec<f64>,
    /// per-unit count of nonzero partners
    unit_counts: Vec<usize>,
}

fn pair_kernel_sums(
    data: &DyadicArray,
    grid: &[f64],
    kernel: &Kernel,
    h: f64,
    a_known_one: bool,
) -> Result<PairSums> {
    let n = data.n();
    let pairs = (n * (n - 1) / 2) as f64;
    let nonzero_pairs = data
        .iter_unordered()
        .filter(|(_, _, v)| v[0] != 0.0)
        .count();
    let a_emp = nonzero_pairs as f64 / pairs;
    validate_grid(data, grid, h, a_emp)?;
    if !a_known_one && a_emp == 0.0 {
        return Err(Error::ZeroMassOnly);
    }
    let a_used = if a_known_one { 1.0 } else { a_emp };

    let p = grid.len();
    // sorted view of the grid so compact-support kernels touch only the
    // design points within h of each observation
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let sorted: Vec<f64> = order.iter().map(|&l| grid[l]).collect();
    let radius = kernel.support_radius() * h;

    let mut unit_sums = vec![0.0; n * p];
    let mut unit_counts = vec![0usize; n];
    for (i, j, v) in data.iter_unordered() {
        let y = v[0];
        if y == 0.0 {
            continue;
        }
        unit_counts[i] += 1;
        unit_counts[j] += 1;
        let (lo, hi) = if radius.is_finite() {
            (
                sorted.partition_point(|&g| g < y - radius),
                sorted.partition_point(|&g| g <= y + radius),
            )
        } else {
            (0, p)
        };
        for &l in &order[lo..hi] {
            let w = kernel.eval((grid[l] - y) / h) / h;
            unit_sums[i * p + l] += w;
            unit_sums[j * p + l] += w;
        }
    }

    // b_hat from the unit sums: sum_i A_i = 2 C(n,2) b_hat
    let mut b_hat = vec![0.0; p];
    for i in 0..n {
        for l in 0..p {
            b_hat[l] += unit_sums[i * p + l];
        }
    }
    for b in &mut b_hat {
        *b /= 2.0 * pairs;
    }
    let f_hat: Vec<f64> = b_hat.iter().map(|b| b / a_used).collect();
    Ok(PairSums {
        estimate: DensityEstimate {
            a_emp,
            a_used,
            b_hat,
            f_hat,
        },
        unit_sums,
        unit_counts,
    })
}

#[derive(Debug, Clone)]
pub struct DensityBandConfig {
    pub alpha: f64,
    pub b: usize,
    pub band: Mode,
    pub a_known_one: bool,
    pub seed: u64,
}

impl Default for DensityBandConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            b: 500,
            band: Mode::Studentized,
            a_known_one: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DensityBandResult {
    pub grid: Vec<f64>,
    pub h: f64,
    pub n: usize,
    pub b: usize,
    pub alpha: f64,
    pub band: Mode,
    pub a_known_one: bool,
    pub seed: u64,
    /// empirical nonzero share (the zero-mass share is 1 - a_emp)
    pub a_emp: f64,
    pub a_used: f64,
    pub b_hat: Vec<f64>,
    pub f_hat: Vec<f64>,
    /// per-point standard deviations sigma_tilde_l
    pub sigma_tilde: Vec<f64>,
    /// centering check: the influence-term sample mean, ~0 under the
    /// fitted centering (see tests)
    pub s_tilde: Vec<f64>,
    pub cv_raw: f64,
    /// studentized critical value; absent when some sigma_tilde_l = 0
    pub cv_stud: Option<f64>,
    /// half-widths of the requested band style
    pub half_width: Vec<f64>,
    pub sup_raw: Vec<f64>,
    pub sup_stud: Option<Vec<f64>>,
}

impl DensityBandResult {
    pub fn lower(&self) -> Vec<f64> {
        self.f_hat
            .iter()
            .zip(&self.half_width)
            .map(|(f, w)| f - w)
            .collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.f_hat
            .iter()
            .zip(&self.half_width)
            .map(|(f, w)| f + w)
            .collect()
    }

    /// Does the requested band contain `truth` at every design point?
    pub fn covers(&self, truth: &[f64]) -> bool {
        self.f_hat
            .iter()
            .zip(&self.half_width)
            .zip(truth)
            .all(|((f, w), t)| (f - t).abs() <= *w)
    }

    /// Half-widths for the other band style at level alpha, if available.
    pub fn half_width_for(&self, style: Mode, alpha: f64) -> Option<Vec<f64>> {
        let sqrt_n = (self.n as f64).sqrt();
        match style {
            Mode::Raw => {
                let cv = critical_value(&self.sup_raw, alpha);
                Some(vec![cv / sqrt_n; self.grid.len()])
            }
            Mode::Studentized => {
                let sups = self.sup_stud.as_ref()?;
                let cv = critical_value(sups, alpha);
                Some(
                    self.sigma_tilde
                        .iter()
                        .map(|s| s * cv / sqrt_n)
                        .collect(),
                )
            }
        }
    }
}

/// Estimate the density and build a uniform confidence band around it.
pub fn density_band(
    data: &DyadicArray,
    grid: &[f64],
    kernel: &Kernel,
    h: f64,
    cfg: &DensityBandConfig,
) -> Result<DensityBandResult> {
    if cfg.b < 100 {
        return Err(Error::InvalidParam(format!("need B >= 100, got {}", cfg.b)));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidParam(format!(
            "need 0 < alpha < 1, got {}",
            cfg.alpha
        )));
    }
    let sums = pair_kernel_sums(data, grid, kernel, h, cfg.a_known_one)?;
    if sums.estimate.a_emp == 0.0 {
        return Err(Error::ZeroMassOnly);
    }
    let est = &sums.estimate;
    let n = data.n();
    let p = grid.len();
    let a = est.a_used;

    // W_tilde_i(y_l) = (2/(n-1)) [A_i(y_l)/a - cnt_i b_hat(y_l)/a^2]
    let mut w_tilde = vec![0.0; n * p];
    let scale = 2.0 / (n - 1) as f64;
    for i in 0..n {
        let cnt = sums.unit_counts[i] as f64;
        for l in 0..p {
            w_tilde[i * p + l] =
                scale * (sums.unit_sums[i * p + l] / a - cnt * est.b_hat[l] / (a * a));
        }
    }
    // S_tilde = mean_i(W_tilde_i) / 2 (the K = 2 counting identity)
    let mut s_tilde = vec![0.0; p];
    for i in 0..n {
        for l in 0..p {
            s_tilde[l] += w_tilde[i * p + l];
        }
    }
    for s in &mut s_tilde {
        *s /= 2.0 * n as f64;
    }
    let mut sigma_tilde = vec![0.0; p];
    for i in 0..n {
        for l in 0..p {
            let d = w_tilde[i * p + l] - 2.0 * s_tilde[l];
            sigma_tilde[l] += d * d;
        }
    }
    for s in &mut sigma_tilde {
        *s = (*s / n as f64).sqrt();
    }
    let stud_ok = sigma_tilde.iter().all(|&s| s > 0.0);
    if cfg.band == Mode::Studentized && !stud_ok {
        let coord = sigma_tilde.iter().position(|&s| s <= 0.0).unwrap();
        return Err(Error::DegenerateScale { coord });
    }

    let sqrt_n = (n as f64).sqrt();
    let sups: Vec<(f64, f64)> = (0..cfg.b)
        .into_par_iter()
        .map(|bi| {
            let mut d = vec![0.0; p];
            for i in 0..n {
                let xi = multiplier(cfg.seed, StreamDomain::Density, bi, 0, i) / n as f64;
                for l in 0..p {
                    d[l] += xi * (w_tilde[i * p + l] - 2.0 * s_tilde[l]);
                }
            }
            let raw = d.iter().fold(0.0f64, |m, x| m.max((sqrt_n * x).abs()));
            let stud = if stud_ok {
                d.iter()
                    .zip(&sigma_tilde)
                    .fold(0.0f64, |m, (x, s)| m.max((sqrt_n * x / s).abs()))
            } else {
                f64::NAN
            };
            (raw, stud)
        })
        .collect();
    let sup_raw: Vec<f64> = sups.iter().map(|(r, _)| *r).collect();
    let sup_stud: Option<Vec<f64>> = stud_ok.then(|| sups.iter().map(|(_, s)| *s).collect());

    let cv_raw = critical_value(&sup_raw, cfg.alpha);
    let cv_stud = sup_stud.as_ref().map(|s| critical_value(s, cfg.alpha));
    let half_width: Vec<f64> = match cfg.band {
        Mode::Raw => vec![cv_raw / sqrt_n; p],
        Mode::Studentized => {
            let cv = cv_stud.expect("checked above");
            sigma_tilde.iter().map(|s| s * cv / sqrt_n).collect()
        }
    };

    Ok(DensityBandResult {
        grid: grid.to_vec(),
        h,
        n,
        b: cfg.b,
        alpha: cfg.alpha,
        band: cfg.band,
        a_known_one: cfg.a_known_one,
        seed: cfg.seed,
        a_emp: est.a_emp,
        a_used: a,
        b_hat: est.b_hat.clone(),
        f_hat: est.f_hat.clone(),
        sigma_tilde,
        s_tilde,
        cv_raw,
        cv_stud,
        half_width,
        sup_raw,
        sup_stud,
    })
}

/// Evenly spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + i as f64 * step).collect()
}
