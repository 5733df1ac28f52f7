//! Monte Carlo designs and coverage experiments.
//!
//! Data generating processes: a K-way separately exchangeable design built
//! from independent latent vectors with AR-style covariance Sigma_Z
//! (entries 4^{-|r-c|}), a dyadic analogue, and a scalar dyadic design for
//! the density bands. Latents are Gaussian or a two-point scale mixture
//! (N(0, Sigma) with probability 1/2, else N(0, 2 Sigma), one Bernoulli per
//! latent vector); the density design uses Gaussian or logistic latents.
//!
//! Every design is mean zero, so the coverage experiments check whether
//! the uniform band contains the zero vector (array means) or the
//! kernel-smoothed surrogate density (density bands).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{DyadicArray, MultiwayArray};
use crate::band::Mode;
use crate::density::{self, BandwidthRule, DensityBandConfig, Kernel};
use crate::error::{Error, Result};
use crate::joint;
use crate::rng::subseed;
use crate::separable;
use crate::truth::{SurrogateOracle, TruthDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignFamily {
    SeparableK2,
    SeparableK3,
    Dyadic,
    DyadicDensity,
}

impl DesignFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignFamily::SeparableK2 => "separable_k2",
            DesignFamily::SeparableK3 => "separable_k3",
            DesignFamily::Dyadic => "dyadic",
            DesignFamily::DyadicDensity => "dyadic_density",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDist {
    Gaussian,
    Mixture,
    Logistic,
}

impl BaseDist {
    pub fn as_str(self) -> &'static str {
        match self {
            BaseDist::Gaussian => "gaussian",
            BaseDist::Mixture => "mixture",
            BaseDist::Logistic => "logistic",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignSpec {
    pub family: DesignFamily,
    pub base: BaseDist,
    pub p: usize,
    /// (N_1, .., N_K) for the separable families, (n,) for the dyadic ones
    pub dims: Vec<usize>,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        let want_dims = match self.family {
            DesignFamily::SeparableK2 => 2,
            DesignFamily::SeparableK3 => 3,
            DesignFamily::Dyadic | DesignFamily::DyadicDensity => 1,
        };
        if self.dims.len() != want_dims {
            return Err(Error::InvalidParam(format!(
                "{} expects {} dimension(s), got {:?}",
                self.family.as_str(),
                want_dims,
                self.dims
            )));
        }
        if self.dims.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParam("all sizes must be >= 2".into()));
        }
        let base_ok = match self.family {
            DesignFamily::DyadicDensity => {
                matches!(self.base, BaseDist::Gaussian | BaseDist::Logistic)
            }
            _ => matches!(self.base, BaseDist::Gaussian | BaseDist::Mixture),
        };
        if !base_ok {
            return Err(Error::InvalidParam(format!(
                "base {} not defined for design {}",
                self.base.as_str(),
                self.family.as_str()
            )));
        }
        if self.p == 0 {
            return Err(Error::InvalidParam("p must be >= 1".into()));
        }
        Ok(())
    }
}

/// The p x p latent covariance with entries 4^{-|r-c|}.
pub fn sigma_z(p: usize) -> Vec<f64> {
    let mut m = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..p {
            m[r * p + c] = 4f64.powi(-((r as i32 - c as i32).abs()));
        }
    }
    m
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
fn cholesky(a: &[f64], p: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..=r {
            let mut s = a[r * p + c];
            for k in 0..c {
                s -= l[r * p + k] * l[c * p + k];
            }
            if r == c {
                if s <= 0.0 {
                    return Err(Error::InvalidParam("matrix is not positive definite".into()));
                }
                l[r * p + c] = s.sqrt();
            } else {
                l[r * p + c] = s / l[c * p + c];
            }
        }
    }
    Ok(l)
}

/// Draws one latent p-vector per call: L z with z iid standard normal,
/// scaled by sqrt(2) with probability 1/2 under the mixture base.
struct LatentSampler {
    p: usize,
    chol: Vec<f64>,
    mixture: bool,
}

impl LatentSampler {
    fn new(p: usize, base: BaseDist) -> Result<Self> {
        Ok(Self {
            p,
            chol: cholesky(&sigma_z(p), p)?,
            mixture: base == BaseDist::Mixture,
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let p = self.p;
        let mut z = vec![0.0; p];
        for zi in &mut z {
            *zi = rng.sample(StandardNormal);
        }
        for r in 0..p {
            let mut acc = 0.0;
            for c in 0..=r {
                acc += self.chol[r * p + c] * z[c];
            }
            out[r] = acc;
        }
        if self.mixture && !rng.gen_bool(0.5) {
            for v in out.iter_mut() {
                *v *= std::f64::consts::SQRT_2;
            }
        }
    }
}

fn scalar_latent(base: BaseDist, rng: &mut ChaCha8Rng) -> f64 {
    match base {
        BaseDist::Gaussian => rng.sample(StandardNormal),
        BaseDist::Logistic => {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            (u / (1.0 - u)).ln()
        }
        BaseDist::Mixture => unreachable!("mixture base is vector-valued"),
    }
}

/// K = 2 separable design: X = (Z_row + Z_col)/4 + Z_cell/2.
/// K = 3: X = (three singles + three pairs)/12 + Z_cell/2.
pub fn gen_separable(spec: &DesignSpec, seed: u64) -> Result<MultiwayArray> {
    spec.validate()?;
    let p = spec.p;
    let sampler = LatentSampler::new(p, spec.base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_block = |count: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut block = vec![0.0; count * p];
        for i in 0..count {
            sampler.draw(rng, &mut block[i * p..(i + 1) * p]);
        }
        block
    };
    match spec.family {
        DesignFamily::SeparableK2 => {
            let (n1, n2) = (spec.dims[0], spec.dims[1]);
            let z1 = draw_block(n1, &mut rng);
            let z2 = draw_block(n2, &mut rng);
            let z12 = draw_block(n1 * n2, &mut rng);
            let mut values = vec![0.0; n1 * n2 * p];
            for i1 in 0..n1 {
                for i2 in 0..n2 {
                    let cell = i1 * n2 + i2;
                    for j in 0..p {
                        values[cell * p + j] = 0.25 * (z1[i1 * p + j] + z2[i2 * p + j])
                            + 0.5 * z12[cell * p + j];
                    }
                }
            }
            MultiwayArray::new(vec![n1, n2], p, values)
        }
        DesignFamily::SeparableK3 => {
            let (n1, n2, n3) = (spec.dims[0], spec.dims[1], spec.dims[2]);
            let z1 = draw_block(n1, &mut rng);
            let z2 = draw_block(n2, &mut rng);
            let z3 = draw_block(n3, &mut rng);
            let z12 = draw_block(n1 * n2, &mut rng);
            let z13 = draw_block(n1 * n3, &mut rng);
            let z23 = draw_block(n2 * n3, &mut rng);
            let z123 = draw_block(n1 * n2 * n3, &mut rng);
            let mut values = vec![0.0; n1 * n2 * n3 * p];
            let w = 1.0 / 12.0;
            for i1 in 0..n1 {
                for i2 in 0..n2 {
                    for i3 in 0..n3 {
                        let cell = (i1 * n2 + i2) * n3 + i3;
                        for j in 0..p {
                            let singles = z1[i1 * p + j] + z2[i2 * p + j] + z3[i3 * p + j];
                            let pairs = z12[(i1 * n2 + i2) * p + j]
                                + z13[(i1 * n3 + i3) * p + j]
                                + z23[(i2 * n3 + i3) * p + j];
                            values[cell * p + j] =
                                w * (singles + pairs) + 0.5 * z123[cell * p + j];
                        }
                    }
                }
            }
            MultiwayArray::new(vec![n1, n2, n3], p, values)
        }
        _ => Err(Error::InvalidParam("not a separable design".into())),
    }
}

/// Dyadic design: X_ij = (Z_i + Z_j)/4 + Z_{ij}/2, symmetric in i and j.
pub fn gen_dyadic(spec: &DesignSpec, seed: u64) -> Result<DyadicArray> {
    spec.validate()?;
    if spec.family != DesignFamily::Dyadic {
        return Err(Error::InvalidParam("not the dyadic design".into()));
    }
    let (n, p) = (spec.dims[0], spec.p);
    let sampler = LatentSampler::new(p, spec.base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z_unit = vec![0.0; n * p];
    for i in 0..n {
        sampler.draw(&mut rng, &mut z_unit[i * p..(i + 1) * p]);
    }
    // one latent per unordered pair, drawn in (i, j), i < j order
    let mut z_pair = vec![0.0; n * n * p];
    for i in 0..n {
        for j in (i + 1)..n {
            let off = (i * n + j) * p;
            let mut tmp = vec![0.0; p];
            sampler.draw(&mut rng, &mut tmp);
            z_pair[off..off + p].copy_from_slice(&tmp);
        }
    }
    DyadicArray::from_fn(n, p, true, |i, j, out| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let zp = &z_pair[(a * n + b) * p..(a * n + b + 1) * p];
        for c in 0..p {
            out[c] = 0.25 * (z_unit[i * p + c] + z_unit[j * p + c]) + 0.5 * zp[c];
        }
    })
}

/// Scalar dyadic design for the density bands: Y_ij = (U_i + U_j)/4 +
/// U_{ij}/2 with Gaussian or logistic latents; continuous, no zero mass.
pub fn gen_dyadic_density(spec: &DesignSpec, seed: u64) -> Result<DyadicArray> {
    spec.validate()?;
    if spec.family != DesignFamily::DyadicDensity {
        return Err(Error::InvalidParam("not the dyadic density design".into()));
    }
    let n = spec.dims[0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u_unit: Vec<f64> = (0..n).map(|_| scalar_latent(spec.base, &mut rng)).collect();
    let mut u_pair = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            u_pair[i * n + j] = scalar_latent(spec.base, &mut rng);
        }
    }
    DyadicArray::from_fn(n, 1, true, |i, j, out| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        out[0] = 0.25 * (u_unit[i] + u_unit[j]) + 0.5 * u_pair[a * n + b];
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub reps: usize,
    pub b: usize,
    /// confidence levels, e.g. [0.90, 0.95]
    pub levels: Vec<f64>,
    pub modes: Vec<Mode>,
    pub seed: u64,
    /// density experiments only
    pub rule: BandwidthRule,
    pub grid: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            reps: 500,
            b: 500,
            levels: vec![0.90, 0.95],
            modes: vec![Mode::Raw, Mode::Studentized],
            seed: 0,
            rule: BandwidthRule::SilvermanA,
            grid: density::linspace(-2.0, 2.0, 201),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageCell {
    pub level: f64,
    pub mode: Mode,
    pub coverage: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    pub design: String,
    pub base: String,
    pub p: usize,
    pub dims: Vec<usize>,
    pub reps: usize,
    pub b: usize,
    pub seed: u64,
    pub cells: Vec<CoverageCell>,
    pub wall_secs: f64,
}

/// Run the full coverage experiment for a design: generate, bootstrap,
/// and tally how often the uniform region contains the truth.
pub fn coverage_experiment(spec: &DesignSpec, cfg: &ExperimentConfig) -> Result<CoverageReport> {
    spec.validate()?;
    if cfg.reps == 0 {
        return Err(Error::InvalidParam("need reps >= 1".into()));
    }
    let start = Instant::now();
    let cell_count = cfg.levels.len() * cfg.modes.len();
    let covered: Vec<Vec<bool>> = match spec.family {
        DesignFamily::DyadicDensity => {
            let oracle = SurrogateOracle::new(match spec.base {
                BaseDist::Gaussian => TruthDensity::GaussianSum,
                BaseDist::Logistic => TruthDensity::LogisticSum,
                BaseDist::Mixture => unreachable!("validated"),
            });
            let kernel = Kernel::Epanechnikov;
            (0..cfg.reps)
                .into_par_iter()
                .map(|rep| {
                    density_rep(spec, cfg, &oracle, &kernel, rep as u64)
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => (0..cfg.reps)
            .into_par_iter()
            .map(|rep| array_rep(spec, cfg, rep as u64))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut cells = Vec::with_capacity(cell_count);
    let mut slot = 0usize;
    for &mode in &cfg.modes {
        for &level in &cfg.levels {
            let hits = covered.iter().filter(|row| row[slot]).count();
            cells.push(CoverageCell {
                level,
                mode,
                coverage: hits as f64 / cfg.reps as f64,
            });
            slot += 1;
        }
    }
    Ok(CoverageReport {
        design: spec.family.as_str().to_string(),
        base: spec.base.as_str().to_string(),
        p: spec.p,
        dims: spec.dims.clone(),
        reps: cfg.reps,
        b: cfg.b,
        seed: cfg.seed,
        cells,
        wall_secs: start.elapsed().as_secs_f64(),
    })
}

fn array_rep(spec: &DesignSpec, cfg: &ExperimentConfig, rep: u64) -> Result<Vec<bool>> {
    let data_seed = subseed(cfg.seed, &[rep, 0]);
    let boot_seed = subseed(cfg.seed, &[rep, 1]);
    let truth = vec![0.0; spec.p];
    let mut out = Vec::with_capacity(cfg.levels.len() * cfg.modes.len());
    match spec.family {
        DesignFamily::SeparableK2 | DesignFamily::SeparableK3 => {
            let data = gen_separable(spec, data_seed)?;
            for &mode in &cfg.modes {
                let res = separable::bootstrap(
                    &data,
                    &separable::SepBootstrapConfig {
                        b: cfg.b,
                        alpha: 1.0 - cfg.levels[0],
                        mode,
                        seed: boot_seed,
                        ..Default::default()
                    },
                )?;
                for &level in &cfg.levels {
                    let band = separable::confidence_band(&res, 1.0 - level, mode)?;
                    out.push(band.covers(&truth));
                }
            }
        }
        DesignFamily::Dyadic => {
            let data = gen_dyadic(spec, data_seed)?;
            for &mode in &cfg.modes {
                let res = joint::bootstrap(
                    &data,
                    &joint::JointBootstrapConfig {
                        b: cfg.b,
                        alpha: 1.0 - cfg.levels[0],
                        mode,
                        seed: boot_seed,
                        ..Default::default()
                    },
                )?;
                for &level in &cfg.levels {
                    let band = joint::confidence_band(&res, 1.0 - level, mode)?;
                    out.push(band.covers(&truth));
                }
            }
        }
        DesignFamily::DyadicDensity => unreachable!("handled by density_rep"),
    }
    Ok(out)
}

fn density_rep(
    spec: &DesignSpec,
    cfg: &ExperimentConfig,
    oracle: &SurrogateOracle,
    kernel: &Kernel,
    rep: u64,
) -> Result<Vec<bool>> {
    let data_seed = subseed(cfg.seed, &[rep, 0]);
    let boot_seed = subseed(cfg.seed, &[rep, 1]);
    let data = gen_dyadic_density(spec, data_seed)?;
    let h = density::bandwidth(&data, cfg.rule, density::DEFAULT_UNDERSMOOTH_SHIFT)?;
    let res = density::density_band(
        &data,
        &cfg.grid,
        kernel,
        h,
        &DensityBandConfig {
            alpha: 1.0 - cfg.levels[0],
            b: cfg.b,
            band: Mode::Raw,
            a_known_one: false,
            seed: boot_seed,
        },
    )?;
    let truth = oracle.f_bar(kernel, h, &cfg.grid)?;
    let mut out = Vec::with_capacity(cfg.levels.len() * cfg.modes.len());
    for &mode in &cfg.modes {
        for &level in &cfg.levels {
            let hw = res
                .half_width_for(mode, 1.0 - level)
                .ok_or(Error::DegenerateScale { coord: 0 })?;
            let hit = res
                .f_hat
                .iter()
                .zip(&hw)
                .zip(&truth)
                .all(|((f, w), t)| (f - t).abs() <= *w);
            out.push(hit);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    fn k2_spec(base: BaseDist, p: usize, n: usize) -> DesignSpec {
        DesignSpec {
            family: DesignFamily::SeparableK2,
            base,
            p,
            dims: vec![n, n],
        }
    }

    #[test]
    fn sigma_z_values() {
        assert_eq!(sigma_z(1), vec![1.0]);
        let s2 = sigma_z(2);
        assert_eq!(s2, vec![1.0, 0.25, 0.25, 1.0]);
        let s3 = sigma_z(3);
        assert_eq!(s3[2], 0.0625); // (1,3) entry, |r-c| = 2
        // symmetric positive definite: Cholesky succeeds
        assert!(cholesky(&sigma_z(30), 30).is_ok());
    }

    #[test]
    fn separable_k2_variance_and_mean() {
        // Var(X^j) = (1/16 + 1/16 + 1/4) Var(Z^j) = 0.375 for the Gaussian
        // base with unit-diagonal Sigma_Z
        let spec = k2_spec(BaseDist::Gaussian, 2, 40);
        let mut all = Vec::new();
        for rep in 0..30 {
            let a = gen_separable(&spec, 1000 + rep).unwrap();
            for cell in 0..a.num_cells() {
                all.push(a.values()[cell * 2]);
            }
        }
        let m = stats::mean(&all);
        let v = stats::sample_std(&all).powi(2);
        // cells within one replication are dependent; allow a loose window
        assert!(m.abs() < 0.05, "mean {m}");
        assert!((v - 0.375).abs() < 0.05, "var {v}");
    }

    #[test]
    fn mixture_base_inflates_variance() {
        // mixture: Var = 1.5 * 0.375 = 0.5625
        let spec = k2_spec(BaseDist::Mixture, 1, 40);
        let mut all = Vec::new();
        for rep in 0..30 {
            let a = gen_separable(&spec, 2000 + rep).unwrap();
            all.extend_from_slice(a.values());
        }
        let v = stats::sample_std(&all).powi(2);
        assert!((v - 0.5625).abs() < 0.08, "var {v}");
    }

    #[test]
    fn k3_weights_variance() {
        // Var(X^j) = 6/144 + 1/4 = 0.2917 for the Gaussian base
        let spec = DesignSpec {
            family: DesignFamily::SeparableK3,
            base: BaseDist::Gaussian,
            p: 1,
            dims: vec![12, 12, 12],
        };
        let mut all = Vec::new();
        for rep in 0..12 {
            let a = gen_separable(&spec, 500 + rep).unwrap();
            all.extend_from_slice(a.values());
        }
        let v = stats::sample_std(&all).powi(2);
        assert!((v - 6.0 / 144.0 - 0.25).abs() < 0.04, "var {v}");
    }

    #[test]
    fn dyadic_design_is_symmetric_mean_zero() {
        let spec = DesignSpec {
            family: DesignFamily::Dyadic,
            base: BaseDist::Mixture,
            p: 3,
            dims: vec![30],
        };
        let a = gen_dyadic(&spec, 7).unwrap();
        assert!(a.is_symmetric());
        for i in 0..5 {
            for j in (i + 1)..5 {
                assert_eq!(a.pair(i, j), a.pair(j, i));
            }
        }
        let mut all = Vec::new();
        for rep in 0..20 {
            let a = gen_dyadic(&spec, 100 + rep).unwrap();
            for (_, _, v) in a.iter_unordered() {
                all.push(v[0]);
            }
        }
        assert!(stats::mean(&all).abs() < 0.06);
    }

    #[test]
    fn density_design_moments() {
        let gauss = DesignSpec {
            family: DesignFamily::DyadicDensity,
            base: BaseDist::Gaussian,
            p: 1,
            dims: vec![60],
        };
        let logi = DesignSpec {
            family: DesignFamily::DyadicDensity,
            base: BaseDist::Logistic,
            p: 1,
            dims: vec![60],
        };
        let (mut vg, mut vl) = (Vec::new(), Vec::new());
        for rep in 0..12 {
            let a = gen_dyadic_density(&gauss, 300 + rep).unwrap();
            vg.extend(a.iter_unordered().map(|(_, _, v)| v[0]));
            let b = gen_dyadic_density(&logi, 400 + rep).unwrap();
            vl.extend(b.iter_unordered().map(|(_, _, v)| v[0]));
        }
        let var_g = stats::sample_std(&vg).powi(2);
        assert!((var_g - 0.375).abs() < 0.05, "gaussian var {var_g}");
        // logistic base has excess kurtosis; compare standardized 4th moments
        let kurt = |xs: &[f64]| {
            let m = stats::mean(xs);
            let s2 = stats::sample_std(xs).powi(2);
            xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / (xs.len() as f64 * s2 * s2)
        };
        assert!(kurt(&vl) > kurt(&vg) + 0.1, "{} vs {}", kurt(&vl), kurt(&vg));
    }

    #[test]
    fn label_swap_preserves_the_law() {
        // swapping two axis-1 labels yields an identically distributed
        // array: the same-cell summaries across replications must match in
        // mean and variance within MC error
        let spec = k2_spec(BaseDist::Gaussian, 1, 6);
        let reps = 4000;
        let (mut t_orig, mut t_swap) = (Vec::new(), Vec::new());
        for rep in 0..reps {
            let a = gen_separable(&spec, 10_000 + rep).unwrap();
            let b = a.permute_axis(0, &[1, 0, 2, 3, 4, 5]).unwrap();
            // functional: corner cell value
            t_orig.push(a.cell(&[0, 0])[0]);
            t_swap.push(b.cell(&[0, 0])[0]);
        }
        let (m1, m2) = (stats::mean(&t_orig), stats::mean(&t_swap));
        let (s1, s2) = (stats::sample_std(&t_orig), stats::sample_std(&t_swap));
        let se = (s1 * s1 / reps as f64 + s2 * s2 / reps as f64).sqrt();
        assert!((m1 - m2).abs() <= 4.0 * se, "means {m1} vs {m2}");
        assert!((s1 - s2).abs() / s1 <= 0.1, "sds {s1} vs {s2}");
    }

    #[test]
    fn single_rep_coverage_is_zero_or_one() {
        let spec = k2_spec(BaseDist::Gaussian, 3, 8);
        let cfg = ExperimentConfig {
            reps: 1,
            b: 100,
            levels: vec![0.9],
            modes: vec![Mode::Raw],
            ..Default::default()
        };
        let rep = coverage_experiment(&spec, &cfg).unwrap();
        assert_eq!(rep.cells.len(), 1);
        let c = rep.cells[0].coverage;
        assert!(c == 0.0 || c == 1.0);
    }

    #[test]
    fn experiment_is_seed_deterministic_across_pools() {
        let spec = k2_spec(BaseDist::Mixture, 4, 8);
        let cfg = ExperimentConfig {
            reps: 20,
            b: 120,
            seed: 31,
            ..Default::default()
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let r1 = pool1.install(|| coverage_experiment(&spec, &cfg)).unwrap();
        let r4 = pool4.install(|| coverage_experiment(&spec, &cfg)).unwrap();
        for (a, b) in r1.cells.iter().zip(&r4.cells) {
            assert_eq!(a.coverage, b.coverage);
        }
    }
}
