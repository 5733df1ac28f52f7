//! Result schemas emitted by the engines: JSON reports that embed the
//! configuration and seed (so a run is reproducible from its report) and
//! per-coordinate CSV tables. CSV floats use 17 significant digits and
//! round-trip exactly; JSON floats use the shortest exact representation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::band::{BandResult, Mode};
use crate::density::DensityBandResult;
use crate::error::Result;
use crate::io::fmt_f64;
use crate::joint::JointBootstrapResult;
use crate::lasso::{LassoFit, PenaltyChoice};
use crate::separable::SepBootstrapResult;
use crate::simgen::CoverageReport;

/// Band report shared by the separable and joint engines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanBandReport {
    pub engine: String,
    pub seed: u64,
    pub b: usize,
    pub alpha: f64,
    pub mode: Mode,
    pub use_bessel: bool,
    pub dims: Vec<usize>,
    pub p: usize,
    pub estimate: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub sigma_tilde: Vec<f64>,
    pub cv: f64,
    pub half_width: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_draws: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<Vec<Vec<f64>>>,
}

impl MeanBandReport {
    pub fn from_separable(
        res: &SepBootstrapResult,
        band: &BandResult,
        include_draws: bool,
    ) -> Self {
        Self {
            engine: "separable".into(),
            seed: res.seed,
            b: res.b,
            alpha: band.alpha,
            mode: res.mode,
            use_bessel: res.use_bessel,
            dims: res.dims.clone(),
            p: res.p,
            estimate: res.mean.clone(),
            sigma_hat: res.sigma_hat.clone(),
            sigma_tilde: res.sigma_tilde.clone(),
            cv: band.cv,
            half_width: band.half_width.clone(),
            sup_draws: include_draws.then(|| res.sup_draws.clone()),
            draws: if include_draws { res.draws.clone() } else { None },
        }
    }

    pub fn from_joint(res: &JointBootstrapResult, band: &BandResult, include_draws: bool) -> Self {
        Self {
            engine: "joint".into(),
            seed: res.seed,
            b: res.b,
            alpha: band.alpha,
            mode: res.mode,
            use_bessel: res.use_bessel,
            dims: vec![res.n],
            p: res.p,
            estimate: res.mean.clone(),
            sigma_hat: res.sigma_hat.clone(),
            sigma_tilde: res.sigma_tilde.clone(),
            cv: band.cv,
            half_width: band.half_width.clone(),
            sup_draws: include_draws.then(|| res.sup_draws.clone()),
            draws: if include_draws { res.draws.clone() } else { None },
        }
    }

    /// Per-coordinate table: j, estimate, sigma_tilde, half_width.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,estimate,sigma_tilde,half_width\n");
        for j in 0..self.p {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                j + 1,
                fmt_f64(self.estimate[j]),
                fmt_f64(self.sigma_tilde[j].sqrt()),
                fmt_f64(self.half_width[j]),
            );
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityBandReport {
    pub engine: String,
    pub seed: u64,
    pub b: usize,
    pub alpha: f64,
    pub band: Mode,
    pub a_known_one: bool,
    pub n: usize,
    pub h: f64,
    pub kernel: String,
    /// empirical nonzero share and the share of the zero mass
    pub a_hat: f64,
    pub zero_share: f64,
    pub cv_raw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv_stud: Option<f64>,
    pub grid: Vec<f64>,
    pub b_hat: Vec<f64>,
    pub f_hat: Vec<f64>,
    pub sigma_tilde: Vec<f64>,
    pub half_width: Vec<f64>,
}

impl DensityBandReport {
    pub fn new(res: &DensityBandResult, kernel_name: &str) -> Self {
        Self {
            engine: "density".into(),
            seed: res.seed,
            b: res.b,
            alpha: res.alpha,
            band: res.band,
            a_known_one: res.a_known_one,
            n: res.n,
            h: res.h,
            kernel: kernel_name.into(),
            a_hat: res.a_emp,
            zero_share: 1.0 - res.a_emp,
            cv_raw: res.cv_raw,
            cv_stud: res.cv_stud,
            grid: res.grid.clone(),
            b_hat: res.b_hat.clone(),
            f_hat: res.f_hat.clone(),
            sigma_tilde: res.sigma_tilde.clone(),
            half_width: res.half_width.clone(),
        }
    }

    /// Per design point: y, f_hat, lower, upper, sigma_tilde.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,f_hat,lower,upper,sigma_tilde\n");
        for l in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(self.grid[l]),
                fmt_f64(self.f_hat[l]),
                fmt_f64(self.f_hat[l] - self.half_width[l]),
                fmt_f64(self.f_hat[l] + self.half_width[l]),
                fmt_f64(self.sigma_tilde[l]),
            );
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LassoReport {
    pub engine: String,
    pub seed: u64,
    pub b: usize,
    pub eta: f64,
    pub c: f64,
    pub dims: Vec<usize>,
    pub p: usize,
    pub lambda0: f64,
    pub lambda: f64,
    /// sparse encoding: (coordinate, value) for the active set
    pub beta: Vec<(usize, f64)>,
    pub active_set: Vec<usize>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_violation: f64,
}

impl LassoReport {
    pub fn new(
        fit: &LassoFit,
        choice: &PenaltyChoice,
        dims: &[usize],
        b: usize,
        seed: u64,
    ) -> Self {
        Self {
            engine: "lasso".into(),
            seed,
            b,
            eta: choice.eta,
            c: choice.c,
            dims: dims.to_vec(),
            p: fit.beta.len(),
            lambda0: choice.lambda0,
            lambda: choice.lambda,
            beta: fit
                .active_set
                .iter()
                .map(|&j| (j + 1, fit.beta[j]))
                .collect(),
            active_set: fit.active_set.iter().map(|&j| j + 1).collect(),
            objective: fit.objective,
            iterations: fit.iterations,
            converged: fit.converged,
            kkt_violation: fit.kkt_violation,
        }
    }

    /// Full coefficient table: j, beta.
    pub fn to_csv(&self, full_beta: &[f64]) -> String {
        let mut out = String::from("j,beta\n");
        for (j, b) in full_beta.iter().enumerate() {
            let _ = writeln!(out, "{},{}", j + 1, fmt_f64(*b));
        }
        out
    }
}

/// One CSV row per (level, mode) cell of a coverage experiment.
pub fn coverage_csv(report: &CoverageReport) -> String {
    let mut out = String::from("design,base,p,dims,level,mode,coverage,reps,B\n");
    let dims = report
        .dims
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("x");
    for cell in &report.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            report.design,
            report.base,
            report.p,
            dims,
            fmt_f64(cell.level),
            cell.mode.as_str(),
            fmt_f64(cell.coverage),
            report.reps,
            report.b,
        );
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value).expect("report types serialize"))
}
