//! High-accuracy quadrature oracle for the surrogate density
//! fbar_h(y) = int K_h(y - z) f(z) dz of the simulated dyadic designs.
//!
//! The simulated pair value is Y = (U_i + U_j)/4 + U_{ij}/2 with standard
//! normal or standard logistic latents, so its characteristic function is
//! the product of the summands': for the Gaussian base Y ~ N(0, 3/8) in
//! closed form, and for the logistic base
//!
//!   phi(t) = [pi t/4 / sinh(pi t/4)]^2 * [pi t/2 / sinh(pi t/2)],
//!
//! which decays like e^{-pi t}. Convolving with the kernel multiplies the
//! characteristic function by the kernel's Fourier transform, so
//!
//!   fbar_h(y) = (1/pi) int_0^inf phi(t) phiK(h t) cos(t y) dt,
//!
//! a smooth, exponentially decaying integrand that composite Simpson
//! handles to ~1e-10. The density itself is the h = 0 case.

use crate::density::Kernel;
use crate::error::{Error, Result};

/// Base law of the latents in the dyadic density design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthDensity {
    /// standard normal latents: Y ~ N(0, 3/8)
    GaussianSum,
    /// standard logistic latents
    LogisticSum,
}

/// x / sinh(x) with the removable singularity at 0 filled in.
fn x_over_sinh(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // 1 - x^2/6 + 7x^4/360
        let x2 = x * x;
        1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    } else {
        x / x.sinh()
    }
}

fn char_fn(truth: TruthDensity, t: f64) -> f64 {
    match truth {
        TruthDensity::GaussianSum => (-0.5 * 0.375 * t * t).exp(),
        TruthDensity::LogisticSum => {
            let q = x_over_sinh(std::f64::consts::PI * t / 4.0);
            q * q * x_over_sinh(std::f64::consts::PI * t / 2.0)
        }
    }
}

/// Fourier transform of the kernel, int K(u) e^{itu} du.
fn kernel_ft(kernel: &Kernel, t: f64) -> Result<f64> {
    match kernel {
        Kernel::Epanechnikov => {
            // 3 (sin t - t cos t) / t^3
            if t.abs() < 1e-2 {
                let t2 = t * t;
                Ok(1.0 - t2 / 10.0 + t2 * t2 / 280.0)
            } else {
                Ok(3.0 * (t.sin() - t * t.cos()) / (t * t * t))
            }
        }
        Kernel::Gaussian => Ok((-0.5 * t * t).exp()),
        Kernel::Table { .. } => Err(Error::InvalidKernel(
            "the quadrature oracle supports only the analytic kernels".into(),
        )),
    }
}

/// Precomputed characteristic-function table on a Simpson grid.
pub struct SurrogateOracle {
    truth: TruthDensity,
    step: f64,
    /// phi(t_i) * simpson weight, t_i = i * step
    weighted_cf: Vec<f64>,
}

impl SurrogateOracle {
    pub fn new(truth: TruthDensity) -> Self {
        // phi decays at least like e^{-pi t} (logistic) or e^{-3t^2/16}
        // (Gaussian); both are < 1e-45 past t = 36
        let t_max = 36.0;
        let m = 14_400usize; // even; step 0.0025
        let step = t_max / m as f64;
        let weighted_cf = (0..=m)
            .map(|i| {
                let t = i as f64 * step;
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * step / 3.0 * char_fn(truth, t)
            })
            .collect();
        Self {
            truth,
            step,
            weighted_cf,
        }
    }

    pub fn truth(&self) -> TruthDensity {
        self.truth
    }

    /// Surrogate density fbar_h at each design point; h = 0 gives the
    /// density f itself.
    pub fn f_bar(&self, kernel: &Kernel, h: f64, ys: &[f64]) -> Result<Vec<f64>> {
        let m = self.weighted_cf.len();
        let mut g = Vec::with_capacity(m);
        for i in 0..m {
            let t = i as f64 * self.step;
            let ft = if h == 0.0 { 1.0 } else { kernel_ft(kernel, h * t)? };
            g.push(self.weighted_cf[i] * ft);
        }
        let inv_pi = 1.0 / std::f64::consts::PI;
        Ok(ys
            .iter()
            .map(|&y| {
                // cos(t_i y) by the three-term recurrence on the uniform grid
                let delta = self.step * y;
                let c2 = 2.0 * delta.cos();
                let (mut prev, mut curr) = (1.0f64, delta.cos());
                let mut acc = g[0] * prev + g[1] * curr;
                for gi in &g[2..] {
                    let next = c2 * curr - prev;
                    acc += gi * next;
                    prev = curr;
                    curr = next;
                }
                inv_pi * acc
            })
            .collect())
    }
}
