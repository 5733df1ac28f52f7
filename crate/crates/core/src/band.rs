//! Shared band types used by the separable and joint engines.

use serde::{Deserialize, Serialize};

/// Sup-norm statistic flavor: `Raw` takes the sup of the bootstrap draws as
/// is (constant-width band); `Studentized` divides each coordinate by its
/// estimated standard deviation first (variable-width band).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Raw,
    Studentized,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Raw => "raw",
            Mode::Studentized => "studentized",
        }
    }
}

/// A simultaneous confidence rectangle: per-coordinate centers and
/// half-widths at a nominal level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandResult {
    pub estimate: Vec<f64>,
    pub half_width: Vec<f64>,
    /// per-coordinate standard deviation estimate (as used for
    /// studentization), reported for both band styles
    pub scale: Vec<f64>,
    pub alpha: f64,
    pub cv: f64,
}

impl BandResult {
    /// Does the band contain `truth` in every coordinate?
    pub fn covers(&self, truth: &[f64]) -> bool {
        debug_assert_eq!(truth.len(), self.estimate.len());
        self.estimate
            .iter()
            .zip(&self.half_width)
            .zip(truth)
            .all(|((est, hw), t)| (est - t).abs() <= *hw)
    }

    /// Coordinatewise containment of another band (same centers assumed).
    pub fn contains_band(&self, inner: &BandResult) -> bool {
        self.half_width
            .iter()
            .zip(&inner.half_width)
            .all(|(outer, inner)| outer >= inner)
    }
}
