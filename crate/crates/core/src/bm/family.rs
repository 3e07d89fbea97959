use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Disjoint sorted intervals with the weight exponent `κ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalFamily {
    pub intervals: Vec<(f64, f64)>,
    pub kappa: f64,
    /// Half-width of the observation window; partial sums are taken over
    /// `[-extent/2^k, extent/2^k]`.
    pub extent: f64,
    /// Clip intervals to each window instead of counting only those inside it.
    /// Used when the family was observed through the window.
    #[serde(default)]
    pub clipped: bool,
}

impl IntervalFamily {
    /// The window defaults to the largest endpoint modulus.
    pub fn new(mut intervals: Vec<(f64, f64)>, kappa: f64) -> Result<Self> {
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let extent = intervals.iter().fold(0.0f64, |m, &(l, r)| m.max(l.abs()).max(r.abs()));
        let fam = Self { intervals, kappa, extent, clipped: false };
        fam.validate()?;
        Ok(fam)
    }

    pub fn with_extent(mut self, extent: f64) -> Self {
        self.extent = extent;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) {
            return Err(Error::InvalidInput(format!("kappa must be ≥ 0, got {}", self.kappa)));
        }
        if self.intervals.iter().any(|&(l, r)| !(r > l)) {
            return Err(Error::InvalidInput("intervals need r > l".into()));
        }
        if self.intervals.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidInput("intervals overlap".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// `(dist(I,0)+1)^{κ-2} |I|²`.
pub fn interval_weight(l: f64, r: f64, kappa: f64) -> f64 {
    let dist = if l <= 0.0 && r >= 0.0 { 0.0 } else { l.abs().min(r.abs()) };
    (dist + 1.0).powf(kappa - 2.0) * (r - l) * (r - l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Short,
    Long,
    WindowLimited,
}

/// Number of window halvings used to watch partial sums grow. Windows never
/// shrink below half-width 1, the scale of the weights.
pub const DOUBLINGS: usize = 6;
/// Increment per doubling separating growth from convergence.
pub const INCREMENT_GATE: f64 = 0.1;

/// Classify from partial sums over doubling windows, smallest window first.
pub fn classify(sums: &[f64]) -> Classification {
    let inc: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
    let n = inc.len();
    if n == 0 {
        return Classification::Short;
    }
    let last = inc[n - 1];
    if n >= 3 {
        let tail = &inc[n - 3..];
        if tail.iter().all(|&d| d >= INCREMENT_GATE) && last >= 0.5 * tail[0] {
            return Classification::Long;
        }
    }
    let decaying = n < 2 || last <= 1e-12 || last <= 0.9 * inc[n - 2];
    let negligible = sums[sums.len() - 1] <= INCREMENT_GATE;
    if last <= INCREMENT_GATE && (decaying || negligible) {
        Classification::Short
    } else {
        Classification::WindowLimited
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSum {
    pub sum: f64,
    pub classification: Classification,
    /// Partial sums over the doubling windows, smallest first.
    pub partial_sums: Vec<f64>,
}

/// `Σ (dist(I_n,0)+1)^{κ-2} |I_n|²` with partial sums over doubling windows.
pub fn family_weight_sum(fam: &IntervalFamily) -> WeightSum {
    let partial = |w: f64| -> f64 {
        fam.intervals
            .iter()
            .filter_map(|&(l, r)| {
                if fam.clipped {
                    let (l, r) = (l.max(-w), r.min(w));
                    (r > l).then(|| interval_weight(l, r, fam.kappa))
                } else {
                    (l >= -w && r <= w).then(|| interval_weight(l, r, fam.kappa))
                }
            })
            .sum()
    };
    let partial_sums: Vec<f64> =
        (0..=DOUBLINGS).rev().map(|k| partial((fam.extent / 2f64.powi(k as i32)).max(1.0))).collect();
    WeightSum { sum: *partial_sums.last().unwrap_or(&0.0), classification: classify(&partial_sums), partial_sums }
}

/// `γ` on a window with its smallest non-increasing majorant and the
/// components of `{γ ≠ γ*}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaProfile {
    pub gamma: GridFunction,
    pub majorant: Vec<f64>,
    pub components: IntervalFamily,
}

/// Fraction of the window a component must cover before a rise at the right
/// edge is read as genuine growth rather than a truncation artefact.
const SUSTAINED_RISE: f64 = 0.25;

/// `γ*(x) = max_{t ≥ x} γ(t)` on the window and the maximal runs where `γ < γ*`.
pub fn gamma_decompose(gamma: &GridFunction, kappa: f64) -> Result<GammaProfile> {
    let n = gamma.len();
    if n < 3 {
        return Err(Error::InvalidInput("gamma needs at least three samples".into()));
    }
    let (xs, ys) = (&gamma.xs, &gamma.ys);
    let mut majorant = vec![0.0; n];
    let mut m = f64::NEG_INFINITY;
    for k in (0..n).rev() {
        m = m.max(ys[k]);
        majorant[k] = m;
    }
    let scale = ys.iter().fold(1.0f64, |a, y| a.max(y.abs()));
    let tol = 1e-10 * scale;
    let mut intervals = Vec::new();
    let mut touching = false;
    let mut k = 0;
    while k < n {
        if ys[k] < majorant[k] - tol {
            let s = k;
            while k < n && ys[k] < majorant[k] - tol {
                k += 1;
            }
            let l = xs[s.saturating_sub(1)];
            let r = xs[k.min(n - 1)];
            touching |= k >= n - 1;
            if r > l {
                intervals.push((l, r));
            }
        } else {
            k += 1;
        }
    }
    // γ still rising at the right edge may extend the last component beyond
    // the window; that only matters if no component is already macroscopic.
    let width = xs[n - 1] - xs[0];
    let longest = intervals.iter().fold(0.0f64, |m, &(l, r)| m.max(r - l));
    if touching && longest < SUSTAINED_RISE * width {
        return Err(Error::BoundaryUncertain(format!(
            "gamma is rising at the right edge and the longest component has length {longest:.3}"
        )));
    }
    let extent = xs[0].abs().max(xs[n - 1].abs());
    let components = IntervalFamily { intervals, kappa, extent, clipped: true };
    Ok(GammaProfile { gamma: gamma.clone(), majorant, components })
}

/// Whether `γ` is `κ`-almost decreasing on its window.
pub fn kappa_almost_decreasing(gamma: &GridFunction, kappa: f64) -> Result<(WeightSum, GammaProfile)> {
    let profile = gamma_decompose(gamma, kappa)?;
    Ok((family_weight_sum(&profile.components), profile))
}
