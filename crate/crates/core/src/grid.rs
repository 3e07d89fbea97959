use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// A real function sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Closed-form description when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidInput(format!("grid has {} abscissae but {} values", xs.len(), ys.len())));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("grid must be strictly increasing".into()));
        }
        Ok(Self { xs, ys, tag: None })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    /// Sample `f` on `xs`.
    pub fn sample<F>(xs: &[f64], exec: Exec, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let ys = par::map(exec, xs, |&x| f(x));
        Self { xs: xs.to_vec(), ys, tag: None }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.xs != other.xs {
            return Err(Error::InvalidInput("grids differ".into()));
        }
        let ys = self.ys.iter().zip(&other.ys).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { xs: self.xs.clone(), ys, tag: None })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { xs: self.xs.clone(), ys: self.ys.iter().map(|&y| f(y)).collect(), tag: None }
    }

    /// Piecewise-linear interpolation, clamped at the ends.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 {
            return f64::NAN;
        }
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let j = self.xs.partition_point(|&t| t <= x);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let t = (x - x0) / (x1 - x0);
        self.ys[j - 1] * (1.0 - t) + self.ys[j] * t
    }

    pub fn max_abs(&self) -> f64 {
        self.ys.iter().fold(0.0f64, |m, y| m.max(y.abs()))
    }
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` logarithmically spaced points on `[a, b]`, `0 < a < b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    linspace(la, lb, n).into_iter().map(f64::exp).collect()
}

/// Symmetric grid: a uniform core on `[-core, core]` plus logarithmic wings out to `xmax`.
pub fn two_sided_grid(core: f64, xmax: f64, n_core: usize, n_wing: usize) -> Vec<f64> {
    let mut xs = linspace(-core, core, n_core);
    if xmax > core * 1.0001 && n_wing > 0 {
        let wing: Vec<f64> = logspace(core, xmax, n_wing + 1).into_iter().skip(1).collect();
        let mut left: Vec<f64> = wing.iter().rev().map(|x| -x).collect();
        left.extend(xs);
        left.extend(wing);
        xs = left;
    }
    xs
}
