//! Principal-value conjugate function on the line.

use std::f64::consts::PI;

use super::quadrature::{adaptive, half_line, Tol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct HilbertOptions {
    /// Excision half-width around the singular point.
    pub radius: f64,
    /// Largest allowed disagreement between the two excision radii.
    pub tol: f64,
    pub quad: Tol,
}

impl Default for HilbertOptions {
    fn default() -> Self {
        Self { radius: 0.5, tol: 1e-6, quad: Tol { abs: 1e-10, rel: 1e-10, max_panels: 3000 } }
    }
}

/// Conjugation kernel `1/(x-t) + t/(1+t²)` written without cancellation.
#[inline]
fn kernel(x: f64, t: f64) -> f64 {
    (1.0 + x * t) / ((x - t) * (1.0 + t * t))
}

fn with_radius<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, delta: f64, opts: &HilbertOptions) -> f64 {
    let fold = |s: f64| {
        let (a, b) = (x - s, x + s);
        let (fa, fb) = (f(a), f(b));
        (fa - fb) / s + fa * a / (1.0 + a * a) + fb * b / (1.0 + b * b)
    };
    let near = adaptive(&fold, 0.0, delta, 4, opts.quad).value;
    let g = |t: f64| f(t) * kernel(x, t);
    let scale = 1.0 + 0.5 * x.abs();
    let right = half_line(&g, x + delta, scale, true, opts.quad).value;
    let left = half_line(&g, x - delta, scale, false, opts.quad).value;
    (near + right + left) / PI
}

/// `(1/π) PV ∫ f(t) [1/(x-t) + t/(1+t²)] dt`.
///
/// This is the conjugate normalised so that the harmonic extension vanishes at `i`:
/// `1/(1+t²)` maps to `x/(1+x²)`. The value is computed with two excision
/// radii; disagreement beyond `opts.tol` is reported.
pub fn hilbert_transform<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, opts: &HilbertOptions) -> Result<f64> {
    let a = with_radius(f, x, opts.radius, opts);
    let b = with_radius(f, x, 0.5 * opts.radius, opts);
    let spread = (a - b).abs();
    if spread > opts.tol * (1.0 + a.abs()) {
        return Err(Error::PvNotSettled { spread });
    }
    Ok(0.5 * (a + b))
}
