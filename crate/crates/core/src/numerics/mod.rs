//! Quadrature, conjugation and root finding shared by the other modules.

mod fit;
mod hilbert;
mod quadrature;
mod roots;

pub use fit::{linear_fit, power_fit, LinearFit, PowerFit};
pub use hilbert::{hilbert_transform, HilbertOptions};
pub use quadrature::{
    adaptive, gk15, half_line, integrate_line, panels, tail_fit, Adaptive, LineOptions, QuadValue, QuadratureResult,
    TailKind, Tol, R2_GATE, TAIL_MARGIN,
};
pub use roots::monotone_roots;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `∫ f dx/(1+x²)`. The reported tail exponent is that of `f` itself.
///
/// Divergent integrals come back uncertified with the partial value; an
/// unusable tail fit is an error.
pub fn poisson_integral<F: Fn(f64) -> f64 + ?Sized>(f: &F) -> Result<QuadratureResult<f64>> {
    let g = |x: f64| f(x) / (1.0 + x * x);
    let opts = LineOptions::default();
    let fit = tail_fit(&g, opts.fit_start);
    if !fit.vanishing && fit.r2 < R2_GATE {
        return Err(Error::TailModelUnfit { r2: fit.r2 });
    }
    let mut r = integrate_line(&g, &opts);
    r.tail_exponent += 2.0;
    Ok(r)
}

/// Poisson integral of sampled data: trapezoid on the grid plus power-law
/// tails fitted on the outermost decade of each side.
pub fn poisson_integral_grid(f: &GridFunction) -> Result<QuadratureResult<f64>> {
    let w = GridFunction {
        xs: f.xs.clone(),
        ys: f.xs.iter().zip(&f.ys).map(|(&x, &y)| y / (1.0 + x * x)).collect(),
        tag: None,
    };
    let mut r = integrate_grid(&w)?;
    r.tail_exponent += 2.0;
    Ok(r)
}

/// `∫ g dx` for sampled `g`: trapezoid rule on the grid plus power-law tails
/// fitted over the outermost decade of each side.
pub fn integrate_grid(g: &GridFunction) -> Result<QuadratureResult<f64>> {
    let n = g.len();
    if n < 8 {
        return Err(Error::InvalidInput("grid too short for a tail model".into()));
    }
    let mut value = 0.0;
    for i in 1..n {
        value += 0.5 * (g.ys[i] + g.ys[i - 1]) * (g.xs[i] - g.xs[i - 1]);
    }
    let mut exponent = f64::NEG_INFINITY;
    let mut r2 = 1.0f64;
    let mut finite = true;
    for side in [1.0, -1.0] {
        let edge = if side > 0.0 { g.xs[n - 1] } else { -g.xs[0] };
        if edge <= 0.0 {
            continue;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) =
            g.xs.iter().zip(&g.ys).filter(|(&x, _)| x * side >= edge / 10.0).map(|(&x, &y)| (x.abs(), y)).unzip();
        if xs.len() < 4 {
            return Err(Error::TailModelUnfit { r2: 0.0 });
        }
        let pf = power_fit(&xs, &ys);
        if pf.vanishing {
            continue;
        }
        r2 = r2.min(pf.r2);
        exponent = exponent.max(pf.exponent);
        if !(pf.exponent < -1.0 - TAIL_MARGIN) {
            finite = false;
            continue;
        }
        // ∫_X^∞ A x^p dx with A fixed by the outermost sample.
        let y_edge = if side > 0.0 { g.ys[n - 1] } else { g.ys[0] };
        value += y_edge * edge / (-1.0 - pf.exponent);
    }
    if r2 < R2_GATE {
        return Err(Error::TailModelUnfit { r2 });
    }
    Ok(QuadratureResult {
        value,
        error: if finite { 0.0 } else { f64::INFINITY },
        tail_exponent: exponent,
        certified: finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn poisson_examples() {
        let r = poisson_integral(&|_| 1.0).unwrap();
        assert!(r.certified && (r.value - PI).abs() < 1e-9 && r.tail_exponent.abs() < 0.01);
        let r = poisson_integral(&|x| x * x).unwrap();
        assert!(!r.certified && (r.tail_exponent - 2.0).abs() < 0.01);
        let r = poisson_integral(&|x| 1.0 / (1.0 + x * x)).unwrap();
        assert!(r.certified && (r.value - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn poisson_grid_matches_closed_form() {
        let xs = crate::grid::two_sided_grid(5.0, 1e5, 2001, 4000);
        let g = GridFunction::sample(&xs, crate::par::Exec::Sequential, |_| 1.0);
        let r = poisson_integral_grid(&g).unwrap();
        assert!(r.certified && (r.value - PI).abs() < 1e-4, "{}", r.value);
    }

    #[test]
    fn oscillatory_sinc_square() {
        let sinc2 = |x: f64| {
            if x == 0.0 {
                1.0
            } else {
                let s = (PI * x).sin() / (PI * x);
                s * s
            }
        };
        let opts = LineOptions { tail: TailKind::Oscillatory, core: 8.0, ..Default::default() };
        let r = integrate_line(&sinc2, &opts);
        assert!(r.certified);
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn hilbert_examples() {
        let opts = HilbertOptions::default();
        let f = |t: f64| 1.0 / (1.0 + t * t);
        for x in [-3.0, -0.4, 0.0, 0.7, 5.0] {
            let h = hilbert_transform(&f, x, &opts).unwrap();
            assert!((h - x / (1.0 + x * x)).abs() < 1e-8, "x={x}: {h}");
        }
        assert_eq!(hilbert_transform(&|_| 0.0, 1.3, &opts).unwrap(), 0.0);
    }

    #[test]
    fn roots() {
        assert!((monotone_roots(&|x| x, &[3.0], (0.0, 10.0)).unwrap()[0] - 3.0).abs() < 1e-12);
        let t: Vec<f64> = (-3..=3).map(|k| 2.0 * PI * k as f64).collect();
        let r = monotone_roots(&|x| 2.0 * PI * x, &t, (-3.5, 3.5)).unwrap();
        for (x, k) in r.iter().zip(-3..=3) {
            assert!((x - k as f64).abs() < 1e-12);
        }
        assert!(matches!(monotone_roots(&|x: f64| x.sin(), &[0.0], (0.0, 6.0)), Err(Error::NotMonotone { .. })));
    }
}
