//! Beurling–Malliavin machinery: interval families, exterior density, the
//! almost-decreasing test and the dominance diagnostics built on them.

mod density;
mod family;

pub use density::*;
pub use family::*;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clark::{herglotz, AtomicMeasure};
use crate::error::{Error, Result};
use crate::grid::{linspace, GridFunction};
use crate::inner::MifDescriptor;
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceVerdict {
    InD,
    NotInD,
    /// `r` within `tol` of `b`, or the two sufficient tests leave a gap.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpDominance {
    pub verdict: DominanceVerdict,
    /// `r(I) = D*(Λ) + a` in type units.
    pub r: f64,
    pub dstar_type: f64,
    pub b: f64,
    pub tol: f64,
    /// `D*` is known exactly (no zeros, or finitely many).
    pub exact: bool,
}

/// Is `I ∈ D(S^b)`? Decided by comparing `r(I)` with `b`.
pub fn exp_dominance_test(i: &MifDescriptor, b: f64, tol: f64, opts: &DensityOptions) -> Result<ExpDominance> {
    let (dstar, exact) = match &i.generator {
        None => (0.0, true),
        Some(g) => {
            let mut s = generator_sample(&g.rule, opts.budget)?;
            s.points.extend(project(&i.zeros).into_iter().filter(|x| x.abs() <= s.extent));
            s.points.sort_by(f64::total_cmp);
            (bm_density(&s, opts)?.dstar_type, false)
        }
    };
    let r = dstar + i.exp_mass;
    let verdict = if r < b - tol {
        DominanceVerdict::InD
    } else if r > b + tol {
        DominanceVerdict::NotInD
    } else {
        DominanceVerdict::Inconclusive
    };
    Ok(ExpDominance { verdict, r, dstar_type: dstar, b, tol, exact })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem10Report {
    pub verdict: DominanceVerdict,
    /// Test I: `σ - (1-ε)γ`.
    pub lower: WeightSum,
    /// Test II: `σ - (1+ε)γ`.
    pub upper: WeightSum,
    pub epsilon: f64,
    pub kappa: f64,
}

/// Largest admissible spread of `γ'/(1+|x|)^κ` on the grid.
pub const COMPARABILITY: f64 = 1e3;

fn two_tests(sigma: &[f64], gamma: &[f64], xs: &[f64], eps: f64, kappa: f64) -> Result<(WeightSum, WeightSum)> {
    let build = |c: f64| GridFunction {
        xs: xs.to_vec(),
        ys: sigma.iter().zip(gamma).map(|(s, g)| s - c * g).collect(),
        tag: None,
    };
    let (low, _) = kappa_almost_decreasing(&build(1.0 - eps), kappa)?;
    let (up, _) = kappa_almost_decreasing(&build(1.0 + eps), kappa)?;
    Ok((low, up))
}

fn verdict_of(low: &WeightSum, up: &WeightSum) -> DominanceVerdict {
    if low.classification == Classification::Short {
        DominanceVerdict::InD
    } else if up.classification == Classification::Long {
        DominanceVerdict::NotInD
    } else {
        DominanceVerdict::Inconclusive
    }
}

/// The two sufficient tests for `J ∈ D(U)` when `|U'| ≍ x^κ`.
pub fn theorem10_diagnostic(
    u: &MifDescriptor,
    j: &MifDescriptor,
    eps: f64,
    kappa: f64,
    xmax: f64,
    exec: Exec,
) -> Result<Theorem10Report> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!("epsilon must lie in (0,1), got {eps}")));
    }
    let xs = linspace(-xmax, xmax, 20001);
    let (pu, pj) = (u.prepare(), j.prepare());
    let ratio = par::map(exec, &xs, |&x| pu.darg(x) / (1.0 + x.abs()).powf(kappa));
    let (lo, hi) = ratio.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if !(lo > 0.0) || hi / lo > COMPARABILITY {
        return Err(Error::NotApplicable(format!("|U'|/(1+|x|)^κ ranges over [{lo:.3e}, {hi:.3e}]")));
    }
    let gamma = par::map(exec, &xs, |&x| pu.arg(x));
    let sigma = par::map(exec, &xs, |&x| pj.arg(x));
    let (lower, upper) = two_tests(&sigma, &gamma, &xs, eps, kappa)?;
    Ok(Theorem10Report { verdict: verdict_of(&lower, &upper), lower, upper, epsilon: eps, kappa })
}

/// Continuous argument of `θ_μ` on the real line.
///
/// With `m = iq` on `ℝ`, `θ = (m-1)/(m+1)` has argument `π - 2 atan q`, which
/// drops by `2π` at each atom; the counting term restores continuity.
pub fn measure_argument(mu: &AtomicMeasure, xs: &[f64], exec: Exec) -> Result<Vec<f64>> {
    herglotz(mu, Complex64::i())?;
    let atoms = mu.xs();
    let vals = par::map(exec, xs, |&x| -> Result<f64> {
        if atoms.binary_search_by(|a| a.total_cmp(&x)).is_ok() {
            return Err(Error::OnSupport(x));
        }
        let q = herglotz(mu, Complex64::new(x, 0.0))?.im;
        let below = atoms.partition_point(|&a| a < x);
        Ok(PI - 2.0 * q.atan() + 2.0 * PI * below as f64)
    });
    vals.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEstimate {
    pub estimate: f64,
    /// Largest `a` found with `S^a ∈ D(θ_μ)` by the sufficient test.
    pub a_low: f64,
    /// Smallest `a` found with `S^a ∉ D(θ_μ)`.
    pub a_high: f64,
    pub epsilon: f64,
    pub window: f64,
}

/// Estimate of the type `sup{a : S^a ∈ D(θ_μ)}` by bisection on both
/// sufficient tests over `[-window, window]`.
pub fn type_estimate(mu: &AtomicMeasure, window: f64, tol: f64, eps: f64, exec: Exec) -> Result<TypeEstimate> {
    let n = ((2.0 * window / 0.02) as usize).clamp(2001, 40001) | 1;
    let mut xs = linspace(-window, window, n);
    let atoms = mu.xs();
    for x in xs.iter_mut() {
        if atoms.binary_search_by(|a| a.total_cmp(x)).is_ok() {
            *x += 1e-9 * (1.0 + x.abs());
        }
    }
    let phi = measure_argument(mu, &xs, exec)?;
    let slope = (phi[n - 1] - phi[0]) / (xs[n - 1] - xs[0]);
    let test = |a: f64| -> (Classification, Classification) {
        let sigma: Vec<f64> = xs.iter().map(|x| a * x).collect();
        match two_tests(&sigma, &phi, &xs, eps, 0.0) {
            Ok((l, u)) => (l.classification, u.classification),
            Err(_) => (Classification::WindowLimited, Classification::WindowLimited),
        }
    };
    let top = 2.0 * slope.max(1.0) + 1.0;
    let bisect = |pred: &dyn Fn(f64) -> bool| {
        // `pred` holds below the crossover.
        let (mut lo, mut hi) = (0.0, top);
        while hi - lo > tol {
            let m = 0.5 * (lo + hi);
            if pred(m) {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    };
    let a_low = bisect(&|a| test(a).0 == Classification::Short);
    let a_high = bisect(&|a| test(a).1 != Classification::Long);
    if a_low > a_high + tol {
        return Err(Error::Inconclusive(format!("in-D up to {a_low:.4} but not-in-D from {a_high:.4}")));
    }
    Ok(TypeEstimate { estimate: 0.5 * (a_low + a_high), a_low, a_high, epsilon: eps, window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clark::Atom;

    #[test]
    fn exponential_divisors() {
        let o = DensityOptions::default();
        let s = MifDescriptor::singular(1.0);
        assert_eq!(exp_dominance_test(&s, 2.0, 1e-9, &o).unwrap().verdict, DominanceVerdict::InD);
        assert_eq!(exp_dominance_test(&s, 0.5, 1e-9, &o).unwrap().verdict, DominanceVerdict::NotInD);
        assert_eq!(exp_dominance_test(&s, 1.0, 1e-9, &o).unwrap().verdict, DominanceVerdict::Inconclusive);
    }

    #[test]
    fn theorem10_cases() {
        let u = MifDescriptor::singular(1.0);
        let half = MifDescriptor::singular(0.5);
        let one = MifDescriptor::blaschke(vec![]).unwrap();
        let e = Exec::default();
        assert_eq!(theorem10_diagnostic(&u, &u, 0.05, 0.0, 200.0, e).unwrap().verdict, DominanceVerdict::Inconclusive);
        assert_eq!(theorem10_diagnostic(&u, &one, 0.05, 0.0, 200.0, e).unwrap().verdict, DominanceVerdict::InD);
        assert_eq!(theorem10_diagnostic(&u, &half, 0.05, 0.0, 200.0, e).unwrap().verdict, DominanceVerdict::InD);
        assert_eq!(theorem10_diagnostic(&half, &u, 0.05, 0.0, 200.0, e).unwrap().verdict, DominanceVerdict::NotInD);
    }

    #[test]
    fn lattice_type() {
        let atoms = (-200..=200).map(|n| Atom { x: n as f64, mass: 1.0 }).collect();
        let mu = AtomicMeasure::new(atoms, 0.0).unwrap();
        let t = type_estimate(&mu, 150.0, 1e-3, 0.05, Exec::default()).unwrap();
        assert!((t.estimate - 2.0 * PI).abs() < 0.05 * 2.0 * PI, "{t:?}");
    }

    #[test]
    fn single_atom_type() {
        let mu = AtomicMeasure::new(vec![Atom { x: 0.0, mass: 1.0 }], 0.0).unwrap();
        let t = type_estimate(&mu, 50.0, 1e-3, 0.05, Exec::default()).unwrap();
        assert!(t.estimate < 0.05, "{t:?}");
    }
}
