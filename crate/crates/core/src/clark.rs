//! Clark measures of inner functions and the inverse Herglotz construction.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::{MifDescriptor, PreparedMif};
use crate::numerics::monotone_roots;

/// One atom of a discrete measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

/// Finitely many real atoms plus a point mass at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub infinity_mass: f64,
    /// Prescribed `Im m(i)` for the Herglotz transform; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub herglotz_imag: Option<f64>,
}

impl AtomicMeasure {
    /// Sorts the atoms and checks positivity and distinctness.
    pub fn new(mut atoms: Vec<Atom>, infinity_mass: f64) -> Result<Self> {
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let m = Self { atoms, infinity_mass, herglotz_imag: None };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.iter().any(|a| !(a.mass > 0.0) || !a.x.is_finite() || !a.mass.is_finite()) {
            return Err(Error::InvalidInput("atom masses must be positive and finite".into()));
        }
        if self.atoms.windows(2).any(|w| !(w[1].x > w[0].x)) {
            return Err(Error::InvalidInput("atoms must be sorted with distinct abscissae".into()));
        }
        if !(self.infinity_mass >= 0.0) {
            return Err(Error::InvalidInput("infinity_mass must be ≥ 0".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.x).collect()
    }

    /// `Σ mass/(1+x²)`.
    pub fn poisson_sum(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass / (1.0 + a.x * a.x)).sum()
    }
}

/// A Clark measure together with the data needed to invert it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarkMeasure {
    pub measure: AtomicMeasure,
    #[serde(with = "crate::cser::complex")]
    pub alpha: Complex64,
    /// False when the measure may carry mass at infinity that was not computed.
    pub infinity_mass_certified: bool,
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    if (alpha.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("α = {alpha} is not unimodular")));
    }
    Ok(())
}

/// Points of `{θ = α}` inside `window`; infinite bounds are allowed for
/// descriptors without exponential mass.
pub fn level_set(desc: &MifDescriptor, alpha: Complex64, window: (f64, f64)) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if desc.is_constant() {
        return Err(Error::ConstantMif);
    }
    let p = desc.prepare();
    let (lo, hi) = window;
    if lo.is_finite() && hi.is_finite() {
        let targets = targets(alpha.arg(), p.arg(lo), p.arg(hi));
        return monotone_roots(&|x| p.arg(x), &targets, (lo, hi));
    }
    if desc.exp_mass > 0.0 {
        return Err(Error::InvalidInput("infinite windows need a descriptor without exponential mass".into()));
    }
    // Work in t = atan x so the whole line becomes a bounded interval.
    let t_lo = if lo.is_finite() { lo.atan() } else { -FRAC_PI_2 };
    let t_hi = if hi.is_finite() { hi.atan() } else { FRAC_PI_2 };
    let phi = |t: f64| p.arg(t.tan());
    let edge = |t: f64, inward: f64| {
        if t.abs() < FRAC_PI_2 {
            t
        } else {
            t + inward * 1e-15
        }
    };
    let (a, b) = (edge(t_lo, 1.0), edge(t_hi, -1.0));
    let mut targets = targets(alpha.arg(), phi(a), phi(b));
    // Endpoints of the full line belong to ∞, not to ℝ.
    targets.retain(|&t| t > phi(a) && t < phi(b));
    let ts = monotone_roots(&phi, &targets, (a, b))?;
    Ok(ts.into_iter().map(f64::tan).collect())
}

fn targets(base: f64, from: f64, to: f64) -> Vec<f64> {
    let k0 = ((from - base) / (2.0 * PI)).ceil() as i64;
    let k1 = ((to - base) / (2.0 * PI)).floor() as i64;
    (k0..=k1).map(|k| base + 2.0 * PI * k as f64).collect()
}

/// `θ(∞)` for a finite Blaschke product times a rotation.
fn value_at_infinity(desc: &MifDescriptor) -> Complex64 {
    desc.all_zeros().into_iter().fold(desc.rotation, |v, z| v * crate::inner::normalizer(z))
}

/// Clark measure `σ_α`: atoms on the level set with masses `2π/φ'`.
pub fn clark_measure(desc: &MifDescriptor, alpha: Complex64, window: (f64, f64)) -> Result<ClarkMeasure> {
    let xs = level_set(desc, alpha, window)?;
    let p = desc.prepare();
    let atoms = xs.into_iter().map(|x| Atom { x, mass: 2.0 * PI / p.darg(x) }).collect();
    // With exponential mass θ(iy) → 0, so 1-ᾱθ stays away from zero at ∞ and p = 0.
    let certified = desc.exp_mass > 0.0 || (value_at_infinity(desc) - alpha).norm() > 1e-12;
    let herglotz_imag = herglotz_of(&p, alpha)?.im;
    Ok(ClarkMeasure {
        measure: AtomicMeasure { atoms, infinity_mass: 0.0, herglotz_imag: Some(herglotz_imag) },
        alpha,
        infinity_mass_certified: certified,
    })
}

fn herglotz_of(p: &PreparedMif, alpha: Complex64) -> Result<Complex64> {
    let t = p.eval(Complex64::i())?;
    Ok((alpha + t) / (alpha - t))
}

/// Herglotz transform `m(z) = -ipz + (1/πi) Σ α_n [1/(x_n-z) - x_n/(1+x_n²)] + ic`,
/// with `c` fixed so that `Im m(i)` equals `herglotz_imag` (zero by default).
pub fn herglotz(mu: &AtomicMeasure, z: Complex64) -> Result<Complex64> {
    if mu.atoms.is_empty() && mu.infinity_mass == 0.0 {
        return Err(Error::EmptyMeasure);
    }
    let raw = |w: Complex64| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for a in &mu.atoms {
            s += a.mass * (1.0 / (a.x - w) - a.x / (1.0 + a.x * a.x));
        }
        -Complex64::i() * mu.infinity_mass * w + s / (Complex64::i() * PI)
    };
    let c = mu.herglotz_imag.unwrap_or(0.0) - raw(Complex64::i()).im;
    Ok(raw(z) + Complex64::i() * c)
}

/// Inner function whose Clark measure at `α = 1` is `mu`.
pub fn mif_from_measure(mu: &AtomicMeasure, z: Complex64) -> Result<Complex64> {
    mif_from_measure_alpha(mu, Complex64::new(1.0, 0.0), z)
}

/// Inner function whose Clark measure at `alpha` is `mu`: `θ = α (m-1)/(m+1)`.
pub fn mif_from_measure_alpha(mu: &AtomicMeasure, alpha: Complex64, z: Complex64) -> Result<Complex64> {
    check_alpha(alpha)?;
    let m = herglotz(mu, z)?;
    Ok(alpha * (m - 1.0) / (m + 1.0))
}

/// `(1/2πi) Σ f(x_n) α_n/(x_n - z)`.
pub fn cauchy_integral(f: &[Complex64], sigma: &AtomicMeasure, z: Complex64) -> Result<Complex64> {
    if f.len() != sigma.atoms.len() {
        return Err(Error::InvalidInput(format!("{} samples for {} atoms", f.len(), sigma.atoms.len())));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for (v, a) in f.iter().zip(&sigma.atoms) {
        let d = a.x - z;
        if d == Complex64::new(0.0, 0.0) {
            return Err(Error::OnSupport(a.x));
        }
        s += v * a.mass / d;
    }
    Ok(s / (2.0 * PI * Complex64::i()))
}

/// Recover `f ∈ K_θ` from its samples on the atoms of `σ_α`:
/// `f(z) = (1 - ᾱθ(z)) · K(f σ_α)(z)`.
pub fn clark_recover(
    samples: &[Complex64],
    desc: &MifDescriptor,
    sigma: &ClarkMeasure,
    z: Complex64,
) -> Result<Complex64> {
    if !sigma.infinity_mass_certified || sigma.measure.infinity_mass > 0.0 {
        return Err(Error::InfiniteMassUnsupported);
    }
    let theta = desc.prepare().eval(z)?;
    let k = cauchy_integral(samples, &sigma.measure, z)?;
    Ok((1.0 - sigma.alpha.conj() * theta) * k)
}

/// Heuristic symmetric window for Cauchy sums at `z` whose samples decay like `1/|x|`:
/// the neglected tail is then about `1/R` with `R` the window radius.
pub fn suggest_window(z: Complex64, tol: f64) -> (f64, f64) {
    let r = z.norm() + 1.0 / tol.max(1e-12);
    (-r, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::eval_mif;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn level_sets() {
        let s = MifDescriptor::singular(2.0 * PI);
        let xs = level_set(&s, c(1.0, 0.0), (-5.5, 5.5)).unwrap();
        assert_eq!(xs.len(), 11);
        for (x, n) in xs.iter().zip(-5..=5) {
            assert!((x - n as f64).abs() < 1e-12);
        }
        let half = level_set(&s, c(-1.0, 0.0), (0.0, 1.0)).unwrap();
        assert_eq!(half.len(), 1);
        assert!((half[0] - 0.5).abs() < 1e-12);
        let b = MifDescriptor::blaschke(vec![c(0.0, 1.0)]).unwrap();
        let z = level_set(&b, c(-1.0, 0.0), (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert_eq!(z.len(), 1);
        assert!(z[0].abs() < 1e-12);
        assert!(matches!(level_set(&MifDescriptor::singular(0.0), c(1.0, 0.0), (0.0, 1.0)), Err(Error::ConstantMif)));
    }

    #[test]
    fn masses() {
        let m = clark_measure(&MifDescriptor::singular(2.0 * PI), c(1.0, 0.0), (-3.5, 3.5)).unwrap();
        assert!(m.measure.atoms.iter().all(|a| (a.mass - 1.0).abs() < 1e-12));
        assert!(m.infinity_mass_certified);
        let m = clark_measure(&MifDescriptor::singular(4.0 * PI), c(1.0, 0.0), (-1.2, 1.2)).unwrap();
        assert_eq!(m.measure.atoms.len(), 5);
        assert!(m.measure.atoms.iter().all(|a| (a.mass - 0.5).abs() < 1e-12));
        let b = MifDescriptor::blaschke(vec![c(0.0, 1.0)]).unwrap();
        let m = clark_measure(&b, c(-1.0, 0.0), (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert_eq!(m.measure.atoms.len(), 1);
        assert_relative_eq!(m.measure.atoms[0].mass, PI, epsilon = 1e-12);
        // b(∞) = 1 for the zero at i, so σ_1 sits at infinity.
        let m1 = clark_measure(&b, c(1.0, 0.0), (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert!(!m1.infinity_mass_certified);
    }

    #[test]
    fn forward_then_inverse() {
        let b = MifDescriptor::blaschke(vec![c(0.0, 1.0)]).unwrap();
        let m = clark_measure(&b, c(-1.0, 0.0), (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        let z = c(1.0, 1.0);
        let back = mif_from_measure_alpha(&m.measure, m.alpha, z).unwrap();
        assert!((back - eval_mif(&b, z, 1e-12).unwrap()).norm() < 1e-6);
        let unit = AtomicMeasure::new(vec![Atom { x: 0.0, mass: 1.0 }], 0.0).unwrap();
        assert!(mif_from_measure(&unit, c(0.0, 1.0)).unwrap().norm() < 1.0);
        let empty = AtomicMeasure::new(vec![], 0.0).unwrap();
        assert!(matches!(mif_from_measure(&empty, c(0.0, 1.0)), Err(Error::EmptyMeasure)));
    }

    #[test]
    fn integer_lattice_approaches_exponential() {
        let mut last = f64::INFINITY;
        for n in [50, 200, 800] {
            let atoms = (-n..=n).map(|k| Atom { x: k as f64, mass: 1.0 }).collect();
            let mu = AtomicMeasure::new(atoms, 0.0).unwrap();
            let y = 0.3;
            let err = (mif_from_measure(&mu, c(0.0, y)).unwrap() - c((-2.0 * PI * y).exp(), 0.0)).norm();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn cauchy_sums() {
        let mu = AtomicMeasure::new(vec![Atom { x: 0.0, mass: 1.0 }], 0.0).unwrap();
        let v = cauchy_integral(&[c(1.0, 0.0)], &mu, c(0.0, 1.0)).unwrap();
        assert_relative_eq!((v - c(1.0 / (2.0 * PI), 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(cauchy_integral(&[c(0.0, 0.0)], &mu, c(0.0, 1.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(cauchy_integral(&[c(1.0, 0.0)], &mu, c(0.0, 0.0)), Err(Error::OnSupport(_))));
    }

    #[test]
    fn recovery_single_factor() {
        let b = MifDescriptor::blaschke(vec![c(0.0, 1.0)]).unwrap();
        let sigma = clark_measure(&b, c(-1.0, 0.0), (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        let f = |z: Complex64| 1.0 / (z + Complex64::i());
        let samples: Vec<_> = sigma.measure.atoms.iter().map(|a| f(c(a.x, 0.0))).collect();
        let z = c(0.0, 2.0);
        let r = clark_recover(&samples, &b, &sigma, z).unwrap();
        assert!((r - f(z)).norm() < 1e-8);
        let zero = clark_recover(&[c(0.0, 0.0)], &b, &sigma, z).unwrap();
        assert_eq!(zero, c(0.0, 0.0));
    }

    #[test]
    fn recovery_paley_wiener_kernel() {
        let s = MifDescriptor::singular(2.0 * PI);
        let sigma = clark_measure(&s, c(1.0, 0.0), (-200.5, 200.5)).unwrap();
        let w = c(0.3, 0.5);
        let th = |z: Complex64| (Complex64::i() * 2.0 * PI * z).exp();
        let k = |z: Complex64| Complex64::i() / (2.0 * PI) * (1.0 - th(w).conj() * th(z)) / (z - w.conj());
        let samples: Vec<_> = sigma.measure.atoms.iter().map(|a| k(c(a.x, 0.0))).collect();
        let z = c(0.0, 0.5);
        let r = clark_recover(&samples, &s, &sigma, z).unwrap();
        assert!((r - k(z)).norm() < 1e-3);
    }
}
