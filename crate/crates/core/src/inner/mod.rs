//! Meromorphic inner functions `α B_Λ S^a` and their boundary arguments.

mod generator;

pub use generator::{Decay, Example3Variant, ZeroGenerator, ZeroRule};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cser;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::par::{self, Exec};

/// Zeros in the upper half-plane, exponential mass and a unimodular rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MifDescriptor {
    #[serde(with = "cser::complex_vec", default)]
    pub zeros: Vec<Complex64>,
    #[serde(default)]
    pub exp_mass: f64,
    #[serde(with = "cser::complex", default = "cser::one")]
    pub rotation: Complex64,
    /// Infinite zero sequence, materialised on its current window in addition to `zeros`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<ZeroGenerator>,
}

impl MifDescriptor {
    pub fn new(zeros: Vec<Complex64>, exp_mass: f64, rotation: Complex64) -> Result<Self> {
        let d = Self { zeros, exp_mass, rotation, generator: None };
        d.validate()?;
        Ok(d)
    }

    /// `S^a = e^{iaz}`.
    pub fn singular(a: f64) -> Self {
        Self { zeros: vec![], exp_mass: a, rotation: cser::one(), generator: None }
    }

    /// Finite Blaschke product with the given zeros.
    pub fn blaschke(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(zeros, 0.0, cser::one())
    }

    pub fn from_generator(generator: ZeroGenerator) -> Self {
        Self { zeros: vec![], exp_mass: 0.0, rotation: cser::one(), generator: Some(generator) }
    }

    pub fn with_rotation(mut self, rotation: Complex64) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for z in &self.zeros {
            if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonUpperHalfZero(format!("{z}")));
            }
        }
        if !(self.exp_mass >= 0.0) || !self.exp_mass.is_finite() {
            return Err(Error::InvalidInput(format!("exp_mass must be ≥ 0, got {}", self.exp_mass)));
        }
        if (self.rotation.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("rotation {} is not unimodular", self.rotation)));
        }
        if let Some(g) = &self.generator {
            g.rule.validate()?;
        }
        Ok(())
    }

    /// Explicit zeros followed by the generator's window.
    pub fn all_zeros(&self) -> Vec<Complex64> {
        let mut z = self.zeros.clone();
        if let Some(g) = &self.generator {
            z.extend(g.points());
        }
        z
    }

    pub fn is_constant(&self) -> bool {
        self.exp_mass == 0.0 && self.zeros.is_empty() && self.generator.as_ref().is_none_or(|g| g.points().is_empty())
    }

    /// Freeze the generator window into the explicit zero list.
    pub fn materialized(&self) -> Self {
        Self { zeros: self.all_zeros(), exp_mass: self.exp_mass, rotation: self.rotation, generator: None }
    }

    pub fn prepare(&self) -> PreparedMif {
        PreparedMif::new(self)
    }
}

/// Unimodular constant `ε` with `ε (i-λ)/(i-λ̄) > 0` (and `ε = 1` for `λ = i`).
pub fn normalizer(lambda: Complex64) -> Complex64 {
    let w = (Complex64::i() - lambda) / (Complex64::i() - lambda.conj());
    let r = w.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        w.conj() / r
    }
}

/// Normalised Blaschke factor `ε (z-λ)/(z-λ̄)`.
pub fn blaschke_factor(lambda: Complex64, z: Complex64) -> Complex64 {
    normalizer(lambda) * (z - lambda) / (z - lambda.conj())
}

/// `Σ Im λ / (1 + |λ|²)`.
pub fn blaschke_sum(zeros: &[Complex64]) -> Result<f64> {
    let mut s = 0.0;
    for z in zeros {
        if !(z.im > 0.0) {
            return Err(Error::NonUpperHalfZero(format!("{z}")));
        }
        s += z.im / (1.0 + z.norm_sqr());
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy)]
struct Factor {
    zero: Complex64,
    eps: Complex64,
    arg_eps: f64,
}

/// A descriptor with per-factor constants precomputed for repeated evaluation.
#[derive(Debug, Clone)]
pub struct PreparedMif {
    exp_mass: f64,
    rotation: Complex64,
    factors: Vec<Factor>,
}

impl PreparedMif {
    pub fn new(desc: &MifDescriptor) -> Self {
        let factors = desc
            .all_zeros()
            .into_iter()
            .map(|zero| {
                let eps = normalizer(zero);
                Factor { zero, eps, arg_eps: eps.arg() }
            })
            .collect();
        Self { exp_mass: desc.exp_mass, rotation: desc.rotation, factors }
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    /// `α e^{iaz} Π ε_n (z-λ_n)/(z-λ̄_n)` over the prepared (finite) zero list.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut v = self.rotation * (Complex64::i() * self.exp_mass * z).exp();
        for f in &self.factors {
            let den = z - f.zero.conj();
            if den == Complex64::new(0.0, 0.0) {
                return Err(Error::PoleHit(format!("{z}")));
            }
            v *= f.eps * (z - f.zero) / den;
        }
        Ok(v)
    }

    /// Continuous increasing argument on the real line.
    pub fn arg(&self, x: f64) -> f64 {
        let mut s = self.exp_mass * x + self.rotation.arg();
        for f in &self.factors {
            s += 2.0 * ((x - f.zero.re) / f.zero.im).atan() + PI + f.arg_eps;
        }
        s
    }

    pub fn darg(&self, x: f64) -> f64 {
        let mut s = self.exp_mass;
        for f in &self.factors {
            let d = x - f.zero.re;
            s += 2.0 * f.zero.im / (d * d + f.zero.im * f.zero.im);
        }
        s
    }
}

/// Largest generator window used when extending a truncation on demand.
const MAX_INDEX: i64 = 1 << 22;

/// Evaluate the inner function at `z`, `Im z ≥ 0`.
///
/// With a generator attached, its window is widened until the certified
/// truncation error at `z` is below `tol`.
pub fn eval_mif(desc: &MifDescriptor, z: Complex64, tol: f64) -> Result<Complex64> {
    if z.im < 0.0 {
        return Err(Error::InvalidInput(format!("evaluation point {z} lies in the lower half-plane")));
    }
    match &desc.generator {
        None => desc.prepare().eval(z),
        Some(g) => {
            let mut g = g.clone();
            loop {
                let bound = g.truncation_bound(z);
                if bound <= tol {
                    let d = MifDescriptor { generator: Some(g), ..desc.clone() };
                    return d.prepare().eval(z);
                }
                if g.window[1] >= MAX_INDEX {
                    return Err(Error::TruncationNotConverged { bound, tol });
                }
                let next = g.widened(4);
                if next.window[1] > MAX_INDEX || (next.rule.first_index().is_some() && next.window[1] > 1000) {
                    return Err(Error::TruncationNotConverged { bound, tol });
                }
                g = next;
            }
        }
    }
}

/// Boundary argument `φ(x)`; generators contribute their current window.
pub fn arg_mif(desc: &MifDescriptor, x: f64) -> f64 {
    desc.prepare().arg(x)
}

/// `φ'(x) = a + Σ 2 Im λ / |x - λ|²`.
pub fn darg_mif(desc: &MifDescriptor, x: f64) -> f64 {
    desc.prepare().darg(x)
}

/// `φ` sampled on a grid.
pub fn arg_grid(desc: &MifDescriptor, xs: &[f64], exec: Exec) -> GridFunction {
    let p = desc.prepare();
    GridFunction { xs: xs.to_vec(), ys: par::map(exec, xs, |&x| p.arg(x)), tag: None }
}

/// `φ'` sampled on a grid.
pub fn darg_grid(desc: &MifDescriptor, xs: &[f64], exec: Exec) -> GridFunction {
    let p = desc.prepare();
    GridFunction { xs: xs.to_vec(), ys: par::map(exec, xs, |&x| p.darg(x)), tag: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn blaschke_sum_examples() {
        assert_eq!(blaschke_sum(&[c(0.0, 1.0)]).unwrap(), 0.5);
        assert_eq!(blaschke_sum(&[]).unwrap(), 0.0);
        let zs: Vec<_> = (1..=20).map(|n| c(1.0, 1.0) * 2f64.powi(n)).collect();
        let direct: f64 = zs.iter().map(|z| z.im / (1.0 + z.norm_sqr())).sum();
        let s = blaschke_sum(&zs).unwrap();
        assert_eq!(s, direct);
        assert!(s < 2.0);
        assert!(matches!(blaschke_sum(&[c(1.0, 0.0)]), Err(Error::NonUpperHalfZero(_))));
    }

    #[test]
    fn single_factor_values() {
        let b = MifDescriptor::blaschke(vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(eval_mif(&b, c(0.0, 1.0), 1e-12).unwrap(), c(0.0, 0.0));
        assert_relative_eq!((eval_mif(&b, c(0.0, 0.0), 1e-12).unwrap() - c(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(arg_mif(&b, 0.0), PI, epsilon = 1e-15);
        assert_relative_eq!(darg_mif(&b, 0.0), 2.0);
        let span = arg_mif(&b, 1e12) - arg_mif(&b, -1e12);
        assert_relative_eq!(span, 2.0 * PI, epsilon = 1e-9);
        assert!(matches!(eval_mif(&b, c(0.0, -1.0), 1e-9), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn pole_is_reported() {
        let b = MifDescriptor::blaschke(vec![c(0.0, 1.0)]).unwrap();
        assert!(matches!(b.prepare().eval(c(0.0, -1.0)), Err(Error::PoleHit(_))));
    }

    #[test]
    fn singular_factor() {
        let s = MifDescriptor::singular(1.0);
        assert_relative_eq!(
            (eval_mif(&s, c(0.0, 1.0), 1e-12).unwrap() - c((-1f64).exp(), 0.0)).norm(),
            0.0,
            epsilon = 1e-16
        );
        assert_eq!(arg_mif(&MifDescriptor::singular(2.5), 3.0), 7.5);
        assert_eq!(darg_mif(&MifDescriptor::singular(2.5), -4.0), 2.5);
        for y in [0.5, 1.0, 3.0] {
            let v = eval_mif(&MifDescriptor::singular(2.0), c(0.0, y), 1e-12).unwrap();
            assert_eq!(v.re, (-2.0 * y).exp());
        }
    }

    #[test]
    fn argument_matches_value() {
        let d = MifDescriptor::new(vec![c(0.3, 0.7), c(-2.0, 1.5), c(5.0, 0.2)], 0.8, Complex64::from_polar(1.0, 0.4))
            .unwrap();
        let p = d.prepare();
        for x in [-7.0, -0.5, 0.0, 0.37, 3.0, 11.0] {
            let v = p.eval(c(x, 0.0)).unwrap();
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
            let e = Complex64::from_polar(1.0, p.arg(x));
            assert_relative_eq!((e - v).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let d = MifDescriptor::new(vec![c(0.3, 0.7), c(-2.0, 1.5)], 0.8, cser::one()).unwrap();
        let h = 1e-5;
        let fd = (arg_mif(&d, 0.37 + h) - arg_mif(&d, 0.37 - h)) / (2.0 * h);
        assert_relative_eq!(fd, darg_mif(&d, 0.37), max_relative = 1e-6);
    }

    #[test]
    fn generator_truncation() {
        let g = ZeroGenerator::new(ZeroRule::Example2 { decay: Decay::Harmonic, pulled: false }, [1, 10]).unwrap();
        let d = MifDescriptor::from_generator(g);
        let v = eval_mif(&d, c(0.5, 1.0), 1e-8).unwrap();
        let full = MifDescriptor::blaschke((1..=60).map(|n| c(1.0, 1.0) * 2f64.powi(n)).collect()).unwrap();
        let w = full.prepare().eval(c(0.5, 1.0)).unwrap();
        assert!((v - w).norm() < 1e-8);
        let g3 =
            ZeroGenerator::symmetric(ZeroRule::Example3 { variant: Example3Variant::I, height: 10.0 }, 100).unwrap();
        let d3 = MifDescriptor::from_generator(g3);
        assert!(matches!(eval_mif(&d3, c(0.0, 1.0), 1e-12), Err(Error::TruncationNotConverged { .. })));
    }

    #[test]
    fn json_round_trip() {
        let d = MifDescriptor::new(vec![c(1.0, 2.0)], 0.5, c(0.0, 1.0)).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"zeros":[[1.0,2.0]],"exp_mass":0.5,"rotation":[0.0,1.0]}"#);
        let back: MifDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
