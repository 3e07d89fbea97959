//! Hermite–Biehler functions `E = c e^{-iaz} Π (z - w_k)`, their de Branges
//! spaces, reproducing kernels, orthogonal bases and spectral measures.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clark::{level_set, Atom, AtomicMeasure};
use crate::cser;
use crate::error::{Error, Result};
use crate::inner::{normalizer, MifDescriptor};
use crate::numerics::{integrate_line, LineOptions, QuadratureResult, TailKind};
use crate::par::{self, Exec};

/// `E(z) = scalar · e^{-iaz} · Π (z - w_k)` with every `w_k` in the open lower half-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HBFunction {
    #[serde(with = "cser::complex_vec", default)]
    pub zeros: Vec<Complex64>,
    #[serde(default)]
    pub exp_mass: f64,
    #[serde(with = "cser::complex", default = "cser::one")]
    pub scalar: Complex64,
}

impl HBFunction {
    pub fn new(zeros: Vec<Complex64>, exp_mass: f64, scalar: Complex64) -> Result<Self> {
        let e = Self { zeros, exp_mass, scalar };
        e.validate()?;
        Ok(e)
    }

    /// `e^{-iaz}`, the Paley–Wiener function of type `a`.
    pub fn paley_wiener(a: f64) -> Self {
        Self { zeros: vec![], exp_mass: a, scalar: cser::one() }
    }

    /// The polynomial representative `Π (z - λ̄)` of a finite inner function.
    pub fn from_mif(desc: &MifDescriptor) -> Result<Self> {
        if desc.generator.is_some() {
            return Err(Error::InvalidInput("materialise the generator before building E".into()));
        }
        Self::new(desc.zeros.iter().map(|z| z.conj()).collect(), 0.5 * desc.exp_mass, cser::one())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.zeros.iter().find(|w| !(w.im < 0.0)) {
            return Err(Error::InvalidInput(format!("zero {w} of E is not in the lower half-plane")));
        }
        if !(self.exp_mass >= 0.0) || !self.exp_mass.is_finite() {
            return Err(Error::InvalidInput(format!("exp_mass must be ≥ 0, got {}", self.exp_mass)));
        }
        if !(self.scalar.norm() > 0.0) || !self.scalar.is_finite() {
            return Err(Error::InvalidInput("scalar must be nonzero".into()));
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let e = (-Complex64::i() * self.exp_mass * z).exp();
        self.zeros.iter().fold(self.scalar * e, |acc, w| acc * (z - w))
    }

    /// `E#(z) = conj(E(z̄))`.
    pub fn sharp(&self, z: Complex64) -> Complex64 {
        self.eval(z.conj()).conj()
    }

    /// `θ_E` as an inner-function descriptor: zeros `w̄_k`, mass `2a`.
    pub fn to_mif(&self) -> MifDescriptor {
        let zeros: Vec<Complex64> = self.zeros.iter().map(|w| w.conj()).collect();
        let unit = self.scalar.conj() / self.scalar;
        let rotation = zeros.iter().fold(unit, |r, &l| r * normalizer(l).conj());
        MifDescriptor { zeros, exp_mass: 2.0 * self.exp_mass, rotation, generator: None }
    }
}

/// `θ_E = E#/E`.
pub fn theta_of_e(e: &HBFunction, z: Complex64) -> Result<Complex64> {
    let d = e.eval(z);
    if d.norm() == 0.0 || !d.is_finite() {
        return Err(Error::ZeroOfE(format!("{z}")));
    }
    Ok(e.sharp(z) / d)
}

fn kernel_formula(e: &HBFunction, lambda: Complex64, z: Complex64) -> Complex64 {
    let num = e.eval(z) * e.eval(lambda).conj() - e.sharp(z) * e.eval(lambda.conj());
    num / (2.0 * PI * Complex64::i() * (lambda.conj() - z))
}

/// `k_λ(z) = (E(z) conj E(λ) - E#(z) E(λ̄)) / (2πi(λ̄ - z))`.
///
/// The kernel is entire in `z`. Within `r = 10⁻³(1+|λ|)` of `λ̄` it is
/// evaluated as the mean over eight points on the circle of radius `2r`
/// around `z`, which stays clear of the cancellation in the quotient.
pub fn reproducing_kernel(e: &HBFunction, lambda: Complex64, z: Complex64) -> Complex64 {
    let r = 1e-3 * (1.0 + lambda.norm());
    if (z - lambda.conj()).norm() >= r {
        return kernel_formula(e, lambda, z);
    }
    let sum: Complex64 =
        (0..8).map(|k| kernel_formula(e, lambda, z + Complex64::from_polar(2.0 * r, PI * k as f64 / 4.0))).sum();
    sum / 8.0
}

/// Orthogonal basis `{k_λ : θ_E(λ) = α}` and its Gram matrix `G[m][n] = k_{λ_n}(λ_m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClarkBasis {
    pub points: Vec<f64>,
    #[serde(skip)]
    pub gram: Vec<Vec<Complex64>>,
    /// Largest `|G[m][n]|/sqrt(G[m][m] G[n][n])` off the diagonal.
    pub max_off_diagonal: f64,
}

pub fn clark_basis_gram(e: &HBFunction, alpha: Complex64, window: (f64, f64), exec: Exec) -> Result<ClarkBasis> {
    let points = level_set(&e.to_mif(), alpha, window)?;
    let n = points.len();
    let entries = par::map_range(exec, n * n, |k| {
        let (m, j) = (k / n, k % n);
        reproducing_kernel(e, Complex64::new(points[j], 0.0), Complex64::new(points[m], 0.0))
    });
    let gram: Vec<Vec<Complex64>> = entries.chunks(n.max(1)).map(|r| r.to_vec()).take(n).collect();
    let mut max_off = 0.0f64;
    for m in 0..n {
        for j in 0..n {
            if m != j {
                let s = (gram[m][m].re * gram[j][j].re).sqrt();
                max_off = max_off.max(gram[m][j].norm() / s);
            }
        }
    }
    Ok(ClarkBasis { points, gram, max_off_diagonal: max_off })
}

/// `ψ = -arg E` on `ℝ` as a continuous branch, so that `2ψ' = φ'_θ`.
pub fn phase_function(e: &HBFunction, x: f64) -> f64 {
    e.exp_mass * x - e.scalar.arg() - e.zeros.iter().map(|w| (-w.im).atan2(x - w.re)).sum::<f64>()
}

/// `ψ'`.
pub fn phase_derivative(e: &HBFunction, x: f64) -> f64 {
    e.exp_mass + e.zeros.iter().map(|w| -w.im / ((x - w.re).powi(2) + w.im * w.im)).sum::<f64>()
}

/// Atoms on `{θ_E = α}` with masses `|E|² · 2π/φ'_θ`.
pub fn spectral_measure(e: &HBFunction, alpha: Complex64, window: (f64, f64)) -> Result<AtomicMeasure> {
    let points = level_set(&e.to_mif(), alpha, window)?;
    let atoms = points
        .into_iter()
        .map(|x| Atom {
            x,
            mass: e.eval(Complex64::new(x, 0.0)).norm_sqr() * 2.0 * PI / (2.0 * phase_derivative(e, x)),
        })
        .collect();
    AtomicMeasure::new(atoms, 0.0)
}

/// `‖F‖²_{B(E)} = ∫ |F/E|²`, trying an algebraic tail model first and an oscillatory one second.
pub fn db_norm_sq<F: Fn(Complex64) -> Complex64>(f: &F, e: &HBFunction) -> QuadratureResult<f64> {
    let g = |x: f64| {
        let z = Complex64::new(x, 0.0);
        (f(z) / e.eval(z)).norm_sqr()
    };
    let alg = integrate_line(&g, &LineOptions::default());
    if alg.certified {
        return alg;
    }
    integrate_line(&g, &LineOptions { tail: TailKind::Oscillatory, ..Default::default() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DbMembership {
    pub member: bool,
    pub norm_sq: f64,
    pub tail_exponent: f64,
    pub certified: bool,
    /// Largest `|G(z)| sqrt(4π Im z) / ‖G‖` over the samples, for `G = F/E, F#/E`;
    /// an `H²` function keeps this at most 1.
    pub poisson_ratio: f64,
}

/// Relative slack allowed on the `H²` point bound.
pub const POISSON_SLACK: f64 = 1e-3;

/// Is `F ∈ B(E)`, i.e. `F/E, F#/E ∈ H²`?
pub fn db_membership<F: Fn(Complex64) -> Complex64 + Sync>(f: &F, e: &HBFunction, xs: &[f64]) -> Result<DbMembership> {
    let q = db_norm_sq(f, e);
    if !q.certified {
        return Ok(DbMembership {
            member: false,
            norm_sq: q.value,
            tail_exponent: q.tail_exponent,
            certified: false,
            poisson_ratio: f64::NAN,
        });
    }
    let norm = q.value.sqrt();
    let mut ratio = 0.0f64;
    for &y in &[0.25, 1.0, 4.0, 16.0] {
        for &x in xs {
            let z = Complex64::new(x, y);
            let d = e.eval(z);
            if d.norm() == 0.0 {
                return Err(Error::ZeroOfE(format!("{z}")));
            }
            let scale = (4.0 * PI * y).sqrt() / norm;
            let a = (f(z) / d).norm() * scale;
            let b = (f(z.conj()).conj() / d).norm() * scale;
            ratio = ratio.max(a).max(b);
        }
    }
    Ok(DbMembership {
        member: ratio <= 1.0 + POISSON_SLACK,
        norm_sq: q.value,
        tail_exponent: q.tail_exponent,
        certified: true,
        poisson_ratio: ratio,
    })
}

/// Deviation from `arg(fE) + ½ arg I ≡ const (mod π)` on `xs`, for a
/// polynomial `F ∈ B(E)` with the given zeros (none real), where `F = I_1 f E`
/// in the upper half-plane and `I = I_1 I_2` is its total inner component.
pub fn total_inner_argument_residual<F: Fn(Complex64) -> Complex64>(
    f: &F,
    zeros: &[Complex64],
    xs: &[f64],
) -> Result<f64> {
    if let Some(z) = zeros.iter().find(|z| z.im == 0.0) {
        return Err(Error::InvalidInput(format!("real zero {z}")));
    }
    let upper: Vec<Complex64> = zeros.iter().copied().filter(|z| z.im > 0.0).collect();
    let total: Vec<Complex64> = zeros.iter().map(|z| if z.im > 0.0 { *z } else { z.conj() }).collect();
    let i1 = MifDescriptor::blaschke(upper)?.prepare();
    let i = MifDescriptor::blaschke(total)?.prepare();
    let wrap = |t: f64| t - PI * (t / PI).round();
    let value = |x: f64| -> Result<f64> {
        let z = Complex64::new(x, 0.0);
        Ok((f(z) / i1.eval(z)?).arg() + 0.5 * i.arg(x))
    };
    let base = value(xs[0])?;
    let mut worst = 0.0f64;
    for &x in xs {
        worst = worst.max(wrap(value(x)? - base).abs());
    }
    Ok(worst)
}
