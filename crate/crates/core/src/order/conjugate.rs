use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::inner::MifDescriptor;
use crate::numerics::{hilbert_transform, tail_fit, HilbertOptions, TAIL_MARGIN};
use crate::par::{self, Exec};

/// `I` and `J` with their common zeros and common exponential mass removed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPair {
    pub i: MifDescriptor,
    pub j: MifDescriptor,
    /// Number of zeros cancelled.
    pub cancelled: usize,
}

fn key(z: Complex64) -> (i64, i64) {
    ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64)
}

/// Cancel shared zeros (with multiplicity) and the common part of the exponential masses.
pub fn reduce_pair(i: &MifDescriptor, j: &MifDescriptor) -> ReducedPair {
    let zi = i.all_zeros();
    let zj = j.all_zeros();
    let mut pool: HashMap<(i64, i64), usize> = HashMap::new();
    for &z in &zj {
        *pool.entry(key(z)).or_default() += 1;
    }
    let mut keep_i = Vec::new();
    let mut cancelled = 0;
    for z in zi {
        match pool.get_mut(&key(z)) {
            Some(c) if *c > 0 => {
                *c -= 1;
                cancelled += 1;
            }
            _ => keep_i.push(z),
        }
    }
    let mut keep_j = Vec::new();
    for z in zj {
        match pool.get_mut(&key(z)) {
            Some(c) if *c > 0 => {
                *c -= 1;
                keep_j.push(z);
            }
            _ => {}
        }
    }
    let a = i.exp_mass.min(j.exp_mass);
    let mk = |d: &MifDescriptor, zeros| MifDescriptor {
        zeros,
        exp_mass: d.exp_mass - a,
        rotation: d.rotation,
        generator: None,
    };
    ReducedPair { i: mk(i, keep_i), j: mk(j, keep_j), cancelled }
}

/// `φ(I,J) = ½(arg I - arg J)` on a grid.
pub fn phi_diff(i: &MifDescriptor, j: &MifDescriptor, xs: &[f64], exec: Exec) -> GridFunction {
    let (pi, pj) = (i.prepare(), j.prepare());
    GridFunction { xs: xs.to_vec(), ys: par::map(exec, xs, |&x| 0.5 * (pi.arg(x) - pj.arg(x))), tag: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjugateMethod {
    HilbertQuadrature,
    ClosedFormRational,
}

/// The closed form applies once the exponential masses agree: then `φ` is the
/// argument of `E_J/E_I` up to a constant.
pub fn closed_form_available(i: &MifDescriptor, j: &MifDescriptor) -> bool {
    i.exp_mass == j.exp_mass
}

/// `φ̃(I,J)`, normalised so that its harmonic extension vanishes at `i`.
///
/// The closed form is `log|E_I(x)/E_J(x)| - log|E_I(i)/E_J(i)|` with
/// `E = Π (z - λ̄)`; the quadrature path conjugates `φ` numerically.
pub fn harmonic_conjugate(
    i: &MifDescriptor,
    j: &MifDescriptor,
    xs: &[f64],
    method: ConjugateMethod,
    exec: Exec,
) -> Result<GridFunction> {
    let red = reduce_pair(i, j);
    if red.i.exp_mass != red.j.exp_mass {
        return Err(Error::TailDivergent { exponent: 1.0 });
    }
    match method {
        ConjugateMethod::ClosedFormRational => {
            let (zi, zj) = (red.i.zeros, red.j.zeros);
            let term = |x: f64, z: Complex64| {
                let w = z.conj();
                ((Complex64::new(x, 0.0) - w) / (Complex64::i() - w)).norm().ln()
            };
            let ys = par::map(exec, xs, |&x| {
                zi.iter().map(|&z| term(x, z)).sum::<f64>() - zj.iter().map(|&z| term(x, z)).sum::<f64>()
            });
            Ok(GridFunction { xs: xs.to_vec(), ys, tag: Some("log|E_I/E_J|".into()) })
        }
        ConjugateMethod::HilbertQuadrature => {
            let (pi, pj) = (red.i.prepare(), red.j.prepare());
            let phi = move |x: f64| 0.5 * (pi.arg(x) - pj.arg(x));
            conjugate_function(&phi, xs, exec, &HilbertOptions::default())
        }
    }
}

/// `φ̃(I,J)` by the closed form when it applies, otherwise by quadrature.
pub fn phi_tilde(i: &MifDescriptor, j: &MifDescriptor, xs: &[f64], exec: Exec) -> Result<GridFunction> {
    harmonic_conjugate(i, j, xs, ConjugateMethod::ClosedFormRational, exec)
}

/// Conjugate function of a Poisson-summable evaluator, sampled on `xs`.
pub fn conjugate_function<F>(f: &F, xs: &[f64], exec: Exec, opts: &HilbertOptions) -> Result<GridFunction>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let fit = tail_fit(f, 1e4);
    if !fit.vanishing && !(fit.exponent < 1.0 - TAIL_MARGIN) {
        return Err(Error::TailDivergent { exponent: fit.exponent });
    }
    let vals = par::map(exec, xs, |&x| hilbert_transform(f, x, opts));
    let ys = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(GridFunction { xs: xs.to_vec(), ys, tag: Some("hilbert".into()) })
}

/// The outer function `h(I,J) = E_I/E_J`, scaled to modulus `e^{φ̃}`.
pub fn outer_h(i: &MifDescriptor, j: &MifDescriptor, z: Complex64) -> Result<Complex64> {
    let red = reduce_pair(i, j);
    if red.i.exp_mass != red.j.exp_mass {
        return Err(Error::TailDivergent { exponent: 1.0 });
    }
    let ratio = |w: Complex64| {
        let a: Complex64 = red.i.zeros.iter().map(|l| w - l.conj()).product();
        let b: Complex64 = red.j.zeros.iter().map(|l| w - l.conj()).product();
        a / b
    };
    Ok(ratio(z) / ratio(Complex64::i()).norm())
}
