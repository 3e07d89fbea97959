use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly(#[serde(with = "crate::cser::complex_vec")] pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }

    /// `Π (z - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Poly::one(), |p, &r| &p * &Poly(vec![-r, Complex64::new(1.0, 0.0)]))
    }

    /// Index of the highest nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `p#(z) = conj(p(conj z))`.
    pub fn reflect(&self) -> Self {
        Poly(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Long division: `self = q·d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree();
        let lead = d.0[dd];
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly(vec![Complex64::new(0.0, 0.0)]), Poly(r));
        }
        let mut q = vec![Complex64::new(0.0, 0.0); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd] / lead;
            q[k] = c;
            for j in 0..=dd {
                r[k + j] -= c * d.0[j];
            }
        }
        r.truncate(dd.max(1));
        (Poly(q), Poly(r))
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let z = Complex64::new(0.0, 0.0);
        Poly((0..n).map(|i| *self.0.get(i).unwrap_or(&z) + *o.0.get(i).unwrap_or(&z)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &o.scale(Complex64::new(-1.0, 0.0))
    }
}
