//! Model spaces of finite Blaschke products and exact Toeplitz kernels for rational symbols.

mod poly;

pub use poly::Poly;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cser;
use crate::error::{Error, Result};
use crate::inner::{normalizer, MifDescriptor};
use crate::numerics::{integrate_line, LineOptions};
use crate::par::{self, Exec};

/// Finite Blaschke product `rotation · Π b_λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalInner {
    #[serde(with = "cser::complex_vec", default)]
    pub zeros: Vec<Complex64>,
    #[serde(with = "cser::complex", default = "cser::one")]
    pub rotation: Complex64,
}

impl RationalInner {
    pub fn new(zeros: Vec<Complex64>, rotation: Complex64) -> Result<Self> {
        let r = Self { zeros, rotation };
        r.validate()?;
        Ok(r)
    }

    pub fn blaschke(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(zeros, cser::one())
    }

    pub fn validate(&self) -> Result<()> {
        MifDescriptor::new(self.zeros.clone(), 0.0, self.rotation).map(|_| ())
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn to_mif(&self) -> MifDescriptor {
        MifDescriptor { zeros: self.zeros.clone(), exp_mass: 0.0, rotation: self.rotation, generator: None }
    }

    /// `E_I(z) = Π (z - λ̄)`, an HB polynomial with `E_I#/E_I = I / c_I`.
    pub fn e_poly(&self) -> Poly {
        let conj: Vec<Complex64> = self.zeros.iter().map(|z| z.conj()).collect();
        Poly::from_roots(&conj)
    }

    /// `P_I(z) = Π (z - λ)`.
    pub fn p_poly(&self) -> Poly {
        Poly::from_roots(&self.zeros)
    }

    /// Unimodular `c_I` with `I = c_I P_I / E_I`.
    pub fn unimodular_constant(&self) -> Complex64 {
        self.zeros.iter().fold(self.rotation, |c, &z| c * normalizer(z))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.unimodular_constant() * self.p_poly().eval(z) / self.e_poly().eval(z)
    }
}

/// `num/den` with complex coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }
}

fn same_point(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm())
}

/// Orthonormal Takenaka–Malmquist basis
/// `e_k = √(Im λ_k/π) Π_{j<k} b_{λ_j} / (z - λ̄_k)` of `K_I`.
pub fn tm_basis(i: &RationalInner) -> Result<Vec<RationalFunction>> {
    if i.degree() == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut out = Vec::with_capacity(i.degree());
    let mut num = Poly::one();
    let mut den = Poly::one();
    for &l in &i.zeros {
        let c = Complex64::new((l.im / PI).sqrt(), 0.0);
        let d = &den * &Poly::from_roots(&[l.conj()]);
        out.push(RationalFunction { num: num.scale(c), den: d.clone() });
        num = &num * &Poly::from_roots(&[l]).scale(normalizer(l));
        den = d;
    }
    Ok(out)
}

/// Kernel of the Toeplitz operator with symbol `Ī J`.
#[derive(Debug, Clone, Serialize)]
pub struct ToeplitzKernel {
    pub dim: usize,
    pub basis: Vec<RationalFunction>,
    /// Per basis element: remainder of the exact division by `P_J`.
    pub division_residuals: Vec<f64>,
    /// Per basis element: `max |Ī J f - conj(g)|` on boundary samples.
    pub conjugation_residuals: Vec<f64>,
}

/// `N[ĪJ]` for finite Blaschke products with disjoint zero sets.
///
/// Elements have the form `f = p/(J E_I)` with `deg p < deg I`; `f ∈ H²`
/// forces `p` to vanish on the zeros of `J`, which is a linear condition on
/// the coefficients of `p`. The null space is computed directly and each
/// element is certified by exact division and by the boundary identity
/// `Ī J f = conj(c_I p#/E_I)`.
pub fn toeplitz_kernel_rational(i: &RationalInner, j: &RationalInner) -> Result<ToeplitzKernel> {
    for &a in &i.zeros {
        if let Some(&b) = j.zeros.iter().find(|&&b| same_point(a, b)) {
            return Err(Error::SharedZero(format!("{b}")));
        }
    }
    let n = i.degree();
    if n == 0 {
        return Ok(ToeplitzKernel { dim: 0, basis: vec![], division_residuals: vec![], conjugation_residuals: vec![] });
    }
    let rows = confluent_rows(&j.zeros, n);
    let null = nullspace(rows, n);
    let e_i = i.e_poly();
    let e_j = j.e_poly();
    let p_j = j.p_poly();
    let c_i = i.unimodular_constant();
    let c_j = j.unimodular_constant();
    let mut basis = Vec::new();
    let mut div_res = Vec::new();
    let mut conj_res = Vec::new();
    for v in null {
        let p = Poly(v);
        let (q, r) = p.divrem(&p_j);
        div_res.push(r.norm() / p.norm());
        let f = RationalFunction { num: (&q * &e_j).scale(1.0 / c_j), den: e_i.clone() };
        let g = |x: Complex64| c_i * p.reflect().eval(x) / e_i.eval(x);
        let mut worst = 0.0f64;
        for x in [-3.1, -0.7, 0.4, 2.9, 13.0] {
            let z = Complex64::new(x, 0.0);
            let lhs = i.eval(z).conj() * j.eval(z) * f.eval(z);
            worst = worst.max((lhs - g(z).conj()).norm() / (1.0 + lhs.norm()));
        }
        conj_res.push(worst);
        basis.push(f);
    }
    Ok(ToeplitzKernel { dim: basis.len(), basis, division_residuals: div_res, conjugation_residuals: conj_res })
}

/// Rows `d^r/dz^r p(μ) = 0` in the monomial basis of polynomials of degree `< n`.
fn confluent_rows(zeros: &[Complex64], n: usize) -> Vec<Vec<Complex64>> {
    let mut seen: Vec<(Complex64, usize)> = Vec::new();
    for &z in zeros {
        match seen.iter_mut().find(|(w, _)| same_point(*w, z)) {
            Some(e) => e.1 += 1,
            None => seen.push((z, 1)),
        }
    }
    let mut rows = Vec::new();
    for (mu, mult) in seen {
        for r in 0..mult {
            let row: Vec<Complex64> = (0..n)
                .map(|k| {
                    if k < r {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let falling: f64 = ((k - r + 1)..=k).map(|t| t as f64).product();
                        mu.powu((k - r) as u32) * falling
                    }
                })
                .collect();
            let scale = row.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
            rows.push(row.into_iter().map(|c| c / scale).collect());
        }
    }
    rows
}

/// Null-space basis by Gauss–Jordan elimination with partial pivoting.
fn nullspace(mut a: Vec<Vec<Complex64>>, n: usize) -> Vec<Vec<Complex64>> {
    let m = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row >= m {
            break;
        }
        let (best, mag) =
            (row..m).map(|r| (r, a[r][col].norm())).fold((row, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if mag <= 1e-10 {
            continue;
        }
        a.swap(row, best);
        let piv = a[row][col];
        for v in a[row].iter_mut() {
            *v /= piv;
        }
        let pivot_row = a[row].clone();
        for (r, target) in a.iter_mut().enumerate() {
            let f = target[col];
            if r != row && f != Complex64::new(0.0, 0.0) {
                for (t, v) in target.iter_mut().zip(&pivot_row) {
                    *t -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[fc] = Complex64::new(1.0, 0.0);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][fc];
            }
            v
        })
        .collect()
}

/// Remove the zeros that `I` and `J` share (with multiplicity).
pub fn cancel_common_zeros(i: &RationalInner, j: &RationalInner) -> (RationalInner, RationalInner, Vec<Complex64>) {
    let mut jz = j.zeros.clone();
    let mut iz = Vec::new();
    let mut common = Vec::new();
    for &a in &i.zeros {
        if let Some(pos) = jz.iter().position(|&b| same_point(a, b)) {
            common.push(jz.remove(pos));
        } else {
            iz.push(a);
        }
    }
    (RationalInner { zeros: iz, rotation: i.rotation }, RationalInner { zeros: jz, rotation: j.rotation }, common)
}

/// `N[ĪJ]` after cancelling shared zeros.
pub fn toeplitz_kernel_reduced(i: &RationalInner, j: &RationalInner) -> Result<ToeplitzKernel> {
    let (a, b, _) = cancel_common_zeros(i, j);
    toeplitz_kernel_rational(&a, &b)
}

/// `θ ∈ D(I)`, i.e. `N[θ̄ I] ≠ 0`.
pub fn dominance_rational(i: &RationalInner, theta: &RationalInner) -> Result<bool> {
    Ok(toeplitz_kernel_rational(theta, i)?.dim > 0)
}

/// Matrix of `f ↦ P_{K_J}(h f)`, `h = E_I/E_J`, in Takenaka–Malmquist bases.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierOperator {
    /// `deg J` rows, `deg I` columns.
    pub matrix: Vec<Vec<Complex64>>,
    pub singulars: Vec<f64>,
    /// Every entry came from a certified quadrature.
    pub certified: bool,
    /// Square and numerically invertible.
    pub invertible: bool,
}

pub fn multiplier_operator(i: &RationalInner, j: &RationalInner) -> Result<MultiplierOperator> {
    multiplier_operator_with(Exec::default(), i, j)
}

pub fn multiplier_operator_with(exec: Exec, i: &RationalInner, j: &RationalInner) -> Result<MultiplierOperator> {
    let bi = tm_basis(i)?;
    let bj = tm_basis(j)?;
    let (e_i, e_j) = (i.e_poly(), j.e_poly());
    let (n, m) = (bi.len(), bj.len());
    let opts = LineOptions::default();
    let cells = par::map_range(exec, n * m, |idx| {
        let (row, col) = (idx / n, idx % n);
        let f = |x: f64| {
            let z = Complex64::new(x, 0.0);
            e_i.eval(z) / e_j.eval(z) * bi[col].eval(z) * bj[row].eval(z).conj()
        };
        integrate_line(&f, &opts)
    });
    let certified = cells.iter().all(|c| c.certified);
    let matrix: Vec<Vec<Complex64>> = (0..m).map(|r| (0..n).map(|c| cells[r * n + c].value).collect()).collect();
    let singulars = singular_values(&matrix, m, n);
    let smax = singulars.first().copied().unwrap_or(0.0);
    let smin = singulars.last().copied().unwrap_or(0.0);
    let invertible = certified && n == m && smin > 1e-8 * smax.max(1e-300);
    Ok(MultiplierOperator { matrix, singulars, certified, invertible })
}

/// Singular values in decreasing order.
pub fn singular_values(rows: &[Vec<Complex64>], m: usize, n: usize) -> Vec<f64> {
    let a = DMatrix::from_fn(m, n, |r, c| rows[r][c]);
    let mut s: Vec<f64> = a.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Inner products `⟨e_k, e_m⟩` of a list of rational functions on the line.
pub fn gram_matrix(exec: Exec, fs: &[RationalFunction]) -> Vec<Vec<Complex64>> {
    let n = fs.len();
    let opts = LineOptions::default();
    let cells = par::map_range(exec, n * n, |idx| {
        let (r, c) = (idx / n, idx % n);
        let f = |x: f64| {
            let z = Complex64::new(x, 0.0);
            fs[c].eval(z) * fs[r].eval(z).conj()
        };
        integrate_line(&f, &opts).value
    });
    (0..n).map(|r| cells[r * n..(r + 1) * n].to_vec()).collect()
}
