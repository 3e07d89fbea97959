//! The four worked examples: finite Blaschke products, pulled zeros with an
//! unbounded conjugate, non-transitivity of trivial kernels, and
//! non-transitivity of invertibility.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{logspace, two_sided_grid};
use crate::inner::{Decay, Example3Variant, MifDescriptor, ZeroGenerator, ZeroRule};
use crate::model::{toeplitz_kernel_rational, RationalInner};
use crate::numerics::{adaptive, Tol};
use crate::order::{
    drift_extent, drift_test, lemma3_check, order_verdict, phi_tilde, reduce_pair, DriftReport, OrderVerdict, Relation,
    DRIFT_MARGIN, LEMMA3_BOUND,
};
use crate::par::Exec;

#[derive(Debug, Clone, Serialize)]
pub struct Example1Row {
    pub n: usize,
    pub k: usize,
    /// `dim N[B̄_n B_k]`.
    pub dim: usize,
    pub expected_dim: usize,
    pub relation: String,
    /// `B_n ⪯ B_k` from the verdict.
    pub included: bool,
    pub equivalent: bool,
}

/// The order table for `B_n`, `B_k` with `n, k ≤ max_degree`; `B_n` takes the
/// first `n` zeros of `pool_i` and `B_k` the first `k` of `pool_j`.
pub fn example1(max_degree: usize, pool_i: &[Complex64], pool_j: &[Complex64]) -> Result<Vec<Example1Row>> {
    if pool_i.len() < max_degree || pool_j.len() < max_degree {
        return Err(Error::InvalidInput(format!("need {max_degree} zeros in each pool")));
    }
    let mut rows = Vec::new();
    for n in 0..=max_degree {
        for k in 0..=max_degree {
            let bn = RationalInner::blaschke(pool_i[..n].to_vec())?;
            let bk = RationalInner::blaschke(pool_j[..k].to_vec())?;
            let dim = toeplitz_kernel_rational(&bn, &bk)?.dim;
            let v = order_verdict(&bn.to_mif(), &bk.to_mif());
            rows.push(Example1Row {
                n,
                k,
                dim,
                expected_dim: n.saturating_sub(k),
                relation: v.label(),
                included: matches!(v.relation, Relation::Dominated | Relation::Equivalent) && v.exact,
                equivalent: v.relation == Relation::Equivalent && v.exact,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct Example2Report {
    pub i: MifDescriptor,
    pub j: MifDescriptor,
    pub decay: String,
    /// `inf exp φ̃(I,J)` on the grid, where `exp φ̃(I,J) = |E_I/E_J|` is the
    /// product displayed in the construction; bounded below.
    pub exp_conjugate_inf: f64,
    /// `sup φ̃(I,J)` over `[-2^m, 2^m]` for the listed `m`.
    pub window_exponents: Vec<i32>,
    pub conjugate_sups: Vec<f64>,
    /// `∫ exp(2φ̃) |I'|` over the same windows.
    pub weighted_l2: Vec<f64>,
    /// `max/min` of `(φ_J'/φ_I') exp(2φ̃(J,I))` on the grid.
    pub lemma3_spread: f64,
    pub lemma3_pass: bool,
}

/// `I` with zeros `2^n(1+i)` and `J` with the zeros at `n = 2^k` pulled to
/// `2^n + i c_k`, on `[-2^extent, 2^extent]`.
pub fn example2(decay: Decay, extent: i32) -> Result<Example2Report> {
    let window = [1, (extent + 8) as i64];
    let i = MifDescriptor::from_generator(ZeroGenerator::new(ZeroRule::Example2 { decay, pulled: false }, window)?);
    let j = MifDescriptor::from_generator(ZeroGenerator::new(ZeroRule::Example2 { decay, pulled: true }, window)?);
    let xmax = 2f64.powi(extent);
    let red = reduce_pair(&i, &j);
    // Resolve the pulled zeros: their real parts are where φ̃ peaks.
    let peaks: Vec<f64> = red.j.zeros.iter().filter(|z| z.re <= xmax).map(|z| z.re).collect();
    let mut xs = two_sided_grid(4.0, xmax, 2001, 6000);
    for (&p, z) in peaks.iter().zip(&red.j.zeros) {
        xs.extend((-8..=8).map(|k| p + z.im * k as f64 / 4.0));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let exec = Exec::default();
    let pt = phi_tilde(&i, &j, &xs, exec)?;
    let exp_inf = pt.ys.iter().fold(f64::INFINITY, |m, y| m.min(y.exp()));
    let term = |x: f64, z: &Complex64| {
        let w = z.conj();
        ((Complex64::new(x, 0.0) - w) / (Complex64::i() - w)).norm().ln()
    };
    let pi = i.prepare();
    let integrand = |x: f64| {
        let t: f64 =
            red.i.zeros.iter().map(|z| term(x, z)).sum::<f64>() - red.j.zeros.iter().map(|z| term(x, z)).sum::<f64>();
        (2.0 * t).exp() * pi.darg(x)
    };
    let window_exponents: Vec<i32> = (2..=extent).step_by(2).collect();
    let mut sups = Vec::new();
    let mut l2 = Vec::new();
    for &m in &window_exponents {
        let w = 2f64.powi(m);
        sups.push(
            pt.xs.iter().zip(&pt.ys).filter(|(x, _)| x.abs() <= w).fold(f64::NEG_INFINITY, |a, (_, y)| a.max(*y)),
        );
        let mut cuts = vec![-w, 0.0, w];
        cuts.extend(peaks.iter().filter(|p| p.abs() < w));
        cuts.sort_by(f64::total_cmp);
        l2.push(cuts.windows(2).map(|c| adaptive(&integrand, c[0], c[1], 64, Tol::default()).value).sum::<f64>());
    }
    let l3 = lemma3_check(&i, &j, &xs, LEMMA3_BOUND)?;
    Ok(Example2Report {
        i,
        j,
        decay: decay.to_string(),
        exp_conjugate_inf: exp_inf,
        window_exponents,
        conjugate_sups: sups,
        weighted_l2: l2,
        lemma3_spread: l3.spread,
        lemma3_pass: l3.pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub pair: String,
    pub verdict: OrderVerdict,
    pub drift: Option<DriftReport>,
    pub drift_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Example3Report {
    pub height: f64,
    pub truncation: i64,
    pub pairs: Vec<PairReport>,
    /// `dim N[ĪL]` after cancelling the shared zeros.
    pub il_kernel_dim: usize,
    /// `max |f(z) - c/(z + iC)|` over probe points for the normalised kernel element.
    pub il_kernel_residual: f64,
}

fn example3_mif(variant: Example3Variant, height: f64, n: i64) -> Result<MifDescriptor> {
    Ok(MifDescriptor::from_generator(ZeroGenerator::symmetric(ZeroRule::Example3 { variant, height }, n)?))
}

fn pair_report(name: &str, a: &MifDescriptor, b: &MifDescriptor) -> PairReport {
    let (drift, drift_error) = match drift_test(a, b, drift_extent(a, b), DRIFT_MARGIN) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    PairReport { pair: name.into(), verdict: order_verdict(a, b), drift, drift_error }
}

/// Lattice zeros `n + iC` (I), the right half shifted by ½ (J) and the zero
/// at `iC` removed (L), truncated to `|n| ≤ truncation`.
pub fn example3(height: f64, truncation: i64) -> Result<Example3Report> {
    let i = example3_mif(Example3Variant::I, height, truncation)?;
    let j = example3_mif(Example3Variant::J, height, truncation)?;
    let l = example3_mif(Example3Variant::L, height, truncation)?;
    let pairs = vec![pair_report("I,J", &i, &j), pair_report("J,L", &j, &l), pair_report("I,L", &i, &l)];
    let red = reduce_pair(&i, &l);
    let ri = RationalInner::blaschke(red.i.zeros.clone())?;
    let rl = RationalInner::blaschke(red.j.zeros.clone())?;
    let kernel = toeplitz_kernel_rational(&ri, &rl)?;
    let mut residual = f64::NAN;
    if let Some(f) = kernel.basis.first() {
        let target = |z: Complex64| 1.0 / (z + Complex64::new(0.0, height));
        let probe = Complex64::new(0.0, 1.0);
        let c = f.eval(probe) / target(probe);
        residual = [Complex64::new(3.0, 1.0), Complex64::new(-7.5, 0.2), Complex64::new(0.4, 25.0)]
            .iter()
            .map(|&z| (f.eval(z) - c * target(z)).norm() / (c * target(z)).norm())
            .fold(0.0, f64::max);
    }
    Ok(Example3Report { height, truncation, pairs, il_kernel_dim: kernel.dim, il_kernel_residual: residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArgumentLimits {
    pub pair: String,
    /// Mean of `arg I_b - arg I_a` over the last decade towards `-∞`.
    pub minus_infinity: f64,
    pub plus_infinity: f64,
    /// `ψ(+∞) - ψ(-∞)`; the symbol is invertible when this lies strictly inside `(-π, π)`.
    pub jump: f64,
    pub invertible_evidence: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Example4Report {
    pub height: f64,
    pub truncation: i64,
    pub functions: Vec<MifDescriptor>,
    pub limits: Vec<ArgumentLimits>,
}

/// `I_k`: zeros `n + iC` for `n < 0` and `n - (k-1)/3 + iC` for `n ≥ 0`, rotated by
/// `e^{-i(k-1)π/3}`, so consecutive arguments differ by about `∓π/3` at `∓∞`.
pub fn example4(height: f64, truncation: i64) -> Result<Example4Report> {
    let functions: Vec<MifDescriptor> = (1..=3)
        .map(|k| {
            let shift = (k - 1) as f64 / 3.0;
            let zeros = (-truncation..=truncation)
                .map(|n| {
                    let x = if n >= 0 { n as f64 - shift } else { n as f64 };
                    Complex64::new(x, height)
                })
                .collect();
            MifDescriptor::new(zeros, 0.0, Complex64::from_polar(1.0, -shift * PI))
        })
        .collect::<Result<_>>()?;
    let xmax = (truncation as f64 / 10.0).max(10.0);
    let tail = logspace(xmax / 10.0, xmax, 200);
    let limits = [(0, 1), (1, 2), (0, 2)]
        .iter()
        .map(|&(a, b)| {
            let (pa, pb) = (functions[a].prepare(), functions[b].prepare());
            let mean = |s: f64| tail.iter().map(|&x| pb.arg(s * x) - pa.arg(s * x)).sum::<f64>() / tail.len() as f64;
            let (minus, plus) = (mean(-1.0), mean(1.0));
            let jump = plus - minus;
            ArgumentLimits {
                pair: format!("I{},I{}", a + 1, b + 1),
                minus_infinity: minus,
                plus_infinity: plus,
                jump,
                invertible_evidence: jump.abs() < PI - DRIFT_MARGIN,
            }
        })
        .collect();
    Ok(Example4Report { height, truncation, functions, limits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_small_table() {
        let pool_i: Vec<Complex64> = (0..3).map(|k| Complex64::new(k as f64 - 1.0, 1.0 + k as f64)).collect();
        let pool_j: Vec<Complex64> = (0..3).map(|k| Complex64::new(0.5 * k as f64, 0.7 + k as f64)).collect();
        for r in example1(3.min(pool_i.len()), &pool_i, &pool_j).unwrap() {
            assert_eq!(r.dim, r.expected_dim, "{r:?}");
            assert_eq!(r.included, r.n <= r.k);
            assert_eq!(r.equivalent, r.n == r.k);
        }
    }

    #[test]
    fn example4_jumps() {
        let r = example4(10.0, 20000).unwrap();
        assert!((r.limits[0].jump - 2.0 * PI / 3.0).abs() < 0.05, "{:?}", r.limits);
        assert!(r.limits[0].invertible_evidence && r.limits[1].invertible_evidence);
        assert!(!r.limits[2].invertible_evidence);
    }
}
