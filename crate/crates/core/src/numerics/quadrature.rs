//! Adaptive Gauss–Kronrod quadrature on finite intervals, half-lines and the line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use super::fit::{linear_fit, power_fit, PowerFit};
use crate::grid::logspace;

/// Scalar types the integrators accept.
pub trait QuadValue:
    Copy + Send + Sync + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One 15-point Kronrod panel: value and the Gauss–Kronrod difference.
pub fn gk15<V: QuadValue, F: Fn(f64) -> V + ?Sized>(f: &F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tol {
    fn default() -> Self {
        Self { abs: 1e-11, rel: 1e-11, max_panels: 4000 }
    }
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Outcome of an adaptive integration on a finite interval.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<V> {
    pub value: V,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive GK15 on `[a, b]`, starting from `initial` equal panels.
pub fn adaptive<V, F>(f: &F, a: f64, b: f64, initial: usize, tol: Tol) -> Adaptive<V>
where
    V: QuadValue,
    F: Fn(f64) -> V + ?Sized,
{
    let n0 = initial.max(1);
    let mut heap = BinaryHeap::with_capacity(n0 * 4);
    for i in 0..n0 {
        let lo = a + (b - a) * i as f64 / n0 as f64;
        let hi = a + (b - a) * (i + 1) as f64 / n0 as f64;
        let (value, err) = gk15(f, lo, hi);
        heap.push(Panel { a: lo, b: hi, value, err });
    }
    loop {
        let total = heap.iter().fold(V::default(), |s, p| s + p.value);
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let target = tol.abs.max(tol.rel * total.magnitude());
        if err <= target {
            return Adaptive { value: total, error: err, converged: true };
        }
        if heap.len() >= tol.max_panels {
            return Adaptive { value: total, error: err, converged: false };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(1e-300) {
            heap.push(worst);
            let total = heap.iter().fold(V::default(), |s, p| s + p.value);
            return Adaptive { value: total, error: err, converged: false };
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }
}

/// `∫_a^{±∞} f` through the map `t = a ± L u/(1-u)`.
pub fn half_line<V, F>(f: &F, a: f64, scale: f64, towards_plus: bool, tol: Tol) -> Adaptive<V>
where
    V: QuadValue,
    F: Fn(f64) -> V + ?Sized,
{
    let sgn = if towards_plus { 1.0 } else { -1.0 };
    let g = |u: f64| {
        let w = 1.0 - u;
        let t = a + sgn * scale * u / w;
        if !t.is_finite() {
            return V::default();
        }
        f(t) * (scale / (w * w))
    };
    adaptive(&g, 0.0, 1.0, 16, tol)
}

/// How the integrand behaves at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// Non-oscillatory power-like decay: tails by change of variables.
    Algebraic,
    /// Oscillating integrand: doubling blocks with geometric extrapolation.
    Oscillatory,
}

#[derive(Debug, Clone, Copy)]
pub struct LineOptions {
    /// Half-width of the adaptively integrated core.
    pub core: f64,
    pub tail: TailKind,
    pub tol: Tol,
    /// Oscillatory path: outermost block edge.
    pub x_max: f64,
    /// Oscillatory path: panel width inside blocks.
    pub panel: f64,
    /// Algebraic path: start of the decade used for the tail fit.
    pub fit_start: f64,
}

impl Default for LineOptions {
    fn default() -> Self {
        Self { core: 16.0, tail: TailKind::Algebraic, tol: Tol::default(), x_max: 32768.0, panel: 1.0, fit_start: 1e4 }
    }
}

/// Result of an improper integral together with its tail model.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureResult<V> {
    pub value: V,
    pub error: f64,
    /// Fitted power of the integrand at infinity.
    pub tail_exponent: f64,
    pub certified: bool,
}

/// Convergence margin on the tail exponent: the integrand must decay faster than `x^{-1+margin}`.
pub const TAIL_MARGIN: f64 = 0.02;
/// Fit-quality gate for tail models.
pub const R2_GATE: f64 = 0.99;

/// Power-law fit of `|f|` over `[x0, 10 x0]` on both sides of the origin.
pub fn tail_fit<V, F>(f: &F, x0: f64) -> PowerFit
where
    V: QuadValue,
    F: Fn(f64) -> V + ?Sized,
{
    let xs = logspace(x0, 10.0 * x0, 33);
    let right: Vec<f64> = xs.iter().map(|&x| f(x).magnitude()).collect();
    let left: Vec<f64> = xs.iter().map(|&x| f(-x).magnitude()).collect();
    let fr = power_fit(&xs, &right);
    let fl = power_fit(&xs, &left);
    match (fr.vanishing, fl.vanishing) {
        (true, true) => fr,
        (true, false) => fl,
        (false, true) => fr,
        (false, false) => PowerFit { exponent: fr.exponent.max(fl.exponent), r2: fr.r2.min(fl.r2), vanishing: false },
    }
}

/// `∫_ℝ f` with a certified or flagged tail.
pub fn integrate_line<V, F>(f: &F, opts: &LineOptions) -> QuadratureResult<V>
where
    V: QuadValue,
    F: Fn(f64) -> V + ?Sized,
{
    match opts.tail {
        TailKind::Algebraic => integrate_algebraic(f, opts),
        TailKind::Oscillatory => integrate_oscillatory(f, opts),
    }
}

fn integrate_algebraic<V, F>(f: &F, opts: &LineOptions) -> QuadratureResult<V>
where
    V: QuadValue,
    F: Fn(f64) -> V + ?Sized,
{
    let fit = tail_fit(f, opts.fit_start);
    let core = adaptive(f, -opts.core, opts.core, 32, opts.tol);
    let exponent = fit.exponent;
    if !(exponent < -1.0 - TAIL_MARGIN) {
        return QuadratureResult { value: core.value, error: f64::INFINITY, tail_exponent: exponent, certified: false };
    }
    let scale = opts.core.max(1.0);
    let r = half_line(f, opts.core, scale, true, opts.tol);
    let l = half_line(f, -opts.core, scale, false, opts.tol);
    QuadratureResult {
        value: core.value + r.value + l.value,
        error: core.error + r.error + l.error,
        tail_exponent: exponent,
        certified: fit.r2 >= R2_GATE && core.converged && r.converged && l.converged,
    }
}

/// Fixed GK15 panels of width about `w` over `[a, b]`.
pub fn panels<V, F>(f: &F, a: f64, b: f64, w: f64) -> (V, f64)
where
    V: QuadValue,
    F: Fn(f64) -> V + ?Sized,
{
    let n = (((b - a) / w).ceil() as usize).clamp(1, 1 << 20);
    let h = (b - a) / n as f64;
    let mut s = V::default();
    let mut e = 0.0;
    for i in 0..n {
        let lo = a + h * i as f64;
        let (v, err) = gk15(f, lo, lo + h);
        s = s + v;
        e += err;
    }
    (s, e)
}

fn integrate_oscillatory<V, F>(f: &F, opts: &LineOptions) -> QuadratureResult<V>
where
    V: QuadValue,
    F: Fn(f64) -> V + ?Sized,
{
    let x0 = opts.core.max(opts.panel);
    let core = adaptive(f, -x0, x0, ((2.0 * x0 / opts.panel).ceil() as usize).max(8), opts.tol);
    let mut total = core.value;
    let mut err = core.error;
    let mut blocks: Vec<(f64, V)> = Vec::new();
    let mut x = x0;
    while x < opts.x_max {
        let (r, er) = panels(f, x, 2.0 * x, opts.panel);
        let (l, el) = panels(f, -2.0 * x, -x, opts.panel);
        let b = r + l;
        total = total + b;
        err += er + el;
        blocks.push((x, b));
        x *= 2.0;
    }
    let k = blocks.len();
    if k < 4 {
        return QuadratureResult { value: total, error: f64::INFINITY, tail_exponent: f64::NAN, certified: false };
    }
    let last = &blocks[k - 4..];
    if last.iter().all(|(_, b)| b.magnitude() < 1e-280) {
        return QuadratureResult { value: total, error: err, tail_exponent: f64::NEG_INFINITY, certified: true };
    }
    let lx: Vec<f64> = last.iter().map(|(x, _)| x.ln()).collect();
    let ly: Vec<f64> = last.iter().map(|(_, b)| b.magnitude().max(1e-300).ln()).collect();
    let fit = linear_fit(&lx, &ly);
    let exponent = fit.slope - 1.0;
    if !(fit.slope < -TAIL_MARGIN) {
        return QuadratureResult { value: total, error: f64::INFINITY, tail_exponent: exponent, certified: false };
    }
    let rho = 2f64.powf(fit.slope);
    let tail = last[3].1 * (rho / (1.0 - rho));
    err += tail.magnitude() * 1e-3;
    QuadratureResult {
        value: total + tail,
        error: err,
        tail_exponent: exponent,
        certified: fit.r2 >= R2_GATE && core.converged,
    }
}
