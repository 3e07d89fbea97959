use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::conjugate::{phi_tilde, reduce_pair};
use crate::error::{Error, Result};
use crate::grid::{logspace, two_sided_grid, GridFunction};
use crate::inner::{darg_grid, MifDescriptor};
use crate::numerics::{integrate_grid, integrate_line, linear_fit, LineOptions, TailKind};
use crate::par::{self, Exec};

/// Default margin for drift comparisons, in radians.
pub const DRIFT_MARGIN: f64 = 0.1;
/// Default bound on `max r / min r` for the derivative-ratio test.
pub const LEMMA3_BOUND: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftVerdict {
    BothTrivialEvidence,
    KernelNontrivialEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub verdict: DriftVerdict,
    /// `limsup_{-∞} ψ - liminf_{+∞} ψ` for `ψ = arg J - arg I`.
    pub drift: f64,
    /// The same quantity for `-ψ`.
    pub mirrored_drift: f64,
    /// Drift above `π + margin`: `N[ĪJ]` is nontrivial.
    pub ij_nontrivial: bool,
    /// Mirrored drift above `π + margin`: `N[J̄I]` is nontrivial.
    pub ji_nontrivial: bool,
    pub left_spread: f64,
    pub right_spread: f64,
}

/// Compare the limits of `ψ = arg J - arg I` at `∓∞`, estimated on the last
/// decade `[xmax/10, xmax]` of each side.
pub fn drift_test(i: &MifDescriptor, j: &MifDescriptor, xmax: f64, margin: f64) -> Result<DriftReport> {
    drift_test_with(Exec::default(), i, j, xmax, margin)
}

pub fn drift_test_with(
    exec: Exec,
    i: &MifDescriptor,
    j: &MifDescriptor,
    xmax: f64,
    margin: f64,
) -> Result<DriftReport> {
    let red = reduce_pair(i, j);
    let (pi, pj) = (red.i.prepare(), red.j.prepare());
    let tail = logspace(xmax / 10.0, xmax, 200);
    let right = par::map(exec, &tail, |&x| pj.arg(x) - pi.arg(x));
    let left = par::map(exec, &tail, |&x| pj.arg(-x) - pi.arg(-x));
    let spread = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
        (lo, hi, hi - lo)
    };
    let (l_min, l_max, l_spread) = spread(&left);
    let (r_min, r_max, r_spread) = spread(&right);
    if l_spread > margin || r_spread > margin {
        return Err(Error::TailNotSettled(format!(
            "argument difference varies by {:.3} (left) and {:.3} (right) over the last decade",
            l_spread, r_spread
        )));
    }
    let drift = l_max - r_min;
    let mirrored = r_max - l_min;
    let ij = drift > PI + margin;
    let ji = mirrored > PI + margin;
    let verdict = if ij || ji {
        DriftVerdict::KernelNontrivialEvidence
    } else if drift < PI - margin && mirrored < PI - margin {
        DriftVerdict::BothTrivialEvidence
    } else {
        DriftVerdict::Inconclusive
    };
    Ok(DriftReport {
        verdict,
        drift,
        mirrored_drift: mirrored,
        ij_nontrivial: ij,
        ji_nontrivial: ji,
        left_spread: l_spread,
        right_spread: r_spread,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma3Report {
    pub ratio: GridFunction,
    /// `max r / min r` over the grid.
    pub spread: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `r = (φ_J'/φ_I') · exp(2φ̃(J,I))`; equivalence forces `r ≍ 1`.
pub fn lemma3_check(i: &MifDescriptor, j: &MifDescriptor, xs: &[f64], bound: f64) -> Result<Lemma3Report> {
    let exec = Exec::default();
    let pt = phi_tilde(j, i, xs, exec)?;
    let di = darg_grid(i, xs, exec);
    let dj = darg_grid(j, xs, exec);
    let ys: Vec<f64> = (0..xs.len()).map(|k| dj.ys[k] / di.ys[k] * (2.0 * pt.ys[k]).exp()).collect();
    let (lo, hi) = ys.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &y| (a.min(y), b.max(y)));
    let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    Ok(Lemma3Report {
        ratio: GridFunction { xs: xs.to_vec(), ys, tag: Some("lemma3-ratio".into()) },
        spread,
        bound,
        pass: spread <= bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub holds: bool,
    /// Set when a tail could not be settled and `holds` is a default.
    pub flagged: bool,
    /// `∫ |J'| e^{-2φ̃}` (infinite when divergent).
    pub integral_j: f64,
    /// `∫ |I'| e^{2φ̃}`.
    pub integral_i: f64,
    pub note: String,
}

/// Finiteness threshold for the two integrals.
pub const THEOREM2_THRESHOLD: f64 = 1e8;

/// Sufficient condition for equivalence: `|J'|^{1/2} e^{-φ̃}` and `|I'|^{1/2} e^{φ̃}` in `L²`.
pub fn theorem2_sufficient(i: &MifDescriptor, j: &MifDescriptor) -> Result<Theorem2Report> {
    let red = reduce_pair(i, j);
    if red.i.zeros.is_empty() && red.j.zeros.is_empty() && red.i.exp_mass == red.j.exp_mass {
        return Ok(Theorem2Report {
            holds: true,
            flagged: false,
            integral_j: 0.0,
            integral_i: 0.0,
            note: "identical up to a unimodular constant".into(),
        });
    }
    let exec = Exec::default();
    let xs = two_sided_grid(50.0, 1e6, 4001, 800);
    let pt = match phi_tilde(i, j, &xs, exec) {
        Ok(p) => p,
        Err(Error::TailDivergent { exponent }) => {
            return Ok(Theorem2Report {
                holds: false,
                flagged: true,
                integral_j: f64::INFINITY,
                integral_i: f64::INFINITY,
                note: format!("conjugate undefined: argument difference grows like |x|^{exponent:.2}"),
            })
        }
        Err(e) => return Err(e),
    };
    let di = darg_grid(i, &xs, exec);
    let dj = darg_grid(j, &xs, exec);
    let gj = GridFunction {
        xs: xs.clone(),
        ys: (0..xs.len()).map(|k| dj.ys[k] * (-2.0 * pt.ys[k]).exp()).collect(),
        tag: None,
    };
    let gi = GridFunction {
        xs: xs.clone(),
        ys: (0..xs.len()).map(|k| di.ys[k] * (2.0 * pt.ys[k]).exp()).collect(),
        tag: None,
    };
    let eval = |g: &GridFunction| -> (f64, bool) {
        match integrate_grid(g) {
            Ok(r) if r.certified && r.value < THEOREM2_THRESHOLD => (r.value, false),
            Ok(r) if r.certified => (r.value, false),
            Ok(_) => (f64::INFINITY, false),
            Err(_) => (f64::INFINITY, true),
        }
    };
    let (vj, fj) = eval(&gj);
    let (vi, fi) = eval(&gi);
    let holds = vj < THEOREM2_THRESHOLD && vi < THEOREM2_THRESHOLD;
    Ok(Theorem2Report {
        holds,
        flagged: fj || fi,
        integral_j: vj,
        integral_i: vi,
        note: if fj || fi { "tail model rejected".into() } else { String::new() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma4Verdict {
    EquivalentEvidence,
    NotEquivalentEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma4Report {
    pub verdict: Lemma4Verdict,
    /// `sup |φ̃|` over `[-W 2^k, W 2^k]`, `k = 0..=doublings`.
    pub sups: Vec<f64>,
    /// `max/min` of `φ_I'/φ_J'` on the comparability grid.
    pub derivative_ratio_spread: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Lemma4Options {
    pub window: f64,
    pub doublings: usize,
    /// `sup |φ̃|` must stay below this to count as bounded.
    pub bound: f64,
    /// Per-doubling growth that counts as unbounded.
    pub growth: f64,
    /// Largest admissible derivative ratio spread.
    pub comparability: f64,
    /// Extent of the comparability grid.
    pub comparability_extent: f64,
}

impl Default for Lemma4Options {
    fn default() -> Self {
        Self {
            window: 16.0,
            doublings: 3,
            bound: 10.0,
            growth: 0.1,
            comparability: LEMMA3_BOUND,
            comparability_extent: 1e6,
        }
    }
}

/// With comparable derivatives, equivalence is boundedness of `φ̃`.
pub fn lemma4_equiv_comparable(i: &MifDescriptor, j: &MifDescriptor, opts: &Lemma4Options) -> Result<Lemma4Report> {
    let exec = Exec::default();
    let grid = two_sided_grid(opts.window, opts.comparability_extent, 801, 600);
    let di = darg_grid(i, &grid, exec);
    let dj = darg_grid(j, &grid, exec);
    let ratios: Vec<f64> = di.ys.iter().zip(&dj.ys).map(|(a, b)| a / b).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(spread <= opts.comparability) {
        return Err(Error::NotApplicable(format!("derivative ratio varies by a factor {spread:.3e}")));
    }
    let outer = opts.window * 2f64.powi(opts.doublings as i32);
    let xs = crate::grid::linspace(-outer, outer, 4001);
    let pt = phi_tilde(i, j, &xs, exec)?;
    let sups: Vec<f64> = (0..=opts.doublings)
        .map(|k| {
            let w = opts.window * 2f64.powi(k as i32);
            pt.xs.iter().zip(&pt.ys).filter(|(x, _)| x.abs() <= w).fold(0.0f64, |m, (_, y)| m.max(y.abs()))
        })
        .collect();
    let inc: Vec<f64> = sups.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *sups.last().unwrap_or(&0.0);
    let verdict = if inc.len() >= 3 && inc[inc.len() - 3..].iter().all(|&d| d > opts.growth) {
        Lemma4Verdict::NotEquivalentEvidence
    } else if last < opts.bound && inc.last().is_none_or(|&d| d < 0.5 * opts.growth) {
        Lemma4Verdict::EquivalentEvidence
    } else {
        Lemma4Verdict::Inconclusive
    };
    Ok(Lemma4Report { verdict, sups, derivative_ratio_spread: spread })
}

#[derive(Debug, Clone, Serialize)]
pub struct LogH2Report {
    pub pass: bool,
    /// Fitted power of `|f|` at infinity.
    pub poisson_exponent: f64,
    /// Fitted power of `e^{2f}` at infinity.
    pub exp_exponent: f64,
    pub poisson_value: f64,
    pub exp_value: f64,
}

/// Membership of `f` in `Log|H²|`: `f ∈ L¹(dx/(1+x²))` and `e^{f} ∈ L²`.
pub fn logh2_membership<F: Fn(f64) -> f64 + Sync>(f: &F) -> Result<LogH2Report> {
    let opts = LineOptions { tail: TailKind::Algebraic, ..Default::default() };
    let p = |x: f64| f(x).abs() / (1.0 + x * x);
    let e = |x: f64| (2.0 * f(x)).exp();
    let rp = integrate_line(&p, &opts);
    let re = integrate_line(&e, &opts);
    for r in [&rp, &re] {
        if !r.certified && r.tail_exponent < -1.0 {
            return Err(Error::TailModelUnfit { r2: f64::NAN });
        }
    }
    Ok(LogH2Report {
        pass: rp.certified && re.certified,
        poisson_exponent: rp.tail_exponent + 2.0,
        exp_exponent: re.tail_exponent,
        poisson_value: rp.value,
        exp_value: re.value,
    })
}

/// Grid version of [`logh2_membership`].
pub fn logh2_membership_grid(f: &GridFunction) -> Result<LogH2Report> {
    let p = f.map(f64::abs);
    let rp = crate::numerics::poisson_integral_grid(&p)?;
    let re = integrate_grid(&f.map(|y| (2.0 * y).exp()))?;
    Ok(LogH2Report {
        pass: rp.certified && re.certified,
        poisson_exponent: rp.tail_exponent,
        exp_exponent: re.tail_exponent,
        poisson_value: rp.value,
        exp_value: re.value,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Necessary {
    pub report: LogH2Report,
    /// The zero of smallest modulus, standing in for the factor removed in the argument.
    #[serde(with = "crate::cser::complex")]
    pub zero: Complex64,
}

/// Necessary condition for equivalence: `φ̃ - log(1+|x|) ∈ Log|H²|`.
pub fn theorem2_necessary(i: &MifDescriptor, j: &MifDescriptor) -> Result<Theorem2Necessary> {
    let zeros = i.all_zeros().into_iter().chain(j.all_zeros()).collect::<Vec<_>>();
    let zero = zeros
        .iter()
        .copied()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .ok_or_else(|| Error::NotApplicable("neither function has a zero".into()))?;
    let xs = two_sided_grid(50.0, 1e6, 4001, 800);
    let pt = phi_tilde(i, j, &xs, Exec::default())?;
    let f = GridFunction { ys: pt.xs.iter().zip(&pt.ys).map(|(x, y)| y - (1.0 + x.abs()).ln()).collect(), ..pt };
    Ok(Theorem2Necessary { report: logh2_membership_grid(&f)?, zero })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub slope: f64,
    pub r2: f64,
    /// Slope above `-3/2 + margin`: the total inner component is a base element.
    pub base_element_evidence: bool,
}

/// Slope of `log|f(iy)|` against `log y` over `[ymax/100, ymax]`.
pub fn decay_rate_iy<F: Fn(Complex64) -> Complex64>(f: &F, ymax: f64, margin: f64) -> Result<DecayReport> {
    let ys = logspace(ymax / 100.0, ymax, 41);
    let mut lx = Vec::with_capacity(ys.len());
    let mut ly = Vec::with_capacity(ys.len());
    for &y in &ys {
        let v = f(Complex64::new(0.0, y)).norm();
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NumericalUnderflow { y });
        }
        lx.push(y.ln());
        ly.push(v.ln());
    }
    let fit = linear_fit(&lx, &ly);
    Ok(DecayReport { slope: fit.slope, r2: fit.r2, base_element_evidence: fit.slope > -1.5 + margin })
}
