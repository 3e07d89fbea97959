use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::{classify, interval_weight, Classification, IntervalFamily, DOUBLINGS};
use crate::error::{Error, Result};
use crate::inner::{ZeroGenerator, ZeroRule};
use crate::par::{self, Exec};

/// Largest window half-width considered.
pub const MAX_EXTENT: f64 = 1073741824.0;

/// Real sequences named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpec {
    /// `βℤ`
    Arith(f64),
    /// `{n² : n ≥ 0}`
    Squares,
    /// `{±q^n : n ≥ 0}`
    Geometric(f64),
    List(Vec<f64>),
}

impl FromStr for SequenceSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown sequence spec {s:?}; use arith:β, squares or geometric:q"));
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<f64> { a.ok_or_else(bad)?.parse::<f64>().map_err(|_| bad()) };
        match name {
            "arith" => {
                let b = num(arg)?;
                if b > 0.0 {
                    Ok(SequenceSpec::Arith(b))
                } else {
                    Err(bad())
                }
            }
            "squares" => Ok(SequenceSpec::Squares),
            "geometric" => {
                let q = num(arg)?;
                if q > 1.0 {
                    Ok(SequenceSpec::Geometric(q))
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Arith(b) => write!(f, "arith:{b}"),
            SequenceSpec::Squares => write!(f, "squares"),
            SequenceSpec::Geometric(q) => write!(f, "geometric:{q}"),
            SequenceSpec::List(v) => write!(f, "list[{}]", v.len()),
        }
    }
}

/// Sorted points inside `[-L, L]` and the window `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub points: Vec<f64>,
    pub extent: f64,
}

impl Sample {
    /// Sort and keep the points inside `[-extent, extent]`.
    pub fn new(mut points: Vec<f64>, extent: f64) -> Self {
        points.retain(|x| x.abs() <= extent);
        points.sort_by(f64::total_cmp);
        Self { points, extent }
    }
}

impl SequenceSpec {
    /// At most about `budget` points on a window the sequence fully covers.
    pub fn sample(&self, budget: usize) -> Sample {
        let half = (budget / 2).max(1) as i64;
        match *self {
            SequenceSpec::Arith(b) => {
                let pts = (-half..=half).map(|n| b * n as f64).collect();
                Sample::new(pts, (b * half as f64).min(MAX_EXTENT))
            }
            SequenceSpec::Squares => {
                let n = (budget as f64).min(MAX_EXTENT.sqrt()) as i64;
                Sample::new((0..=n).map(|k| (k * k) as f64).collect(), (n * n) as f64)
            }
            SequenceSpec::Geometric(q) => {
                let mut pts = Vec::new();
                let mut x = 1.0;
                while x <= MAX_EXTENT && pts.len() < budget {
                    pts.push(x);
                    pts.push(-x);
                    x *= q;
                }
                Sample::new(pts, MAX_EXTENT)
            }
            SequenceSpec::List(ref v) => {
                let extent = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                Sample::new(v.clone(), extent)
            }
        }
    }
}

/// `λ' = 1/Re(1/λ)`; purely imaginary points have no projection and are dropped.
pub fn project(zeros: &[Complex64]) -> Vec<f64> {
    zeros
        .iter()
        .filter_map(|z| {
            let r = (1.0 / z).re;
            (r != 0.0 && r.is_finite()).then(|| 1.0 / r)
        })
        .collect()
}

/// Projected zeros of a generator on a window holding about `budget` zeros.
pub fn generator_sample(rule: &ZeroRule, budget: usize) -> Result<Sample> {
    let n = match rule {
        ZeroRule::Geometric { .. } | ZeroRule::Example2 { .. } => 60,
        _ => (budget / 2).max(1) as i64,
    };
    let g = ZeroGenerator::symmetric(rule.clone(), n)?;
    let pts = project(&g.points());
    let right = pts.iter().fold(0.0f64, |m, &x| m.max(x));
    let left = pts.iter().fold(0.0f64, |m, &x| m.max(-x));
    let extent = match (left > 0.0, right > 0.0) {
        (true, true) => left.min(right),
        _ => left.max(right),
    };
    Ok(Sample::new(pts, extent.min(MAX_EXTENT)))
}

#[derive(Debug, Clone, Copy)]
pub struct DensityOptions {
    /// Point budget for generated sequences.
    pub budget: usize,
    pub bisection_depth: usize,
    pub exec: Exec,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self { budget: 1 << 14, bisection_depth: 20, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmDensity {
    pub dstar_counting: f64,
    /// `2π · dstar_counting`, the unit of exponential type.
    pub dstar_type: f64,
    pub witness: IntervalFamily,
    /// Classification of the witness family at the reported density.
    pub classification: Classification,
    pub extent: f64,
}

fn offsets(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=32.min(n.saturating_sub(1))).collect();
    let mut m = 32usize;
    while m + 1 < n {
        m = ((m as f64) * 1.15).ceil() as usize;
        v.push(m.min(n - 1));
    }
    v.dedup();
    v
}

/// Heaviest disjoint family of `[p_i, p_j]` with `j-i+1 ≥ d (p_j - p_i)`.
fn best_family(p: &[f64], d: f64, offs: &[usize], trace: bool) -> (f64, Vec<(f64, f64)>) {
    let n = p.len();
    let mut best = vec![0.0; n + 1];
    let mut choice = vec![usize::MAX; n + 1];
    for j in 0..n {
        best[j + 1] = best[j];
        for &m in offs {
            if m > j {
                break;
            }
            let i = j - m;
            let len = p[j] - p[i];
            if len > 0.0 && (m + 1) as f64 >= d * len {
                let cand = best[i] + interval_weight(p[i], p[j], 0.0);
                if cand > best[j + 1] {
                    best[j + 1] = cand;
                    choice[j + 1] = i;
                }
            }
        }
    }
    let mut fam = Vec::new();
    if trace {
        let mut j = n;
        while j > 0 {
            if choice[j] == usize::MAX {
                j -= 1;
            } else {
                fam.push((p[choice[j]], p[j - 1]));
                j = choice[j];
            }
        }
        fam.reverse();
    }
    (best[n], fam)
}

fn window_sums(s: &Sample, d: f64, exec: Exec) -> Vec<f64> {
    par::map_range(exec, DOUBLINGS + 1, |k| {
        let w = s.extent / 2f64.powi((DOUBLINGS - k) as i32);
        let lo = s.points.partition_point(|&x| x < -w);
        let hi = s.points.partition_point(|&x| x <= w);
        let pts = &s.points[lo..hi];
        best_family(pts, d, &offsets(pts.len()), false).0
    })
}

/// Largest number of points in a closed unit interval.
fn max_unit_count(p: &[f64]) -> usize {
    let mut best = 0;
    let mut i = 0;
    for j in 0..p.len() {
        while p[j] - p[i] > 1.0 {
            i += 1;
        }
        best = best.max(j - i + 1);
    }
    best
}

/// Exterior Beurling–Malliavin density of a real sample.
///
/// Bisects over `d`; at each `d` the heaviest disjoint family of intervals with
/// counting ratio at least `d` is found by dynamic programming on nested
/// windows, and `d` counts as admissible when the weight sums keep growing.
pub fn bm_density(sample: &Sample, opts: &DensityOptions) -> Result<BmDensity> {
    if sample.points.len() < 16 || !(sample.extent > 0.0) {
        return Err(Error::WindowExhausted(format!(
            "only {} points on a window of half-width {}",
            sample.points.len(),
            sample.extent
        )));
    }
    let mut lo = 0.0;
    let mut hi = 2.0 * max_unit_count(&sample.points) as f64 + 1.0;
    for _ in 0..opts.bisection_depth {
        let d = 0.5 * (lo + hi);
        if classify(&window_sums(sample, d, opts.exec)) == Classification::Long {
            lo = d;
        } else {
            hi = d;
        }
    }
    let (_, intervals) = best_family(&sample.points, lo, &offsets(sample.points.len()), true);
    let classification = classify(&window_sums(sample, lo, opts.exec));
    Ok(BmDensity {
        dstar_counting: lo,
        dstar_type: 2.0 * std::f64::consts::PI * lo,
        witness: IntervalFamily { intervals, kappa: 0.0, extent: sample.extent, clipped: false },
        classification,
        extent: sample.extent,
    })
}
