use crate::error::{Error, Result};
use crate::grid::linspace;

/// Solve `phi(x) = t` for every target `t` reachable inside `[lo, hi]`.
///
/// `phi` must be increasing; this is spot-checked on a sample grid.
pub fn monotone_roots<F: Fn(f64) -> f64 + ?Sized>(phi: &F, targets: &[f64], window: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(Error::InvalidInput("empty root window".into()));
    }
    let xs = linspace(lo, hi, 1025);
    let ys: Vec<f64> = xs.iter().map(|&x| phi(x)).collect();
    for i in 1..xs.len() {
        if ys[i] < ys[i - 1] - 1e-12 * (1.0 + ys[i - 1].abs()) {
            return Err(Error::NotMonotone { x: xs[i] });
        }
    }
    let mut out = Vec::new();
    for &t in targets {
        if t < ys[0] || t > ys[ys.len() - 1] {
            continue;
        }
        let j = ys.partition_point(|&y| y < t);
        if j == 0 {
            out.push(xs[0]);
            continue;
        }
        let (mut a, mut b) = (xs[j - 1], xs[j]);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if phi(m) < t {
                a = m;
            } else {
                b = m;
            }
        }
        let x = if (phi(a) - t).abs() <= (phi(b) - t).abs() { a } else { b };
        out.push(x);
    }
    Ok(out)
}
