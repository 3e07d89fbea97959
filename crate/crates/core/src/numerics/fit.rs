//! Least-squares fits used for tail models.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the data have no spread.
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let scale = syy.max(1e-300);
    // A model that reproduces the data to ~1e-6 counts as a perfect fit even
    // when the data themselves barely vary.
    let r2 = if ss_res <= 1e-12 * n { 1.0 } else { 1.0 - ss_res / scale };
    LinearFit { slope, intercept, r2 }
}

/// Power-law model `|y| ≈ A x^p` fitted in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub r2: f64,
    /// Every sample was numerically zero; the exponent is `-inf`.
    pub vanishing: bool,
}

pub fn power_fit(xs: &[f64], values: &[f64]) -> PowerFit {
    const TINY: f64 = 1e-280;
    if values.iter().all(|v| v.abs() < TINY) {
        return PowerFit { exponent: f64::NEG_INFINITY, r2: 1.0, vanishing: true };
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(values)
        .filter(|(_, v)| v.abs() >= TINY && v.is_finite())
        .map(|(&x, v)| (x.abs().ln(), v.abs().ln()))
        .unzip();
    if lx.len() < 3 {
        return PowerFit { exponent: f64::NAN, r2: 0.0, vanishing: false };
    }
    let fit = linear_fit(&lx, &ly);
    // Samples that dropped out as zeros make the model suspect.
    let r2 = if lx.len() < xs.len() { fit.r2.min(0.0) } else { fit.r2 };
    PowerFit { exponent: fit.slope, r2, vanishing: false }
}
