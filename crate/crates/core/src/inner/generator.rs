use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decay of the pulled-in heights `c_k` in the Example 2 construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Decay {
    /// `c_k = 1/k`
    Harmonic,
    /// `c_k = k^{-p}`
    Power(f64),
}

impl Decay {
    pub fn height(&self, k: u32) -> f64 {
        match *self {
            Decay::Harmonic => 1.0 / k as f64,
            Decay::Power(p) => (k as f64).powf(-p),
        }
    }
}

impl FromStr for Decay {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace(' ', "");
        if t == "1/k" {
            return Ok(Decay::Harmonic);
        }
        if let Some(p) = t.strip_prefix("k^-") {
            let p: f64 = p.parse().map_err(|_| Error::InvalidInput(format!("bad decay exponent in {s:?}")))?;
            if p > 0.0 {
                return Ok(Decay::Power(p));
            }
        }
        Err(Error::InvalidInput(format!("decay must be \"1/k\" or \"k^-p\" with p > 0, got {s:?}")))
    }
}

impl fmt::Display for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::Harmonic => write!(f, "1/k"),
            Decay::Power(p) => write!(f, "k^-{p}"),
        }
    }
}

impl TryFrom<String> for Decay {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Decay> for String {
    fn from(d: Decay) -> String {
        d.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Example3Variant {
    I,
    J,
    L,
}

/// Deterministic index-to-zero rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ZeroRule {
    /// `step·n + offset + i·height`, `n ∈ ℤ`.
    Arith { step: f64, offset: f64, height: f64 },
    /// `(re + i·im)·ratio^n`, `n ≥ 1`.
    Geometric { ratio: f64, re: f64, im: f64 },
    /// `2^n(1+i)`, `n ≥ 1`; when `pulled`, the zeros with `n = 2^k` move to `2^n + i c_k`.
    Example2 { decay: Decay, pulled: bool },
    /// Zeros `n + iC`; `J` shifts `n ≥ 0` by one half, `L` drops `n = 0`.
    Example3 { variant: Example3Variant, height: f64 },
}

impl ZeroRule {
    /// Build a rule from its external name, e.g. `example3_J`.
    pub fn from_name(name: &str, params: &serde_json::Map<String, serde_json::Value>) -> Result<Self> {
        let num = |k: &str, default: f64| -> Result<f64> {
            match params.get(k) {
                None => Ok(default),
                Some(v) => v.as_f64().ok_or_else(|| Error::InvalidInput(format!("parameter {k} must be a number"))),
            }
        };
        let rule = match name {
            "arith" => {
                ZeroRule::Arith { step: num("step", 1.0)?, offset: num("offset", 0.0)?, height: num("height", 1.0)? }
            }
            "geometric" => ZeroRule::Geometric { ratio: num("ratio", 2.0)?, re: num("re", 1.0)?, im: num("im", 1.0)? },
            "example2" => {
                let decay = match params.get("decay") {
                    None => Decay::Harmonic,
                    Some(v) => {
                        v.as_str().ok_or_else(|| Error::InvalidInput("decay must be a string".into()))?.parse()?
                    }
                };
                let pulled = params.get("pulled").and_then(|v| v.as_bool()).unwrap_or(false);
                ZeroRule::Example2 { decay, pulled }
            }
            "example3_I" | "example3_J" | "example3_L" => {
                let variant = match &name[9..] {
                    "I" => Example3Variant::I,
                    "J" => Example3Variant::J,
                    _ => Example3Variant::L,
                };
                ZeroRule::Example3 { variant, height: num("C", 10.0)? }
            }
            other => return Err(Error::InvalidInput(format!("unknown generator {other:?}"))),
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ZeroRule::Arith { step, height, offset } => {
                step != 0.0 && height > 0.0 && step.is_finite() && offset.is_finite()
            }
            ZeroRule::Geometric { ratio, im, .. } => ratio > 1.0 && im > 0.0,
            ZeroRule::Example2 { .. } => true,
            ZeroRule::Example3 { height, .. } => height > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("generator parameters out of range: {self:?}")))
        }
    }

    /// Smallest admissible index.
    pub fn first_index(&self) -> Option<i64> {
        match self {
            ZeroRule::Geometric { .. } | ZeroRule::Example2 { .. } => Some(1),
            _ => None,
        }
    }

    /// The zero carrying index `n`, if the rule assigns one.
    pub fn point(&self, n: i64) -> Option<Complex64> {
        match *self {
            ZeroRule::Arith { step, offset, height } => Some(Complex64::new(step * n as f64 + offset, height)),
            ZeroRule::Geometric { ratio, re, im } => (n >= 1).then(|| Complex64::new(re, im) * ratio.powi(n as i32)),
            ZeroRule::Example2 { decay, pulled } => {
                if n < 1 {
                    return None;
                }
                let p = 2f64.powi(n as i32);
                if pulled && n >= 2 && (n as u64).is_power_of_two() {
                    let k = (n as u64).trailing_zeros();
                    Some(Complex64::new(p, decay.height(k)))
                } else {
                    Some(Complex64::new(p, p))
                }
            }
            ZeroRule::Example3 { variant, height } => match variant {
                Example3Variant::I => Some(Complex64::new(n as f64, height)),
                Example3Variant::J => {
                    let shift = if n >= 0 { 0.5 } else { 0.0 };
                    Some(Complex64::new(n as f64 + shift, height))
                }
                Example3Variant::L => (n != 0).then(|| Complex64::new(n as f64, height)),
            },
        }
    }

    /// Upper bound on `Σ Im λ/|λ|²` over indices outside `[lo, hi]`, and a lower
    /// bound on the moduli of those zeros.
    pub fn tail_sum_bound(&self, lo: i64, hi: i64) -> (f64, f64) {
        match *self {
            ZeroRule::Arith { step, offset, height } => {
                let s = step.abs();
                let o = offset.abs();
                let right = s * hi as f64 - o;
                let left = s * (-lo) as f64 - o;
                if right <= 0.0 || left <= 0.0 {
                    return (f64::INFINITY, 0.0);
                }
                let sum = height * (1.0 / (s * right) + 1.0 / (s * left));
                (sum, (s * (hi + 1) as f64 - o).min(s * (1 - lo) as f64 - o))
            }
            ZeroRule::Geometric { ratio, re, im } => {
                let c2 = re * re + im * im;
                let qn = ratio.powi(hi as i32);
                (im / (c2 * qn * (ratio - 1.0)), c2.sqrt() * qn * ratio)
            }
            ZeroRule::Example2 { .. } => {
                let p = 2f64.powi(hi as i32);
                (1.0 / p, p * 2.0)
            }
            ZeroRule::Example3 { height, .. } => {
                let n = hi.min(-lo) as f64;
                if n <= 1.0 {
                    return (f64::INFINITY, 0.0);
                }
                (2.0 * height / (n - 1.0), n + 0.5)
            }
        }
    }
}

/// A zero rule together with the index window currently materialised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroGenerator {
    pub rule: ZeroRule,
    pub window: [i64; 2],
}

impl ZeroGenerator {
    pub fn new(rule: ZeroRule, window: [i64; 2]) -> Result<Self> {
        rule.validate()?;
        let mut window = window;
        if let Some(first) = rule.first_index() {
            window[0] = window[0].max(first);
        }
        if window[1] < window[0] {
            return Err(Error::InvalidInput("empty generator window".into()));
        }
        Ok(Self { rule, window })
    }

    /// Symmetric window `[-n, n]`, clipped to the admissible indices.
    pub fn symmetric(rule: ZeroRule, n: i64) -> Result<Self> {
        Self::new(rule, [-n, n])
    }

    pub fn points(&self) -> Vec<Complex64> {
        (self.window[0]..=self.window[1]).filter_map(|n| self.rule.point(n)).collect()
    }

    /// Same rule on a window `factor` times wider.
    pub fn widened(&self, factor: i64) -> Self {
        let [lo, hi] = self.window;
        let lo = match self.rule.first_index() {
            Some(f) => f,
            None => lo.min(-1) * factor,
        };
        Self { rule: self.rule.clone(), window: [lo, hi.max(1) * factor] }
    }

    /// Bound on `|B_window(z) / B_full(z) - 1|` for the omitted factors.
    ///
    /// For `|λ| ≥ 2(|z|+1)` one has `|1 - b_λ(z)| ≤ (8|z-i| + 48) Im λ/|λ|²`, and
    /// the product error is at most `e^T - 1` for `T` the sum of these terms.
    pub fn truncation_bound(&self, z: Complex64) -> f64 {
        let (sum, min_modulus) = self.rule.tail_sum_bound(self.window[0], self.window[1]);
        if min_modulus < 2.0 * (z.norm() + 1.0) {
            return f64::INFINITY;
        }
        let t = (8.0 * (z - Complex64::i()).norm() + 48.0) * sum;
        t.exp_m1()
    }
}
