//! Toeplitz order diagnostics: difference of arguments, harmonic conjugates,
//! the derivative-ratio, integrability and boundedness tests, argument drift and
//! an aggregated verdict.

mod conjugate;
mod diagnostics;

pub use conjugate::*;
pub use diagnostics::*;

use std::f64::consts::PI;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::grid::two_sided_grid;
use crate::inner::MifDescriptor;
use crate::model::{toeplitz_kernel_rational, RationalInner};

/// How `D(I)` relates to `D(J)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `D(I) ⊋ D(J)`.
    Dominates,
    /// `D(I) ⊊ D(J)`.
    Dominated,
    Equivalent,
    Incomparable,
    Inconclusive,
}

impl Relation {
    fn name(self) -> &'static str {
        match self {
            Relation::Dominates => "dominates",
            Relation::Dominated => "dominated",
            Relation::Equivalent => "equivalent",
            Relation::Incomparable => "incomparable",
            Relation::Inconclusive => "inconclusive",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Relation::Dominates => Relation::Dominated,
            Relation::Dominated => Relation::Dominates,
            r => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub test: String,
    pub value: f64,
    pub threshold: f64,
}

impl Evidence {
    fn new(test: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { test: test.into(), value, threshold }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub relation: Relation,
    /// Certified from finite data rather than inferred from heuristics.
    pub exact: bool,
    pub evidence: Vec<Evidence>,
}

impl OrderVerdict {
    /// `dominates`, `dominated-evidence`, `inconclusive`, ...
    pub fn label(&self) -> String {
        match (self.relation, self.exact) {
            (Relation::Inconclusive, _) => "inconclusive".into(),
            (r, true) => r.name().into(),
            (r, false) => format!("{}-evidence", r.name()),
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        self.relation == Relation::Inconclusive
    }
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for OrderVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            relation: String,
            exact: bool,
            evidence: &'a [Evidence],
        }
        Repr { relation: self.label(), exact: self.exact, evidence: &self.evidence }.serialize(s)
    }
}

fn from_sizes(mass_i: f64, mass_j: f64, deg_i: usize, deg_j: usize) -> Relation {
    if mass_i > mass_j {
        Relation::Dominates
    } else if mass_j > mass_i {
        Relation::Dominated
    } else if deg_i > deg_j {
        Relation::Dominates
    } else if deg_j > deg_i {
        Relation::Dominated
    } else {
        Relation::Equivalent
    }
}

fn exact_finite(i: &MifDescriptor, j: &MifDescriptor) -> OrderVerdict {
    let red = reduce_pair(i, j);
    let mut evidence = vec![
        Evidence::new("cancelled-zeros", red.cancelled as f64, 0.0),
        Evidence::new("residual-exp-mass-difference", red.i.exp_mass - red.j.exp_mass, 0.0),
    ];
    let (mi, mj) = (red.i.exp_mass, red.j.exp_mass);
    let (ni, nj) = (red.i.zeros.len(), red.j.zeros.len());
    if mi == 0.0 && mj == 0.0 {
        // Kernel dimensions from the finite-dimensional model.
        let kernels = RationalInner::blaschke(red.i.zeros.clone()).and_then(|ri| {
            let rj = RationalInner::blaschke(red.j.zeros.clone())?;
            Ok((toeplitz_kernel_rational(&ri, &rj)?, toeplitz_kernel_rational(&rj, &ri)?))
        });
        match kernels {
            Ok((kij, kji)) => {
                evidence.push(Evidence::new("dim N[conj(I) J]", kij.dim as f64, 0.0));
                evidence.push(Evidence::new("dim N[conj(J) I]", kji.dim as f64, 0.0));
                let relation = match (kij.dim > 0, kji.dim > 0) {
                    (true, false) => Relation::Dominates,
                    (false, true) => Relation::Dominated,
                    (false, false) => Relation::Equivalent,
                    (true, true) => Relation::Incomparable,
                };
                return OrderVerdict { relation, exact: true, evidence };
            }
            Err(_) => evidence.push(Evidence::new("model-kernel", f64::NAN, 0.0)),
        }
    }
    evidence.push(Evidence::new("residual-degree-difference", ni as f64 - nj as f64, 0.0));
    OrderVerdict { relation: from_sizes(mi, mj, ni, nj), exact: true, evidence }
}

/// The residual pair when it does not change under widening every generator window.
fn stable_residual(i: &MifDescriptor, j: &MifDescriptor) -> Option<ReducedPair> {
    let widen =
        |d: &MifDescriptor| MifDescriptor { generator: d.generator.as_ref().map(|g| g.widened(2)), ..d.clone() };
    let a = reduce_pair(i, j);
    let b = reduce_pair(&widen(i), &widen(j));
    let same = |x: &MifDescriptor, y: &MifDescriptor| x.exp_mass == y.exp_mass && x.zeros.len() == y.zeros.len();
    let small = a.i.zeros.len() + a.j.zeros.len() <= 64;
    (small && same(&a.i, &b.i) && same(&a.j, &b.j) && a.i.zeros == b.i.zeros && a.j.zeros == b.j.zeros).then_some(a)
}

/// Drift window: beyond the bulk of the zeros, within `[100, 10⁴]`.
pub fn drift_extent(i: &MifDescriptor, j: &MifDescriptor) -> f64 {
    let m = i.all_zeros().into_iter().chain(j.all_zeros()).fold(0.0f64, |m, z| m.max(z.re.abs()));
    (m / 10.0).clamp(100.0, 1e4)
}

/// Aggregate the order diagnostics for `(I, J)`.
///
/// Finite inputs are decided exactly. Otherwise a stable residual after
/// cancelling common zeros is compared as evidence, and then the drift,
/// integrability, boundedness and derivative-ratio tests run in that order.
pub fn order_verdict(i: &MifDescriptor, j: &MifDescriptor) -> OrderVerdict {
    if i.generator.is_none() && j.generator.is_none() {
        return exact_finite(i, j);
    }
    let mut evidence = Vec::new();
    if let Some(red) = stable_residual(i, j) {
        let v = exact_finite(&red.i, &red.j);
        evidence.push(Evidence::new("stable-residual-zeros", (red.i.zeros.len() + red.j.zeros.len()) as f64, 64.0));
        evidence.extend(v.evidence);
        return OrderVerdict { relation: v.relation, exact: false, evidence };
    }

    let xmax = drift_extent(i, j);
    match drift_test(i, j, xmax, DRIFT_MARGIN) {
        Ok(d) => {
            evidence.push(Evidence::new("drift", d.drift, PI));
            evidence.push(Evidence::new("mirrored-drift", d.mirrored_drift, PI));
            match (d.ij_nontrivial, d.ji_nontrivial) {
                (true, false) => return OrderVerdict { relation: Relation::Dominates, exact: false, evidence },
                (false, true) => return OrderVerdict { relation: Relation::Dominated, exact: false, evidence },
                (true, true) => return OrderVerdict { relation: Relation::Incomparable, exact: false, evidence },
                _ => {}
            }
        }
        Err(_) => evidence.push(Evidence::new("drift", f64::NAN, PI)),
    }

    match theorem2_sufficient(i, j) {
        Ok(t) => {
            evidence.push(Evidence::new("theorem2-integral-j", t.integral_j, THEOREM2_THRESHOLD));
            evidence.push(Evidence::new("theorem2-integral-i", t.integral_i, THEOREM2_THRESHOLD));
            if t.holds {
                return OrderVerdict { relation: Relation::Equivalent, exact: false, evidence };
            }
        }
        Err(_) => evidence.push(Evidence::new("theorem2", f64::NAN, THEOREM2_THRESHOLD)),
    }

    let opts = Lemma4Options::default();
    match lemma4_equiv_comparable(i, j, &opts) {
        Ok(r) => {
            evidence.push(Evidence::new("lemma4-sup", *r.sups.last().unwrap_or(&f64::NAN), opts.bound));
            if r.verdict == Lemma4Verdict::EquivalentEvidence {
                return OrderVerdict { relation: Relation::Equivalent, exact: false, evidence };
            }
        }
        Err(_) => evidence.push(Evidence::new("lemma4-sup", f64::NAN, opts.bound)),
    }

    let xs = two_sided_grid(xmax, 1e6, 2001, 400);
    match lemma3_check(i, j, &xs, LEMMA3_BOUND) {
        Ok(r) => evidence.push(Evidence::new("lemma3-spread", r.spread, LEMMA3_BOUND)),
        Err(_) => evidence.push(Evidence::new("lemma3-spread", f64::NAN, LEMMA3_BOUND)),
    }
    OrderVerdict { relation: Relation::Inconclusive, exact: false, evidence }
}
