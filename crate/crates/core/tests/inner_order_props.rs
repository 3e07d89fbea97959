//! Property tests for inner functions, exact kernels, the order diagnostics,
//! Clark measures and de Branges spaces.

use num_complex::Complex64;
use proptest::prelude::*;

use toeplitz_core::clark::{clark_measure, mif_from_measure_alpha};
use toeplitz_core::debranges::{reproducing_kernel, theta_of_e, HBFunction};
use toeplitz_core::grid::linspace;
use toeplitz_core::inner::{arg_grid, PreparedMif};
use toeplitz_core::io::parse_json;
use toeplitz_core::model::{toeplitz_kernel_rational, RationalInner};
use toeplitz_core::order::{decay_rate_iy, drift_test, order_verdict, phi_diff, Relation};
use toeplitz_core::{Exec, MifDescriptor, ZeroGenerator, ZeroRule};

fn zero() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, 0.2..3.0f64).prop_map(|(x, y)| Complex64::new(x, y))
}

fn zeros(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(zero(), 0..=max)
}

/// Zero sets whose points are at least 0.05 apart, so that kernels are well conditioned.
fn separated(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter().chain(b).enumerate().all(|(k, z)| a.iter().chain(b).skip(k + 1).all(|w| (z - w).norm() > 0.05))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn inner_on_line_and_contractive_above(zs in zeros(6), a in 0.0..3.0f64, x in -20.0..20.0f64, y in 0.01..5.0f64) {
        let d = MifDescriptor::new(zs, a, Complex64::new(0.0, 1.0)).unwrap();
        let p = d.prepare();
        prop_assert!((p.eval(Complex64::new(x, 0.0)).unwrap().norm() - 1.0).abs() < 1e-12);
        prop_assert!(p.eval(Complex64::new(x, y)).unwrap().norm() < 1.0 + 1e-12);
    }

    #[test]
    fn sequential_and_parallel_agree(zs in zeros(5), a in 0.0..2.0f64) {
        let d = MifDescriptor::new(zs, a, Complex64::new(1.0, 0.0)).unwrap();
        let xs = linspace(-30.0, 30.0, 257);
        prop_assert_eq!(arg_grid(&d, &xs, Exec::Sequential).ys, arg_grid(&d, &xs, Exec::Parallel).ys);
    }

    #[test]
    fn truncation_bound_covers_tail(h in 0.5..3.0f64, n in 20i64..60, x in -3.0..3.0f64, y in 0.1..3.0f64) {
        let rule = ZeroRule::Arith { step: 1.0, offset: 0.25, height: h };
        let g = ZeroGenerator::symmetric(rule, n).unwrap();
        let z = Complex64::new(x, y);
        let bound = g.truncation_bound(z);
        let narrow = MifDescriptor::blaschke(g.points()).unwrap().prepare().eval(z).unwrap();
        let wide = MifDescriptor::blaschke(g.widened(16).points()).unwrap().prepare().eval(z).unwrap();
        prop_assert!((narrow / wide - 1.0).norm() <= bound, "{} > {}", (narrow / wide - 1.0).norm(), bound);
    }

    #[test]
    fn phi_diff_antisymmetric_and_additive(a in zeros(4), b in zeros(4), c in zeros(4)) {
        let (i, j, k) = (
            MifDescriptor::blaschke(a).unwrap(),
            MifDescriptor::blaschke(b).unwrap(),
            MifDescriptor::blaschke(c).unwrap(),
        );
        let xs = linspace(-40.0, 40.0, 81);
        let ij = phi_diff(&i, &j, &xs, Exec::default());
        let ji = phi_diff(&j, &i, &xs, Exec::default());
        let jk = phi_diff(&j, &k, &xs, Exec::default());
        let ik = phi_diff(&i, &k, &xs, Exec::default());
        for n in 0..xs.len() {
            prop_assert!((ij.ys[n] + ji.ys[n]).abs() < 1e-12);
            prop_assert!((ij.ys[n] + jk.ys[n] - ik.ys[n]).abs() < 1e-10);
        }
    }

    #[test]
    fn drift_is_symmetric(a in zeros(3), b in zeros(3)) {
        prop_assume!(separated(&a, &b));
        let (i, j) = (MifDescriptor::blaschke(a).unwrap(), MifDescriptor::blaschke(b).unwrap());
        let f = drift_test(&i, &j, 1e4, 0.1);
        prop_assume!(f.is_ok());
        let (f, r) = (f.unwrap(), drift_test(&j, &i, 1e4, 0.1).unwrap());
        // Swapping the pair negates ψ, which exchanges the two drifts.
        prop_assert!((f.drift - r.mirrored_drift).abs() < 1e-9);
        prop_assert!((f.mirrored_drift - r.drift).abs() < 1e-9);
        prop_assert_eq!(f.verdict, r.verdict);
        prop_assert_eq!((f.ij_nontrivial, f.ji_nontrivial), (r.ji_nontrivial, r.ij_nontrivial));
    }

    #[test]
    fn kernel_dimension_and_coburn(a in zeros(6), b in zeros(6)) {
        prop_assume!(separated(&a, &b));
        let (n, k) = (a.len(), b.len());
        let i = RationalInner::blaschke(a).unwrap();
        let j = RationalInner::blaschke(b).unwrap();
        let ij = toeplitz_kernel_rational(&i, &j).unwrap();
        let ji = toeplitz_kernel_rational(&j, &i).unwrap();
        prop_assert_eq!(ij.dim, n.saturating_sub(k));
        prop_assert!(ij.dim == 0 || ji.dim == 0);
        prop_assert!(ij.division_residuals.iter().chain(&ij.conjugation_residuals).all(|r| *r < 1e-8));
    }

    #[test]
    fn verdict_matches_exact_kernels(a in zeros(4), b in zeros(4)) {
        prop_assume!(separated(&a, &b));
        let (n, k) = (a.len(), b.len());
        let (i, j) = (MifDescriptor::blaschke(a).unwrap(), MifDescriptor::blaschke(b).unwrap());
        let v = order_verdict(&i, &j);
        let expected = match n.cmp(&k) {
            std::cmp::Ordering::Greater => Relation::Dominates,
            std::cmp::Ordering::Less => Relation::Dominated,
            std::cmp::Ordering::Equal => Relation::Equivalent,
        };
        prop_assert!(v.exact);
        prop_assert_eq!(v.relation, expected);
        prop_assert_eq!(order_verdict(&j, &i).relation, expected.flip());
    }

    #[test]
    fn decay_slopes_add(p in 1i32..4, q in 0i32..3, s in 0.5..3.0f64) {
        let w = Complex64::new(0.3, s);
        let f = move |z: Complex64| (z + w).powi(-p);
        let g = move |z: Complex64| (z + Complex64::new(0.0, 1.0)).powi(q);
        let fg = |z: Complex64| f(z) * g(z);
        let (a, b, ab) = (
            decay_rate_iy(&f, 1e6, 0.1).unwrap().slope,
            decay_rate_iy(&g, 1e6, 0.1).unwrap().slope,
            decay_rate_iy(&fg, 1e6, 0.1).unwrap().slope,
        );
        prop_assert!((ab - a - b).abs() < 0.05);
    }

    #[test]
    fn clark_measure_reconstructs_inner(zs in prop::collection::vec(zero(), 1..=4), t in 0.1..6.0f64, x in -5.0..5.0f64, y in 0.1..4.0f64) {
        let d = MifDescriptor::blaschke(zs).unwrap();
        let alpha = Complex64::from_polar(1.0, t);
        let sigma = clark_measure(&d, alpha, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        prop_assume!(sigma.infinity_mass_certified);
        let z = Complex64::new(x, y);
        let rebuilt = mif_from_measure_alpha(&sigma.measure, alpha, z).unwrap();
        prop_assert!((rebuilt - d.prepare().eval(z).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn theta_of_e_is_inner(ws in prop::collection::vec(zero(), 0..=4), a in 0.0..3.0f64, x in -10.0..10.0f64, y in 0.05..4.0f64) {
        let e = HBFunction::new(ws.iter().map(|w| w.conj()).collect(), a, Complex64::new(0.6, 0.8)).unwrap();
        prop_assert!((theta_of_e(&e, Complex64::new(x, 0.0)).unwrap().norm() - 1.0).abs() < 1e-12);
        prop_assert!(theta_of_e(&e, Complex64::new(x, y)).unwrap().norm() < 1.0);
    }

    #[test]
    fn kernel_is_hermitian(ws in prop::collection::vec(zero(), 0..=3), a in 0.5..3.0f64, l in zero(), z in zero()) {
        let e = HBFunction::new(ws.iter().map(|w| w.conj()).collect(), a, Complex64::new(1.0, 0.0)).unwrap();
        let k1 = reproducing_kernel(&e, l, z);
        let k2 = reproducing_kernel(&e, z, l).conj();
        prop_assert!((k1 - k2).norm() <= 1e-9 * (1.0 + k1.norm()));
        prop_assert!(reproducing_kernel(&e, l, l).re > 0.0);
    }

    #[test]
    fn descriptor_json_round_trip(zs in zeros(5), a in 0.0..3.0f64, t in 0.0..6.0f64) {
        let d = MifDescriptor::new(zs, a, Complex64::from_polar(1.0, t)).unwrap();
        let back: MifDescriptor = parse_json(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }
}

#[test]
fn prepared_matches_descriptor_degree() {
    let d = MifDescriptor::blaschke(vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 2.0)]).unwrap();
    assert_eq!(PreparedMif::new(&d).degree(), 2);
}
