mod common;

use biform_core::corpus::random_biform;
use biform_core::{BiForm, ChartManifold, Point};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn tuple_residual(w: &BiForm, m: &Point, n: &Point) -> f64 {
    max_abs(&w.components(m, n, &jet()).unwrap())
}

/// 50 random bi-forms, 100 evaluation pairs each, over every degree where the identities make sense.
#[test]
fn bicomplex_identities_hold_on_random_biforms() {
    let mut r = rng(2024);
    let degrees = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let (mut ll, mut rr, mut comm) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..50 {
        let dim = 2 + k % 2;
        let m = ChartManifold::euclidean(dim, 1.0);
        let (p, q) = degrees[k % degrees.len()];
        let w = random_biform(&mut r, &m, p, q);
        let dldl = (p == 0).then(|| w.left_differential().unwrap().left_differential().unwrap());
        let drdr = (q == 0).then(|| w.right_differential().unwrap().right_differential().unwrap());
        let dldr = w.right_differential().unwrap().left_differential().unwrap();
        let drdl = w.left_differential().unwrap().right_differential().unwrap();
        let diff = dldr.sub(&drdl).unwrap();
        for _ in 0..100 {
            let (a, b) = (point(&mut r, &m), point(&mut r, &m));
            if let Some(f) = &dldl {
                ll = ll.max(tuple_residual(f, &a, &b));
            }
            if let Some(f) = &drdr {
                rr = rr.max(tuple_residual(f, &a, &b));
            }
            comm = comm.max(tuple_residual(&diff, &a, &b));
        }
    }
    assert!(ll < 1e-9 && rr < 1e-9 && comm < 1e-9, "{ll:e} {rr:e} {comm:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn evaluation_is_multilinear_and_block_antisymmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = ChartManifold::euclidean(3, 1.0);
        let w = random_biform(&mut r, &m, 2, 1);
        let (a, b) = (point(&mut r, &m), point(&mut r, &m));
        let mut v = || -> Vec<f64> { (0..3).map(|_| r.gen_range(-1.0..1.0)).collect() };
        let (x1, x2, x3, y) = (v(), v(), v(), v());
        let c = 0.7;
        let e = |xs: [&[f64]; 2]| w.evaluate(&a, &b, &xs, &[&y], &jet()).unwrap();
        let comb: Vec<f64> = x1.iter().zip(&x3).map(|(s, t)| s + c * t).collect();
        let lin = e([&comb, &x2]) - e([&x1, &x2]) - c * e([&x3, &x2]);
        prop_assert!(lin.abs() < 1e-10);
        prop_assert!((e([&x1, &x2]) + e([&x2, &x1])).abs() < 1e-10);
        prop_assert!(e([&x1, &x1]).abs() < 1e-10);
    }

    #[test]
    fn swap_is_an_involution_and_transposes_the_diagonal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = ChartManifold::euclidean(2, 1.0);
        let w = random_biform(&mut r, &m, 1, 1);
        let (a, b) = (point(&mut r, &m), point(&mut r, &m));
        let ss = w.swap_pullback().swap_pullback();
        prop_assert!(max_diff(&ss.components(&a, &b, &jet()).unwrap(), &w.components(&a, &b, &jet()).unwrap()) < 1e-14);
        let s = w.swap_pullback().components(&a, &b, &jet()).unwrap();
        let o = w.components(&b, &a, &jet()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((s[i * 2 + j] - o[j * 2 + i]).abs() < 1e-14);
            }
        }
        // d^R = s* d^L s*
        let dr = w.right_differential().unwrap().components(&a, &b, &jet()).unwrap();
        let via = w.swap_pullback().left_differential().unwrap().swap_pullback().components(&a, &b, &jet()).unwrap();
        prop_assert!(max_diff(&dr, &via) < 1e-12);
    }

    #[test]
    fn differentials_agree_between_jet_and_difference_modes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = ChartManifold::euclidean(2, 1.0);
        let w = random_biform(&mut r, &m, 0, 1).left_differential().unwrap();
        let (a, b) = (point(&mut r, &m), point(&mut r, &m));
        let jv = w.components(&a, &b, &jet()).unwrap();
        let fd = w.components(&a, &b, &biform_core::JetConfig::central_difference(1e-4)).unwrap();
        prop_assert!(max_diff(&jv, &fd) < 1e-6);
    }
}
