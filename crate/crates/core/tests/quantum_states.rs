use approx::assert_abs_diff_eq;
use biform_core::geometry::conjugacy_residual;
use biform_core::monotone::MonotoneFunction;
use biform_core::potentials::{
    biform_from_contrast, biform_from_precontrast, classify, induced_connection, induced_metric, StructureClass,
};
use biform_core::quantum::{
    build_state_model, dual_torsion_profile, quantum_canonical_biform, quantum_precontrast, CMatrix,
    QuantumStateModel,
};
use biform_core::{JetConfig, Point};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> JetConfig {
    JetConfig::jet()
}

fn probes(m: &QuantumStateModel, seed: u64, count: usize) -> Vec<Point> {
    m.chart().sample(&mut ChaCha8Rng::seed_from_u64(seed), count).unwrap()
}

/// `∫_0^∞ Tr(A (ρ+t)^{-1} B (ρ+t)^{-1}) dt` by Simpson's rule after `t = u / (1 − u)`.
fn bkm_resolvent_integral(rho: &CMatrix, a: &CMatrix, b: &CMatrix) -> f64 {
    let d = rho.nrows();
    let integrand = |u: f64| -> f64 {
        if u >= 1.0 {
            return (a * b).trace().re;
        }
        let t = u / (1.0 - u);
        let r = (rho + DMatrix::<Complex64>::identity(d, d) * Complex64::new(t, 0.0)).try_inverse().unwrap();
        (a * &r * b * &r).trace().re / ((1.0 - u) * (1.0 - u))
    };
    let n = 4000;
    let h = 1.0 / n as f64;
    let mut acc = integrand(0.0) + integrand(1.0);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * integrand(k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn bkm_metric_matches_resolvent_integral() {
    let m = build_state_model(2, "BKM").unwrap();
    for theta in [vec![0.3 / 2f64.sqrt(), 0.0, 0.0], vec![0.3, 0.0, 0.0], vec![0.1, -0.2, 0.15]] {
        let p = Point::new(theta);
        let rho = m.density(&p).unwrap();
        let g = m.monotone_metric_at(&p).unwrap();
        let gj = m.metric().values_at(&p, &cfg()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let oracle = bkm_resolvent_integral(&rho, m.basis().matrix(i), m.basis().matrix(j));
                assert_abs_diff_eq!(g[i * 3 + j], oracle, epsilon = 1e-8);
                assert_abs_diff_eq!(gj[i * 3 + j], oracle, epsilon = 1e-8);
            }
        }
    }
}

#[test]
fn bkm_and_sld_agree_only_at_the_maximally_mixed_state() {
    let bkm = build_state_model(2, "BKM").unwrap();
    let sld = bkm.with_function(MonotoneFunction::Sld);
    let zero = Point::new(vec![0.0; 3]);
    let (a, b) = (bkm.monotone_metric_at(&zero).unwrap(), sld.monotone_metric_at(&zero).unwrap());
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    let p = Point::new(vec![0.3, 0.0, 0.0]);
    let (a, b) = (bkm.monotone_metric_at(&p).unwrap(), sld.monotone_metric_at(&p).unwrap());
    assert!(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) > 1e-3);
}

#[test]
fn monotone_metrics_are_positive_definite() {
    for d in [2, 3] {
        let base = QuantumStateModel::new(d, MonotoneFunction::Bkm).unwrap();
        let count = if d == 2 { 100 } else { 20 };
        for f in MonotoneFunction::ALL {
            let m = base.with_function(f);
            let n = m.basis().len();
            for p in probes(&m, 11, count) {
                let g = DMatrix::from_row_slice(n, n, &m.monotone_metric_at(&p).unwrap());
                assert!((&g - g.transpose()).amax() < 1e-12);
                assert!(g.symmetric_eigenvalues().min() > 0.0);
            }
        }
    }
}

#[test]
fn superoperator_is_self_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [2, 3] {
        let base = QuantumStateModel::new(d, MonotoneFunction::Bkm).unwrap();
        for f in MonotoneFunction::ALL {
            let m = base.with_function(f);
            for p in probes(&m, 3, 10) {
                let k = m.superoperator(&p).unwrap();
                let herm = |rng: &mut ChaCha8Rng| {
                    let x = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                    &x + x.adjoint()
                };
                let (a, b) = (herm(&mut rng), herm(&mut rng));
                let lhs = (&a * k.apply(&b)).trace();
                let rhs = (k.apply(&a) * &b).trace();
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn eguchi_metric_of_relative_entropy_is_bkm() {
    let m = build_state_model(2, "BKM").unwrap();
    let pts = probes(&m, 21, 20);
    let w = biform_from_contrast(&m.vnu_contrast(), &pts[..2], &cfg()).unwrap();
    assert!(w.warnings().is_empty());
    let g = induced_metric(&w);
    let conn = induced_connection(&w);
    for p in pts.iter().chain([Point::new(vec![0.0; 3])].iter()) {
        let oracle = m.monotone_metric_at(p).unwrap();
        for (a, b) in g.values_at(p, &cfg()).unwrap().iter().zip(&oracle) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
        for c in conn.values_at(p, &cfg()).unwrap() {
            assert!(c.abs() < 1e-9);
        }
    }
}

#[test]
fn bkm_is_statistical_and_sld_is_not() {
    let bkm = build_state_model(2, "BKM").unwrap();
    let sld = bkm.with_function(MonotoneFunction::Sld);
    let mut pts = probes(&bkm, 7, 4);
    pts.push(Point::new(vec![0.3, 0.0, 0.0]));
    let c = classify(&quantum_canonical_biform(&bkm), &pts, 1e-8, &cfg()).unwrap();
    assert_eq!(c.class, StructureClass::Statistical);
    assert!(c.left_identity_residual < 1e-8 && c.right_identity_residual < 1e-8);
    let c = classify(&quantum_canonical_biform(&sld), &pts, 1e-8, &cfg()).unwrap();
    assert_eq!(c.class, StructureClass::Smat);
    assert!(c.right_residual > 1e-3);
    assert!(c.right_identity_residual < 1e-8);
}

#[test]
fn canonical_biform_pulls_back_to_the_metric_with_mixture_connection() {
    let m = build_state_model(2, "WY").unwrap();
    let w = quantum_canonical_biform(&m);
    for p in probes(&m, 8, 5) {
        let g = w.form().components(&p, &p, &cfg()).unwrap();
        for (a, b) in g.iter().zip(&m.monotone_metric_at(&p).unwrap()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
        assert!(induced_connection(&w).values_at(&p, &cfg()).unwrap().iter().all(|c| c.abs() < 1e-10));
    }
}

#[test]
fn dual_torsion_profile_separates_bkm() {
    let m = build_state_model(2, "BKM").unwrap();
    let pts = probes(&m, 9, 20);
    let rows = dual_torsion_profile(2, &pts, &cfg()).unwrap();
    assert_eq!(rows[0].0, MonotoneFunction::Bkm);
    assert!(rows[0].1 < 1e-8);
    let at = dual_torsion_profile(2, &[Point::new(vec![0.3, 0.0, 0.0])], &cfg()).unwrap();
    assert!(at[1].1 > 1e-3);
    let zero = dual_torsion_profile(2, &[Point::new(vec![0.0; 3])], &cfg()).unwrap();
    assert!(zero.iter().all(|(_, t)| *t < 1e-8));
}

#[test]
fn mixture_connection_is_conjugate_to_its_dual() {
    let base = QuantumStateModel::new(2, MonotoneFunction::Bkm).unwrap();
    for f in MonotoneFunction::ALL {
        let m = base.with_function(f);
        let g = m.metric();
        let mix = m.mixture_connection();
        let dual = biform_core::geometry::conjugate_connection(&g, &mix);
        for p in probes(&m, 4, 5) {
            assert!(conjugacy_residual(&g, &mix, &dual, &p, &cfg()).unwrap() < 1e-8);
        }
    }
}

#[test]
fn precontrast_reproduces_metric_and_mixture_connection() {
    let base = QuantumStateModel::new(2, MonotoneFunction::Bkm).unwrap();
    for f in MonotoneFunction::ALL {
        let m = base.with_function(f);
        let pts = probes(&m, 12, 6);
        let s = quantum_precontrast(&m);
        assert!(s.normalization_residual(&pts, &cfg()).unwrap() < 1e-12);
        let w = biform_from_precontrast(&s, &pts[..1], &cfg()).unwrap();
        let (g, conn) = (induced_metric(&w), induced_connection(&w));
        for p in pts.iter().chain([Point::new(vec![0.0; 3])].iter()) {
            for (a, b) in g.values_at(p, &cfg()).unwrap().iter().zip(&m.monotone_metric_at(p).unwrap()) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
            }
            assert!(conn.values_at(p, &cfg()).unwrap().iter().all(|c| c.abs() < 1e-9));
        }
        let c = classify(&w, &pts, 1e-8, &cfg()).unwrap();
        assert!(c.left_residual < 1e-8);
    }
}

#[test]
fn qutrit_canonical_biform_smoke() {
    let m = build_state_model(3, "BKM").unwrap();
    let pts = probes(&m, 2, 1);
    let c = classify(&quantum_canonical_biform(&m), &pts, 1e-8, &cfg()).unwrap();
    assert_eq!(c.class, StructureClass::Statistical);
}
