//! Named verification scenarios. Each one draws its random inputs from a ChaCha8 stream seeded
//! with `seed + registry index`, so a scenario's numbers do not depend on which others run.

use std::time::Instant;

use biform_core::corpus::{
    coframe_corpus, gaussian_chart, gaussian_fisher, gaussian_kl, gaussian_kl_value, random_biform,
    random_contrast_function, random_precontrast, squared_euclidean, warped_example,
};
use biform_core::geometry::{conjugacy_residual, exterior_derivative, levi_civita, torsion_tensor};
use biform_core::linalg::symmetric_eigen_range;
use biform_core::monotone::MonotoneFunction;
use biform_core::potentials::{
    biform_from_contrast, biform_from_precontrast, classify, default_classify_tolerance, duality_residual,
    induced_connection, induced_metric, Classification, ContrastBiForm, StructureClass,
};
use biform_core::quantum::{dual_torsion_profile, quantum_canonical_biform, quantum_precontrast, QuantumStateModel};
use biform_core::teleparallel::{
    canonical_biform, covariant_constancy_residual, gradient_frame, teleparallel_connection, verify_inverse_problem,
};
use biform_core::{BiForm, ChartManifold, JetConfig, MixedTensor, OneForm, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::report::{Bound, ClassCheck, Residual, ScenarioReport};

/// Registered scenarios in declaration order.
pub const SCENARIOS: [&str; 7] = [
    "bicomplex-identities",
    "eguchi-euclidean",
    "eguchi-gaussian-kl",
    "teleparallel-2d",
    "qubit-vnu-bkm",
    "qubit-monotone-profile",
    "qutrit-smoke",
];

/// Smallest tolerance used for derivative-based residuals in difference mode.
pub const FD_TOLERANCE_FLOOR: f64 = 1e-4;

type Outcome = biform_core::Result<()>;

/// How a residual's tolerance reacts to the run configuration.
#[derive(Clone, Copy)]
enum Tol {
    /// An exact identity: `tol_identity` overrides it and difference mode floors it.
    Identity(f64),
    /// Agreement with an independent oracle: floored in difference mode.
    Oracle(f64),
    /// A closed-form value involving no derivatives.
    Exact(f64),
}

struct Recorder<'a> {
    report: &'a mut ScenarioReport,
    run: &'a RunConfig,
    cfg: JetConfig,
}

impl Recorder<'_> {
    fn tolerance(&self, tol: Tol) -> f64 {
        let floor = |t: f64| if self.run.mode == Mode::Fd { t.max(FD_TOLERANCE_FLOOR) } else { t };
        match tol {
            Tol::Identity(t) => floor(self.run.tol_identity.unwrap_or(t)),
            Tol::Oracle(t) => floor(t),
            Tol::Exact(t) => t,
        }
    }

    fn classify_tol(&self) -> f64 {
        self.run.tol_classify.unwrap_or_else(|| default_classify_tolerance(&self.cfg))
    }

    fn below(&mut self, name: impl Into<String>, samples: &[f64], tol: Tol) {
        let max = samples.iter().fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(*v) });
        let mean = if samples.is_empty() { 0.0 } else { samples.iter().sum::<f64>() / samples.len() as f64 };
        let tol = self.tolerance(tol);
        self.report.residuals.push(Residual { name: name.into(), max, mean, tol, bound: Bound::Below });
    }

    fn above(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.report.residuals.push(Residual { name: name.into(), max: value, mean: value, tol, bound: Bound::Above });
    }

    fn class(&mut self, label: impl Into<String>, c: &Classification, expected: StructureClass) {
        self.report.classifications.push(ClassCheck {
            label: label.into(),
            class: c.class.to_string(),
            expected: expected.to_string(),
            left_residual: c.left_residual,
            right_residual: c.right_residual,
        });
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// Runs one scenario. Engine errors are recorded on the report and fail it.
pub fn run_scenario(name: &str, run: &RunConfig) -> Result<ScenarioReport, CliError> {
    let index = SCENARIOS
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| CliError::Usage(format!("unknown scenario `{name}` (expected one of {})", SCENARIOS.join(", "))))?;
    let seed = run.seed.wrapping_add(index as u64);
    let mut report = ScenarioReport { name: name.to_string(), seed, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let outcome = {
        let mut rec = Recorder { report: &mut report, run, cfg: run.jet_config() };
        match name {
            "bicomplex-identities" => bicomplex_identities(&mut rec, &mut rng),
            "eguchi-euclidean" => eguchi_euclidean(&mut rec, &mut rng),
            "eguchi-gaussian-kl" => eguchi_gaussian_kl(&mut rec, &mut rng),
            "teleparallel-2d" => teleparallel_2d(&mut rec, &mut rng),
            "qubit-vnu-bkm" => qubit_vnu_bkm(&mut rec, &mut rng),
            "qubit-monotone-profile" => qubit_monotone_profile(&mut rec, &mut rng),
            "qutrit-smoke" => qutrit_smoke(&mut rec, &mut rng),
            _ => unreachable!("registry and dispatch agree"),
        }
    };
    if let Err(e) = outcome {
        log::error!("scenario {name}: {e}");
        report.errors.push(e.to_string());
    }
    report.wall_time = start.elapsed();
    log::info!("scenario {name}: {} in {:.2?}", report.verdict(), report.wall_time);
    Ok(report)
}

fn bicomplex_identities(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Outcome {
    let degrees = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let (mut ll, mut rr, mut comm) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..rec.run.bicomplex_forms {
        let m = ChartManifold::euclidean(2 + k % 2, 1.0);
        let (p, q) = degrees[k % degrees.len()];
        let w = random_biform(rng, &m, p, q);
        let dldl = if p == 0 { Some(w.left_differential()?.left_differential()?) } else { None };
        let drdr = if q == 0 { Some(w.right_differential()?.right_differential()?) } else { None };
        let comm_form = w.right_differential()?.left_differential()?.sub(&w.left_differential()?.right_differential()?)?;
        for _ in 0..rec.run.bicomplex_tuples {
            let pts = m.sample(rng, 2)?;
            let (a, b) = (&pts[0], &pts[1]);
            if let Some(f) = &dldl {
                ll.push(max_abs(&f.components(a, b, &rec.cfg)?));
            }
            if let Some(f) = &drdr {
                rr.push(max_abs(&f.components(a, b, &rec.cfg)?));
            }
            comm.push(max_abs(&comm_form.components(a, b, &rec.cfg)?));
        }
    }
    rec.below("dL_dL", &ll, Tol::Identity(1e-9));
    rec.below("dR_dR", &rr, Tol::Identity(1e-9));
    rec.below("dL_dR_minus_dR_dL", &comm, Tol::Identity(1e-9));
    Ok(())
}

/// Appends the per-probe torsion and identity residuals of a classified form.
fn torsion_samples(c: &Classification, left: &mut Vec<f64>, right: &mut Vec<f64>, identity: &mut Vec<f64>) {
    left.push(c.left_residual);
    right.push(c.right_residual);
    identity.push(c.left_identity_residual.max(c.right_identity_residual));
}

fn metric_asymmetry(w: &ContrastBiForm, p: &Point, cfg: &JetConfig) -> biform_core::Result<f64> {
    let n = w.dim();
    let g = w.form().components(p, p, cfg)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((g[i * n + j] - g[j * n + i]).abs());
        }
    }
    Ok(worst)
}

fn eguchi_euclidean(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Outcome {
    let cfg = rec.cfg.clone();
    let tol = rec.classify_tol();
    let probes = rec.run.probes.min(5);
    let (mut metric, mut christoffel) = (Vec::new(), Vec::new());
    for dim in [2, 3] {
        let m = ChartManifold::euclidean(dim, 1.0);
        let pts = m.sample(rng, probes)?;
        let w = biform_from_contrast(&squared_euclidean(&m), &pts, &cfg)?;
        let mut eye = vec![0.0; dim * dim];
        (0..dim).for_each(|i| eye[i * dim + i] = 1.0);
        for p in &pts {
            metric.push(max_diff(&induced_metric(&w).values_at(p, &cfg)?, &eye));
            christoffel.push(max_abs(&induced_connection(&w).values_at(p, &cfg)?));
        }
        let c = classify(&w, &pts, tol, &cfg)?;
        rec.class(format!("squared-euclidean-{dim}d"), &c, StructureClass::Statistical);
    }
    rec.below("squared_euclidean/metric_vs_identity", &metric, Tol::Identity(1e-9));
    rec.below("squared_euclidean/christoffels", &christoffel, Tol::Identity(1e-9));

    let (mut left, mut right, mut identity, mut asym) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut not_statistical = 0.0;
    for k in 0..20 {
        let m = ChartManifold::euclidean(2 + k % 2, 1.0);
        let f = random_contrast_function(rng, &m);
        let pts = m.sample(rng, 3)?;
        let w = biform_from_contrast(&f, &pts, &cfg)?;
        let c = classify(&w, &pts, tol, &cfg)?;
        if c.class != StructureClass::Statistical {
            not_statistical += 1.0;
        }
        torsion_samples(&c, &mut left, &mut right, &mut identity);
        for p in &pts {
            asym.push(metric_asymmetry(&w, p, &cfg)?);
        }
    }
    rec.below("bi_exact/left_torsion", &left, Tol::Identity(1e-8));
    rec.below("bi_exact/right_torsion", &right, Tol::Identity(1e-8));
    rec.below("bi_exact/metric_asymmetry", &asym, Tol::Identity(1e-9));
    rec.below("bi_exact/non_statistical_count", &[not_statistical], Tol::Exact(0.5));

    let (mut left_exact, mut unused) = (Vec::new(), Vec::new());
    for k in 0..20 {
        let m = ChartManifold::euclidean(2 + k % 2, 1.0);
        let s = random_precontrast(rng, &m);
        let pts = m.sample(rng, 3)?;
        let w = biform_from_precontrast(&s, &pts, &cfg)?;
        let c = classify(&w, &pts, tol, &cfg)?;
        torsion_samples(&c, &mut left_exact, &mut unused, &mut identity);
    }
    rec.below("left_exact/left_torsion", &left_exact, Tol::Identity(1e-8));
    rec.below("proposition_identity", &identity, Tol::Identity(1e-8));
    Ok(())
}

fn eguchi_gaussian_kl(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Outcome {
    let cfg = rec.cfg.clone();
    let chart = gaussian_chart();
    let f = gaussian_kl(&chart);
    let pts = chart.sample(rng, rec.run.probes)?;
    let w = biform_from_contrast(&f, &pts, &cfg)?;
    let g = induced_metric(&w);
    let (mut closed, mut fd) = (Vec::new(), Vec::new());
    let h = 1e-4;
    for p in &pts {
        let gv = g.values_at(p, &cfg)?;
        closed.push(max_diff(&gv, &gaussian_fisher(p.coords())));
        // −∂_{u_i} ∂_{v_j} KL by a four-point difference quotient of the closed form
        let x = p.coords();
        let mut oracle = [0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                let kl = |si: f64, sj: f64| {
                    let (mut u, mut v) = (x.to_vec(), x.to_vec());
                    u[i] += si;
                    v[j] += sj;
                    gaussian_kl_value(&u, &v)
                };
                oracle[i * 2 + j] = -(kl(h, h) - kl(h, -h) - kl(-h, h) + kl(-h, -h)) / (4.0 * h * h);
            }
        }
        fd.push(max_diff(&gv, &oracle));
    }
    rec.below("fisher_metric_vs_closed_form", &closed, Tol::Oracle(1e-6));
    rec.below("fisher_metric_vs_difference_oracle", &fd, Tol::Oracle(1e-6));
    rec.below("conjugacy", &[duality_residual(&w, &pts, &cfg)?], Tol::Identity(1e-8));
    let c = classify(&w, &pts, rec.classify_tol(), &cfg)?;
    rec.below("proposition_identity", &[c.left_identity_residual.max(c.right_identity_residual)], Tol::Identity(1e-8));
    rec.class("gaussian-kl", &c, StructureClass::Statistical);
    Ok(())
}

fn teleparallel_2d(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Outcome {
    let cfg = rec.cfg.clone();
    let tol = rec.classify_tol();
    let inverse_tol = rec.tolerance(Tol::Identity(1e-8));
    for ex in coframe_corpus() {
        let m = ex.manifold().clone();
        let pts = m.sample(rng, rec.run.probes.min(10))?;
        ex.coframe.check(&pts, &cfg)?;
        let w = canonical_biform(&ex.metric, &ex.coframe);
        let tele = teleparallel_connection(&ex.coframe);
        let frame = gradient_frame(&ex.metric, &ex.coframe);
        let r = verify_inverse_problem(&w, &ex.metric, &tele, &frame, &pts, inverse_tol, &cfg)?;
        rec.below(format!("{}/inverse_connection", ex.name), &[r.connection], Tol::Identity(1e-8));
        rec.below(format!("{}/inverse_metric", ex.name), &[r.metric], Tol::Identity(1e-8));
        rec.below(format!("{}/inverse_differential", ex.name), &[r.differential], Tol::Identity(1e-8));
        let mut constancy = Vec::new();
        let (mut torsion, mut closedness) = (0.0f64, 0.0f64);
        for p in &pts {
            constancy.push(covariant_constancy_residual(&tele, &ex.coframe, p, &cfg)?);
            torsion = torsion.max(max_abs(&torsion_tensor(&tele).values_at(p, &cfg)?));
            for j in 0..ex.coframe.dim() {
                closedness = closedness.max(max_abs(&exterior_derivative(&ex.coframe.alpha(j)).values_at(p, &cfg)?));
            }
        }
        rec.below(format!("{}/covariant_constancy", ex.name), &constancy, Tol::Identity(1e-9));
        let zero = rec.tolerance(Tol::Identity(1e-9));
        let agree = if (torsion < zero) == (closedness < zero) { 0.0 } else { 1.0 };
        rec.below(format!("{}/torsion_iff_not_closed", ex.name), &[agree], Tol::Exact(0.5));
        let c = classify(&w, &pts, tol, &cfg)?;
        rec.below(
            format!("{}/proposition_identity", ex.name),
            &[c.left_identity_residual.max(c.right_identity_residual)],
            Tol::Identity(1e-8),
        );
        let expected = if ex.closed { StructureClass::Statistical } else { StructureClass::Lauritzen };
        rec.class(ex.name.clone(), &c, expected);

        let dx = OneForm::coordinate(&m, 0);
        let bad = ContrastBiForm::new_unchecked(w.form().add(&BiForm::one_forms(&dx, &dx).scale(0.01))?);
        let r = verify_inverse_problem(&bad, &ex.metric, &tele, &frame, &pts, inverse_tol, &cfg)?;
        rec.above(format!("{}/perturbed_form_residual", ex.name), r.connection.max(r.metric).max(r.differential), 1e-3);

        if ex.name == "exponential" {
            let conn = induced_connection(&w);
            let mut comp = Vec::new();
            for p in &pts {
                let t = torsion_tensor(&conn).values_at(p, &cfg)?;
                // Tor(∂x, ∂y) = ∂y
                comp.push((t[MixedTensor::index(2, 0, 0, 1)]).abs().max((t[MixedTensor::index(2, 1, 0, 1)] - 1.0).abs()));
            }
            rec.below("exponential/torsion_dx_dy_minus_dy", &comp, Tol::Identity(1e-9));
        }
    }
    let warped = warped_example();
    let w = canonical_biform(&warped.metric, &warped.coframe);
    let frame = gradient_frame(&warped.metric, &warped.coframe);
    let pts = warped.manifold().sample(rng, 5)?;
    let r = verify_inverse_problem(&w, &warped.metric, &levi_civita(&warped.metric), &frame, &pts, inverse_tol, &cfg)?;
    rec.above("warped/levi_civita_connection_residual", r.connection, 1e-3);
    Ok(())
}

fn qubit_vnu_bkm(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Outcome {
    let cfg = rec.cfg.clone();
    let model = QuantumStateModel::new(2, MonotoneFunction::Bkm)?;
    let mut pts = model.chart().sample(rng, rec.run.probes)?;
    pts.push(Point::new(vec![0.0; 3]));
    let w = biform_from_contrast(&model.vnu_contrast(), &pts[..1], &cfg)?;
    let (g, conn) = (induced_metric(&w), induced_connection(&w));
    let (mut metric, mut gamma) = (Vec::new(), Vec::new());
    for p in &pts {
        metric.push(max_diff(&g.values_at(p, &cfg)?, &model.monotone_metric_at(p)?));
        gamma.push(max_abs(&conn.values_at(p, &cfg)?));
    }
    rec.below("eguchi_metric_vs_bkm", &metric, Tol::Oracle(1e-6));
    rec.below("eguchi_connection_vs_mixture", &gamma, Tol::Oracle(1e-5));
    let s = 0.2 * std::f64::consts::SQRT_2;
    let (rho, sigma) = (Point::new(vec![0.0, 0.0, s]), Point::new(vec![0.0, 0.0, s / 2.0]));
    let classical = 0.7 * (0.7f64 / 0.6).ln() + 0.3 * (0.3f64 / 0.4).ln();
    rec.below("commuting_spot_value", &[(model.vnu_relative_entropy(&rho, &sigma)? - classical).abs()], Tol::Exact(1e-10));
    let self_values: Vec<f64> =
        pts.iter().map(|p| model.vnu_relative_entropy(p, p).map(f64::abs)).collect::<biform_core::Result<_>>()?;
    rec.below("vnu_self_distance", &self_values, Tol::Exact(1e-12));
    let c = classify(&w, &pts[..5.min(pts.len())], rec.classify_tol(), &cfg)?;
    rec.class("vnu-eguchi", &c, StructureClass::Statistical);
    Ok(())
}

fn qubit_monotone_profile(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Outcome {
    let cfg = rec.cfg.clone();
    let tol = rec.classify_tol();
    let base = QuantumStateModel::new(2, MonotoneFunction::Bkm)?;
    let pts = base.chart().sample(rng, rec.run.probes)?;
    let probe = Point::new(vec![0.3, 0.0, 0.0]);
    let origin = Point::new(vec![0.0; 3]);
    let profile = dual_torsion_profile(2, &pts, &cfg)?;
    let at_probe = dual_torsion_profile(2, std::slice::from_ref(&probe), &cfg)?;
    let at_origin = dual_torsion_profile(2, std::slice::from_ref(&origin), &cfg)?;
    for ((f, t), (_, tp)) in profile.iter().zip(&at_probe) {
        if *f == MonotoneFunction::Bkm {
            rec.below("dual_torsion/BKM", &[*t, *tp], Tol::Identity(1e-8));
        } else {
            rec.above(format!("dual_torsion/{}@theta=(0.3,0,0)", f.name()), *tp, 1e-3);
        }
    }
    let origin_max: Vec<f64> = at_origin.iter().map(|(_, t)| *t).collect();
    rec.below("dual_torsion/all@theta=0", &origin_max, Tol::Identity(1e-8));

    let mut class_pts = pts[..4.min(pts.len())].to_vec();
    class_pts.push(probe.clone());
    for f in MonotoneFunction::ALL {
        let model = base.with_function(f);
        let c = classify(&quantum_canonical_biform(&model), &class_pts, tol, &cfg)?;
        let expected = if f == MonotoneFunction::Bkm { StructureClass::Statistical } else { StructureClass::Smat };
        rec.class(format!("canonical-{}", f.name()), &c, expected);

        let s = quantum_precontrast(&model);
        rec.below(format!("precontrast/{}/normalization", f.name()), &[s.normalization_residual(&pts, &cfg)?], Tol::Exact(1e-12));
        let w = biform_from_precontrast(&s, &pts[..1], &cfg)?;
        let (g, conn) = (induced_metric(&w), induced_connection(&w));
        let (mut metric, mut gamma) = (Vec::new(), Vec::new());
        for p in pts.iter().chain([&origin, &probe]) {
            metric.push(max_diff(&g.values_at(p, &cfg)?, &model.monotone_metric_at(p)?));
            gamma.push(max_abs(&conn.values_at(p, &cfg)?));
        }
        rec.below(format!("precontrast/{}/metric", f.name()), &metric, Tol::Oracle(1e-7));
        rec.below(format!("precontrast/{}/connection", f.name()), &gamma, Tol::Oracle(1e-7));
        let mix = model.mixture_connection();
        let dual = biform_core::geometry::conjugate_connection(&model.metric(), &mix);
        let conj: Vec<f64> =
            pts.iter().map(|p| conjugacy_residual(&model.metric(), &mix, &dual, p, &cfg)).collect::<biform_core::Result<_>>()?;
        rec.below(format!("mixture_conjugacy/{}", f.name()), &conj, Tol::Identity(1e-8));
    }
    Ok(())
}

fn qutrit_smoke(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Outcome {
    let cfg = rec.cfg.clone();
    let model = QuantumStateModel::new(3, MonotoneFunction::Bkm)?;
    let pts = model.chart().sample(rng, rec.run.probes.min(3))?;
    let n = model.basis().len();
    rec.below("basis_orthonormality", &[model.basis().orthonormality_residual()], Tol::Exact(1e-12));
    rec.below("basis_trace", &[model.basis().trace_residual()], Tol::Exact(1e-12));
    let mut min_eig = f64::INFINITY;
    for f in MonotoneFunction::ALL {
        let m = model.with_function(f);
        for p in &pts {
            min_eig = min_eig.min(symmetric_eigen_range(&m.monotone_metric_at(p)?, n).0);
        }
    }
    rec.above("metric_min_eigenvalue", min_eig, 0.0);
    let w = biform_from_contrast(&model.vnu_contrast(), &pts[..1], &cfg)?;
    let mut metric = Vec::new();
    for p in &pts[..2.min(pts.len())] {
        metric.push(max_diff(&induced_metric(&w).values_at(p, &cfg)?, &model.monotone_metric_at(p)?));
    }
    rec.below("eguchi_metric_vs_bkm", &metric, Tol::Oracle(1e-6));
    let s = quantum_precontrast(&model);
    rec.below("precontrast/normalization", &[s.normalization_residual(&pts, &cfg)?], Tol::Exact(1e-12));
    let c = classify(&quantum_canonical_biform(&model), &pts[..1], rec.classify_tol(), &cfg)?;
    rec.class("canonical-BKM", &c, StructureClass::Statistical);
    Ok(())
}

