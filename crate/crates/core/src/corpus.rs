//! Reference potentials, random families and coframes shared by the tests and the scenario
//! runner. Random members are drawn from a caller-supplied RNG so fixed seeds reproduce them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::biform::{tuple_count, BiForm};
use crate::field::{MetricField, OneForm, ScalarField};
use crate::jet::Jet;
use crate::manifold::ChartManifold;
use crate::potentials::PreContrastBiForm;
use crate::teleparallel::Coframe;

/// `c_0 + a·x + xᵀBx + amp · sin(ω·x + φ)`: a polynomial plus one trigonometric mode.
#[derive(Clone, Debug)]
pub struct SmoothFunction {
    c0: f64,
    linear: Vec<f64>,
    quadratic: Vec<f64>,
    amp: f64,
    omega: Vec<f64>,
    phase: f64,
}

impl SmoothFunction {
    /// Coefficients of size about `scale`, frequencies in `[-1.5, 1.5]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, nvars: usize, scale: f64) -> Self {
        let mut u = |s: f64| rng.gen_range(-s..s);
        SmoothFunction {
            c0: u(scale),
            linear: (0..nvars).map(|_| u(scale)).collect(),
            quadratic: (0..nvars * nvars).map(|_| u(0.5 * scale)).collect(),
            amp: u(scale),
            omega: (0..nvars).map(|_| u(1.5)).collect(),
            phase: u(core::f64::consts::PI),
        }
    }

    pub fn nvars(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        let n = self.nvars();
        let mut acc = Jet::constant(self.c0);
        let mut arg = Jet::constant(self.phase);
        for i in 0..n {
            acc += &(&x[i] * self.linear[i]);
            arg += &(&x[i] * self.omega[i]);
            let mut row = Jet::constant(0.0);
            for j in 0..n {
                row += &(&x[j] * self.quadratic[i * n + j]);
            }
            acc += &(&x[i] * &row);
        }
        acc += &(&arg.sin() * self.amp);
        acc
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let jets: Vec<Jet> = x.iter().map(|v| Jet::constant(*v)).collect();
        self.eval(&jets).value()
    }
}

/// A `(p, q)` bi-form whose components are independent random smooth functions of `(m, n)`.
pub fn random_biform<R: Rng + ?Sized>(rng: &mut R, manifold: &ChartManifold, p: usize, q: usize) -> BiForm {
    let n = manifold.dim();
    let len = tuple_count(n, p) * tuple_count(n, q);
    let comps: Vec<SmoothFunction> = (0..len).map(|_| SmoothFunction::random(rng, 2 * n, 1.0)).collect();
    BiForm::from_fn(manifold, p, q, move |x| comps.iter().map(|c| c.eval(x)).collect()).expect("degree within limits")
}

/// A random scalar field on the chart.
pub fn random_scalar_field<R: Rng + ?Sized>(rng: &mut R, manifold: &ChartManifold) -> ScalarField {
    let f = SmoothFunction::random(rng, manifold.dim(), 1.0);
    ScalarField::from_fn(manifold, move |x| f.eval(x))
}

/// `S_k(u, v) = Σ_j δ_j B_jk(v) + Σ_{j,l} δ_j δ_l C_jlk(u, v) + φ_k(v)` with `δ = u − v` and
/// `B = A Aᵀ + ½ I` for a random matrix field `A`, so `ι^* d^L S = B` is symmetric positive
/// definite.
pub fn random_precontrast<R: Rng + ?Sized>(rng: &mut R, manifold: &ChartManifold) -> PreContrastBiForm {
    let n = manifold.dim();
    let a: Vec<SmoothFunction> = (0..n * n).map(|_| SmoothFunction::random(rng, n, 0.4)).collect();
    let c: Vec<SmoothFunction> = (0..n * n * n).map(|_| SmoothFunction::random(rng, 2 * n, 0.3)).collect();
    let phi: Vec<SmoothFunction> = (0..n).map(|_| SmoothFunction::random(rng, n, 1.0)).collect();
    let form = BiForm::from_fn(manifold, 0, 1, move |x| {
        let (u, v) = x.split_at(n);
        let delta: Vec<Jet> = (0..n).map(|j| &u[j] - &v[j]).collect();
        let av: Vec<Jet> = a.iter().map(|f| f.eval(v)).collect();
        (0..n)
            .map(|k| {
                let mut acc = phi[k].eval(v);
                for j in 0..n {
                    let mut b = if j == k { Jet::constant(0.5) } else { Jet::constant(0.0) };
                    for m in 0..n {
                        b += &(&av[j * n + m] * &av[k * n + m]);
                    }
                    acc += &(&delta[j] * &b);
                    for l in 0..n {
                        acc += &(&(&delta[j] * &delta[l]) * &c[(j * n + l) * n + k].eval(x));
                    }
                }
                acc
            })
            .collect()
    })
    .expect("(0,1) components");
    PreContrastBiForm::new(form).expect("(0,1) degree")
}

/// `F(u, v) = Σ_{j,k} δ_j δ_k Q_jk(u, v)` with `Q = ½ I + ε · (random symmetric field)`,
/// a contrast function whose induced metric is `2 Q(m, m)`.
pub fn random_contrast_function<R: Rng + ?Sized>(rng: &mut R, manifold: &ChartManifold) -> BiForm {
    let n = manifold.dim();
    let eps = 0.1;
    let q: Vec<SmoothFunction> = (0..n * (n + 1) / 2).map(|_| SmoothFunction::random(rng, 2 * n, 1.0)).collect();
    BiForm::scalar(manifold, move |x| {
        let (u, v) = x.split_at(n);
        let delta: Vec<Jet> = (0..n).map(|j| &u[j] - &v[j]).collect();
        let mut acc = Jet::constant(0.0);
        let mut idx = 0;
        for j in 0..n {
            for k in j..n {
                let mut entry = &q[idx].eval(x) * eps;
                if j == k {
                    entry += &Jet::constant(0.5);
                }
                let w = if j == k { 1.0 } else { 2.0 };
                acc += &(&(&delta[j] * &delta[k]) * &(&entry * w));
                idx += 1;
            }
        }
        acc
    })
}

/// `½ ‖u − v‖²`.
pub fn squared_euclidean(manifold: &ChartManifold) -> BiForm {
    let n = manifold.dim();
    BiForm::scalar(manifold, move |x| {
        let mut acc = Jet::constant(0.0);
        for i in 0..n {
            acc += &(&x[i] - &x[n + i]).square();
        }
        &acc * 0.5
    })
}

/// Univariate normal family in `(μ, σ)` with sampling box `μ ∈ [-2, 2]`, `σ ∈ [0.5, 2]`.
pub fn gaussian_chart() -> ChartManifold {
    ChartManifold::new("normal(mu, sigma)", vec![-2.0, 0.5], vec![2.0, 2.0], |x| x[1] > 0.0).expect("valid chart")
}

/// `KL(N(μ₁, σ₁²) ‖ N(μ₂, σ₂²))`.
pub fn gaussian_kl_value(left: &[f64], right: &[f64]) -> f64 {
    let (m1, s1, m2, s2) = (left[0], left[1], right[0], right[1]);
    (s2 / s1).ln() + (s1 * s1 + (m1 - m2) * (m1 - m2)) / (2.0 * s2 * s2) - 0.5
}

/// The Kullback–Leibler divergence as a two-point function on [`gaussian_chart`].
pub fn gaussian_kl(manifold: &ChartManifold) -> BiForm {
    BiForm::scalar(manifold, |x| {
        let (m1, s1, m2, s2) = (&x[0], &x[1], &x[2], &x[3]);
        let num = &s1.square() + &(m1 - m2).square();
        &(&(s2 / s1).ln() + &(&num / &(&s2.square() * 2.0))) - 0.5
    })
}

/// Fisher metric `diag(1/σ², 2/σ²)` of the normal family.
pub fn gaussian_fisher(coords: &[f64]) -> [f64; 4] {
    let s2 = coords[1] * coords[1];
    [1.0 / s2, 0.0, 0.0, 2.0 / s2]
}

/// A coframe together with the metric it is paired with.
#[derive(Clone, Debug)]
pub struct CoframeExample {
    pub name: String,
    pub metric: MetricField,
    pub coframe: Coframe,
    /// Whether every `α^j` is closed, i.e. the teleparallel connection is torsion-free.
    pub closed: bool,
}

impl CoframeExample {
    pub fn manifold(&self) -> &ChartManifold {
        self.coframe.manifold()
    }
}

/// The annulus-sector chart `r ∈ (0.5, 2)`, `θ ∈ (-1, 1)` with domain `r > 0`.
pub fn polar_chart() -> ChartManifold {
    ChartManifold::new("polar(r, theta)", vec![0.5, -1.0], vec![2.0, 1.0], |x| x[0] > 0.0).expect("valid chart")
}

/// `{dx, dy}`, `{dx, eˣ dy}` on the plane and two coframes on the polar chart with
/// `g = diag(1, r²)`: the closed `{d(r cos θ), d(r sin θ)}` and the non-closed `{dr, r dθ}`.
pub fn coframe_corpus() -> Vec<CoframeExample> {
    let plane = ChartManifold::euclidean(2, 1.0);
    let exp = OneForm::new(&plane, |x, _| Ok(vec![Jet::constant(0.0), x[0].exp()]));
    let polar = polar_chart();
    let polar_metric = MetricField::new(&polar, |x, _| {
        Ok(vec![Jet::constant(1.0), Jet::constant(0.0), Jet::constant(0.0), x[0].square()])
    });
    let cartesian_x = OneForm::new(&polar, |x, _| Ok(vec![x[1].cos(), -(&x[0] * &x[1].sin())]));
    let cartesian_y = OneForm::new(&polar, |x, _| Ok(vec![x[1].sin(), &x[0] * &x[1].cos()]));
    let r_dtheta = OneForm::new(&polar, |x, _| Ok(vec![Jet::constant(0.0), x[0].clone()]));
    vec![
        CoframeExample {
            name: "cartesian".into(),
            metric: MetricField::euclidean(&plane),
            coframe: Coframe::coordinate(&plane),
            closed: true,
        },
        CoframeExample {
            name: "exponential".into(),
            metric: MetricField::euclidean(&plane),
            coframe: Coframe::new(vec![OneForm::coordinate(&plane, 0), exp]).expect("two one-forms"),
            closed: false,
        },
        CoframeExample {
            name: "polar-cartesian".into(),
            metric: polar_metric.clone(),
            coframe: Coframe::new(vec![cartesian_x, cartesian_y]).expect("two one-forms"),
            closed: true,
        },
        CoframeExample {
            name: "polar-orthonormal".into(),
            metric: polar_metric,
            coframe: Coframe::new(vec![OneForm::coordinate(&polar, 0), r_dtheta]).expect("two one-forms"),
            closed: false,
        },
    ]
}

/// `g = diag(1, e^{2x})` with the coordinate coframe, whose teleparallel connection differs
/// from the Levi-Civita connection of `g`.
pub fn warped_example() -> CoframeExample {
    let plane = ChartManifold::euclidean(2, 1.0);
    let g = MetricField::diagonal(
        &plane,
        vec![ScalarField::constant(&plane, 1.0), ScalarField::from_fn(&plane, |x| (&x[0] * 2.0).exp())],
    )
    .expect("two diagonal entries");
    CoframeExample { name: "warped".into(), metric: g, coframe: Coframe::coordinate(&plane), closed: true }
}

/// Named two-point functions used for Eguchi checks.
pub fn contrast_function_corpus<R: Rng + ?Sized>(rng: &mut R, random_count: usize) -> Vec<(String, BiForm)> {
    let plane = ChartManifold::euclidean(2, 1.0);
    let mut out = vec![
        ("squared-euclidean".into(), squared_euclidean(&plane)),
        ("gaussian-kl".into(), gaussian_kl(&gaussian_chart())),
    ];
    for i in 0..random_count {
        let dim = 2 + i % 2;
        let m = ChartManifold::euclidean(dim, 1.0);
        out.push((format!("random-contrast-{i}"), random_contrast_function(rng, &m)));
    }
    out
}

