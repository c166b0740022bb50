//! Teleparallel connections of global coframes, gradient frames, and the canonical
//! solution of the inverse problem `(g^ϖ, ∇^ϖ) = (g, ∇)`.

use alloc::vec::Vec;

use crate::biform::BiForm;
use crate::error::{Error, Result};
use crate::field::{Connection, JetConfig, MetricField, MultiField, OneForm, VectorField};
use crate::geometry::inverse_metric_jets;
use crate::jet::Jet;
use crate::linalg::{inverse_with_condition, jet_inverse};
use crate::manifold::{ChartManifold, Point};
use crate::potentials::ContrastBiForm;

/// A global coframe `{α^j}` stored as the matrix field `α^j_k` at `j * n + k`.
#[derive(Clone, Debug)]
pub struct Coframe {
    matrix: MultiField,
}

impl Coframe {
    pub fn new(alphas: Vec<OneForm>) -> Result<Self> {
        let first = alphas.first().ok_or_else(|| Error::Config("empty coframe".into()))?;
        let m = first.manifold().clone();
        if alphas.len() != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), got: alphas.len() });
        }
        Ok(Coframe { matrix: MultiField::concat(&m, alphas.into_iter().map(|a| a.field().clone()).collect()) })
    }

    /// From the matrix field `α^j_k` at `j * n + k`.
    pub fn from_matrix(matrix: MultiField) -> Result<Self> {
        let n = matrix.dim();
        if matrix.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: matrix.len() });
        }
        Ok(Coframe { matrix })
    }

    /// The coordinate coframe `{dx^j}`.
    pub fn coordinate(manifold: &ChartManifold) -> Self {
        let n = manifold.dim();
        let mut id = alloc::vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Coframe { matrix: MultiField::constant(manifold, id) }
    }

    pub fn manifold(&self) -> &ChartManifold {
        self.matrix.manifold()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &MultiField {
        &self.matrix
    }

    pub fn alpha(&self, j: usize) -> OneForm {
        let n = self.dim();
        OneForm::from_field(self.matrix.slice(j * n..(j + 1) * n)).expect("n components")
    }

    /// Fails with a frame error at the first probe where the matrix is ill-conditioned.
    pub fn check(&self, probes: &[Point], cfg: &JetConfig) -> Result<()> {
        let n = self.dim();
        for p in probes {
            let a = self.matrix.values_at(p, cfg)?;
            if let Err(condition) = inverse_with_condition(&a, n) {
                return Err(Error::FrameSingular { coords: p.coords().to_vec(), condition });
            }
        }
        Ok(())
    }
}

/// The connection making every `α^j` parallel: `Γ^k_{ij} = e_a^k ∂_i α^a_j`.
pub fn teleparallel_connection(b: &Coframe) -> Connection {
    let mat = b.matrix.clone();
    let n = b.dim();
    let field = MultiField::new(b.manifold(), n * n * n, move |x, cfg| {
        let a = mat.eval(x, cfg)?;
        let e = jet_inverse(&a, n).map_err(|condition| Error::FrameSingular {
            coords: x.iter().map(Jet::value).collect(),
            condition,
        })?;
        let da = mat.partials(x, cfg)?;
        let mut out = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Jet::constant(0.0);
                    for s in 0..n {
                        acc += &(&e[k * n + s] * &da[s * n + j][i]);
                    }
                    out.push(acc);
                }
            }
        }
        Ok(out)
    });
    Connection::from_field(field).expect("n^3 components")
}

/// `max_{j,i,k} |(∇_i α^j)_k|` with `(∇_i α)_k = ∂_i α_k − Γ^l_{ik} α_l`.
pub fn covariant_constancy_residual(conn: &Connection, b: &Coframe, p: &Point, cfg: &JetConfig) -> Result<f64> {
    let n = b.dim();
    let x: Vec<Jet> = p.coords().iter().map(|&c| Jet::constant(c)).collect();
    let a = b.matrix.values_at(p, cfg)?;
    let da = b.matrix.partials(&x, cfg)?;
    let gam = conn.values_at(p, cfg)?;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                let mut v = da[j * n + k][i].value();
                for l in 0..n {
                    v -= gam[Connection::index(n, l, i, k)] * a[j * n + l];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// The `g`-gradients `Z_j` of a coframe and their dual coframe `β^i`.
#[derive(Clone, Debug)]
pub struct GradientFrame {
    /// `Z_j^k` at `j * n + k`.
    z: MultiField,
    /// `β^i_k` at `i * n + k`.
    beta: MultiField,
}

impl GradientFrame {
    pub fn dim(&self) -> usize {
        self.z.dim()
    }

    pub fn z_matrix(&self) -> &MultiField {
        &self.z
    }

    pub fn beta_matrix(&self) -> &MultiField {
        &self.beta
    }

    pub fn z(&self, j: usize) -> VectorField {
        let n = self.dim();
        VectorField::from_field(self.z.slice(j * n..(j + 1) * n)).expect("n components")
    }

    pub fn beta(&self, i: usize) -> OneForm {
        let n = self.dim();
        OneForm::from_field(self.beta.slice(i * n..(i + 1) * n)).expect("n components")
    }

    /// `max |β^i(Z_j) − δ^i_j|` at a point.
    pub fn duality_residual(&self, p: &Point, cfg: &JetConfig) -> Result<f64> {
        let n = self.dim();
        let (z, b) = (self.z.values_at(p, cfg)?, self.beta.values_at(p, cfg)?);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| b[i * n + k] * z[j * n + k]).sum();
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        Ok(worst)
    }
}

/// `Z_j = g^{-1} α^j` and `β` with `β^i(Z_j) = δ^i_j`.
pub fn gradient_frame(g: &MetricField, b: &Coframe) -> GradientFrame {
    let n = b.dim();
    let (g1, mat) = (g.clone(), b.matrix.clone());
    let z = MultiField::new(b.manifold(), n * n, move |x, cfg| {
        let inv = inverse_metric_jets(&g1, x, cfg)?;
        let a = mat.eval(x, cfg)?;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let mut acc = Jet::constant(0.0);
                for l in 0..n {
                    acc += &(&inv[k * n + l] * &a[j * n + l]);
                }
                out.push(acc);
            }
        }
        Ok(out)
    });
    let zf = z.clone();
    let beta = MultiField::new(b.manifold(), n * n, move |x, cfg| {
        let zm = zf.eval(x, cfg)?;
        // β = (Z^T)^{-1} where Z has rows Z_j
        let zt: Vec<Jet> = (0..n * n).map(|c| zm[(c % n) * n + c / n].clone()).collect();
        jet_inverse(&zt, n).map_err(|condition| Error::Singular {
            coords: x.iter().map(Jet::value).collect(),
            condition,
        })
    });
    GradientFrame { z, beta }
}

/// Largest entry of `α^j − Σ_i g(Z_i, Z_j) β^i` at a point.
pub fn coframe_relation_residual(g: &MetricField, b: &Coframe, frame: &GradientFrame, p: &Point, cfg: &JetConfig) -> Result<f64> {
    let n = b.dim();
    let (gv, a) = (g.values_at(p, cfg)?, b.matrix.values_at(p, cfg)?);
    let (z, beta) = (frame.z.values_at(p, cfg)?, frame.beta.values_at(p, cfg)?);
    let gz = |i: usize, j: usize| -> f64 {
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                acc += z[i * n + k] * gv[k * n + l] * z[j * n + l];
            }
        }
        acc
    };
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let rhs: f64 = (0..n).map(|i| gz(i, j) * beta[i * n + k]).sum();
            worst = worst.max((a[j * n + k] - rhs).abs());
        }
    }
    Ok(worst)
}

/// `ϖ = Σ_j π_L^*α^j ⊗ π_R^*β^j`, the representative with coefficients `ϖ_{ij} = π_L^* g_{ij}`.
pub fn canonical_biform(g: &MetricField, b: &Coframe) -> ContrastBiForm {
    let frame = gradient_frame(g, b);
    let n = b.dim();
    let (mat, beta) = (b.matrix.clone(), frame.beta.clone());
    let form = BiForm::from_field(
        b.manifold(),
        1,
        1,
        MultiField::new(&b.manifold().square(), n * n, move |x, cfg| {
            let a = mat.eval(&x[..n], cfg)?;
            let bt = beta.eval(&x[n..], cfg)?;
            let mut out = Vec::with_capacity(n * n);
            for k in 0..n {
                for l in 0..n {
                    let mut acc = Jet::constant(0.0);
                    for j in 0..n {
                        acc += &(&a[j * n + k] * &bt[j * n + l]);
                    }
                    out.push(acc);
                }
            }
            Ok(out)
        }),
    )
    .expect("(1,1) components");
    ContrastBiForm::new_unchecked(form)
}

/// `ϖ = Σ_{ij} ϖ_{ij} π_L^*β^i ⊗ π_R^*β^j` for caller-supplied two-point coefficients,
/// `coeffs[i * n + j] = ϖ_{ij}`.
pub fn biform_from_frame_coefficients(frame: &GradientFrame, coeffs: &[BiForm]) -> Result<BiForm> {
    let n = frame.dim();
    if coeffs.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: coeffs.len() });
    }
    let m = coeffs[0].manifold().clone();
    let mut terms = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let t = BiForm::one_forms(&frame.beta(i), &frame.beta(j)).times(&coeffs[i * n + j])?;
            terms.push((1.0, t));
        }
    }
    BiForm::linear_combination(&m, 1, 1, terms)
}

/// Residuals of the inverse-problem system for a candidate `ϖ` against `(g, ∇)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseProblemResiduals {
    /// `max |ι^*(∂_{u_k} ϖ_{ij}) − g(∇_{∂_k} Z_i, Z_j)|`.
    pub connection: f64,
    /// `max |ι^*ϖ_{ij} − g(Z_i, Z_j)|`.
    pub metric: f64,
    /// `max |(ι^* d^L ϖ_{ij})_k − ∂_k g(Z_i, Z_j)|`.
    pub differential: f64,
    pub tolerance: f64,
}

impl InverseProblemResiduals {
    pub fn passed(&self) -> bool {
        self.connection < self.tolerance && self.metric < self.tolerance && self.differential < self.tolerance
    }
}

/// Checks whether `ϖ` induces `(g, ∇)`, using the gradient frame of a coframe to form the
/// coefficients `ϖ_{ij} = ϖ(Z_i | Z_j)`. Directions run over the coordinate frame.
pub fn verify_inverse_problem(
    w: &ContrastBiForm,
    g: &MetricField,
    conn: &Connection,
    frame: &GradientFrame,
    probes: &[Point],
    tol: f64,
    cfg: &JetConfig,
) -> Result<InverseProblemResiduals> {
    let n = w.dim();
    let form = w.form();
    let mut res = InverseProblemResiduals { connection: 0.0, metric: 0.0, differential: 0.0, tolerance: tol };
    for p in probes {
        let m = p.coords();
        // ϖ_{ij} and its left derivatives on the diagonal
        let comps = form.eval(m, m, 1, cfg)?;
        let (lx, rx): (Vec<Jet>, Vec<Jet>) = (
            m.iter().enumerate().map(|(i, &c)| Jet::variable(2 * n, 1, i, c)).collect(),
            m.iter().enumerate().map(|(i, &c)| Jet::variable(2 * n, 1, n + i, c)).collect(),
        );
        let (zl, zr) = (frame.z.eval(&lx, cfg)?, frame.z.eval(&rx, cfg)?);
        let seeds = Jet::seeds(m, 1);
        let zs = frame.z.eval(&seeds, cfg)?;
        let gs = g.eval(&seeds, cfg)?;
        let gam = conn.values_at(p, cfg)?;
        for i in 0..n {
            for j in 0..n {
                // ϖ_{ij}(m, n) as a jet in 2n variables
                let mut wij = Jet::constant(0.0);
                for k in 0..n {
                    for l in 0..n {
                        wij += &(&(&comps[k * n + l] * &zl[i * n + k]) * &zr[j * n + l]);
                    }
                }
                // g(Z_i, Z_j) as a jet on M
                let mut gij = Jet::constant(0.0);
                for k in 0..n {
                    for l in 0..n {
                        gij += &(&(&zs[i * n + k] * &gs[k * n + l]) * &zs[j * n + l]);
                    }
                }
                res.metric = res.metric.max((wij.value() - gij.value()).abs());
                for k in 0..n {
                    let lhs = wij.coeff(&[k]);
                    // ∇_{∂k} Z_i = ∂_k Z_i^a + Γ^a_{kb} Z_i^b
                    let mut rhs = 0.0;
                    for a in 0..n {
                        let mut cov = zs[i * n + a].coeff(&[k]);
                        for b in 0..n {
                            cov += gam[Connection::index(n, a, k, b)] * zs[i * n + b].value();
                        }
                        for c in 0..n {
                            rhs += cov * gs[a * n + c].value() * zs[j * n + c].value();
                        }
                    }
                    res.connection = res.connection.max((lhs - rhs).abs());
                    res.differential = res.differential.max((lhs - gij.coeff(&[k])).abs());
                }
            }
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::geometry::{levi_civita, torsion_tensor};
    use crate::potentials::{induced_connection, induced_metric};
    use approx::assert_abs_diff_eq;

    fn cfg() -> JetConfig {
        JetConfig::jet()
    }

    fn exp_coframe(m: &ChartManifold) -> Coframe {
        let a2 = OneForm::new(m, |x, _| Ok(alloc::vec![Jet::constant(0.0), x[0].exp()]));
        Coframe::new(alloc::vec![OneForm::coordinate(m, 0), a2]).unwrap()
    }

    #[test]
    fn coordinate_coframe_is_flat() {
        let m = ChartManifold::euclidean(2, 1.0);
        let c = teleparallel_connection(&Coframe::coordinate(&m));
        assert!(c.values_at(&Point::new(alloc::vec![0.3, 0.1]), &cfg()).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn exponential_coframe_connection_and_torsion() {
        let m = ChartManifold::euclidean(2, 1.0);
        let b = exp_coframe(&m);
        let c = teleparallel_connection(&b);
        let p = Point::new(alloc::vec![0.4, -0.3]);
        let gam = c.values_at(&p, &cfg()).unwrap();
        for (idx, v) in gam.iter().enumerate() {
            let expected = if idx == Connection::index(2, 1, 0, 1) { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(*v, expected, epsilon = 1e-15);
        }
        let t = torsion_tensor(&c).values_at(&p, &cfg()).unwrap();
        assert_abs_diff_eq!(t[crate::field::MixedTensor::index(2, 1, 0, 1)], 1.0, epsilon = 1e-15);
        assert!(covariant_constancy_residual(&c, &b, &p, &cfg()).unwrap() < 1e-14);
    }

    #[test]
    fn gradient_frame_of_diagonal_metric() {
        let m = ChartManifold::euclidean(2, 1.0);
        let g = MetricField::constant(&m, alloc::vec![1.0, 0.0, 0.0, 4.0]);
        let f = gradient_frame(&g, &Coframe::coordinate(&m));
        let p = Point::new(alloc::vec![0.0, 0.0]);
        assert_eq!(f.z_matrix().values_at(&p, &cfg()).unwrap(), alloc::vec![1.0, 0.0, 0.0, 0.25]);
        assert_eq!(f.beta_matrix().values_at(&p, &cfg()).unwrap(), alloc::vec![1.0, 0.0, 0.0, 4.0]);
        assert_eq!(f.duality_residual(&p, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn canonical_biform_on_exponential_coframe() {
        let m = ChartManifold::euclidean(2, 1.0);
        let b = exp_coframe(&m);
        let g = MetricField::euclidean(&m);
        let w = canonical_biform(&g, &b);
        let (l, r) = (Point::new(alloc::vec![0.3, 0.1]), Point::new(alloc::vec![-0.2, 0.5]));
        let c = w.form().components(&l, &r, &cfg()).unwrap();
        assert_abs_diff_eq!(c[3], 0.3f64.exp() * 0.2f64.exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-15);
        let gi = induced_metric(&w).values_at(&l, &cfg()).unwrap();
        for (a, e) in gi.iter().zip([1.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, e, epsilon = 1e-14);
        }
        let gam = induced_connection(&w).values_at(&l, &cfg()).unwrap();
        let tele = teleparallel_connection(&b).values_at(&l, &cfg()).unwrap();
        for (a, e) in gam.iter().zip(&tele) {
            assert_abs_diff_eq!(a, e, epsilon = 1e-14);
        }
        let frame = gradient_frame(&g, &b);
        assert!(coframe_relation_residual(&g, &b, &frame, &l, &cfg()).unwrap() < 1e-14);
        let r = verify_inverse_problem(&w, &g, &teleparallel_connection(&b), &frame, &[l.clone(), r], 1e-8, &cfg()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn perturbed_and_levi_civita_candidates_fail() {
        let m = ChartManifold::euclidean(2, 1.0);
        let b = exp_coframe(&m);
        let g = MetricField::euclidean(&m);
        let frame = gradient_frame(&g, &b);
        let w = canonical_biform(&g, &b);
        let dx = OneForm::coordinate(&m, 0);
        let bad = ContrastBiForm::new_unchecked(w.form().add(&BiForm::one_forms(&dx, &dx)).unwrap());
        let probes = [Point::new(alloc::vec![0.1, 0.2])];
        let tele = teleparallel_connection(&b);
        let r = verify_inverse_problem(&bad, &g, &tele, &frame, &probes, 1e-8, &cfg()).unwrap();
        assert!(!r.passed() && r.metric > 0.5);

        let hyp = MetricField::diagonal(
            &m,
            alloc::vec![ScalarField::constant(&m, 1.0), ScalarField::from_fn(&m, |x| (&x[0] * 2.0).exp())],
        )
        .unwrap();
        let cb = Coframe::coordinate(&m);
        let frame = gradient_frame(&hyp, &cb);
        let w = canonical_biform(&hyp, &cb);
        let r = verify_inverse_problem(&w, &hyp, &levi_civita(&hyp), &frame, &probes, 1e-8, &cfg()).unwrap();
        assert!(r.connection > 1e-3 && r.metric < 1e-12, "{r:?}");
    }

    #[test]
    fn frame_coefficient_hook_reproduces_canonical_form() {
        let m = ChartManifold::euclidean(2, 1.0);
        let b = exp_coframe(&m);
        let g = MetricField::euclidean(&m);
        let frame = gradient_frame(&g, &b);
        let n = 2;
        let coeffs: Vec<BiForm> = (0..n * n)
            .map(|c| {
                let (i, j) = (c / n, c % n);
                let gz = g.apply(&frame.z(i), &frame.z(j));
                BiForm::left_pullback(&gz)
            })
            .collect();
        let w = biform_from_frame_coefficients(&frame, &coeffs).unwrap();
        let canon = canonical_biform(&g, &b);
        let (l, r) = (Point::new(alloc::vec![0.3, 0.1]), Point::new(alloc::vec![-0.2, 0.5]));
        let (a, e) = (w.components(&l, &r, &cfg()).unwrap(), canon.form().components(&l, &r, &cfg()).unwrap());
        for (x, y) in a.iter().zip(&e) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn singular_coframe_is_reported() {
        let m = ChartManifold::euclidean(2, 1.0);
        let a2 = OneForm::new(&m, |x, _| Ok(alloc::vec![x[0].clone(), Jet::constant(0.0)]));
        let b = Coframe::new(alloc::vec![OneForm::coordinate(&m, 0), a2]).unwrap();
        assert!(matches!(
            b.check(&[Point::new(alloc::vec![0.5, 0.0])], &cfg()),
            Err(Error::FrameSingular { .. })
        ));
    }
}
