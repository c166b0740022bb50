//! Coordinate formulas for brackets, gradients, covariant derivatives, torsion and
//! conjugate connections.
//!
//! Christoffel convention: `∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k` (first lower index is the
//! direction). All constructions are lazy; errors surface when a field is evaluated.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{
    dot, Connection, CovariantTensor3, JetConfig, MetricField, MixedTensor, OneForm, ScalarField,
    TwoForm, VectorField,
};
use crate::jet::Jet;
use crate::linalg::jet_inverse;
use crate::manifold::Point;

/// `X(f) = Σ_k X^k ∂_k f`.
pub fn directional_derivative(f: &ScalarField, x: &VectorField) -> ScalarField {
    let (f, x) = (f.clone(), x.clone());
    let m = f.manifold().clone();
    ScalarField::new(&m, move |p, cfg| {
        let grad = f.field().partials(p, cfg)?.swap_remove(0);
        let xv = x.eval(p, cfg)?;
        Ok(vec![dot(&xv, &grad)])
    })
}

/// `[X, Y]^k = X^j ∂_j Y^k − Y^j ∂_j X^k`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let (x, y) = (x.clone(), y.clone());
    let m = x.manifold().clone();
    let n = m.dim();
    VectorField::new(&m, move |p, cfg| {
        let (xv, yv) = (x.eval(p, cfg)?, y.eval(p, cfg)?);
        let (dx, dy) = (x.field().partials(p, cfg)?, y.field().partials(p, cfg)?);
        Ok((0..n).map(|k| &dot(&xv, &dy[k]) - &dot(&yv, &dx[k])).collect())
    })
}

/// `(dα)_{ij} = ∂_i α_j − ∂_j α_i`.
pub fn exterior_derivative(alpha: &OneForm) -> TwoForm {
    let a = alpha.clone();
    let m = a.manifold().clone();
    let n = m.dim();
    TwoForm::new(&m, move |p, cfg| {
        let d = a.field().partials(p, cfg)?;
        let mut out = vec![Jet::constant(0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out[i * n + j] = &d[j][i] - &d[i][j];
                }
            }
        }
        Ok(out)
    })
}

/// Inverse metric entries at jet coordinates, failing loudly on ill-conditioned metrics.
pub fn inverse_metric_jets(g: &MetricField, p: &[Jet], cfg: &JetConfig) -> Result<Vec<Jet>> {
    let n = g.dim();
    let gv = g.eval(p, cfg)?;
    jet_inverse(&gv, n).map_err(|condition| Error::Singular {
        coords: p.iter().map(Jet::value).collect(),
        condition,
    })
}

/// The vector field `Z` with `i_Z g = α`, i.e. `Z^k = g^{kl} α_l`.
pub fn gradient_field(g: &MetricField, alpha: &OneForm) -> VectorField {
    let (g, a) = (g.clone(), alpha.clone());
    let m = g.manifold().clone();
    let n = m.dim();
    VectorField::new(&m, move |p, cfg| {
        let inv = inverse_metric_jets(&g, p, cfg)?;
        let av = a.eval(p, cfg)?;
        Ok((0..n).map(|k| dot(&inv[k * n..(k + 1) * n], &av)).collect())
    })
}

/// `(∇_Z X)^k = Z^i ∂_i X^k + Γ^k_{ij} Z^i X^j`.
pub fn covariant_derivative(conn: &Connection, z: &VectorField, x: &VectorField) -> VectorField {
    let (c, z, x) = (conn.clone(), z.clone(), x.clone());
    let m = c.manifold().clone();
    let n = m.dim();
    VectorField::new(&m, move |p, cfg| {
        let (gam, zv, xv) = (c.eval(p, cfg)?, z.eval(p, cfg)?, x.eval(p, cfg)?);
        let dx = x.field().partials(p, cfg)?;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = dot(&zv, &dx[k]);
            for i in 0..n {
                for j in 0..n {
                    let g = &gam[Connection::index(n, k, i, j)];
                    if g.is_constant() && g.value() == 0.0 {
                        continue;
                    }
                    acc += &(&(g * &zv[i]) * &xv[j]);
                }
            }
            out.push(acc);
        }
        Ok(out)
    })
}

/// `T^k_{ij} = Γ^k_{ij} − Γ^k_{ji}`.
pub fn torsion_tensor(conn: &Connection) -> MixedTensor {
    let c = conn.clone();
    let m = c.manifold().clone();
    let n = m.dim();
    MixedTensor::new(&m, move |p, cfg| {
        let gam = c.eval(p, cfg)?;
        let mut out = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.push(&gam[Connection::index(n, k, i, j)] - &gam[Connection::index(n, k, j, i)]);
                }
            }
        }
        Ok(out)
    })
}

/// `T_{ijl} = g_{kl} T^k_{ij}`.
pub fn lower_torsion(torsion: &MixedTensor, g: &MetricField) -> CovariantTensor3 {
    let (t, g) = (torsion.clone(), g.clone());
    let m = t.manifold().clone();
    let n = m.dim();
    CovariantTensor3::new(&m, move |p, cfg| {
        let (tv, gv) = (t.eval(p, cfg)?, g.eval(p, cfg)?);
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut acc = Jet::constant(0.0);
                    for k in 0..n {
                        acc += &(&gv[k * n + l] * &tv[MixedTensor::index(n, k, i, j)]);
                    }
                    out.push(acc);
                }
            }
        }
        Ok(out)
    })
}

/// Lowered Christoffels `Γ_{ij,k} = g_{kl} Γ^l_{ij}`, indexed `(i * n + j) * n + k`.
pub fn lowered_christoffels(conn: &Connection, g: &MetricField, p: &[Jet], cfg: &JetConfig) -> Result<Vec<Jet>> {
    let n = g.dim();
    let (gam, gv) = (conn.eval(p, cfg)?, g.eval(p, cfg)?);
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = Jet::constant(0.0);
                for l in 0..n {
                    acc += &(&gv[k * n + l] * &gam[Connection::index(n, l, i, j)]);
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

/// Raises the last index of `Γ_{ij,k}` with `g⁻¹`.
fn raise_christoffels(lowered: &[Jet], inv: &[Jet], n: usize) -> Vec<Jet> {
    let mut out = vec![Jet::constant(0.0); n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = Jet::constant(0.0);
                for k in 0..n {
                    acc += &(&inv[l * n + k] * &lowered[(i * n + j) * n + k]);
                }
                out[Connection::index(n, l, i, j)] = acc;
            }
        }
    }
    out
}

/// The `g`-conjugate connection: `Γ†_{ij,k} = ∂_i g_{jk} − Γ_{ik,j}`.
///
/// With this definition `Z g(X, Y) = g(∇_Z X, Y) + g(X, ∇†_Z Y)`.
pub fn conjugate_connection(g: &MetricField, conn: &Connection) -> Connection {
    let (g, c) = (g.clone(), conn.clone());
    let m = g.manifold().clone();
    let n = m.dim();
    Connection::new(&m, move |p, cfg| {
        let dg = g.field().partials(p, cfg)?;
        let low = lowered_christoffels(&c, &g, p, cfg)?;
        let inv = inverse_metric_jets(&g, p, cfg)?;
        let mut dual = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // ∇†_{∂i} ∂j paired with ∂k
                    dual.push(&dg[j * n + k][i] - &low[(i * n + k) * n + j]);
                }
            }
        }
        Ok(raise_christoffels(&dual, &inv, n))
    })
}

/// Levi-Civita connection, `Γ_{ij,k} = ½(∂_i g_{jk} + ∂_j g_{ik} − ∂_k g_{ij})`.
pub fn levi_civita(g: &MetricField) -> Connection {
    let g = g.clone();
    let m = g.manifold().clone();
    let n = m.dim();
    Connection::new(&m, move |p, cfg| {
        let dg = g.field().partials(p, cfg)?;
        let inv = inverse_metric_jets(&g, p, cfg)?;
        let mut low = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    low.push(&(&(&dg[j * n + k][i] + &dg[i * n + k][j]) - &dg[i * n + j][k]) * 0.5);
                }
            }
        }
        Ok(raise_christoffels(&low, &inv, n))
    })
}

/// Largest coordinate-frame residual of `∂_i g_{jk} − Γ_{ij,k} − Γ†_{ik,j}` at `p`.
pub fn conjugacy_residual(
    g: &MetricField,
    conn: &Connection,
    dual: &Connection,
    p: &Point,
    cfg: &JetConfig,
) -> Result<f64> {
    g.manifold().check(p.coords())?;
    let n = g.dim();
    let x: Vec<Jet> = p.coords().iter().map(|&c| Jet::constant(c)).collect();
    let dg = g.field().partials(&x, cfg)?;
    let low = lowered_christoffels(conn, g, &x, cfg)?;
    let low_dual = lowered_christoffels(dual, g, &x, cfg)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = dg[j * n + k][i].value()
                    - low[(i * n + j) * n + k].value()
                    - low_dual[(i * n + k) * n + j].value();
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Largest absolute component of a field's values at `p`.
pub fn max_abs_at(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ChartManifold;
    use approx::assert_abs_diff_eq;

    fn plane() -> ChartManifold {
        ChartManifold::euclidean(2, 2.0)
    }

    fn cfg() -> JetConfig {
        JetConfig::jet()
    }

    #[test]
    fn directional_derivative_of_product() {
        let m = plane();
        let f = ScalarField::from_fn(&m, |x| &x[0] * &x[1]);
        let dx = VectorField::coordinate(&m, 0);
        let v = directional_derivative(&f, &dx).value_at(&Point::new(vec![2.0, 3.0]), &cfg()).unwrap();
        assert_eq!(v, 3.0);
        let c = ScalarField::constant(&m, 4.0);
        assert_eq!(directional_derivative(&c, &dx).value_at(&Point::new(vec![0.1, 0.2]), &cfg()).unwrap(), 0.0);
        let zero = VectorField::zero(&m);
        assert_eq!(directional_derivative(&f, &zero).value_at(&Point::new(vec![0.1, 0.2]), &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn bracket_examples() {
        let m = plane();
        let dx = VectorField::coordinate(&m, 0);
        let xdy = VectorField::new(&m, |p, _| Ok(vec![Jet::constant(0.0), p[0].clone()]));
        let p = Point::new(vec![0.7, -0.3]);
        assert_eq!(lie_bracket(&dx, &xdy).values_at(&p, &cfg()).unwrap(), vec![0.0, 1.0]);
        assert_eq!(lie_bracket(&xdy, &xdy).values_at(&p, &cfg()).unwrap(), vec![0.0, 0.0]);
        let x2dx = VectorField::new(&m, |p, _| Ok(vec![&p[0] * &p[0], Jet::constant(0.0)]));
        let b = lie_bracket(&x2dx, &dx).values_at(&p, &cfg()).unwrap();
        assert_abs_diff_eq!(b[0], -2.0 * 0.7, epsilon = 1e-15);
        assert_eq!(b[1], 0.0);
    }

    #[test]
    fn exterior_derivative_examples() {
        let m = plane();
        let p = Point::new(vec![0.4, 1.0]);
        let dx = OneForm::coordinate(&m, 0);
        assert!(exterior_derivative(&dx).values_at(&p, &cfg()).unwrap().iter().all(|v| *v == 0.0));
        let exdy = OneForm::new(&m, |x, _| Ok(vec![Jet::constant(0.0), x[0].exp()]));
        let d = exterior_derivative(&exdy).values_at(&p, &cfg()).unwrap();
        assert_abs_diff_eq!(d[1], 0.4f64.exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(d[2], -(0.4f64.exp()), epsilon = 1e-15);
        let xdy_ydx = OneForm::new(&m, |x, _| Ok(vec![x[1].clone(), x[0].clone()]));
        assert!(exterior_derivative(&xdy_ydx).values_at(&p, &cfg()).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gradient_examples() {
        let m = plane();
        let p = Point::new(vec![0.0, 0.0]);
        let z = gradient_field(&MetricField::euclidean(&m), &OneForm::coordinate(&m, 0));
        assert_eq!(z.values_at(&p, &cfg()).unwrap(), vec![1.0, 0.0]);
        let g = MetricField::constant(&m, vec![1.0, 0.0, 0.0, 4.0]);
        let z = gradient_field(&g, &OneForm::coordinate(&m, 1));
        assert_eq!(z.values_at(&p, &cfg()).unwrap(), vec![0.0, 0.25]);
    }

    #[test]
    fn gaussian_fisher_gradient() {
        let m = ChartManifold::new("gauss", vec![-1.0, 0.5], vec![1.0, 2.0], |x| x[1] > 0.0).unwrap();
        let g = MetricField::diagonal(
            &m,
            vec![
                ScalarField::from_fn(&m, |x| x[1].powi(-2)),
                ScalarField::from_fn(&m, |x| 2.0 * x[1].powi(-2)),
            ],
        )
        .unwrap();
        let z = gradient_field(&g, &OneForm::coordinate(&m, 0));
        let v = z.values_at(&Point::new(vec![0.2, 1.3]), &cfg()).unwrap();
        assert_abs_diff_eq!(v[0], 1.69, epsilon = 1e-14);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn singular_metric_reports_point() {
        let m = plane();
        let g = MetricField::constant(&m, vec![1.0, 1.0, 1.0, 1.0]);
        let z = gradient_field(&g, &OneForm::coordinate(&m, 0));
        match z.values_at(&Point::new(vec![0.5, 0.5]), &cfg()) {
            Err(Error::Singular { coords, .. }) => assert_eq!(coords, vec![0.5, 0.5]),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn covariant_derivative_examples() {
        let m = plane();
        let p = Point::new(vec![0.1, 0.2]);
        let mut comps = vec![0.0; 8];
        comps[Connection::index(2, 1, 0, 1)] = 1.0;
        let conn = Connection::from_field(crate::field::MultiField::constant(&m, comps)).unwrap();
        let v = covariant_derivative(&conn, &VectorField::coordinate(&m, 0), &VectorField::coordinate(&m, 1));
        assert_eq!(v.values_at(&p, &cfg()).unwrap(), vec![0.0, 1.0]);
        let flat = Connection::flat(&m);
        let c = VectorField::constant(&m, vec![2.0, -1.0]);
        let w = covariant_derivative(&flat, &VectorField::coordinate(&m, 1), &c);
        assert_eq!(w.values_at(&p, &cfg()).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn torsion_of_symmetric_connection_vanishes() {
        let m = plane();
        let g = MetricField::new(&m, |x, _| {
            let a = &x[0] * &x[0] + 1.0;
            Ok(vec![a, Jet::constant(0.0), Jet::constant(0.0), x[1].exp()])
        });
        let t = torsion_tensor(&levi_civita(&g)).values_at(&Point::new(vec![0.3, 0.1]), &cfg()).unwrap();
        assert!(t.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn levi_civita_is_self_conjugate() {
        let m = plane();
        let g = MetricField::new(&m, |x, _| {
            let off = &x[0] * &x[1] * 0.1;
            Ok(vec![&x[0] * &x[0] + 1.0, off.clone(), off, x[1].exp()])
        });
        let lc = levi_civita(&g);
        let dual = conjugate_connection(&g, &lc);
        let p = Point::new(vec![0.3, -0.2]);
        let (a, b) = (lc.values_at(&p, &cfg()).unwrap(), dual.values_at(&p, &cfg()).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-13);
        }
    }

    #[test]
    fn flat_connection_conjugate_is_metric_derivative() {
        let m = plane();
        let g = MetricField::new(&m, |x, _| {
            Ok(vec![x[0].exp(), Jet::constant(0.0), Jet::constant(0.0), &x[0] * &x[1] + 3.0])
        });
        let dual = conjugate_connection(&g, &Connection::flat(&m));
        let p = Point::new(vec![0.5, 0.25]);
        let dv = dual.values_at(&p, &cfg()).unwrap();
        // Γ†_{ij,k} = ∂_i g_{jk}; lower again and compare.
        let gv = g.values_at(&p, &cfg()).unwrap();
        let n = 2;
        let dg = g.field().partials(&Jet::seeds(p.coords(), 0), &cfg()).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let low: f64 = (0..n).map(|l| gv[k * n + l] * dv[Connection::index(n, l, i, j)]).sum();
                    assert_abs_diff_eq!(low, dg[j * n + k][i].value(), epsilon = 1e-13);
                }
            }
        }
        assert!(conjugacy_residual(&g, &Connection::flat(&m), &dual, &p, &cfg()).unwrap() < 1e-13);
        let back = conjugate_connection(&g, &dual).values_at(&p, &cfg()).unwrap();
        assert!(back.iter().all(|v| v.abs() < 1e-13));
    }
}
