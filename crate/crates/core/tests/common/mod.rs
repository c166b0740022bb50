#![allow(dead_code)]

use biform_core::corpus::{random_scalar_field, SmoothFunction};
use biform_core::{ChartManifold, Connection, JetConfig, MetricField, Point, ScalarField, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn jet() -> JetConfig {
    JetConfig::jet()
}

pub fn point<R: Rng>(rng: &mut R, m: &ChartManifold) -> Point {
    m.sample(rng, 1).unwrap().remove(0)
}

pub fn vector_field<R: Rng>(rng: &mut R, m: &ChartManifold) -> VectorField {
    VectorField::from_components(m, (0..m.dim()).map(|_| random_scalar_field(rng, m)).collect()).unwrap()
}

/// `A Aᵀ + I` with a random smooth matrix field `A`.
pub fn metric<R: Rng>(rng: &mut R, m: &ChartManifold) -> MetricField {
    let n = m.dim();
    let a: Vec<SmoothFunction> = (0..n * n).map(|_| SmoothFunction::random(rng, n, 0.5)).collect();
    MetricField::new(m, move |x, _| {
        let av: Vec<_> = a.iter().map(|f| f.eval(x)).collect();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = biform_core::Jet::constant(if i == j { 1.0 } else { 0.0 });
                for k in 0..n {
                    acc += &(&av[i * n + k] * &av[j * n + k]);
                }
                out.push(acc);
            }
        }
        Ok(out)
    })
}

pub fn connection<R: Rng>(rng: &mut R, m: &ChartManifold) -> Connection {
    let n = m.dim();
    let comps: Vec<ScalarField> = (0..n * n * n).map(|_| random_scalar_field(rng, m)).collect();
    Connection::from_components(m, comps).unwrap()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// Nested central differences `∂_{vars[0]} ∂_{vars[1]} … f` with step `h`.
pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], vars: &[usize], h: f64) -> f64 {
    match vars.split_first() {
        None => f(x),
        Some((&v, rest)) => {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[v] += h;
            xm[v] -= h;
            (central_difference(f, &xp, rest, h) - central_difference(f, &xm, rest, h)) / (2.0 * h)
        }
    }
}
