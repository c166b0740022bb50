//! Small dense linear algebra over `f64` and over jets.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::jet::{common_order, Jet};

/// Condition numbers above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Inverse of a row-major `n × n` matrix together with its 1-norm condition estimate.
/// Returns `Err(condition)` when the matrix is singular or ill-conditioned.
pub fn inverse_with_condition(a: &[f64], n: usize) -> Result<(Vec<f64>, f64), f64> {
    let m = DMatrix::from_row_slice(n, n, a);
    let inv = match m.clone().try_inverse() {
        Some(inv) => inv,
        None => return Err(f64::INFINITY),
    };
    let cond = norm1(&m) * norm1(&inv);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(cond);
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(inv[(i, j)]);
        }
    }
    Ok((out, cond))
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse of a row-major jet matrix `A = A0 + N` via the terminating Neumann series
/// `Σ (-A0⁻¹ N)^m A0⁻¹`. `Err` carries the condition estimate of `A0`.
pub fn jet_inverse(a: &[Jet], n: usize) -> Result<Vec<Jet>, f64> {
    let a0: Vec<f64> = a.iter().map(Jet::value).collect();
    let (inv0, _) = inverse_with_condition(&a0, n)?;
    let order = common_order(a);
    let inv0_jets: Vec<Jet> = inv0.iter().map(|&v| Jet::constant(v)).collect();
    if order == 0 {
        return Ok(inv0_jets);
    }
    let nil: Vec<Jet> = a.iter().map(Jet::nilpotent_part).collect();
    // step = -A0^{-1} N
    let mut step = vec_zero(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::constant(0.0);
            for k in 0..n {
                let c = inv0[i * n + k];
                if c != 0.0 {
                    acc += &(&nil[k * n + j] * (-c));
                }
            }
            step[i * n + j] = acc;
        }
    }
    let mut term = inv0_jets.clone();
    let mut total = inv0_jets;
    for _ in 0..order {
        term = jet_matmul(&step, &term, n);
        for (t, x) in total.iter_mut().zip(&term) {
            *t += x;
        }
    }
    Ok(total)
}

fn vec_zero(len: usize) -> Vec<Jet> {
    (0..len).map(|_| Jet::constant(0.0)).collect()
}

/// Row-major product of square jet matrices.
pub fn jet_matmul(a: &[Jet], b: &[Jet], n: usize) -> Vec<Jet> {
    let mut out = vec_zero(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::constant(0.0);
            for k in 0..n {
                acc += &(&a[i * n + k] * &b[k * n + j]);
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// `A x` for a row-major jet matrix and a jet vector.
pub fn jet_matvec(a: &[Jet], x: &[Jet], n: usize) -> Vec<Jet> {
    (0..n)
        .map(|i| {
            let mut acc = Jet::constant(0.0);
            for k in 0..x.len() {
                acc += &(&a[i * x.len() + k] * &x[k]);
            }
            acc
        })
        .collect()
}

/// Smallest and largest eigenvalues of a symmetric matrix (symmetrized first).
pub fn symmetric_eigen_range(a: &[f64], n: usize) -> (f64, f64) {
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[i * n + j] + a[j * n + i]));
    let ev = m.symmetric_eigenvalues();
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
