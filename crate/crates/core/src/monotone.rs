//! Operator monotone functions, their means, and divided differences of the kernels
//! `1 / m_f(x, y)` used to expand monotone metrics around a spectrum.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Error;

/// Relative gap below which the BKM mean switches to its Taylor expansion.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-7;

/// Node spread, relative to the distance to the nearest singularity, below which divided
/// differences are summed from a Taylor series instead of the difference recursion.
const CLUSTER_RATIO: f64 = 0.1;

/// Taylor terms beyond the divided-difference order.
const SERIES_TERMS: usize = 24;

/// The shipped operator monotone functions, normalized to `f(1) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonotoneFunction {
    /// Bogoliubov–Kubo–Mori, `f(t) = (t − 1) / ln t`.
    Bkm,
    /// Symmetric logarithmic derivative, `f(t) = (1 + t) / 2`.
    Sld,
    /// Wigner–Yanase, `f(t) = (1 + √t)² / 4`.
    Wy,
}

impl MonotoneFunction {
    pub const ALL: [MonotoneFunction; 3] = [MonotoneFunction::Bkm, MonotoneFunction::Sld, MonotoneFunction::Wy];

    pub fn name(&self) -> &'static str {
        match self {
            MonotoneFunction::Bkm => "BKM",
            MonotoneFunction::Sld => "SLD",
            MonotoneFunction::Wy => "WY",
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            MonotoneFunction::Bkm => {
                if (t - 1.0).abs() < COINCIDENCE_THRESHOLD {
                    let e = t - 1.0;
                    1.0 + e / 2.0 - e * e / 12.0
                } else {
                    (t - 1.0) / t.ln()
                }
            }
            MonotoneFunction::Sld => 0.5 * (1.0 + t),
            MonotoneFunction::Wy => 0.25 * (1.0 + t.sqrt()).powi(2),
        }
    }

    /// `m_f(x, y) = y f(x / y)`.
    pub fn mean(&self, x: f64, y: f64) -> f64 {
        match self {
            MonotoneFunction::Bkm => {
                let d = x - y;
                if d.abs() < COINCIDENCE_THRESHOLD * x.max(y) {
                    let a = 0.5 * (x + y);
                    a - d * d / (12.0 * a)
                } else {
                    d / (x.ln() - y.ln())
                }
            }
            MonotoneFunction::Sld => 0.5 * (x + y),
            MonotoneFunction::Wy => 0.25 * (x.sqrt() + y.sqrt()).powi(2),
        }
    }

    /// Divided difference of `h = 1 / m_f` over nodes `xs` in the first argument and
    /// `ys` in the second.
    pub fn kernel_divided_difference(&self, xs: &[f64], ys: &[f64]) -> f64 {
        match self {
            MonotoneFunction::Bkm => {
                let mut all: Vec<f64> = xs.iter().chain(ys).copied().collect();
                divided_difference(&Ln, &mut all)
            }
            MonotoneFunction::Sld => {
                let sign = if (xs.len() - 1) % 2 == 0 { 2.0 } else { -2.0 };
                let mut nodes = ys.to_vec();
                sign * divided_difference(&PoleProduct { shifts: xs.to_vec() }, &mut nodes)
            }
            MonotoneFunction::Wy => {
                let (n, m) = (xs.len(), ys.len());
                let mut acc = 0.0;
                for k in 0..n {
                    for l in 0..m {
                        let mut a: Vec<f64> = xs[..=k].iter().chain(&ys[..=l]).copied().collect();
                        let mut b: Vec<f64> = xs[k..].iter().chain(&ys[l..]).copied().collect();
                        acc += divided_difference(&Sqrt, &mut a) * divided_difference(&Sqrt, &mut b);
                    }
                }
                4.0 * acc
            }
        }
    }
}

impl fmt::Display for MonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MonotoneFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "BKM" => Ok(MonotoneFunction::Bkm),
            "SLD" => Ok(MonotoneFunction::Sld),
            "WY" => Ok(MonotoneFunction::Wy),
            _ => Err(Error::UnknownMonotoneFunction(s.to_string())),
        }
    }
}

/// A real-analytic function on part of the line with local Taylor data.
pub(crate) trait Analytic {
    fn value(&self, x: f64) -> f64;
    /// `len` Taylor coefficients at `c`.
    fn taylor(&self, c: f64, len: usize) -> Vec<f64>;
    /// Distance from `c` to the nearest singularity.
    fn radius(&self, c: f64) -> f64;
}

pub(crate) struct Ln;

impl Analytic for Ln {
    fn value(&self, x: f64) -> f64 {
        x.ln()
    }

    fn taylor(&self, c: f64, len: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(len);
        out.push(c.ln());
        let mut p = 1.0;
        for k in 1..len {
            p /= c;
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            out.push(s * p / k as f64);
        }
        out
    }

    fn radius(&self, c: f64) -> f64 {
        c
    }
}

pub(crate) struct Sqrt;

impl Analytic for Sqrt {
    fn value(&self, x: f64) -> f64 {
        x.sqrt()
    }

    fn taylor(&self, c: f64, len: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(len);
        let mut coef = c.sqrt();
        out.push(coef);
        for k in 1..len {
            // binomial(1/2, k) / c^k, built incrementally
            coef *= (0.5 - (k as f64 - 1.0)) / k as f64 / c;
            out.push(coef);
        }
        out
    }

    fn radius(&self, c: f64) -> f64 {
        c
    }
}

/// `y ↦ Π_i 1 / (s_i + y)`.
pub(crate) struct PoleProduct {
    pub shifts: Vec<f64>,
}

impl Analytic for PoleProduct {
    fn value(&self, y: f64) -> f64 {
        self.shifts.iter().map(|s| 1.0 / (s + y)).product()
    }

    fn taylor(&self, c: f64, len: usize) -> Vec<f64> {
        let mut acc = vec![0.0; len];
        acc[0] = 1.0;
        for s in &self.shifts {
            let a = s + c;
            let geo: Vec<f64> = (0..len)
                .scan(1.0 / a, |p, k| {
                    let v = if k % 2 == 0 { *p } else { -*p };
                    *p /= a;
                    Some(v)
                })
                .collect();
            let mut next = vec![0.0; len];
            for i in 0..len {
                if acc[i] == 0.0 {
                    continue;
                }
                for j in 0..len - i {
                    next[i + j] += acc[i] * geo[j];
                }
            }
            acc = next;
        }
        acc
    }

    fn radius(&self, c: f64) -> f64 {
        self.shifts.iter().map(|s| s + c).fold(f64::INFINITY, f64::min)
    }
}

/// Divided difference `f[x_0, …, x_n]` with repeated or clustered nodes allowed. Sorts
/// `nodes` in place.
pub(crate) fn divided_difference<F: Analytic>(f: &F, nodes: &mut [f64]) -> f64 {
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    let n = nodes.len();
    // memo[i][j] holds f[nodes[i..=j]]
    let mut memo = vec![vec![0.0; n]; n];
    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len - 1;
            memo[i][j] = if len == 1 {
                f.value(nodes[i])
            } else {
                let spread = nodes[j] - nodes[i];
                let c = nodes[i..=j].iter().sum::<f64>() / len as f64;
                if spread <= CLUSTER_RATIO * f.radius(c) {
                    series_divided_difference(f, &nodes[i..=j], c)
                } else {
                    (memo[i + 1][j] - memo[i][j - 1]) / spread
                }
            };
        }
    }
    memo[0][n - 1]
}

/// `Σ_{a ≥ n} T_a h_{a−n}(x − c)` with `h_k` the complete homogeneous symmetric polynomials.
fn series_divided_difference<F: Analytic>(f: &F, nodes: &[f64], c: f64) -> f64 {
    let n = nodes.len() - 1;
    let t = f.taylor(c, n + SERIES_TERMS + 1);
    let mut h = vec![0.0; SERIES_TERMS + 1];
    h[0] = 1.0;
    let z0 = nodes[0] - c;
    for k in 1..=SERIES_TERMS {
        h[k] = h[k - 1] * z0;
    }
    for &x in &nodes[1..] {
        let z = x - c;
        for k in 1..=SERIES_TERMS {
            h[k] += z * h[k - 1];
        }
    }
    (0..=SERIES_TERMS).map(|k| t[n + k] * h[k]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalization_and_symmetry() {
        for f in MonotoneFunction::ALL {
            assert_abs_diff_eq!(f.eval(1.0), 1.0, epsilon = 1e-15);
            for k in 0..=60 {
                let t = 10f64.powf(-3.0 + 0.1 * k as f64);
                let r = (t * f.eval(1.0 / t) - f.eval(t)).abs();
                assert!(r < 1e-12 * f.eval(t).max(1.0), "{f} at {t}: {r}");
            }
        }
    }

    #[test]
    fn coincident_mean_limits() {
        for x in [1e-3, 0.2, 0.5, 3.0] {
            let y = x * (1.0 + 5e-10);
            assert_abs_diff_eq!(MonotoneFunction::Bkm.mean(x, y), x, epsilon = 1e-9);
            assert_abs_diff_eq!(MonotoneFunction::Sld.mean(x, y), x, epsilon = 1e-9);
            assert_abs_diff_eq!(MonotoneFunction::Wy.mean(x, y), x, epsilon = 1e-9);
        }
        // both branches agree across the switch
        let (x, y) = (0.3, 0.3 * (1.0 + 2e-7));
        let direct = (x - y) / (f64::ln(x) - f64::ln(y));
        assert_abs_diff_eq!(MonotoneFunction::Bkm.mean(x, y), direct, epsilon = 1e-9);
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert_eq!("bkm".parse::<MonotoneFunction>().unwrap(), MonotoneFunction::Bkm);
        assert!(matches!("bures".parse::<MonotoneFunction>(), Err(Error::UnknownMonotoneFunction(_))));
    }

    #[test]
    fn confluent_divided_differences_are_derivatives() {
        // f[x, x, x] = f''(x) / 2
        let x = 0.37;
        assert_abs_diff_eq!(divided_difference(&Ln, &mut [x, x, x]), -0.5 / (x * x), epsilon = 1e-13);
        assert_abs_diff_eq!(divided_difference(&Sqrt, &mut [x, x]), 0.5 / x.sqrt(), epsilon = 1e-14);
        // distinct nodes use the recursion
        let v = divided_difference(&Ln, &mut [0.1, 0.9]);
        assert_abs_diff_eq!(v, (0.9f64.ln() - 0.1f64.ln()) / 0.8, epsilon = 1e-15);
        // nearly coincident nodes agree with the exact second divided difference of 1/y
        let p = PoleProduct { shifts: vec![0.0] };
        let (a, b, c) = (0.5, 0.5 + 1e-9, 0.5 + 3e-9);
        assert_abs_diff_eq!(divided_difference(&p, &mut [a, b, c]), 1.0 / (a * b * c), epsilon = 1e-9);
    }

    #[test]
    fn kernels_match_inverse_means() {
        for f in MonotoneFunction::ALL {
            for (x, y) in [(0.2, 0.7), (0.5, 0.5), (0.31, 0.31 + 1e-11), (1e-4, 0.9)] {
                let h = f.kernel_divided_difference(&[x], &[y]);
                assert_abs_diff_eq!(h * f.mean(x, y), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn first_kernel_differences_match_derivatives() {
        // h[x0, x1; y] at a distinct pair vs the partial derivative in x at coincidence
        for f in MonotoneFunction::ALL {
            let (x, y) = (0.3, 0.55);
            let eps = 1e-5;
            let fd = (f.kernel_divided_difference(&[x + eps], &[y]) - f.kernel_divided_difference(&[x - eps], &[y])) / (2.0 * eps);
            let dd = f.kernel_divided_difference(&[x, x], &[y]);
            assert_abs_diff_eq!(dd, fd, epsilon = 1e-8);
            let fd = (f.kernel_divided_difference(&[x], &[y + eps]) - f.kernel_divided_difference(&[x], &[y - eps])) / (2.0 * eps);
            let dd = f.kernel_divided_difference(&[x], &[y, y]);
            assert_abs_diff_eq!(dd, fd, epsilon = 1e-8);
        }
    }
}
