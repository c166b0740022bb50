//! Truncated multivariate Taylor polynomials ("jets") up to total order 3.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α` of `f(x0 + δ) = Σ c_α δ^α` for all
//! multi-indices with `|α| ≤ order`. Coefficients are grouped by degree and, within a
//! degree, indexed by the sorted variable tuple in colexicographic order, so a jet of
//! order `k` is a prefix of the same jet at order `k + 1`.
//!
//! A jet with zero variables is a constant; it broadcasts against jets of any shape.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Highest total derivative order the engine carries.
pub const MAX_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nvars: usize,
    order: usize,
    coeffs: Vec<f64>,
}

#[inline]
fn tri(n: usize) -> usize {
    n * (n + 1) / 2
}

#[inline]
fn tet(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

/// Number of coefficients of a jet in `nvars` variables truncated at `order`.
pub fn coeff_count(nvars: usize, order: usize) -> usize {
    match order {
        0 => 1,
        1 => 1 + nvars,
        2 => 1 + nvars + tri(nvars),
        _ => 1 + nvars + tri(nvars) + tet(nvars),
    }
}

#[inline]
fn idx2(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    1 + n + tri(j) + i
}

#[inline]
fn idx3(n: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i <= j && j <= k);
    1 + n + tri(n) + tet(k) + tri(j) + i
}

#[inline]
fn sort2(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[inline]
fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let mut t = [a, b, c];
    t.sort_unstable();
    (t[0], t[1], t[2])
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Jet { nvars: 0, order: 0, coeffs: vec![value] }
    }

    pub fn zeros(nvars: usize, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        if nvars == 0 {
            return Jet::constant(0.0);
        }
        Jet { nvars, order, coeffs: vec![0.0; coeff_count(nvars, order)] }
    }

    /// The coordinate function `x_var` around `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: f64) -> Self {
        assert!(var < nvars);
        let mut j = Jet::zeros(nvars, order);
        j.coeffs[0] = value;
        if order >= 1 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// Seeds for every coordinate of `point`, one variable each.
    pub fn seeds(point: &[f64], order: usize) -> Vec<Jet> {
        let n = point.len();
        if order == 0 {
            return point.iter().map(|&v| Jet::constant(v)).collect();
        }
        point.iter().enumerate().map(|(i, &v)| Jet::variable(n, order, i, v)).collect()
    }

    /// Builds a jet from coefficients in the crate's monomial layout.
    pub fn from_coeffs(nvars: usize, order: usize, coeffs: Vec<f64>) -> Self {
        assert!(order <= MAX_ORDER);
        if nvars == 0 || order == 0 {
            return Jet::constant(coeffs[0]);
        }
        assert_eq!(coeffs.len(), coeff_count(nvars, order));
        Jet { nvars, order, coeffs }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Truncation order; constants report 0 but broadcast against any order.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_constant(&self) -> bool {
        self.nvars == 0
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient of the monomial whose variables are listed in `vars`.
    pub fn coeff(&self, vars: &[usize]) -> f64 {
        if vars.len() > self.order || self.nvars == 0 {
            return if vars.is_empty() { self.coeffs[0] } else { 0.0 };
        }
        let n = self.nvars;
        match *vars {
            [] => self.coeffs[0],
            [i] => self.coeffs[1 + i],
            [a, b] => {
                let (i, j) = sort2(a, b);
                self.coeffs[idx2(n, i, j)]
            }
            [a, b, c] => {
                let (i, j, k) = sort3(a, b, c);
                self.coeffs[idx3(n, i, j, k)]
            }
            _ => 0.0,
        }
    }

    /// Partial derivative `∂^vars f` at the expansion point.
    pub fn derivative_at(&self, vars: &[usize]) -> f64 {
        let mut sorted: Vec<usize> = vars.to_vec();
        sorted.sort_unstable();
        let mut factorial = 1.0;
        let mut run = 1.0;
        for w in 1..sorted.len() {
            if sorted[w] == sorted[w - 1] {
                run += 1.0;
                factorial *= run;
            } else {
                run = 1.0;
            }
        }
        factorial * self.coeff(&sorted)
    }

    /// Drops all coefficients above `order`.
    pub fn truncated(mut self, order: usize) -> Self {
        if self.nvars == 0 || order >= self.order {
            return self;
        }
        if order == 0 {
            return Jet::constant(self.coeffs[0]);
        }
        self.coeffs.truncate(coeff_count(self.nvars, order));
        self.order = order;
        self
    }

    /// The jet with its constant term removed.
    pub fn nilpotent_part(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = 0.0;
        out
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.coeffs[0] = value;
        self
    }

    /// If this jet is `c + δ_v` exactly, returns `v`.
    pub fn seed_var(&self) -> Option<usize> {
        if self.nvars == 0 || self.order == 0 {
            return None;
        }
        let lin = &self.coeffs[1..1 + self.nvars];
        let mut found = None;
        for (i, &c) in lin.iter().enumerate() {
            if c == 1.0 && found.is_none() {
                found = Some(i);
            } else if c != 0.0 {
                return None;
            }
        }
        if self.coeffs[1 + self.nvars..].iter().any(|&c| c != 0.0) {
            return None;
        }
        found
    }

    /// `∂f/∂x_var` as a jet of one lower order.
    pub fn derivative(&self, var: usize) -> Jet {
        if self.nvars == 0 || self.order == 0 {
            return Jet::constant(0.0);
        }
        let n = self.nvars;
        let k = self.order - 1;
        if k == 0 {
            return Jet::constant(self.coeffs[1 + var]);
        }
        let mut out = Jet::zeros(n, k);
        out.coeffs[0] = self.coeffs[1 + var];
        for i in 0..n {
            out.coeffs[1 + i] = if i == var {
                2.0 * self.coeffs[idx2(n, var, var)]
            } else {
                let (a, b) = sort2(i, var);
                self.coeffs[idx2(n, a, b)]
            };
        }
        if k >= 2 {
            for j in 0..n {
                for i in 0..=j {
                    let mult = 1.0 + (i == var) as u8 as f64 + (j == var) as u8 as f64;
                    let (a, b, c) = sort3(i, j, var);
                    out.coeffs[idx2(n, i, j)] = mult * self.coeffs[idx3(n, a, b, c)];
                }
            }
        }
        out
    }

    /// Re-expresses the jet in a larger (or permuted) variable set, sending variable `i`
    /// to `map[i]`. Several old variables may land on the same new variable.
    pub fn remap(&self, map: &[usize], new_nvars: usize) -> Jet {
        if self.nvars == 0 || self.order == 0 {
            return Jet::constant(self.coeffs[0]);
        }
        debug_assert_eq!(map.len(), self.nvars);
        let n = self.nvars;
        let m = new_nvars;
        let mut out = Jet::zeros(m, self.order);
        out.coeffs[0] = self.coeffs[0];
        for i in 0..n {
            out.coeffs[1 + map[i]] += self.coeffs[1 + i];
        }
        if self.order >= 2 {
            for j in 0..n {
                for i in 0..=j {
                    let (a, b) = sort2(map[i], map[j]);
                    out.coeffs[idx2(m, a, b)] += self.coeffs[idx2(n, i, j)];
                }
            }
        }
        if self.order >= 3 {
            for k in 0..n {
                for j in 0..=k {
                    for i in 0..=j {
                        let (a, b, c) = sort3(map[i], map[j], map[k]);
                        out.coeffs[idx3(m, a, b, c)] += self.coeffs[idx3(n, i, j, k)];
                    }
                }
            }
        }
        out
    }

    /// Substitutes `inputs[i]` for variable `i`, i.e. returns `P(inputs - inputs(0))`
    /// where `P` is this polynomial in the displacement.
    pub fn compose(&self, inputs: &[Jet]) -> Jet {
        debug_assert!(self.nvars == 0 || inputs.len() == self.nvars);
        if self.nvars == 0 || self.order == 0 {
            return Jet::constant(self.coeffs[0]);
        }
        let order = inputs
            .iter()
            .filter(|j| !j.is_constant())
            .map(|j| j.order)
            .min()
            .unwrap_or(0)
            .min(self.order);
        if order == 0 {
            return Jet::constant(self.coeffs[0]);
        }
        let n = self.nvars;
        let disp: Vec<Jet> = inputs.iter().map(|x| x.nilpotent_part().truncated(order)).collect();
        let mut out = Jet::constant(self.coeffs[0]);
        for i in 0..n {
            let c = self.coeffs[1 + i];
            if c != 0.0 {
                out += &(&disp[i] * c);
            }
        }
        if order >= 2 {
            for j in 0..n {
                for i in 0..=j {
                    let c2 = self.coeffs[idx2(n, i, j)];
                    let need3 = order >= 3
                        && (j..n).any(|k| self.coeffs[idx3(n, i, j, k)] != 0.0);
                    if c2 == 0.0 && !need3 {
                        continue;
                    }
                    let pij = &disp[i] * &disp[j];
                    if c2 != 0.0 {
                        out += &(&pij * c2);
                    }
                    if need3 {
                        for k in j..n {
                            let c3 = self.coeffs[idx3(n, i, j, k)];
                            if c3 != 0.0 {
                                out += &(&(&pij * &disp[k]) * c3);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `g(self)` where `taylor[m] = g^(m)(x0) / m!` at `x0 = self.value()`.
    pub fn compose_univariate(&self, taylor: &[f64]) -> Jet {
        if self.nvars == 0 || self.order == 0 {
            return Jet::constant(taylor[0]);
        }
        let h = self.nilpotent_part();
        // Horner in the nilpotent displacement: terms above the jet order vanish.
        let top = self.order.min(taylor.len() - 1);
        let mut acc = Jet::constant(taylor[top]);
        for m in (0..top).rev() {
            acc = &acc * &h;
            acc.coeffs[0] += taylor[m];
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        let r = 1.0 / a;
        self.compose_univariate(&[r, -r * r, r * r * r, -r * r * r * r])
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        let r = 1.0 / a;
        self.compose_univariate(&[a.ln(), r, -0.5 * r * r, r * r * r / 3.0])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose_univariate(&[e, e, 0.5 * e, e / 6.0])
    }

    pub fn sqrt(&self) -> Jet {
        let a = self.value();
        let s = a.sqrt();
        self.compose_univariate(&[s, 0.5 / s, -0.125 / (s * a), 0.0625 / (s * a * a)])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose_univariate(&[s, c, -0.5 * s, -c / 6.0])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose_univariate(&[c, -s, -0.5 * c, s / 6.0])
    }

    pub fn powi(&self, n: i32) -> Jet {
        let a = self.value();
        let nf = n as f64;
        self.compose_univariate(&[
            a.powi(n),
            nf * a.powi(n - 1),
            0.5 * nf * (nf - 1.0) * a.powi(n - 2),
            nf * (nf - 1.0) * (nf - 2.0) / 6.0 * a.powi(n - 3),
        ])
    }

    pub fn square(&self) -> Jet {
        self * self
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn binary_shape(&self, other: &Jet) -> (usize, usize) {
        assert!(
            self.nvars == other.nvars,
            "jets over different variable sets ({} vs {})",
            self.nvars,
            other.nvars
        );
        (self.nvars, self.order.min(other.order))
    }

    fn add_impl(&self, other: &Jet, sign: f64) -> Jet {
        if other.nvars == 0 {
            let mut out = self.clone();
            out.coeffs[0] += sign * other.coeffs[0];
            return out;
        }
        if self.nvars == 0 {
            let mut out = other * sign;
            out.coeffs[0] += self.coeffs[0];
            return out;
        }
        let (n, k) = self.binary_shape(other);
        let len = coeff_count(n, k);
        let coeffs = self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(a, b)| a + sign * b)
            .collect();
        Jet { nvars: n, order: k, coeffs }
    }

    fn mul_impl(&self, other: &Jet) -> Jet {
        if other.nvars == 0 {
            return self * other.coeffs[0];
        }
        if self.nvars == 0 {
            return other * self.coeffs[0];
        }
        let (n, k) = self.binary_shape(other);
        let a = &self.coeffs;
        let b = &other.coeffs;
        let mut c = vec![0.0; coeff_count(n, k)];
        let (a0, b0) = (a[0], b[0]);
        c[0] = a0 * b0;
        if k >= 1 {
            for i in 0..n {
                c[1 + i] = a0 * b[1 + i] + a[1 + i] * b0;
            }
        }
        if k >= 2 {
            for j in 0..n {
                let (aj, bj) = (a[1 + j], b[1 + j]);
                for i in 0..=j {
                    let ix = idx2(n, i, j);
                    let cross = if i == j {
                        aj * bj
                    } else {
                        a[1 + i] * bj + aj * b[1 + i]
                    };
                    c[ix] = a0 * b[ix] + a[ix] * b0 + cross;
                }
            }
        }
        if k >= 3 {
            for kk in 0..n {
                for j in 0..=kk {
                    for i in 0..=j {
                        let ix = idx3(n, i, j, kk);
                        let mut s = a0 * b[ix] + a[ix] * b0;
                        // split the multiset {i, j, kk} into one index and a pair
                        s += a[1 + i] * b[idx2(n, j, kk)] + a[idx2(n, j, kk)] * b[1 + i];
                        if j != i {
                            s += a[1 + j] * b[idx2(n, i, kk)] + a[idx2(n, i, kk)] * b[1 + j];
                        }
                        if kk != j {
                            s += a[1 + kk] * b[idx2(n, i, j)] + a[idx2(n, i, j)] * b[1 + kk];
                        }
                        c[ix] = s;
                    }
                }
            }
        }
        Jet { nvars: n, order: k, coeffs: c }
    }

    fn scale_impl(&self, s: f64) -> Jet {
        Jet { nvars: self.nvars, order: self.order, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

macro_rules! forward_binops {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
        impl $trait<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                self.$method(&Jet::constant(rhs))
            }
        }
        impl $trait<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(&Jet::constant(rhs))
            }
        }
        impl $trait<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&Jet::constant(self)).$method(&rhs)
            }
        }
        impl $trait<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&Jet::constant(self)).$method(rhs)
            }
        }
    };
}

forward_binops!(Add, add, |a, b| a.add_impl(b, 1.0));
forward_binops!(Sub, sub, |a, b| a.add_impl(b, -1.0));
forward_binops!(Mul, mul, |a, b| {
    if b.nvars == 0 {
        a.scale_impl(b.coeffs[0])
    } else if a.nvars == 0 {
        b.scale_impl(a.coeffs[0])
    } else {
        a.mul_impl(b)
    }
});
forward_binops!(Div, div, |a, b| {
    if b.nvars == 0 {
        a.scale_impl(1.0 / b.coeffs[0])
    } else {
        a.mul_impl(&b.recip())
    }
});

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_impl(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_impl(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        if rhs.nvars == 0 {
            self.coeffs[0] += rhs.coeffs[0];
        } else if self.nvars == rhs.nvars && self.order <= rhs.order {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a += b;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self += &rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self += &(-rhs);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        for c in &mut self.coeffs {
            *c *= rhs;
        }
    }
}

/// Sum of jets; an empty sum is the constant zero.
pub fn sum<'a, I: IntoIterator<Item = &'a Jet>>(items: I) -> Jet {
    let mut acc = Jet::constant(0.0);
    for j in items {
        acc += j;
    }
    acc
}

/// Smallest order among the non-constant jets, or 0 when all are constant.
pub fn common_order(jets: &[Jet]) -> usize {
    jets.iter().filter(|j| !j.is_constant()).map(Jet::order).min().unwrap_or(0)
}

/// Number of variables shared by the non-constant jets (0 if all constant).
pub fn common_nvars(jets: &[Jet]) -> usize {
    jets.iter().find(|j| !j.is_constant()).map(Jet::nvars).unwrap_or(0)
}
