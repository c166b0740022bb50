//! Bi-forms on the Cartesian square `M × M`: pairing, diagonal and swap pullbacks, and
//! the left/right differentials.
//!
//! A `(p, q)` bi-form is stored as a lazy evaluator returning its components at a point
//! pair `(m, n)` as jets in `2·dim` variables (left coordinates first). Components are
//! indexed by a strictly increasing left tuple `I` and right tuple `J`, at
//! `index(I) * count(q) + index(J)`, and contract with tangent vectors through
//! determinants, so `ϖ(X_1, X_2 | Y) = Σ_{i<j,k} ϖ_{ij|k} (X_1^i X_2^j − X_1^j X_2^i) Y^k`.
//!
//! Derivatives are always taken in the coordinate frame, where the bracket terms of the
//! invariant differential vanish.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::{JetConfig, MetricField, MultiField, OneForm, ScalarField, VectorField};
use crate::jet::Jet;
use crate::manifold::{ChartManifold, Point};

/// Largest supported degree on either side.
pub const MAX_DEGREE: usize = 2;

/// Number of strictly increasing `p`-tuples from `0..n`.
pub fn tuple_count(n: usize, p: usize) -> usize {
    match p {
        0 => 1,
        1 => n,
        2 => n * n.saturating_sub(1) / 2,
        _ => {
            let mut c = 1usize;
            for i in 0..p {
                c = c * (n - i) / (i + 1);
            }
            c
        }
    }
}

/// Strictly increasing `p`-tuples from `0..n` in lexicographic order.
pub fn tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, p, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, 0, &mut Vec::new(), &mut out);
    out
}

/// Position of a strictly increasing tuple in [`tuples`].
pub fn tuple_index(n: usize, t: &[usize]) -> usize {
    match t.len() {
        0 => 0,
        1 => t[0],
        2 => {
            let (i, j) = (t[0], t[1]);
            // rows before i contribute (n-1) + (n-2) + ... + (n-i)
            i * (2 * n - i - 1) / 2 + (j - i - 1)
        }
        p => tuples(n, p).iter().position(|u| u.as_slice() == t).expect("increasing tuple"),
    }
}

/// Sign and sorted form of a tuple, or `None` if it has a repeated entry.
pub fn sort_with_sign(t: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut v = t.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// `det [X_a^{t_b}]` for the vectors `xs` and an increasing tuple `t`.
fn tuple_det(xs: &[Vec<Jet>], t: &[usize]) -> Jet {
    match t.len() {
        0 => Jet::constant(1.0),
        1 => xs[0][t[0]].clone(),
        2 => &(&xs[0][t[0]] * &xs[1][t[1]]) - &(&xs[0][t[1]] * &xs[1][t[0]]),
        _ => unreachable!("degree capped at {MAX_DEGREE}"),
    }
}

fn f64_det(xs: &[&[f64]], t: &[usize]) -> f64 {
    match t.len() {
        0 => 1.0,
        1 => xs[0][t[0]],
        2 => xs[0][t[0]] * xs[1][t[1]] - xs[0][t[1]] * xs[1][t[0]],
        _ => unreachable!("degree capped at {MAX_DEGREE}"),
    }
}

type Neighborhood = dyn Fn(&[f64], &[f64]) -> bool + Send + Sync;

#[derive(Clone)]
enum Node {
    /// Components as a field on `M × M`.
    Field(MultiField),
    /// `π_L^* α ⊗ π_R^* β` for component fields `α`, `β` on `M`.
    Tensor(MultiField, MultiField),
    Swap(BiForm),
    Left(BiForm),
    Sum(Vec<(f64, BiForm)>),
    Scaled(BiForm, BiForm),
    Pair(BiForm, Vec<VectorField>, Vec<VectorField>),
}

/// A `(p, q)` bi-form on `M × M` with `p, q ≤ 2`.
#[derive(Clone)]
pub struct BiForm {
    manifold: ChartManifold,
    p: usize,
    q: usize,
    neighborhood: Option<Arc<Neighborhood>>,
    node: Arc<Node>,
}

impl fmt::Debug for BiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.node {
            Node::Field(_) => "field",
            Node::Tensor(..) => "tensor",
            Node::Swap(_) => "swap",
            Node::Left(_) => "left-differential",
            Node::Sum(_) => "sum",
            Node::Scaled(..) => "scaled",
            Node::Pair(..) => "pair",
        };
        f.debug_struct("BiForm")
            .field("chart", &self.manifold.label())
            .field("degree", &(self.p, self.q))
            .field("node", &kind)
            .finish()
    }
}

fn check_degree(p: usize, q: usize) -> Result<()> {
    if p > MAX_DEGREE || q > MAX_DEGREE {
        return Err(Error::DegreeOverflow { p, q });
    }
    Ok(())
}

impl BiForm {
    fn build(manifold: &ChartManifold, p: usize, q: usize, node: Node) -> Self {
        BiForm { manifold: manifold.clone(), p, q, neighborhood: None, node: Arc::new(node) }
    }

    /// A bi-form whose components are given by a field on `M × M` (see [`ChartManifold::square`]).
    pub fn from_field(manifold: &ChartManifold, p: usize, q: usize, field: MultiField) -> Result<Self> {
        check_degree(p, q)?;
        let n = manifold.dim();
        if field.dim() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: field.dim() });
        }
        let len = tuple_count(n, p) * tuple_count(n, q);
        if field.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: field.len() });
        }
        Ok(Self::build(manifold, p, q, Node::Field(field)))
    }

    /// Components from a jet-generic closure of the `2·dim` coordinates `(m, n)`.
    pub fn from_fn(
        manifold: &ChartManifold,
        p: usize,
        q: usize,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Result<Self> {
        let n = manifold.dim();
        let len = tuple_count(n, p) * tuple_count(n, q);
        let field = MultiField::new(&manifold.square(), len, move |x, _| Ok(f(x)));
        Self::from_field(manifold, p, q, field)
    }

    /// A two-point function, i.e. a `(0, 0)` bi-form.
    pub fn scalar(manifold: &ChartManifold, f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        Self::from_fn(manifold, 0, 0, move |x| vec![f(x)]).expect("scalar bi-form")
    }

    /// A two-point function known only by plain evaluation.
    pub fn black_box_scalar(manifold: &ChartManifold, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        let field = MultiField::black_box(&manifold.square(), 1, move |x| Ok(vec![f(x)]));
        Self::from_field(manifold, 0, 0, field).expect("scalar bi-form")
    }

    /// `π_L^* α ⊗ π_R^* β` where `α` (`β`) holds the increasing-tuple components of a
    /// `p`-form (`q`-form) on `M`.
    pub fn tensor(manifold: &ChartManifold, p: usize, left: MultiField, q: usize, right: MultiField) -> Result<Self> {
        check_degree(p, q)?;
        let n = manifold.dim();
        for (f, d) in [(&left, p), (&right, q)] {
            if f.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
            }
            if f.len() != tuple_count(n, d) {
                return Err(Error::DimensionMismatch { expected: tuple_count(n, d), got: f.len() });
            }
        }
        Ok(Self::build(manifold, p, q, Node::Tensor(left, right)))
    }

    /// `π_L^* α ⊗ π_R^* β` for one-forms.
    pub fn one_forms(alpha: &OneForm, beta: &OneForm) -> Self {
        Self::tensor(alpha.manifold(), 1, alpha.field().clone(), 1, beta.field().clone()).expect("one-form tensor")
    }

    /// `π_L^* f` as a `(0, 0)` bi-form.
    pub fn left_pullback(f: &ScalarField) -> Self {
        let one = MultiField::constant(f.manifold(), vec![1.0]);
        Self::tensor(f.manifold(), 0, f.field().clone(), 0, one).expect("scalar tensor")
    }

    /// `π_R^* f` as a `(0, 0)` bi-form.
    pub fn right_pullback(f: &ScalarField) -> Self {
        let one = MultiField::constant(f.manifold(), vec![1.0]);
        Self::tensor(f.manifold(), 0, one, 0, f.field().clone()).expect("scalar tensor")
    }

    /// `π_L^* α` as a `(1, 0)` bi-form.
    pub fn left_form(alpha: &OneForm) -> Self {
        let one = MultiField::constant(alpha.manifold(), vec![1.0]);
        Self::tensor(alpha.manifold(), 1, alpha.field().clone(), 0, one).expect("one-form tensor")
    }

    /// `π_R^* β` as a `(0, 1)` bi-form.
    pub fn right_form(beta: &OneForm) -> Self {
        let one = MultiField::constant(beta.manifold(), vec![1.0]);
        Self::tensor(beta.manifold(), 0, one, 1, beta.field().clone()).expect("one-form tensor")
    }

    pub fn zero(manifold: &ChartManifold, p: usize, q: usize) -> Result<Self> {
        Self::linear_combination(manifold, p, q, Vec::new())
    }

    /// `Σ c_k ϖ_k` over bi-forms of a common degree.
    pub fn linear_combination(manifold: &ChartManifold, p: usize, q: usize, terms: Vec<(f64, BiForm)>) -> Result<Self> {
        check_degree(p, q)?;
        for (_, w) in &terms {
            if w.degree() != (p, q) {
                return Err(Error::Arity { expected: p + q, got: w.p + w.q });
            }
            if w.dim() != manifold.dim() {
                return Err(Error::DimensionMismatch { expected: manifold.dim(), got: w.dim() });
            }
        }
        Ok(Self::build(manifold, p, q, Node::Sum(terms)))
    }

    pub fn add(&self, other: &BiForm) -> Result<Self> {
        Self::linear_combination(&self.manifold, self.p, self.q, vec![(1.0, self.clone()), (1.0, other.clone())])
    }

    pub fn sub(&self, other: &BiForm) -> Result<Self> {
        Self::linear_combination(&self.manifold, self.p, self.q, vec![(1.0, self.clone()), (-1.0, other.clone())])
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::build(&self.manifold, self.p, self.q, Node::Sum(vec![(c, self.clone())]))
    }

    /// Pointwise product with a two-point function.
    pub fn times(&self, f: &BiForm) -> Result<Self> {
        if f.degree() != (0, 0) {
            return Err(Error::Arity { expected: 0, got: f.p + f.q });
        }
        Ok(Self::build(&self.manifold, self.p, self.q, Node::Scaled(f.clone(), self.clone())))
    }

    /// Restricts the bi-form to a neighborhood of the diagonal; evaluation outside it fails.
    pub fn with_neighborhood(mut self, pred: impl Fn(&[f64], &[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.neighborhood = Some(Arc::new(pred));
        self
    }

    pub fn manifold(&self) -> &ChartManifold {
        &self.manifold
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn degree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn component_count(&self) -> usize {
        tuple_count(self.dim(), self.p) * tuple_count(self.dim(), self.q)
    }

    /// Whether `(m, n)` lies in the square and in the diagonal neighborhood.
    pub fn contains(&self, m: &[f64], n: &[f64]) -> bool {
        self.manifold.contains(m)
            && self.manifold.contains(n)
            && self.neighborhood.as_ref().map_or(true, |nb| nb(m, n))
    }

    /// Components at `(m, n)` as jets of the given order in `2·dim` variables.
    pub fn eval(&self, m: &[f64], n: &[f64], order: usize, cfg: &JetConfig) -> Result<Vec<Jet>> {
        if order > cfg.order_limit() {
            return Err(Error::OrderOverflow { requested: order, limit: cfg.order_limit() });
        }
        self.manifold.check(m)?;
        self.manifold.check(n)?;
        if let Some(nb) = &self.neighborhood {
            if !nb(m, n) {
                return Err(Error::OutsideNeighborhood { left: m.to_vec(), right: n.to_vec() });
            }
        }
        let dim = self.dim();
        let nv = 2 * dim;
        match &*self.node {
            Node::Field(f) => {
                let mut base = m.to_vec();
                base.extend_from_slice(n);
                f.eval(&Jet::seeds(&base, order), cfg)
            }
            Node::Tensor(l, r) => {
                let (lx, rx) = split_seeds(m, n, order);
                let (lv, rv) = (l.eval(&lx, cfg)?, r.eval(&rx, cfg)?);
                let mut out = Vec::with_capacity(lv.len() * rv.len());
                for a in &lv {
                    for b in &rv {
                        out.push(a * b);
                    }
                }
                Ok(out)
            }
            Node::Swap(w) => {
                let inner = w.eval(n, m, order, cfg)?;
                let map: Vec<usize> = (0..nv).map(|v| (v + dim) % nv).collect();
                let (cq, cp) = (tuple_count(dim, w.q), tuple_count(dim, w.p));
                let mut out = Vec::with_capacity(inner.len());
                for a in 0..cq {
                    for b in 0..cp {
                        out.push(inner[b * cq + a].remap(&map, nv));
                    }
                }
                Ok(out)
            }
            Node::Left(w) => {
                if order + 1 > cfg.order_limit() {
                    return Err(Error::OrderOverflow { requested: order + 1, limit: cfg.order_limit() });
                }
                let inner = w.eval(m, n, order + 1, cfg)?;
                let cq = tuple_count(dim, w.q);
                let mut out = Vec::with_capacity(self.component_count());
                for t in tuples(dim, self.p) {
                    for jr in 0..cq {
                        let mut acc = Jet::constant(0.0);
                        for a in 0..t.len() {
                            let mut rest = t.clone();
                            let var = rest.remove(a);
                            let c = &inner[tuple_index(dim, &rest) * cq + jr];
                            let d = c.derivative(var).truncated(order);
                            if a % 2 == 0 {
                                acc += &d;
                            } else {
                                acc -= &d;
                            }
                        }
                        out.push(acc);
                    }
                }
                Ok(out)
            }
            Node::Sum(terms) => {
                let mut out = vec![Jet::constant(0.0); self.component_count()];
                for (c, w) in terms {
                    let v = w.eval(m, n, order, cfg)?;
                    for (o, x) in out.iter_mut().zip(&v) {
                        *o += &(x * *c);
                    }
                }
                Ok(out)
            }
            Node::Scaled(f, w) => {
                let s = f.eval(m, n, order, cfg)?.swap_remove(0);
                Ok(w.eval(m, n, order, cfg)?.iter().map(|x| x * &s).collect())
            }
            Node::Pair(w, xs, ys) => {
                let inner = w.eval(m, n, order, cfg)?;
                let (lx, rx) = split_seeds(m, n, order);
                let xv = xs.iter().map(|x| x.eval(&lx, cfg)).collect::<Result<Vec<_>>>()?;
                let yv = ys.iter().map(|y| y.eval(&rx, cfg)).collect::<Result<Vec<_>>>()?;
                let (lt, rt) = (tuples(dim, w.p), tuples(dim, w.q));
                let ry: Vec<Jet> = rt.iter().map(|t| tuple_det(&yv, t)).collect();
                let mut acc = Jet::constant(0.0);
                for (li, t) in lt.iter().enumerate() {
                    let dx = tuple_det(&xv, t);
                    for (ri, dy) in ry.iter().enumerate() {
                        acc += &(&(&inner[li * rt.len() + ri] * &dx) * dy);
                    }
                }
                Ok(vec![acc])
            }
        }
    }

    /// Plain component values at `(m, n)`.
    pub fn components(&self, m: &Point, n: &Point, cfg: &JetConfig) -> Result<Vec<f64>> {
        Ok(self.eval(m.coords(), n.coords(), 0, cfg)?.iter().map(Jet::value).collect())
    }

    /// `ϖ(X_1, …, X_p | Y_1, …, Y_q)(m, n)` for tangent vectors given by components.
    pub fn evaluate(&self, m: &Point, n: &Point, xs: &[&[f64]], ys: &[&[f64]], cfg: &JetConfig) -> Result<f64> {
        if xs.len() != self.p {
            return Err(Error::Arity { expected: self.p, got: xs.len() });
        }
        if ys.len() != self.q {
            return Err(Error::Arity { expected: self.q, got: ys.len() });
        }
        let dim = self.dim();
        for v in xs.iter().chain(ys) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        let comps = self.components(m, n, cfg)?;
        let (lt, rt) = (tuples(dim, self.p), tuples(dim, self.q));
        let mut acc = 0.0;
        for (li, t) in lt.iter().enumerate() {
            let dx = f64_det(xs, t);
            for (ri, u) in rt.iter().enumerate() {
                acc += comps[li * rt.len() + ri] * dx * f64_det(ys, u);
            }
        }
        Ok(acc)
    }

    /// The two-point function `(m, n) ↦ ϖ(X_1(m), … | Y_1(n), …)`.
    pub fn pair(&self, xs: &[VectorField], ys: &[VectorField]) -> Result<BiForm> {
        if xs.len() != self.p {
            return Err(Error::Arity { expected: self.p, got: xs.len() });
        }
        if ys.len() != self.q {
            return Err(Error::Arity { expected: self.q, got: ys.len() });
        }
        Ok(Self::build(&self.manifold, 0, 0, Node::Pair(self.clone(), xs.to_vec(), ys.to_vec())))
    }

    /// `s^*ϖ`, a `(q, p)` bi-form.
    pub fn swap_pullback(&self) -> BiForm {
        Self::build(&self.manifold, self.q, self.p, Node::Swap(self.clone()))
    }

    /// `d^L ϖ`, a `(p + 1, q)` bi-form.
    pub fn left_differential(&self) -> Result<BiForm> {
        check_degree(self.p + 1, self.q)?;
        Ok(Self::build(&self.manifold, self.p + 1, self.q, Node::Left(self.clone())))
    }

    /// `d^R ϖ = s^* d^L s^* ϖ`, a `(p, q + 1)` bi-form.
    pub fn right_differential(&self) -> Result<BiForm> {
        check_degree(self.p, self.q + 1)?;
        Ok(self.swap_pullback().left_differential()?.swap_pullback())
    }

    /// `ι^*ϖ`, a tensor field on `M` alternating in its first `p` and last `q` slots.
    pub fn diagonal_pullback(&self) -> BlockAlternatingTensor {
        let w = self.clone();
        let dim = self.dim();
        let field = MultiField::from_base_jets(&self.manifold, self.component_count(), move |m, order, cfg| {
            let map: Vec<usize> = (0..2 * dim).map(|v| v % dim).collect();
            Ok(w.eval(m, m, order, cfg)?.iter().map(|j| j.remap(&map, dim)).collect())
        });
        BlockAlternatingTensor { p: self.p, q: self.q, field }
    }
}

/// Seeds for the left point in variables `0..dim` and the right point in `dim..2·dim`.
fn split_seeds(m: &[f64], n: &[f64], order: usize) -> (Vec<Jet>, Vec<Jet>) {
    let dim = m.len();
    let l = m.iter().enumerate().map(|(i, &c)| Jet::variable(2 * dim, order, i, c)).collect();
    let r = n.iter().enumerate().map(|(i, &c)| Jet::variable(2 * dim, order, dim + i, c)).collect();
    (l, r)
}

/// A `(p + q)`-covariant tensor field on `M` alternating within its first `p` and its
/// last `q` slots, stored by increasing-tuple components like [`BiForm`].
#[derive(Clone, Debug)]
pub struct BlockAlternatingTensor {
    p: usize,
    q: usize,
    field: MultiField,
}

impl BlockAlternatingTensor {
    pub fn degree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn field(&self) -> &MultiField {
        &self.field
    }

    pub fn manifold(&self) -> &ChartManifold {
        self.field.manifold()
    }

    pub fn components_at(&self, m: &Point, cfg: &JetConfig) -> Result<Vec<f64>> {
        self.field.values_at(m, cfg)
    }

    /// Component `T(∂_{i_1}, …, ∂_{i_{p+q}})` for arbitrary (unsorted) indices.
    pub fn entry(&self, comps: &[f64], idx: &[usize]) -> f64 {
        let n = self.field.dim();
        let (l, r) = idx.split_at(self.p);
        match (sort_with_sign(l), sort_with_sign(r)) {
            (Some((sl, tl)), Some((sr, tr))) => {
                sl * sr * comps[tuple_index(n, &tl) * tuple_count(n, self.q) + tuple_index(n, &tr)]
            }
            _ => 0.0,
        }
    }

    /// All `dim^(p+q)` entries, row-major in slot order.
    pub fn dense_at(&self, m: &Point, cfg: &JetConfig) -> Result<Vec<f64>> {
        let comps = self.components_at(m, cfg)?;
        let n = self.field.dim();
        let k = self.p + self.q;
        let total = n.pow(k as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; k];
        for flat in 0..total {
            let mut r = flat;
            for s in (0..k).rev() {
                idx[s] = r % n;
                r /= n;
            }
            out.push(self.entry(&comps, &idx));
        }
        Ok(out)
    }

    /// `T(v_1, …, v_{p+q})(m)`.
    pub fn apply(&self, m: &Point, vectors: &[&[f64]], cfg: &JetConfig) -> Result<f64> {
        if vectors.len() != self.p + self.q {
            return Err(Error::Arity { expected: self.p + self.q, got: vectors.len() });
        }
        let comps = self.components_at(m, cfg)?;
        let n = self.field.dim();
        let (xs, ys) = vectors.split_at(self.p);
        let (lt, rt) = (tuples(n, self.p), tuples(n, self.q));
        let mut acc = 0.0;
        for (li, t) in lt.iter().enumerate() {
            let dx = f64_det(xs, t);
            for (ri, u) in rt.iter().enumerate() {
                acc += comps[li * rt.len() + ri] * dx * f64_det(ys, u);
            }
        }
        Ok(acc)
    }

    /// Reinterprets a `(1, 1)` pullback as a (not necessarily symmetric) metric field.
    pub fn as_metric(&self) -> Result<MetricField> {
        if (self.p, self.q) != (1, 1) {
            return Err(Error::Arity { expected: 2, got: self.p + self.q });
        }
        MetricField::from_field(self.field.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::sync::Mutex;

    fn plane() -> ChartManifold {
        ChartManifold::euclidean(2, 2.0)
    }

    fn line() -> ChartManifold {
        ChartManifold::euclidean(1, 2.0)
    }

    fn cfg() -> JetConfig {
        JetConfig::jet()
    }

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    #[test]
    fn tuple_indexing_round_trips() {
        for n in 1..5 {
            for p in 0..3 {
                let ts = tuples(n, p);
                assert_eq!(ts.len(), tuple_count(n, p));
                for (k, t) in ts.iter().enumerate() {
                    assert_eq!(tuple_index(n, t), k);
                }
            }
        }
        assert_eq!(sort_with_sign(&[2, 1]), Some((-1.0, vec![1, 2])));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn dual_pairing() {
        let m = plane();
        let w = BiForm::one_forms(&OneForm::coordinate(&m, 0), &OneForm::coordinate(&m, 1));
        let (dx, dy) = (VectorField::coordinate(&m, 0), VectorField::coordinate(&m, 1));
        let a = w.pair(&[dx.clone()], &[dy.clone()]).unwrap();
        let b = w.pair(&[dy.clone()], &[dy.clone()]).unwrap();
        for (l, r) in [([0.3, 0.1], [-1.0, 0.5]), ([1.5, -1.2], [0.0, 0.0])] {
            assert_eq!(a.components(&pt(&l), &pt(&r), &cfg()).unwrap(), vec![1.0]);
            assert_eq!(b.components(&pt(&l), &pt(&r), &cfg()).unwrap(), vec![0.0]);
        }
        let f = BiForm::scalar(&m, |x| &x[0] * &x[3]);
        let same = f.pair(&[], &[]).unwrap();
        assert_eq!(same.components(&pt(&[2.0, 0.0]), &pt(&[0.0, 3.0]), &cfg()).unwrap(), vec![6.0]);
        assert!(matches!(w.pair(&[], &[dy]), Err(Error::Arity { .. })));
    }

    #[test]
    fn diagonal_pullback_examples() {
        let m = plane();
        let w = BiForm::one_forms(&OneForm::coordinate(&m, 0), &OneForm::coordinate(&m, 1));
        let d = w.diagonal_pullback().dense_at(&pt(&[0.4, -0.2]), &cfg()).unwrap();
        assert_eq!(d, vec![0.0, 1.0, 0.0, 0.0]);

        let f = ScalarField::from_fn(&m, |x| &x[0] * &x[1].sin());
        let df = OneForm::differential(&f);
        let w = BiForm::one_forms(&df, &df);
        let p = pt(&[0.7, 0.3]);
        let g = w.diagonal_pullback().dense_at(&p, &cfg()).unwrap();
        let grad = [0.3f64.sin(), 0.7 * 0.3f64.cos()];
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(g[i * 2 + j], grad[i] * grad[j], epsilon = 1e-15);
            }
        }

        let fh = BiForm::scalar(&m, |x| &x[0].exp() * &x[3].cos());
        let v = fh.diagonal_pullback().components_at(&p, &cfg()).unwrap();
        assert_abs_diff_eq!(v[0], 0.7f64.exp() * 0.3f64.cos(), epsilon = 1e-15);
    }

    #[test]
    fn swap_pullback_examples() {
        let m = plane();
        let w = BiForm::one_forms(&OneForm::coordinate(&m, 0), &OneForm::coordinate(&m, 1));
        let s = w.swap_pullback();
        let (l, r) = (pt(&[0.2, 0.4]), pt(&[-0.3, 1.0]));
        assert_eq!(s.components(&l, &r, &cfg()).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        let ss = s.swap_pullback();
        assert_eq!(ss.components(&l, &r, &cfg()).unwrap(), w.components(&l, &r, &cfg()).unwrap());

        let fh = BiForm::scalar(&m, |x| &x[0].exp() * &x[3].cos());
        let v = fh.swap_pullback().components(&l, &r, &cfg()).unwrap()[0];
        assert_abs_diff_eq!(v, (-0.3f64).exp() * 0.4f64.cos(), epsilon = 1e-15);
    }

    #[test]
    fn differentials_of_product() {
        let m = line();
        let f = BiForm::scalar(&m, |x| &x[0] * &x[1]);
        let (x, y) = (pt(&[1.5]), pt(&[-0.5]));
        let dl = f.left_differential().unwrap();
        assert_eq!(dl.degree(), (1, 0));
        assert_eq!(dl.components(&x, &y, &cfg()).unwrap(), vec![-0.5]);
        let dr = f.right_differential().unwrap();
        assert_eq!(dr.degree(), (0, 1));
        assert_eq!(dr.components(&x, &y, &cfg()).unwrap(), vec![1.5]);
        let mixed = dl.right_differential().unwrap();
        assert_eq!(mixed.components(&x, &y, &cfg()).unwrap(), vec![1.0]);
    }

    #[test]
    fn left_constant_has_zero_left_differential() {
        let m = plane();
        let f = BiForm::scalar(&m, |x| &x[2].sin() * &x[3]);
        let d = f.left_differential().unwrap();
        let v = d.components(&pt(&[0.1, 0.2]), &pt(&[0.3, 0.4]), &cfg()).unwrap();
        assert!(v.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn degree_overflow() {
        let m = plane();
        let w = BiForm::zero(&m, 2, 1).unwrap();
        assert!(matches!(w.left_differential(), Err(Error::DegreeOverflow { p: 3, q: 1 })));
        assert!(w.right_differential().is_ok());
        let w = BiForm::zero(&m, 1, 2).unwrap();
        assert!(matches!(w.right_differential(), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn block_antisymmetry_of_two_forms() {
        let m = ChartManifold::euclidean(3, 1.0);
        let w = BiForm::from_fn(&m, 2, 1, |x| {
            (0..9).map(|c| &x[c % 6] * (c as f64 + 1.0) + x[(c + 1) % 6].sin()).collect()
        })
        .unwrap();
        let (l, r) = (pt(&[0.1, 0.2, 0.3]), pt(&[-0.1, 0.5, 0.2]));
        let (a, b, c) = ([1.0, 2.0, -1.0], [0.5, 0.0, 3.0], [0.3, 0.2, 0.1]);
        let v1 = w.evaluate(&l, &r, &[&a, &b], &[&c], &cfg()).unwrap();
        let v2 = w.evaluate(&l, &r, &[&b, &a], &[&c], &cfg()).unwrap();
        assert_abs_diff_eq!(v1, -v2, epsilon = 1e-13);
        assert_eq!(w.evaluate(&l, &r, &[&a, &a], &[&c], &cfg()).unwrap(), 0.0);
        let t = w.diagonal_pullback();
        let d = t.dense_at(&l, &cfg()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(d[(i * 3 + j) * 3 + k], -d[(j * 3 + i) * 3 + k]);
                }
            }
        }
    }

    #[test]
    fn outside_neighborhood_is_an_error() {
        let m = line();
        let w = BiForm::scalar(&m, |x| &x[0] * &x[1]).with_neighborhood(|a, b| (a[0] - b[0]).abs() < 0.5);
        assert!(w.components(&pt(&[0.0]), &pt(&[0.1]), &cfg()).is_ok());
        assert!(matches!(
            w.components(&pt(&[0.0]), &pt(&[1.0]), &cfg()),
            Err(Error::OutsideNeighborhood { .. })
        ));
        let narrow = BiForm::scalar(&m, |x| x[0].clone()).with_neighborhood(|_, _| false);
        assert!(narrow.diagonal_pullback().components_at(&pt(&[0.3]), &cfg()).is_err());
    }

    #[test]
    fn diagonal_pullback_queries_only_the_diagonal() {
        let m = plane();
        let seen: Arc<Mutex<Vec<Vec<f64>>>> = Arc::new(Mutex::new(Vec::new()));
        let log = seen.clone();
        let field = MultiField::new(&m.square(), 4, move |x, _| {
            log.lock().unwrap().push(x.iter().map(Jet::value).collect());
            Ok((0..4).map(|c| &(&x[c] * &x[(c + 1) % 4]) + x[(c + 2) % 4].exp()).collect())
        });
        let w = BiForm::from_field(&m, 1, 1, field).unwrap();
        let p = pt(&[0.3, -0.4]);
        w.diagonal_pullback().components_at(&p, &cfg()).unwrap();
        w.left_differential().unwrap().diagonal_pullback().components_at(&p, &cfg()).unwrap();
        w.right_differential().unwrap().diagonal_pullback().components_at(&p, &cfg()).unwrap();
        let seen = seen.lock().unwrap();
        assert!(!seen.is_empty());
        for q in seen.iter() {
            assert_eq!(&q[..2], &q[2..]);
        }
    }

    #[test]
    fn differentials_match_central_differences() {
        let m = plane();
        let f = BiForm::scalar(&m, |x| &(&x[0] * &x[3]).sin() + &(&x[1] * &x[2]) * &x[0]);
        let w = f.left_differential().unwrap().right_differential().unwrap();
        let (l, r) = (pt(&[0.3, 0.2]), pt(&[-0.1, 0.4]));
        let exact = w.components(&l, &r, &cfg()).unwrap();
        let fd = w.components(&l, &r, &JetConfig::central_difference(1e-4)).unwrap();
        for (a, b) in exact.iter().zip(&fd) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }
}
