//! Smooth fields on a chart, evaluated as jets.
//!
//! Every field is a [`MultiField`]: a bundle of smooth component functions evaluated
//! together. Typed wrappers give the components their geometric meaning and index layout.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::jet::{common_nvars, common_order, Jet, MAX_ORDER};
use crate::manifold::{ChartManifold, Point};

/// How derivatives of fields are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffMode {
    /// Exact truncated Taylor arithmetic.
    TaylorJet,
    /// Central differences of plain evaluations.
    CentralDifference,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JetConfig {
    pub mode: DiffMode,
    pub fd_step: f64,
    pub max_order: usize,
}

impl Default for JetConfig {
    fn default() -> Self {
        JetConfig { mode: DiffMode::TaylorJet, fd_step: 1e-4, max_order: MAX_ORDER }
    }
}

impl JetConfig {
    pub fn jet() -> Self {
        Self::default()
    }

    pub fn central_difference(fd_step: f64) -> Self {
        JetConfig { mode: DiffMode::CentralDifference, fd_step, max_order: MAX_ORDER }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fd_step > 0.0) || !self.fd_step.is_finite() {
            return Err(Error::Config(alloc::format!("fd_step must be positive, got {}", self.fd_step)));
        }
        if self.max_order < MAX_ORDER {
            return Err(Error::Config(alloc::format!(
                "max_order must be at least {MAX_ORDER}, got {}",
                self.max_order
            )));
        }
        Ok(())
    }

    /// Highest order the engine will actually produce.
    pub fn order_limit(&self) -> usize {
        self.max_order.min(MAX_ORDER)
    }
}

/// Evaluates all components of a field at jet-valued coordinates.
pub trait FieldEval: Send + Sync {
    fn eval(&self, x: &[Jet], cfg: &JetConfig) -> Result<Vec<Jet>>;
}

impl<F> FieldEval for F
where
    F: Fn(&[Jet], &JetConfig) -> Result<Vec<Jet>> + Send + Sync,
{
    fn eval(&self, x: &[Jet], cfg: &JetConfig) -> Result<Vec<Jet>> {
        self(x, cfg)
    }
}

/// A smooth map from a chart to `R^len`.
#[derive(Clone)]
pub struct MultiField {
    manifold: ChartManifold,
    len: usize,
    black_box: bool,
    native: bool,
    inner: Arc<dyn FieldEval>,
}

impl fmt::Debug for MultiField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiField")
            .field("chart", &self.manifold.label())
            .field("len", &self.len)
            .field("black_box", &self.black_box)
            .finish()
    }
}

/// If every input is a distinct seed `c + δ_v`, the variable of each.
fn seed_map(x: &[Jet]) -> Option<Vec<usize>> {
    let mut map = Vec::with_capacity(x.len());
    for j in x {
        let v = j.seed_var()?;
        if map.contains(&v) {
            return None;
        }
        map.push(v);
    }
    Some(map)
}

/// Moves a jet expanded in the chart's own coordinates onto the inputs `x`.
fn transport(own: Jet, x: &[Jet], map: &Option<Vec<usize>>, nvars: usize, order: usize) -> Jet {
    let own = own.truncated(order);
    match map {
        Some(map) => {
            if map.iter().enumerate().all(|(i, &v)| i == v) && nvars == map.len() {
                own
            } else {
                own.remap(map, nvars)
            }
        }
        None => own.compose(x),
    }
}

impl MultiField {
    /// A field computed with jet arithmetic. The closure must be generic in the jets it
    /// receives: they may be constants, seeds, or arbitrary compositions.
    pub fn new(
        manifold: &ChartManifold,
        len: usize,
        eval: impl Fn(&[Jet], &JetConfig) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        MultiField { manifold: manifold.clone(), len, black_box: false, native: false, inner: Arc::new(eval) }
    }

    /// A field known only through plain evaluation; derivatives always come from central
    /// differences with the configured step.
    pub fn black_box(
        manifold: &ChartManifold,
        len: usize,
        eval: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        let f = move |x: &[Jet], _: &JetConfig| -> Result<Vec<Jet>> {
            let p: Vec<f64> = x.iter().map(Jet::value).collect();
            Ok(eval(&p)?.into_iter().map(Jet::constant).collect())
        };
        MultiField { manifold: manifold.clone(), len, black_box: true, native: false, inner: Arc::new(f) }
    }

    /// A field whose evaluator produces jets of a requested order at a base point, in the
    /// chart's own coordinates, and handles the differentiation mode itself.
    pub fn from_base_jets(
        manifold: &ChartManifold,
        len: usize,
        eval: impl Fn(&[f64], usize, &JetConfig) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        let f = move |x: &[Jet], cfg: &JetConfig| -> Result<Vec<Jet>> {
            let order = common_order(x);
            let base: Vec<f64> = x.iter().map(Jet::value).collect();
            let own = eval(&base, order, cfg)?;
            if order == 0 {
                return Ok(own.into_iter().map(|j| Jet::constant(j.value())).collect());
            }
            let map = seed_map(x);
            let nvars = common_nvars(x);
            Ok(own.into_iter().map(|j| transport(j, x, &map, nvars, order)).collect())
        };
        MultiField { manifold: manifold.clone(), len, black_box: false, native: true, inner: Arc::new(f) }
    }

    /// Post-composes with a pointwise map of the component jets. The result inherits this
    /// field's differentiation behavior.
    pub fn map(&self, len: usize, f: impl Fn(Vec<Jet>) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        let g = move |x: &[Jet], cfg: &JetConfig| -> Result<Vec<Jet>> { Ok(f(inner.eval(x, cfg)?)) };
        MultiField { manifold: self.manifold.clone(), len, black_box: false, native: true, inner: Arc::new(g) }
    }

    /// Components `range` of this field.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Self {
        self.map(range.len(), move |v| v[range.clone()].to_vec())
    }

    /// Concatenates fields on the same chart.
    pub fn concat(manifold: &ChartManifold, parts: Vec<MultiField>) -> Self {
        let len = parts.iter().map(|f| f.len).sum();
        let g = move |x: &[Jet], cfg: &JetConfig| -> Result<Vec<Jet>> {
            let mut out = Vec::with_capacity(len);
            for f in &parts {
                out.extend(f.eval(x, cfg)?);
            }
            Ok(out)
        };
        MultiField { manifold: manifold.clone(), len, black_box: false, native: true, inner: Arc::new(g) }
    }

    pub fn constant(manifold: &ChartManifold, values: Vec<f64>) -> Self {
        let len = values.len();
        MultiField::new(manifold, len, move |_, _| Ok(values.iter().map(|&v| Jet::constant(v)).collect()))
    }

    pub fn manifold(&self) -> &ChartManifold {
        &self.manifold
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_black_box(&self) -> bool {
        self.black_box
    }

    fn raw(&self, x: &[Jet], cfg: &JetConfig) -> Result<Vec<Jet>> {
        let out = self.inner.eval(x, cfg)?;
        if out.len() != self.len {
            return Err(Error::DimensionMismatch { expected: self.len, got: out.len() });
        }
        Ok(out)
    }

    /// Plain values at coordinates (no domain check).
    pub fn values(&self, coords: &[f64], cfg: &JetConfig) -> Result<Vec<f64>> {
        let x: Vec<Jet> = coords.iter().map(|&c| Jet::constant(c)).collect();
        Ok(self.raw(&x, cfg)?.iter().map(Jet::value).collect())
    }

    /// Evaluates every component at jet-valued coordinates.
    pub fn eval(&self, x: &[Jet], cfg: &JetConfig) -> Result<Vec<Jet>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        let order = common_order(x);
        if order == 0 {
            let consts: Vec<Jet> = x.iter().map(|j| Jet::constant(j.value())).collect();
            return Ok(self.raw(&consts, cfg)?.into_iter().map(|j| Jet::constant(j.value())).collect());
        }
        if order > cfg.order_limit() {
            return Err(Error::OrderOverflow { requested: order, limit: cfg.order_limit() });
        }
        let nvars = common_nvars(x);
        let map = seed_map(x);
        let base: Vec<f64> = x.iter().map(Jet::value).collect();
        let own = if self.black_box || (cfg.mode == DiffMode::CentralDifference && !self.native) {
            self.fd_jets(&base, order, cfg)?
        } else {
            match &map {
                Some(m) if nvars == n && m.iter().enumerate().all(|(i, &v)| i == v) => {
                    return Ok(self.raw(x, cfg)?.into_iter().map(|j| j.truncated(order)).collect());
                }
                Some(_) => self.raw(&Jet::seeds(&base, order), cfg)?,
                None => {
                    return Ok(self.raw(x, cfg)?.into_iter().map(|j| j.truncated(order)).collect());
                }
            }
        };
        Ok(own.into_iter().map(|j| transport(j, x, &map, nvars, order)).collect())
    }

    /// Jets of the given order in the chart's own coordinates at a checked point.
    pub fn at(&self, p: &Point, order: usize, cfg: &JetConfig) -> Result<Vec<Jet>> {
        self.manifold.check(p.coords())?;
        self.eval(&Jet::seeds(p.coords(), order), cfg)
    }

    /// Plain values at a checked point.
    pub fn values_at(&self, p: &Point, cfg: &JetConfig) -> Result<Vec<f64>> {
        self.manifold.check(p.coords())?;
        self.values(p.coords(), cfg)
    }

    /// First partial derivatives of every component, `[component][variable]`, as jets
    /// on the same inputs. Costs one extra order.
    pub fn partials(&self, x: &[Jet], cfg: &JetConfig) -> Result<Vec<Vec<Jet>>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        let order = common_order(x);
        if order + 1 > cfg.order_limit() {
            return Err(Error::OrderOverflow { requested: order + 1, limit: cfg.order_limit() });
        }
        let base: Vec<f64> = x.iter().map(Jet::value).collect();
        let vals = self.eval(&Jet::seeds(&base, order + 1), cfg)?;
        let nvars = common_nvars(x);
        let map = seed_map(x);
        Ok(vals
            .iter()
            .map(|v| {
                (0..n)
                    .map(|var| {
                        let d = v.derivative(var);
                        if order == 0 {
                            Jet::constant(d.value())
                        } else {
                            transport(d, x, &map, nvars, order)
                        }
                    })
                    .collect()
            })
            .collect())
    }

    /// Central-difference jets in the chart's own coordinates.
    fn fd_jets(&self, base: &[f64], order: usize, cfg: &JetConfig) -> Result<Vec<Jet>> {
        let n = base.len();
        let h = cfg.fd_step;
        let f = |p: &[f64]| self.values(p, cfg);
        let shifted = |p: &[f64], i: usize, s: f64| {
            let mut q = p.to_vec();
            q[i] += s;
            q
        };
        let d2 = |p: &[f64], i: usize, j: usize| -> Result<Vec<f64>> {
            if i == j {
                let (fp, f0, fm) = (f(&shifted(p, i, h))?, f(p)?, f(&shifted(p, i, -h))?);
                Ok((0..fp.len()).map(|c| (fp[c] - 2.0 * f0[c] + fm[c]) / (h * h)).collect())
            } else {
                let pp = f(&shifted(&shifted(p, i, h), j, h))?;
                let pm = f(&shifted(&shifted(p, i, h), j, -h))?;
                let mp = f(&shifted(&shifted(p, i, -h), j, h))?;
                let mm = f(&shifted(&shifted(p, i, -h), j, -h))?;
                Ok((0..pp.len()).map(|c| (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h)).collect())
            }
        };
        let f0 = f(base)?;
        let mut jets: Vec<Jet> = f0.iter().map(|&v| Jet::zeros(n, order).with_value(v)).collect();
        let mut coeffs: Vec<Vec<f64>> = jets.iter().map(|j| j.coeffs().to_vec()).collect();
        if order >= 1 {
            for i in 0..n {
                let (fp, fm) = (f(&shifted(base, i, h))?, f(&shifted(base, i, -h))?);
                for c in 0..self.len {
                    coeffs[c][1 + i] = (fp[c] - fm[c]) / (2.0 * h);
                }
            }
        }
        if order >= 2 {
            let mut pos = 1 + n;
            for j in 0..n {
                for i in 0..=j {
                    let d = d2(base, i, j)?;
                    let fact = if i == j { 2.0 } else { 1.0 };
                    for c in 0..self.len {
                        coeffs[c][pos] = d[c] / fact;
                    }
                    pos += 1;
                }
            }
            if order >= 3 {
                for k in 0..n {
                    for j in 0..=k {
                        for i in 0..=j {
                            let dp = d2(&shifted(base, k, h), i, j)?;
                            let dm = d2(&shifted(base, k, -h), i, j)?;
                            let fact = match (i == j, j == k) {
                                (true, true) => 6.0,
                                (true, false) | (false, true) => 2.0,
                                _ => 1.0,
                            };
                            for c in 0..self.len {
                                coeffs[c][pos] = (dp[c] - dm[c]) / (2.0 * h) / fact;
                            }
                            pos += 1;
                        }
                    }
                }
            }
        }
        for (j, c) in jets.iter_mut().zip(coeffs) {
            *j = Jet::from_coeffs(n, order, c);
        }
        Ok(jets)
    }
}

macro_rules! typed_field {
    ($(#[$doc:meta])* $name:ident, $len:expr) => {
        $(#[$doc])*
        #[derive(Clone, Debug)]
        pub struct $name(MultiField);

        impl $name {
            /// Wraps a field whose component count matches this type.
            pub fn from_field(field: MultiField) -> Result<Self> {
                let n = field.dim();
                let expected: usize = $len(n);
                if field.len() != expected {
                    return Err(Error::DimensionMismatch { expected, got: field.len() });
                }
                Ok($name(field))
            }

            pub fn new(
                manifold: &ChartManifold,
                eval: impl Fn(&[Jet], &JetConfig) -> Result<Vec<Jet>> + Send + Sync + 'static,
            ) -> Self {
                let len: usize = $len(manifold.dim());
                $name(MultiField::new(manifold, len, eval))
            }

            pub fn field(&self) -> &MultiField {
                &self.0
            }

            pub fn manifold(&self) -> &ChartManifold {
                self.0.manifold()
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            pub fn eval(&self, x: &[Jet], cfg: &JetConfig) -> Result<Vec<Jet>> {
                self.0.eval(x, cfg)
            }

            pub fn values_at(&self, p: &Point, cfg: &JetConfig) -> Result<Vec<f64>> {
                self.0.values_at(p, cfg)
            }
        }
    };
}

typed_field!(
    /// A smooth function on the chart.
    ScalarField,
    |_n: usize| 1
);
typed_field!(
    /// Components `X^k` in the coordinate frame.
    VectorField,
    |n: usize| n
);
typed_field!(
    /// Components `α_k` in the coordinate coframe.
    OneForm,
    |n: usize| n
);
typed_field!(
    /// Symmetric metric `g_{ij}`, row-major.
    MetricField,
    |n: usize| n * n
);
typed_field!(
    /// Christoffel symbols `Γ^k_{ij}` with `∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k`, stored at
    /// `(k * n + i) * n + j`.
    Connection,
    |n: usize| n * n * n
);
typed_field!(
    /// Antisymmetric two-form `ω_{ij}`, full row-major matrix.
    TwoForm,
    |n: usize| n * n
);
typed_field!(
    /// A `(1,2)` tensor `T^k_{ij}` with the same layout as [`Connection`].
    MixedTensor,
    |n: usize| n * n * n
);
typed_field!(
    /// A covariant 3-tensor `T_{ijl}` stored at `(i * n + j) * n + l`.
    CovariantTensor3,
    |n: usize| n * n * n
);

impl ScalarField {
    /// A jet-generic scalar function; for fallible evaluators use [`ScalarField::new`].
    pub fn from_fn(manifold: &ChartManifold, f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        ScalarField(MultiField::new(manifold, 1, move |x, _| Ok(vec![f(x)])))
    }

    pub fn black_box(manifold: &ChartManifold, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField(MultiField::black_box(manifold, 1, move |x| Ok(vec![f(x)])))
    }

    pub fn constant(manifold: &ChartManifold, c: f64) -> Self {
        ScalarField(MultiField::constant(manifold, vec![c]))
    }

    /// The coordinate function `x^i`.
    pub fn coordinate(manifold: &ChartManifold, i: usize) -> Self {
        Self::from_fn(manifold, move |x| x[i].clone())
    }

    pub fn eval1(&self, x: &[Jet], cfg: &JetConfig) -> Result<Jet> {
        Ok(self.0.eval(x, cfg)?.swap_remove(0))
    }

    pub fn value_at(&self, p: &Point, cfg: &JetConfig) -> Result<f64> {
        Ok(self.0.values_at(p, cfg)?[0])
    }

    /// Gradient `∂_k f` at a checked point.
    pub fn gradient_at(&self, p: &Point, cfg: &JetConfig) -> Result<Vec<f64>> {
        self.0.manifold.check(p.coords())?;
        let x: Vec<Jet> = p.coords().iter().map(|&c| Jet::constant(c)).collect();
        Ok(self.0.partials(&x, cfg)?.swap_remove(0).iter().map(Jet::value).collect())
    }
}

impl VectorField {
    pub fn from_components(manifold: &ChartManifold, comps: Vec<ScalarField>) -> Result<Self> {
        from_scalars(manifold, comps).map(VectorField)
    }

    /// The coordinate vector field `∂_i`.
    pub fn coordinate(manifold: &ChartManifold, i: usize) -> Self {
        let mut v = vec![0.0; manifold.dim()];
        v[i] = 1.0;
        VectorField(MultiField::constant(manifold, v))
    }

    pub fn constant(manifold: &ChartManifold, comps: Vec<f64>) -> Self {
        VectorField(MultiField::constant(manifold, comps))
    }

    pub fn zero(manifold: &ChartManifold) -> Self {
        Self::constant(manifold, vec![0.0; manifold.dim()])
    }
}

impl OneForm {
    pub fn from_components(manifold: &ChartManifold, comps: Vec<ScalarField>) -> Result<Self> {
        from_scalars(manifold, comps).map(OneForm)
    }

    /// The coordinate differential `dx^i`.
    pub fn coordinate(manifold: &ChartManifold, i: usize) -> Self {
        let mut v = vec![0.0; manifold.dim()];
        v[i] = 1.0;
        OneForm(MultiField::constant(manifold, v))
    }

    /// `df`.
    pub fn differential(f: &ScalarField) -> Self {
        let g = f.clone();
        OneForm::new(f.manifold(), move |x, cfg| Ok(g.0.partials(x, cfg)?.swap_remove(0)))
    }

    /// `α(X)` as a scalar field.
    pub fn apply(&self, x: &VectorField) -> ScalarField {
        let (a, v) = (self.clone(), x.clone());
        ScalarField(MultiField::new(self.manifold(), 1, move |p, cfg| {
            let (ac, vc) = (a.eval(p, cfg)?, v.eval(p, cfg)?);
            Ok(vec![dot(&ac, &vc)])
        }))
    }
}

impl MetricField {
    /// A metric given entrywise; `entries[i * n + j]`.
    pub fn from_entries(manifold: &ChartManifold, entries: Vec<ScalarField>) -> Result<Self> {
        from_scalars(manifold, entries).map(MetricField)
    }

    pub fn constant(manifold: &ChartManifold, entries: Vec<f64>) -> Self {
        MetricField(MultiField::constant(manifold, entries))
    }

    pub fn euclidean(manifold: &ChartManifold) -> Self {
        let n = manifold.dim();
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            e[i * n + i] = 1.0;
        }
        Self::constant(manifold, e)
    }

    /// Diagonal metric with the given diagonal entries.
    pub fn diagonal(manifold: &ChartManifold, diag: Vec<ScalarField>) -> Result<Self> {
        let n = manifold.dim();
        if diag.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: diag.len() });
        }
        Ok(MetricField::new(manifold, move |x, cfg| {
            let mut out = vec![Jet::constant(0.0); n * n];
            for (i, d) in diag.iter().enumerate() {
                out[i * n + i] = d.eval1(x, cfg)?;
            }
            Ok(out)
        }))
    }

    /// `g(X, Y)` as a scalar field.
    pub fn apply(&self, x: &VectorField, y: &VectorField) -> ScalarField {
        let (g, a, b) = (self.clone(), x.clone(), y.clone());
        let n = self.dim();
        ScalarField(MultiField::new(self.manifold(), 1, move |p, cfg| {
            let (gc, ac, bc) = (g.eval(p, cfg)?, a.eval(p, cfg)?, b.eval(p, cfg)?);
            let mut acc = Jet::constant(0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += &(&(&gc[i * n + j] * &ac[i]) * &bc[j]);
                }
            }
            Ok(vec![acc])
        }))
    }
}

impl Connection {
    pub fn flat(manifold: &ChartManifold) -> Self {
        let n = manifold.dim();
        Connection(MultiField::constant(manifold, vec![0.0; n * n * n]))
    }

    pub fn from_components(manifold: &ChartManifold, comps: Vec<ScalarField>) -> Result<Self> {
        from_scalars(manifold, comps).map(Connection)
    }

    /// Index of `Γ^k_{ij}`.
    pub fn index(n: usize, k: usize, i: usize, j: usize) -> usize {
        (k * n + i) * n + j
    }
}

impl MixedTensor {
    pub fn index(n: usize, k: usize, i: usize, j: usize) -> usize {
        (k * n + i) * n + j
    }
}

impl CovariantTensor3 {
    pub fn index(n: usize, i: usize, j: usize, l: usize) -> usize {
        (i * n + j) * n + l
    }
}

fn from_scalars(manifold: &ChartManifold, comps: Vec<ScalarField>) -> Result<MultiField> {
    for c in &comps {
        if c.dim() != manifold.dim() {
            return Err(Error::DimensionMismatch { expected: manifold.dim(), got: c.dim() });
        }
    }
    Ok(MultiField::concat(manifold, comps.into_iter().map(|c| c.0).collect()))
}

pub(crate) fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    let mut acc = Jet::constant(0.0);
    for (x, y) in a.iter().zip(b) {
        acc += &(x * y);
    }
    acc
}
