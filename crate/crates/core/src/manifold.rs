//! Single-chart manifolds, points and probe sampling.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Shrink factor applied to the sampling box around its center.
pub const SAMPLING_MARGIN: f64 = 0.9;

type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A manifold covered by one chart: an open subset of `R^dim` given by a membership
/// predicate, plus a box used for rejection sampling of probe points.
#[derive(Clone)]
pub struct ChartManifold {
    inner: Arc<ChartInner>,
}

struct ChartInner {
    label: String,
    dim: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    domain: Arc<DomainFn>,
}

impl fmt::Debug for ChartManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartManifold")
            .field("label", &self.inner.label)
            .field("dim", &self.inner.dim)
            .field("lower", &self.inner.lower)
            .field("upper", &self.inner.upper)
            .finish()
    }
}

impl ChartManifold {
    pub fn new(
        label: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 {
            return Err(Error::Config("chart dimension must be at least 1".into()));
        }
        if upper.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: upper.len() });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::Config("sampling box must have lower < upper".into()));
        }
        Ok(ChartManifold {
            inner: Arc::new(ChartInner { label: label.into(), dim, lower, upper, domain: Arc::new(domain) }),
        })
    }

    /// `R^dim` with sampling box `[-half_width, half_width]^dim`.
    pub fn euclidean(dim: usize, half_width: f64) -> Self {
        let label = alloc::format!("R^{dim}");
        Self::new(label, alloc::vec![-half_width; dim], alloc::vec![half_width; dim], |_| true)
            .expect("valid euclidean chart")
    }

    /// The Cartesian square `M × M`, left coordinates first.
    pub fn square(&self) -> ChartManifold {
        let n = self.dim();
        let mut lower = self.inner.lower.clone();
        lower.extend_from_slice(&self.inner.lower);
        let mut upper = self.inner.upper.clone();
        upper.extend_from_slice(&self.inner.upper);
        let domain = self.inner.domain.clone();
        let label = alloc::format!("{}×{}", self.inner.label, self.inner.label);
        ChartManifold {
            inner: Arc::new(ChartInner {
                label,
                dim: 2 * n,
                lower,
                upper,
                domain: Arc::new(move |x: &[f64]| domain(&x[..n]) && domain(&x[n..])),
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn sampling_box(&self) -> (&[f64], &[f64]) {
        (&self.inner.lower, &self.inner.upper)
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.dim() && coords.iter().all(|c| c.is_finite()) && (self.inner.domain)(coords)
    }

    pub fn check(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: coords.len() });
        }
        if !self.contains(coords) {
            return Err(self.domain_error(coords));
        }
        Ok(())
    }

    pub fn domain_error(&self, coords: &[f64]) -> Error {
        Error::Domain { chart: self.inner.label.clone(), coords: coords.to_vec() }
    }

    /// A validated point.
    pub fn point(&self, coords: impl Into<Vec<f64>>) -> Result<Point> {
        let coords = coords.into();
        self.check(&coords)?;
        Ok(Point { coords })
    }

    /// `count` points drawn uniformly from the sampling box shrunk by
    /// [`SAMPLING_MARGIN`] toward its center, rejecting points outside the domain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(count);
        let max_attempts = 1000 * count.max(1);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > max_attempts {
                return Err(Error::Config(alloc::format!(
                    "rejection sampling on `{}` accepted {} of {} points",
                    self.inner.label,
                    out.len(),
                    count
                )));
            }
            let coords: Vec<f64> = self
                .inner
                .lower
                .iter()
                .zip(&self.inner.upper)
                .map(|(&lo, &hi)| {
                    let center = 0.5 * (lo + hi);
                    let u: f64 = rng.gen_range(lo..hi);
                    center + SAMPLING_MARGIN * (u - center)
                })
                .collect();
            if self.contains(&coords) {
                out.push(Point { coords });
            }
        }
        Ok(out)
    }

    /// Samples points in balls of `radius` around each of `centers` and returns those that
    /// fall outside the domain. An empty result is evidence that the domain is open.
    pub fn openness_violations<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        centers: &[Point],
        radius: f64,
        per_center: usize,
    ) -> Vec<Vec<f64>> {
        let mut bad = Vec::new();
        for c in centers {
            for _ in 0..per_center {
                // uniform direction by rejection in the unit cube, then a random radius
                let dir: Vec<f64> = loop {
                    let d: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n2: f64 = d.iter().map(|x| x * x).sum();
                    if n2 > 1e-12 && n2 <= 1.0 {
                        break d.iter().map(|x| x / num_traits::Float::sqrt(n2)).collect();
                    }
                };
                let r = radius * rng.gen_range(0.0..1.0);
                let q: Vec<f64> = c.coords.iter().zip(&dir).map(|(x, d)| x + r * d).collect();
                if !self.contains(&q) {
                    bad.push(q);
                }
            }
        }
        bad
    }
}

/// Coordinates of a point in the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// An unchecked point; operations that take a manifold validate it on use.
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Point { coords: coords.into() }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point { coords }
    }
}
