//! Contrast bi-forms and the metric/connection pairs they induce.
//!
//! Conventional contrast functions are ingested with a minus sign, `ϖ = −d^L d^R F` and
//! `S = −d^R F`, so that divergences such as Kullback–Leibler give positive metrics.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::biform::{tuple_count, tuple_index, BiForm};
use crate::error::{Error, Result};
use crate::field::{Connection, DiffMode, JetConfig, MetricField, MultiField};
use crate::geometry::conjugacy_residual;
use crate::jet::Jet;
use crate::linalg::{inverse_with_condition, jet_inverse};
use crate::manifold::Point;

/// Global sign applied to `d^L d^R F` when building a contrast bi-form from a function.
pub const EGUCHI_SIGN: f64 = -1.0;

/// Default number of random probe points used for validation.
pub const DEFAULT_PROBE_COUNT: usize = 25;

/// Symmetry tolerance for induced metrics in the given differentiation mode.
pub fn symmetry_tolerance(cfg: &JetConfig) -> f64 {
    match cfg.mode {
        DiffMode::TaylorJet => 1e-9,
        DiffMode::CentralDifference => 1e-5,
    }
}

/// Default threshold below which a torsion residual counts as zero.
pub fn default_classify_tolerance(cfg: &JetConfig) -> f64 {
    match cfg.mode {
        DiffMode::TaylorJet => 1e-7,
        DiffMode::CentralDifference => 1e-4,
    }
}

/// A `(1, 1)` bi-form whose diagonal pullback is symmetric and nondegenerate at the
/// probe points it was validated on.
#[derive(Clone, Debug)]
pub struct ContrastBiForm {
    form: BiForm,
    warnings: Vec<String>,
}

impl ContrastBiForm {
    /// Validates `form` at the probe points.
    pub fn new(form: BiForm, probes: &[Point], cfg: &JetConfig) -> Result<Self> {
        if form.degree() != (1, 1) {
            let (p, q) = form.degree();
            return Err(Error::Arity { expected: 2, got: p + q });
        }
        let n = form.dim();
        let tol = symmetry_tolerance(cfg);
        for p in probes {
            let g = form.components(p, p, cfg)?;
            let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut asym: f64 = 0.0;
            for i in 0..n {
                for j in 0..i {
                    asym = asym.max((g[i * n + j] - g[j * n + i]).abs());
                }
            }
            if asym > tol * scale {
                return Err(Error::Asymmetric { coords: p.coords().to_vec(), asymmetry: asym });
            }
            if let Err(cond) = inverse_with_condition(&g, n) {
                return Err(Error::NotAContrast {
                    coords: p.coords().to_vec(),
                    reason: format!("induced metric is degenerate (condition estimate {cond:e})"),
                });
            }
        }
        Ok(ContrastBiForm { form, warnings: Vec::new() })
    }

    /// Wraps a bi-form without probing. Callers take responsibility for validity.
    pub fn new_unchecked(form: BiForm) -> Self {
        ContrastBiForm { form, warnings: Vec::new() }
    }

    pub fn form(&self) -> &BiForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// Diagnostics collected while building the bi-form (for example a contrast function
    /// that does not vanish on the diagonal).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `s^*ϖ`, again a contrast bi-form because `ι^* s^* ϖ` is the transpose of `ι^*ϖ`.
    pub fn swap(&self) -> ContrastBiForm {
        ContrastBiForm { form: self.form.swap_pullback(), warnings: self.warnings.clone() }
    }

    /// The induced metric at a point, with the symmetry check applied.
    pub fn metric_at(&self, p: &Point, cfg: &JetConfig) -> Result<Vec<f64>> {
        let n = self.dim();
        let g = self.form.components(p, p, cfg)?;
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                let a = (g[i * n + j] - g[j * n + i]).abs();
                if a > symmetry_tolerance(cfg) * scale {
                    return Err(Error::Asymmetric { coords: p.coords().to_vec(), asymmetry: a });
                }
            }
        }
        Ok(g)
    }
}

/// A `(0, 1)` bi-form used as a potential through `ϖ = d^L S`.
#[derive(Clone, Debug)]
pub struct PreContrastBiForm {
    form: BiForm,
}

impl PreContrastBiForm {
    pub fn new(form: BiForm) -> Result<Self> {
        if form.degree() != (0, 1) {
            let (p, q) = form.degree();
            return Err(Error::Arity { expected: 1, got: p + q });
        }
        Ok(PreContrastBiForm { form })
    }

    /// `S = −d^R F` for a two-point function `F`.
    pub fn from_contrast_function(f: &BiForm) -> Result<Self> {
        Self::new(f.right_differential()?.scale(EGUCHI_SIGN))
    }

    pub fn form(&self) -> &BiForm {
        &self.form
    }

    /// Largest component of `ι^*S` over the probe points.
    pub fn normalization_residual(&self, probes: &[Point], cfg: &JetConfig) -> Result<f64> {
        let t = self.form.diagonal_pullback();
        let mut worst: f64 = 0.0;
        for p in probes {
            for v in t.components_at(p, cfg)? {
                worst = worst.max(v.abs());
            }
        }
        Ok(worst)
    }
}

/// `ϖ = −d^L d^R F`, validated at the probes. Records a warning when `F` or its first
/// derivatives fail to vanish on the diagonal.
pub fn biform_from_contrast(f: &BiForm, probes: &[Point], cfg: &JetConfig) -> Result<ContrastBiForm> {
    if f.degree() != (0, 0) {
        let (p, q) = f.degree();
        return Err(Error::Arity { expected: 0, got: p + q });
    }
    let form = f.left_differential()?.right_differential()?.scale(EGUCHI_SIGN);
    let mut out = ContrastBiForm::new(form, probes, cfg)?;
    let tol = match cfg.mode {
        DiffMode::TaylorJet => 1e-8,
        DiffMode::CentralDifference => 1e-4,
    };
    for p in probes {
        let jets = f.eval(p.coords(), p.coords(), 1, cfg)?;
        let j = &jets[0];
        let first = (0..2 * f.dim()).map(|v| j.coeff(&[v]).abs()).fold(0.0, f64::max);
        if j.value().abs() > tol || first > tol {
            let msg = format!(
                "two-point function is not a contrast function at {:?}: value {:e}, first derivative {:e}",
                p.coords(),
                j.value(),
                first
            );
            log::warn!("{msg}");
            out.warnings.push(msg);
            break;
        }
    }
    Ok(out)
}

/// `ϖ = d^L S`, validated at the probes.
pub fn biform_from_precontrast(s: &PreContrastBiForm, probes: &[Point], cfg: &JetConfig) -> Result<ContrastBiForm> {
    ContrastBiForm::new(s.form.left_differential()?, probes, cfg)
}

/// `g^ϖ = ι^*ϖ`.
pub fn induced_metric(w: &ContrastBiForm) -> MetricField {
    w.form.diagonal_pullback().as_metric().expect("(1,1) pullback")
}

/// Left-slot derivatives `∂_{u_i} ϖ_{j|k}` restricted to the diagonal, as jets on `M` of
/// the given order, indexed `(i * n + j) * n + k`.
fn left_slot_derivatives(w: &BiForm, m: &[f64], order: usize, cfg: &JetConfig) -> Result<Vec<Jet>> {
    let n = w.dim();
    if order + 1 > cfg.order_limit() {
        return Err(Error::OrderOverflow { requested: order + 1, limit: cfg.order_limit() });
    }
    let comps = w.eval(m, m, order + 1, cfg)?;
    let map: Vec<usize> = (0..2 * n).map(|v| v % n).collect();
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for c in &comps {
            out.push(c.derivative(i).truncated(order).remap(&map, n));
        }
    }
    Ok(out)
}

/// `∇^ϖ` from `g_{lk} Γ^l_{ij} = ∂_{u_i} ϖ_{j|k}` on the diagonal (coordinate frame).
pub fn induced_connection(w: &ContrastBiForm) -> Connection {
    let form = w.form.clone();
    let n = form.dim();
    let chart = form.manifold().clone();
    let field = MultiField::from_base_jets(&chart, n * n * n, move |m, order, cfg| {
        let map: Vec<usize> = (0..2 * n).map(|v| v % n).collect();
        let g: Vec<Jet> = form.eval(m, m, order, cfg)?.iter().map(|j| j.remap(&map, n)).collect();
        let inv = jet_inverse(&g, n).map_err(|condition| Error::Singular { coords: m.to_vec(), condition })?;
        let a = left_slot_derivatives(&form, m, order, cfg)?;
        let mut out = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Jet::constant(0.0);
                    for k in 0..n {
                        acc += &(&inv[l * n + k] * &a[(i * n + j) * n + k]);
                    }
                    out.push(acc);
                }
            }
        }
        Ok(out)
    });
    Connection::from_field(field).expect("n^3 components")
}

/// `(ι^*(s^*ϖ), ∇^{s^*ϖ})`.
pub fn dual_structure(w: &ContrastBiForm) -> (MetricField, Connection) {
    let s = w.swap();
    (induced_metric(&s), induced_connection(&s))
}

/// Torsion type of the pair `(∇^ϖ, ∇^{s^*ϖ})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructureClass {
    /// Both connections torsion-free.
    Statistical,
    /// Primal torsion-free, dual torsionful.
    Smat,
    /// Dual torsion-free, primal torsionful.
    DualSmat,
    /// Both torsionful.
    Lauritzen,
}

impl StructureClass {
    pub fn from_residuals(left: f64, right: f64, tol: f64) -> Self {
        match (left < tol, right < tol) {
            (true, true) => StructureClass::Statistical,
            (true, false) => StructureClass::Smat,
            (false, true) => StructureClass::DualSmat,
            (false, false) => StructureClass::Lauritzen,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StructureClass::Statistical => "STATISTICAL",
            StructureClass::Smat => "SMAT",
            StructureClass::DualSmat => "DUAL_SMAT",
            StructureClass::Lauritzen => "LAURITZEN",
        }
    }
}

impl fmt::Display for StructureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of [`classify`] with the raw residuals behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub class: StructureClass,
    /// `max |ι^* d^L ϖ|` over the probes.
    pub left_residual: f64,
    /// `max |ι^* d^R ϖ|` over the probes.
    pub right_residual: f64,
    /// `max |ι^* d^L ϖ − lowered torsion of ∇^ϖ|`.
    pub left_identity_residual: f64,
    /// `max |ι^* d^R ϖ − lowered torsion of ∇^{s^*ϖ}|` with slots matched.
    pub right_identity_residual: f64,
    pub tolerance: f64,
}

/// Per-point torsion diagnostics: pullback residuals and their agreement with the lowered
/// torsion of the induced connections.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TorsionDiagnostics {
    pub left: f64,
    pub right: f64,
    pub left_identity: f64,
    pub right_identity: f64,
}

/// Lowered torsion `T_{ijk} = g_{lk}(Γ^l_{ij} − Γ^l_{ji})` at a point.
pub fn lowered_torsion_at(g: &[f64], gamma: &[f64], n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += g[l * n + k]
                        * (gamma[Connection::index(n, l, i, j)] - gamma[Connection::index(n, l, j, i)]);
                }
                out.push(acc);
            }
        }
    }
    out
}

/// Torsion diagnostics of `ϖ` at one point.
pub fn torsion_diagnostics(w: &ContrastBiForm, p: &Point, cfg: &JetConfig) -> Result<TorsionDiagnostics> {
    let n = w.dim();
    let dl = w.form.left_differential()?.diagonal_pullback().components_at(p, cfg)?;
    let dr = w.form.right_differential()?.diagonal_pullback().components_at(p, cfg)?;
    let g = w.form.components(p, p, cfg)?;
    let gamma = induced_connection(w).values_at(p, cfg)?;
    let gt: Vec<f64> = (0..n * n).map(|c| g[(c % n) * n + c / n]).collect();
    let dual = induced_connection(&w.swap()).values_at(p, cfg)?;
    let t = lowered_torsion_at(&g, &gamma, n);
    // the dual connection is extracted against the transposed pullback
    let td = lowered_torsion_at(&gt, &dual, n);
    let c1 = tuple_count(n, 1);
    let mut d = TorsionDiagnostics::default();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let left = dl[tuple_index(n, &[i, j]) * c1 + k];
                d.left = d.left.max(left.abs());
                d.left_identity = d.left_identity.max((left - t[(i * n + j) * n + k]).abs());
                let right = dr[k * tuple_count(n, 2) + tuple_index(n, &[i, j])];
                d.right = d.right.max(right.abs());
                d.right_identity = d.right_identity.max((right - td[(i * n + j) * n + k]).abs());
            }
        }
    }
    Ok(d)
}

/// Classifies `(g^ϖ, ∇^ϖ, ∇^{s^*ϖ})` from the diagonal pullbacks of `d^Lϖ` and `d^Rϖ`.
pub fn classify(w: &ContrastBiForm, probes: &[Point], tol: f64, cfg: &JetConfig) -> Result<Classification> {
    let mut agg = TorsionDiagnostics::default();
    for p in probes {
        let d = torsion_diagnostics(w, p, cfg)?;
        agg.left = agg.left.max(d.left);
        agg.right = agg.right.max(d.right);
        agg.left_identity = agg.left_identity.max(d.left_identity);
        agg.right_identity = agg.right_identity.max(d.right_identity);
    }
    Ok(Classification {
        class: StructureClass::from_residuals(agg.left, agg.right, tol),
        left_residual: agg.left,
        right_residual: agg.right,
        left_identity_residual: agg.left_identity,
        right_identity_residual: agg.right_identity,
        tolerance: tol,
    })
}

/// Largest conjugacy residual between `∇^ϖ` and `∇^{s^*ϖ}` through `g^ϖ` over the probes.
pub fn duality_residual(w: &ContrastBiForm, probes: &[Point], cfg: &JetConfig) -> Result<f64> {
    let g = induced_metric(w);
    let (conn, dual) = (induced_connection(w), dual_structure(w).1);
    let mut worst: f64 = 0.0;
    for p in probes {
        worst = worst.max(conjugacy_residual(&g, &conn, &dual, p, cfg)?);
    }
    Ok(worst)
}
