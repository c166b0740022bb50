//! Faithful `d`-level quantum states in the affine chart `ρ(θ) = I/d + Σ θ^i A_i`, their
//! monotone metrics, and the von Neumann–Umegaki relative entropy as a contrast function.
//!
//! Jets of spectral functions are expanded around the spectrum of `ρ(θ_0)`: in its
//! eigenbasis, `φ(ρ_0 + E)` is a sum over index paths of divided differences of `φ` times
//! products of entries of `E`, and the superoperator `K^f` uses the two-variable version
//! with the kernel `1 / m_f`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::biform::BiForm;
use crate::error::{Error, Result};
use crate::field::{Connection, JetConfig, MetricField, MultiField};
use crate::geometry::{conjugate_connection, lower_torsion, torsion_tensor};
use crate::jet::{common_order, Jet};
use crate::manifold::{ChartManifold, Point};
use crate::monotone::{divided_difference, Ln, MonotoneFunction};
use crate::potentials::{ContrastBiForm, PreContrastBiForm};
use crate::teleparallel::{canonical_biform, gradient_frame, Coframe};

pub type CMatrix = DMatrix<Complex64>;

/// Smallest eigenvalue accepted in the chart domain.
pub const POSITIVITY_FLOOR: f64 = 1e-6;

/// Half-width of the coordinate box used to sample probe points. Any `θ` in the box
/// (after the sampling margin) keeps the smallest eigenvalue above roughly `0.19 / d`.
pub fn sampling_half_width(d: usize) -> f64 {
    let d = d as f64;
    0.9 / (d * (d * d - 1.0).sqrt())
}

/// Traceless Hermitian matrices with `Tr(A_i A_j) = δ_ij` (generalized Gell-Mann order:
/// symmetric then antisymmetric off-diagonal pairs, then diagonal ones).
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    d: usize,
    mats: Vec<CMatrix>,
}

impl HermitianBasis {
    pub fn gell_mann(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Config(format!("state dimension must be at least 2, got {d}")));
        }
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut mats = Vec::with_capacity(d * d - 1);
        for j in 0..d {
            for k in (j + 1)..d {
                let mut sym = CMatrix::zeros(d, d);
                sym[(j, k)] = Complex64::new(s, 0.0);
                sym[(k, j)] = Complex64::new(s, 0.0);
                mats.push(sym);
                let mut anti = CMatrix::zeros(d, d);
                anti[(j, k)] = Complex64::new(0.0, -s);
                anti[(k, j)] = Complex64::new(0.0, s);
                mats.push(anti);
            }
        }
        for l in 1..d {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = CMatrix::zeros(d, d);
            for m in 0..l {
                diag[(m, m)] = Complex64::new(norm, 0.0);
            }
            diag[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            mats.push(diag);
        }
        Ok(HermitianBasis { d, mats })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrix(&self, i: usize) -> &CMatrix {
        &self.mats[i]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }

    /// `max |Tr(A_i A_j) − δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.mats.iter().enumerate() {
            for (j, b) in self.mats.iter().enumerate() {
                let t = (a * b).trace();
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((t - Complex64::new(e, 0.0)).norm());
            }
        }
        worst
    }

    /// `max |Tr A_i|`.
    pub fn trace_residual(&self) -> f64 {
        self.mats.iter().map(|a| a.trace().norm()).fold(0.0, f64::max)
    }

    /// `max ‖A_i − A_i^†‖`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.mats.iter().map(|a| (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
    }

    /// `I/d + Σ θ^i A_i`.
    pub fn density(&self, theta: &[f64]) -> CMatrix {
        let mut rho = CMatrix::identity(self.d, self.d) * Complex64::new(1.0 / self.d as f64, 0.0);
        for (t, a) in theta.iter().zip(&self.mats) {
            rho += a * Complex64::new(*t, 0.0);
        }
        rho
    }
}

/// Eigenvalues (ascending order not guaranteed) and eigenvectors of a Hermitian matrix.
fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = m.clone().symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `K^f_ρ` in the eigenbasis of `ρ`: `K(a)_{ij} = a_{ij} / m_f(λ_i, λ_j)`.
#[derive(Clone, Debug)]
pub struct Superoperator {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    f: MonotoneFunction,
}

impl Superoperator {
    pub fn new(rho: &CMatrix, f: MonotoneFunction) -> Result<Self> {
        let (eigenvalues, eigenvectors) = hermitian_eigen(rho);
        if let Some(bad) = eigenvalues.iter().find(|l| !(**l > 0.0)) {
            return Err(Error::Eigen(format!("non-positive eigenvalue {bad:e}")));
        }
        Ok(Superoperator { eigenvalues, eigenvectors, f })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        let u = &self.eigenvectors;
        let mut t = u.adjoint() * a * u;
        let d = self.eigenvalues.len();
        for i in 0..d {
            for j in 0..d {
                t[(i, j)] /= self.f.mean(self.eigenvalues[i], self.eigenvalues[j]);
            }
        }
        u * t * u.adjoint()
    }
}

/// A complex number with jet real and imaginary parts.
#[derive(Clone, Debug)]
struct CJet {
    re: Jet,
    im: Jet,
}

impl CJet {
    fn constant(z: Complex64) -> Self {
        CJet { re: Jet::constant(z.re), im: Jet::constant(z.im) }
    }

    fn mul(&self, o: &CJet) -> CJet {
        CJet {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    fn scale(&self, c: f64) -> CJet {
        CJet { re: &self.re * c, im: &self.im * c }
    }

    fn add_assign(&mut self, o: &CJet) {
        self.re += &o.re;
        self.im += &o.im;
    }

    /// `Re(c · self)`.
    fn re_times(&self, c: Complex64) -> Jet {
        &(&self.re * c.re) - &(&self.im * c.im)
    }
}

/// `U^† A U`.
fn rotate(a: &CMatrix, u: &CMatrix) -> CMatrix {
    u.adjoint() * a * u
}

/// `Ẽ = Σ_s (U^† A_s U) δ_s` entrywise, row-major.
fn perturbation(rotated: &[CMatrix], deltas: &[Jet], d: usize) -> Vec<CJet> {
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut re = Jet::constant(0.0);
            let mut im = Jet::constant(0.0);
            for (m, dl) in rotated.iter().zip(deltas) {
                let z = m[(a, b)];
                if z.re != 0.0 {
                    re += &(dl * z.re);
                }
                if z.im != 0.0 {
                    im += &(dl * z.im);
                }
            }
            out.push(CJet { re, im });
        }
    }
    out
}

/// All index chains `k_0 … k_n` for `n ≤ order` with the products `Ẽ_{k0k1} ⋯ Ẽ_{k_{n−1}k_n}`.
fn chains(e: &[CJet], d: usize, order: usize) -> Vec<(Vec<usize>, CJet)> {
    let mut out: Vec<(Vec<usize>, CJet)> = (0..d).map(|k| (vec![k], CJet::constant(Complex64::new(1.0, 0.0)))).collect();
    let mut frontier = out.clone();
    for _ in 0..order {
        let mut next = Vec::with_capacity(frontier.len() * d);
        for (c, p) in &frontier {
            let last = *c.last().expect("non-empty chain");
            for k in 0..d {
                let mut c2 = c.clone();
                c2.push(k);
                next.push((c2, p.mul(&e[last * d + k])));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Jets of `φ(ρ_0 + E)` in the eigenbasis of `ρ_0`, row-major.
fn spectral_function_jets(eig: &[f64], e: &[CJet], d: usize, order: usize) -> Vec<CJet> {
    let mut out: Vec<CJet> = (0..d * d).map(|_| CJet::constant(Complex64::new(0.0, 0.0))).collect();
    let mut memo: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (c, p) in chains(e, d, order) {
        let mut key = c.clone();
        key.sort_unstable();
        let dd = *memo.entry(key).or_insert_with(|| {
            let mut nodes: Vec<f64> = c.iter().map(|&k| eig[k]).collect();
            divided_difference(&Ln, &mut nodes)
        });
        let (a, b) = (c[0], *c.last().expect("non-empty chain"));
        out[a * d + b].add_assign(&p.scale(dd));
    }
    out
}

fn displacements(x: &[Jet], order: usize) -> Vec<Jet> {
    x.iter().map(|j| j.nilpotent_part().truncated(order)).collect()
}

/// Monotone metric jets `g_ij = Re Tr(A_i K^f_ρ(A_j))` at jet coordinates.
fn metric_jets(basis: &HermitianBasis, f: MonotoneFunction, x: &[Jet]) -> Result<Vec<Jet>> {
    let d = basis.d();
    let n = basis.len();
    let order = common_order(x);
    let theta: Vec<f64> = x.iter().map(Jet::value).collect();
    let rho = basis.density(&theta);
    let (eig, u) = hermitian_eigen(&rho);
    if eig.iter().any(|l| !(*l > POSITIVITY_FLOOR)) {
        return Err(Error::Domain { chart: format!("faithful states (d = {d})"), coords: theta });
    }
    let rotated: Vec<CMatrix> = basis.matrices().iter().map(|a| rotate(a, &u)).collect();
    let e = perturbation(&rotated, &displacements(x, order), d);
    let ch = chains(&e, d, order);
    // S[k0, kn, l0, lm] = Σ h[λ_K; λ_L] P_K P_L over chains with the given endpoints
    let idx = |k0: usize, kn: usize, l0: usize, lm: usize| ((k0 * d + kn) * d + l0) * d + lm;
    let mut s: Vec<Option<CJet>> = vec![None; d * d * d * d];
    let mut memo: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    for (kc, kp) in &ch {
        for (lc, lp) in &ch {
            if kc.len() + lc.len() - 2 > order {
                continue;
            }
            let (mut ks, mut ls) = (kc.clone(), lc.clone());
            ks.sort_unstable();
            ls.sort_unstable();
            let h = *memo.entry((ks, ls)).or_insert_with(|| {
                let xs: Vec<f64> = kc.iter().map(|&k| eig[k]).collect();
                let ys: Vec<f64> = lc.iter().map(|&l| eig[l]).collect();
                f.kernel_divided_difference(&xs, &ys)
            });
            let w = kp.mul(lp).scale(h);
            let slot = &mut s[idx(kc[0], *kc.last().unwrap(), lc[0], *lc.last().unwrap())];
            match slot {
                Some(acc) => acc.add_assign(&w),
                None => *slot = Some(w),
            }
        }
    }
    let mut g: Vec<Jet> = vec![Jet::constant(0.0); n * n];
    for k0 in 0..d {
        for kn in 0..d {
            for l0 in 0..d {
                for lm in 0..d {
                    let Some(w) = &s[idx(k0, kn, l0, lm)] else { continue };
                    for i in 0..n {
                        let ai = rotated[i][(lm, k0)];
                        if ai == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for j in i..n {
                            let c = ai * rotated[j][(kn, l0)];
                            if c == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            g[i * n + j] += &w.re_times(c);
                        }
                    }
                }
            }
        }
    }
    // the expansion is symmetric up to rounding; compute both triangles from i ≤ j
    let mut full: Vec<Jet> = vec![Jet::constant(0.0); n * n];
    for i in 0..n {
        for j in i..n {
            // g_ij from the i ≤ j sweep already pairs A_i on the left, A_j inside K
            full[i * n + j] = g[i * n + j].clone();
            full[j * n + i] = g[i * n + j].clone();
        }
    }
    Ok(full)
}

/// `Tr(ρ_L log ρ_L − ρ_L log ρ_R)` as a jet of the left and right coordinates.
fn vnu_jets(basis: &HermitianBasis, x: &[Jet]) -> Result<Jet> {
    let d = basis.d();
    let n = basis.len();
    let order = common_order(x);
    let coords: Vec<f64> = x.iter().map(Jet::value).collect();
    let deltas = displacements(x, order);
    let (tl, tr) = coords.split_at(n);
    let (rl, rr) = (basis.density(tl), basis.density(tr));
    let (el, ul) = hermitian_eigen(&rl);
    let (er, ur) = hermitian_eigen(&rr);
    for (e, t) in [(&el, tl), (&er, tr)] {
        if e.iter().any(|l| !(*l > POSITIVITY_FLOOR)) {
            return Err(Error::Domain { chart: format!("faithful states (d = {d})"), coords: t.to_vec() });
        }
    }
    // Tr(ρ_L log ρ_L) in the eigenbasis of ρ_L(0)
    let rot_l: Vec<CMatrix> = basis.matrices().iter().map(|a| rotate(a, &ul)).collect();
    let e_l = perturbation(&rot_l, &deltas[..n], d);
    let log_l = spectral_function_jets(&el, &e_l, d, order);
    // Tr(ρ_L log ρ_R) in the eigenbasis of ρ_R(0)
    let rot_r: Vec<CMatrix> = basis.matrices().iter().map(|a| rotate(a, &ur)).collect();
    let e_r = perturbation(&rot_r, &deltas[n..], d);
    let log_r = spectral_function_jets(&er, &e_r, d, order);
    let rho_l_in_r = rotate(&rl, &ur);
    let e_lr = perturbation(&rot_r, &deltas[..n], d);
    let mut acc = Jet::constant(0.0);
    for a in 0..d {
        for b in 0..d {
            // (ρ_L)~_{ab} in each basis, times (log)~_{ba}
            let mut left = e_l[a * d + b].clone();
            if a == b {
                left.re += &Jet::constant(el[a]);
            }
            acc += &left.mul(&log_l[b * d + a]).re;
            let mut cross = e_lr[a * d + b].clone();
            let z = rho_l_in_r[(a, b)];
            cross.re += &Jet::constant(z.re);
            cross.im += &Jet::constant(z.im);
            acc -= &cross.mul(&log_r[b * d + a]).re;
        }
    }
    Ok(acc)
}

fn log_hermitian(m: &CMatrix) -> CMatrix {
    let (eig, u) = hermitian_eigen(m);
    let d = eig.len();
    let mut diag = CMatrix::zeros(d, d);
    for (i, l) in eig.iter().enumerate() {
        diag[(i, i)] = Complex64::new(l.ln(), 0.0);
    }
    &u * diag * u.adjoint()
}

/// Faithful states of a `d`-level system with a chosen monotone metric.
#[derive(Clone, Debug)]
pub struct QuantumStateModel {
    basis: Arc<HermitianBasis>,
    chart: ChartManifold,
    f: MonotoneFunction,
}

/// Builds the model for `d` levels and the monotone function named `f_name`
/// (`BKM`, `SLD` or `WY`).
pub fn build_state_model(d: usize, f_name: &str) -> Result<QuantumStateModel> {
    let f: MonotoneFunction = f_name.parse()?;
    QuantumStateModel::new(d, f)
}

impl QuantumStateModel {
    pub fn new(d: usize, f: MonotoneFunction) -> Result<Self> {
        let basis = Arc::new(HermitianBasis::gell_mann(d)?);
        let n = basis.len();
        let w = sampling_half_width(d);
        let b = basis.clone();
        let chart = ChartManifold::new(format!("faithful states (d = {d})"), vec![-w; n], vec![w; n], move |t| {
            min_eigenvalue(&b.density(t)) > POSITIVITY_FLOOR
        })?;
        Ok(QuantumStateModel { basis, chart, f })
    }

    /// The same states with another monotone function.
    pub fn with_function(&self, f: MonotoneFunction) -> Self {
        QuantumStateModel { basis: self.basis.clone(), chart: self.chart.clone(), f }
    }

    pub fn basis(&self) -> &HermitianBasis {
        &self.basis
    }

    pub fn chart(&self) -> &ChartManifold {
        &self.chart
    }

    pub fn function(&self) -> MonotoneFunction {
        self.f
    }

    pub fn density(&self, p: &Point) -> Result<CMatrix> {
        self.chart.check(p.coords())?;
        Ok(self.basis.density(p.coords()))
    }

    pub fn superoperator(&self, p: &Point) -> Result<Superoperator> {
        Superoperator::new(&self.density(p)?, self.f)
    }

    /// `g_ij(θ) = Re Tr(A_i K^f_{ρ(θ)}(A_j))` from the eigen-formula.
    pub fn monotone_metric_at(&self, p: &Point) -> Result<Vec<f64>> {
        let k = self.superoperator(p)?;
        let n = self.basis.len();
        let images: Vec<CMatrix> = self.basis.matrices().iter().map(|a| k.apply(a)).collect();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = (self.basis.matrix(i) * &images[j]).trace().re;
            }
        }
        Ok(g)
    }

    /// The monotone metric as a jet-capable field.
    pub fn metric(&self) -> MetricField {
        let (basis, f) = (self.basis.clone(), self.f);
        MetricField::new(&self.chart, move |x, _| metric_jets(&basis, f, x))
    }

    /// `Tr(ρ log ρ − ρ log σ)`.
    pub fn vnu_relative_entropy(&self, rho: &Point, sigma: &Point) -> Result<f64> {
        let (r, s) = (self.density(rho)?, self.density(sigma)?);
        Ok(((&r * log_hermitian(&r)) - (&r * log_hermitian(&s))).trace().re)
    }

    /// The relative entropy as a two-point function on the chart.
    pub fn vnu_contrast(&self) -> BiForm {
        let basis = self.basis.clone();
        let field = MultiField::new(&self.chart.square(), 1, move |x, _| Ok(vec![vnu_jets(&basis, x)?]));
        BiForm::from_field(&self.chart, 0, 0, field).expect("scalar bi-form")
    }

    /// The mixture connection: flat in the affine chart.
    pub fn mixture_connection(&self) -> Connection {
        Connection::flat(&self.chart)
    }

    /// The coframe `{d e_{A_i}}` with `e_{A_i}(ρ) = Tr(A_i ρ)`.
    pub fn coordinate_coframe(&self) -> Coframe {
        Coframe::from_matrix(MultiField::constant(&self.chart, self.expectation_jacobian())).expect("square matrix")
    }

    /// `∂ e_{A_i} / ∂θ^j = Re Tr(A_i A_j)`, row-major.
    fn expectation_jacobian(&self) -> Vec<f64> {
        let n = self.basis.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (self.basis.matrix(i) * self.basis.matrix(j)).trace().re;
            }
        }
        out
    }
}

/// `ϖ = Σ_i π_L^*(d e_{A_i}) ⊗ π_R^*(β^i)` for the monotone metric.
pub fn quantum_canonical_biform(model: &QuantumStateModel) -> ContrastBiForm {
    canonical_biform(&model.metric(), &model.coordinate_coframe())
}

/// `S = Σ_i (π_L^* − π_R^*)(e_{A_i}) π_R^*(β^i)`.
pub fn quantum_precontrast(model: &QuantumStateModel) -> PreContrastBiForm {
    let n = model.basis.len();
    let frame = gradient_frame(&model.metric(), &model.coordinate_coframe());
    let beta = frame.beta_matrix().clone();
    let jac = model.expectation_jacobian();
    let offsets: Vec<f64> = model.basis.matrices().iter().map(|a| a.trace().re / model.basis.d() as f64).collect();
    let field = MultiField::new(&model.chart.square(), n, move |x, cfg| {
        let b = beta.eval(&x[n..], cfg)?;
        let e = |t: &[Jet], i: usize| -> Jet {
            let mut acc = Jet::constant(offsets[i]);
            for j in 0..n {
                if jac[i * n + j] != 0.0 {
                    acc += &(&t[j] * jac[i * n + j]);
                }
            }
            acc
        };
        let diffs: Vec<Jet> = (0..n).map(|i| &e(&x[..n], i) - &e(&x[n..], i)).collect();
        Ok((0..n)
            .map(|k| {
                let mut acc = Jet::constant(0.0);
                for i in 0..n {
                    acc += &(&diffs[i] * &b[i * n + k]);
                }
                acc
            })
            .collect())
    });
    PreContrastBiForm::new(BiForm::from_field(&model.chart, 0, 1, field).expect("(0,1) components")).expect("(0,1) degree")
}

/// Largest lowered torsion component of the `g^f`-conjugate of the mixture connection,
/// over the points, for every registry function.
pub fn dual_torsion_profile(d: usize, points: &[Point], cfg: &JetConfig) -> Result<Vec<(MonotoneFunction, f64)>> {
    let base = QuantumStateModel::new(d, MonotoneFunction::Bkm)?;
    let mut rows = Vec::with_capacity(MonotoneFunction::ALL.len());
    for f in MonotoneFunction::ALL {
        let model = base.with_function(f);
        let g = model.metric();
        let dual = conjugate_connection(&g, &model.mixture_connection());
        let t = lower_torsion(&torsion_tensor(&dual), &g);
        let mut worst: f64 = 0.0;
        for p in points {
            model.chart.check(p.coords())?;
            for v in t.values_at(p, cfg)? {
                worst = worst.max(v.abs());
            }
        }
        rows.push((f, worst));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> JetConfig {
        JetConfig::jet()
    }

    #[test]
    fn qubit_basis_is_pauli_over_root_two() {
        let b = HermitianBasis::gell_mann(2).unwrap();
        assert_eq!(b.len(), 3);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(b.matrix(0)[(0, 1)], Complex64::new(s, 0.0));
        assert_eq!(b.matrix(1)[(0, 1)], Complex64::new(0.0, -s));
        assert_abs_diff_eq!(b.matrix(2)[(1, 1)].re, -s, epsilon = 1e-15);
        assert!(b.orthonormality_residual() < 1e-12);
        assert!(b.trace_residual() < 1e-12);
        assert_eq!(b.hermiticity_residual(), 0.0);
        let q = HermitianBasis::gell_mann(3).unwrap();
        assert_eq!(q.len(), 8);
        assert!(q.orthonormality_residual() < 1e-12 && q.trace_residual() < 1e-12);
    }

    #[test]
    fn qubit_domain() {
        let m = build_state_model(2, "BKM").unwrap();
        assert!(m.chart().contains(&[0.0, 0.0, 0.0]));
        assert!(!m.chart().contains(&[0.0, 0.0, core::f64::consts::FRAC_1_SQRT_2]));
        assert!(!m.chart().contains(&[0.6, 0.5, 0.0]));
        assert!(matches!(build_state_model(2, "XYZ"), Err(Error::UnknownMonotoneFunction(_))));
        assert!(matches!(build_state_model(1, "SLD"), Err(Error::Config(_))));
    }

    #[test]
    fn maximally_mixed_metric_is_twice_identity() {
        for f in MonotoneFunction::ALL {
            let m = QuantumStateModel::new(2, f).unwrap();
            let p = Point::new(vec![0.0; 3]);
            let g = m.monotone_metric_at(&p).unwrap();
            let gj = m.metric().values_at(&p, &cfg()).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let e = if i == j { 2.0 } else { 0.0 };
                    assert_abs_diff_eq!(g[i * 3 + j], e, epsilon = 1e-12);
                    assert_abs_diff_eq!(gj[i * 3 + j], e, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn metric_jets_match_differences_of_the_eigen_formula() {
        for f in MonotoneFunction::ALL {
            let m = QuantumStateModel::new(2, f).unwrap();
            let theta = [0.15, -0.1, 0.2];
            let x = Jet::seeds(&theta, 2);
            let g = m.metric().eval(&x, &cfg()).unwrap();
            let h = 1e-3;
            let at = |var: usize, step: f64| {
                let mut t = theta;
                t[var] += step;
                m.monotone_metric_at(&Point::new(t.to_vec())).unwrap()
            };
            for var in 0..3 {
                let (p1, m1, p2, m2) = (at(var, h), at(var, -h), at(var, 2.0 * h), at(var, -2.0 * h));
                for c in 0..9 {
                    // fourth-order central difference
                    let fd = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * h);
                    assert_abs_diff_eq!(g[c].derivative_at(&[var]), fd, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn vnu_spot_value_and_zero() {
        let m = build_state_model(2, "BKM").unwrap();
        let s = 0.2 * core::f64::consts::SQRT_2;
        let (r, q) = (Point::new(vec![0.0, 0.0, s]), Point::new(vec![0.0, 0.0, s / 2.0]));
        let expected = 0.7 * (0.7f64 / 0.6).ln() + 0.3 * (0.3f64 / 0.4).ln();
        assert_abs_diff_eq!(m.vnu_relative_entropy(&r, &q).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(m.vnu_relative_entropy(&r, &r).unwrap(), 0.0, epsilon = 1e-14);
        let jet = m.vnu_contrast().components(&r, &q, &cfg()).unwrap()[0];
        assert_abs_diff_eq!(jet, expected, epsilon = 1e-12);
    }

    #[test]
    fn superoperator_preserves_hermiticity() {
        let m = build_state_model(3, "WY").unwrap();
        let p = Point::new(vec![0.05, -0.02, 0.03, 0.01, -0.04, 0.02, 0.06, -0.01]);
        let k = m.superoperator(&p).unwrap();
        let a = m.basis().matrix(3) + m.basis().matrix(6) * Complex64::new(0.5, 0.0);
        let ka = k.apply(&a);
        let r = (&ka - ka.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(r < 1e-12);
    }
}
