//! Leibniz-rule commutators of fractional derivatives, their adjoint and
//! double-commutator forms, and singular-integral quadratures used as
//! independent checks and in estimate quotients.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField3};
use crate::norms::{lorentz_norm, lp_norm, LorentzParams};
use crate::spectral::{frac_laplacian, frac_laplacian_vec};

/// H_{D^s}(f,g) = D^s(fg) - f D^s g - (D^s f) g.
pub fn leibniz(f: &ScalarField, g: &ScalarField, s: f64) -> ScalarField {
    let dfg = frac_laplacian(&(f * g), s);
    let dg = frac_laplacian(g, s);
    let df = frac_laplacian(f, s);
    &(&dfg - &(f * &dg)) - &(&df * g)
}

/// H*(f,g) = f D^σ g - (D^σ f) g - D^σ(fg), the formal adjoint in the second slot:
/// ∫ H*(f,g) h = ∫ g H(f,h).
pub fn adjoint_leibniz(f: &ScalarField, g: &ScalarField, sigma: f64) -> ScalarField {
    let dg = frac_laplacian(g, sigma);
    let df = frac_laplacian(f, sigma);
    let dfg = frac_laplacian(&(f * g), sigma);
    &(&(f * &dg) - &(&df * g)) - &dfg
}

/// D^β H_{D^α}(f,g) - H_{D^α}(D^β f, g) - H_{D^α}(f, D^β g).
pub fn double_commutator(f: &ScalarField, g: &ScalarField, alpha: f64, beta: f64) -> ScalarField {
    let h = leibniz(f, g, alpha);
    let dbf = frac_laplacian(f, beta);
    let dbg = frac_laplacian(g, beta);
    &(&frac_laplacian(&h, beta) - &leibniz(&dbf, g, alpha)) - &leibniz(f, &dbg, alpha)
}

/// Σ_i H_{D^s}(aⁱ, bⁱ).
pub fn leibniz_dot(a: &VectorField3, b: &VectorField3, s: f64) -> ScalarField {
    let [a0, a1, a2] = a.comps();
    let [b0, b1, b2] = b.comps();
    &(&leibniz(a0, b0, s) + &leibniz(a1, b1, s)) + &leibniz(a2, b2, s)
}

/// H_{D^s}(a∧, b) = D^s(a∧b) - a∧D^s b - D^s a∧b.
pub fn leibniz_cross(a: &VectorField3, b: &VectorField3, s: f64) -> VectorField3 {
    let d_ab = frac_laplacian_vec(&a.cross(b), s);
    let a_db = a.cross(&frac_laplacian_vec(b, s));
    let da_b = frac_laplacian_vec(a, s).cross(b);
    &(&d_ab - &a_db) - &da_b
}

/// [D^s, a∧](b) = D^s(a∧b) - a∧D^s b.
pub fn commutator_cross(a: &VectorField3, b: &VectorField3, s: f64) -> VectorField3 {
    &frac_laplacian_vec(&a.cross(b), s) - &a.cross(&frac_laplacian_vec(b, s))
}

const ZETA_A: [f64; 12] = [
    12.0,
    -720.0,
    30240.0,
    -1209600.0,
    47900160.0,
    -1.8924375803183791606e9,
    7.47242496e10,
    -2.950130727918164224e12,
    1.1646782814350067249e14,
    -4.5979787224074726105e15,
    1.8152105401943546773e17,
    -7.1661652561756670113e18,
];

/// Hurwitz zeta ζ(x, q) = Σ_{n≥0} (n+q)^{-x} for x > 1, q > 0 (Euler–Maclaurin).
pub fn hurwitz_zeta(x: f64, q: f64) -> f64 {
    assert!(x > 1.0 && q > 0.0, "hurwitz_zeta needs x > 1 and q > 0");
    let eps = f64::EPSILON / 2.0;
    let mut s = q.powf(-x);
    let mut a = q;
    let mut b = 0.0;
    let mut i = 0;
    while i < 9 || a <= 9.0 {
        i += 1;
        a += 1.0;
        b = a.powf(-x);
        s += b;
        if (b / s).abs() < eps {
            return s;
        }
    }
    let w = a;
    s += b * w / (x - 1.0);
    s -= 0.5 * b;
    let mut a = 1.0;
    let mut k = 0.0;
    for coef in ZETA_A {
        a *= x + k;
        b /= w;
        let t = a * b / coef;
        s += t;
        if (t / s).abs() < eps {
            break;
        }
        k += 1.0;
        a *= x + k;
        b /= w;
        k += 1.0;
    }
    s
}

/// Σ_n |h + nL|^{-1-s} for h ∈ (0, L).
pub fn periodic_kernel(h: f64, l: f64, s: f64) -> f64 {
    let y = h / l;
    l.powf(-1.0 - s) * (hurwitz_zeta(1.0 + s, y) + hurwitz_zeta(1.0 + s, 1.0 - y))
}

/// How the pair of difference factors is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Offsets y = x ± h summed in symmetric pairs; valid for s ∈ (0,2).
    SymmetricSecondDifference,
    /// Each offset y summed once; valid for s ∈ (0,1).
    FirstDifference,
}

/// Quadrature settings for the singular-integral form of H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadratureConfig {
    pub mode: KernelMode,
    /// Largest offset kept, as a fraction of the box length, in (0, 1/2].
    pub truncation: f64,
    /// Offsets closer than this many cells are skipped; at least 1.
    pub inner_cutoff_cells: f64,
}

impl Default for KernelQuadratureConfig {
    fn default() -> Self {
        Self { mode: KernelMode::SymmetricSecondDifference, truncation: 0.5, inner_cutoff_cells: 1.0 }
    }
}

/// Quadrature field rescaled by the fitted constant.
#[derive(Debug, Clone)]
pub struct OracleFit {
    pub field: ScalarField,
    /// None when the quadrature vanishes and no fit is possible.
    pub c: Option<f64>,
    /// ‖c·Q - H‖₂ / ‖H‖₂.
    pub residual: f64,
}

/// Diameter of the smallest periodic arc containing {|f| > 1e-12·max|f|}.
fn support_diameter(f: &ScalarField) -> f64 {
    let m = f.max_abs();
    let n = f.values().len();
    let dx = f.grid().spacing(0);
    if m == 0.0 {
        return 0.0;
    }
    let inside: Vec<bool> = f.values().iter().map(|v| v.abs() > 1e-12 * m).collect();
    // Longest run of outside points, cyclically.
    let mut best = 0;
    let mut run = 0;
    for i in 0..2 * n {
        if inside[i % n] {
            run = 0;
        } else {
            run += 1;
            best = best.max(run.min(n));
        }
    }
    (n - best) as f64 * dx
}

/// Un-normalized ∫ (f(x)-f(y))(g(x)-g(y)) K(x-y) dy with the periodized kernel
/// |x-y|^{-1-s}, by the punctured midpoint rule.
pub fn kernel_quadrature(f: &ScalarField, g: &ScalarField, s: f64, cfg: &KernelQuadratureConfig) -> Result<ScalarField> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let (lo, hi) = match cfg.mode {
        KernelMode::SymmetricSecondDifference => (0.0, 2.0),
        KernelMode::FirstDifference => (0.0, 1.0),
    };
    if !(s > lo && s < hi) {
        return Err(Error::ParameterOutOfRange(format!("order s = {s} outside ({lo}, {hi}) for {:?}", cfg.mode)));
    }
    if !(cfg.truncation > 0.0 && cfg.truncation <= 0.5) {
        return Err(Error::ParameterOutOfRange(format!("truncation {} outside (0, 1/2]", cfg.truncation)));
    }
    if cfg.inner_cutoff_cells < 1.0 {
        return Err(Error::ParameterOutOfRange("inner cutoff below one cell".into()));
    }
    let n = grid.len();
    let l = grid.lengths()[0];
    let dx = grid.spacing(0);
    let fv = f.values();
    let gv = g.values();
    // Offsets j with their weights; j and n-j carry the same kernel value.
    let offsets: Vec<(usize, f64)> = (1..n)
        .filter_map(|j| {
            let r = j.min(n - j) as f64;
            let keep = r >= cfg.inner_cutoff_cells && r * dx <= cfg.truncation * l + 1e-12 * l;
            keep.then(|| (j, periodic_kernel(j as f64 * dx, l, s) * dx))
        })
        .collect();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| match cfg.mode {
            KernelMode::FirstDifference => offsets
                .iter()
                .map(|&(j, w)| {
                    let y = (i + j) % n;
                    (fv[i] - fv[y]) * (gv[i] - gv[y]) * w
                })
                .sum(),
            KernelMode::SymmetricSecondDifference => offsets
                .iter()
                .filter(|&&(j, _)| 2 * j <= n)
                .map(|&(j, w)| {
                    let yp = (i + j) % n;
                    let ym = (i + n - j) % n;
                    let pair = (fv[i] - fv[yp]) * (gv[i] - gv[yp]) + (fv[i] - fv[ym]) * (gv[i] - gv[ym]);
                    // The self-paired offset j = n/2 appears once in the full sum.
                    if 2 * j == n {
                        0.5 * pair * w
                    } else {
                        pair * w
                    }
                })
                .sum(),
        })
        .collect();
    Ok(ScalarField::from_raw(grid.clone(), values))
}

/// Fits H_{D^s}(f,g) ≈ c·Q with Q the kernel quadrature, for compactly
/// supported data on a large box (support diameter ≤ L/8).
pub fn leibniz_oracle(f: &ScalarField, g: &ScalarField, s: f64, cfg: &KernelQuadratureConfig) -> Result<OracleFit> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let limit = grid.lengths()[0] / 8.0 + grid.spacing(0);
    for h in [f, g] {
        let diameter = support_diameter(h);
        if diameter > limit {
            return Err(Error::SupportTooWide { diameter, limit });
        }
    }
    let q = kernel_quadrature(f, g, s, cfg)?;
    let h = leibniz(f, g, s);
    let qq = q.inner(&q);
    if qq == 0.0 {
        return Ok(OracleFit { field: q, c: None, residual: 0.0 });
    }
    let c = q.inner(&h) / qq;
    let field = q.scale(c);
    let hn = h.inner(&h).sqrt();
    let residual = if hn == 0.0 { 0.0 } else { (&field - &h).inner(&(&field - &h)).sqrt() / hn };
    Ok(OracleFit { field, c: Some(c), residual })
}

/// Which difference kernel a quotient integrates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelVariant {
    /// |Δf||Δg| / |x-y|^{1+s}.
    TwoDifferences { s: f64 },
    /// |Δf||Δg||Δh| / |x-y|².
    ThreeDifferences,
    /// |Δf||Δg||h(y)| / |x-y|².
    TwoDifferencesTimesH,
}

/// ∫ over the torus of the chosen difference kernel, using the minimal-image
/// distance and skipping y = x. One-dimensional grids only.
pub fn triple_kernel_value(f: &ScalarField, g: &ScalarField, h: &ScalarField, variant: KernelVariant) -> Result<ScalarField> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let n = grid.len();
    let dx = grid.spacing(0);
    let expo = match variant {
        KernelVariant::TwoDifferences { s } => 1.0 + s,
        _ => 2.0,
    };
    let weights: Vec<f64> = (0..n)
        .map(|j| if j == 0 { 0.0 } else { dx * ((j.min(n - j) as f64) * dx).powf(-expo) })
        .collect();
    let (fv, gv, hv) = (f.values(), g.values(), h.values());
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            (1..n)
                .map(|j| {
                    let y = (i + j) % n;
                    let two = (fv[i] - fv[y]).abs() * (gv[i] - gv[y]).abs();
                    let third = match variant {
                        KernelVariant::TwoDifferences { .. } => 1.0,
                        KernelVariant::ThreeDifferences => (hv[i] - hv[y]).abs(),
                        KernelVariant::TwoDifferencesTimesH => hv[y].abs(),
                    };
                    two * third * weights[j]
                })
                .sum()
        })
        .collect();
    Ok(ScalarField::from_raw(grid.clone(), values))
}

fn out_of_range(msg: String) -> Error {
    Error::ParameterOutOfRange(msg)
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn require_dim_at_least(f: &ScalarField, d: usize) -> Result<usize> {
    let dim = f.grid().dim();
    if dim < d {
        return Err(out_of_range(format!("estimate needs d >= {d}, got {dim}")));
    }
    Ok(dim)
}

fn open_exponent(name: &str, p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(out_of_range(format!("{name} = {p} outside (1, ∞)")))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// ‖D¹H_{D¹}(f,g)‖_{L^d} / (‖D¹f‖_{L^{2d}} ‖D¹g‖_{L^{2d}}), d ≥ 2.
pub fn leibniz_derivative_quotient(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    let d = require_dim_at_least(f, 2)? as f64;
    let lhs = lp_norm(&frac_laplacian(&leibniz(f, g, 1.0), 1.0), d);
    let rhs = lp_norm(&frac_laplacian(f, 1.0), 2.0 * d) * lp_norm(&frac_laplacian(g, 1.0), 2.0 * d);
    Ok(ratio(lhs, rhs))
}

/// ‖H_{D¹}(f,g)‖_∞ / (‖D¹f‖_{L^{(2d,2)}} ‖D¹g‖_{L^{(2d,2)}}), d ≥ 2.
pub fn leibniz_sup_quotient(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    let d = require_dim_at_least(f, 2)? as f64;
    let lp = LorentzParams::finite(2.0 * d, 2.0)?;
    let lhs = lp_norm(&leibniz(f, g, 1.0), f64::INFINITY);
    let rhs = lorentz_norm(&frac_laplacian(f, 1.0), lp) * lorentz_norm(&frac_laplacian(g, 1.0), lp);
    Ok(ratio(lhs, rhs))
}

/// ‖H_{D¹}(f,g)‖_{L^{2d/(d-1)}} / (‖D¹f‖_{L²} ‖D¹g‖_{L^{2d}}), d ≥ 2.
pub fn leibniz_mixed_quotient(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    let d = require_dim_at_least(f, 2)? as f64;
    let lhs = lp_norm(&leibniz(f, g, 1.0), 2.0 * d / (d - 1.0));
    let rhs = lp_norm(&frac_laplacian(f, 1.0), 2.0) * lp_norm(&frac_laplacian(g, 1.0), 2.0 * d);
    Ok(ratio(lhs, rhs))
}

/// Exponents of the fractional Leibniz bound
/// ‖H_{D^α}(f,g)‖_p ≲ ‖D^σ f‖_{p1} ‖D^{α-σ} g‖_{p2}, 1/p = 1/p1 + 1/p2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracLeibnizParams {
    pub alpha: f64,
    pub sigma: f64,
    pub p1: f64,
    pub p2: f64,
}

impl FracLeibnizParams {
    pub fn target_exponent(&self) -> f64 {
        1.0 / (1.0 / self.p1 + 1.0 / self.p2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(out_of_range(format!("α = {} outside (0, 1]", self.alpha)));
        }
        if !(self.sigma > 0.0 && self.sigma < self.alpha) {
            return Err(out_of_range(format!("σ = {} outside (0, α)", self.sigma)));
        }
        open_exponent("p1", self.p1)?;
        open_exponent("p2", self.p2)?;
        open_exponent("p", self.target_exponent())
    }
}

pub fn leibniz_fractional_quotient(f: &ScalarField, g: &ScalarField, prm: &FracLeibnizParams) -> Result<f64> {
    prm.validate()?;
    let lhs = lp_norm(&leibniz(f, g, prm.alpha), prm.target_exponent());
    let rhs = lp_norm(&frac_laplacian(f, prm.sigma), prm.p1) * lp_norm(&frac_laplacian(g, prm.alpha - prm.sigma), prm.p2);
    Ok(ratio(lhs, rhs))
}

/// ‖∫|Δf||Δg|/|x-y|^{d+s}‖_p ≲ ‖D^{α1}f‖_{p1} ‖D^{α2}g‖_{p2}
/// with α1 + α2 = s ≤ 1, p_i ≥ 2, 1/p1 + 1/p2 = 1/p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKernelParams {
    pub s: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub p1: f64,
    pub p2: f64,
    pub p: f64,
}

impl PairKernelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(out_of_range(format!("s = {} outside (0, 1]", self.s)));
        }
        for a in [self.alpha1, self.alpha2] {
            if !(a > 0.0 && a < self.s) {
                return Err(out_of_range(format!("order {a} outside (0, s)")));
            }
        }
        if !close(self.alpha1 + self.alpha2, self.s) {
            return Err(out_of_range("orders must sum to s".into()));
        }
        open_exponent("p", self.p)?;
        if !(self.p1 >= 2.0 && self.p2 >= 2.0 && self.p1.is_finite() && self.p2.is_finite()) {
            return Err(out_of_range("p1, p2 must lie in [2, ∞)".into()));
        }
        if !close(1.0 / self.p1 + 1.0 / self.p2, 1.0 / self.p) {
            return Err(out_of_range("1/p1 + 1/p2 must equal 1/p".into()));
        }
        Ok(())
    }
}

pub fn pair_kernel_quotient(f: &ScalarField, g: &ScalarField, prm: &PairKernelParams) -> Result<f64> {
    prm.validate()?;
    let k = triple_kernel_value(f, g, f, KernelVariant::TwoDifferences { s: prm.s })?;
    let rhs = lp_norm(&frac_laplacian(f, prm.alpha1), prm.p1) * lp_norm(&frac_laplacian(g, prm.alpha2), prm.p2);
    Ok(ratio(lp_norm(&k, prm.p), rhs))
}

/// ‖∫|Δf||Δg||Δh|/|x-y|^{d+1}‖_p ≲ Π ‖D^{α_i} ·‖_{p_i}
/// with Σα_i = 1, α_i ∈ (0,1), p_i ∈ (p,∞), Σ1/p_i = 1/p, 1/p_i - α_i/d < 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleKernelParams {
    pub alphas: [f64; 3],
    pub ps: [f64; 3],
    pub p: f64,
}

impl TripleKernelParams {
    pub fn validate(&self, d: usize) -> Result<()> {
        open_exponent("p", self.p)?;
        if self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(out_of_range("orders must lie in (0, 1)".into()));
        }
        if !close(self.alphas.iter().sum(), 1.0) {
            return Err(out_of_range("orders must sum to 1".into()));
        }
        if self.ps.iter().any(|q| !(*q > self.p && q.is_finite())) {
            return Err(out_of_range("each p_i must lie in (p, ∞)".into()));
        }
        if !close(self.ps.iter().map(|q| 1.0 / q).sum(), 1.0 / self.p) {
            return Err(out_of_range("Σ 1/p_i must equal 1/p".into()));
        }
        if self.ps.iter().zip(&self.alphas).any(|(q, a)| 1.0 / q - a / d as f64 >= 0.5) {
            return Err(out_of_range("1/p_i - α_i/d must stay below 1/2".into()));
        }
        Ok(())
    }
}

pub fn triple_kernel_quotient(f: &ScalarField, g: &ScalarField, h: &ScalarField, prm: &TripleKernelParams) -> Result<f64> {
    prm.validate(f.grid().dim())?;
    let k = triple_kernel_value(f, g, h, KernelVariant::ThreeDifferences)?;
    let rhs: f64 = [f, g, h]
        .iter()
        .zip(prm.alphas.iter().zip(&prm.ps))
        .map(|(u, (a, q))| lp_norm(&frac_laplacian(u, *a), *q))
        .product();
    Ok(ratio(lp_norm(&k, prm.p), rhs))
}

/// ‖∫|Δf||Δg||h(y)|/|x-y|^{d+1}‖_2 ≲ ‖D^{α1}f‖_{p1} ‖D^{α2}g‖_{p2} ‖h‖_{r},
/// r = d p3 / (d + (α1+α2-1) p3), with α1 + α2 > 1, p_i ∈ (2,∞), Σ1/p_i = 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedKernelParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub ps: [f64; 3],
}

impl WeightedKernelParams {
    pub fn h_exponent(&self, d: usize) -> f64 {
        let d = d as f64;
        d * self.ps[2] / (d + (self.alpha1 + self.alpha2 - 1.0) * self.ps[2])
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        for a in [self.alpha1, self.alpha2] {
            if !(a > 0.0 && a < 1.0) {
                return Err(out_of_range(format!("order {a} outside (0, 1)")));
            }
        }
        let excess = self.alpha1 + self.alpha2 - 1.0;
        if excess <= 0.0 {
            return Err(out_of_range("α1 + α2 must exceed 1".into()));
        }
        if d == 1 && excess >= 0.5 {
            return Err(out_of_range("for d = 1, α1 + α2 - 1 must stay below 1/2".into()));
        }
        if self.ps.iter().any(|q| !(*q > 2.0 && q.is_finite())) {
            return Err(out_of_range("each p_i must lie in (2, ∞)".into()));
        }
        if !close(self.ps.iter().map(|q| 1.0 / q).sum(), 0.5) {
            return Err(out_of_range("Σ 1/p_i must equal 1/2".into()));
        }
        let r = self.h_exponent(d);
        if !(r > 1.0 && r.is_finite()) {
            return Err(out_of_range(format!("weight exponent {r} outside (1, ∞)")));
        }
        Ok(())
    }
}

pub fn weighted_kernel_quotient(f: &ScalarField, g: &ScalarField, h: &ScalarField, prm: &WeightedKernelParams) -> Result<f64> {
    let d = f.grid().dim();
    prm.validate(d)?;
    let k = triple_kernel_value(f, g, h, KernelVariant::TwoDifferencesTimesH)?;
    let rhs = lp_norm(&frac_laplacian(f, prm.alpha1), prm.ps[0])
        * lp_norm(&frac_laplacian(g, prm.alpha2), prm.ps[1])
        * lp_norm(h, prm.h_exponent(d));
    Ok(ratio(lp_norm(&k, 2.0), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid1(n: usize) -> Arc<TorusGrid> {
        Arc::new(TorusGrid::cubic(1, n, 2.0 * PI).unwrap())
    }

    #[test]
    fn leibniz_with_constant_vanishes() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| (x[0]).sin() + 0.2 * (3.0 * x[0]).cos());
        let one = ScalarField::constant(&g, 1.0);
        assert!(leibniz(&f, &one, 0.7).max_abs() < 1e-12);
    }

    #[test]
    fn leibniz_cos_cos_is_minus_one() {
        let g = grid1(64);
        let c = ScalarField::from_fn(&g, |x| x[0].cos());
        assert!(leibniz(&c, &c, 1.0).max_diff(&ScalarField::constant(&g, -1.0)) < 1e-10);
    }

    #[test]
    fn adjoint_special_cases() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| (2.0 * x[0]).sin());
        let c = ScalarField::constant(&g, 1.7);
        assert!(adjoint_leibniz(&c, &f, 0.6).max_abs() < 1e-12);
        let one = ScalarField::constant(&g, 1.0);
        let expect = frac_laplacian(&f, 0.6).scale(-2.0);
        assert!(adjoint_leibniz(&f, &one, 0.6).max_diff(&expect) < 1e-12);
    }

    #[test]
    fn zeta_reference_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-13);
        // ζ(4,1) = π⁴/90.
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        // Recurrence ζ(x,q) = q^{-x} + ζ(x,q+1).
        let (x, q) = (1.5, 0.3);
        assert!((hurwitz_zeta(x, q) - q.powf(-x) - hurwitz_zeta(x, q + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn periodic_kernel_matches_direct_sum() {
        let (l, s, h) = (3.0, 0.5, 0.7);
        let direct: f64 = (-200_000..=200_000).map(|n: i64| (h + n as f64 * l).abs().powf(-1.0 - s)).sum();
        // Tail beyond |n| = 2e5 is about 2 ∫ (nL)^{-1.5} dn.
        let tail = 2.0 * 2.0 / (l.powf(1.5) * (200_000f64).sqrt());
        assert!((periodic_kernel(h, l, s) - direct - tail).abs() < 1e-6);
    }

    #[test]
    fn oracle_rejects_wide_support_and_other_dimensions() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| x[0].cos());
        let cfg = KernelQuadratureConfig::default();
        assert!(matches!(leibniz_oracle(&f, &f, 0.5, &cfg), Err(Error::SupportTooWide { .. })));
        let g2 = Arc::new(TorusGrid::cubic(2, 8, 1.0).unwrap());
        let z = ScalarField::zeros(&g2);
        assert!(matches!(leibniz_oracle(&z, &z, 0.5, &cfg), Err(Error::UnsupportedDimension(2))));
    }

    #[test]
    fn oracle_on_zero_skips_fit() {
        let g = grid1(64);
        let z = ScalarField::zeros(&g);
        let fit = leibniz_oracle(&z, &z, 0.5, &KernelQuadratureConfig::default()).unwrap();
        assert!(fit.c.is_none());
        assert_eq!(fit.residual, 0.0);
        assert_eq!(fit.field.max_abs(), 0.0);
    }

    #[test]
    fn quadrature_modes_agree() {
        let g = grid1(128);
        let f = ScalarField::from_fn(&g, |x| (x[0]).sin());
        let h = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos());
        let sym = kernel_quadrature(&f, &h, 0.5, &KernelQuadratureConfig::default()).unwrap();
        let cfg = KernelQuadratureConfig { mode: KernelMode::FirstDifference, ..Default::default() };
        let first = kernel_quadrature(&f, &h, 0.5, &cfg).unwrap();
        assert!(sym.max_diff(&first) < 1e-12 * sym.max_abs());
        assert!(kernel_quadrature(&f, &h, 1.5, &cfg).is_err());
    }

    #[test]
    fn kernel_value_scaling_and_constants() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        let h = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos());
        let c = ScalarField::constant(&g, 3.0);
        let k = triple_kernel_value(&c, &f, &h, KernelVariant::ThreeDifferences).unwrap();
        assert_eq!(k.max_abs(), 0.0);
        let base = triple_kernel_value(&f, &h, &f, KernelVariant::ThreeDifferences).unwrap();
        let doubled =
            triple_kernel_value(&f.scale(2.0), &h.scale(2.0), &f.scale(2.0), KernelVariant::ThreeDifferences).unwrap();
        assert_eq!(doubled, base.scale(8.0));
    }

    #[test]
    fn estimate_parameters_are_checked() {
        let g = grid1(32);
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        assert!(leibniz_derivative_quotient(&f, &f).is_err());
        let bad = FracLeibnizParams { alpha: 1.0, sigma: 1.0, p1: 4.0, p2: 4.0 };
        assert!(leibniz_fractional_quotient(&f, &f, &bad).is_err());
        let bad = TripleKernelParams { alphas: [0.5, 0.3, 0.3], ps: [6.0; 3], p: 2.0 };
        assert!(triple_kernel_quotient(&f, &f, &f, &bad).is_err());
        let bad = WeightedKernelParams { alpha1: 0.4, alpha2: 0.5, ps: [6.0; 3] };
        assert!(weighted_kernel_quotient(&f, &f, &f, &bad).is_err());
    }
}
