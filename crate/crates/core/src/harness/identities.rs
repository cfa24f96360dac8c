//! Algebraic identities behind the difference-energy estimate, checked on
//! random sphere-valued pairs. Each check assembles both sides separately.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use crate::commutator::{commutator_cross, leibniz, leibniz_cross, leibniz_dot};
use crate::dynamics::{hwm_rhs, waveform_rhs};
use crate::error::Result;
use crate::field::{ScalarField, VectorField3};
use crate::grid::TorusGrid;
use crate::random::{derive_seed, random_sphere_pair, rng_from_seed, BandSpec};
use crate::spectral::{frac_laplacian, frac_laplacian_vec, gradient_energy_density};

const STREAM: u64 = 0x1d;

/// ε_{klm} for indices in 0..3.
pub fn levi_civita(k: usize, l: usize, m: usize) -> f64 {
    let (k, l, m) = (k as i64, l as i64, m as i64);
    ((l - k) * (m - k) * (m - l)) as f64 / 2.0
}

/// det of the 3×3 matrix with columns a, b, c, by the permutation sum.
pub fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                s += levi_civita(k, l, m) * a[k] * b[l] * c[m];
            }
        }
    }
    s
}

/// Everything the checks need about one pair.
pub struct PairData {
    pub u: VectorField3,
    pub v: VectorField3,
    pub w: VectorField3,
    pub du: VectorField3,
    pub dv: VectorField3,
    pub dw: VectorField3,
    pub ut: VectorField3,
    pub vt: VectorField3,
}

impl PairData {
    pub fn new(u: VectorField3, v: VectorField3) -> Self {
        let w = &u - &v;
        Self {
            du: frac_laplacian_vec(&u, 1.0),
            dv: frac_laplacian_vec(&v, 1.0),
            dw: frac_laplacian_vec(&w, 1.0),
            ut: hwm_rhs(&u),
            vt: hwm_rhs(&v),
            u,
            v,
            w,
        }
    }
}

#[derive(Debug, Clone, Copy)]
/// Error of one check on one pair.
pub enum Measure {
    Pointwise(f64),
    Integral(f64),
}

fn pw(a: &VectorField3, b: &VectorField3) -> Measure {
    Measure::Pointwise(a.max_diff(b))
}

fn pw_scalar(a: &ScalarField, b: &ScalarField) -> Measure {
    Measure::Pointwise(a.max_diff(b))
}

/// |a - b| relative to max(|a|, |b|, 1).
fn integral_gap(a: f64, b: f64) -> Measure {
    Measure::Integral((a - b).abs() / a.abs().max(b.abs()).max(1.0))
}

fn det_field(a: &VectorField3, b: &VectorField3, c: &VectorField3) -> ScalarField {
    let vals = (0..a.grid().len()).map(|i| det3(a.at(i), b.at(i), c.at(i))).collect();
    ScalarField::new(a.grid().clone(), vals).expect("finite inputs")
}

fn half_laplacian_sq(x: &VectorField3) -> ScalarField {
    x.dot(x)
}

/// a∧(b∧c) = b(c·a) - c(a·b).
fn triple_product_expansion(p: &PairData) -> Vec<(&'static str, Measure)> {
    let (a, b, c) = (&p.u, &p.v, &p.dw);
    let lhs = a.cross(&b.cross(c));
    let rhs = &b.scale_by(&c.dot(a)) - &c.scale_by(&a.dot(b));
    vec![("fields", pw(&lhs, &rhs))]
}

/// (a∧b)·(c∧d) = (a·c)(b·d) - (a·d)(c·b).
fn cross_inner_product(p: &PairData) -> Vec<(&'static str, Measure)> {
    let (a, b, c, d) = (&p.u, &p.v, &p.du, &p.dv);
    let lhs = a.cross(b).dot(&c.cross(d));
    let rhs = &(&a.dot(c) * &b.dot(d)) - &(&a.dot(d) * &c.dot(b));
    vec![("fields", pw_scalar(&lhs, &rhs))]
}

/// a·(b∧c) = det(a | b | c).
fn scalar_triple_determinant(p: &PairData) -> Vec<(&'static str, Measure)> {
    let lhs = p.u.dot(&p.v.cross(&p.dw));
    let rhs = det_field(&p.u, &p.v, &p.dw);
    vec![("fields", pw_scalar(&lhs, &rhs))]
}

/// ⟨v, ∂_t(u-v)⟩ = -⟨u-v, ∂_t u⟩ for unit-length solutions.
fn orthogonality_trade(p: &PairData) -> Vec<(&'static str, Measure)> {
    let lhs = p.v.dot(&(&p.ut - &p.vt));
    let rhs = -&p.w.dot(&p.ut);
    vec![("fields", pw_scalar(&lhs, &rhs))]
}

/// a(x)·(b(x)-b(y)) = (a(x)-a(y))·(b(x)-b(y)) - (a(x)-a(y))·b(x)
/// with a = u+v, b = u-v, over grid point pairs.
fn discrete_difference_trade(p: &PairData) -> Vec<(&'static str, Measure)> {
    let a = &p.u + &p.v;
    let b = &p.w;
    let n = a.grid().len();
    let stride = (n / 256).max(1);
    let err = (0..n)
        .into_par_iter()
        .map(|x| {
            let (ax, bx) = (a.at(x), b.at(x));
            (0..n)
                .step_by(stride)
                .map(|y| {
                    let (ay, by) = (a.at(y), b.at(y));
                    let db: [f64; 3] = std::array::from_fn(|c| bx[c] - by[c]);
                    let da: [f64; 3] = std::array::from_fn(|c| ax[c] - ay[c]);
                    let lhs: f64 = (0..3).map(|c| ax[c] * db[c]).sum();
                    let rhs: f64 = (0..3).map(|c| da[c] * db[c] - da[c] * bx[c]).sum();
                    (lhs - rhs).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    vec![("point_pairs", Measure::Pointwise(err))]
}

/// ⟨u, D¹u⟩ = -½ Σ_i H_{D¹}(uⁱ, uⁱ) when |u| ≡ 1.
fn constraint_alignment(p: &PairData) -> Vec<(&'static str, Measure)> {
    let check = |x: &VectorField3, dx: &VectorField3| pw_scalar(&x.dot(dx), &leibniz_dot(x, x, 1.0).scale(-0.5));
    vec![("u", check(&p.u, &p.du)), ("v", check(&p.v, &p.dv))]
}

/// Difference of the wave-form right-hand sides as four grouped lines.
fn waveform_difference_split(p: &PairData) -> Vec<(&'static str, Measure)> {
    let lhs = &waveform_rhs(&p.u) - &waveform_rhs(&p.v);
    let line1 = &p.u.scale_by(&gradient_energy_density(&p.u)) - &p.v.scale_by(&gradient_energy_density(&p.v));
    let line2 = &p.v.scale_by(&half_laplacian_sq(&p.dv)) - &p.u.scale_by(&half_laplacian_sq(&p.du));
    let line3 = &p.du.scale_by(&p.u.dot(&p.du)) - &p.dv.scale_by(&p.v.dot(&p.dv));
    let line4 = &p.u.cross(&commutator_cross(&p.u, &p.du, 1.0)) - &p.v.cross(&commutator_cross(&p.v, &p.dv, 1.0));
    let rhs = &(&line1 + &line2) + &(&line3 + &line4);
    vec![("fields", pw(&lhs, &rhs))]
}

/// Periodic kernel of D¹ on a circle of length l: Σ_m 1/(h + m l)².
fn circle_kernel(h: f64, l: f64) -> f64 {
    let s = (PI * h / l).sin();
    (PI / l).powi(2) / (s * s)
}

/// ∫ (a(x)-a(y)) · k(x, y) K(x-y) dy by the punctured trapezoid rule, where the
/// integrand vanishes at y = x.
fn kernel_integral(grid: &Arc<TorusGrid>, a: &[f64], pair: impl Fn(usize, usize) -> f64 + Sync) -> ScalarField {
    let n = grid.len();
    let l = grid.lengths()[0];
    let dx = grid.spacing(0);
    let weights: Vec<f64> = (0..n).map(|j| if j == 0 { 0.0 } else { dx * circle_kernel(j as f64 * dx, l) }).collect();
    let vals = (0..n)
        .into_par_iter()
        .map(|x| (1..n).map(|j| {
            let y = (x + n - j) % n;
            (a[x] - a[y]) * pair(x, y) * weights[j]
        }).sum())
        .collect();
    ScalarField::new(grid.clone(), vals).expect("finite quadrature")
}

/// The six pointwise splittings of the estimate plus their two integral-level
/// companions that substitute the equation for ∂_t(u-v).
fn estimate_splittings(p: &PairData) -> Vec<(&'static str, Measure)> {
    let (u, v, w, du, dv, dw) = (&p.u, &p.v, &p.w, &p.du, &p.dv, &p.dw);
    let mut out = Vec::new();

    // u|D¹u|² - v|D¹v|² = w|D¹u|² + v⟨D¹w, D¹u⟩ + v⟨D¹v, D¹w⟩.
    let lhs = &u.scale_by(&du.dot(du)) - &v.scale_by(&dv.dot(dv));
    let rhs = &(&w.scale_by(&du.dot(du)) + &v.scale_by(&dw.dot(du))) + &v.scale_by(&dv.dot(dw));
    out.push(("half_laplacian_energy_difference", pw(&lhs, &rhs)));

    // D¹u⟨u,D¹u⟩ - D¹v⟨v,D¹v⟩ through H(u·,u).
    let lhs = &du.scale_by(&u.dot(du)) - &dv.scale_by(&v.dot(dv));
    let rhs = &(&dw.scale_by(&leibniz_dot(u, u, 1.0)) + &dv.scale_by(&leibniz_dot(w, u, 1.0)))
        + &dv.scale_by(&leibniz_dot(v, w, 1.0));
    out.push(("alignment_difference", pw(&lhs, &rhs.scale(-0.5))));

    // u∧[D¹,u∧](D¹u) - v∧[D¹,v∧](D¹v).
    let lhs = &u.cross(&commutator_cross(u, du, 1.0)) - &v.cross(&commutator_cross(v, dv, 1.0));
    let rhs = &(&w.cross(&commutator_cross(u, du, 1.0)) + &v.cross(&commutator_cross(w, du, 1.0)))
        + &v.cross(&commutator_cross(v, dw, 1.0));
    out.push(("cross_commutator_difference", pw(&lhs, &rhs)));

    // v∧[D¹,w∧](D¹u) = v∧H(w∧, D¹u) + v∧(D¹w∧D¹u).
    let lhs = v.cross(&commutator_cross(w, du, 1.0));
    let rhs = &v.cross(&leibniz_cross(w, du, 1.0)) + &v.cross(&dw.cross(du));
    out.push(("cross_commutator_to_leibniz", pw(&lhs, &rhs)));

    // (v∧[D¹,v∧](D¹w))ⁱ through scalar commutators, then through H.
    let lhs = v.cross(&commutator_cross(v, dw, 1.0));
    let scalar_comm = |f: &ScalarField, g: &ScalarField| &frac_laplacian(&(f * g), 1.0) - &(f * &frac_laplacian(g, 1.0));
    let mid = VectorField3::new(std::array::from_fn(|i| {
        (0..3).fold(ScalarField::zeros(v.grid()), |acc, j| {
            let a = v.comp(j) * &scalar_comm(v.comp(i), dw.comp(j));
            let b = v.comp(j) * &scalar_comm(v.comp(j), dw.comp(i));
            &acc + &(&a - &b)
        })
    }));
    let expanded = VectorField3::new(std::array::from_fn(|i| {
        (0..3).fold(ScalarField::zeros(v.grid()), |acc, j| {
            let t1 = &(v.comp(j) * dv.comp(i)) * dw.comp(j);
            let t2 = &(v.comp(j) * dv.comp(j)) * dw.comp(i);
            let t3 = v.comp(j) * &leibniz(v.comp(i), dw.comp(j), 1.0);
            let t4 = v.comp(j) * &leibniz(v.comp(j), dw.comp(i), 1.0);
            &acc + &(&(&t1 - &t2) + &(&t3 - &t4))
        })
    }));
    out.push(("projected_commutator_scalar_form", pw(&lhs, &mid)));
    out.push(("projected_commutator_leibniz_form", pw(&lhs, &expanded)));

    // Σ_j uʲ H(wⁱ, D¹uʲ) = H(wⁱ, ⟨u,D¹u⟩) - Σ_j D¹uʲ H(wⁱ, uʲ) - (1/π)∫Δwⁱ⟨ΔD¹u, Δu⟩K.
    if u.grid().dim() == 1 {
        let grid = u.grid().clone();
        let udu = u.dot(du);
        let mut worst = 0.0f64;
        for i in 0..3 {
            let wi = w.comp(i);
            let lhs = (0..3).fold(ScalarField::zeros(&grid), |acc, j| &acc + &(u.comp(j) * &leibniz(wi, du.comp(j), 1.0)));
            let second = (0..3).fold(ScalarField::zeros(&grid), |acc, j| &acc + &(du.comp(j) * &leibniz(wi, u.comp(j), 1.0)));
            let tail = kernel_integral(&grid, wi.values(), |x, y| {
                (0..3).map(|j| (du.comp(j).values()[x] - du.comp(j).values()[y]) * (u.comp(j).values()[x] - u.comp(j).values()[y])).sum()
            });
            let rhs = &(&leibniz(wi, &udu, 1.0) - &second) - &tail.scale(1.0 / PI);
            worst = worst.max(lhs.max_diff(&rhs));
        }
        out.push(("leibniz_kernel_difference", Measure::Pointwise(worst)));
    }

    // Integral level: ∂_t w = w∧D¹u + v∧D¹w inside ∫(v∧(D¹w∧D¹u))·∂_t w.
    let a = v.cross(&dw.cross(du));
    let lhs = a.inner(&(&p.ut - &p.vt));
    let rhs = a.inner(&w.cross(du)) + a.inner(&v.cross(dw));
    out.push(("time_derivative_substitution", integral_gap(lhs, rhs)));

    // Integral level: same substitution against Σ_j vʲ H(vʲ, D¹wⁱ).
    let b = VectorField3::new(std::array::from_fn(|i| {
        (0..3).fold(ScalarField::zeros(v.grid()), |acc, j| &acc + &(v.comp(j) * &leibniz(v.comp(j), dw.comp(i), 1.0)))
    }));
    let lhs = b.inner(&(&p.ut - &p.vt));
    let rhs = b.inner(&w.cross(du)) + b.inner(&v.cross(dw));
    out.push(("leibniz_time_derivative_substitution", integral_gap(lhs, rhs)));
    out
}

/// ∫Σ_{i,j} vʲ H(vʲ, Γⁱ)(v∧Γ)ⁱ with Γ = D¹(u-v), rewritten through determinants
/// down to -½∫Σ ε_{klm} Γᵏ Σ_j vʲ(H(vʲΓˡ, vᵐ) - vʲ H(Γˡ, vᵐ)).
fn determinant_cancellation(p: &PairData) -> Vec<(&'static str, Measure)> {
    let (v, g) = (&p.v, &p.dw);
    let grid = v.grid().clone();
    let a = VectorField3::new(std::array::from_fn(|i| {
        (0..3).fold(ScalarField::zeros(&grid), |acc, j| &acc + &(v.comp(j) * &leibniz(v.comp(j), g.comp(i), 1.0)))
    }));
    let lhs = a.inner(&v.cross(g));
    let mut out = Vec::new();
    out.push(("determinant", integral_gap(lhs, det_field(&a, v, g).integral())));
    let swapped = det_field(&a, g, v).integral();
    out.push(("column_swap", integral_gap(lhs, -swapped)));
    let sym = -0.5 * swapped + 0.5 * det_field(g, &a, v).integral();
    out.push(("symmetrized", integral_gap(lhs, sym)));
    // Dropping the column collinear with Γ and using |v| = 1.
    let dg = frac_laplacian_vec(g, 1.0);
    let b = &VectorField3::new(std::array::from_fn(|i| {
        (0..3).fold(ScalarField::zeros(&grid), |acc, j| &acc + &(v.comp(j) * &frac_laplacian(&(v.comp(j) * g.comp(i)), 1.0)))
    })) - &dg;
    let reduced = -0.5 * det_field(&b, g, v).integral() + 0.5 * det_field(g, &b, v).integral();
    out.push(("collinear_column_removed", integral_gap(lhs, reduced)));
    let mut rhs = ScalarField::zeros(&grid);
    for k in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                let e = levi_civita(k, l, m);
                if e == 0.0 {
                    continue;
                }
                let inner = (0..3).fold(ScalarField::zeros(&grid), |acc, j| {
                    let vj = v.comp(j);
                    let h1 = leibniz(&(vj * g.comp(l)), v.comp(m), 1.0);
                    let h2 = vj * &leibniz(g.comp(l), v.comp(m), 1.0);
                    &acc + &(vj * &(&h1 - &h2))
                });
                rhs = &rhs + &(g.comp(k) * &inner).scale(e);
            }
        }
    }
    out.push(("levi_civita_expansion", integral_gap(lhs, -0.5 * rhs.integral())));
    out
}

/// v·D¹w = -½w·D¹w - ½(D¹(u+v)·w + Σ_i H((u+v)ⁱ, wⁱ)).
fn fractional_orthogonality_trade(p: &PairData) -> Vec<(&'static str, Measure)> {
    let s = &p.u + &p.v;
    let lhs = p.v.dot(&p.dw);
    let inner = &frac_laplacian_vec(&s, 1.0).dot(&p.w) + &leibniz_dot(&s, &p.w, 1.0);
    let rhs = &p.w.dot(&p.dw).scale(-0.5) - &inner.scale(0.5);
    vec![("fields", pw_scalar(&lhs, &rhs))]
}

type Check = fn(&PairData) -> Vec<(&'static str, Measure)>;

/// (id, name, check) for every identity of the suite.
pub const CATALOG: [(&str, &str, Check); 10] = [
    ("a", "triple_product_expansion", triple_product_expansion),
    ("b", "cross_inner_product", cross_inner_product),
    ("c", "scalar_triple_determinant", scalar_triple_determinant),
    ("d", "orthogonality_trade", orthogonality_trade),
    ("e", "discrete_difference_trade", discrete_difference_trade),
    ("f", "constraint_alignment", constraint_alignment),
    ("g", "waveform_difference_split", waveform_difference_split),
    ("h", "estimate_splittings", estimate_splittings),
    ("i", "determinant_cancellation", determinant_cancellation),
    ("j", "fractional_orthogonality_trade", fractional_orthogonality_trade),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityPart {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pointwise_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub name: String,
    pub max_pointwise_error: f64,
    pub integral_error: Option<f64>,
    pub tol_pointwise: f64,
    pub tol_integral: f64,
    pub samples: usize,
    pub pass: bool,
    pub parts: Vec<IdentityPart>,
}

/// Pair number `index` of the suite's seeded family.
pub fn sample_pair(cfg: &RunConfig, grid: &Arc<TorusGrid>, index: usize) -> Result<PairData> {
    let mut rng = rng_from_seed(derive_seed(cfg.seed, STREAM, index as u64));
    let (u, v) = random_sphere_pair(grid, &BandSpec::new(cfg.k_max), cfg.angle_scale, &mut rng)?;
    Ok(PairData::new(u.into_vector(), v.into_vector()))
}

/// Runs every identity on `cfg.samples` seeded pairs and keeps the worst errors.
pub fn run_identities(cfg: &RunConfig) -> Result<Vec<IdentityReport>> {
    let grid = Arc::new(cfg.grid()?);
    let per_sample: Vec<Vec<Vec<(&str, Measure)>>> = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let pair = sample_pair(cfg, &grid, k)?;
            Ok(CATALOG.iter().map(|(_, _, check)| check(&pair)).collect())
        })
        .collect::<Result<_>>()?;
    let reports = CATALOG
        .iter()
        .enumerate()
        .map(|(c, (id, name, _))| {
            let mut parts: BTreeMap<&str, (Option<f64>, Option<f64>)> = BTreeMap::new();
            let mut order = Vec::new();
            for sample in &per_sample {
                for (part, m) in &sample[c] {
                    let e = parts.entry(part).or_insert_with(|| {
                        order.push(*part);
                        (None, None)
                    });
                    match *m {
                        Measure::Pointwise(x) => e.0 = Some(e.0.map_or(x, |y: f64| y.max(x))),
                        Measure::Integral(x) => e.1 = Some(e.1.map_or(x, |y: f64| y.max(x))),
                    }
                }
            }
            let parts: Vec<IdentityPart> = order
                .iter()
                .map(|p| IdentityPart { name: p.to_string(), max_pointwise_error: parts[p].0, integral_error: parts[p].1 })
                .collect();
            let max_pw = parts.iter().filter_map(|p| p.max_pointwise_error).fold(0.0, f64::max);
            let integral = parts.iter().filter_map(|p| p.integral_error).reduce(f64::max);
            let pass = !parts.is_empty()
                && parts.iter().all(|p| p.max_pointwise_error.is_some() || p.integral_error.is_some())
                && max_pw <= cfg.tol_pointwise
                && integral.is_none_or(|e| e <= cfg.tol_integral);
            IdentityReport {
                id: id.to_string(),
                name: name.to_string(),
                max_pointwise_error: max_pw,
                integral_error: integral,
                tol_pointwise: cfg.tol_pointwise,
                tol_integral: cfg.tol_integral,
                samples: per_sample.len(),
                pass,
                parts,
            }
        })
        .collect();
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::equator_map;
    use crate::random::FieldRng;
    use rand::Rng;

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita(0, 1, 2), 1.0);
        assert_eq!(levi_civita(1, 0, 2), -1.0);
        assert_eq!(levi_civita(2, 0, 1), 1.0);
        assert_eq!(levi_civita(0, 0, 2), 0.0);
        assert_eq!(det3([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]), 1.0);
    }

    #[test]
    fn vector_formulas_on_constant_vectors() {
        let mut rng: FieldRng = rng_from_seed(3);
        let mut draw = || -> [f64; 3] { std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0) };
        for _ in 0..100 {
            let (a, b, c) = (draw(), draw(), draw());
            let lhs = crate::field::cross(a, crate::field::cross(b, c));
            let (ca, ab) = (crate::field::dot3(c, a), crate::field::dot3(a, b));
            for k in 0..3 {
                assert!((lhs[k] - (b[k] * ca - c[k] * ab)).abs() < 1e-15);
            }
            let t = crate::field::dot3(a, crate::field::cross(b, c));
            assert!((t - det3(a, b, c)).abs() < 1e-15);
        }
    }

    #[test]
    fn alignment_on_equator_map() {
        let g = Arc::new(TorusGrid::cubic(1, 64, 2.0 * PI).unwrap());
        let u = equator_map(&g).into_vector();
        let lhs = u.dot(&frac_laplacian_vec(&u, 1.0));
        let rhs = leibniz_dot(&u, &u, 1.0).scale(-0.5);
        assert!(lhs.max_diff(&ScalarField::constant(&g, 1.0)) < 1e-10);
        assert!(rhs.max_diff(&ScalarField::constant(&g, 1.0)) < 1e-10);
    }

    #[test]
    fn circle_kernel_three_differences() {
        let g = Arc::new(TorusGrid::cubic(1, 128, 2.0 * PI).unwrap());
        let a = ScalarField::from_fn(&g, |x| (3.0 * x[0]).sin() + 0.5 * x[0].cos());
        let b = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos());
        let e = ScalarField::from_fn(&g, |x| (x[0] + 0.3).sin() - 0.2 * (4.0 * x[0]).cos());
        // ∫ΔaΔbΔe K = π(H(a, be) - b H(a, e) - e H(a, b)).
        let quad = kernel_integral(&g, a.values(), |x, y| (b.values()[x] - b.values()[y]) * (e.values()[x] - e.values()[y]));
        let spectral = &(&leibniz(&a, &(&b * &e), 1.0) - &(&b * &leibniz(&a, &e, 1.0))) - &(&e * &leibniz(&a, &b, 1.0));
        assert!(quad.max_diff(&spectral.scale(PI)) < 1e-10);
    }

    #[test]
    fn suite_passes_on_a_few_pairs() {
        let cfg = RunConfig { samples: 3, ..RunConfig::defaults(super::super::config::Subcommand::Identities) };
        let reports = run_identities(&cfg).unwrap();
        assert_eq!(reports.len(), 10);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
    }
}
