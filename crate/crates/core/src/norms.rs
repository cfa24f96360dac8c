//! L^p and Lorentz norms by grid quadrature, and Sobolev-type quotients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::TorusGrid;
use crate::spectral::frac_laplacian;

/// (Σ |v|^p Δx)^{1/p}; `p = ∞` gives max |v|.
pub fn lp_norm_values(values: &[f64], dx: f64, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p needs p >= 1");
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    // Scale by the max to keep large p from overflowing.
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * (s * dx).powf(1.0 / p)
}

pub fn lp_norm(f: &ScalarField, p: f64) -> f64 {
    lp_norm_values(f.values(), f.grid().cell_measure(), p)
}

/// Second Lorentz exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LorentzQ {
    Finite(f64),
    Infinite,
}

/// Exponents (p, q) of L^{p,q}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    p: f64,
    q: LorentzQ,
}

impl LorentzParams {
    pub fn new(p: f64, q: LorentzQ) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("Lorentz p = {p} must lie in (1, ∞)")));
        }
        if let LorentzQ::Finite(q) = q {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(Error::ParameterOutOfRange(format!("Lorentz q = {q} must be >= 1")));
            }
        }
        Ok(Self { p, q })
    }

    pub fn finite(p: f64, q: f64) -> Result<Self> {
        Self::new(p, LorentzQ::Finite(q))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> LorentzQ {
        self.q
    }
}

/// Decreasing rearrangement of |v|.
pub fn decreasing_rearrangement(values: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

/// ‖f‖_{p,q} of grid values with equal cell measure `dx`.
///
/// The rearrangement is a step function with value a_i on ((i-1)Δx, iΔx],
/// so each cell contributes a_i^q (p/q)(t_i^{q/p} - t_{i-1}^{q/p}).
pub fn lorentz_norm_values(values: &[f64], dx: f64, lp: LorentzParams) -> f64 {
    let a = decreasing_rearrangement(values);
    let p = lp.p;
    match lp.q {
        LorentzQ::Infinite => a
            .iter()
            .enumerate()
            .fold(0.0, |m, (i, &ai)| m.max(((i + 1) as f64 * dx).powf(1.0 / p) * ai)),
        LorentzQ::Finite(q) => {
            let top = a.first().copied().unwrap_or(0.0);
            if top == 0.0 {
                return 0.0;
            }
            let r = q / p;
            let mut prev = 0.0;
            let mut s = 0.0;
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0.0 {
                    break;
                }
                let cur = ((i + 1) as f64 * dx).powf(r);
                s += (ai / top).powf(q) * (cur - prev);
                prev = cur;
            }
            top * (s * p / q).powf(1.0 / q)
        }
    }
}

pub fn lorentz_norm(f: &ScalarField, lp: LorentzParams) -> f64 {
    lorentz_norm_values(f.values(), f.grid().cell_measure(), lp)
}

fn range_err(msg: String) -> Error {
    Error::ParameterOutOfRange(msg)
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// ‖f‖_{L^{dp/(d-αp)}} / ‖D^α f‖_{L^p}, for α ∈ (0,d), p ∈ (1, d/α).
pub fn sobolev_quotient(f: &ScalarField, alpha: f64, p: f64) -> Result<f64> {
    let d = f.grid().dim() as f64;
    if !(alpha > 0.0 && alpha < d) {
        return Err(range_err(format!("Sobolev order α = {alpha} outside (0, {d})")));
    }
    if !(p > 1.0 && p < d / alpha) {
        return Err(range_err(format!("Sobolev exponent p = {p} outside (1, {})", d / alpha)));
    }
    let target = d * p / (d - alpha * p);
    Ok(ratio(lp_norm(f, target), lp_norm(&frac_laplacian(f, alpha), p)))
}

/// ‖D^β f‖_{L^{p/β}} / (‖f‖_∞^{1-β} ‖D¹f‖_{L^p}^β), for β ∈ (0,1), p ∈ (1,∞).
pub fn gn_quotient(f: &ScalarField, beta: f64, p: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(range_err(format!("interpolation order β = {beta} outside (0, 1)")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(range_err(format!("exponent p = {p} outside (1, ∞)")));
    }
    let lhs = lp_norm(&frac_laplacian(f, beta), p / beta);
    let rhs = lp_norm(f, f64::INFINITY).powf(1.0 - beta) * lp_norm(&frac_laplacian(f, 1.0), p).powf(beta);
    Ok(ratio(lhs, rhs))
}

/// Exponent θ = 2(β - d/p) of the Sobolev-interpolation bound, after checking
/// β ∈ (0,1/2] with p ≥ 2d/β, or β ∈ (1/2,1] with 2d/β ≤ p ≤ 2d/(2β-1).
pub fn gns_theta(d: usize, beta: f64, p: f64) -> Result<f64> {
    let d = d as f64;
    let lo = 2.0 * d / beta;
    let ok = if beta > 0.0 && beta <= 0.5 {
        p >= lo && p.is_finite()
    } else if beta > 0.5 && beta <= 1.0 {
        p >= lo && p <= 2.0 * d / (2.0 * beta - 1.0)
    } else {
        false
    };
    if !ok {
        return Err(range_err(format!("(β, p) = ({beta}, {p}) outside the admissible range for d = {d}")));
    }
    Ok(2.0 * (beta - d / p))
}

/// ‖D^β f‖_{L^p} / (‖f‖_∞^{1-θ} ‖D¹f‖_{L^{2d}}^θ) with θ from [`gns_theta`].
pub fn gns_quotient(f: &ScalarField, beta: f64, p: f64) -> Result<f64> {
    let d = f.grid().dim();
    let theta = gns_theta(d, beta, p)?;
    let lhs = lp_norm(&frac_laplacian(f, beta), p);
    let rhs = lp_norm(f, f64::INFINITY).powf(1.0 - theta)
        * lp_norm(&frac_laplacian(f, 1.0), 2.0 * d as f64).powf(theta);
    Ok(ratio(lhs, rhs))
}

/// Empirical constant of one inequality over a sample family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub inequality: String,
    pub params: BTreeMap<String, f64>,
    pub n_samples: usize,
    pub max: f64,
    pub median: f64,
    pub quotients: Vec<f64>,
    pub seed: u64,
    pub grid: TorusGrid,
}

impl QuotientReport {
    pub fn from_samples(
        inequality: &str,
        params: BTreeMap<String, f64>,
        quotients: Vec<f64>,
        seed: u64,
        grid: TorusGrid,
    ) -> Self {
        let mut sorted = quotients.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = match n {
            0 => f64::NAN,
            _ if n % 2 == 1 => sorted[n / 2],
            _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
        };
        Self {
            inequality: inequality.to_string(),
            params,
            n_samples: n,
            max: sorted.last().copied().unwrap_or(f64::NAN),
            median,
            quotients,
            seed,
            grid,
        }
    }

    /// All quotients finite and nonnegative.
    pub fn is_valid(&self) -> bool {
        !self.quotients.is_empty() && self.quotients.iter().all(|q| q.is_finite() && *q >= 0.0)
    }
}
