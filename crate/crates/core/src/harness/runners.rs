//! The six subcommands: each turns a validated config into gated checks and files.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::config::{InitialData, RunConfig, Subcommand};
use super::identities::{run_identities, CATALOG};
use super::report::{CheckResult, Report, RunOutput};
use crate::commutator::{
    adjoint_leibniz, double_commutator, leibniz, leibniz_derivative_quotient, leibniz_dot,
    leibniz_fractional_quotient, leibniz_mixed_quotient, leibniz_oracle, leibniz_sup_quotient,
    pair_kernel_quotient, triple_kernel_quotient, weighted_kernel_quotient, KernelQuadratureConfig,
    PairKernelParams, TripleKernelParams, WeightedKernelParams,
};
use crate::dump::write_fields;
use crate::dynamics::{
    bump_data, conserved_energy, equator_map, gronwall_pair, hwm_rhs, integrate_each, step_count,
    total_spin, waveform_residual, EnergyTrace, Method, Perturbation,
};
use crate::error::{Error, Result};
use crate::field::{ScalarField, SphereField};
use crate::grid::TorusGrid;
use crate::norms::{gn_quotient, gns_quotient, sobolev_quotient, QuotientReport};
use crate::random::{derive_seed, random_field, random_sphere_field, rng_from_seed, BandLimited, BandSpec, FieldRng};
use crate::spectral::{frac_laplacian, gradient, partial, riesz_potential, riesz_transform};
use crate::wave::{cosine_forcing, strichartz_quotients};

const STREAM_OPERATORS: u64 = 0x0b;
const STREAM_ALIGNMENT: u64 = 0x0c;
const STREAM_INEQUALITIES: u64 = 0x1e;
const STREAM_KERNELS: u64 = 0x1f;
const STREAM_SIMULATE: u64 = 0x51;
const STREAM_STRICHARTZ: u64 = 0x5c;

/// Recorded with every Strichartz report.
pub const STRICHARTZ_ALPHA_NOTE: &str = "The stated range α ∈ (1/2, (d²−4d+1)/(2(d−1))] is empty for d = 4 \
(upper bound 1/6 < 1/2), while the derivation yields the estimate at order 1 + (d²−4d+1)/(2(d−1)); \
likely an off-by-one in the stated interval. α is exposed as a free parameter, quotients are reported \
over a sweep, and no intended range is guessed.";

type Files = Vec<(String, Vec<u8>)>;

/// Validates `cfg` and runs its subcommand.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let (results, files) = match cfg.subcommand {
        Subcommand::Identities => (identities(cfg)?, Vec::new()),
        Subcommand::Operators => (operators(cfg)?, Vec::new()),
        Subcommand::Inequalities => inequalities(cfg)?,
        Subcommand::Simulate => simulate(cfg)?,
        Subcommand::Gronwall => gronwall(cfg)?,
        Subcommand::Strichartz => strichartz(cfg)?,
    };
    Ok(RunOutput { report: Report::new(cfg, results), files })
}

fn arc_grid(d: usize, n: usize, l: f64) -> Result<Arc<TorusGrid>> {
    Ok(Arc::new(TorusGrid::cubic(d, n, l)?))
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// max|a - b| / scale, with NaN propagated as failure.
fn rel_diff(a: &ScalarField, b: &ScalarField, scale: f64) -> f64 {
    let e = a.max_diff(b) / scale;
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(header)?;
    for r in rows {
        wr.write_record(r)?;
    }
    wr.into_inner().map_err(|e| Error::Io(e.into_error()))
}

// ---------------------------------------------------------------- identities

fn identities(cfg: &RunConfig) -> Result<Vec<CheckResult>> {
    let reports = run_identities(cfg)?;
    let expected: Vec<&str> = CATALOG.iter().map(|(id, _, _)| *id).collect();
    let seen: Vec<&str> = reports.iter().map(|r| r.id.as_str()).collect();
    let mut out = vec![CheckResult::new("catalog_complete", seen == expected && seen.len() == 10)
        .with("expected", &expected)
        .with("evaluated", &seen)];
    for r in reports {
        out.push(CheckResult::new(format!("identity_{}_{}", r.id, r.name), r.pass).with("report", &r));
    }
    Ok(out)
}

// ----------------------------------------------------------------- operators

/// Wave vectors probed on a d-dimensional grid of N points per axis.
fn probe_modes(d: usize, n: usize) -> Vec<Vec<i64>> {
    const CANDIDATES: [[i64; 3]; 6] = [[1, 0, 0], [2, -1, 0], [3, 1, 2], [0, 0, 7], [-5, 3, 4], [7, 7, -7]];
    let half = (n / 2) as i64;
    CANDIDATES
        .iter()
        .map(|m| m[..d].to_vec())
        .filter(|m| m.iter().any(|&c| c != 0) && m.iter().all(|c| c.abs() < half))
        .collect()
}

fn pure_mode_errors(grid: &Arc<TorusGrid>) -> Result<(f64, f64, f64, f64)> {
    let d = grid.dim();
    let l = grid.lengths().to_vec();
    let (mut e_frac, mut e_pot, mut e_riesz, mut e_grad) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for m in probe_modes(d, grid.sizes()[0]) {
        let k: Vec<f64> = m.iter().zip(&l).map(|(&mj, &lj)| 2.0 * PI * mj as f64 / lj).collect();
        let kabs = k.iter().map(|x| x * x).sum::<f64>().sqrt();
        let phase = |x: &[f64]| x.iter().zip(&k).map(|(a, b)| a * b).sum::<f64>() + 0.3;
        let c = ScalarField::from_fn(grid, |x| phase(x).cos());
        let s = ScalarField::from_fn(grid, |x| phase(x).sin());
        for order in [0.5, 1.0, 1.5, 2.0] {
            let w = kabs.powf(order);
            e_frac = e_frac.max(rel_diff(&frac_laplacian(&c, order), &c.scale(w), w));
            if order < d as f64 {
                let got = riesz_potential(&c, order)?;
                e_pot = e_pot.max(rel_diff(&got, &c.scale(1.0 / w), 1.0 / w));
            }
        }
        let grads = gradient(&c);
        for j in 0..d {
            e_riesz = e_riesz.max(rel_diff(&riesz_transform(&c, j)?, &s.scale(-k[j] / kabs), 1.0));
            e_grad = e_grad.max(rel_diff(&grads[j], &s.scale(-k[j]), kabs));
        }
    }
    Ok((e_frac, e_pot, e_riesz, e_grad))
}

/// Pure-mode exactness of the multipliers, then identities on random data.
fn spectral_checks(cfg: &RunConfig, grid: &Arc<TorusGrid>) -> Result<Vec<CheckResult>> {
    let d = grid.dim();
    let (e_frac, e_pot, e_riesz, e_grad) = pure_mode_errors(grid)?;
    let tol = cfg.tol_spectral;
    let mut out = vec![
        CheckResult::at_most("frac_laplacian_pure_modes", e_frac, tol),
        CheckResult::at_most("riesz_potential_pure_modes", e_pot, tol),
        CheckResult::at_most("riesz_transform_pure_modes", e_riesz, tol),
        CheckResult::at_most("gradient_pure_modes", e_grad, tol),
    ];
    let spec = BandSpec::new(cfg.k_max);
    let per_sample: Vec<[f64; 3]> = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, STREAM_OPERATORS, k as u64));
            let f = &random_field(grid, &spec, &mut rng)? + &ScalarField::constant(grid, 0.7);
            let centered = f.without_mean();
            let scale = centered.max_abs();
            let mut round_trip = 0.0f64;
            for s in [0.5, 1.0, 1.5, 2.0].into_iter().filter(|s| *s < d as f64) {
                let back = riesz_potential(&frac_laplacian(&f, s), s)?;
                round_trip = round_trip.max(rel_diff(&back, &centered, scale));
            }
            let d1 = frac_laplacian(&f, 1.0);
            let mut div = ScalarField::zeros(grid);
            for j in 0..d {
                div = &div + &riesz_transform(&partial(&f, j)?, j)?;
            }
            let divergence = rel_diff(&div, &d1.scale(-1.0), d1.max_abs());
            let grad_sq: f64 = gradient(&f).iter().map(|g| g.inner(g)).sum();
            let d1_sq = d1.inner(&d1);
            let norms = (grad_sq.sqrt() - d1_sq.sqrt()).abs() / d1_sq.sqrt();
            Ok([round_trip, divergence, norms])
        })
        .collect::<Result<_>>()?;
    let worst = |i: usize| max_of(per_sample.iter().map(|r| r[i]));
    out.push(CheckResult::at_most("riesz_round_trip", worst(0), 1e-11).with("samples", cfg.samples));
    out.push(CheckResult::at_most("riesz_divergence_equals_minus_d1", worst(1), 1e-12));
    out.push(CheckResult::at_most("gradient_norm_equals_d1_norm", worst(2), 1e-11));
    Ok(out)
}

fn leibniz_cos_cos() -> Result<CheckResult> {
    let g = arc_grid(1, 64, 2.0 * PI)?;
    let c = ScalarField::from_fn(&g, |x| x[0].cos());
    let err = leibniz(&c, &c, 1.0).max_diff(&ScalarField::constant(&g, -1.0));
    Ok(CheckResult::at_most("leibniz_cos_cos_is_minus_one", err, 1e-10))
}

fn adjoint_pairing(cfg: &RunConfig, grid: &Arc<TorusGrid>) -> Result<CheckResult> {
    let spec = BandSpec::new(cfg.k_max);
    let errs: Vec<f64> = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, STREAM_OPERATORS ^ 0xad, k as u64));
            let f = random_field(grid, &spec, &mut rng)?;
            let g = random_field(grid, &spec, &mut rng)?;
            let h = random_field(grid, &spec, &mut rng)?;
            Ok(max_of([0.5, 1.0, 1.5].map(|sigma| {
                let a = adjoint_leibniz(&f, &g, sigma).inner(&h);
                let b = g.inner(&leibniz(&f, &h, sigma));
                (a - b).abs() / a.abs().max(b.abs())
            })))
        })
        .collect::<Result<_>>()?;
    Ok(CheckResult::at_most("adjoint_pairing", max_of(errs), 1e-10).with("samples", cfg.samples))
}

/// H̃(cos(ax+φ), cos(bx+ψ)) by summing the symbol over the four output modes.
fn double_commutator_oracle(grid: &Arc<TorusGrid>, (a, phi): (f64, f64), (b, psi): (f64, f64), alpha: f64, beta: f64) -> ScalarField {
    let m = |s: f64, x: f64, y: f64| (x + y).abs().powf(s) - x.abs().powf(s) - y.abs().powf(s);
    ScalarField::from_fn(grid, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for s1 in [-1.0, 1.0] {
            for s2 in [-1.0, 1.0] {
                let (x1, x2) = (s1 * a, s2 * b);
                let theta = s1 * (a * x[0] + phi) + s2 * (b * x[0] + psi);
                acc += 0.25 * m(alpha, x1, x2) * m(beta, x1, x2) * Complex64::from_polar(1.0, theta);
            }
        }
        acc.re
    })
}

fn double_commutator_modes() -> Result<CheckResult> {
    let g = arc_grid(1, 64, 2.0 * PI)?;
    let pairs = [((1.0, 0.0), (2.0, 0.0)), ((3.0, 0.4), (1.0, -1.1)), ((2.0, 0.2), (2.0, 0.9)), ((5.0, 1.3), (3.0, 0.0))];
    let orders = [(0.5, 0.5), (1.0, 0.5), (0.5, 1.0), (1.0, 1.0), (0.3, 0.7)];
    let mut worst = 0.0f64;
    for (p, q) in pairs {
        let f = ScalarField::from_fn(&g, |x| (p.0 * x[0] + p.1).cos());
        let h = ScalarField::from_fn(&g, |x| (q.0 * x[0] + q.1).cos());
        for (alpha, beta) in orders {
            let want = double_commutator_oracle(&g, p, q, alpha, beta);
            worst = worst.max(rel_diff(&double_commutator(&f, &h, alpha, beta), &want, want.max_abs()));
        }
    }
    Ok(CheckResult::at_most("double_commutator_two_mode_oracle", worst, 1e-10))
}

fn alignment_random(cfg: &RunConfig) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for (d, n) in [(1, 64), (2, 32), (3, 16)] {
        let grid = arc_grid(d, n, 2.0 * PI)?;
        let spec = BandSpec::new(cfg.k_max.min(n / 2 - 1));
        let errs: Vec<f64> = (0..cfg.samples)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_from_seed(derive_seed(cfg.seed, STREAM_ALIGNMENT + d as u64, k as u64));
                let q = random_direction(&mut rng);
                let u = random_sphere_field(&grid, &spec, q, &mut rng)?;
                let lhs = u.dot(&crate::spectral::frac_laplacian_vec(&u, 1.0));
                let rhs = leibniz_dot(&u, &u, 1.0).scale(-0.5);
                Ok(lhs.max_diff(&rhs))
            })
            .collect::<Result<_>>()?;
        worst = worst.max(max_of(errs));
    }
    Ok(CheckResult::at_most("constraint_alignment_d123", worst, 1e-10).with("samples_per_dimension", cfg.samples))
}

fn random_direction(rng: &mut FieldRng) -> [f64; 3] {
    use rand::Rng;
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0);
        let n2 = v.iter().map(|x| x * x).sum::<f64>();
        if n2 > 1e-2 && n2 <= 1.0 {
            return v;
        }
    }
}

fn compact_bump(grid: &Arc<TorusGrid>, radius: f64, shift: f64) -> ScalarField {
    let c = 0.5 * grid.lengths()[0] + shift;
    ScalarField::from_fn(grid, |x| {
        let y = (x[0] - c) / radius;
        if y.abs() < 1.0 {
            (-1.0 / (1.0 - y * y)).exp()
        } else {
            0.0
        }
    })
}

fn singular_integral_oracle() -> Result<CheckResult> {
    let grid = arc_grid(1, 4096, 16.0)?;
    let s = 0.5;
    let qc = KernelQuadratureConfig::default();
    let f1 = compact_bump(&grid, 1.0, 0.0);
    let fit1 = leibniz_oracle(&f1, &f1, s, &qc)?;
    let f2 = compact_bump(&grid, 1.0, 0.3);
    let g2 = compact_bump(&grid, 0.7, -0.2);
    let fit2 = leibniz_oracle(&f2, &g2, s, &qc)?;
    let (c1, c2) = match (fit1.c, fit2.c) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(CheckResult::new("singular_integral_oracle", false).with("reason", "quadrature vanished")),
    };
    let spread = (c1 - c2).abs() / c1.abs();
    let residual = fit1.residual.max(fit2.residual);
    Ok(CheckResult::new("singular_integral_oracle", residual <= 1e-3 && spread <= 0.01)
        .with("residuals", [fit1.residual, fit2.residual])
        .with("residual_tolerance", 1e-3)
        .with("fitted_c", [c1, c2])
        .with("c_spread", spread)
        .with("c_spread_tolerance", 0.01))
}

fn operators(cfg: &RunConfig) -> Result<Vec<CheckResult>> {
    let grid = Arc::new(cfg.grid()?);
    let mut out = spectral_checks(cfg, &grid)?;
    out.push(leibniz_cos_cos()?);
    out.push(adjoint_pairing(cfg, &grid)?);
    out.push(double_commutator_modes()?);
    out.push(alignment_random(cfg)?);
    out.push(singular_integral_oracle()?);
    Ok(out)
}

// -------------------------------------------------------------- inequalities

type Quotient = Box<dyn Fn(&ScalarField, &ScalarField, &ScalarField) -> Result<f64> + Sync>;

struct Inequality {
    name: &'static str,
    params: BTreeMap<String, f64>,
    eval: Quotient,
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn field_inequalities(cfg: &RunConfig) -> Vec<Inequality> {
    let (sa, sp) = (cfg.sobolev_alpha, cfg.sobolev_p);
    let (gb, gp) = (cfg.gn_beta, cfg.gn_p);
    let (nb, np) = (cfg.gns_beta, cfg.gns_p);
    let frac = cfg.frac_params();
    vec![
        Inequality {
            name: "sobolev",
            params: params(&[("alpha", sa), ("p", sp)]),
            eval: Box::new(move |f, _, _| sobolev_quotient(f, sa, sp)),
        },
        Inequality {
            name: "gagliardo_nirenberg",
            params: params(&[("beta", gb), ("p", gp)]),
            eval: Box::new(move |f, _, _| gn_quotient(f, gb, gp)),
        },
        Inequality {
            name: "sobolev_interpolation",
            params: params(&[("beta", nb), ("p", np)]),
            eval: Box::new(move |f, _, _| gns_quotient(f, nb, np)),
        },
        Inequality {
            name: "leibniz_derivative",
            params: BTreeMap::new(),
            eval: Box::new(|f, g, _| leibniz_derivative_quotient(f, g)),
        },
        Inequality {
            name: "leibniz_sup_lorentz",
            params: BTreeMap::new(),
            eval: Box::new(|f, g, _| leibniz_sup_quotient(f, g)),
        },
        Inequality {
            name: "leibniz_mixed",
            params: BTreeMap::new(),
            eval: Box::new(|f, g, _| leibniz_mixed_quotient(f, g)),
        },
        Inequality {
            name: "leibniz_fractional",
            params: params(&[("alpha", frac.alpha), ("sigma", frac.sigma), ("p1", frac.p1), ("p2", frac.p2)]),
            eval: Box::new(move |f, g, _| leibniz_fractional_quotient(f, g, &frac)),
        },
    ]
}

fn kernel_inequalities() -> Vec<Inequality> {
    let pair = PairKernelParams { s: 0.8, alpha1: 0.4, alpha2: 0.4, p1: 4.0, p2: 4.0, p: 2.0 };
    let triple = TripleKernelParams { alphas: [1.0 / 3.0; 3], ps: [6.0; 3], p: 2.0 };
    let weighted = WeightedKernelParams { alpha1: 0.6, alpha2: 0.6, ps: [6.0; 3] };
    vec![
        Inequality {
            name: "pair_difference_kernel",
            params: params(&[("s", pair.s), ("alpha1", 0.4), ("alpha2", 0.4), ("p1", 4.0), ("p2", 4.0), ("p", 2.0)]),
            eval: Box::new(move |f, g, _| pair_kernel_quotient(f, g, &pair)),
        },
        Inequality {
            name: "triple_difference_kernel",
            params: params(&[("alpha_i", 1.0 / 3.0), ("p_i", 6.0), ("p", 2.0)]),
            eval: Box::new(move |f, g, h| triple_kernel_quotient(f, g, h, &triple)),
        },
        Inequality {
            name: "weighted_difference_kernel",
            params: params(&[("alpha1", 0.6), ("alpha2", 0.6), ("p_i", 6.0)]),
            eval: Box::new(move |f, g, h| weighted_kernel_quotient(f, g, h, &weighted)),
        },
    ]
}

/// Quotients of every inequality on `samples` draws, sampled on both grids.
fn sample_family(
    ineqs: &[Inequality],
    coarse: &Arc<TorusGrid>,
    fine: &Arc<TorusGrid>,
    spec: &BandSpec,
    seed: u64,
    stream: u64,
    samples: usize,
) -> Result<Vec<Vec<[f64; 2]>>> {
    let per_sample: Vec<Vec<[f64; 2]>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(seed, stream, k as u64));
            let draws: Vec<BandLimited> = (0..3).map(|_| BandLimited::draw(coarse.lengths(), spec, &mut rng)).collect();
            let on = |grid: &Arc<TorusGrid>| -> Result<Vec<ScalarField>> { draws.iter().map(|b| b.sample(grid)).collect() };
            let (c, f) = (on(coarse)?, on(fine)?);
            ineqs
                .iter()
                .map(|q| Ok([(q.eval)(&c[0], &c[1], &c[2])?, (q.eval)(&f[0], &f[1], &f[2])?]))
                .collect()
        })
        .collect::<Result<_>>()?;
    // transpose to [inequality][sample]
    Ok((0..ineqs.len()).map(|i| per_sample.iter().map(|s| s[i]).collect()).collect())
}

fn inequalities(cfg: &RunConfig) -> Result<(Vec<CheckResult>, Files)> {
    let coarse = Arc::new(cfg.grid()?);
    let fine = arc_grid(cfg.d, 2 * cfg.n, cfg.l)?;
    let kc = arc_grid(1, cfg.kernel_n, cfg.l)?;
    let kf = arc_grid(1, 2 * cfg.kernel_n, cfg.l)?;
    let families = [
        (field_inequalities(cfg), coarse, fine, BandSpec::new(cfg.k_max), STREAM_INEQUALITIES),
        (kernel_inequalities(), kc, kf, BandSpec::new(cfg.kernel_k_max), STREAM_KERNELS),
    ];
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for (ineqs, gc, gf, spec, stream) in &families {
        let values = sample_family(ineqs, gc, gf, spec, cfg.seed, *stream, cfg.samples)?;
        for (q, vals) in ineqs.iter().zip(values) {
            let base: Vec<f64> = vals.iter().map(|v| v[0]).collect();
            let refined: Vec<f64> = vals.iter().map(|v| v[1]).collect();
            for (k, v) in vals.iter().enumerate() {
                for (grid, x) in [(gc, v[0]), (gf, v[1])] {
                    rows.push(vec![q.name.to_string(), k.to_string(), grid.sizes()[0].to_string(), format!("{x:e}")]);
                }
            }
            let report = QuotientReport::from_samples(q.name, q.params.clone(), base, cfg.seed, (**gc).clone());
            let refined_report = QuotientReport::from_samples(q.name, q.params.clone(), refined, cfg.seed, (**gf).clone());
            let change = (refined_report.max - report.max).abs() / report.max;
            let pass = report.is_valid() && refined_report.is_valid() && change <= cfg.tol_refinement;
            results.push(
                CheckResult::new(format!("quotient_{}", q.name), pass)
                    .with("max_refinement_change", change)
                    .with("tolerance", cfg.tol_refinement)
                    .with("refined_max", refined_report.max)
                    .with("refined_n", gf.sizes()[0])
                    .with("report", &report),
            );
        }
    }
    let csv = csv_bytes(&["inequality", "sample", "n", "quotient"], rows)?;
    Ok((results, vec![("quotients.csv".into(), csv)]))
}

// ------------------------------------------------------------------ simulate

fn initial_data(cfg: &RunConfig, grid: &Arc<TorusGrid>) -> Result<SphereField> {
    match cfg.initial_data {
        InitialData::Bump => Ok(bump_data(grid, cfg.amplitude, cfg.width, cfg.offset)),
        InitialData::Band => {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, STREAM_SIMULATE, 0));
            let spec = BandSpec::new(cfg.k_max).with_amplitude(cfg.amplitude);
            random_sphere_field(grid, &spec, [0.0, 0.0, 1.0], &mut rng)
        }
    }
}

/// Largest relative deviation of energy and spin from their initial values.
#[derive(Debug, Clone, Copy, Default)]
struct Drift {
    energy: f64,
    spin: f64,
}

struct Invariants {
    e0: f64,
    s0: [f64; 3],
    drift: Drift,
}

impl Invariants {
    fn new(u0: &SphereField) -> Self {
        Self { e0: conserved_energy(u0), s0: total_spin(u0), drift: Drift::default() }
    }

    fn visit(&mut self, u: &SphereField) {
        let norm = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = total_spin(u);
        let e = (conserved_energy(u) - self.e0).abs() / self.e0.abs();
        let sp = norm([s[0] - self.s0[0], s[1] - self.s0[1], s[2] - self.s0[2]]) / norm(self.s0);
        self.drift.energy = self.drift.energy.max(if e.is_nan() { f64::INFINITY } else { e });
        self.drift.spin = self.drift.spin.max(if sp.is_nan() { f64::INFINITY } else { sp });
    }
}

fn run_drift(u0: &SphereField, t_final: f64, dt: f64, method: Method) -> Result<(Drift, SphereField)> {
    let steps = step_count(t_final, dt)?;
    let mut inv = Invariants::new(u0);
    let last = integrate_each(u0, steps, dt, method, |_, _, u| {
        inv.visit(u);
        Ok(())
    })?;
    Ok((inv.drift, last))
}

fn ratio_check(name: &str, coarse: f64, fine: f64, cfg: &RunConfig) -> CheckResult {
    let r = coarse / fine;
    CheckResult::new(name, r >= cfg.ratio_min && r <= cfg.ratio_max)
        .with("errors", [coarse, fine])
        .with("ratio", r)
        .with("ratio_range", [cfg.ratio_min, cfg.ratio_max])
}

fn simulate(cfg: &RunConfig) -> Result<(Vec<CheckResult>, Files)> {
    let grid = Arc::new(cfg.grid()?);
    let u0 = initial_data(cfg, &grid)?;
    let steps = step_count(cfg.t_final, cfg.dt)?;
    let mut rows = Vec::new();
    let mut max_defect = u0.defect();
    let mut inv = Invariants::new(&u0);
    let last = integrate_each(&u0, steps, cfg.dt, cfg.method, |n, t, u| {
        max_defect = max_defect.max(u.defect());
        inv.visit(u);
        if n % cfg.record_every == 0 || n == steps {
            let s = total_spin(u);
            rows.push(
                [t, conserved_energy(u), s[0], s[1], s[2], u.defect()]
                    .iter()
                    .map(|v| format!("{v:e}"))
                    .collect(),
            );
        }
        Ok(())
    })?;
    let mut files = vec![(
        "trajectory.csv".to_string(),
        csv_bytes(&["t", "energy", "spin_x", "spin_y", "spin_z", "sphere_defect"], rows)?,
    )];
    if cfg.dump {
        let mut bytes = Vec::new();
        let [a, b, c] = last.comps();
        write_fields(&mut bytes, &[a, b, c])?;
        files.push(("final_state.hwmf".into(), bytes));
    }

    let coarse = inv.drift;
    let (fine, fine_last) = run_drift(&u0, cfg.t_final, cfg.dt / 2.0, cfg.method)?;
    let other = match cfg.method {
        Method::LieMidpoint => Method::Rk4Project,
        Method::Rk4Project => Method::LieMidpoint,
    };
    let (_, other_coarse) = run_drift(&u0, cfg.t_final, cfg.dt, other)?;
    let (_, other_fine) = run_drift(&u0, cfg.t_final, cfg.dt / 2.0, other)?;
    let gap_coarse = last.max_diff(&other_coarse);
    let gap_fine = fine_last.max_diff(&other_fine);

    let mut results = vec![
        CheckResult::at_most("sphere_constraint_drift", max_defect, 1e-12).with("steps", steps),
        CheckResult::at_most("energy_drift", coarse.energy, cfg.tol_conservation),
        ratio_check("energy_drift_halving_ratio", coarse.energy, fine.energy, cfg),
        CheckResult::at_most("spin_drift", coarse.spin, cfg.tol_conservation),
        ratio_check("spin_drift_halving_ratio", coarse.spin, fine.spin, cfg),
        ratio_check("method_agreement_halving_ratio", gap_coarse, gap_fine, cfg).with("other_method", other),
    ];

    let wdt = [cfg.waveform_dt, cfg.waveform_dt / 2.0, cfg.waveform_dt / 4.0];
    let res: Vec<f64> = wdt
        .par_iter()
        .map(|&dt| waveform_residual(&u0, cfg.waveform_t, dt, cfg.method))
        .collect::<Result<_>>()?;
    for (i, pair) in res.windows(2).enumerate() {
        results.push(
            ratio_check(&format!("waveform_residual_ratio_{}", i + 1), pair[0], pair[1], cfg)
                .with("dt", [wdt[i], wdt[i + 1]])
                .with("t", cfg.waveform_t),
        );
    }

    let eq = equator_map(&grid);
    let rhs = hwm_rhs(&eq).max_abs();
    let eq_last = integrate_each(&eq, steps, cfg.dt, cfg.method, |_, _, _| Ok(()))?;
    results.push(CheckResult::at_most("equator_map_rhs", rhs, 1e-12));
    results.push(CheckResult::at_most("equator_map_deviation", eq_last.max_diff(&eq), 1e-8).with("t", cfg.t_final));
    Ok((results, files))
}

// ------------------------------------------------------------------ gronwall

fn trace_files(trace: &EnergyTrace, cfg: &RunConfig, grid: &TorusGrid) -> Result<Files> {
    let stem = format!("gronwall_alpha{}_eps{:e}", trace.alpha, trace.epsilon);
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    let sidecar = json!({
        "grid": grid,
        "dt": trace.dt,
        "t_final": cfg.t_final,
        "epsilon": trace.epsilon,
        "alpha": trace.alpha,
        "method": trace.method,
        "seed": cfg.seed,
        "c_star": trace.c_star,
    });
    let mut json = serde_json::to_vec_pretty(&sidecar)?;
    json.push(b'\n');
    Ok(vec![(format!("{stem}.csv"), csv), (format!("{stem}.json"), json)])
}

fn gronwall(cfg: &RunConfig) -> Result<(Vec<CheckResult>, Files)> {
    let grid = Arc::new(cfg.grid()?);
    let u0 = bump_data(&grid, cfg.amplitude, cfg.width, cfg.offset);
    let pert = Perturbation::default_for(&grid);
    let mut eps: Vec<f64> = cfg.epsilon.clone();
    if !eps.contains(&0.0) {
        eps.push(0.0);
    }
    let jobs: Vec<(f64, f64)> = cfg.alpha.iter().flat_map(|&a| eps.iter().map(move |&e| (a, e))).collect();
    let runs: Vec<_> = jobs
        .par_iter()
        .map(|&(a, e)| gronwall_pair(&u0, &pert, e, a, cfg.t_final, cfg.dt, cfg.method))
        .collect::<Result<_>>()?;

    let mut results = Vec::new();
    let mut files = Vec::new();
    for run in &runs {
        files.extend(trace_files(&run.trace, cfg, &grid)?);
    }
    for &alpha in &cfg.alpha {
        let of_alpha: Vec<_> = runs.iter().filter(|r| r.trace.alpha == alpha).collect();
        let zero = of_alpha.iter().find(|r| r.trace.epsilon == 0.0).expect("ε = 0 always scheduled");
        results.push(
            CheckResult::at_most("uniqueness_zero_perturbation", max_of(zero.trace.energy.iter().copied()), cfg.tol_uniqueness)
                .with("alpha", alpha),
        );
        let positive: Vec<_> = of_alpha.iter().filter(|r| r.trace.epsilon > 0.0).collect();
        let sane = of_alpha.iter().all(|r| {
            r.trace.energy.iter().chain(&r.trace.sigma).all(|v| v.is_finite() && *v >= 0.0)
        });
        results.push(CheckResult::new("trace_invariants", sane).with("alpha", alpha));
        if positive.is_empty() {
            continue;
        }
        let c: Vec<Option<f64>> = positive.iter().map(|r| r.trace.c_star).collect();
        let fitted: Vec<f64> = c.iter().flatten().copied().collect();
        let (lo, hi) = fitted.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let spread = if fitted.len() == c.len() && lo > 0.0 { hi / lo } else { f64::INFINITY };
        results.push(
            CheckResult::new("c_star_stability", spread <= cfg.c_star_spread)
                .with("alpha", alpha)
                .with("epsilon", positive.iter().map(|r| r.trace.epsilon).collect::<Vec<_>>())
                .with("c_star", &c)
                .with("spread", spread)
                .with("tolerance", cfg.c_star_spread),
        );
        let by_construction = max_of(
            positive.iter().map(|r| r.trace.c_star.map_or(f64::INFINITY, |c| r.trace.bound_ratio(c))),
        );
        results.push(CheckResult::at_most("bound_with_own_c_star", by_construction, 1.0 + 1e-9).with("alpha", alpha));
        let coarsest = positive.iter().max_by(|a, b| a.trace.epsilon.total_cmp(&b.trace.epsilon)).expect("non-empty");
        let finest = positive.iter().min_by(|a, b| a.trace.epsilon.total_cmp(&b.trace.epsilon)).expect("non-empty");
        let transfer = coarsest.trace.c_star.map_or(f64::INFINITY, |c| finest.trace.bound_ratio(c));
        results.push(
            CheckResult::at_most("bound_with_coarsest_c_star_on_finest", transfer, 1.0 + 1e-9)
                .with("alpha", alpha)
                .with("coarsest_epsilon", coarsest.trace.epsilon)
                .with("finest_epsilon", finest.trace.epsilon),
        );
        let w = coarsest.u.as_vector() - coarsest.v.as_vector();
        let ut = hwm_rhs(&coarsest.u);
        let orth = coarsest.v.dot(&(&ut - &hwm_rhs(&coarsest.v))).max_diff(&w.dot(&ut).scale(-1.0));
        results.push(CheckResult::at_most("orthogonality_trade_at_final_time", orth, cfg.tol_pointwise).with("alpha", alpha));
    }
    Ok((results, files))
}

// ---------------------------------------------------------------- strichartz

struct StrichartzSample {
    fine: Vec<f64>,
    coarse: Option<Vec<f64>>,
}

fn strichartz(cfg: &RunConfig) -> Result<(Vec<CheckResult>, Files)> {
    let fine = Arc::new(cfg.grid()?);
    let coarse = if cfg.refine { Some(arc_grid(cfg.d, cfg.n / 2, cfg.l)?) } else { None };
    let ds = cfg.t_final / (cfg.snapshots - 1) as f64;
    let spec = BandSpec::new(cfg.k_max);
    let data = |k: usize| -> [BandLimited; 3] {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, STREAM_STRICHARTZ, k as u64));
        std::array::from_fn(|_| BandLimited::draw(fine.lengths(), &spec, &mut rng))
    };
    let quotients = |draws: &[BandLimited; 3], grid: &Arc<TorusGrid>, scale: f64| -> Result<Vec<f64>> {
        let [f, g, h] = [0, 1, 2].map(|i| draws[i].sample(grid).map(|x| x.scale(scale)));
        let forcing = cosine_forcing(&h?, ds, cfg.snapshots);
        strichartz_quotients(&f?, &g?, &forcing, ds, &cfg.alpha)
    };
    let samples: Vec<StrichartzSample> = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let draws = data(k);
            Ok(StrichartzSample {
                fine: quotients(&draws, &fine, 1.0)?,
                coarse: coarse.as_ref().map(|c| quotients(&draws, c, 1.0)).transpose()?,
            })
        })
        .collect::<Result<_>>()?;

    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (i, &alpha) in cfg.alpha.iter().enumerate() {
        let q: Vec<f64> = samples.iter().map(|s| s.fine[i]).collect();
        for (k, s) in samples.iter().enumerate() {
            rows.push(vec![k.to_string(), alpha.to_string(), cfg.n.to_string(), format!("{:e}", s.fine[i])]);
            if let Some(c) = &s.coarse {
                rows.push(vec![k.to_string(), alpha.to_string(), (cfg.n / 2).to_string(), format!("{:e}", c[i])]);
            }
        }
        reports.push(QuotientReport::from_samples(
            "strichartz",
            params(&[("alpha", alpha), ("t_final", cfg.t_final)]),
            q,
            cfg.seed,
            (*fine).clone(),
        ));
    }
    let finite = reports.iter().all(|r| r.is_valid());
    results.push(
        CheckResult::new("quotients_finite", finite)
            .with("alpha_range_note", STRICHARTZ_ALPHA_NOTE)
            .with("reports", &reports),
    );
    if coarse.is_some() {
        for (i, &alpha) in cfg.alpha.iter().enumerate() {
            let change = max_of(samples.iter().map(|s| {
                let c = s.coarse.as_ref().expect("refined run")[i];
                (s.fine[i] - c).abs() / s.fine[i]
            }));
            results.push(
                CheckResult::at_most(format!("refinement_stability_alpha{alpha}"), change, cfg.tol_refinement)
                    .with("alpha", alpha)
                    .with("coarse_n", cfg.n / 2)
                    .with("fine_n", cfg.n),
            );
        }
    }
    let scaled = quotients(&data(0), &fine, 3.0)?;
    let homogeneity = max_of(samples[0].fine.iter().zip(&scaled).map(|(a, b)| (a - b).abs() / a));
    results.push(CheckResult::at_most("scaling_invariance", homogeneity, 1e-12));
    let csv = csv_bytes(&["sample", "alpha", "n", "quotient"], rows)?;
    Ok((results, vec![("strichartz.csv".into(), csv)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_modes_fit_the_grid() {
        assert_eq!(probe_modes(1, 16), vec![vec![1], vec![2], vec![3], vec![-5], vec![7]]);
        assert!(probe_modes(3, 16).iter().all(|m| m.len() == 3));
        assert_eq!(probe_modes(3, 8).len(), 3);
    }

    #[test]
    fn oracle_for_a_single_mode_pair() {
        // α = β = 1, cos x · cos x: only the ±2 outputs and the 0 output survive.
        let g = arc_grid(1, 32, 2.0 * PI).unwrap();
        let got = double_commutator_oracle(&g, (1.0, 0.0), (1.0, 0.0), 1.0, 1.0);
        assert!(got.max_diff(&ScalarField::constant(&g, 2.0)) < 1e-13);
    }

    #[test]
    fn identities_runner_enumerates_the_catalog() {
        let cfg = RunConfig { samples: 2, ..RunConfig::defaults(Subcommand::Identities) };
        let out = run(&cfg).unwrap();
        assert_eq!(out.report.results.len(), 11);
        assert!(out.report.pass, "{:?}", out.report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let cfg = RunConfig { d: 2, ..RunConfig::defaults(Subcommand::Identities) };
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
    }
}
