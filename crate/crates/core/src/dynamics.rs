//! Half-wave maps u_t = u ∧ D¹u on the torus: integrators, conserved
//! quantities, the second-order wave form, and difference energies.

use std::f64::consts::PI;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{dot3, ScalarField, SphereField, VectorField3};
use crate::grid::TorusGrid;
use crate::norms::{lorentz_norm, lp_norm, LorentzParams};
use crate::random::{rodrigues, rotate_pointwise};
use crate::spectral::{frac_laplacian_vec, gradient_energy_density, laplacian_vec};

/// u ∧ D¹u.
pub fn hwm_rhs(u: &VectorField3) -> VectorField3 {
    u.cross(&frac_laplacian_vec(u, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Rotation by the half-step-predicted D¹u; keeps |u| = 1 to roundoff.
    LieMidpoint,
    /// Classical Runge–Kutta followed by pointwise normalization.
    Rk4Project,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie_midpoint" => Ok(Method::LieMidpoint),
            "rk4_project" => Ok(Method::Rk4Project),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::LieMidpoint => "lie_midpoint",
            Method::Rk4Project => "rk4_project",
        })
    }
}

/// Rotates u(x) so that, to first order, u' = u + dt·u∧ω.
fn rotate_by(u: &VectorField3, omega: &VectorField3, dt: f64) -> VectorField3 {
    u.zip_points(omega, |a, w| {
        let n = dot3(w, w).sqrt();
        if n == 0.0 {
            return a;
        }
        rodrigues(a, w.map(|c| -c / n), n * dt)
    })
}

/// One time step.
pub fn step(u: &SphereField, dt: f64, method: Method) -> Result<SphereField> {
    if !(dt > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("time step {dt} must be positive")));
    }
    let du = frac_laplacian_vec(u, 1.0);
    let speed = du.magnitude().max_abs();
    if dt * speed > 1.0 {
        log::warn!("dt·max|D¹u| = {:.3} exceeds 1", dt * speed);
    }
    let next = match method {
        Method::LieMidpoint => {
            let mid = rotate_by(u, &du, 0.5 * dt);
            rotate_by(u, &frac_laplacian_vec(&mid, 1.0), dt)
        }
        Method::Rk4Project => {
            let k1 = u.cross(&du);
            let k2 = hwm_rhs(&(u.as_vector() + &k1.scale(0.5 * dt)));
            let k3 = hwm_rhs(&(u.as_vector() + &k2.scale(0.5 * dt)));
            let k4 = hwm_rhs(&(u.as_vector() + &k3.scale(dt)));
            let incr = &(&k1 + &k2.scale(2.0)) + &(&k3.scale(2.0) + &k4);
            let raw = u.as_vector() + &incr.scale(dt / 6.0);
            if !raw.is_finite() {
                return Err(Error::StepUnstable(dt));
            }
            raw.map_points(|a| {
                let n = dot3(a, a).sqrt();
                a.map(|c| c / n)
            })
        }
    };
    if !next.is_finite() {
        return Err(Error::StepUnstable(dt));
    }
    Ok(SphereField::from_raw(next))
}

/// Number of uniform steps of size `dt` that reach `t_final`.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(Error::ParameterOutOfRange(format!("need dt > 0 and T >= 0, got dt = {dt}, T = {t_final}")));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
        return Err(Error::ParameterOutOfRange(format!("T = {t_final} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

/// Time-stamped snapshots of one solution.
#[derive(Debug, Clone)]
pub struct HwmTrajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<SphereField>,
    pub method: Method,
    pub dt: f64,
}

impl HwmTrajectory {
    pub fn last(&self) -> &SphereField {
        self.snapshots.last().expect("trajectory holds the initial state")
    }
}

/// Steps `u0` `steps` times, calling `visit(n, t_n, u_n)` for n = 0..=steps.
pub fn integrate_each(
    u0: &SphereField,
    steps: usize,
    dt: f64,
    method: Method,
    mut visit: impl FnMut(usize, f64, &SphereField) -> Result<()>,
) -> Result<SphereField> {
    let mut u = u0.clone();
    visit(0, 0.0, &u)?;
    for n in 1..=steps {
        u = step(&u, dt, method).map_err(|e| match e {
            Error::StepUnstable(_) => Error::StepUnstable(n as f64 * dt),
            other => other,
        })?;
        visit(n, n as f64 * dt, &u)?;
    }
    Ok(u)
}

/// Solution on [0, T] keeping every step.
pub fn integrate(u0: &SphereField, t_final: f64, dt: f64, method: Method) -> Result<HwmTrajectory> {
    let steps = step_count(t_final, dt)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::with_capacity(steps + 1);
    integrate_each(u0, steps, dt, method, |_, t, u| {
        times.push(t);
        snapshots.push(u.clone());
        Ok(())
    })?;
    Ok(HwmTrajectory { times, snapshots, method, dt })
}

/// ∫ ⟨u, D¹u⟩ dx.
pub fn conserved_energy(u: &VectorField3) -> f64 {
    u.dot(&frac_laplacian_vec(u, 1.0)).integral()
}

/// ∫ u dx.
pub fn total_spin(u: &VectorField3) -> [f64; 3] {
    u.integral()
}

/// The five summands of u_tt - Δu for a solution.
#[derive(Debug, Clone)]
pub struct WaveformTerms {
    /// u |∇u|².
    pub gradient: VectorField3,
    /// -u |D¹u|².
    pub half_laplacian: VectorField3,
    /// D¹u ⟨u, D¹u⟩.
    pub alignment: VectorField3,
    /// u ∧ D¹(u ∧ D¹u).
    pub nested_cross: VectorField3,
    /// -u ∧ (u ∧ (-Δ)u).
    pub laplacian_cross: VectorField3,
}

impl WaveformTerms {
    pub fn sum(&self) -> VectorField3 {
        let a = &self.gradient + &self.half_laplacian;
        let b = &self.alignment + &self.nested_cross;
        &(&a + &b) + &self.laplacian_cross
    }
}

pub fn waveform_terms(u: &VectorField3) -> WaveformTerms {
    let du = frac_laplacian_vec(u, 1.0);
    let grad2 = gradient_energy_density(u);
    let minus_lap = -&laplacian_vec(u);
    WaveformTerms {
        gradient: u.scale_by(&grad2),
        half_laplacian: -&u.scale_by(&du.dot(&du)),
        alignment: du.scale_by(&u.dot(&du)),
        nested_cross: u.cross(&frac_laplacian_vec(&u.cross(&du), 1.0)),
        laplacian_cross: -&u.cross(&u.cross(&minus_lap)),
    }
}

/// Right-hand side of u_tt - Δu = ... satisfied by solutions.
pub fn waveform_rhs(u: &VectorField3) -> VectorField3 {
    waveform_terms(u).sum()
}

/// L² norm at t_mid of (u(t+dt) - 2u(t) + u(t-dt))/dt² - Δu(t) - waveform_rhs(u(t))
/// along the numerical solution from u0.
pub fn waveform_residual(u0: &SphereField, t_mid: f64, dt: f64, method: Method) -> Result<f64> {
    let mid = step_count(t_mid, dt)?;
    if mid == 0 {
        return Err(Error::ParameterOutOfRange("residual time must be at least one step".into()));
    }
    let mut window: Vec<SphereField> = Vec::with_capacity(3);
    integrate_each(u0, mid + 1, dt, method, |n, _, u| {
        if n + 1 >= mid {
            window.push(u.clone());
        }
        Ok(())
    })?;
    let (prev, cur, next) = (&window[0], &window[1], &window[2]);
    let second = (&(next.as_vector() - cur.as_vector()) - &(cur.as_vector() - prev.as_vector())).scale(1.0 / (dt * dt));
    let res = &(&second - &laplacian_vec(cur)) - &waveform_rhs(cur);
    Ok(res.l2_norm())
}

/// ∫ |∇w|² summed over components.
pub fn gradient_norm_sq(w: &VectorField3) -> f64 {
    gradient_energy_density(w).integral()
}

/// ½(‖∇(u-v)‖² + ‖u_t - v_t‖²).
pub fn pair_energy(u: &VectorField3, v: &VectorField3, du_dt: &VectorField3, dv_dt: &VectorField3) -> f64 {
    let w = u - v;
    let wt = du_dt - dv_dt;
    0.5 * (gradient_norm_sq(&w) + wt.inner(&wt))
}

/// Same as [`pair_energy`] with ‖D¹(u-v)‖ in place of ‖∇(u-v)‖.
pub fn pair_energy_half_laplacian(u: &VectorField3, v: &VectorField3, du_dt: &VectorField3, dv_dt: &VectorField3) -> f64 {
    let w = u - v;
    let dw = frac_laplacian_vec(&w, 1.0);
    let wt = du_dt - dv_dt;
    0.5 * (dw.inner(&dw) + wt.inner(&wt))
}

/// ‖|D^α u|‖²_{L^{2d/(2α-1)}} + ‖|D^α v|‖²  + ‖|D¹u|‖²_{L^{(2d,2)}} + ‖|D¹v|‖², for α ∈ (1, d+1/2).
pub fn sigma(u: &VectorField3, v: &VectorField3, alpha: f64) -> Result<f64> {
    let d = u.grid().dim() as f64;
    if !(alpha > 1.0 && alpha < d + 0.5) {
        return Err(Error::ParameterOutOfRange(format!("α = {alpha} outside (1, {})", d + 0.5)));
    }
    let p = 2.0 * d / (2.0 * alpha - 1.0);
    let lor = LorentzParams::finite(2.0 * d, 2.0)?;
    let term = |w: &VectorField3| {
        let a = lp_norm(&frac_laplacian_vec(w, alpha).magnitude(), p);
        let b = lorentz_norm(&frac_laplacian_vec(w, 1.0).magnitude(), lor);
        a * a + b * b
    };
    Ok(term(u) + term(v))
}

/// (cos x, sin x, 0) in the first coordinate, a stationary solution.
pub fn equator_map(grid: &Arc<TorusGrid>) -> SphereField {
    let l = grid.lengths()[0];
    let u = VectorField3::from_fn(grid, |x| {
        let t = 2.0 * PI * x[0] / l;
        [t.cos(), t.sin(), 0.0]
    });
    SphereField::from_raw(u)
}

/// Smooth periodic bump exp(-r²/(2w²)), with r² = 2Σ_j(1 - cos(θ_j - c_j))
/// in angle coordinates θ_j = 2πx_j/L_j.
pub fn periodic_bump(grid: &Arc<TorusGrid>, width: f64, center: &[f64]) -> ScalarField {
    let lengths = grid.lengths().to_vec();
    let center = center.to_vec();
    ScalarField::from_fn(grid, move |x| {
        let r2: f64 = x
            .iter()
            .zip(&lengths)
            .zip(&center)
            .map(|((&xj, &l), &c)| 2.0 * (1.0 - (2.0 * PI * (xj - c) / l).cos()))
            .sum();
        (-r2 / (2.0 * width * width)).exp()
    })
}

/// Localized data normalize(A·b, A·b shifted by `offset` along the first axis, 1),
/// with b a bump of the given width at the box center.
pub fn bump_data(grid: &Arc<TorusGrid>, amplitude: f64, width: f64, offset: f64) -> SphereField {
    let center: Vec<f64> = grid.lengths().iter().map(|l| 0.5 * l).collect();
    let mut shifted = center.clone();
    shifted[0] += offset;
    let b0 = periodic_bump(grid, width, &center);
    let b1 = periodic_bump(grid, width, &shifted);
    let p = VectorField3::new([b0.scale(amplitude), b1.scale(amplitude), ScalarField::constant(grid, 1.0)]);
    SphereField::normalized(&p).expect("third component keeps the field away from zero")
}

/// Pointwise rotation of the initial data about a fixed axis by ε·profile(x).
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub axis: [f64; 3],
    pub profile: ScalarField,
}

impl Perturbation {
    /// Rotation about e₁ by a bump offset from the box center.
    pub fn default_for(grid: &Arc<TorusGrid>) -> Self {
        let center: Vec<f64> = grid.lengths().iter().map(|l| 0.5 * l + 0.1 * l).collect();
        Self { axis: [1.0, 0.0, 0.0], profile: periodic_bump(grid, 0.8, &center) }
    }

    pub fn apply(&self, u: &SphereField, eps: f64) -> Result<SphereField> {
        let n = dot3(self.axis, self.axis).sqrt();
        let axis = VectorField3::constant(u.grid(), self.axis.map(|c| c / n));
        SphereField::new(rotate_pointwise(u, &axis, &self.profile.scale(eps)))
    }
}

/// Difference energy and its bound along a pair of solutions.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub sigma: Vec<f64>,
    pub alpha: f64,
    pub epsilon: f64,
    pub dt: f64,
    pub method: Method,
    /// Smallest C with E(t_{n+1}) ≤ E(t_n)·exp(C∫Σ) on every resolved interval.
    pub c_star: Option<f64>,
}

/// Energies below this are treated as zero when fitting.
pub const ENERGY_FLOOR: f64 = 1e-28;

impl EnergyTrace {
    /// ∫_0^{t_n} Σ dt by the trapezoid rule.
    pub fn cumulative_sigma(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.times.len()];
        for n in 1..self.times.len() {
            let h = self.times[n] - self.times[n - 1];
            acc[n] = acc[n - 1] + 0.5 * h * (self.sigma[n] + self.sigma[n - 1]);
        }
        acc
    }

    /// max_n [log E_{n+1} - log E_n] / ∫_{t_n}^{t_{n+1}} Σ over intervals with both
    /// energies above [`ENERGY_FLOOR`].
    pub fn fit_c_star(&self) -> Option<f64> {
        let cum = self.cumulative_sigma();
        (0..self.times.len().saturating_sub(1))
            .filter(|&n| self.energy[n] >= ENERGY_FLOOR && self.energy[n + 1] >= ENERGY_FLOOR)
            .map(|n| (self.energy[n + 1].ln() - self.energy[n].ln()) / (cum[n + 1] - cum[n]))
            .max_by(f64::total_cmp)
    }

    /// max_n E(t_n) / (E(0)·exp(c∫_0^{t_n}Σ)); the bound holds when this is ≤ 1.
    pub fn bound_ratio(&self, c: f64) -> f64 {
        let e0 = self.energy[0];
        self.cumulative_sigma()
            .iter()
            .zip(&self.energy)
            .map(|(i, e)| e / (e0 * (c * i).exp()))
            .fold(0.0, f64::max)
    }

    /// Columns t, E, Sigma, logE.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "E", "Sigma", "logE"])?;
        for n in 0..self.times.len() {
            wr.write_record([
                format!("{:e}", self.times[n]),
                format!("{:e}", self.energy[n]),
                format!("{:e}", self.sigma[n]),
                format!("{:e}", self.energy[n].ln()),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Evolves u0 and its ε-perturbation side by side, recording E and Σ at every step.
pub fn gronwall_experiment(
    u0: &SphereField,
    perturbation: &Perturbation,
    eps: f64,
    alpha: f64,
    t_final: f64,
    dt: f64,
    method: Method,
) -> Result<EnergyTrace> {
    Ok(gronwall_pair(u0, perturbation, eps, alpha, t_final, dt, method)?.trace)
}

/// Result of [`gronwall_pair`]: the trace and both final states.
#[derive(Debug, Clone)]
pub struct PairRun {
    pub trace: EnergyTrace,
    pub u: SphereField,
    pub v: SphereField,
}

/// As [`gronwall_experiment`], keeping the final states.
pub fn gronwall_pair(
    u0: &SphereField,
    perturbation: &Perturbation,
    eps: f64,
    alpha: f64,
    t_final: f64,
    dt: f64,
    method: Method,
) -> Result<PairRun> {
    if !(eps >= 0.0) {
        return Err(Error::ParameterOutOfRange(format!("ε = {eps} must be nonnegative")));
    }
    sigma(u0, u0, alpha)?;
    let steps = step_count(t_final, dt)?;
    let mut u = u0.clone();
    let mut v = perturbation.apply(u0, eps)?;
    let mut trace = EnergyTrace {
        times: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        sigma: Vec::with_capacity(steps + 1),
        alpha,
        epsilon: eps,
        dt,
        method,
        c_star: None,
    };
    for n in 0..=steps {
        let e = pair_energy(&u, &v, &hwm_rhs(&u), &hwm_rhs(&v));
        if n == 0 && eps > 0.0 && e == 0.0 {
            return Err(Error::DegenerateEnergy);
        }
        trace.times.push(n as f64 * dt);
        trace.energy.push(e);
        trace.sigma.push(sigma(&u, &v, alpha)?);
        if n < steps {
            u = step(&u, dt, method)?;
            v = step(&v, dt, method)?;
        }
    }
    trace.c_star = trace.fit_c_star();
    Ok(PairRun { trace, u, v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::frac_laplacian;

    fn circle(n: usize) -> Arc<TorusGrid> {
        Arc::new(TorusGrid::cubic(1, n, 2.0 * PI).unwrap())
    }

    #[test]
    fn constant_map_is_still() {
        let g = circle(32);
        let q = SphereField::constant(&g, [1.0, 2.0, 2.0]).unwrap();
        assert!(hwm_rhs(&q).max_abs() < 1e-15);
        assert!(waveform_rhs(&q).max_abs() < 1e-15);
        assert!(conserved_energy(&q).abs() < 1e-15);
        let spin = total_spin(&q);
        assert!((spin[1] - 2.0 / 3.0 * 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn equator_map_is_stationary() {
        let g = circle(64);
        let u = equator_map(&g);
        assert!(hwm_rhs(&u).max_abs() < 1e-12);
        assert!((conserved_energy(&u) - 2.0 * PI).abs() < 1e-12);
        // u_tt = 0 forces the wave-form right-hand side to equal -Δu = u.
        assert!(waveform_rhs(&u).max_diff(&u) < 1e-9);
    }

    #[test]
    fn rhs_is_tangent() {
        let g = circle(64);
        let u = bump_data(&g, 1.0, 0.8, 0.5);
        let r = hwm_rhs(&u);
        assert!(r.dot(&u).max_abs() < 1e-13);
    }

    #[test]
    fn rotation_orientation_matches_equation() {
        let g = circle(64);
        let u = bump_data(&g, 1.0, 0.8, 0.5);
        let dt = 1e-6;
        let next = rotate_by(&u, &frac_laplacian_vec(&u, 1.0), dt);
        let fd = (&next - u.as_vector()).scale(1.0 / dt);
        assert!(fd.max_diff(&hwm_rhs(&u)) < 1e-5);
    }

    #[test]
    fn lie_midpoint_stays_on_sphere() {
        let g = circle(64);
        let mut u = bump_data(&g, 2.0, 0.8, 0.5);
        for _ in 0..50 {
            u = step(&u, 1e-2, Method::LieMidpoint).unwrap();
            assert!(u.defect() < 1e-13);
        }
        let r = step(&u, 1e-2, Method::Rk4Project).unwrap();
        assert!(r.defect() < 1e-13);
    }

    #[test]
    fn integrate_checks_step_multiples() {
        let g = circle(16);
        let u = equator_map(&g);
        assert!(integrate(&u, 0.1, 0.03, Method::LieMidpoint).is_err());
        let tr = integrate(&u, 0.1, 0.025, Method::LieMidpoint).unwrap();
        assert_eq!(tr.snapshots.len(), 5);
        assert!((tr.times[4] - 0.1).abs() < 1e-15);
        assert!(step(&u, 0.0, Method::LieMidpoint).is_err());
    }

    #[test]
    fn energy_forms_agree_on_band_limited_data() {
        let g = Arc::new(TorusGrid::cubic(2, 16, 2.0 * PI).unwrap());
        let u = bump_data(&g, 0.1, 1.5, 0.5);
        let v = SphereField::constant(&g, [0.0, 0.0, 1.0]).unwrap();
        let (du, dv) = (hwm_rhs(&u), hwm_rhs(&v));
        let a = pair_energy(&u, &v, &du, &dv);
        let b = pair_energy_half_laplacian(&u, &v, &du, &dv);
        assert!((a - b).abs() < 1e-6 * a);
        assert_eq!(pair_energy(&u, &u, &du, &du), 0.0);
    }

    #[test]
    fn sigma_is_symmetric_and_checks_alpha() {
        let g = circle(32);
        let u = bump_data(&g, 1.0, 0.8, 0.5);
        let v = equator_map(&g);
        assert_eq!(sigma(&u, &v, 1.25).unwrap(), sigma(&v, &u, 1.25).unwrap());
        assert!(sigma(&u, &v, 1.0).is_err());
        assert!(sigma(&u, &v, 1.5).is_err());
    }

    #[test]
    fn trace_fit_and_bound() {
        let trace = EnergyTrace {
            times: vec![0.0, 1.0, 2.0],
            energy: vec![1.0, 2.0, 2.0],
            sigma: vec![1.0, 1.0, 1.0],
            alpha: 1.25,
            epsilon: 1.0,
            dt: 1.0,
            method: Method::LieMidpoint,
            c_star: None,
        };
        let c = trace.fit_c_star().unwrap();
        assert!((c - 2f64.ln()).abs() < 1e-15);
        assert!(trace.bound_ratio(c) <= 1.0 + 1e-15);
        assert!(trace.bound_ratio(0.0) > 1.5);
    }

    #[test]
    fn half_laplacian_symbol_at_unit_mode() {
        let g = circle(32);
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        assert!(frac_laplacian(&f, 1.0).max_diff(&f) < 1e-13);
    }

    #[test]
    fn pair_energy_is_quadratic_in_the_perturbation() {
        let g = circle(64);
        let u = bump_data(&g, 1.0, 0.8, 0.5);
        let cosx = ScalarField::from_fn(&g, |x| x[0].cos());
        let energy = |eps: f64| {
            let [a, b, c] = u.comps().clone();
            let v = SphereField::normalized(&VectorField3::new([&a + &cosx.scale(eps), b, c])).unwrap();
            pair_energy(&u, &v, &hwm_rhs(&u), &hwm_rhs(&v))
        };
        for eps in [1e-2, 1e-3] {
            let r = energy(eps) / energy(eps / 2.0);
            assert!((3.9..=4.1).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn zero_perturbation_gives_identical_trajectories() {
        let g = circle(32);
        let u = bump_data(&g, 2.0, 0.8, 0.5);
        let run = gronwall_pair(&u, &Perturbation::default_for(&g), 0.0, 1.25, 0.05, 1e-2, Method::LieMidpoint).unwrap();
        assert!(run.trace.energy.iter().all(|&e| e == 0.0));
        assert_eq!(run.trace.c_star, None);
        assert!(run.trace.sigma.iter().all(|s| s.is_finite() && *s >= 0.0));
    }

    #[test]
    fn perturbation_guards() {
        let g = circle(32);
        let q = SphereField::constant(&g, [1.0, 0.0, 0.0]).unwrap();
        // rotating e1 about e1 leaves it unchanged
        let err = gronwall_experiment(&q, &Perturbation::default_for(&g), 1e-2, 1.25, 0.1, 1e-2, Method::LieMidpoint);
        assert!(matches!(err, Err(Error::DegenerateEnergy)));
        assert!(gronwall_experiment(&q, &Perturbation::default_for(&g), -1.0, 1.25, 0.1, 1e-2, Method::LieMidpoint).is_err());
    }
}
