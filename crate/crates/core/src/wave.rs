//! Linear wave equation (∂_tt - Δ)u = h on the torus: exact spectral
//! propagator, Duhamel quadrature, and a Strichartz-type quotient.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::TorusGrid;
use crate::norms::{lorentz_norm, lp_norm, LorentzParams};
use crate::spectral::{frac_laplacian, Spectrum};

/// Position and velocity at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub f: ScalarField,
    pub g: ScalarField,
    pub t: f64,
}

/// Propagator weights at time t: (cos, sin/|k|, -|k| sin) with limits at k = 0.
fn weights(grid: &TorusGrid, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = grid.wavenumber_magnitudes();
    let c = k.iter().map(|&k| (t * k).cos()).collect();
    let s = k.iter().map(|&k| if k == 0.0 { t } else { (t * k).sin() / k }).collect();
    let ds = k.iter().map(|&k| -k * (t * k).sin()).collect();
    (c, s, ds)
}

fn combine(a: &Spectrum, wa: &[f64], b: &Spectrum, wb: &[f64]) -> Spectrum {
    let coeffs = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .zip(wa.iter().zip(wb))
        .map(|((x, y), (p, q))| x * *p + y * *q)
        .collect();
    Spectrum::from_coeffs(a.grid().clone(), coeffs)
}

fn free_spectral(fh: &Spectrum, gh: &Spectrum, t: f64) -> (Spectrum, Spectrum) {
    let (c, s, ds) = weights(fh.grid(), t);
    (combine(fh, &c, gh, &s), combine(fh, &ds, gh, &c))
}

/// Solution of the homogeneous equation with u(0) = f, ∂_t u(0) = g.
pub fn free_wave(f: &ScalarField, g: &ScalarField, t: f64) -> WaveState {
    let (u, v) = free_spectral(&Spectrum::forward(f), &Spectrum::forward(g), t);
    WaveState { f: u.to_field(), g: v.to_field(), t }
}

fn check_forcing(forcing: &[ScalarField], ds: f64) -> Result<()> {
    if forcing.is_empty() {
        return Err(Error::ParameterOutOfRange("forcing needs at least one sample".into()));
    }
    if forcing.len() > 1 && !(ds > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("forcing step {ds} must be positive")));
    }
    Ok(())
}

/// States at every forcing sample time s_n = n·ds, with the Duhamel integral
/// ∫_0^{s_n} S(s_n - s) h(s) ds done by the trapezoid rule on the samples.
pub fn duhamel_trajectory(f: &ScalarField, g: &ScalarField, forcing: &[ScalarField], ds: f64) -> Result<Vec<WaveState>> {
    check_forcing(forcing, ds)?;
    let fh = Spectrum::forward(f);
    let gh = Spectrum::forward(g);
    let hh: Vec<Spectrum> = forcing.iter().map(Spectrum::forward).collect();
    let mut out = Vec::with_capacity(forcing.len());
    for n in 0..forcing.len() {
        let t = n as f64 * ds;
        let (mut u, mut v) = free_spectral(&fh, &gh, t);
        for (j, h) in hh.iter().enumerate().take(n + 1) {
            let w = if j == 0 || j == n { 0.5 * ds } else { ds };
            let (c, s, _) = weights(h.grid(), t - j as f64 * ds);
            u.add_scaled(w, &h.weighted(&s));
            v.add_scaled(w, &h.weighted(&c));
        }
        out.push(WaveState { f: u.to_field(), g: v.to_field(), t });
    }
    Ok(out)
}

/// State at the last forcing sample time.
pub fn duhamel(f: &ScalarField, g: &ScalarField, forcing: &[ScalarField], ds: f64) -> Result<WaveState> {
    let mut traj = duhamel_trajectory(f, g, forcing, ds)?;
    Ok(traj.pop().expect("non-empty forcing"))
}

/// ‖D^α u‖_{L²_t L^{(2d/(2α-1),2)}_x} / (‖D^{d/2}f‖₂ + ‖D^{d/2-1}g‖₂ + ‖D^{d/2-1}h‖_{L¹_t L²_x})
/// for the forced solution on [0, (n-1)ds], with time integrals by the trapezoid rule.
pub fn strichartz_quotient(f: &ScalarField, g: &ScalarField, forcing: &[ScalarField], ds: f64, alpha: f64) -> Result<f64> {
    Ok(strichartz_quotients(f, g, forcing, ds, &[alpha])?[0])
}

/// [`strichartz_quotient`] for several orders sharing one solve.
pub fn strichartz_quotients(
    f: &ScalarField,
    g: &ScalarField,
    forcing: &[ScalarField],
    ds: f64,
    alphas: &[f64],
) -> Result<Vec<f64>> {
    let d = f.grid().dim();
    if d < 4 {
        return Err(Error::ParameterOutOfRange(format!("Strichartz probe needs d >= 4, got d = {d}")));
    }
    let df = d as f64;
    for &alpha in alphas {
        if !(alpha > 0.5 && alpha < df + 0.5) {
            return Err(Error::ParameterOutOfRange(format!("α = {alpha} outside (1/2, {})", df + 0.5)));
        }
    }
    let states = duhamel_trajectory(f, g, forcing, ds)?;
    let h_norms: Vec<f64> = forcing.iter().map(|h| lp_norm(&frac_laplacian(h, 0.5 * df - 1.0), 2.0)).collect();
    let rhs = lp_norm(&frac_laplacian(f, 0.5 * df), 2.0)
        + lp_norm(&frac_laplacian(g, 0.5 * df - 1.0), 2.0)
        + trapezoid(&h_norms, ds);
    alphas
        .iter()
        .map(|&alpha| {
            let lor = LorentzParams::finite(2.0 * df / (2.0 * alpha - 1.0), 2.0)?;
            let lhs_sq: Vec<f64> = states
                .iter()
                .map(|s| lorentz_norm(&frac_laplacian(&s.f, alpha), lor).powi(2))
                .collect();
            let lhs = trapezoid(&lhs_sq, ds).sqrt();
            Ok(if lhs == 0.0 { 0.0 } else { lhs / rhs })
        })
        .collect()
}

fn trapezoid(v: &[f64], h: f64) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => h * (v[1..n - 1].iter().sum::<f64>() + 0.5 * (v[0] + v[n - 1])),
    }
}

/// Forcing samples h₀(x)·cos(s) at s = 0, ds, ..., (n-1)ds.
pub fn cosine_forcing(h0: &ScalarField, ds: f64, n: usize) -> Vec<ScalarField> {
    (0..n).map(|j| h0.scale((j as f64 * ds).cos())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use crate::spectral::gradient_energy_density;
    use crate::field::VectorField3;
    use std::f64::consts::PI;

    fn circle(n: usize) -> Arc<TorusGrid> {
        Arc::new(TorusGrid::cubic(1, n, 2.0 * PI).unwrap())
    }

    #[test]
    fn single_mode_is_exact() {
        let g = Arc::new(TorusGrid::cubic(2, 16, 2.0 * PI).unwrap());
        let f = ScalarField::from_fn(&g, |x| (3.0 * x[0] + 4.0 * x[1]).cos());
        let st = free_wave(&f, &ScalarField::zeros(&g), 0.7);
        assert!(st.f.max_diff(&f.scale((0.7f64 * 5.0).cos())) < 1e-12);
        assert!(st.g.max_diff(&f.scale(-5.0 * (0.7f64 * 5.0).sin())) < 1e-12);
    }

    #[test]
    fn zero_mode_moves_linearly() {
        let g = circle(16);
        let st = free_wave(&ScalarField::constant(&g, 1.0), &ScalarField::constant(&g, 2.0), 3.0);
        assert!(st.f.max_diff(&ScalarField::constant(&g, 7.0)) < 1e-13);
        assert!(st.g.max_diff(&ScalarField::constant(&g, 2.0)) < 1e-13);
    }

    #[test]
    fn energy_and_reversal() {
        let g = circle(64);
        let f = ScalarField::from_fn(&g, |x| (x[0]).sin() + 0.2 * (3.0 * x[0]).cos());
        let v = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos() - 0.1 * (5.0 * x[0]).sin());
        let energy = |s: &WaveState| {
            let z = ScalarField::zeros(&g);
            let gv = gradient_energy_density(&VectorField3::new([s.f.clone(), z.clone(), z]));
            gv.integral() + s.g.inner(&s.g)
        };
        let s0 = WaveState { f: f.clone(), g: v.clone(), t: 0.0 };
        let s1 = free_wave(&f, &v, 2.3);
        assert!((energy(&s1) - energy(&s0)).abs() < 1e-11);
        let back = free_wave(&s1.f, &-&s1.g, 2.3);
        assert!(back.f.max_diff(&f) < 1e-11);
        assert!(back.g.max_diff(&-&v) < 1e-11);
    }

    #[test]
    fn manufactured_solution_converges() {
        let g = circle(32);
        let cosx = ScalarField::from_fn(&g, |x| x[0].cos());
        let err = |n: usize| {
            let ds = 1.0 / n as f64;
            let forcing: Vec<_> = (0..=n).map(|j| cosx.scale(-3.0 * (2.0 * j as f64 * ds).cos())).collect();
            let st = duhamel(&cosx, &ScalarField::zeros(&g), &forcing, ds).unwrap();
            st.f.max_diff(&cosx.scale(2f64.cos()))
        };
        let (e1, e2) = (err(20), err(40));
        assert!(e1 < 1e-2);
        let r = e1 / e2;
        assert!((3.5..4.5).contains(&r), "ratio {r}");
    }

    #[test]
    fn duhamel_without_forcing_is_free() {
        let g = circle(32);
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        let v = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos() + 0.5);
        let forcing = vec![ScalarField::zeros(&g); 5];
        let a = duhamel(&f, &v, &forcing, 0.25).unwrap();
        let b = free_wave(&f, &v, 1.0);
        assert!(a.f.max_diff(&b.f) < 1e-14 && a.g.max_diff(&b.g) < 1e-14);
    }

    #[test]
    fn strichartz_guards() {
        let g = circle(16);
        let z = ScalarField::zeros(&g);
        assert!(strichartz_quotient(&z, &z, &[z.clone()], 0.1, 1.0).is_err());
        let g4 = Arc::new(TorusGrid::cubic(4, 8, 2.0 * PI).unwrap());
        let z4 = ScalarField::zeros(&g4);
        assert_eq!(strichartz_quotient(&z4, &z4, &[z4.clone(), z4.clone()], 0.1, 1.0).unwrap(), 0.0);
        assert!(strichartz_quotient(&z4, &z4, &[z4.clone()], 0.1, 0.5).is_err());
    }

    #[test]
    fn trapezoid_rule() {
        assert_eq!(trapezoid(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(trapezoid(&[4.0], 0.5), 0.0);
    }
}
