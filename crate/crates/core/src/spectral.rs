//! Fourier-multiplier operators on periodic grids.
//!
//! Every operator is the exact multiplier of its symbol on the discrete
//! wavenumber lattice. Odd symbols zero the Nyquist plane of their axis so
//! real input stays real.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField3};
use crate::grid::{TorusGrid, MAX_DIM};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place d-dimensional DFT over row-major `data`. The inverse is normalized.
fn transform(data: &mut [Complex64], sizes: &[usize], inverse: bool) {
    let total = data.len();
    let mut stride = total;
    for &n in sizes {
        stride /= n;
        let fft = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            if inverse {
                p.plan_fft_inverse(n)
            } else {
                p.plan_fft_forward(n)
            }
        });
        if stride == 1 {
            fft.process(data);
            continue;
        }
        let mut buf = vec![Complex64::default(); n * stride];
        for block in data.chunks_mut(n * stride) {
            for k in 0..n {
                for s in 0..stride {
                    buf[s * n + k] = block[k * stride + s];
                }
            }
            fft.process(&mut buf);
            for k in 0..n {
                for s in 0..stride {
                    block[k * stride + s] = buf[s * n + k];
                }
            }
        }
    }
    if inverse {
        let scale = 1.0 / total as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }
}

/// Calls `f(flat, idx)` for every lattice point in storage order.
pub(crate) fn for_each_index(grid: &TorusGrid, mut f: impl FnMut(usize, &[usize])) {
    let d = grid.dim();
    let sizes = grid.sizes();
    let mut idx = [0usize; MAX_DIM];
    for flat in 0..grid.len() {
        f(flat, &idx[..d]);
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < sizes[j] {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Discrete Fourier coefficients of a real field.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Arc<TorusGrid>,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn forward(f: &ScalarField) -> Self {
        let mut coeffs: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(&mut coeffs, f.grid().sizes(), false);
        Self { grid: f.grid().clone(), coeffs }
    }

    pub fn from_coeffs(grid: Arc<TorusGrid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Inverse transform, keeping the real part.
    pub fn to_field(&self) -> ScalarField {
        let mut data = self.coeffs.clone();
        transform(&mut data, self.grid.sizes(), true);
        ScalarField::from_raw(self.grid.clone(), data.into_iter().map(|c| c.re).collect())
    }

    /// Mean of the represented field.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / self.grid.len() as f64
    }

    /// Multiplies every coefficient by `weights[i]`.
    pub fn weighted(&self, weights: &[f64]) -> Self {
        let coeffs = self.coeffs.iter().zip(weights).map(|(c, w)| c * w).collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// self + w · other.
    pub fn add_scaled(&mut self, w: f64, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * w;
        }
    }

    /// Applies a multiplier in spectral space.
    pub fn multiplied(&self, m: &SpectralMultiplier) -> Result<Self> {
        let grid = &self.grid;
        let d = grid.dim();
        let mut coeffs = self.coeffs.clone();
        let zero_mode = match m.policy {
            ZeroModePolicy::Zero => Complex64::new(0.0, 0.0),
            ZeroModePolicy::IdentityOnMean => Complex64::new(1.0, 0.0),
            ZeroModePolicy::Limit => m.symbol.limit_at_zero().ok_or_else(|| {
                Error::ParameterOutOfRange(format!("{:?} has no limit at k = 0", m.symbol))
            })?,
            ZeroModePolicy::ErrorIfMeanNonzero => {
                let mean = self.mean();
                let threshold = 1e-10 * self.to_field().max_abs();
                if mean.abs() > threshold {
                    return Err(Error::MeanNotZero { mean, threshold });
                }
                Complex64::new(0.0, 0.0)
            }
        };
        if let Symbol::FracLaplacian(s) = m.symbol {
            if s < 0.0 {
                return Err(Error::ParameterOutOfRange(format!(
                    "fractional Laplacian order {s} < 0; use the Riesz potential"
                )));
            }
        }
        let ks: Vec<Vec<f64>> =
            (0..d).map(|j| (0..grid.sizes()[j]).map(|i| grid.wavenumber(j, i)).collect()).collect();
        for_each_index(grid, |flat, idx| {
            if flat == 0 {
                coeffs[0] *= zero_mode;
                return;
            }
            let mut k2 = 0.0;
            for j in 0..d {
                k2 += ks[j][idx[j]] * ks[j][idx[j]];
            }
            let kabs = k2.sqrt();
            let v = match m.symbol {
                Symbol::FracLaplacian(s) => Complex64::new(kabs.powf(s), 0.0),
                Symbol::RieszPotential(s) => Complex64::new(kabs.powf(-s), 0.0),
                Symbol::Laplacian => Complex64::new(-k2, 0.0),
                Symbol::RieszTransform(a) => {
                    if grid.is_nyquist(a, idx[a]) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, ks[a][idx[a]] / kabs)
                    }
                }
                Symbol::PartialDerivative(a) => {
                    if grid.is_nyquist(a, idx[a]) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, ks[a][idx[a]])
                    }
                }
                Symbol::WaveCos(t) => Complex64::new((t * kabs).cos(), 0.0),
                Symbol::WaveSinc(t) => Complex64::new((t * kabs).sin() / kabs, 0.0),
            };
            coeffs[flat] *= v;
        });
        Ok(Self { grid: self.grid.clone(), coeffs })
    }
}

/// Fourier symbols of the supported operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    /// |k|^s, s ≥ 0.
    FracLaplacian(f64),
    /// |k|^{-s}.
    RieszPotential(f64),
    /// i k_j / |k|.
    RieszTransform(usize),
    /// i k_j.
    PartialDerivative(usize),
    /// -|k|².
    Laplacian,
    /// cos(t|k|).
    WaveCos(f64),
    /// sin(t|k|)/|k|.
    WaveSinc(f64),
}

impl Symbol {
    /// Continuous extension of the symbol to k = 0, where one exists.
    pub fn limit_at_zero(&self) -> Option<Complex64> {
        let re = |v: f64| Some(Complex64::new(v, 0.0));
        match *self {
            Symbol::FracLaplacian(s) if s == 0.0 => re(1.0),
            Symbol::FracLaplacian(s) if s > 0.0 => re(0.0),
            Symbol::FracLaplacian(_) | Symbol::RieszPotential(_) | Symbol::RieszTransform(_) => None,
            Symbol::PartialDerivative(_) | Symbol::Laplacian => re(0.0),
            Symbol::WaveCos(_) => re(1.0),
            Symbol::WaveSinc(t) => re(t),
        }
    }

    fn is_odd(&self) -> bool {
        matches!(self, Symbol::RieszTransform(_) | Symbol::PartialDerivative(_))
    }
}

/// Treatment of the k = 0 coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// Drop the mean.
    Zero,
    /// Pass the mean through unchanged.
    IdentityOnMean,
    /// Refuse input whose mean exceeds 1e-10·‖f‖_∞, otherwise drop it.
    ErrorIfMeanNonzero,
    /// Use the symbol's continuous extension to k = 0.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMultiplier {
    pub symbol: Symbol,
    pub policy: ZeroModePolicy,
}

impl SpectralMultiplier {
    /// The symbol with its default zero-mode policy.
    pub fn new(symbol: Symbol) -> Self {
        let policy = match symbol {
            Symbol::RieszPotential(_) => ZeroModePolicy::ErrorIfMeanNonzero,
            Symbol::RieszTransform(_) => ZeroModePolicy::Zero,
            _ => ZeroModePolicy::Limit,
        };
        Self { symbol, policy }
    }

    pub fn with_policy(symbol: Symbol, policy: ZeroModePolicy) -> Self {
        Self { symbol, policy }
    }

    pub fn is_odd(&self) -> bool {
        self.symbol.is_odd()
    }
}

fn check_axis(f: &ScalarField, axis: usize) -> Result<()> {
    if axis >= f.grid().dim() {
        return Err(Error::ParameterOutOfRange(format!(
            "axis {axis} on a {}-dimensional grid",
            f.grid().dim()
        )));
    }
    Ok(())
}

/// Inverse transform of symbol(k)·f̂(k).
pub fn apply_multiplier(f: &ScalarField, m: &SpectralMultiplier) -> Result<ScalarField> {
    match m.symbol {
        Symbol::RieszTransform(a) | Symbol::PartialDerivative(a) => check_axis(f, a)?,
        Symbol::RieszPotential(s) => {
            let d = f.grid().dim() as f64;
            if !(s > 0.0 && s < d) {
                return Err(Error::ParameterOutOfRange(format!(
                    "Riesz potential order {s} outside (0, {d})"
                )));
            }
        }
        _ => {}
    }
    Ok(Spectrum::forward(f).multiplied(m)?.to_field())
}

/// D^s f with symbol |k|^s.
///
/// # Panics
/// If `s < 0`.
pub fn frac_laplacian(f: &ScalarField, s: f64) -> ScalarField {
    assert!(s >= 0.0, "fractional Laplacian order must be nonnegative");
    Spectrum::forward(f)
        .multiplied(&SpectralMultiplier::new(Symbol::FracLaplacian(s)))
        .expect("nonnegative order has a limit at k = 0")
        .to_field()
}

/// I^s f with symbol |k|^{-s}. Fails unless f has zero mean.
pub fn riesz_potential(f: &ScalarField, s: f64) -> Result<ScalarField> {
    apply_multiplier(f, &SpectralMultiplier::new(Symbol::RieszPotential(s)))
}

/// I^s (f - mean f).
pub fn riesz_potential_mean_free(f: &ScalarField, s: f64) -> Result<ScalarField> {
    apply_multiplier(
        f,
        &SpectralMultiplier::with_policy(Symbol::RieszPotential(s), ZeroModePolicy::Zero),
    )
}

pub fn riesz_transform(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    apply_multiplier(f, &SpectralMultiplier::new(Symbol::RieszTransform(axis)))
}

pub fn partial(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    apply_multiplier(f, &SpectralMultiplier::new(Symbol::PartialDerivative(axis)))
}

/// (∂_1 f, .., ∂_d f), sharing one forward transform.
pub fn gradient(f: &ScalarField) -> Vec<ScalarField> {
    let spec = Spectrum::forward(f);
    (0..f.grid().dim())
        .map(|j| {
            spec.multiplied(&SpectralMultiplier::new(Symbol::PartialDerivative(j)))
                .expect("derivative symbol is total")
                .to_field()
        })
        .collect()
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    Spectrum::forward(f)
        .multiplied(&SpectralMultiplier::new(Symbol::Laplacian))
        .expect("Laplacian symbol is total")
        .to_field()
}

/// Componentwise D^s.
pub fn frac_laplacian_vec(u: &VectorField3, s: f64) -> VectorField3 {
    u.map_comps(|c| frac_laplacian(c, s))
}

/// Componentwise Δ.
pub fn laplacian_vec(u: &VectorField3) -> VectorField3 {
    u.map_comps(laplacian)
}

/// Σ_j |∂_j u|², summed over components.
pub fn gradient_energy_density(u: &VectorField3) -> ScalarField {
    let mut acc = ScalarField::zeros(u.grid());
    for c in u.comps() {
        for g in gradient(c) {
            acc = &acc + &(&g * &g);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> Arc<TorusGrid> {
        Arc::new(TorusGrid::cubic(1, n, 2.0 * PI).unwrap())
    }

    #[test]
    fn transform_round_trip() {
        let g = Arc::new(TorusGrid::new(vec![8, 10, 12], vec![1.0, 2.0, 3.0]).unwrap());
        let f = ScalarField::from_fn(&g, |x| (x[0] * 3.0).sin() + x[1] * x[2]);
        let back = Spectrum::forward(&f).to_field();
        assert!(back.max_diff(&f) < 1e-12);
    }

    #[test]
    fn half_laplacian_of_cos() {
        let g = grid1(64);
        let f = ScalarField::from_fn(&g, |x| x[0].cos());
        assert!(frac_laplacian(&f, 1.0).max_diff(&f) < 1e-12);
    }

    #[test]
    fn constants_are_annihilated() {
        let g = grid1(16);
        let f = ScalarField::constant(&g, 2.5);
        for s in [0.3, 1.0, 1.7] {
            assert!(frac_laplacian(&f, s).max_abs() < 1e-14);
        }
        assert!(frac_laplacian(&f, 0.0).max_diff(&f) < 1e-14);
    }

    #[test]
    fn riesz_potential_of_cos2x() {
        let g = grid1(32);
        let f = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos());
        let r = riesz_potential(&f, 0.5).unwrap();
        assert!(r.max_diff(&f.scale(0.5f64.sqrt())) < 1e-13);
    }

    #[test]
    fn riesz_potential_refuses_mean() {
        let g = grid1(32);
        let f = ScalarField::from_fn(&g, |x| 1.0 + x[0].cos());
        assert!(matches!(riesz_potential(&f, 0.5), Err(Error::MeanNotZero { .. })));
        let r = riesz_potential_mean_free(&f, 0.5).unwrap();
        assert!(r.max_diff(&ScalarField::from_fn(&g, |x| x[0].cos())) < 1e-13);
        assert!(riesz_potential(&f, 1.5).is_err());
    }

    #[test]
    fn gradient_of_cos_is_minus_sin() {
        let g = grid1(32);
        let f = ScalarField::from_fn(&g, |x| x[0].cos());
        let expect = ScalarField::from_fn(&g, |x| -x[0].sin());
        assert!(gradient(&f)[0].max_diff(&expect) < 1e-12);
    }

    #[test]
    fn odd_symbols_drop_nyquist() {
        let g = grid1(8);
        let f = ScalarField::from_fn(&g, |x| (4.0 * x[0]).cos());
        assert!(partial(&f, 0).unwrap().max_abs() < 1e-15);
        assert!(riesz_transform(&f, 0).unwrap().max_abs() < 1e-15);
        assert!(frac_laplacian(&f, 1.0).max_diff(&f.scale(4.0)) < 1e-12);
    }

    #[test]
    fn bad_axis_is_an_error() {
        let g = grid1(8);
        let f = ScalarField::zeros(&g);
        assert!(partial(&f, 1).is_err());
        assert!(apply_multiplier(&f, &SpectralMultiplier::new(Symbol::FracLaplacian(-1.0))).is_err());
    }

    #[test]
    fn wave_symbols_at_zero_mode() {
        let g = grid1(8);
        let f = ScalarField::constant(&g, 1.0);
        let s = apply_multiplier(&f, &SpectralMultiplier::new(Symbol::WaveSinc(0.7))).unwrap();
        assert!(s.max_diff(&ScalarField::constant(&g, 0.7)) < 1e-15);
        let c = apply_multiplier(&f, &SpectralMultiplier::new(Symbol::WaveCos(0.7))).unwrap();
        assert!(c.max_diff(&f) < 1e-15);
    }
}
