//! Seeded random band-limited fields.
//!
//! Coefficients are drawn per lattice mode in a fixed order and do not depend
//! on the grid resolution, so the same seed gives the same function on every
//! grid that resolves the band.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{dot3, ScalarField, SphereField, VectorField3};
use crate::grid::TorusGrid;
use crate::spectral::Spectrum;

pub type FieldRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> FieldRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream label and sample index (SplitMix64 finalizer).
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Band limit and spectral decay of a random family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    /// Modes with |m_j| ≤ k_max on every axis.
    pub k_max: usize,
    /// Amplitudes scale like (1+|k|)^{-decay}; None means (d+2)/2.
    pub decay: Option<f64>,
    /// Overall factor applied to every amplitude.
    pub amplitude: f64,
}

impl BandSpec {
    pub fn new(k_max: usize) -> Self {
        Self { k_max, decay: None, amplitude: 1.0 }
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        Self { amplitude, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Mode {
    m: Vec<i64>,
    amplitude: f64,
    phase: f64,
}

/// Σ a_m cos(k_m·x + φ_m) over half of the band, m ≠ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimited {
    lengths: Vec<f64>,
    k_max: usize,
    modes: Vec<Mode>,
}

/// Lattice points of [-K, K]^d that are lexicographically positive.
fn half_band(d: usize, k: usize) -> Vec<Vec<i64>> {
    let side = 2 * k + 1;
    let total = side.pow(d as u32);
    (0..total)
        .map(|mut flat| {
            let mut m = vec![0i64; d];
            for j in (0..d).rev() {
                m[j] = (flat % side) as i64 - k as i64;
                flat /= side;
            }
            m
        })
        .filter(|m| m.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
        .collect()
}

impl BandLimited {
    /// Draws coefficients for a box with the given side lengths.
    pub fn draw(lengths: &[f64], spec: &BandSpec, rng: &mut FieldRng) -> Self {
        let d = lengths.len();
        let decay = spec.decay.unwrap_or((d as f64 + 2.0) / 2.0);
        let modes = half_band(d, spec.k_max)
            .into_iter()
            .map(|m| {
                let kabs = m
                    .iter()
                    .zip(lengths)
                    .map(|(&mj, &l)| (2.0 * PI * mj as f64 / l).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let z: f64 = rng.sample(StandardNormal);
                let phase = rng.random::<f64>() * 2.0 * PI;
                Mode { m, amplitude: spec.amplitude * z * (1.0 + kabs).powf(-decay), phase }
            })
            .collect();
        Self { lengths: lengths.to_vec(), k_max: spec.k_max, modes }
    }

    /// Samples the function on `grid`, exactly, through its Fourier coefficients.
    pub fn sample(&self, grid: &Arc<TorusGrid>) -> Result<ScalarField> {
        if grid.lengths() != self.lengths.as_slice() {
            return Err(Error::ParameterOutOfRange("grid box differs from the drawn box".into()));
        }
        if let Some(&n) = grid.sizes().iter().find(|&&n| 2 * self.k_max >= n) {
            return Err(Error::ParameterOutOfRange(format!(
                "band |m| <= {} is not resolved below Nyquist on N = {n}",
                self.k_max
            )));
        }
        let strides = grid.strides();
        let total = grid.len() as f64;
        let mut spec = Spectrum::zeros(grid);
        let coeffs = spec.coeffs_mut();
        for mode in &self.modes {
            let index = |sign: i64| -> usize {
                mode.m
                    .iter()
                    .zip(grid.sizes())
                    .zip(&strides)
                    .map(|((&mj, &n), &s)| (sign * mj).rem_euclid(n as i64) as usize * s)
                    .sum()
            };
            let c = Complex64::from_polar(0.5 * total * mode.amplitude, mode.phase);
            coeffs[index(1)] += c;
            coeffs[index(-1)] += c.conj();
        }
        Ok(spec.to_field())
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }
}

/// One random band-limited scalar field.
pub fn random_field(grid: &Arc<TorusGrid>, spec: &BandSpec, rng: &mut FieldRng) -> Result<ScalarField> {
    BandLimited::draw(grid.lengths(), spec, rng).sample(grid)
}

/// Three independent band-limited components.
pub fn random_vector_field(grid: &Arc<TorusGrid>, spec: &BandSpec, rng: &mut FieldRng) -> Result<VectorField3> {
    let a = random_field(grid, spec, rng)?;
    let b = random_field(grid, spec, rng)?;
    let c = random_field(grid, spec, rng)?;
    Ok(VectorField3::new([a, b, c]))
}

/// normalize(Q + p) with p band-limited and rescaled so that max |p| ≤ 1/2.
pub fn random_sphere_field(grid: &Arc<TorusGrid>, spec: &BandSpec, q: [f64; 3], rng: &mut FieldRng) -> Result<SphereField> {
    let p = random_vector_field(grid, spec, rng)?;
    let pmax = p.magnitude().max_abs();
    let p = if pmax > 0.5 { p.scale(0.5 / pmax) } else { p };
    let qn = dot3(q, q).sqrt();
    SphereField::normalized(&(&VectorField3::constant(grid, q.map(|c| c / qn)) + &p))
}

/// Rotates u(x) about the unit axis n(x) by the angle θ(x).
pub fn rotate_pointwise(u: &VectorField3, axis: &VectorField3, angle: &ScalarField) -> VectorField3 {
    let grid = u.grid().clone();
    let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for i in 0..grid.len() {
        let r = rodrigues(u.at(i), axis.at(i), angle.values()[i]);
        for c in 0..3 {
            out[c][i] = r[c];
        }
    }
    VectorField3::new(out.map(|v| ScalarField::new(grid.clone(), v).expect("rotation keeps values finite")))
}

/// u cos θ + (n∧u) sin θ + n (n·u)(1 - cos θ) for a unit axis n.
pub fn rodrigues(u: [f64; 3], n: [f64; 3], theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    let nu = dot3(n, u);
    let nxu = crate::field::cross(n, u);
    std::array::from_fn(|k| u[k] * c + nxu[k] * s + n[k] * nu * (1.0 - c))
}

/// Two exactly unit fields: u random, v = u rotated pointwise about a random
/// axis field by a band-limited angle of size about `angle_scale`.
pub fn random_sphere_pair(
    grid: &Arc<TorusGrid>,
    spec: &BandSpec,
    angle_scale: f64,
    rng: &mut FieldRng,
) -> Result<(SphereField, SphereField)> {
    let u = random_sphere_field(grid, spec, [0.0, 0.0, 1.0], rng)?;
    let axis = random_sphere_field(grid, spec, [1.0, 0.0, 0.0], rng)?;
    let theta = random_field(grid, spec, rng)?;
    let tmax = theta.max_abs();
    let theta = if tmax > 0.0 { theta.scale(angle_scale / tmax) } else { theta };
    let v = rotate_pointwise(&u, &axis, &theta);
    Ok((u, SphereField::new(v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_band_counts() {
        assert_eq!(half_band(1, 3).len(), 3);
        assert_eq!(half_band(3, 2).len(), (125 - 1) / 2);
        assert!(half_band(2, 1).iter().all(|m| m != &vec![0, 0]));
    }

    #[test]
    fn sampling_matches_direct_cosine_sum() {
        let grid = Arc::new(TorusGrid::new(vec![16, 12], vec![2.0 * PI, 3.0]).unwrap());
        let bl = BandLimited::draw(grid.lengths(), &BandSpec::new(2), &mut rng_from_seed(4));
        let f = bl.sample(&grid).unwrap();
        let direct = ScalarField::from_fn(&grid, |x| {
            bl.modes
                .iter()
                .map(|md| {
                    let arg: f64 = md.m.iter().zip(x).zip(grid.lengths()).map(|((&m, &xj), &l)| 2.0 * PI * m as f64 * xj / l).sum();
                    md.amplitude * (arg + md.phase).cos()
                })
                .sum()
        });
        assert!(f.max_diff(&direct) < 1e-13);
    }

    #[test]
    fn same_seed_same_function_on_finer_grid() {
        let g1 = Arc::new(TorusGrid::cubic(1, 16, 2.0 * PI).unwrap());
        let g2 = Arc::new(g1.refined(2).unwrap());
        let a = random_field(&g1, &BandSpec::new(3), &mut rng_from_seed(9)).unwrap();
        let b = random_field(&g2, &BandSpec::new(3), &mut rng_from_seed(9)).unwrap();
        for i in 0..16 {
            assert!((a.values()[i] - b.values()[2 * i]).abs() < 1e-14);
        }
    }

    #[test]
    fn unresolved_band_is_rejected() {
        let g = Arc::new(TorusGrid::cubic(1, 8, 2.0 * PI).unwrap());
        assert!(random_field(&g, &BandSpec::new(4), &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn sphere_pairs_are_unit() {
        let g = Arc::new(TorusGrid::cubic(2, 16, 2.0 * PI).unwrap());
        let (u, v) = random_sphere_pair(&g, &BandSpec::new(2), 0.5, &mut rng_from_seed(1)).unwrap();
        assert!(u.defect() < 1e-14 && v.defect() < 1e-14);
        assert!(u.max_diff(&v) > 1e-3);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_eq!(derive_seed(5, 2, 3), derive_seed(5, 2, 3));
    }
}
