//! Flat TOML experiment configuration with per-subcommand defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::commutator::FracLeibnizParams;
use crate::dynamics::{step_count, Method};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::norms::gns_theta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Identities,
    Operators,
    Inequalities,
    Simulate,
    Gronwall,
    Strichartz,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Subcommand::Identities,
        Subcommand::Operators,
        Subcommand::Inequalities,
        Subcommand::Simulate,
        Subcommand::Gronwall,
        Subcommand::Strichartz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Identities => "identities",
            Subcommand::Operators => "operators",
            Subcommand::Inequalities => "inequalities",
            Subcommand::Simulate => "simulate",
            Subcommand::Gronwall => "gronwall",
            Subcommand::Strichartz => "strichartz",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown subcommand {s:?}")))
    }
}

/// Family of initial data for time-dependent runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    /// Two offset bumps on top of e₃, normalized.
    Bump,
    /// e₃ plus a random band-limited field, normalized.
    Band,
}

/// Keys as they appear in the file; everything optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    subcommand: Option<Subcommand>,
    d: Option<usize>,
    n: Option<usize>,
    l: Option<f64>,
    seed: Option<u64>,
    samples: Option<usize>,
    k_max: Option<usize>,
    method: Option<Method>,
    dt: Option<f64>,
    t_final: Option<f64>,
    alpha: Option<Vec<f64>>,
    epsilon: Option<Vec<f64>>,
    initial_data: Option<InitialData>,
    amplitude: Option<f64>,
    width: Option<f64>,
    offset: Option<f64>,
    angle_scale: Option<f64>,
    sobolev_alpha: Option<f64>,
    sobolev_p: Option<f64>,
    gn_beta: Option<f64>,
    gn_p: Option<f64>,
    gns_beta: Option<f64>,
    gns_p: Option<f64>,
    frac_alpha: Option<f64>,
    frac_sigma: Option<f64>,
    frac_p1: Option<f64>,
    frac_p2: Option<f64>,
    kernel_n: Option<usize>,
    kernel_k_max: Option<usize>,
    refine: Option<bool>,
    snapshots: Option<usize>,
    waveform_dt: Option<f64>,
    waveform_t: Option<f64>,
    record_every: Option<usize>,
    dump: Option<bool>,
    tol_pointwise: Option<f64>,
    tol_integral: Option<f64>,
    tol_spectral: Option<f64>,
    tol_refinement: Option<f64>,
    tol_conservation: Option<f64>,
    tol_uniqueness: Option<f64>,
    ratio_min: Option<f64>,
    ratio_max: Option<f64>,
    c_star_spread: Option<f64>,
    out_dir: Option<String>,
}

/// Fully resolved settings of one run; echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub d: usize,
    pub n: usize,
    pub l: f64,
    pub seed: u64,
    pub samples: usize,
    pub k_max: usize,
    pub method: Method,
    pub dt: f64,
    pub t_final: f64,
    pub alpha: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub initial_data: InitialData,
    /// Bump height, or band amplitude, of the initial data.
    pub amplitude: f64,
    pub width: f64,
    /// Shift of the second bump along the first axis.
    pub offset: f64,
    /// Largest rotation angle between the two fields of a random pair.
    pub angle_scale: f64,
    pub sobolev_alpha: f64,
    pub sobolev_p: f64,
    pub gn_beta: f64,
    pub gn_p: f64,
    pub gns_beta: f64,
    pub gns_p: f64,
    pub frac_alpha: f64,
    pub frac_sigma: f64,
    pub frac_p1: f64,
    pub frac_p2: f64,
    /// Points of the circle grid used by the kernel quotients.
    pub kernel_n: usize,
    pub kernel_k_max: usize,
    pub refine: bool,
    pub snapshots: usize,
    /// Coarsest step of the wave-form residual study, halved twice.
    pub waveform_dt: f64,
    pub waveform_t: f64,
    pub record_every: usize,
    pub dump: bool,
    pub tol_pointwise: f64,
    pub tol_integral: f64,
    pub tol_spectral: f64,
    pub tol_refinement: f64,
    pub tol_conservation: f64,
    pub tol_uniqueness: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub c_star_spread: f64,
    pub out_dir: String,
}

impl RunConfig {
    pub fn defaults(sub: Subcommand) -> Self {
        let base = RunConfig {
            subcommand: sub,
            d: 1,
            n: 256,
            l: 2.0 * std::f64::consts::PI,
            seed: 0,
            samples: 20,
            k_max: 4,
            method: Method::LieMidpoint,
            dt: 1e-3,
            t_final: 1.0,
            alpha: vec![1.25],
            epsilon: vec![1e-2, 1e-3, 1e-4],
            initial_data: InitialData::Bump,
            amplitude: 1.0,
            width: 0.8,
            offset: 0.5,
            angle_scale: 0.5,
            sobolev_alpha: 1.0,
            sobolev_p: 2.0,
            gn_beta: 0.5,
            gn_p: 2.0,
            gns_beta: 0.75,
            gns_p: 10.0,
            frac_alpha: 1.0,
            frac_sigma: 0.5,
            frac_p1: 4.0,
            frac_p2: 4.0,
            kernel_n: 64,
            kernel_k_max: 8,
            refine: true,
            snapshots: 21,
            waveform_dt: 0.04,
            waveform_t: 0.4,
            record_every: 10,
            dump: false,
            tol_pointwise: 1e-9,
            tol_integral: 1e-8,
            tol_spectral: 1e-12,
            tol_refinement: 0.10,
            tol_conservation: 1e-6,
            tol_uniqueness: 1e-24,
            ratio_min: 3.5,
            ratio_max: 4.5,
            c_star_spread: 2.0,
            out_dir: "out".into(),
        };
        match sub {
            Subcommand::Identities => base,
            Subcommand::Operators => RunConfig { d: 3, n: 16, k_max: 3, samples: 100, ..base },
            Subcommand::Inequalities => RunConfig { d: 3, n: 16, k_max: 2, samples: 200, ..base },
            Subcommand::Simulate => RunConfig { n: 128, amplitude: 3.0, ..base },
            Subcommand::Gronwall => RunConfig { d: 3, n: 16, t_final: 0.5, ..base },
            Subcommand::Strichartz => RunConfig {
                d: 4,
                n: 16,
                k_max: 2,
                alpha: vec![0.75, 1.0, 1.5],
                tol_refinement: 0.05,
                ..base
            },
        }
    }

    /// Parses a config file for `sub`; keys absent from the file keep their defaults.
    pub fn from_toml_str(sub: Subcommand, text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(s) = raw.subcommand {
            if s != sub {
                return Err(Error::Config(format!("file is for subcommand {s}, not {sub}")));
            }
        }
        let mut c = Self::defaults(sub);
        macro_rules! merge {
            ($($f:ident),*) => { $( if let Some(v) = raw.$f { c.$f = v; } )* };
        }
        merge!(
            d, n, l, seed, samples, k_max, method, dt, t_final, alpha, epsilon, initial_data, amplitude, width, offset,
            angle_scale, sobolev_alpha, sobolev_p, gn_beta, gn_p, gns_beta, gns_p, frac_alpha, frac_sigma,
            frac_p1, frac_p2, kernel_n, kernel_k_max, refine, snapshots, waveform_dt, waveform_t, record_every, dump, tol_pointwise,
            tol_integral, tol_spectral, tol_refinement, tol_conservation, tol_uniqueness, ratio_min,
            ratio_max, c_star_spread, out_dir
        );
        Ok(c)
    }

    pub fn from_file(sub: Subcommand, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(sub, &text)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::cubic(self.d, self.n, self.l)
    }

    /// Checks every parameter the subcommand uses against its hypotheses.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        self.grid().map_err(|e| Error::Config(e.to_string()))?;
        if self.samples == 0 {
            return fail("samples must be positive".into());
        }
        let tols = [
            self.tol_pointwise,
            self.tol_integral,
            self.tol_spectral,
            self.tol_refinement,
            self.tol_conservation,
            self.tol_uniqueness,
        ];
        if tols.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return fail("tolerances must be positive and finite".into());
        }
        if !(self.ratio_min < self.ratio_max) {
            return fail("ratio_min must be below ratio_max".into());
        }
        let d = self.d as f64;
        let band_ok = |k: usize, n: usize| 2 * k < n;
        match self.subcommand {
            Subcommand::Identities => {
                if self.d != 1 {
                    return fail("the identity suite evaluates singular integrals in closed form and needs d = 1".into());
                }
                if !band_ok(self.k_max, self.n) {
                    return fail(format!("band k_max = {} not resolved on N = {}", self.k_max, self.n));
                }
            }
            Subcommand::Operators => {
                if !band_ok(self.k_max, self.n) {
                    return fail(format!("band k_max = {} not resolved on N = {}", self.k_max, self.n));
                }
            }
            Subcommand::Inequalities => {
                if self.d < 2 {
                    return fail("the commutator estimates need d >= 2".into());
                }
                if !band_ok(self.k_max, self.n) || !band_ok(self.kernel_k_max, self.kernel_n) {
                    return fail("random band not resolved on the chosen grids".into());
                }
                if !(self.sobolev_alpha > 0.0 && self.sobolev_alpha < d) {
                    return fail(format!("Sobolev inequality needs 0 < α < d, got α = {}", self.sobolev_alpha));
                }
                if !(self.sobolev_p > 1.0 && self.sobolev_p < d / self.sobolev_alpha) {
                    return fail(format!("Sobolev inequality needs 1 < p < d/α, got p = {}", self.sobolev_p));
                }
                if !(self.gn_beta > 0.0 && self.gn_beta < 1.0) {
                    return fail(format!("interpolation inequality needs 0 < β < 1, got β = {}", self.gn_beta));
                }
                if !(self.gn_p > 1.0 && self.gn_p.is_finite()) {
                    return fail(format!("interpolation inequality needs 1 < p < ∞, got p = {}", self.gn_p));
                }
                gns_theta(self.d, self.gns_beta, self.gns_p).map_err(|e| Error::Config(format!("Sobolev interpolation: {e}")))?;
                self.frac_params()
                    .validate()
                    .map_err(|e| Error::Config(format!("fractional Leibniz rule: {e}")))?;
                if self.kernel_n < 16 {
                    return fail("kernel_n must be at least 16".into());
                }
            }
            Subcommand::Simulate => {
                step_count(self.t_final, self.dt).map_err(|e| Error::Config(e.to_string()))?;
                step_count(self.waveform_t, self.waveform_dt / 4.0).map_err(|e| Error::Config(e.to_string()))?;
                if self.initial_data == InitialData::Band && !band_ok(self.k_max, self.n) {
                    return fail(format!("band k_max = {} not resolved on N = {}", self.k_max, self.n));
                }
                if self.record_every == 0 {
                    return fail("record_every must be positive".into());
                }
            }
            Subcommand::Gronwall => {
                step_count(self.t_final, self.dt).map_err(|e| Error::Config(e.to_string()))?;
                if self.alpha.is_empty() || self.epsilon.is_empty() {
                    return fail("alpha and epsilon lists must be non-empty".into());
                }
                for &a in &self.alpha {
                    if !(a > 1.0 && a < d + 0.5) {
                        return fail(format!("difference-energy bound needs 1 < α < d + 1/2, got α = {a}"));
                    }
                }
                if self.epsilon.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
                    return fail("perturbation sizes ε must be nonnegative".into());
                }
                if !(self.c_star_spread >= 1.0) {
                    return fail("c_star_spread must be at least 1".into());
                }
            }
            Subcommand::Strichartz => {
                if self.d < 4 {
                    return fail(format!("Strichartz estimate needs d >= 4, got d = {}", self.d));
                }
                if self.alpha.is_empty() {
                    return fail("alpha list must be non-empty".into());
                }
                for &a in &self.alpha {
                    if !(a > 0.5 && a < d + 0.5) {
                        return fail(format!("space Lorentz exponent 2d/(2α-1) needs 1/2 < α < d + 1/2, got α = {a}"));
                    }
                }
                if self.snapshots < 2 || !(self.t_final > 0.0) {
                    return fail("need at least two time snapshots and T > 0".into());
                }
                if !band_ok(self.k_max, self.n / 2) && self.refine {
                    return fail("band must be resolved on the coarse refinement grid N/2".into());
                }
            }
        }
        Ok(())
    }

    pub fn frac_params(&self) -> FracLeibnizParams {
        FracLeibnizParams { alpha: self.frac_alpha, sigma: self.frac_sigma, p1: self.frac_p1, p2: self.frac_p2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for sub in Subcommand::ALL {
            RunConfig::defaults(sub).validate().unwrap();
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml_str(Subcommand::Gronwall, "dtt = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("dtt"));
    }

    #[test]
    fn keys_override_defaults() {
        let c = RunConfig::from_toml_str(Subcommand::Gronwall, "dt = 0.01\nalpha = [1.1, 1.5]\nmethod = \"rk4_project\"\n").unwrap();
        assert_eq!(c.dt, 0.01);
        assert_eq!(c.alpha, vec![1.1, 1.5]);
        assert_eq!(c.method, Method::Rk4Project);
        assert_eq!(c.n, 16);
    }

    #[test]
    fn mismatched_subcommand() {
        assert!(RunConfig::from_toml_str(Subcommand::Simulate, "subcommand = \"gronwall\"\n").is_err());
    }

    #[test]
    fn hypotheses_are_named() {
        let c = RunConfig::from_toml_str(Subcommand::Inequalities, "sobolev_alpha = 3.5\n").unwrap();
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("Sobolev") && msg.contains("0 < α < d"), "{msg}");
        let c = RunConfig::from_toml_str(Subcommand::Gronwall, "alpha = [0.9]\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("1 < α"));
        let c = RunConfig::from_toml_str(Subcommand::Strichartz, "d = 3\nn = 16\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("d >= 4"));
    }
}
