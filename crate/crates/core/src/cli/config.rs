//! JSON run configuration. Every field has a default; unknown keys are
//! rejected. The defaults describe the constrained ε = +1 reference state
//! ν = (0.3, −0.3), l = 1, λ = +2, m_s = +1, ϑ = 0.6.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angular::{ab_constrain, AngularIndex, AngularMode};
use crate::dunkl_ops::{DunklParams, ParitySector};
use crate::ermakov::{ProfileSpec, TimeProfiles, DEFAULT_DT_OUT};
use crate::error::{Error, Result};
use crate::radial::FluxSpin;
use crate::scalar::Sign;
use crate::solution::StateSpec;

/// A ±1 written as a JSON integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct IntSign(pub Sign);

impl TryFrom<i32> for IntSign {
    type Error = String;

    fn try_from(v: i32) -> std::result::Result<Self, String> {
        Sign::from_i32(v).map(IntSign).ok_or_else(|| format!("expected +1 or -1, got {v}"))
    }
}

impl From<IntSign> for i32 {
    fn from(s: IntSign) -> i32 {
        s.0.as_i32()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub nu1: f64,
    pub nu2: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self { nu1: 0.3, nu2: -0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SectorConfig {
    pub eps1: IntSign,
    pub eps2: IntSign,
}

impl Default for SectorConfig {
    fn default() -> Self {
        Self { eps1: IntSign(Sign::Plus), eps2: IntSign(Sign::Plus) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxConfig {
    pub vartheta: f64,
    pub m_s: IntSign,
}

impl Default for FluxConfig {
    fn default() -> Self {
        Self { vartheta: 0.6, m_s: IntSign(Sign::Plus) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateConfig {
    pub n: usize,
    /// Integer for ε = +1, half-odd for ε = −1.
    pub l: f64,
    pub sign: IntSign,
}

impl Default for StateConfig {
    fn default() -> Self {
        Self { n: 0, l: 1.0, sign: IntSign(Sign::Plus) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub n_max: usize,
    pub l_max: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { n_max: 4, l_max: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErmakovConfig {
    /// Defaults to the equilibrium seed (M(0)Ω(0))^{−½}.
    pub rho0: Option<f64>,
    pub rho_dot0: Option<f64>,
    pub t_end: f64,
    pub tol: f64,
    pub dt_out: f64,
}

impl Default for ErmakovConfig {
    fn default() -> Self {
        Self { rho0: None, rho_dot0: None, t_end: 10.0, tol: 1e-10, dt_out: DEFAULT_DT_OUT }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Angular grid for the J² identity and the dense angular oracle.
    pub angular_n: usize,
    /// Angular grid for eigenpair residuals.
    pub mode_n: usize,
    pub radial_n: usize,
    pub xi_max: f64,
    pub oracle_n_max: usize,
    pub t_algebra_n: usize,
    pub t_algebra_xi_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            angular_n: 128,
            mode_n: 256,
            radial_n: 8000,
            xi_max: 12.0,
            oracle_n_max: 4,
            t_algebra_n: 4000,
            t_algebra_xi_max: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavefunctionConfig {
    pub r_max: f64,
    /// Samples r_i = r_max·i/nr, i = 1 … nr.
    pub nr: usize,
    /// Samples φ_j = −π + 2π(j + ½)/nphi, j = 0 … nphi−1; with nphi divisible
    /// by 4 no sample sits on an axis.
    pub nphi: usize,
    pub times: Vec<f64>,
}

impl Default for WavefunctionConfig {
    fn default() -> Self {
        Self { r_max: 6.0, nr: 120, nphi: 64, times: vec![0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub heisenberg_degree: u32,
    pub random_pairs: usize,
    pub ode_n_max: usize,
    pub matching_n: usize,
    pub matching_r: f64,
    pub halvings: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { heisenberg_degree: 8, random_pairs: 100, ode_n_max: 5, matching_n: 2, matching_r: 1e-2, halvings: 3 }
    }
}

/// Test hook: perturbs the trial eigenvalue used by the mode check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultInjection {
    pub lambda_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub sector: SectorConfig,
    pub flux: FluxConfig,
    pub state: StateConfig,
    pub spectrum: SpectrumConfig,
    pub profile: ProfileSpec,
    pub ermakov: ErmakovConfig,
    pub grids: GridConfig,
    pub wavefunction: WavefunctionConfig,
    pub verify: VerifyConfig,
    pub seed: u64,
    pub fault_injection: FaultInjection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamsConfig::default(),
            sector: SectorConfig::default(),
            flux: FluxConfig::default(),
            state: StateConfig::default(),
            spectrum: SpectrumConfig::default(),
            profile: ProfileSpec::Constant { mass: 1.0, omega: 1.0 },
            ermakov: ErmakovConfig::default(),
            grids: GridConfig::default(),
            wavefunction: WavefunctionConfig::default(),
            verify: VerifyConfig::default(),
            seed: 20240611,
            fault_injection: FaultInjection::default(),
        }
    }
}

/// Failure to obtain a configuration at all; maps to the parse exit code.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> std::result::Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse { path: origin.to_string(), source })
    }

    pub fn load(path: &Path) -> std::result::Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
        Self::from_json(&text, &shown)
    }

    pub fn dunkl_params(&self) -> Result<DunklParams<f64>> {
        DunklParams::new(self.params.nu1, self.params.nu2)
    }

    pub fn parity_sector(&self) -> ParitySector {
        ParitySector::new(self.sector.eps1.0, self.sector.eps2.0)
    }

    pub fn flux_spin(&self) -> FluxSpin<f64> {
        FluxSpin::new(self.flux.vartheta, self.flux.m_s.0)
    }

    pub fn angular_index(&self) -> Result<AngularIndex> {
        let l = AngularIndex::try_from(self.state.l)?;
        l.check_sector(self.parity_sector())?;
        Ok(l)
    }

    pub fn time_profiles(&self) -> Result<TimeProfiles> {
        TimeProfiles::new(self.profile.clone())
    }

    pub fn angular_mode(&self) -> Result<AngularMode<f64>> {
        AngularMode::new(self.parity_sector(), self.angular_index()?, self.state.sign.0, self.dunkl_params()?)
    }

    pub fn state_spec(&self) -> Result<StateSpec> {
        StateSpec::new(
            self.dunkl_params()?,
            self.parity_sector(),
            self.angular_index()?,
            self.state.sign.0,
            self.state.n,
            self.flux_spin(),
        )
    }

    /// Load-time admissibility: parameter domain, quantum indices, profile
    /// validity and, when ϑ ≠ 0, the AB constraint ν₁ + εν₂ = 0.
    pub fn validate(&self) -> Result<()> {
        let params = self.dunkl_params()?;
        self.angular_index()?;
        self.time_profiles()?;
        if !self.flux.vartheta.is_finite() {
            return Err(Error::Domain(format!("vartheta must be finite, got {}", self.flux.vartheta)));
        }
        if self.flux.vartheta != 0.0 {
            ab_constrain(self.parity_sector(), &params).map_err(|r| r.into_error())?;
        }
        Ok(())
    }

    /// Canonical JSON used for the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
