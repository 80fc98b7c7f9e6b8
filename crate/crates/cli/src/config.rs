//! TOML run configuration. Every section is optional; commands fill in
//! their own defaults. Dynamics configs are dimensionless (couplings in
//! units of g_a, times in 1/g_a); the feasibility section takes Hz and
//! seconds.

use std::f64::consts::PI;
use std::fmt;

use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub space: SpaceCfg,
    #[serde(default)]
    pub couplings: CouplingsCfg,
    #[serde(default)]
    pub schedule: ScheduleCfg,
    #[serde(default)]
    pub berry: BerryCfg,
    #[serde(default)]
    pub protocol: ProtocolCfg,
    #[serde(default)]
    pub readout: ReadoutCfg,
    #[serde(default)]
    pub cat: CatCfg,
    #[serde(default)]
    pub feasibility: FeasibilityCfg,
    #[serde(default)]
    pub sweep: SweepCfg,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceCfg {
    pub fock_dim: Option<usize>,
    pub internal_dim: Option<usize>,
    pub trunc_margin: Option<usize>,
    pub tail_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingsCfg {
    pub g_a: f64,
    pub g_b: Option<f64>,
    pub sinh2_r: Option<f64>,
    pub phi: f64,
}

impl Default for CouplingsCfg {
    fn default() -> Self {
        CouplingsCfg { g_a: 1.0, g_b: None, sinh2_r: None, phi: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampCfg {
    Linear,
    Smoothstep,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleCfg {
    /// Ω·T; ignored when `period` is set.
    pub omega_t: f64,
    pub period: Option<f64>,
    pub steps_per_cycle: usize,
    pub ramp: RampCfg,
    pub direction: i8,
    pub phi0: f64,
}

impl Default for ScheduleCfg {
    fn default() -> Self {
        ScheduleCfg {
            omega_t: 60.0 * PI,
            period: None,
            steps_per_cycle: 2000,
            ramp: RampCfg::Linear,
            direction: 1,
            phi0: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// S(ε)(|g,n+1⟩ ± |e,n⟩)/√2 without the internal phase.
    Literal,
    /// Exact eigenvectors of H(φ).
    Eigen,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BerryCfg {
    pub n_max: usize,
    pub r: Vec<f64>,
    pub loop_samples: usize,
    pub family: Family,
    pub adiabatic: bool,
    pub omega_t: f64,
    pub steps_per_cycle: usize,
}

impl Default for BerryCfg {
    fn default() -> Self {
        BerryCfg {
            n_max: 5,
            r: vec![0.2, 0.5f64.asinh()],
            loop_samples: 1000,
            family: Family::Literal,
            adiabatic: false,
            omega_t: 60.0 * PI,
            steps_per_cycle: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    PhaseReversal,
    ExcitedReversal,
    FockSuperposition,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolCfg {
    pub variant: Variant,
    pub alpha_re: f64,
    pub alpha_im: f64,
}

impl Default for ProtocolCfg {
    fn default() -> Self {
        ProtocolCfg { variant: Variant::PhaseReversal, alpha_re: 1.0, alpha_im: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutSource {
    /// |g⟩|−α⟩, the ideal output of the phase-reversal protocol.
    BerryBranch,
    /// |g⟩|α⟩, no geometric sign.
    NoPhaseBranch,
    /// Final state of a simulated protocol run from the same config.
    Protocol,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutCfg {
    pub source: ReadoutSource,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub omega0: f64,
    /// Last sample time; defaults to 4π/Ω₀.
    pub t_max: Option<f64>,
    pub samples: usize,
}

impl Default for ReadoutCfg {
    fn default() -> Self {
        ReadoutCfg {
            source: ReadoutSource::BerryBranch,
            alpha_re: 1.0,
            alpha_im: 0.0,
            omega0: 1.0,
            t_max: None,
            samples: 401,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CatCfg {
    pub alpha_re: f64,
    pub alpha_im: f64,
}

impl Default for CatCfg {
    fn default() -> Self {
        CatCfg { alpha_re: 1.0, alpha_im: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Be9,
    Ca40,
}

/// Frequencies in Hz (cycles per second), times in seconds. Unset fields
/// come from the preset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibilityCfg {
    pub preset: Option<Preset>,
    pub eta12: Option<f64>,
    pub eta34: Option<f64>,
    pub rabi12_hz: Option<f64>,
    pub rabi34_hz: Option<f64>,
    /// Sets rabi34 from rabi12 when rabi34_hz is absent.
    pub sinh2_r: Option<f64>,
    pub trap_hz: Option<f64>,
    pub qubit_hz: Option<f64>,
    pub t_motional: Option<f64>,
    pub t_internal: Option<f64>,
    pub period: Option<f64>,
    pub lab_frame_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    OmegaT,
    Alpha,
    Sinh2R,
    StepsPerCycle,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
}

impl Default for SweepCfg {
    fn default() -> Self {
        SweepCfg { parameter: SweepParam::OmegaT, values: vec![60.0 * PI, 64.0 * PI] }
    }
}

/// Parsed config together with its source, for locating keys in errors.
pub struct Loaded {
    pub cfg: RunConfig,
    src: String,
}

impl Loaded {
    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        match toml::from_str::<RunConfig>(src) {
            Ok(cfg) => Ok(Loaded { cfg, src: src.to_owned() }),
            Err(e) => {
                let line = e.span().map(|s| line_of_offset(src, s.start));
                Err(ConfigError { message: e.message().trim().to_owned(), line })
            }
        }
    }

    /// Error pointing at `section.key`, or at the section header, or
    /// nowhere if neither appears in the file.
    pub fn error(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { message: format!("{section}.{key}: {}", message.into()), line: locate(&self.src, section, key) }
    }
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn locate(src: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_owned();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_error_has_line() {
        let err = Loaded::parse("[space]\nfock_dim = 32\nbogus = 1\n").err().unwrap();
        assert_eq!(err.line, Some(3));
        let err = Loaded::parse("[schedule]\nsteps_per_cycle = \"many\"\n").err().unwrap();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn locate_keys() {
        let src = "# c\n[space]\nfock_dim = 8\n\n[couplings]\ng_a=2\n";
        let l = Loaded::parse(src).unwrap();
        assert_eq!(l.error("space", "fock_dim", "x").line, Some(3));
        assert_eq!(l.error("couplings", "g_a", "x").line, Some(6));
        assert_eq!(l.error("couplings", "g_b", "x").line, Some(5));
        assert_eq!(l.error("berry", "r", "x").line, None);
    }

    #[test]
    fn defaults() {
        let l = Loaded::parse("").unwrap();
        assert_eq!(l.cfg.schedule.steps_per_cycle, 2000);
        assert_eq!(l.cfg.berry.family, Family::Literal);
        assert_eq!(l.cfg.sweep.values.len(), 2);
    }
}
