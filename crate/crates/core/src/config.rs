//! Run configuration: a strict TOML schema describing one computation.
//!
//! ```toml
//! units = "omega0"              # optional: "omega0" (default) or "natural"
//!
//! [protocol]
//! kind = "sta"                  # constant | free-expansion | sudden-quench
//!                               # | linear-ramp | sta | lcd
//! omega_f = 0.0625              # final frequency (jump/ramp/designed kinds)
//! t_f = 10.0                    # drive duration (ramp/designed kinds)
//!
//! [state]
//! model = "qho-eigenstate"      # qho-eigenstate | qho-thermal | csm-ground
//! n = 0                         # | unitary-fermi | homogeneous
//!
//! [grid]
//! t_end = 10.0
//! samples = 501
//!
//! [output]                      # optional
//! path = "fig1.csv"
//! format = "csv"                # csv | json
//!
//! [oracle]                      # optional, compare-oracle resolution knobs
//! dimension = 256
//!
//! [sweep]                       # optional, used by the sweep command
//! parameter = "omega_f"
//! start = 0.1
//! stop = 0.9
//! count = 17
//! ```
//!
//! Unknown keys anywhere are errors, as are keys that do not belong to the
//! selected protocol kind or state model. In the default `"omega0"` unit
//! system all frequencies are multiples of the initial trap frequency (which
//! is pinned to 1, and `protocol.omega0` may be omitted); `"natural"` keeps
//! ħ = m = 1 but requires an explicit `omega0`.

use crate::oracle::{InitialState, OracleSettings};
use crate::protocol::{self, TrapProtocol};
use crate::state::{self, StateMoments, Units};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    /// The configuration is well formed but asks for a combination this
    /// computation cannot apply (e.g. sweeping a parameter the selected
    /// protocol does not have, or an oracle run for a many-body state).
    #[error("{0}")]
    Inapplicable(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitsMode {
    Omega0,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKindCfg {
    Constant,
    FreeExpansion,
    SuddenQuench,
    LinearRamp,
    Sta,
    Lcd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateModelCfg {
    QhoEigenstate,
    QhoThermal,
    CsmGround,
    UnitaryFermi,
    Homogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolCfg {
    pub kind: ProtocolKindCfg,
    pub omega0: Option<f64>,
    pub omega_f: Option<f64>,
    pub t_f: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateCfg {
    pub model: StateModelCfg,
    pub n: Option<u64>,
    pub beta: Option<f64>,
    pub n_particles: Option<u64>,
    pub g: Option<f64>,
    pub sigma2: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub t_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    pub path: Option<String>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OracleCfg {
    pub dimension: Option<usize>,
    pub max_dimension: Option<usize>,
    pub dt: Option<f64>,
    pub tolerance: Option<f64>,
    pub invariant_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub parameter: String,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub units: Option<UnitsMode>,
    pub protocol: ProtocolCfg,
    pub state: StateCfg,
    pub grid: GridCfg,
    #[serde(default)]
    pub output: OutputCfg,
    #[serde(default)]
    pub oracle: OracleCfg,
    pub sweep: Option<SweepCfg>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: RunConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_str_validated(text: &str) -> Result<RunConfig, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn units_mode(&self) -> UnitsMode {
        self.units.unwrap_or(UnitsMode::Omega0)
    }

    /// The initial trap frequency in the configured unit system.
    pub fn omega0(&self) -> Result<f64, ConfigError> {
        match self.units_mode() {
            UnitsMode::Omega0 => match self.protocol.omega0 {
                None => Ok(1.0),
                Some(v) => {
                    if v == 1.0 {
                        Ok(1.0)
                    } else {
                        Err(invalid(format!(
                            "units = \"omega0\" fixes protocol.omega0 = 1 (got {v}); use units = \"natural\" for other values"
                        )))
                    }
                }
            },
            UnitsMode::Natural => self
                .protocol
                .omega0
                .ok_or_else(|| invalid("units = \"natural\" requires protocol.omega0")),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.omega0()?;
        self.check_protocol_fields()?;
        self.check_state_fields()?;
        if !(self.grid.t_end > 0.0 && self.grid.t_end.is_finite()) {
            return Err(invalid(format!(
                "grid.t_end must be positive and finite, got {}",
                self.grid.t_end
            )));
        }
        if !(2..=10_000_000).contains(&self.grid.samples) {
            return Err(invalid(format!(
                "grid.samples must be between 2 and 1e7, got {}",
                self.grid.samples
            )));
        }
        if let Some(sweep) = &self.sweep {
            self.sweep_values(sweep)?;
            self.check_sweep_parameter(sweep)?;
        }
        Ok(())
    }

    fn check_protocol_fields(&self) -> Result<(), ConfigError> {
        use ProtocolKindCfg::*;
        let p = &self.protocol;
        let needs_omega_f = matches!(p.kind, SuddenQuench | LinearRamp | Sta | Lcd);
        let needs_t_f = matches!(p.kind, LinearRamp | Sta | Lcd);
        if needs_omega_f && p.omega_f.is_none() {
            return Err(invalid("this protocol kind requires protocol.omega_f"));
        }
        if !needs_omega_f && p.omega_f.is_some() {
            return Err(invalid(
                "protocol.omega_f does not apply to this protocol kind",
            ));
        }
        if needs_t_f && p.t_f.is_none() {
            return Err(invalid("this protocol kind requires protocol.t_f"));
        }
        if !needs_t_f && p.t_f.is_some() {
            return Err(invalid("protocol.t_f does not apply to this protocol kind"));
        }
        Ok(())
    }

    fn check_state_fields(&self) -> Result<(), ConfigError> {
        use StateModelCfg::*;
        let s = &self.state;
        // (key name, present, required by the selected model)
        let fields = [
            ("state.n", s.n.is_some(), matches!(s.model, QhoEigenstate)),
            (
                "state.beta",
                s.beta.is_some(),
                matches!(s.model, QhoThermal),
            ),
            (
                "state.n_particles",
                s.n_particles.is_some(),
                matches!(s.model, CsmGround),
            ),
            ("state.g", s.g.is_some(), matches!(s.model, CsmGround)),
            (
                "state.sigma2",
                s.sigma2.is_some(),
                matches!(s.model, UnitaryFermi),
            ),
            ("state.c", s.c.is_some(), matches!(s.model, Homogeneous)),
        ];
        for (name, present, required) in fields {
            if required && !present {
                return Err(invalid(format!("{name} is required by this state model")));
            }
            if !required && present {
                return Err(invalid(format!(
                    "{name} does not apply to this state model"
                )));
            }
        }
        Ok(())
    }

    pub fn build_protocol(&self) -> Result<TrapProtocol, ConfigError> {
        let w0 = self.omega0()?;
        let p = &self.protocol;
        let result = match p.kind {
            ProtocolKindCfg::Constant => protocol::make_constant(w0),
            ProtocolKindCfg::FreeExpansion => protocol::make_free_expansion(w0),
            ProtocolKindCfg::SuddenQuench => protocol::make_sudden_quench(w0, p.omega_f.unwrap()),
            ProtocolKindCfg::LinearRamp => {
                protocol::make_linear_ramp(w0, p.omega_f.unwrap(), p.t_f.unwrap())
            }
            ProtocolKindCfg::Sta => {
                protocol::design_sta_reverse(w0, p.omega_f.unwrap(), p.t_f.unwrap())
            }
            ProtocolKindCfg::Lcd => protocol::design_lcd(w0, p.omega_f.unwrap(), p.t_f.unwrap()),
        };
        result.map_err(|e| invalid(e.to_string()))
    }

    pub fn build_state(&self) -> Result<StateMoments, ConfigError> {
        let w0 = self.omega0()?;
        let s = &self.state;
        let result = match s.model {
            StateModelCfg::QhoEigenstate => state::qho_eigenstate(s.n.unwrap() as usize, w0),
            StateModelCfg::QhoThermal => state::qho_thermal(s.beta.unwrap(), w0),
            StateModelCfg::CsmGround => {
                state::csm_ground(s.n_particles.unwrap() as usize, s.g.unwrap(), w0)
            }
            StateModelCfg::UnitaryFermi => state::unitary_fermi(s.sigma2.unwrap(), w0),
            StateModelCfg::Homogeneous => state::homogeneous(s.c.unwrap(), w0),
        };
        result.map_err(|e| invalid(e.to_string()))
    }

    pub fn build_grid(&self) -> Vec<f64> {
        crate::ermakov::uniform_grid(self.grid.t_end, self.grid.samples)
    }

    /// The oracle can prepare single-oscillator states exactly; many-body
    /// models have no finite Fock representation here.
    pub fn oracle_initial_state(&self) -> Result<InitialState, ConfigError> {
        match self.state.model {
            StateModelCfg::QhoEigenstate => {
                Ok(InitialState::Eigenstate(self.state.n.unwrap() as usize))
            }
            StateModelCfg::QhoThermal => Ok(InitialState::Thermal {
                beta: self.state.beta.unwrap(),
            }),
            _ => Err(ConfigError::Inapplicable(format!(
                "the wavefunction oracle cannot prepare the {:?} state model; use qho-eigenstate or qho-thermal",
                self.state.model
            ))),
        }
    }

    pub fn oracle_settings(&self) -> Result<OracleSettings, ConfigError> {
        let w0 = self.omega0()?;
        let p = &self.protocol;
        let scale = w0.max(p.omega_f.unwrap_or(0.0).abs());
        let settings = OracleSettings {
            dim: self.oracle.dimension.unwrap_or(256),
            max_dim: self.oracle.max_dimension.unwrap_or(4096),
            dt: self.oracle.dt.unwrap_or(2e-4 / scale),
            units: Units::natural(),
        };
        if settings.dim > settings.max_dim {
            return Err(invalid(format!(
                "oracle.dimension = {} exceeds oracle.max_dimension = {}",
                settings.dim, settings.max_dim
            )));
        }
        Ok(settings)
    }

    pub fn compare_tolerances(&self) -> crate::oracle::CompareTolerances {
        let mut tol = crate::oracle::CompareTolerances::default();
        if let Some(v) = self.oracle.tolerance {
            tol.observable = v;
        }
        if let Some(v) = self.oracle.invariant_tolerance {
            tol.invariant_drift = v;
        }
        tol
    }

    /// Resolved, sorted sweep values.
    pub fn sweep_values(&self, sweep: &SweepCfg) -> Result<Vec<f64>, ConfigError> {
        let mut values = match (&sweep.values, sweep.start, sweep.stop, sweep.count) {
            (Some(v), None, None, None) => {
                if v.is_empty() {
                    return Err(invalid("sweep.values must not be empty"));
                }
                v.clone()
            }
            (None, Some(a), Some(b), Some(n)) => {
                if n < 2 {
                    return Err(invalid("sweep.count must be at least 2"));
                }
                // hit both endpoints exactly
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            b
                        } else {
                            a + (b - a) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect()
            }
            _ => {
                return Err(invalid(
                    "sweep needs either values = [...] or start/stop/count (not both)",
                ))
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sweep values must be finite"));
        }
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    fn check_sweep_parameter(&self, sweep: &SweepCfg) -> Result<(), ConfigError> {
        use ProtocolKindCfg::*;
        use StateModelCfg::*;
        let ok = match sweep.parameter.as_str() {
            "omega_f" => matches!(self.protocol.kind, SuddenQuench | LinearRamp | Sta | Lcd),
            "t_f" => matches!(self.protocol.kind, LinearRamp | Sta | Lcd),
            "n" => matches!(self.state.model, QhoEigenstate),
            "beta" => matches!(self.state.model, QhoThermal),
            "g" => matches!(self.state.model, CsmGround),
            "sigma2" => matches!(self.state.model, UnitaryFermi),
            "c" => matches!(self.state.model, Homogeneous),
            other => {
                return Err(invalid(format!(
                    "unknown sweep parameter {other:?} (expected omega_f, t_f, n, beta, g, sigma2 or c)"
                )))
            }
        };
        if !ok {
            return Err(ConfigError::Inapplicable(format!(
                "sweep parameter {:?} does not apply to protocol kind {:?} / state model {:?}",
                sweep.parameter, self.protocol.kind, self.state.model
            )));
        }
        Ok(())
    }

    /// A copy of this config with the sweep parameter set to `value`.
    pub fn with_sweep_value(&self, parameter: &str, value: f64) -> Result<RunConfig, ConfigError> {
        let mut cfg = self.clone();
        match parameter {
            "omega_f" => cfg.protocol.omega_f = Some(value),
            "t_f" => cfg.protocol.t_f = Some(value),
            "n" => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(invalid(format!(
                        "sweep over n requires nonnegative integers, got {value}"
                    )));
                }
                cfg.state.n = Some(value as u64);
            }
            "beta" => cfg.state.beta = Some(value),
            "g" => cfg.state.g = Some(value),
            "sigma2" => cfg.state.sigma2 = Some(value),
            "c" => cfg.state.c = Some(value),
            other => return Err(invalid(format!("unknown sweep parameter {other:?}"))),
        }
        Ok(cfg)
    }

    /// Time at which sweep rows are evaluated: the end of the drive for
    /// finite-duration kinds, the end of the grid otherwise.
    pub fn sweep_eval_time(&self) -> f64 {
        match self.protocol.kind {
            ProtocolKindCfg::LinearRamp | ProtocolKindCfg::Sta | ProtocolKindCfg::Lcd => {
                self.protocol.t_f.unwrap_or(self.grid.t_end)
            }
            _ => self.grid.t_end,
        }
    }
}
