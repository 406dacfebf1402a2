//! Run configuration: a flat JSON document with fixed key names.
//!
//! All frequencies are cyclic (omega/2pi) in MHz, times in us.  Complex
//! couplings accept either a bare number (real) or a two-element
//! `[re, im]` array; they serialize back to the shortest of the two, so
//! a resolved config re-parses to exactly the same values.
//!
//! Unknown keys are rejected so that typos cannot silently fall back to
//! defaults.  Optional keys and their defaults:
//!
//! | key                   | default                     |
//! |-----------------------|-----------------------------|
//! | `omega0p_mhz`         | `|omega0_mhz|`              |
//! | `omega1p_mhz`         | `|omega1_mhz|`              |
//! | `time_us`             | none (required per command) |
//! | `t_max_us`            | none (required by closure)  |
//! | `closure_tol`         | `1e-6`                      |
//! | `entangle_tol`        | `1e-6`                      |
//! | `fock_cutoff`         | `2`                         |
//! | `integrator_accuracy` | `1e-10`                     |
//! | `output_path`         | none (stdout)               |
//! | `output_format`       | `json`                      |

use std::fmt;
use std::path::Path;

use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use geomgate_core::model::SystemParams;
use geomgate_core::Complex64;

use crate::CliError;

/// A complex value in config files: `x` or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSpec {
    pub re: f64,
    pub im: f64,
}

impl ComplexSpec {
    pub fn real(re: f64) -> Self {
        ComplexSpec { re, im: 0.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl Serialize for ComplexSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.im == 0.0 {
            serializer.serialize_f64(self.re)
        } else {
            [self.re, self.im].serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for ComplexSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct SpecVisitor;

        impl<'de> Visitor<'de> for SpecVisitor {
            type Value = ComplexSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a number or a two-element [re, im] array")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ComplexSpec, E> {
                Ok(ComplexSpec::real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ComplexSpec, E> {
                Ok(ComplexSpec::real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ComplexSpec, E> {
                Ok(ComplexSpec::real(v as f64))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<ComplexSpec, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(ComplexSpec { re, im })
            }
        }

        deserializer.deserialize_any(SpecVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

fn default_closure_tol() -> f64 {
    1e-6
}

fn default_entangle_tol() -> f64 {
    1e-6
}

fn default_fock_cutoff() -> usize {
    2
}

fn default_accuracy() -> f64 {
    1e-10
}

fn default_format() -> OutputFormat {
    OutputFormat::Json
}

/// Parsed and (after [`RunConfig::resolve`]) fully defaulted run
/// configuration.  Field order here fixes the key order in emitted
/// documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub nu_mhz: f64,
    pub g0_mhz: ComplexSpec,
    pub g1_mhz: ComplexSpec,
    pub omega0_mhz: ComplexSpec,
    pub omega1_mhz: ComplexSpec,
    #[serde(default)]
    pub omega0p_mhz: Option<ComplexSpec>,
    #[serde(default)]
    pub omega1p_mhz: Option<ComplexSpec>,
    pub delta_cap0_mhz: f64,
    pub delta_cap1_mhz: f64,
    pub delta_small_mhz: f64,
    #[serde(default)]
    pub time_us: Option<f64>,
    #[serde(default)]
    pub t_max_us: Option<f64>,
    #[serde(default = "default_closure_tol")]
    pub closure_tol: f64,
    #[serde(default = "default_entangle_tol")]
    pub entangle_tol: f64,
    #[serde(default = "default_fock_cutoff")]
    pub fock_cutoff: usize,
    #[serde(default = "default_accuracy")]
    pub integrator_accuracy: f64,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default = "default_format")]
    pub output_format: OutputFormat,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => {
                CliError::Config(format!("in config {}: {msg}", path.display()))
            }
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!(
                "parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    /// Fills the derived defaults (`omega*p_mhz` from the drive
    /// magnitudes).  Static defaults are applied during parsing.
    pub fn resolve(&mut self) {
        if self.omega0p_mhz.is_none() {
            self.omega0p_mhz = Some(ComplexSpec::real(self.omega0_mhz.to_complex().norm()));
        }
        if self.omega1p_mhz.is_none() {
            self.omega1p_mhz = Some(ComplexSpec::real(self.omega1_mhz.to_complex().norm()));
        }
    }

    /// Structural checks that precede any physics: finite values and
    /// sane tolerances.  Parameter-level validity (Stark balance,
    /// detuning singularities) is checked by the model itself.
    pub fn check(&self) -> Result<(), CliError> {
        let named: [(&str, f64); 10] = [
            ("nu_mhz", self.nu_mhz),
            ("g0_mhz", self.g0_mhz.to_complex().norm()),
            ("g1_mhz", self.g1_mhz.to_complex().norm()),
            ("omega0_mhz", self.omega0_mhz.to_complex().norm()),
            ("omega1_mhz", self.omega1_mhz.to_complex().norm()),
            ("delta_cap0_mhz", self.delta_cap0_mhz),
            ("delta_cap1_mhz", self.delta_cap1_mhz),
            ("delta_small_mhz", self.delta_small_mhz),
            ("closure_tol", self.closure_tol),
            ("entangle_tol", self.entangle_tol),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                return Err(CliError::Config(format!("{name} must be finite")));
            }
        }
        if self.closure_tol <= 0.0 {
            return Err(CliError::Config("closure_tol must be positive".into()));
        }
        if self.entangle_tol < 0.0 {
            return Err(CliError::Config("entangle_tol must be nonnegative".into()));
        }
        if self.fock_cutoff < 1 {
            return Err(CliError::Config("fock_cutoff must be at least 1".into()));
        }
        if !(self.integrator_accuracy > 0.0) || !self.integrator_accuracy.is_finite() {
            return Err(CliError::Config(
                "integrator_accuracy must be a positive finite number".into(),
            ));
        }
        if let Some(t) = self.time_us {
            if !t.is_finite() || t < 0.0 {
                return Err(CliError::Config("time_us must be finite and nonnegative".into()));
            }
        }
        if let Some(t) = self.t_max_us {
            if !t.is_finite() || t <= 0.0 {
                return Err(CliError::Config("t_max_us must be finite and positive".into()));
            }
        }
        Ok(())
    }

    pub fn require_time(&self, command: &str) -> Result<f64, CliError> {
        self.time_us
            .ok_or_else(|| CliError::Config(format!("{command} requires time_us in the config")))
    }

    pub fn require_t_max(&self, command: &str) -> Result<f64, CliError> {
        self.t_max_us
            .ok_or_else(|| CliError::Config(format!("{command} requires t_max_us in the config")))
    }

    /// Physical parameters in the core model's units (resolved config
    /// only; `omega*p_mhz` must be filled).
    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            nu: self.nu_mhz,
            g0: self.g0_mhz.to_complex(),
            g1: self.g1_mhz.to_complex(),
            omega0: self.omega0_mhz.to_complex(),
            omega1: self.omega1_mhz.to_complex(),
            omega0p: self
                .omega0p_mhz
                .expect("config must be resolved before use")
                .to_complex(),
            omega1p: self
                .omega1p_mhz
                .expect("config must be resolved before use")
                .to_complex(),
            delta0: self.delta_cap0_mhz,
            delta1: self.delta_cap1_mhz,
            delta: self.delta_small_mhz,
        }
    }

    /// The embedded published working point, usable by every command.
    pub fn reference() -> Self {
        let p = SystemParams::reference();
        let cx = |z: Complex64| ComplexSpec { re: z.re, im: z.im };
        RunConfig {
            nu_mhz: p.nu,
            g0_mhz: cx(p.g0),
            g1_mhz: cx(p.g1),
            omega0_mhz: cx(p.omega0),
            omega1_mhz: cx(p.omega1),
            omega0p_mhz: Some(cx(p.omega0p)),
            omega1p_mhz: Some(cx(p.omega1p)),
            delta_cap0_mhz: p.delta0,
            delta_cap1_mhz: p.delta1,
            delta_small_mhz: p.delta,
            time_us: Some(SystemParams::REFERENCE_GATE_TIME_US),
            t_max_us: None,
            closure_tol: default_closure_tol(),
            entangle_tol: default_entangle_tol(),
            fock_cutoff: default_fock_cutoff(),
            integrator_accuracy: default_accuracy(),
            output_path: None,
            output_format: default_format(),
        }
    }
}
