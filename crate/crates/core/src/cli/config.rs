//! Run configuration: JSON file plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fock::{HilbertShape, Label};
use crate::hamiltonian::SystemParams;
use crate::io::Format;
use crate::protocol::{Model, ProtocolSetup};
use crate::{Error, Result};

/// Unit system of frequencies and times in a config file.
///
/// `MHz` reads every frequency as 10⁶ rad/s and every time as μs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    #[default]
    #[serde(rename = "MHz", alias = "mhz")]
    Mhz,
    #[serde(rename = "rad/s", alias = "si", alias = "SI")]
    RadPerSecond,
}

impl Units {
    pub fn frequency_scale(self) -> f64 {
        match self {
            Units::Mhz => 1e6,
            Units::RadPerSecond => 1.0,
        }
    }

    pub fn time_scale(self) -> f64 {
        1.0 / self.frequency_scale()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub omega: Option<f64>,
    pub g: Option<f64>,
    /// Sets both Lamb-Dicke parameters unless one is given explicitly.
    pub eta: Option<f64>,
    pub eta_l: Option<f64>,
    pub eta_c: Option<f64>,
    pub nu: Option<f64>,
    pub omega_0: Option<f64>,
    pub omega_c: Option<f64>,
    pub omega_l: Option<f64>,
    pub phi: Option<f64>,
}

/// On-disk configuration. Every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub units: Option<Units>,
    pub params: Option<ParamsFile>,
    pub tune: Option<bool>,
    pub shape: Option<String>,
    pub model: Option<String>,
    pub initial: Option<String>,
    pub block: Option<[usize; 2]>,
    pub p: Option<u32>,
    /// Interaction time; defaults to the tuned operation time.
    pub t: Option<f64>,
    /// RK4 step for the lab model.
    pub dt: Option<f64>,
    pub samples: Option<usize>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))
    }
}

pub const DEFAULT_OMEGA_MHZ: f64 = 8.95;
pub const DEFAULT_ETA: f64 = 0.05;
/// Trap frequency in units of Ω.
pub const DEFAULT_NU_OVER_OMEGA: f64 = 20.0;
/// Transition frequency in units of ν.
pub const DEFAULT_OMEGA0_OVER_NU: f64 = 200.0;
pub const DEFAULT_SHAPE: (usize, usize) = (6, 6);
pub const DEFAULT_SAMPLES: usize = 101;

/// Fully resolved run settings, in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub units: Units,
    pub setup: ProtocolSetup,
    pub samples: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub model: Option<String>,
    pub shape: Option<String>,
    pub p: Option<u32>,
    pub initial: Option<String>,
    pub samples: Option<usize>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Configuration(format!(
            "{name} must be finite and > 0 (got {v})"
        )))
    }
}

impl RunConfig {
    pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Self> {
        let units = file.units.unwrap_or_default();
        let f = units.frequency_scale();
        let ps = file.params.unwrap_or_default();

        let omega = ps.omega.unwrap_or(DEFAULT_OMEGA_MHZ * 1e6 / f) * f;
        let nu = ps.nu.map_or(DEFAULT_NU_OVER_OMEGA * omega, |v| v * f);
        let omega_0 = ps.omega_0.map_or(DEFAULT_OMEGA0_OVER_NU * nu, |v| v * f);
        let eta = ps.eta.unwrap_or(DEFAULT_ETA);
        let params = SystemParams {
            omega,
            g: ps.g.map_or(0.0, |v| v * f),
            eta_l: ps.eta_l.unwrap_or(eta),
            eta_c: ps.eta_c.unwrap_or(eta),
            nu,
            omega_0,
            omega_c: ps.omega_c.map_or(omega_0 - nu, |v| v * f),
            omega_l: ps.omega_l.map_or(omega_0, |v| v * f),
            phi: ps.phi.unwrap_or(0.0),
        };
        params.validate()?;
        positive("omega", params.omega)?;

        // An explicit g means "use this coupling" unless tuning is requested.
        let tune = file.tune.unwrap_or(ps.g.is_none());
        if !tune && ps.g.is_none() {
            return Err(Error::Configuration("tune = false needs params.g".into()));
        }

        let shape = match flags.shape.or(file.shape) {
            Some(s) => s.parse::<HilbertShape>().map_err(config_err)?,
            None => HilbertShape::new(DEFAULT_SHAPE.0, DEFAULT_SHAPE.1)?,
        };
        let model = match flags.model.or(file.model) {
            Some(s) => s.parse::<Model>().map_err(config_err)?,
            None => Model::BlockAnalytic,
        };
        let initial = match flags.initial.or(file.initial) {
            Some(s) => s.parse::<Label>().map_err(config_err)?,
            None => Label::g(0, 0),
        };
        let format = match flags.format.or(file.format) {
            Some(s) => s.parse::<Format>().map_err(config_err)?,
            None => Format::Csv,
        };
        let samples = flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(Error::Configuration(format!(
                "samples must be >= 2 (got {samples})"
            )));
        }

        let mut setup = ProtocolSetup::new(params, shape, model)
            .with_initial(initial)
            .with_tune(tune);
        setup.p = flags.p.or(file.p).unwrap_or(1);
        if setup.p == 0 {
            return Err(Error::Configuration("p must be >= 1".into()));
        }
        if let Some([m, n]) = file.block {
            if m == 0 || n == 0 {
                return Err(Error::Configuration(format!(
                    "block indices must be >= 1 (got [{m}, {n}])"
                )));
            }
            setup.block = (m, n);
        }
        let t = units.time_scale();
        if let Some(time) = file.t {
            setup.time = Some(positive("t", time)? * t);
        }
        if let Some(dt) = file.dt {
            setup.dt = Some(positive("dt", dt)? * t);
        }

        Ok(RunConfig {
            units,
            setup,
            samples,
            format,
            output: flags.output.or(file.output),
        })
    }

    pub fn load(path: Option<&Path>, flags: Overrides) -> Result<Self> {
        let file = match path {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Self::resolve(file, flags)
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Configuration(_) => e,
        other => Error::Configuration(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(ConfigFile::default(), Overrides::default()).unwrap();
        let p = c.setup.params;
        assert_eq!(p.omega, 8.95e6);
        assert_eq!(p.nu, 20.0 * 8.95e6);
        assert!(p.red_sideband_resonant() && p.carrier_resonant());
        assert!(c.setup.tune);
        assert_eq!(c.setup.model, Model::BlockAnalytic);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn mhz_and_si_agree() {
        let mhz: ConfigFile = serde_json::from_str(
            r#"{"units":"MHz","params":{"omega":8.95,"nu":179,"omega_0":35800},"t":0.3}"#,
        )
        .unwrap();
        let si: ConfigFile = serde_json::from_str(
            r#"{"units":"rad/s","params":{"omega":8.95e6,"nu":1.79e8,"omega_0":3.58e10},"t":3e-7}"#,
        )
        .unwrap();
        let a = RunConfig::resolve(mhz, Overrides::default()).unwrap();
        let b = RunConfig::resolve(si, Overrides::default()).unwrap();
        assert_eq!(a.setup.params, b.setup.params);
        assert!((a.setup.time.unwrap() - b.setup.time.unwrap()).abs() < 1e-20);
    }

    #[test]
    fn flags_override_file() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"model":"ld","p":2,"format":"json"}"#).unwrap();
        let flags = Overrides {
            model: Some("rwa".into()),
            p: Some(3),
            ..Default::default()
        };
        let c = RunConfig::resolve(file, flags).unwrap();
        assert_eq!(c.setup.model, Model::RwaFull);
        assert_eq!(c.setup.p, 3);
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn explicit_g_disables_tuning() {
        let file: ConfigFile = serde_json::from_str(r#"{"params":{"g":50}}"#).unwrap();
        let c = RunConfig::resolve(file, Overrides::default()).unwrap();
        assert!(!c.setup.tune);
        assert_eq!(c.setup.params.g, 5e7);
    }

    #[test]
    fn bad_inputs_are_configuration_errors() {
        for json in [
            r#"{"params":{"omega":-1}}"#,
            r#"{"shape":"0x3"}"#,
            r#"{"model":"quantum"}"#,
            r#"{"initial":"x,0,0"}"#,
            r#"{"samples":1}"#,
            r#"{"tune":false}"#,
            r#"{"t":0}"#,
        ] {
            let file: ConfigFile = serde_json::from_str(json).unwrap();
            let err = RunConfig::resolve(file, Overrides::default()).unwrap_err();
            assert!(matches!(err, Error::Configuration(_)), "{json}: {err:?}");
        }
        assert!(serde_json::from_str::<ConfigFile>(r#"{"bogus":1}"#).is_err());
    }
}
