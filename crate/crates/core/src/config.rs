//! TOML run configuration for the command-line front end.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{ExternalField, SimConfig};
use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::geometry::{FieldStrength, MVec3};
use crate::helium::FilmParameters;
use crate::selfforce::PrehistoryPolicy;
use crate::worldline::{CircularWorldline, Direction, HyperbolicWorldline, StaticWorldline, UniformWorldline, Worldline};

/// `on`/`off` switch that also accepts TOML booleans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Switch {
    Bool(bool),
    Word(OnOff),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnOff {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        matches!(self, Switch::Bool(true) | Switch::Word(OnOff::On))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrehistoryChoice {
    /// History starts at tau = 0.
    Truncate,
    /// Straight-line motion with the initial velocity before tau = 0.
    Asymptote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    pub e: f64,
    pub m0: f64,
    /// Initial position (t, x, y).
    #[serde(default)]
    pub z0: Option<[f64; 3]>,
    /// Initial spatial velocity (vx, vy).
    #[serde(default)]
    pub velocity: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// E1 component.
    #[serde(rename = "E")]
    pub e1: f64,
    #[serde(rename = "E2", default)]
    pub e2: f64,
    #[serde(rename = "H", default)]
    pub h: f64,
    #[serde(default)]
    pub tau_on: Option<f64>,
    #[serde(default)]
    pub tau_off: Option<f64>,
}

fn default_quad_tol() -> f64 {
    1e-9
}

fn default_prehistory() -> PrehistoryChoice {
    PrehistoryChoice::Truncate
}

fn default_on() -> Switch {
    Switch::Word(OnOff::On)
}

fn default_off() -> Switch {
    Switch::Word(OnOff::Off)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub h: f64,
    pub tau_end: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default = "default_prehistory")]
    pub prehistory: PrehistoryChoice,
    #[serde(default = "default_on")]
    pub selfforce: Switch,
    #[serde(default = "default_off")]
    pub coarsen: Switch,
}

fn default_samples() -> usize {
    8
}

/// Times at which the balance ledger is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerSection {
    /// Explicit times; overrides `samples`.
    #[serde(default)]
    pub taus: Option<Vec<f64>>,
    /// Number of equally spaced interior times.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Difference step, in units of the integrator step.
    #[serde(default)]
    pub delta_steps: Option<f64>,
}

impl Default for LedgerSection {
    fn default() -> Self {
        LedgerSection { taus: None, samples: default_samples(), delta_steps: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub trace: Option<String>,
    #[serde(default)]
    pub ledger: Option<String>,
    #[serde(default)]
    pub fieldmap: Option<String>,
    #[serde(default)]
    pub film: Option<String>,
    #[serde(default)]
    pub manifest: Option<String>,
}

impl OutputSection {
    fn name<'a>(slot: &'a Option<String>, default: &'a str) -> &'a str {
        slot.as_deref().unwrap_or(default)
    }

    pub fn trace_name(&self) -> &str {
        Self::name(&self.trace, "trace.csv")
    }

    pub fn ledger_name(&self) -> &str {
        Self::name(&self.ledger, "ledger.csv")
    }

    pub fn fieldmap_name(&self) -> &str {
        Self::name(&self.fieldmap, "fieldmap.csv")
    }

    pub fn film_name(&self) -> &str {
        Self::name(&self.film, "film.csv")
    }

    pub fn manifest_name(&self) -> &str {
        Self::name(&self.manifest, "manifest.json")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorldlineKind {
    Static,
    Uniform,
    Hyperbolic,
    Circular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionChoice {
    Retarded,
    Advanced,
}

impl From<DirectionChoice> for Direction {
    fn from(d: DirectionChoice) -> Self {
        match d {
            DirectionChoice::Retarded => Direction::Retarded,
            DirectionChoice::Advanced => Direction::Advanced,
        }
    }
}

fn default_retarded() -> DirectionChoice {
    DirectionChoice::Retarded
}

fn default_field_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldmapSection {
    pub worldline: WorldlineKind,
    pub charge: f64,
    /// Spatial velocity for `uniform`.
    #[serde(default)]
    pub velocity: Option<[f64; 2]>,
    /// Proper acceleration for `hyperbolic`.
    #[serde(default)]
    pub accel: Option<f64>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default = "default_retarded")]
    pub direction: DirectionChoice,
    pub x0: f64,
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub n1: usize,
    pub n2: usize,
    #[serde(default = "default_field_tol")]
    pub quad_tol: f64,
}

impl FieldmapSection {
    pub fn grid(&self) -> Result<GridSpec> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::Config("grid resolution must be at least 1 in each direction".into()));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-2) {
            return Err(Error::Config("fieldmap quad_tol must lie in (0, 1e-2]".into()));
        }
        Ok(GridSpec {
            x0: self.x0,
            x1_min: self.x1[0],
            x1_max: self.x1[1],
            x2_min: self.x2[0],
            x2_max: self.x2[1],
            n1: self.n1,
            n2: self.n2,
        })
    }

    pub fn worldline(&self) -> Result<Box<dyn Worldline>> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("worldline {:?} needs key {name}", self.worldline)))
        };
        let cfg = |e: Error| Error::Config(e.to_string());
        Ok(match self.worldline {
            WorldlineKind::Static => Box::new(StaticWorldline::at_origin()),
            WorldlineKind::Uniform => {
                let [vx, vy] = self.velocity.ok_or_else(|| Error::Config("worldline uniform needs key velocity".into()))?;
                Box::new(UniformWorldline::with_velocity(MVec3::ZERO, vx, vy).map_err(cfg)?)
            }
            WorldlineKind::Hyperbolic => Box::new(HyperbolicWorldline::new(need(self.accel, "accel")?).map_err(cfg)?),
            WorldlineKind::Circular => Box::new(
                CircularWorldline::new(need(self.radius, "radius")?, need(self.omega, "omega")?, 0.0).map_err(cfg)?,
            ),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Static,
    Uniform,
    Hyperbolic,
    Maxwell,
    Ledger,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "static" => Suite::Static,
            "uniform" => Suite::Uniform,
            "hyperbolic" => Suite::Hyperbolic,
            "maxwell" => Suite::Maxwell,
            "ledger" => Suite::Ledger,
            "all" => Suite::All,
            other => return Err(Error::Config(format!("unknown suite {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub suite: Suite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvertDirection {
    FieldToFilm,
    FilmToField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvertSection {
    pub input: PathBuf,
    pub direction: ConvertDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub particle: Option<ParticleSection>,
    #[serde(default)]
    pub field: Option<FieldSection>,
    #[serde(default)]
    pub integrator: Option<IntegratorSection>,
    #[serde(default)]
    pub ledger: Option<LedgerSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
    #[serde(default)]
    pub fieldmap: Option<FieldmapSection>,
    #[serde(default)]
    pub validate: Option<ValidateSection>,
    #[serde(default)]
    pub convert: Option<ConvertSection>,
    #[serde(default)]
    pub film: Option<FilmParameters>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// SHA-256 of the canonical JSON form of the parsed configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn output(&self) -> OutputSection {
        self.output.clone().unwrap_or(OutputSection {
            dir: None,
            trace: None,
            ledger: None,
            fieldmap: None,
            film: None,
            manifest: None,
        })
    }

    fn section<'a, T>(slot: &'a Option<T>, name: &str) -> Result<&'a T> {
        slot.as_ref().ok_or_else(|| Error::Config(format!("missing [{name}] section")))
    }

    /// Dynamics configuration from the [particle], [field] and [integrator] sections.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let p = Self::section(&self.particle, "particle")?;
        let it = Self::section(&self.integrator, "integrator")?;
        let field = match &self.field {
            Some(f) => Some(
                ExternalField::new(
                    FieldStrength::new(f.e1, f.e2, f.h),
                    f.tau_on.unwrap_or(f64::NEG_INFINITY),
                    f.tau_off.unwrap_or(f64::INFINITY),
                )
                .map_err(|e| Error::Config(e.to_string()))?,
            ),
            None => None,
        };
        let mut cfg = SimConfig::new(p.e, p.m0, field, it.h, it.tau_end);
        cfg.quad_tol = it.quad_tol;
        cfg.self_force = it.selfforce.is_on();
        cfg.coarsen = it.coarsen.is_on();
        cfg.prehistory = match it.prehistory {
            PrehistoryChoice::Truncate => PrehistoryPolicy::TruncateAt(0.0),
            PrehistoryChoice::Asymptote => PrehistoryPolicy::IncludeAsymptote,
        };
        if let Some(z) = p.z0 {
            cfg.z0 = MVec3::from_array(z);
        }
        if let Some([vx, vy]) = p.velocity {
            if !(vx * vx + vy * vy < 1.0) {
                return Err(Error::Config(format!("initial speed must be below 1, got ({vx}, {vy})")));
            }
            cfg.u0 = MVec3::velocity_from_spatial(vx, vy);
        }
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Ledger evaluation times and difference step for a simulation of `cfg`.
    pub fn ledger_times(&self, cfg: &SimConfig) -> Result<(Vec<f64>, f64)> {
        let l = self.ledger.clone().unwrap_or_default();
        let delta = cfg.h * l.delta_steps.unwrap_or(10.0);
        if !(delta > 0.0) {
            return Err(Error::Config("ledger delta_steps must be positive".into()));
        }
        let taus = match l.taus {
            Some(t) => t,
            None => {
                let n = l.samples;
                (1..=n).map(|k| cfg.tau_end * k as f64 / (n + 1) as f64).collect()
            }
        };
        for &t in &taus {
            if t - 2.0 * delta <= 0.0 || t + 2.0 * delta > cfg.tau_end {
                return Err(Error::Config(format!("ledger time {t} too close to the ends of [0, {}]", cfg.tau_end)));
            }
        }
        Ok((taus, delta))
    }

    pub fn film_parameters(&self) -> Result<FilmParameters> {
        let p = self.film.unwrap_or(FilmParameters::UNIT);
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENARIO: &str = r#"
[particle]
e = 0.31622776601683794
m0 = 1.0

[field]
E = 3.1622776601683795
tau_on = 0.0
tau_off = 8.0

[integrator]
h = 4e-4
tau_end = 8.0
selfforce = "on"
"#;

    #[test]
    fn parses_scenario() {
        let c = RunConfig::parse(SCENARIO).unwrap();
        let s = c.sim_config().unwrap();
        assert_eq!(s.steps(), 20000);
        assert!(s.self_force && !s.coarsen);
        assert_eq!(s.prehistory, PrehistoryPolicy::TruncateAt(0.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SCENARIO.replace("m0 = 1.0", "m0 = 1.0\nspin = 2");
        assert!(matches!(RunConfig::parse(&text), Err(Error::Config(_))));
    }

    #[test]
    fn missing_particle_section() {
        let text = SCENARIO.replace("[particle]\ne = 0.31622776601683794\nm0 = 1.0", "");
        let c = RunConfig::parse(&text).unwrap();
        assert!(matches!(c.sim_config(), Err(Error::Config(_))));
    }

    #[test]
    fn switch_accepts_bool() {
        let text = SCENARIO.replace("selfforce = \"on\"", "selfforce = false");
        assert!(!RunConfig::parse(&text).unwrap().sim_config().unwrap().self_force);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = RunConfig::parse(SCENARIO).unwrap();
        let b = RunConfig::parse(&SCENARIO.replace("m0 = 1.0", "m0   =   1.0   # rest mass")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
