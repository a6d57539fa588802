//! Run configuration: a TOML file overridden by command line flags.
//!
//! ```toml
//! [[curve]]
//! g2 = 4            # number or complex string such as "1-2i"
//! g3 = "0"
//!
//! [variety]
//! file = "diag.var" # relative to the config file; or `text = "..."`
//!
//! [solver]
//! resolution = 64
//! tol = 1e-10
//! seed = 0
//! height = 3
//! qmax = 100
//!
//! [output]
//! report = "report.json"
//! plot = "samples.csv"
//! ```

use std::path::{Path, PathBuf};

use maxcompact_core::elliptic::CurveInvariants;
use maxcompact_core::solver::SolverOptions;
use maxcompact_core::C64;
use serde::Deserialize;

use crate::error::CliError;
use crate::text::parse_complex;

pub const MIN_RESOLUTION: usize = 8;
pub const MAX_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn value(&self) -> Result<C64, CliError> {
        match self {
            Scalar::Number(x) => Ok(C64::new(*x, 0.0)),
            Scalar::Text(s) => parse_complex(s),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveEntry {
    g2: Scalar,
    g3: Scalar,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VarietyEntry {
    file: Option<PathBuf>,
    text: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverEntry {
    resolution: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
    height: Option<i64>,
    qmax: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputEntry {
    report: Option<PathBuf>,
    plot: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    curve: Vec<CurveEntry>,
    #[serde(default)]
    variety: VarietyEntry,
    #[serde(default)]
    solver: SolverEntry,
    #[serde(default)]
    output: OutputEntry,
}

/// Where the variety text came from.
#[derive(Debug, Clone, PartialEq)]
pub enum VarietySource {
    File(PathBuf),
    Inline(String),
}

/// Flag values; `None` or empty means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub curves: Vec<C64Pair>,
    pub variety: Option<PathBuf>,
    pub resolution: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub height: Option<i64>,
    pub qmax: Option<u64>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub type C64Pair = (C64, C64);

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `(g2, g3)` per factor, in factor order.
    pub curves: Vec<C64Pair>,
    pub variety: Option<VarietySource>,
    pub resolution: usize,
    pub tol: f64,
    pub seed: u64,
    pub height: i64,
    pub qmax: u64,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        RunConfig {
            curves: Vec::new(),
            variety: None,
            resolution: d.resolution,
            tol: d.tol,
            seed: d.seed,
            height: d.height,
            qmax: d.qmax,
            out: None,
            plot: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CliError> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        let mut cfg = RunConfig::default();
        for c in &file.curve {
            cfg.curves.push((c.g2.value()?, c.g3.value()?));
        }
        let v = file.variety;
        cfg.variety = match (v.file, v.text) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "config: variety has both `file` and `text`".into(),
                ))
            }
            (Some(f), None) => Some(VarietySource::File(base.join(f))),
            (None, Some(t)) => Some(VarietySource::Inline(t)),
            (None, None) => None,
        };
        let s = file.solver;
        cfg.resolution = s.resolution.unwrap_or(cfg.resolution);
        cfg.tol = s.tol.unwrap_or(cfg.tol);
        cfg.seed = s.seed.unwrap_or(cfg.seed);
        cfg.height = s.height.unwrap_or(cfg.height);
        cfg.qmax = s.qmax.unwrap_or(cfg.qmax);
        cfg.out = file.output.report.map(|p| base.join(p));
        cfg.plot = file.output.plot.map(|p| base.join(p));
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Flags win over the file; curves given on the command line replace
    /// those of the file.
    pub fn apply(&mut self, o: Overrides) {
        if !o.curves.is_empty() {
            self.curves = o.curves;
        }
        if let Some(v) = o.variety {
            self.variety = Some(VarietySource::File(v));
        }
        self.resolution = o.resolution.unwrap_or(self.resolution);
        self.tol = o.tol.unwrap_or(self.tol);
        self.seed = o.seed.unwrap_or(self.seed);
        self.height = o.height.unwrap_or(self.height);
        self.qmax = o.qmax.unwrap_or(self.qmax);
        if o.out.is_some() {
            self.out = o.out;
        }
        if o.plot.is_some() {
            self.plot = o.plot;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Validation(m));
        if self.curves.is_empty() {
            return fail("at least one curve is required".into());
        }
        if self.resolution < MIN_RESOLUTION {
            return fail(format!(
                "resolution {} is below {MIN_RESOLUTION}",
                self.resolution
            ));
        }
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return fail(format!("tol {} is outside (0, {MAX_TOL:e}]", self.tol));
        }
        if self.height < 1 {
            return fail(format!("height {} must be positive", self.height));
        }
        if self.qmax < 1 {
            return fail("qmax must be positive".into());
        }
        Ok(())
    }

    pub fn invariants(&self) -> Result<Vec<CurveInvariants>, CliError> {
        self.curves
            .iter()
            .map(|&(g2, g3)| Ok(CurveInvariants::new(g2, g3)?))
            .collect()
    }

    pub fn variety_text(&self) -> Result<String, CliError> {
        match &self.variety {
            None => Err(CliError::Validation(
                "a variety is required (--variety FILE)".into(),
            )),
            Some(VarietySource::Inline(t)) => Ok(t.clone()),
            Some(VarietySource::File(p)) => {
                std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))
            }
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            resolution: self.resolution,
            tol: self.tol,
            seed: self.seed,
            height: self.height,
            qmax: self.qmax,
            ..SolverOptions::default()
        }
    }
}
