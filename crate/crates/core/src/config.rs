//! Run configuration: a flat file of dotted `key = value` lines.
//!
//! ```text
//! # comment
//! physical.Z = 30
//! basis.scheme = kinetic-balance
//! trap.kind = contracted
//! sweep.parameter = delta
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::Thresholds;
use crate::eigen::SolveOptions;
use crate::error::{Error, Result};
use crate::model::DEFAULT_ALPHA;

/// Environment variable that redirects relative output paths.
pub const OUTPUT_DIR_ENV: &str = "DIRAC_POLLUTION_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Coulomb,
    GaussianWell,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    UpperLower,
    KineticBalance,
    AtomicBalance,
    DualKineticBalance,
    FreeBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapKind {
    None,
    Mixed,
    Contracted,
    Concentrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    None,
    Theta,
    Delta,
    Eps,
    R0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExponentSource {
    Named(String),
    /// Reduced exponents (units of α²).
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub z: f64,
    pub potential: PotentialKind,
    pub depth: f64,
    pub width: f64,
    pub scheme: SchemeKind,
    pub exponents: ExponentSource,
    pub eps: f64,
    /// Free basis: states kept on each side.
    pub n_keep: Option<usize>,
    /// Free basis: even-tempered auxiliary exponent ratio and size.
    pub aux_ratio: f64,
    pub aux_size: Option<usize>,
    pub trap: TrapKind,
    pub theta: f64,
    /// Trap exponent in units of α².
    pub b_reduced: f64,
    pub delta: f64,
    pub r0: f64,
    /// Exponent of concentrated traps (physical units).
    pub width_exponent: f64,
    pub sweep: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub solver: SolveOptions,
    pub thresholds: Thresholds,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            z: 30.0,
            potential: PotentialKind::Coulomb,
            depth: -0.5,
            width: 1.0,
            scheme: SchemeKind::KineticBalance,
            exponents: ExponentSource::Named("zn-6-31g".into()),
            eps: 1.0,
            n_keep: None,
            aux_ratio: 2.0,
            aux_size: None,
            trap: TrapKind::None,
            theta: 0.5,
            b_reduced: 1e6,
            delta: 1e4,
            r0: 0.7,
            width_exponent: 12.0,
            sweep: SweepParameter::None,
            from: 0.0,
            to: 1.0,
            steps: 60,
            solver: SolveOptions::default(),
            thresholds: Thresholds::default(),
            format: OutputFormat::Csv,
            output: None,
        }
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::config(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::config(key, "must be finite"));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::config(key, format!("`{v}` is not a non-negative integer")))
}

fn choice<T: Copy>(key: &str, v: &str, options: &[(&str, T)]) -> Result<T> {
    options.iter().find(|(name, _)| *name == v).map(|(_, t)| *t).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|o| o.0).collect();
        Error::config(key, format!("`{v}` is not one of {}", names.join(", ")))
    })
}

const POTENTIALS: &[(&str, PotentialKind)] = &[
    ("coulomb", PotentialKind::Coulomb),
    ("gaussian-well", PotentialKind::GaussianWell),
    ("zero", PotentialKind::Zero),
];
const SCHEMES: &[(&str, SchemeKind)] = &[
    ("upper-lower", SchemeKind::UpperLower),
    ("kinetic-balance", SchemeKind::KineticBalance),
    ("atomic-balance", SchemeKind::AtomicBalance),
    ("dual-kinetic-balance", SchemeKind::DualKineticBalance),
    ("free-basis", SchemeKind::FreeBasis),
];
const TRAPS: &[(&str, TrapKind)] = &[
    ("none", TrapKind::None),
    ("mixed", TrapKind::Mixed),
    ("contracted", TrapKind::Contracted),
    ("concentrated", TrapKind::Concentrated),
];
const SWEEPS: &[(&str, SweepParameter)] = &[
    ("none", SweepParameter::None),
    ("theta", SweepParameter::Theta),
    ("delta", SweepParameter::Delta),
    ("eps", SweepParameter::Eps),
    ("r0", SweepParameter::R0),
];
const FORMATS: &[(&str, OutputFormat)] = &[("csv", OutputFormat::Csv), ("json", OutputFormat::Json)];

fn name_of<T: PartialEq + Copy>(options: &[(&'static str, T)], t: T) -> &'static str {
    options.iter().find(|o| o.1 == t).map(|o| o.0).expect("every variant is named")
}

/// f64 text that parses back to the same bits.
fn exact(x: f64) -> String {
    format!("{x:?}")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(&format!("line {}", n + 1), "expected `key = value`"))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Apply a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::config(kv, "expected key=value"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "physical.alpha" => self.alpha = num(key, v)?,
            "physical.Z" => self.z = num(key, v)?,
            "potential.type" => self.potential = choice(key, v, POTENTIALS)?,
            "potential.depth" => self.depth = num(key, v)?,
            "potential.width" => self.width = num(key, v)?,
            "basis.scheme" => self.scheme = choice(key, v, SCHEMES)?,
            "basis.exponents" => {
                self.exponents = if v.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    ExponentSource::List(
                        v.split(',').map(|x| num(key, x.trim())).collect::<Result<Vec<_>>>()?,
                    )
                } else {
                    ExponentSource::Named(v.to_string())
                }
            }
            "basis.eps" => self.eps = num(key, v)?,
            "basis.n_keep" => self.n_keep = Some(count(key, v)?),
            "basis.aux_ratio" => self.aux_ratio = num(key, v)?,
            "basis.aux_size" => self.aux_size = Some(count(key, v)?),
            "trap.kind" => self.trap = choice(key, v, TRAPS)?,
            "trap.theta" => self.theta = num(key, v)?,
            "trap.b_reduced" => self.b_reduced = num(key, v)?,
            "trap.delta" => self.delta = num(key, v)?,
            "trap.r0" => self.r0 = num(key, v)?,
            "trap.width_exponent" => self.width_exponent = num(key, v)?,
            "sweep.parameter" => self.sweep = choice(key, v, SWEEPS)?,
            "sweep.from" => self.from = num(key, v)?,
            "sweep.to" => self.to = num(key, v)?,
            "sweep.steps" => self.steps = count(key, v)?,
            "solver.overlap_threshold" => self.solver.overlap_threshold = num(key, v)?,
            "solver.residual_tolerance" => self.solver.residual_tolerance = num(key, v)?,
            "classify.drift_factor" => self.thresholds.drift_factor = num(key, v)?,
            "classify.drift_floor" => self.thresholds.drift_floor = num(key, v)?,
            "classify.oracle_tol" => self.thresholds.oracle_tol = num(key, v)?,
            "classify.overlap_tol" => self.thresholds.overlap_tol = num(key, v)?,
            "output.format" => self.format = choice(key, v, FORMATS)?,
            "output.path" => self.output = Some(PathBuf::from(v)),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, x: f64| {
            if x > 0.0 {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {x}")))
            }
        };
        positive("physical.alpha", self.alpha)?;
        if self.z < 0.0 {
            return Err(Error::config("physical.Z", "must be non-negative"));
        }
        if self.potential == PotentialKind::GaussianWell {
            positive("potential.width", self.width)?;
        }
        if self.scheme == SchemeKind::DualKineticBalance && !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::config("basis.eps", "must lie in (0, 1]"));
        }
        if self.scheme == SchemeKind::FreeBasis && !(self.aux_ratio > 1.0) {
            return Err(Error::config("basis.aux_ratio", "must exceed 1"));
        }
        if self.trap != TrapKind::None {
            positive("trap.b_reduced", self.b_reduced)?;
        }
        let needs = match self.sweep {
            SweepParameter::None => None,
            SweepParameter::Theta => Some(TrapKind::Mixed),
            SweepParameter::Delta => Some(TrapKind::Contracted),
            SweepParameter::R0 => Some(TrapKind::Concentrated),
            SweepParameter::Eps => {
                if self.scheme != SchemeKind::DualKineticBalance {
                    return Err(Error::config("sweep.parameter", "eps sweeps need basis.scheme = dual-kinetic-balance"));
                }
                None
            }
        };
        if let Some(kind) = needs {
            if self.trap != kind {
                return Err(Error::config(
                    "sweep.parameter",
                    format!("sweeping {} needs trap.kind = {}", name_of(SWEEPS, self.sweep), name_of(TRAPS, kind)),
                ));
            }
        }
        if self.sweep != SweepParameter::None && self.steps < 2 {
            return Err(Error::config("sweep.steps", "a sweep needs at least 2 steps"));
        }
        Ok(())
    }

    /// Text form; parsing it back gives an identical configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("physical.alpha", exact(self.alpha));
        kv("physical.Z", exact(self.z));
        kv("potential.type", name_of(POTENTIALS, self.potential).into());
        kv("potential.depth", exact(self.depth));
        kv("potential.width", exact(self.width));
        kv("basis.scheme", name_of(SCHEMES, self.scheme).into());
        kv(
            "basis.exponents",
            match &self.exponents {
                ExponentSource::Named(n) => n.clone(),
                ExponentSource::List(l) => l.iter().map(|x| exact(*x)).collect::<Vec<_>>().join(", "),
            },
        );
        kv("basis.eps", exact(self.eps));
        if let Some(n) = self.n_keep {
            kv("basis.n_keep", n.to_string());
        }
        kv("basis.aux_ratio", exact(self.aux_ratio));
        if let Some(n) = self.aux_size {
            kv("basis.aux_size", n.to_string());
        }
        kv("trap.kind", name_of(TRAPS, self.trap).into());
        kv("trap.theta", exact(self.theta));
        kv("trap.b_reduced", exact(self.b_reduced));
        kv("trap.delta", exact(self.delta));
        kv("trap.r0", exact(self.r0));
        kv("trap.width_exponent", exact(self.width_exponent));
        kv("sweep.parameter", name_of(SWEEPS, self.sweep).into());
        kv("sweep.from", exact(self.from));
        kv("sweep.to", exact(self.to));
        kv("sweep.steps", self.steps.to_string());
        kv("solver.overlap_threshold", exact(self.solver.overlap_threshold));
        kv("solver.residual_tolerance", exact(self.solver.residual_tolerance));
        kv("classify.drift_factor", exact(self.thresholds.drift_factor));
        kv("classify.drift_floor", exact(self.thresholds.drift_floor));
        kv("classify.oracle_tol", exact(self.thresholds.oracle_tol));
        kv("classify.overlap_tol", exact(self.thresholds.overlap_tol));
        kv("output.format", name_of(FORMATS, self.format).into());
        if let Some(p) = &self.output {
            kv("output.path", p.display().to_string());
        }
        s
    }

    /// Output path with relative paths placed under the override directory
    /// when the environment variable is set.
    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|p| resolve_output(p))
    }
}

pub fn resolve_output(p: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

/// Write via a temporary sibling and rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_defaults() {
        let cfg = RunConfig::parse(
            "# zinc\nphysical.Z = 30\nbasis.scheme = upper-lower  # naive\ntrap.kind = mixed\nsweep.parameter = theta\n",
        )
        .unwrap();
        assert_eq!(cfg.scheme, SchemeKind::UpperLower);
        assert_eq!(cfg.trap, TrapKind::Mixed);
        assert_eq!(cfg.alpha, DEFAULT_ALPHA);
    }

    #[test]
    fn errors_name_the_key() {
        match RunConfig::parse("basis.scheme = magic\n") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "basis.scheme"),
            other => panic!("{other:?}"),
        }
        match RunConfig::parse("physical.Z = lots\n") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "physical.Z"),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::parse("nonsense.key = 1\n").is_err());
        assert!(RunConfig::parse("no equals sign\n").is_err());
        assert!(RunConfig::parse("sweep.parameter = delta\n").is_err());
        assert!(RunConfig::parse("trap.kind = contracted\nsweep.parameter = delta\nsweep.steps = 1\n").is_err());
    }

    #[test]
    fn explicit_exponent_list() {
        let cfg = RunConfig::parse("basis.exponents = 0.5, 2, 8e3\n").unwrap();
        assert_eq!(cfg.exponents, ExponentSource::List(vec![0.5, 2.0, 8e3]));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply_override("basis.exponents=0.1,0.30000000000000004").unwrap();
        cfg.apply_override("output.path=out/run.csv").unwrap();
        cfg.apply_override("basis.n_keep=4").unwrap();
        let back = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.csv");
        write_atomic(&p, "a").unwrap();
        write_atomic(&p, "b").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
