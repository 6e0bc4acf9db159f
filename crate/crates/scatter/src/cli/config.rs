//! Run configuration: flat `[section]` / `key = value` files.
//!
//! Lines starting with `#` or `;` are comments. Angles are given in degrees.
//! Incidence and observation angles are stored in radians; the far-field grid
//! keeps its degree values so CSV angle columns reproduce the input exactly.
//! Unknown sections or keys are rejected.

use crate::analytic::{MaterialParams, SeriesControl};
use crate::assembly::{Formulation, MeshFamily, MeshSpec, ProblemKind, RadialBasis};
use crate::error::{Result, ScatterError};
use crate::postprocess::direction_from_angles;
use crate::specfun::C64;
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Parsed `[section] key = value` document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Ini {
    /// Parses the text of a configuration file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_ascii_lowercase();
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ScatterError::Parse(format!("line {}: expected key = value, got {line:?}", no + 1)))?;
            let sec = current
                .as_ref()
                .ok_or_else(|| ScatterError::Parse(format!("line {}: key outside of a [section]", no + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            let entry = sections.get_mut(sec).expect("section exists");
            if entry.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(ScatterError::Parse(format!("line {}: duplicate key {sec}.{key}", no + 1)));
            }
        }
        Ok(Self { sections })
    }

    /// Value of `section.key`, if present.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    fn check_known(&self, known: &[(&str, &[&str])]) -> Result<()> {
        for (sec, keys) in &self.sections {
            let allowed = known
                .iter()
                .find(|(s, _)| s == sec)
                .ok_or_else(|| ScatterError::Config(format!("unknown section [{sec}]")))?
                .1;
            if let Some(k) = keys.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(ScatterError::Config(format!("unknown key {sec}.{k}")));
            }
        }
        Ok(())
    }

    fn f64(&self, sec: &str, key: &str) -> Result<Option<f64>> {
        self.get(sec, key)
            .map(|v| v.parse::<f64>().map_err(|_| ScatterError::Parse(format!("{sec}.{key}: not a number: {v:?}"))))
            .transpose()
    }

    fn usize(&self, sec: &str, key: &str) -> Result<Option<usize>> {
        self.get(sec, key)
            .map(|v| v.parse::<usize>().map_err(|_| ScatterError::Parse(format!("{sec}.{key}: not an integer: {v:?}"))))
            .transpose()
    }

    fn f64_list(&self, sec: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(sec, key)
            .map(|v| {
                v.split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| ScatterError::Parse(format!("{sec}.{key}: bad entry {t:?}"))))
                    .collect()
            })
            .transpose()
    }

    fn usize_list(&self, sec: &str, key: &str) -> Result<Option<Vec<usize>>> {
        self.get(sec, key)
            .map(|v| {
                v.split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| ScatterError::Parse(format!("{sec}.{key}: bad entry {t:?}"))))
                    .collect()
            })
            .transpose()
    }
}

const KNOWN: &[(&str, &[&str])] = &[
    ("problem", &["kind", "source"]),
    ("geometry", &["r0", "r1", "r_a", "r_a_factor"]),
    ("material", &["preset", "e", "nu", "rho_s", "rho_f", "c_f"]),
    ("mesh", &["degree", "levels", "continuity", "family", "quad_points"]),
    ("ie", &["formulation", "n", "basis"]),
    ("wave", &["k", "frequency", "p_inc", "alpha_s", "beta_s"]),
    ("series", &["rel_tol", "n_max", "n_trunc"]),
    ("farfield", &["alpha_start", "alpha_end", "count", "beta", "ts_alpha", "ts_beta"]),
    ("check", &["energy_max", "ts_tol_db", "ts_target_db", "far_rel_max"]),
    ("output", &["path"]),
];

/// Acceptance tolerances applied with `--check`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckLimits {
    /// Largest admissible relative energy error.
    pub energy_max: Option<f64>,
    /// Largest admissible TS deviation in dB (from the analytic value, or from `ts_target_db`).
    pub ts_tol_db: Option<f64>,
    /// Fixed TS target in dB instead of the analytic value.
    pub ts_target_db: Option<f64>,
    /// Largest admissible pointwise relative far-field error.
    pub far_rel_max: Option<f64>,
}

/// Observation angles for far-field patterns, kept in degrees as written in the
/// configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    /// First aspect angle `α_f` in degrees.
    pub alpha_start: f64,
    /// Last aspect angle `α_f` in degrees.
    pub alpha_end: f64,
    /// Number of angles (one gives `alpha_start` only).
    pub count: usize,
    /// Elevation `β_f` in degrees.
    pub beta: f64,
}

impl AngleGrid {
    /// Aspect angles of the grid in degrees.
    pub fn alphas_deg(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.alpha_start];
        }
        let step = (self.alpha_end - self.alpha_start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.alpha_start + step * i as f64).collect()
    }
}

/// Complete description of a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Problem type (with the source point for the manufactured solution).
    pub kind: ProblemKind,
    /// Outer scatterer radius `R₀`.
    pub r0: f64,
    /// Inner shell radius `R₁` (ASI problems).
    pub r1: Option<f64>,
    /// Radius of the artificial boundary.
    pub r_a: f64,
    /// Material data.
    pub material: MaterialParams,
    /// Degree `p̌`.
    pub degree: usize,
    /// Refinement levels.
    pub levels: Vec<usize>,
    /// Continuity `ǩ` (defaults to `p̌ - 1`).
    pub continuity: usize,
    /// Mesh family.
    pub family: MeshFamily,
    /// Quadrature points per direction (defaults to `p̌ + 1`).
    pub quad_points: Option<usize>,
    /// Infinite-element formulation.
    pub formulation: Formulation,
    /// Number of radial functions `N`.
    pub n: usize,
    /// Radial basis.
    pub basis: RadialBasis,
    /// Wave numbers.
    pub k_list: Vec<f64>,
    /// Incident amplitude.
    pub p_inc: C64,
    /// Incidence angles `(α_s, β_s)` in radians.
    pub incidence: (f64, f64),
    /// Series truncation control for the analytic solutions.
    pub series: SeriesControl,
    /// Far-field grid.
    pub farfield: AngleGrid,
    /// Observation direction `(α, β)` for TS in sweeps (defaults to back-scattering).
    pub ts_angles: Option<(f64, f64)>,
    /// Tolerances for `--check`.
    pub check: CheckLimits,
    /// CSV destination (standard output when absent).
    pub output: Option<PathBuf>,
}

fn deg(v: f64) -> f64 {
    v.to_radians()
}

fn parse_vec3(s: &str) -> Result<[f64; 3]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| ScatterError::Parse(format!("bad vector entry {t:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != 3 {
        return Err(ScatterError::Parse(format!("expected three components, got {}", v.len())));
    }
    Ok([v[0], v[1], v[2]])
}

impl RunConfig {
    /// Parses and validates a configuration file's text.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_ini(&Ini::parse(text)?)
    }

    /// Reads and parses a configuration file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Builds the configuration from a parsed document.
    pub fn from_ini(ini: &Ini) -> Result<Self> {
        ini.check_known(KNOWN)?;
        let r0 = ini.f64("geometry", "r0")?.ok_or_else(|| ScatterError::Config("geometry.r0 is required".into()))?;
        let r1 = ini.f64("geometry", "r1")?;
        let r_a = match (ini.f64("geometry", "r_a")?, ini.f64("geometry", "r_a_factor")?) {
            (Some(r), None) => r,
            (None, Some(s)) => s * r0,
            (Some(_), Some(_)) => return Err(ScatterError::Config("set only one of geometry.r_a and geometry.r_a_factor".into())),
            (None, None) => return Err(ScatterError::Config("geometry.r_a (or r_a_factor) must be set explicitly".into())),
        };
        let kind_s = ini.get("problem", "kind").ok_or_else(|| ScatterError::Config("problem.kind is required".into()))?;
        let kind = match kind_s.to_ascii_lowercase().as_str() {
            "shbc" => ProblemKind::Shbc,
            "ssbc" => ProblemKind::Ssbc,
            "nnbc" => ProblemKind::Nnbc,
            "manufactured" => {
                let source = match ini.get("problem", "source") {
                    Some(s) => parse_vec3(s)?,
                    None => [0.25 * r0; 3],
                };
                ProblemKind::Manufactured { source }
            }
            other => return Err(ScatterError::Config(format!("unknown problem kind {other:?}"))),
        };
        let material = match ini.get("material", "preset") {
            Some(p) if p.eq_ignore_ascii_case("ihlenburg") => MaterialParams::ihlenburg(),
            Some(p) => return Err(ScatterError::Config(format!("unknown material preset {p:?}"))),
            None => {
                let base = MaterialParams::ihlenburg();
                MaterialParams::new(
                    ini.f64("material", "e")?.unwrap_or(base.e),
                    ini.f64("material", "nu")?.unwrap_or(base.nu),
                    ini.f64("material", "rho_s")?.unwrap_or(base.rho_s),
                    ini.f64("material", "rho_f")?.unwrap_or(base.rho_f),
                    ini.f64("material", "c_f")?.unwrap_or(base.c_f),
                )?
            }
        };
        let degree = ini.usize("mesh", "degree")?.unwrap_or(2);
        let levels = ini.usize_list("mesh", "levels")?.unwrap_or_else(|| vec![1]);
        let continuity = ini.usize("mesh", "continuity")?.unwrap_or(degree.saturating_sub(1));
        let family = ini.get("mesh", "family").map(MeshFamily::parse).transpose()?.unwrap_or(MeshFamily::Iga);
        let quad_points = ini.usize("mesh", "quad_points")?;
        let formulation = ini.get("ie", "formulation").map(Formulation::parse).transpose()?.unwrap_or(Formulation::Bgu);
        let n = ini.usize("ie", "n")?.unwrap_or(3);
        let basis = ini.get("ie", "basis").map(RadialBasis::parse).transpose()?.unwrap_or(RadialBasis::default_for(n));
        let k_list = match (ini.f64_list("wave", "k")?, ini.f64_list("wave", "frequency")?) {
            (Some(k), None) => k,
            (None, Some(f)) => f.iter().map(|f| 2.0 * std::f64::consts::PI * f / material.c_f).collect(),
            (Some(_), Some(_)) => return Err(ScatterError::Config("set only one of wave.k and wave.frequency".into())),
            (None, None) => return Err(ScatterError::Config("wave.k (or wave.frequency) is required".into())),
        };
        let p_inc = C64::new(ini.f64("wave", "p_inc")?.unwrap_or(1.0), 0.0);
        let incidence = (deg(ini.f64("wave", "alpha_s")?.unwrap_or(0.0)), deg(ini.f64("wave", "beta_s")?.unwrap_or(-90.0)));
        let mut series = SeriesControl::default();
        if let Some(t) = ini.f64("series", "rel_tol")? {
            series.rel_tol = t;
        }
        if let Some(m) = ini.usize("series", "n_max")? {
            series.n_max = m;
        }
        series.n_trunc = ini.usize("series", "n_trunc")?;
        let farfield = AngleGrid {
            alpha_start: ini.f64("farfield", "alpha_start")?.unwrap_or(0.0),
            alpha_end: ini.f64("farfield", "alpha_end")?.unwrap_or(180.0),
            count: ini.usize("farfield", "count")?.unwrap_or(181),
            beta: ini.f64("farfield", "beta")?.unwrap_or(0.0),
        };
        let ts_angles = match (ini.f64("farfield", "ts_alpha")?, ini.f64("farfield", "ts_beta")?) {
            (None, None) => None,
            (a, b) => Some((deg(a.unwrap_or(0.0)), deg(b.unwrap_or(0.0)))),
        };
        let check = CheckLimits {
            energy_max: ini.f64("check", "energy_max")?,
            ts_tol_db: ini.f64("check", "ts_tol_db")?,
            ts_target_db: ini.f64("check", "ts_target_db")?,
            far_rel_max: ini.f64("check", "far_rel_max")?,
        };
        let output = ini.get("output", "path").map(PathBuf::from);
        let cfg = Self {
            kind,
            r0,
            r1,
            r_a,
            material,
            degree,
            levels,
            continuity,
            family,
            quad_points,
            formulation,
            n,
            basis,
            k_list,
            p_inc,
            incidence,
            series,
            farfield,
            ts_angles,
            check,
            output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0) || !(self.r_a > self.r0) {
            return Err(ScatterError::Config(format!("need r_a > R0 > 0, got R0 = {}, r_a = {}", self.r0, self.r_a)));
        }
        if self.kind.is_asi() {
            match self.r1 {
                Some(r1) if r1 > 0.0 && r1 < self.r0 => {}
                _ => return Err(ScatterError::Config("ASI problems need 0 < geometry.r1 < geometry.r0".into())),
            }
        }
        if self.n == 0 {
            return Err(ScatterError::Config("ie.n must be at least 1".into()));
        }
        if self.k_list.is_empty() || self.k_list.iter().any(|k| !(*k > 0.0)) {
            return Err(ScatterError::Config("wave numbers must be positive".into()));
        }
        if self.levels.is_empty() {
            return Err(ScatterError::Config("mesh.levels must not be empty".into()));
        }
        for &level in &self.levels {
            self.mesh_spec(level).validate()?;
        }
        Ok(())
    }

    /// Mesh specification at `level`.
    pub fn mesh_spec(&self, level: usize) -> MeshSpec {
        MeshSpec { level, degree: self.degree, continuity: self.continuity, family: self.family }
    }

    /// Incident direction `d_s = −(cos β cos α, cos β sin α, sin β)`.
    pub fn incident_direction(&self) -> [f64; 3] {
        direction_from_angles(self.incidence.0, self.incidence.1).map(|c| -c)
    }

    /// Observation direction for sweep TS values: `ts_angles` if set, else back-scattering `−d_s`.
    pub fn ts_direction(&self) -> [f64; 3] {
        match self.ts_angles {
            Some((a, b)) => direction_from_angles(a, b),
            None => self.incident_direction().map(|c| -c),
        }
    }

    /// Inner radius, defaulting to `R₀` for non-ASI problems.
    pub fn inner_radius(&self) -> f64 {
        self.r1.unwrap_or(self.r0)
    }
}
