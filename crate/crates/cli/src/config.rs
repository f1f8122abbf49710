//! Flat sectioned key-value configuration files.
//!
//! Format: `[section]` headers, one `key = value` assignment per line,
//! `#` comments, repeated keys allowed (collected in order). Example:
//!
//! ```text
//! [model]
//! m = 1.0
//! k = 1.0
//!
//! [grid]
//! r_min = 1.0
//! r_max = 5.0
//! dr = 0.02
//! t_end = 0.5
//!
//! [initial]
//! scenario = riemann
//! r_jump = 2.5
//! left = 1.0 3.0
//! right = 1.49 2.6
//!
//! [output]
//! dir = out
//! snapshots = 0.0, 0.25, 0.5
//! ```

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed sections: ordered (key, value) pairs per section name.
#[derive(Debug, Default, Clone)]
pub struct Sections {
    map: BTreeMap<String, Vec<(String, String)>>,
}

impl Sections {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| {
                    ConfigError(format!("line {}: malformed section header", lineno + 1))
                })?;
                current = name.trim().to_string();
                map.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            if current.is_empty() {
                return Err(ConfigError(format!(
                    "line {}: assignment before any [section]",
                    lineno + 1
                )));
            }
            map.entry(current.clone())
                .or_default()
                .push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Sections { map })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.map
            .get(section)?
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all(&self, section: &str, key: &str) -> Vec<&str> {
        self.map
            .get(section)
            .map(|list| {
                list.iter()
                    .filter(|(k, _)| k == key)
                    .map(|(_, v)| v.as_str())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.get(section, key)
            .ok_or_else(|| ConfigError(format!("missing [{section}] {key}")))
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        let v = self.require(section, key)?;
        v.parse()
            .map_err(|_| ConfigError(format!("[{section}] {key} = {v:?}: not a number")))
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ConfigError(format!("[{section}] {key} = {v:?}: not a number"))),
        }
    }

    pub fn u64_or(&self, section: &str, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ConfigError(format!("[{section}] {key} = {v:?}: not an integer"))),
        }
    }

    /// Comma/space-separated list of numbers.
    pub fn f64_list(&self, section: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse().map_err(|_| {
                        ConfigError(format!("[{section}] {key}: {s:?} is not a number"))
                    })
                })
                .collect(),
        }
    }
}

/// Output format for snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub m: f64,
    pub k: f64,
    pub grid: wbeuler::glimm::GridSpec,
    pub scenario: crate::scenario::Scenario,
    pub seed_offset: u64,
    pub snapshot_times: Vec<f64>,
    pub output_dir: String,
    pub format: OutputFormat,
    pub output_points: usize,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, ConfigError> {
    let s = Sections::parse(text)?;
    let m = s.f64("model", "m")?;
    let k = s.f64("model", "k")?;
    if !(m > 0.0) {
        return Err(ConfigError(format!("[model] m = {m}: must be positive")));
    }
    if !(k > 0.0) {
        return Err(ConfigError(format!("[model] k = {k}: must be positive")));
    }

    let grid = wbeuler::glimm::GridSpec {
        r_min: s.f64("grid", "r_min")?,
        r_max: s.f64("grid", "r_max")?,
        dr: s.f64("grid", "dr")?,
        cfl: s.f64_or("grid", "cfl", 0.45)?,
        t_end: s.f64("grid", "t_end")?,
    };
    if !(grid.r_min > 0.0) {
        return Err(ConfigError(format!("[grid] r_min = {}: must be positive", grid.r_min)));
    }
    if !(grid.r_max > grid.r_min) {
        return Err(ConfigError(format!(
            "[grid] r_max = {} must exceed r_min = {}",
            grid.r_max, grid.r_min
        )));
    }
    if !(grid.dr > 0.0) {
        return Err(ConfigError(format!("[grid] dr = {}: must be positive", grid.dr)));
    }
    if !(grid.cfl > 0.0 && grid.cfl < 1.0) {
        return Err(ConfigError(format!("[grid] cfl = {}: must lie in (0, 1)", grid.cfl)));
    }
    if !(grid.t_end >= 0.0) {
        return Err(ConfigError(format!("[grid] t_end = {}: must be nonnegative", grid.t_end)));
    }

    let scenario = crate::scenario::Scenario::from_sections(&s)?;
    let seed_offset = s.u64_or("sampler", "seed_offset", 0)?;

    let snapshot_times = s.f64_list("output", "snapshots")?;
    for &t in &snapshot_times {
        if t < 0.0 || t > grid.t_end {
            return Err(ConfigError(format!(
                "[output] snapshots: time {t} outside [0, t_end = {}]",
                grid.t_end
            )));
        }
    }
    let format = match s.get("output", "format").unwrap_or("csv") {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            return Err(ConfigError(format!(
                "[output] format = {other:?}: expected csv or json"
            )))
        }
    };
    let output_dir = s.get("output", "dir").unwrap_or("out").to_string();
    let output_points = s.u64_or("output", "points", 800)? as usize;

    Ok(RunConfig {
        m,
        k,
        grid,
        scenario,
        seed_offset,
        snapshot_times,
        output_dir,
        format,
        output_points,
    })
}

/// Atlas front-end configuration.
#[derive(Debug, Clone)]
pub struct AtlasConfig {
    pub m: f64,
    pub k: f64,
    /// (anchor_r, rho, v) triples.
    pub anchors: Vec<(f64, f64, f64)>,
    pub r_lo: f64,
    pub r_hi: f64,
    pub points: usize,
    pub export_critical: bool,
    pub output_dir: String,
}

pub fn parse_atlas_config(text: &str) -> Result<AtlasConfig, ConfigError> {
    let s = Sections::parse(text)?;
    let m = s.f64("model", "m")?;
    let k = s.f64("model", "k")?;
    if !(m > 0.0 && k > 0.0) {
        return Err(ConfigError("[model] m and k must be positive".into()));
    }
    let mut anchors = Vec::new();
    for spec in s.get_all("atlas", "anchor") {
        let nums: Vec<f64> = spec
            .split_whitespace()
            .map(|x| {
                x.parse()
                    .map_err(|_| ConfigError(format!("[atlas] anchor: {x:?} is not a number")))
            })
            .collect::<Result<_, _>>()?;
        if nums.len() != 3 {
            return Err(ConfigError(format!(
                "[atlas] anchor = {spec:?}: expected `r rho v`"
            )));
        }
        if !(nums[0] > 0.0) || !(nums[1] > 0.0) {
            return Err(ConfigError(format!(
                "[atlas] anchor = {spec:?}: r and rho must be positive"
            )));
        }
        anchors.push((nums[0], nums[1], nums[2]));
    }
    if anchors.is_empty() && s.get("atlas", "critical").is_none() {
        return Err(ConfigError("[atlas] needs at least one anchor or critical = true".into()));
    }
    let r_lo = s.f64_or("atlas", "r_lo", 0.1)?;
    let r_hi = s.f64_or("atlas", "r_hi", 10.0)?;
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(ConfigError(format!("[atlas] bad radius range [{r_lo}, {r_hi}]")));
    }
    let points = s.u64_or("atlas", "points", 400)? as usize;
    let export_critical = matches!(s.get("atlas", "critical"), Some("true") | Some("1"));
    let output_dir = s.get("output", "dir").unwrap_or("out").to_string();
    Ok(AtlasConfig {
        m,
        k,
        anchors,
        r_lo,
        r_hi,
        points,
        export_critical,
        output_dir,
    })
}
