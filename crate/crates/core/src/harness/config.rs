//! Experiment configuration: a flat `key = value` text format with
//! dotted sections, plus the typed structures it parses into.
//!
//! Grammar (documented in the README): one `key = value` pair per line,
//! `#` starts a comment, blank lines are ignored. Keys are dotted paths;
//! `cell.<label>.<field>` keys describe one ensemble cell each, and cells
//! run in order of first appearance. Lists are comma-separated.

use crate::ensembles::{BandwidthRule, BlockPattern, EnsembleSpec, FillingOrder, Profile};
use crate::error::{Error, Result};
use crate::laws::{cw_variance, Law, MixtureSc};
use crate::sampling::{ProcessSpec, ScalarDist};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Output artifact kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (expected json, csv or svg)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

/// How scaled eigenvalues are produced from the raw spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalingRule {
    /// The ensemble's natural normalization (`norm_factor`).
    Auto,
    /// Force `1/sqrt(N)`.
    SqrtN,
    /// `1/N` (norm studies for ensembles with an N-scaled outlier).
    InvN,
    /// `1/N^gamma`.
    Pow(f64),
}

impl ScalingRule {
    pub fn factor(&self, spec: &EnsembleSpec, n: usize) -> Result<f64> {
        Ok(match self {
            ScalingRule::Auto => crate::ensembles::norm_factor(spec, n)?,
            ScalingRule::SqrtN => 1.0 / (n as f64).sqrt(),
            ScalingRule::InvN => 1.0 / n as f64,
            ScalingRule::Pow(gamma) => (n as f64).powf(-gamma),
        })
    }

    fn render(&self) -> String {
        match self {
            ScalingRule::Auto => "auto".into(),
            ScalingRule::SqrtN => "sqrt-n".into(),
            ScalingRule::InvN => "inv-n".into(),
            ScalingRule::Pow(g) => format!("pow:{g}"),
        }
    }
}

/// One ensemble to run (a config may sweep several).
#[derive(Clone, Debug)]
pub struct CellConfig {
    pub label: String,
    pub ensemble: EnsembleSpec,
    pub scaling: ScalingRule,
    pub ks_law: Option<Law>,
    /// Number of largest-modulus eigenvalues excluded from moment and KS
    /// statistics (rank-one outliers); norms always see the full
    /// spectrum.
    pub drop_top: usize,
}

/// A full experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub replicas: usize,
    pub k_max: usize,
    pub cells: Vec<CellConfig>,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub hist_bins: Option<usize>,
    pub window: Option<(f64, f64)>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("sizes must be nonempty".into()));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n > 8192) {
            // dense storage and an O(N^3) solve; keep runs desk-scale
            return Err(Error::ResourceCap(format!(
                "size {n} exceeds the dense desk-scale limit 8192"
            )));
        }
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        if self.k_max > 12 {
            return Err(Error::Config(format!(
                "k_max must be <= 12, got {}",
                self.k_max
            )));
        }
        if self.cells.is_empty() {
            return Err(Error::Config("at least one cell is required".into()));
        }
        for cell in &self.cells {
            for &n in &self.sizes {
                cell.ensemble.validate(n)?;
            }
        }
        Ok(())
    }

    /// Stable rendering of the resolved configuration; hashed into the
    /// report metadata.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "seed = {}", self.seed);
        let sizes: Vec<String> = self.sizes.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "sizes = {}", sizes.join(", "));
        let _ = writeln!(s, "replicas = {}", self.replicas);
        let _ = writeln!(s, "k_max = {}", self.k_max);
        let formats: Vec<&str> = self.formats.iter().map(|f| f.name()).collect();
        let _ = writeln!(s, "formats = {}", formats.join(", "));
        if let Some(b) = self.hist_bins {
            let _ = writeln!(s, "bins = {b}");
        }
        if let Some((lo, hi)) = self.window {
            let _ = writeln!(s, "window = {lo}, {hi}");
        }
        for cell in &self.cells {
            let _ = writeln!(s, "cell.{}.ensemble = {:?}", cell.label, cell.ensemble);
            let _ = writeln!(s, "cell.{}.scaling = {}", cell.label, cell.scaling.render());
            let _ = writeln!(
                s,
                "cell.{}.ks = {}",
                cell.label,
                cell.ks_law.as_ref().map(|l| l.label()).unwrap_or_else(|| "none".into())
            );
            let _ = writeln!(s, "cell.{}.drop_top = {}", cell.label, cell.drop_top);
        }
        s
    }

    pub fn config_hash(&self) -> String {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for b in self.canonical_string().bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// Raw parsed config file: pairs in file order plus a lookup map.
struct RawConfig {
    pairs: Vec<(String, String)>,
    map: BTreeMap<String, String>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<RawConfig> {
        let mut pairs = Vec::new();
        let mut map = BTreeMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            if map.insert(key.clone(), value.clone()).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
            pairs.push((key, value));
        }
        Ok(RawConfig { pairs, map })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected an integer, got '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected an integer, got '{value}'")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got '{value}'")))
}

fn parse_dist(key: &str, value: &str) -> Result<ScalarDist> {
    let d = match value {
        "rademacher" => ScalarDist::Rademacher,
        "gaussian" => ScalarDist::StdGaussian,
        other => match other.strip_prefix("two-point:") {
            Some(t) => ScalarDist::TwoPoint(parse_f64(key, t)?),
            None => {
                return Err(Error::Config(format!(
                    "{key}: unknown distribution '{value}' \
                     (rademacher | gaussian | two-point:<t>)"
                )))
            }
        },
    };
    d.validate()?;
    Ok(d)
}

fn parse_pairs(key: &str, value: &str) -> Result<Vec<(f64, f64)>> {
    value
        .split(',')
        .map(|item| {
            let (a, b) = item.trim().split_once(':').ok_or_else(|| {
                Error::Config(format!("{key}: expected '<a>:<b>' entries, got '{item}'"))
            })?;
            Ok((parse_f64(key, a.trim())?, parse_f64(key, b.trim())?))
        })
        .collect()
}

fn parse_process(key: &str, value: &str) -> Result<ProcessSpec> {
    let spec = if let Some(d) = value.strip_prefix("iid:") {
        ProcessSpec::Iid(parse_dist(key, d)?)
    } else if let Some(q) = value.strip_prefix("markov:") {
        ProcessSpec::MarkovTwoState {
            flip: parse_f64(key, q)?,
        }
    } else if let Some(r) = value.strip_prefix("ar1:") {
        ProcessSpec::GaussAr1 {
            rho: parse_f64(key, r)?,
        }
    } else if let Some(d) = value.strip_prefix("const:") {
        ProcessSpec::Constant(parse_dist(key, d)?)
    } else {
        return Err(Error::Config(format!(
            "{key}: unknown process '{value}' \
             (iid:<dist> | markov:<q> | ar1:<rho> | const:<dist>)"
        )));
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_scaling(key: &str, value: &str) -> Result<ScalingRule> {
    match value {
        "auto" => Ok(ScalingRule::Auto),
        "sqrt-n" => Ok(ScalingRule::SqrtN),
        "inv-n" => Ok(ScalingRule::InvN),
        other => match other.strip_prefix("pow:") {
            Some(g) => Ok(ScalingRule::Pow(parse_f64(key, g)?)),
            None => Err(Error::Config(format!(
                "{key}: unknown scaling '{value}' (auto | sqrt-n | inv-n | pow:<gamma>)"
            ))),
        },
    }
}

/// Parse a law spec (`none | sc:<v> | cw:<beta> | mix:<w>:<v>,...`).
pub fn parse_law_spec(value: &str) -> Result<Option<Law>> {
    parse_law("law", value.trim())
}

/// Parse one ensemble description given as bare `field = value` lines
/// (the body of a `cell.<label>.*` block without the prefix).
pub fn parse_ensemble_block(text: &str) -> Result<EnsembleSpec> {
    let prefixed: String = text
        .lines()
        .map(|line| {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                t.to_string()
            } else {
                format!("cell.x.{t}")
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let raw = RawConfig::parse(&prefixed)?;
    parse_ensemble(&raw, "x")
}

fn parse_law(key: &str, value: &str) -> Result<Option<Law>> {
    if value == "none" {
        return Ok(None);
    }
    if let Some(v) = value.strip_prefix("sc:") {
        let v = parse_f64(key, v)?;
        if v <= 0.0 {
            return Err(Error::Config(format!(
                "{key}: semicircle variance must be positive"
            )));
        }
        return Ok(Some(Law::Semicircle(v)));
    }
    if let Some(beta) = value.strip_prefix("cw:") {
        let beta = parse_f64(key, beta)?;
        return Ok(Some(Law::Semicircle(cw_variance(beta))));
    }
    if let Some(spec) = value.strip_prefix("mix:") {
        let mixture = MixtureSc::new(parse_pairs(key, spec)?)?;
        return Ok(Some(Law::Mixture(mixture)));
    }
    Err(Error::Config(format!(
        "{key}: unknown law '{value}' (none | sc:<v> | cw:<beta> | mix:<w>:<v>,...)"
    )))
}

fn parse_ensemble(raw: &RawConfig, label: &str) -> Result<EnsembleSpec> {
    let field = |name: &str| format!("cell.{label}.{name}");
    let get = |name: &str| raw.get(&field(name));
    let require = |name: &str| {
        get(name).ok_or_else(|| Error::Config(format!("missing key '{}'", field(name))))
    };
    let dist = || parse_dist(&field("dist"), require("dist")?);
    let kind = require("ensemble")?;
    Ok(match kind {
        "wigner" => EnsembleSpec::Wigner { dist: dist()? },
        "band" => {
            let key = field("band");
            let value = require("band")?;
            let bandwidth = if let Some(b) = value.strip_prefix("fixed:") {
                BandwidthRule::Fixed(parse_usize(&key, b)?)
            } else if let Some(rest) = value.strip_prefix("power:") {
                let (c, g) = rest.split_once(':').ok_or_else(|| {
                    Error::Config(format!("{key}: expected power:<coeff>:<exponent>"))
                })?;
                BandwidthRule::Power {
                    coeff: parse_f64(&key, c)?,
                    exponent: parse_f64(&key, g)?,
                }
            } else if let Some(c) = value.strip_prefix("linear:") {
                BandwidthRule::LinearFraction(parse_f64(&key, c)?)
            } else {
                return Err(Error::Config(format!(
                    "{key}: unknown bandwidth rule '{value}' \
                     (fixed:<b> | power:<C>:<gamma> | linear:<c>)"
                )));
            };
            let periodic = match get("periodic").unwrap_or("false") {
                "true" => true,
                "false" => false,
                other => {
                    return Err(Error::Config(format!(
                        "{}: expected true or false, got '{other}'",
                        field("periodic")
                    )))
                }
            };
            EnsembleSpec::BandWigner {
                dist: dist()?,
                bandwidth,
                periodic,
            }
        }
        "profile-band" => {
            let steps = parse_pairs(&field("profile"), require("profile")?)?;
            EnsembleSpec::ProfileBand {
                dist: dist()?,
                profile: Profile::from_steps(steps)?,
            }
        }
        "sparse-block" => {
            let pattern = match require("pattern")? {
                "sym" => BlockPattern::Sym,
                "antisym" => BlockPattern::Antisym,
                other => {
                    return Err(Error::Config(format!(
                        "{}: unknown pattern '{other}' (sym | antisym)",
                        field("pattern")
                    )))
                }
            };
            EnsembleSpec::SparseBlock {
                pattern,
                dist: dist()?,
            }
        }
        "diagonal-process" => EnsembleSpec::DiagonalProcess {
            process: parse_process(&field("process"), require("process")?)?,
        },
        "diagonal-cw" => EnsembleSpec::DiagonalCw {
            beta: parse_f64(&field("beta"), require("beta")?)?,
        },
        "filled-process" => {
            let filling = match require("filling")? {
                "diagonal" => FillingOrder::Diagonal,
                "row-by-row" => FillingOrder::RowByRow,
                other => {
                    return Err(Error::Config(format!(
                        "{}: unknown filling '{other}' (diagonal | row-by-row)",
                        field("filling")
                    )))
                }
            };
            EnsembleSpec::FilledProcess {
                process: parse_process(&field("process"), require("process")?)?,
                filling,
            }
        }
        "full-cw" => EnsembleSpec::FullCw {
            beta: parse_f64(&field("beta"), require("beta")?)?,
        },
        "exchangeable-spin" => EnsembleSpec::ExchangeableSpin {
            atoms: parse_pairs(&field("atoms"), require("atoms")?)?,
        },
        "rank-one" => EnsembleSpec::RankOne,
        other => {
            return Err(Error::Config(format!(
                "{}: unknown ensemble '{other}'",
                field("ensemble")
            )))
        }
    })
}

/// Parse the flat text format into a full experiment configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw = RawConfig::parse(text)?;

    let known_top = ["name", "seed", "sizes", "replicas", "k_max", "formats", "out", "bins", "window"];
    let known_cell = [
        "ensemble", "dist", "band", "periodic", "profile", "pattern", "process", "filling",
        "beta", "atoms", "scaling", "ks", "drop_top",
    ];
    for (key, _) in &raw.pairs {
        if let Some(rest) = key.strip_prefix("cell.") {
            let mut parts = rest.splitn(2, '.');
            let label = parts.next().unwrap_or("");
            let field = parts.next().unwrap_or("");
            if label.is_empty() || !known_cell.contains(&field) {
                return Err(Error::Config(format!("unknown key '{key}'")));
            }
        } else if !known_top.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
    }

    let name = raw.get("name").unwrap_or("experiment").to_string();
    let seed = parse_u64("seed", raw.get("seed").unwrap_or("0"))?;
    let sizes = raw
        .get("sizes")
        .ok_or_else(|| Error::Config("missing key 'sizes'".into()))?
        .split(',')
        .map(|s| parse_usize("sizes", s.trim()))
        .collect::<Result<Vec<_>>>()?;
    let replicas = parse_usize("replicas", raw.get("replicas").unwrap_or("1"))?;
    let k_max = parse_usize("k_max", raw.get("k_max").unwrap_or("6"))?;
    let formats = raw
        .get("formats")
        .unwrap_or("json")
        .split(',')
        .map(Format::parse)
        .collect::<Result<Vec<_>>>()?;
    let out_dir = PathBuf::from(raw.get("out").unwrap_or("reports"));
    let hist_bins = match raw.get("bins") {
        Some(b) => Some(parse_usize("bins", b)?),
        None => None,
    };
    let window = match raw.get("window") {
        Some(w) => {
            let (lo, hi) = w
                .split_once(',')
                .ok_or_else(|| Error::Config("window: expected '<lo>, <hi>'".into()))?;
            Some((parse_f64("window", lo.trim())?, parse_f64("window", hi.trim())?))
        }
        None => None,
    };

    // cells in order of first appearance
    let mut labels: Vec<String> = Vec::new();
    for (key, _) in &raw.pairs {
        if let Some(rest) = key.strip_prefix("cell.") {
            if let Some(label) = rest.split('.').next() {
                if !labels.iter().any(|l| l == label) {
                    labels.push(label.to_string());
                }
            }
        }
    }
    let mut cells = Vec::new();
    for label in labels {
        let ensemble = parse_ensemble(&raw, &label)?;
        let scaling = match raw.get(&format!("cell.{label}.scaling")) {
            Some(s) => parse_scaling(&format!("cell.{label}.scaling"), s)?,
            None => ScalingRule::Auto,
        };
        let ks_law = match raw.get(&format!("cell.{label}.ks")) {
            Some(s) => parse_law(&format!("cell.{label}.ks"), s)?,
            None => None,
        };
        let drop_top = match raw.get(&format!("cell.{label}.drop_top")) {
            Some(s) => parse_usize(&format!("cell.{label}.drop_top"), s)?,
            None => 0,
        };
        cells.push(CellConfig {
            label,
            ensemble,
            scaling,
            ks_law,
            drop_top,
        });
    }

    let config = ExperimentConfig {
        name,
        seed,
        sizes,
        replicas,
        k_max,
        cells,
        out_dir,
        formats,
        hist_bins,
        window,
    };
    config.validate()?;
    Ok(config)
}
