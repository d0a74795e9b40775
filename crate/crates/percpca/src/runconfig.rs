//! Run configuration: flat key=value config files, argument resolution, and
//! the `--print-config` echo.
//!
//! Precedence: command-line flags override config-file values, which override
//! the built-in defaults. Unknown config keys are rejected. Every stochastic
//! command requires a master seed — there is no wall-clock fallback.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use percpca_core::Neighborhood;

use crate::verify::DEFAULT_VERIFY_SEED;

/// Defaults for the survival sweep (desk scale).
pub const SWEEP_DEFAULT_N: i64 = 2000;
pub const SWEEP_DEFAULT_T: u64 = 2000;
pub const SWEEP_DEFAULT_R: u64 = 200;
/// `--full-scale` switches the sweep defaults to the published-experiment
/// sizes (hours of compute; never run in CI).
pub const SWEEP_FULL_N: i64 = 100_000;
pub const SWEEP_FULL_T: u64 = 100_000;
pub const SWEEP_FULL_R: u64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Bounds {
        neighborhoods: Vec<Neighborhood>,
        phi_exponent_debug: bool,
    },
    Simulate {
        u: Neighborhood,
        n: i64,
        p: f64,
        replicas: u64,
        t_max: u64,
        seed: u64,
    },
    Sweep {
        u: Neighborhood,
        n: i64,
        t_end: u64,
        replicas: u64,
        p_grid: Vec<f64>,
        seed: u64,
    },
    TauScaling {
        u: Neighborhood,
        p: f64,
        n_list: Vec<i64>,
        replicas: u64,
        t_max: u64,
        seed: u64,
    },
    GammaScan {
        u: Neighborhood,
        p_grid: Vec<f64>,
        m_max: u64,
        replicas: u64,
        seed: u64,
    },
    Decay {
        u: Neighborhood,
        p: f64,
        m_list: Vec<u64>,
        replicas: u64,
        seed: u64,
    },
    Verify {
        seed: u64,
    },
}

/// Resolved run configuration (command plus the global execution knobs).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Optional cosmetic SVG line chart (curve-producing commands only).
    pub svg: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "u",
    "p",
    "p-grid",
    "n",
    "n-list",
    "t",
    "r",
    "replicas",
    "t-max",
    "m-max",
    "m-list",
    "seed",
    "threads",
    "output",
    "format",
    "full-scale",
    "phi-exponent-debug",
    "coupled-uniform",
    "svg",
];

/// Flat key=value file; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
            let key = k.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("config line {}: unknown key '{key}'", lineno + 1));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }
}

pub fn parse_neighborhood(s: &str) -> Result<Neighborhood, String> {
    let trimmed = s.trim().trim_start_matches('{').trim_end_matches('}');
    let offsets: Vec<i64> = trimmed
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad neighbourhood offset '{tok}' in '{s}'"))
        })
        .collect::<Result<_, _>>()?;
    Neighborhood::new(&offsets).map_err(|e| e.to_string())
}

/// Semicolon-separated list of neighbourhoods (for the bounds table).
pub fn parse_neighborhood_list(s: &str) -> Result<Vec<Neighborhood>, String> {
    s.split(';').map(parse_neighborhood).collect()
}

/// `start:stop:step` (inclusive endpoints within tolerance, values rounded
/// to 1e-9) or an explicit comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parse_f = |tok: &str| {
        tok.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number '{tok}' in grid '{s}'"))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid '{s}' must be start:stop:step"));
        }
        let (start, stop, step) = (parse_f(parts[0])?, parse_f(parts[1])?, parse_f(parts[2])?);
        if step <= 0.0 || stop < start {
            return Err(format!("grid '{s}' must have step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect())
    } else {
        s.split(',').map(parse_f).collect()
    }
}

pub fn parse_int_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad integer '{tok}' in list '{s}'"))
        })
        .collect()
}

pub fn parse_uint_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad integer '{tok}' in list '{s}'"))
        })
        .collect()
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("bad boolean '{other}'")),
    }
}

/// Raw, pre-resolution option values as they arrived from the command line.
#[derive(Debug, Clone, Default)]
pub struct RawOptions {
    pub u: Vec<String>,
    pub p: Option<f64>,
    pub p_grid: Option<String>,
    pub n: Option<i64>,
    pub n_list: Option<String>,
    pub t_end: Option<u64>,
    pub r: Option<u64>,
    pub replicas: Option<u64>,
    pub t_max: Option<u64>,
    pub m_max: Option<u64>,
    pub m_list: Option<String>,
    pub seed: Option<u64>,
    pub full_scale: bool,
    pub phi_exponent_debug: bool,
}

pub struct Resolver<'a> {
    pub cli: &'a RawOptions,
    pub file: &'a ConfigFile,
}

impl<'a> Resolver<'a> {
    fn file_parsed<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, String> {
        self.file.get(key).map(parse).transpose()
    }

    pub fn neighborhood(&self) -> Result<Neighborhood, String> {
        if let Some(first) = self.cli.u.first() {
            return parse_neighborhood(first);
        }
        self.file_parsed("u", parse_neighborhood)?
            .ok_or_else(|| "missing neighbourhood: pass -U or set u= in the config".into())
    }

    pub fn neighborhood_list(&self) -> Result<Vec<Neighborhood>, String> {
        if !self.cli.u.is_empty() {
            return self.cli.u.iter().map(|s| parse_neighborhood(s)).collect();
        }
        self.file_parsed("u", parse_neighborhood_list)?
            .ok_or_else(|| "missing neighbourhood: pass -U or set u= in the config".into())
    }

    pub fn seed(&self) -> Result<u64, String> {
        let from_file = self.file_parsed("seed", |s| {
            s.parse::<u64>().map_err(|_| format!("bad seed '{s}'"))
        })?;
        self.cli
            .seed
            .or(from_file)
            .ok_or_else(|| "missing master seed: stochastic commands require --seed".into())
    }

    pub fn p(&self) -> Result<f64, String> {
        let from_file = self.file_parsed("p", |s| {
            s.parse::<f64>().map_err(|_| format!("bad p '{s}'"))
        })?;
        let p = self
            .cli
            .p
            .or(from_file)
            .ok_or_else(|| "missing p".to_string())?;
        if !(0.0..=1.0).contains(&p) {
            return Err(format!("p = {p} outside [0, 1]"));
        }
        Ok(p)
    }

    pub fn p_grid(&self, default: &str) -> Result<Vec<f64>, String> {
        let spec = self
            .cli
            .p_grid
            .clone()
            .or_else(|| self.file.get("p-grid").map(|s| s.to_string()))
            .unwrap_or_else(|| default.to_string());
        let grid = parse_grid(&spec)?;
        if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(format!("grid '{spec}' leaves [0, 1]"));
        }
        Ok(grid)
    }

    pub fn pos_i64(
        &self,
        cli: Option<i64>,
        key: &str,
        default: Option<i64>,
    ) -> Result<i64, String> {
        let from_file = self.file_parsed(key, |s| {
            s.parse::<i64>().map_err(|_| format!("bad {key} '{s}'"))
        })?;
        let v = cli
            .or(from_file)
            .or(default)
            .ok_or_else(|| format!("missing {key}"))?;
        if v < 1 {
            return Err(format!("{key} must be >= 1"));
        }
        Ok(v)
    }

    pub fn pos_u64(
        &self,
        cli: Option<u64>,
        key: &str,
        default: Option<u64>,
    ) -> Result<u64, String> {
        let from_file = self.file_parsed(key, |s| {
            s.parse::<u64>().map_err(|_| format!("bad {key} '{s}'"))
        })?;
        let v = cli
            .or(from_file)
            .or(default)
            .ok_or_else(|| format!("missing {key}"))?;
        if v < 1 {
            return Err(format!("{key} must be >= 1"));
        }
        Ok(v)
    }

    pub fn full_scale(&self) -> Result<bool, String> {
        if self.cli.full_scale {
            return Ok(true);
        }
        Ok(self.file_parsed("full-scale", parse_bool)?.unwrap_or(false))
    }

    pub fn n_list(&self, default: &str) -> Result<Vec<i64>, String> {
        let spec = self
            .cli
            .n_list
            .clone()
            .or_else(|| self.file.get("n-list").map(|s| s.to_string()))
            .unwrap_or_else(|| default.to_string());
        parse_int_list(&spec)
    }

    pub fn m_list(&self, default: &str) -> Result<Vec<u64>, String> {
        let spec = self
            .cli
            .m_list
            .clone()
            .or_else(|| self.file.get("m-list").map(|s| s.to_string()))
            .unwrap_or_else(|| default.to_string());
        parse_uint_list(&spec)
    }
}

/// Renders the resolved configuration for `--print-config`.
pub fn render_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k}={v}");
    };
    match &cfg.command {
        Command::Bounds {
            neighborhoods,
            phi_exponent_debug,
        } => {
            kv("command", "bounds".into());
            kv(
                "u",
                neighborhoods
                    .iter()
                    .map(|u| u.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            );
            kv("phi-exponent-debug", phi_exponent_debug.to_string());
        }
        Command::Simulate {
            u,
            n,
            p,
            replicas,
            t_max,
            seed,
        } => {
            kv("command", "simulate".into());
            kv("u", u.to_string());
            kv("n", n.to_string());
            kv("p", p.to_string());
            kv("replicas", replicas.to_string());
            kv("t-max", t_max.to_string());
            kv("seed", seed.to_string());
        }
        Command::Sweep {
            u,
            n,
            t_end,
            replicas,
            p_grid,
            seed,
        } => {
            kv("command", "sweep".into());
            kv("u", u.to_string());
            kv("n", n.to_string());
            kv("t", t_end.to_string());
            kv("r", replicas.to_string());
            kv("p-grid", join_f64(p_grid));
            kv("seed", seed.to_string());
        }
        Command::TauScaling {
            u,
            p,
            n_list,
            replicas,
            t_max,
            seed,
        } => {
            kv("command", "tau-scaling".into());
            kv("u", u.to_string());
            kv("p", p.to_string());
            kv(
                "n-list",
                n_list
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            kv("replicas", replicas.to_string());
            kv("t-max", t_max.to_string());
            kv("seed", seed.to_string());
        }
        Command::GammaScan {
            u,
            p_grid,
            m_max,
            replicas,
            seed,
        } => {
            kv("command", "gamma-scan".into());
            kv("u", u.to_string());
            kv("p-grid", join_f64(p_grid));
            kv("m-max", m_max.to_string());
            kv("replicas", replicas.to_string());
            kv("seed", seed.to_string());
        }
        Command::Decay {
            u,
            p,
            m_list,
            replicas,
            seed,
        } => {
            kv("command", "decay".into());
            kv("u", u.to_string());
            kv("p", p.to_string());
            kv(
                "m-list",
                m_list
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            kv("replicas", replicas.to_string());
            kv("seed", seed.to_string());
        }
        Command::Verify { seed } => {
            kv("command", "verify".into());
            kv("seed", seed.to_string());
        }
    }
    kv(
        "threads",
        cfg.threads
            .map(|t| t.to_string())
            .unwrap_or_else(|| "auto".into()),
    );
    kv(
        "output",
        cfg.output
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "stdout".into()),
    );
    kv("format", cfg.format.to_string());
    if let Some(svg) = &cfg.svg {
        kv("svg", svg.display().to_string());
    }
    s
}

fn join_f64(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn default_verify_seed() -> u64 {
    DEFAULT_VERIFY_SEED
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        let g = parse_grid("0.45:0.65:0.05").unwrap();
        assert_eq!(g, vec![0.45, 0.5, 0.55, 0.6, 0.65]);
        let single = parse_grid("0.3").unwrap();
        assert_eq!(single, vec![0.3]);
        let list = parse_grid("0.1,0.2,0.9").unwrap();
        assert_eq!(list, vec![0.1, 0.2, 0.9]);
        assert!(parse_grid("0.5:0.4:0.1").is_err());
        assert!(parse_grid("0.1:0.2").is_err());
    }

    #[test]
    fn grid_endpoint_inclusive_within_tolerance() {
        let g = parse_grid("0.45:0.65:0.005").unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(*g.last().unwrap(), 0.65);
        assert_eq!(g[1], 0.455);
    }

    #[test]
    fn neighborhood_syntax() {
        let u = parse_neighborhood("-1,0,2").unwrap();
        assert_eq!(u.offsets(), &[-1, 0, 2]);
        let braced = parse_neighborhood("{-1,0,1}").unwrap();
        assert_eq!(braced.offsets(), &[-1, 0, 1]);
        assert!(parse_neighborhood("a,b").is_err());
        let many = parse_neighborhood_list("-1,0; 0,1").unwrap();
        assert_eq!(many.len(), 2);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        assert!(ConfigFile::parse("seed = 42\nn = 100").is_ok());
        let err = ConfigFile::parse("sed = 42").unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
    }

    #[test]
    fn config_file_comments_and_blanks() {
        let f = ConfigFile::parse("# a comment\n\nseed = 7 # trailing\n").unwrap();
        assert_eq!(f.get("seed"), Some("7"));
    }

    #[test]
    fn cli_overrides_file() {
        let file = ConfigFile::parse("p = 0.3\nseed = 5").unwrap();
        let raw = RawOptions {
            p: Some(0.7),
            ..Default::default()
        };
        let r = Resolver {
            cli: &raw,
            file: &file,
        };
        assert_eq!(r.p().unwrap(), 0.7);
        assert_eq!(r.seed().unwrap(), 5);
    }

    #[test]
    fn missing_seed_is_an_error() {
        let file = ConfigFile::default();
        let raw = RawOptions::default();
        let r = Resolver {
            cli: &raw,
            file: &file,
        };
        assert!(r.seed().unwrap_err().contains("seed"));
    }
}
