//! Flat `key = value` run configuration.
//!
//! Values come from, in increasing priority: a named preset, the config
//! file, and `--set` overrides. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use blowuplab::{find_preset, InitialSampling, IntegratorConfig, ProblemFamily, Profile, RunSpec};

pub const KEYS: &[&str] = &[
    "preset",
    "p",
    "q",
    "n",
    "b",
    "b_scale",
    "u0",
    "u0_amp",
    "u0_sampling",
    "rel_tol",
    "abs_tol",
    "dt_init",
    "dt_min",
    "t_max",
    "threshold",
    "snapshots",
    "monitor_stride",
    "out_dir",
    "prefix",
    "n_list",
    "t_check",
];

const PROBLEM_KEYS: &[&str] = &["preset", "p", "q", "n", "b", "u0"];

/// Raw key/value pairs after merging every source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            cfg.set_pair(line).with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Applies one `key=value` assignment.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let Some((key, value)) = pair.split_once('=') else {
            bail!("expected key=value, got '{pair}'");
        };
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = if key == "N" { "n" } else { key };
        if !KEYS.contains(&key) {
            bail!("unknown key '{key}' (known keys: {})", KEYS.join(", "));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// No preset and no problem data: nothing to run.
    pub fn is_empty_problem(&self) -> bool {
        PROBLEM_KEYS.iter().all(|k| self.get(k).is_none())
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .with_context(|| format!("{key}: '{v}' is not a number"))
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .with_context(|| format!("{key}: '{v}' is not a nonnegative integer"))
            })
            .transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        self.get(key)
            .map(|v| parse_list(v).with_context(|| format!("{key}: '{v}'")))
            .transpose()
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().with_context(|| format!("cannot parse '{s}'")))
        .collect()
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub run: RunSpec,
    pub out_dir: Option<PathBuf>,
    pub prefix: String,
    pub n_list: Vec<usize>,
    pub t_check: Option<f64>,
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self> {
        let preset = raw.get("preset").map(str::to_string);
        let (mut family, mut n, mut integrator) = match &preset {
            Some(name) => {
                let p =
                    find_preset(name).with_context(|| format!("unknown preset '{name}' (see `blowuplab presets`)"))?;
                (p.family, p.n, p.integrator)
            }
            None => {
                let Some(u0) = raw.get("u0") else {
                    bail!("no initial data: set a preset or the u0 key");
                };
                let u0 = Profile::parse(u0, raw.number("u0_amp")?.unwrap_or(1.0))?;
                (
                    ProblemFamily::new(3.0, 1.3, Profile::Constant(1.0), u0),
                    blowuplab::preset::DEFAULT_N,
                    IntegratorConfig::default(),
                )
            }
        };

        if let Some(v) = raw.number("p")? {
            family.p = v;
        }
        if let Some(v) = raw.number("q")? {
            family.q = v;
        }
        match (raw.get("b"), raw.number("b_scale")?) {
            (Some(name), scale) => family.b = Profile::parse(name, scale.unwrap_or(1.0))?,
            (None, Some(_)) => bail!("b_scale needs b to name the coefficient profile"),
            (None, None) => {}
        }
        if preset.is_some() {
            match (raw.get("u0"), raw.number("u0_amp")?) {
                (Some(name), amp) => family.u0 = Profile::parse(name, amp.unwrap_or(1.0))?,
                (None, Some(_)) => bail!("u0_amp needs u0 to name the initial profile"),
                (None, None) => {}
            }
        }
        if let Some(s) = raw.get("u0_sampling") {
            family.sampling = match s {
                "point" => InitialSampling::Point,
                "cell_average" => InitialSampling::CellAverage,
                other => bail!("u0_sampling: expected point or cell_average, got '{other}'"),
            };
        }
        if let Some(v) = raw.count("n")? {
            n = v;
        }

        let set = |slot: &mut f64, key: &str| -> Result<()> {
            if let Some(v) = raw.number(key)? {
                *slot = v;
            }
            Ok(())
        };
        set(&mut integrator.rel_tol, "rel_tol")?;
        set(&mut integrator.abs_tol, "abs_tol")?;
        set(&mut integrator.dt_init, "dt_init")?;
        set(&mut integrator.dt_min, "dt_min")?;
        set(&mut integrator.t_max, "t_max")?;
        set(&mut integrator.blowup_threshold, "threshold")?;
        if let Some(v) = raw.list::<f64>("snapshots")? {
            integrator.snapshot_times = v;
        }
        if let Some(v) = raw.count("monitor_stride")? {
            integrator.monitor_stride = v;
        }
        integrator.validate()?;

        Ok(Self {
            preset,
            run: RunSpec { family, n, integrator },
            out_dir: raw.get("out_dir").map(PathBuf::from),
            prefix: raw.get("prefix").unwrap_or("").to_string(),
            n_list: raw.list("n_list")?.unwrap_or_else(|| vec![25, 50, 100]),
            t_check: raw.number("t_check")?,
        })
    }

    /// Path of an output file inside `dir`, honouring the prefix.
    pub fn file(&self, dir: &Path, name: &str) -> PathBuf {
        if self.prefix.is_empty() {
            dir.join(name)
        } else {
            dir.join(format!("{}_{name}", self.prefix))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut raw = RawConfig::parse("# fig 5\npreset = fig5\n\nq=1.5\n").unwrap();
        raw.set_pair("N=51").unwrap();
        let cfg = RunConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.run.family.q, 1.5);
        assert_eq!(cfg.run.n, 51);
        assert_eq!(cfg.run.family.u0, Profile::SymmetricSine { amplitude: 1e3 });
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RawConfig::parse("colour = red").is_err());
        assert!(RawConfig::parse("novalue").is_err());
        let raw = RawConfig::parse("preset = nope").unwrap();
        assert!(RunConfig::resolve(&raw).is_err());
        let raw = RawConfig::parse("u0 = sin\nq = x").unwrap();
        assert!(RunConfig::resolve(&raw).is_err());
        let raw = RawConfig::parse("u0 = sin\nb_scale = 3").unwrap();
        assert!(RunConfig::resolve(&raw).is_err());
        let raw = RawConfig::parse("u0 = sin\ndt_min = 1").unwrap();
        assert!(RunConfig::resolve(&raw).is_err());
    }

    #[test]
    fn builds_problem_without_preset() {
        let raw = RawConfig::parse("u0 = sin\nu0_amp = 50\nb = exp_cube\nb_scale = 2\nsnapshots = 0, 0.001").unwrap();
        let cfg = RunConfig::resolve(&raw).unwrap();
        assert_eq!(cfg.run.family.u0, Profile::SymmetricSine { amplitude: 50.0 });
        assert_eq!(cfg.run.family.b, Profile::ExpCube { scale: 2.0 });
        assert_eq!(cfg.run.integrator.snapshot_times, vec![0.0, 0.001]);
        assert!(RawConfig::default().is_empty_problem());
    }
}
