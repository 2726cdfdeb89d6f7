//! Flat `key = value` configuration files with environment overrides.

use krflow::flow::{CNormalization, FlowConfig, InitFamily, Integrator, Monitors};
use krflow::{Error, Result};
use std::collections::BTreeMap;

/// Prefix of environment variables overriding configuration keys, e.g. `KRFLOW_INIT_AMPLITUDE`.
pub const ENV_PREFIX: &str = "KRFLOW_";

/// Keys accepted in configuration files.
pub const KEYS: [&str; 14] = [
    "manifold",
    "n_points",
    "L",
    "dt",
    "t_end",
    "record_dt",
    "integrator",
    "init.family",
    "init.amplitude",
    "init.mode",
    "monitors",
    "normalize_c",
    "seed",
    "pairs",
];

/// Environment variable name for a key.
pub fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.replace('.', "_").to_ascii_uppercase())
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::config(key, format!("unknown key on line {}", lineno + 1)));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::config(key, format!("duplicate key on line {}", lineno + 1)));
        }
    }
    Ok(out)
}

/// Applies overrides from `env` (pairs of variable name and value) to parsed entries.
pub fn apply_env<'a>(entries: &mut BTreeMap<String, String>, env: impl IntoIterator<Item = (&'a str, &'a str)>) {
    let vars: BTreeMap<&str, &str> = env.into_iter().collect();
    for key in KEYS {
        if let Some(v) = vars.get(env_name(key).as_str()) {
            entries.insert(key.to_string(), v.to_string());
        }
    }
}

fn number<V: std::str::FromStr>(key: &str, value: &str) -> Result<V> {
    value.parse().map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

/// Run settings read from a configuration file.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSettings {
    pub flow: FlowConfig,
    /// Number of random space-time pairs for the Harnack check.
    pub pairs: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { flow: FlowConfig::default(), pairs: 100 }
    }
}

/// Builds settings from entries; missing keys keep their defaults.
pub fn settings_from_entries(entries: &BTreeMap<String, String>) -> Result<RunSettings> {
    let mut s = RunSettings::default();
    let c = &mut s.flow;
    for (key, value) in entries {
        let v = value.as_str();
        match key.as_str() {
            "manifold" => c.manifold = v.parse()?,
            "n_points" => c.n_points = number(key, v)?,
            "L" => c.half_width = number(key, v)?,
            "dt" => c.dt = number(key, v)?,
            "t_end" => c.t_end = number(key, v)?,
            "record_dt" => c.record_dt = number(key, v)?,
            "integrator" => {
                c.integrator = match v.to_ascii_lowercase().as_str() {
                    "rk4" => Integrator::Rk4,
                    "semi-implicit" | "semi_implicit" | "rosenbrock" => Integrator::SemiImplicit,
                    _ => return Err(Error::config(key, format!("unknown integrator `{v}` (rk4 or semi-implicit)"))),
                }
            }
            "init.family" => {
                c.init_family = match v.to_ascii_lowercase().as_str() {
                    "zero" => InitFamily::Zero,
                    "legendre" => InitFamily::Legendre,
                    "random" => InitFamily::Random,
                    _ => return Err(Error::config(key, format!("unknown family `{v}` (zero, legendre or random)"))),
                }
            }
            "init.amplitude" => c.init_amplitude = number(key, v)?,
            "init.mode" => c.init_mode = number(key, v)?,
            "monitors" => c.monitors = Monitors::parse(v)?,
            "normalize_c" => {
                c.normalize_c = match v.to_ascii_lowercase().as_str() {
                    "raw" => CNormalization::Raw,
                    "tail" => CNormalization::TailIntegral,
                    _ => return Err(Error::config(key, format!("unknown normalization `{v}` (raw or tail)"))),
                }
            }
            "seed" => c.seed = number(key, v)?,
            "pairs" => s.pairs = number(key, v)?,
            _ => return Err(Error::config(key.as_str(), "unknown key")),
        }
    }
    s.flow.validate()?;
    Ok(s)
}

/// Parses a configuration text with overrides from the given environment.
pub fn parse_config<'a>(text: &str, env: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<RunSettings> {
    let mut entries = parse_entries(text)?;
    apply_env(&mut entries, env);
    settings_from_entries(&entries)
}

/// Renders settings in the configuration format, so that parsing gives them back.
pub fn render_config(s: &RunSettings) -> String {
    let c = &s.flow;
    let integrator = match c.integrator {
        Integrator::Rk4 => "rk4",
        Integrator::SemiImplicit => "semi-implicit",
    };
    let family = match c.init_family {
        InitFamily::Zero => "zero",
        InitFamily::Legendre => "legendre",
        InitFamily::Random => "random",
    };
    let mut monitors = Vec::new();
    if c.monitors.functionals {
        monitors.push("functionals");
    }
    if c.monitors.harnack {
        monitors.push("harnack");
    }
    if c.monitors.snapshots && !c.monitors.harnack {
        monitors.push("snapshots");
    }
    let monitors = if monitors.is_empty() { "none".to_string() } else { monitors.join(",") };
    let norm = match c.normalize_c {
        CNormalization::Raw => "raw",
        CNormalization::TailIntegral => "tail",
    };
    format!(
        "manifold = {}\nn_points = {}\nL = {:?}\ndt = {:?}\nt_end = {:?}\nrecord_dt = {:?}\nintegrator = {integrator}\ninit.family = {family}\ninit.amplitude = {:?}\ninit.mode = {}\nmonitors = {monitors}\nnormalize_c = {norm}\nseed = {}\npairs = {}\n",
        c.manifold, c.n_points, c.half_width, c.dt, c.t_end, c.record_dt, c.init_amplitude, c.init_mode, c.seed, s.pairs
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use krflow::geometry::Manifold;

    #[test]
    fn parses_comments_and_overrides() {
        let text = "# run\nmanifold = CP2  # plane\ndt = 0.005\ninit.amplitude = 0.05\n";
        let s = parse_config(text, [("KRFLOW_T_END", "15"), ("OTHER", "1")]).unwrap();
        assert_eq!(s.flow.manifold, Manifold::CP2);
        assert_eq!(s.flow.dt, 0.005);
        assert_eq!(s.flow.t_end, 15.0);
        assert_eq!(s.flow.init_amplitude, 0.05);
    }

    #[test]
    fn negative_step_names_key() {
        let err = parse_config("dt = -0.1\n", []).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "dt"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(parse_config("colour = red\n", []), Err(Error::Config { .. })));
        assert!(matches!(parse_config("dt 0.1\n", []), Err(Error::Parse(_))));
    }

    #[test]
    fn render_round_trip() {
        let mut s = RunSettings::default();
        s.flow.manifold = Manifold::CP2;
        s.flow.init_family = InitFamily::Random;
        s.flow.integrator = Integrator::SemiImplicit;
        s.flow.dt = 0.1 + 0.2;
        s.pairs = 7;
        assert_eq!(parse_config(&render_config(&s), []).unwrap(), s);
    }
}
