//! `key = value` configuration with `NATIQ_*` environment overrides.
//!
//! ```text
//! bind = 127.0.0.1:8080
//! workers = 2
//! storage_dir = /var/lib/natiq      # omit for in-memory storage
//! static_dir = webapp/dist
//! diacritizer = echo                # echo | table:<path> | http://host:port
//! failure_policy = passthrough      # passthrough | fail
//! synthesizer = reference           # reference | http://host:port
//! voice.sara = expressive,230       # extra voices: style,base_f0
//! ```
//!
//! Every key can be overridden by `NATIQ_<KEY>` with dots replaced by
//! underscores, e.g. `NATIQ_WORKERS=4` or `NATIQ_VOICE_SARA=neutral,140`.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use natiq_core::diacritizer::FailurePolicy;
use natiq_core::normalizer::{Gender, MonthNames};
use natiq_core::synth::{Style, VoiceSpec, DEFAULT_RATE};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}: line {line}: expected key = value")]
    Syntax { origin: String, line: usize },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: String, key: String },
    #[error("{origin}: `{key}`: {reason}")]
    Value {
        origin: String,
        key: String,
        reason: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiacritizerChoice {
    Echo,
    Table(PathBuf),
    Http(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthChoice {
    Reference,
    Remote(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub workers: usize,
    pub max_text_chars: usize,
    pub output_rate: u32,
    pub storage_dir: Option<PathBuf>,
    pub static_dir: Option<PathBuf>,
    pub diacritizer: DiacritizerChoice,
    pub failure_policy: FailurePolicy,
    pub synthesizer: SynthChoice,
    /// Extra delay inside the reference synthesizer (RTF experiments).
    pub synth_delay: Duration,
    pub backend_timeout: Duration,
    pub max_in_flight: usize,
    pub months: MonthNames,
    pub gender: Gender,
    pub voices: BTreeMap<String, VoiceSpec>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        let voices = [VoiceSpec::amina(), VoiceSpec::hamza()]
            .into_iter()
            .map(|v| (v.name.to_string(), v))
            .collect();
        ServiceConfig {
            bind: "127.0.0.1:8080".parse().expect("literal address"),
            workers: 2,
            max_text_chars: 2000,
            output_rate: DEFAULT_RATE,
            storage_dir: None,
            static_dir: None,
            diacritizer: DiacritizerChoice::Echo,
            failure_policy: FailurePolicy::Passthrough,
            synthesizer: SynthChoice::Reference,
            synth_delay: Duration::ZERO,
            backend_timeout: Duration::from_secs(30),
            max_in_flight: 4,
            months: MonthNames::Levant,
            gender: Gender::Masculine,
            voices,
        }
    }
}

impl ServiceConfig {
    /// Defaults, then the optional file, then `NATIQ_*` variables.
    pub fn load(
        file: Option<&Path>,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ConfigError> {
        let mut cfg = ServiceConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.display().to_string(),
                source,
            })?;
            cfg.apply_text(&text, &path.display().to_string())?;
        }
        let mut vars: Vec<(String, String)> = env
            .into_iter()
            .filter_map(|(k, v)| k.strip_prefix("NATIQ_").map(|k| (env_key(k), v)))
            .collect();
        vars.sort();
        for (key, value) in vars {
            cfg.set(&key, &value, &format!("env NATIQ_{}", key.to_uppercase().replace('.', "_")))?;
        }
        Ok(cfg)
    }

    pub fn from_env(file: Option<&Path>) -> Result<Self, ConfigError> {
        Self::load(file, std::env::vars())
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, line) in text.trim_start_matches('\u{feff}').lines().enumerate() {
            let line = match line.find(" #") {
                Some(p) => &line[..p],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                origin: origin.to_string(),
                line: i + 1,
            })?;
            self.set(k.trim(), v.trim().trim_matches('"'), origin)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::Value {
            origin: origin.to_string(),
            key: key.to_string(),
            reason,
        };
        fn num<T: std::str::FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>().map_err(|e| e.to_string())
        }
        match key {
            "bind" => self.bind = num(value).map_err(bad)?,
            "port" => {
                let port: u16 = num(value).map_err(bad)?;
                self.bind.set_port(port);
            }
            "workers" => {
                self.workers = num(value).map_err(bad)?;
                if self.workers == 0 {
                    return Err(bad("must be at least 1".into()));
                }
            }
            "max_text_chars" => self.max_text_chars = num(value).map_err(bad)?,
            "output_rate" => {
                let rate = num(value).map_err(bad)?;
                natiq_core::audio::check_rate(rate).map_err(|e| bad(e.to_string()))?;
                self.output_rate = rate;
            }
            "storage_dir" => self.storage_dir = non_empty(value).map(PathBuf::from),
            "static_dir" => self.static_dir = non_empty(value).map(PathBuf::from),
            "diacritizer" => {
                self.diacritizer = if value == "echo" {
                    DiacritizerChoice::Echo
                } else if let Some(p) = value.strip_prefix("table:") {
                    DiacritizerChoice::Table(PathBuf::from(p))
                } else if value.starts_with("http://") || value.starts_with("https://") {
                    DiacritizerChoice::Http(value.to_string())
                } else {
                    return Err(bad("expected echo, table:<path> or an http URL".into()));
                }
            }
            "failure_policy" => self.failure_policy = value.parse().map_err(bad)?,
            "synthesizer" => {
                self.synthesizer = if value == "reference" {
                    SynthChoice::Reference
                } else if value.starts_with("http://") || value.starts_with("https://") {
                    SynthChoice::Remote(value.to_string())
                } else {
                    return Err(bad("expected reference or an http URL".into()));
                }
            }
            "synth_delay_ms" => {
                self.synth_delay = Duration::from_millis(num(value).map_err(bad)?)
            }
            "backend_timeout_s" => {
                let s: f64 = num(value).map_err(bad)?;
                if !(s.is_finite() && s > 0.0) {
                    return Err(bad("must be positive".into()));
                }
                self.backend_timeout = Duration::from_secs_f64(s);
            }
            "max_in_flight" => self.max_in_flight = num(value).map_err(bad)?,
            "months" => {
                self.months = match value {
                    "levant" => MonthNames::Levant,
                    "gregorian" => MonthNames::Gregorian,
                    _ => return Err(bad("expected levant or gregorian".into())),
                }
            }
            "gender" => {
                self.gender = match value {
                    "masculine" => Gender::Masculine,
                    "feminine" => Gender::Feminine,
                    _ => return Err(bad("expected masculine or feminine".into())),
                }
            }
            k if k.starts_with("voice.") => {
                let name = &k["voice.".len()..];
                let spec = parse_voice(name, value).map_err(bad)?;
                self.voices.insert(name.to_string(), spec);
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    origin: origin.to_string(),
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }
}

fn non_empty(v: &str) -> Option<&str> {
    (!v.is_empty()).then_some(v)
}

/// `VOICE_SARA` → `voice.sara`, `MAX_TEXT_CHARS` → `max_text_chars`.
fn env_key(k: &str) -> String {
    let lower = k.to_lowercase();
    match lower.strip_prefix("voice_") {
        Some(name) => format!("voice.{name}"),
        None => lower,
    }
}

fn parse_voice(name: &str, value: &str) -> Result<VoiceSpec, String> {
    if name.is_empty() {
        return Err("voice name is empty".into());
    }
    let (style, f0) = value
        .split_once(',')
        .ok_or_else(|| "expected <style>,<base_f0>".to_string())?;
    let style: Style = style.trim().parse()?;
    let f0: f64 = f0.trim().parse().map_err(|e| format!("base_f0: {e}"))?;
    match VoiceSpec::builtin(name) {
        Some(mut v) => {
            v.style = style;
            v.base_f0 = f0;
            v.check()?;
            Ok(v)
        }
        None => VoiceSpec::custom(name, style, f0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ServiceConfig::load(None, Vec::new()).unwrap();
        assert_eq!(c.workers, 2);
        assert_eq!(c.max_text_chars, 2000);
        assert_eq!(c.voices.len(), 2);
    }

    #[test]
    fn file_then_env() {
        let mut c = ServiceConfig::default();
        c.apply_text(
            "# comment\nworkers = 3\nvoice.sara = expressive,230  # custom\nsynthesizer = http://x:1\n",
            "test",
        )
        .unwrap();
        assert_eq!(c.workers, 3);
        assert_eq!(c.voices["sara"].base_f0, 230.0);
        assert_eq!(c.synthesizer, SynthChoice::Remote("http://x:1".into()));

        let c = ServiceConfig::load(
            None,
            vec![
                ("NATIQ_WORKERS".to_string(), "5".to_string()),
                ("NATIQ_VOICE_OMAR".to_string(), "neutral,110".to_string()),
                ("HOME".to_string(), "/root".to_string()),
            ],
        )
        .unwrap();
        assert_eq!(c.workers, 5);
        assert!(c.voices.contains_key("omar"));
    }

    #[test]
    fn errors_name_the_key() {
        let mut c = ServiceConfig::default();
        let e = c.apply_text("wrokers = 2", "f.conf").unwrap_err();
        assert!(e.to_string().contains("wrokers"));
        assert!(c.apply_text("voice.x = neutral,20", "f").is_err());
        assert!(c.apply_text("output_rate = 8000", "f").is_err());
        assert!(c.apply_text("just text", "f").is_err());
    }
}
