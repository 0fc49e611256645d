use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum VoiceName {
    Amina,
    Hamza,
    Custom(String),
}

impl fmt::Display for VoiceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VoiceName::Amina => f.write_str("amina"),
            VoiceName::Hamza => f.write_str("hamza"),
            VoiceName::Custom(n) => f.write_str(n),
        }
    }
}

impl From<String> for VoiceName {
    fn from(s: String) -> Self {
        match s.as_str() {
            "amina" => VoiceName::Amina,
            "hamza" => VoiceName::Hamza,
            _ => VoiceName::Custom(s),
        }
    }
}

impl From<VoiceName> for String {
    fn from(v: VoiceName) -> Self {
        v.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Expressive,
    Neutral,
}

impl FromStr for Style {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expressive" => Ok(Style::Expressive),
            "neutral" => Ok(Style::Neutral),
            other => Err(format!("unknown style `{other}` (expected expressive or neutral)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoiceSpec {
    pub name: VoiceName,
    pub style: Style,
    /// Fundamental frequency in Hz, within 60..=400.
    pub base_f0: f64,
}

pub const F0_RANGE: std::ops::RangeInclusive<f64> = 60.0..=400.0;

impl VoiceSpec {
    /// Expressive female narrator.
    pub fn amina() -> Self {
        VoiceSpec {
            name: VoiceName::Amina,
            style: Style::Expressive,
            base_f0: 210.0,
        }
    }

    /// Neutral male narrator.
    pub fn hamza() -> Self {
        VoiceSpec {
            name: VoiceName::Hamza,
            style: Style::Neutral,
            base_f0: 120.0,
        }
    }

    pub fn custom(name: &str, style: Style, base_f0: f64) -> Result<Self, String> {
        let spec = VoiceSpec {
            name: VoiceName::Custom(name.to_string()),
            style,
            base_f0,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<(), String> {
        if F0_RANGE.contains(&self.base_f0) {
            Ok(())
        } else {
            Err(format!(
                "base_f0 {} Hz for voice {} is outside 60–400 Hz",
                self.base_f0, self.name
            ))
        }
    }

    /// Built-in voices by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "amina" => Some(Self::amina()),
            "hamza" => Some(Self::hamza()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip_through_json() {
        let v = VoiceSpec::hamza();
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"hamza\""));
        assert_eq!(serde_json::from_str::<VoiceSpec>(&json).unwrap(), v);
    }

    #[test]
    fn f0_bounds() {
        assert!(VoiceSpec::custom("x", Style::Neutral, 59.0).is_err());
        assert!(VoiceSpec::custom("x", Style::Neutral, 400.0).is_ok());
    }
}
