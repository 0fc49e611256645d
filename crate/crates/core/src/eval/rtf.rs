use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::synth::{SynthError, SynthesisRequest, Synthesizer};

/// Generation time divided by audio duration.
pub fn real_time_factor(generation_s: f64, audio_duration_s: f64) -> Result<f64, EvalError> {
    for (what, v) in [("generation time", generation_s), ("audio duration", audio_duration_s)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(EvalError::NonPositive { what, value: v });
        }
    }
    Ok(generation_s / audio_duration_s)
}

pub fn is_real_time(ratio: f64) -> bool {
    ratio <= 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtfMeasurement {
    pub generation_s: f64,
    pub audio_duration_s: f64,
    pub rtf: f64,
    pub real_time: bool,
}

impl RtfMeasurement {
    pub fn new(generation_s: f64, audio_duration_s: f64) -> Result<Self, EvalError> {
        let rtf = real_time_factor(generation_s, audio_duration_s)?;
        Ok(RtfMeasurement {
            generation_s,
            audio_duration_s,
            rtf,
            real_time: is_real_time(rtf),
        })
    }
}

/// Synthesize once and report the backend's own timing against the output
/// duration.
pub fn measure_rtf(
    synth: &dyn Synthesizer,
    req: &SynthesisRequest,
) -> Result<RtfMeasurement, RtfError> {
    let out = synth.synthesize(req)?;
    Ok(RtfMeasurement::new(out.timing_s, out.waveform.duration_s())?)
}

#[derive(Debug, thiserror::Error)]
pub enum RtfError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_flag() {
        assert!((real_time_factor(0.9, 10.0).unwrap() - 0.09).abs() < 1e-12);
        let eq = RtfMeasurement::new(10.0, 10.0).unwrap();
        assert_eq!(eq.rtf, 1.0);
        assert!(eq.real_time);
        let slow = RtfMeasurement::new(42.4, 10.0).unwrap();
        assert!((slow.rtf - 4.24).abs() < 1e-12);
        assert!(!slow.real_time);
        assert!(!is_real_time(1.0 + f64::EPSILON));
    }

    #[test]
    fn non_positive_rejected() {
        assert!(real_time_factor(1.0, 0.0).is_err());
        assert!(real_time_factor(0.0, 1.0).is_err());
        assert!(real_time_factor(1.0, f64::NAN).is_err());
    }
}
