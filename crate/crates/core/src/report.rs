//! JSON schemas for the command line: the amplitude input file and the run
//! report.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::amplification::{
    address_fidelity, address_state, build_pipeline, success_constraints, Algorithm, PipelineConfig,
};
use crate::circuit::GateCounts;
use crate::encoding::AmplitudeSpec;
use crate::error::{Error, Result};
use crate::simulator::postselect;

/// `{"amplitudes": [...], "bits": n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeFile {
    pub amplitudes: Vec<f64>,
    pub bits: usize,
}

impl AmplitudeFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: AmplitudeFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.amplitudes.len();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "amplitude count must be a power of two, got {d}"
            )));
        }
        if self.bits < 2 {
            return Err(Error::InvalidPrecision(format!(
                "bits must be >= 2, got {}",
                self.bits
            )));
        }
        if let Some(&v) = self.amplitudes.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::AmplitudeOutOfRange(v));
        }
        Ok(())
    }

    pub fn to_spec(&self) -> Result<AmplitudeSpec> {
        self.validate()?;
        AmplitudeSpec::new(self.amplitudes.clone(), self.bits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub n: usize,
    pub d: usize,
    pub rounds: usize,
    /// Success probability before amplification.
    pub base_success_probability: f64,
    /// `sin^2((2r+1) asin(sqrt(p0)))`.
    pub success_probability_analytic: f64,
    pub success_probability_simulated: f64,
    pub fidelity_with_target: f64,
    pub gate_counts: GateCounts,
    pub qubits_total: usize,
    pub seed: u64,
    pub shots: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_success: Option<f64>,
}

/// Largest tolerated gap between simulated and analytic probability.
pub const REPORT_TOLERANCE: f64 = 1e-9;

/// Builds, simulates, and optionally samples the pipeline. Fails if the
/// simulated and analytic probabilities disagree beyond
/// [`REPORT_TOLERANCE`].
pub fn run_report(config: &PipelineConfig, shots: usize) -> Result<RunReport> {
    let pipeline = build_pipeline(config)?;
    let layout = *pipeline.layout();
    let state = pipeline.simulate()?;
    let success = success_constraints(&layout);
    let simulated = postselect(&state, &success)?.probability;
    let analytic = pipeline.analytic_probability();
    if (simulated - analytic).abs() > REPORT_TOLERANCE {
        return Err(Error::InvalidSpec(format!(
            "simulated probability {simulated} disagrees with analytic {analytic}"
        )));
    }
    let fidelity = address_state(&state, &layout)
        .map(|a| address_fidelity(&a, &config.spec.target_state()))
        .unwrap_or(0.0);
    let empirical_success = if shots > 0 {
        let sampled = crate::amplification::sample(&state, &success, shots, config.seed)?;
        Some(sampled.success_frequency())
    } else {
        None
    };
    Ok(RunReport {
        algorithm: config.algorithm,
        n: config.spec.bits(),
        d: config.spec.len(),
        rounds: pipeline.rounds,
        base_success_probability: pipeline.base_probability,
        success_probability_analytic: analytic,
        success_probability_simulated: simulated,
        fidelity_with_target: fidelity,
        gate_counts: pipeline.circuit.count(),
        qubits_total: layout.total(),
        seed: config.seed,
        shots,
        empirical_success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplification::Rounds;

    #[test]
    fn parse_and_validate() {
        let f = AmplitudeFile::from_json(r#"{"amplitudes": [0.25, 0.5], "bits": 2}"#).unwrap();
        assert_eq!(f.bits, 2);
        assert!(
            AmplitudeFile::from_json(r#"{"amplitudes": [0.25, 0.5, 0.1], "bits": 2}"#).is_err()
        );
        assert!(AmplitudeFile::from_json(r#"{"amplitudes": [0.25, 1.0], "bits": 2}"#).is_err());
        assert!(AmplitudeFile::from_json(r#"{"amplitudes": [0.25, 0.5], "bits": 1}"#).is_err());
        assert!(AmplitudeFile::from_json(r#"{"amplitudes": [], "bits": 2}"#).is_err());
        assert!(AmplitudeFile::from_json(r#"{"amplitudes": [0.5], "bits": 2, "x": 1}"#).is_err());
        assert!(AmplitudeFile::from_json("not json").is_err());
    }

    #[test]
    fn demo_report() {
        let spec = AmplitudeSpec::new(vec![0.25, 0.5], 2).unwrap();
        let config = PipelineConfig::new(spec, Algorithm::Standard)
            .rounds(Rounds::Explicit(1))
            .seed(7);
        let r = run_report(&config, 1000).unwrap();
        assert_eq!((r.n, r.d, r.rounds, r.shots), (2, 2, 1, 1000));
        assert!((r.success_probability_simulated - 0.9910).abs() < 5e-4);
        assert!((r.fidelity_with_target - 1.0).abs() < 1e-10);
        assert!(r.empirical_success.is_some());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["algorithm"], "standard");
    }
}
