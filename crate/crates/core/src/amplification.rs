//! Amplitude amplification around a transduction, and the end-to-end
//! preparation pipeline.
//!
//! The reflected preparation is `S = H^{addr} . U_o . T` with `T` the
//! transduction. The pipeline is `S`, then `r` Grover iterates
//! (good-state reflection, then reflection about `S|0>`), then one more
//! oracle call to uncompute the data register.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Register, RegisterLayout};
use crate::encoding::{build_oracle, AmplitudeSpec};
use crate::error::{Error, Result};
use crate::modified::{modified_layout, transduce_modified_on};
use crate::simulator::{self, StateVector};
use crate::standard::{normalization, ry_angles, standard_layout, transduce_standard_on};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Standard,
    Modified,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Standard => "standard",
            Algorithm::Modified => "modified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounds {
    Auto,
    Explicit(usize),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub spec: AmplitudeSpec,
    pub algorithm: Algorithm,
    pub rounds: Rounds,
    pub decomposed: bool,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(spec: AmplitudeSpec, algorithm: Algorithm) -> Self {
        PipelineConfig {
            spec,
            algorithm,
            rounds: Rounds::Auto,
            decomposed: false,
            seed: 0,
        }
    }

    pub fn rounds(mut self, rounds: Rounds) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn decomposed(mut self, decomposed: bool) -> Self {
        self.decomposed = decomposed;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Register layout used by `algorithm` for `spec`.
pub fn layout_for(
    spec: &AmplitudeSpec,
    algorithm: Algorithm,
    decomposed: bool,
) -> Result<RegisterLayout> {
    match algorithm {
        Algorithm::Standard => standard_layout(spec, decomposed),
        Algorithm::Modified => modified_layout(spec),
    }
}

/// Transduction circuit for `algorithm` on `layout`.
pub fn build_transduction(
    layout: &RegisterLayout,
    algorithm: Algorithm,
    decomposed: bool,
) -> Result<Circuit> {
    match algorithm {
        Algorithm::Standard => {
            transduce_standard_on(layout, &ry_angles(layout.size(Register::Data))?, decomposed)
        }
        Algorithm::Modified => transduce_modified_on(layout),
    }
}

/// `S = H^{addr} . U_o . T`.
pub fn build_state_prep(
    spec: &AmplitudeSpec,
    layout: &RegisterLayout,
    algorithm: Algorithm,
    decomposed: bool,
) -> Result<Circuit> {
    let mut circuit = Circuit::new(*layout);
    for q in layout.qubits(Register::Address) {
        circuit.push(Gate::h(q))?;
    }
    circuit.extend(&build_oracle(spec, layout)?)?;
    circuit.extend(&build_transduction(layout, algorithm, decomposed)?)?;
    Ok(circuit)
}

/// Constraints selecting the success branch: Control all zero, Flag one.
pub fn success_constraints(layout: &RegisterLayout) -> Vec<(usize, bool)> {
    let mut constraints = layout.register_pattern(Register::Control, 0);
    constraints.push((layout.flag_qubit(), true));
    constraints
}

/// Phase -1 on (Control = 0, Flag = 1), identity elsewhere.
pub fn build_good_reflection(layout: &RegisterLayout) -> Result<Circuit> {
    let mut circuit = Circuit::new(*layout);
    let controls = layout.register_pattern(Register::Control, 0);
    if controls.is_empty() {
        return Err(Error::LayoutMismatch(
            "good-state reflection needs a control register".into(),
        ));
    }
    circuit.push(Gate::mcz(&controls, layout.flag_qubit())?)?;
    Ok(circuit)
}

/// Phase -1 on the all-zero state of every register except Ancilla.
///
/// Ancillas are clean between gates of every circuit built here, so leaving
/// them out of the reflection does not change its action on reachable
/// states and keeps them free for lowering wide gates on export.
pub fn build_zero_reflection(layout: &RegisterLayout) -> Result<Circuit> {
    let flag = layout.flag_qubit();
    let controls: Vec<(usize, bool)> = [Register::Address, Register::Data, Register::Control]
        .into_iter()
        .flat_map(|r| layout.qubits(r))
        .map(|q| (q, false))
        .collect();
    let mut circuit = Circuit::new(*layout);
    circuit.push(Gate::x(flag))?;
    circuit.push(Gate::mcz(&controls, flag)?)?;
    circuit.push(Gate::x(flag))?;
    Ok(circuit)
}

/// `S . Z_0 . S^dagger`: the reflection about `S|0>`, up to a global sign.
pub fn build_initial_reflection(prep: &Circuit) -> Result<Circuit> {
    let mut circuit = prep.inverse();
    circuit.extend(&build_zero_reflection(prep.layout())?)?;
    circuit.extend(prep)?;
    Ok(circuit)
}

/// Rounds maximising the success probability from `p0`:
/// `round(pi / (4 asin(sqrt p0)) - 1/2)`, floored at zero.
pub fn optimal_rounds(p0: f64) -> Result<usize> {
    if p0.is_nan() || p0 <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    if p0 > 1.0 {
        return Err(Error::InvalidSpec(format!("probability {p0} exceeds one")));
    }
    let theta = p0.sqrt().asin();
    let r = (std::f64::consts::PI / (4.0 * theta) - 0.5).round();
    Ok(r.max(0.0) as usize)
}

/// `sin^2((2r + 1) asin(sqrt p0))`.
pub fn amplified_probability(p0: f64, rounds: usize) -> f64 {
    let theta = p0.sqrt().asin();
    ((2 * rounds + 1) as f64 * theta).sin().powi(2)
}

/// Success probability of one transduction on the uniform superposition:
/// `(|x| / (a sqrt d))^2` for the standard variant, `(|x| / sqrt d)^2` for
/// the modified one.
pub fn base_success_probability(spec: &AmplitudeSpec, algorithm: Algorithm) -> Result<f64> {
    let d = spec.len() as f64;
    let scale = match algorithm {
        Algorithm::Standard => normalization(ry_angles(spec.bits())?.m),
        Algorithm::Modified => 1.0,
    };
    Ok((spec.l2_norm() / (scale * d.sqrt())).powi(2))
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub circuit: Circuit,
    pub algorithm: Algorithm,
    pub rounds: usize,
    pub base_probability: f64,
}

impl Pipeline {
    pub fn layout(&self) -> &RegisterLayout {
        self.circuit.layout()
    }

    pub fn analytic_probability(&self) -> f64 {
        amplified_probability(self.base_probability, self.rounds)
    }

    pub fn simulate(&self) -> Result<StateVector> {
        simulator::run(&self.circuit)
    }

    pub fn sample(&self, shots: usize, seed: u64) -> Result<SampleResult> {
        sample(
            &self.simulate()?,
            &success_constraints(self.layout()),
            shots,
            seed,
        )
    }
}

pub fn build_pipeline(config: &PipelineConfig) -> Result<Pipeline> {
    let layout = layout_for(&config.spec, config.algorithm, config.decomposed)?;
    let base_probability = base_success_probability(&config.spec, config.algorithm)?;
    let rounds = match config.rounds {
        Rounds::Auto => optimal_rounds(base_probability)?,
        Rounds::Explicit(r) => r,
    };
    let prep = build_state_prep(&config.spec, &layout, config.algorithm, config.decomposed)?;
    let grover = {
        let mut iterate = build_good_reflection(&layout)?;
        iterate.extend(&build_initial_reflection(&prep)?)?;
        iterate
    };
    let mut circuit = prep;
    for _ in 0..rounds {
        circuit.extend(&grover)?;
    }
    circuit.extend(&build_oracle(&config.spec, &layout)?)?;
    Ok(Pipeline {
        circuit,
        algorithm: config.algorithm,
        rounds,
        base_probability,
    })
}

/// Address-register amplitudes on the success branch with Data and Ancilla
/// at zero, renormalised. `None` when the branch is empty.
pub fn address_state(
    state: &StateVector,
    layout: &RegisterLayout,
) -> Option<Vec<num_complex::Complex64>> {
    let d = 1usize << layout.size(Register::Address);
    let amps: Vec<_> = (0..d as u64)
        .map(|j| {
            state.amplitude(layout.basis_index(&[(Register::Address, j), (Register::Flag, 1)]))
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    (norm > 1e-150).then(|| amps.into_iter().map(|a| a / norm).collect())
}

/// `|<target|address>|^2` for a real target vector.
pub fn address_fidelity(address: &[num_complex::Complex64], target: &[f64]) -> f64 {
    address
        .iter()
        .zip(target)
        .map(|(a, t)| a * t)
        .sum::<num_complex::Complex64>()
        .norm_sqr()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleResult {
    pub shots: usize,
    pub seed: u64,
    /// Outcome basis index -> count.
    pub histogram: BTreeMap<usize, usize>,
    pub successes: usize,
}

impl SampleResult {
    pub fn success_frequency(&self) -> f64 {
        self.successes as f64 / self.shots as f64
    }
}

/// Draws `shots` full-register measurements from `state` with a seeded
/// ChaCha generator and tallies outcomes meeting `success`.
pub fn sample(
    state: &StateVector,
    success: &[(usize, bool)],
    shots: usize,
    seed: u64,
) -> Result<SampleResult> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let weights = WeightedIndex::new(state.probabilities())
        .map_err(|e| Error::InvalidSpec(format!("cannot sample state: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = BTreeMap::new();
    for _ in 0..shots {
        *histogram.entry(weights.sample(&mut rng)).or_insert(0) += 1;
    }
    let successes = histogram
        .iter()
        .filter(|(&k, _)| success.iter().all(|&(q, bit)| ((k >> q) & 1 == 1) == bit))
        .map(|(_, &c)| c)
        .sum();
    Ok(SampleResult {
        shots,
        seed,
        histogram,
        successes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::postselect;

    fn demo() -> AmplitudeSpec {
        AmplitudeSpec::new(vec![0.25, 0.5], 2).unwrap()
    }

    #[test]
    fn rounds_formula() {
        assert_eq!(optimal_rounds(1.0).unwrap(), 0);
        assert_eq!(optimal_rounds(0.2778).unwrap(), 1);
        assert_eq!(optimal_rounds(0.15625).unwrap(), 1);
        assert!(matches!(optimal_rounds(0.0), Err(Error::ZeroProbability)));
        for p in [0.01, 0.1, 0.3, 0.6, 0.9] {
            let r = optimal_rounds(p).unwrap();
            assert!(amplified_probability(p, r) >= p - 1e-12);
        }
    }

    #[test]
    fn base_probabilities() {
        let p = base_success_probability(&demo(), Algorithm::Standard).unwrap();
        assert!((p - 0.3125 / (0.5625 * 2.0)).abs() < 1e-15);
        let p = base_success_probability(&demo(), Algorithm::Modified).unwrap();
        assert!((p - 0.15625).abs() < 1e-15);
    }

    #[test]
    fn good_reflection_marks_success_branch() {
        let layout = RegisterLayout::standard(1, 2).unwrap();
        let c = build_good_reflection(&layout).unwrap();
        for k in 0..(1usize << layout.total()) {
            let s = simulator::apply(&c, StateVector::basis(layout.total(), k).unwrap()).unwrap();
            let marked = layout.register_value(Register::Control, k) == 0
                && layout.register_value(Register::Flag, k) == 1;
            let expect = if marked { -1.0 } else { 1.0 };
            assert_eq!(s.amplitude(k).re, expect);
        }
    }

    #[test]
    fn initial_reflection_fixes_prepared_state() {
        let layout = layout_for(&demo(), Algorithm::Standard, false).unwrap();
        let prep = build_state_prep(&demo(), &layout, Algorithm::Standard, false).unwrap();
        let psi = simulator::run(&prep).unwrap();
        let reflected =
            simulator::apply(&build_initial_reflection(&prep).unwrap(), psi.clone()).unwrap();
        // S Z0 S^dagger = 1 - 2|psi><psi|, so |psi> picks up -1
        let overlap = psi.inner(&reflected).unwrap();
        assert!((overlap.re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn demo_pipelines() {
        let std_pipe = build_pipeline(
            &PipelineConfig::new(demo(), Algorithm::Standard).rounds(Rounds::Explicit(1)),
        )
        .unwrap();
        let s = std_pipe.simulate().unwrap();
        let p = postselect(&s, &success_constraints(std_pipe.layout())).unwrap();
        assert!((p.probability - 0.9910).abs() < 5e-4);

        let addr = address_state(&s, std_pipe.layout()).unwrap();
        let target = [1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()];
        assert!((address_fidelity(&addr, &target) - 1.0).abs() < 1e-10);

        let mod_pipe = build_pipeline(
            &PipelineConfig::new(demo(), Algorithm::Modified).rounds(Rounds::Explicit(1)),
        )
        .unwrap();
        let s = mod_pipe.simulate().unwrap();
        let p = postselect(&s, &success_constraints(mod_pipe.layout())).unwrap();
        assert!((p.probability - 0.8818).abs() < 1e-3);
    }

    #[test]
    fn zero_rounds_gives_base_probability() {
        for algorithm in [Algorithm::Standard, Algorithm::Modified] {
            let pipe =
                build_pipeline(&PipelineConfig::new(demo(), algorithm).rounds(Rounds::Explicit(0)))
                    .unwrap();
            let s = pipe.simulate().unwrap();
            let p = postselect(&s, &success_constraints(pipe.layout())).unwrap();
            assert!((p.probability - pipe.base_probability).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let pipe = build_pipeline(&PipelineConfig::new(demo(), Algorithm::Standard)).unwrap();
        let a = pipe.sample(500, 7).unwrap();
        let b = pipe.sample(500, 7).unwrap();
        assert_eq!(a, b);
        let one = pipe.sample(1, 3).unwrap();
        assert_eq!(one.histogram.values().sum::<usize>(), 1);
        assert!(matches!(pipe.sample(0, 1), Err(Error::ZeroShots)));
    }
}
