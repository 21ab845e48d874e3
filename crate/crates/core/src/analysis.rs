//! Closed-form resource counts for the four transduction algorithms, and the
//! angle-truncation error bounds for the binary-indexed preparation `A`.

use serde::{Deserialize, Serialize};

use crate::circuit::ceil_log2;
use crate::error::{Error, Result};
use crate::simulator;
use crate::standard::{build_prepare_a_with, ry_angles};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CostAlgorithm {
    /// Comparator-based transduction (Sanders et al.).
    Sanders,
    /// Phase-kickback oracle with gradient state (Bausch).
    Bausch,
    #[value(name = "standard")]
    StandardLcu,
    #[value(name = "modified")]
    ModifiedLcu,
}

impl CostAlgorithm {
    pub const ALL: [CostAlgorithm; 4] = [
        CostAlgorithm::Sanders,
        CostAlgorithm::Bausch,
        CostAlgorithm::StandardLcu,
        CostAlgorithm::ModifiedLcu,
    ];
}

/// Transduction cost `|x> -> x|x>`. Absent cells are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostRow {
    pub algorithm: CostAlgorithm,
    pub n: usize,
    pub additional_qubits: i64,
    pub toffoli: i64,
    pub cnot: Option<i64>,
    pub sqrt_swap: Option<i64>,
    pub convention: &'static str,
}

/// Cost of one Grover iterate's two reflections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReflectionCostRow {
    pub algorithm: CostAlgorithm,
    pub n: usize,
    /// Ancillas beyond the transduction's additional qubits.
    pub ancillas: i64,
    /// Reflection about the good states.
    pub toffoli_oracle: i64,
    /// Reflection about the initial state.
    pub toffoli_diffusion: i64,
    pub convention: &'static str,
}

fn check_n(n: usize) -> Result<(i64, i64)> {
    if n < 2 {
        return Err(Error::InvalidPrecision(format!(
            "cost models need n >= 2, got {n}"
        )));
    }
    Ok((n as i64, ceil_log2(n) as i64))
}

pub fn cost_table(algorithm: CostAlgorithm, n: usize) -> Result<CostRow> {
    let (n_, log) = check_n(n)?;
    let row = |additional_qubits, toffoli, cnot, sqrt_swap, convention| CostRow {
        algorithm,
        n,
        additional_qubits,
        toffoli,
        cnot,
        sqrt_swap,
        convention,
    };
    Ok(match algorithm {
        CostAlgorithm::Sanders => row(
            n_ + 2,
            2 * n_ - 1,
            Some(4 * n_ - 3),
            None,
            "formula only; comparator variant with n+2 ancillas",
        ),
        CostAlgorithm::Bausch => row(
            log,
            2 * n_ * log,
            None,
            Some(n_),
            "formula only; phase-kickback oracle plus sqrt(SWAP) gradient state",
        ),
        CostAlgorithm::StandardLcu => row(
            2 * log - 1,
            3 * n_ - 4,
            Some(n_ - 2),
            None,
            "additional = ceil(log2 n) control + (ceil(log2 n) - 1) ladder ancillas; flag counted separately",
        ),
        CostAlgorithm::ModifiedLcu => row(
            n_ + 2,
            n_,
            Some(4 * n_),
            None,
            "additional = n+1 control + flag; cnot = 2n CX + 2n CZ once each CH is lowered to ry.cz.ry",
        ),
    })
}

pub fn reflection_cost(algorithm: CostAlgorithm, n: usize) -> Result<ReflectionCostRow> {
    let (n_, log) = check_n(n)?;
    let row = |ancillas, toffoli_oracle, toffoli_diffusion, convention| ReflectionCostRow {
        algorithm,
        n,
        ancillas,
        toffoli_oracle,
        toffoli_diffusion,
        convention,
    };
    Ok(match algorithm {
        CostAlgorithm::Sanders => row(2 * n_ - 3, 2 * n_ - 3, 4 * n_ - 3, "k-controlled NOT = 2k-3 Toffoli with k-2 ancillas"),
        CostAlgorithm::Bausch => row(
            n_ + log - 3,
            2 * log - 5,
            2 * n_ + 2 * log - 5,
            "k-controlled NOT = 2k-3 Toffoli with k-2 ancillas; nonpositive for small n",
        ),
        CostAlgorithm::StandardLcu => row(
            n_,
            2 * log - 3,
            2 * n_ + 2 * log - 3,
            "oracle count kept at 2log(n)-3; the 2k-3 rule on a (log n + 1)-qubit pattern would give 2log(n)-1 for the oracle",
        ),
        CostAlgorithm::ModifiedLcu => row(2 * n_ - 1, 2 * n_ - 1, 4 * n_ - 1, "k-controlled NOT = 2k-3 Toffoli with k-2 ancillas"),
    })
}

/// Analytic amplitude-error bounds when each `omega_i = theta_i / pi` is
/// truncated to `k` fractional bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBound {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    /// Bound on the |0> amplitude error, `2^{-k+2+ceil(log2 m)}`.
    pub eps_zero: f64,
    /// Bound on the |2^m - 1> amplitude error, `2^{-k+2-(m-2)}`.
    pub eps_top: f64,
    /// Bound on the transduced-amplitude error, `2^{-k+5+ceil(log2 m)}`.
    pub eps_x: f64,
}

pub fn angle_truncation_bounds(n: usize, k: u32) -> Result<ErrorBound> {
    if n < 2 {
        return Err(Error::InvalidPrecision(format!(
            "bounds need n >= 2, got {n}"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidPrecision(
            "angle precision k must be >= 1".into(),
        ));
    }
    let m = ceil_log2(n);
    let log_m = ceil_log2(m) as i32;
    let k_ = k as i32;
    Ok(ErrorBound {
        n,
        m,
        k,
        eps_zero: f64::from(-k_ + 2 + log_m).exp2(),
        eps_top: f64::from(-k_ + 2 - (m as i32 - 2)).exp2(),
        eps_x: f64::from(-k_ + 5 + log_m).exp2(),
    })
}

/// Angle bits needed to load amplitudes to `n` bits:
/// `n + 5 + ceil(log2 ceil(log2 n))`.
pub fn required_angle_bits(n: usize) -> Result<u32> {
    if n < 2 {
        return Err(Error::InvalidPrecision(format!("need n >= 2, got {n}")));
    }
    Ok((n + 5 + ceil_log2(ceil_log2(n))) as u32)
}

/// Simulated effect of truncating the angles of `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalError {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub zero_exact: f64,
    pub zero_truncated: f64,
    pub top_exact: f64,
    pub top_truncated: f64,
    /// `zero_truncated - zero_exact`; nonnegative under floor truncation.
    pub eps_zero: f64,
    /// `top_exact - top_truncated`; nonnegative under floor truncation.
    pub eps_top: f64,
    /// `sum_{i<n} |p_i - p'_i|` over the squared control amplitudes, i.e. the
    /// worst-case shift of the transduced amplitude over all data words.
    pub eps_x: f64,
    /// Largest amplitude deviation over all control basis states.
    pub max_deviation: f64,
    /// Whether any `omega_i` changed under truncation.
    pub truncated: bool,
}

/// Simulates `A` with exact and `k`-bit-truncated angles and measures the
/// amplitude errors the analytic bounds cover. `k >= 56` leaves binary64
/// angles unchanged.
pub fn empirical_angle_error(n: usize, k: u32) -> Result<EmpiricalError> {
    if k < 1 {
        return Err(Error::InvalidPrecision(
            "angle precision k must be >= 1".into(),
        ));
    }
    let exact = ry_angles(n)?;
    let trunc = exact.truncated(k);
    let m = exact.m;
    let s_exact = simulator::run(&build_prepare_a_with(&exact)?)?;
    let s_trunc = simulator::run(&build_prepare_a_with(&trunc)?)?;
    // control qubit 0 is the most significant bit of the value and sits at
    // global index 0, so value i lives at the bit-reversed basis index
    let index = |value: usize| (0..m).fold(0, |acc, q| acc | (((value >> (m - 1 - q)) & 1) << q));
    let amp = |s: &simulator::StateVector, value: usize| s.amplitude(index(value)).re;
    let top = (1usize << m) - 1;
    let eps_x = (0..n)
        .map(|i| (amp(&s_exact, i).powi(2) - amp(&s_trunc, i).powi(2)).abs())
        .sum();
    let max_deviation = s_exact
        .amplitudes()
        .iter()
        .zip(s_trunc.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(EmpiricalError {
        n,
        m,
        k,
        zero_exact: amp(&s_exact, 0),
        zero_truncated: amp(&s_trunc, 0),
        top_exact: amp(&s_exact, top),
        top_truncated: amp(&s_trunc, top),
        eps_zero: amp(&s_trunc, 0) - amp(&s_exact, 0),
        eps_top: amp(&s_exact, top) - amp(&s_trunc, top),
        eps_x,
        max_deviation,
        truncated: exact.angles != trunc.angles,
    })
}
