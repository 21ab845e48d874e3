//! Fixed-point amplitude words and the XOR-loading data oracle.

use serde::Serialize;

use crate::circuit::{Circuit, Gate, Register, RegisterLayout};
use crate::error::{Error, Result};

/// Widest supported word; keeps `value * 2^n` exact in binary64.
pub const MAX_BITS: usize = 52;

/// An `n`-bit binary fraction `0.b_{n-1} ... b_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FixedPointWord {
    bits: u64,
    precision: usize,
}

impl FixedPointWord {
    pub fn new(bits: u64, precision: usize) -> Result<Self> {
        check_precision(precision)?;
        if bits >> precision != 0 {
            return Err(Error::InvalidSpec(format!(
                "word {bits} does not fit in {precision} bits"
            )));
        }
        Ok(FixedPointWord { bits, precision })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Fractional bit with weight `2^-(i+1)`; `i = 0` is the most significant.
    pub fn fraction_bit(&self, i: usize) -> bool {
        assert!(i < self.precision);
        (self.bits >> (self.precision - 1 - i)) & 1 == 1
    }
}

fn check_precision(bits: usize) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::InvalidPrecision(format!(
            "word width must be in 1..={MAX_BITS}, got {bits}"
        )));
    }
    Ok(())
}

/// Truncates `value` to `bits` fractional bits: `floor(value * 2^bits)`.
pub fn quantize(value: f64, bits: usize) -> Result<FixedPointWord> {
    check_precision(bits)?;
    if !(0.0..1.0).contains(&value) {
        return Err(Error::AmplitudeOutOfRange(value));
    }
    let scaled = (value * (1u64 << bits) as f64).floor() as u64;
    FixedPointWord::new(scaled, bits)
}

pub fn dequantize(word: FixedPointWord) -> f64 {
    word.bits as f64 / (1u64 << word.precision) as f64
}

/// Classical amplitudes and their `n`-bit encodings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeSpec {
    values: Vec<f64>,
    bits: usize,
    words: Vec<FixedPointWord>,
    l2_norm: f64,
}

impl AmplitudeSpec {
    /// `values.len()` must be a power of two, every value in `[0, 1)`, and at
    /// least one value must survive quantization.
    pub fn new(values: Vec<f64>, bits: usize) -> Result<Self> {
        let d = values.len();
        if d == 0 {
            return Err(Error::InvalidSpec("no amplitudes given".into()));
        }
        if !d.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(d));
        }
        let words = values
            .iter()
            .map(|&v| quantize(v, bits))
            .collect::<Result<Vec<_>>>()?;
        let l2_norm = words
            .iter()
            .map(|&w| dequantize(w).powi(2))
            .sum::<f64>()
            .sqrt();
        if l2_norm == 0.0 {
            return Err(Error::InvalidSpec("all amplitudes quantize to zero".into()));
        }
        Ok(AmplitudeSpec {
            values,
            bits,
            words,
            l2_norm,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn address_qubits(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    pub fn words(&self) -> &[FixedPointWord] {
        &self.words
    }

    /// Dequantized amplitudes `x_j`.
    pub fn quantized(&self) -> Vec<f64> {
        self.words.iter().map(|&w| dequantize(w)).collect()
    }

    /// Norm of the quantized vector.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    /// `x_j / ||x||`, the state the preparation aims for.
    pub fn target_state(&self) -> Vec<f64> {
        self.quantized().iter().map(|x| x / self.l2_norm).collect()
    }
}

/// Builds `|j>|y> -> |j>|y xor x_j>` on the Address and Data registers.
///
/// For every address `j` and every set bit of `x_j` the circuit holds one
/// X-type gate on the matching data qubit, controlled on the address pattern
/// of `j` (polarity encodes the zero bits). The oracle is its own inverse.
pub fn build_oracle(spec: &AmplitudeSpec, layout: &RegisterLayout) -> Result<Circuit> {
    let address = spec.address_qubits();
    if layout.size(Register::Address) != address {
        return Err(Error::LayoutMismatch(format!(
            "address register has {} qubits, spec needs {address}",
            layout.size(Register::Address)
        )));
    }
    if layout.size(Register::Data) != spec.bits() {
        return Err(Error::LayoutMismatch(format!(
            "data register has {} qubits, spec needs {}",
            layout.size(Register::Data),
            spec.bits()
        )));
    }
    let mut circuit = Circuit::new(*layout);
    for (j, word) in spec.words().iter().enumerate() {
        let pattern = layout.register_pattern(Register::Address, j as u64);
        for b in (0..spec.bits()).filter(|&b| word.fraction_bit(b)) {
            let target = layout.qubit(Register::Data, b);
            let gate = if pattern.is_empty() {
                Gate::x(target)
            } else {
                Gate::mcx(&pattern, target)?
            };
            circuit.push(gate)?;
        }
    }
    Ok(circuit)
}
