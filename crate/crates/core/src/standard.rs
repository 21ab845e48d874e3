//! Binary-indexed LCU transduction: prepare `A`, kick back through
//! `(m+1)`-controlled NOTs onto the flag, then unprepare.
//!
//! `A` maps `|0^m>` to `a^{-1/2} sum_i 2^{-(i+1)/2} |i>` with
//! `m = ceil(log2 n)` and `a = 1 - 2^{-2^m}`. That state is a product state,
//! so `A` is one `Ry` per control qubit.

use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::{ceil_log2, Circuit, Gate, Register, RegisterLayout};
use crate::encoding::AmplitudeSpec;
use crate::error::{Error, Result};

/// Single-qubit angles of `A`.
///
/// `angles[i]` is the half-angle `theta_i` with
/// `cos(theta_i)|0> + sin(theta_i)|1>` on control qubit `i`; the gate itself
/// is `Ry(2 theta_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RyAngleSet {
    pub m: usize,
    pub angles: Vec<f64>,
    pub normalization: f64,
}

/// `a = 1 - 2^{-2^m}`.
pub fn normalization(m: usize) -> f64 {
    1.0 - (-(2f64.powi(m as i32))).exp2()
}

/// Angles for precision `n >= 2`.
///
/// Uses `theta_i = atan(2^{-2^{m-1-i}/2})`, equal to the cosine form
/// `cos^2 theta_i = 2^{2^{m-1-i}} / (2^{2^{m-1-i}} + 1)` but free of
/// the overflow in `2^{2^{m-1}}`.
pub fn ry_angles(n: usize) -> Result<RyAngleSet> {
    if n < 2 {
        return Err(Error::InvalidPrecision(format!(
            "standard transduction needs n >= 2, got {n}"
        )));
    }
    let m = ceil_log2(n);
    let angles = (0..m)
        .map(|i| {
            let exponent = 2f64.powi((m - 1 - i) as i32);
            (-exponent / 2.0).exp2().atan()
        })
        .collect();
    Ok(RyAngleSet {
        m,
        angles,
        normalization: normalization(m),
    })
}

impl RyAngleSet {
    /// Rotation angle of the `Ry` gate on control qubit `i`.
    pub fn gate_angle(&self, i: usize) -> f64 {
        2.0 * self.angles[i]
    }

    /// Angle fractions `omega_i = theta_i / pi`.
    pub fn fractions(&self) -> Vec<f64> {
        self.angles.iter().map(|t| t / PI).collect()
    }

    /// Copy with every `omega_i` floored to `k` fractional bits.
    pub fn truncated(&self, k: u32) -> RyAngleSet {
        let scale = 2f64.powi(k as i32);
        let angles = self
            .angles
            .iter()
            .map(|&theta| {
                let w = theta / PI * scale;
                if w.floor() == w {
                    theta
                } else {
                    PI * w.floor() / scale
                }
            })
            .collect();
        RyAngleSet {
            angles,
            ..self.clone()
        }
    }

    /// Amplitudes of the product state over all `2^m` control values.
    pub fn product_amplitudes(&self) -> Vec<f64> {
        let m = self.m;
        (0..1usize << m)
            .map(|value| {
                (0..m)
                    .map(|q| {
                        let (s, c) = self.angles[q].sin_cos();
                        if (value >> (m - 1 - q)) & 1 == 1 {
                            s
                        } else {
                            c
                        }
                    })
                    .product()
            })
            .collect()
    }
}

/// Appends `A` (one `Ry` per control qubit) to `circuit`.
pub fn push_prepare_a(circuit: &mut Circuit, angles: &RyAngleSet) -> Result<()> {
    let layout = *circuit.layout();
    if layout.size(Register::Control) != angles.m {
        return Err(Error::LayoutMismatch(format!(
            "control register has {} qubits, A needs {}",
            layout.size(Register::Control),
            angles.m
        )));
    }
    for i in 0..angles.m {
        circuit.push(Gate::ry(
            angles.gate_angle(i),
            layout.qubit(Register::Control, i),
        )?)?;
    }
    Ok(())
}

/// `A` on a bare `m`-qubit control register.
pub fn build_prepare_a(n: usize) -> Result<Circuit> {
    build_prepare_a_with(&ry_angles(n)?)
}

pub fn build_prepare_a_with(angles: &RyAngleSet) -> Result<Circuit> {
    let mut circuit = Circuit::new(RegisterLayout::custom(0, 0, angles.m, 0, 0));
    push_prepare_a(&mut circuit, angles)?;
    Ok(circuit)
}

fn check_cascade_layout(n: usize, layout: &RegisterLayout) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidPrecision(format!(
            "standard transduction needs n >= 2, got {n}"
        )));
    }
    let m = ceil_log2(n);
    if layout.size(Register::Control) != m {
        return Err(Error::LayoutMismatch(format!(
            "control register has {} qubits, n = {n} needs {m}",
            layout.size(Register::Control)
        )));
    }
    if layout.size(Register::Data) != n {
        return Err(Error::LayoutMismatch(format!(
            "data register has {} qubits, expected {n}",
            layout.size(Register::Data)
        )));
    }
    if layout.size(Register::Flag) != 1 {
        return Err(Error::LayoutMismatch(
            "a single flag qubit is required".into(),
        ));
    }
    Ok(m)
}

/// The `n` kick-back gates: gate `i` fires when the control register holds
/// `i` and data qubit `i` (weight `2^{-(i+1)}`) is set, flipping the flag.
pub fn build_kickback(n: usize, layout: &RegisterLayout) -> Result<Circuit> {
    check_cascade_layout(n, layout)?;
    let mut circuit = Circuit::new(*layout);
    for i in 0..n {
        let mut controls = layout.register_pattern(Register::Control, i as u64);
        controls.push((layout.qubit(Register::Data, i), true));
        circuit.push(Gate::mcx(&controls, layout.flag_qubit())?)?;
    }
    Ok(circuit)
}

/// X on `target` conditioned on `controls`, as a plain CX/CCX when every
/// control fires on |1>.
fn toggle(controls: &[(usize, bool)], target: usize) -> Result<Gate> {
    match controls {
        [(c, true)] => Gate::cx(*c, target),
        [(c0, true), (c1, true)] => Gate::ccx(*c0, *c1, target),
        _ => Gate::mcx(controls, target),
    }
}

/// The kick-back cascade over Toffoli and CNOT gates only, using `m - 1`
/// ancillas that start and end in |0>.
///
/// Depth-first walk of the control-value tree. Ancilla `l` holds the AND of
/// the literals for control qubits `0..=l+1` along the current path. Moving
/// from the 0-child to the 1-child of a node flips the ancilla with a single
/// CNOT from the parent instead of an uncompute/compute pair, so each of the
/// `n - 2` inner nodes costs two Toffolis and one CNOT, and each of the `n`
/// leaves one Toffoli: `3n - 4` Toffolis and `n - 2` CNOTs in total.
/// Negative literals are carried as control polarity.
pub fn decompose_cascade(n: usize, layout: &RegisterLayout) -> Result<Circuit> {
    let m = check_cascade_layout(n, layout)?;
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let available = layout.size(Register::Ancilla);
    if available < m - 1 {
        return Err(Error::InsufficientAncillas {
            needed: m - 1,
            available,
        });
    }
    let mut walk = CascadeWalk {
        layout,
        m,
        circuit: Circuit::new(*layout),
    };
    let top = layout.qubit(Register::Control, 0);
    walk.visit(0, (top, false), 0)?;
    walk.visit(0, (top, true), 1)?;
    Ok(walk.circuit)
}

struct CascadeWalk<'a> {
    layout: &'a RegisterLayout,
    m: usize,
    circuit: Circuit,
}

impl CascadeWalk<'_> {
    /// `node` is the qubit (with polarity) holding the AND of the literals
    /// for control qubits `0..=level`; `prefix` is their value.
    fn visit(&mut self, level: usize, node: (usize, bool), prefix: usize) -> Result<()> {
        let layout = self.layout;
        if level + 1 == self.m {
            let data = layout.qubit(Register::Data, prefix);
            let gate = toggle(&[node, (data, true)], layout.flag_qubit())?;
            return self.circuit.push(gate);
        }
        let anc = layout.qubit(Register::Ancilla, level);
        let next = layout.qubit(Register::Control, level + 1);
        self.circuit.push(toggle(&[node, (next, false)], anc)?)?;
        self.visit(level + 1, (anc, true), prefix << 1)?;
        self.circuit.push(toggle(&[node], anc)?)?;
        self.visit(level + 1, (anc, true), (prefix << 1) | 1)?;
        self.circuit.push(toggle(&[node, (next, true)], anc)?)
    }
}

/// Layout for the standard transduction of `spec`; the decomposed cascade
/// gets its `m - 1` ladder ancillas.
pub fn standard_layout(spec: &AmplitudeSpec, decomposed: bool) -> Result<RegisterLayout> {
    let layout = RegisterLayout::standard(spec.address_qubits(), spec.bits())?;
    let ancillas = if decomposed {
        layout.size(Register::Control) - 1
    } else {
        0
    };
    Ok(layout.with_ancillas(ancillas))
}

/// `A`, the kick-back cascade, `A^dagger` on an existing layout.
pub fn transduce_standard_on(
    layout: &RegisterLayout,
    angles: &RyAngleSet,
    decomposed: bool,
) -> Result<Circuit> {
    let n = layout.size(Register::Data);
    check_cascade_layout(n, layout)?;
    let mut prepare = Circuit::new(*layout);
    push_prepare_a(&mut prepare, angles)?;
    let cascade = if decomposed {
        decompose_cascade(n, layout)?
    } else {
        build_kickback(n, layout)?
    };
    let mut circuit = prepare.clone();
    circuit.extend(&cascade)?;
    circuit.extend(&prepare.inverse())?;
    Ok(circuit)
}

/// The map `|x>|0^m>|0> -> (x/a)|x>|0^m>|1> + ...` for every data word of
/// `spec`.
pub fn build_transduce_standard(spec: &AmplitudeSpec, decomposed: bool) -> Result<Circuit> {
    let layout = standard_layout(spec, decomposed)?;
    transduce_standard_on(&layout, &ry_angles(spec.bits())?, decomposed)
}
