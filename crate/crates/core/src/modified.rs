//! One-hot LCU transduction.
//!
//! The coefficient index lives in an `(n+1)`-qubit one-hot register. A
//! ladder of controlled-H and CNOT gates walks a single excitation down the
//! register, leaving `2^{-(i+1)/2}` on position `i` and `2^{-n/2}` on the
//! unused tail position `n`. Kick-back is then one Toffoli per data bit.

use crate::circuit::{Circuit, Gate, Register, RegisterLayout};
use crate::encoding::AmplitudeSpec;
use crate::error::{Error, Result};

fn check_control(layout: &RegisterLayout, n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidPrecision(
            "modified transduction needs n >= 1".into(),
        ));
    }
    if layout.size(Register::Control) != n + 1 {
        return Err(Error::LayoutMismatch(format!(
            "control register has {} qubits, n = {n} needs {}",
            layout.size(Register::Control),
            n + 1
        )));
    }
    Ok(())
}

/// Appends the gradient ladder: X on control 0, then for each step
/// `CH(c_i -> c_{i+1})` followed by `CX(c_{i+1} -> c_i)`.
pub fn push_gradient(circuit: &mut Circuit) -> Result<()> {
    let layout = *circuit.layout();
    let n = layout
        .size(Register::Control)
        .checked_sub(1)
        .ok_or_else(|| Error::LayoutMismatch("gradient ladder needs a control register".into()))?;
    check_control(&layout, n)?;
    let c = |i| layout.qubit(Register::Control, i);
    circuit.push(Gate::x(c(0)))?;
    for i in 0..n {
        circuit.push(Gate::ch(c(i), c(i + 1))?)?;
        circuit.push(Gate::cx(c(i + 1), c(i))?)?;
    }
    Ok(())
}

/// Gradient ladder on a bare `(n+1)`-qubit control register.
pub fn build_prepare_gradient(n: usize) -> Result<Circuit> {
    if n < 1 {
        return Err(Error::InvalidPrecision(
            "modified transduction needs n >= 1".into(),
        ));
    }
    let mut circuit = Circuit::new(RegisterLayout::custom(0, 0, n + 1, 0, 0));
    push_gradient(&mut circuit)?;
    Ok(circuit)
}

/// `n` Toffolis: control qubit `i` and data qubit `i` flip the flag. The
/// tail position `n` has no kick-back.
pub fn build_kickback_modified(n: usize, layout: &RegisterLayout) -> Result<Circuit> {
    check_control(layout, n)?;
    if layout.size(Register::Data) != n || layout.size(Register::Flag) != 1 {
        return Err(Error::LayoutMismatch(format!(
            "expected {n} data qubits and one flag qubit"
        )));
    }
    let mut circuit = Circuit::new(*layout);
    for i in 0..n {
        circuit.push(Gate::ccx(
            layout.qubit(Register::Control, i),
            layout.qubit(Register::Data, i),
            layout.flag_qubit(),
        )?)?;
    }
    Ok(circuit)
}

/// Ladder, kick-backs, inverse ladder on an existing layout.
pub fn transduce_modified_on(layout: &RegisterLayout) -> Result<Circuit> {
    let n = layout.size(Register::Data);
    let mut ladder = Circuit::new(*layout);
    push_gradient(&mut ladder)?;
    let mut circuit = ladder.clone();
    circuit.extend(&build_kickback_modified(n, layout)?)?;
    circuit.extend(&ladder.inverse())?;
    Ok(circuit)
}

pub fn modified_layout(spec: &AmplitudeSpec) -> Result<RegisterLayout> {
    RegisterLayout::modified(spec.address_qubits(), spec.bits())
}

/// The map `|x>|0^{n+1}>|0> -> x|x>|0^{n+1}>|1> + ...`.
pub fn build_transduce_modified(spec: &AmplitudeSpec) -> Result<Circuit> {
    transduce_modified_on(&modified_layout(spec)?)
}

/// Ladder preparing `sum_i sqrt(a_i / a) |one-hot i>` with `a = sum_i a_i`
/// on `L` qubits. Each controlled-H of the gradient ladder becomes a
/// controlled-`Ry(phi_i)` with `cos(phi_i / 2) = sqrt(a_i / sum_{k>=i} a_k)`,
/// written as `Ry(phi/2) CX Ry(-phi/2) CX` on the target. The last
/// position takes whatever amplitude remains, so there is no tail term.
pub fn build_prepare_lcu_coefficients(coefficients: &[f64]) -> Result<Circuit> {
    if coefficients.is_empty() {
        return Err(Error::InvalidSpec("no LCU coefficients given".into()));
    }
    if let Some(&bad) = coefficients.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::InvalidCoefficient(bad));
    }
    let len = coefficients.len();
    let layout = RegisterLayout::custom(0, 0, len, 0, 0);
    let c = |i| layout.qubit(Register::Control, i);
    let mut circuit = Circuit::new(layout);
    circuit.push(Gate::x(c(0)))?;
    let mut remaining: f64 = coefficients.iter().sum();
    for (i, &a) in coefficients[..len - 1].iter().enumerate() {
        let keep = (a / remaining).clamp(0.0, 1.0);
        let phi = 2.0 * keep.sqrt().acos();
        remaining -= a;
        circuit.push(Gate::ry(phi / 2.0, c(i + 1))?)?;
        circuit.push(Gate::cx(c(i), c(i + 1))?)?;
        circuit.push(Gate::ry(-phi / 2.0, c(i + 1))?)?;
        circuit.push(Gate::cx(c(i), c(i + 1))?)?;
        circuit.push(Gate::cx(c(i + 1), c(i))?)?;
    }
    Ok(circuit)
}
