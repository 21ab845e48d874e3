//! Dense statevector simulation.
//!
//! Qubit `q` of a circuit is bit `q` of the basis-state index. Gates are
//! applied in place, one sweep per gate, directly from their control pattern
//! (multi-controlled gates are never lowered here). With the `parallel`
//! feature the sweeps can run on rayon; every amplitude pair is updated by
//! exactly one task with a fixed operation order, so results do not depend
//! on the backend or the thread count.

mod kernels;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use kernels::Condition;

/// Largest supported register width (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// Largest circuit for which [`full_unitary`] materialises the matrix.
pub const FULL_UNITARY_MAX_QUBITS: usize = 10;

/// Below this many qubits the parallel backend runs sequentially.
#[cfg(feature = "parallel")]
const PARALLEL_MIN_QUBITS: usize = 12;

const ZERO_PROBABILITY: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount {
                count: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// not renormalised.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount {
                count: num_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::StateSizeMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Simulator {
    backend: Backend,
}

impl Simulator {
    pub fn new(backend: Backend) -> Self {
        Simulator { backend }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn apply(&self, circuit: &Circuit, state: &mut StateVector) -> Result<()> {
        if circuit.num_qubits() != state.num_qubits {
            return Err(Error::StateSizeMismatch {
                expected: circuit.num_qubits(),
                found: state.num_qubits,
            });
        }
        for gate in circuit.gates() {
            self.apply_gate(gate, state);
        }
        Ok(())
    }

    /// Applies one gate. Qubit indices must be valid for `state`.
    pub fn apply_gate(&self, gate: &Gate, state: &mut StateVector) {
        let target = gate.target();
        let mut cond = Condition { mask: 0, value: 0 };
        for (&q, on) in gate.controls().iter().zip(gate.control_pattern()) {
            cond.mask |= 1 << q;
            if on {
                cond.value |= 1 << q;
            }
        }
        match gate.kind() {
            GateKind::X | GateKind::Cx | GateKind::Ccx | GateKind::Mcx(_) => {
                self.pairs(state, target, cond, std::mem::swap)
            }
            GateKind::H | GateKind::Ch => self.pairs(state, target, cond, hadamard),
            &GateKind::Ry(angle) => {
                let (s, c) = (angle / 2.0).sin_cos();
                self.pairs(state, target, cond, move |a, b| {
                    let (x, y) = (*a, *b);
                    *a = x * c - y * s;
                    *b = x * s + y * c;
                })
            }
            GateKind::Cz | GateKind::Mcz(_) => {
                cond.mask |= 1 << target;
                cond.value |= 1 << target;
                self.negate(state, cond)
            }
        }
    }

    fn pairs<F>(&self, state: &mut StateVector, target: usize, cond: Condition, op: F)
    where
        F: Fn(&mut Complex64, &mut Complex64) + Sync,
    {
        match self.backend {
            #[cfg(feature = "parallel")]
            Backend::Parallel if state.num_qubits >= PARALLEL_MIN_QUBITS => {
                kernels::pairs_par(&mut state.amplitudes, target, cond, op)
            }
            _ => kernels::pairs_seq(&mut state.amplitudes, target, cond, op),
        }
    }

    fn negate(&self, state: &mut StateVector, cond: Condition) {
        match self.backend {
            #[cfg(feature = "parallel")]
            Backend::Parallel if state.num_qubits >= PARALLEL_MIN_QUBITS => {
                kernels::negate_par(&mut state.amplitudes, cond)
            }
            _ => kernels::negate_seq(&mut state.amplitudes, cond),
        }
    }
}

#[inline]
fn hadamard(a: &mut Complex64, b: &mut Complex64) {
    let (x, y) = (*a, *b);
    *a = (x + y) * FRAC_1_SQRT_2;
    *b = (x - y) * FRAC_1_SQRT_2;
}

/// Runs `circuit` on `state` with the default backend.
pub fn apply(circuit: &Circuit, mut state: StateVector) -> Result<StateVector> {
    Simulator::default().apply(circuit, &mut state)?;
    Ok(state)
}

/// Runs `circuit` on |0...0>.
pub fn run(circuit: &Circuit) -> Result<StateVector> {
    apply(circuit, StateVector::zero(circuit.num_qubits())?)
}

#[derive(Debug, Clone)]
pub struct PostSelection {
    pub constraints: Vec<(usize, bool)>,
    pub probability: f64,
    /// Renormalised branch; `None` for a zero-probability outcome.
    pub collapsed: Option<StateVector>,
}

fn constraint_condition(constraints: &[(usize, bool)]) -> Condition {
    constraints
        .iter()
        .fold(Condition { mask: 0, value: 0 }, |mut c, &(q, bit)| {
            c.mask |= 1 << q;
            if bit {
                c.value |= 1 << q;
            }
            c
        })
}

/// Projects onto basis states satisfying every `(qubit, bit)` constraint.
pub fn postselect(state: &StateVector, constraints: &[(usize, bool)]) -> Result<PostSelection> {
    if let Some(&(qubit, _)) = constraints.iter().find(|(q, _)| *q >= state.num_qubits) {
        return Err(Error::QubitOutOfRange {
            qubit,
            total: state.num_qubits,
        });
    }
    let cond = constraint_condition(constraints);
    let probability: f64 = state
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| cond.holds(*i))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let collapsed = if probability < ZERO_PROBABILITY {
        None
    } else {
        let scale = probability.sqrt().recip();
        let amplitudes = state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if cond.holds(i) {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Some(StateVector {
            num_qubits: state.num_qubits,
            amplitudes,
        })
    };
    Ok(PostSelection {
        constraints: constraints.to_vec(),
        probability,
        collapsed,
    })
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Dense unitary, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    columns: Vec<Vec<Complex64>>,
}

impl Unitary {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col][row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.columns[col]
    }

    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        assert_eq!(self.dim, other.dim, "unitary dimensions differ");
        self.columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| max_diff(a, b))
            .fold(0.0, f64::max)
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn column_of(circuit: &Circuit, index: usize) -> Result<Vec<Complex64>> {
    let mut state = StateVector::basis(circuit.num_qubits(), index)?;
    Simulator::new(Backend::Sequential).apply(circuit, &mut state)?;
    Ok(state.amplitudes)
}

fn map_columns<T, F>(columns: &[usize], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        columns.par_iter().map(|&c| f(c)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        columns.iter().map(|&c| f(c)).collect()
    }
}

/// Unitary of `circuit`; column `k` is the image of basis state `k`.
pub fn full_unitary(circuit: &Circuit) -> Result<Unitary> {
    let q = circuit.num_qubits();
    if q == 0 || q > FULL_UNITARY_MAX_QUBITS {
        return Err(Error::UnsupportedQubitCount {
            count: q,
            max: FULL_UNITARY_MAX_QUBITS,
        });
    }
    let dim = 1usize << q;
    let indices: Vec<usize> = (0..dim).collect();
    let columns = map_columns(&indices, |k| column_of(circuit, k))?;
    Ok(Unitary { dim, columns })
}

/// Largest entrywise difference between the unitaries of `a` and `b` over
/// the given columns, computed one column at a time so circuits too wide
/// for [`full_unitary`] can still be compared on a subspace.
pub fn max_column_difference(a: &Circuit, b: &Circuit, columns: &[usize]) -> Result<f64> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::StateSizeMismatch {
            expected: a.num_qubits(),
            found: b.num_qubits(),
        });
    }
    let diffs = map_columns(columns, |k| {
        Ok(max_diff(&column_of(a, k)?, &column_of(b, k)?))
    })?;
    Ok(diffs.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::RegisterLayout;

    fn flat(q: usize) -> Circuit {
        Circuit::new(RegisterLayout::custom(0, q, 0, 0, 0))
    }

    fn close(a: Complex64, re: f64) -> bool {
        (a - Complex64::new(re, 0.0)).norm() < 1e-12
    }

    #[test]
    fn zero_state() {
        let s = StateVector::zero(1).unwrap();
        assert_eq!(
            s.amplitudes(),
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        );
        let s = StateVector::zero(3).unwrap();
        assert!(close(s.amplitude(0), 1.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
        assert!(StateVector::zero(0).is_err());
        assert!(StateVector::zero(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn hadamard_on_zero() {
        let c = flat(1).append(Gate::h(0)).unwrap();
        let s = run(&c).unwrap();
        assert!(close(s.amplitude(0), FRAC_1_SQRT_2));
        assert!(close(s.amplitude(1), FRAC_1_SQRT_2));
    }

    #[test]
    fn toffoli_on_110() {
        // |110> in qubit order (q0, q1, q2) = index 0b011
        let c = flat(3).append(Gate::ccx(0, 1, 2).unwrap()).unwrap();
        let s = apply(&c, StateVector::basis(3, 0b011).unwrap()).unwrap();
        assert!(close(s.amplitude(0b111), 1.0));
    }

    #[test]
    fn polarity_controls() {
        let c = flat(2)
            .append(Gate::mcx(&[(0, false)], 1).unwrap())
            .unwrap();
        let s = run(&c).unwrap();
        assert!(close(s.amplitude(0b10), 1.0));
        let s = apply(&c, StateVector::basis(2, 0b01).unwrap()).unwrap();
        assert!(close(s.amplitude(0b01), 1.0));
    }

    #[test]
    fn ry_rotation() {
        let c = flat(1).append(Gate::ry(1.2, 0).unwrap()).unwrap();
        let s = run(&c).unwrap();
        assert!(close(s.amplitude(0), 0.6f64.cos()));
        assert!(close(s.amplitude(1), 0.6f64.sin()));
    }

    #[test]
    fn mcz_phase() {
        let mut c = flat(3);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::x(1)).unwrap();
        c.push(Gate::x(2)).unwrap();
        c.push(Gate::mcz(&[(0, true), (1, true)], 2).unwrap())
            .unwrap();
        let s = run(&c).unwrap();
        assert!(close(s.amplitude(0b110), FRAC_1_SQRT_2));
        assert!(close(s.amplitude(0b111), -FRAC_1_SQRT_2));
    }

    #[test]
    fn postselect_bell() {
        let c = flat(2)
            .append(Gate::h(0))
            .unwrap()
            .append(Gate::cx(0, 1).unwrap())
            .unwrap();
        let s = run(&c).unwrap();
        let p = postselect(&s, &[(0, false)]).unwrap();
        assert!((p.probability - 0.5).abs() < 1e-12);
        assert!(close(p.collapsed.unwrap().amplitude(0), 1.0));

        let p = postselect(&s, &[]).unwrap();
        assert!((p.probability - 1.0).abs() < 1e-12);
        assert_eq!(p.collapsed.unwrap(), s);

        let p = postselect(&StateVector::zero(2).unwrap(), &[(1, true)]).unwrap();
        assert_eq!(p.probability, 0.0);
        assert!(p.collapsed.is_none());
    }

    #[test]
    fn fidelity_basics() {
        let a = StateVector::basis(2, 1).unwrap();
        let b = StateVector::basis(2, 2).unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        assert!(fidelity(&a, &StateVector::zero(3).unwrap()).is_err());
    }

    #[test]
    fn unitary_of_x_and_empty() {
        let u = full_unitary(&flat(1).append(Gate::x(0)).unwrap()).unwrap();
        assert!(close(u.entry(0, 1), 1.0) && close(u.entry(1, 0), 1.0));
        assert!(close(u.entry(0, 0), 0.0) && close(u.entry(1, 1), 0.0));
        let id = full_unitary(&flat(3)).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                assert!(close(id.entry(r, c), if r == c { 1.0 } else { 0.0 }));
            }
        }
        assert!(full_unitary(&flat(11)).is_err());
    }

    #[test]
    fn size_mismatch() {
        let c = flat(2);
        assert!(matches!(
            apply(&c, StateVector::zero(3).unwrap()),
            Err(Error::StateSizeMismatch { .. })
        ));
    }
}
