//! Gate-level circuit representation.
//!
//! Qubits are addressed by a global index. A [`RegisterLayout`] assigns
//! contiguous index blocks to the named registers in the fixed order
//! Address, Data, Control, Flag, Ancilla. Inside every register qubit 0 is
//! the most significant bit of the register value, so data qubit 0 holds the
//! weight-1/2 fractional bit of an amplitude word.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Range};

use serde::Serialize;

use crate::error::{Error, Result};

/// The supported gate set.
///
/// `Ry` carries the rotation angle in the usual convention
/// `Ry(t) = exp(-i t Y / 2)`. `Mcx`/`Mcz` carry one polarity entry per
/// control: `true` fires on |1>, `false` fires on |0>.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GateKind {
    X,
    H,
    Ry(f64),
    Cx,
    Cz,
    Ch,
    Ccx,
    Mcx(Vec<bool>),
    Mcz(Vec<bool>),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::Ry(_) => "ry",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Ch => "ch",
            GateKind::Ccx => "ccx",
            GateKind::Mcx(_) => "mcx",
            GateKind::Mcz(_) => "mcz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    kind: GateKind,
    controls: Vec<usize>,
    targets: Vec<usize>,
}

impl Gate {
    /// Checks arity, qubit distinctness, angle finiteness and pattern length.
    /// Range checks against a circuit happen when the gate is pushed.
    pub fn new(kind: GateKind, controls: Vec<usize>, targets: Vec<usize>) -> Result<Self> {
        let (c, t) = (controls.len(), targets.len());
        let arity_ok = match &kind {
            GateKind::X | GateKind::H | GateKind::Ry(_) => c == 0 && t == 1,
            GateKind::Cx | GateKind::Cz | GateKind::Ch => c == 1 && t == 1,
            GateKind::Ccx => c == 2 && t == 1,
            GateKind::Mcx(_) | GateKind::Mcz(_) => c >= 1 && t == 1,
        };
        if !arity_ok {
            let expected = match &kind {
                GateKind::X | GateKind::H | GateKind::Ry(_) => "0 controls and 1 target",
                GateKind::Cx | GateKind::Cz | GateKind::Ch => "1 control and 1 target",
                GateKind::Ccx => "2 controls and 1 target",
                GateKind::Mcx(_) | GateKind::Mcz(_) => "at least 1 control and 1 target",
            };
            return Err(Error::Arity {
                gate: kind.name(),
                expected,
                controls: c,
                targets: t,
            });
        }
        match &kind {
            GateKind::Ry(angle) if !angle.is_finite() => return Err(Error::NonFiniteAngle(*angle)),
            GateKind::Mcx(p) | GateKind::Mcz(p) if p.len() != c => {
                return Err(Error::PatternLength {
                    pattern: p.len(),
                    controls: c,
                })
            }
            _ => {}
        }
        let mut seen: Vec<usize> = controls.iter().chain(&targets).copied().collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubit(w[0]));
        }
        Ok(Gate {
            kind,
            controls,
            targets,
        })
    }

    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, vec![], vec![q]).expect("single-qubit gate")
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, vec![], vec![q]).expect("single-qubit gate")
    }

    pub fn ry(angle: f64, q: usize) -> Result<Self> {
        Gate::new(GateKind::Ry(angle), vec![], vec![q])
    }

    pub fn cx(control: usize, target: usize) -> Result<Self> {
        Gate::new(GateKind::Cx, vec![control], vec![target])
    }

    pub fn cz(control: usize, target: usize) -> Result<Self> {
        Gate::new(GateKind::Cz, vec![control], vec![target])
    }

    pub fn ch(control: usize, target: usize) -> Result<Self> {
        Gate::new(GateKind::Ch, vec![control], vec![target])
    }

    pub fn ccx(c0: usize, c1: usize, target: usize) -> Result<Self> {
        Gate::new(GateKind::Ccx, vec![c0, c1], vec![target])
    }

    /// Multi-controlled X from `(qubit, fires_on_one)` pairs.
    pub fn mcx(controls: &[(usize, bool)], target: usize) -> Result<Self> {
        let (qubits, pattern) = controls.iter().copied().unzip();
        Gate::new(GateKind::Mcx(pattern), qubits, vec![target])
    }

    /// Multi-controlled Z from `(qubit, fires_on_one)` pairs.
    pub fn mcz(controls: &[(usize, bool)], target: usize) -> Result<Self> {
        let (qubits, pattern) = controls.iter().copied().unzip();
        Gate::new(GateKind::Mcz(pattern), qubits, vec![target])
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn target(&self) -> usize {
        self.targets[0]
    }

    /// Per-control polarity; fixed-arity controlled gates fire on |1>.
    pub fn control_pattern(&self) -> Vec<bool> {
        match &self.kind {
            GateKind::Mcx(p) | GateKind::Mcz(p) => p.clone(),
            _ => vec![true; self.controls.len()],
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(&self.targets).copied()
    }

    pub fn inverse(&self) -> Gate {
        match self.kind {
            GateKind::Ry(angle) => Gate {
                kind: GateKind::Ry(-angle),
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    fn check_range(&self, total: usize) -> Result<()> {
        match self.qubits().find(|&q| q >= total) {
            Some(qubit) => Err(Error::QubitOutOfRange { qubit, total }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GateKind::Ry(angle) => write!(f, "ry({angle})")?,
            kind => write!(f, "{}", kind.name())?,
        }
        let pattern = self.control_pattern();
        for (q, on) in self.controls.iter().zip(&pattern) {
            if *on {
                write!(f, " c{q}")?;
            } else {
                write!(f, " !c{q}")?;
            }
        }
        for q in &self.targets {
            write!(f, " t{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Register {
    Address,
    Data,
    Control,
    Flag,
    Ancilla,
}

impl Register {
    pub const ALL: [Register; 5] = [
        Register::Address,
        Register::Data,
        Register::Control,
        Register::Flag,
        Register::Ancilla,
    ];

    /// Register name used in exported programs.
    pub fn qasm_name(self) -> &'static str {
        match self {
            Register::Address => "addr",
            Register::Data => "data",
            Register::Control => "ctrl",
            Register::Flag => "flag",
            Register::Ancilla => "anc",
        }
    }
}

/// Which transduction a layout was sized for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    /// Control register of `ceil(log2 n)` qubits.
    Standard,
    /// Control register of `n + 1` qubits.
    Modified,
    /// Arbitrary register sizes (tests, imported programs).
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    kind: LayoutKind,
    address: usize,
    data: usize,
    control: usize,
    flag: usize,
    ancilla: usize,
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1, "ceil_log2 of zero");
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

impl RegisterLayout {
    /// Layout for the binary-indexed transduction: `ceil(log2 n)` control qubits.
    pub fn standard(address: usize, bits: usize) -> Result<Self> {
        if bits < 2 {
            return Err(Error::InvalidPrecision(format!(
                "standard transduction needs n >= 2, got {bits}"
            )));
        }
        Ok(RegisterLayout {
            kind: LayoutKind::Standard,
            address,
            data: bits,
            control: ceil_log2(bits),
            flag: 1,
            ancilla: 0,
        })
    }

    /// Layout for the one-hot transduction: `n + 1` control qubits.
    pub fn modified(address: usize, bits: usize) -> Result<Self> {
        if bits < 1 {
            return Err(Error::InvalidPrecision(
                "modified transduction needs n >= 1".into(),
            ));
        }
        Ok(RegisterLayout {
            kind: LayoutKind::Modified,
            address,
            data: bits,
            control: bits + 1,
            flag: 1,
            ancilla: 0,
        })
    }

    pub fn custom(
        address: usize,
        data: usize,
        control: usize,
        flag: usize,
        ancilla: usize,
    ) -> Self {
        RegisterLayout {
            kind: LayoutKind::Custom,
            address,
            data,
            control,
            flag,
            ancilla,
        }
    }

    /// Same layout with the ancilla register resized.
    pub fn with_ancillas(mut self, ancilla: usize) -> Self {
        self.ancilla = ancilla;
        self
    }

    pub fn kind(&self) -> LayoutKind {
        self.kind
    }

    pub fn size(&self, reg: Register) -> usize {
        match reg {
            Register::Address => self.address,
            Register::Data => self.data,
            Register::Control => self.control,
            Register::Flag => self.flag,
            Register::Ancilla => self.ancilla,
        }
    }

    pub fn offset(&self, reg: Register) -> usize {
        Register::ALL
            .iter()
            .take_while(|&&r| r != reg)
            .map(|&r| self.size(r))
            .sum()
    }

    pub fn qubits(&self, reg: Register) -> Range<usize> {
        let start = self.offset(reg);
        start..start + self.size(reg)
    }

    /// Global index of qubit `i` of `reg`.
    pub fn qubit(&self, reg: Register, i: usize) -> usize {
        assert!(i < self.size(reg), "{reg:?} qubit {i} out of range");
        self.offset(reg) + i
    }

    pub fn flag_qubit(&self) -> usize {
        self.qubit(Register::Flag, 0)
    }

    pub fn total(&self) -> usize {
        Register::ALL.iter().map(|&r| self.size(r)).sum()
    }

    /// Register the global qubit belongs to.
    pub fn register_of(&self, qubit: usize) -> Option<Register> {
        Register::ALL
            .into_iter()
            .find(|&r| self.qubits(r).contains(&qubit))
    }

    /// Value held by `reg` in computational basis state `index`
    /// (qubit `q` of the circuit is bit `q` of `index`).
    pub fn register_value(&self, reg: Register, index: usize) -> u64 {
        self.qubits(reg)
            .fold(0u64, |acc, q| (acc << 1) | ((index >> q) & 1) as u64)
    }

    /// `(qubit, bit)` pairs pinning `reg` to `value`.
    pub fn register_pattern(&self, reg: Register, value: u64) -> Vec<(usize, bool)> {
        let size = self.size(reg);
        self.qubits(reg)
            .enumerate()
            .map(|(i, q)| (q, (value >> (size - 1 - i)) & 1 == 1))
            .collect()
    }

    /// Basis index with the given registers set and everything else zero.
    pub fn basis_index(&self, values: &[(Register, u64)]) -> usize {
        values
            .iter()
            .flat_map(|&(reg, v)| self.register_pattern(reg, v))
            .filter(|&(_, bit)| bit)
            .fold(0usize, |acc, (q, _)| acc | (1 << q))
    }
}

/// Append-only gate list over a fixed register layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Circuit {
    layout: RegisterLayout,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Circuit {
            layout,
            gates: Vec::new(),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check_range(self.layout.total())?;
        self.gates.push(gate);
        Ok(())
    }

    /// Consuming form of [`Circuit::push`].
    pub fn append(mut self, gate: Gate) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    /// Appends every gate of `other`, validating each against this layout.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        let total = self.layout.total();
        for gate in &other.gates {
            gate.check_range(total)?;
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            layout: self.layout,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same gates on a layout whose ancilla register has `ancilla` qubits.
    /// Fails if a gate would fall outside the resized layout.
    pub fn with_ancillas(&self, ancilla: usize) -> Result<Circuit> {
        let mut out = Circuit::new(self.layout.with_ancillas(ancilla));
        out.extend(self)?;
        Ok(out)
    }

    pub fn count(&self) -> GateCounts {
        let mut counts = GateCounts {
            total_qubits: self.layout.total(),
            ..GateCounts::default()
        };
        for gate in &self.gates {
            let k = gate.controls.len();
            match gate.kind {
                GateKind::X | GateKind::H | GateKind::Ry(_) => counts.single_qubit += 1,
                GateKind::Cx => counts.cnot += 1,
                GateKind::Cz => counts.cz += 1,
                GateKind::Ch => counts.ch += 1,
                GateKind::Ccx => counts.toffoli += 1,
                GateKind::Mcx(_) => match k {
                    1 => counts.cnot += 1,
                    2 => counts.toffoli += 1,
                    _ => *counts.mcx_by_arity.entry(k).or_default() += 1,
                },
                GateKind::Mcz(_) => match k {
                    1 => counts.cz += 1,
                    _ => *counts.mcz_by_arity.entry(k).or_default() += 1,
                },
            }
        }
        counts
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

/// Gate tallies. Polarity-carrying `Mcx` gates with one or two controls are
/// counted as CNOT or Toffoli; `Mcz` with one control as CZ. Larger
/// multi-controlled gates are bucketed by control count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub toffoli: usize,
    pub cnot: usize,
    pub cz: usize,
    pub ch: usize,
    pub single_qubit: usize,
    pub mcx_by_arity: BTreeMap<usize, usize>,
    pub mcz_by_arity: BTreeMap<usize, usize>,
    pub total_qubits: usize,
}

impl GateCounts {
    pub fn total_gates(&self) -> usize {
        self.toffoli
            + self.cnot
            + self.cz
            + self.ch
            + self.single_qubit
            + self.mcx_by_arity.values().sum::<usize>()
            + self.mcz_by_arity.values().sum::<usize>()
    }
}

impl Add for GateCounts {
    type Output = GateCounts;

    fn add(mut self, rhs: GateCounts) -> GateCounts {
        self.toffoli += rhs.toffoli;
        self.cnot += rhs.cnot;
        self.cz += rhs.cz;
        self.ch += rhs.ch;
        self.single_qubit += rhs.single_qubit;
        for (k, v) in rhs.mcx_by_arity {
            *self.mcx_by_arity.entry(k).or_default() += v;
        }
        for (k, v) in rhs.mcz_by_arity {
            *self.mcz_by_arity.entry(k).or_default() += v;
        }
        self.total_qubits = self.total_qubits.max(rhs.total_qubits);
        self
    }
}
