//! OpenQASM 2.0 export over `{x, h, ry, cx, cz, ccx}`, plus a reader for
//! exactly that subset so exported programs can be simulated again.
//!
//! Lowering rules:
//! - controls that fire on |0> are wrapped in `x` gates;
//! - `ch c,t` becomes `ry(-pi/4) t; cz c,t; ry(pi/4) t;`;
//! - an X with `k >= 3` controls becomes a Toffoli V-chain of `2k - 3`
//!   `ccx` gates over `k - 2` borrowed ancillas, which must be |0> when the
//!   gate runs (true between the gates of every circuit this crate builds);
//! - multi-controlled Z is the matching X form conjugated by `h` on the
//!   target.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate, GateCounts, GateKind, Register, RegisterLayout};
use crate::error::{Error, Result};

pub const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

/// Formats `x` positionally with 17 significant digits.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Ancillas the export of `circuit` must borrow.
pub fn required_lowering_ancillas(circuit: &Circuit) -> usize {
    circuit
        .gates()
        .iter()
        .filter(|g| matches!(g.kind(), GateKind::Mcx(_) | GateKind::Mcz(_)))
        .map(|g| g.controls().len().saturating_sub(2))
        .max()
        .unwrap_or(0)
}

/// `circuit` with its ancilla register grown, if needed, so that every
/// gate can be lowered.
pub fn with_lowering_ancillas(circuit: &Circuit) -> Result<Circuit> {
    let have = circuit.layout().size(Register::Ancilla);
    let need = required_lowering_ancillas(circuit);
    if need <= have {
        return Ok(circuit.clone());
    }
    // borrowed ancillas must exclude the gate's own qubits; existing
    // ancillas may be among them, so reserve extra room for those
    let extra = circuit
        .gates()
        .iter()
        .map(|g| {
            g.qubits()
                .filter(|&q| circuit.layout().register_of(q) == Some(Register::Ancilla))
                .count()
        })
        .max()
        .unwrap_or(0);
    circuit.with_ancillas(need + extra)
}

struct Emitter<'a> {
    layout: &'a RegisterLayout,
    out: String,
}

impl Emitter<'_> {
    fn name(&self, q: usize) -> String {
        let reg = self
            .layout
            .register_of(q)
            .expect("gate qubits are validated against the layout");
        format!("{}[{}]", reg.qasm_name(), q - self.layout.offset(reg))
    }

    fn line(&mut self, op: &str, qubits: &[usize]) {
        let args: Vec<String> = qubits.iter().map(|&q| self.name(q)).collect();
        let _ = writeln!(self.out, "{op} {};", args.join(","));
    }

    fn ry(&mut self, angle: f64, q: usize) {
        self.line(&format!("ry({})", format_angle(angle)), &[q]);
    }

    fn flip_negative(&mut self, controls: &[usize], pattern: &[bool]) {
        for (&q, &on) in controls.iter().zip(pattern) {
            if !on {
                self.line("x", &[q]);
            }
        }
    }

    fn borrow_ancillas(&self, gate: &Gate, count: usize) -> Result<Vec<usize>> {
        let free: Vec<usize> = self
            .layout
            .qubits(Register::Ancilla)
            .filter(|q| !gate.qubits().any(|g| g == *q))
            .take(count)
            .collect();
        if free.len() < count {
            return Err(Error::InsufficientAncillas {
                needed: count,
                available: free.len(),
            });
        }
        Ok(free)
    }

    /// X on `target` when every control is |1>.
    fn multi_x(&mut self, gate: &Gate, controls: &[usize], target: usize) -> Result<()> {
        match controls {
            [c] => self.line("cx", &[*c, target]),
            [c0, c1] => self.line("ccx", &[*c0, *c1, target]),
            _ => {
                let k = controls.len();
                let anc = self.borrow_ancillas(gate, k - 2)?;
                let mut chain = vec![[controls[0], controls[1], anc[0]]];
                for i in 1..k - 2 {
                    chain.push([controls[i + 1], anc[i - 1], anc[i]]);
                }
                for step in &chain {
                    self.line("ccx", step);
                }
                self.line("ccx", &[controls[k - 1], anc[k - 3], target]);
                for step in chain.iter().rev() {
                    self.line("ccx", step);
                }
            }
        }
        Ok(())
    }

    fn gate(&mut self, gate: &Gate) -> Result<()> {
        let t = gate.target();
        let controls = gate.controls();
        match gate.kind() {
            GateKind::X => self.line("x", &[t]),
            GateKind::H => self.line("h", &[t]),
            &GateKind::Ry(angle) => self.ry(angle, t),
            GateKind::Cx => self.line("cx", &[controls[0], t]),
            GateKind::Cz => self.line("cz", &[controls[0], t]),
            GateKind::Ccx => self.line("ccx", &[controls[0], controls[1], t]),
            GateKind::Ch => {
                self.ry(-FRAC_PI_4, t);
                self.line("cz", &[controls[0], t]);
                self.ry(FRAC_PI_4, t);
            }
            GateKind::Mcx(pattern) => {
                self.flip_negative(controls, pattern);
                self.multi_x(gate, controls, t)?;
                self.flip_negative(controls, pattern);
            }
            GateKind::Mcz(pattern) => {
                self.flip_negative(controls, pattern);
                if let [c] = controls {
                    self.line("cz", &[*c, t]);
                } else {
                    self.line("h", &[t]);
                    self.multi_x(gate, controls, t)?;
                    self.line("h", &[t]);
                }
                self.flip_negative(controls, pattern);
            }
        }
        Ok(())
    }
}

/// OpenQASM 2.0 text for `circuit`. Registers are declared in layout order
/// as `addr`, `data`, `ctrl`, `flag`, `anc`; empty registers are omitted.
pub fn export_qasm2(circuit: &Circuit) -> Result<String> {
    let layout = circuit.layout();
    let mut emitter = Emitter {
        layout,
        out: String::from(HEADER),
    };
    for reg in Register::ALL {
        let size = layout.size(reg);
        if size > 0 {
            let _ = writeln!(emitter.out, "qreg {}[{size}];", reg.qasm_name());
        }
    }
    for gate in circuit.gates() {
        emitter.gate(gate)?;
    }
    Ok(emitter.out)
}

/// Gate counts after lowering to the export gate set.
pub fn lowered_counts(circuit: &Circuit) -> Result<GateCounts> {
    Ok(parse_qasm2(&export_qasm2(circuit)?)?.count())
}

fn qasm_err(line: usize, message: impl Into<String>) -> Error {
    Error::Qasm {
        line,
        message: message.into(),
    }
}

fn register_named(name: &str) -> Option<Register> {
    Register::ALL.into_iter().find(|r| r.qasm_name() == name)
}

/// Reads the subset [`export_qasm2`] emits. Not a general OpenQASM front end:
/// no custom gates, classical registers, or parameter expressions.
pub fn parse_qasm2(text: &str) -> Result<Circuit> {
    let mut sizes: [Option<usize>; 5] = [None; 5];
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for stmt in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            statements.push((i + 1, stmt));
        }
        if !line.trim().is_empty() && !line.trim_end().ends_with(';') {
            return Err(qasm_err(i + 1, "statement must end with ';'"));
        }
    }
    let mut iter = statements.into_iter().peekable();
    match iter.next() {
        Some((_, "OPENQASM 2.0")) => {}
        Some((line, _)) => return Err(qasm_err(line, "expected 'OPENQASM 2.0;'")),
        None => return Err(qasm_err(0, "empty program")),
    }
    let mut layout: Option<RegisterLayout> = None;
    let mut circuit: Option<Circuit> = None;
    for (line, stmt) in iter {
        if let Some(rest) = stmt.strip_prefix("include") {
            if rest.trim() != "\"qelib1.inc\"" {
                return Err(qasm_err(
                    line,
                    format!("unsupported include {}", rest.trim()),
                ));
            }
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg") {
            if circuit.is_some() {
                return Err(qasm_err(line, "qreg after the first gate"));
            }
            let (name, size) = parse_operand(rest.trim(), line)?;
            let reg = register_named(name)
                .ok_or_else(|| qasm_err(line, format!("unknown register '{name}'")))?;
            let slot = &mut sizes[reg as usize];
            if slot.is_some() {
                return Err(qasm_err(line, format!("register '{name}' declared twice")));
            }
            *slot = Some(size);
            continue;
        }
        let layout = *layout.get_or_insert_with(|| {
            let s = |r: Register| sizes[r as usize].unwrap_or(0);
            RegisterLayout::custom(
                s(Register::Address),
                s(Register::Data),
                s(Register::Control),
                s(Register::Flag),
                s(Register::Ancilla),
            )
        });
        let circuit = circuit.get_or_insert_with(|| Circuit::new(layout));
        let gate = parse_gate(stmt, line, &layout, &sizes)?;
        circuit
            .push(gate)
            .map_err(|e| qasm_err(line, e.to_string()))?;
    }
    Ok(circuit.unwrap_or_else(|| {
        let s = |r: Register| sizes[r as usize].unwrap_or(0);
        Circuit::new(RegisterLayout::custom(
            s(Register::Address),
            s(Register::Data),
            s(Register::Control),
            s(Register::Flag),
            s(Register::Ancilla),
        ))
    }))
}

/// `name[index]`.
fn parse_operand(text: &str, line: usize) -> Result<(&str, usize)> {
    let (name, rest) = text
        .split_once('[')
        .ok_or_else(|| qasm_err(line, format!("expected name[index], got '{text}'")))?;
    let index = rest
        .strip_suffix(']')
        .and_then(|i| i.trim().parse().ok())
        .ok_or_else(|| qasm_err(line, format!("bad index in '{text}'")))?;
    Ok((name.trim(), index))
}

fn parse_gate(
    stmt: &str,
    line: usize,
    layout: &RegisterLayout,
    sizes: &[Option<usize>; 5],
) -> Result<Gate> {
    let split = stmt
        .find(|c: char| c == '(' || c.is_whitespace())
        .ok_or_else(|| qasm_err(line, format!("cannot parse '{stmt}'")))?;
    let (name, rest) = stmt.split_at(split);
    let rest = rest.trim_start();
    let (param, args) = if let Some(inner) = rest.strip_prefix('(') {
        let (p, a) = inner
            .split_once(')')
            .ok_or_else(|| qasm_err(line, "unclosed parameter list"))?;
        let value: f64 = p
            .trim()
            .parse()
            .map_err(|_| qasm_err(line, format!("unsupported parameter '{}'", p.trim())))?;
        (Some(value), a.trim())
    } else {
        (None, rest)
    };
    let qubits = args
        .split(',')
        .map(|arg| {
            let (reg_name, idx) = parse_operand(arg.trim(), line)?;
            let reg = register_named(reg_name)
                .ok_or_else(|| qasm_err(line, format!("unknown register '{reg_name}'")))?;
            let size = sizes[reg as usize]
                .ok_or_else(|| qasm_err(line, format!("register '{reg_name}' not declared")))?;
            if idx >= size {
                return Err(qasm_err(line, format!("{reg_name}[{idx}] out of range")));
            }
            Ok(layout.offset(reg) + idx)
        })
        .collect::<Result<Vec<_>>>()?;
    let wrap = |r: Result<Gate>| r.map_err(|e| qasm_err(line, e.to_string()));
    let want = |n: usize| {
        if qubits.len() == n {
            Ok(())
        } else {
            Err(qasm_err(
                line,
                format!("{name} takes {n} qubit(s), got {}", qubits.len()),
            ))
        }
    };
    match (name, param) {
        ("x", None) => want(1).map(|_| Gate::x(qubits[0])),
        ("h", None) => want(1).map(|_| Gate::h(qubits[0])),
        ("ry", Some(angle)) => want(1).and_then(|_| wrap(Gate::ry(angle, qubits[0]))),
        ("cx", None) => want(2).and_then(|_| wrap(Gate::cx(qubits[0], qubits[1]))),
        ("cz", None) => want(2).and_then(|_| wrap(Gate::cz(qubits[0], qubits[1]))),
        ("ccx", None) => want(3).and_then(|_| wrap(Gate::ccx(qubits[0], qubits[1], qubits[2]))),
        _ => Err(qasm_err(line, format!("unsupported gate '{stmt}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{full_unitary, max_column_difference};

    #[test]
    fn header_and_single_h() {
        let layout = RegisterLayout::custom(0, 0, 0, 1, 0);
        let c = Circuit::new(layout).append(Gate::h(0)).unwrap();
        let text = export_qasm2(&c).unwrap();
        assert!(text.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n"));
        assert_eq!(text.lines().filter(|l| *l == "h flag[0];").count(), 1);
        assert_eq!(text.lines().filter(|l| l.starts_with('h')).count(), 1);
    }

    #[test]
    fn ch_lowering() {
        let layout = RegisterLayout::custom(0, 2, 0, 0, 0);
        let c = Circuit::new(layout)
            .append(Gate::ch(0, 1).unwrap())
            .unwrap();
        let text = export_qasm2(&c).unwrap();
        let body: Vec<&str> = text.lines().skip(3).collect();
        assert_eq!(body.len(), 3);
        assert!(body[0].starts_with("ry(-0.78539816339744828)"));
        assert_eq!(body[1], "cz data[0],data[1];");
        assert!(body[2].starts_with("ry(0.78539816339744828)"));
        let back = parse_qasm2(&text).unwrap();
        let diff = full_unitary(&c)
            .unwrap()
            .max_abs_diff(&full_unitary(&back).unwrap());
        assert!(diff < 1e-12);
    }

    #[test]
    fn angle_formatting() {
        assert_eq!(format_angle(0.0), "0");
        assert_eq!(format_angle(FRAC_PI_4), "0.78539816339744828");
        assert_eq!(format_angle(-1.2309594173407747), "-1.2309594173407747");
        assert_eq!(format_angle(3.0), "3.0000000000000000");
        for x in [0.1234, -2.5e-7, 5.8813] {
            assert_eq!(format_angle(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn wide_mcx_uses_v_chain() {
        let layout = RegisterLayout::custom(0, 5, 0, 0, 3);
        let gate = Gate::mcx(&[(0, true), (1, false), (2, true), (3, true)], 4).unwrap();
        let c = Circuit::new(layout).append(gate).unwrap();
        let back = parse_qasm2(&export_qasm2(&c).unwrap()).unwrap();
        let counts = back.count();
        assert_eq!(counts.toffoli, 2 * 4 - 3);
        assert_eq!(counts.single_qubit, 2);
        // the chain borrows the ancillas, so only their |0> columns must agree
        let columns: Vec<usize> = (0..1 << 5).collect();
        assert!(max_column_difference(&c, &back, &columns).unwrap() < 1e-12);
    }

    #[test]
    fn missing_ancillas() {
        let layout = RegisterLayout::custom(0, 4, 0, 0, 0);
        let gate = Gate::mcx(&[(0, true), (1, true), (2, true)], 3).unwrap();
        let c = Circuit::new(layout).append(gate).unwrap();
        assert!(matches!(
            export_qasm2(&c),
            Err(Error::InsufficientAncillas {
                needed: 1,
                available: 0
            })
        ));
        let widened = with_lowering_ancillas(&c).unwrap();
        assert_eq!(widened.layout().size(Register::Ancilla), 1);
        assert!(export_qasm2(&widened).is_ok());
    }

    #[test]
    fn reader_rejects_unknown_input() {
        assert!(parse_qasm2("").is_err());
        assert!(parse_qasm2("OPENQASM 3.0;").is_err());
        let head = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg data[2];\n";
        assert!(parse_qasm2(&format!("{head}u3(1,2,3) data[0];")).is_err());
        assert!(parse_qasm2(&format!("{head}x data[2];")).is_err());
        assert!(parse_qasm2(&format!("{head}x foo[0];")).is_err());
        assert!(parse_qasm2(&format!("{head}cx data[0],data[0];")).is_err());
        assert!(parse_qasm2(&format!("{head}ry(pi) data[0];")).is_err());
        assert!(parse_qasm2(&format!("{head}x data[0]")).is_err());
        let c = parse_qasm2(&format!("{head}x data[1]; h data[0];  // note")).unwrap();
        assert_eq!(c.len(), 2);
    }
}
