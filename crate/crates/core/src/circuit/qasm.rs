//! OpenQASM-2-shaped text format: a single `qreg`, gate applications from
//! the accepted set, `//` comments, no classical registers or measurement.
//!
//! Angle parameters are arithmetic expressions over decimal literals and
//! `pi` with `+ - * /`, unary sign, and parentheses, matching how circuit
//! files in the wild spell fractions of π.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::{Error, Result};

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(b) if b == ch => {
                self.bump();
                Ok(())
            }
            Some(b) => Err(self.error(format!("expected `{}`, found `{}`", ch as char, b as char))),
            None => Err(self.error(format!("expected `{}`, found end of input", ch as char))),
        }
    }

    fn eat(&mut self, ch: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let line = self.line;
        match self.peek() {
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
            Some(b) => return Err(self.error(format!("expected identifier, found `{}`", b as char))),
            None => return Err(self.error("expected identifier, found end of input")),
        }
        let mut name = String::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                name.push(b as char);
                self.bump();
            } else {
                break;
            }
        }
        Ok((name, line))
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let mut digits = String::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                digits.push(b as char);
                self.bump();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.error("expected an integer"));
        }
        digits
            .parse()
            .map_err(|_| self.error(format!("integer `{digits}` out of range")))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() || b == b'.' {
                self.bump();
            } else if (b == b'e' || b == b'E') && self.pos > start && {
                let next = self.src.get(self.pos + 1);
                matches!(next, Some(b'+') | Some(b'-'))
                    || next.is_some_and(|d| d.is_ascii_digit())
            } {
                self.bump();
                if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse()
            .map_err(|_| self.error(format!("invalid number `{text}`")))
    }

    // expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)*
    fn expr(&mut self) -> Result<f64> {
        let mut value = self.term()?;
        loop {
            if self.eat(b'+') {
                value += self.term()?;
            } else if self.eat(b'-') {
                value -= self.term()?;
            } else {
                return Ok(value);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut value = self.factor()?;
        loop {
            if self.eat(b'*') {
                value *= self.factor()?;
            } else if self.eat(b'/') {
                value /= self.factor()?;
            } else {
                return Ok(value);
            }
        }
    }

    fn factor(&mut self) -> Result<f64> {
        self.skip_ws();
        if self.eat(b'-') {
            return Ok(-self.factor()?);
        }
        if self.eat(b'+') {
            return self.factor();
        }
        if self.eat(b'(') {
            let value = self.expr()?;
            self.expect(b')')?;
            return Ok(value);
        }
        match self.peek() {
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() => {
                let (name, _) = self.ident()?;
                if name == "pi" {
                    Ok(PI)
                } else {
                    Err(self.error(format!("unknown constant `{name}`")))
                }
            }
            Some(b) => Err(self.error(format!("expected expression, found `{}`", b as char))),
            None => Err(self.error("expected expression, found end of input")),
        }
    }
}

fn gate_signature(name: &str) -> Option<(usize, usize)> {
    // (params, qubits)
    match name {
        "rx" | "ry" | "rz" => Some((1, 1)),
        "rzz" | "fecr" => Some((1, 2)),
        "h" | "x" | "z" | "s" | "sdg" | "t" | "tdg" => Some((0, 1)),
        "cx" | "ecr" => Some((0, 2)),
        _ => None,
    }
}

fn build_op(name: &str, params: &[f64]) -> GateOp {
    match name {
        "rx" => GateOp::Rx(params[0]),
        "ry" => GateOp::Ry(params[0]),
        "rz" => GateOp::Rz(params[0]),
        "rzz" => GateOp::Rzz(params[0]),
        "fecr" => GateOp::Fecr(params[0]),
        "ecr" => GateOp::Fecr(FRAC_PI_2),
        "h" => GateOp::H,
        "x" => GateOp::X,
        "z" => GateOp::Z,
        "s" => GateOp::S,
        "sdg" => GateOp::Sdg,
        "t" => GateOp::T,
        "tdg" => GateOp::Tdg,
        "cx" => GateOp::Cx,
        _ => unreachable!("signature table covers every accepted name"),
    }
}

pub(crate) fn parse(src: &str) -> Result<Circuit> {
    let mut scanner = Scanner::new(src);
    let mut register: Option<(String, usize)> = None;
    let mut gates: Vec<Gate> = Vec::new();

    while !scanner.at_end() {
        let (word, line) = scanner.ident()?;
        match word.as_str() {
            "OPENQASM" => {
                scanner.number()?;
                scanner.expect(b';')?;
            }
            "include" => {
                scanner.skip_ws();
                scanner.expect(b'"')?;
                while let Some(b) = scanner.peek() {
                    scanner.bump();
                    if b == b'"' {
                        break;
                    }
                }
                scanner.expect(b';')?;
            }
            "qreg" => {
                if register.is_some() {
                    return Err(scanner.error("multiple qreg declarations; exactly one is accepted"));
                }
                let (name, _) = scanner.ident()?;
                scanner.expect(b'[')?;
                let size = scanner.integer()?;
                scanner.expect(b']')?;
                scanner.expect(b';')?;
                register = Some((name, size));
            }
            "creg" | "measure" | "barrier" | "reset" | "gate" | "opaque" | "if" => {
                return Err(Error::UnsupportedGate { name: word, line });
            }
            gate_name => {
                let Some((n_params, n_qubits)) = gate_signature(gate_name) else {
                    return Err(Error::UnsupportedGate {
                        name: gate_name.to_string(),
                        line,
                    });
                };
                let mut params = Vec::with_capacity(n_params);
                if n_params > 0 {
                    scanner.expect(b'(')?;
                    params.push(scanner.expr()?);
                    for _ in 1..n_params {
                        scanner.expect(b',')?;
                        params.push(scanner.expr()?);
                    }
                    scanner.expect(b')')?;
                }
                let Some((reg_name, reg_size)) = &register else {
                    return Err(scanner.error("gate application before any qreg declaration"));
                };
                let mut qubits = Vec::with_capacity(n_qubits);
                for i in 0..n_qubits {
                    if i > 0 {
                        scanner.expect(b',')?;
                    }
                    let (name, _) = scanner.ident()?;
                    if &name != reg_name {
                        return Err(scanner.error(format!("unknown register `{name}`")));
                    }
                    scanner.expect(b'[')?;
                    let index = scanner.integer()?;
                    scanner.expect(b']')?;
                    if index >= *reg_size {
                        return Err(Error::QubitOutOfRange {
                            index,
                            n_qubits: *reg_size,
                        });
                    }
                    qubits.push(index);
                }
                scanner.expect(b';')?;
                gates.push(Gate::new(build_op(gate_name, &params), qubits));
            }
        }
    }

    let n_qubits = register.map(|(_, size)| size).unwrap_or(0);
    let mut circuit = Circuit::new(n_qubits);
    circuit.gates = gates;
    Ok(circuit)
}

pub(crate) fn write(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\n");
    out.push_str(&format!("qreg q[{}];\n", circuit.n_qubits));
    for gate in &circuit.gates {
        let args: Vec<String> = gate.qubits.iter().map(|q| format!("q[{q}]")).collect();
        match gate.op.angle() {
            Some(angle) => {
                out.push_str(&format!("{}({}) {};\n", gate.op.name(), angle, args.join(",")))
            }
            None => out.push_str(&format!("{} {};\n", gate.op.name(), args.join(","))),
        }
    }
    out
}
