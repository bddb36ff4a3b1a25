use std::f64::consts::PI;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseDiagnostic, ParseErrors, Parsed, Pos, Severity};
use crate::circuit::{GateKind, GateOp, Op, QuantumCircuit};
use crate::package::MAX_QUBITS;

const MAX_EXPR_DEPTH: usize = 64;

type PResult<T> = Result<T, ParseDiagnostic>;

/// Named gates: base kind and number of leading control arguments.
fn named_gate(name: &str) -> Option<(GateKind, usize)> {
    Some(match name {
        "cx" | "CX" => (GateKind::X, 1),
        "cz" => (GateKind::Z, 1),
        "cp" | "cu1" => (GateKind::Phase, 1),
        "ccx" => (GateKind::X, 2),
        "id" => (GateKind::I, 0),
        "u1" | "p" => (GateKind::Phase, 0),
        "x" | "y" | "z" | "h" | "s" | "sdg" | "t" | "tdg" | "rx" | "ry" | "rz" | "swap" => {
            (name.parse().ok()?, 0)
        }
        _ => return None,
    })
}

enum Arg {
    Qubit(usize, Pos),
    Register(Pos),
}

struct Register {
    name: String,
    size: usize,
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    diags: Vec<ParseDiagnostic>,
    qreg: Option<Register>,
    creg: Option<Register>,
    ops: Vec<Op>,
}

pub(crate) fn parse_program(src: &str) -> Result<Parsed, ParseErrors> {
    let mut diags = Vec::new();
    let toks = tokenize(src, &mut diags);
    let mut p = Parser {
        toks,
        i: 0,
        diags,
        qreg: None,
        creg: None,
        ops: Vec::new(),
    };
    p.program();
    p.diags.sort_by_key(|d| (d.line, d.column));
    let has_error = p.diags.iter().any(|d| d.severity == Severity::Error);
    if has_error {
        return Err(ParseErrors(p.diags));
    }
    let qreg = p.qreg.expect("checked by program()");
    Ok(Parsed {
        circuit: QuantumCircuit {
            num_qubits: qreg.size,
            num_clbits: p.creg.map_or(0, |c| c.size),
            ops: p.ops,
        },
        warnings: p.diags,
    })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> ParseDiagnostic {
        ParseDiagnostic::error(
            self.pos(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<Pos> {
        if *self.peek() == want {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().pos)),
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn int(&mut self) -> PResult<(u64, Pos)> {
        match *self.peek() {
            Tok::Int(v) => Ok((v, self.bump().pos)),
            _ => Err(self.unexpected("integer")),
        }
    }

    /// Skips past the next `;` after an error.
    fn synchronize(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Skips a `{ … }` block (or up to a `;` when none follows).
    fn skip_body(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth <= 1 => {
                    self.bump();
                    return;
                }
                Tok::RBrace => depth -= 1,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn program(&mut self) {
        if matches!(self.peek(), Tok::Ident(s) if s == "OPENQASM") {
            if let Err(d) = self.header() {
                self.diags.push(d);
                self.synchronize();
            }
        }
        while *self.peek() != Tok::Eof {
            if let Err(d) = self.statement() {
                self.diags.push(d);
                self.synchronize();
            }
        }
        if self.qreg.is_none() && !self.diags.iter().any(|d| d.severity == Severity::Error) {
            self.diags.push(ParseDiagnostic::error(
                self.pos(),
                "no quantum register declared",
            ));
        }
    }

    fn header(&mut self) -> PResult<()> {
        self.bump();
        let pos = self.pos();
        let version = match *self.peek() {
            Tok::Real(v) => v,
            Tok::Int(v) => v as f64,
            _ => return Err(self.unexpected("version number")),
        };
        self.bump();
        if !(2.0..3.0).contains(&version) {
            self.diags.push(ParseDiagnostic::warning(
                pos,
                format!("version {version} treated as 2.0"),
            ));
        }
        self.expect(Tok::Semi, "';'")?;
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let (word, pos) = self.ident()?;
        match word.as_str() {
            "OPENQASM" => Err(ParseDiagnostic::error(pos, "header must come first")),
            "include" => {
                let file = match self.peek().clone() {
                    Tok::Str(s) => {
                        self.bump();
                        s
                    }
                    _ => return Err(self.unexpected("file name string")),
                };
                self.expect(Tok::Semi, "';'")?;
                if file != "qelib1.inc" {
                    self.diags.push(ParseDiagnostic::warning(
                        pos,
                        format!("include of '{file}' ignored"),
                    ));
                }
                Ok(())
            }
            "qreg" | "creg" => self.register(&word, pos),
            "barrier" => self.barrier(),
            "measure" => self.measure(),
            "gate" => {
                self.diags.push(ParseDiagnostic::error(
                    pos,
                    "unsupported statement 'gate' (gate definitions)",
                ));
                self.skip_body();
                Ok(())
            }
            "opaque" | "if" | "reset" | "U" => Err(ParseDiagnostic::error(
                pos,
                format!("unsupported statement '{word}'"),
            )),
            _ => self.gate(word, pos),
        }
    }

    fn register(&mut self, kind: &str, pos: Pos) -> PResult<()> {
        let (name, _) = self.ident()?;
        self.expect(Tok::LBracket, "'['")?;
        let (size, size_pos) = self.int()?;
        self.expect(Tok::RBracket, "']'")?;
        self.expect(Tok::Semi, "';'")?;
        let slot = if kind == "qreg" {
            &mut self.qreg
        } else {
            &mut self.creg
        };
        if slot.is_some() {
            let what = if kind == "qreg" { "quantum" } else { "classical" };
            return Err(ParseDiagnostic::error(
                pos,
                format!("multiple {what} registers are not supported"),
            ));
        }
        if kind == "qreg" && (size == 0 || size > MAX_QUBITS as u64) {
            return Err(ParseDiagnostic::error(
                size_pos,
                format!("register size must be between 1 and {MAX_QUBITS}"),
            ));
        }
        if size > u32::MAX as u64 {
            return Err(ParseDiagnostic::error(size_pos, "register too large"));
        }
        *slot = Some(Register {
            name,
            size: size as usize,
        });
        Ok(())
    }

    fn qubit_count(&self, pos: Pos) -> PResult<usize> {
        self.qreg
            .as_ref()
            .map(|r| r.size)
            .ok_or_else(|| ParseDiagnostic::error(pos, "no quantum register declared"))
    }

    fn qarg(&mut self) -> PResult<Arg> {
        let (name, pos) = self.ident()?;
        let n = self.qubit_count(pos)?;
        if self.qreg.as_ref().is_some_and(|r| r.name != name) {
            return Err(ParseDiagnostic::error(
                pos,
                format!("unknown quantum register '{name}'"),
            ));
        }
        if *self.peek() != Tok::LBracket {
            return Ok(Arg::Register(pos));
        }
        self.bump();
        let (k, kpos) = self.int()?;
        self.expect(Tok::RBracket, "']'")?;
        if k >= n as u64 {
            return Err(ParseDiagnostic::error(kpos, "qubit index out of range"));
        }
        Ok(Arg::Qubit(k as usize, kpos))
    }

    fn qargs(&mut self) -> PResult<Vec<Arg>> {
        let mut args = vec![self.qarg()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.qarg()?);
        }
        Ok(args)
    }

    fn barrier(&mut self) -> PResult<()> {
        let args = self.qargs()?;
        self.expect(Tok::Semi, "';'")?;
        let n = self.qreg.as_ref().map_or(0, |r| r.size);
        let mut qs = Vec::new();
        for a in args {
            match a {
                Arg::Register(_) => qs.extend(0..n),
                Arg::Qubit(q, _) => qs.push(q),
            }
        }
        let mut seen = vec![false; n];
        qs.retain(|&q| !std::mem::replace(&mut seen[q], true));
        self.ops.push(Op::Barrier(qs));
        Ok(())
    }

    fn measure(&mut self) -> PResult<()> {
        let q = self.qarg()?;
        self.expect(Tok::Arrow, "'->'")?;
        let (name, cpos) = self.ident()?;
        let Some(creg) = self.creg.as_ref() else {
            return Err(ParseDiagnostic::error(cpos, "no classical register declared"));
        };
        if creg.name != name {
            return Err(ParseDiagnostic::error(
                cpos,
                format!("unknown classical register '{name}'"),
            ));
        }
        let csize = creg.size;
        let c = if *self.peek() == Tok::LBracket {
            self.bump();
            let (k, kpos) = self.int()?;
            self.expect(Tok::RBracket, "']'")?;
            if k >= csize as u64 {
                return Err(ParseDiagnostic::error(kpos, "bit index out of range"));
            }
            Some(k as usize)
        } else {
            None
        };
        self.expect(Tok::Semi, "';'")?;
        let n = self.qreg.as_ref().map_or(0, |r| r.size);
        match (q, c) {
            (Arg::Qubit(q, _), Some(c)) => self.ops.push(Op::Measure { qubit: q, clbit: c }),
            (Arg::Register(pos), None) => {
                if n != csize {
                    return Err(ParseDiagnostic::error(pos, "register sizes differ"));
                }
                self.ops
                    .extend((0..n).map(|q| Op::Measure { qubit: q, clbit: q }));
            }
            (Arg::Qubit(_, pos), None) | (Arg::Register(pos), Some(_)) => {
                return Err(ParseDiagnostic::error(
                    pos,
                    "measure needs two single bits or two whole registers",
                ))
            }
        }
        Ok(())
    }

    fn gate(&mut self, mut name: String, mut pos: Pos) -> PResult<()> {
        let mut extra_controls = 0usize;
        if name == "ctrl" && *self.peek() == Tok::LParen {
            self.bump();
            let (k, kpos) = self.int()?;
            self.expect(Tok::RParen, "')'")?;
            self.expect(Tok::At, "'@'")?;
            if k == 0 || k > MAX_QUBITS as u64 {
                return Err(ParseDiagnostic::error(kpos, "control count out of range"));
            }
            extra_controls = k as usize;
            (name, pos) = self.ident()?;
        }
        let Some((kind, named_controls)) = named_gate(&name) else {
            return Err(ParseDiagnostic::error(pos, format!("unknown gate '{name}'")));
        };
        let mut params = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() != Tok::RParen {
                params.push(self.expr(0)?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    params.push(self.expr(0)?);
                }
            }
            self.expect(Tok::RParen, "')'")?;
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(ParseDiagnostic::error(pos, "angle is not finite"));
        }
        if params.len() != kind.num_params() {
            return Err(ParseDiagnostic::error(
                pos,
                format!(
                    "gate '{name}' expects {} parameter(s), got {}",
                    kind.num_params(),
                    params.len()
                ),
            ));
        }
        let args = self.qargs()?;
        self.expect(Tok::Semi, "';'")?;
        let controls_n = extra_controls + named_controls;
        let arity = controls_n + kind.num_targets();
        if args.len() != arity {
            return Err(ParseDiagnostic::error(
                pos,
                format!(
                    "gate '{name}' expects {arity} qubit argument(s), got {}",
                    args.len()
                ),
            ));
        }
        if arity == 1 {
            if let Arg::Register(_) = args[0] {
                let n = self.qreg.as_ref().map_or(0, |r| r.size);
                for q in 0..n {
                    self.ops.push(Op::Gate(GateOp::new(kind, params.clone(), vec![], vec![q])));
                }
                return Ok(());
            }
        }
        let mut qubits = Vec::with_capacity(arity);
        for a in args {
            match a {
                Arg::Register(p) => {
                    return Err(ParseDiagnostic::error(
                        p,
                        "whole-register arguments are only allowed for single-qubit gates",
                    ))
                }
                Arg::Qubit(q, p) => {
                    if qubits.contains(&q) {
                        return Err(ParseDiagnostic::error(p, "duplicate qubit argument"));
                    }
                    qubits.push(q);
                }
            }
        }
        let targets = qubits.split_off(controls_n);
        self.ops
            .push(Op::Gate(GateOp::new(kind, params, qubits, targets)));
        Ok(())
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self, depth: usize) -> PResult<f64> {
        if depth > MAX_EXPR_DEPTH {
            return Err(ParseDiagnostic::error(self.pos(), "expression nested too deeply"));
        }
        let mut v = self.term(depth)?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    v += self.term(depth)?;
                }
                Tok::Minus => {
                    self.bump();
                    v -= self.term(depth)?;
                }
                _ => return Ok(v),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self, depth: usize) -> PResult<f64> {
        let mut v = self.unary(depth)?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    v *= self.unary(depth)?;
                }
                Tok::Slash => {
                    let pos = self.bump().pos;
                    let d = self.unary(depth)?;
                    if d == 0.0 {
                        return Err(ParseDiagnostic::error(pos, "division by zero"));
                    }
                    v /= d;
                }
                _ => return Ok(v),
            }
        }
    }

    // unary := ('-'|'+') unary | power
    fn unary(&mut self, depth: usize) -> PResult<f64> {
        if depth > MAX_EXPR_DEPTH {
            return Err(ParseDiagnostic::error(self.pos(), "expression nested too deeply"));
        }
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary(depth + 1)?)
            }
            Tok::Plus => {
                self.bump();
                self.unary(depth + 1)
            }
            _ => self.power(depth),
        }
    }

    // power := primary ('^' unary)?
    fn power(&mut self, depth: usize) -> PResult<f64> {
        let base = self.primary(depth)?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let e = self.unary(depth + 1)?;
            return Ok(base.powf(e));
        }
        Ok(base)
    }

    fn primary(&mut self, depth: usize) -> PResult<f64> {
        let pos = self.pos();
        let v = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                v as f64
            }
            Tok::Real(v) => {
                self.bump();
                v
            }
            Tok::Ident(s) if s == "pi" => {
                self.bump();
                PI
            }
            Tok::LParen => {
                self.bump();
                let v = self.expr(depth + 1)?;
                self.expect(Tok::RParen, "')'")?;
                v
            }
            _ => return Err(self.unexpected("number, 'pi' or '('")),
        };
        if !v.is_finite() {
            return Err(ParseDiagnostic::error(pos, "angle is not finite"));
        }
        Ok(v)
    }
}
