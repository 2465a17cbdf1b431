//! The `.icd` interferometer circuit description format.
//!
//! Line oriented, `#` starts a comment. Statements appear in this order:
//!
//! ```text
//! modes 2          # required, first
//! param phi
//! source 0 1
//! bs 0 1           # elements, applied in file order
//! phase 0 phi      # literal radians or a declared parameter
//! mirror 1
//! herald 1 0
//! label out 1
//! ```
//!
//! The parser keeps going after an error and reports every problem it finds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use crate::circuit::{is_identifier, Circuit, Element, PhaseExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub message: String,
    pub token: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )?;
        if !self.token.is_empty() {
            write!(f, " (at `{}`)", self.token)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &line[b..byte],
                    column: c + 1,
                });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token {
            text: &line[b..],
            column: c + 1,
        });
    }
    tokens
}

fn is_number(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = match mantissa.split_once('.') {
        Some((int, frac)) => {
            (digits(int) || int.is_empty())
                && (digits(frac) || frac.is_empty())
                && !(int.is_empty() && frac.is_empty())
        }
        None => digits(mantissa),
    };
    let exponent_ok = match exponent {
        Some(e) => digits(e.strip_prefix(['+', '-']).unwrap_or(e)),
        None => true,
    };
    mantissa_ok && exponent_ok
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Header,
    Params,
    Sources,
    Elements,
    Heralds,
    Labels,
}

impl Section {
    fn of(keyword: &str) -> Option<Section> {
        Some(match keyword {
            "modes" => Section::Header,
            "param" => Section::Params,
            "source" => Section::Sources,
            "bs" | "phase" | "mirror" => Section::Elements,
            "herald" => Section::Heralds,
            "label" => Section::Labels,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Section::Header => "modes",
            Section::Params => "param",
            Section::Sources => "source",
            Section::Elements => "element",
            Section::Heralds => "herald",
            Section::Labels => "label",
        }
    }
}

#[derive(Default)]
struct Parser {
    errors: Vec<ParseError>,
    modes: Option<usize>,
    header_seen: bool,
    section: Option<Section>,
    params: BTreeSet<String>,
    sources: Vec<(usize, usize)>,
    elements: Vec<Element>,
    heralds: Vec<(usize, usize)>,
    herald_lines: Vec<usize>,
    labels: BTreeMap<String, usize>,
}

impl Parser {
    fn error(&mut self, line: usize, tok: Token<'_>, message: impl Into<String>) {
        self.errors.push(ParseError {
            line,
            column: tok.column,
            message: message.into(),
            token: tok.text.to_string(),
        });
    }

    fn int(&mut self, line: usize, tok: Token<'_>, what: &str) -> Option<usize> {
        if !tok.text.bytes().all(|b| b.is_ascii_digit()) {
            self.error(line, tok, format!("expected {what} (nonnegative integer)"));
            return None;
        }
        match tok.text.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.error(line, tok, format!("{what} too large"));
                None
            }
        }
    }

    fn mode(&mut self, line: usize, tok: Token<'_>) -> Option<usize> {
        let m = self.int(line, tok, "mode index")?;
        match self.modes {
            Some(modes) if m >= modes => {
                self.error(
                    line,
                    tok,
                    format!("mode {m} out of range (circuit has {modes} modes)"),
                );
                None
            }
            _ => Some(m),
        }
    }

    fn ident(&mut self, line: usize, tok: Token<'_>) -> Option<String> {
        if is_identifier(tok.text) {
            Some(tok.text.to_string())
        } else {
            self.error(line, tok, "expected identifier");
            None
        }
    }

    fn statement(&mut self, line: usize, tokens: &[Token<'_>]) {
        let head = tokens[0];
        let Some(section) = Section::of(head.text) else {
            self.error(line, head, format!("unknown keyword `{}`", head.text));
            return;
        };
        let arity = match head.text {
            "modes" | "param" | "mirror" => 1,
            _ => 2,
        };
        if tokens.len() != arity + 1 {
            let at = tokens.get(arity + 1).copied().unwrap_or(head);
            self.error(
                line,
                at,
                format!(
                    "`{}` takes {arity} argument(s), got {}",
                    head.text,
                    tokens.len() - 1
                ),
            );
            return;
        }

        if section == Section::Header {
            if self.header_seen {
                self.error(line, head, "duplicate `modes` statement");
            } else if self.section.is_some() {
                self.error(line, head, "`modes` must be the first statement");
            }
            self.header_seen = true;
        } else if !self.header_seen && self.section.is_none() {
            self.error(
                line,
                head,
                "`modes` missing: it must be the first statement",
            );
        }
        match self.section {
            Some(current) if section < current => self.error(
                line,
                head,
                format!(
                    "`{}` statement after {} statements; order is modes, param, source, elements, herald, label",
                    head.text,
                    current.name()
                ),
            ),
            _ => self.section = Some(section),
        }

        let args = &tokens[1..];
        match head.text {
            "modes" => {
                if let Some(m) = self.int(line, args[0], "mode count") {
                    if m == 0 {
                        self.error(line, args[0], "circuit needs at least one mode");
                    } else if self.modes.is_none() {
                        self.modes = Some(m);
                    }
                }
            }
            "param" => {
                if let Some(name) = self.ident(line, args[0]) {
                    if !self.params.insert(name) {
                        self.error(line, args[0], "duplicate parameter");
                    }
                }
            }
            "source" => {
                let mode = self.mode(line, args[0]);
                let count = self.int(line, args[1], "photon count");
                if let (Some(mode), Some(count)) = (mode, count) {
                    if self.sources.iter().any(|s| s.0 == mode) {
                        self.error(line, args[0], format!("duplicate source on mode {mode}"));
                    } else {
                        self.sources.push((mode, count));
                    }
                }
            }
            "bs" => {
                let i = self.mode(line, args[0]);
                let j = self.mode(line, args[1]);
                if let (Some(i), Some(j)) = (i, j) {
                    if i == j {
                        self.error(line, args[1], "beam splitter modes must differ");
                    } else {
                        self.elements.push(Element::BeamSplitter(i, j));
                    }
                }
            }
            "phase" => {
                let mode = self.mode(line, args[0]);
                let arg = args[1];
                let phase = if is_identifier(arg.text) {
                    if self.params.contains(arg.text) {
                        Some(PhaseExpr::Param(arg.text.to_string()))
                    } else {
                        self.error(line, arg, format!("undeclared parameter `{}`", arg.text));
                        None
                    }
                } else if is_number(arg.text) {
                    match arg.text.parse::<f64>() {
                        Ok(v) if v.is_finite() => Some(PhaseExpr::Literal(v)),
                        _ => {
                            self.error(line, arg, "phase angle must be finite");
                            None
                        }
                    }
                } else {
                    self.error(line, arg, "expected a number or parameter name");
                    None
                };
                if let (Some(mode), Some(phase)) = (mode, phase) {
                    self.elements.push(Element::PhaseShifter(mode, phase));
                }
            }
            "mirror" => {
                if let Some(mode) = self.mode(line, args[0]) {
                    self.elements.push(Element::Mirror(mode));
                }
            }
            "herald" => {
                let mode = self.mode(line, args[0]);
                let count = self.int(line, args[1], "photon count");
                if let (Some(mode), Some(count)) = (mode, count) {
                    if self.heralds.iter().any(|h| h.0 == mode) {
                        self.error(line, args[0], format!("duplicate herald on mode {mode}"));
                    } else {
                        self.heralds.push((mode, count));
                        self.herald_lines.push(line);
                    }
                }
            }
            "label" => {
                let name = self.ident(line, args[0]);
                let mode = self.mode(line, args[1]);
                if let (Some(name), Some(mode)) = (name, mode) {
                    match self.labels.entry(name) {
                        std::collections::btree_map::Entry::Occupied(e) => {
                            let msg = format!("duplicate label `{}`", e.key());
                            self.error(line, args[0], msg);
                        }
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(mode);
                        }
                    }
                }
            }
            _ => unreachable!("keyword checked above"),
        }
    }

    fn finish(mut self, last_line: usize) -> Result<Circuit, Vec<ParseError>> {
        if !self.header_seen {
            self.errors.push(ParseError {
                line: last_line.max(1),
                column: 1,
                message: "missing `modes` statement".into(),
                token: String::new(),
            });
        }
        let photons: usize = self.sources.iter().map(|s| s.1).sum();
        let mut demanded = 0;
        for (&(_, count), &line) in self.heralds.iter().zip(&self.herald_lines) {
            demanded += count;
            if demanded > photons {
                self.errors.push(ParseError {
                    line,
                    column: 1,
                    message: format!(
                        "heralds demand {demanded} photons but sources supply {photons}"
                    ),
                    token: "herald".into(),
                });
                break;
            }
        }
        if !self.errors.is_empty() {
            return Err(self.errors);
        }
        Circuit::new(
            self.modes.unwrap_or(0),
            self.params,
            self.sources,
            self.elements,
            self.heralds,
            self.labels,
        )
        .map_err(|e| {
            vec![ParseError {
                line: last_line.max(1),
                column: 1,
                message: e.to_string(),
                token: String::new(),
            }]
        })
    }
}

/// Parses `.icd` text into a validated circuit.
pub fn parse(text: &str) -> Result<Circuit, Vec<ParseError>> {
    let mut parser = Parser::default();
    let mut last_line = 0;
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        last_line = line;
        parser.statement(line, &tokens);
    }
    parser.finish(last_line)
}

/// Canonical `.icd` text for `circuit`; `parse` inverts it exactly.
pub fn serialize(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modes {}", circuit.modes());
    for p in circuit.params() {
        let _ = writeln!(out, "param {p}");
    }
    for (mode, count) in circuit.sources() {
        let _ = writeln!(out, "source {mode} {count}");
    }
    for el in circuit.elements() {
        let _ = match el {
            Element::BeamSplitter(i, j) => writeln!(out, "bs {i} {j}"),
            Element::PhaseShifter(m, phase) => writeln!(out, "phase {m} {phase}"),
            Element::Mirror(m) => writeln!(out, "mirror {m}"),
        };
    }
    for (mode, count) in circuit.heralds() {
        let _ = writeln!(out, "herald {mode} {count}");
    }
    for (name, mode) in circuit.labels() {
        let _ = writeln!(out, "label {name} {mode}");
    }
    out
}
