//! Line-oriented state definition files.
//!
//! ```text
//! # comment
//! systems A:2 CA:2 B:2 CB:2 R:2
//! roles A=A C_A=CA B=B C_B=CB R=R
//! param lambda = 0.5
//! ket sqrt(lambda/2) |00000>
//! ket sqrt((1-lambda)/2) |1,0,0,1,1>
//! ```
//!
//! Instead of `ket` lines a file may tensor together built-in blocks:
//! `factor maxent(2) @ (X,Y)` or `factor ghz(3) @ (X,Y,Z)`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::layout::{Factor, Role, SubsystemLayout};
use super::state::{build_ghz, build_maxent, norm, unflatten, LabeledPureState, NORM_TOL};
use crate::error::{Error, Result};

/// Parameter bindings for amplitude expressions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamEnv {
    bindings: BTreeMap<String, f64>,
}

impl ParamEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !is_identifier(name) || name == "i" || name == "sqrt" {
            return Err(Error::InvalidParameter(format!("`{name}` is not a valid parameter name")));
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("`{name}` must be finite")));
        }
        self.bindings.insert(name.to_string(), value);
        Ok(())
    }

    /// Parses a `name=value` assignment as given on the command line.
    pub fn set_assignment(&mut self, text: &str) -> Result<()> {
        let (name, value) = text
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected name=value, got `{text}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("`{}` is not a number", value.trim())))?;
        self.set(name.trim(), value)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.bindings.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a state file; bindings in `env` override `param` defaults.
pub fn parse_state(text: &str, env: &ParamEnv) -> Result<LabeledPureState> {
    let doc = Document::parse(text)?;
    doc.build(env)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Ket(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Line<'a> {
    fn lex(no: usize, text: &'a str) -> Result<Self> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        let col_of = |i: usize| i + 1;
        while i < chars.len() {
            let (_, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_')
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
                toks.push(Token { tok: Tok::Ident(s), col: col_of(start) });
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i].1 == 'e' || chars[i].1 == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j].1 == '+' || chars[j].1 == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].1.is_ascii_digit() {
                        while j < chars.len() && chars[j].1.is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
                let v: f64 = s.parse().map_err(|_| Error::Syntax {
                    line: no,
                    column: col_of(start),
                    message: format!("malformed number `{s}`"),
                })?;
                toks.push(Token { tok: Tok::Num(v), col: col_of(start) });
            } else if c == '|' {
                let start = i;
                i += 1;
                let mut body = String::new();
                loop {
                    match chars.get(i) {
                        Some((_, '>')) | Some((_, '⟩')) => {
                            i += 1;
                            break;
                        }
                        Some((_, ch)) => {
                            body.push(*ch);
                            i += 1;
                        }
                        None => {
                            return Err(Error::Syntax {
                                line: no,
                                column: col_of(start),
                                message: "unterminated ket, expected `>`".into(),
                            })
                        }
                    }
                }
                toks.push(Token { tok: Tok::Ket(body), col: col_of(start) });
            } else if "()+-*/,=:@".contains(c) {
                toks.push(Token { tok: Tok::Sym(c), col: col_of(i) });
                i += 1;
            } else {
                return Err(Error::Syntax {
                    line: no,
                    column: col_of(i),
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        Ok(Line { no, text, toks, pos: 0 })
    }

    fn err<T>(&self, col: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.no,
            column: col,
            message: message.into(),
        })
    }

    fn end_col(&self) -> usize {
        self.text.chars().count() + 1
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_sym(&mut self, sym: char) -> Result<usize> {
        match self.next() {
            Some(Token { tok: Tok::Sym(c), col }) if c == sym => Ok(col),
            Some(t) => self.err(t.col, format!("expected `{sym}`")),
            None => self.err(self.end_col(), format!("expected `{sym}`")),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize)> {
        match self.next() {
            Some(Token { tok: Tok::Ident(s), col }) => Ok((s, col)),
            Some(t) => self.err(t.col, format!("expected {what}")),
            None => self.err(self.end_col(), format!("expected {what}")),
        }
    }

    fn expect_uint(&mut self, what: &str) -> Result<(usize, usize)> {
        match self.next() {
            Some(Token { tok: Tok::Num(v), col }) if v.fract() == 0.0 && v >= 0.0 => {
                Ok((v as usize, col))
            }
            Some(t) => self.err(t.col, format!("expected {what}")),
            None => self.err(self.end_col(), format!("expected {what}")),
        }
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(t.col, "unexpected trailing input"),
        }
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Num(f64),
    Imag,
    Param(String),
    Neg(Box<Expr>),
    Sqrt(Box<Expr>, usize, usize),
    Bin(char, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, env: &ParamEnv) -> Result<Complex64> {
        Ok(match self {
            Expr::Num(v) => Complex64::new(*v, 0.0),
            Expr::Imag => Complex64::new(0.0, 1.0),
            Expr::Param(name) => Complex64::new(
                env.get(name)
                    .ok_or_else(|| Error::UnknownParameter(name.clone()))?,
                0.0,
            ),
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Sqrt(e, line, col) => {
                let v = e.eval(env)?;
                if v.im != 0.0 || v.re < 0.0 {
                    return Err(Error::Syntax {
                        line: *line,
                        column: *col,
                        message: format!("sqrt of {v} is not a nonnegative real"),
                    });
                }
                Complex64::new(v.re.sqrt(), 0.0)
            }
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => {
                        if b == Complex64::new(0.0, 0.0) {
                            return Err(Error::Precondition("division by zero".into()));
                        }
                        a / b
                    }
                }
            }
        })
    }
}

impl Line<'_> {
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Token { tok: Tok::Sym(c @ ('+' | '-')), .. }) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Token { tok: Tok::Sym(c @ ('*' | '/')), .. }) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Token { tok: Tok::Sym('-'), .. }) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(t) = self.next() else {
            return self.err(self.end_col(), "expected an amplitude expression");
        };
        match t.tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Ident(s) if s == "i" => Ok(Expr::Imag),
            Tok::Ident(s) if s == "sqrt" => {
                self.expect_sym('(')?;
                let inner = self.expr()?;
                self.expect_sym(')')?;
                Ok(Expr::Sqrt(Box::new(inner), self.no, t.col))
            }
            Tok::Ident(s) => Ok(Expr::Param(s)),
            Tok::Sym('(') => {
                let inner = self.expr()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            _ => self.err(t.col, "expected a number, parameter, `i`, `sqrt(` or `(`"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Builder {
    MaxEnt,
    Ghz,
}

#[derive(Debug)]
struct KetLine {
    line: usize,
    col: usize,
    amp: Expr,
    body: String,
}

#[derive(Debug)]
struct FactorLine {
    line: usize,
    col: usize,
    builder: Builder,
    d: usize,
    labels: Vec<String>,
}

#[derive(Debug, Default)]
struct Document {
    systems: Vec<Factor>,
    roles: Vec<(Role, Vec<String>)>,
    roles_line: usize,
    params: ParamEnv,
    normalize: bool,
    kets: Vec<KetLine>,
    factors: Vec<FactorLine>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut saw_systems = false;
        let mut saw_roles = false;
        for (idx, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("");
            let mut line = Line::lex(idx + 1, content)?;
            let Some(first) = line.next() else { continue };
            let Tok::Ident(keyword) = &first.tok else {
                return line.err(first.col, "expected a keyword");
            };
            if !saw_systems && keyword != "systems" {
                return line.err(first.col, "the first statement must be `systems`");
            }
            match keyword.as_str() {
                "systems" => {
                    if saw_systems {
                        return line.err(first.col, "duplicate `systems` line");
                    }
                    saw_systems = true;
                    while !line.at_end() {
                        let (label, _) = line.expect_ident("a subsystem label")?;
                        line.expect_sym(':')?;
                        let (dim, col) = line.expect_uint("a dimension")?;
                        if dim < 2 {
                            return line.err(col, "dimensions must be at least 2");
                        }
                        doc.systems.push(Factor::new(label, dim));
                    }
                    if doc.systems.is_empty() {
                        return line.err(line.end_col(), "expected at least one subsystem");
                    }
                }
                "roles" => {
                    if saw_roles {
                        return line.err(first.col, "duplicate `roles` line");
                    }
                    saw_roles = true;
                    doc.roles_line = line.no;
                    while !line.at_end() {
                        let (name, col) = line.expect_ident("a role name")?;
                        let role = Role::from_name(&name).map_or_else(
                            || line.err(col, format!("unknown role `{name}`")),
                            Ok,
                        )?;
                        if doc.roles.iter().any(|(r, _)| *r == role) {
                            return line.err(col, format!("role {role} listed twice"));
                        }
                        line.expect_sym('=')?;
                        let mut labels = Vec::new();
                        if let Some(Token { tok: Tok::Sym('-'), .. }) = line.peek() {
                            line.pos += 1;
                        } else {
                            loop {
                                labels.push(line.expect_ident("a subsystem label or `-`")?.0);
                                match line.peek() {
                                    Some(Token { tok: Tok::Sym(','), .. }) => line.pos += 1,
                                    _ => break,
                                }
                            }
                        }
                        doc.roles.push((role, labels));
                    }
                    for role in Role::ALL {
                        if !doc.roles.iter().any(|(r, _)| *r == role) {
                            return line
                                .err(line.end_col(), format!("role {role} is not assigned"));
                        }
                    }
                }
                "param" => {
                    let (name, col) = line.expect_ident("a parameter name")?;
                    line.expect_sym('=')?;
                    let neg = matches!(line.peek(), Some(Token { tok: Tok::Sym('-'), .. }));
                    if neg {
                        line.pos += 1;
                    }
                    let value = match line.next() {
                        Some(Token { tok: Tok::Num(v), .. }) => v,
                        Some(t) => return line.err(t.col, "expected a real literal"),
                        None => return line.err(line.end_col(), "expected a real literal"),
                    };
                    line.expect_end()?;
                    let value = if neg { -value } else { value };
                    doc.params.set(&name, value).map_err(|e| Error::Syntax {
                        line: line.no,
                        column: col,
                        message: e.to_string(),
                    })?;
                }
                "normalize" => {
                    let (flag, col) = line.expect_ident("`on` or `off`")?;
                    doc.normalize = match flag.as_str() {
                        "on" => true,
                        "off" => false,
                        _ => return line.err(col, "expected `on` or `off`"),
                    };
                    line.expect_end()?;
                }
                "ket" => {
                    let amp = line.expr()?;
                    let (body, col) = match line.next() {
                        Some(Token { tok: Tok::Ket(b), col }) => (b, col),
                        Some(t) => return line.err(t.col, "expected a ket `|...>`"),
                        None => return line.err(line.end_col(), "expected a ket `|...>`"),
                    };
                    line.expect_end()?;
                    doc.kets.push(KetLine { line: line.no, col, amp, body });
                }
                "factor" => {
                    let (name, col) = line.expect_ident("a builder name")?;
                    let builder = match name.as_str() {
                        "maxent" => Builder::MaxEnt,
                        "ghz" => Builder::Ghz,
                        _ => return line.err(col, format!("unknown builder `{name}`")),
                    };
                    line.expect_sym('(')?;
                    let (d, _) = line.expect_uint("a local dimension")?;
                    line.expect_sym(')')?;
                    line.expect_sym('@')?;
                    line.expect_sym('(')?;
                    let mut labels = vec![line.expect_ident("a subsystem label")?.0];
                    while let Some(Token { tok: Tok::Sym(','), .. }) = line.peek() {
                        line.pos += 1;
                        labels.push(line.expect_ident("a subsystem label")?.0);
                    }
                    line.expect_sym(')')?;
                    line.expect_end()?;
                    doc.factors.push(FactorLine { line: line.no, col, builder, d, labels });
                }
                other => return line.err(first.col, format!("unknown statement `{other}`")),
            }
        }
        if !saw_systems {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: "missing `systems` line".into(),
            });
        }
        if !saw_roles {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: "missing `roles` line".into(),
            });
        }
        if !doc.kets.is_empty() && !doc.factors.is_empty() {
            let f = &doc.factors[0];
            return Err(Error::Syntax {
                line: f.line,
                column: f.col,
                message: "`factor` and `ket` lines cannot be mixed".into(),
            });
        }
        Ok(doc)
    }

    fn build(&self, overrides: &ParamEnv) -> Result<LabeledPureState> {
        let layout = SubsystemLayout::new(self.systems.clone(), &self.roles).map_err(|e| {
            Error::Syntax {
                line: self.roles_line,
                column: 1,
                message: e.to_string(),
            }
        })?;
        let mut env = self.params.clone();
        for (k, v) in overrides.iter() {
            env.set(k, v)?;
        }

        if !self.factors.is_empty() {
            let mut groups = Vec::with_capacity(self.factors.len());
            for f in &self.factors {
                let expected = match f.builder {
                    Builder::MaxEnt => 2,
                    Builder::Ghz => 3,
                };
                let syntax = |message: String| Error::Syntax {
                    line: f.line,
                    column: f.col,
                    message,
                };
                if f.labels.len() != expected {
                    return Err(syntax(format!(
                        "builder expects {expected} subsystems, got {}",
                        f.labels.len()
                    )));
                }
                for l in &f.labels {
                    let i = layout.index_of(l).ok_or_else(|| Error::UnknownLabel(l.clone()))?;
                    if layout.factors()[i].dim != f.d {
                        return Err(Error::IndexOutOfRange(format!(
                            "subsystem `{l}` has dimension {} but the builder uses {}",
                            layout.factors()[i].dim,
                            f.d
                        )));
                    }
                }
                let amps = match f.builder {
                    Builder::MaxEnt => build_maxent(f.d),
                    Builder::Ghz => build_ghz(f.d),
                }
                .map_err(|e| syntax(e.to_string()))?;
                groups.push((amps, f.labels.clone()));
            }
            return LabeledPureState::from_factors(layout, &groups);
        }

        let dims = layout.dims();
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        for k in &self.kets {
            let idx = ket_index(&k.body, &dims).map_err(|message| Error::IndexOutOfRange(
                format!("line {}, column {}: {message}", k.line, k.col),
            ))?;
            amps[idx] += k.amp.eval(&env)?;
        }
        let n = norm(&amps);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        if self.normalize {
            LabeledPureState::normalized(layout, amps)
        } else if (n - 1.0).abs() > NORM_TOL {
            Err(Error::NormViolation { norm: n })
        } else {
            LabeledPureState::new(layout, amps)
        }
    }
}

fn ket_index(body: &str, dims: &[usize]) -> std::result::Result<usize, String> {
    let digits: Vec<usize> = if body.contains(',') {
        body.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{}` is not a basis index", p.trim()))
            })
            .collect::<std::result::Result<_, _>>()?
    } else {
        let body = body.trim();
        if dims.iter().any(|&d| d > 10) {
            return Err("contiguous ket digits need every dimension ≤ 10; use `|i,j,...>`".into());
        }
        body.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| format!("`{c}` is not a digit")))
            .collect::<std::result::Result<_, _>>()?
    };
    if digits.len() != dims.len() {
        return Err(format!("ket has {} indices but there are {} subsystems", digits.len(), dims.len()));
    }
    let mut flat = 0;
    for (i, (&d, &dim)) in digits.iter().zip(dims).enumerate() {
        if d >= dim {
            return Err(format!("index {d} at position {} exceeds dimension {dim}", i + 1));
        }
        flat = flat * dim + d;
    }
    Ok(flat)
}

/// Writes a state back in the file format, one `ket` line per nonzero
/// amplitude, using comma-separated indices and round-trip float formatting.
pub fn to_text(state: &LabeledPureState) -> String {
    let layout = state.layout();
    let mut out = String::from("systems");
    for f in layout.factors() {
        out.push_str(&format!(" {}:{}", f.label, f.dim));
    }
    out.push_str("\nroles");
    for role in Role::ALL {
        let labels = layout.role_labels(role);
        let list = if labels.is_empty() { "-".to_string() } else { labels.join(",") };
        out.push_str(&format!(" {}={}", role.name(), list));
    }
    out.push('\n');
    let dims = layout.dims();
    let mut digits = vec![0; dims.len()];
    for (flat, a) in state.amplitudes().iter().enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        unflatten(flat, &dims, &mut digits);
        let idx: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
        let sign = if a.im.is_sign_negative() { '-' } else { '+' };
        out.push_str(&format!(
            "ket ({:?} {sign} {:?}*i) |{}>\n",
            a.re,
            a.im.abs(),
            idx.join(",")
        ));
    }
    out
}
