//! Objective expressions: problem files, exact evaluation, exact derivatives.
//!
//! A problem file is UTF-8 text, one statement per line:
//!
//! ```text
//! # comment
//! vars: x1 x2
//! objective: (x1 - 1)^2 + (x2 + 1)^2
//! objective: x1^2 + (x2 - 1)^2
//! ```
//!
//! ```text
//! expr      := term (('+'|'-') term)*
//! term      := factor (('*'|'/') factor)*
//! factor    := base ('^' integer)?
//! base      := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
//! func      := 'sin' | 'cos' | 'exp'
//! ```
//!
//! Gradients and Hessians come from second-order forward-mode duals
//! ([`dual::Dual2`]) and are exact up to rounding; the Hessian is assembled
//! from `n(n+1)/2` directional sweeps and is bitwise symmetric. Integer powers
//! are evaluated by repeated squaring on duals, which keeps derivatives exact
//! at zero bases (a general `exp(p ln x)` power would not be).

pub mod dual;

use dual::Dual2;
use std::fmt;
use thiserror::Error;

/// Expression tree over the variables `x1..xn` of the owning [`Problem`].
///
/// Variable indices are 0-based in code; the textual form `x3` maps to
/// `Var(2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Integer power, negative exponents allowed (nonzero base at evaluation).
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                a.max_var()
            }
        }
    }
}

/// A multiobjective problem: `k` objectives over `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    n: usize,
    objectives: Vec<Expr>,
    pub name: Option<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("a problem needs at least one objective")]
    NoObjectives,
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("objective {objective} references x{var} but the problem has {n} variable(s)")]
    VariableOutOfRange { objective: usize, var: usize, n: usize },
}

/// Evaluation failures; singularities are reported, never folded into NaN.
#[derive(Debug, Error, PartialEq, Clone)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
}

impl Problem {
    pub fn new(n: usize, objectives: Vec<Expr>, name: Option<String>) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::ZeroDimension);
        }
        if objectives.is_empty() {
            return Err(ProblemError::NoObjectives);
        }
        for (idx, obj) in objectives.iter().enumerate() {
            if let Some(v) = obj.max_var() {
                if v >= n {
                    return Err(ProblemError::VariableOutOfRange {
                        objective: idx + 1,
                        var: v + 1,
                        n,
                    });
                }
            }
        }
        Ok(Problem { n, objectives, name })
    }

    /// Dimension of the parameter space.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of objectives.
    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn objectives(&self) -> &[Expr] {
        &self.objectives
    }

    /// `f_i(x)` (0-based `i`).
    pub fn eval(&self, i: usize, x: &[f64]) -> Result<f64, EvalError> {
        debug_assert_eq!(x.len(), self.n);
        eval_scalar(&self.objectives[i], x)
    }

    /// Exact gradient of `f_i` at `x`, one dual sweep per coordinate.
    pub fn gradient(&self, i: usize, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        debug_assert_eq!(x.len(), self.n);
        let mut g = vec![0.0; self.n];
        let mut vars: Vec<Dual2> = x.iter().map(|&v| Dual2::constant(v)).collect();
        for j in 0..self.n {
            vars[j] = Dual2::seeded(x[j], 1.0, 0.0);
            g[j] = eval_dual(&self.objectives[i], &vars)?.d1;
            vars[j] = Dual2::constant(x[j]);
        }
        Ok(g)
    }

    /// Exact Hessian of `f_i` at `x`; the mirrored entries are bitwise equal.
    pub fn hessian(&self, i: usize, x: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
        debug_assert_eq!(x.len(), self.n);
        let n = self.n;
        let mut h = vec![vec![0.0; n]; n];
        let mut vars: Vec<Dual2> = x.iter().map(|&v| Dual2::constant(v)).collect();
        for a in 0..n {
            for b in a..n {
                if a == b {
                    vars[a] = Dual2::seeded(x[a], 1.0, 1.0);
                } else {
                    vars[a] = Dual2::seeded(x[a], 1.0, 0.0);
                    vars[b] = Dual2::seeded(x[b], 0.0, 1.0);
                }
                let d = eval_dual(&self.objectives[i], &vars)?.d12;
                h[a][b] = d;
                h[b][a] = d;
                vars[a] = Dual2::constant(x[a]);
                vars[b] = Dual2::constant(x[b]);
            }
        }
        Ok(h)
    }

    /// All gradients at `x`, in objective order.
    pub fn gradients(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
        (0..self.objectives.len()).map(|i| self.gradient(i, x)).collect()
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

fn eval_scalar(e: &Expr, x: &[f64]) -> Result<f64, EvalError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var(i) => x[*i],
        Expr::Add(a, b) => eval_scalar(a, x)? + eval_scalar(b, x)?,
        Expr::Sub(a, b) => eval_scalar(a, x)? - eval_scalar(b, x)?,
        Expr::Mul(a, b) => eval_scalar(a, x)? * eval_scalar(b, x)?,
        Expr::Div(a, b) => {
            let d = eval_scalar(b, x)?;
            if d == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            eval_scalar(a, x)? / d
        }
        Expr::Neg(a) => -eval_scalar(a, x)?,
        Expr::Pow(a, p) => {
            let base = eval_scalar(a, x)?;
            if *p < 0 && base == 0.0 {
                return Err(EvalError::ZeroToNegativePower);
            }
            powi(base, *p)
        }
        Expr::Sin(a) => eval_scalar(a, x)?.sin(),
        Expr::Cos(a) => eval_scalar(a, x)?.cos(),
        Expr::Exp(a) => eval_scalar(a, x)?.exp(),
    })
}

fn eval_dual(e: &Expr, x: &[Dual2]) -> Result<Dual2, EvalError> {
    Ok(match e {
        Expr::Const(c) => Dual2::constant(*c),
        Expr::Var(i) => x[*i],
        Expr::Add(a, b) => eval_dual(a, x)? + eval_dual(b, x)?,
        Expr::Sub(a, b) => eval_dual(a, x)? - eval_dual(b, x)?,
        Expr::Mul(a, b) => eval_dual(a, x)? * eval_dual(b, x)?,
        Expr::Div(a, b) => {
            let d = eval_dual(b, x)?;
            if d.v == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            eval_dual(a, x)? / d
        }
        Expr::Neg(a) => -eval_dual(a, x)?,
        Expr::Pow(a, p) => {
            let base = eval_dual(a, x)?;
            if *p < 0 && base.v == 0.0 {
                return Err(EvalError::ZeroToNegativePower);
            }
            powi_dual(base, *p)
        }
        Expr::Sin(a) => eval_dual(a, x)?.sin(),
        Expr::Cos(a) => eval_dual(a, x)?.cos(),
        Expr::Exp(a) => eval_dual(a, x)?.exp(),
    })
}

// Repeated squaring; the f64 and dual versions share the exponent walk so the
// primal value of the dual path matches plain evaluation bit for bit.
fn powi(base: f64, p: i32) -> f64 {
    if p < 0 {
        return 1.0 / powi(base, -p);
    }
    let mut acc = 1.0;
    let mut b = base;
    let mut e = p as u32;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

fn powi_dual(base: Dual2, p: i32) -> Dual2 {
    if p < 0 {
        return powi_dual(base, -p).recip();
    }
    let mut acc = Dual2::constant(1.0);
    let mut b = base;
    let mut e = p as u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        e >>= 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse failure with a 1-based source position.
#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, col: usize, name: String },
    #[error("{line}:{col}: variable x{var} out of range (problem has {n} variable(s))")]
    VariableOutOfRange { line: usize, col: usize, var: usize, n: usize },
    #[error("{line}:{col}: non-integer exponent")]
    NonIntegerExponent { line: usize, col: usize },
    #[error("file declares no objectives")]
    NoObjectives,
    #[error("cannot determine dimension: no `vars:` line and no variables used")]
    UnknownDimension,
}

/// Parse a problem file. Objectives keep file order; comments (`# ...`),
/// blank lines, and whitespace are ignored. Without a `vars:` line the
/// dimension is inferred from the largest variable index used.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut declared_n: Option<usize> = None;
    let mut objectives: Vec<(Expr, usize)> = Vec::new(); // (expr, line)

    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.trim_start().strip_prefix("vars:") {
            if declared_n.is_some() {
                return Err(ParseError::Syntax {
                    line: line_no,
                    col: 1,
                    msg: "duplicate `vars:` line".into(),
                });
            }
            let names: Vec<&str> = rest.split_whitespace().collect();
            if names.is_empty() {
                return Err(ParseError::Syntax {
                    line: line_no,
                    col: 1,
                    msg: "`vars:` declares no variables".into(),
                });
            }
            for (j, name) in names.iter().enumerate() {
                let want = format!("x{}", j + 1);
                if *name != want {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        col: 1,
                        msg: format!("expected variable `{want}`, found `{name}` (vars must be x1..xn in order)"),
                    });
                }
            }
            declared_n = Some(names.len());
        } else if let Some(rest) = line.trim_start().strip_prefix("objective:") {
            let offset = raw_line.find("objective:").unwrap_or(0) + "objective:".len();
            let mut p = ExprParser::new(rest, line_no, offset);
            let e = p.parse_expr()?;
            p.expect_end()?;
            objectives.push((e, line_no));
        } else {
            let col = raw_line.len() - raw_line.trim_start().len() + 1;
            return Err(ParseError::Syntax {
                line: line_no,
                col,
                msg: "expected `vars:`, `objective:`, comment, or blank line".into(),
            });
        }
    }

    if objectives.is_empty() {
        return Err(ParseError::NoObjectives);
    }
    let used_n = objectives
        .iter()
        .filter_map(|(e, _)| e.max_var())
        .max()
        .map(|v| v + 1);
    let n = match declared_n {
        Some(n) => {
            for (e, line) in &objectives {
                if let Some(v) = e.max_var() {
                    if v >= n {
                        return Err(ParseError::VariableOutOfRange {
                            line: *line,
                            col: 1,
                            var: v + 1,
                            n,
                        });
                    }
                }
            }
            n
        }
        None => used_n.ok_or(ParseError::UnknownDimension)?,
    };
    let objectives = objectives.into_iter().map(|(e, _)| e).collect();
    Ok(Problem { n, objectives, name: None })
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col_offset: usize,
    _src: &'a str,
}

impl<'a> ExprParser<'a> {
    fn new(src: &'a str, line: usize, col_offset: usize) -> Self {
        ExprParser { chars: src.chars().collect(), pos: 0, line, col_offset, _src: src }
    }

    fn col(&self) -> usize {
        self.col_offset + self.pos + 1
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { line: self.line, col: self.col(), msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.syntax(format!("unexpected `{c}` after expression")),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.parse_term()?;
        loop {
            if self.eat('+') {
                let rhs = self.parse_term()?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat('-') {
                let rhs = self.parse_term()?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.parse_factor()?;
        loop {
            if self.eat('*') {
                let rhs = self.parse_factor()?;
                acc = Expr::Mul(Box::new(acc), Box::new(rhs));
            } else if self.eat('/') {
                let rhs = self.parse_factor()?;
                acc = Expr::Div(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_base()?;
        if self.eat('^') {
            let p = self.parse_exponent()?;
            Ok(Expr::Pow(Box::new(base), p))
        } else {
            Ok(base)
        }
    }

    fn parse_exponent(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start_col = self.col();
        let neg = self.eat('-');
        self.skip_ws();
        let mut digits = String::new();
        while let Some(c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                digits.push(*c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return self.syntax("expected integer exponent after `^`");
        }
        // A fractional or scientific continuation makes the exponent non-integer.
        if matches!(self.chars.get(self.pos), Some('.') | Some('e') | Some('E')) {
            return Err(ParseError::NonIntegerExponent { line: self.line, col: start_col });
        }
        let v: i64 = digits
            .parse()
            .map_err(|_| ParseError::Syntax {
                line: self.line,
                col: start_col,
                msg: "exponent out of range".into(),
            })?;
        if v > i32::MAX as i64 {
            return Err(ParseError::Syntax {
                line: self.line,
                col: start_col,
                msg: "exponent out of range".into(),
            });
        }
        Ok(if neg { -(v as i32) } else { v as i32 })
    }

    fn parse_base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => self.syntax("unexpected end of expression"),
            Some('-') => {
                self.bump();
                let inner = self.parse_base()?;
                Ok(Expr::Neg(Box::new(inner)))
            }
            Some('(') => {
                self.bump();
                let inner = self.parse_expr()?;
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.parse_number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.parse_ident(),
            Some(c) => self.syntax(format!("unexpected `{c}`")),
        }
    }

    fn parse_number(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let start_col = self.col();
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if matches!(self.chars.get(self.pos), Some('.')) {
            self.pos += 1;
            while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.chars.get(self.pos), Some('e') | Some('E')) {
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                self.pos += 1;
            }
            while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| ParseError::Syntax {
                line: self.line,
                col: start_col,
                msg: format!("invalid number `{text}`"),
            })
    }

    fn parse_ident(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let start_col = self.col();
        while matches!(self.chars.get(self.pos), Some(c) if c.is_alphanumeric() || *c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "sin" | "cos" | "exp" => {
                if !self.eat('(') {
                    return self.syntax(format!("expected `(` after `{name}`"));
                }
                let arg = Box::new(self.parse_expr()?);
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                Ok(match name.as_str() {
                    "sin" => Expr::Sin(arg),
                    "cos" => Expr::Cos(arg),
                    _ => Expr::Exp(arg),
                })
            }
            _ => {
                if let Some(rest) = name.strip_prefix('x') {
                    if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                        let idx: usize = rest.parse().map_err(|_| ParseError::Syntax {
                            line: self.line,
                            col: start_col,
                            msg: format!("invalid variable `{name}`"),
                        })?;
                        if idx == 0 {
                            return Err(ParseError::Syntax {
                                line: self.line,
                                col: start_col,
                                msg: "variable indices start at x1".into(),
                            });
                        }
                        return Ok(Expr::Var(idx - 1));
                    }
                }
                Err(ParseError::UnknownIdentifier {
                    line: self.line,
                    col: start_col,
                    name,
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Render a problem back to file syntax. `parse(render(parse(t)))` is
/// structurally equal to `parse(t)`.
pub fn render_problem(p: &Problem) -> String {
    let mut out = String::new();
    if let Some(name) = &p.name {
        out.push_str(&format!("# {name}\n"));
    }
    out.push_str("vars:");
    for j in 0..p.n {
        out.push_str(&format!(" x{}", j + 1));
    }
    out.push('\n');
    for obj in &p.objectives {
        out.push_str(&format!("objective: {obj}\n"));
    }
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f, 0)
    }
}

// Precedence levels: sum 1, product 2, unary minus 3, power base 4.
fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
    let prec = match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        _ => 5,
    };
    let parens = prec < min_prec;
    if parens {
        write!(f, "(")?;
    }
    match e {
        Expr::Const(c) => write!(f, "{c}")?,
        Expr::Var(i) => write!(f, "x{}", i + 1)?,
        Expr::Add(a, b) => {
            write_expr(a, f, 1)?;
            write!(f, " + ")?;
            write_expr(b, f, 2)?;
        }
        Expr::Sub(a, b) => {
            write_expr(a, f, 1)?;
            write!(f, " - ")?;
            write_expr(b, f, 2)?;
        }
        Expr::Mul(a, b) => {
            write_expr(a, f, 2)?;
            write!(f, "*")?;
            write_expr(b, f, 3)?;
        }
        Expr::Div(a, b) => {
            write_expr(a, f, 2)?;
            write!(f, "/")?;
            write_expr(b, f, 4)?;
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_expr(a, f, 3)?;
        }
        Expr::Pow(a, p) => {
            // Composite bases are always parenthesized so that the exponent
            // binds to exactly this subtree on re-parse.
            match **a {
                Expr::Const(c) if c >= 0.0 => write!(f, "{c}")?,
                Expr::Var(i) => write!(f, "x{}", i + 1)?,
                _ => {
                    write!(f, "(")?;
                    write_expr(a, f, 0)?;
                    write!(f, ")")?;
                }
            }
            write!(f, "^{p}")?;
        }
        Expr::Sin(a) => {
            write!(f, "sin(")?;
            write_expr(a, f, 0)?;
            write!(f, ")")?;
        }
        Expr::Cos(a) => {
            write!(f, "cos(")?;
            write_expr(a, f, 0)?;
            write!(f, ")")?;
        }
        Expr::Exp(a) => {
            write!(f, "exp(")?;
            write_expr(a, f, 0)?;
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}
