//! Closed-form edge-weight functions of time.
//!
//! A [`TimeFunction`] is either an [`Expr`] built from the shipped vocabulary
//! (constants, `t`, `+ - * / ^`, `sin`, `cos`, `exp`, `pi`, `e`) or an opaque
//! evaluator supplied by the caller. Expressions print in a form that parses
//! back to the same tree, so network files round-trip bit-exactly.
//!
//! Opaque evaluators must be pure, return finite nonnegative values on the
//! network interval and be right-continuous at its left endpoint. Only the
//! first two properties are checked (by sampling); right-continuity cannot be
//! checked mechanically.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Time,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Time => t,
            Expr::Neg(a) => -a.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Pow(a, b) => pow(a.eval(t), b.eval(t)),
            Expr::Sin(a) => a.eval(t).sin(),
            Expr::Cos(a) => a.eval(t).cos(),
            Expr::Exp(a) => a.eval(t).exp(),
        }
    }

    /// True when the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Time => false,
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => a.is_constant(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

// Integer exponents go through powi so that t^2 is exactly t*t.
fn pow(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Operands are parenthesized whenever the parser could otherwise
        // regroup them; the output is verbose but reparses to the same tree.
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "({c:?})")
            }
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Time => write!(f, "t"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 4)
            }
            Expr::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " - ")?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "*")?;
                wrap(f, b, 3)
            }
            Expr::Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "/")?;
                wrap(f, b, 3)
            }
            Expr::Pow(a, b) => {
                wrap(f, a, 5)?;
                write!(f, "^")?;
                wrap(f, b, 4)
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// An evaluatable edge-weight function `t ↦ a_ij(t)`.
#[derive(Clone)]
pub enum TimeFunction {
    Expr(Expr),
    Custom {
        label: String,
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl TimeFunction {
    pub fn constant(c: f64) -> Self {
        TimeFunction::Expr(Expr::Const(c))
    }

    /// `slope·t + intercept`
    pub fn affine(slope: f64, intercept: f64) -> Self {
        TimeFunction::Expr(Expr::Add(
            Box::new(Expr::Mul(Box::new(Expr::Const(slope)), Box::new(Expr::Time))),
            Box::new(Expr::Const(intercept)),
        ))
    }

    /// `t^p`
    pub fn power(p: f64) -> Self {
        TimeFunction::Expr(Expr::Pow(Box::new(Expr::Time), Box::new(Expr::Const(p))))
    }

    /// `sin(freq·t + phase)`
    pub fn sin(freq: f64, phase: f64) -> Self {
        TimeFunction::Expr(Expr::Sin(Box::new(linear(freq, phase))))
    }

    /// `cos(freq·t + phase)`
    pub fn cos(freq: f64, phase: f64) -> Self {
        TimeFunction::Expr(Expr::Cos(Box::new(linear(freq, phase))))
    }

    /// `e^{rate·t} + offset`
    pub fn exp(rate: f64, offset: f64) -> Self {
        TimeFunction::Expr(Expr::Add(
            Box::new(Expr::Exp(Box::new(Expr::Mul(
                Box::new(Expr::Const(rate)),
                Box::new(Expr::Time),
            )))),
            Box::new(Expr::Const(offset)),
        ))
    }

    pub fn custom<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TimeFunction::Custom {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        parse_expr(src).map(TimeFunction::Expr)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Expr(e) => e.eval(t),
            TimeFunction::Custom { eval, .. } => eval(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeFunction::Expr(e) if e.is_constant())
    }

    pub fn scale(self, factor: f64) -> Self {
        self.combine(TimeFunction::constant(factor), Expr::Mul, |a, b| a * b)
    }

    pub fn plus(self, other: TimeFunction) -> Self {
        self.combine(other, Expr::Add, |a, b| a + b)
    }

    pub fn times(self, other: TimeFunction) -> Self {
        self.combine(other, Expr::Mul, |a, b| a * b)
    }

    fn combine(
        self,
        other: TimeFunction,
        node: fn(Box<Expr>, Box<Expr>) -> Expr,
        op: fn(f64, f64) -> f64,
    ) -> Self {
        match (self, other) {
            (TimeFunction::Expr(a), TimeFunction::Expr(b)) => {
                TimeFunction::Expr(node(Box::new(a), Box::new(b)))
            }
            (a, b) => {
                let label = format!("({a} ~ {b})");
                TimeFunction::custom(label, move |t| op(a.eval(t), b.eval(t)))
            }
        }
    }
}

fn linear(freq: f64, phase: f64) -> Expr {
    Expr::Add(
        Box::new(Expr::Mul(Box::new(Expr::Const(freq)), Box::new(Expr::Time))),
        Box::new(Expr::Const(phase)),
    )
}

impl fmt::Display for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeFunction::Expr(e) => write!(f, "{e}"),
            TimeFunction::Custom { label, .. } => write!(f, "<custom:{label}>"),
        }
    }
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeFunction({self})")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<f64>()
                .map_err(|_| Error::parse(0, format!("bad number '{text}' in '{src}'")))?;
            out.push(Token::Num(value));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::parse(0, format!("unexpected '{c}' in '{src}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::parse(0, format!("{msg} in expression '{}'", self.src))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat_op('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op('^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat_op(')') {
                    return Err(self.error("missing ')'"));
                }
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "t" => Ok(Expr::Time),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => Ok(Expr::Const(std::f64::consts::E)),
                    "sin" | "cos" | "exp" => {
                        if !self.eat_op('(') {
                            return Err(self.error(&format!("expected '(' after {name}")));
                        }
                        let arg = Box::new(self.expr()?);
                        if !self.eat_op(')') {
                            return Err(self.error("missing ')'"));
                        }
                        Ok(match name.as_str() {
                            "sin" => Expr::Sin(arg),
                            "cos" => Expr::Cos(arg),
                            _ => Expr::Exp(arg),
                        })
                    }
                    other => Err(self.error(&format!("unknown identifier '{other}'"))),
                }
            }
            Some(Token::Op(c)) => Err(self.error(&format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut parser = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        src,
    };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(expr)
}
