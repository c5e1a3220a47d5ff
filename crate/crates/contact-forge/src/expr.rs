//! Arithmetic expression language: parser, printer, evaluation.
//!
//! Grammar (see the crate README):
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := unary ("^" factor)?
//! unary  := "-" unary | atom
//! atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! `+ - * /` are left-associative, `^` is right-associative, and unary minus
//! binds tighter than the base of `^` (so `-2^2` parses as `(-2)^2`).
//! Reserved function names: `sin cos tan exp ln sqrt abs`; reserved constant
//! `pi`.  Evaluation is generic over the dual tower so the same tree yields
//! values and exact directional derivatives.

use std::collections::HashMap;
use std::fmt;

use crate::dual::{pow, Real, D1};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Parsed expression tree over named coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Sym(String),
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Apply(Func, Box<Expr>),
}

/// Point binding plus optional seed direction for dual evaluation.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub values: HashMap<String, f64>,
    pub seed: Option<HashMap<String, f64>>,
}

impl Environment {
    pub fn new(values: impl IntoIterator<Item = (impl Into<String>, f64)>) -> Self {
        Environment {
            values: values.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: impl IntoIterator<Item = (impl Into<String>, f64)>) -> Self {
        self.seed = Some(seed.into_iter().map(|(k, v)| (k.into(), v)).collect());
        self
    }
}

/// Value/derivative pair returned by [`evaluate_dual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub derivative: f64,
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Byte offset of the next token.
    fn offset(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < self.src.len() && (self.src[end].is_ascii_digit() || self.src[end] == b'.') {
                    end += 1;
                }
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut exp_end = end + 1;
                    if exp_end < self.src.len() && (self.src[exp_end] == b'+' || self.src[exp_end] == b'-') {
                        exp_end += 1;
                    }
                    if exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                        while exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                            exp_end += 1;
                        }
                        end = exp_end;
                    }
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                let value: f64 = text.parse().map_err(|_| Error::ParseError {
                    offset: start,
                    expected: vec!["number".into()],
                })?;
                self.pos = end;
                Tok::Num(value)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
                self.pos = end;
                Tok::Ident(name)
            }
            other => {
                return Err(Error::ParseError {
                    offset: start,
                    expected: vec![format!("valid token, found `{}`", other as char)],
                })
            }
        };
        Ok((tok, start))
    }

    fn peek(&mut self) -> Result<Tok> {
        let save = self.pos;
        let (tok, _) = self.next()?;
        self.pos = save;
        Ok(tok)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Parse `text` into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr> {
    let mut lx = Lexer::new(text);
    let e = parse_expr(&mut lx)?;
    let offset = lx.offset();
    match lx.peek()? {
        Tok::End => Ok(e),
        _ => Err(Error::ParseError {
            offset,
            expected: vec!["end of input".into(), "operator".into()],
        }),
    }
}

fn parse_expr(lx: &mut Lexer) -> Result<Expr> {
    let mut lhs = parse_term(lx)?;
    loop {
        match lx.peek()? {
            Tok::Plus => {
                lx.next()?;
                let rhs = parse_term(lx)?;
                lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
            }
            Tok::Minus => {
                lx.next()?;
                let rhs = parse_term(lx)?;
                lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
            }
            _ => return Ok(lhs),
        }
    }
}

fn parse_term(lx: &mut Lexer) -> Result<Expr> {
    let mut lhs = parse_factor(lx)?;
    loop {
        match lx.peek()? {
            Tok::Star => {
                lx.next()?;
                let rhs = parse_factor(lx)?;
                lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
            }
            Tok::Slash => {
                lx.next()?;
                let rhs = parse_factor(lx)?;
                lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
            }
            _ => return Ok(lhs),
        }
    }
}

fn parse_factor(lx: &mut Lexer) -> Result<Expr> {
    let base = parse_unary(lx)?;
    if lx.peek()? == Tok::Caret {
        lx.next()?;
        let exp = parse_factor(lx)?; // right-associative
        Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
    } else {
        Ok(base)
    }
}

fn parse_unary(lx: &mut Lexer) -> Result<Expr> {
    if lx.peek()? == Tok::Minus {
        lx.next()?;
        Ok(Expr::Neg(Box::new(parse_unary(lx)?)))
    } else {
        parse_atom(lx)
    }
}

fn parse_atom(lx: &mut Lexer) -> Result<Expr> {
    let offset = lx.offset();
    let (tok, _) = lx.next()?;
    match tok {
        Tok::Num(v) => Ok(Expr::Num(v)),
        Tok::Ident(name) => {
            if lx.peek()? == Tok::LParen {
                lx.next()?;
                let func = match Func::from_name(&name) {
                    Some(f) => f,
                    None => return Err(Error::UnknownFunction(name)),
                };
                let arg = parse_expr(lx)?;
                let close = lx.offset();
                match lx.next()?.0 {
                    Tok::RParen => Ok(Expr::Apply(func, Box::new(arg))),
                    _ => Err(Error::ParseError {
                        offset: close,
                        expected: vec!["`)`".into()],
                    }),
                }
            } else if name == "pi" {
                Ok(Expr::Pi)
            } else if Func::from_name(&name).is_some() {
                Err(Error::ParseError {
                    offset,
                    expected: vec!["`(` after function name".into()],
                })
            } else {
                Ok(Expr::Sym(name))
            }
        }
        Tok::LParen => {
            let e = parse_expr(lx)?;
            let close = lx.offset();
            match lx.next()?.0 {
                Tok::RParen => Ok(e),
                _ => Err(Error::ParseError {
                    offset: close,
                    expected: vec!["`)`".into()],
                }),
            }
        }
        _ => Err(Error::ParseError {
            offset,
            expected: vec!["number".into(), "identifier".into(), "`(`".into(), "`-`".into()],
        }),
    }
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Bin(BinOp::Pow, ..) => 3,
        Expr::Neg(..) => 4,
        _ => 5,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(child) < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                fmt_child(f, e, 4)
            }
            Expr::Bin(op, a, b) => match op {
                BinOp::Add => {
                    fmt_child(f, a, 1)?;
                    write!(f, " + ")?;
                    fmt_child(f, b, 2)
                }
                BinOp::Sub => {
                    fmt_child(f, a, 1)?;
                    write!(f, " - ")?;
                    fmt_child(f, b, 2)
                }
                BinOp::Mul => {
                    fmt_child(f, a, 2)?;
                    write!(f, "*")?;
                    fmt_child(f, b, 3)
                }
                BinOp::Div => {
                    fmt_child(f, a, 2)?;
                    write!(f, "/")?;
                    fmt_child(f, b, 3)
                }
                // `^` is right-associative and its base excludes bare unary minus.
                BinOp::Pow => {
                    fmt_child(f, a, 5)?;
                    write!(f, "^")?;
                    fmt_child(f, b, 3)
                }
            },
            Expr::Apply(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

impl Expr {
    /// Evaluate over any level of the dual tower with a symbol lookup.
    pub fn eval_with<T: Real>(&self, lookup: &dyn Fn(&str) -> Option<T>) -> Result<T> {
        match self {
            Expr::Num(v) => Ok(T::from_f64(*v)),
            Expr::Pi => Ok(T::from_f64(std::f64::consts::PI)),
            Expr::Sym(name) => lookup(name).ok_or_else(|| Error::UnboundSymbol(name.clone())),
            Expr::Neg(e) => Ok(-e.eval_with(lookup)?),
            Expr::Bin(op, a, b) => {
                let x = a.eval_with(lookup)?;
                let y = b.eval_with(lookup)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y.value() == 0.0 {
                            Err(Error::DomainError {
                                context: self.to_string(),
                                message: "division by zero".into(),
                            })
                        } else {
                            Ok(x / y)
                        }
                    }
                    BinOp::Pow => pow(x, y, &self.to_string()),
                }
            }
            Expr::Apply(func, arg) => {
                let x = arg.eval_with(lookup)?;
                match func {
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Tan => Ok(x.tan()),
                    Func::Exp => Ok(x.exp()),
                    Func::Sqrt => {
                        if x.value() < 0.0 {
                            Err(Error::DomainError {
                                context: self.to_string(),
                                message: format!("sqrt of negative value {}", x.value()),
                            })
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                    Func::Ln => {
                        if x.value() <= 0.0 {
                            Err(Error::DomainError {
                                context: self.to_string(),
                                message: format!("ln of non-positive value {}", x.value()),
                            })
                        } else {
                            Ok(x.ln())
                        }
                    }
                    Func::Abs => Ok(x.abs()),
                }
            }
        }
    }

    /// All coordinate symbols appearing in the tree.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Sym(s) => out.push(s.clone()),
            Expr::Neg(e) | Expr::Apply(_, e) => e.collect_symbols(out),
            Expr::Bin(_, a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            _ => {}
        }
    }
}

/// Standard real evaluation.
pub fn evaluate(e: &Expr, env: &Environment) -> Result<f64> {
    e.eval_with(&|name| env.values.get(name).copied())
}

/// Evaluation with the exact directional derivative along `env.seed`.
pub fn evaluate_dual(e: &Expr, env: &Environment) -> Result<DualValue> {
    let seed = env.seed.as_ref().ok_or_else(|| Error::DomainError {
        context: "evaluate_dual".into(),
        message: "environment has no seed direction".into(),
    })?;
    let d = e.eval_with(&|name| {
        env.values.get(name).map(|&v| D1 {
            val: v,
            der: seed.get(name).copied().unwrap_or(0.0),
        })
    })?;
    Ok(DualValue { value: d.val, derivative: d.der })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn env1(name: &str, v: f64) -> Environment {
        Environment::new([(name, v)])
    }

    #[test]
    fn parses_product_tree() {
        let e = parse("r*sin(r)").unwrap();
        assert_eq!(
            e,
            Expr::Bin(
                BinOp::Mul,
                Box::new(Expr::Sym("r".into())),
                Box::new(Expr::Apply(Func::Sin, Box::new(Expr::Sym("r".into()))))
            )
        );
    }

    #[test]
    fn parses_scaling_factor_magnitude() {
        // |g| numerator/denominator structure from the radial scaling factor.
        let e = parse("cos(r)*(r*cos(r)+sin(r))/(r+cos(r)*sin(r))").unwrap();
        let v = evaluate(&e, &env1("r", PI)).unwrap();
        // at r = pi: (-1)*(-pi)/pi = 1
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unbalanced_paren_offset() {
        match parse("sin(") {
            Err(Error::ParseError { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn unknown_function_rejected() {
        assert_eq!(parse("sinc(r)"), Err(Error::UnknownFunction("sinc".into())));
    }

    #[test]
    fn evaluates_r_sin_r() {
        let e = parse("r*sin(r)").unwrap();
        assert!((evaluate(&e, &env1("r", PI / 2.0)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(evaluate(&e, &env1("r", PI)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn evaluates_g_at_pi() {
        let e = parse("-(cos(r)*(r*cos(r)+sin(r))/(r+cos(r)*sin(r)))").unwrap();
        assert!((evaluate(&e, &env1("r", PI)).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn dual_derivative_of_r_sin_r() {
        let e = parse("r*sin(r)").unwrap();
        let env = env1("r", PI).with_seed([("r", 1.0)]);
        let d = evaluate_dual(&e, &env).unwrap();
        // sin(pi) + pi cos(pi) = -pi
        assert!((d.derivative + PI).abs() < 1e-14);
    }

    #[test]
    fn dual_derivative_of_constant_is_zero() {
        let e = parse("3.5").unwrap();
        let env = env1("r", 1.0).with_seed([("r", 1.0)]);
        assert_eq!(evaluate_dual(&e, &env).unwrap().derivative, 0.0);
    }

    #[test]
    fn dual_partial_in_z() {
        let e = parse("cos(r)*z").unwrap();
        let env = Environment::new([("r", 0.4), ("z", 7.0)]).with_seed([("z", 1.0)]);
        let d = evaluate_dual(&e, &env).unwrap();
        assert!((d.derivative - 0.4_f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn unbound_symbol_reported() {
        let e = parse("x+y").unwrap();
        assert_eq!(evaluate(&e, &env1("x", 1.0)), Err(Error::UnboundSymbol("y".into())));
    }

    #[test]
    fn division_by_zero_reported() {
        let e = parse("1/(x-1)").unwrap();
        assert!(matches!(evaluate(&e, &env1("x", 1.0)), Err(Error::DomainError { .. })));
    }

    #[test]
    fn ln_domain_reported() {
        let e = parse("ln(x)").unwrap();
        assert!(matches!(evaluate(&e, &env1("x", -2.0)), Err(Error::DomainError { .. })));
    }

    #[test]
    fn unary_minus_binds_tighter_than_pow_base() {
        let e = parse("-2^2").unwrap();
        let v = evaluate(&e, &Environment::default()).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn print_parse_roundtrip_structural() {
        for src in [
            "r*sin(r)",
            "cos(r)*(r*cos(r)+sin(r))/(r+cos(r)*sin(r))",
            "-2^2",
            "2^-3",
            "a-b-c",
            "a/(b*c)/d",
            "a^b^c",
            "-(a+b)*c",
            "pi*r^2",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(e, reparsed, "round-trip failed for `{src}` -> `{printed}`");
        }
    }
}
