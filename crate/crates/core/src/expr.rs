//! Real-valued expressions in one variable `t`.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | power
//! power   := primary ('^' factor)?
//! primary := number | 't' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := exp | sin | cos | tan | sqrt | ln | abs
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-t^2`
//! is `-(t^2)` and `2^3^2` is `2^9`. There is no implicit multiplication.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Ln,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sqrt,
        Func::Ln,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: Expr) -> Self {
        Expr::Neg(Box::new(inner))
    }

    pub fn call(func: Func, arg: Expr) -> Self {
        Expr::Call(func, Box::new(arg))
    }

    /// True if the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Var => false,
            Expr::Num(_) | Expr::Const(_) => true,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => NEG_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    pub fn eval<S: Scalar>(&self, t: S) -> Result<S> {
        let fail = |reason| Error::Eval {
            node: self.to_string(),
            t: t.as_f64(),
            reason,
        };
        let v = match self {
            Expr::Num(x) => S::lit(*x),
            Expr::Var => t,
            Expr::Const(Constant::Pi) => S::PI(),
            Expr::Const(Constant::E) => S::E(),
            Expr::Neg(e) => -e.eval(t)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval(t)?;
                let y = b.eval(t)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == S::zero() {
                            return Err(fail("division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        if x < S::zero() && y.fract() != S::zero() {
                            return Err(fail("negative base with non-integer exponent"));
                        }
                        x.powf(y)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let x = arg.eval(t)?;
                match func {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Sqrt => {
                        if x < S::zero() {
                            return Err(fail("square root of a negative number"));
                        }
                        x.sqrt()
                    }
                    Func::Ln => {
                        if !(x > S::zero()) {
                            return Err(fail("logarithm of a non-positive number"));
                        }
                        x.ln()
                    }
                    Func::Abs => x.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail("overflow or undefined result"))
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Var => f.write_str("t"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < NEG_PRECEDENCE)
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Binary(BinOp::Pow, a, b) => {
                wrap(f, a, a.precedence() < ATOM_PRECEDENCE)?;
                f.write_str("^")?;
                wrap(f, b, b.precedence() < NEG_PRECEDENCE)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                wrap(f, a, a.precedence() < p)?;
                write!(f, "{}", op.symbol())?;
                wrap(f, b, b.precedence() <= p)
            }
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.syntax_error(&["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax_error(&self, expected: &[&str]) -> Error {
        let found = match self.src[self.pos..].chars().next() {
            None => "end of input".to_string(),
            Some(c) => format!("`{c}`"),
        };
        Error::Syntax {
            offset: self.pos,
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::neg(self.factor()?));
        }
        let base = self.primary()?;
        if self.eat(b'^') {
            return Ok(Expr::binary(BinOp::Pow, base, self.factor()?));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        const EXPECTED: [&str; 4] = ["number", "identifier", "'('", "'-'"];
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax_error(&["operator", "')'"]));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            _ => Err(self.syntax_error(&EXPECTED)),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |p: &mut usize| {
            let s = *p;
            while bytes.get(*p).is_some_and(u8::is_ascii_digit) {
                *p += 1;
            }
            *p - s
        };
        let mut end = start;
        let mut count = digits(&mut end);
        if bytes.get(end) == Some(&b'.') {
            end += 1;
            count += digits(&mut end);
        }
        if count == 0 {
            return Err(self.syntax_error(&["digit"]));
        }
        if matches!(bytes.get(end), Some(b'e' | b'E')) {
            let mut p = end + 1;
            if matches!(bytes.get(p), Some(b'+' | b'-')) {
                p += 1;
            }
            if digits(&mut p) > 0 {
                end = p;
            }
        }
        let text = &self.src[start..end];
        let value: f64 = text.parse().map_err(|_| self.syntax_error(&["number"]))?;
        self.pos = end;
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let mut end = start;
        while bytes
            .get(end)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            end += 1;
        }
        let name = &self.src[start..end];
        self.pos = end;
        match name {
            "t" => return Ok(Expr::Var),
            "pi" => return Ok(Expr::Const(Constant::Pi)),
            "e" => return Ok(Expr::Const(Constant::E)),
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            });
        };
        if !self.eat(b'(') {
            return Err(self.syntax_error(&["'('"]));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.syntax_error(&["operator", "')'"]));
        }
        Ok(Expr::call(func, arg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(x: f64) -> Expr {
        Expr::Num(x)
    }

    #[test]
    fn parses_coefficient_forms() {
        assert_eq!(
            parse("1+t^2").unwrap(),
            Expr::binary(
                BinOp::Add,
                num(1.0),
                Expr::binary(BinOp::Pow, Expr::Var, num(2.0))
            )
        );
        assert_eq!(
            parse("exp(-t)").unwrap(),
            Expr::call(Func::Exp, Expr::neg(Expr::Var))
        );
        assert_eq!(parse(" 2.5e-1 ").unwrap(), num(0.25));
        assert_eq!(parse(".5").unwrap(), num(0.5));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("1+2*3^2").unwrap().eval(0.0).unwrap(), 19.0);
        assert_eq!(parse("2^3^2").unwrap().eval(0.0).unwrap(), 512.0);
        assert_eq!(parse("-t^2").unwrap().eval(3.0).unwrap(), -9.0);
        assert_eq!(parse("10-4-3").unwrap().eval(0.0).unwrap(), 3.0);
        assert_eq!(parse("8/4/2").unwrap().eval(0.0).unwrap(), 1.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0).unwrap(), 0.5);
        assert_eq!(parse("(-2)^2").unwrap().eval(0.0).unwrap(), 4.0);
        assert_eq!(parse("2*-3").unwrap().eval(0.0).unwrap(), -6.0);
    }

    #[test]
    fn evaluates_examples() {
        assert_eq!(parse("1+t^2").unwrap().eval(2.0).unwrap(), 5.0);
        assert_eq!(parse("exp(-t)").unwrap().eval(0.0).unwrap(), 1.0);
        let v: f64 = parse("sin(pi/2) + ln(e) + abs(-2) + sqrt(9)")
            .unwrap()
            .eval(0.0)
            .unwrap();
        assert!((v - 7.0).abs() < 1e-15);
        let v: f64 = parse("cos(0)*tan(0)").unwrap().eval(0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn unclosed_parenthesis_offset() {
        match parse("2*t-3/(t+1") {
            Err(Error::Syntax {
                offset,
                found,
                expected,
            }) => {
                assert_eq!(offset, 10);
                assert_eq!(found, "end of input");
                assert!(expected.contains(&"')'".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse("2t"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(
            parse("1 + "),
            Err(Error::Syntax { offset: 4, .. })
        ));
        assert!(matches!(
            parse("exp t"),
            Err(Error::Syntax { offset: 4, .. })
        ));
        assert!(matches!(
            parse("1 ** 2"),
            Err(Error::Syntax { offset: 3, .. })
        ));
        // Only the ASCII hyphen-minus is a minus sign.
        assert!(matches!(
            parse("\u{2212}t"),
            Err(Error::Syntax { offset: 0, .. })
        ));
    }

    #[test]
    fn unknown_identifier_is_named() {
        match parse("1 + foo(t)") {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("x"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn evaluation_errors() {
        let cases = ["1/t", "sqrt(t-1)", "ln(t)", "(t-1)^0.5", "exp(1000*t+1000)"];
        for src in cases {
            let e = parse(src).unwrap();
            match e.eval(0.0f64) {
                Err(Error::Eval { t, .. }) => assert_eq!(t, 0.0),
                other => panic!("{src}: unexpected {other:?}"),
            }
        }
        match parse("1 + 1/t").unwrap().eval(0.0f64) {
            Err(Error::Eval { node, .. }) => assert_eq!(node, "1/t"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_detection() {
        assert!(parse("1").unwrap().is_constant());
        assert!(parse("2*pi - e").unwrap().is_constant());
        assert!(!parse("1 + 0*t").unwrap().is_constant());
    }

    #[test]
    fn display_reparses() {
        for src in [
            "-t^2", "(-t)^2", "2^3^2", "(2^3)^2", "1-(2-3)", "1/(2/t)", "--t", "-(1+t)", "2^-(t)",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
