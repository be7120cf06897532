//! Recursive-descent parser for integrand expressions over `x`, `y`, `z`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | primary
//! primary := number | var | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `abs sqrt pow sin cos exp log step`, with `step(t) = 1` for
//! `t ≥ 0` and `0` otherwise.

use crate::error::{Error, Result};
use crate::estimators::Integrand;
use crate::sphere::SpherePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Abs,
    Sqrt,
    Pow,
    Sin,
    Cos,
    Exp,
    Log,
    Step,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "pow" => Func::Pow,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "step" => Func::Step,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Node);

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src, pos: 0 };
        let node = p.expr()?;
        p.skip_ws();
        if p.pos < src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr(node))
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        eval(&self.0, &[x, y, z])
    }
}

fn eval(node: &Node, vars: &[f64; 3]) -> Result<f64> {
    Ok(match node {
        Node::Num(v) => *v,
        Node::Var(i) => vars[*i],
        Node::Neg(inner) => -eval(inner, vars)?,
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, vars)?, eval(b, vars)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            }
        }
        Node::Call(f, args) => {
            let a = eval(&args[0], vars)?;
            match f {
                Func::Abs => a.abs(),
                Func::Sqrt if a < 0.0 => {
                    return Err(Error::Evaluation(format!("sqrt of negative value {a}")))
                }
                Func::Sqrt => a.sqrt(),
                Func::Pow => a.powf(eval(&args[1], vars)?),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Log if a <= 0.0 => {
                    return Err(Error::Evaluation(format!("log of non-positive value {a}")))
                }
                Func::Log => a.ln(),
                Func::Step => {
                    if a >= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        }
    })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |p: &mut usize| {
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut end = start;
        digits(&mut end);
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            digits(&mut end);
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut exp = end + 1;
            if exp < bytes.len() && (bytes[exp] == b'+' || bytes[exp] == b'-') {
                exp += 1;
            }
            let before = exp;
            digits(&mut exp);
            if exp > before {
                end = exp;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(Node::Num(v))
            }
            Err(_) => Err(self.error("malformed number")),
        }
    }

    fn identifier(&mut self) -> Result<Node> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
            end += 1;
        }
        let name = &self.src[start..end];
        match name {
            "x" => {
                self.pos = end;
                return Ok(Node::Var(0));
            }
            "y" => {
                self.pos = end;
                return Ok(Node::Var(1));
            }
            "z" => {
                self.pos = end;
                return Ok(Node::Var(2));
            }
            _ => {}
        }
        let Some(func) = Func::lookup(name) else {
            return Err(self.error(&format!("unknown identifier `{name}`")));
        };
        self.pos = end;
        if !self.eat(b'(') {
            return Err(self.error(&format!("expected `(` after `{name}`")));
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        if args.len() != func.arity() {
            return Err(Error::Syntax {
                offset: start,
                message: format!(
                    "`{name}` takes {} argument(s), got {}",
                    func.arity(),
                    args.len()
                ),
            });
        }
        Ok(Node::Call(func, args))
    }
}

/// Parses `src` into an integrand named `name`.
pub fn parse_integrand(src: &str) -> Result<Integrand> {
    let expr = Expr::parse(src)?;
    Ok(Integrand::fallible(
        format!("expr:{src}"),
        move |p: &SpherePoint| expr.eval(p.x, p.y, p.z),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::f2;
    use proptest::prelude::*;

    fn value(src: &str) -> f64 {
        Expr::parse(src).unwrap().eval(0.0, 0.0, 0.0).unwrap()
    }

    fn offset(src: &str) -> usize {
        match Expr::parse(src) {
            Err(Error::Syntax { offset, .. }) => offset,
            other => panic!("{src}: expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(value("1+2*3"), 7.0);
        assert_eq!(value("(1+2)*3"), 9.0);
        assert_eq!(value("8/4/2"), 1.0);
        assert_eq!(value("1-2-3"), -4.0);
        assert_eq!(value("-2*-3"), 6.0);
        assert_eq!(value("--1"), 1.0);
        assert_eq!(value(" 2.5e1 + .5 "), 25.5);
        assert_eq!(value("pow(2, 10)"), 1024.0);
        assert_eq!(value("step(0)+step(-1e-300)"), 1.0);
    }

    #[test]
    fn f1_expression() {
        let e = Expr::parse("z*z*step(z)").unwrap();
        assert_eq!(e.eval(0.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(e.eval(0.0, 0.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(offset("1+"), 2);
        assert_eq!(offset(""), 0);
        assert_eq!(offset("(x"), 2);
        assert_eq!(offset("x y"), 2);
        assert_eq!(offset("w+1"), 0);
        assert_eq!(offset("2*foo(x)"), 2);
        assert_eq!(offset("pow(x)"), 0);
        assert_eq!(offset("sin x"), 4);
        assert_eq!(offset("x # 2"), 2);
    }

    #[test]
    fn domain_errors_at_evaluation() {
        let e = Expr::parse("log(z)").unwrap();
        assert!(e.eval(0.0, 0.0, 0.5).is_ok());
        assert!(matches!(e.eval(0.0, 0.0, -0.5), Err(Error::Evaluation(_))));
        let s = Expr::parse("sqrt(x)").unwrap();
        assert!(s.eval(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn integrand_wrapper() {
        let f = parse_integrand("x+y+z").unwrap();
        assert_eq!(f.name(), "expr:x+y+z");
        let p = SpherePoint::new(1.0, 1.0, 1.0);
        assert!((f.eval(&p).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let g = parse_integrand("1/(z-z)").unwrap();
        assert!(g.eval(&p).is_err());
    }

    proptest! {
        #[test]
        fn f2_expression_matches_builtin(theta in 0.0..std::f64::consts::PI, phi in 0.0..6.3f64) {
            let p = SpherePoint::from_spherical(theta, phi);
            let e = Expr::parse("pow(abs(x),1.5)*y*z*step(z)").unwrap();
            let got = e.eval(p.x, p.y, p.z).unwrap();
            prop_assert!((got - f2(&p)).abs() <= 1e-15);
        }

        #[test]
        fn polynomial_expressions_match_direct_arithmetic(a in -10.0..10.0f64, b in -10.0..10.0f64,
                                                          x in -1.0..1.0f64, y in -1.0..1.0f64) {
            let src = format!("{a:e}*x*x - ({b:e})*y + x*y/2");
            let got = Expr::parse(&src).unwrap().eval(x, y, 0.0).unwrap();
            let want = a * x * x - b * y + x * y / 2.0;
            prop_assert_eq!(got, want);
        }
    }
}
