//! Closed-form custom moment functions, e.g. `gamma(1+1/z)` or
//! `qgamma(2, 1+z)`.

use std::fmt;

use crate::special::{ln_gamma, ln_q_gamma};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Gamma,
    LnGamma,
    QGamma,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "gamma" => Func::Gamma,
            "lngamma" => Func::LnGamma,
            "qgamma" => Func::QGamma,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::QGamma => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression in the single variable `z`.
#[derive(Debug, Clone)]
pub struct Expression {
    source: String,
    root: Node,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser {
            chars: source.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let root = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!(
                "unexpected '{}' in expression '{source}'",
                p.chars[p.pos]
            )));
        }
        Ok(Self {
            source: source.trim().to_string(),
            root,
        })
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let v = eval(&self.root, z)?;
        if crate::is_finite(v) {
            Ok(v)
        } else {
            Err(Error::Domain(format!("'{}' is not finite at {z}", self.source)))
        }
    }
}

fn eval(node: &Node, z: C64) -> Result<C64> {
    Ok(match node {
        Node::Num(x) => C64::new(*x, 0.0),
        Node::Var => z,
        Node::Neg(a) => -eval(a, z)?,
        Node::Add(a, b) => eval(a, z)? + eval(b, z)?,
        Node::Sub(a, b) => eval(a, z)? - eval(b, z)?,
        Node::Mul(a, b) => eval(a, z)? * eval(b, z)?,
        Node::Div(a, b) => {
            let d = eval(b, z)?;
            if d.norm() == 0.0 {
                return Err(Error::DivisionByZero(format!("at z = {z}")));
            }
            eval(a, z)? / d
        }
        Node::Pow(a, b) => {
            let base = eval(a, z)?;
            let e = eval(b, z)?;
            if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0 {
                base.powi(e.re as i32)
            } else {
                base.powc(e)
            }
        }
        Node::Call(f, args) => {
            let x = eval(&args[0], z)?;
            match f {
                Func::Gamma => ln_gamma(x)?.exp(),
                Func::LnGamma => ln_gamma(x)?,
                Func::QGamma => {
                    let y = eval(&args[1], z)?;
                    if x.im != 0.0 {
                        return Err(Error::Domain("qgamma base must be real".into()));
                    }
                    ln_q_gamma(x.re, y)?.exp()
                }
                Func::Exp => x.exp(),
                Func::Ln => x.ln(),
                Func::Sqrt => x.sqrt(),
            }
        }
    })
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
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
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            // right associative
            let e = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match name.as_str() {
                    "z" => return Ok(Node::Var),
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    _ => {}
                }
                let f = Func::from_name(&name)
                    .ok_or_else(|| Error::Parse(format!("unknown identifier '{name}'")))?;
                if !self.eat('(') {
                    return Err(Error::Parse(format!("expected '(' after {name}")));
                }
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if !self.eat(')') {
                    return Err(Error::Parse(format!("missing ')' after {name} arguments")));
                }
                if args.len() != f.arity() {
                    return Err(Error::Parse(format!(
                        "{name} takes {} argument(s), got {}",
                        f.arity(),
                        args.len()
                    )));
                }
                Ok(Node::Call(f, args))
            }
            Some(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| Error::Parse(format!("bad number '{text}'")))
    }
}
