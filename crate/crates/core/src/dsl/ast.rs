use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::jet::{Jet, Jet3};
use super::lexer::tokenize;
use super::parser::parse;
use crate::error::{DomainError, DslError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 9] =
        [Func::Sin, Func::Cos, Func::Sinh, Func::Cosh, Func::Tanh, Func::Exp, Func::Log, Func::Sqrt, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree over a single free variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn contains_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Call(_, a) => a.contains_var(),
            Node::Binary(_, a, b) => a.contains_var() || b.contains_var(),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, param: &str) -> fmt::Result {
        match self {
            Node::Const(v) => write!(f, "{v:?}"),
            Node::Var => f.write_str(param),
            Node::Neg(a) => {
                f.write_str("(-")?;
                a.write(f, param)?;
                f.write_str(")")
            }
            Node::Binary(op, a, b) => {
                f.write_str("(")?;
                a.write(f, param)?;
                write!(f, " {} ", op.symbol())?;
                b.write(f, param)?;
                f.write_str(")")
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, param)?;
                f.write_str(")")
            }
        }
    }

    fn eval<const N: usize>(&self, x: &Jet<N>, param: &str) -> Result<Jet<N>, DomainError> {
        let domain = |node: &Node, reason: &str| DomainError {
            node: Rendered { node, param }.to_string(),
            at: x.value(),
            reason: reason.to_string(),
        };
        let out = match self {
            Node::Const(v) => Jet::constant(*v),
            Node::Var => *x,
            Node::Neg(a) => -a.eval(x, param)?,
            Node::Binary(op, a, b) => {
                let lhs = a.eval(x, param)?;
                match op {
                    BinOp::Add => lhs + b.eval(x, param)?,
                    BinOp::Sub => lhs - b.eval(x, param)?,
                    BinOp::Mul => lhs * b.eval(x, param)?,
                    BinOp::Div => {
                        let rhs = b.eval(x, param)?;
                        lhs.checked_div(&rhs).ok_or_else(|| domain(self, "division by zero"))?
                    }
                    BinOp::Pow => {
                        // exponents are constant by construction
                        let p = b.eval(&Jet::<1>::constant(x.value()), param)?.value();
                        lhs.checked_powf(p)
                            .ok_or_else(|| domain(self, "power of a non-positive base with this exponent"))?
                    }
                }
            }
            Node::Call(func, a) => {
                let arg = a.eval(x, param)?;
                match func {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Sinh => arg.sinh(),
                    Func::Cosh => arg.cosh(),
                    Func::Tanh => arg.tanh(),
                    Func::Exp => arg.exp(),
                    Func::Log => arg.checked_ln().ok_or_else(|| domain(self, "logarithm of a non-positive value"))?,
                    Func::Sqrt => arg
                        .checked_sqrt()
                        .ok_or_else(|| domain(self, "square root of a non-positive value"))?,
                    Func::Abs => arg.checked_abs().ok_or_else(|| domain(self, "abs is not differentiable at 0"))?,
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(domain(self, "non-finite result"))
        }
    }
}

struct Rendered<'a> {
    node: &'a Node,
    param: &'a str,
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node.write(f, self.param)
    }
}

/// A parsed expression together with the name of its free variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    param: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str, param: &str) -> Result<Expr, DslError> {
        let tokens = tokenize(source)?;
        let root = parse(&tokens, param)?;
        Ok(Expr { param: param.to_string(), root })
    }

    /// Builds an expression from an already-validated tree.
    pub fn from_node(root: Node, param: &str) -> Expr {
        Expr { param: param.to_string(), root }
    }

    pub fn constant(v: f64, param: &str) -> Expr {
        Expr::from_node(Node::Const(v), param)
    }

    pub fn param(&self) -> &str {
        &self.param
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn is_constant(&self) -> bool {
        !self.root.contains_var()
    }

    /// Taylor jet with `N` coefficients at `s`.
    pub fn eval_jet<const N: usize>(&self, s: f64) -> Result<Jet<N>, DomainError> {
        self.root.eval(&Jet::variable(s), &self.param)
    }

    pub fn eval_jet3(&self, s: f64) -> Result<Jet3, DomainError> {
        self.eval_jet::<4>(s)
    }

    pub fn eval(&self, s: f64) -> Result<f64, DomainError> {
        Ok(self.eval_jet::<1>(s)?.value())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f, &self.param)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Deserializes from a string with the conventional parameter name `s`.
impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let source = String::deserialize(deserializer)?;
        Expr::parse(&source, "s").map_err(serde::de::Error::custom)
    }
}

/// Convenience for tests and callers that know their input is valid.
pub fn expr(source: &str) -> Expr {
    Expr::parse(source, "s").unwrap_or_else(|e| panic!("invalid expression `{source}`: {e}"))
}
