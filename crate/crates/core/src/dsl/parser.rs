//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! exponent := '-' exponent | power          (right-associative, constant only)
//! primary  := number | param | func '(' expr ')' | '(' expr ')'
//! func     := sin | cos | sinh | cosh | tanh | exp | log | sqrt | abs
//! ```
//!
//! `^` binds tighter than unary minus, so `-s^2` is `-(s^2)`.

use super::ast::{BinOp, Func, Node};
use super::lexer::{Spanned, Token};
use crate::error::ParseError;

pub fn parse(tokens: &[Spanned], param: &str) -> Result<Node, ParseError> {
    if Func::from_name(param).is_some() || param.is_empty() {
        return Err(ParseError {
            index: 0,
            expected: "a parameter name that is not a function name".into(),
            found: format!("`{param}`"),
        });
    }
    let mut p = Parser { tokens, pos: 0, param };
    let node = p.expr()?;
    if p.pos < tokens.len() {
        return Err(p.error("operator or end of input"));
    }
    Ok(node)
}

struct Parser<'a> {
    tokens: &'a [Spanned],
    pos: usize,
    param: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.token)
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            index: self.pos,
            expected: expected.to_string(),
            found: self.peek().map_or_else(|| "end of input".to_string(), |t| t.to_string()),
        }
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat(&Token::Minus) {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if !self.eat(&Token::Caret) {
            return Ok(base);
        }
        let caret = self.pos - 1;
        let exponent = self.exponent()?;
        if exponent.contains_var() {
            return Err(ParseError {
                index: caret + 1,
                expected: "a constant exponent".into(),
                found: format!("an exponent depending on `{}`", self.param),
            });
        }
        Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)))
    }

    fn exponent(&mut self) -> Result<Node, ParseError> {
        if self.eat(&Token::Minus) {
            return Ok(Node::Neg(Box::new(self.exponent()?)));
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        match self.peek().cloned() {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(Node::Const(v))
            }
            Some(Token::Ident(name)) => {
                if name == self.param {
                    self.pos += 1;
                    return Ok(Node::Var);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(self.error(&format!("parameter `{}` or a function name", self.param)));
                };
                self.pos += 1;
                if !self.eat(&Token::LParen) {
                    return Err(self.error(&format!("`(` after `{name}`")));
                }
                if self.peek() == Some(&Token::RParen) {
                    return Err(self.error(&format!("an argument for `{name}`")));
                }
                let arg = self.expr()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("`)`"));
                }
                Ok(Node::Call(func, Box::new(arg)))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("`)`"));
                }
                Ok(inner)
            }
            _ => Err(self.error("a number, parameter, function call or `(`")),
        }
    }
}
