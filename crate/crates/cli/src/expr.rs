// SPDX-License-Identifier: Apache-2.0

//! A small arithmetic language for 1-D coefficient fields.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func    := exp | sin | cos | sqrt
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2 = -(x^2)`.

use std::sync::Arc;

use exitq::model::ScalarField;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { position: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Number(v) => *v,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let exponent = b.eval(x);
                if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
                    a.eval(x).powi(exponent as i32)
                } else {
                    a.eval(x).powf(exponent)
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(x);
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let simple = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(token) = simple {
            tokens.push((start, token));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal = &text[start..i];
            let value = literal.parse::<f64>().map_err(|_| ExprError::Syntax {
                position: start,
                message: format!("malformed number `{literal}`"),
            })?;
            tokens.push((start, Token::Number(value)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((start, Token::Ident(text[start..i].to_string())));
        } else {
            return Err(ExprError::Syntax {
                position: start,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            position: self.position(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let position = self.position();
        let token = self.peek().cloned();
        match token {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(Expr::Number(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "x" => return Ok(Expr::Var),
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(ExprError::UnknownIdentifier { position, name }),
                };
                if self.peek() != Some(&Token::LParen) {
                    return Err(self.error(format!("expected `(` after `{name}`")));
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(other) => Err(self.error(format!("unexpected token {other:?}"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.peek() == Some(&Token::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("expected `)`"))
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(expr)
}

/// Parses `text` into a field of the single variable `x`.
pub fn parse_expression(text: &str) -> Result<ScalarField, ExprError> {
    let expr = parse(text)?;
    Ok(Arc::new(move |x: &[f64]| expr.eval(x[0])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(text: &str, x: f64) -> f64 {
        parse_expression(text).unwrap()(&[x])
    }

    #[test]
    fn examples() {
        assert_eq!(eval("0.5*x^2", 2.0), 2.0);
        assert_eq!(eval("0", 123.0), 0.0);
        assert_eq!(eval("exp(x)-1", 0.0), 0.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("-x^2", 3.0), -9.0);
        assert_eq!(eval("(1 - x) / 4 - 1", 5.0), -2.0);
        assert_eq!(eval("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(eval("sqrt(x) * cos(0) + sin(0)", 16.0), 4.0);
        assert_eq!(eval("1.5e-1 + 2E1", 0.0), 20.15);
        assert_eq!(eval("x^-1", 4.0), 0.25);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse("1 + * 2").unwrap_err(),
            ExprError::Syntax {
                position: 4,
                message: "unexpected token Star".into()
            }
        );
        assert!(matches!(
            parse("(x + 1"),
            Err(ExprError::Syntax { position: 6, .. })
        ));
        assert!(matches!(
            parse("x 2"),
            Err(ExprError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse("3 $ 4"),
            Err(ExprError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse(""),
            Err(ExprError::Syntax { position: 0, .. })
        ));
        assert!(matches!(
            parse("sin x"),
            Err(ExprError::Syntax { position: 4, .. })
        ));
    }

    #[test]
    fn unknown_identifiers() {
        assert_eq!(
            parse("2*y").unwrap_err(),
            ExprError::UnknownIdentifier {
                position: 2,
                name: "y".into()
            }
        );
        assert!(matches!(
            parse("tan(x)"),
            Err(ExprError::UnknownIdentifier { .. })
        ));
    }

    proptest! {
        #[test]
        fn polynomials_match_direct_evaluation(
            c in prop::collection::vec(-10.0f64..10.0, 1..5),
            x in -3.0f64..3.0,
        ) {
            let text: Vec<String> = c
                .iter()
                .enumerate()
                .map(|(k, ck)| format!("({ck:?})*x^{k}"))
                .collect();
            let got = eval(&text.join(" + "), x);
            let expected: f64 = c.iter().enumerate().map(|(k, ck)| ck * x.powi(k as i32)).sum();
            prop_assert!((got - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
        }
    }
}
