//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' integer)?
//! base   := number | ident | '(' expr ')' | func '(' expr ')'
//! ```
//!
//! Exponents may be negative (`x^-1`, `x^(-2)`). Decimal literals are read
//! exactly (`0.25` is `1/4`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::ast::Node;
use super::coord::VarNames;
use super::expr::Expr;
use super::poly::Func;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier {name:?} at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("variable index {index} out of range (m = {m}) at position {pos}")]
    IndexOutOfRange { index: usize, m: usize, pos: usize },
    #[error("division by zero")]
    DivisionByZero,
}

/// Parse and normalize.
pub fn parse(source: &str, names: &VarNames) -> Result<Expr, ParseError> {
    parse_ast(source, names)?.to_expr()
}

/// Parse with the default names `u1..um`.
pub fn parse_indexed(source: &str, m: usize) -> Result<Expr, ParseError> {
    parse(source, &VarNames::indexed(m))
}

/// Parse into an unnormalized tree.
pub fn parse_ast(source: &str, names: &VarNames) -> Result<Node, ParseError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        names,
    };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(node)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a VarNames,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        if self.eat(b'+') {
            return self.factor();
        }
        let base = self.base()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            return Ok(Node::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: i32 = text.parse().map_err(|_| ParseError::Syntax {
            pos: start,
            msg: "exponent too large".into(),
        })?;
        if paren && !self.eat(b')') {
            return Err(self.err("expected ')'"));
        }
        Ok(if neg { -v } else { v })
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let mut int = String::new();
        let mut frac = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int.is_empty() && frac.is_empty() {
            return Err(ParseError::Syntax {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        let digits: BigInt = format!("{int}{frac}").parse().unwrap_or_else(|_| BigInt::zero());
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Node::Num(BigRational::new(digits, scale)))
    }

    fn ident(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(f) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(self.err("expected '(' after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(Node::Func(f, Box::new(arg)));
        }
        match self.names.lookup(name) {
            Ok(c) => Ok(Node::Coord(c)),
            Err(Some(index)) => Err(ParseError::IndexOutOfRange {
                index,
                m: self.names.m(),
                pos: start,
            }),
            Err(None) => Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                pos: start,
            }),
        }
    }
}

impl Node {
    /// Normalize the tree into a canonical expression.
    pub fn to_expr(&self) -> Result<Expr, ParseError> {
        Ok(match self {
            Node::Num(c) => Expr::rational(c.clone()),
            Node::Coord(c) => Expr::coord(*c),
            Node::Add(a, b) => a.to_expr()? + b.to_expr()?,
            Node::Sub(a, b) => a.to_expr()? - b.to_expr()?,
            Node::Mul(a, b) => a.to_expr()? * b.to_expr()?,
            Node::Div(a, b) => a
                .to_expr()?
                .checked_div(&b.to_expr()?)
                .ok_or(ParseError::DivisionByZero)?,
            Node::Neg(a) => -a.to_expr()?,
            Node::Pow(a, e) => {
                let b = a.to_expr()?;
                if *e < 0 && b.is_zero() {
                    return Err(ParseError::DivisionByZero);
                }
                b.pow(*e)
            }
            Node::Func(f, a) => Expr::func(*f, a.to_expr()?),
        })
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    /// Parse with dependent variables named `u1, u2, ...` (up to u9).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_indexed(s, 9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Coordinate;

    fn uv() -> VarNames {
        VarNames::new(&["u", "v"]).unwrap()
    }

    #[test]
    fn single_leaf() {
        assert_eq!(parse("v", &uv()).unwrap(), Expr::u(1));
    }

    #[test]
    fn product() {
        assert_eq!(parse("x*u", &uv()).unwrap(), Expr::x() * Expr::u(0));
    }

    #[test]
    fn antisymmetric_combination() {
        let e = parse("u_x*v_y - v_x*u_y", &uv()).unwrap();
        assert_eq!(e.num().len(), 2);
    }

    #[test]
    fn decimals_and_powers() {
        let e = parse("0.25*x^2 - x^-1", &uv()).unwrap();
        let want = Expr::frac(1, 4) * Expr::x().pow(2) - Expr::one() / Expr::x();
        assert_eq!(e, want);
        assert_eq!(parse("x^(-2)*x^2", &uv()).unwrap(), Expr::one());
        assert_eq!(parse("-x^2", &uv()).unwrap(), -(Expr::x().pow(2)));
    }

    #[test]
    fn suffixes() {
        let e = parse("u_xx + v_yy + u_yx", &uv()).unwrap();
        assert!(e.depends_on(&Coordinate::Uxx(0)));
        assert!(e.depends_on(&Coordinate::Uyy(1)));
        assert!(e.depends_on(&Coordinate::Uxy(0)));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse("x + * y", &uv()),
            Err(ParseError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse("w + 1", &uv()),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_indexed("u3", 2),
            Err(ParseError::IndexOutOfRange { index: 3, m: 2, .. })
        ));
        assert!(matches!(parse("1/(x-x)", &uv()), Err(ParseError::DivisionByZero)));
        assert!(parse("exp x", &uv()).is_err());
        assert!(parse("(x", &uv()).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let names = uv();
        for s in [
            "u_x*v_y - v_x*u_y",
            "exp(2*u)*v_x*v_y",
            "(x*u^2 + 3)/(2*y - v)",
            "-1/2*x*u^2 - 1/2*v^2",
            "sin(x)/(x*y)",
        ] {
            let e = parse(s, &names).unwrap();
            let back = parse(&e.display_with(&names), &names).unwrap();
            assert_eq!(e, back, "{s}");
        }
    }
}
