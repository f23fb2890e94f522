use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coord::Coordinate;
use super::eval::{eval_func, EvalError, Point, Value};
use super::poly::Func;

/// Unnormalized expression tree, as produced by the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Num(BigRational),
    Coord(Coordinate),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i32),
    Func(Func, Box<Node>),
}

impl Node {
    /// Direct evaluation of the tree, without normalizing first.
    pub fn eval(&self, point: &Point) -> Result<Value, EvalError> {
        let (value, exact) = self.eval_inner(point)?;
        Ok(Value {
            magnitude: num_traits::Signed::abs(&value),
            value,
            exact,
        })
    }

    fn eval_inner(&self, p: &Point) -> Result<(BigRational, bool), EvalError> {
        Ok(match self {
            Node::Num(c) => (c.clone(), true),
            Node::Coord(c) => (p.get(c).cloned().ok_or(EvalError::Missing(*c))?, true),
            Node::Add(a, b) => {
                let (x, ex) = a.eval_inner(p)?;
                let (y, ey) = b.eval_inner(p)?;
                (x + y, ex && ey)
            }
            Node::Sub(a, b) => {
                let (x, ex) = a.eval_inner(p)?;
                let (y, ey) = b.eval_inner(p)?;
                (x - y, ex && ey)
            }
            Node::Mul(a, b) => {
                let (x, ex) = a.eval_inner(p)?;
                let (y, ey) = b.eval_inner(p)?;
                (x * y, ex && ey)
            }
            Node::Div(a, b) => {
                let (x, ex) = a.eval_inner(p)?;
                let (y, ey) = b.eval_inner(p)?;
                if y.is_zero() {
                    return Err(EvalError::Pole);
                }
                (x / y, ex && ey)
            }
            Node::Neg(a) => {
                let (x, ex) = a.eval_inner(p)?;
                (-x, ex)
            }
            Node::Pow(a, e) => {
                let (x, ex) = a.eval_inner(p)?;
                if *e < 0 && x.is_zero() {
                    return Err(EvalError::Pole);
                }
                let mut acc = BigRational::one();
                for _ in 0..e.unsigned_abs() {
                    acc *= &x;
                }
                if *e < 0 {
                    acc = acc.recip();
                }
                (acc, ex)
            }
            Node::Func(f, a) => {
                let (x, _) = a.eval_inner(p)?;
                (eval_func(*f, &x)?, false)
            }
        })
    }
}
