//! Exact symbolic expressions over jet coordinates.

mod ast;
mod coord;
mod eval;
mod expr;
mod parse;
mod poly;

pub use ast::Node;
pub use coord::{Coordinate, VarNames};
pub use eval::{
    eval_func, eval_rational, is_zero, is_zero_with, Certainty, EvalError, Evaluator, Point,
    Sampler, Value, ZeroTest, DEFAULT_SEED, FUNC_PRECISION, SAMPLE_BOUND, ZERO_TEST_POINTS,
};
pub use expr::Expr;
pub use parse::{parse, parse_ast, parse_indexed, ParseError};
pub use poly::Func;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn other(self) -> Direction {
        match self {
            Direction::X => Direction::Y,
            Direction::Y => Direction::X,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivativeError {
    #[error("expression contains the mixed derivative {0}")]
    ContainsMixed(Coordinate),
    #[error("derivative of {0} leaves the second-order jet")]
    OrderTooHigh(Coordinate),
}

/// Total derivative on the equation manifold `u^a_xy = f^a`.
///
/// Every `u_xy` that the chain rule would produce is replaced by `f`, and
/// `u_xyy` (from `D_x u_yy`) by `D_y f`. The input must be free of `u_xy`;
/// `D_x u_xx` and `D_y u_yy` are third order and rejected.
pub fn total_derivative(e: &Expr, dir: Direction, f: &[Expr]) -> Result<Expr, DerivativeError> {
    let mut out = Expr::zero();
    let own = match dir {
        Direction::X => Coordinate::X,
        Direction::Y => Coordinate::Y,
    };
    for c in e.coordinates().clone() {
        let d = e.partial(&c);
        if d.is_zero() {
            continue;
        }
        let rate = match (c, dir) {
            (Coordinate::X | Coordinate::Y, _) => {
                if c == own {
                    Expr::one()
                } else {
                    continue;
                }
            }
            (Coordinate::Param(_), _) => continue,
            (Coordinate::Uxy(_), _) => return Err(DerivativeError::ContainsMixed(c)),
            (Coordinate::U(i), Direction::X) => Expr::ux(i),
            (Coordinate::U(i), Direction::Y) => Expr::uy(i),
            (Coordinate::Ux(i), Direction::X) => Expr::coord(Coordinate::Uxx(i)),
            (Coordinate::Uy(i), Direction::Y) => Expr::coord(Coordinate::Uyy(i)),
            (Coordinate::Uy(i), Direction::X) | (Coordinate::Ux(i), Direction::Y) => f[i].clone(),
            (Coordinate::Uyy(i), Direction::X) => total_derivative(&f[i], Direction::Y, f)?,
            (Coordinate::Uxx(i), Direction::Y) => total_derivative(&f[i], Direction::X, f)?,
            (Coordinate::Uxx(_), Direction::X) | (Coordinate::Uyy(_), Direction::Y) => {
                return Err(DerivativeError::OrderTooHigh(c))
            }
        };
        out += &(&d * &rate);
    }
    Ok(out)
}

/// Total derivative on the free jet (no equation imposed). Defined for
/// expressions of order at most one.
pub fn free_total_derivative(e: &Expr, dir: Direction) -> Result<Expr, DerivativeError> {
    let mut out = Expr::zero();
    for c in e.coordinates().clone() {
        let rate = match (c, dir) {
            (Coordinate::X, Direction::X) | (Coordinate::Y, Direction::Y) => Expr::one(),
            (Coordinate::X | Coordinate::Y | Coordinate::Param(_), _) => continue,
            (Coordinate::U(i), Direction::X) => Expr::ux(i),
            (Coordinate::U(i), Direction::Y) => Expr::uy(i),
            (Coordinate::Ux(i), Direction::X) => Expr::coord(Coordinate::Uxx(i)),
            (Coordinate::Uy(i), Direction::Y) => Expr::coord(Coordinate::Uyy(i)),
            (Coordinate::Uy(i), Direction::X) | (Coordinate::Ux(i), Direction::Y) => {
                Expr::coord(Coordinate::Uxy(i))
            }
            (_, _) => return Err(DerivativeError::OrderTooHigh(c)),
        };
        out += &(&e.partial(&c) * &rate);
    }
    Ok(out)
}
