//! Exact evaluation at rational points, random sampling and zero testing.
//!
//! Opaque functions are evaluated with 320-bit binary floating point and
//! converted back to exact rationals; such values are flagged inexact. A
//! value counts as zero when it is below `2^-240` relative to the sum of
//! the absolute values of the terms that produced it.

use std::collections::{BTreeMap, BTreeSet};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::coord::Coordinate;
use super::expr::Expr;
use super::poly::{Atom, Func, Poly};

/// Binary precision used for opaque function evaluation.
pub const FUNC_PRECISION: usize = 320;
/// Relative threshold exponent below which an inexact value is zero.
pub const ZERO_BITS: usize = 240;
/// Number of random points in a probabilistic zero test.
pub const ZERO_TEST_POINTS: usize = 8;
pub const DEFAULT_SEED: u64 = 0x5eed_2d6f_6f72_646e;
/// Sample coordinates are p/q with |p| <= SAMPLE_BOUND, 1 <= q <= SAMPLE_BOUND.
pub const SAMPLE_BOUND: i64 = 1_000_000;
const MAX_RESAMPLES: usize = 64;

pub type Point = BTreeMap<Coordinate, BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation point is a pole")]
    Pole,
    #[error("no value given for coordinate {0}")]
    Missing(Coordinate),
    #[error("{} evaluated outside its domain", .0.name())]
    Domain(Func),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Value {
    pub value: BigRational,
    /// False if an opaque function was approximated on the way.
    pub exact: bool,
    /// Scale against which an inexact value is compared to zero.
    pub magnitude: BigRational,
}

impl Value {
    pub fn is_zero(&self) -> bool {
        if self.exact {
            self.value.is_zero()
        } else {
            negligible(&self.value, &self.magnitude)
        }
    }
}

fn negligible(v: &BigRational, magnitude: &BigRational) -> bool {
    if v.is_zero() {
        return true;
    }
    let tol = magnitude / BigRational::from_integer(BigInt::one() << ZERO_BITS);
    v.abs() <= tol
}

/// Exact value of `e` at `point`.
pub fn eval_rational(e: &Expr, point: &Point) -> Result<Value, EvalError> {
    Evaluator::new(point).eval(e)
}

/// Evaluates many expressions at one point, sharing opaque atom values.
pub struct Evaluator<'a> {
    point: &'a Point,
    atoms: BTreeMap<Atom, (BigRational, bool)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(point: &'a Point) -> Self {
        Evaluator {
            point,
            atoms: BTreeMap::new(),
        }
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Value, EvalError> {
        let (n, nmag, nex) = self.eval_poly(e.num())?;
        if e.den().is_one() {
            return Ok(Value {
                value: n,
                exact: nex,
                magnitude: nmag,
            });
        }
        let (d, dmag, dex) = self.eval_poly(e.den())?;
        let dzero = if dex { d.is_zero() } else { negligible(&d, &dmag) };
        if dzero {
            return Err(EvalError::Pole);
        }
        let da = d.abs();
        Ok(Value {
            value: n / &d,
            exact: nex && dex,
            magnitude: nmag / da,
        })
    }

    fn eval_atom(&mut self, a: &Atom) -> Result<(BigRational, bool), EvalError> {
        if let Atom::Coord(c) = a {
            return self
                .point
                .get(c)
                .map(|v| (v.clone(), true))
                .ok_or(EvalError::Missing(*c));
        }
        if let Some(v) = self.atoms.get(a) {
            return Ok(v.clone());
        }
        let Atom::Func(f, arg) = a else { unreachable!() };
        let inner = self.eval(arg)?;
        let v = (eval_func(*f, &inner.value)?, false);
        self.atoms.insert(a.clone(), v.clone());
        Ok(v)
    }

    fn eval_poly(&mut self, p: &Poly) -> Result<(BigRational, BigRational, bool), EvalError> {
        let mut sum = BigRational::zero();
        let mut mag = BigRational::zero();
        let mut exact = true;
        for (m, c) in p.terms() {
            let mut t = c.clone();
            for (a, e) in m.factors() {
                let (v, ex) = self.eval_atom(a)?;
                exact &= ex;
                for _ in 0..*e {
                    t *= &v;
                }
            }
            mag += t.abs();
            sum += t;
        }
        Ok((sum, mag, exact))
    }
}

fn int_to_float(n: &BigInt) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_word(0, FUNC_PRECISION);
    }
    let s = if sign == num_bigint::Sign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    let bits = (digits.len() * 64) as i32;
    BigFloat::from_words(&digits, s, bits)
}

fn rational_to_float(q: &BigRational) -> BigFloat {
    let n = int_to_float(q.numer());
    let d = int_to_float(q.denom());
    n.div(&d, FUNC_PRECISION, RoundingMode::ToEven)
}

fn float_to_rational(f: &BigFloat) -> Option<BigRational> {
    if f.is_zero() {
        return Some(BigRational::zero());
    }
    let (words, _, sign, exp, _) = f.as_raw_parts()?;
    let mut limbs = Vec::with_capacity(words.len() * 2);
    for w in words {
        limbs.push(*w as u32);
        limbs.push((*w >> 32) as u32);
    }
    let mant = BigInt::from(BigUint::new(limbs));
    let mant = if sign == Sign::Neg { -mant } else { mant };
    let shift = exp as i64 - (words.len() * 64) as i64;
    let v = if shift >= 0 {
        BigRational::from_integer(mant << shift as usize)
    } else {
        BigRational::new(mant, BigInt::one() << (-shift) as usize)
    };
    Some(v)
}

/// Opaque function value at an exact rational argument, rounded to
/// `FUNC_PRECISION` bits.
pub fn eval_func(f: Func, x: &BigRational) -> Result<BigRational, EvalError> {
    match f {
        Func::Exp | Func::Cos if x.is_zero() => return Ok(BigRational::one()),
        Func::Sin if x.is_zero() => return Ok(BigRational::zero()),
        Func::Log if x.is_one() => return Ok(BigRational::zero()),
        Func::Log if !x.is_positive() => return Err(EvalError::Domain(f)),
        _ => {}
    }
    let mut cc = Consts::new().map_err(|_| EvalError::Domain(f))?;
    let a = rational_to_float(x);
    let rm = RoundingMode::ToEven;
    let r = match f {
        Func::Exp => a.exp(FUNC_PRECISION, rm, &mut cc),
        Func::Log => a.ln(FUNC_PRECISION, rm, &mut cc),
        Func::Sin => a.sin(FUNC_PRECISION, rm, &mut cc),
        Func::Cos => a.cos(FUNC_PRECISION, rm, &mut cc),
    };
    if r.is_nan() || r.is_inf() {
        return Err(EvalError::Domain(f));
    }
    float_to_rational(&r).ok_or(EvalError::Domain(f))
}

/// Seeded source of random rational sample points.
#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler::new(DEFAULT_SEED)
    }
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rational(&mut self) -> BigRational {
        let p: i64 = self.rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
        let q: i64 = self.rng.gen_range(1..=SAMPLE_BOUND);
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    /// A random nonzero rational.
    pub fn nonzero(&mut self) -> BigRational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn point<'c>(&mut self, coords: impl IntoIterator<Item = &'c Coordinate>) -> Point {
        coords.into_iter().map(|c| (*c, self.rational())).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    Exact,
    Probabilistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    Zero(Certainty),
    NonZero,
    /// Too many sample points hit poles or domain errors.
    Indeterminate,
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroTest::Zero(_))
    }
}

/// Zero test with the default seed.
pub fn is_zero(e: &Expr) -> ZeroTest {
    is_zero_with(e, &mut Sampler::default())
}

/// Exact for function-free expressions, otherwise evaluation of the
/// numerator at `ZERO_TEST_POINTS` random points.
pub fn is_zero_with(e: &Expr, sampler: &mut Sampler) -> ZeroTest {
    if e.is_zero() {
        return ZeroTest::Zero(Certainty::Exact);
    }
    if !e.has_functions() {
        return ZeroTest::NonZero;
    }
    let coords: BTreeSet<Coordinate> = e.coordinates().clone();
    let num = Expr::from_poly(e.num().clone());
    let den = Expr::from_poly(e.den().clone());
    let mut good = 0;
    for _ in 0..MAX_RESAMPLES {
        let p = sampler.point(&coords);
        let mut ev = Evaluator::new(&p);
        match ev.eval(&den) {
            Ok(d) if !d.is_zero() => {}
            _ => continue,
        }
        match ev.eval(&num) {
            Ok(v) if v.is_zero() => good += 1,
            Ok(_) => return ZeroTest::NonZero,
            Err(_) => continue,
        }
        if good == ZERO_TEST_POINTS {
            return ZeroTest::Zero(Certainty::Probabilistic);
        }
    }
    ZeroTest::Indeterminate
}
