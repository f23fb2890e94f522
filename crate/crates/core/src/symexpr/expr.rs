use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::coord::{Coordinate, VarNames};
use super::poly::{Atom, Func, Monomial, Poly};

/// An immutable symbolic expression, stored as a reduced rational function
/// `num / den` with `den` monic and `gcd(num, den) = 1`. Function
/// applications are opaque polynomial atoms.
///
/// Because the representation is canonical for function-free input,
/// structural equality decides equality of rational functions.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

struct Inner {
    num: Poly,
    den: Poly,
    coords: OnceLock<BTreeSet<Coordinate>>,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.num == other.0.num && self.0.den == other.0.den)
    }
}

impl Eq for Expr {}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .den
            .cmp(&other.0.den)
            .then_with(|| self.0.num.cmp(&other.0.num))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    fn raw(num: Poly, den: Poly) -> Self {
        Expr(Arc::new(Inner {
            num,
            den,
            coords: OnceLock::new(),
        }))
    }

    /// Build `num / den` in reduced form.
    pub(crate) fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "expression with zero denominator");
        if num.is_zero() {
            return Expr::raw(Poly::zero(), Poly::one());
        }
        if let Some(c) = den.as_constant() {
            return Expr::raw(num.scale(&c.recip()), Poly::one());
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            Expr::raw(num, den)
        } else {
            let k = lc.recip();
            Expr::raw(num.scale(&k), den.scale(&k))
        }
    }

    pub(crate) fn from_poly(p: Poly) -> Self {
        Expr::raw(p, Poly::one())
    }

    pub(crate) fn num(&self) -> &Poly {
        &self.0.num
    }

    pub(crate) fn den(&self) -> &Poly {
        &self.0.den
    }

    pub fn zero() -> Self {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(c: BigRational) -> Self {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn coord(c: Coordinate) -> Self {
        Expr::from_poly(Poly::from_atom(Atom::Coord(c)))
    }

    pub fn x() -> Self {
        Expr::coord(Coordinate::X)
    }

    pub fn y() -> Self {
        Expr::coord(Coordinate::Y)
    }

    pub fn u(i: usize) -> Self {
        Expr::coord(Coordinate::U(i))
    }

    pub fn ux(i: usize) -> Self {
        Expr::coord(Coordinate::Ux(i))
    }

    pub fn uy(i: usize) -> Self {
        Expr::coord(Coordinate::Uy(i))
    }

    pub fn param(i: usize) -> Self {
        Expr::coord(Coordinate::Param(i))
    }

    /// Opaque function application. Only the trivial values at 0 (and
    /// log 1) are folded.
    pub fn func(f: Func, arg: Expr) -> Self {
        if arg.is_zero() {
            match f {
                Func::Exp | Func::Cos => return Expr::one(),
                Func::Sin => return Expr::zero(),
                Func::Log => {}
            }
        }
        if f == Func::Log && arg.as_rational().is_some_and(|c| c.is_one()) {
            return Expr::zero();
        }
        Expr::from_poly(Poly::from_atom(Atom::Func(f, arg)))
    }

    pub fn exp(&self) -> Self {
        Expr::func(Func::Exp, self.clone())
    }

    pub fn log(&self) -> Self {
        Expr::func(Func::Log, self.clone())
    }

    pub fn sin(&self) -> Self {
        Expr::func(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Self {
        Expr::func(Func::Cos, self.clone())
    }

    /// Structural zero. Exact for function-free expressions.
    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.den.is_one() && self.0.num.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.0.den.is_one() {
            return None;
        }
        if self.0.num.is_zero() {
            return Some(BigRational::zero());
        }
        self.0.num.as_constant().cloned()
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    /// True if any opaque function atom occurs, at any depth.
    pub fn has_functions(&self) -> bool {
        self.atoms().iter().any(|a| matches!(a, Atom::Func(..)))
    }

    /// The opaque function applications occurring at top level, each as an
    /// expression of its own.
    pub fn function_atoms(&self) -> BTreeSet<Expr> {
        self.atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Func(f, arg) => Some(Expr::func(f, arg)),
                Atom::Coord(_) => None,
            })
            .collect()
    }

    /// Leading rational coefficient of the numerator (zero for zero).
    pub fn leading_coefficient(&self) -> BigRational {
        self.0.num.leading_coeff()
    }

    pub(crate) fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = self.0.num.atoms();
        out.extend(self.0.den.atoms());
        out
    }

    /// Every coordinate occurring in the expression, including inside
    /// function arguments.
    pub fn coordinates(&self) -> &BTreeSet<Coordinate> {
        self.0.coords.get_or_init(|| {
            let mut out = BTreeSet::new();
            for a in self.atoms() {
                a.coordinates(&mut out);
            }
            out
        })
    }

    pub fn depends_on(&self, c: &Coordinate) -> bool {
        self.coordinates().contains(c)
    }

    pub fn depends_on_any(&self, pred: impl Fn(&Coordinate) -> bool) -> bool {
        self.coordinates().iter().any(pred)
    }

    pub fn pow(&self, e: i32) -> Self {
        if e == 0 {
            return Expr::one();
        }
        let k = e.unsigned_abs();
        let r = Expr::from_parts(self.0.num.pow(k), self.0.den.pow(k));
        if e > 0 {
            r
        } else {
            Expr::one().checked_div(&r).expect("negative power of zero")
        }
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        if other.is_zero() {
            return None;
        }
        Some(Expr::from_parts(
            self.0.num.mul(&other.0.den),
            self.0.den.mul(&other.0.num),
        ))
    }

    fn add_impl(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.0.den == other.0.den {
            return Expr::from_parts(self.0.num.add(&other.0.num), self.0.den.clone());
        }
        Expr::from_parts(
            self.0.num.mul(&other.0.den).add(&other.0.num.mul(&self.0.den)),
            self.0.den.mul(&other.0.den),
        )
    }

    fn mul_impl(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.0.den.is_one() && other.0.den.is_one() {
            return Expr::from_poly(self.0.num.mul(&other.0.num));
        }
        Expr::from_parts(self.0.num.mul(&other.0.num), self.0.den.mul(&other.0.den))
    }

    pub fn scale(&self, k: &BigRational) -> Expr {
        Expr::raw(self.0.num.scale(k), self.0.den.clone()).renorm_if_zero()
    }

    fn renorm_if_zero(self) -> Expr {
        if self.0.num.is_zero() {
            Expr::zero()
        } else {
            self
        }
    }

    /// Partial derivative, treating all coordinates as independent.
    pub fn partial(&self, c: &Coordinate) -> Expr {
        if !self.depends_on(c) {
            return Expr::zero();
        }
        let dn = poly_partial(&self.0.num, c);
        if self.0.den.is_one() {
            return dn;
        }
        let dd = poly_partial(&self.0.den, c);
        let n = Expr::from_poly(self.0.num.clone());
        let d = Expr::from_poly(self.0.den.clone());
        let top = &(&dn * &d) - &(&n * &dd);
        top.checked_div(&(&d * &d)).unwrap()
    }

    /// Substitute a single coordinate.
    pub fn substitute(&self, c: &Coordinate, value: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(*c, value.clone());
        self.substitute_all(&map)
    }

    /// Simultaneous substitution of several coordinates.
    pub fn substitute_all(&self, map: &BTreeMap<Coordinate, Expr>) -> Expr {
        if !self.coordinates().iter().any(|c| map.contains_key(c)) {
            return self.clone();
        }
        let mut cache = BTreeMap::new();
        let n = subst_poly(&self.0.num, map, &mut cache);
        if self.0.den.is_one() {
            return n;
        }
        let d = subst_poly(&self.0.den, map, &mut cache);
        n.checked_div(&d).expect("substitution makes a denominator vanish")
    }

    /// Coefficients of this expression as a polynomial in the given
    /// coordinates. Fails if the coordinates occur in the denominator or
    /// inside a function argument.
    pub fn poly_coefficients(
        &self,
        vars: &[Coordinate],
    ) -> Option<BTreeMap<Vec<u32>, Expr>> {
        let isvar = |a: &Atom| matches!(a, Atom::Coord(c) if vars.contains(c));
        for a in self.0.den.atoms() {
            if a.coordinates_any(|c| vars.contains(c)) {
                return None;
            }
        }
        let mut buckets: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (m, coef) in self.0.num.terms() {
            let mut key = vec![0u32; vars.len()];
            let mut rest = Vec::new();
            for (a, e) in m.factors() {
                if isvar(a) {
                    let Atom::Coord(c) = a else { unreachable!() };
                    let k = vars.iter().position(|v| v == c).unwrap();
                    key[k] = *e;
                } else {
                    if a.coordinates_any(|c| vars.contains(c)) {
                        return None;
                    }
                    rest.push((a.clone(), *e));
                }
            }
            buckets
                .entry(key)
                .or_default()
                .add_term(Monomial::from_factors(rest), coef.clone());
        }
        Some(
            buckets
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .map(|(k, p)| (k, Expr::from_parts(p, self.0.den.clone())))
                .collect(),
        )
    }

    /// Affine decomposition in `Param` coordinates: returns
    /// `(constant part, [(param index, coefficient)])`, or `None` if some
    /// parameter occurs nonlinearly.
    pub fn param_linear(&self) -> Option<(Expr, BTreeMap<usize, Expr>)> {
        let params: Vec<Coordinate> = self
            .coordinates()
            .iter()
            .filter(|c| c.is_param())
            .copied()
            .collect();
        let coeffs = self.poly_coefficients(&params)?;
        let mut constant = Expr::zero();
        let mut lin = BTreeMap::new();
        for (key, c) in coeffs {
            let deg: u32 = key.iter().sum();
            match deg {
                0 => constant = c,
                1 => {
                    let k = key.iter().position(|&e| e == 1).unwrap();
                    let Coordinate::Param(i) = params[k] else { unreachable!() };
                    lin.insert(i, c);
                }
                _ => return None,
            }
        }
        Some((constant, lin))
    }

    /// Numerator coefficients as a polynomial in every atom that is not
    /// purely made of the given coordinates. Used to split an identity in
    /// jet variables into equations on the remaining unknowns.
    pub(crate) fn numerator_coefficients(
        &self,
        keep: impl Fn(&Coordinate) -> bool,
    ) -> Vec<Expr> {
        let mut buckets: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, coef) in self.0.num.terms() {
            let mut key = Vec::new();
            let mut rest = Vec::new();
            for (a, e) in m.factors() {
                if a.coordinates_all(&keep) {
                    rest.push((a.clone(), *e));
                } else {
                    key.push((a.clone(), *e));
                }
            }
            buckets
                .entry(Monomial::from_factors(key))
                .or_default()
                .add_term(Monomial::from_factors(rest), coef.clone());
        }
        buckets
            .into_values()
            .filter(|p| !p.is_zero())
            .map(Expr::from_poly)
            .collect()
    }

    /// Canonical text with default names `u1, u2, ...`.
    pub fn display_with(&self, names: &VarNames) -> String {
        let n = fmt_poly(&self.0.num, names);
        if self.0.den.is_one() {
            return n;
        }
        let d = fmt_poly(&self.0.den, names);
        let n = if self.0.num.len() > 1 { format!("({n})") } else { n };
        let den_simple = self.0.den.len() == 1
            && self
                .0
                .den
                .leading()
                .is_some_and(|(m, _)| m.factors().len() == 1 && m.factors()[0].1 == 1);
        let d = if den_simple { d } else { format!("({d})") };
        format!("{n}/{d}")
    }
}

impl Atom {
    fn coordinates_any(&self, pred: impl Fn(&Coordinate) -> bool) -> bool {
        let mut s = BTreeSet::new();
        self.coordinates(&mut s);
        s.iter().any(pred)
    }

    fn coordinates_all(&self, pred: impl Fn(&Coordinate) -> bool) -> bool {
        let mut s = BTreeSet::new();
        self.coordinates(&mut s);
        s.iter().all(pred)
    }
}

fn atom_partial(a: &Atom, c: &Coordinate) -> Expr {
    match a {
        Atom::Coord(x) => {
            if x == c {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Func(f, arg) => {
            let da = arg.partial(c);
            if da.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Exp => arg.exp(),
                Func::Log => Expr::one().checked_div(arg).expect("log of zero"),
                Func::Sin => arg.cos(),
                Func::Cos => -arg.sin(),
            };
            &outer * &da
        }
    }
}

fn poly_partial(p: &Poly, c: &Coordinate) -> Expr {
    let mut out = Expr::zero();
    for a in p.atoms() {
        if !a.depends_on(c) {
            continue;
        }
        let da = atom_partial(&a, c);
        if da.is_zero() {
            continue;
        }
        // d p / d a, formally
        let mut dp = Poly::zero();
        for (m, coef) in p.terms() {
            let (e, rest) = m.split(&a);
            if e == 0 {
                continue;
            }
            let m2 = rest.mul(&Monomial::atom(a.clone(), e - 1));
            dp.add_term(m2, coef * BigRational::from_integer(BigInt::from(e)));
        }
        out = &out + &(&Expr::from_poly(dp) * &da);
    }
    out
}

fn subst_atom(
    a: &Atom,
    map: &BTreeMap<Coordinate, Expr>,
    cache: &mut BTreeMap<Atom, Expr>,
) -> Expr {
    if let Some(v) = cache.get(a) {
        return v.clone();
    }
    let v = match a {
        Atom::Coord(c) => map.get(c).cloned().unwrap_or_else(|| Expr::coord(*c)),
        Atom::Func(f, arg) => Expr::func(*f, arg.substitute_all(map)),
    };
    cache.insert(a.clone(), v.clone());
    v
}

fn subst_poly(
    p: &Poly,
    map: &BTreeMap<Coordinate, Expr>,
    cache: &mut BTreeMap<Atom, Expr>,
) -> Expr {
    let mut fixed = Poly::zero();
    let mut moved = Expr::zero();
    for (m, coef) in p.terms() {
        let touched = m.factors().iter().any(|(a, _)| {
            let mut s = BTreeSet::new();
            a.coordinates(&mut s);
            s.iter().any(|c| map.contains_key(c))
        });
        if !touched {
            fixed.add_term(m.clone(), coef.clone());
            continue;
        }
        let mut t = Expr::rational(coef.clone());
        for (a, e) in m.factors() {
            t = &t * &subst_atom(a, map, cache).pow(*e as i32);
        }
        moved = &moved + &t;
    }
    &Expr::from_poly(fixed) + &moved
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(m: &Monomial, names: &VarNames) -> String {
    let mut parts = Vec::new();
    for (a, e) in m.factors() {
        let base = match a {
            Atom::Coord(c) => names.name(c),
            Atom::Func(f, arg) => format!("{}({})", f.name(), arg.display_with(names)),
        };
        if *e == 1 {
            parts.push(base);
        } else {
            parts.push(format!("{base}^{e}"));
        }
    }
    parts.join("*")
}

fn fmt_poly(p: &Poly, names: &VarNames) -> String {
    if p.is_zero() {
        return "0".into();
    }
    // Higher degree first; within a degree, lexicographic with the
    // smallest atom (x before y before u1 ...) most significant.
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| {
        b.degree().cmp(&a.degree()).then_with(|| {
            for (fa, fb) in a.factors().iter().zip(b.factors()) {
                match fa.0.cmp(&fb.0) {
                    Ordering::Equal => match fb.1.cmp(&fa.1) {
                        Ordering::Equal => continue,
                        o => return o,
                    },
                    o => return o,
                }
            }
            b.factors().len().cmp(&a.factors().len())
        })
    });
    let mut s = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            s.push_str(&fmt_rational(&a));
        } else if a.is_one() {
            s.push_str(&fmt_monomial(m, names));
        } else {
            s.push_str(&fmt_rational(&a));
            s.push('*');
            s.push_str(&fmt_monomial(m, names));
        }
    }
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self
            .coordinates()
            .iter()
            .filter_map(|c| c.index())
            .max()
            .map_or(0, |i| i + 1);
        f.write_str(&self.display_with(&VarNames::indexed(m)))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<BigRational> for Expr {
    fn from(c: BigRational) -> Self {
        Expr::rational(c)
    }
}

impl From<Coordinate> for Expr {
    fn from(c: Coordinate) -> Self {
        Expr::coord(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                ops::$tr::$m(&self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                ops::$tr::$m(&self, rhs)
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                ops::$tr::$m(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b));
binop!(Sub, sub, |a, b| a.add_impl(&-b));
binop!(Mul, mul, |a, b| a.mul_impl(b));
binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("symbolic division by zero"));

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::raw(self.0.num.neg(), self.0.den.clone())
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl ops::AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        *self = &*self + rhs;
    }
}

impl ops::SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        *self = &*self - rhs;
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Expr {
        Expr::u(0)
    }
    fn v() -> Expr {
        Expr::u(1)
    }

    #[test]
    fn square_expands_to_zero() {
        let e = (u() + v()).pow(2) - u().pow(2) - Expr::int(2) * u() * v() - v().pow(2);
        assert!(e.is_zero());
    }

    #[test]
    fn fraction_cancels() {
        let e = (u().pow(2) - v().pow(2)) / (u() - v());
        assert_eq!(e, u() + v());
        let e = (Expr::x() * u()) / (Expr::int(2) * Expr::x());
        assert_eq!(e, u() / Expr::int(2));
    }

    #[test]
    fn partial_examples() {
        let xu = Expr::x() * u();
        assert_eq!(xu.partial(&Coordinate::U(0)), Expr::x());
        let g = Expr::ux(0) * Expr::uy(1);
        assert_eq!(g.partial(&Coordinate::Ux(0)), Expr::uy(1));
        let e = u().exp();
        assert_eq!(e.partial(&Coordinate::U(0)), u().exp());
        let q = Expr::one() / u();
        assert_eq!(q.partial(&Coordinate::U(0)), -(Expr::one() / u().pow(2)));
    }

    #[test]
    fn exp_atoms_are_opaque() {
        let e = u().exp() * (-u()).exp() - Expr::one();
        assert!(!e.is_zero());
        assert!(e.has_functions());
    }

    #[test]
    fn substitution() {
        let e = Expr::x() * u() + Expr::uy(0);
        let s = e.substitute(&Coordinate::U(0), &(v() + Expr::one()));
        assert_eq!(s, Expr::x() * v() + Expr::x() + Expr::uy(0));
        let f = (u() * Expr::int(2)).exp();
        let s = f.substitute(&Coordinate::U(0), &Expr::zero());
        assert!(s.is_one());
    }

    #[test]
    fn param_linear_split() {
        let e = Expr::x() * Expr::param(0) - Expr::param(1) + u();
        let (c, lin) = e.param_linear().unwrap();
        assert_eq!(c, u());
        assert_eq!(lin[&0], Expr::x());
        assert_eq!(lin[&1], Expr::int(-1));
        assert!((Expr::param(0) * Expr::param(1)).param_linear().is_none());
    }

    #[test]
    fn display_is_canonical() {
        let e = Expr::ux(0) * Expr::uy(1) - Expr::ux(1) * Expr::uy(0);
        assert_eq!(e.num().len(), 2);
        let s = e.to_string();
        assert!(s.contains("u1_x") && s.contains("u2_y"), "{s}");
        assert_eq!((Expr::one() / (Expr::x() + Expr::y())).to_string(), "1/(x + y)");
    }
}
