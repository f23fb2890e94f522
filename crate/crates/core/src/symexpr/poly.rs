//! Sparse multivariate polynomials over Q whose variables are atoms:
//! coordinates or opaque function applications.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coord::Coordinate;
use super::expr::Expr;

/// Elementary functions kept as opaque atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        match s {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }
}

/// A polynomial variable. Function atoms compare by their normalized
/// argument; no functional identities are applied.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Atom {
    Coord(Coordinate),
    Func(Func, Expr),
}

impl Atom {
    pub(crate) fn coordinates(&self, out: &mut BTreeSet<Coordinate>) {
        match self {
            Atom::Coord(c) => {
                out.insert(*c);
            }
            Atom::Func(_, arg) => out.extend(arg.coordinates().iter().copied()),
        }
    }

    pub(crate) fn depends_on(&self, c: &Coordinate) -> bool {
        match self {
            Atom::Coord(a) => a == c,
            Atom::Func(_, arg) => arg.depends_on(c),
        }
    }
}

/// Power product of atoms, sorted ascending by atom with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct Monomial(Vec<(Atom, u32)>);

impl Ord for Monomial {
    // Graded order: total degree first, then lexicographic from the largest
    // atom downwards. Compatible with multiplication.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let mut a = self.0.iter().rev();
        let mut b = other.0.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((xa, ea)), Some((xb, eb))) => match xa.cmp(xb) {
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => continue,
                        o => return o,
                    },
                    o => return o,
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial(Vec::new())
    }

    pub(crate) fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub(crate) fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub(crate) fn from_factors(mut v: Vec<(Atom, u32)>) -> Self {
        v.retain(|(_, e)| *e > 0);
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, u32)> = Vec::with_capacity(v.len());
        for (a, e) in v {
            match out.last_mut() {
                Some((last, le)) if *last == a => *le += e,
                _ => out.push((a, e)),
            }
        }
        Monomial(out)
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub(crate) fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == *a {
                let f = other.0[j].1;
                if f > *e {
                    return None;
                }
                if f < *e {
                    out.push((a.clone(), e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *a {
                return None;
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub(crate) fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(x, _)| x == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Split off the power of `a`.
    pub(crate) fn split(&self, a: &Atom) -> (u32, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut e = 0;
        for (x, k) in &self.0 {
            if x == a {
                e = *k;
            } else {
                rest.push((x.clone(), *k));
            }
        }
        (e, Monomial(rest))
    }

    pub(crate) fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (a, e) in &self.0 {
            let f = other.exponent(a);
            if f > 0 {
                out.push((a.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }
}

/// Polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub(crate) fn from_atom(a: Atom) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::atom(a, 1), BigRational::one());
        p
    }

    pub(crate) fn from_term(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub(crate) fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub(crate) fn as_constant(&self) -> Option<&BigRational> {
        match self.terms.len() {
            0 => None,
            1 => self.terms.get(&Monomial::one()),
            _ => None,
        }
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.is_zero() || self.as_constant().is_some()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub(crate) fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub(crate) fn mul_term(&self, m: &Monomial, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(c);
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub(crate) fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Leading term in the graded order.
    pub(crate) fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub(crate) fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub(crate) fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                out.insert(a.clone());
            }
        }
        out
    }

    pub(crate) fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    /// Coefficients of `a^0, a^1, ...` as polynomials in the other atoms.
    pub(crate) fn coeffs_in(&self, a: &Atom) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(a) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(a);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    pub(crate) fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "polynomial division by zero");
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (ld, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((lr, lrc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = lr.div(&ld)?;
            let c = lrc / &lc;
            for (dm, dc) in &d.terms {
                r.add_term(dm.mul(&m), -(dc * &c));
            }
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Greatest monomial dividing every term.
    fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    /// Monic greatest common divisor.
    pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        if a.len() == 1 || b.len() == 1 {
            let g = a.monomial_content().gcd(&b.monomial_content());
            return Poly::from_term(g, BigRational::one());
        }
        // Pull out monomial factors first; they are cheap and common.
        let ga = a.monomial_content();
        let gb = b.monomial_content();
        let gm = ga.gcd(&gb);
        let a = a.div_exact(&Poly::from_term(ga, BigRational::one())).unwrap();
        let b = b.div_exact(&Poly::from_term(gb, BigRational::one())).unwrap();
        let g = Poly::gcd_primitive(&a, &b);
        g.mul_term(&gm, &BigRational::one()).monic()
    }

    fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        if a == b {
            return a.monic();
        }
        let atoms: BTreeSet<Atom> = a.atoms().union(&b.atoms()).cloned().collect();
        let v = atoms.iter().next_back().unwrap().clone();
        let da = a.degree_in(&v);
        let db = b.degree_in(&v);
        if da == 0 {
            return Poly::gcd(a, &b.content_in(&v));
        }
        if db == 0 {
            return Poly::gcd(&a.content_in(&v), b);
        }
        let ca = a.content_in(&v);
        let cb = b.content_in(&v);
        let c = Poly::gcd(&ca, &cb);
        let mut r0 = a.div_exact(&ca).unwrap();
        let mut r1 = b.div_exact(&cb).unwrap();
        if r0.degree_in(&v) < r1.degree_in(&v) {
            std::mem::swap(&mut r0, &mut r1);
        }
        let g = loop {
            let r = r0.prem(&r1, &v);
            if r.is_zero() {
                break r1;
            }
            if r.degree_in(&v) == 0 {
                break Poly::one();
            }
            r0 = r1;
            r1 = r.primitive_in(&v);
        };
        let g = if g.is_one() { g } else { g.primitive_in(&v) };
        c.mul(&g).monic()
    }

    /// Gcd of the coefficients with respect to `v`.
    fn content_in(&self, v: &Atom) -> Poly {
        let coeffs = self.coeffs_in(v);
        let mut g = Poly::zero();
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = Poly::gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_in(&self, v: &Atom) -> Poly {
        let c = self.content_in(v);
        if c.is_one() {
            self.monic()
        } else {
            self.div_exact(&c).unwrap().monic()
        }
    }

    /// Pseudo-remainder of `self` by `d` as polynomials in `v`.
    fn prem(&self, d: &Poly, v: &Atom) -> Poly {
        let dd = d.degree_in(v);
        let lcd = d.coeffs_in(v).pop().unwrap();
        let mut r = self.clone();
        while !r.is_zero() {
            let dr = r.degree_in(v);
            if dr < dd {
                break;
            }
            let lcr = r.coeffs_in(v).pop().unwrap();
            let shift = Monomial::atom(v.clone(), dr - dd);
            let t = lcr.mul(d).mul_term(&shift, &BigRational::one());
            r = r.mul(&lcd).sub(&t);
        }
        r
    }
}
