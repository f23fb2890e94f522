use std::fmt;

/// A coordinate on the jet space of maps (x, y) -> (u^1, ..., u^m).
///
/// Dependent-variable indices are zero-based: `U(0)` is the first
/// dependent variable. `Param` coordinates are not part of the jet space;
/// they stand for undetermined constants (ansatz coefficients, entries of a
/// generic linear combination) and are treated as ordinary variables by the
/// expression kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coordinate {
    X,
    Y,
    U(usize),
    Ux(usize),
    Uy(usize),
    Uxx(usize),
    Uxy(usize),
    Uyy(usize),
    Param(usize),
}

impl Coordinate {
    /// Dependent-variable index, if the coordinate carries one.
    pub fn index(&self) -> Option<usize> {
        match *self {
            Coordinate::U(i)
            | Coordinate::Ux(i)
            | Coordinate::Uy(i)
            | Coordinate::Uxx(i)
            | Coordinate::Uxy(i)
            | Coordinate::Uyy(i) => Some(i),
            _ => None,
        }
    }

    /// Jet order: 0 for x, y, u; 1 for gradients; 2 for second derivatives.
    /// Parameters count as order 0.
    pub fn order(&self) -> usize {
        match self {
            Coordinate::Ux(_) | Coordinate::Uy(_) => 1,
            Coordinate::Uxx(_) | Coordinate::Uxy(_) | Coordinate::Uyy(_) => 2,
            _ => 0,
        }
    }

    pub fn is_gradient(&self) -> bool {
        self.order() == 1
    }

    pub fn is_second_order(&self) -> bool {
        self.order() == 2
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Coordinate::Param(_))
    }

    /// Base coordinates (x, y, u^1..u^m) in their fixed order.
    pub fn base(m: usize) -> Vec<Coordinate> {
        let mut out = vec![Coordinate::X, Coordinate::Y];
        out.extend((0..m).map(Coordinate::U));
        out
    }
}

/// Naming context for printing and parsing coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames {
    dependent: Vec<String>,
    params: Vec<String>,
}

const RESERVED: [&str; 6] = ["x", "y", "exp", "log", "sin", "cos"];

impl VarNames {
    /// The default names `u1, ..., um`.
    pub fn indexed(m: usize) -> Self {
        VarNames {
            dependent: (1..=m).map(|i| format!("u{i}")).collect(),
            params: Vec::new(),
        }
    }

    /// Declared dependent-variable names. Names must be plain identifiers
    /// (letters and digits, starting with a letter), distinct, and must not
    /// shadow `x`, `y` or a function name.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, String> {
        let mut dependent = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && n.chars().all(|c| c.is_ascii_alphanumeric());
            if !valid {
                return Err(format!("invalid dependent variable name {n:?}"));
            }
            if RESERVED.contains(&n) {
                return Err(format!("dependent variable name {n:?} is reserved"));
            }
            if dependent.iter().any(|d: &String| d == n) {
                return Err(format!("duplicate dependent variable name {n:?}"));
            }
            dependent.push(n.to_string());
        }
        if dependent.is_empty() {
            return Err("at least one dependent variable is required".into());
        }
        Ok(VarNames { dependent, params: Vec::new() })
    }

    /// Attach display labels for `Param` coordinates (e.g. `M11`, `M12`).
    pub fn with_params<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Self {
        self.params = labels.into_iter().map(Into::into).collect();
        self
    }

    pub fn m(&self) -> usize {
        self.dependent.len()
    }

    pub fn dependent(&self) -> &[String] {
        &self.dependent
    }

    pub fn name(&self, c: &Coordinate) -> String {
        let dep = |i: usize| {
            self.dependent
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("u{}", i + 1))
        };
        match *c {
            Coordinate::X => "x".into(),
            Coordinate::Y => "y".into(),
            Coordinate::U(i) => dep(i),
            Coordinate::Ux(i) => format!("{}_x", dep(i)),
            Coordinate::Uy(i) => format!("{}_y", dep(i)),
            Coordinate::Uxx(i) => format!("{}_xx", dep(i)),
            Coordinate::Uxy(i) => format!("{}_xy", dep(i)),
            Coordinate::Uyy(i) => format!("{}_yy", dep(i)),
            Coordinate::Param(i) => self
                .params
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("c{}", i + 1)),
        }
    }

    /// Resolve an identifier. `Err(Some(i))` reports an indexed name `u<i>`
    /// whose index exceeds `m`; `Err(None)` an unknown identifier.
    pub(crate) fn lookup(&self, ident: &str) -> Result<Coordinate, Option<usize>> {
        match ident {
            "x" => return Ok(Coordinate::X),
            "y" => return Ok(Coordinate::Y),
            _ => {}
        }
        if let Some(i) = self.params.iter().position(|p| p == ident) {
            return Ok(Coordinate::Param(i));
        }
        let (base, suffix) = match ident.find('_') {
            Some(pos) => (&ident[..pos], &ident[pos + 1..]),
            None => (ident, ""),
        };
        let Some(i) = self.dependent.iter().position(|d| d == base) else {
            // u7 with m = 2 is an index error rather than an unknown name.
            if let Some(digits) = base.strip_prefix('u') {
                if let Ok(k) = digits.parse::<usize>() {
                    if k > self.m() && self.dependent.iter().all(|d| d.starts_with('u')) {
                        return Err(Some(k));
                    }
                }
            }
            return Err(None);
        };
        match suffix {
            "" => Ok(Coordinate::U(i)),
            "x" => Ok(Coordinate::Ux(i)),
            "y" => Ok(Coordinate::Uy(i)),
            "xx" => Ok(Coordinate::Uxx(i)),
            "yy" => Ok(Coordinate::Uyy(i)),
            "xy" | "yx" => Ok(Coordinate::Uxy(i)),
            _ => Err(None),
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&VarNames::indexed(0).name(self))
    }
}
