//! Exact rational plane geometry.
//!
//! Every coordinate, parameter and time in the crate is a [`Rational`]; distances
//! are only ever compared through their squares, so no value is ever rounded.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` when `q == 1`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p"`, `"p/q"` (q ≠ 0) or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_digits.is_empty() { "0" } else { whole_digits }, frac);
        let mut n = BigInt::from_str(&digits).map_err(|_| err())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

/// Serde adapter storing a rational as its canonical string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => parse_rational(&s).map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(int(i)),
        }
    }
}

/// A point in the plane with exact coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    pub fn dist_sq(&self, other: &Point) -> Rational {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }

    /// `self + s * dir`.
    pub fn offset(&self, dir: AxisDir, s: &Rational) -> Point {
        let (dx, dy) = dir.components();
        Point::new(&self.x + s * int(dx), &self.y + s * int(dy))
    }

    /// `(self - from) · dir`.
    pub fn dot_from(&self, from: &Point, dir: AxisDir) -> Rational {
        match dir {
            AxisDir::Right => &self.x - &from.x,
            AxisDir::Left => &from.x - &self.x,
            AxisDir::Up => &self.y - &from.y,
            AxisDir::Down => &from.y - &self.y,
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// One of the four axis-aligned unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisDir {
    Right,
    Left,
    Up,
    Down,
}

impl AxisDir {
    pub const ALL: [AxisDir; 4] = [AxisDir::Right, AxisDir::Left, AxisDir::Up, AxisDir::Down];

    pub fn components(self) -> (i64, i64) {
        match self {
            AxisDir::Right => (1, 0),
            AxisDir::Left => (-1, 0),
            AxisDir::Up => (0, 1),
            AxisDir::Down => (0, -1),
        }
    }

    pub fn opposite(self) -> AxisDir {
        match self {
            AxisDir::Right => AxisDir::Left,
            AxisDir::Left => AxisDir::Right,
            AxisDir::Up => AxisDir::Down,
            AxisDir::Down => AxisDir::Up,
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            AxisDir::Right | AxisDir::Left => Orientation::Horizontal,
            AxisDir::Up | AxisDir::Down => Orientation::Vertical,
        }
    }

    /// Unit direction from `a` to `b` when they differ in exactly one coordinate.
    pub fn between(a: &Point, b: &Point) -> Option<AxisDir> {
        match (a.x == b.x, a.y == b.y) {
            (true, false) => Some(if b.y > a.y { AxisDir::Up } else { AxisDir::Down }),
            (false, true) => Some(if b.x > a.x { AxisDir::Right } else { AxisDir::Left }),
            _ => None,
        }
    }

    /// Dot product of two axis units: 1, 0 or -1.
    pub fn dot(self, other: AxisDir) -> i64 {
        let (a, b) = self.components();
        let (c, d) = other.components();
        a * c + b * d
    }
}

/// Length of an axis-aligned segment.
pub fn axis_length(a: &Point, b: &Point) -> Rational {
    (&a.x - &b.x).abs() + (&a.y - &b.y).abs()
}

pub fn min_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}
