//! Points of the extended plane and Möbius transformations.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::RatmapError;

/// Points closer than this in the chordal metric count as equal in a triple.
const DISTINCT: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn finite(re: f64, im: f64) -> Self {
        Self::Finite(Complex64::new(re, im))
    }

    /// Maps non-finite numbers to infinity.
    pub fn from_complex(z: Complex64) -> Self {
        if z.is_finite() {
            Self::Finite(z)
        } else {
            Self::Infinity
        }
    }

    /// `a / b`, infinity when `b` is zero.
    pub fn quotient(a: Complex64, b: Complex64) -> Self {
        if b == Complex64::default() {
            Self::Infinity
        } else {
            Self::from_complex(a / b)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    /// Distance on the Riemann sphere of diameter 2; at most 2.
    pub fn chordal(&self, other: &Self) -> f64 {
        match (self, other) {
            (Self::Infinity, Self::Infinity) => 0.0,
            (Self::Finite(z), Self::Infinity) | (Self::Infinity, Self::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (Self::Finite(z), Self::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }

    /// Total order for reports: finite points by real then imaginary part, infinity last.
    pub fn report_order(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Self::Infinity, Self::Infinity) => std::cmp::Ordering::Equal,
            (Self::Infinity, _) => std::cmp::Ordering::Greater,
            (_, Self::Infinity) => std::cmp::Ordering::Less,
            (Self::Finite(a), Self::Finite(b)) => a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => f.write_str("inf"),
            Self::Finite(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Self::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Infinity => serializer.serialize_str("infinity"),
            Self::Finite(z) => {
                use serde::ser::SerializeStruct;
                let mut s = serializer.serialize_struct("Point", 2)?;
                s.serialize_field("re", &z.re)?;
                s.serialize_field("im", &z.im)?;
                s.end()
            }
        }
    }
}

/// `z -> (a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// The map sending `p[0], p[1], p[2]` to `0, 1, infinity`.
    fn normalizing(p: &[Point; 3]) -> Result<Self, RatmapError> {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if p[i].chordal(&p[j]) < DISTINCT {
                return Err(RatmapError::DegenerateTriple);
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        let m = match *p {
            [Point::Infinity, Point::Finite(p2), Point::Finite(p3)] => Self {
                a: zero,
                b: p2 - p3,
                c: one,
                d: -p3,
            },
            [Point::Finite(p1), Point::Infinity, Point::Finite(p3)] => Self {
                a: one,
                b: -p1,
                c: one,
                d: -p3,
            },
            [Point::Finite(p1), Point::Finite(p2), Point::Infinity] => Self {
                a: one,
                b: -p1,
                c: zero,
                d: p2 - p1,
            },
            [Point::Finite(p1), Point::Finite(p2), Point::Finite(p3)] => Self {
                a: p2 - p3,
                b: -p1 * (p2 - p3),
                c: p2 - p1,
                d: -p3 * (p2 - p1),
            },
            _ => return Err(RatmapError::DegenerateTriple),
        };
        Ok(m)
    }

    /// The unique map sending `from[i]` to `to[i]`.
    pub fn from_triples(from: &[Point; 3], to: &[Point; 3]) -> Result<Self, RatmapError> {
        let s = Self::normalizing(from)?;
        let t = Self::normalizing(to)?;
        Ok(t.inverse().compose(&s))
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        match p {
            Point::Infinity => Point::quotient(self.a, self.c),
            Point::Finite(z) => Point::quotient(self.a * z + self.b, self.c * z + self.d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point, b: Point) -> bool {
        a.chordal(&b) < 1e-12
    }

    #[test]
    fn chordal_metric() {
        let zero = Point::finite(0.0, 0.0);
        assert_eq!(zero.chordal(&Point::Infinity), 2.0);
        assert!((Point::finite(1.0, 0.0).chordal(&Point::finite(-1.0, 0.0)) - 2.0).abs() < 1e-15);
        assert!(Point::finite(1e13, 0.0).chordal(&Point::Infinity) < 1e-12);
    }

    #[test]
    fn triples() {
        let from = [
            Point::finite(-1.0, 0.0),
            Point::finite(1.0, 0.0),
            Point::finite(0.0, 2.0),
        ];
        let to = [
            Point::finite(0.0, 0.0),
            Point::Infinity,
            Point::finite(0.0, 2.0),
        ];
        let m = Moebius::from_triples(&from, &to).unwrap();
        for (p, q) in from.iter().zip(&to) {
            assert!(close(m.apply(*p), *q), "{} -> {}", p, m.apply(*p));
        }
        let inv = m.inverse();
        for (p, q) in from.iter().zip(&to) {
            assert!(close(inv.apply(*q), *p));
        }
        assert!(matches!(
            Moebius::from_triples(
                &[Point::Infinity, Point::Infinity, Point::finite(0.0, 0.0)],
                &to
            ),
            Err(RatmapError::DegenerateTriple)
        ));
    }

    #[test]
    fn identity_triple() {
        let t = [
            Point::finite(0.0, 0.0),
            Point::finite(1.0, 0.0),
            Point::Infinity,
        ];
        let m = Moebius::from_triples(&t, &t).unwrap();
        let z = Point::finite(0.3, -0.7);
        assert!(close(m.apply(z), z));
    }
}
