//! Rational maps as numerator/denominator pairs.

use num_complex::Complex64;

use super::moebius::{Moebius, Point};
use super::poly::{relative_residual, Poly};
use super::report::Fiber;
use super::RatmapError;

/// Coefficients this small relative to the terms they were summed from are
/// treated as cancelled.
pub(crate) const CANCELLED: f64 = 1e-13;
/// Relative residual below which a root of the denominator also kills the numerator.
const COMMON_ROOT: f64 = 1e-8;
/// A Taylor coefficient above this size relative to its rounding bound is nonzero.
const NONZERO: f64 = 1e-8;
/// A Taylor coefficient below this relative size is zero.
const VANISHING: f64 = 1e-14;
/// Log-derivative sums are well conditioned; this absorbs the location error
/// of numerically found critical points.
const FACTORED_VANISHING: f64 = 1e-11;

/// The product form `scale * prod (z - z_i)^x_i / prod (z - w_j)^y_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factored {
    pub scale: Complex64,
    pub zeros: Vec<(Complex64, u32)>,
    pub poles: Vec<(Complex64, u32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
    factored: Option<Factored>,
}

/// Which side of the map a Möbius transformation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Post-composition: moves branch values.
    Target,
    /// Pre-composition: moves points of the source.
    Source,
}

impl RationalMap {
    /// Rejects constant maps and numerators sharing a root with the denominator.
    pub fn from_coefficients(num: Poly, den: Poly) -> Result<Self, RatmapError> {
        let map = Self {
            num,
            den,
            factored: None,
        };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<(), RatmapError> {
        if self.den.is_zero() {
            return Err(RatmapError::ConstantMap("zero denominator".into()));
        }
        if self.degree() == 0 || self.num.is_zero() {
            return Err(RatmapError::ConstantMap("map has degree 0".into()));
        }
        if self.den.degree().unwrap_or(0) > 0 && self.num.degree().unwrap_or(0) > 0 {
            for root in self.den.roots()? {
                let residual = relative_residual(&self.num, root);
                if residual < COMMON_ROOT {
                    return Err(RatmapError::CommonFactor(Point::Finite(root).to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn factored(&self) -> Option<&Factored> {
        self.factored.as_ref()
    }

    pub fn degree(&self) -> u32 {
        self.num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0)) as u32
    }

    pub fn eval(&self, z: Point) -> Point {
        match z {
            Point::Finite(z) => Point::quotient(self.num.eval(z), self.den.eval(z)),
            Point::Infinity => {
                let (n, d) = (
                    self.num.degree().unwrap_or(0),
                    self.den.degree().unwrap_or(0),
                );
                match n.cmp(&d) {
                    std::cmp::Ordering::Greater => Point::Infinity,
                    std::cmp::Ordering::Less => Point::finite(0.0, 0.0),
                    std::cmp::Ordering::Equal => {
                        Point::quotient(self.num.leading(), self.den.leading())
                    }
                }
            }
        }
    }

    /// `f'(z)`, or `None` at a pole.
    pub fn derivative_at(&self, z: Complex64) -> Option<Complex64> {
        let d = self.den.eval(z);
        if d == Complex64::default() {
            return None;
        }
        let w =
            self.num.derivative().eval(z) * d - self.num.eval(z) * self.den.derivative().eval(z);
        let out = w / (d * d);
        out.is_finite().then_some(out)
    }

    /// `N' D - N D'`, whose roots are the finite critical points.
    pub fn wronskian(&self) -> Poly {
        let (n, d) = (&self.num, &self.den);
        let bound = n
            .derivative()
            .magnitude()
            .mul(&d.magnitude())
            .add(&n.magnitude().mul(&d.derivative().magnitude()));
        n.derivative()
            .mul(d)
            .sub(&n.mul(&d.derivative()))
            .snapped_against(&bound, CANCELLED)
    }

    /// Local degree at infinity, read from the degrees of `N` and `D`.
    pub fn degree_at_infinity(&self) -> u32 {
        let d = self.degree() as usize;
        let (n, m) = (
            self.num.degree().unwrap_or(0),
            self.den.degree().unwrap_or(0),
        );
        if n != m {
            return n.abs_diff(m) as u32;
        }
        let v = self.num.leading() / self.den.leading();
        let bound = self
            .num
            .magnitude()
            .add(&self.den.magnitude().scale(Complex64::new(v.norm(), 0.0)));
        let rest = self
            .num
            .sub(&self.den.scale(v))
            .snapped_against(&bound, CANCELLED);
        (d - rest.degree().unwrap_or(0)) as u32
    }

    /// `z -> f(1/z)` written over the common degree.
    fn conjugated(&self) -> (Poly, Poly) {
        let d = self.degree() as usize;
        let rev = |p: &Poly| Poly::new((0..=d).map(|i| p.coeff(d - i)).collect());
        (rev(&self.num), rev(&self.den))
    }
}

fn duplicate(points: &[Complex64]) -> Option<Complex64> {
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if Point::Finite(*a).chordal(&Point::Finite(*b)) < 1e-12 {
                return Some(*a);
            }
        }
    }
    None
}

/// `prod (z - z_i)^x_i / prod (z - w_j)^y_j`. A multiplicity deficit between
/// zeros and poles sits at infinity.
pub fn build_map(
    zeros: &[(Complex64, u32)],
    poles: &[(Complex64, u32)],
) -> Result<RationalMap, RatmapError> {
    build_scaled(Complex64::new(1.0, 0.0), zeros, poles)
}

pub fn build_scaled(
    scale: Complex64,
    zeros: &[(Complex64, u32)],
    poles: &[(Complex64, u32)],
) -> Result<RationalMap, RatmapError> {
    if zeros.iter().chain(poles).any(|&(_, m)| m == 0) {
        return Err(RatmapError::InvalidMultiplicity);
    }
    if scale == Complex64::default() || !scale.is_finite() {
        return Err(RatmapError::ConstantMap(
            "scale must be finite and nonzero".into(),
        ));
    }
    let locations: Vec<Complex64> = zeros.iter().chain(poles).map(|&(z, _)| z).collect();
    if let Some(z) = duplicate(&locations) {
        return Err(RatmapError::DuplicateLocation(Point::Finite(z).to_string()));
    }
    let product = |items: &[(Complex64, u32)]| {
        let exact = items.iter().fold(Poly::one(), |acc, &(z, m)| {
            acc.mul(&Poly::linear_power(z, m))
        });
        let bound = items.iter().fold(Poly::one(), |acc, &(z, m)| {
            acc.mul(&Poly::linear_power(Complex64::new(-z.norm(), 0.0), m))
        });
        exact.snapped_against(&bound, CANCELLED)
    };
    let map = RationalMap {
        num: product(zeros).scale(scale),
        den: product(poles),
        factored: Some(Factored {
            scale,
            zeros: zeros.to_vec(),
            poles: poles.to_vec(),
        }),
    };
    if map.degree() == 0 {
        return Err(RatmapError::ConstantMap("no zeros or poles".into()));
    }
    Ok(map)
}

/// `g^r`. The product form, when present, has its multiplicities scaled.
pub fn power(g: &RationalMap, r: u32) -> RationalMap {
    RationalMap {
        num: g
            .num
            .pow(r)
            .snapped_against(&g.num.magnitude().pow(r), CANCELLED),
        den: g
            .den
            .pow(r)
            .snapped_against(&g.den.magnitude().pow(r), CANCELLED),
        factored: g.factored.as_ref().map(|f| Factored {
            scale: f.scale.powu(r),
            zeros: f.zeros.iter().map(|&(z, m)| (z, m * r)).collect(),
            poles: f.poles.iter().map(|&(w, m)| (w, m * r)).collect(),
        }),
    }
}

/// The order of the first nonvanishing derivative of `f - f(z0)` at `z0`.
///
/// Maps with a product form are read off `log f`, whose `k`-th Taylor
/// coefficient at `z0` is proportional to `sum m_i / (z0 - a_i)^k` over zeros
/// minus the same over poles. Otherwise, or when that is inconclusive, poles
/// go through `1/f`, infinity through `f(1/z)` at 0, and ambiguous
/// derivatives through counting the fiber points at `z0`. Failure of all of
/// these gives `IllConditioned`.
pub fn local_degree(f: &RationalMap, z0: Point) -> Result<u32, RatmapError> {
    match z0 {
        Point::Infinity => {
            let (n, d) = f.conjugated();
            local_degree_finite(&n, &d, Complex64::default())
        }
        Point::Finite(z) => match f
            .factored
            .as_ref()
            .and_then(|fac| local_degree_factored(fac, f.degree(), z))
        {
            Some(order) => Ok(order),
            None => local_degree_finite(&f.num, &f.den, z),
        },
    }
}

fn local_degree_factored(f: &Factored, degree: u32, z0: Complex64) -> Option<u32> {
    let located = || {
        f.zeros
            .iter()
            .map(|&(a, m)| (a, f64::from(m)))
            .chain(f.poles.iter().map(|&(b, m)| (b, -f64::from(m))))
    };
    let near = f64::EPSILON.sqrt() * z0.norm().max(1.0);
    if let Some((_, m)) = located().find(|(a, _)| (a - z0).norm() < near) {
        return Some(m.abs() as u32);
    }
    for k in 1..=degree as i32 {
        let (sum, bound) = located().fold((Complex64::default(), 0.0), |(s, b), (a, m)| {
            let term = (z0 - a).powi(-k);
            (s + term * m, b + term.norm() * m.abs())
        });
        let ratio = sum.norm() / bound;
        if ratio > NONZERO {
            return Some(k as u32);
        }
        if ratio > FACTORED_VANISHING {
            return None;
        }
    }
    None
}

fn local_degree_finite(num: &Poly, den: &Poly, z0: Complex64) -> Result<u32, RatmapError> {
    let (num, den) = if relative_residual(den, z0) < VANISHING {
        (den, num)
    } else {
        (num, den)
    };
    let fiber = Fiber::new(num, den, Point::Finite(num.eval(z0) / den.eval(z0)));
    let ratios = fiber.ratios(z0);
    let mut unresolved = (ratios.len() as u32, 0.0);
    for (j, &ratio) in ratios.iter().enumerate().skip(1) {
        if ratio > NONZERO {
            return Ok(j as u32);
        }
        if ratio > VANISHING {
            unresolved = (j as u32, ratio);
            break;
        }
    }
    // Ambiguous derivatives: count the fiber points clustered at z0.
    let (order, ratio) = unresolved;
    match fiber.multiplicity_at(z0)? {
        Some(m) if m >= order.min(fiber.poly().degree().unwrap_or(0) as u32) => Ok(m),
        _ => Err(RatmapError::IllConditioned {
            point: Point::Finite(z0).to_string(),
            order,
            ratio,
        }),
    }
}

/// Composes `f` with the Möbius map sending `from` to `to`, on the chosen side.
pub fn apply_moebius(
    f: &RationalMap,
    from: &[Point; 3],
    to: &[Point; 3],
    side: Side,
) -> Result<RationalMap, RatmapError> {
    let m = Moebius::from_triples(from, to)?;
    let (num, den) = match side {
        Side::Target => {
            let combine = |x: Complex64, y: Complex64| {
                let bound = f
                    .num
                    .magnitude()
                    .scale(Complex64::new(x.norm(), 0.0))
                    .add(&f.den.magnitude().scale(Complex64::new(y.norm(), 0.0)));
                f.num
                    .scale(x)
                    .add(&f.den.scale(y))
                    .snapped_against(&bound, CANCELLED)
            };
            (combine(m.a, m.b), combine(m.c, m.d))
        }
        Side::Source => {
            let inv = m.inverse();
            let d = f.degree();
            let substitute = |p: &Poly, absolute: bool| {
                let fix = |c: Complex64| {
                    if absolute {
                        Complex64::new(c.norm(), 0.0)
                    } else {
                        c
                    }
                };
                let top = Poly::new(vec![fix(inv.b), fix(inv.a)]);
                let bottom = Poly::new(vec![fix(inv.d), fix(inv.c)]);
                (0..=d).fold(Poly::zero(), |acc, i| {
                    let term = top
                        .pow(i)
                        .mul(&bottom.pow(d - i))
                        .scale(fix(p.coeff(i as usize)));
                    acc.add(&term)
                })
            };
            (
                substitute(&f.num, false).snapped_against(&substitute(&f.num, true), CANCELLED),
                substitute(&f.den, false).snapped_against(&substitute(&f.den, true), CANCELLED),
            )
        }
    };
    RationalMap::from_coefficients(num, den)
}
