//! Dense complex polynomials and simultaneous root finding.

use num_complex::Complex64;

use super::RatmapError;

const EPS: f64 = f64::EPSILON;
const MAX_ITERATIONS: usize = 2000;

/// Coefficients lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `(z - root)^multiplicity`.
    pub fn linear_power(root: Complex64, multiplicity: u32) -> Self {
        let factor = Self::new(vec![-root, Complex64::new(1.0, 0.0)]);
        factor.pow(multiplicity)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Coefficient of `z^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// `sum |a_i| |z|^i`, the size of the terms that cancel in `eval`.
    pub fn magnitude_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Coefficientwise absolute values.
    pub fn magnitude(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| Complex64::new(c.norm(), 0.0))
                .collect(),
        )
    }

    /// Zeroes each coefficient at most `rel` times the matching coefficient
    /// of `bound`, a bound on the terms it was summed from.
    pub fn snapped_against(&self, bound: &Poly, rel: f64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    if c.norm() <= rel * bound.coeff(i).norm() {
                        Complex64::default()
                    } else {
                        c
                    }
                })
                .collect(),
        )
    }

    /// Coefficients of the expansion about `z0`: `c_j = p^(j)(z0) / j!`.
    pub fn taylor_at(&self, z0: Complex64) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for j in 0..n {
            for i in (j..n - 1).rev() {
                let next = c[i + 1];
                c[i] += next * z0;
            }
        }
        c
    }

    /// All roots with multiplicity. Exact zero low-order coefficients give
    /// exact zero roots; the rest come from Aberth-Ehrlich iteration.
    pub fn roots(&self) -> Result<Vec<Complex64>, RatmapError> {
        let Some(n) = self.degree() else {
            return Err(RatmapError::RootFindingFailure("zero polynomial".into()));
        };
        let zeros = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let mut roots = vec![Complex64::default(); zeros];
        let reduced = Self::new(self.coeffs[zeros..].to_vec());
        match n - zeros {
            0 => {}
            1 => roots.push(-reduced.coeffs[0] / reduced.coeffs[1]),
            _ => roots.extend(aberth(&reduced)?),
        }
        Ok(roots)
    }
}

fn aberth(p: &Poly) -> Result<Vec<Complex64>, RatmapError> {
    let n = p.degree().unwrap_or(0);
    let dp = p.derivative();
    let radius = (p.coeffs[0].norm() / p.leading().norm()).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut settled = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        for k in 0..n {
            if settled[k] {
                continue;
            }
            let value = p.eval(z[k]);
            if value.norm() <= 4.0 * EPS * p.magnitude_at(z[k]) {
                settled[k] = true;
                continue;
            }
            let ratio = value / dp.eval(z[k]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                settled[k] = true;
                continue;
            }
            z[k] -= step;
            if step.norm() <= EPS * z[k].norm() {
                settled[k] = true;
            }
        }
        if settled.iter().all(|&s| s) {
            break;
        }
    }
    for &root in &z {
        let residual = relative_residual(p, root);
        if residual.is_nan() || residual >= 1e-8 {
            return Err(RatmapError::RootFindingFailure(format!(
                "residual {residual:e} at {root} for degree {n}"
            )));
        }
    }
    Ok(z)
}

/// `|p(z)| / sum |a_i| |z|^i`.
pub fn relative_residual(p: &Poly, z: Complex64) -> f64 {
    let scale = p.magnitude_at(z);
    if scale == 0.0 {
        0.0
    } else {
        p.eval(z).norm() / scale
    }
}
