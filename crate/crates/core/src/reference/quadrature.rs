//! Grundmann–Möller rules on the unit simplex in one, two and three
//! dimensions, certified against exact monomial moments when built.
//!
//! A rule of index `s` integrates polynomials of total degree `2s + 1`
//! exactly. Weights alternate in sign for `s >= 1`.

use crate::{Error, Result, Vec3};

/// Largest exactness degree offered. Higher Grundmann–Möller indices lose
/// too many digits to cancellation to pass certification at 1e-12.
pub const MAX_EXACTNESS: usize = 15;

/// Relative tolerance used when certifying a rule.
pub const CERTIFICATION_TOL: f64 = 1e-12;

/// Points and weights on the unit simplex of dimension `D`.
#[derive(Clone, Debug)]
pub struct SimplexRule<const D: usize> {
    points: Vec<[f64; D]>,
    weights: Vec<f64>,
    exactness: usize,
}

/// Rule on the reference tetrahedron.
pub type QuadratureRule = SimplexRule<3>;
/// Rule on the reference triangle `{(s, t): s, t >= 0, s + t <= 1}`.
pub type TriangleRule = SimplexRule<2>;
/// Rule on `[0, 1]`.
pub type LineRule = SimplexRule<1>;

/// Certified tetrahedron rule with exactness at least `requested`.
pub fn quadrature(requested: usize) -> Result<QuadratureRule> {
    SimplexRule::new(requested)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Exact integral of `prod x_i^{a_i}` over the unit simplex of dimension `a.len()`.
pub fn simplex_moment(a: &[u32]) -> f64 {
    let total: u32 = a.iter().sum();
    let num: f64 = a.iter().map(|&k| factorial(k)).product();
    // divide stepwise to stay in range
    let mut den = 1.0;
    for k in 1..=(total + a.len() as u32) {
        den *= k as f64;
    }
    num / den
}

/// All exponent vectors of length `D` with total degree <= `degree`.
pub fn monomial_exponents<const D: usize>(degree: usize) -> Vec<[u32; D]> {
    let mut out = Vec::new();
    let mut e = [0u32; D];
    fn rec<const D: usize>(i: usize, left: u32, e: &mut [u32; D], out: &mut Vec<[u32; D]>) {
        if i == D {
            out.push(*e);
            return;
        }
        for k in 0..=left {
            e[i] = k;
            rec(i + 1, left - k, e, out);
        }
        e[i] = 0;
    }
    rec(0, degree as u32, &mut e, &mut out);
    out
}

/// Compositions of `total` into `parts` non-negative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl<const D: usize> SimplexRule<D> {
    /// Smallest Grundmann–Möller rule with exactness `>= requested`, certified.
    pub fn new(requested: usize) -> Result<Self> {
        if requested > MAX_EXACTNESS {
            return Err(Error::QuadratureUnavailable {
                requested,
                max: MAX_EXACTNESS,
            });
        }
        let s = requested.saturating_sub(1).div_ceil(2);
        let rule = Self::grundmann_moller(s);
        rule.certify()?;
        Ok(rule)
    }

    fn grundmann_moller(s: usize) -> Self {
        let n = D as i32;
        let d = 2 * s as i32 + 1;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for i in 0..=s as i32 {
            let denom = (d + n - 2 * i) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * 2f64.powi(-2 * s as i32) * denom.powi(d)
                / (factorial(i as u32) * factorial((d + n - i) as u32));
            for beta in compositions(s - i as usize, D + 1) {
                let mut p = [0.0; D];
                for (j, pj) in p.iter_mut().enumerate() {
                    *pj = (2 * beta[j + 1] + 1) as f64 / denom;
                }
                points.push(p);
                weights.push(w);
            }
        }
        SimplexRule {
            points,
            weights,
            exactness: 2 * s + 1,
        }
    }

    /// Check every monomial up to the declared exactness.
    pub fn certify(&self) -> Result<()> {
        for e in monomial_exponents::<D>(self.exactness) {
            let exact = simplex_moment(&e);
            let approx = self.integrate(|p| {
                p.iter()
                    .zip(e.iter())
                    .map(|(x, &k)| x.powi(k as i32))
                    .product()
            });
            let err = ((approx - exact) / exact).abs();
            if !(err <= CERTIFICATION_TOL) {
                return Err(Error::QuadratureCertification {
                    degree: self.exactness,
                    exponents: e.to_vec(),
                    error: err,
                });
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[[f64; D]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64; D]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(self.weights.iter())
            .map(|(p, w)| w * f(p))
            .sum()
    }

    /// `(point, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64; D], f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

impl QuadratureRule {
    pub fn point(&self, i: usize) -> Vec3 {
        let p = self.points[i];
        Vec3::new(p[0], p[1], p[2])
    }
}
