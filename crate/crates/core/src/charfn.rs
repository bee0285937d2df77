//! Exact characteristic-function algebra.
//!
//! Every characteristic function the library handles is a finite sum of terms
//!
//! ```text
//! coeff · poly(ζr, ζi) · exp(−a ζr²/2 − b ζi²/2 + i u ζr + i v ζi)
//! ```
//!
//! with a real polynomial `poly`. The family is closed under argument scaling,
//! multiplication by Gaussians and phases, reflection, conjugation, linear
//! combination and pointwise products, which is all the phase-space calculus
//! needs. Full-plane integrals of these sums are evaluated in closed form by
//! [`crate::quasiprob::integrate_full_plane`].

use num_complex::Complex64;

/// Real polynomial in (ζr, ζi). Coefficient `(i, j)` multiplies `ζr^i ζi^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    deg_r: usize,
    deg_i: usize,
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            deg_r: 0,
            deg_i: 0,
            coeffs: vec![c],
        }
    }

    /// Builds a polynomial from `(power_r, power_i, coefficient)` triples.
    /// Repeated monomials accumulate.
    pub fn from_monomials(monomials: &[(usize, usize, f64)]) -> Self {
        let deg_r = monomials.iter().map(|m| m.0).max().unwrap_or(0);
        let deg_i = monomials.iter().map(|m| m.1).max().unwrap_or(0);
        let mut p = Self {
            deg_r,
            deg_i,
            coeffs: vec![0.0; (deg_r + 1) * (deg_i + 1)],
        };
        for &(i, j, c) in monomials {
            let k = p.index(i, j);
            p.coeffs[k] += c;
        }
        p
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * (self.deg_i + 1) + j
    }

    pub fn degree_r(&self) -> usize {
        self.deg_r
    }

    pub fn degree_i(&self) -> usize {
        self.deg_i
    }

    /// Coefficient of `ζr^i ζi^j` (zero outside the stored degree box).
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i > self.deg_r || j > self.deg_i {
            0.0
        } else {
            self.coeffs[self.index(i, j)]
        }
    }

    /// Iterates the nonzero monomials as `(i, j, coefficient)`.
    pub fn monomials(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.deg_r)
            .flat_map(move |i| (0..=self.deg_i).map(move |j| (i, j)))
            .map(move |(i, j)| (i, j, self.coeff(i, j)))
            .filter(|m| m.2 != 0.0)
    }

    pub fn eval(&self, zr: f64, zi: f64) -> f64 {
        // Horner in ζr over Horner-in-ζi rows.
        let mut acc = 0.0;
        for i in (0..=self.deg_r).rev() {
            let mut row = 0.0;
            for j in (0..=self.deg_i).rev() {
                row = row * zi + self.coeff(i, j);
            }
            acc = acc * zr + row;
        }
        acc
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly {
            deg_r: self.deg_r + other.deg_r,
            deg_i: self.deg_i + other.deg_i,
            coeffs: vec![0.0; (self.deg_r + other.deg_r + 1) * (self.deg_i + other.deg_i + 1)],
        };
        for (i1, j1, c1) in self.monomials() {
            for (i2, j2, c2) in other.monomials() {
                let k = out.index(i1 + i2, j1 + j2);
                out.coeffs[k] += c1 * c2;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    /// `p(k ζr, k ζi)`.
    pub fn scale_arg(&self, k: f64) -> Poly {
        let mut out = self.clone();
        for i in 0..=self.deg_r {
            for j in 0..=self.deg_i {
                let idx = out.index(i, j);
                out.coeffs[idx] *= k.powi((i + j) as i32);
            }
        }
        out
    }

    /// `p(−ζr, −ζi)`.
    pub fn reflect(&self) -> Poly {
        self.scale_arg(-1.0)
    }
}

/// One `coeff · poly · Gaussian · phase` term.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussTerm {
    pub coeff: Complex64,
    pub poly: Poly,
    /// Decay rate along ζr (exponent −a ζr²/2).
    pub a: f64,
    /// Decay rate along ζi (exponent −b ζi²/2).
    pub b: f64,
    /// Linear frequency along ζr (factor exp(i u ζr)). A non-real `u` encodes
    /// a real exponential tilt, as in the cross terms of a cat state.
    pub u: Complex64,
    /// Linear frequency along ζi.
    pub v: Complex64,
}

impl GaussTerm {
    pub fn gaussian(a: f64, b: f64) -> Self {
        Self {
            coeff: Complex64::new(1.0, 0.0),
            poly: Poly::one(),
            a,
            b,
            u: Complex64::new(0.0, 0.0),
            v: Complex64::new(0.0, 0.0),
        }
    }

    pub fn eval(&self, zr: f64, zi: f64) -> Complex64 {
        let exponent = Complex64::new(-0.5 * (self.a * zr * zr + self.b * zi * zi), 0.0)
            + Complex64::i() * (self.u * zr + self.v * zi);
        self.coeff * self.poly.eval(zr, zi) * exponent.exp()
    }
}

/// Finite sum of [`GaussTerm`]s; the representation of every characteristic
/// function in the library.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuadGaussSum {
    terms: Vec<GaussTerm>,
}

impl QuadGaussSum {
    pub fn new(terms: Vec<GaussTerm>) -> Self {
        Self { terms }
    }

    /// `exp(−a ζr²/2 − b ζi²/2)`.
    pub fn gaussian(a: f64, b: f64) -> Self {
        Self::new(vec![GaussTerm::gaussian(a, b)])
    }

    /// Vacuum characteristic function `exp(−|ζ|²/2)`.
    pub fn vacuum() -> Self {
        Self::gaussian(1.0, 1.0)
    }

    /// One-photon Fock state, `⟨1|D(ζ)|1⟩ = e^{−|ζ|²/2}(1 − |ζ|²)`.
    pub fn fock_one() -> Self {
        Self::new(vec![GaussTerm {
            poly: Poly::from_monomials(&[(0, 0, 1.0), (2, 0, -1.0), (0, 2, -1.0)]),
            ..GaussTerm::gaussian(1.0, 1.0)
        }])
    }

    pub fn terms(&self) -> &[GaussTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, zr: f64, zi: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(zr, zi)).sum()
    }

    pub fn eval_complex(&self, zeta: Complex64) -> Complex64 {
        self.eval(zeta.re, zeta.im)
    }

    fn map_terms(&self, f: impl Fn(&GaussTerm) -> GaussTerm) -> Self {
        Self::new(self.terms.iter().map(f).collect())
    }

    /// `C(k ζ)`.
    pub fn scale_arg(&self, k: f64) -> Self {
        self.map_terms(|t| GaussTerm {
            coeff: t.coeff,
            poly: t.poly.scale_arg(k),
            a: t.a * k * k,
            b: t.b * k * k,
            u: t.u * k,
            v: t.v * k,
        })
    }

    /// Multiplies by `exp(−da ζr²/2 − db ζi²/2)`; negative shifts are allowed.
    pub fn mul_gaussian(&self, da: f64, db: f64) -> Self {
        self.map_terms(|t| GaussTerm {
            a: t.a + da,
            b: t.b + db,
            ..t.clone()
        })
    }

    /// Multiplies by `exp(i du ζr + i dv ζi)`.
    pub fn mul_phase(&self, du: Complex64, dv: Complex64) -> Self {
        self.map_terms(|t| GaussTerm {
            u: t.u + du,
            v: t.v + dv,
            ..t.clone()
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_terms(|t| GaussTerm {
            coeff: t.coeff * c,
            ..t.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms)
    }

    /// `w · self + (1 − w) · other`.
    pub fn convex(&self, other: &Self, w: f64) -> Self {
        self.scale(Complex64::new(w, 0.0))
            .add(&other.scale(Complex64::new(1.0 - w, 0.0)))
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for s in &self.terms {
            for o in &other.terms {
                terms.push(GaussTerm {
                    coeff: s.coeff * o.coeff,
                    poly: s.poly.mul(&o.poly),
                    a: s.a + o.a,
                    b: s.b + o.b,
                    u: s.u + o.u,
                    v: s.v + o.v,
                });
            }
        }
        Self::new(terms)
    }

    /// `ζ ↦ C(−ζ)`.
    pub fn reflect(&self) -> Self {
        self.map_terms(|t| GaussTerm {
            coeff: t.coeff,
            poly: t.poly.reflect(),
            a: t.a,
            b: t.b,
            u: -t.u,
            v: -t.v,
        })
    }

    /// `ζ ↦ C(ζ)*`.
    pub fn conj(&self) -> Self {
        self.map_terms(|t| GaussTerm {
            coeff: t.coeff.conj(),
            poly: t.poly.clone(),
            a: t.a,
            b: t.b,
            u: -t.u.conj(),
            v: -t.v.conj(),
        })
    }

    /// Largest deviation from `C(−ζ) = C(ζ)*` over the given points.
    pub fn hermiticity_defect(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(zr, zi)| (self.eval(-zr, -zi) - self.eval(zr, zi).conj()).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample() -> QuadGaussSum {
        QuadGaussSum::new(vec![
            GaussTerm {
                coeff: Complex64::new(0.7, 0.1),
                poly: Poly::from_monomials(&[(0, 0, 1.0), (2, 0, -0.3), (1, 1, 0.2)]),
                a: 1.3,
                b: 0.8,
                u: Complex64::new(0.4, 0.2),
                v: Complex64::new(-1.1, 0.0),
            },
            GaussTerm::gaussian(2.0, 0.5),
        ])
    }

    #[test]
    fn poly_eval_and_product() {
        let p = Poly::from_monomials(&[(0, 0, 1.0), (2, 0, -2.0), (0, 1, 3.0)]);
        let q = Poly::from_monomials(&[(1, 1, 0.5), (0, 0, 2.0)]);
        let (x, y) = (0.7, -1.3);
        assert_abs_diff_eq!(p.eval(x, y), 1.0 - 2.0 * x * x + 3.0 * y, epsilon = 1e-15);
        assert_abs_diff_eq!(p.mul(&q).eval(x, y), p.eval(x, y) * q.eval(x, y), epsilon = 1e-14);
        assert_abs_diff_eq!(p.scale_arg(2.0).eval(x, y), p.eval(2.0 * x, 2.0 * y), epsilon = 1e-14);
        assert_eq!(p.coeff(5, 5), 0.0);
    }

    #[test]
    fn structural_ops_match_pointwise_definitions() {
        let c = sample();
        let d = QuadGaussSum::gaussian(0.9, 1.7).mul_phase(Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0));
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.8), (-1.2, 0.5), (2.0, 1.0)] {
            assert_abs_diff_eq!((c.reflect().eval(x, y) - c.eval(-x, -y)).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!((c.conj().eval(x, y) - c.eval(x, y).conj()).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!((c.scale_arg(0.6).eval(x, y) - c.eval(0.6 * x, 0.6 * y)).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!((c.product(&d).eval(x, y) - c.eval(x, y) * d.eval(x, y)).norm(), 0.0, epsilon = 1e-14);
            let mixed = c.convex(&d, 0.3).eval(x, y);
            assert_abs_diff_eq!((mixed - (0.3 * c.eval(x, y) + 0.7 * d.eval(x, y))).norm(), 0.0, epsilon = 1e-14);
            let g = c.mul_gaussian(0.5, -0.2).eval(x, y);
            let expect = c.eval(x, y) * (-0.25 * x * x + 0.1 * y * y).exp();
            assert_abs_diff_eq!((g - expect).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn vacuum_is_hermitian_and_normalized() {
        let v = QuadGaussSum::vacuum();
        assert_eq!(v.eval(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(v.eval(1.0, 1.0).re, (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(v.hermiticity_defect(&[(0.3, 0.4), (1.0, -2.0)]), 0.0);
    }
}
