//! Single-mode diagonal Gaussian states and their beam-split correlations.
//!
//! A state is described by the two widths of its Weyl characteristic function
//! `C(ξ) = exp(−A ξr²/2 − B ξi²/2)`; the vacuum is `A = B = 1` and squeezing by
//! `s > 0` narrows the ζr width, `A = e^{−2s}`.

use serde::Serialize;

use crate::charfn::QuadGaussSum;
use crate::error::{PsgError, Result};
use crate::EPS_TOL;

/// The `(A, B)` pair of a diagonal Gaussian characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianDiagState {
    a: f64,
    b: f64,
}

impl GaussianDiagState {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= 0.0 || a * b < 1.0 - EPS_TOL {
            return Err(PsgError::Unphysical { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn vacuum() -> Self {
        Self { a: 1.0, b: 1.0 }
    }

    /// Pure squeezed vacuum, `A = e^{−2s}`, `B = e^{2s}`.
    pub fn from_squeezing(s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(PsgError::InvalidParameter {
                name: "s",
                value: s,
                reason: "squeezing parameter must be finite",
            });
        }
        let b = (2.0 * s).exp();
        Ok(Self { a: 1.0 / b, b })
    }

    /// Pure squeezed vacuum parameterized by the anti-squeezed width `e^{2s}`.
    pub fn from_exp2s(exp2s: f64) -> Result<Self> {
        if !(exp2s.is_finite() && exp2s > 0.0) {
            return Err(PsgError::InvalidParameter {
                name: "exp2s",
                value: exp2s,
                reason: "must be a positive finite number",
            });
        }
        Self::from_squeezing(0.5 * exp2s.ln())
    }

    /// Squeezed thermal state with mean thermal photon number `nbar`.
    pub fn from_squeezed_thermal(s: f64, nbar: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(PsgError::InvalidParameter {
                name: "nbar",
                value: nbar,
                reason: "thermal photon number must be finite and >= 0",
            });
        }
        let pure = Self::from_squeezing(s)?;
        let width = 2.0 * nbar + 1.0;
        Ok(Self {
            a: pure.a * width,
            b: pure.b * width,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Inverse of [`Self::from_squeezed_thermal`]: `(s, nbar)`.
    pub fn squeezing_params(&self) -> (f64, f64) {
        let s = 0.25 * (self.b / self.a).ln();
        let nbar = (0.5 * ((self.a * self.b).sqrt() - 1.0)).max(0.0);
        (s, nbar)
    }

    pub fn is_pure(&self) -> bool {
        (self.a * self.b - 1.0).abs() <= EPS_TOL
    }

    /// Squeezed in the sense `A < 1 < B` assumed by the negativity thresholds.
    pub fn is_squeezed_standard(&self) -> bool {
        self.a < 1.0 && self.b > 1.0
    }

    /// The characteristic function as a single Gaussian term.
    pub fn char_fn(&self) -> QuadGaussSum {
        QuadGaussSum::gaussian(self.a, self.b)
    }

    /// Mixes with the vacuum on a beam splitter of transmittivity `t`.
    pub fn beamsplit_with_vacuum(&self, t: f64) -> Result<TwoModeCorrelation> {
        TwoModeCorrelation::new(*self, t)
    }
}

/// Entries of the two-mode correlation matrix after beam splitting
/// `(A, B) ⊗ vacuum`, with mode 1 transmitted and mode 2 reflected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeCorrelation {
    pub input: GaussianDiagState,
    pub t: f64,
    pub n1: f64,
    pub n2: f64,
    pub c1: f64,
    pub c2: f64,
    pub m1: f64,
    pub m2: f64,
}

impl TwoModeCorrelation {
    pub fn new(input: GaussianDiagState, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(PsgError::DegenerateSplitter { t });
        }
        let r = 1.0 - t;
        let tr = (t * r).sqrt();
        let (a, b) = (input.a, input.b);
        Ok(Self {
            input,
            t,
            n1: t * a + r,
            n2: t * b + r,
            c1: tr * (a - 1.0),
            c2: tr * (b - 1.0),
            m1: r * a + t,
            m2: r * b + t,
        })
    }

    pub fn reflectivity(&self) -> f64 {
        1.0 - self.t
    }

    /// The symmetric 4×4 matrix in the ordering (ηr, ηi, ξr, ξi).
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        [
            [self.n1, 0.0, self.c1, 0.0],
            [0.0, self.n2, 0.0, self.c2],
            [self.c1, 0.0, self.m1, 0.0],
            [0.0, self.c2, 0.0, self.m2],
        ]
    }

    /// Two-mode characteristic function `exp(−x V xᵀ / 2)`.
    pub fn char_value(&self, eta: (f64, f64), xi: (f64, f64)) -> f64 {
        let x = [eta.0, eta.1, xi.0, xi.1];
        let v = self.matrix();
        let mut q = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                q += x[i] * v[i][j] * x[j];
            }
        }
        (-0.5 * q).exp()
    }

    /// Widths of the reduced mode-2 Gaussian must describe a physical state.
    pub fn mode2_is_physical(&self) -> bool {
        self.m1 * self.m2 >= 1.0 - EPS_TOL
    }
}
