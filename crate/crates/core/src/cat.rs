//! Odd cat states `𝒩(|α⟩ − |−α⟩)` and fidelity against them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::{GaussTerm, QuadGaussSum};
use crate::error::{PsgError, Result};
use crate::quasiprob::integrate_full_plane;

/// Real-amplitude odd cat state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatSpec {
    pub alpha: f64,
    /// Amplitude normalization `1/√(2(1 − e^{−2α²}))` of `|α⟩ − |−α⟩`.
    pub norm: f64,
}

impl CatSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(PsgError::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "cat amplitude must be positive and finite",
            });
        }
        Ok(Self {
            alpha,
            norm: 1.0 / (2.0 * -(-2.0 * alpha * alpha).exp_m1()).sqrt(),
        })
    }

    /// Fock amplitudes `⟨n|ψ⟩` for `n < dim`.
    pub fn fock_amplitudes(&self, dim: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(dim);
        // e^{−α²/2} α^n / √n!, built incrementally.
        let mut coherent = (-0.5 * self.alpha * self.alpha).exp();
        for n in 0..dim {
            if n > 0 {
                coherent *= self.alpha / (n as f64).sqrt();
            }
            out.push(if n % 2 == 1 { 2.0 * self.norm * coherent } else { 0.0 });
        }
        out
    }
}

/// Characteristic function `⟨ψ|D(ζ)|ψ⟩` of the odd cat.
///
/// Diagonal overlaps give the two phase terms `e^{±2iαζi}`; the cross overlaps
/// give `−e^{−2α²} e^{±2αζr}`, encoded as imaginary frequencies along ζr.
pub fn cat_char_fn(spec: &CatSpec) -> QuadGaussSum {
    let n2 = spec.norm * spec.norm;
    let a = spec.alpha;
    let cross = -n2 * (-2.0 * a * a).exp();
    let zero = Complex64::new(0.0, 0.0);
    let term = |coeff: f64, u: Complex64, v: Complex64| GaussTerm {
        coeff: Complex64::new(coeff, 0.0),
        u,
        v,
        ..GaussTerm::gaussian(1.0, 1.0)
    };
    QuadGaussSum::new(vec![
        term(n2, zero, Complex64::new(2.0 * a, 0.0)),
        term(n2, zero, Complex64::new(-2.0 * a, 0.0)),
        term(cross, Complex64::new(0.0, -2.0 * a), zero),
        term(cross, Complex64::new(0.0, 2.0 * a), zero),
    ])
}

/// `⟨φ|ρ|φ⟩ = (1/π) ∫ C_φ(ζ) C_ρ(−ζ) d²ζ`.
pub fn overlap_fidelity(pure_char: &QuadGaussSum, rho_char: &QuadGaussSum) -> Result<f64> {
    let integrand = pure_char.product(&rho_char.reflect());
    Ok(integrate_full_plane(&integrand)?.re / PI)
}

/// Fidelity of `rho_char` with the odd cat of amplitude `alpha`.
pub fn cat_fidelity(rho_char: &QuadGaussSum, alpha: f64) -> Result<f64> {
    overlap_fidelity(&cat_char_fn(&CatSpec::new(alpha)?), rho_char)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub fidelity: f64,
}

pub const ALPHA_MIN: f64 = 1e-4;
pub const DEFAULT_ALPHA_MAX: f64 = 3.0;
const COARSE_POINTS: usize = 64;
const ALPHA_TOL: f64 = 1e-6;

/// Maximizes the cat fidelity over `α ∈ [1e−4, alpha_max]`.
///
/// A 64-point scan picks the best bracket, then golden-section search refines
/// it to 1e−6 in α.
pub fn optimize_alpha(rho_char: &QuadGaussSum, alpha_max: f64) -> Result<AlphaOptimum> {
    if !(alpha_max.is_finite() && alpha_max > ALPHA_MIN) {
        return Err(PsgError::InvalidParameter {
            name: "alpha_max",
            value: alpha_max,
            reason: "must exceed the lower search bound 1e-4",
        });
    }
    let step = (alpha_max - ALPHA_MIN) / (COARSE_POINTS - 1) as f64;
    let scan = (0..COARSE_POINTS)
        .into_par_iter()
        .map(|k| {
            let alpha = ALPHA_MIN + step * k as f64;
            cat_fidelity(rho_char, alpha).map(|f| (alpha, f))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = scan
        .iter()
        .enumerate()
        .fold(0, |b, (k, s)| if s.1 > scan[b].1 { k } else { b });

    let mut lo = scan[best.saturating_sub(1)].0;
    let mut hi = scan[(best + 1).min(COARSE_POINTS - 1)].0;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = cat_fidelity(rho_char, x1)?;
    let mut f2 = cat_fidelity(rho_char, x2)?;
    while hi - lo > ALPHA_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = cat_fidelity(rho_char, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = cat_fidelity(rho_char, x1)?;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let fidelity = cat_fidelity(rho_char, alpha)?;
    // Keep the coarse winner if refinement landed on a worse point at a bracket edge.
    if scan[best].1 > fidelity {
        return Ok(AlphaOptimum {
            alpha: scan[best].0,
            fidelity: scan[best].1,
        });
    }
    Ok(AlphaOptimum { alpha, fidelity })
}
