//! Wigner and P quasiprobabilities, nonclassicality predicates and the
//! closed-form Gaussian-moment integrator behind them.
//!
//! The Wigner function is `W(x, p) = (1/π²) ∫ C(ζ) e^{2i(p ζr − x ζi)} d²ζ`, so
//! the vacuum has `W(0, 0) = 2/π` and the one-photon Fock state `−2/π`. The P
//! function uses the same transform on `C(ζ) e^{|ζ|²/2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::{GaussTerm, QuadGaussSum};
use crate::conditioning::{condition, subtract_single_photon, subtract_threshold, Detector};
use crate::error::{PsgError, Result};
use crate::gaussian::{GaussianDiagState, TwoModeCorrelation};
use crate::EPS_TOL;

/// `∫ x^k exp(−rate x²/2 + i freq x) dx` for `rate > 0` and complex `freq`.
///
/// Completing the square moves the integral to a real line shifted by
/// `μ = i freq / rate`, which is exact for the entire integrand.
pub fn gaussian_moment(k: usize, rate: f64, freq: Complex64) -> Complex64 {
    let mu = Complex64::i() * freq / rate;
    let prefactor = (2.0 * PI / rate).sqrt() * (-freq * freq / (2.0 * rate)).exp();
    // Σ_{j even} C(k, j) μ^{k−j} E[y^j], with E[y^j] = (j−1)!! / rate^{j/2}.
    let mut sum = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    let mut central = 1.0;
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k - j + 1) as f64 / j as f64;
        }
        if j % 2 == 0 {
            if j > 0 {
                central *= (j - 1) as f64 / rate;
            }
            sum += binom * central * mu.powu((k - j) as u32);
        }
    }
    prefactor * sum
}

fn integrate_term(t: &GaussTerm) -> Result<Complex64> {
    if !(t.a > 0.0 && t.b > 0.0) {
        return Err(PsgError::DivergentIntegral { a: t.a, b: t.b });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, j, c) in t.poly.monomials() {
        acc += c * gaussian_moment(i, t.a, t.u) * gaussian_moment(j, t.b, t.v);
    }
    Ok(t.coeff * acc)
}

/// Exact `∫∫ f(ζr, ζi) dζr dζi` over the full plane.
pub fn integrate_full_plane(f: &QuadGaussSum) -> Result<Complex64> {
    f.terms().iter().map(integrate_term).sum()
}

/// Fourier kernel shift taking `C` to the integrand of `W(x, p)`.
fn fourier_shifted(char: &QuadGaussSum, x: f64, p: f64) -> QuadGaussSum {
    char.mul_phase(Complex64::new(2.0 * p, 0.0), Complex64::new(-2.0 * x, 0.0))
}

/// Complex phase-space transform before the imaginary part is dropped.
pub fn wigner_eval_complex(char: &QuadGaussSum, x: f64, p: f64) -> Result<Complex64> {
    Ok(integrate_full_plane(&fourier_shifted(char, x, p))? / (PI * PI))
}

/// Wigner function at `(x, p)`.
pub fn wigner_eval(char: &QuadGaussSum, x: f64, p: f64) -> Result<f64> {
    Ok(wigner_eval_complex(char, x, p)?.re)
}

/// Uniform square grid `[lo, hi]` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(PsgError::InvalidParameter {
                name: "grid",
                value: hi - lo,
                reason: "grid bounds must be finite with hi > lo",
            });
        }
        if n < 2 {
            return Err(PsgError::InvalidParameter {
                name: "grid",
                value: n as f64,
                reason: "grid needs at least 2 points per axis",
            });
        }
        Ok(Self { lo, hi, n })
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.coord(k)).collect()
    }
}

/// Phase-space surface sampled on a [`GridSpec`] (x outer, p inner).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceSurface {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl PhaseSpaceSurface {
    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.grid.n + ip]
    }

    /// Iterates `(x, p, value)` in row-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.grid.n;
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &w)| (self.grid.coord(k / n), self.grid.coord(k % n), w))
    }

    /// `(x, p, value)` of the smallest sample; ties resolve to the first.
    pub fn min(&self) -> (f64, f64, f64) {
        self.rows()
            .fold((f64::NAN, f64::NAN, f64::INFINITY), |best, r| {
                if r.2 < best.2 {
                    r
                } else {
                    best
                }
            })
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates the phase-space transform of `char` over a grid in parallel.
pub fn phase_space_grid(char: &QuadGaussSum, grid: GridSpec) -> Result<PhaseSpaceSurface> {
    let n = grid.n;
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| wigner_eval(char, grid.coord(k / n), grid.coord(k % n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseSpaceSurface { grid, values })
}

/// `W(0, 0)` of the ideal one-photon-subtracted state.
pub fn wigner_origin_single(v: &TwoModeCorrelation) -> Result<f64> {
    wigner_eval(&subtract_single_photon(v)?.char, 0.0, 0.0)
}

/// `W(0, 0)` of the threshold-detector state.
pub fn wigner_origin_threshold(v: &TwoModeCorrelation) -> Result<f64> {
    wigner_eval(&subtract_threshold(v)?.char, 0.0, 0.0)
}

fn require_squeezed(state: &GaussianDiagState) -> Result<()> {
    if state.is_squeezed_standard() {
        Ok(())
    } else {
        Err(PsgError::NotSqueezedInput {
            a: state.a(),
            b: state.b(),
        })
    }
}

/// Transmittivity above which the ideal one-photon herald gives `W₁(0) < 0`:
/// `(AB − 1) / ((1 − A)(B − 1))`.
pub fn negativity_t_threshold_single(state: &GaussianDiagState) -> Result<f64> {
    require_squeezed(state)?;
    let (a, b) = (state.a(), state.b());
    Ok((a * b - 1.0) / ((1.0 - a) * (b - 1.0)))
}

/// Transmittivity above which the threshold herald gives `W_a(0) < 0`:
/// `(4 − (A+1)(B+1)) / (3(A − 1)(B − 1))`.
pub fn negativity_t_threshold_any(state: &GaussianDiagState) -> Result<f64> {
    require_squeezed(state)?;
    let (a, b) = (state.a(), state.b());
    Ok((4.0 - (a + 1.0) * (b + 1.0)) / (3.0 * (a - 1.0) * (b - 1.0)))
}

/// Locates a sign change of `f` on `[lo, hi]` to within `tol`.
///
/// Returns `None` when `f(lo)` and `f(hi)` share a sign.
pub fn bisect_sign_change<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    let lo_sign = f_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Bracketing interval for transmittivity scans.
pub const T_SCAN_BOUNDS: (f64, f64) = (1e-6, 1.0 - 1e-6);

/// Bisection tolerance for thresholds in T and η.
pub const BISECTION_TOL: f64 = 1e-9;

/// Transmittivity at which `W(0, 0)` of the heralded state changes sign,
/// found by bisection on the exact Wigner value.
pub fn negativity_t_threshold_bisection(state: &GaussianDiagState, detector: Detector) -> Result<Option<f64>> {
    bisect_sign_change(
        |t| {
            let v = state.beamsplit_with_vacuum(t)?;
            wigner_eval(&condition(&v, detector)?.char, 0.0, 0.0)
        },
        T_SCAN_BOUNDS.0,
        T_SCAN_BOUNDS.1,
        BISECTION_TOL,
    )
}

/// P-function characteristic, `C(ζ) e^{|ζ|²/2}`.
pub fn p_char(char: &QuadGaussSum) -> QuadGaussSum {
    char.mul_gaussian(-1.0, -1.0)
}

/// Tr ρ², from `(1/π) ∫ |C(ζ)|² d²ζ`.
pub fn purity(char: &QuadGaussSum) -> Result<f64> {
    Ok(integrate_full_plane(&char.product(&char.conj()))?.re / PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// A well-behaved, positive P function exists.
    Classical,
    /// No acceptable P function, but the Wigner function stays non-negative.
    NonclassicalNoP,
    /// Negative Wigner function.
    WignerNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalityVerdict {
    pub p_exists: bool,
    pub p_positive: Option<bool>,
    pub wigner_negative: bool,
    pub verdict: Verdict,
}

/// Grid used for the P-positivity guard.
pub const P_GRID: GridSpec = GridSpec {
    lo: -4.0,
    hi: 4.0,
    n: 201,
};

/// P values below `−P_NEGATIVITY_TOL · max(1, max P)` count as negative.
pub const P_NEGATIVITY_TOL: f64 = 1e-9;

/// Classifies the state by the P and Wigner criteria.
pub fn classify(char: &QuadGaussSum) -> Result<ClassicalityVerdict> {
    let pc = p_char(char);
    let p_exists = pc.terms().iter().all(|t| t.a > EPS_TOL && t.b > EPS_TOL);
    let p_positive = if p_exists {
        let surface = phase_space_grid(&pc, P_GRID)?;
        let scale = surface.max_value().max(1.0);
        Some(surface.min().2 >= -P_NEGATIVITY_TOL * scale)
    } else {
        None
    };
    let wigner_negative = wigner_eval(char, 0.0, 0.0)? < 0.0;
    let verdict = if wigner_negative {
        Verdict::WignerNegative
    } else if p_exists && p_positive == Some(true) {
        Verdict::Classical
    } else {
        Verdict::NonclassicalNoP
    };
    Ok(ClassicalityVerdict {
        p_exists,
        p_positive,
        wigner_negative,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::Poly;
    use crate::conditioning::subtract_threshold;
    use approx::assert_abs_diff_eq;

    #[test]
    fn engine_reference_integrals() {
        let std = QuadGaussSum::gaussian(1.0, 1.0);
        assert_abs_diff_eq!(integrate_full_plane(&std).unwrap().re, 2.0 * PI, epsilon = 1e-14);

        let second = QuadGaussSum::new(vec![GaussTerm {
            poly: Poly::from_monomials(&[(2, 0, 1.0)]),
            ..GaussTerm::gaussian(2.0, 1.0)
        }]);
        assert_abs_diff_eq!(integrate_full_plane(&second).unwrap().re, PI / 2f64.sqrt(), epsilon = 1e-14);

        let shifted = std.mul_phase(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0));
        let val = integrate_full_plane(&shifted).unwrap();
        assert_abs_diff_eq!(val.re, 2.0 * PI * (-2.0f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(val.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn odd_moments_vanish_without_phase() {
        for k in [1, 3, 5] {
            assert_eq!(gaussian_moment(k, 1.7, Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        }
        // E[x⁴] = 3/rate² under the normalized Gaussian.
        let m4 = gaussian_moment(4, 2.0, Complex64::new(0.0, 0.0)).re;
        assert_abs_diff_eq!(m4, 3.0 / 4.0 * (PI).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn divergent_terms_are_rejected() {
        let bad = QuadGaussSum::gaussian(-0.1, 1.0);
        assert!(matches!(integrate_full_plane(&bad), Err(PsgError::DivergentIntegral { .. })));
        assert!(wigner_eval(&bad, 0.0, 0.0).is_err());
    }

    #[test]
    fn wigner_convention_anchors() {
        assert_abs_diff_eq!(wigner_eval(&QuadGaussSum::vacuum(), 0.0, 0.0).unwrap(), 2.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wigner_eval(&QuadGaussSum::fock_one(), 0.0, 0.0).unwrap(), -2.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn threshold_state_origin_reference() {
        let v = GaussianDiagState::from_exp2s(2.36).unwrap().beamsplit_with_vacuum(0.88).unwrap();
        let st = subtract_threshold(&v).unwrap();
        let w = wigner_eval_complex(&st.char, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(w.re, -0.52, epsilon = 0.01);
        assert!(w.im.abs() < 1e-10);
    }

    #[test]
    fn single_herald_origin_sign_cases() {
        let pure = GaussianDiagState::from_exp2s(2.36).unwrap();
        for t in [0.05, 0.5, 0.95] {
            assert!(wigner_origin_single(&pure.beamsplit_with_vacuum(t).unwrap()).unwrap() < 0.0);
        }
        let warm = GaussianDiagState::new(1.4, 2.2).unwrap();
        assert!(wigner_origin_single(&warm.beamsplit_with_vacuum(0.6).unwrap()).unwrap() > 0.0);
    }

    #[test]
    fn single_threshold_formula_values() {
        let pure = GaussianDiagState::from_squeezing(0.4).unwrap();
        assert_abs_diff_eq!(negativity_t_threshold_single(&pure).unwrap(), 0.0, epsilon = 1e-15);

        let mixed = GaussianDiagState::new(0.5, 2.5).unwrap();
        assert_abs_diff_eq!(negativity_t_threshold_single(&mixed).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let bis = negativity_t_threshold_bisection(&mixed, Detector::SinglePhoton).unwrap().unwrap();
        assert_abs_diff_eq!(bis, 1.0 / 3.0, epsilon = 1e-8);

        let weak = GaussianDiagState::new(0.9, 1.2).unwrap();
        assert_abs_diff_eq!(negativity_t_threshold_single(&weak).unwrap(), 4.0, epsilon = 1e-12);
        assert!(wigner_origin_single(&weak.beamsplit_with_vacuum(0.99).unwrap()).unwrap() > 0.0);

        assert!(matches!(
            negativity_t_threshold_single(&GaussianDiagState::new(1.5, 2.0).unwrap()),
            Err(PsgError::NotSqueezedInput { .. })
        ));
    }

    #[test]
    fn any_threshold_formula_values() {
        let s = GaussianDiagState::from_exp2s(2.36).unwrap();
        assert_abs_diff_eq!(negativity_t_threshold_any(&s).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        let bis = negativity_t_threshold_bisection(&s, Detector::Threshold).unwrap().unwrap();
        assert_abs_diff_eq!(bis, 1.0 / 3.0, epsilon = 1e-8);

        let barely = GaussianDiagState::new(1.0 - 1e-4, 1.0 / (1.0 - 1e-4)).unwrap();
        let thr = negativity_t_threshold_any(&barely).unwrap();
        assert!(thr.is_finite());
        assert_abs_diff_eq!(thr, 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn p_char_shifts_rates() {
        let vac = p_char(&QuadGaussSum::vacuum());
        assert_eq!((vac.terms()[0].a, vac.terms()[0].b), (0.0, 0.0));
        let th = p_char(&QuadGaussSum::gaussian(3.0, 3.0));
        assert_eq!((th.terms()[0].a, th.terms()[0].b), (2.0, 2.0));
        let sq = p_char(&QuadGaussSum::gaussian(0.5, 2.0));
        assert_eq!(sq.terms()[0].a, -0.5);
    }

    #[test]
    fn classify_gaussian_references() {
        let thermal = classify(&QuadGaussSum::gaussian(3.0, 3.0)).unwrap();
        assert_eq!(thermal.verdict, Verdict::Classical);
        let vac = classify(&QuadGaussSum::vacuum()).unwrap();
        assert!(!vac.p_exists);
        assert_eq!(vac.verdict, Verdict::NonclassicalNoP);
        let sq = classify(&QuadGaussSum::gaussian(0.5, 2.0)).unwrap();
        assert_eq!(sq.verdict, Verdict::NonclassicalNoP);
        assert_eq!(sq.p_positive, None);
    }

    #[test]
    fn purity_references() {
        assert_abs_diff_eq!(purity(&QuadGaussSum::vacuum()).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(purity(&QuadGaussSum::gaussian(3.0, 3.0)).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        let v = GaussianDiagState::from_exp2s(2.36).unwrap().beamsplit_with_vacuum(0.7).unwrap();
        let rho1 = subtract_single_photon(&v).unwrap();
        assert_abs_diff_eq!(purity(&rho1.char).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn grid_min_tracks_location() {
        let g = GridSpec::new(-1.0, 1.0, 5).unwrap();
        let s = phase_space_grid(&QuadGaussSum::fock_one(), g).unwrap();
        let (x, p, w) = s.min();
        assert_eq!((x, p), (0.0, 0.0));
        assert_abs_diff_eq!(w, -2.0 / PI, epsilon = 1e-14);
        assert!(GridSpec::new(1.0, -1.0, 5).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 1).is_err());
    }
}
