//! Truncated Fock-space brute force.
//!
//! This module never touches characteristic-function algebra; it builds
//! density matrices from operators and is used to cross-check every analytic
//! result in the crate.

pub mod operators;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::cat::CatSpec;
use crate::error::{PsgError, Result};
use operators::{displacement, quadratures, squeeze_columns, BeamSplitter};

pub type CMat = DMatrix<Complex64>;

pub const DEFAULT_DIM: usize = 40;
/// Maximum population allowed in the top 10% of photon numbers.
pub const TAIL_TOL: f64 = 1e-8;
const WEIGHT_FLOOR: f64 = 1e-15;

fn top_decile_start(dim: usize) -> usize {
    dim - (dim / 10).max(1)
}

/// One-mode truncated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: CMat,
}

impl FockDensityMatrix {
    /// Wraps `rho`, normalizing its trace.
    pub fn from_matrix(rho: CMat) -> Self {
        let tr = rho.trace().re;
        Self { rho: rho / Complex64::new(tr, 0.0) }
    }

    pub fn from_pure(psi: &DVector<Complex64>) -> Self {
        Self::from_matrix(psi * psi.adjoint())
    }

    pub fn fock(n: usize, dim: usize) -> Self {
        let mut psi = DVector::zeros(dim);
        psi[n] = Complex64::new(1.0, 0.0);
        Self::from_pure(&psi)
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::fock(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.rho[(n, n)].re).collect()
    }

    /// Population in the top 10% of photon numbers.
    pub fn tail_mass(&self) -> f64 {
        self.populations()[top_decile_start(self.dim())..].iter().sum()
    }

    pub fn check_truncation(&self) -> Result<()> {
        let tail = self.tail_mass();
        if tail > TAIL_TOL {
            Err(PsgError::UnderTruncated {
                dim: self.dim(),
                lost: tail,
            })
        } else {
            Ok(())
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Widths `(A, B) = (4⟨P²⟩, 4⟨X²⟩)` matching the characteristic-function
    /// convention `C(ξ) = exp(−A ξr²/2 − B ξi²/2)`.
    pub fn quadrature_widths(&self) -> (f64, f64) {
        let (x, p) = quadratures(self.dim());
        let ex2 = (&self.rho * &x * &x).trace().re;
        let ep2 = (&self.rho * &p * &p).trace().re;
        (4.0 * ep2, 4.0 * ex2)
    }

    /// Weighted pure components `(p_k, |ψ_k⟩)` from the eigendecomposition.
    pub fn ensemble(&self) -> Vec<(f64, DVector<Complex64>)> {
        let eig = self.rho.clone().symmetric_eigen();
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > WEIGHT_FLOOR)
            .map(|(k, &w)| (w, eig.eigenvectors.column(k).into_owned()))
            .collect()
    }
}

/// Squeezed thermal state `S(s) ρ_th(nbar) S(s)†` truncated to `dim`.
pub fn squeezed_thermal_rho(s: f64, nbar: f64, dim: usize) -> Result<FockDensityMatrix> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(PsgError::InvalidParameter {
            name: "nbar",
            value: nbar,
            reason: "thermal photon number must be finite and >= 0",
        });
    }
    let cols = squeeze_columns(s, dim);
    let mut rho = CMat::zeros(dim, dim);
    let ratio = nbar / (nbar + 1.0);
    let mut weight = 1.0 / (nbar + 1.0);
    for n in 0..dim {
        if weight < WEIGHT_FLOOR {
            break;
        }
        let col = cols.column(n).map(|v| Complex64::new(v, 0.0));
        rho += &col * col.adjoint() * Complex64::new(weight, 0.0);
        weight *= ratio;
    }
    let lost = 1.0 - rho.trace().re;
    if lost > TAIL_TOL {
        return Err(PsgError::UnderTruncated { dim, lost });
    }
    let out = FockDensityMatrix::from_matrix(rho);
    out.check_truncation()?;
    Ok(out)
}

/// Measurement outcomes on mode 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HeraldOutcome {
    /// Exactly one photon.
    One,
    /// One or more photons (threshold click).
    AtLeastOne,
    /// No photon (no click).
    Zero,
    /// No measurement; mode 2 traced out.
    None,
}

impl HeraldOutcome {
    fn accepts(&self, n: usize) -> bool {
        match self {
            HeraldOutcome::One => n == 1,
            HeraldOutcome::AtLeastOne => n >= 1,
            HeraldOutcome::Zero => n == 0,
            HeraldOutcome::None => true,
        }
    }
}

/// Two-mode state as a mixture of pure amplitude matrices `Ψ[n₁, n₂]`.
#[derive(Debug, Clone)]
pub struct TwoModeState {
    pub dim: usize,
    pub components: Vec<(f64, CMat)>,
}

impl TwoModeState {
    fn trace_with(&self, f: impl Fn(&CMat) -> Complex64) -> Complex64 {
        self.components
            .iter()
            .map(|(w, psi)| f(psi) * *w)
            .sum()
    }

    pub fn reduced_mode1(&self) -> FockDensityMatrix {
        let mut rho = CMat::zeros(self.dim, self.dim);
        for (w, psi) in &self.components {
            rho += psi * psi.adjoint() * Complex64::new(*w, 0.0);
        }
        FockDensityMatrix::from_matrix(rho)
    }

    /// `Tr[D₁(η) D₂(ξ) ρ]`.
    pub fn char_value(&self, eta: Complex64, xi: Complex64) -> Complex64 {
        let d1 = displacement(eta, self.dim, self.dim);
        let d2t = displacement(xi, self.dim, self.dim).transpose();
        self.trace_with(|psi| (psi.adjoint() * &d1 * psi * &d2t).trace())
    }

    /// Correlation-matrix entries `[n1, n2, c1, c2, m1, m2]` from quadrature
    /// second moments.
    pub fn correlation_entries(&self) -> [f64; 6] {
        let (x, p) = quadratures(self.dim);
        let (xt, pt) = (x.transpose(), p.transpose());
        let x2 = &x * &x;
        let p2 = &p * &p;
        let (x2t, p2t) = (x2.transpose(), p2.transpose());
        let m = |f: &dyn Fn(&CMat) -> CMat| 4.0 * self.trace_with(|psi| (psi.adjoint() * f(psi)).trace()).re;
        [
            m(&|psi| &p2 * psi),
            m(&|psi| &x2 * psi),
            m(&|psi| &p * psi * &pt),
            m(&|psi| &x * psi * &xt),
            m(&|psi| psi * &p2t),
            m(&|psi| psi * &x2t),
        ]
    }

    /// Conditional mode-1 state and the outcome probability.
    pub fn condition_mode2(&self, outcome: HeraldOutcome) -> Result<(FockDensityMatrix, f64)> {
        let mut rho = CMat::zeros(self.dim, self.dim);
        for (w, psi) in &self.components {
            for k in (0..self.dim).filter(|&k| outcome.accepts(k)) {
                let col = psi.column(k);
                rho += col * col.adjoint() * Complex64::new(*w, 0.0);
            }
        }
        let prob = rho.trace().re;
        if prob <= 1e-12 {
            return Err(PsgError::ZeroProbabilityHerald { margin: prob });
        }
        Ok((FockDensityMatrix::from_matrix(rho), prob))
    }

    /// Dense `dim² × dim²` density matrix, index `n₁·dim + n₂`.
    pub fn to_density_matrix(&self) -> CMat {
        let d = self.dim;
        let mut rho = CMat::zeros(d * d, d * d);
        for (w, psi) in &self.components {
            let v = DVector::from_fn(d * d, |k, _| psi[(k / d, k % d)]);
            rho += &v * v.adjoint() * Complex64::new(*w, 0.0);
        }
        rho
    }
}

/// Beam splits a one-mode state with vacuum using a prebuilt splitter.
pub fn beamsplitter_apply_with(rho: &FockDensityMatrix, splitter: &BeamSplitter) -> TwoModeState {
    let components = rho
        .ensemble()
        .into_iter()
        .map(|(w, psi)| (w, splitter.apply(&psi)))
        .collect();
    TwoModeState {
        dim: splitter.dim,
        components,
    }
}

/// Beam splits a one-mode state with vacuum at transmittivity `t`.
pub fn beamsplitter_apply(rho: &FockDensityMatrix, t: f64) -> Result<TwoModeState> {
    if !(t.is_finite() && t > 0.0 && t < 1.0) {
        return Err(PsgError::DegenerateSplitter { t });
    }
    Ok(beamsplitter_apply_with(rho, &BeamSplitter::new(t, rho.dim())))
}

/// Amplitude damping with efficiency `eta`, in Kraus form
/// `ρ'_{mm'} = Σ_k √C(m+k,k) √C(m'+k,k) η^{(m+m')/2} (1−η)^k ρ_{m+k, m'+k}`.
pub fn loss_apply(rho: &FockDensityMatrix, eta: f64) -> Result<FockDensityMatrix> {
    if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
        return Err(PsgError::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "must lie in (0, 1]",
        });
    }
    if eta == 1.0 {
        return Ok(rho.clone());
    }
    let dim = rho.dim();
    let src = rho.matrix();
    let ln_binom = |n: usize, k: usize| -> f64 {
        (1..=k).map(|j| ((n - k + j) as f64 / j as f64).ln()).sum()
    };
    let mut out = CMat::zeros(dim, dim);
    for m in 0..dim {
        for mp in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim - m.max(mp) {
                let ln_w = 0.5 * (ln_binom(m + k, k) + ln_binom(mp + k, k))
                    + 0.5 * (m + mp) as f64 * eta.ln()
                    + k as f64 * (1.0 - eta).ln();
                acc += src[(m + k, mp + k)] * ln_w.exp();
            }
            out[(m, mp)] = acc;
        }
    }
    Ok(FockDensityMatrix { rho: out })
}

/// `Tr[D(ζ) ρ]`.
pub fn char_value(rho: &FockDensityMatrix, zeta: Complex64) -> Complex64 {
    let d = displacement(zeta, rho.dim(), rho.dim());
    (d * rho.matrix()).trace()
}

/// Wigner function from the displaced-parity identity
/// `W(α) = (2/π) Tr[D(α)† ρ D(α) Π]`, α = x + ip.
pub fn wigner_parity(rho: &FockDensityMatrix, x: f64, p: f64) -> Result<f64> {
    let dim = rho.dim();
    let alpha = Complex64::new(x, p);
    // Rows of D(α) beyond dim are needed to hold the displaced state.
    let extra = 20 + (4.0 * alpha.norm_sqr() + 8.0 * alpha.norm() * (dim as f64).sqrt()).ceil() as usize;
    let cols = dim + extra;
    let d = displacement(alpha, dim, cols);
    let shifted = d.adjoint() * rho.matrix() * &d;
    let captured: f64 = (0..cols).map(|k| shifted[(k, k)].re).sum();
    let lost = (rho.trace() - captured).abs();
    if lost > TAIL_TOL {
        return Err(PsgError::UnderTruncated { dim: cols, lost });
    }
    let parity: f64 = (0..cols)
        .map(|k| if k % 2 == 0 { shifted[(k, k)].re } else { -shifted[(k, k)].re })
        .sum();
    Ok(2.0 / PI * parity)
}

/// `⟨ψ_cat|ρ|ψ_cat⟩`.
pub fn fidelity_pure(rho: &FockDensityMatrix, cat: &CatSpec) -> Result<f64> {
    let dim = rho.dim();
    let amps = cat.fock_amplitudes(dim);
    let captured: f64 = amps.iter().map(|c| c * c).sum();
    if 1.0 - captured > TAIL_TOL {
        return Err(PsgError::UnderTruncated {
            dim,
            lost: 1.0 - captured,
        });
    }
    let v = DVector::from_iterator(dim, amps.into_iter().map(|c| Complex64::new(c, 0.0)));
    Ok((v.adjoint() * rho.matrix() * &v)[(0, 0)].re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_preparation() {
        let rho = squeezed_thermal_rho(0.0, 0.0, 10).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_vacuum_has_only_even_photons() {
        let rho = squeezed_thermal_rho(0.5 * 2.36f64.ln(), 0.0, 40).unwrap();
        for (n, p) in rho.populations().iter().enumerate() {
            if n % 2 == 1 {
                assert!(*p < 1e-14);
            }
        }
        let (a, b) = rho.quadrature_widths();
        assert_abs_diff_eq!(a, 1.0 / 2.36, epsilon = 1e-8);
        assert_abs_diff_eq!(b, 2.36, epsilon = 1e-8);
    }

    #[test]
    fn squeezed_thermal_widths() {
        let rho = squeezed_thermal_rho(0.3466, 0.059, 60).unwrap();
        let state = crate::gaussian::GaussianDiagState::from_squeezed_thermal(0.3466, 0.059).unwrap();
        let (a, b) = rho.quadrature_widths();
        assert_abs_diff_eq!(a, state.a(), epsilon = 1e-6);
        assert_abs_diff_eq!(b, state.b(), epsilon = 1e-6);
        assert_abs_diff_eq!(rho.purity(), 1.0 / (state.a() * state.b()).sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn undertruncation_is_flagged() {
        assert!(matches!(
            squeezed_thermal_rho(1.5, 0.0, 10),
            Err(PsgError::UnderTruncated { .. })
        ));
    }

    #[test]
    fn single_photon_half_split() {
        let rho = FockDensityMatrix::fock(1, 6);
        let out = beamsplitter_apply(&rho, 0.5).unwrap();
        let red = out.reduced_mode1();
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_split_and_herald() {
        let out = beamsplitter_apply(&FockDensityMatrix::vacuum(8), 0.3).unwrap();
        assert_abs_diff_eq!(out.components[0].1[(0, 0)].norm(), 1.0, epsilon = 1e-14);
        assert!(matches!(
            out.condition_mode2(HeraldOutcome::AtLeastOne),
            Err(PsgError::ZeroProbabilityHerald { .. })
        ));
    }

    #[test]
    fn two_mode_density_invariants() {
        let rho = squeezed_thermal_rho(0.3, 0.1, 24).unwrap();
        let out = beamsplitter_apply(&rho, 0.6).unwrap();
        let dense = out.to_density_matrix();
        assert_abs_diff_eq!(dense.trace().re, 1.0, epsilon = 1e-6);
        assert!((&dense - dense.adjoint()).camax() < 1e-12);
    }

    #[test]
    fn loss_kraus_basics() {
        let one = FockDensityMatrix::fock(1, 5);
        let lossy = loss_apply(&one, 0.7).unwrap();
        assert_abs_diff_eq!(lossy.matrix()[(1, 1)].re, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(lossy.matrix()[(0, 0)].re, 0.3, epsilon = 1e-14);
        assert_eq!(loss_apply(&one, 1.0).unwrap(), one);
        let vac = FockDensityMatrix::vacuum(5);
        assert_eq!(loss_apply(&vac, 0.2).unwrap().matrix()[(0, 0)].re, 1.0);
    }

    #[test]
    fn parity_wigner_anchors() {
        let vac = FockDensityMatrix::vacuum(20);
        assert_abs_diff_eq!(wigner_parity(&vac, 0.0, 0.0).unwrap(), 2.0 / PI, epsilon = 1e-14);
        assert_abs_diff_eq!(
            wigner_parity(&vac, 0.5, -0.3).unwrap(),
            2.0 / PI * (-2.0 * 0.34f64).exp(),
            epsilon = 1e-12
        );
        let one = FockDensityMatrix::fock(1, 20);
        assert_abs_diff_eq!(wigner_parity(&one, 0.0, 0.0).unwrap(), -2.0 / PI, epsilon = 1e-14);
    }

    #[test]
    fn char_value_anchors() {
        let rho = squeezed_thermal_rho(0.2, 0.3, 40).unwrap();
        assert_abs_diff_eq!((char_value(&rho, Complex64::new(0.0, 0.0)) - 1.0).norm(), 0.0, epsilon = 1e-12);
        let vac = FockDensityMatrix::vacuum(30);
        let z = Complex64::new(0.8, -1.1);
        assert_abs_diff_eq!(char_value(&vac, z).re, (-0.5 * z.norm_sqr()).exp(), epsilon = 1e-14);
    }

    #[test]
    fn cat_fidelity_anchors() {
        let cat = CatSpec::new(1.0).unwrap();
        assert_eq!(fidelity_pure(&FockDensityMatrix::vacuum(30), &cat).unwrap(), 0.0);
        let tiny = CatSpec::new(1e-4).unwrap();
        assert_abs_diff_eq!(fidelity_pure(&FockDensityMatrix::fock(1, 30), &tiny).unwrap(), 1.0, epsilon = 1e-7);
    }
}
