//! Heralded mode-1 states after a photodetection on the reflected mode.

use num_complex::Complex64;
use serde::Serialize;

use crate::charfn::{GaussTerm, Poly, QuadGaussSum};
use crate::error::{PsgError, Result};
use crate::gaussian::TwoModeCorrelation;
use crate::quasiprob::integrate_full_plane;
use crate::EPS_TOL;

/// Detector used on mode 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    /// Projective one-photon measurement `|1⟩⟨1|`.
    SinglePhoton,
    /// Click detector: any photon number `n ≥ 1`.
    Threshold,
    /// No measurement; mode 2 is traced out.
    None,
}

impl std::fmt::Display for Detector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Detector::SinglePhoton => "ideal",
            Detector::Threshold => "threshold",
            Detector::None => "none",
        })
    }
}

/// A normalized heralded state together with its herald probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedState {
    pub char: QuadGaussSum,
    /// Herald probability from direct Gaussian integration over mode 2.
    pub success_prob: f64,
    /// Herald probability from the printed normalization constant (`1/𝒩`).
    pub closed_form_prob: f64,
    pub detector: Detector,
    pub correlation: TwoModeCorrelation,
}

impl ConditionedState {
    /// Normalization constant `𝒩` of the printed closed form.
    pub fn normalization(&self) -> f64 {
        1.0 / self.closed_form_prob
    }
}

/// Mode-2 marginal `C_out(0, ξ)`.
fn mode2_marginal(v: &TwoModeCorrelation) -> QuadGaussSum {
    QuadGaussSum::gaussian(v.m1, v.m2)
}

/// Gaussian rates shared by the conditional terms, `n_i − c_i²/(m_i + 1)`.
fn conditional_rates(v: &TwoModeCorrelation) -> (f64, f64) {
    (
        v.n1 - v.c1 * v.c1 / (v.m1 + 1.0),
        v.n2 - v.c2 * v.c2 / (v.m2 + 1.0),
    )
}

/// Probability of exactly one photon in mode 2: `(1/π) ∫ C_out(0,ξ) ⟨1|D(−ξ)|1⟩ d²ξ`.
pub fn one_photon_probability(v: &TwoModeCorrelation) -> Result<f64> {
    let integrand = mode2_marginal(v).product(&QuadGaussSum::fock_one());
    Ok(integrate_full_plane(&integrand)?.re / std::f64::consts::PI)
}

/// Probability of no photon in mode 2: `(1/π) ∫ C_out(0,ξ) e^{−|ξ|²/2} d²ξ`.
pub fn vacuum_probability(v: &TwoModeCorrelation) -> Result<f64> {
    let integrand = mode2_marginal(v).product(&QuadGaussSum::vacuum());
    Ok(integrate_full_plane(&integrand)?.re / std::f64::consts::PI)
}

/// Ideal one-photon herald.
pub fn subtract_single_photon(v: &TwoModeCorrelation) -> Result<ConditionedState> {
    let det = v.m1 * v.m2 - 1.0;
    if det <= EPS_TOL {
        return Err(PsgError::ZeroProbabilityHerald { margin: det });
    }
    let (g1, g2) = conditional_rates(v);
    let k1 = v.c1 * v.c1 * (v.m2 + 1.0) / ((v.m1 + 1.0) * det);
    let k2 = v.c2 * v.c2 * (v.m1 + 1.0) / ((v.m2 + 1.0) * det);
    let base = GaussTerm::gaussian(g1, g2);
    let char = QuadGaussSum::new(vec![
        base.clone(),
        GaussTerm {
            poly: Poly::from_monomials(&[(2, 0, -k1), (0, 2, -k2)]),
            ..base
        },
    ]);
    let closed_form_prob = 2.0 * det / ((v.m1 + 1.0) * (v.m2 + 1.0)).powf(1.5);
    Ok(ConditionedState {
        char,
        success_prob: one_photon_probability(v)?,
        closed_form_prob,
        detector: Detector::SinglePhoton,
        correlation: *v,
    })
}

/// Threshold ("any photon number") herald.
pub fn subtract_threshold(v: &TwoModeCorrelation) -> Result<ConditionedState> {
    let s = ((v.m1 + 1.0) * (v.m2 + 1.0)).sqrt();
    if s <= 2.0 + EPS_TOL {
        return Err(PsgError::ZeroProbabilityHerald { margin: s - 2.0 });
    }
    let norm = s / (s - 2.0);
    let (g1, g2) = conditional_rates(v);
    let char = QuadGaussSum::new(vec![
        GaussTerm {
            coeff: Complex64::new(norm, 0.0),
            ..GaussTerm::gaussian(v.n1, v.n2)
        },
        GaussTerm {
            coeff: Complex64::new(-2.0 * norm / s, 0.0),
            ..GaussTerm::gaussian(g1, g2)
        },
    ]);
    Ok(ConditionedState {
        char,
        success_prob: 1.0 - vacuum_probability(v)?,
        closed_form_prob: 1.0 / norm,
        detector: Detector::Threshold,
        correlation: *v,
    })
}

/// Normalized mode-1 state given no photon in mode 2, with its probability.
pub fn vacuum_branch(v: &TwoModeCorrelation) -> Result<(QuadGaussSum, f64)> {
    let (g1, g2) = conditional_rates(v);
    Ok((QuadGaussSum::gaussian(g1, g2), vacuum_probability(v)?))
}

/// Unconditional mode-1 state, `C_out(η, 0)`.
pub fn trace_out_mode2(v: &TwoModeCorrelation) -> QuadGaussSum {
    QuadGaussSum::gaussian(v.n1, v.n2)
}

/// Dispatches on the detector kind.
pub fn condition(v: &TwoModeCorrelation, detector: Detector) -> Result<ConditionedState> {
    match detector {
        Detector::SinglePhoton => subtract_single_photon(v),
        Detector::Threshold => subtract_threshold(v),
        Detector::None => Ok(ConditionedState {
            char: trace_out_mode2(v),
            success_prob: 1.0,
            closed_form_prob: 1.0,
            detector: Detector::None,
            correlation: *v,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianDiagState;
    use approx::assert_abs_diff_eq;

    fn reference() -> TwoModeCorrelation {
        GaussianDiagState::from_exp2s(2.36)
            .unwrap()
            .beamsplit_with_vacuum(0.88)
            .unwrap()
    }

    #[test]
    fn vacuum_input_has_nothing_to_subtract() {
        let v = GaussianDiagState::vacuum().beamsplit_with_vacuum(0.5).unwrap();
        assert!(matches!(
            subtract_single_photon(&v),
            Err(PsgError::ZeroProbabilityHerald { .. })
        ));
        assert!(matches!(
            subtract_threshold(&v),
            Err(PsgError::ZeroProbabilityHerald { .. })
        ));
    }

    #[test]
    fn single_photon_reference_rates() {
        let st = subtract_single_photon(&reference()).unwrap();
        assert_eq!(st.char.len(), 2);
        let t = &st.char.terms()[0];
        assert_abs_diff_eq!(t.a, 0.474719, epsilon = 1e-6);
        assert_abs_diff_eq!(t.b, 2.106508, epsilon = 1e-6);
        assert_abs_diff_eq!(st.char.eval(0.0, 0.0).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(st.success_prob, st.closed_form_prob, epsilon = 1e-14);
    }

    #[test]
    fn threshold_reference_normalization() {
        let st = subtract_threshold(&reference()).unwrap();
        assert_abs_diff_eq!(st.normalization(), 46.75, epsilon = 0.01);
        assert_abs_diff_eq!(st.success_prob, 0.02139, epsilon = 1e-5);
        assert_abs_diff_eq!(st.success_prob, st.closed_form_prob, epsilon = 1e-14);
        assert_abs_diff_eq!(st.char.eval(0.0, 0.0).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn small_transmittivity_pure_input_approaches_fock_one() {
        let v = GaussianDiagState::from_exp2s(2.36)
            .unwrap()
            .beamsplit_with_vacuum(1e-6)
            .unwrap();
        let st = subtract_single_photon(&v).unwrap();
        let fock = QuadGaussSum::fock_one();
        for &(x, y) in &[(1.0, 0.0), (0.3, 0.7), (-1.1, 0.4)] {
            assert_abs_diff_eq!(st.char.eval(x, y).re, fock.eval(x, y).re, epsilon = 1e-5);
        }
        assert_abs_diff_eq!(fock.eval(1.0, 0.0).re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn trace_out_rates() {
        let c = trace_out_mode2(&reference());
        assert_abs_diff_eq!(c.terms()[0].a, 0.492881, epsilon = 1e-6);
        assert_abs_diff_eq!(c.terms()[0].b, 2.1968, epsilon = 1e-12);

        let s = GaussianDiagState::new(0.7, 1.9).unwrap();
        let near_one = trace_out_mode2(&s.beamsplit_with_vacuum(1.0 - 1e-9).unwrap());
        assert_abs_diff_eq!(near_one.terms()[0].a, 0.7, epsilon = 1e-8);
        assert_abs_diff_eq!(near_one.terms()[0].b, 1.9, epsilon = 1e-8);

        let vac = trace_out_mode2(&GaussianDiagState::vacuum().beamsplit_with_vacuum(0.4).unwrap());
        assert_eq!(vac, QuadGaussSum::vacuum());
    }

    #[test]
    fn no_click_and_click_recombine_to_marginal() {
        let s = GaussianDiagState::new(0.55, 2.4).unwrap();
        let v = s.beamsplit_with_vacuum(0.63).unwrap();
        let click = subtract_threshold(&v).unwrap();
        let (no_click, p0) = vacuum_branch(&v).unwrap();
        let total = trace_out_mode2(&v);
        assert_abs_diff_eq!(click.success_prob + p0, 1.0, epsilon = 1e-14);
        for &(x, y) in &[(0.2, 0.1), (1.3, -0.4), (-2.0, 1.5)] {
            let lhs = click.success_prob * click.char.eval(x, y) + p0 * no_click.eval(x, y);
            assert_abs_diff_eq!((lhs - total.eval(x, y)).norm(), 0.0, epsilon = 1e-10);
        }
    }
}
