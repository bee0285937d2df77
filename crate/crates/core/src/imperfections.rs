//! Homodyne inefficiency and modal-purity models.

use serde::Serialize;

use crate::charfn::QuadGaussSum;
use crate::conditioning::{condition, trace_out_mode2, Detector};
use crate::error::{PsgError, Result};
use crate::gaussian::GaussianDiagState;
use crate::quasiprob::{bisect_sign_change, phase_space_grid, wigner_eval, GridSpec, PhaseSpaceSurface, BISECTION_TOL};
use crate::EPS_TOL;

/// How a homodyne efficiency acts on the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossConvention {
    /// Beam splitter of transmittivity η before an ideal detector:
    /// `C(ζ) → C(√η ζ) e^{−(1−η)|ζ|²/2}`.
    #[default]
    Physical,
    /// Efficiency-corrected tomography, quadratures rescaled by `1/√η`:
    /// `C(ζ) → C(ζ) e^{−(1−η)|ζ|²/(2η)}`.
    Rescaled,
}

impl std::fmt::Display for LossConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossConvention::Physical => "physical",
            LossConvention::Rescaled => "rescaled",
        })
    }
}

fn check_unit_interval(name: &'static str, value: f64, allow_zero: bool) -> Result<()> {
    let ok = value.is_finite() && value <= 1.0 && (value > 0.0 || (allow_zero && value == 0.0));
    if ok {
        Ok(())
    } else {
        Err(PsgError::InvalidParameter {
            name,
            value,
            reason: if allow_zero { "must lie in [0, 1]" } else { "must lie in (0, 1]" },
        })
    }
}

/// Applies detection efficiency `eta` under the chosen convention.
pub fn apply_loss(char: &QuadGaussSum, eta: f64, convention: LossConvention) -> Result<QuadGaussSum> {
    check_unit_interval("eta", eta, false)?;
    if eta == 1.0 {
        return Ok(char.clone());
    }
    Ok(match convention {
        LossConvention::Physical => {
            let extra = 1.0 - eta;
            char.scale_arg(eta.sqrt()).mul_gaussian(extra, extra)
        }
        LossConvention::Rescaled => {
            let extra = (1.0 - eta) / eta;
            char.mul_gaussian(extra, extra)
        }
    })
}

/// `ξ · sub + (1 − ξ) · sq`; characteristic functions are linear in the state.
pub fn modal_mixture(sub_char: &QuadGaussSum, sq_char: &QuadGaussSum, xi: f64) -> Result<QuadGaussSum> {
    check_unit_interval("xi", xi, true)?;
    if xi == 1.0 {
        return Ok(sub_char.clone());
    }
    if xi == 0.0 {
        return Ok(sq_char.clone());
    }
    Ok(sub_char.convex(sq_char, xi))
}

/// Parameters of one heralded-state reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineParams {
    pub state: GaussianDiagState,
    pub t: f64,
    pub detector: Detector,
    pub eta: f64,
    pub xi: f64,
    pub convention: LossConvention,
}

/// Characteristic function seen by the homodyne reconstruction: heralded
/// state mixed with the unheralded Gaussian at modal purity ξ, both passed
/// through the efficiency η.
pub fn detected_char(params: &PipelineParams) -> Result<QuadGaussSum> {
    let v = params.state.beamsplit_with_vacuum(params.t)?;
    let heralded = condition(&v, params.detector)?;
    let sub = apply_loss(&heralded.char, params.eta, params.convention)?;
    let sq = apply_loss(&trace_out_mode2(&v), params.eta, params.convention)?;
    modal_mixture(&sub, &sq, params.xi)
}

/// Reconstructed Wigner surface over `grid`.
pub fn detected_wigner_surface(params: &PipelineParams, grid: GridSpec) -> Result<PhaseSpaceSurface> {
    phase_space_grid(&detected_char(params)?, grid)
}

/// Reconstructed `W(0, 0)`.
pub fn detected_wigner_origin(params: &PipelineParams) -> Result<f64> {
    wigner_eval(&detected_char(params)?, 0.0, 0.0)
}

/// Minimal homodyne efficiency for `W(0, 0) < 0` of the threshold-detector
/// state, found by bisection on the exact physical-loss Wigner value.
pub fn efficiency_threshold(state: &GaussianDiagState, t: f64) -> Result<f64> {
    if !state.is_squeezed_standard() {
        return Err(PsgError::NotSqueezedInput {
            a: state.a(),
            b: state.b(),
        });
    }
    let w = |eta: f64| {
        detected_wigner_origin(&PipelineParams {
            state: *state,
            t,
            detector: Detector::Threshold,
            eta,
            xi: 1.0,
            convention: LossConvention::Physical,
        })
    };
    let at_one = w(1.0)?;
    if at_one.abs() <= EPS_TOL {
        return Ok(1.0);
    }
    if at_one > 0.0 {
        return Err(PsgError::NoThresholdBelowOne { w_at_unit_eta: at_one });
    }
    // η → 0 leaves the vacuum, whose origin value is positive.
    bisect_sign_change(w, BISECTION_TOL, 1.0, BISECTION_TOL)?
        .ok_or(PsgError::NoThresholdBelowOne { w_at_unit_eta: at_one })
}

/// Closed-form efficiency threshold
/// `−1/(2T(A−1)) − 1/(2T(B−1)) − R/(4T)`; reduces to `(1+T)/(4T)` for pure inputs.
pub fn efficiency_threshold_formula(state: &GaussianDiagState, t: f64) -> f64 {
    let (a, b) = (state.a(), state.b());
    -1.0 / (2.0 * t * (a - 1.0)) - 1.0 / (2.0 * t * (b - 1.0)) - (1.0 - t) / (4.0 * t)
}

/// Bracket of the printed origin-value expression for the lossy threshold
/// state, `1/√(vw) − 1/√((v − R(A−1)/2)(w − R(B−1)/2))` with
/// `v = T(A−1)η + 1`, `w = T(B−1)η + 1`. `shift_sign = −1` gives the printed
/// form, `+1` the form that follows from transforming the lossy
/// characteristic function exactly.
pub fn loss_origin_bracket(state: &GaussianDiagState, t: f64, eta: f64, shift_sign: f64) -> f64 {
    let (a, b) = (state.a(), state.b());
    let r = 1.0 - t;
    let v = t * (a - 1.0) * eta + 1.0;
    let w = t * (b - 1.0) * eta + 1.0;
    let v_shift = v + shift_sign * r * (a - 1.0) / 2.0;
    let w_shift = w + shift_sign * r * (b - 1.0) / 2.0;
    1.0 / (v * w).sqrt() - 1.0 / (v_shift * w_shift).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasiprob::purity;
    use approx::assert_abs_diff_eq;

    fn pipeline(eta: f64, xi: f64, convention: LossConvention) -> PipelineParams {
        PipelineParams {
            state: GaussianDiagState::from_exp2s(2.36).unwrap(),
            t: 0.88,
            detector: Detector::Threshold,
            eta,
            xi,
            convention,
        }
    }

    #[test]
    fn unit_efficiency_is_identity() {
        let c = QuadGaussSum::fock_one();
        assert_eq!(apply_loss(&c, 1.0, LossConvention::Physical).unwrap(), c);
        assert_eq!(apply_loss(&c, 1.0, LossConvention::Rescaled).unwrap(), c);
        assert!(apply_loss(&c, 0.0, LossConvention::Physical).is_err());
        assert!(apply_loss(&c, 1.2, LossConvention::Physical).is_err());
    }

    #[test]
    fn vacuum_is_a_loss_fixed_point() {
        let lossy = apply_loss(&QuadGaussSum::vacuum(), 0.37, LossConvention::Physical).unwrap();
        for &(x, y) in &[(0.3, 0.4), (1.5, -0.2)] {
            assert_abs_diff_eq!(lossy.eval(x, y).re, QuadGaussSum::vacuum().eval(x, y).re, epsilon = 1e-15);
        }
    }

    #[test]
    fn loss_composes_multiplicatively() {
        let c = QuadGaussSum::fock_one();
        let twice = apply_loss(&apply_loss(&c, 0.8, LossConvention::Physical).unwrap(), 0.6, LossConvention::Physical).unwrap();
        let once = apply_loss(&c, 0.48, LossConvention::Physical).unwrap();
        for &(x, y) in &[(0.3, 0.4), (1.5, -0.2), (-2.0, 0.7)] {
            assert_abs_diff_eq!((twice.eval(x, y) - once.eval(x, y)).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn loss_mixes_fock_one() {
        let c = QuadGaussSum::fock_one();
        let lossy = apply_loss(&c, 0.7, LossConvention::Physical).unwrap();
        assert_abs_diff_eq!(lossy.eval(0.0, 0.0).re, 1.0, epsilon = 1e-15);
        assert!(purity(&lossy).unwrap() < purity(&c).unwrap());
    }

    #[test]
    fn mixture_endpoints() {
        let a = QuadGaussSum::fock_one();
        let b = QuadGaussSum::gaussian(0.5, 2.0);
        assert_eq!(modal_mixture(&a, &b, 1.0).unwrap(), a);
        assert_eq!(modal_mixture(&a, &b, 0.0).unwrap(), b);
        assert!(modal_mixture(&a, &b, -0.1).is_err());
    }

    #[test]
    fn pipeline_reference_values() {
        let ideal = detected_wigner_origin(&pipeline(1.0, 1.0, LossConvention::Physical)).unwrap();
        assert_abs_diff_eq!(ideal, -0.52, epsilon = 0.01);
        let lossy = detected_wigner_origin(&pipeline(0.75, 1.0, LossConvention::Physical)).unwrap();
        assert_abs_diff_eq!(lossy, -0.21, epsilon = 0.005);
        let impure = detected_wigner_origin(&pipeline(0.75, 0.7, LossConvention::Physical)).unwrap();
        assert!(impure > 0.0);
        assert_abs_diff_eq!(impure, 0.03, epsilon = 0.005);
        let rescaled = detected_wigner_origin(&pipeline(0.75, 1.0, LossConvention::Rescaled)).unwrap();
        assert_abs_diff_eq!(rescaled, -0.16, epsilon = 0.005);
    }

    #[test]
    fn efficiency_threshold_references() {
        let pure = GaussianDiagState::from_exp2s(2.36).unwrap();
        assert_abs_diff_eq!(efficiency_threshold(&pure, 0.88).unwrap(), 0.534, epsilon = 0.002);
        assert_abs_diff_eq!(efficiency_threshold(&pure, 0.5).unwrap(), 0.75, epsilon = 1e-8);
        assert_abs_diff_eq!(efficiency_threshold(&pure, 1.0 / 3.0).unwrap(), 1.0, epsilon = 1e-8);
        assert!(matches!(
            efficiency_threshold(&pure, 0.2),
            Err(PsgError::NoThresholdBelowOne { .. })
        ));
        assert_abs_diff_eq!(efficiency_threshold_formula(&pure, 0.5), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn mixed_input_threshold_matches_formula() {
        let mixed = GaussianDiagState::new(0.5, 2.5).unwrap();
        let t = 0.9;
        let bis = efficiency_threshold(&mixed, t).unwrap();
        assert_abs_diff_eq!(bis, efficiency_threshold_formula(&mixed, t), epsilon = 1e-8);
    }

    #[test]
    fn printed_bracket_has_wrong_sign_at_reference_point() {
        let pure = GaussianDiagState::from_exp2s(2.36).unwrap();
        assert!(loss_origin_bracket(&pure, 0.88, 0.75, -1.0) > 0.0);
        assert!(loss_origin_bracket(&pure, 0.88, 0.75, 1.0) < 0.0);
    }
}
