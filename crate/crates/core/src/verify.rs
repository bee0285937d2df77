//! Cross-checks of the analytic calculus against the Fock-space oracle, and
//! informational probes of printed values that the exact model does not
//! reproduce.
//!
//! Hard checks decide the pass/fail status; info items never do.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cat::{cat_char_fn, overlap_fidelity, CatSpec};
use crate::conditioning::{self, trace_out_mode2, ConditionedState, Detector};
use crate::error::Result;
use crate::fock::{self, operators::BeamSplitter, FockDensityMatrix, HeraldOutcome, TwoModeState};
use crate::gaussian::{GaussianDiagState, TwoModeCorrelation};
use crate::imperfections::{
    apply_loss, detected_wigner_origin, efficiency_threshold, efficiency_threshold_formula, loss_origin_bracket,
    LossConvention, PipelineParams,
};
use crate::quasiprob::{negativity_t_threshold_any, negativity_t_threshold_bisection, negativity_t_threshold_single, wigner_eval};

pub const CHAR_TOL: f64 = 1e-4;
pub const WIGNER_TOL: f64 = 1e-4;
pub const PROB_TOL: f64 = 1e-5;
pub const FIDELITY_TOL: f64 = 1e-5;
pub const MOMENT_TOL: f64 = 1e-6;
pub const CONVERGENCE_TOL: f64 = 1e-6;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Builder for the ideal one-photon heralded state. Swappable so that a
/// deliberately corrupted implementation can be shown to fail verification.
pub type SinglePhotonBuilder = fn(&TwoModeCorrelation) -> Result<ConditionedState>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub dim: usize,
    /// Second truncation used to certify convergence of the oracle scalars.
    pub convergence_dim: Option<usize>,
    pub seed: u64,
    pub single_photon: SinglePhotonBuilder,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dim: fock::DEFAULT_DIM,
            convergence_dim: Some(60),
            seed: DEFAULT_SEED,
            single_photon: conditioning::subtract_single_photon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest observed error or the checked value.
    pub value: f64,
    /// Tolerance or bound the value is compared against.
    pub bound: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoItem {
    pub name: String,
    pub detail: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub convergence_dim: Option<usize>,
    pub checks: Vec<CheckResult>,
    pub info: Vec<InfoItem>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// One point of the oracle parameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub exp2s: f64,
    pub nbar: f64,
    pub t: f64,
}

impl GridPoint {
    pub fn squeezing(&self) -> f64 {
        0.5 * self.exp2s.ln()
    }

    pub fn state(&self) -> Result<GaussianDiagState> {
        GaussianDiagState::from_squeezed_thermal(self.squeezing(), self.nbar)
    }

    fn label(&self) -> String {
        format!("exp2s={} nbar={} T={}", self.exp2s, self.nbar, self.t)
    }
}

/// Ten parameter points spanning pure and mixed inputs, small and large T.
pub const ORACLE_GRID: [GridPoint; 10] = [
    GridPoint { exp2s: 2.36, nbar: 0.0, t: 0.88 },
    GridPoint { exp2s: 2.36, nbar: 0.0, t: 0.5 },
    GridPoint { exp2s: 2.36, nbar: 0.0, t: 0.2 },
    GridPoint { exp2s: 2.36, nbar: 0.05, t: 0.9 },
    GridPoint { exp2s: 1.5, nbar: 0.0, t: 0.7 },
    GridPoint { exp2s: 3.0, nbar: 0.0, t: 0.95 },
    GridPoint { exp2s: 2.0, nbar: 0.1, t: 0.6 },
    GridPoint { exp2s: 1.8, nbar: 0.02, t: 0.35 },
    GridPoint { exp2s: 2.6, nbar: 0.0, t: 0.75 },
    GridPoint { exp2s: 1.2, nbar: 0.0, t: 0.8 },
];

/// Oracle-side states for one grid point.
pub struct OracleStates {
    pub two_mode: TwoModeState,
    pub single: (FockDensityMatrix, f64),
    pub threshold: (FockDensityMatrix, f64),
    pub traced: FockDensityMatrix,
}

pub fn oracle_states(point: &GridPoint, dim: usize) -> Result<OracleStates> {
    let input = fock::squeezed_thermal_rho(point.squeezing(), point.nbar, dim)?;
    let splitter = BeamSplitter::new(point.t, dim);
    let two_mode = fock::beamsplitter_apply_with(&input, &splitter);
    let single = two_mode.condition_mode2(HeraldOutcome::One)?;
    let threshold = two_mode.condition_mode2(HeraldOutcome::AtLeastOne)?;
    let (traced, _) = two_mode.condition_mode2(HeraldOutcome::None)?;
    Ok(OracleStates {
        two_mode,
        single,
        threshold,
        traced,
    })
}

/// Scalars compared across truncations.
fn oracle_scalars(o: &OracleStates) -> Result<[f64; 6]> {
    let cat = CatSpec::new(1.0)?;
    Ok([
        o.single.1,
        o.threshold.1,
        fock::wigner_parity(&o.single.0, 0.0, 0.0)?,
        fock::wigner_parity(&o.threshold.0, 0.0, 0.0)?,
        fock::fidelity_pure(&o.single.0, &cat)?,
        fock::fidelity_pure(&o.threshold.0, &cat)?,
    ])
}

struct Accumulator {
    max_err: f64,
    worst: String,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            max_err: 0.0,
            worst: String::new(),
        }
    }

    fn record(&mut self, err: f64, ctx: impl FnOnce() -> String) {
        if err > self.max_err || err.is_nan() {
            self.max_err = err;
            self.worst = ctx();
        }
    }

    fn merge(&mut self, other: Accumulator) {
        if other.max_err > self.max_err || other.max_err.is_nan() {
            self.max_err = other.max_err;
            self.worst = other.worst;
        }
    }

    fn check(self, name: &str, tol: f64) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            passed: self.max_err <= tol,
            value: self.max_err,
            bound: tol,
            detail: if self.worst.is_empty() {
                "max abs error".to_string()
            } else {
                format!("max abs error at {}", self.worst)
            },
        }
    }
}

#[derive(Default)]
struct PointOutcome {
    moments: Option<Accumulator>,
    two_mode_char: Option<Accumulator>,
    char_values: Option<Accumulator>,
    wigner: Option<Accumulator>,
    probs: Option<Accumulator>,
    fidelity: Option<Accumulator>,
    loss: Option<Accumulator>,
    invariants: Option<Accumulator>,
    convergence: Option<Accumulator>,
    closed_form_prob_gap: f64,
    error: Option<String>,
}

fn random_zeta(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    Complex64::from_polar(r, phi)
}

fn density_defect(rho: &FockDensityMatrix) -> f64 {
    let trace_err = (rho.trace() - 1.0).abs();
    let neg = (-rho.min_eigenvalue() - 1e-10).max(0.0);
    rho.hermiticity_defect().max(trace_err).max(neg)
}

fn check_point(point: &GridPoint, cfg: &VerifyConfig, seed: u64) -> Result<PointOutcome> {
    let label = point.label();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state = point.state()?;
    let v = state.beamsplit_with_vacuum(point.t)?;
    let single = (cfg.single_photon)(&v)?;
    let threshold = conditioning::subtract_threshold(&v)?;
    let traced = trace_out_mode2(&v);
    let oracle = oracle_states(point, cfg.dim)?;

    let mut out = PointOutcome::default();

    let mut moments = Accumulator::new();
    let entries = oracle.two_mode.correlation_entries();
    let expected = [v.n1, v.n2, v.c1, v.c2, v.m1, v.m2];
    for (k, (got, want)) in entries.iter().zip(expected.iter()).enumerate() {
        moments.record((got - want).abs(), || format!("{label} entry {k}"));
    }
    out.moments = Some(moments);

    let mut two = Accumulator::new();
    for _ in 0..20 {
        let eta = random_zeta(&mut rng, 2.0);
        let xi = random_zeta(&mut rng, 2.0);
        let got = oracle.two_mode.char_value(eta, xi);
        let want = v.char_value((eta.re, eta.im), (xi.re, xi.im));
        two.record((got - want).norm(), || format!("{label} eta={eta} xi={xi}"));
    }
    out.two_mode_char = Some(two);

    let pairs: [(&str, &crate::charfn::QuadGaussSum, &FockDensityMatrix); 3] = [
        ("single", &single.char, &oracle.single.0),
        ("threshold", &threshold.char, &oracle.threshold.0),
        ("traced", &traced, &oracle.traced),
    ];

    let mut chars = Accumulator::new();
    for _ in 0..20 {
        let z = random_zeta(&mut rng, 3.0);
        for (name, analytic, rho) in &pairs {
            let err = (analytic.eval_complex(z) - fock::char_value(rho, z)).norm();
            chars.record(err, || format!("{label} {name} zeta={z}"));
        }
    }
    out.char_values = Some(chars);

    let mut wig = Accumulator::new();
    for ix in 0..5 {
        for ip in 0..5 {
            let (x, p) = (-1.5 + 0.75 * ix as f64, -1.5 + 0.75 * ip as f64);
            for (name, analytic, rho) in &pairs[..2] {
                let err = (wigner_eval(analytic, x, p)? - fock::wigner_parity(rho, x, p)?).abs();
                wig.record(err, || format!("{label} {name} ({x}, {p})"));
            }
        }
    }
    out.wigner = Some(wig);

    let mut probs = Accumulator::new();
    probs.record((single.success_prob - oracle.single.1).abs(), || format!("{label} one-photon"));
    probs.record((threshold.success_prob - oracle.threshold.1).abs(), || format!("{label} click"));
    out.probs = Some(probs);
    out.closed_form_prob_gap = (single.closed_form_prob - single.success_prob).abs();

    let mut fid = Accumulator::new();
    for alpha in [0.6, 1.1, 1.6] {
        let cat = CatSpec::new(alpha)?;
        let cat_char = cat_char_fn(&cat);
        for (name, analytic, rho) in &pairs[..2] {
            let err = (overlap_fidelity(&cat_char, analytic)? - fock::fidelity_pure(rho, &cat)?).abs();
            fid.record(err, || format!("{label} {name} alpha={alpha}"));
        }
    }
    out.fidelity = Some(fid);

    let mut loss = Accumulator::new();
    let eta = 0.75;
    let lossy_analytic = apply_loss(&threshold.char, eta, LossConvention::Physical)?;
    let lossy_oracle = fock::loss_apply(&oracle.threshold.0, eta)?;
    for _ in 0..10 {
        let z = random_zeta(&mut rng, 3.0);
        let err = (lossy_analytic.eval_complex(z) - fock::char_value(&lossy_oracle, z)).norm();
        loss.record(err, || format!("{label} lossy char zeta={z}"));
    }
    let w_err = (wigner_eval(&lossy_analytic, 0.0, 0.0)? - fock::wigner_parity(&lossy_oracle, 0.0, 0.0)?).abs();
    loss.record(w_err, || format!("{label} lossy W(0,0)"));
    out.loss = Some(loss);

    let mut inv = Accumulator::new();
    for (name, rho) in [
        ("single", &oracle.single.0),
        ("threshold", &oracle.threshold.0),
        ("traced", &oracle.traced),
        ("lossy", &lossy_oracle),
    ] {
        inv.record(density_defect(rho), || format!("{label} {name}"));
        inv.record((rho.tail_mass() - fock::TAIL_TOL).max(0.0), || format!("{label} {name} tail"));
    }
    out.invariants = Some(inv);

    if let Some(dim2) = cfg.convergence_dim {
        if point.exp2s <= 3.0 {
            let base = oracle_scalars(&oracle)?;
            let fine = oracle_scalars(&oracle_states(point, dim2)?)?;
            let mut conv = Accumulator::new();
            for (k, (a, b)) in base.iter().zip(fine.iter()).enumerate() {
                conv.record((a - b).abs(), || format!("{label} scalar {k}"));
            }
            out.convergence = Some(conv);
        }
    }
    Ok(out)
}

fn value_check(name: &str, value: f64, target: f64, tol: f64, detail: &str) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: (value - target).abs() <= tol,
        value,
        bound: tol,
        detail: format!("{detail}; target {target} +/- {tol}"),
    }
}

fn sign_check(name: &str, value: f64, negative: bool, detail: &str) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: if negative { value < 0.0 } else { value > 0.0 },
        value,
        bound: 0.0,
        detail: format!("{detail}; expected {}", if negative { "< 0" } else { "> 0" }),
    }
}

fn info(name: &str, detail: &str, values: &[(&str, f64)]) -> InfoItem {
    InfoItem {
        name: name.to_string(),
        detail: detail.to_string(),
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

fn reference_pipeline(eta: f64, xi: f64, convention: LossConvention) -> Result<PipelineParams> {
    Ok(PipelineParams {
        state: GaussianDiagState::from_exp2s(2.36)?,
        t: 0.88,
        detector: Detector::Threshold,
        eta,
        xi,
        convention,
    })
}

/// Analytic anchors and documented-discrepancy probes that do not need the
/// oracle grid.
fn anchor_checks(cfg: &VerifyConfig, checks: &mut Vec<CheckResult>, infos: &mut Vec<InfoItem>) -> Result<()> {
    let pure = GaussianDiagState::from_exp2s(2.36)?;
    let v = pure.beamsplit_with_vacuum(0.88)?;

    let w_analytic = detected_wigner_origin(&reference_pipeline(1.0, 1.0, LossConvention::Physical)?)?;
    let oracle = oracle_states(&ORACLE_GRID[0], cfg.dim)?;
    let w_oracle = fock::wigner_parity(&oracle.threshold.0, 0.0, 0.0)?;
    checks.push(value_check("threshold W(0,0) analytic", w_analytic, -0.52, 0.01, "exp2s=2.36, T=0.88, eta=1, xi=1"));
    checks.push(value_check("threshold W(0,0) oracle", w_oracle, -0.52, 0.01, "displaced parity at the same point"));

    let t_any = negativity_t_threshold_bisection(&pure, Detector::Threshold)?.unwrap_or(f64::NAN);
    checks.push(value_check("T threshold (threshold detector) bisection", t_any, 1.0 / 3.0, 1e-6, "pure exp2s=2.36"));
    let formula_any = negativity_t_threshold_any(&pure)?;
    checks.push(value_check("T threshold (threshold detector) formula", formula_any, 1.0 / 3.0, 1e-12, "pure exp2s=2.36"));

    let mixed = GaussianDiagState::new(0.5, 2.5)?;
    let t_single = negativity_t_threshold_bisection(&mixed, Detector::SinglePhoton)?.unwrap_or(f64::NAN);
    let formula_single = negativity_t_threshold_single(&mixed)?;
    checks.push(value_check("T threshold (one photon) bisection vs formula", t_single, formula_single, 1e-6, "A=0.5, B=2.5"));

    let eta_min = efficiency_threshold(&pure, 0.88)?;
    checks.push(value_check("minimal homodyne efficiency", eta_min, 0.534, 0.002, "pure exp2s=2.36, T=0.88"));
    checks.push(value_check(
        "minimal homodyne efficiency vs (1+T)/(4T)",
        eta_min,
        efficiency_threshold_formula(&pure, 0.88),
        1e-6,
        "pure exp2s=2.36, T=0.88",
    ));

    let printed = loss_origin_bracket(&pure, 0.88, 0.75, -1.0);
    let corrected = loss_origin_bracket(&pure, 0.88, 0.75, 1.0);
    let w_b = detected_wigner_origin(&reference_pipeline(0.75, 1.0, LossConvention::Physical)?)?;
    checks.push(sign_check("lossy W(0,0) exact pipeline (eta=0.75)", w_b, true, "exp2s=2.36, T=0.88"));
    infos.push(info(
        "printed lossy origin bracket",
        "printed bracket (shift v - R(A-1)/2) is positive while the exact pipeline is negative; the + shift agrees with the exact transform",
        &[("printed_bracket", printed), ("plus_shift_bracket", corrected), ("exact_w_origin", w_b)],
    ));

    let mut record_pair = |name: &str, eta: f64, xi: f64, published: f64, negative: bool| -> Result<()> {
        let phys = detected_wigner_origin(&reference_pipeline(eta, xi, LossConvention::Physical)?)?;
        let resc = detected_wigner_origin(&reference_pipeline(eta, xi, LossConvention::Rescaled)?)?;
        checks.push(sign_check(name, phys, negative, &format!("physical loss, eta={eta}, xi={xi}")));
        infos.push(info(
            name,
            "reported value is not reproduced by the stated model; only the sign is asserted",
            &[("physical", phys), ("rescaled", resc), ("reported", published)],
        ));
        Ok(())
    };
    record_pair("W(0,0) at eta=0.75, xi=1", 0.75, 1.0, -0.15, true)?;
    record_pair("W(0,0) at eta=0.75, xi=0.7", 0.75, 0.7, 0.075, false)?;
    record_pair("W(0,0) at eta=0.9, xi=0.7", 0.9, 0.7, -0.044, true)?;
    record_pair("W(0,0) at eta=0.75, xi=0.9", 0.75, 0.9, -0.073, true)?;

    let single = (cfg.single_photon)(&v)?;
    infos.push(info(
        "one-photon herald normalization",
        "closed-form [(m1+1)(m2+1)]^(3/2) / (2(m1 m2 - 1)) against direct integration and the oracle",
        &[
            ("closed_form_prob", single.closed_form_prob),
            ("integrated_prob", single.success_prob),
            ("oracle_prob", oracle.single.1),
        ],
    ));
    Ok(())
}

/// Runs the full verification suite.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let outcomes: Vec<(GridPoint, Result<PointOutcome>)> = ORACLE_GRID
        .par_iter()
        .enumerate()
        .map(|(k, p)| (*p, check_point(p, cfg, cfg.seed.wrapping_add(k as u64))))
        .collect();

    let mut checks = Vec::new();
    let mut infos = Vec::new();
    let mut acc: BTreeMap<&'static str, Accumulator> = BTreeMap::new();
    let mut max_closed_gap: f64 = 0.0;
    for (point, outcome) in outcomes {
        let o = match outcome {
            Ok(o) => o,
            Err(e) => PointOutcome {
                error: Some(e.to_string()),
                ..Default::default()
            },
        };
        if let Some(err) = o.error {
            checks.push(CheckResult {
                name: format!("oracle point {}", point.label()),
                passed: false,
                value: f64::NAN,
                bound: 0.0,
                detail: err,
            });
            continue;
        }
        max_closed_gap = max_closed_gap.max(o.closed_form_prob_gap);
        for (key, a) in [
            ("two-mode correlation entries", o.moments),
            ("two-mode characteristic values", o.two_mode_char),
            ("characteristic values", o.char_values),
            ("Wigner values", o.wigner),
            ("herald probabilities", o.probs),
            ("cat fidelities", o.fidelity),
            ("physical loss", o.loss),
            ("oracle density invariants", o.invariants),
            ("truncation convergence", o.convergence),
        ] {
            if let Some(a) = a {
                acc.entry(key).or_insert_with(Accumulator::new).merge(a);
            }
        }
    }
    let tolerances = [
        ("two-mode correlation entries", MOMENT_TOL),
        ("two-mode characteristic values", CHAR_TOL),
        ("characteristic values", CHAR_TOL),
        ("Wigner values", WIGNER_TOL),
        ("herald probabilities", PROB_TOL),
        ("cat fidelities", FIDELITY_TOL),
        ("physical loss", CHAR_TOL),
        ("oracle density invariants", 1e-10),
        ("truncation convergence", CONVERGENCE_TOL),
    ];
    for (key, tol) in tolerances {
        if let Some(a) = acc.remove(key) {
            checks.push(a.check(&format!("oracle: {key}"), tol));
        }
    }
    infos.push(info(
        "one-photon closed-form vs integrated probability",
        "largest gap over the oracle grid",
        &[("max_abs_gap", max_closed_gap)],
    ));

    anchor_checks(cfg, &mut checks, &mut infos)?;

    Ok(VerifyReport {
        dim: cfg.dim,
        convergence_dim: cfg.convergence_dim,
        checks,
        info: infos,
    })
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "verification at dim {}", self.dim)?;
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: value {:.6e} (bound {:.1e}) - {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.bound,
                c.detail
            )?;
        }
        for i in &self.info {
            let vals: Vec<String> = i.values.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
            writeln!(f, "[INFO] {}: {} ({})", i.name, vals.join(", "), i.detail)?;
        }
        let failed = self.failures().count();
        if failed == 0 {
            writeln!(f, "all {} checks passed", self.checks.len())
        } else {
            writeln!(f, "{failed} of {} checks FAILED", self.checks.len())
        }
    }
}
