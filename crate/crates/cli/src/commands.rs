use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use psg_core::cat::{cat_fidelity, optimize_alpha};
use psg_core::imperfections::{detected_char, detected_wigner_surface, efficiency_threshold_formula};
use psg_core::quasiprob::{
    negativity_t_threshold_any, negativity_t_threshold_bisection, negativity_t_threshold_single,
};
use psg_core::verify::{self, VerifyConfig};
use psg_core::{
    classify, efficiency_threshold, wigner_eval, Detector, GaussianDiagState, GridSpec, PipelineParams, PsgError,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{sci, squeezed_input};
use crate::{CliError, FidelityArgs, ThresholdsArgs, VerifyArgs, WignerArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(
            File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

/// CSV writer whose first line is a `#` comment naming the tool and its inputs.
fn csv_with_comment(out: Option<&Path>, comment: &str) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let mut sink = open_output(out)?;
    writeln!(sink, "# psg {VERSION} {comment}")?;
    Ok(csv::Writer::from_writer(sink))
}

fn pipeline(exp2s: f64, nbar: f64, t: f64, common: &crate::PipelineFlags) -> psg_core::Result<PipelineParams> {
    Ok(PipelineParams {
        state: squeezed_input(exp2s, nbar)?,
        t,
        detector: common.detector.into(),
        eta: common.eta,
        xi: common.xi,
        convention: common.convention.into(),
    })
}

fn describe(params: &PipelineParams, exp2s: f64, nbar: f64) -> String {
    format!(
        "exp2s={exp2s} nbar={nbar} detector={} eta={} xi={} convention={}",
        params.detector, params.eta, params.xi, params.convention
    )
}

pub fn wigner(args: &WignerArgs) -> Result<(), CliError> {
    let params = pipeline(args.exp2s, args.nbar, args.t, &args.pipeline)?;
    let grid = GridSpec::new(args.grid.lo, args.grid.hi, args.grid.n)?;
    let surface = detected_wigner_surface(&params, grid)?;

    let comment = format!("wigner {} T={} grid={}", describe(&params, args.exp2s, args.nbar), args.t, args.grid);
    let mut w = csv_with_comment(args.out.as_deref(), &comment)?;
    w.write_record(["x", "p", "W"])?;
    for (x, p, v) in surface.rows() {
        w.write_record([sci(x), sci(p), sci(v)])?;
    }
    w.flush()?;

    let (x, p, v) = surface.min();
    let summary = format!("min W = {v:.6} at (x, p) = ({x}, {p})");
    // Keep stdout clean when it carries the CSV.
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

struct FidelityRow {
    t: f64,
    alpha: f64,
    fidelity: f64,
    w_origin: f64,
    verdict: String,
}

pub fn fidelity(args: &FidelityArgs) -> Result<(), CliError> {
    let rows = args
        .t_range
        .points()
        .into_par_iter()
        .map(|t| {
            let params = pipeline(args.exp2s, args.nbar, t, &args.pipeline)?;
            let char = detected_char(&params)?;
            let (alpha, fidelity) = match args.alpha {
                Some(alpha) => (alpha, cat_fidelity(&char, alpha)?),
                None => {
                    let best = optimize_alpha(&char, args.alpha_max)?;
                    (best.alpha, best.fidelity)
                }
            };
            let verdict = serde_json::to_value(classify(&char)?.verdict)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            Ok(FidelityRow {
                t,
                alpha,
                fidelity,
                w_origin: wigner_eval(&char, 0.0, 0.0)?,
                verdict,
            })
        })
        .collect::<psg_core::Result<Vec<_>>>()?;

    let reference = pipeline(args.exp2s, args.nbar, 0.5, &args.pipeline)?;
    let mode = match args.alpha {
        Some(a) => format!("alpha={a}"),
        None => format!("optimize-alpha alpha_max={}", args.alpha_max),
    };
    let comment = format!(
        "fidelity {} T-range={} {mode}",
        describe(&reference, args.exp2s, args.nbar),
        args.t_range
    );
    let (alpha_col, fid_col) = if args.alpha.is_some() {
        ("alpha", "fidelity")
    } else {
        ("alpha_star", "fidelity_star")
    };
    let mut w = csv_with_comment(args.out.as_deref(), &comment)?;
    w.write_record([
        "exp2s", "nbar", "T", "detector", "eta", "xi", "convention", alpha_col, fid_col, "W_origin", "verdict",
    ])?;
    let detector = reference.detector.to_string();
    let convention = reference.convention.to_string();
    for r in &rows {
        w.write_record([
            sci(args.exp2s),
            sci(args.nbar),
            sci(r.t),
            detector.clone(),
            sci(reference.eta),
            sci(reference.xi),
            convention.clone(),
            sci(r.alpha),
            sci(r.fidelity),
            sci(r.w_origin),
            r.verdict.clone(),
        ])?;
    }
    w.flush()?;
    if let Some(path) = &args.out {
        println!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct InputReport {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    pure: bool,
}

#[derive(Debug, Serialize)]
struct ThresholdPair {
    formula: f64,
    /// `None` when the heralded origin value keeps one sign over the scan.
    bisection: Option<f64>,
}

#[derive(Debug, Serialize)]
struct EtaReport {
    #[serde(rename = "T")]
    t: f64,
    formula: f64,
    /// `None` when the state is not Wigner-negative even at unit efficiency.
    bisection: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ThresholdReport {
    version: &'static str,
    input: InputReport,
    #[serde(rename = "T_min_single")]
    t_min_single: ThresholdPair,
    #[serde(rename = "T_min_threshold")]
    t_min_threshold: ThresholdPair,
    eta_min: Option<EtaReport>,
}

fn thresholds_state(args: &ThresholdsArgs) -> psg_core::Result<GaussianDiagState> {
    match (args.a, args.b) {
        (Some(a), Some(b)) => GaussianDiagState::new(a, b),
        _ => squeezed_input(args.exp2s.unwrap_or(crate::DEFAULT_EXP2S), args.nbar.unwrap_or(0.0)),
    }
}

pub fn thresholds(args: &ThresholdsArgs) -> Result<(), CliError> {
    let state = thresholds_state(args)?;
    let t_min_single = ThresholdPair {
        formula: negativity_t_threshold_single(&state)?,
        bisection: negativity_t_threshold_bisection(&state, Detector::SinglePhoton)?,
    };
    let t_min_threshold = ThresholdPair {
        formula: negativity_t_threshold_any(&state)?,
        bisection: negativity_t_threshold_bisection(&state, Detector::Threshold)?,
    };
    let eta_min = match args.t {
        Some(t) => {
            state.beamsplit_with_vacuum(t)?;
            let bisection = match efficiency_threshold(&state, t) {
                Ok(eta) => Some(eta),
                Err(PsgError::NoThresholdBelowOne { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            Some(EtaReport {
                t,
                formula: efficiency_threshold_formula(&state, t),
                bisection,
            })
        }
        None => None,
    };
    let report = ThresholdReport {
        version: VERSION,
        input: InputReport {
            a: state.a(),
            b: state.b(),
            pure: state.is_pure(),
        },
        t_min_single,
        t_min_threshold,
        eta_min,
    };
    let mut sink = open_output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut sink, &report).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

/// Runs the verification suite; returns whether every hard check passed.
pub fn verify(args: &VerifyArgs) -> Result<bool, CliError> {
    let cfg = VerifyConfig {
        dim: args.dim,
        convergence_dim: (args.convergence_dim > 0).then_some(args.convergence_dim),
        seed: args.seed,
        ..VerifyConfig::default()
    };
    let report = verify::run(&cfg)?;
    let mut out = io::stdout().lock();
    if args.json {
        serde_json::to_writer_pretty(&mut out, &report).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out)?;
    } else {
        write!(out, "{report}")?;
    }
    if !report.passed() {
        for f in report.failures() {
            eprintln!("FAILED: {} ({})", f.name, f.detail);
        }
    }
    Ok(report.passed())
}
