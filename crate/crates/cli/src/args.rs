use std::str::FromStr;

use clap::ValueEnum;
use psg_core::{Detector, GaussianDiagState, LossConvention, Result};

/// `lo:hi:n` triple used by `--grid` and `--T-range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    /// Evenly spaced points including both ends; a single point sits at `lo`.
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64)
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected lo:hi:n, got `{s}`"));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("bad point count `{n}`"))?;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err("bounds must be finite".into());
        }
        if n == 0 {
            return Err("point count must be positive".into());
        }
        if hi < lo || (n > 1 && hi == lo) {
            return Err(format!("need lo < hi, got {lo} and {hi}"));
        }
        Ok(Self { lo, hi, n })
    }
}

impl std::fmt::Display for Range {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Ideal,
    Threshold,
}

impl From<DetectorArg> for Detector {
    fn from(d: DetectorArg) -> Self {
        match d {
            DetectorArg::Ideal => Detector::SinglePhoton,
            DetectorArg::Threshold => Detector::Threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Physical,
    Rescaled,
}

impl From<ConventionArg> for LossConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Physical => LossConvention::Physical,
            ConventionArg::Rescaled => LossConvention::Rescaled,
        }
    }
}

/// Squeezed thermal input from `exp(2s)` and the thermal photon number.
pub fn squeezed_input(exp2s: f64, nbar: f64) -> Result<GaussianDiagState> {
    if !(exp2s.is_finite() && exp2s > 0.0) {
        return Err(psg_core::PsgError::InvalidParameter {
            name: "exp2s",
            value: exp2s,
            reason: "must be a positive finite number",
        });
    }
    GaussianDiagState::from_squeezed_thermal(0.5 * exp2s.ln(), nbar)
}

/// Writes `v` with 17 significant digits, enough to round-trip any f64.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: Range = "-3:3:61".parse().unwrap();
        assert_eq!(r, Range { lo: -3.0, hi: 3.0, n: 61 });
        assert_eq!(r.points()[30], 0.0);
        assert_eq!(*r.points().last().unwrap(), 3.0);
        let single: Range = "0.5:0.5:1".parse().unwrap();
        assert_eq!(single.points(), vec![0.5]);
        for bad in ["1:2", "a:2:3", "2:1:5", "0:1:0", "1:1:3", "0:inf:3"] {
            assert!(bad.parse::<Range>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sci_keeps_precision() {
        let x = 0.1 + 0.2;
        assert_eq!(sci(x).parse::<f64>().unwrap(), x);
        assert_eq!(sci(-0.5), "-5.0000000000000000e-1");
    }
}
