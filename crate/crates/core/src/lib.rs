//! Phase-space calculus for photon-subtracted Gaussian states.
//!
//! A single-mode squeezed (possibly thermal) Gaussian field is split with the
//! vacuum on a beam splitter, and the transmitted mode is heralded on a
//! photodetection in the reflected mode. This crate represents every state in
//! play by an exact characteristic function ([`charfn::QuadGaussSum`]) and
//! derives from it Wigner values, P-function classification, cat-state
//! fidelity, and the effect of homodyne inefficiency and modal impurity. A
//! truncated Fock-space oracle ([`fock`]) reproduces each quantity by brute
//! force, and [`verify`] runs the cross-checks.

pub mod cat;
pub mod charfn;
pub mod conditioning;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod imperfections;
pub mod quasiprob;
pub mod verify;

pub use cat::{cat_char_fn, optimize_alpha, overlap_fidelity, AlphaOptimum, CatSpec};
pub use charfn::{GaussTerm, Poly, QuadGaussSum};
pub use conditioning::{subtract_single_photon, subtract_threshold, trace_out_mode2, ConditionedState, Detector};
pub use error::{PsgError, Result};
pub use gaussian::{GaussianDiagState, TwoModeCorrelation};
pub use imperfections::{apply_loss, efficiency_threshold, modal_mixture, LossConvention, PipelineParams};
pub use quasiprob::{classify, integrate_full_plane, wigner_eval, ClassicalityVerdict, GridSpec, Verdict};

/// Tolerance for physicality checks and herald-probability margins.
pub const EPS_TOL: f64 = 1e-12;
