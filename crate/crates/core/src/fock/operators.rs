//! Truncated Fock-basis matrices: displacement, squeezing, beam splitter.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::CMat;

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for k in 1..=n {
        out.push(out[k - 1] + (k as f64).ln());
    }
    out
}

/// Generalized Laguerre polynomials `L_j^{(order)}(x)` for `j = 0..=n_max`.
fn laguerre_series(n_max: usize, order: usize, x: f64) -> Vec<f64> {
    let k = order as f64;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(1.0 + k - x);
    }
    for j in 1..n_max {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * out[j] - (jf + k) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    out
}

/// `⟨m|D(α)|n⟩` for `m < rows`, `n < cols`, from the exact Laguerre form
/// `⟨m|D(α)|n⟩ = √(n!/m!) α^{m−n} e^{−|α|²/2} L_n^{(m−n)}(|α|²)` (m ≥ n) and
/// its mirror for m < n. No truncation enters the entries themselves.
pub fn displacement(alpha: Complex64, rows: usize, cols: usize) -> CMat {
    let x = alpha.norm_sqr();
    let lnf = ln_factorials(rows.max(cols));
    let mut d = CMat::zeros(rows, cols);
    if x == 0.0 {
        for k in 0..rows.min(cols) {
            d[(k, k)] = Complex64::new(1.0, 0.0);
        }
        return d;
    }
    let ln_abs = alpha.norm().ln();
    let phase_up = alpha / alpha.norm();
    let phase_down = -alpha.conj() / alpha.norm();
    let max_order = rows.max(cols);
    for order in 0..max_order {
        // Entries with |m − n| = order: the lower diagonal (m = n + order) and
        // the upper diagonal (n = m + order).
        let lower_len = rows.saturating_sub(order).min(cols);
        let upper_len = cols.saturating_sub(order).min(rows);
        let len = lower_len.max(upper_len);
        if len == 0 {
            continue;
        }
        let lag = laguerre_series(len - 1, order, x);
        for (small, &l) in lag.iter().enumerate() {
            let big = small + order;
            let ln_mag = 0.5 * (lnf[small] - lnf[big]) + order as f64 * ln_abs - 0.5 * x;
            let mag = ln_mag.exp() * l;
            if big < rows && small < cols {
                d[(big, small)] = phase_up.powu(order as u32) * mag;
            }
            if order > 0 && small < rows && big < cols {
                d[(small, big)] = phase_down.powu(order as u32) * mag;
            }
        }
    }
    d
}

/// Annihilation operator truncated to `dim`.
pub fn annihilation(dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Quadratures `X = (a + a†)/2` and `P = (a − a†)/(2i)` truncated to `dim`.
pub fn quadratures(dim: usize) -> (CMat, CMat) {
    let a = annihilation(dim).map(|v| Complex64::new(v, 0.0));
    let ad = a.adjoint();
    let x = (&a + &ad) * Complex64::new(0.5, 0.0);
    let p = (&a - &ad) * Complex64::new(0.0, -0.5);
    (x, p)
}

/// Columns `S|n⟩`, `n < dim`, of the squeeze operator
/// `S = exp(s (a†² − a²)/2)`, cropped to `dim` rows.
///
/// The exponential is taken in a padded space so the cropped block is free of
/// edge effects; with this sign, `s > 0` narrows the P quadrature.
pub fn squeeze_columns(s: f64, dim: usize) -> DMatrix<f64> {
    if s == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let padded = 2 * dim + 40;
    let a = annihilation(padded);
    let a2 = &a * &a;
    let generator = (a2.transpose() - &a2) * (0.5 * s);
    let full = generator.exp();
    full.view((0, 0), (dim, dim)).into_owned()
}

/// Beam splitter `U = exp(θ(a₁a₂† − a₁†a₂))`, `cos θ = √T`, restricted to
/// inputs with vacuum in mode 2. Photon number is conserved, so the unitary is
/// a direct sum of `(N+1)`-dimensional blocks; only the column of `|N, 0⟩`
/// in each block is kept.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    pub t: f64,
    pub dim: usize,
    /// `columns[N][k] = ⟨N−k, k|U|N, 0⟩`.
    columns: Vec<DVector<f64>>,
}

impl BeamSplitter {
    pub fn new(t: f64, dim: usize) -> Self {
        let theta = t.sqrt().acos();
        let columns = (0..dim)
            .map(|total| {
                let size = total + 1;
                let mut g = DMatrix::<f64>::zeros(size, size);
                for k in 0..total {
                    // a₁a₂†: |N−k, k⟩ → √(N−k)√(k+1) |N−k−1, k+1⟩, and minus its adjoint.
                    let amp = ((total - k) as f64).sqrt() * ((k + 1) as f64).sqrt();
                    g[(k + 1, k)] = amp;
                    g[(k, k + 1)] = -amp;
                }
                (g * theta).exp().column(0).into_owned()
            })
            .collect();
        Self { t, dim, columns }
    }

    /// Maps a mode-1 state vector (mode 2 in vacuum) to the output amplitude
    /// matrix `Ψ[n₁, n₂]`.
    pub fn apply(&self, psi: &DVector<Complex64>) -> CMat {
        let dim = self.dim;
        let mut out = CMat::zeros(dim, dim);
        for (total, col) in self.columns.iter().enumerate().take(psi.len()) {
            let amp = psi[total];
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..=total {
                out[(total - k, k)] += amp * col[k];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn displacement_known_elements() {
        let alpha = Complex64::new(0.7, -0.4);
        let d = displacement(alpha, 6, 6);
        let x = alpha.norm_sqr();
        let coherent0 = (-0.5 * x).exp();
        assert_abs_diff_eq!((d[(0, 0)] - Complex64::new(coherent0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((d[(1, 0)] - alpha * coherent0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((d[(0, 1)] + alpha.conj() * coherent0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((d[(1, 1)] - Complex64::new(coherent0 * (1.0 - x), 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn displacement_columns_are_orthonormal() {
        let alpha = Complex64::new(2.1, 1.3);
        let d = displacement(alpha, 160, 30);
        let gram = d.adjoint() * &d;
        let defect = (gram - CMat::identity(30, 30)).norm();
        assert!(defect < 1e-10, "gram defect {defect}");
        // D(α)† = D(−α).
        let sq = displacement(alpha, 30, 30);
        let inv = displacement(-alpha, 30, 30);
        assert!((sq.adjoint() - inv).norm() < 1e-13);
    }

    #[test]
    fn splitter_columns_are_binomial() {
        let bs = BeamSplitter::new(0.3, 8);
        let (t, r) = (0.3f64.sqrt(), 0.7f64.sqrt());
        // |1, 0⟩ → t|1, 0⟩ + r|0, 1⟩ for this generator's sign.
        let mut psi = DVector::zeros(8);
        psi[1] = Complex64::new(1.0, 0.0);
        let out = bs.apply(&psi);
        assert_abs_diff_eq!(out[(1, 0)].re, t, epsilon = 1e-13);
        assert_abs_diff_eq!(out[(0, 1)].re, r, epsilon = 1e-13);
        for n in 0..8 {
            assert_abs_diff_eq!(bs.columns[n].norm(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn squeezed_vacuum_has_even_support() {
        let s = squeeze_columns(0.5 * 2.36f64.ln(), 40);
        let col = s.column(0);
        for n in (1..40).step_by(2) {
            assert!(col[n].abs() < 1e-14);
        }
        assert_abs_diff_eq!(col.norm(), 1.0, epsilon = 1e-10);
    }
}
