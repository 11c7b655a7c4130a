//! Generalized symmetric eigensolver with canonical orthogonalisation.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::assembly::Pencil;
use crate::error::{Error, Result};

/// Multiple of ε·κ(S) always accepted as residual.
pub const CONDITIONING_SLACK: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Overlap eigenvalues below `overlap_threshold · max` are dropped.
    pub overlap_threshold: f64,
    /// Bound on the relative backward error of every eigenpair, raised to
    /// `CONDITIONING_SLACK·ε·κ(S)` for ill-conditioned overlaps.
    pub residual_tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { overlap_threshold: 1e-10, residual_tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column k is the coefficient vector of eigenvalue k, with xᵀSx = 1.
    pub eigenvectors: DMatrix<f64>,
    pub n_discarded: usize,
    /// Ratio of largest to smallest retained overlap eigenvalue.
    pub s_condition: f64,
    /// Relative backward error ‖P(Hx − λSx)‖ / (‖x‖ (max|H| + |λ| max|S|)),
    /// P projecting on the retained overlap directions. Components along
    /// discarded directions are not resolved by the reduced problem.
    pub residuals: Vec<f64>,
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    eigenvalues: &'a [f64],
    n_discarded: usize,
    s_condition: f64,
    residual_max: f64,
}

impl SpectrumResult {
    pub fn residual_max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&SpectrumJson {
            eigenvalues: &self.eigenvalues,
            n_discarded: self.n_discarded,
            s_condition: self.s_condition,
            residual_max: self.residual_max(),
        })
        .map_err(|e| Error::Io(e.to_string()))
    }

    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        self.eigenvectors.column(k).into_owned()
    }
}

/// Dense symmetric eigendecomposition, eigenvalues ascending.
fn sorted_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let a = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let eig = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
    let (s, u) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values = order.iter().map(|&k| s[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok((values, vectors))
}

fn fix_sign(mut c: nalgebra::DVectorViewMut<f64>) {
    let scale = c.amax();
    if let Some(first) = c.iter().find(|x| x.abs() > 1e-12 * scale).copied() {
        if first < 0.0 {
            c.neg_mut();
        }
    }
}

pub fn solve_pencil(pencil: &Pencil, opts: &SolveOptions) -> Result<SpectrumResult> {
    let n = pencil.dim();
    if n == 0 {
        return Err(Error::Input("empty pencil".into()));
    }
    if pencil.s.iter().chain(pencil.h.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Input("pencil has non-finite entries".into()));
    }
    let (sigma, u) = sorted_eigen(&pencil.s)?;
    let s_max = sigma[n - 1];
    let cut = opts.overlap_threshold * s_max;
    let keep: Vec<usize> = (0..n).filter(|&k| sigma[k] >= cut && sigma[k] > 0.0).collect();
    if keep.is_empty() {
        return Err(Error::DegenerateBasis { threshold: opts.overlap_threshold });
    }
    let m = keep.len();
    let u_keep = DMatrix::from_fn(n, m, |i, j| u[(i, keep[j])]);
    let x = DMatrix::from_fn(n, m, |i, j| u[(i, keep[j])] / sigma[keep[j]].sqrt());

    let mut hp = x.transpose() * &pencil.h * &x;
    hp = (&hp + hp.transpose()) * 0.5;
    let (values, y) = sorted_eigen(&hp)?;
    let mut c = &x * y;
    for k in 0..m {
        fix_sign(c.column_mut(k));
    }

    let h_max = pencil.h.amax();
    let s_max_entry = pencil.s.amax();
    let hc = &pencil.h * &c;
    let sc = &pencil.s * &c;
    let residuals: Vec<f64> = (0..m)
        .map(|k| {
            let r = hc.column(k) - sc.column(k) * values[k];
            let scale = c.column(k).norm() * (h_max + values[k].abs() * s_max_entry);
            (u_keep.transpose() * r).norm() / scale
        })
        .collect();
    let s_condition = s_max / sigma[keep[0]];
    // canonical orthogonalisation is backward stable only to O(ε·κ(S))
    let tolerance = opts.residual_tolerance.max(CONDITIONING_SLACK * f64::EPSILON * s_condition);
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if !(worst <= tolerance) {
        return Err(Error::SolverAccuracy { residual: worst, tolerance });
    }
    Ok(SpectrumResult {
        eigenvalues: values,
        eigenvectors: c,
        n_discarded: n - m,
        s_condition,
        residuals,
    })
}

/// Eigenvalues strictly inside (−1 + margin, 1 − margin), with their indices.
pub fn gap_eigenvalues(result: &SpectrumResult, margin: f64) -> Vec<(usize, f64)> {
    result
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, l)| *l > -1.0 + margin && *l < 1.0 - margin)
        .collect()
}
